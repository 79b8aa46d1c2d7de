//! Gate-level physics built on the transfer matrix: coherent phase response,
//! Hadamard gates on two-color qubits, frequency-domain Hong–Ou–Mandel
//! interference, NOON-state fidelity, and SWAP gate metrics.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    apply_channel, uhlmann_fidelity, FockDensityMatrix, PureTwoModeState,
};
use crate::medium::{transfer_matrix, MediumParams, TransferMatrix};

/// Which single-photon output mode a Hadamard condition targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Probe,
    Signal,
}

/// Transmittances and phase shifts of the two coherent output fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentResponse {
    pub t_p: f64,
    pub t_s: f64,
    /// Probe phase shift in (−π, π].
    pub dphi_p: f64,
    /// Signal phase shift in (−π, π].
    pub dphi_s: f64,
}

/// Single-photon output statistics for a two-color qubit input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitReport {
    pub p_1p0s: f64,
    pub p_0p1s: f64,
    pub p_loss: f64,
    /// √P against the dominant one-color output mode.
    pub fidelity_sqrt: f64,
    /// P against the dominant one-color output mode.
    pub fidelity_linear: f64,
}

/// Two-photon output statistics for the |1_p 1_s⟩ input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomReport {
    pub p_2p0s: f64,
    pub p_0p2s: f64,
    pub p_1p1s: f64,
    pub loss_sector: f64,
    /// Uhlmann fidelity of the full channel output against the two-photon
    /// NOON state with relative phase `noon_phase`.
    pub noon_fidelity: f64,
    /// −2(φ_c − φ_d).
    pub noon_phase: f64,
}

/// SWAP gate metrics over the four computational inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapReport {
    /// Uhlmann fidelity against the ideal swapped target, keyed by input
    /// label ("0p0s", "1p0s", "0p1s", "1p1s").
    pub per_input_fidelity: BTreeMap<String, f64>,
    pub mean_fidelity: f64,
    /// Population standard deviation over the four inputs.
    pub std_fidelity: f64,
    /// Output-sector probabilities per input; each row sums to one.
    pub truth_table: BTreeMap<String, BTreeMap<String, f64>>,
    /// Mean probability of the exact swapped computational outcome.
    pub mean_success: f64,
}

fn check_ratio(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::domain(format!("{name} must be positive and finite, got {value}")));
    }
    Ok(())
}

/// Effective matrix elements seen by state amplitudes, with the control and
/// driving phases folded in: B′* = B* e^{−iθ}, C′* = C* e^{+iθ}, θ = φ_c−φ_d.
fn primed_conjugates(tm: &TransferMatrix) -> (Complex64, Complex64, Complex64, Complex64) {
    let theta = tm.phase_diff();
    let bp = tm.b.conj() * Complex64::from_polar(1.0, -theta);
    let cp = tm.c.conj() * Complex64::from_polar(1.0, theta);
    (tm.a.conj(), bp, cp, tm.d.conj())
}

/// Transmittances T_p, T_s and phase shifts of two coherent inputs with
/// amplitude ratio `u_beta` and relative phase `phi_r`.
pub fn coherent_response(
    params: &MediumParams,
    u_beta: f64,
    phi_r: f64,
) -> Result<CoherentResponse> {
    check_ratio("u_beta", u_beta)?;
    if !phi_r.is_finite() {
        return Err(Error::domain(format!("phi_r must be finite, got {phi_r}")));
    }
    let tm = transfer_matrix(params)?;
    let (a, bp, cp, d) = primed_conjugates(&tm);
    let probe = a + bp * u_beta * Complex64::from_polar(1.0, -phi_r);
    let signal = cp * Complex64::from_polar(1.0, phi_r) / u_beta + d;
    Ok(CoherentResponse {
        t_p: probe.norm_sqr(),
        t_s: signal.norm_sqr(),
        dphi_p: probe.arg(),
        dphi_s: signal.arg(),
    })
}

/// Single-photon output probabilities for the two-color qubit
/// (|1_p 0_s⟩ + u e^{−iφ_u} |0_p 1_s⟩)/√(1 + u²).
pub fn qubit_probabilities(params: &MediumParams, u: f64, phi_u: f64) -> Result<QubitReport> {
    if !u.is_finite() || u < 0.0 {
        return Err(Error::domain(format!("u must be >= 0 and finite, got {u}")));
    }
    if !phi_u.is_finite() {
        return Err(Error::domain(format!("phi_u must be finite, got {phi_u}")));
    }
    let tm = transfer_matrix(params)?;
    let (a, bp, cp, d) = primed_conjugates(&tm);
    let phi_r = phi_u - tm.phase_diff();
    let norm = 1.0 + u * u;
    let amp_p = a + bp * u * Complex64::from_polar(1.0, -phi_r);
    let amp_s = cp * Complex64::from_polar(1.0, phi_r) + d * u;
    let p_1p0s = amp_p.norm_sqr() / norm;
    let p_0p1s = amp_s.norm_sqr() / norm;
    let fidelity_linear = p_1p0s.max(p_0p1s);
    Ok(QubitReport {
        p_1p0s,
        p_0p1s,
        p_loss: 1.0 - p_1p0s - p_0p1s,
        fidelity_sqrt: fidelity_linear.sqrt(),
        fidelity_linear,
    })
}

/// Detuning (in units of Γ) solving the Hadamard balance condition
/// |A*| = u|B′*| (probe) or |C′*| = u|D*| (signal) on (0, od].
///
/// The scan walks down from Δ = od, where the medium is nearly transparent,
/// and returns the first crossing found: the principal root. Below it the
/// transfer-matrix phase winds rapidly and the condition has spurious
/// low-detuning solutions with strong absorption.
pub fn hadamard_detuning(od: f64, u: f64, branch: Branch) -> Result<f64> {
    check_ratio("od", od)?;
    check_ratio("u", u)?;
    let f = |delta: f64| -> f64 {
        let tm = transfer_matrix(&MediumParams::new(od, delta)).expect("valid params");
        match branch {
            Branch::Probe => tm.a.norm() - u * tm.b.norm(),
            Branch::Signal => tm.c.norm() - u * tm.d.norm(),
        }
    };
    let n = 4096;
    let mut hi = od;
    let mut f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    for k in 1..=n {
        let lo = od * (n - k) as f64 / n as f64;
        let f_lo = f(lo.max(od * 1e-9));
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi.signum() != f_lo.signum() {
            return Ok(refine_root(&f, lo, hi));
        }
        hi = lo;
        f_hi = f_lo;
    }
    Err(Error::NoSolution)
}

/// Bisection to a narrow bracket followed by secant polishing.
fn refine_root<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-8 {
            break;
        }
    }
    let mut x0 = lo;
    let mut x1 = hi;
    let mut f0 = f(x0);
    let mut f1 = f(x1);
    for _ in 0..8 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || x2 < lo - 1e-6 || x2 > hi + 1e-6 {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if (x1 - x0).abs() < 1e-12 {
            break;
        }
    }
    x1
}

/// Two-photon output probabilities and NOON fidelity for the |1_p 1_s⟩ input.
pub fn hom_probabilities(params: &MediumParams) -> Result<HomReport> {
    let tm = transfer_matrix(params)?;
    let p_2p0s = 2.0 * (tm.a.conj() * tm.b.conj()).norm_sqr();
    let p_0p2s = 2.0 * (tm.c.conj() * tm.d.conj()).norm_sqr();
    let p_1p1s = (tm.a.conj() * tm.d.conj() + tm.b.conj() * tm.c.conj()).norm_sqr();
    let noon_phase = -2.0 * tm.phase_diff();
    let rho = apply_channel(&tm, &FockDensityMatrix::fock_state(4, 1, 1)?)?;
    let target = PureTwoModeState::noon(4, noon_phase)?;
    let noon_fidelity = uhlmann_fidelity(&rho, &target)?;
    Ok(HomReport {
        p_2p0s,
        p_0p2s,
        p_1p1s,
        loss_sector: 1.0 - p_2p0s - p_0p2s - p_1p1s,
        noon_fidelity,
        noon_phase,
    })
}

/// [`hom_probabilities`] at the NOON operating point; same report.
pub fn noon_report(params: &MediumParams) -> Result<HomReport> {
    hom_probabilities(params)
}

/// SWAP gate metrics at the given medium parameters (intended operating
/// point Δ = od/2π, but any detuning is accepted).
pub fn swap_report(params: &MediumParams) -> Result<SwapReport> {
    let tm = transfer_matrix(params)?;
    let nmax = 2;
    // (label, input state, swapped target state, target phase)
    type SwapCase = (&'static str, (usize, usize), (usize, usize), Complex64);
    let inputs: [SwapCase; 4] = [
        ("0p0s", (0, 0), (0, 0), Complex64::new(1.0, 0.0)),
        // Converted photons pick up the deterministic transfer phases.
        ("1p0s", (1, 0), (0, 1), Complex64::from_polar(1.0, tm.c.conj().arg())),
        ("0p1s", (0, 1), (1, 0), Complex64::from_polar(1.0, tm.b.conj().arg())),
        (
            "1p1s",
            (1, 1),
            (1, 1),
            Complex64::from_polar(
                1.0,
                (tm.a.conj() * tm.d.conj() + tm.b.conj() * tm.c.conj()).arg(),
            ),
        ),
    ];

    let mut per_input_fidelity = BTreeMap::new();
    let mut truth_table = BTreeMap::new();
    let mut success = 0.0;
    for (label, input, target, phase) in inputs {
        let rho_in = FockDensityMatrix::fock_state(nmax, input.0, input.1)?;
        let rho_out = apply_channel(&tm, &rho_in)?;
        let target_state = PureTwoModeState::from_amplitudes(nmax, [(target, phase)])?;
        let fidelity = uhlmann_fidelity(&rho_out, &target_state)?;
        per_input_fidelity.insert(label.to_string(), fidelity);

        let mut row = BTreeMap::new();
        for n_p in 0..=nmax {
            for n_s in 0..=nmax {
                let prob = rho_out.element(n_p, n_s, n_p, n_s).re;
                row.insert(format!("{n_p}p{n_s}s"), prob);
            }
        }
        success += row[&format!("{}p{}s", target.0, target.1)];
        truth_table.insert(label.to_string(), row);
    }

    let mean_fidelity = per_input_fidelity.values().sum::<f64>() / 4.0;
    let var = per_input_fidelity
        .values()
        .map(|f| (f - mean_fidelity).powi(2))
        .sum::<f64>()
        / 4.0;
    Ok(SwapReport {
        per_input_fidelity,
        mean_fidelity,
        std_fidelity: var.sqrt(),
        truth_table,
        mean_success: success / 4.0,
    })
}
