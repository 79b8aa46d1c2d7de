//! Linear response of the double-Λ EIT four-wave-mixing medium.
//!
//! The probe/signal creation operators propagate through the medium as
//! `a_out = e^{-ML} a_in` plus Langevin noise terms. Everything here is
//! parameterized by the optical depth, the one-photon detuning (in units of
//! the excited-state decay rate), and the two strong-field phases.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_adaptive, GaussLegendre};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Physical configuration of the medium.
///
/// `delta` is the one-photon detuning in units of `gamma`; `gamma` and
/// `length` only set the rate and length scales and default to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Dimensionless optical depth α.
    pub od: f64,
    /// One-photon detuning Δ in units of Γ. May be zero or negative.
    pub delta: f64,
    /// Excited-state decay rate Γ (the reference rate).
    pub gamma: f64,
    /// Coupling-field phase φ_c (radians).
    pub phi_c: f64,
    /// Driving-field phase φ_d (radians).
    pub phi_d: f64,
    /// Medium length L (normalized).
    pub length: f64,
}

impl MediumParams {
    pub fn new(od: f64, delta: f64) -> Self {
        MediumParams {
            od,
            delta,
            gamma: 1.0,
            phi_c: 0.0,
            phi_d: 0.0,
            length: 1.0,
        }
    }

    pub fn with_phases(mut self, phi_c: f64, phi_d: f64) -> Self {
        self.phi_c = phi_c;
        self.phi_d = phi_d;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_length(mut self, length: f64) -> Self {
        self.length = length;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.od.is_finite() || self.od < 0.0 {
            return Err(Error::domain(format!("od must be finite and >= 0, got {}", self.od)));
        }
        if !self.delta.is_finite() {
            return Err(Error::domain(format!("delta must be finite, got {}", self.delta)));
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 {
            return Err(Error::domain(format!("gamma must be finite and > 0, got {}", self.gamma)));
        }
        if !self.length.is_finite() || self.length <= 0.0 {
            return Err(Error::domain(format!(
                "length must be finite and > 0, got {}",
                self.length
            )));
        }
        if !self.phi_c.is_finite() || !self.phi_d.is_finite() {
            return Err(Error::domain("phases must be finite".to_string()));
        }
        Ok(())
    }

    /// φ_c − φ_d, the only phase combination the matrix elements depend on.
    pub fn phase_diff(&self) -> f64 {
        self.phi_c - self.phi_d
    }

    /// Exponent of the decaying eigenvalue branch: −2Λ_p L = iαΓ/(2(Δ − iΓ)).
    fn branch_exponent(&self) -> Complex64 {
        Complex64::new(0.0, 0.5 * self.od) / Complex64::new(self.delta, -1.0)
    }

    /// Field absorption exponent r = αΓ²/(2(Γ² + Δ²)); the antisymmetric
    /// noise mode carries amplitude e^{−r} through the medium.
    pub fn absorption_rate(&self) -> f64 {
        self.od / (2.0 * (1.0 + self.delta * self.delta))
    }
}

/// The 2×2 complex mode map of the medium, `e^{-ML} = [[A, B], [C, D]]`.
///
/// `a`/`d` are mode-preserving, `b`/`c` mode-converting. The strong-field
/// phases are carried along for downstream phase bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub phi_c: f64,
    pub phi_d: f64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        TransferMatrix {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
            phi_c: 0.0,
            phi_d: 0.0,
        }
    }

    pub fn phase_diff(&self) -> f64 {
        self.phi_c - self.phi_d
    }

    /// 1 − |A|² − |B|², the probe-row power deficit.
    pub fn loss_probe(&self) -> f64 {
        1.0 - self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// 1 − |C|² − |D|², the signal-row power deficit.
    pub fn loss_signal(&self) -> f64 {
        1.0 - self.c.norm_sqr() - self.d.norm_sqr()
    }

    /// Largest absolute elementwise difference to another matrix.
    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.c - other.c).norm(),
            (self.d - other.d).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Per-unit-length dispersion and coupling coefficients of the coupled
/// propagation equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationCoefficients {
    pub lambda_p: Complex64,
    pub lambda_s: Complex64,
    pub kappa_p: Complex64,
    pub kappa_s: Complex64,
}

/// Excited/ground-state populations entering the diffusion matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationSet {
    pub sigma11: f64,
    pub sigma33: f64,
    pub sigma44: f64,
}

impl PopulationSet {
    /// Weak-field limit: everything in the ground state |1⟩.
    pub fn ground() -> Self {
        PopulationSet {
            sigma11: 1.0,
            sigma33: 0.0,
            sigma44: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma11", self.sigma11),
            ("sigma33", self.sigma33),
            ("sigma44", self.sigma44),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("population {name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Langevin-noise coefficients for the transitions 21, 31, 41 of one field row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCoefficients {
    pub z21: Complex64,
    pub z31: Complex64,
    pub z41: Complex64,
}

/// ζ coefficients plus the normal/anti-normal diffusion matrices.
///
/// The 3×3 matrices are indexed by transition in the order (21, 31, 41).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub rabi: f64,
    pub zeta_p: NoiseCoefficients,
    pub zeta_s: NoiseCoefficients,
    pub d_normal: [[f64; 3]; 3],
    pub d_antinormal: [[f64; 3]; 3],
    pub populations: PopulationSet,
}

/// Result of the commutator/loss bookkeeping check: the propagated-noise
/// quadrature against the power deficit of the transfer matrix and against
/// the closed form (1 − e^{−2r})/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossIdentityReport {
    pub lhs_probe: f64,
    pub lhs_signal: f64,
    pub rhs_probe: f64,
    pub rhs_signal: f64,
    pub closed_form: f64,
    pub residual_probe: f64,
    pub residual_signal: f64,
}

/// Transfer matrix from the analytic matrix elements.
pub fn transfer_matrix(params: &MediumParams) -> Result<TransferMatrix> {
    params.validate()?;
    let e = params.branch_exponent().exp();
    let one = Complex64::new(1.0, 0.0);
    let theta = params.phase_diff();
    let a = 0.5 * (one + e);
    let b = 0.5 * (one - e) * Complex64::from_polar(1.0, -theta);
    let c = 0.5 * (one - e) * Complex64::from_polar(1.0, theta);
    Ok(TransferMatrix {
        a,
        b,
        c,
        d: a,
        phi_c: params.phi_c,
        phi_d: params.phi_d,
    })
}

/// Transfer matrix by exponentiating −M·L with the propagation coefficients.
///
/// M has eigenvalues 0 and 2Λ_p and satisfies M² = 2Λ_p·M, so
/// e^{−ML} = I + (e^{−2Λ_p L} − 1)/(2Λ_p) · M. This is an algebraically
/// independent route from [`transfer_matrix`].
pub fn transfer_matrix_expm(params: &MediumParams) -> Result<TransferMatrix> {
    params.validate()?;
    let m = expm_neg_m(params, params.length);
    Ok(TransferMatrix {
        a: m[0][0],
        b: m[0][1],
        c: m[1][0],
        d: m[1][1],
        phi_c: params.phi_c,
        phi_d: params.phi_d,
    })
}

/// e^{−M·s} for a propagation distance `s` inside the medium.
fn expm_neg_m(params: &MediumParams, s: f64) -> [[Complex64; 2]; 2] {
    let coeffs = propagation_coefficients_unchecked(params);
    let lambda = coeffs.lambda_p;
    let theta = params.phase_diff();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if lambda.norm() == 0.0 {
        return [[one, zero], [zero, one]];
    }
    let m = [
        [lambda, coeffs.kappa_p * Complex64::from_polar(1.0, -theta)],
        [coeffs.kappa_s * Complex64::from_polar(1.0, theta), coeffs.lambda_s],
    ];
    let factor = ((-2.0 * lambda * s).exp() - one) / (2.0 * lambda);
    [
        [one + factor * m[0][0], factor * m[0][1]],
        [factor * m[1][0], one + factor * m[1][1]],
    ]
}

fn propagation_coefficients_unchecked(params: &MediumParams) -> PropagationCoefficients {
    let lambda = Complex64::new(params.od * params.gamma / (4.0 * params.length), 0.0)
        / Complex64::new(params.gamma, params.delta * params.gamma);
    PropagationCoefficients {
        lambda_p: lambda,
        lambda_s: lambda,
        kappa_p: -lambda,
        kappa_s: -lambda,
    }
}

/// Λ_p = Λ_s = (αΓ/4L)/(Γ + iΔ) and κ_p = κ_s = −Λ_p.
pub fn propagation_coefficients(params: &MediumParams) -> Result<PropagationCoefficients> {
    params.validate()?;
    Ok(propagation_coefficients_unchecked(params))
}

/// ζ coefficients of the six Langevin noise terms, plus diffusion matrices in
/// the weak-field populations (⟨σ₁₁⟩ = 1, ⟨σ₃₃⟩ = ⟨σ₄₄⟩ = 0).
pub fn noise_coefficients(params: &MediumParams, rabi: f64) -> Result<NoiseModel> {
    params.validate()?;
    if !rabi.is_finite() || rabi <= 0.0 {
        return Err(Error::domain(format!("rabi must be finite and > 0, got {rabi}")));
    }
    let gamma = params.gamma;
    let delta = params.delta * gamma;
    let root = (params.od * gamma / (4.0 * params.length)).sqrt();
    let den = Complex64::new(gamma, delta);
    let theta = params.phase_diff();
    let base = root / den;

    let zeta_p = NoiseCoefficients {
        z21: I * root * Complex64::new(-2.0 * delta, gamma) / (den * rabi)
            * Complex64::from_polar(1.0, -params.phi_c),
        z31: -I * base,
        z41: I * base * Complex64::from_polar(1.0, -theta),
    };
    let zeta_s = NoiseCoefficients {
        z21: I * root * Complex64::new(0.0, gamma) / (den * rabi)
            * Complex64::from_polar(1.0, -params.phi_d),
        z31: I * base * Complex64::from_polar(1.0, theta),
        z41: -I * base,
    };
    let populations = PopulationSet::ground();
    let (d_normal, d_antinormal) = diffusion_matrices(gamma, &populations)?;
    Ok(NoiseModel {
        rabi,
        zeta_p,
        zeta_s,
        d_normal,
        d_antinormal,
        populations,
    })
}

/// A 3×3 diffusion matrix indexed by transition in the order (21, 31, 41).
pub type DiffusionMatrix = [[f64; 3]; 3];

/// Normal- and anti-normal-ordered diffusion matrices, indexed (21, 31, 41).
///
/// The normal matrix has the single entry D₂₁,₁₂ = (Γ/2)(⟨σ₃₃⟩ + ⟨σ₄₄⟩); the
/// anti-normal matrix is diag(0, Γ⟨σ₁₁⟩, Γ⟨σ₁₁⟩).
pub fn diffusion_matrices(
    gamma: f64,
    populations: &PopulationSet,
) -> Result<(DiffusionMatrix, DiffusionMatrix)> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::domain(format!("gamma must be finite and > 0, got {gamma}")));
    }
    populations.validate()?;
    let mut d_normal = [[0.0; 3]; 3];
    d_normal[0][0] = 0.5 * gamma * (populations.sigma33 + populations.sigma44);
    let mut d_antinormal = [[0.0; 3]; 3];
    d_antinormal[1][1] = gamma * populations.sigma11;
    d_antinormal[2][2] = gamma * populations.sigma11;
    Ok((d_normal, d_antinormal))
}

/// Integrates the anti-normal-ordered noise kernels over the medium and
/// compares them against the transfer-matrix power deficits and the closed
/// form (1 − e^{−2r})/2 with r = αΓ²/(2(Γ² + Δ²)).
///
/// The probe (signal) kernel is the probe-row (signal-row) component of
/// e^{−M(L−z)}·(ζ^p_jk, ζ^s_jk)ᵀ for jk ∈ {31, 41}, weighted by the
/// anti-normal diffusion entries Γ⟨σ₁₁⟩ with ⟨σ₁₁⟩ = 1.
pub fn loss_identity_check(params: &MediumParams, quad_points: usize) -> Result<LossIdentityReport> {
    params.validate()?;
    if quad_points < 16 {
        return Err(Error::domain(format!("quad_points must be >= 16, got {quad_points}")));
    }
    let tm = transfer_matrix(params)?;
    // rabi never enters the 31/41 coefficients; any positive value works here.
    let noise = noise_coefficients(params, 1.0)?;
    let length = params.length;
    let d1331 = noise.d_antinormal[1][1];
    let d1441 = noise.d_antinormal[2][2];

    let rule = GaussLegendre::new(quad_points);
    let row_integral = |row: usize| -> Result<f64> {
        integrate_adaptive(&rule, 0.0, length, 1e-13, |z| {
            let prop = expm_neg_m(params, length - z);
            let p31 = prop[row][0] * noise.zeta_p.z31 + prop[row][1] * noise.zeta_s.z31;
            let p41 = prop[row][0] * noise.zeta_p.z41 + prop[row][1] * noise.zeta_s.z41;
            p31.norm_sqr() * d1331 + p41.norm_sqr() * d1441
        })
    };
    let lhs_probe = row_integral(0)?;
    let lhs_signal = row_integral(1)?;

    let rhs_probe = tm.loss_probe();
    let rhs_signal = tm.loss_signal();
    let r = params.absorption_rate();
    let closed_form = 0.5 * (1.0 - (-2.0 * r).exp());
    Ok(LossIdentityReport {
        lhs_probe,
        lhs_signal,
        rhs_probe,
        rhs_signal,
        closed_form,
        residual_probe: (lhs_probe - rhs_probe).abs(),
        residual_signal: (lhs_signal - rhs_signal).abs(),
    })
}
