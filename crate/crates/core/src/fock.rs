//! Two-frequency-mode photonic states in a truncated Fock basis and the
//! reduced-density-operator channel induced by the medium.
//!
//! States live on a per-mode cutoff `nmax`, flattened over the pair index
//! `(n_p, n_s)`. The channel is evaluated two independent ways: the
//! normally ordered operator expansion ([`apply_channel`]) and a four-mode
//! unitary dilation traced over two loss modes ([`apply_channel_dilation`]).

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::medium::TransferMatrix;

const HERMITICITY_TOL: f64 = 1e-8;
const CAPACITY_TAIL_TOL: f64 = 1e-9;

/// Truncated two-mode photon-number density matrix.
///
/// The stored matrix is the ordinary density matrix over the flattened pair
/// index; `element(m_p, m_s, n_p, n_s)` returns ⟨n_p n_s|ρ|m_p m_s⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    nmax: usize,
    mat: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    pub fn vacuum(nmax: usize) -> Self {
        let dim = (nmax + 1) * (nmax + 1);
        let mut mat = DMatrix::zeros(dim, dim);
        mat[(0, 0)] = Complex64::new(1.0, 0.0);
        FockDensityMatrix { nmax, mat }
    }

    /// |n_p n_s⟩⟨n_p n_s|.
    pub fn fock_state(nmax: usize, n_p: usize, n_s: usize) -> Result<Self> {
        if n_p > nmax || n_s > nmax {
            return Err(Error::Capacity {
                nmax,
                photons: n_p.max(n_s),
            });
        }
        let dim = (nmax + 1) * (nmax + 1);
        let mut mat = DMatrix::zeros(dim, dim);
        let i = pair_index(nmax, n_p, n_s);
        mat[(i, i)] = Complex64::new(1.0, 0.0);
        Ok(FockDensityMatrix { nmax, mat })
    }

    pub fn from_pure(state: &PureTwoModeState) -> Self {
        let mat = &state.amps * state.amps.adjoint();
        FockDensityMatrix {
            nmax: state.nmax,
            mat,
        }
    }

    /// Truncated |β_p⟩ ⊗ |β_s⟩. The truncation tail is simply dropped, so
    /// the trace falls slightly short of one for large amplitudes.
    pub fn coherent(nmax: usize, beta_p: Complex64, beta_s: Complex64) -> Self {
        let amps_p = coherent_amplitudes(nmax, beta_p);
        let amps_s = coherent_amplitudes(nmax, beta_s);
        let dim = (nmax + 1) * (nmax + 1);
        let mut vec = DVector::zeros(dim);
        for n_p in 0..=nmax {
            for n_s in 0..=nmax {
                vec[pair_index(nmax, n_p, n_s)] = amps_p[n_p] * amps_s[n_s];
            }
        }
        let mat = &vec * vec.adjoint();
        FockDensityMatrix { nmax, mat }
    }

    pub fn from_matrix(nmax: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let dim = (nmax + 1) * (nmax + 1);
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::domain(format!(
                "matrix is {}x{}, expected {dim}x{dim} for nmax = {nmax}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(FockDensityMatrix { nmax, mat })
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// ⟨n_p n_s|ρ|m_p m_s⟩ (the ρ^{PS}_{m_p m_s n_p n_s} element).
    pub fn element(&self, m_p: usize, m_s: usize, n_p: usize, n_s: usize) -> Complex64 {
        self.mat[(
            pair_index(self.nmax, n_p, n_s),
            pair_index(self.nmax, m_p, m_s),
        )]
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// max |ρ − ρ†| over elements.
    pub fn hermiticity_error(&self) -> f64 {
        let adj = self.mat.adjoint();
        (&self.mat - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.mat + self.mat.adjoint()).scale(0.5);
        let eig = nalgebra::SymmetricEigen::new(herm);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest total photon number that carries any support (exact nonzeros).
    pub fn max_total_photons(&self) -> usize {
        let mut t = 0;
        for n_p in 0..=self.nmax {
            for n_s in 0..=self.nmax {
                let i = pair_index(self.nmax, n_p, n_s);
                let has_support = (0..self.dim()).any(|j| {
                    self.mat[(i, j)] != Complex64::new(0.0, 0.0)
                        || self.mat[(j, i)] != Complex64::new(0.0, 0.0)
                });
                if has_support {
                    t = t.max(n_p + n_s);
                }
            }
        }
        t
    }

    /// Diagonal probability mass sitting above total photon number `cut`.
    fn tail_mass_above(&self, cut: usize) -> f64 {
        let mut mass = 0.0;
        for n_p in 0..=self.nmax {
            for n_s in 0..=self.nmax {
                if n_p + n_s > cut {
                    let i = pair_index(self.nmax, n_p, n_s);
                    mass += self.mat[(i, i)].re.abs();
                }
            }
        }
        mass
    }

    /// Elementwise max |self − other|; cutoffs must agree.
    pub fn max_abs_diff(&self, other: &FockDensityMatrix) -> f64 {
        assert_eq!(self.nmax, other.nmax, "cutoff mismatch");
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Complex amplitudes of the probe and signal coherent fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentPair {
    pub beta_p: Complex64,
    pub beta_s: Complex64,
}

/// A normalized pure state over the two frequency modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureTwoModeState {
    nmax: usize,
    amps: DVector<Complex64>,
}

impl PureTwoModeState {
    /// Builds a state from sparse amplitudes without renormalizing.
    pub fn from_amplitudes<I>(nmax: usize, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), Complex64)>,
    {
        let dim = (nmax + 1) * (nmax + 1);
        let mut amps = DVector::zeros(dim);
        for ((n_p, n_s), amp) in amplitudes {
            if n_p > nmax || n_s > nmax {
                return Err(Error::Capacity {
                    nmax,
                    photons: n_p.max(n_s),
                });
            }
            amps[pair_index(nmax, n_p, n_s)] += amp;
        }
        Ok(PureTwoModeState { nmax, amps })
    }

    pub fn basis_state(nmax: usize, n_p: usize, n_s: usize) -> Result<Self> {
        Self::from_amplitudes(nmax, [((n_p, n_s), Complex64::new(1.0, 0.0))])
    }

    /// (|1_p 0_s⟩ + u e^{−iφ_u} |0_p 1_s⟩)/√(1 + u²), the two-color qubit.
    pub fn two_color_qubit(nmax: usize, u: f64, phi_u: f64) -> Result<Self> {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::domain(format!("qubit amplitude ratio u must be >= 0, got {u}")));
        }
        let norm = (1.0 + u * u).sqrt();
        Self::from_amplitudes(
            nmax,
            [
                ((1, 0), Complex64::new(1.0 / norm, 0.0)),
                ((0, 1), Complex64::from_polar(u / norm, -phi_u)),
            ],
        )
    }

    /// (|2_p 0_s⟩ + e^{iφ} |0_p 2_s⟩)/√2, the two-photon NOON state.
    pub fn noon(nmax: usize, phase: f64) -> Result<Self> {
        let inv = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::from_amplitudes(
            nmax,
            [
                ((2, 0), inv),
                ((0, 2), inv * Complex64::from_polar(1.0, phase)),
            ],
        )
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn amplitude(&self, n_p: usize, n_s: usize) -> Complex64 {
        self.amps[pair_index(self.nmax, n_p, n_s)]
    }
}

fn pair_index(nmax: usize, n_p: usize, n_s: usize) -> usize {
    n_p * (nmax + 1) + n_s
}

fn coherent_amplitudes(nmax: usize, beta: Complex64) -> Vec<Complex64> {
    let weight = (-0.5 * beta.norm_sqr()).exp();
    let mut amps = Vec::with_capacity(nmax + 1);
    let mut cur = Complex64::new(weight, 0.0);
    amps.push(cur);
    for n in 1..=nmax {
        cur = cur * beta / (n as f64).sqrt();
        amps.push(cur);
    }
    amps
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Truncated two-mode annihilation operators a_p, a_s at cutoff `nmax`.
fn annihilation_operators(nmax: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let dim = (nmax + 1) * (nmax + 1);
    let mut ap = DMatrix::zeros(dim, dim);
    let mut as_ = DMatrix::zeros(dim, dim);
    for n_p in 0..=nmax {
        for n_s in 0..=nmax {
            let col = pair_index(nmax, n_p, n_s);
            if n_p > 0 {
                ap[(pair_index(nmax, n_p - 1, n_s), col)] = Complex64::new((n_p as f64).sqrt(), 0.0);
            }
            if n_s > 0 {
                as_[(pair_index(nmax, n_p, n_s - 1), col)] =
                    Complex64::new((n_s as f64).sqrt(), 0.0);
            }
        }
    }
    (ap, as_)
}

fn check_capacity(rho: &FockDensityMatrix) -> Result<()> {
    let tail = rho.tail_mass_above(rho.nmax);
    if tail > CAPACITY_TAIL_TOL {
        return Err(Error::Capacity {
            nmax: rho.nmax,
            photons: rho.max_total_photons(),
        });
    }
    Ok(())
}

/// Applies the medium channel through the normally ordered operator
/// expansion of the output matrix elements.
///
/// For each output element the double sum over (l_p, l_s) terminates once
/// the annihilation count exceeds the input's photon support, so Fock-state
/// inputs are evaluated exactly. The channel is trace preserving: photons
/// lost to the medium reappear in lower-number sectors.
pub fn apply_channel(tm: &TransferMatrix, rho_in: &FockDensityMatrix) -> Result<FockDensityMatrix> {
    if rho_in.hermiticity_error() > HERMITICITY_TOL {
        return Err(Error::domain("input density matrix is not Hermitian".to_string()));
    }
    check_capacity(rho_in)?;
    let out = channel_on_hermitian(tm, rho_in.nmax, &rho_in.mat);
    FockDensityMatrix::from_matrix(rho_in.nmax, out)
}

/// Channel action on an arbitrary Hermitian operator (weights may be
/// negative); used by [`apply_channel`] and the Choi-matrix construction.
fn channel_on_hermitian(
    tm: &TransferMatrix,
    nmax: usize,
    herm: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let dim = (nmax + 1) * (nmax + 1);
    let mut out = DMatrix::zeros(dim, dim);
    let symm = (herm + herm.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(symm);
    let scale = eig.eigenvalues.iter().map(|w| w.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return out;
    }
    for (k, &w) in eig.eigenvalues.iter().enumerate() {
        if w.abs() <= 1e-14 * scale {
            continue;
        }
        let v = eig.eigenvectors.column(k).into_owned();
        accumulate_channel_on_pure(tm, nmax, &v, w, &mut out);
    }
    out
}

/// Adds `weight * channel(|v⟩⟨v|)` into `out`.
///
/// With f = A* a_p + B* a_s and g = C* a_p + D* a_s, every output element is
/// a finite sum of inner products ⟨f^a g^b v | f^c g^d v⟩, so only
/// annihilation operators ever act on the state and no cutoff headroom is
/// needed.
fn accumulate_channel_on_pure(
    tm: &TransferMatrix,
    nmax: usize,
    v: &DVector<Complex64>,
    weight: f64,
    out: &mut DMatrix<Complex64>,
) {
    let (ap, as_) = annihilation_operators(nmax);
    let f = ap.map(|z| z * tm.a.conj()) + as_.map(|z| z * tm.b.conj());
    let g = ap.map(|z| z * tm.c.conj()) + as_.map(|z| z * tm.d.conj());

    // Total photon support of this vector bounds every annihilation chain.
    let t = (0..v.len())
        .filter(|&i| v[i] != Complex64::new(0.0, 0.0))
        .map(|i| i / (nmax + 1) + i % (nmax + 1))
        .max()
        .unwrap_or(0);

    // V[a][b] = f^a g^b |v⟩ for a + b <= t (f and g commute).
    let mut vecs: Vec<Vec<Option<DVector<Complex64>>>> = vec![vec![None; t + 2]; t + 2];
    vecs[0][0] = Some(v.clone());
    for a in 0..=t {
        for b in 0..=(t - a) {
            if a == 0 && b == 0 {
                continue;
            }
            let prev = if a > 0 {
                let p = vecs[a - 1][b].as_ref().unwrap();
                &f * p
            } else {
                let p = vecs[a][b - 1].as_ref().unwrap();
                &g * p
            };
            vecs[a][b] = Some(prev);
        }
    }
    // Gram[(a,b),(c,d)] = <f^a g^b v | f^c g^d v>, tabulated up front.
    let stride = t + 2;
    let pid = |a: usize, b: usize| a * stride + b;
    let mut gram = vec![Complex64::new(0.0, 0.0); stride * stride * stride * stride];
    for a in 0..=t {
        for b in 0..=(t - a) {
            for c in 0..=t {
                for d in 0..=(t - c) {
                    gram[pid(a, b) * stride * stride + pid(c, d)] =
                        vecs[a][b].as_ref().unwrap().dotc(vecs[c][d].as_ref().unwrap());
                }
            }
        }
    }
    let gram_entry = |a: usize, b: usize, c: usize, d: usize| -> Complex64 {
        if a + b > t || c + d > t {
            return Complex64::new(0.0, 0.0);
        }
        gram[pid(a, b) * stride * stride + pid(c, d)]
    };

    for n_p in 0..=nmax {
        for n_s in 0..=nmax.min(t.saturating_sub(n_p)) {
            for m_p in 0..=nmax {
                for m_s in 0..=nmax.min(t.saturating_sub(m_p)) {
                    if n_p + n_s > t || m_p + m_s > t {
                        continue;
                    }
                    let norm = (factorial(m_p) * factorial(m_s) * factorial(n_p) * factorial(n_s))
                        .sqrt();
                    let mut acc = Complex64::new(0.0, 0.0);
                    for l_p in 0..=(t.saturating_sub(n_p.max(m_p))) {
                        for l_s in 0..=(t.saturating_sub(n_s.max(m_s))) {
                            let sign = if (l_p + l_s) % 2 == 0 { 1.0 } else { -1.0 };
                            let chi = sign / (factorial(l_p) * factorial(l_s) * norm);
                            let term = gram_entry(l_p + m_p, l_s + m_s, l_p + n_p, l_s + n_s);
                            acc += chi * term;
                        }
                    }
                    out[(pair_index(nmax, n_p, n_s), pair_index(nmax, m_p, m_s))] +=
                        weight * acc;
                }
            }
        }
    }
}

/// Completes the 2×2 mode map into a 4×4 unitary over two loss modes by
/// singular-value completion.
///
/// The upper-left block is the map the medium applies to state amplitudes
/// (the conjugated matrix elements, as in the coherent-output relation).
pub fn dilation_unitary(tm: &TransferMatrix) -> Result<DMatrix<Complex64>> {
    let s = DMatrix::from_row_slice(2, 2, &[tm.a.conj(), tm.b.conj(), tm.c.conj(), tm.d.conj()]);
    let svd = s.clone().svd(true, true);
    let w = svd.u.as_ref().expect("svd requested u");
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let mut couplings = [0.0; 2];
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv > 1.0 + 1e-12 {
            return Err(Error::domain(format!(
                "mode map is active (singular value {sv} > 1); no passive dilation exists"
            )));
        }
        couplings[i] = (1.0 - sv * sv).max(0.0).sqrt();
    }
    let mut u4 = DMatrix::zeros(4, 4);
    // [[ S,        W·C      ]
    //  [ -C·V†,    diag(s)  ]]  with C = diag(sqrt(1 - s_i^2)).
    for i in 0..2 {
        for j in 0..2 {
            u4[(i, j)] = s[(i, j)];
            u4[(i, 2 + j)] = w[(i, j)] * couplings[j];
            u4[(2 + i, j)] = -couplings[i] * v_t[(i, j)];
        }
        u4[(2 + i, 2 + i)] = Complex64::new(svd.singular_values[i], 0.0);
    }
    Ok(u4)
}

/// Independent oracle for [`apply_channel`]: embeds the state on four modes,
/// applies the Fock-space representation of the dilation unitary, and traces
/// out the loss modes.
pub fn apply_channel_dilation(
    tm: &TransferMatrix,
    rho_in: &FockDensityMatrix,
) -> Result<FockDensityMatrix> {
    if rho_in.hermiticity_error() > HERMITICITY_TOL {
        return Err(Error::domain("input density matrix is not Hermitian".to_string()));
    }
    check_capacity(rho_in)?;
    let u4 = dilation_unitary(tm)?;
    let nmax = rho_in.nmax;
    let t = rho_in.max_total_photons();

    // Transformed amplitudes of each two-mode input basis state, keyed by
    // the loss-mode labels for the partial trace.
    type AmpMap = HashMap<[usize; 4], Complex64>;
    let mut transformed: HashMap<(usize, usize), AmpMap> = HashMap::new();
    for mu_p in 0..=nmax.min(t) {
        for mu_s in 0..=nmax.min(t - mu_p.min(t)) {
            if mu_p + mu_s > t {
                continue;
            }
            let mut amps: AmpMap = HashMap::new();
            amps.insert([0, 0, 0, 0], Complex64::new(1.0, 0.0));
            for (count, col) in [(mu_p, 0), (mu_s, 1)] {
                for _ in 0..count {
                    let mut next: AmpMap = HashMap::new();
                    for (occ, amp) in &amps {
                        for j in 0..4 {
                            let coeff = u4[(j, col)];
                            if coeff == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            let mut occ2 = *occ;
                            occ2[j] += 1;
                            let add = coeff * (occ2[j] as f64).sqrt() * amp;
                            *next.entry(occ2).or_insert(Complex64::new(0.0, 0.0)) += add;
                        }
                    }
                    amps = next;
                }
            }
            let norm = (factorial(mu_p) * factorial(mu_s)).sqrt();
            for amp in amps.values_mut() {
                *amp /= norm;
            }
            transformed.insert((mu_p, mu_s), amps);
        }
    }

    let dim = (nmax + 1) * (nmax + 1);
    let mut out = DMatrix::zeros(dim, dim);
    for ((kp, ks), ket_amps) in &transformed {
        for ((bp, bs), bra_amps) in &transformed {
            let weight = rho_in.mat[(
                pair_index(nmax, *kp, *ks),
                pair_index(nmax, *bp, *bs),
            )];
            if weight == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (occ_k, amp_k) in ket_amps {
                if occ_k[0] > nmax || occ_k[1] > nmax {
                    continue;
                }
                for (occ_b, amp_b) in bra_amps {
                    if occ_b[2] != occ_k[2] || occ_b[3] != occ_k[3] {
                        continue;
                    }
                    if occ_b[0] > nmax || occ_b[1] > nmax {
                        continue;
                    }
                    let row = pair_index(nmax, occ_k[0], occ_k[1]);
                    let col = pair_index(nmax, occ_b[0], occ_b[1]);
                    out[(row, col)] += weight * amp_k * amp_b.conj();
                }
            }
        }
    }
    FockDensityMatrix::from_matrix(nmax, out)
}

/// Coherent states stay coherent: β′_p = A*β_p + B*β_s, β′_s = C*β_p + D*β_s.
pub fn coherent_output(tm: &TransferMatrix, fields: &CoherentPair) -> CoherentPair {
    CoherentPair {
        beta_p: tm.a.conj() * fields.beta_p + tm.b.conj() * fields.beta_s,
        beta_s: tm.c.conj() * fields.beta_p + tm.d.conj() * fields.beta_s,
    }
}

/// Uhlmann fidelity against a pure target: F = √(⟨ψ|ρ|ψ⟩), with ρ
/// trace-normalized first.
pub fn uhlmann_fidelity(rho: &FockDensityMatrix, target: &PureTwoModeState) -> Result<f64> {
    if (target.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!(
            "fidelity target must be normalized (norm = {})",
            target.norm()
        )));
    }
    if rho.nmax != target.nmax {
        return Err(Error::domain("state and target cutoffs differ".to_string()));
    }
    let trace = rho.trace().re;
    if trace <= 0.0 {
        return Err(Error::domain("state has non-positive trace".to_string()));
    }
    let overlap = target.amps.dotc(&(&rho.mat * &target.amps)).re / trace;
    Ok(overlap.clamp(0.0, 1.0).sqrt())
}

/// Diagonal photon-number probabilities keyed by (n_p, n_s).
pub fn mode_probabilities(rho: &FockDensityMatrix) -> BTreeMap<(usize, usize), f64> {
    let mut map = BTreeMap::new();
    for n_p in 0..=rho.nmax {
        for n_s in 0..=rho.nmax {
            let i = pair_index(rho.nmax, n_p, n_s);
            map.insert((n_p, n_s), rho.mat[(i, i)].re);
        }
    }
    map
}

/// Choi matrix of the channel co-restricted to the `nmax` space, ordered as
/// Σ_{ij} |i⟩⟨j| ⊗ channel(|i⟩⟨j|). The channel itself is evaluated with a
/// doubled working cutoff so no basis element overruns the capacity check.
pub fn choi_matrix(tm: &TransferMatrix, nmax: usize) -> Result<DMatrix<Complex64>> {
    let dim = (nmax + 1) * (nmax + 1);
    let work_nmax = 2 * nmax;
    let work_dim = (work_nmax + 1) * (work_nmax + 1);
    let embed = |n_p: usize, n_s: usize| pair_index(work_nmax, n_p, n_s);
    let states: Vec<(usize, usize)> = (0..=nmax)
        .flat_map(|n_p| (0..=nmax).map(move |n_s| (n_p, n_s)))
        .collect();

    let mut choi = DMatrix::zeros(dim * dim, dim * dim);
    for (i, &(ip, is)) in states.iter().enumerate() {
        for (j, &(jp, js)) in states.iter().enumerate() {
            if j < i {
                continue;
            }
            // channel(E_ij) from the Hermitian combinations
            // H1 = E_ij + E_ji and H2 = i E_ij - i E_ji.
            let one = Complex64::new(1.0, 0.0);
            let im = Complex64::new(0.0, 1.0);
            let mut h1 = DMatrix::zeros(work_dim, work_dim);
            let mut h2 = DMatrix::zeros(work_dim, work_dim);
            let (r, c) = (embed(ip, is), embed(jp, js));
            h1[(r, c)] += one;
            h1[(c, r)] += one;
            h2[(r, c)] += im;
            h2[(c, r)] -= im;
            let ch1 = channel_on_hermitian(tm, work_nmax, &h1);
            let ch2 = channel_on_hermitian(tm, work_nmax, &h2);
            // E_ij = (H1 - i H2)/2.
            let ch_ij = (&ch1 - ch2.map(|z| z * im)).scale(0.5);
            for (k, &(kp, ks)) in states.iter().enumerate() {
                for (l, &(lp, ls)) in states.iter().enumerate() {
                    let val = ch_ij[(embed(kp, ks), embed(lp, ls))];
                    choi[(i * dim + k, j * dim + l)] = val;
                    if j != i {
                        choi[(j * dim + l, i * dim + k)] = val.conj();
                    }
                }
            }
        }
    }
    Ok(choi)
}
