//! Reduced dynamical maps: Kraus sets from unitary dilations, the vectorized
//! map matrix, Choi conversion, complete-positivity and trace-preservation
//! verdicts, inversion and intermediate maps, and map inference from
//! input/output families.
//!
//! Vectorization is row-major throughout: vec(ρ)[i·d + j] = ρ[i, j]. That
//! choice is pinned by a golden test reproducing the published pair of map
//! and Choi matrices for the double-CNOT construction.

use alloc::format;

use alloc::vec::Vec;

use crate::eig::{eigh, Spectrum, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::gates::GateConvention;
use crate::matrix::{vec_norm, Complex64, ComplexMatrix, Slot};
use crate::state::DensityMatrix;
use crate::svd::{lstsq_minnorm, svd};

/// Default condition-number ceiling for map inversion. Separates the genuine
/// maximal-entanglement singularity from round-off.
pub const COND_LIMIT: f64 = 1e12;
/// Default relative tolerance for CP verdicts.
pub const CP_TOL: f64 = 1e-8;
/// Completeness tolerance for Kraus sets.
pub const KRAUS_TOL: f64 = 1e-9;

/// Dynamical map acting on row-major vectorized density matrices:
/// vec(ρ') = A · vec(ρ).
#[derive(Debug, Clone, PartialEq)]
pub struct AMatrix {
    matrix: ComplexMatrix,
    d_s: usize,
}

impl AMatrix {
    pub fn new(matrix: ComplexMatrix, d_s: usize) -> Result<Self> {
        let n = d_s * d_s;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "map matrix must be {n}x{n} for d_s={d_s}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix, d_s })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    /// Apply the map to a density matrix (no physicality check on the output).
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.d_s || rho.cols() != self.d_s {
            return Err(Error::DimensionMismatch(format!(
                "map on d_s={} applied to {}x{}",
                self.d_s,
                rho.rows(),
                rho.cols()
            )));
        }
        let out = self.matrix.mul_vec(rho.data());
        Ok(ComplexMatrix::new(self.d_s, self.d_s, out))
    }

    /// Compose: (self ∘ other), i.e. apply `other` first.
    pub fn compose(&self, other: &AMatrix) -> Result<AMatrix> {
        if self.d_s != other.d_s {
            return Err(Error::DimensionMismatch("composed maps must share d_s".into()));
        }
        AMatrix::new(self.matrix.mul(&other.matrix), self.d_s)
    }
}

/// Choi (dynamical) matrix: the reshuffle of the map matrix. Unnormalized,
/// so a trace-preserving map has Choi trace d_s.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    d_s: usize,
}

impl ChoiMatrix {
    pub fn new(matrix: ComplexMatrix, d_s: usize) -> Result<Self> {
        let n = d_s * d_s;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix must be {n}x{n} for d_s={d_s}",
            )));
        }
        Ok(Self { matrix, d_s })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

/// Kraus representation of a completely positive map.
#[derive(Debug, Clone)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Validates the completeness sum Σ K†K = 1 within 1e-9.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidParameter("empty Kraus set".into()));
        }
        let d = operators[0].rows();
        for k in &operators {
            if k.rows() != d || k.cols() != d {
                return Err(Error::DimensionMismatch("Kraus operators must share a square shape".into()));
            }
        }
        let set = Self { operators };
        let dev = set.completeness_deviation();
        if dev > KRAUS_TOL {
            return Err(Error::IncompleteKraus { deviation: dev });
        }
        Ok(set)
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn d_s(&self) -> usize {
        self.operators[0].rows()
    }

    /// ‖Σ K†K − 1‖_F.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.d_s();
        let mut acc = ComplexMatrix::zeros(d, d);
        for k in &self.operators {
            acc = acc.add(&k.adjoint().mul(k));
        }
        acc.sub(&ComplexMatrix::identity(d)).frobenius_norm()
    }

    /// ρ ↦ Σ K ρ K†.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.d_s();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in &self.operators {
            out = out.add(&k.mul(rho).mul(&k.adjoint()));
        }
        out
    }
}

/// Kraus operators of the reduced map of a joint unitary with the environment
/// prepared in `chi_env`, placed on the convention's environment slot:
/// K_μ = ⟨μ|_E u |χ⟩_E.
pub fn kraus_from_dilation(
    u: &ComplexMatrix,
    chi_env: &[Complex64],
    conv: &GateConvention,
) -> Result<KrausSet> {
    kraus_from_dilation_slot(u, chi_env, conv.env_slot())
}

/// [`kraus_from_dilation`] with the environment slot named directly.
pub fn kraus_from_dilation_slot(
    u: &ComplexMatrix,
    chi_env: &[Complex64],
    env_slot: Slot,
) -> Result<KrausSet> {
    let dev = u.unitary_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let d_e = chi_env.len();
    let n = u.rows();
    if d_e == 0 || !n.is_multiple_of(d_e) {
        return Err(Error::DimensionMismatch(format!(
            "environment dim {d_e} does not divide joint dim {n}"
        )));
    }
    let norm = vec_norm(chi_env);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm });
    }
    let d_s = n / d_e;
    let mut ops = Vec::with_capacity(d_e);
    for mu in 0..d_e {
        let mut k = ComplexMatrix::zeros(d_s, d_s);
        for i in 0..d_s {
            for j in 0..d_s {
                let mut acc = Complex64::new(0.0, 0.0);
                for nu in 0..d_e {
                    let entry = match env_slot {
                        Slot::First => u.get(mu * d_s + i, nu * d_s + j),
                        Slot::Second => u.get(i * d_e + mu, j * d_e + nu),
                    };
                    acc += entry * chi_env[nu];
                }
                k.set(i, j, acc);
            }
        }
        ops.push(k);
    }
    KrausSet::new(ops)
}

/// Map matrix of a Kraus set in the row-major vec convention:
/// A = Σ_μ K_μ ⊗ conj(K_μ).
pub fn a_from_kraus(kraus: &KrausSet) -> Result<AMatrix> {
    let dev = kraus.completeness_deviation();
    if dev > KRAUS_TOL {
        return Err(Error::IncompleteKraus { deviation: dev });
    }
    let d = kraus.d_s();
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for k in kraus.operators() {
        acc = acc.add(&k.kron(&k.conj()));
    }
    AMatrix::new(acc, d)
}

/// Choi matrix by reshuffling the map matrix.
pub fn choi_from_a(a: &AMatrix) -> ChoiMatrix {
    let m = a
        .matrix()
        .reshuffle(a.d_s())
        .expect("AMatrix dimensions are validated on construction");
    ChoiMatrix { matrix: m, d_s: a.d_s() }
}

/// Map matrix from a Choi matrix; exact inverse of [`choi_from_a`].
pub fn a_from_choi(b: &ChoiMatrix) -> AMatrix {
    let m = b
        .matrix()
        .reshuffle(b.d_s())
        .expect("ChoiMatrix dimensions are validated on construction");
    AMatrix { matrix: m, d_s: b.d_s() }
}

/// CP/NCP verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Cp,
    Ncp,
}

/// Outcome of a complete-positivity check.
#[derive(Debug, Clone)]
pub struct CpReport {
    pub verdict: Verdict,
    pub min_eigenvalue: f64,
    /// Full Choi spectrum, ascending.
    pub spectrum: Vec<f64>,
}

impl CpReport {
    pub fn is_cp(&self) -> bool {
        self.verdict == Verdict::Cp
    }
}

/// Decide complete positivity from the Choi spectrum: CP iff the smallest
/// eigenvalue is ≥ −tol·max(1, ‖b‖₂). Requires a Hermitian Choi matrix
/// (Hermiticity-preserving map) within 1e-9.
pub fn cp_check(b: &ChoiMatrix, tol: f64) -> Result<CpReport> {
    let dev = b.matrix().hermitian_deviation();
    if dev > 1e-9 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let spec = spectrum_of_choi(b)?;
    Ok(cp_report_from_spectrum(&spec.eigenvalues, tol))
}

/// Hermitian eigendecomposition of a Choi matrix (symmetrized round-off).
pub fn spectrum_of_choi(b: &ChoiMatrix) -> Result<Spectrum> {
    let m = b.matrix();
    let sym = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
    eigh(&sym)
}

/// Verdict from an already-computed ascending Choi spectrum.
pub fn cp_report_from_spectrum(eigenvalues: &[f64], tol: f64) -> CpReport {
    let min = eigenvalues.first().copied().unwrap_or(0.0);
    let spectral_norm = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let threshold = -tol * spectral_norm.max(1.0);
    CpReport {
        verdict: if min >= threshold { Verdict::Cp } else { Verdict::Ncp },
        min_eigenvalue: min,
        spectrum: eigenvalues.to_vec(),
    }
}

/// Trace preservation: Σ_i A[(i,i),(k,l)] = δ_{kl} within `tol`.
pub fn tp_check(a: &AMatrix, tol: f64) -> bool {
    let d = a.d_s();
    let m = a.matrix();
    for k in 0..d {
        for l in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..d {
                acc += m.get(i * d + i, k * d + l);
            }
            let target = if k == l { 1.0 } else { 0.0 };
            let dev = Complex64::new(acc.re - target, acc.im);
            if libm::sqrt(dev.norm_sqr()) > tol {
                return false;
            }
        }
    }
    true
}

/// Hermiticity preservation: A[(i,j),(k,l)] = conj(A[(j,i),(l,k)]) within `tol`,
/// equivalently a Hermitian Choi matrix.
pub fn herm_check(a: &AMatrix, tol: f64) -> bool {
    let d = a.d_s();
    let m = a.matrix();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let lhs = m.get(i * d + j, k * d + l);
                    let rhs = m.get(j * d + i, l * d + k).conj();
                    if libm::sqrt((lhs - rhs).norm_sqr()) > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Invert a map matrix. Fails with [`Error::SingularMap`] when the condition
/// number exceeds `cond_limit` — the numerical signature of feeding a
/// maximally entangled construction into the inverse.
pub fn invert_a(a: &AMatrix, cond_limit: f64) -> Result<AMatrix> {
    let dec = svd(a.matrix());
    let cond = dec.condition_number();
    // negated so an infinite or NaN condition number takes the error path
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(cond <= cond_limit) {
        return Err(Error::SingularMap { condition: cond });
    }
    // A⁻¹ = V diag(1/σ) U†
    let k = dec.singular_values.len();
    let udag = dec.u.adjoint();
    let mut scaled = ComplexMatrix::zeros(k, udag.cols());
    for r in 0..k {
        let inv = 1.0 / dec.singular_values[r];
        for c in 0..udag.cols() {
            scaled.set(r, c, udag.get(r, c) * inv);
        }
    }
    AMatrix::new(dec.v.mul(&scaled), a.d_s())
}

/// Condition number of the map matrix (σ_max/σ_min).
pub fn condition_number(a: &AMatrix) -> f64 {
    svd(a.matrix()).condition_number()
}

/// Intermediate map relating the system state after `a_first` to the state
/// after `a_total`: a_total · a_first⁻¹.
pub fn intermediate_a(a_total: &AMatrix, a_first: &AMatrix, cond_limit: f64) -> Result<AMatrix> {
    if a_total.d_s() != a_first.d_s() {
        return Err(Error::DimensionMismatch("intermediate map needs matching d_s".into()));
    }
    let inv = invert_a(a_first, cond_limit)?;
    a_total.compose(&inv)
}

/// Diagnostics of family-based map inference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyDiagnostics {
    /// Complex rank of the stacked linear system.
    pub effective_rank: usize,
    /// ‖A·vec(ρ_in) − vec(ρ_out)‖ over the family, Frobenius.
    pub residual: f64,
    /// True when the family resolves all d_s⁴ degrees of freedom.
    pub unique: bool,
}

/// Infer a map matrix from (input, output) density-matrix pairs by
/// minimum-norm least squares. With `enforce_tp` the trace-preservation
/// identities are appended as hard rows weighted at 10³ times the data scale.
/// Under-determination is reported in the diagnostics, never an error.
pub fn infer_a_from_family(
    pairs: &[(DensityMatrix, DensityMatrix)],
    enforce_tp: bool,
    rank_tol: f64,
) -> Result<(AMatrix, FamilyDiagnostics)> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("need at least one (input, output) pair".into()));
    }
    let d = pairs[0].0.dim();
    for (rin, rout) in pairs {
        if rin.dim() != d || rout.dim() != d {
            return Err(Error::DimensionMismatch("family pairs must share the system dimension".into()));
        }
    }
    let d2 = d * d;
    let unknowns = d2 * d2;
    let data_rows = pairs.len() * d2;
    let tp_rows = if enforce_tp { d2 } else { 0 };
    let mut coeff = ComplexMatrix::zeros(data_rows + tp_rows, unknowns);
    let mut rhs = ComplexMatrix::zeros(data_rows + tp_rows, 1);

    // Row for output component (i,j) of pair p: Σ_(k,l) A[(ij),(kl)] ρ_in[k,l].
    let mut data_scale = 0.0f64;
    for (p, (rin, rout)) in pairs.iter().enumerate() {
        let vin = rin.matrix().data();
        let vout = rout.matrix().data();
        data_scale = data_scale.max(vec_norm(vin));
        for out_idx in 0..d2 {
            let row = p * d2 + out_idx;
            for in_idx in 0..d2 {
                coeff.set(row, out_idx * d2 + in_idx, vin[in_idx]);
            }
            rhs.set(row, 0, vout[out_idx]);
        }
    }
    if enforce_tp {
        let w = Complex64::new(1e3 * data_scale.max(1e-300), 0.0);
        for k in 0..d {
            for l in 0..d {
                let row = data_rows + k * d + l;
                for i in 0..d {
                    coeff.set(row, (i * d + i) * d2 + (k * d + l), w);
                }
                let target = if k == l { w } else { Complex64::new(0.0, 0.0) };
                rhs.set(row, 0, target);
            }
        }
    }

    let (x, info) = lstsq_minnorm(&coeff, &rhs, rank_tol)?;
    let mut m = ComplexMatrix::zeros(d2, d2);
    for r in 0..d2 {
        for c in 0..d2 {
            m.set(r, c, x.get(r * d2 + c, 0));
        }
    }
    let a = AMatrix::new(m, d)?;
    // Report the residual on the data block only, in the unweighted metric.
    let mut res = 0.0f64;
    for (rin, rout) in pairs {
        let got = a.apply(rin.matrix())?;
        let diff = got.sub(rout.matrix()).frobenius_norm();
        res += diff * diff;
    }
    Ok((
        a,
        FamilyDiagnostics {
            effective_rank: info.rank,
            residual: libm::sqrt(res),
            unique: info.rank >= unknowns,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{controlled, pauli, GateConvention, Pauli, RootBranch, TensorOrder};
    use crate::matrix::Slot;

    fn conv_env_first() -> GateConvention {
        GateConvention {
            control_slot: Slot::First,
            root_branch: RootBranch::Principal,
            tensor_order: TensorOrder::EnvSys,
        }
    }

    fn chi(theta: f64) -> Vec<Complex64> {
        vec![
            Complex64::new(libm::cos(theta), 0.0),
            Complex64::new(libm::sin(theta), 0.0),
        ]
    }

    #[test]
    fn identity_dilation_gives_identity_kraus() {
        let k = kraus_from_dilation(&ComplexMatrix::identity(4), &chi(0.3), &conv_env_first())
            .unwrap();
        let a = a_from_kraus(&k).unwrap();
        assert!(a.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn cnot_with_control_env_in_zero_never_fires() {
        let cnot = controlled(&pauli(Pauli::X), Slot::First).unwrap();
        let k = kraus_from_dilation(&cnot, &chi(0.0), &conv_env_first()).unwrap();
        // K_0 = I, K_1 = 0: identity channel
        assert!(k.operators()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        assert!(k.operators()[1].frobenius_norm() < 1e-14);
    }

    #[test]
    fn cnot_dilation_matches_rotated_mixture() {
        // target = system slot: K = {cos θ · I, sin θ · σx}
        let theta = 0.4f64;
        let cnot = controlled(&pauli(Pauli::X), Slot::First).unwrap();
        let k = kraus_from_dilation(&cnot, &chi(theta), &conv_env_first()).unwrap();
        assert!(
            k.operators()[0]
                .max_abs_diff(&ComplexMatrix::identity(2).scale(Complex64::new(libm::cos(theta), 0.0)))
                < 1e-14
        );
        assert!(
            k.operators()[1]
                .max_abs_diff(&pauli(Pauli::X).scale(Complex64::new(libm::sin(theta), 0.0)))
                < 1e-14
        );
        // A1 = [[c,0,0,s],[0,c,s,0],[0,s,c,0],[s,0,0,c]], c=cos²θ, s=sin²θ
        let a = a_from_kraus(&k).unwrap();
        let (c2, s2) = (libm::cos(theta) * libm::cos(theta), libm::sin(theta) * libm::sin(theta));
        let expect = ComplexMatrix::from_real_rows(&[
            &[c2, 0.0, 0.0, s2],
            &[0.0, c2, s2, 0.0],
            &[0.0, s2, c2, 0.0],
            &[s2, 0.0, 0.0, c2],
        ]);
        assert!(a.matrix().max_abs_diff(&expect) < 1e-14);
        assert!(tp_check(&a, 1e-12));
        assert!(herm_check(&a, 1e-12));
    }

    #[test]
    fn dephasing_map_kills_coherences() {
        let r = libm::sqrt(0.5);
        let k = KrausSet::new(vec![
            ComplexMatrix::identity(2).scale(Complex64::new(r, 0.0)),
            pauli(Pauli::Z).scale(Complex64::new(r, 0.0)),
        ])
        .unwrap();
        let a = a_from_kraus(&k).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(a.matrix().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn choi_of_identity_map() {
        let a = AMatrix::new(ComplexMatrix::identity(4), 2).unwrap();
        let b = choi_from_a(&a);
        let spec = spectrum_of_choi(&b).unwrap();
        assert!((spec.eigenvalues[3] - 2.0).abs() < 1e-12);
        assert!(spec.eigenvalues[0].abs() < 1e-12);
        // round trip
        let back = a_from_choi(&b);
        assert!(back.matrix().max_abs_diff(a.matrix()) < 1e-15);
    }

    #[test]
    fn kraus_built_maps_are_cp_and_tp() {
        let theta = 0.9f64;
        let cnot = controlled(&pauli(Pauli::X), Slot::First).unwrap();
        let a = a_from_kraus(&kraus_from_dilation(&cnot, &chi(theta), &conv_env_first()).unwrap())
            .unwrap();
        let rep = cp_check(&choi_from_a(&a), CP_TOL).unwrap();
        assert!(rep.is_cp());
        assert!(tp_check(&a, 1e-9));
        // Choi trace = d_s
        assert!((choi_from_a(&a).trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_tp_scaled_map_fails_tp() {
        let a = AMatrix::new(ComplexMatrix::identity(4).scale(Complex64::new(2.0, 0.0)), 2).unwrap();
        assert!(!tp_check(&a, 1e-9));
    }

    #[test]
    fn invert_identity() {
        let a = AMatrix::new(ComplexMatrix::identity(4), 2).unwrap();
        let inv = invert_a(&a, COND_LIMIT).unwrap();
        assert!(inv.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn invert_round_trips() {
        let theta = 0.5f64;
        let cnot = controlled(&pauli(Pauli::X), Slot::First).unwrap();
        let a = a_from_kraus(&kraus_from_dilation(&cnot, &chi(theta), &conv_env_first()).unwrap())
            .unwrap();
        let inv = invert_a(&a, COND_LIMIT).unwrap();
        let prod = a.compose(&inv).unwrap();
        assert!(prod.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-9);
        // inverse of a TP map is TP, and Hermiticity-preserving
        assert!(tp_check(&inv, 1e-9));
        assert!(herm_check(&inv, 1e-9));
    }

    #[test]
    fn maximal_entanglement_makes_the_inverse_singular() {
        let theta = core::f64::consts::FRAC_PI_4;
        let cnot = controlled(&pauli(Pauli::X), Slot::First).unwrap();
        let a = a_from_kraus(&kraus_from_dilation(&cnot, &chi(theta), &conv_env_first()).unwrap())
            .unwrap();
        assert!(matches!(invert_a(&a, COND_LIMIT), Err(Error::SingularMap { .. })));
    }

    #[test]
    fn intermediate_of_equal_legs_is_identity() {
        let theta = 0.3f64;
        let cnot = controlled(&pauli(Pauli::X), Slot::First).unwrap();
        let a = a_from_kraus(&kraus_from_dilation(&cnot, &chi(theta), &conv_env_first()).unwrap())
            .unwrap();
        let mid = intermediate_a(&a, &a, COND_LIMIT).unwrap();
        assert!(mid.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn composition_covariance() {
        // A-matrix of composed Kraus sets equals the product of A-matrices.
        let r = libm::sqrt(0.5);
        let k1 = KrausSet::new(vec![
            ComplexMatrix::identity(2).scale(Complex64::new(r, 0.0)),
            pauli(Pauli::Z).scale(Complex64::new(r, 0.0)),
        ])
        .unwrap();
        let theta = 0.7f64;
        let k2 = KrausSet::new(vec![
            ComplexMatrix::identity(2).scale(Complex64::new(libm::cos(theta), 0.0)),
            pauli(Pauli::X).scale(Complex64::new(libm::sin(theta), 0.0)),
        ])
        .unwrap();
        // composed set {K2_i K1_j}
        let mut composed = Vec::new();
        for a in k2.operators() {
            for b in k1.operators() {
                composed.push(a.mul(b));
            }
        }
        let kc = KrausSet::new(composed).unwrap();
        let lhs = a_from_kraus(&kc).unwrap();
        let rhs = a_from_kraus(&k2).unwrap().compose(&a_from_kraus(&k1).unwrap()).unwrap();
        assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn family_inference_recovers_known_map() {
        // 8 pure-state inputs spanning the operator space
        let theta = 0.6f64;
        let k = KrausSet::new(vec![
            ComplexMatrix::identity(2).scale(Complex64::new(libm::cos(theta), 0.0)),
            pauli(Pauli::X).scale(Complex64::new(libm::sin(theta), 0.0)),
        ])
        .unwrap();
        let a_true = a_from_kraus(&k).unwrap();
        let bloch = [
            (0.0f64, 0.0f64),
            (core::f64::consts::PI, 0.0),
            (core::f64::consts::FRAC_PI_2, 0.0),
            (core::f64::consts::FRAC_PI_2, core::f64::consts::FRAC_PI_2),
            (core::f64::consts::FRAC_PI_2, core::f64::consts::PI),
            (core::f64::consts::FRAC_PI_2, 3.0 * core::f64::consts::FRAC_PI_2),
            (1.0, 0.5),
            (2.0, 4.0),
        ];
        let mut pairs = Vec::new();
        for &(t, p) in &bloch {
            let amp = [
                Complex64::new(libm::cos(t / 2.0), 0.0),
                Complex64::new(libm::cos(p), libm::sin(p)) * libm::sin(t / 2.0),
            ];
            let mut rho = ComplexMatrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    rho.set(i, j, amp[i] * amp[j].conj());
                }
            }
            let rin = DensityMatrix::new(rho.clone()).unwrap();
            let rout = DensityMatrix::new(k.apply(&rho)).unwrap();
            pairs.push((rin, rout));
        }
        let (a_fit, diag) = infer_a_from_family(&pairs, true, 1e-10).unwrap();
        assert!(a_fit.matrix().max_abs_diff(a_true.matrix()) < 1e-9);
        assert!(diag.unique);
        assert!(diag.residual < 1e-10);
    }

    #[test]
    fn family_inference_single_pair_is_non_unique() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]))
            .unwrap();
        let (a_fit, diag) = infer_a_from_family(
            &[(rho.clone(), rho.clone())],
            false,
            1e-10,
        )
        .unwrap();
        assert!(!diag.unique);
        assert!(diag.residual < 1e-12);
        // minimum-norm solution still maps the given input to the given output
        let out = a_fit.apply(rho.matrix()).unwrap();
        assert!(out.max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn family_inference_diagonal_family_is_rank_deficient() {
        // inputs diag(cos²θ, sin²θ) only span the diagonal operator plane
        let theta_grid = [0.2f64, 0.5, 0.8, 1.1, 1.3];
        let k = KrausSet::new(vec![
            ComplexMatrix::identity(2).scale(Complex64::new(libm::cos(0.4), 0.0)),
            pauli(Pauli::X).scale(Complex64::new(libm::sin(0.4), 0.0)),
        ])
        .unwrap();
        let mut pairs = Vec::new();
        for &t in &theta_grid {
            let rho = ComplexMatrix::from_real_rows(&[
                &[libm::cos(t) * libm::cos(t), 0.0],
                &[0.0, libm::sin(t) * libm::sin(t)],
            ]);
            pairs.push((
                DensityMatrix::new(rho.clone()).unwrap(),
                DensityMatrix::new(k.apply(&rho)).unwrap(),
            ));
        }
        let (_, diag) = infer_a_from_family(&pairs, false, 1e-10).unwrap();
        assert!(!diag.unique);
        assert!(diag.effective_rank < 16);
        assert!(diag.residual < 1e-10);
    }
}
