//! Bipartite pure and mixed states: Schmidt structure, entropies, product and
//! maximality tests.

use alloc::format;
use alloc::vec::Vec;

use crate::eig::eigh;
use crate::error::{Error, Result};
use crate::matrix::{vec_norm, Complex64, ComplexMatrix, Slot};
use crate::svd::svd;

/// Normalization acceptance tolerance on state vectors.
pub const NORM_TOL: f64 = 1e-12;
/// Default tolerance for product / maximality verdicts on Schmidt coefficients.
pub const SCHMIDT_TOL: f64 = 1e-9;

/// Logarithm base for entropies. Reports carry both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyBase {
    Bits,
    Nats,
}

fn log_in_base(x: f64, base: EntropyBase) -> f64 {
    match base {
        EntropyBase::Bits => libm::log2(x),
        EntropyBase::Nats => libm::log(x),
    }
}

/// Normalized pure state on a bipartite space with a declared (d_first,
/// d_second) split and an explicit record of which slot is the system.
///
/// The slot metadata is mandatory on construction and every downstream
/// operation reads it instead of assuming an ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPureState {
    amplitudes: Vec<Complex64>,
    d_first: usize,
    d_second: usize,
    system_slot: Slot,
}

impl JointPureState {
    pub fn new(
        amplitudes: Vec<Complex64>,
        d_first: usize,
        d_second: usize,
        system_slot: Slot,
    ) -> Result<Self> {
        if amplitudes.len() != d_first * d_second {
            return Err(Error::DimensionMismatch(format!(
                "state vector length {} != {}x{}",
                amplitudes.len(),
                d_first,
                d_second
            )));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes,
            d_first,
            d_second,
            system_slot,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn d_first(&self) -> usize {
        self.d_first
    }

    pub fn d_second(&self) -> usize {
        self.d_second
    }

    pub fn system_slot(&self) -> Slot {
        self.system_slot
    }

    pub fn env_slot(&self) -> Slot {
        self.system_slot.other()
    }

    pub fn dim(&self) -> usize {
        self.d_first * self.d_second
    }

    /// Dimension of the slot.
    pub fn slot_dim(&self, slot: Slot) -> usize {
        match slot {
            Slot::First => self.d_first,
            Slot::Second => self.d_second,
        }
    }

    /// |ψ⟩⟨ψ| as a dense matrix.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.amplitudes[i] * self.amplitudes[j].conj());
            }
        }
        m
    }

    /// Coefficient matrix C with C[a, b] = amplitude of |a⟩_first |b⟩_second.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.d_first, self.d_second, self.amplitudes.clone())
    }

    /// Reduced density matrix of the kept slot, directly from amplitudes.
    pub fn reduced(&self, keep: Slot) -> ComplexMatrix {
        let c = self.coefficient_matrix();
        match keep {
            // ρ_first[a,a'] = Σ_b C[a,b] conj(C[a',b])
            Slot::First => c.mul(&c.adjoint()),
            // ρ_second[b,b'] = Σ_a C[a,b] conj(C[a,b'])
            Slot::Second => c.transpose().mul(&c.conj()),
        }
    }

    /// Reduced state of the system slot.
    pub fn reduced_system(&self) -> ComplexMatrix {
        self.reduced(self.system_slot)
    }

    /// Apply a unitary on the joint space, keeping the slot metadata.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply a {}x{} operator to a dim-{} state",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        let amps = u.mul_vec(&self.amplitudes);
        Self::new(amps, self.d_first, self.d_second, self.system_slot)
    }

    /// Swap the two slots: amplitudes are transposed, metadata follows.
    pub fn swapped(&self) -> Self {
        let c = self.coefficient_matrix().transpose();
        Self {
            amplitudes: c.data().to_vec(),
            d_first: self.d_second,
            d_second: self.d_first,
            system_slot: self.system_slot.other(),
        }
    }
}

/// Schmidt form of a bipartite pure state.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Nonnegative coefficients in descending order; their squares sum to 1.
    pub coefficients: Vec<f64>,
    /// Orthonormal basis on the first slot (columns).
    pub left_basis: ComplexMatrix,
    /// Orthonormal basis on the second slot (columns).
    pub right_basis: ComplexMatrix,
}

/// Schmidt decomposition via SVD of the coefficient matrix:
/// |ψ⟩ = Σ_k c_k |u_k⟩ ⊗ |w_k⟩ with w_k the conjugated right singular vectors.
pub fn schmidt(psi: &JointPureState) -> SchmidtDecomposition {
    let dec = svd(&psi.coefficient_matrix());
    SchmidtDecomposition {
        coefficients: dec.singular_values,
        left_basis: dec.u,
        right_basis: dec.v.conj(),
    }
}

/// Entanglement entropy of the bipartition: −Σ λ log λ over the squared
/// Schmidt coefficients, with 0·log 0 := 0.
pub fn entanglement_entropy(psi: &JointPureState, base: EntropyBase) -> f64 {
    let dec = schmidt(psi);
    let mut s = 0.0;
    for c in &dec.coefficients {
        let l = c * c;
        if l > 0.0 {
            s -= l * log_in_base(l, base);
        }
    }
    s
}

/// True when the second Schmidt coefficient is below `tol`.
pub fn is_product(psi: &JointPureState, tol: f64) -> bool {
    let dec = schmidt(psi);
    match dec.coefficients.get(1) {
        Some(&c) => c < tol,
        None => true,
    }
}

/// True when every Schmidt coefficient is within `tol` of 1/√min(d1, d2).
pub fn is_maximally_entangled(psi: &JointPureState, tol: f64) -> bool {
    let dec = schmidt(psi);
    let k = psi.d_first.min(psi.d_second);
    let target = 1.0 / libm::sqrt(k as f64);
    dec.coefficients.len() >= k
        && dec.coefficients[..k].iter().all(|c| (c - target).abs() <= tol)
}

/// Validated density matrix: Hermitian within 1e-10 and unit trace within 1e-10.
/// Eigenvalue positivity is enforced where the spectrum is actually consumed
/// ([`vn_entropy`] rejects eigenvalues below −1e-10).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        let dev = matrix.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = matrix.trace();
        let tr_dev = libm::sqrt((tr - Complex64::new(1.0, 0.0)).norm_sqr());
        if tr_dev > 1e-10 {
            return Err(Error::NotNormalized { norm: tr.re });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Von Neumann entropy −Σ λ log λ. Eigenvalues in [−1e-10, 0) are clamped to
/// zero; anything below −1e-10 is rejected as unphysical.
pub fn vn_entropy(rho: &DensityMatrix, base: EntropyBase) -> Result<f64> {
    let spec = eigh(rho.matrix())?;
    let mut s = 0.0;
    for &l in &spec.eigenvalues {
        if l < -1e-10 {
            return Err(Error::NegativeEigenvalue { value: l });
        }
        if l > 0.0 {
            s -= l * log_in_base(l, base);
        }
    }
    Ok(s.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket(coeffs: &[(f64, f64)]) -> Vec<Complex64> {
        coeffs.iter().map(|&(re, im)| c(re, im)).collect()
    }

    fn bell() -> JointPureState {
        let r = 1.0 / libm::sqrt(2.0);
        JointPureState::new(ket(&[(r, 0.0), (0.0, 0.0), (0.0, 0.0), (r, 0.0)]), 2, 2, Slot::Second)
            .unwrap()
    }

    #[test]
    fn rejects_unnormalized() {
        let e = JointPureState::new(ket(&[(1.0, 0.0), (1.0, 0.0)]), 2, 1, Slot::First);
        assert!(matches!(e, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn schmidt_of_basis_ket() {
        let psi =
            JointPureState::new(ket(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]), 2, 2, Slot::First)
                .unwrap();
        let dec = schmidt(&psi);
        assert!((dec.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(dec.coefficients[1].abs() < 1e-14);
        assert!(is_product(&psi, SCHMIDT_TOL));
        assert!(!is_maximally_entangled(&psi, SCHMIDT_TOL));
    }

    #[test]
    fn schmidt_of_bell_state() {
        let dec = schmidt(&bell());
        let r = 1.0 / libm::sqrt(2.0);
        assert!((dec.coefficients[0] - r).abs() < 1e-14);
        assert!((dec.coefficients[1] - r).abs() < 1e-14);
        assert!(!is_product(&bell(), SCHMIDT_TOL));
        assert!(is_maximally_entangled(&bell(), SCHMIDT_TOL));
        assert!((entanglement_entropy(&bell(), EntropyBase::Bits) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_reconstructs_the_state() {
        // cos t |00> + sin t |11> at t = pi/4 has coefficients {1/sqrt2, 1/sqrt2}
        let t = 0.9f64;
        let psi = JointPureState::new(
            ket(&[(t.cos(), 0.0), (0.0, 0.0), (0.0, 0.0), (t.sin(), 0.0)]),
            2,
            2,
            Slot::First,
        )
        .unwrap();
        let dec = schmidt(&psi);
        // rebuild sum_k c_k u_k (x) w_k
        let mut rebuilt = alloc::vec![c(0.0, 0.0); 4];
        for k in 0..2 {
            let u = dec.left_basis.column(k);
            let w = dec.right_basis.column(k);
            for a in 0..2 {
                for b in 0..2 {
                    rebuilt[a * 2 + b] += c(dec.coefficients[k], 0.0) * u[a] * w[b];
                }
            }
        }
        for (x, y) in rebuilt.iter().zip(psi.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
        let sq: f64 = dec.coefficients.iter().map(|x| x * x).sum();
        assert!((sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separable_ket_01_is_product_not_maximal() {
        let psi =
            JointPureState::new(ket(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]), 2, 2, Slot::Second)
                .unwrap();
        assert!(is_product(&psi, SCHMIDT_TOL));
        assert!(!is_maximally_entangled(&psi, SCHMIDT_TOL));
        assert!(entanglement_entropy(&psi, EntropyBase::Bits) < 1e-12);
    }

    #[test]
    fn entropy_agrees_between_slots() {
        let psi = JointPureState::new(
            ket(&[(0.5, 0.1), (0.3, -0.4), (0.0, 0.62249497), (0.3, 0.0)]),
            2,
            2,
            Slot::First,
        );
        // normalize by hand
        let raw = ket(&[(0.5, 0.1), (0.3, -0.4), (0.0, 0.62), (0.3, 0.0)]);
        let n = vec_norm(&raw);
        let amps: Vec<Complex64> = raw.into_iter().map(|z| z / n).collect();
        let psi = psi.unwrap_or(JointPureState::new(amps, 2, 2, Slot::First).unwrap());
        let s_first = {
            let rho = DensityMatrix::new(psi.reduced(Slot::First)).unwrap();
            vn_entropy(&rho, EntropyBase::Bits).unwrap()
        };
        let s_second = {
            let rho = DensityMatrix::new(psi.reduced(Slot::Second)).unwrap();
            vn_entropy(&rho, EntropyBase::Bits).unwrap()
        };
        let s_schmidt = entanglement_entropy(&psi, EntropyBase::Bits);
        assert!((s_first - s_second).abs() < 1e-10);
        assert!((s_first - s_schmidt).abs() < 1e-10);
    }

    #[test]
    fn vn_entropy_pure_and_mixed() {
        let pure = DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]))
            .unwrap();
        assert!(vn_entropy(&pure, EntropyBase::Bits).unwrap() < 1e-12);
        let mixed = DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.5]]))
            .unwrap();
        assert!((vn_entropy(&mixed, EntropyBase::Bits).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vn_entropy_rejects_negative_eigenvalue() {
        let m = ComplexMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]);
        let rho = DensityMatrix::new(m).unwrap();
        assert!(matches!(
            vn_entropy(&rho, EntropyBase::Bits),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.7, 0.0], &[0.0, 0.7]]))
            .is_err());
        let m = ComplexMatrix::from_re_im(2, 2, &[(0.5, 0.0), (0.1, 0.2), (0.1, 0.2), (0.5, 0.0)]);
        assert!(DensityMatrix::new(m).is_err()); // not Hermitian
    }
}
