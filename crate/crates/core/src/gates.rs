//! Construction and classification of joint unitaries: named gates, controlled
//! gates, spectral roots, Haar sampling and locality tests.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::eig::{eig_unitary, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::matrix::{inner, vec_norm, Complex64, ComplexMatrix, Slot};
use crate::rng::CounterRng;
use crate::state::JointPureState;
use crate::svd::svd;

/// The three Pauli matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_name(name: &str) -> Result<Pauli> {
        match name {
            "x" | "X" => Ok(Pauli::X),
            "y" | "Y" => Ok(Pauli::Y),
            "z" | "Z" => Ok(Pauli::Z),
            other => Err(Error::InvalidParameter(format!("unknown Pauli name '{other}'"))),
        }
    }
}

/// Standard 2x2 Pauli matrix.
pub fn pauli(p: Pauli) -> ComplexMatrix {
    let c = Complex64::new;
    match p {
        Pauli::X => ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        Pauli::Y => ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        Pauli::Z => ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    }
}

/// Branch choice for spectral roots of unitaries with a π eigenphase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootBranch {
    /// The π eigenphase divides as +π/n.
    Principal,
    /// The π eigenphase is flipped to −π before dividing.
    Alternate,
}

/// Which tensor slot of the joint space is the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorOrder {
    /// System on the first slot, environment on the second.
    SysEnv,
    /// Environment on the first slot, system on the second.
    EnvSys,
}

/// Full gate-construction convention. Every field must be set explicitly;
/// nothing here has a silent default because the reference material leaves
/// the ordering ambiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateConvention {
    pub control_slot: Slot,
    pub root_branch: RootBranch,
    pub tensor_order: TensorOrder,
}

impl GateConvention {
    pub fn system_slot(&self) -> Slot {
        match self.tensor_order {
            TensorOrder::SysEnv => Slot::First,
            TensorOrder::EnvSys => Slot::Second,
        }
    }

    pub fn env_slot(&self) -> Slot {
        self.system_slot().other()
    }
}

/// Projector-controlled embedding of `u` with a qubit control on the named
/// slot: |0⟩⟨0| ⊗ 1 + |1⟩⟨1| ⊗ u (control first) or the mirrored order.
pub fn controlled(u: &ComplexMatrix, control_slot: Slot) -> Result<ComplexMatrix> {
    let dev = u.unitary_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let d = u.rows();
    let idd = ComplexMatrix::identity(d);
    let mut p0 = ComplexMatrix::zeros(2, 2);
    p0.set(0, 0, Complex64::new(1.0, 0.0));
    let mut p1 = ComplexMatrix::zeros(2, 2);
    p1.set(1, 1, Complex64::new(1.0, 0.0));
    Ok(match control_slot {
        Slot::First => p0.kron(&idd).add(&p1.kron(u)),
        Slot::Second => idd.kron(&p0).add(&u.kron(&p1)),
    })
}

/// Spectral nth root of a unitary. Eigenphases θ ∈ (−π, π] divide as θ/n;
/// the alternate branch flips a π eigenphase to −π first. Degenerate
/// eigenspaces are re-orthonormalized inside each phase cluster by the
/// underlying unitary eigendecomposition, so any orthonormal choice there
/// satisfies root(u, n)ⁿ = u.
pub fn unitary_root(u: &ComplexMatrix, n: u32, branch: RootBranch) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("root order n must be >= 1".into()));
    }
    let (phases, v) = eig_unitary(u)?;
    let dim = u.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut theta = phases[k];
        if branch == RootBranch::Alternate && (theta - core::f64::consts::PI).abs() < 1e-8 {
            theta = -core::f64::consts::PI;
        }
        let root_phase = theta / n as f64;
        let lam = Complex64::new(libm::cos(root_phase), libm::sin(root_phase));
        let col = v.column(k);
        for i in 0..dim {
            for j in 0..dim {
                let cur = out.get(i, j) + lam * col[i] * col[j].conj();
                out.set(i, j, cur);
            }
        }
    }
    Ok(out)
}

/// Draw a d×d unitary from the Haar measure: a complex Gaussian matrix
/// orthonormalized column by column. Fixing the triangular factor's diagonal
/// to be real and positive (which modified Gram-Schmidt does implicitly)
/// makes the draw exactly Haar. Deterministic per (seed, stream 0).
pub fn haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = CounterRng::new(seed, 0);
    haar_from_rng(&mut rng, d)
}

/// Haar draw from a caller-supplied stream, for counter-based Monte Carlo.
pub fn haar_from_rng(rng: &mut CounterRng, d: usize) -> ComplexMatrix {
    loop {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
        let mut ok = true;
        'outer: for _ in 0..d {
            let mut col: Vec<Complex64> = (0..d).map(|_| rng.next_complex_gaussian()).collect();
            for prev in &cols {
                let overlap = inner(prev, &col);
                for (ci, pi) in col.iter_mut().zip(prev.iter()) {
                    *ci -= overlap * pi;
                }
            }
            let norm = vec_norm(&col);
            if norm < 1e-8 {
                // Astronomically unlikely near-collinear draw; resample.
                ok = false;
                break 'outer;
            }
            for ci in col.iter_mut() {
                *ci /= norm;
            }
            cols.push(col);
        }
        if ok {
            return ComplexMatrix::from_columns(&cols);
        }
    }
}

/// Realignment of an operator on a d1⊗d2 space: R[(i,j),(k,l)] = u[(i,k),(j,l)].
/// Its singular values are the operator Schmidt coefficients.
pub fn realign(u: &ComplexMatrix, d_first: usize, d_second: usize) -> Result<ComplexMatrix> {
    let n = d_first * d_second;
    if u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "realign expects {n}x{n}, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let mut r = ComplexMatrix::zeros(d_first * d_first, d_second * d_second);
    for i in 0..d_first {
        for j in 0..d_first {
            for k in 0..d_second {
                for l in 0..d_second {
                    r.set(i * d_first + j, k * d_second + l, u.get(i * d_second + k, j * d_second + l));
                }
            }
        }
    }
    Ok(r)
}

/// Operator Schmidt coefficients of `u` on a d1⊗d2 split, descending.
pub fn operator_schmidt_values(u: &ComplexMatrix, d_first: usize, d_second: usize) -> Result<Vec<f64>> {
    Ok(svd(&realign(u, d_first, d_second)?).singular_values)
}

/// True when the operator Schmidt rank is 1 within `tol`: the second
/// realignment singular value is below tol times the first.
pub fn is_local_unitary(u: &ComplexMatrix, d_first: usize, d_second: usize, tol: f64) -> Result<bool> {
    let s = operator_schmidt_values(u, d_first, d_second)?;
    Ok(match (s.first(), s.get(1)) {
        (Some(&s0), Some(&s1)) => s1 < tol * s0,
        _ => true,
    })
}

/// A joint unitary carrying a product state onto a target state.
#[derive(Debug, Clone)]
pub struct Dilation {
    /// Unitary with u1 · pre_product = target.
    pub u1: ComplexMatrix,
    /// The fixed product state |0⟩ ⊗ |0⟩ (in the target's slot layout).
    pub pre_product: JointPureState,
}

/// Complete `phi` to an orthonormal basis by modified Gram-Schmidt over the
/// canonical kets, starting from `phi` itself, and return the unitary mapping
/// the canonical product basis onto it. Column 0 is `phi`, so
/// u1 |0…0⟩ = phi exactly.
pub fn dilation_from_state(phi: &JointPureState) -> Dilation {
    let n = phi.dim();
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    cols.push(phi.amplitudes().to_vec());
    for cand in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[cand] = Complex64::new(1.0, 0.0);
        for col in &cols {
            let overlap = inner(col, &e);
            for (ei, ci) in e.iter_mut().zip(col.iter()) {
                *ei -= overlap * ci;
            }
        }
        let norm = vec_norm(&e);
        if norm > 1e-7 {
            for ei in e.iter_mut() {
                *ei /= norm;
            }
            cols.push(e);
        }
    }
    debug_assert_eq!(cols.len(), n);
    let mut zero = vec![Complex64::new(0.0, 0.0); n];
    zero[0] = Complex64::new(1.0, 0.0);
    let pre_product =
        JointPureState::new(zero, phi.d_first(), phi.d_second(), phi.system_slot())
            .expect("|0..0> is normalized");
    Dilation {
        u1: ComplexMatrix::from_columns(&cols),
        pre_product,
    }
}
