//! Singular value decomposition by one-sided Jacobi, and the rank-revealing
//! minimum-norm least-squares solver built on it.
//!
//! The rotations diagonalize 2x2 blocks of the Gram matrix m†m while applying
//! the re-orthogonalization directly to the columns, which keeps small singular
//! values at full accuracy (nothing is ever squared into a full Gram matrix).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{inner, vec_norm, Complex64, ComplexMatrix};

const MAX_SWEEPS: usize = 60;
const ROTATE_TOL: f64 = 1e-14;

/// Thin SVD: m = U · diag(s) · V† with `s` descending and nonnegative,
/// U: rows×k, V: cols×k, k = min(rows, cols).
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Largest singular value, 0 for an all-zero matrix.
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// σ_max/σ_min, infinite when σ_min vanishes.
    pub fn condition_number(&self) -> f64 {
        let smax = self.sigma_max();
        let smin = self.singular_values.last().copied().unwrap_or(0.0);
        if smin <= 0.0 {
            f64::INFINITY
        } else {
            smax / smin
        }
    }

    /// Reassemble U·diag(s)·V†.
    pub fn assemble(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let mut scaled = self.u.clone();
        for j in 0..k {
            let col: Vec<Complex64> = self
                .u
                .column(j)
                .into_iter()
                .map(|z| z * self.singular_values[j])
                .collect();
            scaled.set_column(j, &col);
        }
        scaled.mul(&self.v.adjoint())
    }
}

/// One-sided Jacobi SVD. Always succeeds on finite input.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.rows() < m.cols() {
        // svd(m†) = (V, s, U)
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let rows = m.rows();
    let cols = m.cols();
    let mut work = m.clone();
    let mut v = ComplexMatrix::identity(cols);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let ci = work.column(i);
                let cj = work.column(j);
                let a = ci.iter().map(|z| z.norm_sqr()).sum::<f64>();
                let b = cj.iter().map(|z| z.norm_sqr()).sum::<f64>();
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                let g = inner(&ci, &cj);
                let gmag = libm::sqrt(g.norm_sqr());
                if gmag <= ROTATE_TOL * libm::sqrt(a * b) {
                    continue;
                }
                rotated = true;
                let w = g / Complex64::new(gmag, 0.0);
                let tau = (b - a) / (2.0 * gmag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let (cc, ss) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                for r in 0..rows {
                    let wi = work.get(r, i);
                    let wj = work.get(r, j);
                    work.set(r, i, cc * wi - ss * w.conj() * wj);
                    work.set(r, j, ss * w * wi + cc * wj);
                }
                for r in 0..cols {
                    let vi = v.get(r, i);
                    let vj = v.get(r, j);
                    v.set(r, i, cc * vi - ss * w.conj() * vj);
                    v.set(r, j, ss * w * vi + cc * vj);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Norms are the singular values; order descending.
    let mut sv: Vec<(f64, usize)> = (0..cols).map(|j| (vec_norm(&work.column(j)), j)).collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite singular values"));
    let singular_values: Vec<f64> = sv.iter().map(|&(s, _)| s).collect();
    let perm: Vec<usize> = sv.iter().map(|&(_, j)| j).collect();

    let v_cols: Vec<Vec<Complex64>> = perm.iter().map(|&j| v.column(j)).collect();
    let v_sorted = ComplexMatrix::from_columns(&v_cols);

    let smax = singular_values.first().copied().unwrap_or(0.0);
    let null_cut = smax * 1e-300 + f64::MIN_POSITIVE;
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for (k, &(s, j)) in sv.iter().enumerate() {
        if s > null_cut {
            let col: Vec<Complex64> = work.column(j).into_iter().map(|z| z / s).collect();
            u_cols.push(col);
        } else {
            // Null direction: complete the frame against earlier columns.
            u_cols.push(complete_column(&u_cols[..k], rows));
        }
    }
    Svd {
        u: ComplexMatrix::from_columns(&u_cols),
        singular_values,
        v: v_sorted,
    }
}

/// Modified Gram-Schmidt completion: a unit vector orthogonal to `existing`.
fn complete_column(existing: &[Vec<Complex64>], rows: usize) -> Vec<Complex64> {
    for cand in 0..rows {
        let mut e = vec![Complex64::new(0.0, 0.0); rows];
        e[cand] = Complex64::new(1.0, 0.0);
        for col in existing {
            let overlap = inner(col, &e);
            for (ei, ci) in e.iter_mut().zip(col.iter()) {
                *ei -= overlap * ci;
            }
        }
        let n = vec_norm(&e);
        if n > 1e-6 {
            for ei in e.iter_mut() {
                *ei /= n;
            }
            return e;
        }
    }
    unreachable!("an orthonormal frame of size < rows always has a completion")
}

/// Diagnostics of a least-squares solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LstsqInfo {
    /// Number of singular values above rank_tol·σ_max.
    pub rank: usize,
    /// ‖coeff·x − rhs‖_F of the returned solution.
    pub residual: f64,
}

/// Minimum-norm least squares via the rank-revealing pseudo-inverse.
/// Singular values below `rank_tol`·σ_max are treated as exact zeros;
/// rank deficiency is reported, never an error.
pub fn lstsq_minnorm(
    coeff: &ComplexMatrix,
    rhs: &ComplexMatrix,
    rank_tol: f64,
) -> Result<(ComplexMatrix, LstsqInfo)> {
    if coeff.rows() != rhs.rows() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "lstsq: coeff has {} rows, rhs has {}",
            coeff.rows(),
            rhs.rows()
        )));
    }
    let dec = svd(coeff);
    let smax = dec.sigma_max();
    let cut = rank_tol * smax;
    let rank = dec
        .singular_values
        .iter()
        .filter(|&&s| s > cut && s > 0.0)
        .count();
    // x = V_r diag(1/σ) U_r† rhs
    let k = dec.singular_values.len();
    let ut_rhs = dec.u.adjoint().mul(rhs); // k × p
    let mut scaled = ComplexMatrix::zeros(k, rhs.cols());
    for r in 0..rank {
        let inv = 1.0 / dec.singular_values[r];
        for p in 0..rhs.cols() {
            scaled.set(r, p, ut_rhs.get(r, p) * inv);
        }
    }
    let x = dec.v.mul(&scaled);
    let residual = coeff.mul(&x).sub(rhs).frobenius_norm();
    Ok((x, LstsqInfo { rank, residual }))
}
