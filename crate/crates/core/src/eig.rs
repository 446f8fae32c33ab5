//! Spectral decompositions: cyclic Jacobi for Hermitian matrices, the derived
//! eigendecomposition of unitaries, matrix exponential and principal logarithm.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{inner, vec_norm, Complex64, ComplexMatrix};

/// Off-diagonal stopping threshold, relative to ‖h‖_F.
const JACOBI_THRESHOLD: f64 = 1e-13;
/// Hard cap on cyclic sweeps; at d ≤ 64 convergence takes far fewer.
const MAX_SWEEPS: usize = 100;
/// Relative Hermiticity acceptance tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Unitarity acceptance tolerance for the principal logarithm.
pub const UNITARY_TOL: f64 = 1e-9;
/// Eigenphase cluster width when refining degenerate subspaces.
const PHASE_CLUSTER_TOL: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Matrix whose columns are the matching orthonormal eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Smallest eigenvalue.
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest eigenvalue magnitude (the spectral norm of a Hermitian matrix).
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(0.0, f64::max)
    }

    /// Rebuild V·diag(f(λ))·V† for a scalar function of the eigenvalues.
    pub fn assemble(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let fl = f(self.eigenvalues[k]);
            for i in 0..n {
                let vik = v.get(i, k);
                for j in 0..n {
                    let cur = out.get(i, j) + fl * vik * v.get(j, k).conj();
                    out.set(i, j, cur);
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// The input must be Hermitian within 1e-10 relative asymmetry; the working
/// copy is symmetrized before iterating so the rotations see an exactly
/// Hermitian matrix. Reconstruction satisfies ‖h − VΛV†‖_F ≤ 1e-10·‖h‖_F.
pub fn eigh(h: &ComplexMatrix) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("eigh needs a square matrix".into()));
    }
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = h.rows();
    // Symmetrize the round-off so the diagonal stays exactly real.
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = (h.get(i, j) + h.get(j, i).conj()) * Complex64::new(0.5, 0.0);
            a.set(i, j, v);
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    let threshold = JACOBI_THRESHOLD * norm;
    if norm > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += 2.0 * a.get(p, q).norm_sqr();
                }
            }
            if libm::sqrt(off) <= threshold {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, threshold / (n as f64 * n as f64));
                }
            }
        }
        if !converged {
            // One last check; tiny matrices occasionally land exactly on the
            // threshold after the final sweep.
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += 2.0 * a.get(p, q).norm_sqr();
                }
            }
            if libm::sqrt(off) > threshold.max(1e-300) {
                return Err(Error::ConvergenceFailure("Jacobi sweeps exhausted"));
            }
        }
    }
    // Sort ascending, permuting eigenvector columns alongside.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let cols: Vec<Vec<Complex64>> = order.iter().map(|&i| v.column(i)).collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(&cols),
    })
}

/// One complex Jacobi rotation annihilating a[(p,q)]; updates a ← J†aJ, v ← vJ.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, skip: f64) {
    let apq = a.get(p, q);
    let mag = libm::sqrt(apq.norm_sqr());
    if mag <= skip || mag == 0.0 {
        return;
    }
    let n = a.rows();
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let w = apq / Complex64::new(mag, 0.0);
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + libm::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;
    let (cc, ss) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
    // Column update: A <- A·J with J[p,p]=c, J[q,p]=-s·conj(w), J[p,q]=s·w, J[q,q]=c.
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, cc * aip - ss * w.conj() * aiq);
        a.set(i, q, ss * w * aip + cc * aiq);
    }
    // Row update: A <- J†·A.
    for i in 0..n {
        let api = a.get(p, i);
        let aqi = a.get(q, i);
        a.set(p, i, cc * api - ss * w * aqi);
        a.set(q, i, ss * w.conj() * api + cc * aqi);
    }
    // Pin the rotated 2x2 block to exact reals on the diagonal, zero off it.
    let dp = a.get(p, p).re;
    let dq = a.get(q, q).re;
    a.set(p, p, Complex64::new(dp, 0.0));
    a.set(q, q, Complex64::new(dq, 0.0));
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    // Accumulate eigenvectors.
    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, cc * vip - ss * w.conj() * viq);
        v.set(i, q, ss * w * vip + cc * viq);
    }
}

/// Eigendecomposition of a unitary: phases θ_k ∈ (−π, π] with u v_k = e^{iθ_k} v_k.
///
/// A unitary is normal, so it shares an eigenbasis with the commuting Hermitian
/// pair (u+u†)/2 and (u−u†)/(2i). We diagonalize the first, then split every
/// cos-degenerate cluster with the second projected into the cluster subspace;
/// this re-orthogonalization is exactly what degenerate subspaces need.
pub fn eig_unitary(u: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dev = u.unitary_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let n = u.rows();
    let ud = u.adjoint();
    let re_part = u.add(&ud).scale(Complex64::new(0.5, 0.0));
    let im_part = u.sub(&ud).scale(Complex64::new(0.0, -0.5));
    let spec = eigh(&re_part)?;
    let mut vectors: Vec<Vec<Complex64>> = (0..n).map(|k| spec.eigenvectors.column(k)).collect();

    // Cluster indices with equal cosines, refine each cluster against sin-part.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (spec.eigenvalues[end] - spec.eigenvalues[start]).abs() <= PHASE_CLUSTER_TOL {
            end += 1;
        }
        if end - start > 1 {
            let m = end - start;
            let mut small = ComplexMatrix::zeros(m, m);
            let images: Vec<Vec<Complex64>> =
                (start..end).map(|k| im_part.mul_vec(&vectors[k])).collect();
            for a in 0..m {
                for b in 0..m {
                    small.set(a, b, inner(&vectors[start + a], &images[b]));
                }
            }
            let sub = eigh(&small)?;
            let mut rotated: Vec<Vec<Complex64>> = Vec::with_capacity(m);
            for k in 0..m {
                let mut col = vec![Complex64::new(0.0, 0.0); n];
                for a in 0..m {
                    let coeff = sub.eigenvectors.get(a, k);
                    for (ci, cv) in col.iter_mut().zip(vectors[start + a].iter()) {
                        *ci += coeff * cv;
                    }
                }
                rotated.push(col);
            }
            for (k, col) in rotated.into_iter().enumerate() {
                vectors[start + k] = col;
            }
        }
        start = end;
    }

    // Phase of each refined eigenvector from the Rayleigh quotient; π stays +π.
    let mut phases = Vec::with_capacity(n);
    for col in &vectors {
        let image = u.mul_vec(col);
        let lambda = inner(col, &image);
        let mut theta = libm::atan2(lambda.im, lambda.re);
        if theta <= -core::f64::consts::PI + 1e-15 {
            theta = core::f64::consts::PI;
        }
        phases.push(theta);
    }
    Ok((phases, ComplexMatrix::from_columns(&vectors)))
}

/// e^{−i h t} by spectral decomposition of the Hermitian generator.
pub fn unitary_exp(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let spec = eigh(h)?;
    Ok(spec.assemble(|l| {
        let phase = -l * t;
        Complex64::new(libm::cos(phase), libm::sin(phase))
    }))
}

/// Principal logarithm of a unitary: the Hermitian h with e^{−i h} = u and
/// eigenvalues in (−π, π]; an eigenphase of exactly π maps to +π.
pub fn logm_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (phases, v) = eig_unitary(u)?;
    let n = u.rows();
    // u v = e^{iθ} v and u = e^{-ih} force h = -θ, folded back into (−π, π].
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mut hk = -phases[k];
        if hk <= -core::f64::consts::PI + 1e-15 {
            hk = core::f64::consts::PI;
        }
        let col = v.column(k);
        for i in 0..n {
            for j in 0..n {
                let cur = out.get(i, j) + Complex64::new(hk, 0.0) * col[i] * col[j].conj();
                out.set(i, j, cur);
            }
        }
    }
    // Symmetrize round-off.
    let sym = out.add(&out.adjoint()).scale(Complex64::new(0.5, 0.0));
    Ok(sym)
}

/// Orthonormality defect of a set of columns, for tests and assertions.
pub fn orthonormality_defect(m: &ComplexMatrix) -> f64 {
    let k = m.cols();
    let mut worst = 0.0f64;
    for a in 0..k {
        let ca = m.column(a);
        for b in a..k {
            let cb = m.column(b);
            let g = inner(&ca, &cb);
            let target = if a == b { 1.0 } else { 0.0 };
            let d = Complex64::new(g.re - target, g.im);
            worst = worst.max(libm::sqrt(d.norm_sqr()));
        }
    }
    let _ = vec_norm(&m.column(0));
    worst
}
