//! Dense complex matrices in row-major order, sized for dimensions up to 64.
//!
//! This is the universal carrier for states, gates, dynamical maps and Choi
//! matrices. Everything is a plain `Vec<Complex64>` with explicit dimensions;
//! all operations are pure functions of immutable inputs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex;

use crate::error::{Error, Result};

/// Complex number type used throughout, f64 precision.
pub type Complex64 = Complex<f64>;

/// Which tensor factor of a bipartite space an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

impl Slot {
    /// The other slot.
    pub fn other(self) -> Slot {
        match self {
            Slot::First => Slot::Second,
            Slot::Second => Slot::First,
        }
    }
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Create a matrix from row-major data. Panics if the element count does
    /// not match the dimensions; that is a programming error, not an input error.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "element count must equal rows*cols");
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a slice of (re, im) pairs, row-major.
    pub fn from_re_im(rows: usize, cols: usize, entries: &[(f64, f64)]) -> Self {
        let data = entries.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        Self::new(rows, cols, data)
    }

    /// Build from rows of real numbers.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::new(r, c, data)
    }

    /// Diagonal matrix from complex entries.
    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = value;
    }

    /// True when every entry is finite (no NaN/Inf crept in).
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().map(|z| z * factor).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self::new(self.rows, self.cols, data)
    }

    /// Matrix product self · other.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let d = a - b;
                libm::sqrt(d.norm_sqr())
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| libm::sqrt(z.norm_sqr())).fold(0.0, f64::max)
    }

    /// Relative Hermitian asymmetry: max |m - m†| / max(1, ‖m‖_F).
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let scale = self.frobenius_norm().max(1.0);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..=i {
                let d = self.get(i, j) - self.get(j, i).conj();
                worst = worst.max(libm::sqrt(d.norm_sqr()));
            }
        }
        worst / scale
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= tol
    }

    /// ‖u†u − 1‖_F, the unitarity defect.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        self.adjoint().mul(self).sub(&Self::identity(n)).frobenius_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitary_deviation() <= tol
    }

    /// Kronecker product; slot order is (first factor, second factor).
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, aij * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Partial trace of a matrix on a (d_first · d_second)-dimensional bipartite
    /// space, keeping the named slot. The trace is preserved.
    pub fn partial_trace(&self, d_first: usize, d_second: usize, keep: Slot) -> Result<Self> {
        let n = d_first * d_second;
        if !self.is_square() || self.rows != n {
            return Err(Error::DimensionMismatch(format!(
                "partial_trace expects a {n}x{n} matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        match keep {
            Slot::First => {
                let mut out = Self::zeros(d_first, d_first);
                for i in 0..d_first {
                    for j in 0..d_first {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..d_second {
                            acc += self.get(i * d_second + k, j * d_second + k);
                        }
                        out.set(i, j, acc);
                    }
                }
                Ok(out)
            }
            Slot::Second => {
                let mut out = Self::zeros(d_second, d_second);
                for i in 0..d_second {
                    for j in 0..d_second {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..d_first {
                            acc += self.get(k * d_second + i, k * d_second + j);
                        }
                        out.set(i, j, acc);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Reshuffle of a d²×d² matrix: out[(i,k),(j,l)] = in[(i,j),(k,l)] with
    /// row-major pair indexing. Involutive. This is the index permutation that
    /// turns a dynamical map in the vectorized convention into its Choi matrix.
    pub fn reshuffle(&self, d: usize) -> Result<Self> {
        let n = d * d;
        if !self.is_square() || self.rows != n {
            return Err(Error::DimensionMismatch(format!(
                "reshuffle expects a {n}x{n} matrix for d={d}, got {}x{}",
                self.rows, self.cols
            )));
        }
        let mut out = Self::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        out.set(i * d + k, j * d + l, self.get(i * d + j, k * d + l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self.set(i, j, v[i]);
        }
    }

    /// Stack column vectors into a matrix.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let c = cols.len();
        let r = cols[0].len();
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            m.set_column(j, col);
        }
        m
    }
}

/// Row-major vectorization: vec(ρ)[i·d + j] = ρ[i,j].
pub fn vec_row_major(m: &ComplexMatrix) -> Vec<Complex64> {
    debug_assert!(m.is_square());
    m.data().to_vec()
}

/// Inverse of [`vec_row_major`].
pub fn unvec_row_major(v: &[Complex64], d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d);
    ComplexMatrix::new(d, d, v.to_vec())
}

/// ⟨a|b⟩ with the physicist's convention (conjugate-linear in the first slot).
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// Tensor product of two state vectors, slot order (first, second).
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}
