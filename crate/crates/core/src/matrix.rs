//! Dense complex matrices sized for few-level systems.
//!
//! Storage is a row-major `Vec<Complex<T>>`. The arithmetic operators on
//! references (`&a * &b`, `&a + &b`, ...) assume equal dimensions and panic
//! otherwise; the free functions ([`commutator`], [`mat_exp`], ...) validate
//! their inputs and return [`Error`]s instead.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{is_finite, re, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries.
    pub fn new(data: Vec<Complex<T>>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() {
            return Err(Error::NotSquare { entries: data.len() });
        }
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if !data.iter().all(|&z| is_finite(z)) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex<T>; N]; N]) -> Result<Self> {
        Self::new(rows.into_iter().flatten().collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); dim])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = re(d);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + self[(k, k)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// Maximum entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Maximum entry-wise distance to `other`. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|&z| is_finite(z))
    }

    /// ‖a − a†‖_F.
    pub fn hermiticity_defect(&self) -> T {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, rel_tol: T) -> bool {
        self.hermiticity_defect() <= rel_tol * self.frobenius_norm()
    }

    pub(crate) fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian(T::HERMITIAN_TOL) {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                deviation: self.hermiticity_defect().as_f64(),
            })
        }
    }

    pub(crate) fn ensure_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    /// Matrix product that reports a dimension mismatch instead of panicking.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_dim(other)?;
        Ok(self * other)
    }

    /// tr(a·b) without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for k in 0..n {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Induced 1-norm (max column sum).
    fn norm_one(&self) -> T {
        (0..self.dim)
            .map(|j| (0..self.dim).fold(T::zero(), |acc, i| acc + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect();
        ComplexMatrix { dim: self.dim, data }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect();
        ComplexMatrix { dim: self.dim, data }
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

/// Pauli matrices and the 2×2 identity.
pub mod pauli {
    use super::ComplexMatrix;
    use crate::scalar::{c, Real};

    pub fn identity<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::identity(2)
    }

    pub fn sigma_x<T: Real>() -> ComplexMatrix<T> {
        let (o, l) = (T::zero(), T::one());
        ComplexMatrix {
            dim: 2,
            data: vec![c(o, o), c(l, o), c(l, o), c(o, o)],
        }
    }

    pub fn sigma_y<T: Real>() -> ComplexMatrix<T> {
        let (o, l) = (T::zero(), T::one());
        ComplexMatrix {
            dim: 2,
            data: vec![c(o, o), c(o, -l), c(o, l), c(o, o)],
        }
    }

    pub fn sigma_z<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_diagonal(&[T::one(), -T::one()])
    }
}

/// `ab − ba`.
pub fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    a.ensure_same_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

/// `ab + ba`.
pub fn anticommutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    a.ensure_same_dim(b)?;
    Ok(&(a * b) + &(b * a))
}

/// Matrix exponential.
///
/// 2×2 inputs use the closed form `e^a = e^α (cosh r·I + sinh r/r·B)` with
/// `α = tr a / 2`, `B = a − αI` and `r² = −det B` (so `B² = r²·I`). Larger
/// inputs go through scaling and squaring of a truncated Taylor series.
pub fn mat_exp<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let out = match a.dim() {
        1 => ComplexMatrix {
            dim: 1,
            data: vec![a.data[0].exp()],
        },
        2 => exp_2x2(a),
        _ => exp_scaling_squaring(a),
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite)
    }
}

fn exp_2x2<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let half = T::lit(0.5);
    let alpha = (a[(0, 0)] + a[(1, 1)]) * half;
    let b00 = (a[(0, 0)] - a[(1, 1)]) * half;
    let (b01, b10) = (a[(0, 1)], a[(1, 0)]);
    let r2 = b00 * b00 + b01 * b10;
    let r = r2.sqrt();

    // cosh r and sinh r / r are even in r; near r = 0 use their series
    let (cosh_r, sinhc_r) = if r.norm() < T::lit(1e-3) {
        let r4 = r2 * r2;
        let r6 = r4 * r2;
        (
            re(T::one()) + r2 * T::lit(0.5) + r4 / T::lit(24.0) + r6 / T::lit(720.0),
            re(T::one()) + r2 / T::lit(6.0) + r4 / T::lit(120.0) + r6 / T::lit(5040.0),
        )
    } else {
        (r.cosh(), r.sinh() / r)
    };

    let ea = alpha.exp();
    ComplexMatrix {
        dim: 2,
        data: vec![
            ea * (cosh_r + sinhc_r * b00),
            ea * sinhc_r * b01,
            ea * sinhc_r * b10,
            ea * (cosh_r - sinhc_r * b00),
        ],
    }
}

fn exp_scaling_squaring<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let norm = a.norm_one();
    let mut squarings = 0i32;
    if norm > T::lit(0.5) {
        squarings = (norm / T::lit(0.5)).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scaled = a.scale_real(T::lit(2f64.powi(-squarings)));

    let n = a.dim();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).scale_real(T::one() / T::lit(k as f64));
        sum = &sum + &term;
        if term.max_abs() <= T::epsilon() * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    a.ensure_hermitian()?;
    let n = a.dim();
    let mut eig = match n {
        1 => vec![a[(0, 0)].re],
        2 => {
            let mean = (a[(0, 0)].re + a[(1, 1)].re) * T::lit(0.5);
            let half_gap = (a[(0, 0)].re - a[(1, 1)].re) * T::lit(0.5);
            let radius = half_gap.hypot(a[(0, 1)].norm());
            vec![mean - radius, mean + radius]
        }
        _ => {
            // A = X + iY embeds as the real symmetric [[X, −Y], [Y, X]], whose
            // spectrum is that of A with every eigenvalue doubled.
            let mut doubled = jacobi_eigenvalues(real_embedding(a), 2 * n);
            doubled.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
            doubled.into_iter().step_by(2).collect()
        }
    };
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

fn real_embedding<T: Real>(a: &ComplexMatrix<T>) -> Vec<T> {
    let n = a.dim();
    let m = 2 * n;
    let mut out = vec![T::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            // symmetrize so rounding in a − a† does not leak in
            let z = (a[(i, j)] + a[(j, i)].conj()) * T::lit(0.5);
            out[i * m + j] = z.re;
            out[(i + n) * m + (j + n)] = z.re;
            out[i * m + (j + n)] = -z.im;
            out[(i + n) * m + j] = z.im;
        }
    }
    out
}

/// Cyclic Jacobi rotations on a dense real symmetric matrix.
fn jacobi_eigenvalues<T: Real>(mut a: Vec<T>, n: usize) -> Vec<T> {
    let off = |a: &[T]| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + a[i * n + j] * a[i * n + j];
                }
            }
        }
        s
    };
    let total = a.iter().fold(T::zero(), |acc, &x| acc + x * x);
    for _sweep in 0..100 {
        if off(&a) <= T::epsilon() * T::epsilon() * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|k| a[k * n + k]).collect()
}

/// Positive semi-definiteness test: `(min eigenvalue ≥ −tol, min eigenvalue)`.
pub fn psd_check<T: Real>(a: &ComplexMatrix<T>, tol: T) -> Result<(bool, T)> {
    let eig = hermitian_eigenvalues(a)?;
    let min = eig[0];
    Ok((min >= -tol, min))
}
