//! Small dense complex linear algebra and seeded Gaussian sampling.
//!
//! Everything here works on dimensions n <= 16 and is deliberately plain:
//! LU with partial pivoting is the single solve path, and random draws come
//! from a caller-owned generator so results stay reproducible.

pub use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Relative pivot threshold below which a matrix is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-14;

/// A fixed-length vector of complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_reals(re: &[f64]) -> Self {
        Self {
            entries: re.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.entries.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max-magnitude norm.
    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.entries[i]
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

/// A square matrix of complex numbers, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &ComplexVector) -> ComplexVector {
        debug_assert_eq!(self.n, x.len());
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

/// LU factorization with partial pivoting, kept private to the two entry
/// points below. Returns the permuted factors, the pivot permutation sign,
/// and the smallest pivot magnitude encountered.
fn lu_decompose(a: &ComplexMatrix) -> (ComplexMatrix, Vec<usize>, f64, f64) {
    let n = a.n();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut min_pivot = f64::INFINITY;

    for col in 0..n {
        let mut best = col;
        let mut best_mag = lu.get(col, col).norm();
        for row in col + 1..n {
            let mag = lu.get(row, col).norm();
            if mag > best_mag {
                best = row;
                best_mag = mag;
            }
        }
        if best != col {
            for j in 0..n {
                let tmp = lu.get(col, j);
                lu.set(col, j, lu.get(best, j));
                lu.set(best, j, tmp);
            }
            perm.swap(col, best);
            sign = -sign;
        }
        min_pivot = min_pivot.min(best_mag);
        if best_mag == 0.0 {
            continue;
        }
        let pivot = lu.get(col, col);
        for row in col + 1..n {
            let factor = lu.get(row, col) / pivot;
            lu.set(row, col, factor);
            for j in col + 1..n {
                let v = lu.get(row, j) - factor * lu.get(col, j);
                lu.set(row, j, v);
            }
        }
    }
    (lu, perm, sign, min_pivot)
}

/// Solves `A x = y` by LU with partial pivoting.
///
/// Fails with [`Error::SingularMatrix`] when some pivot magnitude falls below
/// `SINGULARITY_THRESHOLD` times the largest entry magnitude of `A`.
pub fn solve_linear(a: &ComplexMatrix, y: &ComplexVector) -> Result<ComplexVector> {
    let n = a.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: y.len(),
        });
    }
    let scale = a.max_magnitude();
    let threshold = SINGULARITY_THRESHOLD * scale;
    let (lu, perm, _, min_pivot) = lu_decompose(a);
    if !(min_pivot > threshold) {
        return Err(Error::SingularMatrix {
            pivot: min_pivot,
            threshold,
        });
    }

    // Forward substitution on the permuted right-hand side, then back
    // substitution.
    let mut x: Vec<Complex64> = perm.iter().map(|&pi| y[pi]).collect();
    for i in 1..n {
        for j in 0..i {
            let t = lu.get(i, j) * x[j];
            x[i] -= t;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let t = lu.get(i, j) * x[j];
            x[i] -= t;
        }
        x[i] /= lu.get(i, i);
    }
    Ok(ComplexVector::new(x))
}

/// Determinant via the same pivoted LU used by [`solve_linear`].
pub fn determinant(a: &ComplexMatrix) -> Complex64 {
    let (lu, _, sign, _) = lu_decompose(a);
    let mut det = Complex64::new(sign, 0.0);
    for i in 0..a.n() {
        det *= lu.get(i, i);
    }
    det
}

/// Hermitian inner product `<x, y> = sum_j x_j * conj(y_j)`.
pub fn hermitian_inner(x: &ComplexVector, y: &ComplexVector) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum())
}

/// Draws a vector whose entries have independent standard-normal real and
/// imaginary parts.
pub fn sample_complex_gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect()
}
