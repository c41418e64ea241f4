//! Dense complex matrices and the coherence-pattern newtype.
//!
//! Storage is row-major `Vec<Complex<f64>>`. Dimensions stay small (the
//! solver works on reduced problems, typically below a few hundred), so no
//! attempt is made at blocking or sparsity.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CohError, Result};
use crate::fmath;

pub type C64 = num_complex::Complex<f64>;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for n in 0..dim {
            m.set(n, n, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn all_ones(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(1.0, 0.0); dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for n in 0..dim {
            for m in 0..dim {
                data.push(f(n, m));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(dim, |n, m| C64::new(f(n, m), 0.0))
    }

    /// Builds from row-major data; errors unless `data.len()` is `dim*dim`
    /// and every entry is finite.
    pub fn from_data(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(CohError::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CohError::Structure("non-finite matrix entry".to_string()));
        }
        Ok(Self { dim, data })
    }

    /// Rank-one matrix `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        Self::from_fn(dim, |n, m| v[n] * v[m].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.data[n * self.dim + m]
    }

    #[inline]
    pub fn set(&mut self, n: usize, m: usize, v: C64) {
        self.data[n * self.dim + m] = v;
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, n: usize) -> &[C64] {
        &self.data[n * self.dim..(n + 1) * self.dim]
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.dim, |n, m| self.get(m, n).conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|n| self.get(n, n)).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for n in 0..d {
            for k in 0..d {
                let a = self.get(n, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for m in 0..d {
                    let v = out.get(n, m) + a * other.get(k, m);
                    out.set(n, m, v);
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|z| fmath::hypot(z.re, z.im))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let d = a - b;
                fmath::hypot(d.re, d.im)
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation `|A[n][m] - conj(A[m][n])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for n in 0..self.dim {
            for m in n..self.dim {
                let d = self.get(n, m) - self.get(m, n).conj();
                dev = dev.max(fmath::hypot(d.re, d.im));
            }
        }
        dev
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * self.frobenius_norm().max(1.0)
    }

    /// Replaces the matrix by its Hermitian part `(A + A†)/2`.
    pub fn hermitize(&mut self) {
        for n in 0..self.dim {
            for m in (n + 1)..self.dim {
                let avg = (self.get(n, m) + self.get(m, n).conj()) * 0.5;
                self.set(n, m, avg);
                self.set(m, n, avg.conj());
            }
            let d = self.get(n, n);
            self.set(n, n, C64::new(d.re, 0.0));
        }
    }

    pub fn max_imag(&self) -> f64 {
        self.data
            .iter()
            .map(|z| fmath::abs(z.im))
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(CohError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Entry-wise (Hadamard/Schur) product. Hermitian inputs give a Hermitian
/// result, and PSD inputs a PSD result (Schur product theorem).
pub fn hadamard(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(CohError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
    Ok(ComplexMatrix { dim: a.dim, data })
}

/// Coherence pattern matrix: Hermitian PSD with unit diagonal. Acts on
/// observables and states by Hadamard multiplication (a genuinely
/// incoherent operation).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceMatrix(ComplexMatrix);

impl CoherenceMatrix {
    /// Validates Hermiticity, unit diagonal and positive semidefiniteness.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_hermitian(crate::TOL_HERM) {
            return Err(CohError::NotHermitian {
                deviation: m.hermitian_deviation(),
            });
        }
        for n in 0..m.dim() {
            let d = m.get(n, n);
            if fmath::abs(d.re - 1.0) > crate::TOL_POVM || fmath::abs(d.im) > crate::TOL_POVM {
                return Err(CohError::Structure(alloc::format!(
                    "coherence matrix diagonal entry {n} is not 1 (got {}+{}i)",
                    d.re,
                    d.im
                )));
            }
        }
        let mut h = m;
        h.hermitize();
        let eig = crate::eigen::eig_hermitian(&h)?;
        let min = eig.min_eigenvalue();
        if min < -crate::PSD_SLACK * h.frobenius_norm().max(1.0) {
            return Err(CohError::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self(h))
    }

    /// Wraps without validating; for constructors that guarantee the
    /// invariants structurally.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.0.get(n, m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Identity pattern: off-diagonal coherence fully suppressed.
    pub fn identity_pattern(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    /// All-ones pattern: the trivial (no decoherence) operation.
    pub fn all_ones(dim: usize) -> Self {
        Self(ComplexMatrix::all_ones(dim))
    }
}
