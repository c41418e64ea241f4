//! Hermitian eigendecomposition (cyclic Jacobi), PSD tests, PSD projection
//! and Gram factorisation.
//!
//! The complex Jacobi sweep annihilates one off-diagonal entry per rotation
//! with a phased plane rotation; the scheme is deterministic (fixed sweep
//! order), which keeps every downstream artifact reproducible. A leaner
//! real-symmetric variant with a reusable workspace lives at the bottom;
//! the feasibility solver calls it millions of times.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CohError, Result};
use crate::fmath;
use crate::matrix::{C64, CoherenceMatrix, ComplexMatrix};

/// Spectral decomposition `H = V Λ V†` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn min_eigenvalue(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Rebuilds `V Λ' V†` after mapping each eigenvalue through `f`.
    pub fn reconstruct(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let d = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(d);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for n in 0..d {
                let vn = self.vectors.get(n, k) * w;
                for m in 0..d {
                    let v = out.get(n, m) + vn * self.vectors.get(m, k).conj();
                    out.set(n, m, v);
                }
            }
        }
        out.hermitize();
        out
    }
}

const MAX_SWEEPS: usize = 60;
const OFF_EPS: f64 = 1e-15;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Errors when the input deviates from Hermitian by more than
/// [`crate::TOL_HERM`] relative to its Frobenius norm.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<EigenSystem> {
    if !h.is_hermitian(crate::TOL_HERM) {
        return Err(CohError::NotHermitian {
            deviation: h.hermitian_deviation(),
        });
    }
    let d = h.dim();
    let mut a = h.clone();
    a.hermitize();
    let mut v = ComplexMatrix::identity(d);
    let scale = a.frobenius_norm().max(1.0);
    let thresh = OFF_EPS * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(fmath::hypot(a.get(p, q).re, a.get(p, q).im));
            }
        }
        if off <= thresh {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a.get(p, q);
                let r = fmath::hypot(apq.re, apq.im);
                if r <= thresh {
                    continue;
                }
                // phase of the pivot and the rotation angle
                let phase = C64::new(apq.re / r, apq.im / r);
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (app - aqq) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + fmath::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + fmath::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / fmath::sqrt(1.0 + t * t);
                let s = t * c;
                // columns: A <- A·U with U[p][p]=c, U[p][q]=s·phase,
                // U[q][p]=-s·conj(phase), U[q][q]=c  (then rows: A <- U†·A)
                for k in 0..d {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * s * phase.conj());
                    a.set(k, q, akq * c - akp * s * phase);
                }
                for k in 0..d {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * s * phase);
                    a.set(q, k, aqk * c - apk * s * phase.conj());
                }
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
                let dp = a.get(p, p);
                let dq = a.get(q, q);
                a.set(p, p, C64::new(dp.re, 0.0));
                a.set(q, q, C64::new(dq.re, 0.0));
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * s * phase.conj());
                    v.set(k, q, vkq * c - vkp * s * phase);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(d, |n, m| v.get(n, order[m]));
    Ok(EigenSystem { values, vectors })
}

/// PSD test: true iff the least eigenvalue is at least
/// `-tol·max(1, ‖H‖_F)`.
pub fn is_psd(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    let eig = eig_hermitian(h)?;
    Ok(eig.min_eigenvalue() >= -tol * h.frobenius_norm().max(1.0))
}

/// Nearest PSD matrix in Frobenius norm: eigenvalues clipped at zero.
/// Idempotent (up to the eigensolver tolerance).
pub fn project_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    Ok(eig.reconstruct(|l| l.max(0.0)))
}

/// Gram factorisation of a coherence matrix: unit vectors `η_n` of length
/// `rank(C)` with `⟨η_n|η_m⟩ = c_nm`.
pub fn gram_vectors(c: &CoherenceMatrix) -> Result<Vec<Vec<C64>>> {
    let d = c.dim();
    let eig = eig_hermitian(c.matrix())?;
    let scale = c.matrix().frobenius_norm().max(1.0);
    if eig.min_eigenvalue() < -crate::PSD_SLACK * scale {
        return Err(CohError::NotPsd {
            min_eigenvalue: eig.min_eigenvalue(),
        });
    }
    let rank_tol = crate::TOL_EIG * scale;
    let kept: Vec<usize> = (0..d).filter(|&k| eig.values[k] > rank_tol).collect();
    let mut vectors = Vec::with_capacity(d);
    for n in 0..d {
        let v: Vec<C64> = kept
            .iter()
            .map(|&k| eig.vectors.get(n, k).conj() * fmath::sqrt(eig.values[k]))
            .collect();
        vectors.push(v);
    }
    Ok(vectors)
}

// ---------------------------------------------------------------------------
// Real-symmetric fast path for the feasibility solver.
// ---------------------------------------------------------------------------

/// Warm-started PSD projection workspace for one real symmetric block.
///
/// Keeps the eigenbasis of the previous projection; since consecutive solver
/// iterates differ little, rotating into the stored basis leaves a nearly
/// diagonal matrix and the Jacobi sweep converges in one or two passes.
pub(crate) struct RealPsdProjector {
    n: usize,
    v: Vec<f64>,
    scratch: Vec<f64>,
    rot: Vec<f64>,
}

impl RealPsdProjector {
    pub fn new(n: usize) -> Self {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Self {
            n,
            v,
            scratch: vec![0.0; n * n],
            rot: vec![0.0; n * n],
        }
    }

    /// Projects the symmetric matrix `a` (row-major, length n²) onto the PSD
    /// cone in place. Returns the least eigenvalue before clipping.
    pub fn project(&mut self, a: &mut [f64]) -> f64 {
        let n = self.n;
        // b = Vᵀ a V in scratch
        let b = &mut self.scratch;
        // tmp = a·V  (store in rot)
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += a[i * n + k] * self.v[k * n + j];
                }
                self.rot[i * n + j] = s;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.v[k * n + i] * self.rot[k * n + j];
                }
                b[i * n + j] = s;
            }
        }
        // symmetrise (V drifts from orthogonality by rounding only)
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (b[i * n + j] + b[j * n + i]);
                b[i * n + j] = avg;
                b[j * n + i] = avg;
            }
        }
        let mut scale: f64 = 0.0;
        for x in b.iter() {
            scale += x * x;
        }
        let thresh = OFF_EPS * fmath::sqrt(scale).max(1.0);

        for _ in 0..MAX_SWEEPS {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(fmath::abs(b[p * n + q]));
                }
            }
            if off <= thresh {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let bpq = b[p * n + q];
                    if fmath::abs(bpq) <= thresh {
                        continue;
                    }
                    let tau = (b[p * n + p] - b[q * n + q]) / (2.0 * bpq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + fmath::sqrt(1.0 + tau * tau))
                    } else {
                        -1.0 / (-tau + fmath::sqrt(1.0 + tau * tau))
                    };
                    let c = 1.0 / fmath::sqrt(1.0 + t * t);
                    let s = t * c;
                    for k in 0..n {
                        let bkp = b[k * n + p];
                        let bkq = b[k * n + q];
                        b[k * n + p] = bkp * c + bkq * s;
                        b[k * n + q] = bkq * c - bkp * s;
                    }
                    for k in 0..n {
                        let bpk = b[p * n + k];
                        let bqk = b[q * n + k];
                        b[p * n + k] = bpk * c + bqk * s;
                        b[q * n + k] = bqk * c - bpk * s;
                    }
                    b[p * n + q] = 0.0;
                    b[q * n + p] = 0.0;
                    for k in 0..n {
                        let vkp = self.v[k * n + p];
                        let vkq = self.v[k * n + q];
                        self.v[k * n + p] = vkp * c + vkq * s;
                        self.v[k * n + q] = vkq * c - vkp * s;
                    }
                }
            }
        }

        let mut min_eig = f64::INFINITY;
        for i in 0..n {
            min_eig = min_eig.min(b[i * n + i]);
        }
        // a <- V diag(λ₊) Vᵀ
        for i in 0..n {
            for j in 0..n {
                let lam = b[j * n + j].max(0.0);
                self.rot[i * n + j] = self.v[i * n + j] * lam;
            }
        }
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.rot[i * n + k] * self.v[j * n + k];
                }
                a[i * n + j] = s;
                a[j * n + i] = s;
            }
        }
        min_eig
    }

    /// Least eigenvalue of the symmetric matrix `a` without modifying it or
    /// the stored basis.
    pub fn min_eigenvalue(&mut self, a: &[f64]) -> f64 {
        let n = self.n;
        let mut b = a.to_vec();
        let mut scale: f64 = 0.0;
        for x in b.iter() {
            scale += x * x;
        }
        let thresh = OFF_EPS * fmath::sqrt(scale).max(1.0);
        for _ in 0..MAX_SWEEPS {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(fmath::abs(b[p * n + q]));
                }
            }
            if off <= thresh {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let bpq = b[p * n + q];
                    if fmath::abs(bpq) <= thresh {
                        continue;
                    }
                    let tau = (b[p * n + p] - b[q * n + q]) / (2.0 * bpq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + fmath::sqrt(1.0 + tau * tau))
                    } else {
                        -1.0 / (-tau + fmath::sqrt(1.0 + tau * tau))
                    };
                    let c = 1.0 / fmath::sqrt(1.0 + t * t);
                    let s = t * c;
                    for k in 0..n {
                        let bkp = b[k * n + p];
                        let bkq = b[k * n + q];
                        b[k * n + p] = bkp * c + bkq * s;
                        b[k * n + q] = bkq * c - bkp * s;
                    }
                    for k in 0..n {
                        let bpk = b[p * n + k];
                        let bqk = b[q * n + k];
                        b[p * n + k] = bpk * c + bqk * s;
                        b[q * n + k] = bqk * c - bpk * s;
                    }
                    b[p * n + q] = 0.0;
                    b[q * n + p] = 0.0;
                }
            }
        }
        let mut min_eig = f64::INFINITY;
        for i in 0..n {
            min_eig = min_eig.min(b[i * n + i]);
        }
        min_eig
    }
}
