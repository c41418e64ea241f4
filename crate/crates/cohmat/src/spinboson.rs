//! Collective-decoherence model of N qubits: coherence matrices indexed by
//! total excitation number, the analytic robustness bounds built from
//! Hellinger affinities and the Jacobi theta function, the exact N=2 curve,
//! the feasibility-solver threshold curve, and the explicit banded
//! instrument construction valid near the classical limit.
//!
//! The decoherence strength `λ ∈ [0, 1]` is an abstract parameter; no bath
//! dynamics are simulated.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CohError, Result};
use crate::fmath;
use crate::gii::{alpha_star, GiiWitness, Provenance, SolverOptions};
use crate::matrix::{C64, CoherenceMatrix, ComplexMatrix};
use crate::povm::IncoherentObservable;
use crate::symmetry::CovariantAction;

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CohError::OutOfRange {
            name: "lambda",
            value: lambda,
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CohError::OutOfRange {
            name: "alpha",
            value: alpha,
        });
    }
    Ok(())
}

/// `λ^(k²)` with the `0⁰ = 1` convention, so that `λ = 0` leaves the
/// same-excitation blocks intact.
#[inline]
fn lambda_pow_sq(lambda: f64, k: i64) -> f64 {
    if k == 0 {
        1.0
    } else {
        fmath::powi(lambda, (k * k) as i32)
    }
}

/// Binomial coefficient as f64 (exact for the sizes used here).
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as f64
}

/// Full 2^N-dimensional coherence matrix `c_{n,m} = λ^{(|n|−|m|)²}` over
/// bitstring basis labels.
pub fn sb_full_matrix(n_qubits: usize, lambda: f64) -> Result<CoherenceMatrix> {
    check_lambda(lambda)?;
    if n_qubits == 0 || n_qubits > 12 {
        return Err(CohError::OutOfRange {
            name: "n_qubits",
            value: n_qubits as f64,
        });
    }
    let dim = 1usize << n_qubits;
    let pop: Vec<i64> = (0..dim).map(|i| i.count_ones() as i64).collect();
    let m = ComplexMatrix::from_real_fn(dim, |a, b| lambda_pow_sq(lambda, pop[a] - pop[b]));
    Ok(CoherenceMatrix::new_unchecked(m))
}

/// Reduced `(N+1)`-dimensional Toeplitz pattern with first row `λ^(k²)`.
pub fn sb_reduced_matrix(n_qubits: usize, lambda: f64) -> CoherenceMatrix {
    let dim = n_qubits + 1;
    let m = ComplexMatrix::from_real_fn(dim, |a, b| {
        lambda_pow_sq(lambda.clamp(0.0, 1.0), a as i64 - b as i64)
    });
    CoherenceMatrix::new_unchecked(m)
}

/// Hellinger data of the reduced noise line: weights, the affinity terms
/// `u_k` and the pairwise `β_kk'`.
#[derive(Debug, Clone)]
pub struct BetaTable {
    pub n_qubits: usize,
    pub alpha: f64,
    /// Coin-toss weights `c_N(k) = binom(N,k)/2^N`.
    pub weights: Vec<f64>,
    /// `q_k = c_N(k)(1−α)`.
    pub q: Vec<f64>,
    /// `u_k = √(q_k(α+q_k)) − q_k`.
    pub u: Vec<f64>,
}

impl BetaTable {
    /// `β_kk' = 1 − α + u_k + u_k'`; equals the Hellinger affinity of rows
    /// `k ≠ k'` of the reduced noise line.
    pub fn beta(&self, k: usize, kp: usize) -> f64 {
        1.0 - self.alpha + self.u[k] + self.u[kp]
    }
}

pub fn beta_table(n_qubits: usize, alpha: f64) -> Result<BetaTable> {
    check_alpha(alpha)?;
    let scale = fmath::powi(2.0, n_qubits as i32);
    let weights: Vec<f64> = (0..=n_qubits).map(|k| binomial(n_qubits, k) / scale).collect();
    let q: Vec<f64> = weights.iter().map(|c| c * (1.0 - alpha)).collect();
    let u: Vec<f64> = q
        .iter()
        .map(|&qk| fmath::sqrt(qk * (alpha + qk)) - qk)
        .collect();
    Ok(BetaTable {
        n_qubits,
        alpha,
        weights,
        q,
        u,
    })
}

/// `ϑ₃(π/2, λ) = 1 + 2 Σ_{k≥1} (−1)^k λ^(k²)`, truncated once the tail
/// bound `λ^((K+1)²)/(1−λ)` drops below `tol`.
pub fn theta3_half_pi(lambda: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(CohError::OutOfRange {
            name: "lambda",
            value: lambda,
        });
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let mut sum = 1.0;
    let mut sign = -1.0;
    for k in 1..K_MAX {
        sum += 2.0 * sign * fmath::powi(lambda, (k * k) as i32);
        sign = -sign;
        let tail = fmath::powi(lambda, ((k + 1) * (k + 1)) as i32) / (1.0 - lambda);
        if tail < tol {
            return Ok(sum);
        }
    }
    Err(CohError::Undefined(format!(
        "theta3 series did not reach tol {tol} for lambda {lambda}"
    )))
}

const K_MAX: i64 = 4096;

/// Inverts a decreasing `β` component by bisection on `[0, 1]`.
fn invert_beta(n_qubits: usize, k: usize, kp: usize, target: f64) -> Result<f64> {
    let beta_at = |a: f64| -> f64 {
        let t = beta_table(n_qubits, a).expect("alpha in range");
        t.beta(k, kp)
    };
    if target > beta_at(0.0) + 1e-12 || target < -1e-12 {
        return Err(CohError::OutOfRange {
            name: "beta target",
            value: target,
        });
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if beta_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The analytic sandwich around the threshold curve:
/// `U_N = β₀₁⁻¹(λ)` from the tradeoff bound, `L_N = β₀₀⁻¹(1 − ϑ₃(π/2,λ))`
/// from the Toeplitz spectral bound. `ϑ₃ ≤ L_N ≤ α_N ≤ U_N`.
pub fn bounds_ul(n_qubits: usize, lambda: f64) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    if lambda >= 1.0 {
        return Ok((0.0, 0.0));
    }
    let u_n = invert_beta(n_qubits, 0, 1, lambda)?;
    let theta = theta3_half_pi(lambda, 1e-14)?;
    let l_n = invert_beta(n_qubits, 0, 0, 1.0 - theta)?;
    Ok((u_n, l_n))
}

/// Exact N=2 threshold: `α₂(λ) = 1 − 4λ²/(3 + λ⁴ + 2√2(1−λ²))`.
pub fn alpha2_closed(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    1.0 - 4.0 * l2 / (3.0 + l2 * l2 + 2.0 * core::f64::consts::SQRT_2 * (1.0 - l2))
}

/// Reduced noise line `p_k(j) = α δ_kj + (1−α) c_N(j)` on the excitation
/// labels.
pub fn reduced_alpha_line(n_qubits: usize, alpha: f64) -> IncoherentObservable {
    let a = alpha.clamp(0.0, 1.0);
    let dim = n_qubits + 1;
    let scale = fmath::powi(2.0, n_qubits as i32);
    let mut table = vec![0.0; dim * dim];
    for k in 0..dim {
        for j in 0..dim {
            let w = binomial(n_qubits, j) / scale;
            table[k * dim + j] = (1.0 - a) * w + if k == j { a } else { 0.0 };
        }
    }
    IncoherentObservable::new(dim, dim, table).expect("well-formed by construction")
}

/// Same line in the full 2^N dimension: mixes the excitation-space
/// projectors with their depolarisation.
pub fn full_alpha_line(n_qubits: usize, alpha: f64) -> Result<IncoherentObservable> {
    check_alpha(alpha)?;
    if n_qubits > 12 {
        return Err(CohError::OutOfRange {
            name: "n_qubits",
            value: n_qubits as f64,
        });
    }
    let dim = 1usize << n_qubits;
    let nout = n_qubits + 1;
    let mut table = vec![0.0; dim * nout];
    for n in 0..dim {
        let exc = n.count_ones() as usize;
        for j in 0..nout {
            let w = binomial(n_qubits, j) / dim as f64;
            table[n * nout + j] = (1.0 - alpha) * w + if exc == j { alpha } else { 0.0 };
        }
    }
    IncoherentObservable::new(dim, nout, table)
}

/// One sample of the threshold curve.
#[derive(Debug, Clone)]
pub struct CurveSample {
    pub lambda: f64,
    pub u_n: f64,
    pub l_n: f64,
    pub theta3: f64,
    /// Solver threshold; `None` when not requested.
    pub alpha_n: Option<f64>,
    /// True when the bisection stopped inside the solver's gray zone.
    pub flagged: bool,
}

/// Sweeps the reduced covariant feasibility threshold over a λ grid.
pub fn alpha_n_curve(
    n_qubits: usize,
    lambdas: &[f64],
    opts: &SolverOptions,
    with_solver: bool,
) -> Result<Vec<CurveSample>> {
    if n_qubits == 0 || n_qubits > 30 {
        return Err(CohError::OutOfRange {
            name: "n_qubits",
            value: n_qubits as f64,
        });
    }
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        check_lambda(lambda)?;
        let (u_n, l_n) = bounds_ul(n_qubits, lambda)?;
        let theta3 = theta3_half_pi(lambda.min(1.0 - 1e-12), 1e-14)?;
        let (alpha_n, flagged) = if with_solver {
            let c = sb_reduced_matrix(n_qubits, lambda);
            let mut solver_opts = opts.clone();
            solver_opts.covariance = Some(CovariantAction::exchange(n_qubits + 1));
            let line = move |a: f64| reduced_alpha_line(n_qubits, a);
            let res = alpha_star(&c, &line, &solver_opts)?;
            (Some(res.alpha), res.flagged)
        } else {
            (None, false)
        };
        out.push(CurveSample {
            lambda,
            u_n,
            l_n,
            theta3,
            alpha_n,
            flagged,
        });
    }
    Ok(out)
}

/// Inverse threshold `λ*(α) = α_N⁻¹(α)`: the decoherence strength at which
/// the noise line at weight `α` sits exactly on the feasibility boundary.
/// Feasibility is monotone (divisibility): smaller `λ` keeps membership.
pub fn lambda_threshold(
    n_qubits: usize,
    alpha: f64,
    opts: &SolverOptions,
    tol: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    let line = reduced_alpha_line(n_qubits, alpha);
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut solver_opts = opts.clone();
    solver_opts.covariance = Some(CovariantAction::exchange(n_qubits + 1));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let c = sb_reduced_matrix(n_qubits, mid);
        let verdict = crate::gii::solve_gii(&c, &line, &solver_opts)?;
        match verdict.status {
            crate::gii::FeasStatus::Feasible => lo = mid,
            // the gray band is narrower than any tol used here; lean on
            // monotonicity and shrink from above
            _ => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Decoherence strength realised by the banded construction:
/// `λ = u₀(α) + u₁(α)` with `u_k = √(q_k(α+q_k))`.
pub fn appendix_h_lambda(n_qubits: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let t = beta_table(n_qubits, alpha)?;
    Ok(fmath::sqrt(t.q[0] * (alpha + t.q[0])) + fmath::sqrt(t.q[1] * (alpha + t.q[1])))
}

/// Explicit banded instrument for the reduced problem at
/// `λ = u₀(α) + u₁(α)`, proving feasibility of the noise line near the
/// classical limit. Valid for `N ≥ 5` (smaller N would need modified
/// corner blocks; closed forms cover those cases).
pub fn appendix_h_gii(n_qubits: usize, alpha: f64) -> Result<GiiWitness> {
    check_alpha(alpha)?;
    if n_qubits < 5 {
        return Err(CohError::Unsupported(format!(
            "banded construction requires N >= 5, got {n_qubits}"
        )));
    }
    let n = n_qubits;
    let dim = n + 1;
    let t = beta_table(n, alpha)?;
    let q = &t.q;
    let u0 = fmath::sqrt(q[0] * (alpha + q[0]));
    let u1 = fmath::sqrt(q[1] * (alpha + q[1]));
    let lambda = u0 + u1;
    let c_full = sb_reduced_matrix(n, lambda);
    // remainder beyond the tridiagonal band, split across the middle blocks
    let g_rem = ComplexMatrix::from_real_fn(dim, |a, b| {
        if (a as i64 - b as i64).unsigned_abs() >= 2 {
            c_full.get(a, b).re
        } else {
            0.0
        }
    });

    let rev = |m: &ComplexMatrix| -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, |a, b| m.get(dim - 1 - a, dim - 1 - b))
    };
    let diag_block = |j: usize| -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        for a in 0..dim {
            m.set(a, a, C64::new(q[j], 0.0));
        }
        m.set(j, j, C64::new(alpha + q[j], 0.0));
        m
    };
    let band = |j: usize, w: f64| -> ComplexMatrix {
        let mut m = diag_block(j);
        m.set(j - 1, j, C64::new(w, 0.0));
        m.set(j, j - 1, C64::new(w, 0.0));
        m.set(j, j + 1, C64::new(w, 0.0));
        m.set(j + 1, j, C64::new(w, 0.0));
        m
    };
    let parity_w = |j: usize| if j % 2 == 1 { u1 } else { u0 };

    let mut blocks: Vec<Option<ComplexMatrix>> = vec![None; dim];
    // edge blocks: rank-deficient by construction, with a corner correction
    // that cancels against its mirror
    let mut c0 = diag_block(0);
    c0.set(0, 1, C64::new(u0, 0.0));
    c0.set(1, 0, C64::new(u0, 0.0));
    let mut c1 = diag_block(1);
    c1.set(0, 1, C64::new(u1, 0.0));
    c1.set(1, 0, C64::new(u1, 0.0));
    c1.set(1, 2, C64::new(u1, 0.0));
    c1.set(2, 1, C64::new(u1, 0.0));
    c1.set(0, 2, C64::new(q[1], 0.0));
    c1.set(2, 0, C64::new(q[1], 0.0));
    c1.set(n - 2, n, C64::new(-q[1], 0.0));
    c1.set(n, n - 2, C64::new(-q[1], 0.0));
    blocks[n] = Some(rev(&c0));
    blocks[n - 1] = Some(rev(&c1));
    blocks[0] = Some(c0);
    blocks[1] = Some(c1);

    if n % 2 == 0 {
        let j0 = n / 2;
        for j in 2..j0 {
            blocks[j] = Some(band(j, parity_w(j)));
        }
        blocks[j0] = Some(band(j0, parity_w(j0)).add(&g_rem)?);
        for jj in 1..(j0 - 1) {
            let mirror = rev(blocks[j0 - jj].as_ref().expect("filled"));
            blocks[j0 + jj] = Some(mirror);
        }
    } else {
        let j0 = (n - 1) / 2;
        for j in 2..j0 {
            blocks[j] = Some(band(j, parity_w(j)));
        }
        let w = parity_w(j0);
        let mut d_mid = ComplexMatrix::zeros(dim);
        for a in 0..dim {
            d_mid.set(a, a, C64::new(q[j0], 0.0));
        }
        d_mid.set(j0, j0, C64::new(alpha + q[j0], 0.0));
        d_mid.set(j0 - 1, j0, C64::new(w, 0.0));
        d_mid.set(j0, j0 - 1, C64::new(w, 0.0));
        d_mid.set(j0, j0 + 1, C64::new(0.5 * lambda, 0.0));
        d_mid.set(j0 + 1, j0, C64::new(0.5 * lambda, 0.0));
        let half_rem = g_rem.scale(0.5);
        blocks[j0] = Some(d_mid.add(&half_rem)?);
        blocks[j0 + 1] = Some(rev(&d_mid).add(&half_rem)?);
        for jj in 1..(j0 - 1) {
            let mirror = rev(blocks[j0 - jj].as_ref().expect("filled"));
            blocks[j0 + 1 + jj] = Some(mirror);
        }
    }
    let blocks: Vec<ComplexMatrix> = blocks
        .into_iter()
        .map(|b| b.expect("all outcomes populated"))
        .collect();
    Ok(GiiWitness::new(dim, blocks, Provenance::AppendixH))
}

/// Small-coherence asymptotics of the threshold curve.
#[derive(Debug, Clone, Copy)]
pub struct Asymptote {
    /// `k_N = (1 + √N) / 2^{N/2}`: the leading coefficient of
    /// `λ = k_N √(1−α) + O(1−α)`.
    pub k_n: f64,
    n_qubits: usize,
}

impl Asymptote {
    /// Bound on `|α_N⁻¹(α) − k_N √(1−α)|`.
    pub fn error_bound(&self, alpha: f64) -> f64 {
        let _ = self.n_qubits;
        if alpha <= 0.0 {
            return f64::INFINITY;
        }
        (1.0 - alpha) + 1.5 * self.k_n * fmath::powf((1.0 - alpha) / alpha, 1.5)
    }
}

pub fn asymptote(n_qubits: usize) -> Asymptote {
    let k_n = (1.0 + fmath::sqrt(n_qubits as f64)) / fmath::powf(2.0, n_qubits as f64 / 2.0);
    Asymptote {
        k_n,
        n_qubits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gii::verify_gii;

    #[test]
    fn full_matrix_edges() {
        let c = sb_full_matrix(2, 1.0).unwrap();
        assert!(c.matrix().max_abs_diff(&ComplexMatrix::all_ones(4)) < 1e-15);

        let c = sb_full_matrix(2, 0.0).unwrap();
        for a in 0..4usize {
            for b in 0..4usize {
                let expect = if a.count_ones() == b.count_ones() {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(c.get(a, b).re, expect);
            }
        }

        let lam = 0.8;
        let c = sb_full_matrix(2, lam).unwrap();
        let l4 = lam * lam * lam * lam;
        let expect = [
            [1.0, lam, lam, l4],
            [lam, 1.0, 1.0, lam],
            [lam, 1.0, 1.0, lam],
            [l4, lam, lam, 1.0],
        ];
        for a in 0..4 {
            for b in 0..4 {
                assert!((c.get(a, b).re - expect[a][b]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn reduced_matrix_matches_appendix_form() {
        let lam = 0.8;
        let c = sb_reduced_matrix(2, lam);
        let l4 = lam * lam * lam * lam;
        let expect = [[1.0, lam, l4], [lam, 1.0, lam], [l4, lam, 1.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((c.get(a, b).re - expect[a][b]).abs() < 1e-15);
            }
        }
        let id = sb_reduced_matrix(4, 0.0);
        assert!(id.matrix().max_abs_diff(&ComplexMatrix::identity(5)) < 1e-15);
    }

    #[test]
    fn beta_table_limits() {
        let t = beta_table(4, 1.0).unwrap();
        for k in 0..=4 {
            assert!(t.u[k].abs() < 1e-12);
            assert!(t.beta(k, k).abs() < 1e-12);
        }
        let t = beta_table(4, 0.0).unwrap();
        for k in 0..=4 {
            assert!((t.beta(k, k) - 1.0).abs() < 1e-12);
        }
        // beta matches the direct Hellinger affinity on the reduced line
        let n = 2;
        let a = 0.5;
        let t = beta_table(n, a).unwrap();
        let p = reduced_alpha_line(n, a);
        for k in 0..=n {
            for kp in 0..=n {
                if k != kp {
                    assert!(
                        (t.beta(k, kp) - p.affinity(k, kp)).abs() < 1e-12,
                        "k={k} kp={kp}"
                    );
                }
            }
        }
    }

    #[test]
    fn theta3_values() {
        assert!((theta3_half_pi(0.0, 1e-12).unwrap() - 1.0).abs() < 1e-15);
        // frozen from the alternating series (independent oracle)
        assert!((theta3_half_pi(0.5, 1e-12).unwrap() - 0.1211242080025805).abs() < 1e-13);
        assert!(theta3_half_pi(1.0, 1e-9).is_err());
        // monotone decreasing on a grid
        let mut prev = 1.0;
        for i in 1..=9 {
            let v = theta3_half_pi(i as f64 / 10.0, 1e-13).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn bounds_ul_limits_and_order() {
        let (u, l) = bounds_ul(4, 0.0).unwrap();
        assert!((u - 1.0).abs() < 1e-10 && (l - 1.0).abs() < 1e-10);
        for lam in [0.2, 0.5, 0.8] {
            let (u, l) = bounds_ul(10, lam).unwrap();
            let th = theta3_half_pi(lam, 1e-14).unwrap();
            assert!(th <= l + 1e-10 && l <= u + 1e-10, "lam={lam} {th} {l} {u}");
        }
    }

    #[test]
    fn alpha2_closed_values() {
        assert!((alpha2_closed(0.0) - 1.0).abs() < 1e-15);
        assert!((alpha2_closed(0.7) - 0.5814289269244078).abs() < 1e-13);
        assert!(alpha2_closed(1.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_line_is_valid_and_covariant() {
        let p = reduced_alpha_line(3, 0.6);
        assert_eq!(p.dim(), 4);
        for k in 0..4 {
            let s: f64 = (0..4).map(|j| p.prob(k, j)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        for k in 0..4 {
            for j in 0..4 {
                assert!((p.prob(k, j) - p.prob(3 - k, 3 - j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn appendix_h_witness_verifies() {
        for (n, a) in [(5usize, 0.9), (6, 0.5), (7, 0.85), (8, 0.7)] {
            let w = appendix_h_gii(n, a).unwrap();
            let lam = appendix_h_lambda(n, a).unwrap();
            let c = sb_reduced_matrix(n, lam);
            let p = reduced_alpha_line(n, a);
            let rep = verify_gii(&c, &p, &w, 1e-10).unwrap();
            assert!(rep.passed, "N={n} alpha={a}: {rep}");
        }
        assert!(appendix_h_gii(4, 0.5).is_err());
    }

    #[test]
    fn appendix_h_band_ends_carry_lambda() {
        let (n, a) = (7usize, 0.8);
        let w = appendix_h_gii(n, a).unwrap();
        let lam = appendix_h_lambda(n, a).unwrap();
        let mut sum = ComplexMatrix::zeros(n + 1);
        for b in w.blocks() {
            sum = sum.add(b).unwrap();
        }
        assert!((sum.get(0, 1).re - lam).abs() < 1e-12);
        assert!((sum.get(n - 1, n).re - lam).abs() < 1e-12);
    }

    #[test]
    fn asymptote_values() {
        let a = asymptote(10);
        assert!((a.k_n - 0.13007117688026185).abs() < 1e-15);
        assert!(asymptote(2).error_bound(1.0).abs() < 1e-15);
    }
}
