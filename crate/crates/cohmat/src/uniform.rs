//! Uniform-coherence / noisy-MUB model: the threshold function `g_d`, its
//! inverse branches, the full membership interval including negative
//! coherence, and the corner instrument construction where both the
//! tradeoff and the Schur condition are silent.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{CohError, Result};
use crate::fmath;
use crate::gii::{GiiWitness, Provenance};
use crate::matrix::{C64, CoherenceMatrix, ComplexMatrix};

/// `g_d(α) = [(d−2)(1−α) + 2√(1−α)√(1+(d−1)α)] / d`.
///
/// Decreasing on `[0, 1]` where it is its own inverse; increasing on
/// `[−1/(d−1), 0]`.
pub fn g_d(alpha: f64, d: usize) -> Result<f64> {
    check_range(alpha, d, "alpha")?;
    let dd = d as f64;
    let a = alpha.clamp(-1.0 / (dd - 1.0), 1.0);
    Ok(((dd - 2.0) * (1.0 - a) + 2.0 * fmath::sqrt(1.0 - a) * fmath::sqrt(1.0 + (dd - 1.0) * a))
        / dd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdBranch {
    /// `α ∈ [0, 1]`, where `g_d` is self-inverse.
    Positive,
    /// `α ∈ [−1/(d−1), 0]`, where `g_d` increases.
    Negative,
}

/// Inverse of `g_d` on the chosen monotone branch.
pub fn g_d_inverse(u: f64, d: usize, branch: GdBranch) -> Result<f64> {
    let dd = d as f64;
    match branch {
        GdBranch::Positive => {
            if !(0.0..=1.0 + 1e-12).contains(&u) {
                return Err(CohError::OutOfRange { name: "u", value: u });
            }
            g_d(u.clamp(0.0, 1.0), d)
        }
        GdBranch::Negative => {
            // image of the negative branch is [g_d(-1/(d-1)), 1]
            let lo = g_d(-1.0 / (dd - 1.0), d)?;
            if u < lo - 1e-12 || u > 1.0 + 1e-12 {
                return Err(CohError::OutOfRange { name: "u", value: u });
            }
            let v = u.clamp(lo, 1.0);
            Ok(((dd - 2.0) * (1.0 - v)
                - 2.0 * fmath::sqrt(1.0 - v) * fmath::sqrt(1.0 + (dd - 1.0) * v))
                / dd)
        }
    }
}

/// Coherence matrix with unit diagonal and constant off-diagonal `λ`.
pub fn uniform_coherence(d: usize, lambda: f64) -> Result<CoherenceMatrix> {
    check_range(lambda, d, "lambda")?;
    let m = ComplexMatrix::from_real_fn(d, |n, k| if n == k { 1.0 } else { lambda });
    Ok(CoherenceMatrix::new_unchecked(m))
}

/// Incompatibility-robustness threshold for the uniform pattern:
/// `α_C = g_d(λ)` on the whole admissible range of `λ`.
pub fn mub_alpha(lambda: f64, d: usize) -> Result<f64> {
    g_d(lambda, d)
}

/// The interval of `α` for which the white-noise observable stays jointly
/// measurable under the uniform pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsymInterval {
    pub alpha_min: f64,
    pub alpha_max: f64,
}

/// Membership interval of the symmetric-covariant set for the uniform
/// pattern: `{α | g_d(α) ≥ λ}` for `λ ≥ 0`, and
/// `[−1/(d−1), g_d(λ)]` for `λ < 0`.
pub fn csym_uniform(d: usize, lambda: f64) -> Result<CsymInterval> {
    check_range(lambda, d, "lambda")?;
    let corner = -1.0 / (d as f64 - 1.0);
    if lambda >= 0.0 {
        Ok(CsymInterval {
            alpha_min: g_d_inverse(lambda, d, GdBranch::Negative).unwrap_or(corner),
            alpha_max: g_d(lambda, d)?,
        })
    } else {
        Ok(CsymInterval {
            alpha_min: corner,
            alpha_max: g_d(lambda, d)?,
        })
    }
}

/// Explicit instrument for the corner `λ = α = −1/(d−1)`: blocks
/// `C(j) = (d−2)⁻¹ (1 − |φ⟩⟨φ| − |φ^j⟩⟨φ^j|)` with `φ` the uniform
/// superposition and `φ^j ⟂ φ`. Each block is a multiple of a
/// rank-`(d−2)` projection.
pub fn corner_gii(d: usize) -> Result<GiiWitness> {
    if d < 3 {
        return Err(CohError::Unsupported(format!(
            "corner construction needs d >= 3, got {d}"
        )));
    }
    let dd = d as f64;
    let inv_sqrt_d = 1.0 / fmath::sqrt(dd);
    let phi: Vec<C64> = (0..d).map(|_| C64::new(inv_sqrt_d, 0.0)).collect();
    let phi_proj = ComplexMatrix::outer(&phi);
    let scale = 1.0 / (dd - 2.0);
    let mut blocks = Vec::with_capacity(d);
    for j in 0..d {
        let factor = fmath::sqrt(dd / (dd - 1.0));
        let phi_j: Vec<C64> = (0..d)
            .map(|n| {
                let base = if n == j { 1.0 } else { 0.0 };
                C64::new(factor * (base - 1.0 / dd), 0.0)
            })
            .collect();
        let m = ComplexMatrix::identity(d)
            .sub(&phi_proj)?
            .sub(&ComplexMatrix::outer(&phi_j))?
            .scale(scale);
        blocks.push(m);
    }
    Ok(GiiWitness::new(d, blocks, Provenance::Corner))
}

fn check_range(x: f64, d: usize, name: &'static str) -> Result<()> {
    if d < 2 {
        return Err(CohError::OutOfRange {
            name: "d",
            value: d as f64,
        });
    }
    let lo = -1.0 / (d as f64 - 1.0);
    if !(lo - 1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(CohError::OutOfRange { name, value: x });
    }
    Ok(())
}
