//! Closed-form incompatibility witnesses and joint-measurability
//! certificates.
//!
//! The tradeoff bound (coherence of one observable against the Hellinger
//! distance of another) is necessary for joint measurability; the Schur
//! condition `𝔖(P) * M(i) ⪰ 0` is sufficient and comes with an explicit
//! joint observable. Their pattern-matrix corollaries bound membership in
//! the set of observables compatible with every `C*Q`.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::eigen;
use crate::error::{CohError, Result};
use crate::fmath;
use crate::gii::{GiiWitness, Provenance};
use crate::matrix::{hadamard, CoherenceMatrix, ComplexMatrix};
use crate::povm::{
    coherence_report, hellinger_gii, structure_matrix, IncoherentObservable, JointObservable,
    Observable,
};

/// A basis pair violating the coherence/distinguishability tradeoff.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffViolation {
    pub n: usize,
    pub m: usize,
    /// `coh_nm(M) + d²_nm(F)`.
    pub lhs: f64,
    /// Amount above 1.
    pub excess: f64,
}

/// All pairs with `coh_nm(M) + d²_nm(F) > 1`; a nonempty list certifies
/// incompatibility of `M` and `F`.
pub fn tradeoff_witness(m: &Observable, f: &Observable) -> Result<Vec<TradeoffViolation>> {
    if m.dim() != f.dim() {
        return Err(CohError::DimensionMismatch {
            expected: m.dim(),
            got: f.dim(),
        });
    }
    let rep_m = coherence_report(m)?;
    let rep_f = coherence_report(f)?;
    let d = m.dim();
    let mut out = Vec::new();
    for n in 0..d {
        for k in (n + 1)..d {
            let lhs = rep_m.coh_at(n, k) + rep_f.hellinger_sq_at(n, k);
            if lhs > 1.0 + crate::WITNESS_TOL {
                out.push(TradeoffViolation {
                    n,
                    m: k,
                    lhs,
                    excess: lhs - 1.0,
                });
            }
        }
    }
    Ok(out)
}

/// Outcome of the Schur sufficient condition.
#[derive(Debug, Clone)]
pub enum SchurOutcome {
    /// All `𝔖(P)*M(i)` are PSD; the explicit joint observable
    /// `G(i,j) = 𝔖(P)*M(i)*C^P(j)` is returned with verified marginals.
    CertifiedJm(JointObservable),
    /// Some product failed the PSD test; nothing can be concluded.
    Inconclusive { failing_outcome: usize },
    /// The structure matrix does not exist (some `d²_nm(P) = 1`).
    Inapplicable,
}

pub fn schur_sufficient(m: &Observable, p: &IncoherentObservable) -> Result<SchurOutcome> {
    if m.dim() != p.dim() {
        return Err(CohError::DimensionMismatch {
            expected: m.dim(),
            got: p.dim(),
        });
    }
    let s = match structure_matrix(p) {
        Some(s) => s,
        None => return Ok(SchurOutcome::Inapplicable),
    };
    let d = m.dim();
    let mut masked = Vec::with_capacity(m.n_outcomes());
    for (i, e) in m.effects().iter().enumerate() {
        let se = hadamard(s.matrix(), e)?;
        if !eigen::is_psd(&se, crate::PSD_SLACK)? {
            return Ok(SchurOutcome::Inconclusive { failing_outcome: i });
        }
        masked.push(se);
    }
    let hell = hellinger_gii(p);
    let mut effects = Vec::with_capacity(m.n_outcomes() * p.n_outcomes());
    for se in &masked {
        for cj in &hell {
            effects.push(hadamard(se, cj)?);
        }
    }
    let joint = JointObservable::new(d, m.n_outcomes(), p.n_outcomes(), effects);
    // marginal verification
    for (i, e) in m.effects().iter().enumerate() {
        if joint.first_marginal(i).max_abs_diff(e) > 1e-9 * d as f64 {
            return Err(CohError::Structure(
                "joint observable fails the first marginal".to_string(),
            ));
        }
    }
    for j in 0..p.n_outcomes() {
        let expect = ComplexMatrix::from_real_fn(d, |n, mm| {
            if n == mm {
                p.prob(n, j)
            } else {
                0.0
            }
        });
        if joint.second_marginal(j).max_abs_diff(&expect) > 1e-9 * d as f64 {
            return Err(CohError::Structure(
                "joint observable fails the second marginal".to_string(),
            ));
        }
    }
    Ok(SchurOutcome::CertifiedJm(joint))
}

/// A pair violating the pattern-matrix tradeoff `d²_nm(P) ≤ 1 − |c_nm|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cor1Violation {
    pub n: usize,
    pub m: usize,
    pub excess: f64,
}

/// Necessary condition for `P` to be compatible with the pattern `C`:
/// nonempty output certifies incompatibility.
pub fn cor1_check(c: &CoherenceMatrix, p: &IncoherentObservable) -> Result<Vec<Cor1Violation>> {
    if c.dim() != p.dim() {
        return Err(CohError::DimensionMismatch {
            expected: c.dim(),
            got: p.dim(),
        });
    }
    let d = c.dim();
    let mut out = Vec::new();
    for n in 0..d {
        for m in (n + 1)..d {
            let z = c.get(n, m);
            let bound = 1.0 - fmath::hypot(z.re, z.im);
            let d2 = p.hellinger_sq(n, m);
            if d2 > bound + crate::WITNESS_TOL {
                out.push(Cor1Violation {
                    n,
                    m,
                    excess: d2 - bound,
                });
            }
        }
    }
    Ok(out)
}

/// Outcome of the pattern-level Schur condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cor2Outcome {
    /// `C * 𝔖(P)` is PSD: membership certified.
    Member,
    /// Not PSD; the condition is only sufficient, so no conclusion.
    Inconclusive,
    /// Structure matrix undefined.
    Inapplicable,
}

/// Sufficient condition for `P ∈ 𝒞_C`: `C * 𝔖(P) ⪰ 0`.
pub fn cor2_check(c: &CoherenceMatrix, p: &IncoherentObservable) -> Result<Cor2Outcome> {
    if c.dim() != p.dim() {
        return Err(CohError::DimensionMismatch {
            expected: c.dim(),
            got: p.dim(),
        });
    }
    let s = match structure_matrix(p) {
        Some(s) => s,
        None => return Ok(Cor2Outcome::Inapplicable),
    };
    let cs = hadamard(c.matrix(), s.matrix())?;
    if eigen::is_psd(&cs, crate::PSD_SLACK)? {
        Ok(Cor2Outcome::Member)
    } else {
        Ok(Cor2Outcome::Inconclusive)
    }
}

/// Builds the instrument `C(j) = C*𝔖(P)*C^P(j)` for a certified member;
/// errors when the Schur condition does not hold.
pub fn build_gii_schur(c: &CoherenceMatrix, p: &IncoherentObservable) -> Result<GiiWitness> {
    match cor2_check(c, p)? {
        Cor2Outcome::Member => {}
        Cor2Outcome::Inconclusive => {
            return Err(CohError::Structure(
                "Schur condition failed: C*S(P) is not PSD".to_string(),
            ))
        }
        Cor2Outcome::Inapplicable => {
            return Err(CohError::Undefined(
                "structure matrix undefined for this observable".to_string(),
            ))
        }
    }
    let s = structure_matrix(p).expect("checked above");
    let mask = hadamard(c.matrix(), s.matrix())?;
    let blocks = hellinger_gii(p)
        .iter()
        .map(|cj| hadamard(&mask, cj))
        .collect::<Result<Vec<_>>>()?;
    Ok(GiiWitness::new(c.dim(), blocks, Provenance::Schur))
}

/// The two displayed bounds around the incompatibility-robustness
/// threshold function: `max coh ≤ g_d(α_M) ≤ max Σ|off-diag|/diag`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBounds {
    /// Largest off-diagonal entry-wise coherence (lower bound).
    pub g_lower: f64,
    /// Diagonal-dominance ratio (upper bound); `+∞` when some diagonal
    /// probability vanishes.
    pub g_upper: f64,
}

pub fn alpha_bounds_dd(m: &Observable) -> Result<AlphaBounds> {
    let rep = coherence_report(m)?;
    let d = m.dim();
    let g_lower = rep.max_offdiag_coh();
    let mut g_upper: f64 = 0.0;
    for e in m.effects() {
        for n in 0..d {
            let p_n = e.get(n, n).re;
            let mut off = 0.0;
            for k in 0..d {
                if k != n {
                    let z = e.get(n, k);
                    off += fmath::hypot(z.re, z.im);
                }
            }
            if off <= 0.0 {
                continue;
            }
            if p_n <= 0.0 {
                return Ok(AlphaBounds {
                    g_lower,
                    g_upper: f64::INFINITY,
                });
            }
            g_upper = g_upper.max(off / p_n);
        }
    }
    Ok(AlphaBounds { g_lower, g_upper })
}

/// Exact qubit robustness from the Bloch vector of a binary observable
/// `M(0) = (1 + m·σ)/2`: `α_M = √(1 − (m₁²+m₂²)/(1−m₃²))`.
///
/// Undefined at `|m₃| = 1` (the criterion's denominator vanishes).
pub fn qubit_alpha_exact(m: [f64; 3]) -> Result<f64> {
    let norm2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
    if norm2 > 1.0 + 1e-12 {
        return Err(CohError::OutOfRange {
            name: "|m|",
            value: fmath::sqrt(norm2),
        });
    }
    let denom = 1.0 - m[2] * m[2];
    if denom <= 1e-15 {
        return Err(CohError::Undefined(
            "qubit criterion is undefined at |m3| = 1".to_string(),
        ));
    }
    let g2 = ((m[0] * m[0] + m[1] * m[1]) / denom).min(1.0);
    Ok(fmath::sqrt(1.0 - g2))
}

/// The binary qubit observable `M(0) = (1 + m·σ)/2` in the incoherent
/// (σ_z) basis.
pub fn bloch_observable(m: [f64; 3]) -> Result<Observable> {
    use crate::matrix::C64;
    let e0 = ComplexMatrix::from_fn(2, |n, k| match (n, k) {
        (0, 0) => C64::new(0.5 * (1.0 + m[2]), 0.0),
        (1, 1) => C64::new(0.5 * (1.0 - m[2]), 0.0),
        (0, 1) => C64::new(0.5 * m[0], -0.5 * m[1]),
        _ => C64::new(0.5 * m[0], 0.5 * m[1]),
    });
    let e1 = ComplexMatrix::identity(2).sub(&e0)?;
    Observable::new(2, alloc::vec![e0, e1])
}
