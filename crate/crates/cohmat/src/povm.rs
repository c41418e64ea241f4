//! POVM data model and the entry-wise coherence / Hellinger functionals.
//!
//! Everything is expressed relative to a fixed incoherent (computational)
//! basis; inputs are assumed pre-rotated into it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::eigen;
use crate::error::{CohError, Result};
use crate::fmath;
use crate::matrix::{hadamard, C64, CoherenceMatrix, ComplexMatrix};

/// A POVM: ordered effects, PSD, summing to the identity.
///
/// Zero effects are stripped on construction (minimal outcome set); the
/// indices of stripped outcomes are kept for reporting.
#[derive(Debug, Clone)]
pub struct Observable {
    dim: usize,
    effects: Vec<ComplexMatrix>,
    stripped: Vec<usize>,
}

impl Observable {
    pub fn new(dim: usize, effects: Vec<ComplexMatrix>) -> Result<Self> {
        let mut kept = Vec::with_capacity(effects.len());
        let mut stripped = Vec::new();
        for (i, e) in effects.into_iter().enumerate() {
            if e.dim() != dim {
                return Err(CohError::DimensionMismatch {
                    expected: dim,
                    got: e.dim(),
                });
            }
            if e.max_abs() <= crate::TOL_POVM {
                stripped.push(i);
            } else {
                kept.push(e);
            }
        }
        let obs = Self {
            dim,
            effects: kept,
            stripped,
        };
        let report = validate_povm(&obs);
        if !report.is_valid() {
            return Err(CohError::InvalidPovm(report.to_string()));
        }
        Ok(obs)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effect(&self, i: usize) -> &ComplexMatrix {
        &self.effects[i]
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// Outcomes removed at construction because their effect was zero.
    pub fn stripped_outcomes(&self) -> &[usize] {
        &self.stripped
    }

    /// Outcome distribution `p_n(i) = ⟨n|M(i)|n⟩` for basis state `n`.
    pub fn basis_distribution(&self, n: usize) -> Vec<f64> {
        self.effects.iter().map(|e| e.get(n, n).re).collect()
    }
}

/// One violated POVM invariant with its magnitude.
#[derive(Debug, Clone, PartialEq)]
pub enum PovmViolation {
    NotHermitian { outcome: usize, deviation: f64 },
    NotPsd { outcome: usize, min_eigenvalue: f64 },
    Normalization { deviation: f64 },
}

/// Validation report for [`Observable`]; empty iff the POVM is valid.
#[derive(Debug, Clone, Default)]
pub struct PovmReport {
    pub violations: Vec<PovmViolation>,
}

impl PovmReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl core::fmt::Display for PovmReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            match v {
                PovmViolation::NotHermitian { outcome, deviation } => {
                    write!(f, "[effect {outcome} not Hermitian, dev {deviation:.2e}]")?
                }
                PovmViolation::NotPsd {
                    outcome,
                    min_eigenvalue,
                } => write!(f, "[effect {outcome} not PSD, min eig {min_eigenvalue:.2e}]")?,
                PovmViolation::Normalization { deviation } => {
                    write!(f, "[effects sum deviates from identity by {deviation:.2e}]")?
                }
            }
        }
        Ok(())
    }
}

/// Lists every violated POVM invariant with its magnitude.
pub fn validate_povm(m: &Observable) -> PovmReport {
    let mut report = PovmReport::default();
    let mut sum = ComplexMatrix::zeros(m.dim);
    for (i, e) in m.effects.iter().enumerate() {
        let dev = e.hermitian_deviation();
        if dev > crate::TOL_HERM * e.frobenius_norm().max(1.0) {
            report
                .violations
                .push(PovmViolation::NotHermitian { outcome: i, deviation: dev });
            continue;
        }
        let mut h = e.clone();
        h.hermitize();
        if let Ok(eig) = eigen::eig_hermitian(&h) {
            let min = eig.min_eigenvalue();
            if min < -crate::PSD_SLACK * h.frobenius_norm().max(1.0) {
                report.violations.push(PovmViolation::NotPsd {
                    outcome: i,
                    min_eigenvalue: min,
                });
            }
        }
        sum = sum.add(e).expect("dims checked at construction");
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(m.dim));
    if dev > crate::TOL_POVM * (m.dim as f64) {
        report
            .violations
            .push(PovmViolation::Normalization { deviation: dev });
    }
    report
}

/// Incoherent observable: row-stochastic table `p_n(j)` of outcome
/// probabilities per basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentObservable {
    dim: usize,
    n_outcomes: usize,
    /// Row-major `dim × n_outcomes`.
    table: Vec<f64>,
}

impl IncoherentObservable {
    pub fn new(dim: usize, n_outcomes: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != dim * n_outcomes {
            return Err(CohError::DimensionMismatch {
                expected: dim * n_outcomes,
                got: table.len(),
            });
        }
        for (k, &p) in table.iter().enumerate() {
            if !(p >= -crate::TOL_POVM && p <= 1.0 + crate::TOL_POVM) || !p.is_finite() {
                return Err(CohError::InvalidTable(format!(
                    "entry {k} = {p} outside [0, 1]"
                )));
            }
        }
        for n in 0..dim {
            let s: f64 = table[n * n_outcomes..(n + 1) * n_outcomes].iter().sum();
            if fmath::abs(s - 1.0) > crate::TOL_POVM * (n_outcomes as f64) {
                return Err(CohError::InvalidTable(format!(
                    "row {n} sums to {s}, expected 1"
                )));
            }
        }
        Ok(Self {
            dim,
            n_outcomes,
            table,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    /// `p_n(j)`.
    #[inline]
    pub fn prob(&self, n: usize, j: usize) -> f64 {
        self.table[n * self.n_outcomes + j]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.table[n * self.n_outcomes..(n + 1) * self.n_outcomes]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Bhattacharyya affinity `Σ_j √(p_n(j) p_m(j))` of two basis rows.
    pub fn affinity(&self, n: usize, m: usize) -> f64 {
        (0..self.n_outcomes)
            .map(|j| fmath::sqrt(self.prob(n, j).max(0.0) * self.prob(m, j).max(0.0)))
            .sum()
    }

    /// Squared Hellinger distance `d²_nm = 1 − affinity`.
    pub fn hellinger_sq(&self, n: usize, m: usize) -> f64 {
        1.0 - self.affinity(n, m)
    }

    /// Embeds as a POVM with diagonal effects.
    pub fn to_observable(&self) -> Observable {
        let effects = (0..self.n_outcomes)
            .map(|j| {
                ComplexMatrix::from_real_fn(self.dim, |n, m| {
                    if n == m {
                        self.prob(n, j)
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        Observable {
            dim: self.dim,
            effects,
            stripped: Vec::new(),
        }
    }

    /// Trivial observable `P(j) = μ(j)·1`.
    pub fn trivial(dim: usize, weights: &[f64]) -> Result<Self> {
        let mut table = Vec::with_capacity(dim * weights.len());
        for _ in 0..dim {
            table.extend_from_slice(weights);
        }
        Self::new(dim, weights.len(), table)
    }
}

/// Entry-wise coherence and squared Hellinger distances of a POVM.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    dim: usize,
    /// `coh_nm = Σ_i |⟨n|M(i)|m⟩|`, row-major `dim × dim`.
    pub coh: Vec<f64>,
    /// `d²_nm = 1 − Σ_i √(p_n(i) p_m(i))`, row-major `dim × dim`.
    pub hellinger_sq: Vec<f64>,
}

impl CoherenceReport {
    #[inline]
    pub fn coh_at(&self, n: usize, m: usize) -> f64 {
        self.coh[n * self.dim + m]
    }

    #[inline]
    pub fn hellinger_sq_at(&self, n: usize, m: usize) -> f64 {
        self.hellinger_sq[n * self.dim + m]
    }

    pub fn max_offdiag_coh(&self) -> f64 {
        let mut best: f64 = 0.0;
        for n in 0..self.dim {
            for m in 0..self.dim {
                if n != m {
                    best = best.max(self.coh_at(n, m));
                }
            }
        }
        best
    }
}

/// Computes both functionals against the incoherent basis.
pub fn coherence_report(m: &Observable) -> Result<CoherenceReport> {
    let report = validate_povm(m);
    if !report.is_valid() {
        return Err(CohError::InvalidPovm(report.to_string()));
    }
    let d = m.dim();
    let mut coh = vec![0.0; d * d];
    let mut hell = vec![0.0; d * d];
    for n in 0..d {
        for mm in 0..d {
            let mut c = 0.0;
            let mut aff = 0.0;
            for e in m.effects() {
                let z = e.get(n, mm);
                c += fmath::hypot(z.re, z.im);
                aff += fmath::sqrt(e.get(n, n).re.max(0.0) * e.get(mm, mm).re.max(0.0));
            }
            coh[n * d + mm] = c;
            hell[n * d + mm] = if n == mm { 0.0 } else { 1.0 - aff };
        }
    }
    Ok(CoherenceReport {
        dim: d,
        coh,
        hellinger_sq: hell,
    })
}

/// The matrix `𝔖_nm(P) = (1 − d²_nm(P))⁻¹`, defined only while every
/// off-diagonal squared Hellinger distance stays below one.
#[derive(Debug, Clone)]
pub struct StructureMatrix {
    matrix: ComplexMatrix,
}

impl StructureMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.matrix.get(n, m).re
    }
}

/// Returns `None` when some off-diagonal `d²_nm(P)` equals one within
/// [`crate::D2_ONE_THRESHOLD`] (the reciprocal would blow up).
pub fn structure_matrix(p: &IncoherentObservable) -> Option<StructureMatrix> {
    let d = p.dim();
    let mut m = ComplexMatrix::zeros(d);
    for n in 0..d {
        for k in 0..d {
            if n == k {
                m.set(n, k, C64::new(1.0, 0.0));
            } else {
                let aff = p.affinity(n, k);
                if aff < crate::D2_ONE_THRESHOLD {
                    return None;
                }
                m.set(n, k, C64::new(1.0 / aff, 0.0));
            }
        }
    }
    Some(StructureMatrix { matrix: m })
}

/// The rank-one PSD family `C^P(j)` with entries `√(p_n(j) p_m(j))`;
/// summing over `j` gives the Hellinger-affinity matrix of `P`.
pub fn hellinger_gii(p: &IncoherentObservable) -> Vec<ComplexMatrix> {
    (0..p.n_outcomes())
        .map(|j| {
            let root: Vec<C64> = (0..p.dim())
                .map(|n| C64::new(fmath::sqrt(p.prob(n, j).max(0.0)), 0.0))
                .collect();
            ComplexMatrix::outer(&root)
        })
        .collect()
}

/// Coherence classification of a POVM.
#[derive(Debug, Clone)]
pub enum CoherenceClass {
    /// All off-diagonal coherences vanish: the POVM is diagonal.
    Incoherent,
    /// All off-diagonal coherences are one; the effects decompose as
    /// `M(i) = p(i)·d·|ψ_i⟩⟨ψ_i|` with `|⟨n|ψ_i⟩|² = 1/d`.
    MaximallyCoherent {
        weights: Vec<f64>,
        states: Vec<Vec<C64>>,
    },
    Generic,
}

/// Classifies a POVM by its entry-wise coherence pattern.
pub fn classify_coherence(m: &Observable) -> Result<CoherenceClass> {
    let rep = coherence_report(m)?;
    let d = m.dim();
    let mut all_zero = true;
    let mut all_one = true;
    for n in 0..d {
        for k in 0..d {
            if n != k {
                let c = rep.coh_at(n, k);
                if c > crate::PSD_SLACK {
                    all_zero = false;
                }
                if c < 1.0 - 1e-8 {
                    all_one = false;
                }
            }
        }
    }
    if all_zero {
        return Ok(CoherenceClass::Incoherent);
    }
    if all_one {
        let mut weights = Vec::with_capacity(m.n_outcomes());
        let mut states = Vec::with_capacity(m.n_outcomes());
        for e in m.effects() {
            let p = e.trace().re / d as f64;
            let mut h = e.clone();
            h.hermitize();
            let eig = eigen::eig_hermitian(&h)?;
            let top = eig.values.len() - 1;
            let mut psi: Vec<C64> = (0..d).map(|n| eig.vectors.get(n, top)).collect();
            // fix the global phase: first non-negligible component real positive
            if let Some(z) = psi.iter().find(|z| z.norm_sqr() > 1e-20) {
                let r = fmath::hypot(z.re, z.im);
                let ph = C64::new(z.re / r, -z.im / r);
                for v in psi.iter_mut() {
                    *v *= ph;
                }
            }
            weights.push(p);
            states.push(psi);
        }
        return Ok(CoherenceClass::MaximallyCoherent { weights, states });
    }
    Ok(CoherenceClass::Generic)
}

/// Fourier basis observable: `ψ_i = d^{-1/2} Σ_j ω^{ji} |j⟩`, mutually
/// unbiased to the incoherent basis, hence maximally coherent.
pub fn fourier_mub(d: usize) -> Result<Observable> {
    if d < 2 {
        return Err(CohError::OutOfRange {
            name: "d",
            value: d as f64,
        });
    }
    let norm = 1.0 / fmath::sqrt(d as f64);
    let tau = core::f64::consts::TAU;
    let effects = (0..d)
        .map(|i| {
            let psi: Vec<C64> = (0..d)
                .map(|j| {
                    let ang = tau * ((i * j) % d) as f64 / d as f64;
                    C64::new(fmath::cos(ang) * norm, fmath::sin(ang) * norm)
                })
                .collect();
            ComplexMatrix::outer(&psi)
        })
        .collect();
    Observable::new(d, effects)
}

/// White-noise family `p_n(j) = α·δ_nj + (1−α)/d`, valid on the extended
/// range `−1/(d−1) ≤ α ≤ 1`.
pub fn white_noise_family(d: usize, alpha: f64) -> Result<IncoherentObservable> {
    if d < 2 {
        return Err(CohError::OutOfRange {
            name: "d",
            value: d as f64,
        });
    }
    let lo = -1.0 / (d as f64 - 1.0);
    if !(lo - 1e-12..=1.0 + 1e-12).contains(&alpha) {
        return Err(CohError::OutOfRange {
            name: "alpha",
            value: alpha,
        });
    }
    let base = (1.0 - alpha) / d as f64;
    let mut table = vec![0.0; d * d];
    for n in 0..d {
        for j in 0..d {
            table[n * d + j] = (base + if n == j { alpha } else { 0.0 }).clamp(0.0, 1.0);
        }
    }
    IncoherentObservable::new(d, d, table)
}

/// Applies the genuinely incoherent operation with pattern `C` to a POVM:
/// every effect is Hadamard-multiplied by `C`.
pub fn apply_gio(c: &CoherenceMatrix, m: &Observable) -> Result<Observable> {
    if c.dim() != m.dim() {
        return Err(CohError::DimensionMismatch {
            expected: m.dim(),
            got: c.dim(),
        });
    }
    let effects = m
        .effects()
        .iter()
        .map(|e| hadamard(c.matrix(), e))
        .collect::<Result<Vec<_>>>()?;
    Observable::new(m.dim(), effects)
}

/// Joint observable over a product outcome set, stored row-major in the
/// first index.
#[derive(Debug, Clone)]
pub struct JointObservable {
    dim: usize,
    n_first: usize,
    n_second: usize,
    effects: Vec<ComplexMatrix>,
}

impl JointObservable {
    pub(crate) fn new(
        dim: usize,
        n_first: usize,
        n_second: usize,
        effects: Vec<ComplexMatrix>,
    ) -> Self {
        debug_assert_eq!(effects.len(), n_first * n_second);
        Self {
            dim,
            n_first,
            n_second,
            effects,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n_first(&self) -> usize {
        self.n_first
    }

    #[inline]
    pub fn n_second(&self) -> usize {
        self.n_second
    }

    pub fn effect(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.effects[i * self.n_second + j]
    }

    /// Marginal over the second outcome.
    pub fn first_marginal(&self, i: usize) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for j in 0..self.n_second {
            acc = acc.add(self.effect(i, j)).expect("same dim");
        }
        acc
    }

    /// Marginal over the first outcome.
    pub fn second_marginal(&self, j: usize) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for i in 0..self.n_first {
            acc = acc.add(self.effect(i, j)).expect("same dim");
        }
        acc
    }

    /// Largest PSD violation over all effects.
    pub fn min_effect_eigenvalue(&self) -> Result<f64> {
        let mut min = f64::INFINITY;
        for e in &self.effects {
            let mut h = e.clone();
            h.hermitize();
            min = min.min(eigen::eig_hermitian(&h)?.min_eigenvalue());
        }
        Ok(min)
    }
}
