//! Feasibility of the genuinely-incoherent-instrument constraint system
//!
//! ```text
//!   C(j) ⪰ 0,   Σ_j C(j) = C,   diag C(j) = p(·, j)
//! ```
//!
//! decided by Dykstra-corrected alternating projections between the product
//! PSD cone and the affine set. Plain alternating projections have a slow
//! tail near the feasibility boundary, so the loop periodically attempts two
//! kinds of *rigorous* early verdicts:
//!
//! - a primal certificate: extrapolations of the affine-feasible iterate are
//!   re-projected onto the affine set and accepted as a witness when they
//!   satisfy the cone constraint outright;
//! - a dual (Farkas-type) certificate assembled from the displacement vector
//!   between the two sets, with an exact correction term that keeps the
//!   verdict sound under eigenvalue clipping error.
//!
//! Failing both, the spec'd statuses apply: a residual stalling above
//! `infeas_threshold` means `Infeasible`, the gray zone stays `Unknown`.
//!
//! Real-valued problems run on a flat real-symmetric fast path; complex
//! patterns are embedded as `[[Re, −Im], [Im, Re]]` blocks of doubled size,
//! which preserves spectra and all three constraint families.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::RealPsdProjector;
use crate::error::{CohError, Result};
use crate::fmath;
use crate::matrix::{hadamard, C64, CoherenceMatrix, ComplexMatrix};
use crate::povm::{IncoherentObservable, JointObservable, Observable};
use crate::symmetry::CovariantAction;
use crate::witness::{cor1_check, cor2_check, Cor2Outcome};

/// Where a witness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Solver,
    Schur,
    Corner,
    AppendixH,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Solver => "solver",
            Provenance::Schur => "schur",
            Provenance::Corner => "corner",
            Provenance::AppendixH => "appendixH",
        }
    }
}

/// A constructive joint-measurability certificate: PSD blocks summing to the
/// coherence matrix with prescribed diagonals.
#[derive(Debug, Clone)]
pub struct GiiWitness {
    dim: usize,
    blocks: Vec<ComplexMatrix>,
    provenance: Provenance,
}

impl GiiWitness {
    pub fn new(dim: usize, blocks: Vec<ComplexMatrix>, provenance: Provenance) -> Self {
        Self {
            dim,
            blocks,
            provenance,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n_outcomes(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, j: usize) -> &ComplexMatrix {
        &self.blocks[j]
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The incoherent observable measured by this instrument (the block
    /// diagonals).
    pub fn observable(&self) -> Result<IncoherentObservable> {
        let nout = self.blocks.len();
        let mut table = vec![0.0; self.dim * nout];
        for (j, b) in self.blocks.iter().enumerate() {
            for n in 0..self.dim {
                table[n * nout + j] = b.get(n, n).re.clamp(0.0, 1.0);
            }
        }
        IncoherentObservable::new(self.dim, nout, table)
    }
}

/// Verdict of the feasibility solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasStatus {
    Feasible,
    Infeasible,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct FeasibilityVerdict {
    pub status: FeasStatus,
    /// Final estimate of the distance between the constraint sets
    /// (for `Feasible`, the witness's residual constraint violation).
    pub residual: f64,
    pub iterations: usize,
    pub witness: Option<GiiWitness>,
}

/// Solver configuration. `feas_tol` must stay below `infeas_threshold`.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub max_iters: usize,
    pub feas_tol: f64,
    pub infeas_threshold: f64,
    pub stall_window: usize,
    pub bisect_tol: f64,
    /// Optional covariance group: iterates are group-averaged after every
    /// affine projection, which is lossless for covariant instances.
    pub covariance: Option<CovariantAction>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 200_000,
            feas_tol: 1e-8,
            infeas_threshold: 1e-6,
            stall_window: 500,
            bisect_tol: 1e-4,
            covariance: None,
        }
    }
}

const CERT_INTERVAL: usize = 250;
const PRIMAL_EXTRAPOLATIONS: [f64; 6] = [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0];
const DUAL_EXTRAPOLATIONS: [f64; 4] = [0.0, 1.0, 4.0, 16.0];
const STALL_REL: f64 = 1e-12;

/// Decides existence of a GII with pattern `C` and observable `P`.
pub fn solve_gii(
    c: &CoherenceMatrix,
    p: &IncoherentObservable,
    opts: &SolverOptions,
) -> Result<FeasibilityVerdict> {
    solve_gii_warm(c, p, opts, None)
}

/// [`solve_gii`] with an optional warm start: threshold searches pass the
/// previous probe's witness, which shortcuts the initial transient.
pub fn solve_gii_warm(
    c: &CoherenceMatrix,
    p: &IncoherentObservable,
    opts: &SolverOptions,
    warm: Option<&GiiWitness>,
) -> Result<FeasibilityVerdict> {
    if c.dim() != p.dim() {
        return Err(CohError::DimensionMismatch {
            expected: c.dim(),
            got: p.dim(),
        });
    }
    if opts.feas_tol >= opts.infeas_threshold {
        return Err(CohError::OutOfRange {
            name: "feas_tol (must be < infeas_threshold)",
            value: opts.feas_tol,
        });
    }
    let complex = c.matrix().max_imag() > 1e-14;
    if let Some(action) = &opts.covariance {
        action.check_compatible(c.dim(), p.n_outcomes())?;
        if action.has_complex_phases() {
            return Err(CohError::Unsupported(
                "covariant averaging with complex phase factors is not supported \
                 by the solver; reduce the pattern first"
                    .into(),
            ));
        }
    }
    let mut problem = RealProblem::build(c, p, complex)?;
    let verdict = problem.run(opts, warm);
    Ok(verdict)
}

/// Checks the three constraint families of a witness against `(C, P)`.
#[derive(Debug, Clone)]
pub struct GiiReport {
    pub passed: bool,
    /// Most negative block eigenvalue, as a violation (≥ 0).
    pub psd_violation: f64,
    /// Max entry deviation of `Σ_j C(j)` from `C`.
    pub sum_violation: f64,
    /// Max deviation of block diagonals from the table of `P`.
    pub diag_violation: f64,
    pub details: Vec<String>,
}

impl core::fmt::Display for GiiReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{} (psd {:.2e}, sum {:.2e}, diag {:.2e})",
            if self.passed { "pass" } else { "FAIL" },
            self.psd_violation,
            self.sum_violation,
            self.diag_violation
        )
    }
}

pub fn verify_gii(
    c: &CoherenceMatrix,
    p: &IncoherentObservable,
    w: &GiiWitness,
    tol: f64,
) -> Result<GiiReport> {
    if w.dim() != c.dim() || w.dim() != p.dim() {
        return Err(CohError::DimensionMismatch {
            expected: c.dim(),
            got: w.dim(),
        });
    }
    if w.n_outcomes() != p.n_outcomes() {
        return Err(CohError::DimensionMismatch {
            expected: p.n_outcomes(),
            got: w.n_outcomes(),
        });
    }
    let d = w.dim();
    let mut details = Vec::new();
    let mut psd_violation: f64 = 0.0;
    let mut diag_violation: f64 = 0.0;
    let mut sum = ComplexMatrix::zeros(d);
    for (j, b) in w.blocks().iter().enumerate() {
        let mut h = b.clone();
        h.hermitize();
        let min = crate::eigen::eig_hermitian(&h)?.min_eigenvalue();
        if min < 0.0 {
            psd_violation = psd_violation.max(-min);
            if -min > tol * h.frobenius_norm().max(1.0) {
                details.push(format!("block {j} not PSD: min eig {min:.3e}"));
            }
        }
        for n in 0..d {
            let dev = fmath::abs(b.get(n, n).re - p.prob(n, j))
                .max(fmath::abs(b.get(n, n).im));
            if dev > diag_violation {
                diag_violation = dev;
            }
            if dev > tol {
                details.push(format!(
                    "diag ({n},{n}) of block {j} deviates from p by {dev:.3e}"
                ));
            }
        }
        sum = sum.add(b)?;
    }
    let mut sum_violation: f64 = 0.0;
    for n in 0..d {
        for m in 0..d {
            let diff = sum.get(n, m) - c.get(n, m);
            let dev = fmath::hypot(diff.re, diff.im);
            if dev > sum_violation {
                sum_violation = dev;
            }
            if dev > tol {
                details.push(format!("sum entry ({n},{m}) deviates by {dev:.3e}"));
            }
        }
    }
    let scale_tol = tol;
    let passed =
        psd_violation <= scale_tol.max(tol) && sum_violation <= tol && diag_violation <= tol;
    Ok(GiiReport {
        passed,
        psd_violation,
        sum_violation,
        diag_violation,
        details,
    })
}

/// Sequential joint observable `G(i, j) = C(j) * Q(i)` for `(C*Q, P)`;
/// marginals are verified before returning.
pub fn joint_observable(w: &GiiWitness, q: &Observable) -> Result<JointObservable> {
    if w.dim() != q.dim() {
        return Err(CohError::DimensionMismatch {
            expected: q.dim(),
            got: w.dim(),
        });
    }
    let d = w.dim();
    let p = w.observable()?;
    let mut effects = Vec::with_capacity(q.n_outcomes() * w.n_outcomes());
    for i in 0..q.n_outcomes() {
        for j in 0..w.n_outcomes() {
            effects.push(hadamard(w.block(j), q.effect(i))?);
        }
    }
    let joint = JointObservable::new(d, q.n_outcomes(), w.n_outcomes(), effects);
    // marginal checks: Σ_j G(i,j) = C*Q(i) and Σ_i G(i,j) = P(j)
    let c_sum = {
        let mut acc = ComplexMatrix::zeros(d);
        for b in w.blocks() {
            acc = acc.add(b)?;
        }
        acc
    };
    for i in 0..q.n_outcomes() {
        let marg = joint.first_marginal(i);
        let expect = hadamard(&c_sum, q.effect(i))?;
        if marg.max_abs_diff(&expect) > 1e-9 * (d as f64) {
            return Err(CohError::Structure(format!(
                "first marginal {i} deviates from C*Q(i)"
            )));
        }
    }
    for j in 0..w.n_outcomes() {
        let marg = joint.second_marginal(j);
        let expect = ComplexMatrix::from_real_fn(d, |n, m| {
            if n == m {
                p.prob(n, j)
            } else {
                0.0
            }
        });
        if marg.max_abs_diff(&expect) > 1e-9 * (d as f64) {
            return Err(CohError::Structure(format!(
                "second marginal {j} deviates from P(j)"
            )));
        }
    }
    Ok(joint)
}

// ---------------------------------------------------------------------------
// Internal real-symmetric solver
// ---------------------------------------------------------------------------

struct RealProblem {
    /// Embedded (or native) block dimension.
    n: usize,
    /// Number of outcomes.
    nout: usize,
    /// Original complex dimension.
    dim: usize,
    embedded: bool,
    /// Target matrix (embedded), row-major n×n.
    c_mat: Vec<f64>,
    /// Diagonal targets: nout rows of length n.
    diag: Vec<f64>,
    /// tr X_j = Σ_n p_n(j), used by the dual correction.
    block_traces: Vec<f64>,
    c_fro: f64,
    averaging: Option<AvgTables>,
}

/// Precomputed covariance action on the (possibly embedded) real index
/// space, plus a reusable scratch buffer.
struct AvgTables {
    /// Per element: permutation of the embedded indices.
    perms: Vec<Vec<usize>>,
    /// Per element: real phase sign of each embedded index.
    signs: Vec<Vec<f64>>,
    /// Per element: outcome relabelling.
    out_perms: Vec<Vec<usize>>,
    scratch: Vec<f64>,
}

struct Iterates {
    x: Vec<f64>,
    y: Vec<f64>,
    pcor: Vec<f64>,
    qcor: Vec<f64>,
    gap_blocks: Vec<f64>,
    x_snap: Vec<f64>,
    g_snap: Vec<f64>,
    candidate: Vec<f64>,
}

impl RealProblem {
    fn build(c: &CoherenceMatrix, p: &IncoherentObservable, complex: bool) -> Result<Self> {
        let dim = c.dim();
        let nout = p.n_outcomes();
        let n = if complex { 2 * dim } else { dim };
        let mut c_mat = vec![0.0; n * n];
        if complex {
            for a in 0..dim {
                for b in 0..dim {
                    let z = c.get(a, b);
                    c_mat[a * n + b] = z.re;
                    c_mat[(a + dim) * n + (b + dim)] = z.re;
                    c_mat[a * n + (b + dim)] = -z.im;
                    c_mat[(a + dim) * n + b] = z.im;
                }
            }
        } else {
            for a in 0..dim {
                for b in 0..dim {
                    c_mat[a * n + b] = c.get(a, b).re;
                }
            }
        }
        let mut diag = vec![0.0; nout * n];
        let mut block_traces = vec![0.0; nout];
        for j in 0..nout {
            for a in 0..n {
                let pa = p.prob(a % dim, j);
                diag[j * n + a] = pa;
            }
            for a in 0..dim {
                block_traces[j] += p.prob(a, j);
            }
        }
        let c_fro = {
            let mut s = 0.0;
            for v in &c_mat {
                s += v * v;
            }
            fmath::sqrt(s)
        };
        Ok(Self {
            n,
            nout,
            dim,
            embedded: complex,
            c_mat,
            diag,
            block_traces,
            c_fro,
            averaging: None,
        })
    }

    fn build_averaging(&mut self, action: &CovariantAction) {
        let n = self.n;
        let d = self.dim;
        let order = action.len();
        let mut perms = Vec::with_capacity(order);
        let mut signs = Vec::with_capacity(order);
        let mut out_perms = Vec::with_capacity(order);
        for g in 0..order {
            let base = action.index_perm(g);
            let mut perm = Vec::with_capacity(n);
            let mut sign = Vec::with_capacity(n);
            for a in 0..n {
                perm.push(base[a % d] + (a / d) * d);
                sign.push(action.phase_re(g, a % d));
            }
            perms.push(perm);
            signs.push(sign);
            out_perms.push(action.outcome_perm(g).to_vec());
        }
        self.averaging = Some(AvgTables {
            perms,
            signs,
            out_perms,
            scratch: vec![0.0; self.nout * n * n],
        });
    }

    fn init(&self) -> Vec<f64> {
        let nn = self.n * self.n;
        let mut x = vec![0.0; self.nout * nn];
        let inv = 1.0 / self.nout as f64;
        for j in 0..self.nout {
            for a in 0..self.n {
                for b in 0..self.n {
                    x[j * nn + a * self.n + b] = if a == b {
                        self.diag[j * self.n + a]
                    } else {
                        self.c_mat[a * self.n + b] * inv
                    };
                }
            }
        }
        x
    }

    /// Projection onto the affine set; exact, coordinate-wise.
    fn project_affine(&mut self, x: &mut [f64]) {
        let n = self.n;
        let nn = n * n;
        let inv = 1.0 / self.nout as f64;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let mut s = 0.0;
                for j in 0..self.nout {
                    s += x[j * nn + a * n + b];
                }
                let shift = (self.c_mat[a * n + b] - s) * inv;
                for j in 0..self.nout {
                    x[j * nn + a * n + b] += shift;
                }
            }
        }
        for j in 0..self.nout {
            for a in 0..n {
                x[j * nn + a * n + a] = self.diag[j * n + a];
            }
        }
        if self.embedded {
            self.project_structure(x);
        }
        if let Some(avg) = &mut self.averaging {
            let order = avg.perms.len() as f64;
            avg.scratch.iter_mut().for_each(|v| *v = 0.0);
            for g in 0..avg.perms.len() {
                let perm = &avg.perms[g];
                let sign = &avg.signs[g];
                let out_perm = &avg.out_perms[g];
                for j in 0..self.nout {
                    let src = &x[out_perm[j] * nn..(out_perm[j] + 1) * nn];
                    let dst = &mut avg.scratch[j * nn..(j + 1) * nn];
                    for a in 0..n {
                        let pa_row = perm[a] * n;
                        let sa = sign[a];
                        let dst_row = &mut dst[a * n..(a + 1) * n];
                        for b in 0..n {
                            dst_row[b] += sa * sign[b] * src[pa_row + perm[b]];
                        }
                    }
                }
            }
            let inv_order = 1.0 / order;
            for (xi, si) in x.iter_mut().zip(&avg.scratch) {
                *xi = si * inv_order;
            }
        }
    }

    /// For embedded problems: projection onto matrices of the form
    /// `[[A, −B],[B, A]]` with `A` symmetric and `B` antisymmetric.
    fn project_structure(&self, x: &mut [f64]) {
        let d = self.dim;
        let n = self.n;
        let nn = n * n;
        for j in 0..self.nout {
            let blk = &mut x[j * nn..(j + 1) * nn];
            for a in 0..d {
                for b in 0..d {
                    let re = 0.5 * (blk[a * n + b] + blk[(a + d) * n + (b + d)]);
                    blk[a * n + b] = re;
                    blk[(a + d) * n + (b + d)] = re;
                    let im = 0.5 * (blk[(a + d) * n + b] - blk[a * n + (b + d)]);
                    blk[(a + d) * n + b] = im;
                    blk[a * n + (b + d)] = -im;
                }
            }
        }
    }

    /// Max PSD violation across blocks (read-only).
    fn psd_violation(&self, x: &[f64], projectors: &mut [RealPsdProjector]) -> f64 {
        let nn = self.n * self.n;
        let mut worst: f64 = 0.0;
        for j in 0..self.nout {
            let min = projectors[j].min_eigenvalue(&x[j * nn..(j + 1) * nn]);
            worst = worst.max(-min.min(0.0));
        }
        worst
    }

    fn run(&mut self, opts: &SolverOptions, warm: Option<&GiiWitness>) -> FeasibilityVerdict {
        let n = self.n;
        let nn = n * n;
        let nout = self.nout;
        if let Some(action) = &opts.covariance {
            self.build_averaging(action);
        }
        let scale = if self.embedded {
            core::f64::consts::SQRT_2
        } else {
            1.0
        };
        let target = opts.feas_tol / 10.0;

        let mut projectors: Vec<RealPsdProjector> =
            (0..nout).map(|_| RealPsdProjector::new(n)).collect();
        let start = match warm {
            Some(w) if w.dim() == self.dim && w.n_outcomes() == nout => {
                let mut x = vec![0.0; nout * nn];
                for (j, b) in w.blocks().iter().enumerate() {
                    self.embed_block(b, &mut x[j * nn..(j + 1) * nn]);
                }
                x
            }
            _ => self.init(),
        };
        let mut it = Iterates {
            x: start,
            y: vec![0.0; nout * nn],
            pcor: vec![0.0; nout * nn],
            qcor: vec![0.0; nout * nn],
            gap_blocks: vec![0.0; nout * nn],
            x_snap: Vec::new(),
            g_snap: Vec::new(),
            candidate: vec![0.0; nout * nn],
        };
        self.project_affine(&mut it.x);

        // fast path: the initialisation may already be a witness
        let v0 = self.psd_violation(&it.x, &mut projectors);
        if v0 <= target {
            return FeasibilityVerdict {
                status: FeasStatus::Feasible,
                residual: v0 / scale,
                iterations: 0,
                witness: Some(self.extract_witness(&it.x)),
            };
        }

        let mut gap = f64::INFINITY;
        let mut stall_ref: Option<f64> = None;
        for k in 0..opts.max_iters {
            // y = P_cone(x + pcor); pcor += x - y
            for i in 0..it.y.len() {
                it.y[i] = it.x[i] + it.pcor[i];
            }
            for j in 0..nout {
                projectors[j].project(&mut it.y[j * nn..(j + 1) * nn]);
            }
            for i in 0..it.y.len() {
                it.pcor[i] += it.x[i] - it.y[i];
            }
            // x = P_affine(y + qcor); qcor += y - x
            for i in 0..it.x.len() {
                it.x[i] = it.y[i] + it.qcor[i];
            }
            self.project_affine(&mut it.x);
            for i in 0..it.x.len() {
                it.qcor[i] += it.y[i] - it.x[i];
            }
            let mut g2 = 0.0;
            for i in 0..it.x.len() {
                let dlt = it.x[i] - it.y[i];
                it.gap_blocks[i] = dlt;
                g2 += dlt * dlt;
            }
            gap = fmath::sqrt(g2);

            if gap <= target {
                return FeasibilityVerdict {
                    status: FeasStatus::Feasible,
                    residual: self.psd_violation(&it.x, &mut projectors) / scale,
                    iterations: k + 1,
                    witness: Some(self.extract_witness(&it.x)),
                };
            }

            if (k + 1) % CERT_INTERVAL == 0 {
                if !it.x_snap.is_empty() {
                    if let Some(witness) =
                        self.primal_certificate(&mut it, &mut projectors, target)
                    {
                        return FeasibilityVerdict {
                            status: FeasStatus::Feasible,
                            residual: self.witness_violation(&witness, &mut projectors) / scale,
                            iterations: k + 1,
                            witness: Some(witness),
                        };
                    }
                    if self.dual_certificate(&it, &mut projectors) {
                        return FeasibilityVerdict {
                            status: FeasStatus::Infeasible,
                            residual: gap / scale,
                            iterations: k + 1,
                            witness: None,
                        };
                    }
                }
                it.x_snap.clear();
                it.x_snap.extend_from_slice(&it.x);
                it.g_snap.clear();
                it.g_snap.extend_from_slice(&it.gap_blocks);
            }

            if (k + 1) % opts.stall_window == 0 {
                if let Some(prev) = stall_ref {
                    let change = fmath::abs(prev - gap);
                    if change < STALL_REL * gap.max(1e-300) {
                        let status = if gap / scale > opts.infeas_threshold {
                            FeasStatus::Infeasible
                        } else {
                            FeasStatus::Unknown
                        };
                        return FeasibilityVerdict {
                            status,
                            residual: gap / scale,
                            iterations: k + 1,
                            witness: None,
                        };
                    }
                    // budget forecast: when the observed geometric rate
                    // cannot reach the target within the remaining budget
                    // (with margin), the probe cannot resolve; stopping
                    // early keeps threshold searches affordable
                    let settled = self.n >= 6 && k + 1 >= 25_000 && gap / scale <= 1e-2;
                    if (gap / scale <= opts.infeas_threshold || settled)
                        && gap < prev
                        && prev > 0.0
                    {
                        let rho = fmath::powf(gap / prev, 1.0 / opts.stall_window as f64);
                        if rho > 0.0 && rho < 1.0 {
                            let need = fmath::ln(target / gap) / fmath::ln(rho);
                            if need > 1.5 * (opts.max_iters - (k + 1)) as f64 {
                                return FeasibilityVerdict {
                                    status: FeasStatus::Unknown,
                                    residual: gap / scale,
                                    iterations: k + 1,
                                    witness: None,
                                };
                            }
                        }
                    }
                }
                stall_ref = Some(gap);
            }
        }
        FeasibilityVerdict {
            status: FeasStatus::Unknown,
            residual: gap / scale,
            iterations: opts.max_iters,
            witness: None,
        }
    }

    /// Tries extrapolated affine-feasible candidates; returns a witness when
    /// one satisfies the cone constraint within the feasibility target.
    ///
    /// Each candidate gets a polish round — cone projection followed by the
    /// exact affine re-imposition — which clears eigenvalue dust when the
    /// extrapolation overshoots into the cone interior.
    fn primal_certificate(
        &mut self,
        it: &mut Iterates,
        projectors: &mut [RealPsdProjector],
        target: f64,
    ) -> Option<GiiWitness> {
        let nn = self.n * self.n;
        for &t in &PRIMAL_EXTRAPOLATIONS {
            for i in 0..it.candidate.len() {
                it.candidate[i] = it.x[i] + t * (it.x[i] - it.x_snap[i]);
            }
            self.project_affine(&mut it.candidate);
            let mut worst: f64 = 0.0;
            for j in 0..self.nout {
                let min = projectors[j].project(&mut it.candidate[j * nn..(j + 1) * nn]);
                worst = worst.max(-min.min(0.0));
            }
            if worst <= target {
                // the pre-projection candidate was already affine-exact and
                // PSD within target; undo the clipping by re-extrapolating
                for i in 0..it.candidate.len() {
                    it.candidate[i] = it.x[i] + t * (it.x[i] - it.x_snap[i]);
                }
                self.project_affine(&mut it.candidate);
                return Some(self.extract_witness(&it.candidate));
            }
            // polish: the clipped candidate is PSD exactly; restore the
            // affine constraints and accept if PSD survived
            self.project_affine(&mut it.candidate);
            let v = self.psd_violation(&it.candidate, projectors);
            if v <= target {
                return Some(self.extract_witness(&it.candidate));
            }
        }
        None
    }

    fn witness_violation(&self, w: &GiiWitness, projectors: &mut [RealPsdProjector]) -> f64 {
        // recompute on the real representation for a consistent scale
        let nn = self.n * self.n;
        let mut buf = vec![0.0; nn];
        let mut worst: f64 = 0.0;
        for (j, b) in w.blocks().iter().enumerate() {
            self.embed_block(b, &mut buf);
            let min = projectors[j].min_eigenvalue(&buf);
            worst = worst.max(-min.min(0.0));
        }
        worst
    }

    fn embed_block(&self, b: &ComplexMatrix, out: &mut [f64]) {
        let n = self.n;
        let d = self.dim;
        if self.embedded {
            for a in 0..d {
                for c in 0..d {
                    let z = b.get(a, c);
                    out[a * n + c] = z.re;
                    out[(a + d) * n + (c + d)] = z.re;
                    out[a * n + (c + d)] = -z.im;
                    out[(a + d) * n + c] = z.im;
                }
            }
        } else {
            for a in 0..d {
                for c in 0..d {
                    out[a * n + c] = b.get(a, c).re;
                }
            }
        }
    }

    /// Farkas-type infeasibility test from the displacement vector: a dual
    /// pair `(Y, z)` with `Y + Diag(z_j) ⪰ 0` and negative pairing value
    /// proves the constraint sets disjoint. Negative block eigenvalues are
    /// compensated exactly through the known block traces.
    fn dual_certificate(&self, it: &Iterates, projectors: &mut [RealPsdProjector]) -> bool {
        let n = self.n;
        let nn = n * n;
        let margin = 1e-11 * (1.0 + self.c_fro);
        let mut y_avg = vec![0.0; nn];
        let mut m_j = vec![0.0; nn];
        for &t in &DUAL_EXTRAPOLATIONS {
            let gblk = |j: usize, i: usize| -> f64 {
                let cur = it.gap_blocks[j * nn + i];
                if t == 0.0 || it.g_snap.is_empty() {
                    cur
                } else {
                    cur + t * (cur - it.g_snap[j * nn + i])
                }
            };
            // Y = -avg_j offdiag(G_j), z_j = -diag(G_j)
            for i in 0..nn {
                let mut s = 0.0;
                for j in 0..self.nout {
                    s += gblk(j, i);
                }
                y_avg[i] = -s / self.nout as f64;
            }
            for a in 0..n {
                y_avg[a * n + a] = 0.0;
            }
            // pairing value <C,Y> + Σ_j z_j · p_j, before PSD corrections
            let mut val = 0.0;
            for a in 0..n {
                for b in 0..n {
                    val += self.c_mat[a * n + b] * y_avg[a * n + b];
                }
            }
            for j in 0..self.nout {
                for a in 0..n {
                    val += -gblk(j, a * n + a) * self.diag[j * n + a];
                }
            }
            if val >= -margin {
                continue;
            }
            // corrections: each negative eigenvalue of M_j = Y + Diag(z_j)
            // is compensated by |λ_min|·tr X_j, which only increases val
            let mut certified = true;
            for j in 0..self.nout {
                m_j.copy_from_slice(&y_avg);
                for a in 0..n {
                    m_j[a * n + a] = -gblk(j, a * n + a);
                }
                for a in 0..n {
                    for b in (a + 1)..n {
                        let avg = 0.5 * (m_j[a * n + b] + m_j[b * n + a]);
                        m_j[a * n + b] = avg;
                        m_j[b * n + a] = avg;
                    }
                }
                let min = projectors[j].min_eigenvalue(&m_j);
                if min < 0.0 {
                    let trace_factor = if self.embedded {
                        2.0 * self.block_traces[j]
                    } else {
                        self.block_traces[j]
                    };
                    val += (-min) * trace_factor;
                    if val >= -margin {
                        certified = false;
                        break;
                    }
                }
            }
            if certified && val < -margin {
                return true;
            }
        }
        false
    }

    fn extract_witness(&self, x: &[f64]) -> GiiWitness {
        let n = self.n;
        let nn = n * n;
        let d = self.dim;
        let blocks = (0..self.nout)
            .map(|j| {
                let blk = &x[j * nn..(j + 1) * nn];
                if self.embedded {
                    ComplexMatrix::from_fn(d, |a, b| {
                        C64::new(
                            0.5 * (blk[a * n + b] + blk[(a + d) * n + (b + d)]),
                            0.5 * (blk[(a + d) * n + b] - blk[a * n + (b + d)]),
                        )
                    })
                } else {
                    ComplexMatrix::from_fn(d, |a, b| C64::new(blk[a * n + b], 0.0))
                }
            })
            .collect();
        GiiWitness::new(d, blocks, Provenance::Solver)
    }
}

// ---------------------------------------------------------------------------
// Threshold search along a monotone family
// ---------------------------------------------------------------------------

/// Result of the robustness-threshold bisection.
#[derive(Debug, Clone)]
pub struct AlphaStar {
    /// Estimated threshold.
    pub alpha: f64,
    /// Final bracket `[certified-feasible, first-infeasible]`.
    pub bracket: (f64, f64),
    /// Largest `α` at which the Schur sufficient condition certified
    /// membership (lower seed).
    pub cor2_seed: f64,
    /// Smallest `α` at which the tradeoff necessary condition failed
    /// (upper seed).
    pub cor1_seed: f64,
    pub probes: usize,
    pub unknown_probes: usize,
    /// True when the bisection stopped inside the solver's gray zone;
    /// the returned `alpha` then sits within the unresolved band.
    pub flagged: bool,
}

const SEED_TOL: f64 = 1e-6;
const MAX_PROBES: usize = 48;

/// Finds the threshold `α* = max{α | line(α) ∈ 𝒞_C}` along a family that is
/// downward closed in `α` (convex line to a trivial observable).
///
/// The bracket is seeded by the closed-form certificates (sufficient lower,
/// necessary upper) and refined by bisection on the feasibility solver.
pub fn alpha_star(
    c: &CoherenceMatrix,
    line: &dyn Fn(f64) -> IncoherentObservable,
    opts: &SolverOptions,
) -> Result<AlphaStar> {
    let cor2_member = |a: f64| -> bool {
        matches!(cor2_check(c, &line(a)), Ok(Cor2Outcome::Member))
    };
    let cor1_ok = |a: f64| -> bool { cor1_check(c, &line(a)).map(|v| v.is_empty()).unwrap_or(false) };

    let cor2_seed = last_true(&cor2_member);
    let cor1_seed = last_true(&cor1_ok).min(1.0);

    let mut lo = cor2_seed;
    let mut hi = (cor1_seed + SEED_TOL).min(1.0);
    if hi < lo {
        hi = lo;
    }
    let mut probes = 0;
    let mut unknown_probes = 0;
    let mut flagged = false;
    let mut alpha = 0.5 * (lo + hi);
    let mut warm: Option<GiiWitness> = None;

    if hi - lo <= opts.bisect_tol && lo > 0.0 {
        // the closed-form seeds already pin the threshold; confirm the
        // feasible side with one solve slightly inside the bracket
        let probe = (lo - 10.0 * opts.bisect_tol).max(0.0);
        let verdict = solve_gii(c, &line(probe), opts)?;
        probes = 1;
        if verdict.status != FeasStatus::Feasible {
            unknown_probes = 1;
            flagged = true;
        }
    }

    while hi - lo > opts.bisect_tol && probes < MAX_PROBES {
        let mid = 0.5 * (lo + hi);
        let verdict = solve_gii_warm(c, &line(mid), opts, warm.as_ref())?;
        probes += 1;
        match verdict.status {
            FeasStatus::Feasible => {
                lo = mid;
                warm = verdict.witness;
                continue;
            }
            FeasStatus::Infeasible => {
                hi = mid;
                continue;
            }
            FeasStatus::Unknown => {
                unknown_probes += 1;
                let w = hi - lo;
                if w <= 4.0 * opts.bisect_tol {
                    // bracket already near resolution: the undecided probe
                    // itself is the best estimate
                    alpha = mid;
                    flagged = true;
                    break;
                }
                // quarter-split: a single near-boundary probe should not
                // abort the search while the bracket is still wide
                let q = mid - 0.25 * w;
                let v2 = solve_gii_warm(c, &line(q), opts, warm.as_ref())?;
                probes += 1;
                match v2.status {
                    FeasStatus::Feasible => {
                        lo = q;
                        warm = v2.witness;
                        continue;
                    }
                    FeasStatus::Infeasible => {
                        hi = q;
                        continue;
                    }
                    FeasStatus::Unknown => {
                        unknown_probes += 1;
                        // both probes sit in the gray band around the
                        // boundary; the midpoint is the best estimate
                        alpha = mid;
                        flagged = true;
                        break;
                    }
                }
            }
        }
    }
    if !flagged {
        alpha = 0.5 * (lo + hi);
    }
    Ok(AlphaStar {
        alpha,
        bracket: (lo, hi),
        cor2_seed,
        cor1_seed,
        probes,
        unknown_probes,
        flagged,
    })
}

/// Largest `α ∈ [0,1]` at which `pred` holds, assuming `pred` is true on a
/// prefix; bisected to [`SEED_TOL`].
fn last_true(pred: &dyn Fn(f64) -> bool) -> f64 {
    if pred(1.0) {
        return 1.0;
    }
    if !pred(0.0) {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while hi - lo > SEED_TOL {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
