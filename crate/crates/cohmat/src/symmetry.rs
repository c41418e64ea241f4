//! Structure of a coherence pattern: maximal-coherence equivalence classes,
//! reduction to the class space, the permutation symmetry group with its
//! phase system, covariance of observables and instruments, and the
//! symmetry-reduced membership check.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CohError, Result};
use crate::fmath;
use crate::gii::{solve_gii, FeasibilityVerdict, SolverOptions};
use crate::matrix::{C64, CoherenceMatrix, ComplexMatrix};
use crate::povm::IncoherentObservable;

/// Partition of basis indices into maximal-coherence classes
/// (`n ~ m` iff `|c_nm| = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    /// Classes in order of their smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Class label of each basis index.
    pub class_of: Vec<usize>,
}

impl ClassPartition {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }
}

/// Splits `{0..d}` by the unit-modulus pattern of `C`. The relation is
/// transitive for any valid coherence matrix; a non-transitive pattern
/// signals an invalid input and is reported as an error.
pub fn coherence_classes(c: &CoherenceMatrix) -> Result<ClassPartition> {
    let d = c.dim();
    let is_unit = |n: usize, m: usize| -> bool {
        let z = c.get(n, m);
        (fmath::hypot(z.re, z.im) - 1.0).abs() <= crate::CLASS_TOL
    };
    let mut class_of = vec![usize::MAX; d];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for n in 0..d {
        if class_of[n] != usize::MAX {
            continue;
        }
        let label = classes.len();
        let mut members = vec![n];
        class_of[n] = label;
        for m in (n + 1)..d {
            if class_of[m] == usize::MAX && is_unit(n, m) {
                class_of[m] = label;
                members.push(m);
            }
        }
        classes.push(members);
    }
    // transitivity: unit modulus must hold exactly within classes and
    // nowhere across them
    for n in 0..d {
        for m in 0..d {
            let same = class_of[n] == class_of[m];
            if n != m && same != is_unit(n, m) {
                return Err(CohError::Structure(format!(
                    "unit-modulus pattern is not transitive at ({n},{m})"
                )));
            }
        }
    }
    Ok(ClassPartition { classes, class_of })
}

/// Factorisation `C = D * (L C̃ L†)`: the phases `D` come from a unitary
/// GIO and `C̃` is the reduced pattern on the class space.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub partition: ClassPartition,
    /// Reduced pattern, `n_C × n_C`.
    pub reduced: CoherenceMatrix,
    /// Smallest index of each class.
    pub representatives: Vec<usize>,
    /// Unit phase `e^{iθ_n}` aligning `η_n` with its class representative.
    pub phases: Vec<C64>,
}

impl Reduction {
    /// Rebuilds the original pattern from the factorisation.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.phases.len();
        ComplexMatrix::from_fn(d, |n, m| {
            let k = self.partition.class_of[n];
            let kp = self.partition.class_of[m];
            self.phases[n].conj() * self.phases[m] * self.reduced.get(k, kp)
        })
    }

    /// Compresses an observable adapted to the pattern onto the class
    /// space; errors when some class is not uniform (a Cor.-1 violation).
    pub fn compress_observable(&self, p: &IncoherentObservable) -> Result<IncoherentObservable> {
        let d = self.phases.len();
        if p.dim() != d {
            return Err(CohError::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        let nout = p.n_outcomes();
        let nc = self.partition.n_classes();
        let mut table = vec![0.0; nc * nout];
        for (k, members) in self.partition.classes.iter().enumerate() {
            let rep = members[0];
            for j in 0..nout {
                table[k * nout + j] = p.prob(rep, j);
            }
            for &n in members.iter().skip(1) {
                for j in 0..nout {
                    if fmath::abs(p.prob(n, j) - p.prob(rep, j)) > 1e-9 {
                        return Err(CohError::Structure(format!(
                            "observable distinguishes indices {rep} and {n} \
                             inside a maximal-coherence class (tradeoff violation)"
                        )));
                    }
                }
            }
        }
        IncoherentObservable::new(nc, nout, table)
    }
}

/// Factors out phases and compresses each maximal-coherence class to its
/// representative. After compression, the first row of the reduced matrix
/// is rotated to be real non-negative, which fixes the remaining phase
/// freedom deterministically.
pub fn reduce(c: &CoherenceMatrix) -> Result<Reduction> {
    let partition = coherence_classes(c)?;
    let d = c.dim();
    let nc = partition.n_classes();
    let representatives: Vec<usize> = partition.classes.iter().map(|cl| cl[0]).collect();
    let mut phases = vec![C64::new(1.0, 0.0); d];
    for (k, members) in partition.classes.iter().enumerate() {
        let rep = representatives[k];
        for &n in members {
            if n == rep {
                continue;
            }
            // |c_{n,rep}| = 1 inside a class: e^{iθ_n} = c_{rep,n}
            let z = c.get(rep, n);
            let r = fmath::hypot(z.re, z.im);
            phases[n] = z / r;
        }
    }
    let mut reduced = ComplexMatrix::from_fn(nc, |k, kp| {
        c.get(representatives[k], representatives[kp])
    });
    // canonical residual phases: first row real non-negative
    let mut row_phase = vec![C64::new(1.0, 0.0); nc];
    for k in 1..nc {
        let z = reduced.get(0, k);
        let r = fmath::hypot(z.re, z.im);
        if r > crate::CLASS_TOL {
            row_phase[k] = z.conj() / r;
        }
    }
    reduced = ComplexMatrix::from_fn(nc, |k, kp| {
        row_phase[k].conj() * reduced.get(k, kp) * row_phase[kp]
    });
    for (n, ph) in phases.iter_mut().enumerate() {
        let k = partition.class_of[n];
        *ph *= row_phase[k].conj();
    }
    let reduced = CoherenceMatrix::new(reduced)?;
    Ok(Reduction {
        partition,
        reduced,
        representatives,
        phases,
    })
}

/// The symmetry group `G_C`: permutations `π` with
/// `c_{π(n)π(m)} = u_n(π) c_nm conj(u_m(π))` for unit phases `u_n(π)`.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    pub dim: usize,
    pub perms: Vec<Vec<usize>>,
    /// Phase table `u_n(π)` per element, anchored at `u_0 = 1`.
    pub phases: Vec<Vec<C64>>,
}

impl SymmetryGroup {
    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn identity_index(&self) -> usize {
        self.perms
            .iter()
            .position(|p| p.iter().enumerate().all(|(i, &v)| i == v))
            .expect("group contains the identity")
    }

    /// Builds a group from explicit permutations with trivial phases,
    /// verifying closure; for patterns whose dimension exceeds the
    /// brute-force bound.
    pub fn from_permutations(dim: usize, perms: Vec<Vec<usize>>) -> Result<Self> {
        let phases = perms
            .iter()
            .map(|_| vec![C64::new(1.0, 0.0); dim])
            .collect();
        let g = Self { dim, perms, phases };
        g.verify_closure()?;
        Ok(g)
    }

    fn verify_closure(&self) -> Result<()> {
        let find = |p: &[usize]| self.perms.iter().position(|q| q == p);
        if find(&(0..self.dim).collect::<Vec<_>>()).is_none() {
            return Err(CohError::Structure("group lacks the identity".into()));
        }
        for a in &self.perms {
            for b in &self.perms {
                let prod: Vec<usize> = (0..self.dim).map(|i| a[b[i]]).collect();
                if find(&prod).is_none() {
                    return Err(CohError::Structure(
                        "permutation set is not closed under composition".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Brute-force search of `S_d` for the symmetry group of `C`. Requires all
/// entries nonzero (the phase recipe divides by `c_{n,n0}`) and
/// `d ≤ DMAX_SYM`; larger patterns need a caller-supplied group.
pub fn symmetry_group(c: &CoherenceMatrix) -> Result<SymmetryGroup> {
    let d = c.dim();
    if d > crate::DMAX_SYM {
        return Err(CohError::Unsupported(format!(
            "brute-force symmetry search is limited to d <= {}, got {d}; \
             supply the group explicitly",
            crate::DMAX_SYM
        )));
    }
    for n in 0..d {
        for m in 0..d {
            let z = c.get(n, m);
            if fmath::hypot(z.re, z.im) <= crate::CLASS_TOL {
                return Err(CohError::Unsupported(
                    "symmetry search requires all pattern entries nonzero".into(),
                ));
            }
        }
    }
    let tol = 1e-9 * c.matrix().frobenius_norm().max(1.0);
    let mut perms = Vec::new();
    let mut phases = Vec::new();
    let mut perm: Vec<usize> = (0..d).collect();
    permute_all(&mut perm, 0, &mut |p: &[usize]| {
        // candidate phases from the anchored recipe u_n = c_{π(n),π(0)} / c_{n,0}
        let mut u = Vec::with_capacity(d);
        for n in 0..d {
            let num = c.get(p[n], p[0]);
            let den = c.get(n, 0);
            u.push(num / den);
        }
        for z in &u {
            if (fmath::hypot(z.re, z.im) - 1.0).abs() > 1e-9 {
                return;
            }
        }
        for n in 0..d {
            for m in 0..d {
                let lhs = c.get(p[n], p[m]);
                let rhs = u[n] * c.get(n, m) * u[m].conj();
                let diff = lhs - rhs;
                if fmath::hypot(diff.re, diff.im) > tol {
                    return;
                }
            }
        }
        perms.push(p.to_vec());
        phases.push(u);
    });
    let g = SymmetryGroup {
        dim: d,
        perms,
        phases,
    };
    g.verify_closure()?;
    Ok(g)
}

fn permute_all(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    let d = perm.len();
    if k == d {
        visit(perm);
        return;
    }
    // lexicographic order keeps the output deterministic
    let mut rest: Vec<usize> = perm[k..].to_vec();
    rest.sort_unstable();
    for &v in &rest {
        let pos = perm[k..].iter().position(|&x| x == v).unwrap() + k;
        perm.swap(k, pos);
        permute_all(perm, k + 1, visit);
        // restore order of the tail
        perm[k..].sort_unstable();
        let back = perm[k..].iter().position(|&x| x == v).unwrap() + k;
        perm.swap(k, back);
        perm[k..].sort_unstable();
        let cur = perm[k..].iter().position(|&x| x == v).unwrap() + k;
        perm.swap(k, cur);
    }
    perm[k..].sort_unstable();
}

/// The class action `φ: G_C → S_{n_C}` defined by `π(I_k) = I_{φ(π)(k)}`;
/// verified to be well defined and a homomorphism.
pub fn class_homomorphism(
    g: &SymmetryGroup,
    partition: &ClassPartition,
) -> Result<Vec<Vec<usize>>> {
    let nc = partition.n_classes();
    let mut phi = Vec::with_capacity(g.order());
    for perm in &g.perms {
        let mut map = vec![usize::MAX; nc];
        for (k, members) in partition.classes.iter().enumerate() {
            let image = partition.class_of[perm[members[0]]];
            for &n in members {
                if partition.class_of[perm[n]] != image {
                    return Err(CohError::Structure(format!(
                        "permutation splits class {k}"
                    )));
                }
            }
            map[k] = image;
        }
        let mut seen = vec![false; nc];
        for &v in &map {
            if v == usize::MAX || seen[v] {
                return Err(CohError::Structure("class action is not a bijection".into()));
            }
            seen[v] = true;
        }
        phi.push(map);
    }
    // homomorphism: φ(π∘π') = φ(π)∘φ(π')
    for (a, pa) in g.perms.iter().enumerate() {
        for (b, pb) in g.perms.iter().enumerate() {
            let prod: Vec<usize> = (0..g.dim).map(|i| pa[pb[i]]).collect();
            let idx = g
                .perms
                .iter()
                .position(|q| *q == prod)
                .ok_or_else(|| CohError::Structure("group not closed".into()))?;
            for k in 0..nc {
                if phi[idx][k] != phi[a][phi[b][k]] {
                    return Err(CohError::Structure(
                        "class action fails the homomorphism property".into(),
                    ));
                }
            }
        }
    }
    Ok(phi)
}

/// Checks `p_{π⁻¹(n)}(j) = p_n(φ(π)(j))` for every group element.
pub fn is_covariant(
    p: &IncoherentObservable,
    g: &SymmetryGroup,
    phi: &[Vec<usize>],
    partition: &ClassPartition,
) -> Result<bool> {
    if p.n_outcomes() != partition.n_classes() {
        return Err(CohError::DimensionMismatch {
            expected: partition.n_classes(),
            got: p.n_outcomes(),
        });
    }
    if p.dim() != g.dim {
        return Err(CohError::DimensionMismatch {
            expected: g.dim,
            got: p.dim(),
        });
    }
    for (e, perm) in g.perms.iter().enumerate() {
        for n in 0..p.dim() {
            for j in 0..p.n_outcomes() {
                // with m = π(n): p_n(j) = p_m(φ(π)(j))
                let lhs = p.prob(n, j);
                let rhs = p.prob(perm[n], phi[e][j]);
                if fmath::abs(lhs - rhs) > 1e-9 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Group-averages instrument blocks:
/// `C'(j) = |G|⁻¹ Σ_π W_π† C(φ(π)(j)) W_π`. The output is covariant and,
/// for a witness of a covariant observable, still a witness.
pub fn covariant_average(
    blocks: &[ComplexMatrix],
    g: &SymmetryGroup,
    phi: &[Vec<usize>],
) -> Result<Vec<ComplexMatrix>> {
    let d = g.dim;
    for b in blocks {
        if b.dim() != d {
            return Err(CohError::DimensionMismatch {
                expected: d,
                got: b.dim(),
            });
        }
    }
    let order = g.order() as f64;
    let mut out = Vec::with_capacity(blocks.len());
    for j in 0..blocks.len() {
        let mut acc = ComplexMatrix::zeros(d);
        for (e, perm) in g.perms.iter().enumerate() {
            let src = &blocks[phi[e][j]];
            let u = &g.phases[e];
            for n in 0..d {
                for m in 0..d {
                    let term = u[n].conj() * u[m] * src.get(perm[n], perm[m]);
                    let v = acc.get(n, m) + term;
                    acc.set(n, m, v);
                }
            }
        }
        out.push(acc.scale(1.0 / order));
    }
    Ok(out)
}

/// Covariance data in the form the feasibility solver consumes: index
/// permutations, their phases, and the induced outcome permutations.
#[derive(Debug, Clone)]
pub struct CovariantAction {
    index_perms: Vec<Vec<usize>>,
    phases: Vec<Vec<C64>>,
    outcome_perms: Vec<Vec<usize>>,
}

impl CovariantAction {
    pub fn new(g: &SymmetryGroup, phi: &[Vec<usize>]) -> Self {
        Self {
            index_perms: g.perms.clone(),
            phases: g.phases.clone(),
            outcome_perms: phi.to_vec(),
        }
    }

    /// Exchange action `k ↦ n−1−k` acting identically on indices and
    /// outcomes (the reduced collective-decoherence symmetry).
    pub fn exchange(n: usize) -> Self {
        let id: Vec<usize> = (0..n).collect();
        let rev: Vec<usize> = (0..n).rev().collect();
        Self {
            index_perms: vec![id.clone(), rev.clone()],
            phases: vec![vec![C64::new(1.0, 0.0); n]; 2],
            outcome_perms: vec![id, rev],
        }
    }

    pub fn len(&self) -> usize {
        self.index_perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_perms.is_empty()
    }

    pub fn index_perm(&self, g: usize) -> &[usize] {
        &self.index_perms[g]
    }

    pub fn outcome_perm(&self, g: usize) -> &[usize] {
        &self.outcome_perms[g]
    }

    pub fn phase_re(&self, g: usize, n: usize) -> f64 {
        self.phases[g][n].re
    }

    pub fn has_complex_phases(&self) -> bool {
        self.phases
            .iter()
            .any(|row| row.iter().any(|z| fmath::abs(z.im) > 1e-12))
    }

    pub fn check_compatible(&self, dim: usize, n_outcomes: usize) -> Result<()> {
        for p in &self.index_perms {
            if p.len() != dim {
                return Err(CohError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
        }
        for p in &self.outcome_perms {
            if p.len() != n_outcomes {
                return Err(CohError::DimensionMismatch {
                    expected: n_outcomes,
                    got: p.len(),
                });
            }
        }
        Ok(())
    }
}

/// Verdict of [`check_sym_membership`]: the reduced solve plus the data
/// needed to interpret it in the original dimension.
#[derive(Debug, Clone)]
pub struct SymMembership {
    pub verdict: FeasibilityVerdict,
    pub reduction: Reduction,
    /// The compressed observable actually solved for.
    pub reduced_observable: IncoherentObservable,
}

/// Decides membership of a covariant observable through the reduction:
/// compress onto the class space, solve the reduced feasibility problem
/// with covariance averaging, and lift the verdict.
///
/// `p` may be given either in the full dimension (with outcome set equal to
/// the class labels) or already compressed; a full-dimensional `p` that
/// distinguishes indices inside a class is rejected, since such observables
/// always violate the tradeoff bound.
pub fn check_sym_membership(
    c: &CoherenceMatrix,
    p: &IncoherentObservable,
    opts: &SolverOptions,
) -> Result<SymMembership> {
    let reduction = reduce(c)?;
    let nc = reduction.partition.n_classes();
    if p.n_outcomes() != nc {
        return Err(CohError::DimensionMismatch {
            expected: nc,
            got: p.n_outcomes(),
        });
    }
    let reduced_observable = if p.dim() == c.dim() {
        reduction.compress_observable(p)?
    } else if p.dim() == nc {
        p.clone()
    } else {
        return Err(CohError::DimensionMismatch {
            expected: c.dim(),
            got: p.dim(),
        });
    };
    // covariance of the reduced problem: the class action of G_C when the
    // reduced dimension admits the brute-force search, trivial otherwise
    let mut solver_opts = opts.clone();
    solver_opts.covariance = reduced_action(&reduction)?;
    if let Some(action) = &solver_opts.covariance {
        // only use the action if the compressed observable is covariant
        let mut keep = true;
        for g in 0..action.len() {
            let perm = action.index_perm(g);
            let operm = action.outcome_perm(g);
            for n in 0..nc {
                for j in 0..nc {
                    if fmath::abs(
                        reduced_observable.prob(n, j)
                            - reduced_observable.prob(perm[n], operm[j]),
                    ) > 1e-9
                    {
                        keep = false;
                    }
                }
            }
        }
        if !keep {
            return Err(CohError::Structure(
                "observable is not covariant for the pattern's symmetry group".into(),
            ));
        }
    }
    let verdict = solve_gii(&reduction.reduced, &reduced_observable, &solver_opts)?;
    Ok(SymMembership {
        verdict,
        reduction,
        reduced_observable,
    })
}

fn reduced_action(reduction: &Reduction) -> Result<Option<CovariantAction>> {
    let nc = reduction.partition.n_classes();
    if nc > crate::DMAX_SYM {
        return Ok(None);
    }
    // zero entries block the phase recipe; skip covariance in that case
    for k in 0..nc {
        for kp in 0..nc {
            let z = reduction.reduced.get(k, kp);
            if fmath::hypot(z.re, z.im) <= crate::CLASS_TOL {
                return Ok(None);
            }
        }
    }
    let g = symmetry_group(&reduction.reduced)?;
    if g.phases.iter().any(|row| row.iter().any(|z| fmath::abs(z.im) > 1e-12)) {
        return Ok(None);
    }
    // φ of the class sizes: permutations must link classes of equal size in
    // the original dimension to be liftable
    let sizes: Vec<usize> = reduction.partition.classes.iter().map(|c| c.len()).collect();
    let perms: Vec<Vec<usize>> = g
        .perms
        .iter()
        .cloned()
        .filter(|p| (0..nc).all(|k| sizes[p[k]] == sizes[k]))
        .collect();
    let phases: Vec<Vec<C64>> = perms.iter().map(|_| vec![C64::new(1.0, 0.0); nc]).collect();
    let outcome = perms.clone();
    let action = CovariantAction {
        index_perms: perms,
        phases,
        outcome_perms: outcome,
    };
    if action.len() <= 1 {
        return Ok(None);
    }
    // liftable subset must itself be a group
    let set = SymmetryGroup {
        dim: nc,
        perms: action.index_perms.clone(),
        phases: action.phases.clone(),
    };
    if set.verify_closure().is_err() {
        return Ok(None);
    }
    Ok(Some(action))
}
