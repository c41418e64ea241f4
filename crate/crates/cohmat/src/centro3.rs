//! Centrosymmetric 3-dimensional pattern family `[[1,λ,γ],[λ,1,λ],[γ,λ,1]]`:
//! the exact membership region of the exchange-covariant observables
//! `(p, q, r)`, its line-intersection thresholds, and a samples mesh for
//! plotting. Powers the N=2 collective-decoherence region.

use alloc::vec::Vec;

use crate::error::{CohError, Result};
use crate::fmath;
use crate::matrix::{CoherenceMatrix, ComplexMatrix};
use crate::povm::IncoherentObservable;

/// Parameters `λ, γ ∈ [0, 1]` with `D = (1+γ)/2 − λ² ≥ 0` (the PSD
/// condition for the pattern).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centro3Params {
    pub lambda: f64,
    pub gamma: f64,
    /// `D = (1+γ)/2 − λ²`.
    pub d: f64,
}

impl Centro3Params {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(CohError::OutOfRange {
                name: "lambda",
                value: lambda,
            });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(CohError::OutOfRange {
                name: "gamma",
                value: gamma,
            });
        }
        let d = 0.5 * (1.0 + gamma) - lambda * lambda;
        if d < -1e-12 {
            return Err(CohError::NotPsd { min_eigenvalue: d });
        }
        Ok(Self {
            lambda,
            gamma,
            d: d.max(0.0),
        })
    }

    /// The N=2 collective-decoherence reduction: `γ = λ⁴`.
    pub fn spin_boson_n2(lambda: f64) -> Result<Self> {
        Self::new(lambda, lambda * lambda * lambda * lambda)
    }

    pub fn coherence_matrix(&self) -> CoherenceMatrix {
        let (l, g) = (self.lambda, self.gamma);
        let m = ComplexMatrix::from_real_fn(3, move |a, b| match (a, b) {
            (0, 2) | (2, 0) => g,
            _ if a == b => 1.0,
            _ => l,
        });
        CoherenceMatrix::new_unchecked(m)
    }

    /// Lower boundary surface `h_-`: zero until `2D`, then the square of
    /// `(λ√w − √(1+γ−w)√D)/(1+γ)`.
    pub fn h_minus(&self, w: f64) -> f64 {
        let top = 1.0 + self.gamma;
        let w = w.clamp(0.0, top);
        if w <= 2.0 * self.d {
            return 0.0;
        }
        let t = (self.lambda * fmath::sqrt(w) - fmath::sqrt(top - w) * fmath::sqrt(self.d)) / top;
        t * t
    }

    /// Upper boundary surface `h_+`: the square of
    /// `(λ√w + √(1+γ−w)√D)/(1+γ)` until `2λ²`, then `1/2`.
    pub fn h_plus(&self, w: f64) -> f64 {
        let top = 1.0 + self.gamma;
        if w >= 2.0 * self.lambda * self.lambda {
            return 0.5;
        }
        let w = w.clamp(0.0, top);
        let t = (self.lambda * fmath::sqrt(w) + fmath::sqrt(top - w) * fmath::sqrt(self.d)) / top;
        t * t
    }
}

/// Exchange-covariant observable `(p, q, r)`: outcome 0 has diagonal
/// `(p, r, q)`, outcome 2 its mirror, outcome 1 the remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl RegionPoint {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p + q > 1.0 + 1e-12 {
            return Err(CohError::OutOfRange {
                name: "(p,q)",
                value: p + q,
            });
        }
        if !(0.0..=0.5 + 1e-12).contains(&r) {
            return Err(CohError::OutOfRange { name: "r", value: r });
        }
        Ok(Self { p, q, r })
    }

    /// The three-outcome observable on the reduced 3-dimensional space.
    pub fn observable(&self) -> IncoherentObservable {
        let (p, q, r) = (self.p, self.q, self.r);
        let s = (1.0 - p - q).max(0.0);
        let table = alloc::vec![
            p,
            s,
            q, //
            r,
            1.0 - 2.0 * r,
            r, //
            q,
            s,
            p,
        ];
        IncoherentObservable::new(3, 3, table).expect("valid by construction")
    }
}

/// The `w`-functions of the region characterisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionFunctions {
    /// `(√q + √p)²`.
    pub w_plus: f64,
    /// `(√q − √p)²`.
    pub w_minus: f64,
    /// `γ − 1 + 2(q + p)`.
    pub w_zero: f64,
    /// `w_−` when `w_+ ≤ 1−γ`, else `w₀` (continuous join).
    pub w_zero_minus: f64,
    /// `h_−(w_zero_minus)`: lower admissible `r` on this fibre.
    pub h_minus_at: f64,
    /// `h_+(w_plus)`: upper admissible `r`.
    pub h_plus_at: f64,
}

pub fn region_functions(p: f64, q: f64, params: &Centro3Params) -> Result<RegionFunctions> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p + q > 1.0 + 1e-12 {
        return Err(CohError::OutOfRange {
            name: "(p,q)",
            value: p + q,
        });
    }
    let sp = fmath::sqrt(p.max(0.0));
    let sq = fmath::sqrt(q.max(0.0));
    let w_plus = (sq + sp) * (sq + sp);
    let w_minus = (sq - sp) * (sq - sp);
    let w_zero = params.gamma - 1.0 + 2.0 * (q + p);
    let w_zero_minus = if w_plus <= 1.0 - params.gamma {
        w_minus
    } else {
        w_zero.max(0.0)
    };
    Ok(RegionFunctions {
        w_plus,
        w_minus,
        w_zero,
        w_zero_minus,
        h_minus_at: params.h_minus(w_zero_minus),
        h_plus_at: params.h_plus(w_plus),
    })
}

/// Exact membership of the exchange-covariant set:
/// `w_− ≤ 1−γ` and `r ∈ [h_−(w₀⁻), h_+(w_+)]`.
pub fn centro3_membership(pt: &RegionPoint, params: &Centro3Params) -> bool {
    centro3_margin(pt, params) >= 0.0
}

/// Signed distance-like margin to the region boundary (positive inside);
/// the minimum of the three defining constraints.
pub fn centro3_margin(pt: &RegionPoint, params: &Centro3Params) -> f64 {
    let rf = match region_functions(pt.p, pt.q, params) {
        Ok(rf) => rf,
        Err(_) => return f64::NEG_INFINITY,
    };
    let hellinger = (1.0 - params.gamma) - rf.w_minus;
    let lower = pt.r - rf.h_minus_at;
    let upper = rf.h_plus_at - pt.r;
    hellinger.min(lower).min(upper)
}

/// Threshold of the covariant noise line with trivial-end weights
/// `(t, 1−2t, t)`: the line stays in the region for
/// `α ≤ 1 − λ²/(1 − t(1−γ) + 2√(2t(1−2t)D))`.
///
/// Handled in closed form for `t ≥ (1−γ)/4` (the regime where the line's
/// lower boundary is the `w₀` branch); smaller `t` falls back to a numeric
/// bisection against the membership test.
pub fn centro3_line_alpha(t: f64, params: &Centro3Params) -> Result<f64> {
    if !(0.0..=0.5).contains(&t) {
        return Err(CohError::OutOfRange { name: "t", value: t });
    }
    if t >= 0.25 * (1.0 - params.gamma) {
        let denom = 1.0 - t * (1.0 - params.gamma)
            + 2.0 * fmath::sqrt(2.0 * t * (1.0 - 2.0 * t) * params.d);
        Ok((1.0 - params.lambda * params.lambda / denom).clamp(0.0, 1.0))
    } else {
        // outside the simplified regime: bisect the exact membership test
        let point = |alpha: f64| -> RegionPoint {
            RegionPoint {
                p: alpha + (1.0 - alpha) * t,
                q: (1.0 - alpha) * t,
                r: (1.0 - alpha) * t,
            }
        };
        if centro3_membership(&point(1.0), params) {
            return Ok(1.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if centro3_membership(&point(mid), params) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// One mesh node of the sampled region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshPoint {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub member: bool,
}

/// Uniform grid over `∆ × [0, ½]` with the exact membership test at every
/// node, for CSV / SVG emission.
pub fn centro3_region_mesh(params: &Centro3Params, resolution: usize) -> Result<Vec<MeshPoint>> {
    if resolution < 2 {
        return Err(CohError::OutOfRange {
            name: "resolution",
            value: resolution as f64,
        });
    }
    let steps = resolution - 1;
    let mut out = Vec::new();
    for ip in 0..resolution {
        let p = ip as f64 / steps as f64;
        for iq in 0..resolution {
            let q = iq as f64 / steps as f64;
            if p + q > 1.0 + 1e-12 {
                continue;
            }
            for ir in 0..resolution {
                let r = 0.5 * ir as f64 / steps as f64;
                let pt = RegionPoint { p, q, r };
                out.push(MeshPoint {
                    p,
                    q,
                    r,
                    member: centro3_membership(&pt, params),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validated() {
        assert!(Centro3Params::new(0.9, 0.0).is_err()); // D < 0
        assert!(Centro3Params::new(0.7, 0.5).is_ok());
        let sb = Centro3Params::spin_boson_n2(0.7).unwrap();
        assert!((sb.gamma - 0.7f64.powi(4)).abs() < 1e-15);
        // D = (1 - λ²)²/2 for the spin-boson case
        let expect = 0.5 * (1.0 - 0.49) * (1.0 - 0.49);
        assert!((sb.d - expect).abs() < 1e-15);
    }

    #[test]
    fn w_functions_basics() {
        let params = Centro3Params::new(0.5, 0.4).unwrap();
        let rf = region_functions(0.3, 0.3, &params).unwrap();
        assert!(rf.w_minus.abs() < 1e-15); // p = q
        assert!((rf.w_plus - 1.2).abs() < 1e-12);
        assert!((rf.w_zero - (0.4 - 1.0 + 1.2)).abs() < 1e-12);
    }

    #[test]
    fn h_branches_join_continuously() {
        for (lam, gam) in [(0.5, 0.4), (0.7, 0.2401), (0.3, 0.9)] {
            let params = Centro3Params::new(lam, gam).unwrap();
            let at = 2.0 * params.d;
            let left = params.h_minus(at - 1e-12);
            let right = params.h_minus(at + 1e-12);
            assert!((left - right).abs() < 1e-10);

            let at = 2.0 * lam * lam;
            let left = params.h_plus(at - 1e-12);
            let right = params.h_plus(at + 1e-12);
            assert!((left - right).abs() < 1e-10);
            assert!((params.h_plus(at) - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn h_bounds_sandwich_the_midline() {
        // h_-(w) <= w/(2(1+γ)) <= h_+(w) on the full domain
        let params = Centro3Params::new(0.6, 0.3).unwrap();
        let top = 1.0 + params.gamma;
        for i in 0..=100 {
            let w = top * i as f64 / 100.0;
            let mid = 0.5 * w / top;
            assert!(params.h_minus(w) <= mid + 1e-12);
            assert!(params.h_plus(w) >= mid - 1e-12);
        }
    }

    #[test]
    fn membership_trivial_and_extremal_points() {
        let params = Centro3Params::new(0.6, 0.3).unwrap();
        // trivial line point (t, t, t): always a member
        let pt = RegionPoint::new(0.25, 0.25, 0.25).unwrap();
        assert!(centro3_membership(&pt, &params));
        // basis observable (1, 0, 0): excluded whenever λ > 0
        let pt = RegionPoint::new(1.0, 0.0, 0.0).unwrap();
        assert!(!centro3_membership(&pt, &params));
    }

    #[test]
    fn line_alpha_centroid_formula() {
        let params = Centro3Params::new(0.55, 0.35).unwrap();
        let got = centro3_line_alpha(0.25, &params).unwrap();
        let expect = 1.0
            - 4.0 * params.lambda * params.lambda
                / (3.0 + params.gamma + 4.0 * fmath::sqrt(params.d));
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn line_alpha_uniform_matches_g3() {
        // t = 1/3, γ = λ: the threshold is g_3(λ)
        for lam in [0.2, 0.5, 0.8] {
            let params = Centro3Params::new(lam, lam).unwrap();
            let got = centro3_line_alpha(1.0 / 3.0, &params).unwrap();
            let expect = crate::uniform::g_d(lam, 3).unwrap();
            assert!((got - expect).abs() < 1e-12, "lam={lam}: {got} vs {expect}");
        }
    }

    #[test]
    fn line_alpha_spin_boson_matches_alpha2() {
        for lam in [0.3, 0.7, 0.9] {
            let params = Centro3Params::spin_boson_n2(lam).unwrap();
            let got = centro3_line_alpha(0.25, &params).unwrap();
            let expect = crate::spinboson::alpha2_closed(lam);
            assert!((got - expect).abs() < 1e-12, "lam={lam}");
        }
    }

    #[test]
    fn n2_line_membership_flips_at_alpha2() {
        let lam = 0.7;
        let params = Centro3Params::spin_boson_n2(lam).unwrap();
        let a2 = crate::spinboson::alpha2_closed(lam); // 0.58143
        let line = |alpha: f64| RegionPoint {
            p: alpha + (1.0 - alpha) * 0.25,
            q: (1.0 - alpha) * 0.25,
            r: (1.0 - alpha) * 0.25,
        };
        assert!(centro3_membership(&line(0.58), &params));
        assert!(!centro3_membership(&line(0.60), &params));
        assert!(centro3_membership(&line(a2 - 1e-4), &params));
        assert!(!centro3_membership(&line(a2 + 1e-4), &params));
    }

    #[test]
    fn mesh_contains_expected_nodes() {
        let params = Centro3Params::spin_boson_n2(0.7).unwrap();
        let mesh = centro3_region_mesh(&params, 5).unwrap();
        let find = |p: f64, q: f64, r: f64| {
            mesh.iter()
                .find(|m| {
                    (m.p - p).abs() < 1e-9 && (m.q - q).abs() < 1e-9 && (m.r - r).abs() < 1e-9
                })
                .copied()
                .unwrap()
        };
        assert!(find(0.25, 0.25, 0.25).member);
        assert!(!find(1.0, 0.0, 0.0).member);
        assert!(centro3_region_mesh(&params, 1).is_err());
    }
}
