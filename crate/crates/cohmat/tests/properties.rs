//! Randomized invariants. Moderate case counts here for day-to-day runs;
//! the thousand-trial versions demanded by the acceptance gate live in
//! `tests/acceptance.rs`.

mod common;

use cohmat::eigen::{eig_hermitian, gram_vectors, is_psd, project_psd};
use cohmat::matrix::{hadamard, C64, ComplexMatrix};
use cohmat::povm::{apply_gio, coherence_report, structure_matrix, white_noise_family};
use cohmat::symmetry::{covariant_average, SymmetryGroup};
use cohmat::uniform::{g_d, g_d_inverse, GdBranch};
use common::*;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schur_product_of_psd_is_psd(seed in 0u64..1u64 << 48, d in 2usize..=8) {
        let mut rng = rng(seed);
        let a = random_psd(&mut rng, d);
        let b = random_psd(&mut rng, d);
        let h = hadamard(&a, &b).unwrap();
        let min = eig_hermitian(&h).unwrap().min_eigenvalue();
        prop_assert!(min >= -1e-9 * a.frobenius_norm() * b.frobenius_norm());
    }

    #[test]
    fn eigensystem_contract(seed in 0u64..1u64 << 48, d in 2usize..=10) {
        let mut rng = rng(seed);
        let h = random_hermitian(&mut rng, d);
        let e = eig_hermitian(&h).unwrap();
        // ascending eigenvalues
        for w in e.values.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-14);
        }
        let rec = e.reconstruct(|l| l);
        prop_assert!(rec.max_abs_diff(&h) <= 1e-10 * h.frobenius_norm().max(1.0));
        let vtv = e.vectors.conj_transpose().matmul(&e.vectors).unwrap();
        prop_assert!(vtv.max_abs_diff(&ComplexMatrix::identity(d)) <= 1e-10);
    }

    #[test]
    fn project_psd_idempotent_contraction(seed in 0u64..1u64 << 48, d in 2usize..=8) {
        let mut rng = rng(seed);
        let h = random_hermitian(&mut rng, d);
        let r = project_psd(&h).unwrap();
        prop_assert!(is_psd(&r, 1e-9).unwrap());
        let rr = project_psd(&r).unwrap();
        prop_assert!(rr.max_abs_diff(&r) <= 1e-10 * r.frobenius_norm().max(1.0));
        // projection never moves farther than to the PSD cone's nearest point
        for _ in 0..5 {
            let p = random_psd(&mut rng, d);
            let dist_hr = h.sub(&r).unwrap().frobenius_norm();
            let dist_hp = h.sub(&p).unwrap().frobenius_norm();
            prop_assert!(dist_hr <= dist_hp + 1e-10);
        }
    }

    #[test]
    fn gram_round_trip(seed in 0u64..1u64 << 48, d in 2usize..=7) {
        let mut rng = rng(seed);
        let c = random_coherence(&mut rng, d);
        let vs = gram_vectors(&c).unwrap();
        for n in 0..d {
            for m in 0..d {
                let ip: C64 = vs[n].iter().zip(&vs[m]).map(|(a, b)| a.conj() * b).sum();
                let diff = ip - c.get(n, m);
                prop_assert!((diff.re * diff.re + diff.im * diff.im).sqrt() < 1e-9);
            }
        }
    }

    #[test]
    fn coherence_bounded_by_hellinger(seed in 0u64..1u64 << 48, d in 2usize..=6) {
        // 0 <= coh_nm <= 1 - d²_nm <= 1 entry-wise
        let mut rng = rng(seed);
        let n_out = rng.gen_range(2..=d + 2);
        let m = random_povm(&mut rng, d, n_out);
        let rep = coherence_report(&m).unwrap();
        for n in 0..d {
            for k in 0..d {
                if n == k {
                    continue;
                }
                let coh = rep.coh_at(n, k);
                let d2 = rep.hellinger_sq_at(n, k);
                prop_assert!(coh >= -1e-12);
                prop_assert!(coh <= 1.0 - d2 + 1e-9);
                prop_assert!(d2 <= 1.0 + 1e-12 && d2 >= -1e-9);
            }
        }
    }

    #[test]
    fn hellinger_triangle_inequality(seed in 0u64..1u64 << 48, d in 3usize..=6) {
        let mut rng = rng(seed);
        let n_out = rng.gen_range(2..=d + 1);
        let m = random_povm(&mut rng, d, n_out);
        let rep = coherence_report(&m).unwrap();
        let dist = |n: usize, k: usize| rep.hellinger_sq_at(n, k).max(0.0).sqrt();
        for n in 0..d {
            for k in 0..d {
                for l in 0..d {
                    prop_assert!(dist(n, k) <= dist(n, l) + dist(l, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn gio_coherence_monotonicity(seed in 0u64..1u64 << 48, d in 2usize..=5) {
        // coh(C*M) = |c_nm| · coh(M) entry-wise
        let mut rng = rng(seed);
        let c = random_coherence(&mut rng, d);
        let m = random_povm(&mut rng, d, d);
        let masked = apply_gio(&c, &m).unwrap();
        let before = coherence_report(&m).unwrap();
        let after = coherence_report(&masked).unwrap();
        for n in 0..d {
            for k in 0..d {
                if n != k {
                    let z = c.get(n, k);
                    let abs_c = (z.re * z.re + z.im * z.im).sqrt();
                    prop_assert!(
                        (after.coh_at(n, k) - abs_c * before.coh_at(n, k)).abs() < 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn structure_matrix_matches_gd(alpha in 0.0f64..0.999, d in 2usize..=6) {
        let p = white_noise_family(d, alpha).unwrap();
        let s = structure_matrix(&p).unwrap();
        let g = g_d(alpha, d).unwrap();
        for n in 0..d {
            for m in 0..d {
                let expect = if n == m { 1.0 } else { 1.0 / g };
                prop_assert!((s.get(n, m) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gd_branch_inverses(alpha in 0.0f64..=1.0, d in 2usize..=6) {
        let u = g_d(alpha, d).unwrap();
        let back = g_d_inverse(u, d, GdBranch::Positive).unwrap();
        prop_assert!((back - alpha).abs() < 1e-9);
        let neg = -alpha / (d as f64 - 1.0);
        let u = g_d(neg, d).unwrap();
        let back = g_d_inverse(u, d, GdBranch::Negative).unwrap();
        prop_assert!((back - neg).abs() < 1e-8);
    }

    #[test]
    fn covariant_average_is_idempotent(seed in 0u64..1u64 << 48, d in 2usize..=5) {
        let mut rng = rng(seed);
        let g = SymmetryGroup::from_permutations(
            d,
            vec![(0..d).collect(), (0..d).rev().collect()],
        )
        .unwrap();
        let n_out = 3;
        let phi = vec![(0..n_out).collect::<Vec<_>>(), (0..n_out).rev().collect()];
        let blocks: Vec<ComplexMatrix> =
            (0..n_out).map(|_| random_hermitian(&mut rng, d)).collect();
        let once = covariant_average(&blocks, &g, &phi).unwrap();
        let twice = covariant_average(&once, &g, &phi).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!(a.max_abs_diff(b) < 1e-11);
        }
    }
}
