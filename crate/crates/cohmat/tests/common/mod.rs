//! Shared randomized generators for the integration suites. Everything is
//! seeded, so failures reproduce.

use cohmat::matrix::{C64, CoherenceMatrix, ComplexMatrix};
use cohmat::povm::{IncoherentObservable, Observable};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex_matrix(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random PSD matrix `A†A`, not normalized.
pub fn random_psd(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let a = random_complex_matrix(rng, d);
    a.conj_transpose().matmul(&a).unwrap()
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let mut a = random_complex_matrix(rng, d);
    a.hermitize();
    a
}

/// Random coherence matrix: normalized Gram matrix of random vectors.
pub fn random_coherence(rng: &mut ChaCha8Rng, d: usize) -> CoherenceMatrix {
    let rank = rng.gen_range(1..=d);
    let vecs: Vec<Vec<C64>> = (0..d)
        .map(|_| {
            let mut v: Vec<C64> = (0..rank)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= norm;
            }
            v
        })
        .collect();
    let m = ComplexMatrix::from_fn(d, |n, k| {
        vecs[n].iter().zip(&vecs[k]).map(|(a, b)| a.conj() * b).sum()
    });
    CoherenceMatrix::new(m).expect("Gram matrix of unit vectors")
}

/// Random POVM with `n_out` outcomes: normalized random PSD pieces.
pub fn random_povm(rng: &mut ChaCha8Rng, d: usize, n_out: usize) -> Observable {
    loop {
        let pieces: Vec<ComplexMatrix> = (0..n_out).map(|_| random_psd(rng, d)).collect();
        let mut total = ComplexMatrix::zeros(d);
        for p in &pieces {
            total = total.add(p).unwrap();
        }
        // S^{-1/2} via the eigensystem
        let eig = cohmat::eigen::eig_hermitian(&total).unwrap();
        if eig.min_eigenvalue() < 1e-6 {
            continue;
        }
        let inv_sqrt = eig.reconstruct(|l| 1.0 / l.sqrt());
        let effects: Vec<ComplexMatrix> = pieces
            .iter()
            .map(|p| {
                let mut e = inv_sqrt.matmul(p).unwrap().matmul(&inv_sqrt).unwrap();
                e.hermitize();
                e
            })
            .collect();
        if let Ok(obs) = Observable::new(d, effects) {
            return obs;
        }
    }
}

/// Random row-stochastic table.
pub fn random_incoherent(rng: &mut ChaCha8Rng, d: usize, n_out: usize) -> IncoherentObservable {
    let mut table = vec![0.0; d * n_out];
    for n in 0..d {
        let mut row: Vec<f64> = (0..n_out).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= s;
        }
        table[n * n_out..(n + 1) * n_out].copy_from_slice(&row);
    }
    IncoherentObservable::new(d, n_out, table).unwrap()
}
