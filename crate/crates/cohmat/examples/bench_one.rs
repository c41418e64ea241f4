use cohmat::gii::SolverOptions;
use cohmat::spinboson::alpha_n_curve;
use std::time::Instant;

fn main() {
    let opts = SolverOptions::default();
    for (n, lam) in [(2usize, 0.5), (5, 0.5), (10, 0.3), (10, 0.5), (10, 0.7)] {
        let t0 = Instant::now();
        let curve = alpha_n_curve(n, &[lam], &opts, true).unwrap();
        let s = &curve[0];
        println!(
            "N={n} lam={lam}: alpha={:.5} flagged={} t={:.1}s",
            s.alpha_n.unwrap(),
            s.flagged,
            t0.elapsed().as_secs_f64()
        );
    }
}
