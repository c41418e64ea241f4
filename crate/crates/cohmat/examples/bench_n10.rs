use cohmat::gii::SolverOptions;
use cohmat::spinboson::{alpha_n_curve, bounds_ul};
use std::time::Instant;

fn main() {
    let opts = SolverOptions::default();
    for n in [2usize, 5, 10] {
        let t0 = Instant::now();
        let lams: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let curve = alpha_n_curve(n, &lams, &opts, true).unwrap();
        for s in &curve {
            let (u, l) = bounds_ul(n, s.lambda).unwrap();
            println!(
                "N={n} lam={:.1} alpha={:.5} flagged={} L={l:.5} U={u:.5} sandwich={}",
                s.lambda,
                s.alpha_n.unwrap(),
                s.flagged,
                s.theta3 <= l + 1e-6 && l <= s.alpha_n.unwrap() + 1e-6 && s.alpha_n.unwrap() <= u + 1e-6
            );
        }
        println!("N={n} total: {:.1}s", t0.elapsed().as_secs_f64());
    }
}
