use cohmat::gii::{solve_gii, SolverOptions};
use cohmat::spinboson::{alpha2_closed, reduced_alpha_line, sb_reduced_matrix};
use cohmat::symmetry::CovariantAction;
use std::time::Instant;

fn main() {
    let lam = 0.7;
    let a2 = alpha2_closed(lam);
    println!("true boundary: {a2}");
    let c = sb_reduced_matrix(2, lam);
    let mut opts = SolverOptions::default();
    opts.covariance = Some(CovariantAction::exchange(3));
    for da in [-0.02, -0.005, -0.001, -0.0002, 0.0002, 0.001, 0.005] {
        let t0 = Instant::now();
        let p = reduced_alpha_line(2, a2 + da);
        let v = solve_gii(&c, &p, &opts).unwrap();
        println!(
            "da={da:+.4}: {:?} res={:.2e} iters={} t={:.2}s",
            v.status,
            v.residual,
            v.iterations,
            t0.elapsed().as_secs_f64()
        );
    }
    // N=10 single probes
    let lam = 0.5;
    let c = sb_reduced_matrix(10, lam);
    let mut opts = SolverOptions::default();
    opts.covariance = Some(CovariantAction::exchange(11));
    for a in [0.2, 0.4, 0.435, 0.45, 0.6] {
        let t0 = Instant::now();
        let p = reduced_alpha_line(10, a);
        let v = solve_gii(&c, &p, &opts).unwrap();
        println!(
            "N=10 a={a}: {:?} res={:.2e} iters={} t={:.2}s",
            v.status,
            v.residual,
            v.iterations,
            t0.elapsed().as_secs_f64()
        );
    }
}
