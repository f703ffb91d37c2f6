//! Scans the Gaussian kernel bandwidth and picks ε from the linear region
//! of the log-log weight-sum curve.

use dmc::prelude::*;

fn main() -> Result<()> {
    let (x, _) = make_dense_sparse(&SynthSpec::paper(7))?;
    let dists = pairwise_sq_dists(&signed_log_normalize(&x));
    let mut scan = epsilon_scan(&dists, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE)?;
    let eps = select_epsilon(&mut scan)?;

    let n = x.rows() as f64;
    println!("{:>12} {:>12} {:>8}", "epsilon", "L/n^2", "slope");
    for (i, (e, l)) in scan.grid.iter().zip(&scan.weight_sums).enumerate().step_by(5) {
        let slope = scan.slope_at(i).map_or("-".into(), |s| format!("{s:.3}"));
        println!("{e:>12.4e} {:>12.6} {slope:>8}", l / (n * n));
    }
    println!("peak slope {:.3}, selected epsilon {eps:.4}", scan.peak_slope());
    Ok(())
}
