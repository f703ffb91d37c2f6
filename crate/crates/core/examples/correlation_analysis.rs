//! Absolute correlations within and between clusters, and the salient
//! features of one sample.

use dmc::prelude::*;

fn main() -> Result<()> {
    let (x, truth) = make_dense_sparse(&SynthSpec::paper(4))?;
    let corr = correlation_matrix(&x)?;
    let dense = truth.members(0);
    let sparse = truth.members(1);
    println!("mean |corr| within dense:  {:.3}", corr.mean_within(&dense).unwrap_or(f64::NAN));
    println!("mean |corr| within sparse: {:.3}", corr.mean_within(&sparse).unwrap_or(f64::NAN));
    println!(
        "mean |corr| across:        {:.3}",
        corr.mean_between(&dense, &sparse).unwrap_or(f64::NAN)
    );

    let mask = salient_mask(x.row(0), 3.0)?;
    println!(
        "sample 1: {} of {} features lie more than 3 standard deviations from the mean",
        mask.count(),
        x.cols()
    );
    Ok(())
}
