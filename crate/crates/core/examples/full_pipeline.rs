//! The whole pipeline on a synthetic dataset: artifacts, figures and the
//! JSON report.

use dmc::io::save_matrix;
use dmc::pipeline::{report, run_pipeline, RunConfig};
use dmc::prelude::*;

fn main() -> Result<()> {
    let out = std::env::temp_dir().join("dmc_pipeline_example");
    let input = std::env::temp_dir().join("dmc_pipeline_input.bin");
    let (x, _) = make_dense_sparse(&SynthSpec::paper(11))?;
    save_matrix(&input, &x)?;

    let bundle = run_pipeline(&RunConfig::new(&input, &out))?;
    let r = report(&bundle);
    println!("selected epsilon {}", r["epsilon"]["selected"]);
    println!("embedding dimension {}", r["d"]);
    println!("agreement {}", r["agreement"]);
    println!("artifacts in {}", out.display());
    Ok(())
}
