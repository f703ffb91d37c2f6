//! Writing and reading matrices as CSV and as the `DMC1` binary format.

use dmc::io::{load_matrix, save_matrix};
use dmc::prelude::*;

fn main() -> Result<()> {
    let spec = SynthSpec { p: 8, ..SynthSpec::paper(1) };
    let (x, _) = make_dense_sparse(&spec)?;
    let dir = std::env::temp_dir();
    for name in ["dmc_example.bin", "dmc_example.csv"] {
        let path = dir.join(name);
        save_matrix(&path, &x)?;
        let back = load_matrix(&path, false)?;
        let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!("{name}: {bytes} bytes, reload identical: {}", back == x);
    }
    Ok(())
}
