use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dmc::baselines::{kernel_pca_embed, pca_embed};
use dmc::clustering::{agglomerative, cut_dendrogram, kmeans, spectral_threshold, Linkage, DEFAULT_RESTARTS};
use dmc::diffusion::{
    diffusion_embed, epsilon_scan, gaussian_affinity, select_epsilon, Dim, EpsilonScan, DEFAULT_DECADES,
    DEFAULT_POINTS_PER_DECADE,
};
use dmc::io::{encode_csv, load_matrix, save_matrix};
use dmc::matrix::{euclidean_from_sq, pairwise_sq_dists, DataMatrix, SymmetricMatrix};
use dmc::pipeline::{run_pipeline, Epsilon, HierarchyInput, RunConfig};
use dmc::preprocess::{correlation_matrix, signed_log_normalize};
use dmc::synth::{make_dense_sparse, SynthSpec};
use dmc::{Error, Result};

#[derive(Parser)]
#[command(name = "dmc", version, about = "Diffusion maps and spectral clustering for small-n, large-p data")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dense/sparse two-cluster dataset.
    Synth(SynthArgs),
    /// Scan the kernel bandwidth and report the selected epsilon.
    Scan(ScanArgs),
    /// Diffusion map coordinates.
    Embed(EmbedArgs),
    /// Partition the samples with one method.
    Cluster(ClusterArgs),
    /// PCA or kernel PCA coordinates.
    Baseline(BaselineArgs),
    /// Absolute correlation matrix between samples.
    Corr(CorrArgs),
    /// The full pipeline with all artifacts and figures.
    Run(RunArgs),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// CSV input has a header line.
    #[arg(long)]
    header: bool,
    /// Skip the signed-log normalization.
    #[arg(long)]
    no_normalize: bool,
}

impl InputArgs {
    fn load(&self) -> Result<DataMatrix> {
        if !self.input.is_file() {
            return Err(Error::InvalidInput(format!("input file not found: {}", self.input.display())));
        }
        let x = load_matrix(&self.input, self.header)?;
        Ok(if self.no_normalize { x } else { signed_log_normalize(&x) })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Paper,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, default_value_t = 12)]
    n_dense: usize,
    #[arg(long, default_value_t = 11)]
    n_sparse: usize,
    #[arg(long, default_value_t = 5000)]
    p: usize,
    #[arg(long, default_value_t = 1.0)]
    dense_spread: f64,
    #[arg(long, default_value_t = 2.0)]
    sparse_spread: f64,
    #[arg(long, default_value_t = 2.5)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `.bin` writes the binary format, anything else CSV.
    #[arg(long)]
    out: PathBuf,
    /// Also write the planted labels as JSON.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct EpsilonArg {
    /// Kernel bandwidth; selected from the scan when omitted.
    #[arg(long)]
    epsilon: Option<f64>,
}

impl EpsilonArg {
    fn resolve(&self, sq: &SymmetricMatrix) -> Result<f64> {
        match self.epsilon {
            Some(e) if !(e.is_finite() && e > 0.0) => {
                Err(Error::InvalidInput(format!("epsilon must be a positive number, got {e}")))
            }
            Some(e) => Ok(e),
            None => select_epsilon(&mut scan(sq)?),
        }
    }
}

fn scan(sq: &SymmetricMatrix) -> Result<EpsilonScan> {
    epsilon_scan(sq, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE)
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Write the curve as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    epsilon: EpsilonArg,
    /// Embedding dimension; chosen from the spectrum when omitted.
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Spectral,
    Kmeans,
    Hierarchical,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "spectral")]
    method: Method,
    #[command(flatten)]
    epsilon: EpsilonArg,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value = "average")]
    linkage: Linkage,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Pca,
    Kpca,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "pca")]
    method: BaselineKind,
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[command(flatten)]
    epsilon: EpsilonArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    epsilon: EpsilonArg,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value = "average")]
    linkage: Linkage,
    #[arg(long, value_enum, default_value = "raw")]
    hierarchy_input: HierarchyInput,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn emit(out: Option<&Path>, m: &DataMatrix) -> Result<()> {
    match out {
        Some(path) => save_matrix(path, m),
        None => {
            let text = encode_csv(m, None)?;
            print!("{}", String::from_utf8_lossy(&text));
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => {
            let spec = match a.preset {
                Some(Preset::Paper) => SynthSpec::paper(a.seed),
                None => SynthSpec {
                    n_dense: a.n_dense,
                    n_sparse: a.n_sparse,
                    p: a.p,
                    dense_spread: a.dense_spread,
                    sparse_spread: a.sparse_spread,
                    separation: a.separation,
                    seed: a.seed,
                },
            };
            let (x, truth) = make_dense_sparse(&spec)?;
            save_matrix(&a.out, &x)?;
            if let Some(path) = a.labels {
                let body = json!({ "spec": spec, "labels": truth.labels() });
                std::fs::write(&path, format!("{body:#}\n")).map_err(|e| Error::Io { path, source: e })?;
            }
            Ok(())
        }
        Command::Scan(a) => {
            let sq = pairwise_sq_dists(&a.input.load()?);
            let mut s = scan(&sq)?;
            let eps = select_epsilon(&mut s);
            if let Some(path) = &a.out {
                let rows: Vec<Vec<f64>> = s.grid.iter().zip(&s.weight_sums).map(|(e, l)| vec![*e, *l]).collect();
                save_matrix(path, &DataMatrix::from_rows(&rows)?)?;
            }
            let eps = eps?;
            println!("{}", json!({ "epsilon": eps, "peak_slope": s.peak_slope() }));
            Ok(())
        }
        Command::Embed(a) => {
            let sq = pairwise_sq_dists(&a.input.load()?);
            let eps = a.epsilon.resolve(&sq)?;
            let dim = a.dims.map_or(Dim::Auto, Dim::Fixed);
            let e = diffusion_embed(&gaussian_affinity(&sq, eps)?, dim)?;
            log::info!("epsilon {eps}, dimension {}", e.d);
            emit(a.out.as_deref(), &e.coords)
        }
        Command::Cluster(a) => {
            let x = a.input.load()?;
            let partition = match a.method {
                Method::Spectral => {
                    let sq = pairwise_sq_dists(&x);
                    let eps = a.epsilon.resolve(&sq)?;
                    spectral_threshold(&diffusion_embed(&gaussian_affinity(&sq, eps)?, Dim::Auto)?).partition
                }
                Method::Kmeans => kmeans(&x, a.k, a.seed, DEFAULT_RESTARTS)?.partition,
                Method::Hierarchical => {
                    let tree = agglomerative(&euclidean_from_sq(&pairwise_sq_dists(&x)), a.linkage)?;
                    cut_dendrogram(&tree, a.k)?
                }
            };
            println!("{}", json!({ "k": partition.k(), "labels": partition.labels() }));
            Ok(())
        }
        Command::Baseline(a) => {
            let x = a.input.load()?;
            let e = match a.method {
                BaselineKind::Pca => pca_embed(&x, a.dims)?,
                BaselineKind::Kpca => {
                    let eps = a.epsilon.resolve(&pairwise_sq_dists(&x))?;
                    kernel_pca_embed(&x, eps, a.dims)?
                }
            };
            emit(a.out.as_deref(), &e.coords)
        }
        Command::Corr(a) => {
            let c = correlation_matrix(&a.input.load()?)?;
            let n = c.order();
            emit(a.out.as_deref(), &DataMatrix::new(n, n, c.as_symmetric().as_slice().to_vec())?)
        }
        Command::Run(a) => {
            let mut cfg = RunConfig::new(a.input.input, a.out);
            cfg.header = a.input.header;
            cfg.normalize = !a.input.no_normalize;
            cfg.epsilon = a.epsilon.epsilon.map_or(Epsilon::Auto, Epsilon::Fixed);
            cfg.dims = a.dims.map_or(Dim::Auto, Dim::Fixed);
            cfg.k = a.k;
            cfg.linkage = a.linkage;
            cfg.hierarchy_input = a.hierarchy_input;
            cfg.seed = a.seed;
            cfg.restarts = a.restarts;
            let b = run_pipeline(&cfg)?;
            println!(
                "n={} p={} epsilon={:e} d={} all_identical={}",
                b.n,
                b.p,
                b.epsilon,
                b.embedding.d,
                b.all_identical()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let pool = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
