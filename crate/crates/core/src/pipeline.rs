//! The end-to-end analysis: load, normalize, pick ε, embed, cluster three
//! ways, compare against linear baselines, and write artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::baselines::{kernel_pca_embed, pca_embed, scale_columns, LinearEmbedding};
use crate::clustering::{
    agglomerative, cut_dendrogram, kmeans, partitions_equal, spectral_threshold, Dendrogram, KMeansFit,
    Linkage, Partition, SpectralSplit, DEFAULT_RESTARTS,
};
use crate::diffusion::{
    diffusion_embed, epsilon_scan, gaussian_affinity, select_epsilon, DiffusionEmbedding, Dim, EpsilonScan,
    DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE,
};
use crate::error::{Error, Result};
use crate::io::{encode_csv, load_matrix, write_file};
use crate::matrix::{euclidean_from_sq, pairwise_sq_dists, DataMatrix, SymmetricMatrix};
use crate::plot::{emit_svg, Figure, Marker, Series};
use crate::preprocess::{correlation_matrix, signed_log_normalize, CorrelationMatrix};

/// Kernel bandwidth: chosen from the scan or given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Epsilon {
    Auto,
    Fixed(f64),
}

/// What the agglomerative clustering measures distance on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HierarchyInput {
    /// Euclidean distance between (normalized) rows.
    #[default]
    Raw,
    /// `1 − |corr|` between rows.
    Correlation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Skip the first line of CSV input.
    pub header: bool,
    /// Apply the signed logarithm before anything else.
    pub normalize: bool,
    pub epsilon: Epsilon,
    pub dims: Dim,
    pub k: usize,
    pub linkage: Linkage,
    pub hierarchy_input: HierarchyInput,
    pub seed: u64,
    pub restarts: usize,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            header: false,
            normalize: true,
            epsilon: Epsilon::Auto,
            dims: Dim::Auto,
            k: 2,
            linkage: Linkage::Average,
            hierarchy_input: HierarchyInput::Raw,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            out_dir: out_dir.into(),
        }
    }

    /// Checks everything that can be checked without reading the data.
    pub fn validate(&self) -> Result<()> {
        if !self.input.is_file() {
            return Err(Error::invalid(format!(
                "input file not found: {}",
                self.input.display()
            )));
        }
        if let Epsilon::Fixed(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::invalid(format!("epsilon must be a positive number, got {e}")));
            }
        }
        if self.dims == Dim::Fixed(0) {
            return Err(Error::invalid("dims must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if self.out_dir.exists() && !self.out_dir.is_dir() {
            return Err(Error::invalid(format!(
                "output path is not a directory: {}",
                self.out_dir.display()
            )));
        }
        Ok(())
    }
}

/// Everything one run produces, in memory.
#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub config: RunConfig,
    pub n: usize,
    pub p: usize,
    pub scan: EpsilonScan,
    pub epsilon: f64,
    pub embedding: DiffusionEmbedding,
    /// First two diffusion coordinates for figures, even when `d = 1`.
    pub plot_coords: Vec<(f64, f64)>,
    pub spectral: SpectralSplit,
    pub kmeans: KMeansFit,
    pub dendrogram: Dendrogram,
    pub hierarchical: Partition,
    pub pca: LinearEmbedding,
    pub kernel_pca: LinearEmbedding,
    pub corr_all: CorrelationMatrix,
    /// Spectral cluster members with their correlation submatrix.
    pub corr_clusters: Vec<(Vec<usize>, CorrelationMatrix)>,
    /// Spectral cluster drawn with crosses: the one with the smaller mean
    /// squared distance between members.
    pub dense_cluster: usize,
    pub timings: Vec<(&'static str, f64)>,
}

impl ResultBundle {
    /// Pairwise agreement of the spectral, k-means and hierarchical
    /// partitions.
    pub fn agreement(&self) -> [bool; 3] {
        let s = &self.spectral.partition;
        [
            partitions_equal(s, &self.kmeans.partition),
            partitions_equal(s, &self.hierarchical),
            partitions_equal(&self.kmeans.partition, &self.hierarchical),
        ]
    }

    pub fn all_identical(&self) -> bool {
        self.agreement().iter().all(|&a| a)
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

struct Clock {
    start: Instant,
    laps: Vec<(&'static str, f64)>,
}

impl Clock {
    fn new() -> Self {
        Clock { start: Instant::now(), laps: Vec::new() }
    }

    fn lap(&mut self, name: &'static str) {
        let now = Instant::now();
        self.laps.push((name, (now - self.start).as_secs_f64()));
        self.start = now;
    }
}

/// Loads the input, analyzes it and writes every artifact into the output
/// directory. On failure nothing written by this call is left behind.
pub fn run_pipeline(cfg: &RunConfig) -> Result<ResultBundle> {
    stage("validate", cfg.validate())?;
    let x = stage("load", load_matrix(&cfg.input, cfg.header))?;
    let bundle = analyze(&x, cfg)?;
    stage("write", write_bundle(&bundle, &cfg.out_dir))?;
    Ok(bundle)
}

/// Runs the analysis on an in-memory matrix without touching the disk.
pub fn analyze(x: &DataMatrix, cfg: &RunConfig) -> Result<ResultBundle> {
    let (n, p) = (x.rows(), x.cols());
    if cfg.k > n {
        return Err(Error::invalid(format!("k = {} exceeds the {n} samples", cfg.k)));
    }
    let mut clock = Clock::new();
    let data = if cfg.normalize { signed_log_normalize(x) } else { x.clone() };
    clock.lap("normalize");

    let sq = pairwise_sq_dists(&data);
    clock.lap("distances");

    let mut scan = stage(
        "epsilon",
        epsilon_scan(&sq, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE),
    )?;
    let epsilon = match cfg.epsilon {
        Epsilon::Auto => stage("epsilon", select_epsilon(&mut scan))?,
        Epsilon::Fixed(e) => {
            scan.selected = Some(e);
            e
        }
    };
    clock.lap("epsilon");

    let graph = stage("embed", gaussian_affinity(&sq, epsilon))?;
    let embedding = stage("embed", diffusion_embed(&graph, cfg.dims))?;
    let plot_coords = if embedding.d >= 2 || n < 3 {
        pairs(&embedding.coords)
    } else {
        pairs(&stage("embed", diffusion_embed(&graph, Dim::Fixed(2)))?.coords)
    };
    clock.lap("embed");

    let spectral = spectral_threshold(&embedding);
    clock.lap("spectral");

    let km = stage("kmeans", kmeans(&data, cfg.k, cfg.seed, cfg.restarts))?;
    clock.lap("kmeans");

    let corr_all = stage("correlation", correlation_matrix(&data))?;
    let corr_clusters = (0..spectral.partition.k())
        .map(|c| {
            let members = spectral.partition.members(c);
            corr_all.submatrix(&members).map(|m| (members, m))
        })
        .collect::<Result<Vec<_>>>();
    let corr_clusters = stage("correlation", corr_clusters)?;
    clock.lap("correlation");

    let tree_input = match cfg.hierarchy_input {
        HierarchyInput::Raw => euclidean_from_sq(&sq),
        HierarchyInput::Correlation => stage("hierarchical", corr_all.as_symmetric().map(|c| 1.0 - c))?,
    };
    let dendrogram = stage("hierarchical", agglomerative(&tree_input, cfg.linkage))?;
    let hierarchical = stage("hierarchical", cut_dendrogram(&dendrogram, cfg.k))?;
    clock.lap("hierarchical");

    let pca = stage("baselines", pca_embed(&data, 2.min(n - 1).min(p)))?;
    let kernel_pca = stage("baselines", kernel_pca_embed(&data, epsilon, 2.min(n - 1)))?;
    clock.lap("baselines");

    let dense_cluster = densest(&sq, &spectral.partition);
    Ok(ResultBundle {
        config: cfg.clone(),
        n,
        p,
        scan,
        epsilon,
        embedding,
        plot_coords,
        spectral,
        kmeans: km,
        dendrogram,
        hierarchical,
        pca,
        kernel_pca,
        corr_all,
        corr_clusters,
        dense_cluster,
        timings: clock.laps,
    })
}

fn pairs(m: &DataMatrix) -> Vec<(f64, f64)> {
    m.iter_rows()
        .map(|r| (r[0], r.get(1).copied().unwrap_or(0.0)))
        .collect()
}

fn densest(sq: &SymmetricMatrix, partition: &Partition) -> usize {
    let spread = |c: usize| {
        let m = partition.members(c);
        if m.len() < 2 {
            return 0.0;
        }
        let total: f64 = m.iter().flat_map(|&i| m.iter().map(move |&j| sq.get(i, j))).sum();
        total / (m.len() * (m.len() - 1)) as f64
    };
    let mut best = 0;
    for c in 1..partition.k() {
        if spread(c) < spread(best) {
            best = c;
        }
    }
    best
}

/// Machine-readable summary of a run.
pub fn report(b: &ResultBundle) -> Value {
    let [sk, sh, kh] = b.agreement();
    let part = |p: &Partition| json!({ "k": p.k(), "sizes": p.sizes(), "labels": p.labels() });
    let mut spectral = part(&b.spectral.partition);
    spectral["degenerate"] = json!(b.spectral.degenerate);
    let mut km = part(&b.kmeans.partition);
    km["wcss"] = json!(b.kmeans.wcss);
    km["restart"] = json!(b.kmeans.restart);
    km["iterations"] = json!(b.kmeans.iterations);
    let mut hier = part(&b.hierarchical);
    hier["linkage"] = json!(b.config.linkage);
    hier["input"] = json!(b.config.hierarchy_input);
    hier["heights"] = json!(b.dendrogram.merges.iter().map(|m| m.height).collect::<Vec<_>>());

    let clusters: Vec<Value> = b
        .corr_clusters
        .iter()
        .enumerate()
        .map(|(c, (members, _))| {
            json!({
                "cluster": c,
                "members": members,
                "mean_abs_corr": b.corr_all.mean_within(members),
                "file": format!("corr_cluster{c}.csv"),
            })
        })
        .collect();
    let between = match b.corr_clusters.as_slice() {
        [a, c] => b.corr_all.mean_between(&a.0, &c.0),
        _ => None,
    };
    let all: Vec<usize> = (0..b.n).collect();
    let cfg = &b.config;

    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": {
            "input": cfg.input.display().to_string(),
            "header": cfg.header,
            "normalize": cfg.normalize,
            "epsilon": match cfg.epsilon { Epsilon::Auto => json!("auto"), Epsilon::Fixed(e) => json!(e) },
            "dims": match cfg.dims { Dim::Auto => json!("auto"), Dim::Fixed(d) => json!(d) },
            "k": cfg.k,
            "linkage": cfg.linkage,
            "hierarchy_input": cfg.hierarchy_input,
            "seed": cfg.seed,
            "restarts": cfg.restarts,
        },
        "n": b.n,
        "p": b.p,
        "epsilon": {
            "selected": b.epsilon,
            "grid_points": b.scan.grid.len(),
            "peak_slope": b.scan.peak_slope(),
            "selected_slope": b.scan.grid.iter().position(|&g| g == b.epsilon).and_then(|i| b.scan.slope_at(i)),
        },
        "spectrum": b.embedding.full_spectrum,
        "d": b.embedding.d,
        "partitions": { "spectral": spectral, "kmeans": km, "hierarchical": hier },
        "agreement": {
            "spectral_kmeans": sk,
            "spectral_hierarchical": sh,
            "kmeans_hierarchical": kh,
            "all_identical": sk && sh && kh,
        },
        "baselines": {
            "pca_explained": b.pca.explained,
            "kernel_pca_explained": b.kernel_pca.explained,
        },
        "correlation": {
            "mean_abs_corr": b.corr_all.mean_within(&all),
            "clusters": clusters,
            "between_clusters": between,
        },
        "timings": b.timings.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    })
}

/// Copy of a report with run-dependent fields (timings) removed.
pub fn canonicalize_report(report: &Value) -> Value {
    let mut v = report.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timings");
    }
    v
}

fn matrix_csv(m: &SymmetricMatrix) -> Result<Vec<u8>> {
    encode_csv(&DataMatrix::new(m.order(), m.order(), m.as_slice().to_vec())?, None)
}

fn scan_csv(scan: &EpsilonScan) -> String {
    let mut out = String::from("epsilon,weight_sum,slope\n");
    for (i, (e, l)) in scan.grid.iter().zip(&scan.weight_sums).enumerate() {
        let slope = scan.slope_at(i).map(|s| format!("{s:?}")).unwrap_or_default();
        out.push_str(&format!("{e:?},{l:?},{slope}\n"));
    }
    out
}

/// Writes all artifacts; returns their paths. Files written before a
/// failure are removed again.
pub fn write_bundle(b: &ResultBundle, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let created_dir = !out_dir.exists();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let result = write_all(b, out_dir, &mut written);
    if let Err(e) = result {
        for path in &written {
            let _ = fs::remove_file(path);
        }
        if created_dir {
            let _ = fs::remove_dir(out_dir);
        }
        return Err(e);
    }
    Ok(written)
}

fn write_all(b: &ResultBundle, dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        written.push(path.clone());
        write_file(&path, bytes)
    };

    let header: Vec<String> = (1..=b.embedding.d).map(|k| format!("psi_{k}")).collect();
    put("embedding.csv", &encode_csv(&b.embedding.coords, Some(&header))?)?;

    let labels = json!({
        "n": b.n,
        "spectral": b.spectral.partition.labels(),
        "kmeans": b.kmeans.partition.labels(),
        "hierarchical": b.hierarchical.labels(),
    });
    put("labels.json", pretty(&labels).as_bytes())?;
    put("epsilon_scan.csv", scan_csv(&b.scan).as_bytes())?;
    put("corr_all.csv", &matrix_csv(b.corr_all.as_symmetric())?)?;
    for (c, (_, m)) in b.corr_clusters.iter().enumerate() {
        put(&format!("corr_cluster{c}.csv"), &matrix_csv(m.as_symmetric())?)?;
    }
    put("report.json", pretty(&report(b)).as_bytes())?;

    let mut svg = |name: &str, fig: &Figure<'_>| -> Result<()> {
        let path = dir.join(name);
        written.push(path.clone());
        emit_svg(&path, fig)
    };
    let series = embedding_series(b);
    svg(
        "embedding.svg",
        &Figure::Embedding { series: &series, x_label: "psi_1", y_label: "psi_2" },
    )?;
    svg("epsilon.svg", &Figure::EpsilonScan(&b.scan))?;
    svg("dendrogram.svg", &Figure::Dendrogram(&b.dendrogram))?;
    let mut panels = vec![("all samples".to_string(), b.corr_all.clone(), (0..b.n).collect())];
    for (c, (members, m)) in b.corr_clusters.iter().enumerate() {
        panels.push((format!("cluster {c}"), m.clone(), members.clone()));
    }
    svg("corr.svg", &Figure::Correlation(&panels))?;
    let comparison = comparison_series(b)?;
    svg(
        "comparison.svg",
        &Figure::Comparison { series: &comparison, title: "Diffusion map, PCA and kernel PCA (scaled)" },
    )
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn embedding_series(b: &ResultBundle) -> Vec<Series> {
    let p = &b.spectral.partition;
    (0..p.k())
        .map(|c| {
            let members = p.members(c);
            Series {
                name: format!("cluster {c}"),
                marker: if c == b.dense_cluster { Marker::Cross } else { Marker::Circle },
                points: members.iter().map(|&i| b.plot_coords[i]).collect(),
                labels: members.iter().map(|i| (i + 1).to_string()).collect(),
            }
        })
        .collect()
}

fn comparison_series(b: &ResultBundle) -> Result<Vec<Series>> {
    let scaled = |pts: Vec<(f64, f64)>| -> Result<Vec<(f64, f64)>> {
        let flat = pts.iter().flat_map(|&(x, y)| [x, y]).collect();
        Ok(pairs(&scale_columns(&DataMatrix::new(pts.len(), 2, flat)?)))
    };
    Ok(vec![
        Series {
            name: "diffusion map".into(),
            marker: Marker::Cross,
            points: scaled(b.plot_coords.clone())?,
            labels: vec![],
        },
        Series {
            name: "PCA".into(),
            marker: Marker::Circle,
            points: scaled(pairs(&b.pca.coords))?,
            labels: vec![],
        },
        Series {
            name: "kernel PCA".into(),
            marker: Marker::Square,
            points: scaled(pairs(&b.kernel_pca.coords))?,
            labels: vec![],
        },
    ])
}
