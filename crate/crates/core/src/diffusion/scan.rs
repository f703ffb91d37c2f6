use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// Grid span in decades around the median nonzero squared distance.
pub const DEFAULT_DECADES: (f64, f64) = (-3.5, 3.5);
pub const DEFAULT_POINTS_PER_DECADE: usize = 10;

/// Fraction of the peak slope that still counts as part of the linear region.
const REGION_FRACTION: f64 = 0.9;
const FLAT_SLOPE: f64 = 0.01;
const MIN_GRID: usize = 5;

/// Weight sum `L(ε) = Σ_ij exp(−d²_ij/ε)` over a geometric grid of ε, with
/// the log-log slope at each interior grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonScan {
    pub grid: Vec<f64>,
    pub weight_sums: Vec<f64>,
    /// `d ln L / d ln ε` by central differences; entry `k` belongs to
    /// `grid[k + 1]`.
    pub slope_curve: Vec<f64>,
    pub selected: Option<f64>,
}

impl EpsilonScan {
    /// Builds a scan from precomputed curve values.
    pub fn from_curve(grid: Vec<f64>, weight_sums: Vec<f64>) -> Result<Self> {
        if grid.len() != weight_sums.len() || grid.len() < 3 {
            return Err(Error::invalid("scan needs at least 3 matching grid points"));
        }
        if grid.iter().any(|&e| !(e.is_finite() && e > 0.0))
            || grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::invalid("scan grid must be positive and strictly ascending"));
        }
        if weight_sums.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::invalid("weight sums must be positive"));
        }
        let slope_curve = (1..grid.len() - 1)
            .map(|k| {
                (weight_sums[k + 1].ln() - weight_sums[k - 1].ln())
                    / (grid[k + 1].ln() - grid[k - 1].ln())
            })
            .collect();
        Ok(EpsilonScan {
            grid,
            weight_sums,
            slope_curve,
            selected: None,
        })
    }

    /// Slope at a grid index, if it is interior.
    pub fn slope_at(&self, grid_index: usize) -> Option<f64> {
        grid_index
            .checked_sub(1)
            .and_then(|k| self.slope_curve.get(k).copied())
    }

    pub fn peak_slope(&self) -> f64 {
        self.slope_curve.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates `L(ε)` on a geometric grid spanning
/// `[10^lo, 10^hi] · median(nonzero d²)` with `points_per_decade` steps per
/// decade.
pub fn epsilon_scan(
    sq_dists: &SymmetricMatrix,
    decades: (f64, f64),
    points_per_decade: usize,
) -> Result<EpsilonScan> {
    let (lo, hi) = decades;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || points_per_decade == 0 {
        return Err(Error::invalid("scan range must be ascending with at least one point per decade"));
    }
    let n = sq_dists.order();
    let mut nonzero: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| sq_dists.get(i, j))
        .filter(|&d| d > 0.0)
        .collect();
    if nonzero.is_empty() {
        return Err(Error::Degenerate(
            "all pairwise distances are zero; no bandwidth scale exists".into(),
        ));
    }
    nonzero.sort_by(f64::total_cmp);
    let m = nonzero.len();
    let median = if m % 2 == 1 {
        nonzero[m / 2]
    } else {
        0.5 * (nonzero[m / 2 - 1] + nonzero[m / 2])
    };

    let steps = ((hi - lo) * points_per_decade as f64).round() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| median * 10f64.powf(lo + k as f64 / points_per_decade as f64))
        .collect();
    let values = sq_dists.as_slice();
    let weight_sums: Vec<f64> = grid
        .par_iter()
        .map(|&eps| values.iter().map(|&d| (-d / eps).exp()).sum())
        .collect();
    EpsilonScan::from_curve(grid, weight_sums)
}

/// Picks ε in the middle of the linear region of `ln L` against `ln ε`.
///
/// The region is the longest contiguous run of interior grid points whose
/// slope is at least 90% of the peak slope (earliest run on ties). The
/// returned grid value sits at the run's midpoint in log ε (lower middle
/// for even-length runs) and is stored in `scan.selected`.
pub fn select_epsilon(scan: &mut EpsilonScan) -> Result<f64> {
    if scan.grid.len() < MIN_GRID {
        return Err(Error::invalid(format!(
            "epsilon selection needs at least {MIN_GRID} grid points"
        )));
    }
    let peak = scan.peak_slope();
    if peak.is_nan() || peak < FLAT_SLOPE {
        return Err(Error::NoLinearRegion { max_slope: peak });
    }
    let cut = REGION_FRACTION * peak;
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (k, &s) in scan.slope_curve.iter().chain([f64::NEG_INFINITY].iter()).enumerate() {
        match (s >= cut, start) {
            (true, None) => start = Some(k),
            (false, Some(s0)) => {
                let len = k - s0;
                if best.is_none_or(|(b0, b1)| len > b1 - b0) {
                    best = Some((s0, k));
                }
                start = None;
            }
            _ => {}
        }
    }
    let (first, end) = best.expect("the peak itself is in some run");
    let mid = first + (end - 1 - first) / 2;
    let eps = scan.grid[mid + 1];
    scan.selected = Some(eps);
    Ok(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{pairwise_sq_dists, DataMatrix};
    use crate::synth::NormalStream;

    fn random_points(n: usize, p: usize, seed: u64) -> SymmetricMatrix {
        let mut g = NormalStream::new(seed);
        let x = DataMatrix::new(n, p, (0..n * p).map(|_| g.next_normal()).collect()).unwrap();
        pairwise_sq_dists(&x)
    }

    #[test]
    fn grid_shape_and_monotone_sums() {
        let d = random_points(10, 5, 1);
        let scan = epsilon_scan(&d, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE).unwrap();
        assert_eq!(scan.grid.len(), 71);
        assert_eq!(scan.slope_curve.len(), 69);
        assert!(scan.weight_sums.windows(2).all(|w| w[0] <= w[1]));
        let n = 10.0;
        assert!(scan.weight_sums.iter().all(|&l| l >= n && l <= n * n));
    }

    #[test]
    fn asymptotes_at_extreme_bandwidths() {
        let d = random_points(9, 4, 2);
        let nz: Vec<f64> = d.as_slice().iter().copied().filter(|&v| v > 0.0).collect();
        let max = nz.iter().copied().fold(0.0, f64::max);
        let min = nz.iter().copied().fold(f64::INFINITY, f64::min);
        let n = 9.0;
        let big = super::super::gaussian_affinity(&d, 1e6 * max).unwrap();
        assert!((big.weight_sum() - n * n).abs() / (n * n) < 1e-3);
        let small = super::super::gaussian_affinity(&d, 1e-6 * min).unwrap();
        assert!((small.weight_sum() - n).abs() / n < 1e-3);
    }

    #[test]
    fn all_zero_distances_rejected() {
        let d = SymmetricMatrix::new(3, vec![0.0; 9]).unwrap();
        assert!(matches!(
            epsilon_scan(&d, DEFAULT_DECADES, 10),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn symmetric_single_peak_selects_middle() {
        // slopes peak on a plateau at grid indices 4..=6
        let grid: Vec<f64> = (0..11).map(|k| 10f64.powi(k)).collect();
        let increments = [0.0, 0.0, 0.1, 1.0, 1.0, 1.0, 1.0, 0.1, 0.0, 0.0];
        let mut ln_l = vec![1.0];
        for inc in increments {
            ln_l.push(ln_l.last().unwrap() + inc * std::f64::consts::LN_10);
        }
        let sums: Vec<f64> = ln_l.iter().map(|v| v.exp()).collect();
        let mut scan = EpsilonScan::from_curve(grid.clone(), sums).unwrap();
        let eps = select_epsilon(&mut scan).unwrap();
        assert_eq!(eps, grid[5]);
        assert_eq!(scan.selected, Some(grid[5]));
    }

    #[test]
    fn flat_curve_is_an_error() {
        let grid: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let mut scan = EpsilonScan::from_curve(grid, vec![4.0; 8]).unwrap();
        assert!(matches!(
            select_epsilon(&mut scan),
            Err(Error::NoLinearRegion { .. })
        ));
    }

    #[test]
    fn needs_five_points() {
        let mut scan = EpsilonScan::from_curve(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(select_epsilon(&mut scan).is_err());
    }

    #[test]
    fn selection_lands_in_region() {
        let d = random_points(15, 3, 9);
        let mut scan = epsilon_scan(&d, DEFAULT_DECADES, DEFAULT_POINTS_PER_DECADE).unwrap();
        let eps = select_epsilon(&mut scan).unwrap();
        let idx = scan.grid.iter().position(|&g| g == eps).unwrap();
        assert!(scan.slope_at(idx).unwrap() >= 0.9 * scan.peak_slope());
    }

    #[test]
    fn parallel_scan_is_deterministic() {
        let d = random_points(40, 6, 4);
        let run = |t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
                .install(|| epsilon_scan(&d, DEFAULT_DECADES, 10).unwrap())
        };
        assert_eq!(run(1), run(6));
    }
}
