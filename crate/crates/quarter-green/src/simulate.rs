//! Monte Carlo estimates of visit counts and absorption sites, used as an
//! independent check on the lattice solve.

use std::collections::HashMap;

use quarter_green_core::green::{EstimateMeta, GreenEstimate, Method};
use quarter_green_core::walk::{JumpKernel, LatticePoint};
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

/// Paths per independently seeded stream. Fixing it makes the output
/// independent of the thread count.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub paths: u64,
    /// Paths still alive after this many steps are abandoned.
    pub step_cap: u64,
    pub seed: u64,
    /// Absorption sites `(i, 0)` and `(0, j)` are histogrammed for `i, j ≤ hist_len`.
    pub hist_len: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            step_cap: 1_000_000,
            seed: 0,
            hist_len: 20,
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub targets: Vec<(LatticePoint, MeanSe)>,
    /// `h_i` estimates at index `i − 1`.
    pub horizontal: Vec<MeanSe>,
    /// `h̃_j` estimates at index `j − 1`.
    pub vertical: Vec<MeanSe>,
    pub corner: MeanSe,
    /// Paths cut off by `step_cap`; their remaining visits are missing, so
    /// the estimates are biased low when this is nonzero.
    pub truncated_paths: u64,
    pub paths: u64,
}

impl SimulationResult {
    pub fn estimate(&self, p: LatticePoint) -> Option<GreenEstimate> {
        self.targets.iter().find(|(q, _)| *q == p).map(|(_, m)| GreenEstimate {
            value: m.mean,
            abs_error: m.se,
            method: Method::MonteCarlo,
            meta: EstimateMeta {
                evaluations: Some(self.paths as usize),
                ..EstimateMeta::default()
            },
        })
    }

    pub fn biased(&self) -> bool {
        self.truncated_paths > 0
    }
}

#[derive(Clone)]
struct Acc {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    /// Absorption indicators: horizontal, vertical, corner.
    hits: Vec<u64>,
    truncated: u64,
}

impl Acc {
    fn new(targets: usize, hist: usize) -> Self {
        Self {
            sum: vec![0.0; targets],
            sum_sq: vec![0.0; targets],
            hits: vec![0; 2 * hist + 1],
            truncated: 0,
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for (a, b) in self.sum.iter_mut().zip(other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(other.sum_sq) {
            *a += b;
        }
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            *a += b;
        }
        self.truncated += other.truncated;
        self
    }
}

fn mean_se(sum: f64, sum_sq: f64, n: f64) -> MeanSe {
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    MeanSe {
        mean,
        se: (var / n).sqrt(),
    }
}

/// Runs `cfg.paths` killed walks from `start`, counting visits (including the
/// one at time 0) to each target.
pub fn simulate(k: &JumpKernel, start: LatticePoint, targets: &[LatticePoint], cfg: &SimulationConfig) -> AppResult<SimulationResult> {
    start.require_interior()?;
    if cfg.paths < 2 {
        return Err(AppError::Usage("simulation needs at least two paths".into()));
    }
    let steps: Vec<(i64, i64)> = k.steps().map(|(a, b, _)| (a as i64, b as i64)).collect();
    let dist = WeightedIndex::new(k.steps().map(|(_, _, p)| p.max(0.0)))
        .map_err(|e| AppError::Validation(format!("cannot sample from kernel: {e}")))?;
    // Repeated targets share one counter.
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let slots: Vec<usize> = targets
        .iter()
        .map(|p| {
            let next = index.len();
            *index.entry((p.i as i64, p.j as i64)).or_insert(next)
        })
        .collect();
    let unique = index.len();
    let hist = cfg.hist_len;
    let chunks = cfg.paths.div_ceil(CHUNK);

    let run_chunk = |c: u64| -> Acc {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(c);
        let mut acc = Acc::new(unique, hist);
        let mut local = vec![0u64; unique];
        let count = CHUNK.min(cfg.paths - c * CHUNK);
        for _ in 0..count {
            local.iter_mut().for_each(|v| *v = 0);
            let (mut i, mut j) = (start.i as i64, start.j as i64);
            let mut alive = true;
            for _ in 0..=cfg.step_cap {
                if let Some(&n) = index.get(&(i, j)) {
                    local[n] += 1;
                }
                let (di, dj) = steps[dist.sample(&mut rng)];
                i += di;
                j += dj;
                if i <= 0 || j <= 0 {
                    let slot = match (i, j) {
                        (0, 0) => Some(2 * hist),
                        (i, 0) if (i as usize) <= hist => Some(i as usize - 1),
                        (0, j) if (j as usize) <= hist => Some(hist + j as usize - 1),
                        _ => None,
                    };
                    if let Some(s) = slot {
                        acc.hits[s] += 1;
                    }
                    alive = false;
                    break;
                }
            }
            if alive {
                acc.truncated += 1;
            }
            for (n, &v) in local.iter().enumerate() {
                let v = v as f64;
                acc.sum[n] += v;
                acc.sum_sq[n] += v * v;
            }
        }
        acc
    };

    let parts: Vec<Acc> = (0..chunks).into_par_iter().map(run_chunk).collect();
    let total = parts
        .into_iter()
        .fold(Acc::new(unique, hist), Acc::merge);
    let n = cfg.paths as f64;
    // Indicator variables: sum_sq = sum.
    let bern = |h: u64| mean_se(h as f64, h as f64, n);
    Ok(SimulationResult {
        targets: targets
            .iter()
            .zip(&slots)
            .map(|(p, &m)| (*p, mean_se(total.sum[m], total.sum_sq[m], n)))
            .collect(),
        horizontal: total.hits[..hist].iter().map(|&h| bern(h)).collect(),
        vertical: total.hits[hist..2 * hist].iter().map(|&h| bern(h)).collect(),
        corner: bern(total.hits[2 * hist]),
        truncated_paths: total.truncated,
        paths: cfg.paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed_and_thread_count() {
        let k = JumpKernel::su3();
        let cfg = SimulationConfig {
            paths: 10_000,
            seed: 42,
            ..SimulationConfig::default()
        };
        let t = [LatticePoint::new(1, 1), LatticePoint::new(2, 2)];
        let a = simulate(&k, LatticePoint::new(1, 1), &t, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate(&k, LatticePoint::new(1, 1), &t, &cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.targets[0].1.mean >= 1.0);
    }

    #[test]
    fn absorption_mass_is_one() {
        let cfg = SimulationConfig {
            paths: 20_000,
            hist_len: 100_000,
            ..SimulationConfig::default()
        };
        let r = simulate(&JumpKernel::uniform(), LatticePoint::new(2, 2), &[], &cfg).unwrap();
        let mass: f64 = r.horizontal.iter().chain(&r.vertical).map(|m| m.mean).sum::<f64>() + r.corner.mean;
        let lost = r.truncated_paths as f64 / cfg.paths as f64;
        assert!((mass + lost - 1.0).abs() < 1e-12);
    }
}
