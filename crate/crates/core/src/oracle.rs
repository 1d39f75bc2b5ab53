//! Ground truth computed from first principles: full state enumeration for
//! binary measures and seeded Monte Carlo for lifetime measures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::binary::information_importance;
use crate::certificates::ModuleKind;
use crate::entropy::BinaryJoint;
use crate::error::{Error, Result};
use crate::generate::{module_instance, random_probabilities};
use crate::lifetime::LifetimeModel;
use crate::optimize::log_grid;
use crate::reliability::ProbabilityVector;
use crate::structure::StructureFunction;

/// Largest n handled by exhaustive enumeration.
pub const ORACLE_MAX_COMPONENTS: usize = 12;

/// Slack below which a failed ordering is treated as a floating-point tie.
pub const CONJECTURE_TOLERANCE: f64 = 1e-10;

/// Target number of batches for batch-means standard errors.
const TARGET_BATCHES: usize = 128;

/// Points in the time grid of the Monte Carlo supremum estimate.
const MC_GRID_POINTS: usize = 64;

/// (P{state}, state) for every state vector.
fn states(sf: &StructureFunction, p: &ProbabilityVector) -> Result<Vec<(f64, u32)>> {
    if sf.n() > ORACLE_MAX_COMPONENTS {
        return Err(Error::OracleTooLarge { n: sf.n(), max: ORACLE_MAX_COMPONENTS });
    }
    if p.len() != sf.n() {
        return Err(Error::DimensionMismatch { expected: sf.n(), got: p.len() });
    }
    let ps = p.as_slice();
    Ok((0..sf.num_states() as u32)
        .map(|s| {
            let prob = ps
                .iter()
                .enumerate()
                .map(|(k, &pk)| if s >> k & 1 == 1 { pk } else { 1.0 - pk })
                .product();
            (prob, s)
        })
        .collect())
}

fn check_id(sf: &StructureFunction, i: usize) -> Result<()> {
    if i == 0 || i > sf.n() {
        return Err(Error::BadComponent { id: i, n: sf.n() });
    }
    Ok(())
}

/// E[X_i φ(X)] − E[X_i] E[φ(X)] summed over all 2^n states.
pub fn exact_binary_covariance(sf: &StructureFunction, p: &ProbabilityVector, i: usize) -> Result<f64> {
    check_id(sf, i)?;
    let bit = 1u32 << (i - 1);
    let (mut e_xy, mut e_x, mut e_y) = (0.0, 0.0, 0.0);
    for (prob, s) in states(sf, p)? {
        let x = s & bit != 0;
        let y = sf.eval(s);
        if x {
            e_x += prob;
        }
        if y {
            e_y += prob;
        }
        if x && y {
            e_xy += prob;
        }
    }
    Ok(e_xy - e_x * e_y)
}

/// I(X_i | φ(X)) from the enumerated 2×2 joint law.
pub fn exact_binary_mutual_information(sf: &StructureFunction, p: &ProbabilityVector, i: usize) -> Result<f64> {
    check_id(sf, i)?;
    let bit = 1u32 << (i - 1);
    let mut mass = [[0.0f64; 2]; 2];
    for (prob, s) in states(sf, p)? {
        mass[usize::from(s & bit != 0)][usize::from(sf.eval(s))] += prob;
    }
    Ok(BinaryJoint { mass }.mutual_information())
}

/// Seed, sample count and number of independent random substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    pub streams: usize,
}

impl McConfig {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self { seed, samples, streams: 8 }
    }
}

/// An estimate with its batch-means standard error. The error is NaN when
/// fewer than two batches hold two or more samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McComponent {
    /// cov(T_i, T).
    pub covariance: Estimate,
    /// max over the time grid of cov(X_i(t), X(t)).
    pub sup: Estimate,
    pub sup_at: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub config: McConfig,
    pub grid: Vec<f64>,
    pub components: Vec<McComponent>,
}

/// Running moments of one batch.
#[derive(Debug, Clone)]
struct Batch {
    count: f64,
    mean_t: f64,
    mean_c: Vec<f64>,
    /// Σ (T_i − mean_i)(T − mean_T).
    co: Vec<f64>,
    /// Counts of {T > t_g}, {T_i > t_g} and both, flattened [i][g].
    sys_alive: Vec<u64>,
    comp_alive: Vec<u64>,
    both_alive: Vec<u64>,
}

impl Batch {
    fn new(n: usize, g: usize) -> Self {
        Self {
            count: 0.0,
            mean_t: 0.0,
            mean_c: vec![0.0; n],
            co: vec![0.0; n],
            sys_alive: vec![0; g],
            comp_alive: vec![0; n * g],
            both_alive: vec![0; n * g],
        }
    }

    fn push(&mut self, comps: &[f64], sys: f64, grid: &[f64]) {
        self.count += 1.0;
        let dt = sys - self.mean_t;
        self.mean_t += dt / self.count;
        let dt_new = sys - self.mean_t;
        for (k, &c) in comps.iter().enumerate() {
            let dc = c - self.mean_c[k];
            self.mean_c[k] += dc / self.count;
            self.co[k] += dc * dt_new;
        }
        let g = grid.len();
        for (gi, &t) in grid.iter().enumerate() {
            let sys_up = sys > t;
            self.sys_alive[gi] += u64::from(sys_up);
            for (k, &c) in comps.iter().enumerate() {
                let up = c > t;
                self.comp_alive[k * g + gi] += u64::from(up);
                self.both_alive[k * g + gi] += u64::from(up && sys_up);
            }
        }
    }

    /// Chan et al. pairwise merge of co-moments.
    fn merge(&mut self, other: &Batch) {
        if other.count == 0.0 {
            return;
        }
        let total = self.count + other.count;
        let dt = other.mean_t - self.mean_t;
        for k in 0..self.co.len() {
            let dc = other.mean_c[k] - self.mean_c[k];
            self.co[k] += other.co[k] + dc * dt * self.count * other.count / total;
            self.mean_c[k] += dc * other.count / total;
        }
        self.mean_t += dt * other.count / total;
        self.count = total;
        for (a, b) in self.sys_alive.iter_mut().zip(&other.sys_alive) {
            *a += b;
        }
        for (a, b) in self.comp_alive.iter_mut().zip(&other.comp_alive) {
            *a += b;
        }
        for (a, b) in self.both_alive.iter_mut().zip(&other.both_alive) {
            *a += b;
        }
    }

    fn covariance(&self, k: usize) -> f64 {
        self.co[k] / self.count
    }

    fn indicator_covariance(&self, k: usize, gi: usize, g: usize) -> f64 {
        let m = self.count;
        let both = self.both_alive[k * g + gi] as f64 / m;
        both - (self.comp_alive[k * g + gi] as f64 / m) * (self.sys_alive[gi] as f64 / m)
    }
}

fn batch_se(per_batch: &[f64]) -> f64 {
    let b = per_batch.len();
    if b < 2 {
        return f64::NAN;
    }
    let mean = per_batch.iter().sum::<f64>() / b as f64;
    let var = per_batch.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

/// Plug-in estimates of cov(T_i, T) and of the grid supremum of
/// cov(X_i(t), X(t)), with batch-means standard errors.
///
/// Lifetimes are drawn by inverse CDF and T is the max–min over minimal
/// path sets. Stream s uses ChaCha8 seeded by `seed` on stream s; batches
/// are merged in a fixed order, so the output depends on the configuration
/// only.
pub fn mc_lifetime_covariance(m: &LifetimeModel, cfg: &McConfig) -> Result<McReport> {
    if cfg.samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let streams = cfg.streams.max(1);
    let per_stream = TARGET_BATCHES.div_ceil(streams);
    let total_batches = streams * per_stream;
    let n = m.n();
    let horizon = m.horizon(1e-6);
    let lo = m
        .dists()
        .iter()
        .map(|d| d.quantile(0.001))
        .filter(|&t| t > 0.0)
        .fold(horizon, f64::min);
    let grid = if horizon > 0.0 { log_grid(lo.min(horizon), horizon, MC_GRID_POINTS) } else { vec![0.0] };
    let sets = m.path_cut_sets();
    let batch_size = |b: usize| cfg.samples * (b + 1) / total_batches - cfg.samples * b / total_batches;

    let batches: Vec<Batch> = (0..streams)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(s as u64);
            let mut comps = vec![0.0; n];
            let mut out = Vec::with_capacity(per_stream);
            for b in s * per_stream..(s + 1) * per_stream {
                let mut batch = Batch::new(n, grid.len());
                for _ in 0..batch_size(b) {
                    for (k, d) in m.dists().iter().enumerate() {
                        comps[k] = d.quantile(rng.gen::<f64>());
                    }
                    let sys = sets.lifetime(&comps);
                    batch.push(&comps, sys, &grid);
                }
                out.push(batch);
            }
            out
        })
        .collect();

    let mut total = Batch::new(n, grid.len());
    for b in &batches {
        total.merge(b);
    }
    let usable: Vec<&Batch> = batches.iter().filter(|b| b.count >= 2.0).collect();
    let g = grid.len();
    let components = (0..n)
        .map(|k| {
            let cov_batches: Vec<f64> = usable.iter().map(|b| b.covariance(k)).collect();
            let (best, sup) = (0..g)
                .map(|gi| (gi, total.indicator_covariance(k, gi, g)))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            let sup_batches: Vec<f64> = usable.iter().map(|b| b.indicator_covariance(k, best, g)).collect();
            McComponent {
                covariance: Estimate { value: total.covariance(k), std_error: batch_se(&cov_batches) },
                sup: Estimate { value: sup, std_error: batch_se(&sup_batches) },
                sup_at: grid[best],
            }
        })
        .collect();
    Ok(McReport { config: *cfg, grid, components })
}

/// A probe instance where the information ordering failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub trial: usize,
    pub kind: ModuleKind,
    pub expression: String,
    pub p: Vec<f64>,
    pub i: usize,
    pub j: usize,
    pub values: (f64, f64),
}

/// Searches random module systems for failures of
/// I^inf(i) ≥ I^inf(j), where i is in series with a module containing j
/// and p_i ≤ p_j (or parallel with p_i ≥ p_j).
///
/// Trial k draws from ChaCha8 stream k of `seed`; every failure is returned
/// with enough detail to reproduce it.
pub fn conjecture_probe(trials: usize, n_max: usize, seed: u64) -> Result<Vec<Violation>> {
    if n_max > ORACLE_MAX_COMPONENTS {
        return Err(Error::OracleTooLarge { n: n_max, max: ORACLE_MAX_COMPONENTS });
    }
    if n_max < 2 {
        return Ok(Vec::new());
    }
    let found: Vec<Vec<Violation>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let n = rng.gen_range(2..=n_max);
            let kind = if rng.gen_bool(0.5) { ModuleKind::Series } else { ModuleKind::Parallel };
            let inst = module_instance(&mut rng, n, kind);
            let mut p = random_probabilities(&mut rng, n);
            let i = inst.annotation.component;
            let module = &inst.annotation.module;
            let j = module[rng.gen_range(0..module.len())];
            let wrong_way = match kind {
                ModuleKind::Series => p[i - 1] > p[j - 1],
                ModuleKind::Parallel => p[i - 1] < p[j - 1],
            };
            if wrong_way {
                p.swap(i - 1, j - 1);
            }
            let pv = ProbabilityVector::new(p.clone()).expect("generated probabilities are valid");
            let info = information_importance(&inst.sf, &pv).expect("dimensions match");
            let (vi, vj) = (info.value(i), info.value(j));
            if vi < vj - CONJECTURE_TOLERANCE {
                vec![Violation {
                    trial,
                    kind,
                    expression: inst.expr.to_string(),
                    p,
                    i,
                    j,
                    values: (vi, vj),
                }]
            } else {
                Vec::new()
            }
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::LifetimeDistribution as D;

    fn sf(text: &str) -> StructureFunction {
        StructureFunction::from_expression(text).unwrap()
    }

    fn pv(p: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let s = sf("series(1,2)");
        let p = pv(&[0.9, 0.8]);
        // E[X2 φ] − p2 h = 0.72 − 0.8·0.72
        assert!((exact_binary_covariance(&s, &p, 2).unwrap() - 0.144).abs() < 1e-15);
        let id = sf("1");
        assert_eq!(exact_binary_mutual_information(&id, &pv(&[0.5]), 1).unwrap(), 1.0);
        let irr = StructureFunction::from_table_str("0101").unwrap();
        let p = pv(&[0.3, 0.6]);
        assert!(exact_binary_covariance(&irr, &p, 2).unwrap().abs() < 1e-15);
        assert!(exact_binary_mutual_information(&irr, &p, 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn enumeration_limits() {
        let big = StructureFunction::series(13);
        let p = ProbabilityVector::uniform(13, 0.5).unwrap();
        assert!(matches!(exact_binary_covariance(&big, &p, 1), Err(Error::OracleTooLarge { .. })));
        assert!(exact_binary_covariance(&sf("series(1,2)"), &pv(&[0.5, 0.5]), 3).is_err());
    }

    #[test]
    fn monte_carlo_is_deterministic_and_handles_point_masses() {
        let s = sf("series(1,2)");
        let m = LifetimeModel::new(s, vec![D::empirical(vec![2.0]).unwrap(), D::exponential(1.0).unwrap()]).unwrap();
        let cfg = McConfig { seed: 5, samples: 5_000, streams: 4 };
        let a = mc_lifetime_covariance(&m, &cfg).unwrap();
        let b = mc_lifetime_covariance(&m, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.components[0].covariance.value, 0.0);
        assert!(mc_lifetime_covariance(&m, &McConfig { samples: 0, ..cfg }).is_err());
    }

    #[test]
    fn monte_carlo_is_schedule_invariant() {
        let m = LifetimeModel::new(
            sf("parallel(1,series(2,3))"),
            vec![D::exponential(1.0).unwrap(), D::weibull(2.0, 1.0).unwrap(), D::exponential(0.5).unwrap()],
        )
        .unwrap();
        let cfg = McConfig { seed: 9, samples: 20_000, streams: 3 };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| mc_lifetime_covariance(&m, &cfg).unwrap());
        assert_eq!(single, mc_lifetime_covariance(&m, &cfg).unwrap());
    }

    #[test]
    fn monte_carlo_series_exponential() {
        let m = LifetimeModel::new(sf("series(1,2)"), vec![D::exponential(1.0).unwrap(); 2]).unwrap();
        let r = mc_lifetime_covariance(&m, &McConfig::new(1, 200_000)).unwrap();
        for c in &r.components {
            assert!((c.covariance.value - 0.25).abs() < 4.0 * c.covariance.std_error);
            // sup_t F F̄ F̄ = 4/27 at ln(3/2)
            assert!((c.sup.value - 4.0 / 27.0).abs() < 4.0 * c.sup.std_error + 2e-3);
        }
    }

    #[test]
    fn probe_is_deterministic() {
        let a = conjecture_probe(300, 6, 17).unwrap();
        assert_eq!(a, conjecture_probe(300, 6, 17).unwrap());
        assert!(conjecture_probe(1, 13, 0).is_err());
    }
}
