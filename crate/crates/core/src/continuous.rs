//! Importance measures built from component lifetime distributions.
//!
//! With X_i(t) = 1{T_i > t} and X(t) = 1{T > t},
//!
//! cov(X_i(s), X(t)) = K_i(t) · (F̄_i(s ∨ t) − F̄_i(s) F̄_i(t)),
//!
//! where K_i(t) = Σ_{S ∌ i} b(S ∪ {i}) Π_{j∈S} F̄_j(t) is the Birnbaum
//! importance at the survival vector F̄(t). The L1 measure integrates this
//! surface over the quadrant and equals cov(T_i, T); the L∞ measure is its
//! supremum, attained on the diagonal s = t.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lifetime::LifetimeModel;
use crate::optimize::{grid_then_refine, log_grid, Maximum};
use crate::quadrature::{integrate_2d, square_cells, QuadratureOptions};
use crate::reliability::expectation;
use crate::report::ImportanceReport;
use crate::structure::product_over;

/// Values closer than this rank as ties.
pub const CONTINUOUS_TIE_TOLERANCE: f64 = 1e-7;

/// Survival-quantile levels used as quadrature breakpoints.
const BREAK_LEVELS: [f64; 7] = [0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 0.99999];

#[derive(Debug, Clone, Copy)]
pub struct ContinuousOptions {
    pub quadrature: QuadratureOptions,
    /// The integration and search range ends at the largest 1 − tail quantile.
    pub tail: f64,
    pub grid_points: usize,
    pub golden_tolerance: f64,
    /// Upper bound on the number of step-distribution atoms used as breakpoints.
    pub max_jump_breaks: usize,
}

impl Default for ContinuousOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureOptions::default(),
            tail: 1e-9,
            grid_points: 512,
            golden_tolerance: 1e-10,
            max_jump_breaks: 256,
        }
    }
}

/// Σ_{S ∌ i} b(S ∪ {i}) Π_{j∈S} x_j, from the signed domination when it is
/// small and from the truth table otherwise.
fn kernel(m: &LifetimeModel, i: usize, x: &mut [f64]) -> f64 {
    let terms = m.terms(i);
    if terms.len() * m.n() <= m.sf().num_states() {
        terms
            .iter()
            .map(|&(s, b)| f64::from(b) * product_over(s, x))
            .sum()
    } else {
        let orig = x[i - 1];
        x[i - 1] = 1.0;
        let up = expectation(m.sf(), x);
        x[i - 1] = 0.0;
        let down = expectation(m.sf(), x);
        x[i - 1] = orig;
        up - down
    }
}

fn check(m: &LifetimeModel, i: usize) -> Result<()> {
    if i == 0 || i > m.n() {
        return Err(Error::BadComponent { id: i, n: m.n() });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// cov(X_i(s), X(t)).
pub fn cov_surface(m: &LifetimeModel, i: usize, s: f64, t: f64) -> Result<f64> {
    check(m, i)?;
    check_time(s)?;
    check_time(t)?;
    Ok(surface(m, i, s, t))
}

fn surface(m: &LifetimeModel, i: usize, s: f64, t: f64) -> f64 {
    let d = m.dist(i);
    let (fs, ft) = (d.survival(s), d.survival(t));
    let local = d.survival(s.max(t)) - fs * ft;
    if local == 0.0 {
        return 0.0;
    }
    kernel(m, i, &mut m.survivals(t)) * local
}

/// cov(X_i(t), X(t)) = F_i(t) F̄_i(t) K_i(t).
fn diagonal(m: &LifetimeModel, i: usize, t: f64) -> f64 {
    let d = m.dist(i);
    let weight = d.cdf(t) * d.survival(t);
    if weight == 0.0 {
        return 0.0;
    }
    weight * kernel(m, i, &mut m.survivals(t))
}

/// The same objective for the dual structure: F̄_i(t) F_i(t) times the
/// kernel at the distribution functions, with b taken from the primal.
fn dual_diagonal(m: &LifetimeModel, i: usize, t: f64) -> f64 {
    let d = m.dist(i);
    let weight = d.cdf(t) * d.survival(t);
    if weight == 0.0 {
        return 0.0;
    }
    let mut cdfs: Vec<f64> = m.dists().iter().map(|d| d.cdf(t)).collect();
    weight * kernel(m, i, &mut cdfs)
}

/// Sorted, deduplicated breakpoints in [0, horizon].
fn breakpoints(m: &LifetimeModel, opts: &ContinuousOptions) -> Vec<f64> {
    let horizon = m.horizon(opts.tail);
    let mut pts = vec![0.0, horizon];
    for d in m.dists() {
        pts.extend(BREAK_LEVELS.iter().map(|&u| d.quantile(u)));
    }
    pts.extend(thin(m.jump_points(), opts.max_jump_breaks));
    pts.retain(|&t| (0.0..=horizon).contains(&t));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * horizon.max(1.0));
    pts
}

/// At most `cap` evenly spaced members of `pts`.
fn thin(pts: Vec<f64>, cap: usize) -> Vec<f64> {
    if pts.len() <= cap || cap == 0 {
        return pts;
    }
    (0..cap).map(|k| pts[k * (pts.len() - 1) / (cap - 1).max(1)]).collect()
}

/// ∬ cov(X_i(s), X(t)) ds dt over [0, horizon]², i.e. cov(T_i, T).
pub fn l1_component(m: &LifetimeModel, i: usize, opts: &ContinuousOptions) -> Result<f64> {
    check(m, i)?;
    let cells = square_cells(&breakpoints(m, opts));
    let r = integrate_2d(|s, t| surface(m, i, s, t), &cells, opts.quadrature)?;
    Ok(r.value)
}

/// L1-covariance importance of every component.
pub fn l1_covariance_importance(m: &LifetimeModel, opts: &ContinuousOptions) -> Result<ImportanceReport> {
    let values = (1..=m.n())
        .into_par_iter()
        .map(|i| l1_component(m, i, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(ImportanceReport::new("l1_covariance", values, CONTINUOUS_TIE_TOLERANCE))
}

/// Closed-form cov(T_i, T) for a series system of exponential components.
///
/// The two-component expression with λ1 = λ_i and λ2 the sum of the other
/// rates.
pub fn exponential_l1_series(rates: &[f64], i: usize) -> Result<f64> {
    if i == 0 || i > rates.len() {
        return Err(Error::BadComponent { id: i, n: rates.len() });
    }
    if let Some(&bad) = rates.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidDistribution(format!("rate must be positive, got {bad}")));
    }
    let l1 = rates[i - 1];
    let l2: f64 = rates.iter().sum::<f64>() - l1;
    if rates.len() == 1 {
        return Ok(1.0 / (l1 * l1));
    }
    let s = l1 + l2;
    let w = 2.0 * l1 + l2;
    Ok(1.0 / (s * s) - 2.0 / (l1 * s) - 1.0 / (l2 * s) + 1.0 / (l1 * w) + 1.0 / (s * w) + 1.0 / (l1 * l2))
}

/// Search grid for the diagonal supremum: log-spaced points over the
/// support, every atom of a step component, and t = 0.
fn search_grid(m: &LifetimeModel, opts: &ContinuousOptions) -> Vec<f64> {
    let horizon = m.horizon(opts.tail);
    let lo = m
        .dists()
        .iter()
        .map(|d| d.quantile(opts.tail))
        .filter(|&t| t > 0.0)
        .fold(horizon, f64::min)
        .max(horizon * 1e-12);
    let mut grid = if horizon > 0.0 {
        log_grid(lo.min(horizon), horizon, opts.grid_points.max(2))
    } else {
        Vec::new()
    };
    grid.push(0.0);
    grid.extend(m.jump_points());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn supremum(objective: impl Fn(f64) -> f64, grid: &[f64], opts: &ContinuousOptions) -> Maximum {
    let best = grid_then_refine(objective, grid, opts.golden_tolerance);
    if best.value <= 1e-15 {
        Maximum { at: 0.0, value: 0.0 }
    } else {
        best
    }
}

fn linf_with(
    m: &LifetimeModel,
    opts: &ContinuousOptions,
    id: &str,
    objective: fn(&LifetimeModel, usize, f64) -> f64,
) -> ImportanceReport {
    let grid = search_grid(m, opts);
    let maxima: Vec<Maximum> = (1..=m.n())
        .into_par_iter()
        .map(|i| supremum(|t| objective(m, i, t), &grid, opts))
        .collect();
    ImportanceReport::new(id, maxima.iter().map(|x| x.value).collect(), CONTINUOUS_TIE_TOLERANCE)
        .with_maximizers(maxima.iter().map(|x| x.at).collect())
}

/// sup_t cov(X_i(t), X(t)) with the maximizing time of each component.
pub fn linf_covariance_importance(m: &LifetimeModel, opts: &ContinuousOptions) -> ImportanceReport {
    linf_with(m, opts, "linf_covariance", diagonal)
}

/// L∞-covariance importance of the dual structure, from the primal signed
/// domination with F and F̄ exchanged.
pub fn linf_dual(m: &LifetimeModel, opts: &ContinuousOptions) -> ImportanceReport {
    linf_with(m, opts, "linf_covariance_dual", dual_diagonal)
}

/// Natvig's measure for exponential lifetimes: λ_i cov(T_i, T).
pub fn natvig_exponential(m: &LifetimeModel, opts: &ContinuousOptions) -> Result<ImportanceReport> {
    let rates = m.exponential_rates()?;
    let l1 = l1_covariance_importance(m, opts)?;
    let values = l1.values.iter().zip(&rates).map(|(v, r)| v * r).collect();
    Ok(ImportanceReport::new("natvig", values, CONTINUOUS_TIE_TOLERANCE))
}

/// (t, cov(X_i(t), X(t))) along a sorted nonnegative grid.
pub fn covariance_curve(m: &LifetimeModel, i: usize, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    check(m, i)?;
    if let Some(&t) = grid.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("times must be sorted ascending".into()));
    }
    Ok(grid.iter().map(|&t| (t, diagonal(m, i, t))).collect())
}

/// A lifetime importance measure selectable by key.
pub trait LifetimeMeasure: Send + Sync {
    fn key(&self) -> &'static str;
    fn id(&self) -> &'static str;
    fn report(&self, m: &LifetimeModel, opts: &ContinuousOptions) -> Result<ImportanceReport>;
}

pub struct L1Covariance;
pub struct LinfCovariance;
pub struct LinfCovarianceDual;
pub struct NatvigExponential;

impl LifetimeMeasure for L1Covariance {
    fn key(&self) -> &'static str {
        "l1"
    }
    fn id(&self) -> &'static str {
        "l1_covariance"
    }
    fn report(&self, m: &LifetimeModel, opts: &ContinuousOptions) -> Result<ImportanceReport> {
        l1_covariance_importance(m, opts)
    }
}

impl LifetimeMeasure for LinfCovariance {
    fn key(&self) -> &'static str {
        "linf"
    }
    fn id(&self) -> &'static str {
        "linf_covariance"
    }
    fn report(&self, m: &LifetimeModel, opts: &ContinuousOptions) -> Result<ImportanceReport> {
        Ok(linf_covariance_importance(m, opts))
    }
}

impl LifetimeMeasure for LinfCovarianceDual {
    fn key(&self) -> &'static str {
        "linf-dual"
    }
    fn id(&self) -> &'static str {
        "linf_covariance_dual"
    }
    fn report(&self, m: &LifetimeModel, opts: &ContinuousOptions) -> Result<ImportanceReport> {
        Ok(linf_dual(m, opts))
    }
}

impl LifetimeMeasure for NatvigExponential {
    fn key(&self) -> &'static str {
        "natvig"
    }
    fn id(&self) -> &'static str {
        "natvig"
    }
    fn report(&self, m: &LifetimeModel, opts: &ContinuousOptions) -> Result<ImportanceReport> {
        natvig_exponential(m, opts)
    }
}

pub struct LifetimeRegistry {
    measures: Vec<Box<dyn LifetimeMeasure>>,
}

impl Default for LifetimeRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(L1Covariance));
        r.register(Box::new(LinfCovariance));
        r.register(Box::new(LinfCovarianceDual));
        r.register(Box::new(NatvigExponential));
        r
    }
}

impl LifetimeRegistry {
    pub fn empty() -> Self {
        Self { measures: Vec::new() }
    }

    /// Adds a measure; a measure with the same key is replaced in place.
    pub fn register(&mut self, measure: Box<dyn LifetimeMeasure>) {
        match self.measures.iter().position(|m| m.key() == measure.key()) {
            Some(pos) => self.measures[pos] = measure,
            None => self.measures.push(measure),
        }
    }

    pub fn keys(&self) -> Vec<&'static str> {
        self.measures.iter().map(|m| m.key()).collect()
    }

    pub fn get(&self, key: &str) -> Result<&dyn LifetimeMeasure> {
        self.measures
            .iter()
            .find(|m| m.key() == key || m.id() == key)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownMeasure(key.to_owned()))
    }

    pub fn evaluate(&self, key: &str, m: &LifetimeModel, opts: &ContinuousOptions) -> Result<ImportanceReport> {
        self.get(key)?.report(m, opts)
    }
}
