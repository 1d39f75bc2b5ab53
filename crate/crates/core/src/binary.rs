//! Importance measures for components observed at a fixed instant.
//!
//! Every measure is a function of the three pivot values h_φ(p),
//! h_φ(p,1_i) and h_φ(p,0_i). The measures implement [`BinaryMeasure`]
//! and are looked up by key in a [`BinaryRegistry`].

use crate::entropy::{binary_entropy, weighted_log2};
use crate::error::{Error, Result};
use crate::reliability::{pivots, Pivot, ProbabilityVector};
use crate::report::ImportanceReport;
use crate::structure::StructureFunction;

/// Values closer than this rank as ties.
pub const BINARY_TIE_TOLERANCE: f64 = 1e-12;

/// Inputs shared by all measures of one evaluation.
pub struct BinaryContext<'a> {
    pub sf: &'a StructureFunction,
    pub p: &'a ProbabilityVector,
    pub pivots: Vec<Pivot>,
}

impl<'a> BinaryContext<'a> {
    pub fn new(sf: &'a StructureFunction, p: &'a ProbabilityVector) -> Result<Self> {
        let pivots = pivots(sf, p)?;
        Ok(Self { sf, p, pivots })
    }

    fn each(&self, f: impl Fn(f64, &Pivot) -> f64) -> Vec<f64> {
        self.p
            .as_slice()
            .iter()
            .zip(&self.pivots)
            .map(|(&pi, pv)| f(pi, pv))
            .collect()
    }
}

pub trait BinaryMeasure: Send + Sync {
    /// Short key used on the command line.
    fn key(&self) -> &'static str;
    /// Identifier stored in reports.
    fn id(&self) -> &'static str;
    fn values(&self, ctx: &BinaryContext<'_>) -> Vec<f64>;

    fn report(&self, ctx: &BinaryContext<'_>) -> ImportanceReport {
        ImportanceReport::new(self.id(), self.values(ctx), BINARY_TIE_TOLERANCE)
    }
}

pub struct Birnbaum;
pub struct RiskAchievement;
pub struct RiskReduction;
pub struct Covariance;
pub struct CovarianceNormalized;
pub struct Information;

impl BinaryMeasure for Birnbaum {
    fn key(&self) -> &'static str {
        "birnbaum"
    }
    fn id(&self) -> &'static str {
        "birnbaum"
    }
    fn values(&self, ctx: &BinaryContext<'_>) -> Vec<f64> {
        ctx.each(|_, pv| pv.up - pv.down)
    }
}

impl BinaryMeasure for RiskAchievement {
    fn key(&self) -> &'static str {
        "ra"
    }
    fn id(&self) -> &'static str {
        "risk_achievement"
    }
    fn values(&self, ctx: &BinaryContext<'_>) -> Vec<f64> {
        ctx.each(|_, pv| pv.h - pv.down)
    }
}

impl BinaryMeasure for RiskReduction {
    fn key(&self) -> &'static str {
        "rr"
    }
    fn id(&self) -> &'static str {
        "risk_reduction"
    }
    fn values(&self, ctx: &BinaryContext<'_>) -> Vec<f64> {
        ctx.each(|_, pv| pv.up - pv.h)
    }
}

impl BinaryMeasure for Covariance {
    fn key(&self) -> &'static str {
        "cov"
    }
    fn id(&self) -> &'static str {
        "covariance"
    }
    fn values(&self, ctx: &BinaryContext<'_>) -> Vec<f64> {
        ctx.each(|pi, pv| pi * (pv.up - pv.h))
    }
}

impl BinaryMeasure for CovarianceNormalized {
    fn key(&self) -> &'static str {
        "cov-norm"
    }
    fn id(&self) -> &'static str {
        "covariance_normalized"
    }
    /// Covariance importance divided by its sum; all zeros when the sum is 0.
    fn values(&self, ctx: &BinaryContext<'_>) -> Vec<f64> {
        normalize(Covariance.values(ctx))
    }
}

impl BinaryMeasure for Information {
    fn key(&self) -> &'static str {
        "info"
    }
    fn id(&self) -> &'static str {
        "information"
    }
    fn values(&self, ctx: &BinaryContext<'_>) -> Vec<f64> {
        ctx.each(information_from_pivot)
    }
}

pub(crate) fn normalize(values: Vec<f64>) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        vec![0.0; values.len()]
    } else {
        values.into_iter().map(|v| v / total).collect()
    }
}

/// Mutual information between X_i and X from the joint law
/// P{X_i = y, X = x} = p_i^y p̄_i^(1−y) h(p,y_i)^x h̄(p,y_i)^(1−x).
pub(crate) fn information_from_pivot(pi: f64, pv: &Pivot) -> f64 {
    let mut total = 0.0;
    for (py, hy) in [(1.0 - pi, pv.down), (pi, pv.up)] {
        for (cond, marg) in [(1.0 - hy, 1.0 - pv.h), (hy, pv.h)] {
            let joint = py * cond;
            if joint > 0.0 {
                total += joint * (cond / marg).log2();
            }
        }
    }
    total
}

/// Measures available by key, in a fixed display order.
pub struct BinaryRegistry {
    measures: Vec<Box<dyn BinaryMeasure>>,
}

impl Default for BinaryRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Birnbaum));
        r.register(Box::new(RiskAchievement));
        r.register(Box::new(RiskReduction));
        r.register(Box::new(Covariance));
        r.register(Box::new(CovarianceNormalized));
        r.register(Box::new(Information));
        r
    }
}

impl BinaryRegistry {
    pub fn empty() -> Self {
        Self {
            measures: Vec::new(),
        }
    }

    /// Adds a measure; a measure with the same key is replaced in place.
    pub fn register(&mut self, measure: Box<dyn BinaryMeasure>) {
        match self.measures.iter().position(|m| m.key() == measure.key()) {
            Some(pos) => self.measures[pos] = measure,
            None => self.measures.push(measure),
        }
    }

    pub fn keys(&self) -> Vec<&'static str> {
        self.measures.iter().map(|m| m.key()).collect()
    }

    pub fn get(&self, key: &str) -> Result<&dyn BinaryMeasure> {
        self.measures
            .iter()
            .find(|m| m.key() == key || m.id() == key)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownMeasure(key.to_owned()))
    }

    pub fn evaluate(
        &self,
        key: &str,
        sf: &StructureFunction,
        p: &ProbabilityVector,
    ) -> Result<ImportanceReport> {
        let measure = self.get(key)?;
        Ok(measure.report(&BinaryContext::new(sf, p)?))
    }

    /// Every registered measure on one shared set of pivots.
    pub fn evaluate_all(
        &self,
        sf: &StructureFunction,
        p: &ProbabilityVector,
    ) -> Result<Vec<ImportanceReport>> {
        let ctx = BinaryContext::new(sf, p)?;
        Ok(self.measures.iter().map(|m| m.report(&ctx)).collect())
    }
}

fn eval(measure: &dyn BinaryMeasure, sf: &StructureFunction, p: &ProbabilityVector) -> Result<ImportanceReport> {
    Ok(measure.report(&BinaryContext::new(sf, p)?))
}

/// I^B(i) = h(p,1_i) − h(p,0_i).
pub fn birnbaum(sf: &StructureFunction, p: &ProbabilityVector) -> Result<ImportanceReport> {
    eval(&Birnbaum, sf, p)
}

/// h(p) − h(p,0_i).
pub fn risk_achievement(sf: &StructureFunction, p: &ProbabilityVector) -> Result<ImportanceReport> {
    eval(&RiskAchievement, sf, p)
}

/// h(p,1_i) − h(p).
pub fn risk_reduction(sf: &StructureFunction, p: &ProbabilityVector) -> Result<ImportanceReport> {
    eval(&RiskReduction, sf, p)
}

/// cov(X_i, φ(X)) = p_i (h(p,1_i) − h(p)).
pub fn covariance_importance(sf: &StructureFunction, p: &ProbabilityVector) -> Result<ImportanceReport> {
    eval(&Covariance, sf, p)
}

pub fn covariance_normalized(sf: &StructureFunction, p: &ProbabilityVector) -> Result<ImportanceReport> {
    eval(&CovarianceNormalized, sf, p)
}

/// Mutual information I(X_i | X) in bits.
pub fn information_importance(sf: &StructureFunction, p: &ProbabilityVector) -> Result<ImportanceReport> {
    eval(&Information, sf, p)
}

/// Information importance of component `i` in a pure series system,
/// written with the coproduct ∐ q_j = 1 − Π (1 − q_j) of the unreliabilities.
pub fn information_series_closed_form(p: &ProbabilityVector, i: usize) -> Result<f64> {
    if i == 0 || i > p.len() {
        return Err(Error::BadComponent { id: i, n: p.len() });
    }
    let ps = p.as_slice();
    let pi = ps[i - 1];
    let prod_all: f64 = ps.iter().product();
    let prod_others: f64 = ps
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i - 1)
        .map(|(_, &v)| v)
        .product();
    // ∐_{j≠i} p̄_j and ∐_j p̄_j
    let coprod_others = 1.0 - prod_others;
    let coprod_all = 1.0 - prod_all;
    let first = if pi * coprod_others == 0.0 {
        0.0
    } else {
        pi * coprod_others * (coprod_others / coprod_all).log2()
    };
    Ok(first - weighted_log2(prod_all, pi) - weighted_log2(1.0 - pi, coprod_all))
}

/// p_j H(h(p,1_j)) + p̄_j H(h(p,0_j)), the conditional entropy H(X | X_j).
/// Component `i` is at least as informative as `j` iff this quantity for
/// `j` is at least the one for `i`.
pub fn conditional_system_entropy(pi: f64, pv: &Pivot) -> f64 {
    pi * binary_entropy(pv.up) + (1.0 - pi) * binary_entropy(pv.down)
}
