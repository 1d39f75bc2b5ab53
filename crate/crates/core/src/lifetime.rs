//! Component lifetime distributions and the lifetime model of a system.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::structure::{PathCutSets, SignedDomination, StructureFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LifetimeDistribution {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    /// Step distribution putting mass 1/m on each (sorted) sample.
    Empirical { samples: Vec<f64> },
}

impl LifetimeDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Self::Weibull { shape, scale }.validated()
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        Self::Empirical { samples }.validated()
    }

    /// Checks parameters and sorts empirical samples.
    pub fn validated(self) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidDistribution(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            Self::Exponential { rate } => {
                positive("rate", rate)?;
                Ok(self)
            }
            Self::Weibull { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
                Ok(self)
            }
            Self::Empirical { mut samples } => {
                if samples.is_empty() {
                    return Err(Error::InvalidDistribution("empirical sample is empty".into()));
                }
                if let Some(bad) = samples.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(Error::InvalidDistribution(format!(
                        "lifetimes must be finite and nonnegative, got {bad}"
                    )));
                }
                samples.sort_by(f64::total_cmp);
                Ok(Self::Empirical { samples })
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::Weibull { .. } => "weibull",
            Self::Empirical { .. } => "empirical",
        }
    }

    pub fn exponential_rate(&self) -> Option<f64> {
        match self {
            Self::Exponential { rate } => Some(*rate),
            _ => None,
        }
    }

    /// F(t) = P{T ≤ t}.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            Self::Exponential { rate } => -(-rate * t).exp_m1(),
            Self::Weibull { shape, scale } => -(-(t / scale).powf(*shape)).exp_m1(),
            Self::Empirical { samples } => {
                samples.partition_point(|&x| x <= t) as f64 / samples.len() as f64
            }
        }
    }

    /// F̄(t) = P{T > t}.
    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        match self {
            Self::Exponential { rate } => (-rate * t).exp(),
            Self::Weibull { shape, scale } => (-(t / scale).powf(*shape)).exp(),
            Self::Empirical { samples } => {
                samples[samples.partition_point(|&x| x <= t)..].len() as f64 / samples.len() as f64
            }
        }
    }

    /// Smallest t with F(t) ≥ u.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            Self::Empirical { samples } => {
                let m = samples.len();
                let k = ((u * m as f64).ceil() as usize).clamp(1, m);
                samples[k - 1]
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Weibull { shape, scale } => scale * gamma(1.0 + 1.0 / shape),
            Self::Empirical { samples } => samples.iter().sum::<f64>() / samples.len() as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / (rate * rate),
            Self::Weibull { shape, scale } => {
                let g1 = gamma(1.0 + 1.0 / shape);
                scale * scale * (gamma(1.0 + 2.0 / shape) - g1 * g1)
            }
            Self::Empirical { samples } => {
                let mean = self.mean();
                samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / samples.len() as f64
            }
        }
    }

    /// Distinct atoms of a step distribution; empty for continuous ones.
    pub fn jump_points(&self) -> Vec<f64> {
        match self {
            Self::Empirical { samples } => {
                let mut pts = samples.clone();
                pts.dedup();
                pts
            }
            _ => Vec::new(),
        }
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

/// A coherent structure together with one lifetime distribution per
/// component, plus the signed-domination terms used by the covariance
/// formulas.
#[derive(Debug, Clone)]
pub struct LifetimeModel {
    sf: StructureFunction,
    dists: Vec<LifetimeDistribution>,
    domination: SignedDomination,
    /// For component k+1: (S, b(S ∪ {k+1})) with k+1 ∉ S.
    terms: Vec<Vec<(u32, i32)>>,
}

impl LifetimeModel {
    pub fn new(sf: StructureFunction, dists: Vec<LifetimeDistribution>) -> Result<Self> {
        if dists.len() != sf.n() {
            return Err(Error::DimensionMismatch {
                expected: sf.n(),
                got: dists.len(),
            });
        }
        sf.require_coherent()?;
        let dists = dists
            .into_iter()
            .map(LifetimeDistribution::validated)
            .collect::<Result<Vec<_>>>()?;
        let domination = sf.signed_domination();
        let terms = (1..=sf.n()).map(|i| domination.containing(i)).collect();
        Ok(Self {
            sf,
            dists,
            domination,
            terms,
        })
    }

    pub fn sf(&self) -> &StructureFunction {
        &self.sf
    }

    pub fn n(&self) -> usize {
        self.sf.n()
    }

    pub fn dists(&self) -> &[LifetimeDistribution] {
        &self.dists
    }

    pub fn dist(&self, id: usize) -> &LifetimeDistribution {
        &self.dists[id - 1]
    }

    pub fn domination(&self) -> &SignedDomination {
        &self.domination
    }

    pub(crate) fn terms(&self, id: usize) -> &[(u32, i32)] {
        &self.terms[id - 1]
    }

    pub fn path_cut_sets(&self) -> PathCutSets {
        self.sf
            .minimal_path_cut_sets()
            .expect("model structure is coherent")
    }

    /// Survival probabilities of all components at `t`.
    pub fn survivals(&self, t: f64) -> Vec<f64> {
        self.dists.iter().map(|d| d.survival(t)).collect()
    }

    /// Right end of the integration/search range: the largest
    /// `1 - tail` quantile over all components.
    pub fn horizon(&self, tail: f64) -> f64 {
        self.dists
            .iter()
            .map(|d| d.quantile(1.0 - tail))
            .fold(0.0, f64::max)
    }

    /// Sorted distinct jump points of all step components.
    pub fn jump_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.dists.iter().flat_map(|d| d.jump_points()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// All component lifetimes are exponential.
    pub fn exponential_rates(&self) -> Result<Vec<f64>> {
        self.dists
            .iter()
            .enumerate()
            .map(|(k, d)| d.exponential_rate().ok_or(Error::NonExponential { component: k + 1 }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_basics() {
        let d = LifetimeDistribution::exponential(2.0).unwrap();
        assert_relative_eq!(d.cdf(0.5), 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(d.survival(0.5) + d.cdf(0.5), 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.quantile(0.5), 2f64.ln() / 2.0, epsilon = 1e-15);
        assert_eq!(d.mean(), 0.5);
        assert_eq!(d.variance(), 0.25);
        assert_eq!(d.cdf(-1.0), 0.0);
        assert!(LifetimeDistribution::exponential(0.0).is_err());
        assert!(LifetimeDistribution::exponential(f64::NAN).is_err());
    }

    #[test]
    fn weibull_moments() {
        // shape 1 is exponential with rate 1/scale
        let d = LifetimeDistribution::weibull(1.0, 2.0).unwrap();
        assert_relative_eq!(d.mean(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(d.variance(), 4.0, epsilon = 1e-12);
        // shape 2: mean θ√π/2, variance θ²(1 − π/4)
        let r = LifetimeDistribution::weibull(2.0, 1.5).unwrap();
        assert_relative_eq!(r.mean(), 1.5 * std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-12);
        assert_relative_eq!(r.variance(), 2.25 * (1.0 - std::f64::consts::FRAC_PI_4), epsilon = 1e-12);
        assert_relative_eq!(r.cdf(r.quantile(0.3)), 0.3, epsilon = 1e-14);
        assert!(LifetimeDistribution::weibull(-1.0, 1.0).is_err());
    }

    #[test]
    fn empirical_step_function() {
        let d = LifetimeDistribution::empirical(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(d, LifetimeDistribution::Empirical { samples: vec![1.0, 2.0, 2.0, 3.0] });
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.cdf(1.0), 0.25);
        assert_eq!(d.cdf(2.0), 0.75);
        assert_eq!(d.survival(2.0), 0.25);
        assert_eq!(d.cdf(3.0), 1.0);
        assert_eq!(d.quantile(0.0), 1.0);
        assert_eq!(d.quantile(0.25), 1.0);
        assert_eq!(d.quantile(0.26), 2.0);
        assert_eq!(d.quantile(1.0), 3.0);
        assert_eq!(d.mean(), 2.0);
        assert_eq!(d.variance(), 0.5);
        assert_eq!(d.jump_points(), vec![1.0, 2.0, 3.0]);
        assert!(LifetimeDistribution::empirical(vec![]).is_err());
        assert!(LifetimeDistribution::empirical(vec![-1.0]).is_err());
    }

    #[test]
    fn model_validation() {
        let sf = StructureFunction::from_expression("series(1,2)").unwrap();
        let e = LifetimeDistribution::exponential(1.0).unwrap();
        assert!(LifetimeModel::new(sf.clone(), vec![e.clone()]).is_err());
        let m = LifetimeModel::new(sf, vec![e.clone(), e.clone()]).unwrap();
        assert_eq!(m.terms(1), &[(0b10, 1)]);
        assert_eq!(m.exponential_rates().unwrap(), vec![1.0, 1.0]);
        let irrelevant = StructureFunction::from_table_str("0101").unwrap();
        assert!(matches!(
            LifetimeModel::new(irrelevant, vec![e.clone(), e]),
            Err(Error::NotCoherent(_))
        ));
    }

    #[test]
    fn serde_shape() {
        let d: LifetimeDistribution = serde_json::from_str(r#"{"exponential":{"rate":2.0}}"#).unwrap();
        assert_eq!(d, LifetimeDistribution::Exponential { rate: 2.0 });
        let w: LifetimeDistribution =
            serde_json::from_str(r#"{"weibull":{"shape":1.5,"scale":3}}"#).unwrap();
        assert_eq!(w, LifetimeDistribution::Weibull { shape: 1.5, scale: 3.0 });
        let e: LifetimeDistribution =
            serde_json::from_str(r#"{"empirical":{"samples":[2,1]}}"#).unwrap();
        assert_eq!(e.validated().unwrap().jump_points(), vec![1.0, 2.0]);
    }
}
