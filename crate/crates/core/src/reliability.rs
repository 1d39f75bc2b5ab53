//! Exact reliability polynomial h_φ(p) by folding the truth table.

use crate::error::{Error, Result};
use crate::structure::StructureFunction;

/// Component reliabilities p_i = P{X_i = 1}, index 0 is component 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some((idx, &value)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidProbability {
                component: idx + 1,
                value,
            });
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// p_i for a 1-based component id.
    pub fn get(&self, id: usize) -> f64 {
        self.0[id - 1]
    }

    /// 1 − p componentwise.
    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|p| 1.0 - p).collect())
    }

    /// A copy with p_i replaced by `value`.
    pub fn with(&self, id: usize, value: f64) -> Result<Self> {
        let mut p = self.0.clone();
        p[id - 1] = value;
        Self::new(p)
    }

    pub(crate) fn check_len(&self, sf: &StructureFunction) -> Result<()> {
        if self.0.len() != sf.n() {
            Err(Error::DimensionMismatch {
                expected: sf.n(),
                got: self.0.len(),
            })
        } else {
            Ok(())
        }
    }
}

impl AsRef<[f64]> for ProbabilityVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// E φ(X) for independent X_i ~ Bernoulli(p[i]); no range checks.
///
/// Each 64-state block is reduced by folding out its low six variables,
/// then the block values are folded over the remaining variables. Every
/// step is a convex combination, so round-off stays at a few ulps.
pub(crate) fn expectation(sf: &StructureFunction, p: &[f64]) -> f64 {
    let n = sf.n();
    let low = n.min(6);
    let mut level: Vec<f64> = sf
        .words()
        .iter()
        .map(|&w| fold_word(w, &p[..low]))
        .collect();
    for &pv in &p[low..] {
        let q = 1.0 - pv;
        level = level
            .chunks_exact(2)
            .map(|pair| q * pair[0] + pv * pair[1])
            .collect();
    }
    level[0]
}

fn fold_word(word: u64, p: &[f64]) -> f64 {
    let mut buf = [0.0f64; 64];
    let width = 1usize << p.len();
    for (k, slot) in buf.iter_mut().enumerate().take(width) {
        *slot = (word >> k & 1) as f64;
    }
    let mut len = width;
    for &pv in p {
        let q = 1.0 - pv;
        len /= 2;
        for k in 0..len {
            buf[k] = q * buf[2 * k] + pv * buf[2 * k + 1];
        }
    }
    buf[0]
}

/// h_φ(p) = P{φ(X) = 1}.
pub fn reliability(sf: &StructureFunction, p: &ProbabilityVector) -> Result<f64> {
    p.check_len(sf)?;
    Ok(expectation(sf, p.as_slice()))
}

/// h_φ(p, y_i): reliability with component `i` pinned to state `y`.
pub fn reliability_conditional(
    sf: &StructureFunction,
    p: &ProbabilityVector,
    i: usize,
    y: bool,
) -> Result<f64> {
    p.check_len(sf)?;
    sf.check_component(i)?;
    let mut pinned = p.as_slice().to_vec();
    pinned[i - 1] = if y { 1.0 } else { 0.0 };
    Ok(expectation(sf, &pinned))
}

/// h, h(·,1_i) and h(·,0_i) for one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pivot {
    pub h: f64,
    pub up: f64,
    pub down: f64,
}

/// Pivot values for every component, in component order.
pub fn pivots(sf: &StructureFunction, p: &ProbabilityVector) -> Result<Vec<Pivot>> {
    p.check_len(sf)?;
    let h = expectation(sf, p.as_slice());
    let mut work = p.as_slice().to_vec();
    Ok((0..sf.n())
        .map(|idx| {
            let orig = work[idx];
            work[idx] = 1.0;
            let up = expectation(sf, &work);
            work[idx] = 0.0;
            let down = expectation(sf, &work);
            work[idx] = orig;
            Pivot { h, up, down }
        })
        .collect())
}

/// Reliability of a k-out-of-n:G system from the Poisson-binomial tail,
/// without building a truth table.
pub fn koutofn_reliability(k: usize, p: &ProbabilityVector) -> Result<f64> {
    let n = p.len();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    // dist[c] = P{exactly c of the components seen so far work}
    let mut dist = vec![0.0f64; n + 1];
    dist[0] = 1.0;
    for (seen, &pi) in p.as_slice().iter().enumerate() {
        for c in (0..=seen + 1).rev() {
            let stay = if c <= seen { dist[c] * (1.0 - pi) } else { 0.0 };
            let from = if c > 0 { dist[c - 1] * pi } else { 0.0 };
            dist[c] = stay + from;
        }
    }
    Ok(dist[k..].iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sf(text: &str) -> StructureFunction {
        StructureFunction::from_expression(text).unwrap()
    }

    fn pv(p: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(p.to_vec()).unwrap()
    }

    /// Σ over states of Π p^x (1-p)^(1-x), straight from the definition.
    fn brute(sf: &StructureFunction, p: &[f64]) -> f64 {
        (0..sf.num_states() as u32)
            .filter(|&s| sf.eval(s))
            .map(|s| {
                p.iter()
                    .enumerate()
                    .map(|(b, &pi)| if s >> b & 1 == 1 { pi } else { 1.0 - pi })
                    .product::<f64>()
            })
            .sum()
    }

    #[test]
    fn worked_examples() {
        assert_relative_eq!(reliability(&sf("series(1,2)"), &pv(&[0.9, 0.8])).unwrap(), 0.72, epsilon = 1e-15);
        let k = sf("koutofn(2;1,2,3)");
        assert_relative_eq!(reliability(&k, &pv(&[0.5; 3])).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(reliability(&k, &pv(&[0.1, 0.2, 0.3])).unwrap(), 0.098, epsilon = 1e-15);
    }

    #[test]
    fn conditional_examples() {
        let s = sf("series(1,2)");
        let p = pv(&[0.9, 0.8]);
        assert_eq!(reliability_conditional(&s, &p, 1, false).unwrap(), 0.0);
        assert_relative_eq!(reliability_conditional(&s, &p, 1, true).unwrap(), 0.8, epsilon = 1e-15);
        let k = sf("koutofn(2;1,2,3)");
        let p = pv(&[0.1, 0.2, 0.3]);
        assert_relative_eq!(reliability_conditional(&k, &p, 1, true).unwrap(), 0.44, epsilon = 1e-15);
        assert!(matches!(
            reliability_conditional(&k, &p, 4, true),
            Err(Error::BadComponent { id: 4, n: 3 })
        ));
    }

    #[test]
    fn validates_inputs() {
        assert!(matches!(
            ProbabilityVector::new(vec![0.5, 1.2]),
            Err(Error::InvalidProbability { component: 2, .. })
        ));
        assert!(ProbabilityVector::new(vec![f64::NAN]).is_err());
        assert!(matches!(
            reliability(&sf("series(1,2)"), &pv(&[0.5])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn folding_matches_enumeration_on_large_tables() {
        let s = sf("parallel(series(1,2,3),koutofn(3;4,5,6,7,8),series(9,parallel(10,11)))");
        let p: Vec<f64> = (1..=11).map(|i| 0.05 + 0.08 * i as f64).collect();
        assert_relative_eq!(expectation(&s, &p), brute(&s, &p), epsilon = 1e-14);
    }

    #[test]
    fn k_out_of_n_tail() {
        assert_relative_eq!(koutofn_reliability(2, &pv(&[0.5; 3])).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(koutofn_reliability(1, &pv(&[0.37])).unwrap(), 0.37);
        assert_relative_eq!(koutofn_reliability(2, &pv(&[0.9, 0.8])).unwrap(), 0.72, epsilon = 1e-15);
        assert!(koutofn_reliability(0, &pv(&[0.5])).is_err());
        assert!(koutofn_reliability(3, &pv(&[0.5, 0.5])).is_err());
        let p = pv(&[0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.95]);
        for k in 1..=7 {
            let table = StructureFunction::k_out_of_n(k, 7).unwrap();
            assert_relative_eq!(
                koutofn_reliability(k, &p).unwrap(),
                reliability(&table, &p).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn degenerate_probabilities() {
        let s = sf("parallel(1,series(2,3))");
        assert_eq!(reliability(&s, &pv(&[0.0, 1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(reliability(&s, &pv(&[0.0, 1.0, 0.0])).unwrap(), 0.0);
    }
}
