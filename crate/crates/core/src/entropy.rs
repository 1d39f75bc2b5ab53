//! Shannon entropy in bits, with 0·log 0 = 0.

use crate::error::{Error, Result};

/// −Σ p log2 p over a probability mass vector.
pub fn entropy_of(masses: &[f64]) -> f64 {
    -masses.iter().map(|&m| xlog2x(m)).sum::<f64>()
}

/// m·log2(m), zero at m = 0.
#[inline]
pub fn xlog2x(m: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else {
        m * m.log2()
    }
}

/// c·log2(v) with the convention that a zero coefficient kills the term.
#[inline]
pub(crate) fn weighted_log2(c: f64, v: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * v.log2()
    }
}

/// Binary entropy H(p).
pub fn entropy(p: f64) -> Result<f64> {
    check(p)?;
    Ok(binary_entropy(p))
}

pub(crate) fn binary_entropy(p: f64) -> f64 {
    -(xlog2x(p) + xlog2x(1.0 - p))
}

fn check(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            component: 0,
            value: p,
        })
    }
}

/// Joint law of two binary variables; `mass[u][v] = P{U = u, V = v}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryJoint {
    pub mass: [[f64; 2]; 2],
}

impl BinaryJoint {
    pub fn new(mass: [[f64; 2]; 2]) -> Result<Self> {
        let total: f64 = mass.iter().flatten().sum();
        if mass.iter().flatten().any(|m| !(0.0..=1.0).contains(m)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbability {
                component: 0,
                value: total,
            });
        }
        Ok(Self { mass })
    }

    pub fn marginal_u(&self) -> [f64; 2] {
        [self.mass[0][0] + self.mass[0][1], self.mass[1][0] + self.mass[1][1]]
    }

    pub fn marginal_v(&self) -> [f64; 2] {
        [self.mass[0][0] + self.mass[1][0], self.mass[0][1] + self.mass[1][1]]
    }

    pub fn joint_entropy(&self) -> f64 {
        entropy_of(&[self.mass[0][0], self.mass[0][1], self.mass[1][0], self.mass[1][1]])
    }

    /// H(V | U) = −Σ p(u,v) log p(v | u).
    pub fn conditional_entropy_v_given_u(&self) -> f64 {
        let pu = self.marginal_u();
        -(0..2)
            .flat_map(|u| (0..2).map(move |v| (u, v)))
            .map(|(u, v)| {
                let m = self.mass[u][v];
                if m == 0.0 {
                    0.0
                } else {
                    m * (m / pu[u]).log2()
                }
            })
            .sum::<f64>()
    }

    /// I(U | V) = H(U) + H(V) − H(U, V).
    pub fn mutual_information(&self) -> f64 {
        entropy_of(&self.marginal_u()) + entropy_of(&self.marginal_v()) - self.joint_entropy()
    }
}
