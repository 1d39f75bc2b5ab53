use std::collections::BTreeMap;

use super::{state_members, StructureFunction};

/// Multilinear coefficients b(S) with φ(x) = Σ_S b(S) Π_{i∈S} x_i.
///
/// Keys are component bitmasks; zero coefficients are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedDomination {
    n: usize,
    coeffs: BTreeMap<u32, i32>,
}

impl SignedDomination {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, set: u32) -> i32 {
        self.coeffs.get(&set).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, i32)> + '_ {
        self.coeffs.iter().map(|(&s, &b)| (s, b))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(S, b(S ∪ {i}))` for every nonzero coefficient whose set contains
    /// component `i`, with `i` removed from the key.
    pub fn containing(&self, i: usize) -> Vec<(u32, i32)> {
        let bit = 1u32 << (i - 1);
        self.coeffs
            .iter()
            .filter(|(&s, _)| s & bit != 0)
            .map(|(&s, &b)| (s ^ bit, b))
            .collect()
    }

    /// Coefficients listed as (component ids, value).
    pub fn entries(&self) -> Vec<(Vec<usize>, i32)> {
        self.iter().map(|(s, b)| (state_members(s), b)).collect()
    }

    /// Evaluates the multilinear polynomial at real arguments.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.iter()
            .map(|(s, b)| f64::from(b) * product_over(s, x))
            .sum()
    }

    /// Σ_{S ⊆ R} b(S); equals φ(1_R).
    pub fn zeta_at(&self, r: u32) -> i64 {
        self.iter()
            .filter(|&(s, _)| s & !r == 0)
            .map(|(_, b)| i64::from(b))
            .sum()
    }
}

/// Π_{j ∈ set} x_j.
pub(crate) fn product_over(set: u32, x: &[f64]) -> f64 {
    let mut m = set;
    let mut acc = 1.0;
    while m != 0 {
        acc *= x[m.trailing_zeros() as usize];
        m &= m - 1;
    }
    acc
}

/// Subset Möbius transform of the truth table.
pub(super) fn mobius(sf: &StructureFunction) -> SignedDomination {
    let size = sf.num_states();
    let mut a: Vec<i32> = (0..size as u32).map(|s| i32::from(sf.eval(s))).collect();
    for bit in 0..sf.n() {
        let step = 1usize << bit;
        for s in 0..size {
            if s & step != 0 {
                a[s] -= a[s ^ step];
            }
        }
    }
    let coeffs = a
        .into_iter()
        .enumerate()
        .filter(|&(_, b)| b != 0)
        .map(|(s, b)| (s as u32, b))
        .collect();
    SignedDomination { n: sf.n(), coeffs }
}
