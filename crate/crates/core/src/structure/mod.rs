//! Binary structure functions stored as packed truth tables.
//!
//! A state vector `x` is encoded as a `u32` bitmask where bit `i - 1` holds
//! the state of component `i`. Component ids are 1-based everywhere in the
//! public API.

mod domination;
mod expr;
mod sets;

use std::collections::BTreeMap;
use std::fmt;

pub use domination::SignedDomination;
pub(crate) use domination::product_over;
pub use expr::Expr;
pub use sets::PathCutSets;

use crate::error::{Error, Result};
use expr::LOW_BIT_MASKS;

pub const MAX_COMPONENTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureFunction {
    n: usize,
    words: Vec<u64>,
    expr: Option<Expr>,
}

/// Non-fatal findings about a structure built from an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// A component occurs at several leaves, so the module-ordering
    /// results for disjoint modules do not apply.
    DuplicateComponent { id: usize, occurrences: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DuplicateComponent { id, occurrences } => write!(
                f,
                "component {id} appears {occurrences} times; modules are not disjoint"
            ),
        }
    }
}

/// A state where raising one component lowers the system state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonotoneViolation {
    pub component: usize,
    /// State of the other components (bit of `component` cleared).
    pub state: u32,
}

fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn valid_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

impl StructureFunction {
    /// Parses and tabulates a structure expression.
    pub fn from_expression(text: &str) -> Result<Self> {
        Self::from_expr(Expr::parse(text)?)
    }

    pub fn from_expr(expr: Expr) -> Result<Self> {
        let expr = expr.checked()?;
        let leaves = expr.leaves();
        let n = leaves.iter().copied().max().unwrap_or(0);
        if n > MAX_COMPONENTS {
            return Err(Error::TooManyComponents {
                n,
                max: MAX_COMPONENTS,
            });
        }
        let mut seen = vec![false; n + 1];
        for &id in &leaves {
            seen[id] = true;
        }
        if let Some(missing) = (1..=n).find(|&id| !seen[id]) {
            return Err(Error::NonContiguousIds { missing });
        }
        let valid = valid_mask(n);
        let words = (0..word_count(n))
            .map(|b| expr.eval_block(b) & valid)
            .collect();
        Ok(Self {
            n,
            words,
            expr: Some(expr),
        })
    }

    /// Builds a structure from an arbitrary state predicate.
    pub fn from_fn(n: usize, phi: impl Fn(u32) -> bool) -> Result<Self> {
        if n > MAX_COMPONENTS {
            return Err(Error::TooManyComponents {
                n,
                max: MAX_COMPONENTS,
            });
        }
        let mut words = vec![0u64; word_count(n)];
        for state in 0..(1u32 << n) {
            if phi(state) {
                words[(state >> 6) as usize] |= 1 << (state & 63);
            }
        }
        Ok(Self {
            n,
            words,
            expr: None,
        })
    }

    /// Parses a truth table written as `0`/`1` characters, state 0 first.
    pub fn from_table_str(table: &str) -> Result<Self> {
        let bits: Vec<bool> = table
            .chars()
            .filter(|c| !c.is_whitespace())
            .enumerate()
            .map(|(pos, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    position: pos,
                    token: c.to_string(),
                    message: "truth table entries must be 0 or 1".into(),
                }),
            })
            .collect::<Result<_>>()?;
        let len = bits.len();
        if !len.is_power_of_two() || len.trailing_zeros() as usize > MAX_COMPONENTS {
            return Err(Error::BadTableLength { len });
        }
        Self::from_fn(len.trailing_zeros() as usize, |s| bits[s as usize])
    }

    pub fn series(n: usize) -> Self {
        Self::from_expr(Expr::series_of(1..=n)).expect("valid series")
    }

    pub fn parallel(n: usize) -> Self {
        Self::from_expr(Expr::parallel_of(1..=n)).expect("valid parallel")
    }

    pub fn k_out_of_n(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::BadK { k, n });
        }
        Self::from_expr(Expr::k_out_of_n_of(k, 1..=n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        1 << self.n
    }

    pub fn expr(&self) -> Option<&Expr> {
        self.expr.as_ref()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// φ(x) for the state bitmask `state`.
    #[inline]
    pub fn eval(&self, state: u32) -> bool {
        self.words[(state >> 6) as usize] >> (state & 63) & 1 == 1
    }

    /// φ evaluated at a 0/1 state vector.
    pub fn eval_vector(&self, x: &[u8]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let state = x
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &v)| acc | (u32::from(v != 0) << i));
        Ok(self.eval(state))
    }

    pub fn full_state(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    pub fn table_string(&self) -> String {
        (0..self.num_states() as u32)
            .map(|s| if self.eval(s) { '1' } else { '0' })
            .collect()
    }

    pub fn warnings(&self) -> Vec<Warning> {
        let Some(expr) = &self.expr else {
            return Vec::new();
        };
        let mut counts = BTreeMap::new();
        for id in expr.leaves() {
            *counts.entry(id).or_insert(0usize) += 1;
        }
        counts
            .into_iter()
            .filter(|&(_, c)| c > 1)
            .map(|(id, occurrences)| Warning::DuplicateComponent { id, occurrences })
            .collect()
    }

    pub(crate) fn check_component(&self, id: usize) -> Result<()> {
        if id == 0 || id > self.n {
            Err(Error::BadComponent { id, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Calls `f(lo, hi, base_state)` for every pair of table slices that
    /// differ only in component `i`: `lo` holds φ(x,0_i) and `hi` holds
    /// φ(x,1_i) at the same bit positions. Stops when `f` returns false.
    fn for_each_pivot_pair(&self, i: usize, mut f: impl FnMut(u64, u64, u32) -> bool) {
        let bit = i - 1;
        let valid = valid_mask(self.n);
        if bit < 6 {
            let lane = !LOW_BIT_MASKS[bit] & valid;
            let shift = 1u32 << bit;
            for (b, &w) in self.words.iter().enumerate() {
                let lo = w & lane;
                let hi = (w >> shift) & lane;
                if !f(lo, hi, (b as u32) << 6) {
                    return;
                }
            }
        } else {
            let block_bit = 1usize << (bit - 6);
            for b in 0..self.words.len() {
                if b & block_bit != 0 {
                    continue;
                }
                if !f(self.words[b], self.words[b | block_bit], (b as u32) << 6) {
                    return;
                }
            }
        }
    }

    /// First (component, state) where φ(x,0_i) > φ(x,1_i), scanning
    /// components then states in ascending order.
    pub fn monotone_violation(&self) -> Option<MonotoneViolation> {
        for i in 1..=self.n {
            let mut found = None;
            self.for_each_pivot_pair(i, |lo, hi, base| {
                let bad = lo & !hi;
                if bad != 0 {
                    found = Some(base | bad.trailing_zeros());
                    false
                } else {
                    true
                }
            });
            if let Some(state) = found {
                return Some(MonotoneViolation {
                    component: i,
                    state,
                });
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone_violation().is_none()
    }

    /// Components whose state never changes φ.
    pub fn irrelevant_components(&self) -> Vec<usize> {
        (1..=self.n)
            .filter(|&i| {
                let mut relevant = false;
                self.for_each_pivot_pair(i, |lo, hi, _| {
                    relevant = lo != hi;
                    !relevant
                });
                !relevant
            })
            .collect()
    }

    pub fn is_coherent(&self) -> bool {
        self.is_monotone() && self.irrelevant_components().is_empty()
    }

    pub(crate) fn require_coherent(&self) -> Result<()> {
        if let Some(v) = self.monotone_violation() {
            return Err(Error::NotCoherent(format!(
                "raising component {} lowers the system state at state {:#b}",
                v.component, v.state
            )));
        }
        let irrelevant = self.irrelevant_components();
        if !irrelevant.is_empty() {
            return Err(Error::NotCoherent(format!(
                "irrelevant components {irrelevant:?}"
            )));
        }
        Ok(())
    }

    /// The dual structure φ'(x) = 1 − φ(1 − x).
    pub fn dual(&self) -> Self {
        let words = if self.n >= 6 {
            self.words
                .iter()
                .rev()
                .map(|w| !w.reverse_bits())
                .collect()
        } else {
            let width = 1u32 << self.n;
            vec![!(self.words[0].reverse_bits() >> (64 - width)) & valid_mask(self.n)]
        };
        Self {
            n: self.n,
            words,
            expr: None,
        }
    }

    pub fn is_series(&self) -> bool {
        self.same_table(&Self::series(self.n))
    }

    pub fn is_parallel(&self) -> bool {
        self.same_table(&Self::parallel(self.n))
    }

    /// Same truth table with the source expression dropped.
    pub fn without_expr(&self) -> Self {
        Self {
            n: self.n,
            words: self.words.clone(),
            expr: None,
        }
    }

    pub fn same_table(&self, other: &Self) -> bool {
        self.n == other.n && self.words == other.words
    }

    pub fn minimal_path_cut_sets(&self) -> Result<PathCutSets> {
        self.require_coherent()?;
        Ok(sets::compute(self))
    }

    pub fn signed_domination(&self) -> SignedDomination {
        domination::mobius(self)
    }
}

/// Component ids contained in a state bitmask.
pub fn state_members(state: u32) -> Vec<usize> {
    (0..32).filter(|b| state >> b & 1 == 1).map(|b| b + 1).collect()
}

pub fn mask_of(ids: &[usize]) -> u32 {
    ids.iter().fold(0, |acc, &id| acc | 1 << (id - 1))
}
