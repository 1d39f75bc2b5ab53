use super::{state_members, StructureFunction};

/// Minimal path and cut sets as component bitmasks, each list sorted by
/// (size, mask).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCutSets {
    pub paths: Vec<u32>,
    pub cuts: Vec<u32>,
}

impl PathCutSets {
    pub fn path_lists(&self) -> Vec<Vec<usize>> {
        self.paths.iter().map(|&m| state_members(m)).collect()
    }

    pub fn cut_lists(&self) -> Vec<Vec<usize>> {
        self.cuts.iter().map(|&m| state_members(m)).collect()
    }

    /// max over paths of min over members.
    pub fn eval_paths(&self, state: u32) -> bool {
        self.paths.iter().any(|&p| p & !state == 0)
    }

    /// min over cuts of max over members.
    pub fn eval_cuts(&self, state: u32) -> bool {
        self.cuts.iter().all(|&k| state & k != 0)
    }

    /// System lifetime from component lifetimes via the path sets.
    pub fn lifetime(&self, t: &[f64]) -> f64 {
        self.paths
            .iter()
            .map(|&p| {
                let mut m = p;
                let mut min = f64::INFINITY;
                while m != 0 {
                    let b = m.trailing_zeros() as usize;
                    min = min.min(t[b]);
                    m &= m - 1;
                }
                min
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// System lifetime via the cut sets; equals [`Self::lifetime`].
    pub fn lifetime_from_cuts(&self, t: &[f64]) -> f64 {
        self.cuts
            .iter()
            .map(|&k| {
                let mut m = k;
                let mut max = f64::NEG_INFINITY;
                while m != 0 {
                    let b = m.trailing_zeros() as usize;
                    max = max.max(t[b]);
                    m &= m - 1;
                }
                max
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn sort_family(mut family: Vec<u32>) -> Vec<u32> {
    family.sort_by_key(|&m| (m.count_ones(), m));
    family
}

pub(super) fn compute(sf: &StructureFunction) -> PathCutSets {
    let full = sf.full_state();
    let bits = |s: u32| (0..sf.n()).map(move |b| 1u32 << b).filter(move |m| s & m != 0);
    let mut paths = Vec::new();
    let mut cuts = Vec::new();
    for s in 0..=full {
        if sf.eval(s) && bits(s).all(|m| !sf.eval(s ^ m)) {
            paths.push(s);
        }
        let rest = full ^ s;
        if !sf.eval(rest) && bits(s).all(|m| sf.eval(rest | m)) {
            cuts.push(s);
        }
    }
    PathCutSets {
        paths: sort_family(paths),
        cuts: sort_family(cuts),
    }
}
