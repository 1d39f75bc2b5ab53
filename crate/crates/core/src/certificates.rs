//! Checks of the module ordering results on concrete inputs.
//!
//! The caller states structural facts ("component i is in series with a
//! module containing these components"); the annotation is verified against
//! the truth table, then each ordering claim that applies is evaluated
//! numerically. This is a test surface, not a prover.

use std::fmt;

use crate::binary::{conditional_system_entropy, BinaryContext, BinaryMeasure, Birnbaum, Covariance, Information};
use crate::error::{Error, Result};
use crate::reliability::ProbabilityVector;
use crate::structure::StructureFunction;

/// Slack allowed before an ordering claim counts as violated.
pub const ORDERING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    Series,
    Parallel,
}

/// `component` is in series (or parallel) with a coherent module made of
/// `module`, i.e. φ(x) = ψ(…, x_i·χ(x_module)) or its parallel analogue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleAnnotation {
    pub kind: ModuleKind,
    pub component: usize,
    pub module: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Covariance and Birnbaum ordering, component in series with a module.
    ModuleSeries,
    /// Same, component parallel to a module.
    ModuleParallel,
    /// Information ordering holds iff H(X|X_j) ≥ H(X|X_i).
    InformationCriterion,
    /// Information ordering, component in series with the rest, with the
    /// extra conditions on h(p,1_j), h(p,1_i).
    InformationSeriesRest,
    /// Parallel analogue with conditions on h(p,0_j), h(p,0_i).
    InformationParallelRest,
    /// Pure series system, p_i ≤ p_j.
    SeriesSystem,
    /// Pure parallel system, p_i ≥ p_j.
    ParallelSystem,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Theorem::ModuleSeries => "module-series",
            Theorem::ModuleParallel => "module-parallel",
            Theorem::InformationCriterion => "info-criterion",
            Theorem::InformationSeriesRest => "info-series-rest",
            Theorem::InformationParallelRest => "info-parallel-rest",
            Theorem::SeriesSystem => "series-system",
            Theorem::ParallelSystem => "parallel-system",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub theorem: Theorem,
    pub measure: &'static str,
    /// The claim is I(pair.0) ≥ I(pair.1).
    pub pair: (usize, usize),
    pub values: (f64, f64),
    pub holds: bool,
}

/// All bit positions of `ids` (1-based) as a list.
fn bits(ids: &[usize]) -> Vec<u32> {
    ids.iter().map(|&id| (id - 1) as u32).collect()
}

fn scatter(index: usize, positions: &[u32]) -> u32 {
    positions
        .iter()
        .enumerate()
        .filter(|(k, _)| index >> k & 1 == 1)
        .fold(0, |acc, (_, &b)| acc | 1 << b)
}

/// Whether φ(x) = ψ(x_rest, x_i·χ(x_module)) for some ψ and χ.
pub fn factors_as_series_module(sf: &StructureFunction, component: usize, module: &[usize]) -> bool {
    let n = sf.n();
    let module_bits = bits(module);
    let rest: Vec<u32> = (0..n as u32)
        .filter(|b| *b != (component - 1) as u32 && !module_bits.contains(b))
        .collect();
    let ibit = 1u32 << (component - 1);
    let all_module = module_bits.iter().fold(0u32, |acc, &b| acc | 1 << b);
    let rest_count = 1usize << rest.len();
    let module_count = 1usize << module_bits.len();

    let down: Vec<bool> = (0..rest_count)
        .map(|r| sf.eval(scatter(r, &rest)))
        .collect();
    // with x_i = 0 the module must not matter
    for (r, &d) in down.iter().enumerate() {
        let base = scatter(r, &rest);
        if (0..module_count).any(|m| sf.eval(base | scatter(m, &module_bits)) != d) {
            return false;
        }
    }
    let up: Vec<bool> = (0..rest_count)
        .map(|r| sf.eval(scatter(r, &rest) | ibit | all_module))
        .collect();
    let Some(pivot) = (0..rest_count).find(|&r| up[r] != down[r]) else {
        // the module input never matters: any χ fits
        return (0..rest_count).all(|r| {
            let base = scatter(r, &rest) | ibit;
            (0..module_count).all(|m| sf.eval(base | scatter(m, &module_bits)) == down[r])
        });
    };
    let pivot_base = scatter(pivot, &rest) | ibit;
    (0..module_count).all(|m| {
        let mm = scatter(m, &module_bits);
        let chi = sf.eval(pivot_base | mm) == up[pivot];
        (0..rest_count).all(|r| {
            let expected = if chi { up[r] } else { down[r] };
            sf.eval(scatter(r, &rest) | ibit | mm) == expected
        })
    })
}

/// Parallel analogue, checked on the dual structure.
pub fn factors_as_parallel_module(sf: &StructureFunction, component: usize, module: &[usize]) -> bool {
    factors_as_series_module(&sf.dual(), component, module)
}

fn validate(sf: &StructureFunction, a: &ModuleAnnotation) -> Result<()> {
    let n = sf.n();
    let bad = |msg: String| Err(Error::BadAnnotation(msg));
    if a.component == 0 || a.component > n {
        return bad(format!("component {} out of range 1..={n}", a.component));
    }
    if a.module.is_empty() {
        return bad("module is empty".into());
    }
    let mut seen = vec![false; n + 1];
    for &j in &a.module {
        if j == 0 || j > n {
            return bad(format!("module member {j} out of range 1..={n}"));
        }
        if j == a.component {
            return bad(format!("component {j} cannot be inside its own module"));
        }
        if seen[j] {
            return bad(format!("module member {j} listed twice"));
        }
        seen[j] = true;
    }
    let fits = match a.kind {
        ModuleKind::Series => factors_as_series_module(sf, a.component, &a.module),
        ModuleKind::Parallel => factors_as_parallel_module(sf, a.component, &a.module),
    };
    if !fits {
        return bad(format!(
            "structure does not place component {} {} the module {:?}",
            a.component,
            match a.kind {
                ModuleKind::Series => "in series with",
                ModuleKind::Parallel => "parallel to",
            },
            a.module
        ));
    }
    Ok(())
}

fn claim(theorem: Theorem, measure: &'static str, values: &[f64], i: usize, j: usize) -> Certificate {
    let (vi, vj) = (values[i - 1], values[j - 1]);
    Certificate {
        theorem,
        measure,
        pair: (i, j),
        values: (vi, vj),
        holds: vi >= vj - ORDERING_TOLERANCE,
    }
}

/// Evaluates every ordering claim whose hypotheses hold for `sf` at `p`
/// under the given annotations. Pure series/parallel systems and the
/// information criterion are checked without annotations.
pub fn ordering_certificates(
    sf: &StructureFunction,
    p: &ProbabilityVector,
    annotations: &[ModuleAnnotation],
) -> Result<Vec<Certificate>> {
    let ctx = BinaryContext::new(sf, p)?;
    if !annotations.is_empty() {
        sf.require_coherent()?;
    }
    for a in annotations {
        validate(sf, a)?;
    }
    let cov = Covariance.values(&ctx);
    let bir = Birnbaum.values(&ctx);
    let info = Information.values(&ctx);
    let ps = p.as_slice();
    let n = sf.n();
    let mut out = Vec::new();

    for a in annotations {
        let i = a.component;
        let rest_is_module = a.module.len() == n - 1;
        for &j in &a.module {
            let (pi, pj) = (ps[i - 1], ps[j - 1]);
            let (theorem, hyp) = match a.kind {
                ModuleKind::Series => (Theorem::ModuleSeries, pi <= pj),
                ModuleKind::Parallel => (Theorem::ModuleParallel, pi >= pj),
            };
            if !hyp {
                continue;
            }
            out.push(claim(theorem, "covariance", &cov, i, j));
            out.push(claim(theorem, "birnbaum", &bir, i, j));
            if rest_is_module {
                let (hi, hj) = match a.kind {
                    ModuleKind::Series => (ctx.pivots[i - 1].up, ctx.pivots[j - 1].up),
                    ModuleKind::Parallel => (ctx.pivots[i - 1].down, ctx.pivots[j - 1].down),
                };
                if (0.5 >= hj && hj >= hi) || (0.5 <= hj && hj <= hi) {
                    let theorem = match a.kind {
                        ModuleKind::Series => Theorem::InformationSeriesRest,
                        ModuleKind::Parallel => Theorem::InformationParallelRest,
                    };
                    out.push(claim(theorem, "information", &info, i, j));
                }
            }
        }
    }

    let series = sf.is_series();
    let parallel = sf.is_parallel();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let (pi, pj) = (ps[i - 1], ps[j - 1]);
            if series && pi <= pj {
                out.push(claim(Theorem::SeriesSystem, "information", &info, i, j));
            }
            if parallel && pi >= pj {
                out.push(claim(Theorem::ParallelSystem, "information", &info, i, j));
            }
            if i < j {
                let ci = conditional_system_entropy(pi, &ctx.pivots[i - 1]);
                let cj = conditional_system_entropy(pj, &ctx.pivots[j - 1]);
                let d_info = info[i - 1] - info[j - 1];
                let d_crit = cj - ci;
                let agree = (d_info >= 0.0) == (d_crit >= 0.0)
                    || d_info.abs() <= ORDERING_TOLERANCE
                    || d_crit.abs() <= ORDERING_TOLERANCE;
                out.push(Certificate {
                    theorem: Theorem::InformationCriterion,
                    measure: "information",
                    pair: (i, j),
                    values: (info[i - 1], info[j - 1]),
                    holds: agree,
                });
            }
        }
    }
    Ok(out)
}
