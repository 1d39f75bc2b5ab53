//! The invariant suite behind `relimp verify`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binary::{BinaryContext, BinaryMeasure, Birnbaum, Covariance, Information, RiskAchievement, RiskReduction};
use crate::certificates::{ordering_certificates, ModuleAnnotation, ModuleKind};
use crate::continuous::{cov_surface, l1_covariance_importance, linf_covariance_importance, ContinuousOptions};
use crate::generate::{module_instance, random_probabilities, random_system};
use crate::lifetime::{LifetimeDistribution, LifetimeModel};
use crate::optimize::log_grid;
use crate::oracle::{exact_binary_covariance, exact_binary_mutual_information, ORACLE_MAX_COMPONENTS};
use crate::reliability::ProbabilityVector;
use crate::structure::{Expr, StructureFunction};

/// Absolute tolerance for identities that hold exactly in real arithmetic.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, outcome: Outcome, detail: impl Into<String>) -> Self {
        Self { name, outcome, detail: detail.into() }
    }

    fn deviation(name: &'static str, dev: f64, tol: f64) -> Self {
        let outcome = if dev <= tol { Outcome::Pass } else { Outcome::Fail };
        Self::new(name, outcome, format!("max deviation {dev:.3e} (tolerance {tol:.0e})"))
    }

    fn skip(name: &'static str, why: &str) -> Self {
        Self::new(name, Outcome::Skip, why)
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.outcome, self.name, self.detail)
    }
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.outcome != Outcome::Fail)
}

fn max_dev(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    pairs.into_iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Series and parallel annotations read off an expression tree: each
/// leaf child of a series (parallel) gate is in series (parallel) with the
/// union of its siblings.
pub fn annotations_from_expr(expr: &Expr) -> Vec<ModuleAnnotation> {
    let mut out = Vec::new();
    collect(expr, &mut out);
    out
}

fn collect(expr: &Expr, out: &mut Vec<ModuleAnnotation>) {
    let (kind, children) = match expr {
        Expr::Component(_) => return,
        Expr::Series(c) => (Some(ModuleKind::Series), c),
        Expr::Parallel(c) => (Some(ModuleKind::Parallel), c),
        Expr::KOutOfN { children, .. } => (None, children),
    };
    if let Some(kind) = kind {
        for (pos, child) in children.iter().enumerate() {
            if let Expr::Component(id) = child {
                let mut module: Vec<usize> = children
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != pos)
                    .flat_map(|(_, c)| c.leaves())
                    .collect();
                module.sort_unstable();
                out.push(ModuleAnnotation { kind, component: *id, module });
            }
        }
    }
    for child in children {
        collect(child, out);
    }
}

/// Checks for one structure function and reliability vector.
pub fn verify_binary(sf: &StructureFunction, p: &ProbabilityVector) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let monotone = match sf.monotone_violation() {
        None => {
            out.push(CheckResult::new("monotonicity", Outcome::Pass, "structure is nondecreasing"));
            true
        }
        Some(v) => {
            out.push(CheckResult::new(
                "monotonicity",
                Outcome::Fail,
                format!("raising component {} from state {:#b} lowers the system state", v.component, v.state),
            ));
            false
        }
    };
    let irrelevant = sf.irrelevant_components();
    out.push(if irrelevant.is_empty() {
        CheckResult::new("relevance", Outcome::Pass, "every component is relevant")
    } else {
        CheckResult::new("relevance", Outcome::Skip, format!("irrelevant components {irrelevant:?}"))
    });
    let coherent = monotone && irrelevant.is_empty();

    let ctx = match BinaryContext::new(sf, p) {
        Ok(ctx) => ctx,
        Err(e) => {
            out.push(CheckResult::new("dimensions", Outcome::Fail, e.to_string()));
            return out;
        }
    };
    let ps = p.as_slice();
    let cov = Covariance.values(&ctx);
    let bir = Birnbaum.values(&ctx);
    let ra = RiskAchievement.values(&ctx);
    let rr = RiskReduction.values(&ctx);
    let info = Information.values(&ctx);

    out.push(CheckResult::deviation(
        "pivotal-identity",
        max_dev(ps.iter().zip(&ctx.pivots).map(|(&pi, pv)| (pv.h, pi * pv.up + (1.0 - pi) * pv.down))),
        IDENTITY_TOLERANCE,
    ));

    let chain = (0..sf.n()).flat_map(|k| {
        let (pi, qi) = (ps[k], 1.0 - ps[k]);
        [(cov[k], qi * ra[k]), (cov[k], pi * rr[k]), (cov[k], pi * qi * bir[k])]
    });
    out.push(CheckResult::deviation("relation-chain", max_dev(chain), IDENTITY_TOLERANCE));

    if monotone {
        let t = IDENTITY_TOLERANCE;
        let bad = (0..sf.n()).find(|&k| {
            !(-t..=0.25 + t).contains(&cov[k]) || !(-t..=1.0 + t).contains(&info[k]) || bir[k] < cov[k] - t
        });
        out.push(match bad {
            None => CheckResult::new("bounds", Outcome::Pass, "0 <= cov <= 1/4, 0 <= info <= 1, birnbaum >= cov"),
            Some(k) => CheckResult::new(
                "bounds",
                Outcome::Fail,
                format!("component {}: cov {}, info {}, birnbaum {}", k + 1, cov[k], info[k], bir[k]),
            ),
        });
    } else {
        out.push(CheckResult::skip("bounds", "structure is not monotone"));
    }

    let dual = sf.dual();
    let q = p.complement();
    match BinaryContext::new(&dual, &q) {
        Ok(dctx) => {
            let dc = Covariance.values(&dctx);
            let di = Information.values(&dctx);
            let pairs = dc.into_iter().zip(cov.iter().copied()).chain(di.into_iter().zip(info.iter().copied()));
            out.push(CheckResult::deviation("duality", max_dev(pairs), IDENTITY_TOLERANCE));
        }
        Err(e) => out.push(CheckResult::new("duality", Outcome::Fail, e.to_string())),
    }

    if sf.n() <= ORACLE_MAX_COMPONENTS {
        let mut dev: f64 = 0.0;
        for i in 1..=sf.n() {
            let c = exact_binary_covariance(sf, p, i).expect("size checked");
            let m = exact_binary_mutual_information(sf, p, i).expect("size checked");
            dev = dev.max((c - cov[i - 1]).abs()).max((m - info[i - 1]).abs());
        }
        out.push(CheckResult::deviation("oracle-equivalence", dev, IDENTITY_TOLERANCE));
    } else {
        out.push(CheckResult::skip("oracle-equivalence", "too many components for enumeration"));
    }

    if coherent {
        out.push(path_cut_check(sf));
    } else {
        out.push(CheckResult::skip("path-cut-sets", "structure is not coherent"));
    }
    out.push(multilinear_check(sf));

    let annotations = match sf.expr() {
        Some(e) if coherent && sf.warnings().is_empty() => annotations_from_expr(e),
        _ => Vec::new(),
    };
    if !monotone {
        out.push(CheckResult::skip("orderings", "structure is not monotone"));
    } else {
        match ordering_certificates(sf, p, &annotations) {
            Ok(certs) => {
                let failed: Vec<_> = certs.iter().filter(|c| !c.holds).collect();
                out.push(match failed.first() {
                    None => CheckResult::new("orderings", Outcome::Pass, format!("{} claims hold", certs.len())),
                    Some(c) => CheckResult::new(
                        "orderings",
                        Outcome::Fail,
                        format!(
                            "{} of {} claims fail; first: {} {} I({}) = {} < I({}) = {}",
                            failed.len(),
                            certs.len(),
                            c.theorem,
                            c.measure,
                            c.pair.0,
                            c.values.0,
                            c.pair.1,
                            c.values.1
                        ),
                    ),
                });
            }
            Err(e) => out.push(CheckResult::new("orderings", Outcome::Fail, e.to_string())),
        }
    }
    out
}

fn path_cut_check(sf: &StructureFunction) -> CheckResult {
    let sets = match sf.minimal_path_cut_sets() {
        Ok(s) => s,
        Err(e) => return CheckResult::new("path-cut-sets", Outcome::Fail, e.to_string()),
    };
    let bad = (0..sf.num_states() as u32)
        .find(|&s| sets.eval_paths(s) != sf.eval(s) || sets.eval_cuts(s) != sf.eval(s));
    if let Some(s) = bad {
        return CheckResult::new("path-cut-sets", Outcome::Fail, format!("representation differs at state {s:#b}"));
    }
    let dual_paths = sf.dual().minimal_path_cut_sets().map(|d| d.paths);
    if dual_paths.as_ref() != Ok(&sets.cuts) {
        return CheckResult::new("path-cut-sets", Outcome::Fail, "cut sets differ from the dual's path sets");
    }
    CheckResult::new(
        "path-cut-sets",
        Outcome::Pass,
        format!("{} path sets, {} cut sets", sets.paths.len(), sets.cuts.len()),
    )
}

fn multilinear_check(sf: &StructureFunction) -> CheckResult {
    if sf.n() > 16 {
        return CheckResult::skip("multilinear-identity", "too many components");
    }
    let b = sf.signed_domination();
    let bad = (0..sf.num_states() as u32).find(|&r| b.zeta_at(r) != i64::from(sf.eval(r)));
    match bad {
        None => CheckResult::new("multilinear-identity", Outcome::Pass, format!("{} nonzero coefficients", b.len())),
        Some(r) => CheckResult::new("multilinear-identity", Outcome::Fail, format!("zeta sum differs at {r:#b}")),
    }
}

/// Checks for a lifetime model.
pub fn verify_lifetime(m: &LifetimeModel, opts: &ContinuousOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let horizon = m.horizon(1e-6);
    let grid: Vec<f64> = std::iter::once(0.0).chain(log_grid(horizon * 1e-4, horizon, 48)).collect();

    let mut worst = 0.0f64;
    let mut excess = 0.0f64;
    for i in 1..=m.n() {
        for &t in &grid {
            let diag = cov_surface(m, i, t, t).expect("valid inputs");
            for &s in &grid {
                let v = cov_surface(m, i, s, t).expect("valid inputs");
                worst = worst.min(v);
                excess = excess.max(v - diag);
            }
        }
    }
    out.push(if worst >= -IDENTITY_TOLERANCE {
        CheckResult::new("surface-nonnegative", Outcome::Pass, format!("min {worst:.3e}"))
    } else {
        CheckResult::new("surface-nonnegative", Outcome::Fail, format!("min {worst:.3e}"))
    });
    out.push(CheckResult::deviation("diagonal-dominance", excess.max(0.0), IDENTITY_TOLERANCE));

    let linf = linf_covariance_importance(m, opts);
    let bad = linf.values.iter().position(|v| !(0.0..=0.25 + IDENTITY_TOLERANCE).contains(v));
    out.push(match bad {
        None => CheckResult::new("linf-bounds", Outcome::Pass, "0 <= linf <= 1/4"),
        Some(k) => CheckResult::new("linf-bounds", Outcome::Fail, format!("component {}: {}", k + 1, linf.values[k])),
    });

    match l1_covariance_importance(m, opts) {
        Ok(l1) => {
            let bad = l1.values.iter().enumerate().find(|&(k, &v)| {
                v < -opts.quadrature.tolerance || v > m.dist(k + 1).variance().sqrt() * system_sd_bound(m) + 1e-6
            });
            out.push(match bad {
                None => CheckResult::new("l1-bounds", Outcome::Pass, "0 <= l1 <= sd(T_i) sd(T)"),
                Some((k, v)) => CheckResult::new("l1-bounds", Outcome::Fail, format!("component {}: {v}", k + 1)),
            });
        }
        Err(e) => out.push(CheckResult::new("l1-bounds", Outcome::Fail, e.to_string())),
    }

    let annotations = match m.sf().expr() {
        Some(e) if m.sf().warnings().is_empty() => annotations_from_expr(e),
        _ => Vec::new(),
    };
    let order_grid = log_grid(horizon * 1e-4, horizon, 256);
    let mut claims = 0;
    let mut failures = Vec::new();
    for a in &annotations {
        for &j in &a.module {
            if stochastically_ordered(m, a, j, &order_grid) {
                claims += 1;
                let (vi, vj) = (linf.value(a.component), linf.value(j));
                if vi < vj - 1e-9 {
                    failures.push(format!("I({}) = {vi} < I({j}) = {vj}", a.component));
                }
            }
        }
    }
    out.push(match failures.first() {
        None if claims == 0 => CheckResult::skip("linf-orderings", "no annotated pair is stochastically ordered"),
        None => CheckResult::new("linf-orderings", Outcome::Pass, format!("{claims} claims hold")),
        Some(f) => CheckResult::new("linf-orderings", Outcome::Fail, format!("{} of {claims} fail; first: {f}", failures.len())),
    });
    out
}

/// sd(T) ≤ sqrt(E T²) ≤ sqrt(Σ_i E T_i²), since T ≤ max_i T_i.
fn system_sd_bound(m: &LifetimeModel) -> f64 {
    m.dists()
        .iter()
        .map(|d| d.variance() + d.mean().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// T_i ⪯ T_j (series) or T_i ⪰ T_j (parallel) on the grid.
fn stochastically_ordered(m: &LifetimeModel, a: &ModuleAnnotation, j: usize, grid: &[f64]) -> bool {
    let (di, dj) = (m.dist(a.component), m.dist(j));
    grid.iter().all(|&t| match a.kind {
        ModuleKind::Series => di.survival(t) <= dj.survival(t),
        ModuleKind::Parallel => di.survival(t) >= dj.survival(t),
    })
}

#[derive(Default)]
struct Tally {
    pass: usize,
    fail: usize,
    skip: usize,
    first_failure: Option<String>,
}

/// Runs the binary suite on `trials` random systems with up to `n_max`
/// components, plus module instances for the ordering results in both the
/// binary and the lifetime setting. One aggregated result per check.
pub fn verify_random(trials: usize, n_max: usize, seed: u64) -> Vec<CheckResult> {
    let n_max = n_max.clamp(2, ORACLE_MAX_COMPONENTS);
    let mut tallies: BTreeMap<&'static str, Tally> = BTreeMap::new();
    let mut order: Vec<&'static str> = Vec::new();
    let mut record = |r: CheckResult, trial: usize, what: &dyn Fn() -> String| {
        if !order.contains(&r.name) {
            order.push(r.name);
        }
        let t = tallies.entry(r.name).or_default();
        match r.outcome {
            Outcome::Pass => t.pass += 1,
            Outcome::Skip => t.skip += 1,
            Outcome::Fail => {
                t.fail += 1;
                t.first_failure.get_or_insert_with(|| format!("trial {trial} {}: {}", what(), r.detail));
            }
        }
    };
    let opts = ContinuousOptions::default();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let n = rng.gen_range(1..=n_max);
        let sf = random_system(&mut rng, n);
        let p = ProbabilityVector::new(random_probabilities(&mut rng, n)).expect("valid");
        let describe = || format!("{} table {} p {:?}", n, sf.table_string(), p.as_slice());
        for r in verify_binary(&sf, &p) {
            record(r, trial, &describe);
        }

        let kind = if rng.gen_bool(0.5) { ModuleKind::Series } else { ModuleKind::Parallel };
        let n = rng.gen_range(2..=n_max);
        let inst = module_instance(&mut rng, n, kind);
        let mut ps = random_probabilities(&mut rng, n);
        let (i, j) = (inst.annotation.component, inst.annotation.module[rng.gen_range(0..inst.annotation.module.len())]);
        let swap = match kind {
            ModuleKind::Series => ps[i - 1] > ps[j - 1],
            ModuleKind::Parallel => ps[i - 1] < ps[j - 1],
        };
        if swap {
            ps.swap(i - 1, j - 1);
        }
        let p = ProbabilityVector::new(ps).expect("valid");
        let describe = || format!("{} p {:?}", inst.expr, p.as_slice());
        let certs = ordering_certificates(&inst.sf, &p, std::slice::from_ref(&inst.annotation));
        let r = match certs {
            Ok(c) => match c.iter().find(|c| !c.holds) {
                None => CheckResult::new("module-orderings", Outcome::Pass, ""),
                Some(c) => CheckResult::new(
                    "module-orderings",
                    Outcome::Fail,
                    format!("{} {}: {:?} at {:?}", c.theorem, c.measure, c.values, c.pair),
                ),
            },
            Err(e) => CheckResult::new("module-orderings", Outcome::Fail, e.to_string()),
        };
        record(r, trial, &describe);

        let n = rng.gen_range(2..=n_max.min(5));
        let inst = module_instance(&mut rng, n, kind);
        let (i, j) = (inst.annotation.component, inst.annotation.module[rng.gen_range(0..inst.annotation.module.len())]);
        let mut rates: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..=5.0)).collect();
        // exponential rates order the lifetimes: λ_i ≥ λ_j ⇔ T_i ⪯ T_j
        let swap = match kind {
            ModuleKind::Series => rates[i - 1] < rates[j - 1],
            ModuleKind::Parallel => rates[i - 1] > rates[j - 1],
        };
        if swap {
            rates.swap(i - 1, j - 1);
        }
        let dists = rates.iter().map(|&r| LifetimeDistribution::Exponential { rate: r }).collect();
        let m = LifetimeModel::new(inst.sf.clone(), dists).expect("valid");
        let linf = linf_covariance_importance(&m, &opts);
        let (vi, vj) = (linf.value(i), linf.value(j));
        let outcome = if vi >= vj - 1e-9 { Outcome::Pass } else { Outcome::Fail };
        let describe = || format!("{} rates {rates:?}", inst.expr);
        record(
            CheckResult::new("linf-module-orderings", outcome, format!("I({i}) = {vi}, I({j}) = {vj}")),
            trial,
            &describe,
        );
    }
    order
        .into_iter()
        .map(|name| {
            let t = &tallies[name];
            let counts = format!("{} pass, {} fail, {} skipped", t.pass, t.fail, t.skip);
            match &t.first_failure {
                Some(f) => CheckResult::new(name, Outcome::Fail, format!("{counts}; first failure {f}")),
                None if t.pass == 0 => CheckResult::new(name, Outcome::Skip, counts),
                None => CheckResult::new(name, Outcome::Pass, counts),
            }
        })
        .collect()
}
