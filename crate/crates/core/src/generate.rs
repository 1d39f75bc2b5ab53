//! Random coherent systems and lifetime models for property tests and the
//! verification suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::certificates::{ModuleAnnotation, ModuleKind};
use crate::lifetime::{LifetimeDistribution, LifetimeModel};
use crate::structure::{Expr, StructureFunction};

/// A random expression tree using every id in `ids` exactly once.
///
/// Gates are series, parallel or k-out-of-n over 2–4 disjoint children,
/// so the result is coherent in the components it mentions.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, ids: &[usize]) -> Expr {
    let mut ids = ids.to_vec();
    ids.shuffle(rng);
    build(rng, &ids)
}

fn build<R: Rng + ?Sized>(rng: &mut R, ids: &[usize]) -> Expr {
    if ids.len() == 1 {
        return Expr::Component(ids[0]);
    }
    let arity = rng.gen_range(2..=ids.len().min(4));
    // arity − 1 distinct cut points in 1..len
    let mut cuts: Vec<usize> = (1..ids.len()).collect();
    cuts.shuffle(rng);
    cuts.truncate(arity - 1);
    cuts.sort_unstable();
    let mut children = Vec::with_capacity(arity);
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(ids.len())) {
        children.push(build(rng, &ids[start..end]));
        start = end;
    }
    match rng.gen_range(0..3) {
        0 => Expr::Series(children),
        1 => Expr::Parallel(children),
        _ => Expr::KOutOfN {
            k: rng.gen_range(1..=children.len()),
            children,
        },
    }
}

/// A random coherent series–parallel–k-out-of-n system on 1..=n.
pub fn random_coherent<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StructureFunction {
    let ids: Vec<usize> = (1..=n).collect();
    StructureFunction::from_expr(random_expr(rng, &ids)).expect("generated expression is valid")
}

/// A coherent system given by a random family of path sets; these need not
/// be series–parallel (bridges and the like appear).
pub fn random_path_family<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StructureFunction {
    loop {
        let count = rng.gen_range(1..=2 * n);
        let full = (1u32 << n) - 1;
        let paths: Vec<u32> = (0..count)
            .map(|_| loop {
                let s = rng.gen_range(1..=full);
                if s.count_ones() as usize <= n.div_ceil(2).max(1) + 1 {
                    break s;
                }
            })
            .collect();
        let sf = StructureFunction::from_fn(n, |x| paths.iter().any(|&p| p & !x == 0))
            .expect("n within range");
        if sf.is_coherent() {
            return sf;
        }
    }
}

/// Either generator, chosen at random.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StructureFunction {
    if n >= 3 && rng.gen_bool(0.3) {
        random_path_family(rng, n)
    } else {
        random_coherent(rng, n)
    }
}

/// A system ψ(…, x_i·χ(…)) (or its parallel analogue) with the annotation
/// that describes it.
#[derive(Debug, Clone)]
pub struct ModuleInstance {
    pub expr: Expr,
    pub sf: StructureFunction,
    pub annotation: ModuleAnnotation,
}

/// Random instance of a component in series (or parallel) with a module;
/// needs n ≥ 2.
pub fn module_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: ModuleKind) -> ModuleInstance {
    assert!(n >= 2, "a module instance needs at least two components");
    let mut ids: Vec<usize> = (1..=n).collect();
    ids.shuffle(rng);
    let component = ids[0];
    let module_size = rng.gen_range(1..n);
    let mut module = ids[1..=module_size].to_vec();
    let rest = &ids[module_size + 1..];
    let chi = random_expr(rng, &module);
    let inner = match kind {
        ModuleKind::Series => Expr::Series(vec![Expr::Component(component), chi]),
        ModuleKind::Parallel => Expr::Parallel(vec![Expr::Component(component), chi]),
    };
    let expr = if rest.is_empty() {
        inner
    } else {
        // id 0 marks where the inner block goes
        let mut outer_ids = rest.to_vec();
        outer_ids.push(0);
        substitute(random_expr(rng, &outer_ids), &inner)
    };
    module.sort_unstable();
    let sf = StructureFunction::from_expr(expr.clone()).expect("generated expression is valid");
    ModuleInstance {
        expr,
        sf,
        annotation: ModuleAnnotation { kind, component, module },
    }
}

fn substitute(e: Expr, inner: &Expr) -> Expr {
    match e {
        Expr::Component(0) => inner.clone(),
        Expr::Component(id) => Expr::Component(id),
        Expr::Series(c) => Expr::Series(c.into_iter().map(|x| substitute(x, inner)).collect()),
        Expr::Parallel(c) => Expr::Parallel(c.into_iter().map(|x| substitute(x, inner)).collect()),
        Expr::KOutOfN { k, children } => Expr::KOutOfN {
            k,
            children: children.into_iter().map(|x| substitute(x, inner)).collect(),
        },
    }
}

/// Independent uniform reliabilities; a fraction of entries is pinned to
/// 0, ½ or 1 to exercise degenerate cases.
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| match rng.gen_range(0..20) {
            0 => 0.0,
            1 => 1.0,
            2 => 0.5,
            _ => rng.gen::<f64>(),
        })
        .collect()
}

/// Exponential (rate in [0.2, 5]) or Weibull (shape in [0.8, 3], scale in
/// [0.3, 3]) with equal odds.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R) -> LifetimeDistribution {
    if rng.gen_bool(0.5) {
        LifetimeDistribution::Exponential {
            rate: rng.gen_range(0.2..=5.0),
        }
    } else {
        LifetimeDistribution::Weibull {
            shape: rng.gen_range(0.8..=3.0),
            scale: rng.gen_range(0.3..=3.0),
        }
    }
}

pub fn random_lifetime_model<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LifetimeModel {
    let sf = random_system(rng, n);
    let dists = (0..n).map(|_| random_distribution(rng)).collect();
    LifetimeModel::new(sf, dists).expect("generated model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{factors_as_parallel_module, factors_as_series_module};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_systems_are_coherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=9);
            let sf = random_coherent(&mut rng, n);
            assert!(sf.is_coherent(), "{:?}", sf.expr());
            assert!(sf.warnings().is_empty());
            let pf = random_path_family(&mut rng, n);
            assert!(pf.is_coherent());
        }
    }

    #[test]
    fn module_instances_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(2..=8);
            let kind = if rng.gen_bool(0.5) { ModuleKind::Series } else { ModuleKind::Parallel };
            let inst = module_instance(&mut rng, n, kind);
            assert!(inst.sf.is_coherent());
            let a = &inst.annotation;
            let ok = match kind {
                ModuleKind::Series => factors_as_series_module(&inst.sf, a.component, &a.module),
                ModuleKind::Parallel => factors_as_parallel_module(&inst.sf, a.component, &a.module),
            };
            assert!(ok, "{}", inst.expr);
        }
    }

    #[test]
    fn lifetime_models_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let m = random_lifetime_model(&mut rng, n);
            assert_eq!(m.dists().len(), n);
        }
    }
}
