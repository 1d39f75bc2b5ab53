//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relimp::binary::{
    birnbaum, covariance_importance, information_importance, information_series_closed_form, risk_achievement,
    risk_reduction,
};
use relimp::certificates::ModuleKind;
use relimp::continuous::{
    cov_surface, exponential_l1_series, l1_covariance_importance, linf_covariance_importance, natvig_exponential,
    ContinuousOptions,
};
use relimp::generate::{module_instance, random_lifetime_model, random_probabilities, random_system};
use relimp::lifetime::{LifetimeDistribution, LifetimeModel};
use relimp::oracle::{
    conjecture_probe, exact_binary_covariance, exact_binary_mutual_information, mc_lifetime_covariance, McConfig,
};
use relimp::{ProbabilityVector, StructureFunction};

type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// The randomized binary suite shared by several criteria.
fn binary_suite(count: usize, seed: u64) -> Vec<(StructureFunction, ProbabilityVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=12);
            let sf = random_system(&mut rng, n);
            let p = ProbabilityVector::new(random_probabilities(&mut rng, n)).unwrap();
            (sf, p)
        })
        .collect()
}

/// P{X_i = u, φ(X) = v} by enumerating every state.
fn brute_joint(sf: &StructureFunction, p: &[f64], i: usize) -> [[f64; 2]; 2] {
    let mut mass = [[0.0; 2]; 2];
    for s in 0..sf.num_states() as u32 {
        let prob: f64 = (0..p.len()).map(|k| if s >> k & 1 == 1 { p[k] } else { 1.0 - p[k] }).product();
        mass[(s >> (i - 1) & 1) as usize][usize::from(sf.eval(s))] += prob;
    }
    mass
}

/// cov(X_i, φ(X)) and h(p, 1_i) − h(p, 0_i) from the joint law.
fn brute_cov_birnbaum(sf: &StructureFunction, p: &[f64], i: usize) -> (f64, f64) {
    let m = brute_joint(sf, p, i);
    let pi = m[1][0] + m[1][1];
    let h = m[0][1] + m[1][1];
    let up = if pi > 0.0 { m[1][1] / pi } else { f64::NAN };
    let down = if pi < 1.0 { m[0][1] / (1.0 - pi) } else { f64::NAN };
    (m[1][1] - pi * h, up - down)
}

fn relation_chain() -> Outcome {
    let mut worst: f64 = 0.0;
    let suite = binary_suite(500, 1);
    for (sf, p) in &suite {
        let c = covariance_importance(sf, p).unwrap();
        let ra = risk_achievement(sf, p).unwrap();
        let rr = risk_reduction(sf, p).unwrap();
        let b = birnbaum(sf, p).unwrap();
        for k in 0..sf.n() {
            let (pi, qi) = (p.as_slice()[k], 1.0 - p.as_slice()[k]);
            worst = worst
                .max((c.values[k] - qi * ra.values[k]).abs())
                .max((c.values[k] - pi * rr.values[k]).abs())
                .max((c.values[k] - pi * qi * b.values[k]).abs());
        }
    }
    outcome(worst < 1e-12, format!("500 systems, max deviation {worst:.2e} < 1e-12"))
}

fn bounds() -> Outcome {
    let mut violations = 0;
    let t = 1e-12;
    for (sf, p) in &binary_suite(500, 1) {
        let c = covariance_importance(sf, p).unwrap();
        let m = information_importance(sf, p).unwrap();
        let b = birnbaum(sf, p).unwrap();
        for k in 0..sf.n() {
            let ok = (-t..=0.25 + t).contains(&c.values[k])
                && (-t..=1.0 + t).contains(&m.values[k])
                && b.values[k] >= c.values[k] - t;
            violations += usize::from(!ok);
        }
    }
    outcome(violations == 0, format!("{violations} violations of 0<=cov<=1/4, 0<=info<=1, birnbaum>=cov"))
}

fn duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for (sf, p) in &binary_suite(200, 3) {
        let dual = sf.dual();
        let q = p.complement();
        let pairs = [
            (covariance_importance(&dual, p).unwrap(), covariance_importance(sf, &q).unwrap()),
            (information_importance(&dual, p).unwrap(), information_importance(sf, &q).unwrap()),
        ];
        for (a, b) in pairs {
            for k in 0..sf.n() {
                worst = worst.max((a.values[k] - b.values[k]).abs());
            }
        }
    }
    outcome(worst < 1e-12, format!("200 systems, max deviation {worst:.2e} < 1e-12"))
}

fn table_rows() -> Outcome {
    let sf = StructureFunction::k_out_of_n(2, 3).unwrap();
    let rows = [[0.1, 0.2, 0.3], [0.3, 0.4, 0.5], [0.5, 0.6, 0.7], [0.7, 0.8, 0.9]];
    let mut worst: f64 = 0.0;
    let mut reversed = true;
    for (r, row) in rows.iter().enumerate() {
        let p = ProbabilityVector::new(row.to_vec()).unwrap();
        let b = birnbaum(&sf, &p).unwrap();
        let c = covariance_importance(&sf, &p).unwrap();
        for i in 1..=3 {
            let (bc, bb) = brute_cov_birnbaum(&sf, row, i);
            worst = worst.max((bc - c.value(i)).abs()).max((bb - b.value(i)).abs());
        }
        if r == 0 || r == 3 {
            let mut rev = c.ranking.clone();
            rev.reverse();
            reversed &= b.ranking == rev;
        }
    }
    outcome(
        worst < 1e-12 && reversed,
        format!("max deviation {worst:.2e} < 1e-12; birnbaum and covariance orders reversed in rows 1 and 4: {reversed}"),
    )
}

fn module_orderings() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    for trial in 0..1000 {
        let kind = if trial % 2 == 0 { ModuleKind::Series } else { ModuleKind::Parallel };
        let n = rng.gen_range(2..=10);
        let inst = module_instance(&mut rng, n, kind);
        let mut p = random_probabilities(&mut rng, n);
        let i = inst.annotation.component;
        for &j in &inst.annotation.module {
            let ok_hyp = match kind {
                ModuleKind::Series => p[i - 1] <= p[j - 1],
                ModuleKind::Parallel => p[i - 1] >= p[j - 1],
            };
            if !ok_hyp {
                // move p_j to the correct side of p_i
                p[j - 1] = match kind {
                    ModuleKind::Series => p[i - 1] + (1.0 - p[i - 1]) * rng.gen::<f64>(),
                    ModuleKind::Parallel => p[i - 1] * rng.gen::<f64>(),
                };
            }
        }
        let pv = ProbabilityVector::new(p).unwrap();
        let c = covariance_importance(&inst.sf, &pv).unwrap();
        for &j in &inst.annotation.module {
            violations += usize::from(c.value(i) < c.value(j) - 1e-10);
        }
    }
    let mut corollary = 0;
    for trial in 0..1000 {
        let n = rng.gen_range(2..=10);
        let sf = if trial % 2 == 0 { StructureFunction::series(n) } else { StructureFunction::parallel(n) };
        let p: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let m = information_importance(&sf, &ProbabilityVector::new(p.clone()).unwrap()).unwrap();
        for i in 1..=n {
            for j in 1..=n {
                let hyp = if trial % 2 == 0 { p[i - 1] <= p[j - 1] } else { p[i - 1] >= p[j - 1] };
                if i != j && hyp && m.value(i) < m.value(j) - 1e-10 {
                    corollary += 1;
                }
            }
        }
    }
    outcome(
        violations == 0 && corollary == 0,
        format!("1000 module instances: {violations} covariance violations; 1000 series/parallel systems: {corollary} information violations"),
    )
}

fn series_information() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let p = ProbabilityVector::new(random_probabilities(&mut rng, n)).unwrap();
        let generic = information_importance(&StructureFunction::series(n), &p).unwrap();
        for i in 1..=n {
            worst = worst.max((generic.value(i) - information_series_closed_form(&p, i).unwrap()).abs());
        }
    }
    outcome(worst < 1e-12, format!("200 series systems, max deviation {worst:.2e} < 1e-12"))
}

fn exp_series(rates: &[f64]) -> LifetimeModel {
    LifetimeModel::new(
        StructureFunction::series(rates.len()),
        rates.iter().map(|&r| LifetimeDistribution::exponential(r).unwrap()).collect(),
    )
    .unwrap()
}

fn l1_exponential() -> Outcome {
    let start = Instant::now();
    let opts = ContinuousOptions::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for rates in [[2.0f64, 1.0], [1.0, 1.0]] {
        // cov(T_i, min_j T_j) = var(min_j T_j) = 1 / (Σλ)²
        let exact = 1.0 / (rates[0] + rates[1]).powi(2);
        let m = exp_series(&rates);
        let quad = l1_covariance_importance(&m, &opts).unwrap();
        let mc = mc_lifetime_covariance(&m, &McConfig::new(20_240_601, 1_000_000)).unwrap();
        for i in 1..=2 {
            let closed = exponential_l1_series(&rates, i).unwrap();
            let est = mc.components[i - 1].covariance;
            let z = (est.value - closed).abs() / est.std_error;
            ok &= (closed - exact).abs() < 1e-12 && (quad.value(i) - closed).abs() < 1e-6 && z < 4.0;
            notes.push(format!("rates {rates:?} i={i}: closed {closed:.9}, quadrature {:.9}, MC z={z:.2}", quad.value(i)));
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    outcome(ok, format!("{} [{:.1}s < 30s]", notes.join("; "), elapsed.as_secs_f64()))
}

/// The two-component series closed forms with λ1 = αλ2.
fn linf_closed(alpha: f64) -> (f64, f64) {
    let r1 = (2.0 * alpha + 1.0) / (alpha + 1.0);
    let r2 = (alpha + 2.0) / (alpha + 1.0);
    (
        r1.powf(-(alpha + 1.0) / alpha) - r1.powf(-(2.0 * alpha + 1.0) / alpha),
        r2.powf(-(alpha + 1.0)) - r2.powf(-(alpha + 2.0)),
    )
}

fn linf_exponential() -> Outcome {
    let opts = ContinuousOptions::default();
    let numeric = |alpha: f64| {
        let r = linf_covariance_importance(&exp_series(&[alpha, 1.0]), &opts);
        (r.value(1), r.value(2))
    };
    let (a1, b1) = numeric(1.0);
    let at_one = (a1 - 4.0 / 27.0).abs().max((b1 - 4.0 / 27.0).abs());
    let (a2, b2) = numeric(2.0);
    let (c1, _) = linf_closed(2.0);
    let at_two = (a2 - c1).abs().max((b2 - (0.75f64.powi(3) - 0.75f64.powi(4))).abs());
    let mut ordered = true;
    let mut max_closed_dev: f64 = 0.0;
    for k in 0..=90 {
        let alpha = 1.0 + f64::from(k) * 0.1;
        let (i1, i2) = numeric(alpha);
        let (e1, e2) = linf_closed(alpha);
        max_closed_dev = max_closed_dev.max((i1 - e1).abs()).max((i2 - e2).abs());
        ordered &= if k == 0 { (i1 - i2).abs() < 1e-10 } else { i1 > i2 + 1e-10 };
    }
    outcome(
        at_one < 1e-10 && at_two < 1e-10 && ordered && max_closed_dev < 1e-10,
        format!(
            "alpha=1 dev {at_one:.1e}; alpha=2 I1={a2:.6} I2={b2:.8} dev {at_two:.1e}; I1>I2 on (1,10]: {ordered}; sweep dev {max_closed_dev:.1e}"
        ),
    )
}

fn natvig() -> Outcome {
    let rates = [2.0, 1.0];
    let m = exp_series(&rates);
    let r = natvig_exponential(&m, &ContinuousOptions::default()).unwrap();
    let mc = mc_lifetime_covariance(&m, &McConfig::new(7, 1_000_000)).unwrap();
    let mut ok = (r.value(1) - 2.0 / 9.0).abs() < 1e-6 && (r.value(2) - 1.0 / 9.0).abs() < 1e-6;
    let mut zs = Vec::new();
    for i in 1..=2 {
        // cov(λ_i T_i, T) scales the estimate and its error by λ_i
        let est = mc.components[i - 1].covariance;
        let z = (rates[i - 1] * est.value - r.value(i)).abs() / (rates[i - 1] * est.std_error);
        ok &= z < 4.0;
        zs.push(format!("{z:.2}"));
    }
    outcome(ok, format!("values ({:.9}, {:.9}), MC z-scores {}", r.value(1), r.value(2), zs.join(", ")))
}

fn diagonal_sup() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let m = random_lifetime_model(&mut rng, n);
        let horizon = m.horizon(1e-6);
        let grid: Vec<f64> = (0..64).map(|k| horizon * f64::from(k) / 63.0).collect();
        for i in 1..=n {
            let diag = grid.iter().map(|&t| cov_surface(&m, i, t, t).unwrap()).fold(f64::MIN, f64::max);
            let full = grid
                .iter()
                .flat_map(|&s| grid.iter().map(move |&t| (s, t)))
                .map(|(s, t)| cov_surface(&m, i, s, t).unwrap())
                .fold(f64::MIN, f64::max);
            worst = worst.max(full - diag);
        }
    }
    outcome(worst <= 1e-3, format!("100 models, max (grid sup - diagonal sup) {worst:.2e} <= 1e-3"))
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for (sf, p) in &binary_suite(500, 1) {
        let c = covariance_importance(sf, p).unwrap();
        let m = information_importance(sf, p).unwrap();
        for i in 1..=sf.n() {
            worst = worst
                .max((exact_binary_covariance(sf, p, i).unwrap() - c.value(i)).abs())
                .max((exact_binary_mutual_information(sf, p, i).unwrap() - m.value(i)).abs());
        }
    }
    outcome(worst < 1e-12, format!("500 systems, max deviation {worst:.2e} < 1e-12"))
}

fn conjecture() -> Outcome {
    let violations = conjecture_probe(10_000, 8, 12).unwrap();
    let mut detail = format!("10000 trials, {} violations", violations.len());
    for v in violations.iter().take(5) {
        detail.push_str(&format!(
            "\n    trial {} {:?} {} p={:?} I({})={} < I({})={}",
            v.trial, v.kind, v.expression, v.p, v.i, v.values.0, v.j, v.values.1
        ));
    }
    outcome(violations.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("relation chain", relation_chain, Some(10)),
        ("bounds", bounds, None),
        ("duality", duality, None),
        ("2-out-of-3 table rows", table_rows, None),
        ("module orderings", module_orderings, None),
        ("series information closed form", series_information, None),
        ("exponential series L1", l1_exponential, None),
        ("exponential series L-infinity", linf_exponential, None),
        ("Natvig exponential", natvig, None),
        ("diagonal supremum", diagonal_sup, None),
        ("oracle equivalence", oracle_equivalence, None),
        ("conjecture probe", conjecture, None),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = run();
        let secs = start.elapsed().as_secs_f64();
        if let Some(limit) = limit {
            if secs >= *limit as f64 {
                o.passed = false;
            }
            o.detail.push_str(&format!(" [{secs:.1}s < {limit}s]"));
        }
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("acceptance {:>2} {verdict} {name}: {}", k + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
