//! Derivative-free univariate maximization.

/// 1/φ, the golden-section shrink factor.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// A maximizer and the objective value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub at: f64,
    pub value: f64,
}

/// Golden-section search for a maximum of a unimodal `f` on [a, b],
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Maximum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        Maximum { at: c, value: fc }
    } else {
        Maximum { at: d, value: fd }
    }
}

/// Evaluates `f` at every point of the sorted grid, then refines the bracket
/// around the best grid point by golden section. The refined point is kept
/// only if it beats the grid, so atoms of step functions survive.
pub fn grid_then_refine(f: impl Fn(f64) -> f64, grid: &[f64], tol: f64) -> Maximum {
    assert!(!grid.is_empty(), "empty search grid");
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |k, (j, &v)| if v > values[k] { j } else { k });
    let mut result = Maximum { at: grid[best], value: values[best] };
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if hi > lo {
        let refined = golden_section_max(&f, lo, hi, tol);
        if refined.value > result.value {
            result = refined;
        }
    }
    result
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && points >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| {
            if k == points - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * k as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}
