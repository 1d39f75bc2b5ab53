//! Adaptive Gauss–Kronrod (7/15) integration in one and two dimensions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], descending, nonnegative half.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the abscissae XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The 15 nodes on [-1, 1] in ascending order with Kronrod and Gauss
/// weights (Gauss weight 0 on the Kronrod-only nodes).
fn rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for k in 0..8 {
        let wg = if k % 2 == 1 { WG[k / 2] } else { 0.0 };
        out[k] = (-XGK[k], WGK[k], wg);
        out[14 - k] = (XGK[k], WGK[k], wg);
    }
    out
}

/// Kronrod estimate and |Kronrod − Gauss| on [a, b].
pub fn gk15(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let (mut k, mut g) = (0.0, 0.0);
    for (x, wk, wg) in rule() {
        let v = f(mid + half * x);
        k += wk * v;
        g += wg * v;
    }
    (k * half, ((k - g) * half).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub tolerance: f64,
    pub max_cells: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_cells: 100_000,
        }
    }
}

struct Scored<T> {
    error: f64,
    item: T,
}

impl<T> PartialEq for Scored<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Scored<T> {}
impl<T> PartialOrd for Scored<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Scored<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 1-D integration over consecutive breakpoints.
pub fn integrate_1d(f: impl Fn(f64) -> f64, breaks: &[f64], opts: QuadratureOptions) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for w in breaks.windows(2).filter(|w| w[1] > w[0]) {
        let (v, e) = gk15(&f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Scored { error: e, item: (w[0], w[1], v) });
    }
    refine(&mut heap, &mut value, &mut error, opts, |&(a, b, _)| {
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        vec![((a, m, v1), e1), ((m, b, v2), e2)]
    })
}

/// Pops the worst cell and replaces it by its children until the summed
/// error estimate meets the tolerance or the cell budget is spent.
fn refine<T>(
    heap: &mut BinaryHeap<Scored<T>>,
    value: &mut f64,
    error: &mut f64,
    opts: QuadratureOptions,
    split: impl Fn(&T) -> Vec<(T, f64)>,
) -> Result<Integral>
where
    T: CellValue,
{
    while *error > opts.tolerance && heap.len() < opts.max_cells {
        let Some(worst) = heap.pop() else { break };
        *value -= worst.item.value();
        *error -= worst.error;
        for (child, e) in split(&worst.item) {
            *value += child.value();
            *error += e;
            heap.push(Scored { error: e, item: child });
        }
    }
    // recompute to shed the drift of the running sums
    *value = heap.iter().map(|c| c.item.value()).sum();
    *error = heap.iter().map(|c| c.error).sum();
    if *error > opts.tolerance {
        return Err(Error::QuadratureNotConverged {
            estimate: *value,
            error: *error,
            tolerance: opts.tolerance,
        });
    }
    Ok(Integral {
        value: *value,
        error: *error,
        cells: heap.len(),
    })
}

trait CellValue {
    fn value(&self) -> f64;
}

impl CellValue for (f64, f64, f64) {
    fn value(&self) -> f64 {
        self.2
    }
}

/// How a parameter rectangle maps onto the (s, t) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellMap {
    /// (x, y) = (s, t).
    Identity,
    /// x = t ∈ [a, b], y = u ∈ [0, 1], s = a + (t − a)u: the triangle
    /// a ≤ s ≤ t ≤ b of a diagonal square.
    BelowDiagonal { a: f64 },
    /// x = s ∈ [a, b], y = u ∈ [0, 1], t = a + (s − a)u: the triangle
    /// a ≤ t ≤ s ≤ b.
    AboveDiagonal { a: f64 },
}

impl CellMap {
    /// Maps a parameter point to (s, t) and the Jacobian.
    #[inline]
    fn apply(self, x: f64, y: f64) -> (f64, f64, f64) {
        match self {
            Self::Identity => (x, y, 1.0),
            Self::BelowDiagonal { a } => (a + (x - a) * y, x, x - a),
            Self::AboveDiagonal { a } => (x, a + (x - a) * y, x - a),
        }
    }
}

/// A parameter rectangle [x0, x1] × [y0, y1] with its map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub map: CellMap,
}

impl Cell {
    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1, map: CellMap::Identity }
    }

    /// Splits the square [a, b]² along its diagonal into two mapped cells.
    pub fn diagonal_halves(a: f64, b: f64) -> [Self; 2] {
        [
            Self { x0: a, x1: b, y0: 0.0, y1: 1.0, map: CellMap::BelowDiagonal { a } },
            Self { x0: a, x1: b, y0: 0.0, y1: 1.0, map: CellMap::AboveDiagonal { a } },
        ]
    }

    fn quarters(&self) -> [Self; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        let c = |x0, x1, y0, y1| Self { x0, x1, y0, y1, map: self.map };
        [
            c(self.x0, xm, self.y0, ym),
            c(xm, self.x1, self.y0, ym),
            c(self.x0, xm, ym, self.y1),
            c(xm, self.x1, ym, self.y1),
        ]
    }
}

/// Tensor-product GK15 on one cell: (Kronrod value, |Kronrod − Gauss|).
pub fn gk15_cell(f: &impl Fn(f64, f64) -> f64, cell: &Cell) -> (f64, f64) {
    let nodes = rule();
    let hx = 0.5 * (cell.x1 - cell.x0);
    let mx = 0.5 * (cell.x0 + cell.x1);
    let hy = 0.5 * (cell.y1 - cell.y0);
    let my = 0.5 * (cell.y0 + cell.y1);
    let (mut k, mut g) = (0.0, 0.0);
    for &(xi, wkx, wgx) in &nodes {
        let x = mx + hx * xi;
        let (mut ky, mut gy) = (0.0, 0.0);
        for &(yi, wky, wgy) in &nodes {
            let (s, t, jac) = cell.map.apply(x, my + hy * yi);
            let v = f(s, t) * jac;
            ky += wky * v;
            gy += wgy * v;
        }
        k += wkx * ky;
        g += wgx * gy;
    }
    let area = hx * hy;
    (k * area, ((k - g) * area).abs())
}

impl CellValue for (Cell, f64) {
    fn value(&self) -> f64 {
        self.1
    }
}

/// Globally adaptive integration of `f(s, t)` over the union of `cells`.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    cells: &[Cell],
    opts: QuadratureOptions,
) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for cell in cells {
        let (v, e) = gk15_cell(&f, cell);
        value += v;
        error += e;
        heap.push(Scored { error: e, item: (*cell, v) });
    }
    refine(&mut heap, &mut value, &mut error, opts, |(cell, _)| {
        cell.quarters()
            .into_iter()
            .map(|q| {
                let (v, e) = gk15_cell(&f, &q);
                ((q, v), e)
            })
            .collect()
    })
}

/// Cells covering [b0, bm]² for sorted breakpoints b: plain rectangles off
/// the diagonal and two mapped triangles on each diagonal square.
pub fn square_cells(breaks: &[f64]) -> Vec<Cell> {
    let mut cells = Vec::new();
    for (r, wr) in breaks.windows(2).enumerate() {
        for (c, wc) in breaks.windows(2).enumerate() {
            if r == c {
                cells.extend(Cell::diagonal_halves(wr[0], wr[1]));
            } else {
                cells.push(Cell::rect(wr[0], wr[1], wc[0], wc[1]));
            }
        }
    }
    cells
}
