//! Globally adaptive Gauss–Kronrod (7/15) quadrature for vector integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_subdivisions: 4000 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-12, 1e-12)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: f64,
    pub evaluations: usize,
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> Panel<N> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let fc = f(c);
    for i in 0..N {
        k[i] = WGK[7] * fc[i];
        g[i] = WG[3] * fc[i];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..N {
        k[i] *= h;
        g[i] *= h;
        err = err.max((k[i] - g[i]).abs());
    }
    Panel { a, b, value: k, error: err }
}

/// Integrates `f` over the union of `intervals` with one global error budget.
pub fn integrate_pieces<const N: usize, F>(mut f: F, intervals: &[(f64, f64)], tol: Tolerance) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for &(a, b) in intervals {
        if b > a {
            heap.push(gk15(&mut f, a, b));
            evals += 15;
        }
    }
    let mut frozen_value = [0.0; N];
    let mut frozen_error = 0.0;
    let mut splits = 0usize;
    loop {
        let mut total = frozen_value;
        let mut err = frozen_error;
        for p in heap.iter() {
            for i in 0..N {
                total[i] += p.value[i];
            }
            err += p.error;
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if (err.is_finite() && err <= tol.abs.max(tol.rel * scale)) || heap.is_empty() {
            return Ok(Estimate { value: total, error: err, evaluations: evals });
        }
        if splits >= tol.max_subdivisions {
            return Err(Error::Convergence { what: "adaptive quadrature".into(), estimate: err });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // at machine resolution: keep the panel as it is
            for i in 0..N {
                frozen_value[i] += worst.value[i];
            }
            frozen_error += worst.error;
            continue;
        }
        heap.push(gk15(&mut f, worst.a, mid));
        heap.push(gk15(&mut f, mid, worst.b));
        evals += 30;
        splits += 1;
    }
}

/// Scalar convenience wrapper around [`integrate_pieces`].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    integrate_pieces(|x| [f(x)], &[(a, b)], tol).map(|e| e.value[0])
}

/// Integral of `f` over `[a, b]` split at the given interior points.
pub fn integrate_split<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, points: &[f64], tol: Tolerance) -> Result<f64> {
    let mut nodes: Vec<f64> = points.iter().copied().filter(|p| *p > a && *p < b).collect();
    nodes.push(a);
    nodes.push(b);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let iv: Vec<(f64, f64)> = nodes.windows(2).map(|w| (w[0], w[1])).collect();
    integrate_pieces(|x| [f(x)], &iv, tol).map(|e| e.value[0])
}
