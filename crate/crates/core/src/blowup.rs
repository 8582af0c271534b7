//! Gradient catastrophe: critical time, characteristic roots, the σ-scaling
//! of the density at the blow-up point and δ-amplitudes of linear segments.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fields::{InitialData, PiecewiseFunction};
use crate::mollified_kernel::{Kernel, KernelParams};
use crate::quadrature::{integrate_split, Tolerance};
use crate::scalar::Scalar;

const SAMPLES_PER_PIECE: usize = 10_000;
const SCAN_POINTS: usize = 10_000;
const SEGMENT_TOL: f64 = 1e-8;
const ORDER_TOL: f64 = 1e-6;
/// Half-width of the window searched around the breakpoints.
const WINDOW: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    /// `+∞` when `u₀` is non-decreasing.
    pub t_star: f64,
    pub s_star: f64,
    pub x_star: f64,
    /// Maximal interval on which `u₀′ = −1/t*`.
    pub segment: Option<(f64, f64)>,
}

fn window(u0: &PiecewiseFunction) -> (f64, f64) {
    let b = u0.breakpoints();
    match (b.first(), b.last()) {
        (Some(a), Some(z)) => (a - WINDOW, z + WINDOW),
        _ => (-WINDOW, WINDOW),
    }
}

fn piece_spans(u0: &PiecewiseFunction, lo: f64, hi: f64) -> Vec<(usize, f64, f64)> {
    let mut nodes = vec![lo];
    nodes.extend(u0.breakpoints().iter().copied().filter(|b| *b > lo && *b < hi));
    nodes.push(hi);
    nodes.windows(2).map(|w| (u0.locate(0.5 * (w[0] + w[1])).unwrap_or_else(|i| i), w[0], w[1])).collect()
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn bisect_predicate(pred: impl Fn(f64) -> bool, mut inside: f64, mut outside: f64, tol: f64) -> f64 {
    while (outside - inside).abs() > tol {
        let m = 0.5 * (inside + outside);
        if pred(m) {
            inside = m;
        } else {
            outside = m;
        }
    }
    inside
}

/// `t* = inf(−1/u₀′)` by dense sampling and golden-section refinement.
pub fn critical_time(u0: &PiecewiseFunction) -> CriticalPoint {
    let (lo, hi) = window(u0);
    let mut best: Option<(usize, f64, f64, f64, f64)> = None;
    for (pi, a, b) in piece_spans(u0, lo, hi) {
        let p = &u0.pieces()[pi];
        let h = (b - a) / SAMPLES_PER_PIECE as f64;
        for k in 0..=SAMPLES_PER_PIECE {
            let s = a + h * k as f64;
            let d = p.derivative(1, s);
            if best.map_or(true, |bst| d < bst.1) {
                best = Some((pi, d, (s - h).max(a), (s + h).min(b), h));
            }
        }
    }
    let Some((pi, dmin, a, b, h)) = best else {
        return CriticalPoint { t_star: f64::INFINITY, s_star: f64::NAN, x_star: f64::NAN, segment: None };
    };
    if !(dmin < 0.0) {
        return CriticalPoint { t_star: f64::INFINITY, s_star: f64::NAN, x_star: f64::NAN, segment: None };
    }
    let p = &u0.pieces()[pi];
    let s = golden_min(|s| p.derivative(1, s), a, b, 1e-10);
    let d = p.derivative(1, s).min(dmin);
    let t_star = -1.0 / d;
    // a linear segment is a maximal interval where the slope stays at the minimum
    let flat = |x: f64| (p.derivative(1, x) - d).abs() <= SEGMENT_TOL * d.abs().max(1.0);
    let (plo, phi) = piece_spans(u0, lo, hi).into_iter().find(|q| q.0 == pi).map(|q| (q.1, q.2)).unwrap();
    let mut segment = None;
    let (mut l, mut r) = (s, s);
    while l - h >= plo && flat(l - h) {
        l -= h;
    }
    while r + h <= phi && flat(r + h) {
        r += h;
    }
    if r - l >= 1.5 * h {
        let l = if flat(plo) { plo } else { bisect_predicate(flat, l, (l - h).max(plo), 1e-12) };
        let r = if flat(phi) { phi } else { bisect_predicate(flat, r, (r + h).min(phi), 1e-12) };
        segment = Some((l, r));
    }
    let s_star = segment.map_or(s, |(l, r)| 0.5 * (l + r));
    let x_star = p.eval(s_star) * t_star + s_star;
    CriticalPoint { t_star, s_star, x_star, segment }
}

/// First `k ∈ 2..=6` with `|u₀^{(k)}(s)| ≥ 1e−6·max(1, |u₀′(s)|)`.
pub fn derivative_order(u0: &PiecewiseFunction, s: f64) -> Option<usize> {
    let scale = u0.derivative(1, s).abs().max(1.0);
    (2..=6).find(|&k| u0.derivative(k, s).abs() >= ORDER_TOL * scale)
}

/// `K_m = (m!)^{1/m} Γ(1/(2m)) / (2^{(m−1)/(2m)} m √π)`.
pub fn km_constant<T: Scalar>(m: usize) -> Result<T> {
    if m < 2 {
        return domain("K_m needs m >= 2");
    }
    let mm = T::lit(m as f64);
    let two = T::lit(2.0);
    let ln_fact = (mm + T::one()).ln_gamma();
    let ln_gam = (T::one() / (two * mm)).ln_gamma();
    let ln = ln_fact / mm + ln_gam - (mm - T::one()) / (two * mm) * two.ln() - mm.ln() - T::PI().sqrt().ln();
    Ok(ln.exp())
}

/// `B = K_m |u₀′|^{(m+1)/(2m)} / |u₀^{(m)}|^{1/m}`, the density prefactor at the blow-up point.
pub fn b_constant(m: usize, d1: f64, dm: f64) -> Result<f64> {
    let k = km_constant::<f64>(m)?;
    let mf = m as f64;
    Ok(k * d1.abs().powf((mf + 1.0) / (2.0 * mf)) / dm.abs().powf(1.0 / mf))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Finite(usize),
    LinearSegment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupReport {
    pub critical: CriticalPoint,
    pub order: Option<Order>,
    /// Density prefactor constant, finite order only.
    pub b: Option<f64>,
    /// δ-amplitude carried by a linear segment.
    pub a: Option<f64>,
}

pub fn analyze(data: &InitialData) -> Result<BlowupReport> {
    let c = critical_time(&data.u0);
    if !c.t_star.is_finite() {
        return Ok(BlowupReport { critical: c, order: None, b: None, a: None });
    }
    if let Some((l, r)) = c.segment {
        let a = integrate_split(|s| data.f0.eval(s), l, r, data.f0.breakpoints(), Tolerance::new(1e-12, 1e-12))?;
        return Ok(BlowupReport { critical: c, order: Some(Order::LinearSegment), b: None, a: Some(a) });
    }
    let m = derivative_order(&data.u0, c.s_star);
    let b = match m {
        Some(m) => Some(b_constant(m, data.u0.derivative(1, c.s_star), data.u0.derivative(m, c.s_star))?),
        None => None,
    };
    Ok(BlowupReport { critical: c, order: m.map(Order::Finite), b, a: Some(0.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    Simple,
    /// `g′` vanishes at the root: characteristics are tangent.
    Tangent,
    /// Sign change across a jump of `u₀` rather than a zero.
    Jump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub s: f64,
    pub kind: RootKind,
}

/// Feet `s` of the characteristics through `(t, x)`: roots of `u₀(s)t + s − x`.
pub fn characteristic_roots(u0: &PiecewiseFunction, t: f64, x: f64, l: f64) -> Result<Vec<Root>> {
    if !(t >= 0.0) || !(l > 0.0) {
        return domain("need t >= 0 and L > 0");
    }
    let g = |s: f64| u0.eval(s) * t + s - x;
    let dg = |s: f64| 1.0 + t * u0.derivative(1, s);
    let mut nodes: Vec<f64> = (0..=SCAN_POINTS).map(|i| -l + 2.0 * l * i as f64 / SCAN_POINTS as f64).collect();
    nodes.extend(u0.breakpoints().iter().copied().filter(|b| b.abs() < l));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let sample = |s: f64, left: bool| if left { u0.left_limit(s) * t + s - x } else { u0.right_limit(s) * t + s - x };
    let scale = 1.0 + x.abs() + l;
    let mut roots: Vec<Root> = Vec::new();
    let push = |r: Root, roots: &mut Vec<Root>| {
        if roots.last().map_or(true, |p| (r.s - p.s).abs() > 1e-10) {
            roots.push(r);
        }
    };
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ga = sample(a, false);
        let gb = sample(b, true);
        if ga == 0.0 {
            push(Root { s: a, kind: classify(dg(a)) }, &mut roots);
            continue;
        }
        if ga * gb < 0.0 {
            let (mut lo, mut hi) = (a, b);
            while hi - lo > 1e-12 {
                let m = 0.5 * (lo + hi);
                if g(m) * ga > 0.0 {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            let s = 0.5 * (lo + hi);
            push(Root { s, kind: classify(dg(s)) }, &mut roots);
        } else if gb != 0.0 && (dg(a) * dg(b) <= 0.0 || dg(a).abs().min(dg(b).abs()) < 1e-6) {
            // even-order contact: look for a touching minimum of |g|
            let m = golden_min(|s| g(s).abs(), a, b, 1e-13);
            if g(m).abs() < 1e-10 * scale && m > a + 1e-13 && m < b - 1e-13 {
                push(Root { s: m, kind: RootKind::Tangent }, &mut roots);
            }
        }
        // a jump of u₀ at b that crosses zero
        let gl = sample(b, true);
        let gr = sample(b, false);
        if u0.breakpoints().contains(&b) && gl * gr < 0.0 {
            push(Root { s: b, kind: RootKind::Jump }, &mut roots);
        }
    }
    if let Some(last) = nodes.last() {
        if sample(*last, true) == 0.0 {
            push(Root { s: *last, kind: classify(dg(*last)) }, &mut roots);
        }
    }
    Ok(roots)
}

fn classify(dg: f64) -> RootKind {
    if dg.abs() < 1e-6 {
        RootKind::Tangent
    } else {
        RootKind::Simple
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// `(σ, ρ_σ(t*, x*))`.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub expected_slope: f64,
    /// `ρ·σ^{(m−1)/m}` at the smallest σ.
    pub prefactor: f64,
    /// `B·f₀(s*)`.
    pub expected_prefactor: f64,
    pub m: usize,
}

/// Log–log fit of `ρ_σ(t*, x*)` against σ.
pub fn scaling_exponent(data: &InitialData, sigmas: &[f64], l: f64, quad_tol: f64) -> Result<ScalingFit> {
    let rep = analyze(data)?;
    let c = rep.critical;
    if !c.t_star.is_finite() {
        return Err(Error::Geometry("no finite critical time".into()));
    }
    let m = match rep.order {
        Some(Order::Finite(m)) => m,
        Some(Order::LinearSegment) => return Err(Error::LinearSegment),
        None => return Err(Error::Geometry("no non-vanishing derivative up to order 6".into())),
    };
    if sigmas.len() < 2 {
        return domain("need at least two sigma values");
    }
    let samples: Result<Vec<(f64, f64)>> = sigmas
        .par_iter()
        .map(|&s| {
            let k = Kernel::new(data, KernelParams::new(s, l, quad_tol)?);
            Ok((s, k.rho_sigma(c.t_star, c.x_star)?))
        })
        .collect();
    let samples = samples?;
    let n = samples.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = samples.iter().map(|(s, r)| (s.ln(), r.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let mf = m as f64;
    let (smin, rmin) = samples.iter().copied().fold((f64::INFINITY, 0.0), |acc, p| if p.0 < acc.0 { p } else { acc });
    Ok(ScalingFit {
        samples,
        slope,
        expected_slope: -(mf - 1.0) / mf,
        prefactor: rmin * smin.powf((mf - 1.0) / mf),
        expected_prefactor: rep.b.unwrap_or(f64::NAN) * data.f0.eval(c.s_star),
        m,
    })
}

/// `∫_{s₁}^{s₂} f₀` over the segment where `u₀(s) = (x − s)/t`.
pub fn delta_amplitude(data: &InitialData, t: f64, x_tangent: f64, l: f64) -> Result<f64> {
    let (s1, s2) = tangent_segment(&data.u0, t, x_tangent, l).ok_or(Error::PointTangency)?;
    integrate_split(|s| data.f0.eval(s), s1, s2, data.f0.breakpoints(), Tolerance::new(1e-12, 1e-12))
}

/// Maximal interval where the characteristic line through `(t, x)` runs along the graph of `u₀`.
pub fn tangent_segment(u0: &PiecewiseFunction, t: f64, x: f64, l: f64) -> Option<(f64, f64)> {
    if !(t > 0.0) {
        return None;
    }
    let on = |s: f64| {
        let g = u0.eval(s) * t + s - x;
        g.abs() <= SEGMENT_TOL * (1.0 + x.abs()) && (1.0 + t * u0.derivative(1, s)).abs() <= SEGMENT_TOL
    };
    let h = 2.0 * l / SCAN_POINTS as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut i = 0;
    while i <= SCAN_POINTS {
        let s = -l + h * i as f64;
        if on(s) {
            let start = i;
            while i < SCAN_POINTS && on(-l + h * (i + 1) as f64) {
                i += 1;
            }
            if i > start {
                let a = -l + h * start as f64;
                let b = -l + h * i as f64;
                let a = if start == 0 { a } else { bisect_predicate(on, a, a - h, 1e-12) };
                let b = if i == SCAN_POINTS { b } else { bisect_predicate(on, b, b + h, 1e-12) };
                if best.map_or(true, |(p, q)| b - a > q - p) {
                    best = Some((a, b));
                }
            }
        }
        i += 1;
    }
    best
}
