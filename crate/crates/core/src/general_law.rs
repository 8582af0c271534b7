//! Conservation laws `v_t + G(v)v_x = 0` reduced to the Burgers form by `u = G(v)`.
//!
//! Sticky dynamics are computed in `u`-variables and mapped back pointwise;
//! point masses of the density pass through unchanged.

use std::fmt;
use std::sync::Arc;

use crate::blowup::{characteristic_roots, RootKind};
use crate::error::{domain, Error, Result};
use crate::fields::{InitialData, PiecewiseFunction};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Monotone flux-velocity map with its derivative and, optionally, its inverse.
#[derive(Clone)]
pub struct FluxMap {
    name: String,
    g: ScalarFn,
    g_prime: ScalarFn,
    g_inverse: Option<ScalarFn>,
    /// Open interval of admissible `v`.
    domain: (f64, f64),
}

impl fmt::Debug for FluxMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxMap").field("name", &self.name).field("domain", &self.domain).finish()
    }
}

impl FluxMap {
    pub fn new(
        name: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Result<Self> {
        if !(domain.0 < domain.1) {
            return self::domain("flux domain must be a nonempty interval");
        }
        Ok(FluxMap { name: name.into(), g: Arc::new(g), g_prime: Arc::new(g_prime), g_inverse: None, domain })
    }

    pub fn with_inverse(mut self, inv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.g_inverse = Some(Arc::new(inv));
        self
    }

    pub fn identity() -> Self {
        FluxMap::new("identity", |v| v, |_| 1.0, (f64::NEG_INFINITY, f64::INFINITY)).unwrap().with_inverse(|u| u)
    }

    /// `G(v) = v²` for `v > 0`.
    pub fn square_positive() -> Self {
        FluxMap::new("square-positive", |v| v * v, |v| 2.0 * v, (0.0, f64::INFINITY)).unwrap().with_inverse(f64::sqrt)
    }

    pub fn exp() -> Self {
        FluxMap::new("exp", f64::exp, f64::exp, (f64::NEG_INFINITY, f64::INFINITY)).unwrap().with_inverse(f64::ln)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Self::identity()),
            "square-positive" => Ok(Self::square_positive()),
            "exp" => Ok(Self::exp()),
            other => Err(Error::Config(format!("unknown flux preset `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, v: f64) -> f64 {
        (self.g)(v)
    }

    pub fn derivative(&self, v: f64) -> f64 {
        (self.g_prime)(v)
    }

    fn in_domain(&self, v: f64) -> bool {
        v > self.domain.0 && v < self.domain.1
    }

    fn bracket(&self) -> (f64, f64) {
        let clip = |b: f64, fallback: f64| if b.is_finite() { b } else { fallback };
        (clip(self.domain.0, -1e6), clip(self.domain.1, 1e6))
    }

    /// `G⁻¹(u)`, by bisection when no inverse was supplied.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        if !u.is_finite() {
            return Err(Error::OutOfRange(u));
        }
        if let Some(inv) = &self.g_inverse {
            let v = inv(u);
            return if v.is_finite() && self.in_domain(v) { Ok(v) } else { Err(Error::OutOfRange(u)) };
        }
        let (mut a, mut b) = self.bracket();
        let (ga, gb) = (self.eval(a) - u, self.eval(b) - u);
        if ga * gb > 0.0 {
            return Err(Error::OutOfRange(u));
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (self.eval(m) - u) * ga > 0.0 {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-15 * (1.0 + m.abs()) {
                break;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// `G′ ≠ 0` and `G⁻¹(G(v)) = v` to `1e−10` on the given samples.
    pub fn check(&self, samples: &[f64]) -> Result<()> {
        for &v in samples {
            if !self.in_domain(v) {
                return Err(Error::OutOfRange(v));
            }
            let d = self.derivative(v);
            if !(d.abs() > 1e-12) {
                return Err(Error::DegenerateFlux(v));
            }
            let back = self.inverse(self.eval(v))?;
            if (back - v).abs() > 1e-10 * (1.0 + v.abs()) {
                return Err(Error::Inconsistent(format!("flux inverse off by {} at v = {v}", back - v)));
            }
        }
        Ok(())
    }
}

/// Burgers-form data `u₀ = G∘v₀`, `f₀ = g₀` together with the flux.
#[derive(Debug, Clone)]
pub struct TransformedProblem {
    pub data: InitialData,
    pub flux: FluxMap,
    pub v0: PiecewiseFunction,
}

const RANGE_SAMPLES: usize = 2000;

fn samples(f: &PiecewiseFunction, window: (f64, f64)) -> Vec<f64> {
    let mut out: Vec<f64> = (0..=RANGE_SAMPLES)
        .map(|i| f.eval(window.0 + (window.1 - window.0) * i as f64 / RANGE_SAMPLES as f64))
        .collect();
    for &b in f.breakpoints() {
        if b >= window.0 && b <= window.1 {
            out.push(f.left_limit(b));
            out.push(f.right_limit(b));
        }
    }
    out
}

/// Transforms `(g₀, v₀)` after checking the flux on the range of `v₀` over `window`.
pub fn transform_problem(
    v0: &PiecewiseFunction,
    g0: &PiecewiseFunction,
    flux: &FluxMap,
    window: (f64, f64),
) -> Result<TransformedProblem> {
    flux.check(&samples(v0, window))?;
    let (g, gp) = (flux.g.clone(), flux.g_prime.clone());
    let u0 = v0.compose(g, Some(gp));
    Ok(TransformedProblem { data: InitialData::new(g0.clone(), u0), flux: flux.clone(), v0: v0.clone() })
}

/// `v = G⁻¹(u)` after checking that `u` stays in the range of `G` over `window`.
pub fn back_transform(u: &PiecewiseFunction, flux: &FluxMap, window: (f64, f64)) -> Result<PiecewiseFunction> {
    for w in samples(u, window) {
        flux.inverse(w)?;
    }
    let f = flux.clone();
    let inv: ScalarFn = Arc::new(move |w| f.inverse(w).unwrap_or(f64::NAN));
    Ok(u.compose(inv, None))
}

/// Pointwise back transform of sampled values.
pub fn back_transform_values(us: &[f64], flux: &FluxMap) -> Result<Vec<f64>> {
    us.iter().map(|&u| flux.inverse(u)).collect()
}

/// Classical solution before the gradient catastrophe: the unique foot of the
/// characteristic through `(t, x)` and the transported `v` and density.
pub fn classical_solution(p: &TransformedProblem, t: f64, x: f64, l: f64) -> Result<(f64, f64)> {
    let roots = characteristic_roots(&p.data.u0, t, x, l)?;
    let cont: Vec<f64> = roots.iter().filter(|r| r.kind == RootKind::Simple).map(|r| r.s).collect();
    if cont.len() != 1 || roots.len() != 1 {
        return Err(Error::Geometry(format!("{} feet through ({t}, {x})", roots.len())));
    }
    let s = cont[0];
    let jac = 1.0 + t * p.data.u0.derivative(1, s);
    if !(jac > 0.0) {
        return Err(Error::Geometry("characteristics have crossed".into()));
    }
    Ok((p.v0.eval(s), p.data.f0.eval(s) / jac))
}

/// Central-difference residuals of `v_t + G(v)v_x` and `g_t + (g G(v))_x` at `(t, x)`.
pub fn residuals(p: &TransformedProblem, t: f64, x: f64, h: f64, l: f64) -> Result<(f64, f64)> {
    if !(t > h) {
        return domain("need t > h");
    }
    let at = |t: f64, x: f64| classical_solution(p, t, x, l);
    let (v, _) = at(t, x)?;
    let (vtp, gtp) = at(t + h, x)?;
    let (vtm, gtm) = at(t - h, x)?;
    let (vxp, gxp) = at(t, x + h)?;
    let (vxm, gxm) = at(t, x - h)?;
    let g = &p.flux;
    let r_v = (vtp - vtm) / (2.0 * h) + g.eval(v) * (vxp - vxm) / (2.0 * h);
    let r_g = (gtp - gtm) / (2.0 * h) + (gxp * g.eval(vxp) - gxm * g.eval(vxm)) / (2.0 * h);
    Ok((r_v, r_g))
}
