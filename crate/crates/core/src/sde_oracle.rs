//! Monte Carlo ground truth for the perturbed characteristics
//! `dX = U dt + σ dW`, `dU = 0`.
//!
//! Paths are exactly integrable, so each one is a single draw
//! `X = X₀ + U₀t + σ√t·Z` with `X₀` sampled from the normalized `f₀`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fields::{Grid, InitialData};
use crate::quadrature::{integrate, Tolerance};

const BATCHES: usize = 16;
const CDF_CELLS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    /// Kept for the step-independence check; the update itself has no time step.
    pub dt: f64,
    pub sigma: f64,
    pub seed: u64,
    /// Kernel bandwidth in `x`; Silverman's rule when `None`.
    pub bandwidth: Option<f64>,
    /// Sampling window `[−l, l]` for `X₀`.
    pub l: f64,
}

impl McConfig {
    pub fn new(n_paths: usize, sigma: f64, seed: u64) -> Self {
        McConfig { n_paths, dt: 1e-2, sigma, seed, bandwidth: None, l: 10.0 }
    }

    fn validate(&self, t_end: f64) -> Result<()> {
        if self.n_paths < 1000 {
            return domain("n_paths must be at least 1000");
        }
        if !(self.sigma >= 0.0) || !(self.l > 0.0) {
            return domain("need sigma >= 0 and l > 0");
        }
        if !(t_end > 0.0) || !(self.dt > 0.0) || self.dt > 1e-2 * t_end {
            return domain("need t_end > 0 and 0 < dt <= 1e-2 t_end");
        }
        if self.bandwidth.is_some_and(|h| !(h > 0.0)) {
            return domain("bandwidth must be positive");
        }
        Ok(())
    }
}

/// Terminal states of all paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub t: f64,
    pub x0: Vec<f64>,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// `∫f₀` over the sampling window; the KDE estimates a density of unit mass.
    pub mass: f64,
}

/// Inverse-CDF sampler for `f₀` on a window.
struct Sampler<'a> {
    data: &'a InitialData,
    nodes: Vec<f64>,
    cdf: Vec<f64>,
    tol: Tolerance,
}

impl<'a> Sampler<'a> {
    fn new(data: &'a InitialData, l: f64) -> Result<Self> {
        let mut nodes: Vec<f64> = (0..=CDF_CELLS).map(|i| -l + 2.0 * l * i as f64 / CDF_CELLS as f64).collect();
        nodes.extend(data.f0.breakpoints().iter().copied().filter(|b| b.abs() < l));
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let tol = Tolerance::new(1e-13, 1e-12);
        let mut cdf = vec![0.0];
        for w in nodes.windows(2) {
            let cell = integrate(|s| data.f0.eval(s), w[0], w[1], tol)?;
            if cell < -1e-14 {
                return domain("initial density must be non-negative");
            }
            cdf.push(cdf.last().unwrap() + cell.max(0.0));
        }
        if !(*cdf.last().unwrap() > 0.0) {
            return domain("initial density vanishes on the window");
        }
        Ok(Sampler { data, nodes, cdf, tol })
    }

    fn mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    fn sample(&self, v: f64) -> Result<f64> {
        let target = v * self.mass();
        let k = self.cdf.partition_point(|c| *c <= target).clamp(1, self.cdf.len() - 1) - 1;
        let (a, b) = (self.nodes[k], self.nodes[k + 1]);
        let rest = target - self.cdf[k];
        let (mut lo, mut hi) = (a, b);
        while hi - lo > 1e-10 {
            let m = 0.5 * (lo + hi);
            let part = integrate(|s| self.data.f0.eval(s), a, m, self.tol)?;
            if part < rest {
                lo = m;
            } else {
                hi = m;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Samples `n_paths` independent paths up to `t_end`.
pub fn simulate(data: &InitialData, cfg: &McConfig, t_end: f64) -> Result<Ensemble> {
    cfg.validate(t_end)?;
    let sampler = Sampler::new(data, cfg.l)?;
    let scale = cfg.sigma * t_end.sqrt();
    let paths: Vec<(f64, f64, f64)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let v: f64 = rng.random();
            let z: f64 = rng.sample(StandardNormal);
            let x0 = sampler.sample(v)?;
            let u = data.u0.eval(x0);
            Ok((x0, x0 + u * t_end + scale * z, u))
        })
        .collect::<Result<_>>()?;
    let mut e =
        Ensemble { t: t_end, x0: Vec::with_capacity(paths.len()), x: Vec::new(), u: Vec::new(), mass: sampler.mass() };
    for (x0, x, u) in paths {
        e.x0.push(x0);
        e.x.push(x);
        e.u.push(u);
    }
    Ok(e)
}

/// Silverman's rule of thumb `1.06·sd·n^{−1/5}`.
pub fn silverman_bandwidth(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    1.06 * var.sqrt() * n.powf(-0.2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldEstimate {
    pub x: f64,
    /// Density of `X` normalized to unit mass.
    pub rho: f64,
    pub u: f64,
    pub stderr_rho: f64,
    pub stderr_u: f64,
    /// Too few samples within one bandwidth for a meaningful estimate.
    pub insufficient: bool,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Gaussian KDE of `X` and Nadaraya–Watson estimate of `E[U | X = x]`,
/// with batch-means standard errors over 16 interleaved batches.
///
/// The velocity error is floored by the binomial error of an unseen branch,
/// `spread·√(p(1−p)/n_eff)` with `p = 1/(n_eff + 2)`.
pub fn estimate_fields(ens: &Ensemble, grid: &Grid, bandwidth: Option<f64>) -> Result<Vec<FieldEstimate>> {
    let n = ens.x.len();
    if n < BATCHES * 2 {
        return domain("ensemble too small");
    }
    let h = bandwidth.unwrap_or_else(|| silverman_bandwidth(&ens.x));
    if !(h > 0.0) {
        return Err(Error::Config("bandwidth must be positive".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ens.x[a].total_cmp(&ens.x[b]));
    let xs: Vec<f64> = order.iter().map(|&i| ens.x[i]).collect();
    let norm = 1.0 / (h * (2.0 * std::f64::consts::PI).sqrt());
    let per_batch = (n / BATCHES) as f64;
    let (u_min, u_max) = ens.u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
    let spread = u_max - u_min;
    Ok(grid
        .xs
        .par_iter()
        .map(|&x| {
            let lo = xs.partition_point(|v| *v < x - 9.0 * h);
            let hi = xs.partition_point(|v| *v <= x + 9.0 * h);
            let mut den = [0.0; BATCHES];
            let mut num = [0.0; BATCHES];
            let mut near = 0usize;
            let mut w2 = 0.0;
            for k in lo..hi {
                let i = order[k];
                let z = (xs[k] - x) / h;
                let w = (-0.5 * z * z).exp();
                w2 += w * w;
                den[i % BATCHES] += w;
                num[i % BATCHES] += w * ens.u[i];
                if z.abs() <= 1.0 {
                    near += 1;
                }
            }
            let rho_b: Vec<f64> = den.iter().map(|d| d * norm / per_batch).collect();
            let (rho, stderr_rho) = mean_sd(&rho_b);
            let total: f64 = den.iter().sum();
            let u = if total > 0.0 { num.iter().sum::<f64>() / total } else { f64::NAN };
            let ub: Vec<f64> = num.iter().zip(&den).filter(|(_, d)| **d > 0.0).map(|(a, d)| a / d).collect();
            // a neighbourhood where every sample shares one velocity still has the
            // binomial uncertainty of not having drawn the other branch
            let n_eff = total * total / w2;
            let p = 1.0 / (n_eff + 2.0);
            let floor = spread * (p * (1.0 - p) / n_eff).sqrt();
            let stderr_u = if ub.len() == BATCHES { mean_sd(&ub).1.max(floor) } else { f64::NAN };
            FieldEstimate { x, rho, u, stderr_rho, stderr_u, insufficient: near < 10 || !stderr_u.is_finite() }
        })
        .collect())
}
