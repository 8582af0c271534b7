//! Direct quadrature of the Gaussian-kernel representation of density and velocity.
//!
//! ```text
//! ρ_σ(t,x) = (2πt)^{-1/2} σ^{-1} ∫ f₀(s) exp(−(u₀(s)t + s − x)² / (2σ²t)) ds
//! û_σ(t,x) = ∫ u₀ f₀ e^{…} ds / ∫ f₀ e^{…} ds
//! ```
//!
//! The integrand is localized around the roots of `g(s) = u₀(s)t + s − x`
//! and evaluated with the smallest exponent factored out.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fields::{Grid, InitialData};
use crate::quadrature::{integrate_pieces, integrate_split, Tolerance};

const MESH_CELLS: usize = 4000;
const MIN_CELLS_PER_PIECE: usize = 8;
const BAND: f64 = 8.0;
const PAD: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub sigma: f64,
    /// Truncation half-width of the integration domain.
    pub l: f64,
    /// Absolute tolerance on ρ.
    pub quad_tol: f64,
}

impl KernelParams {
    pub fn new(sigma: f64, l: f64, quad_tol: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return domain("sigma must be positive");
        }
        if !(l >= 10.0) || !l.is_finite() {
            return domain("L must be at least 10");
        }
        if !(quad_tol > 0.0 && quad_tol <= 1e-4) {
            return domain("quad_tol must lie in (0, 1e-4]");
        }
        Ok(KernelParams { sigma, l, quad_tol })
    }

    /// `10 + sup|u₀|·t_max + 10·σ_max·√t_max`.
    pub fn default_l(u_sup: f64, t_max: f64, sigma_max: f64) -> f64 {
        10.0 + u_sup * t_max + 10.0 * sigma_max * t_max.sqrt()
    }
}

struct Cell {
    a: f64,
    b: f64,
    u_piece: usize,
    f_piece: usize,
    ua: f64,
    ub: f64,
    dua: f64,
    dub: f64,
    /// Left node is a breakpoint of the data.
    bp_left: bool,
}

/// Quadrature evaluator bound to one set of initial data and parameters.
pub struct Kernel {
    data: InitialData,
    params: KernelParams,
    cells: Vec<Cell>,
}

#[derive(Debug, Clone)]
struct Localized {
    intervals: Vec<(f64, f64, usize)>,
    /// Smallest exponent `g²/(2σ²t)` over the support, factored out of every integral.
    shift: f64,
}

impl Kernel {
    pub fn new(data: &InitialData, params: KernelParams) -> Self {
        let l = params.l;
        let mut nodes = vec![-l];
        nodes.extend(data.breakpoints().into_iter().filter(|b| *b > -l && *b < l));
        nodes.push(l);
        let h0 = 2.0 * l / MESH_CELLS as f64;
        let bps = data.breakpoints();
        let mut cells = Vec::new();
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = (((b - a) / h0).ceil() as usize).max(MIN_CELLS_PER_PIECE);
            let mid = 0.5 * (a + b);
            let u_piece = data.u0.locate(mid).unwrap_or_else(|i| i);
            let f_piece = data.f0.locate(mid).unwrap_or_else(|i| i);
            let up = &data.u0.pieces()[u_piece];
            for k in 0..n {
                let ca = a + (b - a) * k as f64 / n as f64;
                let cb = if k + 1 == n { b } else { a + (b - a) * (k + 1) as f64 / n as f64 };
                cells.push(Cell {
                    a: ca,
                    b: cb,
                    u_piece,
                    f_piece,
                    ua: up.eval(ca),
                    ub: up.eval(cb),
                    dua: up.derivative(1, ca),
                    dub: up.derivative(1, cb),
                    bp_left: k == 0 && bps.contains(&a),
                });
            }
        }
        Kernel { data: data.clone(), params, cells }
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn data(&self) -> &InitialData {
        &self.data
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t > 0.0) || !t.is_finite() {
            return domain("time must be positive");
        }
        Ok(())
    }

    fn localize(&self, t: f64, x: f64) -> Localized {
        let st = self.params.sigma * t.sqrt();
        let band = BAND * st;
        struct Leaf {
            a: f64,
            b: f64,
            cell: usize,
            lower: f64,
            gmin: f64,
            slope: f64,
        }
        let lower_bound = |a: f64, b: f64, ga: f64, gb: f64, dga: f64, dgb: f64| -> f64 {
            if ga * gb <= 0.0 {
                return 0.0;
            }
            let lip = 1.5 * dga.abs().max(dgb.abs()) + (gb - ga).abs() / (b - a);
            (0.5 * (ga.abs() + gb.abs() - lip * (b - a))).max(0.0)
        };
        let mut g_up = f64::INFINITY;
        let mut coarse = Vec::with_capacity(self.cells.len());
        for c in &self.cells {
            let ga = c.ua * t + c.a - x;
            let gb = c.ub * t + c.b - x;
            let dga = 1.0 + t * c.dua;
            let dgb = 1.0 + t * c.dub;
            g_up = g_up.min(ga.abs()).min(gb.abs());
            coarse.push((ga, gb, dga, dgb, lower_bound(c.a, c.b, ga, gb, dga, dgb)));
        }
        let mut leaves: Vec<Leaf> = Vec::new();
        for (ci, c) in self.cells.iter().enumerate() {
            let (ga, gb, dga, dgb, lb) = coarse[ci];
            if lb > g_up + band {
                continue;
            }
            let up = &self.data.u0.pieces()[c.u_piece];
            let mut stack = vec![(c.a, c.b, ga, gb, dga, dgb, 0u32)];
            while let Some((a, b, ga, gb, dga, dgb, depth)) = stack.pop() {
                let lb = lower_bound(a, b, ga, gb, dga, dgb);
                if lb > g_up + band {
                    continue;
                }
                let lip = dga.abs().max(dgb.abs()) + (gb - ga).abs() / (b - a);
                if lip * (b - a) <= st || depth > 60 {
                    let gmin = if ga * gb <= 0.0 { 0.0 } else { ga.abs().min(gb.abs()) };
                    leaves.push(Leaf { a, b, cell: ci, lower: lb, gmin, slope: dga.abs().max(dgb.abs()) });
                    continue;
                }
                let m = 0.5 * (a + b);
                let gm = up.eval(m) * t + m - x;
                let dgm = 1.0 + t * up.derivative(1, m);
                g_up = g_up.min(gm.abs());
                stack.push((a, m, ga, gm, dga, dgm, depth + 1));
                stack.push((m, b, gm, gb, dgm, dgb, depth + 1));
            }
        }
        let gmin = leaves.iter().fold(g_up, |m, l| m.min(l.gmin));
        let threshold = gmin + band;
        leaves.retain(|l| l.lower <= threshold);
        leaves.sort_by(|p, q| p.a.total_cmp(&q.a));
        let mut intervals: Vec<(f64, f64, usize)> = Vec::new();
        let mut run: Option<(f64, f64, usize, f64, f64)> = None;
        let flush = |run: (f64, f64, usize, f64, f64), out: &mut Vec<(f64, f64, usize)>| {
            let (a, b, ci, sa, sb) = run;
            let c = &self.cells[ci];
            let (lo, hi) = self.piece_span(ci);
            let pa = (PAD * st / sa.max(1e-300)).min(c.b - c.a);
            let pb = (PAD * st / sb.max(1e-300)).min(c.b - c.a);
            out.push(((a - pa).max(lo), (b + pb).min(hi), ci));
        };
        for l in &leaves {
            run = match run {
                Some((a, b, ci, sa, sb)) => {
                    let contiguous =
                        l.a <= b && !(self.cells[l.cell].bp_left && l.cell != ci && l.a == self.cells[l.cell].a);
                    if contiguous {
                        Some((a, b.max(l.b), ci, sa, l.slope.max(sb.min(l.slope))))
                    } else {
                        flush((a, b, ci, sa, sb), &mut intervals);
                        Some((l.a, l.b, l.cell, l.slope, l.slope))
                    }
                }
                None => Some((l.a, l.b, l.cell, l.slope, l.slope)),
            };
        }
        if let Some(r) = run {
            flush(r, &mut intervals);
        }
        // merge overlaps created by padding, never across a breakpoint
        let mut merged: Vec<(f64, f64, usize)> = Vec::new();
        for iv in intervals {
            if let Some(last) = merged.last_mut() {
                if iv.0 <= last.1 && self.piece_span(last.2) == self.piece_span(iv.2) {
                    last.1 = last.1.max(iv.1);
                    continue;
                }
                if iv.0 < last.1 {
                    let cut = self.piece_span(iv.2).0;
                    last.1 = last.1.min(cut);
                    merged.push((iv.0.max(cut), iv.1, iv.2));
                    continue;
                }
            }
            merged.push(iv);
        }
        let shift = gmin * gmin / (2.0 * st * st);
        Localized { intervals: merged, shift }
    }

    /// Extent of the data piece that contains cell `ci`, clipped to `[−L, L]`.
    fn piece_span(&self, ci: usize) -> (f64, f64) {
        let mut lo = ci;
        while lo > 0 && !self.cells[lo].bp_left {
            lo -= 1;
        }
        let mut hi = ci + 1;
        while hi < self.cells.len() && !self.cells[hi].bp_left {
            hi += 1;
        }
        (self.cells[lo].a, self.cells[hi - 1].b)
    }

    /// Scaled integrals `∫ w(s, u₀, f₀, g)·exp(−g²/(2σ²t) + shift) ds`.
    fn integrals<const N: usize, W>(&self, t: f64, x: f64, abs_tol: f64, w: W) -> Result<(f64, [f64; N])>
    where
        W: Fn(f64, f64, f64, f64) -> [f64; N],
    {
        self.check_t(t)?;
        let loc = self.localize(t, x);
        if loc.intervals.is_empty() {
            return Ok((loc.shift, [0.0; N]));
        }
        let two_var = 2.0 * self.params.sigma * self.params.sigma * t;
        let shift = loc.shift;
        let mut total = [0.0; N];
        let mut by_piece: Vec<(usize, usize, Vec<(f64, f64)>)> = Vec::new();
        for (a, b, ci) in &loc.intervals {
            let c = &self.cells[*ci];
            match by_piece.iter_mut().find(|p| p.0 == c.u_piece && p.1 == c.f_piece) {
                Some(p) => p.2.push((*a, *b)),
                None => by_piece.push((c.u_piece, c.f_piece, vec![(*a, *b)])),
            }
        }
        let tol = Tolerance::new(abs_tol.min(1e300), 1e-12);
        for (ui, fi, ivs) in by_piece {
            let up = &self.data.u0.pieces()[ui];
            let fp = &self.data.f0.pieces()[fi];
            let est = integrate_pieces(
                |s| {
                    let u = up.eval(s);
                    let f = fp.eval(s);
                    let g = u * t + s - x;
                    let e = (-(g * g / two_var - shift)).exp();
                    let mut v = w(s, u, f, g);
                    for c in v.iter_mut() {
                        *c *= e;
                    }
                    v
                },
                &ivs,
                tol,
            )?;
            for i in 0..N {
                total[i] += est.value[i];
            }
        }
        Ok((shift, total))
    }

    fn norm(&self, t: f64) -> f64 {
        (2.0 * PI * t).sqrt() * self.params.sigma
    }

    fn abs_tol(&self, t: f64) -> f64 {
        self.params.quad_tol * self.norm(t)
    }

    pub fn rho_sigma(&self, t: f64, x: f64) -> Result<f64> {
        let (shift, [j0]) = self.integrals(t, x, self.abs_tol(t), |_, _, f, _| [f])?;
        Ok((-shift).exp() * j0 / self.norm(t))
    }

    pub fn u_hat_sigma(&self, t: f64, x: f64) -> Result<f64> {
        self.fields(t, x).map(|p| p.1)
    }

    /// `(ρ_σ, û_σ)` from one pass.
    pub fn fields(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let (shift, [j0, j1]) = self.integrals(t, x, self.abs_tol(t), |_, u, f, _| [f, u * f])?;
        if !(j0 > 1e-300) {
            return Err(Error::Vacuum { t, x });
        }
        Ok(((-shift).exp() * j0 / self.norm(t), j1 / j0))
    }

    /// `∫ (u − û)² P_x du`, with `P_x` from the analytic x-derivative of the exponent.
    pub fn integral_term(&self, t: f64, x: f64) -> Result<f64> {
        let (_, uh) = self.fields(t, x)?;
        let var_t = self.params.sigma * self.params.sigma * t;
        let (shift, [j]) = self.integrals(t, x, self.abs_tol(t), |_, u, f, g| {
            let d = u - uh;
            [f * d * d * g / var_t]
        })?;
        Ok((-shift).exp() * j / self.norm(t))
    }

    /// `∫ φ(u) P(t,x,u) du`.
    pub fn moment(&self, t: f64, x: f64, phi: impl Fn(f64) -> f64) -> Result<f64> {
        let (shift, [j]) = self.integrals(t, x, self.abs_tol(t), |_, u, f, _| [phi(u) * f])?;
        Ok((-shift).exp() * j / self.norm(t))
    }

    /// Finite-difference residuals of the viscous mass and momentum equations.
    pub fn viscous_residual(&self, t: f64, x: f64, h: f64) -> Result<(f64, f64)> {
        self.residual_impl(t, x, h, true)
    }

    /// Momentum residual computed without the integral term.
    pub fn viscous_residual_without_term(&self, t: f64, x: f64, h: f64) -> Result<(f64, f64)> {
        self.residual_impl(t, x, h, false)
    }

    fn residual_impl(&self, t: f64, x: f64, h: f64, with_term: bool) -> Result<(f64, f64)> {
        if !(h > 0.0) || !(t > h) {
            return domain("need t > h > 0");
        }
        if (x.abs() + h) >= self.params.l {
            return domain("finite-difference stencil leaves [-L, L]");
        }
        let q = |tt: f64, xx: f64| -> Result<(f64, f64, f64)> {
            let (r, u) = self.fields(tt, xx)?;
            Ok((r, r * u, r * u * u))
        };
        let c = q(t, x)?;
        let tp = q(t + h, x)?;
        let tm = q(t - h, x)?;
        let xp = q(t, x + h)?;
        let xm = q(t, x - h)?;
        let s2 = 0.5 * self.params.sigma * self.params.sigma;
        let r_mass = (tp.0 - tm.0) / (2.0 * h) + (xp.1 - xm.1) / (2.0 * h) - s2 * (xp.0 - 2.0 * c.0 + xm.0) / (h * h);
        let mut r_mom =
            (tp.1 - tm.1) / (2.0 * h) + (xp.2 - xm.2) / (2.0 * h) - s2 * (xp.1 - 2.0 * c.1 + xm.1) / (h * h);
        if with_term {
            r_mom += self.integral_term(t, x)?;
        }
        Ok((r_mass, r_mom))
    }
}

/// Field of a kernel that can be paired with a test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Density,
    Momentum,
    IntegralTerm,
}

impl Kernel {
    /// `∫ q(t,x) φ(x) dx` over `[a, b]`, split at `points` where `q` is sharply peaked.
    pub fn pair(
        &self,
        field: Field,
        t: f64,
        phi: impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        points: &[f64],
        tol: f64,
    ) -> Result<f64> {
        let mut err = None;
        let eval = |x: f64| -> Result<f64> {
            Ok(match field {
                Field::Density => self.rho_sigma(t, x)?,
                Field::Momentum => {
                    let (r, u) = self.fields(t, x)?;
                    r * u
                }
                Field::IntegralTerm => self.integral_term(t, x)?,
            })
        };
        let v = integrate_split(
            |x| {
                let w = phi(x);
                if w == 0.0 {
                    return 0.0;
                }
                match eval(x) {
                    Ok(q) => q * w,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            },
            a,
            b,
            points,
            Tolerance::new(tol, tol),
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
}

/// Phase-space density `P(t,x,u)` accessed through its u-moments.
pub struct PhaseDensity<'a> {
    kernel: &'a Kernel,
}

impl<'a> PhaseDensity<'a> {
    pub fn new(kernel: &'a Kernel) -> Self {
        PhaseDensity { kernel }
    }

    /// `P(t,x,·)` mass at velocities `≤ u`.
    pub fn cdf_u(&self, t: f64, x: f64, u: f64) -> Result<f64> {
        self.kernel.moment(t, x, |v| if v <= u { 1.0 } else { 0.0 })
    }

    /// `∫∫ P dx du` over `[a, b]` in x.
    pub fn mass(&self, t: f64, a: f64, b: f64) -> Result<f64> {
        let mut err = None;
        let v = integrate_split(
            |x| match self.kernel.rho_sigma(t, x) {
                Ok(r) => r,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            a,
            b,
            &[],
            Tolerance::new(1e-9, 1e-10),
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
}

/// Convenience: `ρ_σ(t,x)` for one-off evaluations.
pub fn rho_sigma(data: &InitialData, params: KernelParams, t: f64, x: f64) -> Result<f64> {
    Kernel::new(data, params).rho_sigma(t, x)
}

pub fn u_hat_sigma(data: &InitialData, params: KernelParams, t: f64, x: f64) -> Result<f64> {
    Kernel::new(data, params).u_hat_sigma(t, x)
}

pub fn integral_term(data: &InitialData, params: KernelParams, t: f64, x: f64) -> Result<f64> {
    Kernel::new(data, params).integral_term(t, x)
}

pub fn viscous_residual(data: &InitialData, params: KernelParams, t: f64, x: f64, h: f64) -> Result<(f64, f64)> {
    Kernel::new(data, params).viscous_residual(t, x, h)
}

/// One stage `(ε, σ)` of the double limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub eps: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    stages: Vec<Stage>,
}

impl Schedule {
    /// Strictly decreasing ε and σ with σ < ε at every stage.
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Config("empty schedule".into()));
        }
        if stages.iter().any(|s| !(s.eps > 0.0) || !(s.sigma > 0.0) || !(s.sigma < s.eps)) {
            return Err(Error::Config("every stage needs 0 < sigma < eps".into()));
        }
        if stages.windows(2).any(|w| !(w[1].eps < w[0].eps) || !(w[1].sigma < w[0].sigma)) {
            return Err(Error::Config("schedule must be strictly decreasing".into()));
        }
        Ok(Schedule { stages })
    }

    /// `ε_k = ε₀·2^{-k}`, `σ_k = ε_k²`, `k = 0..=K`.
    pub fn geometric(eps0: f64, k_max: usize) -> Result<Self> {
        Self::new(
            (0..=k_max)
                .map(|k| {
                    let eps = eps0 * 0.5f64.powi(k as i32);
                    Stage { eps, sigma: eps * eps }
                })
                .collect(),
        )
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn last(&self) -> Stage {
        *self.stages.last().expect("nonempty")
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::geometric(0.1, 6).expect("valid default")
    }
}

/// Sampled generalized solution at one time.
#[derive(Debug, Clone)]
pub struct FpSolution {
    pub grid: Grid,
    pub density: Vec<f64>,
    pub velocity: Vec<f64>,
    pub atoms: Vec<(f64, f64)>,
    pub pressure: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub stages: Vec<Stage>,
    /// `|stage_K − stage_{K−1}|` per grid point, density then velocity.
    pub cauchy_density: Vec<f64>,
    pub cauchy_velocity: Vec<f64>,
    pub near_singular: Vec<bool>,
}

/// Runs the schedule and reports the last stage as the limit.
///
/// `family(ε)` returns the approximated initial data at scale ε.
pub fn fp_solution<F>(
    family: F,
    schedule: &Schedule,
    grid: &Grid,
    l: f64,
    quad_tol: f64,
) -> Result<(FpSolution, ConvergenceReport)>
where
    F: Fn(f64) -> Result<InitialData> + Sync,
{
    if !(grid.t > 0.0) {
        return domain("grid time must be positive");
    }
    let mut history: Vec<Vec<(f64, f64)>> = Vec::new();
    for st in schedule.stages() {
        let data = family(st.eps)?;
        let kernel = Kernel::new(&data, KernelParams::new(st.sigma, l, quad_tol)?);
        let vals: Result<Vec<(f64, f64)>> = grid.xs.par_iter().map(|&x| kernel.fields(grid.t, x)).collect();
        history.push(vals?);
    }
    let last = history.last().expect("nonempty");
    let n = grid.xs.len();
    let (cd, cv): (Vec<f64>, Vec<f64>) = if history.len() >= 2 {
        let prev = &history[history.len() - 2];
        (0..n).map(|i| ((last[i].0 - prev[i].0).abs(), (last[i].1 - prev[i].1).abs())).unzip()
    } else {
        (vec![f64::NAN; n], vec![f64::NAN; n])
    };
    let flag = 10.0 * quad_tol;
    let near_singular = (0..n).map(|i| cd[i] > flag || cv[i] > flag).collect();
    Ok((
        FpSolution {
            grid: grid.clone(),
            density: last.iter().map(|p| p.0).collect(),
            velocity: last.iter().map(|p| p.1).collect(),
            atoms: Vec::new(),
            pressure: None,
        },
        ConvergenceReport {
            stages: schedule.stages().to_vec(),
            cauchy_density: cd,
            cauchy_velocity: cv,
            near_singular,
        },
    ))
}

/// Sup-distance between two approximations' limits, away from `exclude` points.
#[derive(Debug, Clone, Copy)]
pub struct Discrepancy {
    pub density: f64,
    pub velocity: f64,
}

pub fn approximation_independence<F, G>(
    family_a: F,
    family_b: G,
    schedule: &Schedule,
    grid: &Grid,
    exclude: &[f64],
    radius: f64,
    l: f64,
    quad_tol: f64,
) -> Result<Discrepancy>
where
    F: Fn(f64) -> Result<InitialData> + Sync,
    G: Fn(f64) -> Result<InitialData> + Sync,
{
    let (a, _) = fp_solution(family_a, schedule, grid, l, quad_tol)?;
    let (b, _) = fp_solution(family_b, schedule, grid, l, quad_tol)?;
    let mut d = Discrepancy { density: 0.0, velocity: 0.0 };
    for (i, x) in grid.xs.iter().enumerate() {
        if exclude.iter().any(|e| (x - e).abs() < radius) {
            continue;
        }
        d.density = d.density.max((a.density[i] - b.density[i]).abs());
        d.velocity = d.velocity.max((a.velocity[i] - b.velocity[i]).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Bridge, Piece, PiecewiseFunction, RiemannData};
    use proptest::prelude::*;

    fn params(sigma: f64) -> KernelParams {
        KernelParams::new(sigma, 20.0, 1e-10).unwrap()
    }

    fn flat(c: f64) -> InitialData {
        InitialData::new(PiecewiseFunction::constant(1.0), PiecewiseFunction::constant(c))
    }

    #[test]
    fn heat_kernel_normalization() {
        for (sigma, t, x) in [(0.3, 1.0, 0.2), (1e-3, 0.5, -1.3), (0.05, 2.0, 4.0)] {
            let k = Kernel::new(&flat(0.0), params(sigma));
            assert!((k.rho_sigma(t, x).unwrap() - 1.0).abs() < 1e-9);
            let k = Kernel::new(&flat(0.7), params(sigma));
            assert!((k.rho_sigma(t, x).unwrap() - 1.0).abs() < 1e-9);
            assert!((k.u_hat_sigma(t, x).unwrap() - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn non_positive_time_is_domain_error() {
        let k = Kernel::new(&flat(0.0), params(0.1));
        assert!(matches!(k.rho_sigma(0.0, 0.0), Err(Error::Domain(_))));
        assert!(KernelParams::new(0.1, 5.0, 1e-8).is_err());
        assert!(KernelParams::new(0.1, 20.0, 1e-3).is_err());
    }

    #[test]
    fn linear_velocity_matches_characteristics() {
        // u₀(s) = −s: û = −x/(1 − t) before the focusing time
        let d = InitialData::new(PiecewiseFunction::constant(1.0), PiecewiseFunction::smooth(Piece::linear(-1.0, 0.0)));
        let k = Kernel::new(&d, params(1e-3));
        let u = k.u_hat_sigma(0.5, 0.3).unwrap();
        assert!((u + 0.3 / 0.5).abs() < 1e-3, "{u}");
    }

    #[test]
    fn compression_middle_velocity() {
        let r = RiemannData::new(1.0, 0.0, 0.0, -1.0, 0.0).unwrap();
        let d = r.mollified(1e-2, Bridge::Linear).unwrap();
        let k = Kernel::new(&d, params(1e-3));
        for x in [-1.2, -1.0, -0.5, -0.01, 0.0, 0.3] {
            let u = k.u_hat_sigma(1.0, x).unwrap();
            let rho = k.rho_sigma(1.0, x).unwrap();
            let uc = crate::riemann_closed_form::u_eps_sigma_closed(&r, 1e-2, 1e-3, 1.0, x).unwrap();
            let rc = crate::riemann_closed_form::rho_eps_sigma_closed(&r, 1e-2, 1e-3, 1.0, x).unwrap();
            assert!((u - uc).abs() < 1e-8, "{x}: {u} {uc}");
            assert!((rho - rc).abs() < 1e-8, "{x}: {rho} {rc}");
        }
        assert!((k.u_hat_sigma(1.0, -0.5).unwrap() + 0.5).abs() < 2e-2);
    }

    #[test]
    fn vacuum_is_reported() {
        let f0 = PiecewiseFunction::step(0.0, 0.0, 1.0);
        let d = InitialData::new(f0, PiecewiseFunction::constant(0.0));
        let k = Kernel::new(&d, params(1e-2));
        assert!(matches!(k.u_hat_sigma(1.0, -5.0), Err(Error::Vacuum { .. })));
    }

    #[test]
    fn pure_heat_residual_small() {
        let f0 = PiecewiseFunction::smooth(Piece::new(|s: f64| (-s * s).exp()));
        let d = InitialData::new(f0, PiecewiseFunction::constant(0.0));
        let k = Kernel::new(&d, params(0.1));
        let (rm, rp) = k.viscous_residual(1.0, 0.3, 1e-3).unwrap();
        assert!(rm.abs() < 1e-4, "{rm}");
        assert!(rp.abs() < 1e-4, "{rp}");
    }

    #[test]
    fn smooth_residuals_below_t_star() {
        let u0 = PiecewiseFunction::smooth(
            Piece::new(|s: f64| -0.5 * s.tanh()).with_derivative(|s: f64| -0.5 / s.cosh().powi(2)),
        );
        let f0 = PiecewiseFunction::smooth(Piece::new(|s: f64| 1.0 + 0.5 * (-s * s).exp()));
        let d = InitialData::new(f0, u0);
        let k = Kernel::new(&d, params(0.05));
        for x in [-0.7, 0.0, 0.4] {
            let (rm, rp) = k.viscous_residual(1.0, x, 1e-3).unwrap();
            assert!(rm.abs() < 1e-3 && rp.abs() < 1e-3, "{x}: {rm} {rp}");
        }
    }

    #[test]
    fn stencil_outside_domain_rejected() {
        let k = Kernel::new(&flat(0.0), params(0.1));
        assert!(k.viscous_residual(1.0, 19.9999, 1e-3).is_err());
        assert!(k.viscous_residual(1e-4, 0.0, 1e-3).is_err());
    }

    #[test]
    fn integral_term_vanishes_for_constant_velocity() {
        let k = Kernel::new(&flat(0.4), params(0.05));
        assert!(k.integral_term(1.0, 0.3).unwrap().abs() < 1e-10);
    }

    #[test]
    fn integral_term_small_in_rarefaction_interior() {
        let r = RiemannData::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let k = Kernel::new(&r.mollified(1e-2, Bridge::Linear).unwrap(), params(1e-2));
        let v = k.integral_term(1.0, 0.5).unwrap();
        assert!(v.abs() < 1e-2, "{v}");
    }

    #[test]
    fn without_term_momentum_residual_grows_near_jump() {
        let r = RiemannData::new(1.0, 0.0, 0.0, -1.0, 0.0).unwrap();
        let d = r.mollified(1e-2, Bridge::Linear).unwrap();
        let mut prev = 0.0;
        for sigma in [0.05, 0.02] {
            let k = Kernel::new(&d, params(sigma));
            let (_, bare) = k.viscous_residual_without_term(1.0, 0.0, 2e-3).unwrap();
            assert!(bare.abs() > prev);
            prev = bare.abs();
        }
        assert!(prev > 1.0, "{prev}");
    }

    #[test]
    fn phase_density_mass_matches_initial_mass() {
        let f0 = PiecewiseFunction::smooth(Piece::new(|s: f64| (-s * s).exp()));
        let u0 = PiecewiseFunction::smooth(
            Piece::new(|s: f64| -0.3 * s.tanh()).with_derivative(|s: f64| -0.3 / s.cosh().powi(2)),
        );
        let d = InitialData::new(f0, u0);
        let k = Kernel::new(&d, params(0.1));
        let p = PhaseDensity::new(&k);
        let m = p.mass(1.0, -12.0, 12.0).unwrap();
        assert!((m - PI.sqrt()).abs() < 1e-6 * PI.sqrt(), "{m}");
        assert!(p.cdf_u(1.0, 0.3, 10.0).unwrap() >= p.cdf_u(1.0, 0.3, 0.0).unwrap());
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(vec![Stage { eps: 0.1, sigma: 0.01 }, Stage { eps: 0.2, sigma: 0.001 }]).is_err());
        assert!(Schedule::new(vec![Stage { eps: 0.1, sigma: 0.2 }]).is_err());
        let s = Schedule::default();
        assert_eq!(s.stages().len(), 7);
        assert!((s.last().eps - 1.5625e-3).abs() < 1e-18);
    }

    #[test]
    fn identical_approximations_have_zero_discrepancy() {
        let r = RiemannData::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let g = Grid::uniform(1.0, -1.0, 2.0, 7).unwrap();
        let s = Schedule::geometric(0.1, 1).unwrap();
        let d = approximation_independence(
            |e| r.mollified(e, Bridge::Linear),
            |e| r.mollified(e, Bridge::Linear),
            &s,
            &g,
            &[],
            0.0,
            20.0,
            1e-8,
        )
        .unwrap();
        assert_eq!(d.density, 0.0);
        assert_eq!(d.velocity, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn u_hat_is_a_convex_average(x in -2.0f64..2.0, t in 0.1f64..2.0, lsig in -3.0f64..-0.5, u1 in -1.0f64..1.0, u2 in -2.0f64..2.0) {
            let r = RiemannData::new(1.0, 0.5, u1, u2, 0.0).unwrap();
            let d = r.mollified(0.05, Bridge::Linear).unwrap();
            let k = Kernel::new(&d, params(10f64.powf(lsig)));
            let u = k.u_hat_sigma(t, x).unwrap();
            let lo = u1.min(u1 + u2);
            let hi = u1.max(u1 + u2);
            prop_assert!(u >= lo - 1e-12 && u <= hi + 1e-12);
            prop_assert!(k.rho_sigma(t, x).unwrap() >= 0.0);
        }

        #[test]
        fn second_differences_bounded(x in -1.5f64..1.5, sig_exp in 1u32..3) {
            let sigma = 10f64.powi(-(sig_exp as i32));
            let r = RiemannData::new(1.0, 1.0, 0.0, -1.0, 0.0).unwrap();
            let k = Kernel::new(&r.mollified(0.05, Bridge::Linear).unwrap(), params(sigma));
            let h = sigma / 4.0;
            let v: Vec<f64> = [-h, 0.0, h].iter().map(|d| k.rho_sigma(1.0, x + d).unwrap()).collect();
            let d2 = (v[0] - 2.0 * v[1] + v[2]) / (h * h);
            prop_assert!(d2.is_finite());
            prop_assert!(d2.abs() <= 50.0 / (sigma * sigma));
        }
    }

    #[test]
    fn mass_with_boundary_leakage() {
        let f0 = PiecewiseFunction::smooth(Piece::new(|s: f64| (-s * s / 2.0).exp()));
        let u0 = PiecewiseFunction::smooth(Piece::new(|s: f64| 0.5 * s.sin()).with_derivative(|s: f64| 0.5 * s.cos()));
        let d = InitialData::new(f0, u0);
        let total = (2.0 * PI).sqrt();
        for sigma in [0.1, 0.01] {
            let k = Kernel::new(&d, params(sigma));
            let p = PhaseDensity::new(&k);
            let m = p.mass(1.0, -15.0, 15.0).unwrap();
            assert!((m - total).abs() < 1e-6, "{sigma}: {m}");
        }
    }

    #[test]
    fn kernel_error_decays_with_sigma() {
        let u0 = PiecewiseFunction::smooth(
            Piece::new(|s: f64| -0.5 * s.tanh()).with_derivative(|s: f64| -0.5 / s.cosh().powi(2)),
        );
        let d = InitialData::new(PiecewiseFunction::constant(1.0), u0.clone());
        let (t, x) = (1.0, 0.4);
        let root = crate::blowup::characteristic_roots(&u0, t, x, 20.0).unwrap();
        let exact = u0.eval(root[0].s);
        let errs: Vec<f64> = [1e-1, 3e-2, 1e-2, 3e-3]
            .iter()
            .map(|&s| (Kernel::new(&d, params(s)).u_hat_sigma(t, x).unwrap() - exact).abs())
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1] && errs[3] < errs[2], "{errs:?}");
    }
}
