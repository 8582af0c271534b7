//! Sticky-particle reduction: the δ-shock that replaces the overlapping domain.
//!
//! Constant states have the explicit trajectory
//!
//! ```text
//! x_j(t) = ([uf]t − f₃ + √(f₃² − 2[uf]f₃t + ([uf]² − [f][u²f])t²)) / [f]
//! m(t)   = −[uf]t + [f]x_j(t) + f₃
//! ```
//!
//! General data is handled in Lagrangian coordinates: the shock at `x_j(t)`
//! carries every particle whose free path has reached it, i.e. the feet
//! between the outermost roots of `s + u₀(s)t = x_j`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::blowup::{characteristic_roots, critical_time, RootKind};
use crate::error::{domain, Error, Result};
use crate::fields::{InitialData, RiemannData};
use crate::quadrature::{integrate_pieces, Tolerance};
use crate::scalar::Scalar;

/// Shock position, carried mass and velocity at one time, with the adjacent
/// characteristic speeds that bound `v` under the Lax condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpState<T> {
    pub t: T,
    pub x_j: T,
    pub m: T,
    pub v: T,
    /// Velocity of the particles arriving from the left.
    pub u_left: T,
    /// Velocity of the particles arriving from the right.
    pub u_right: T,
}

impl<T: Scalar> JumpState<T> {
    /// `u_right < v < u_left`.
    pub fn lax_holds(&self) -> bool {
        self.u_right < self.v && self.v < self.u_left
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryStatus<T> {
    Regular,
    /// The carried mass reached zero at `t_star`; the state is frozen there and `v` is NaN.
    MassVanished {
        t_star: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantTrajectory<T> {
    pub state: JumpState<T>,
    pub status: TrajectoryStatus<T>,
}

impl<T: Scalar> ConstantTrajectory<T> {
    /// New Riemann problem at the vanishing point with caller-chosen states.
    pub fn repose(&self, f1: T, f2: T, u1: T, u2: T) -> Result<Option<RiemannData<T>>> {
        match self.status {
            TrajectoryStatus::Regular => Ok(None),
            TrajectoryStatus::MassVanished { .. } => {
                Ok(Some(RiemannData::new(f1, f2, u1, u2, T::zero())?.at(self.state.x_j)))
            }
        }
    }
}

/// `f₃² − 2[uf]f₃t + ([uf]² − [f][u²f])t²`, the squared carried mass.
pub fn mass_discriminant<T: Scalar>(data: &RiemannData<T>, t: T) -> T {
    let (jf, juf, ju2f, f3) = (data.jump_f(), data.jump_uf(), data.jump_u2f(), data.f3);
    f3 * f3 - T::lit(2.0) * juf * f3 * t + (juf * juf - jf * ju2f) * t * t
}

/// First positive time at which the discriminant vanishes.
pub fn mass_vanishing_time<T: Scalar>(data: &RiemannData<T>) -> Option<T> {
    let (jf, juf, ju2f, f3) = (data.jump_f(), data.jump_uf(), data.jump_u2f(), data.f3);
    let a = juf * juf - jf * ju2f;
    let b = -T::lit(2.0) * juf * f3;
    let c = f3 * f3;
    if c == T::zero() {
        return None;
    }
    let mut roots = Vec::new();
    if a == T::zero() {
        if b != T::zero() {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - T::lit(4.0) * a * c;
        if disc >= T::zero() {
            let q = -(b + b.signum() * disc.sqrt()) / T::lit(2.0);
            roots.push(q / a);
            if q != T::zero() {
                roots.push(c / q);
            }
        }
    }
    roots.into_iter().filter(|r| *r > T::zero()).fold(None, |m: Option<T>, r| Some(m.map_or(r, |m| m.min(r))))
}

fn constant_state<T: Scalar>(data: &RiemannData<T>, t: T) -> Result<JumpState<T>> {
    let two = T::lit(2.0);
    let (jf, juf, ju2f, f3) = (data.jump_f(), data.jump_uf(), data.jump_u2f(), data.f3);
    let (x, m) = if jf != T::zero() {
        let disc = mass_discriminant(data, t);
        if disc < T::zero() {
            return Err(Error::Inconsistent("negative discriminant in the shock trajectory".into()));
        }
        let r = disc.sqrt();
        ((juf * t - f3 + r) / jf, r)
    } else {
        let m = f3 - juf * t;
        (-ju2f * t * t / (two * m), m)
    };
    let v = if m.abs() > T::epsilon() * (T::one() + f3.abs()) {
        (-ju2f * t + juf * x) / m
    } else if f3 == T::zero() {
        // self-similar start: x_j = c·t
        let c = if jf != T::zero() {
            (juf + (juf * juf - jf * ju2f).max(T::zero()).sqrt()) / jf
        } else {
            ju2f / (two * juf)
        };
        c
    } else {
        T::nan()
    };
    Ok(JumpState { t, x_j: x + data.x0, m, v, u_left: data.u1, u_right: data.u1 + data.u2 })
}

/// Closed-form trajectory for compressive constant-state data (`u₂ < 0`).
pub fn jump_trajectory_constant<T: Scalar>(data: &RiemannData<T>, t: T) -> Result<ConstantTrajectory<T>> {
    if !(data.u2 < T::zero()) {
        return domain("the shock trajectory needs u2 < 0");
    }
    if !(t >= T::zero()) {
        return domain("time must be non-negative");
    }
    if let Some(ts) = mass_vanishing_time(data) {
        if t >= ts {
            let (jf, juf) = (data.jump_f(), data.jump_uf());
            let x_j = if jf != T::zero() { (juf * ts - data.f3) / jf } else { T::nan() } + data.x0;
            let s = JumpState { t: ts, x_j, m: T::zero(), v: T::nan(), u_left: data.u1, u_right: data.u1 + data.u2 };
            return Ok(ConstantTrajectory { state: s, status: TrajectoryStatus::MassVanished { t_star: ts } });
        }
    }
    Ok(ConstantTrajectory { state: constant_state(data, t)?, status: TrajectoryStatus::Regular })
}

/// How branch integrals weigh the initial density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchWeight {
    /// Mass per unit foot: `∫ f₀ ds`, i.e. `f₀(s(x))|∂s/∂x| dx`.
    #[default]
    Jacobian,
    /// `f₀(s(x)) dx` as written, i.e. `∫ f₀|1 + t u₀′| ds`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralConfig {
    /// Half-width of the window searched for characteristic feet.
    pub l: f64,
    pub weight: BranchWeight,
    pub max_halvings: usize,
    pub quad_tol: f64,
}

impl Default for GeneralConfig {
    fn default() -> Self {
        GeneralConfig { l: 20.0, weight: BranchWeight::Jacobian, max_halvings: 40, quad_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StickyEvent {
    MassVanished { t: f64, x_j: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StickySeries {
    pub states: Vec<JumpState<f64>>,
    pub event: Option<StickyEvent>,
}

/// Point masses `(position, mass, velocity)` present at the start.
pub type Atom = (f64, f64, f64);

struct Problem<'a> {
    data: &'a InitialData,
    atoms: &'a [Atom],
    /// Feet already inside the shock at the start.
    core: (f64, f64),
    max_roots: usize,
    cfg: GeneralConfig,
}

/// Carried mass and momentum with the absorbed foot interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorbed {
    pub m: f64,
    pub p: f64,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl Problem<'_> {
    fn absorbed(&self, t: f64, x: f64) -> Result<Absorbed> {
        let roots = characteristic_roots(&self.data.u0, t, x, self.cfg.l)?;
        let cont: Vec<f64> = roots.iter().filter(|r| r.kind != RootKind::Jump).map(|r| r.s).collect();
        if cont.len() > self.max_roots {
            return Err(Error::Geometry(format!("{} characteristic intersections", cont.len())));
        }
        let s_lo = cont.iter().copied().fold(self.core.0, f64::min);
        let s_hi = cont.iter().copied().fold(self.core.1, f64::max);
        self.between(t, s_lo, s_hi)
    }

    fn between(&self, t: f64, s_lo: f64, s_hi: f64) -> Result<Absorbed> {
        let u0 = &self.data.u0;
        let f0 = &self.data.f0;
        let weight = self.cfg.weight;
        let mut nodes = vec![s_lo];
        nodes.extend(u0.breakpoints().iter().chain(f0.breakpoints()).copied().filter(|b| *b > s_lo && *b < s_hi));
        nodes.push(s_hi);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let iv: Vec<(f64, f64)> = nodes.windows(2).map(|w| (w[0], w[1])).collect();
        let est = integrate_pieces(
            |s| {
                let f = f0.eval(s);
                let w = match weight {
                    BranchWeight::Jacobian => 1.0,
                    BranchWeight::Literal => (1.0 + t * u0.derivative(1, s)).abs(),
                };
                [f * w, f * w * u0.eval(s)]
            },
            &iv,
            Tolerance::new(self.cfg.quad_tol, self.cfg.quad_tol),
        )?;
        let (mut m, mut p) = (est.value[0], est.value[1]);
        for &(xa, ma, va) in self.atoms {
            if xa >= s_lo && xa <= s_hi {
                m += ma;
                p += ma * va;
            }
        }
        Ok(Absorbed { m, p, s_lo, s_hi })
    }

    fn velocity(&self, t: f64, x: f64) -> Result<(f64, Absorbed)> {
        let a = self.absorbed(t, x)?;
        if a.m <= 1e-14 {
            return Err(Error::Geometry("no mass in the shock".into()));
        }
        Ok((a.p / a.m, a))
    }

    /// Start velocity when the carried mass is zero: the Lax root of `c·m − P` at a tiny time.
    fn start_velocity(&self, t0: f64, x0: f64) -> Result<f64> {
        let u0 = &self.data.u0;
        let (ul, ur) = (u0.left_limit(self.core.0), u0.right_limit(self.core.1));
        let (lo, hi) = (ul.min(ur), ul.max(ur));
        if hi - lo < 1e-14 {
            return Ok(lo);
        }
        let tau = 1e-7 * (1.0 + t0.abs());
        let h = |c: f64| -> Result<f64> {
            let a = self.absorbed(t0 + tau, x0 + c * tau)?;
            Ok(c * a.m - a.p)
        };
        let (mut a, mut b) = (lo, hi);
        let ha = h(a)?;
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if h(m)? * ha > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }

    fn state(&self, t: f64, x: f64, v: f64, a: &Absorbed) -> JumpState<f64> {
        let u0 = &self.data.u0;
        JumpState { t, x_j: x, m: a.m, v, u_left: u0.left_limit(a.s_lo), u_right: u0.right_limit(a.s_hi) }
    }

    fn run(&self, t0: f64, x0: f64, t_end: f64, dt: f64) -> Result<StickySeries> {
        if !(dt > 0.0) || !(t_end >= t0) {
            return domain("need dt > 0 and t_end >= t0");
        }
        let a0 = self.between(t0, self.core.0, self.core.1)?;
        let v0 = if a0.m > 1e-14 { a0.p / a0.m } else { self.start_velocity(t0, x0)? };
        let mut states = vec![self.state(t0, x0, v0, &a0)];
        let (mut t, mut x, mut k1) = (t0, x0, v0);
        while t < t_end - 1e-12 * (1.0 + t_end.abs()) {
            let target = (t + dt).min(t_end);
            let mut h = target - t;
            let mut halvings = 0;
            loop {
                let step = || -> Result<(f64, f64, Absorbed)> {
                    let (k2, _) = self.velocity(t + h / 2.0, x + h / 2.0 * k1)?;
                    let (k3, _) = self.velocity(t + h / 2.0, x + h / 2.0 * k2)?;
                    let (k4, _) = self.velocity(t + h, x + h * k3)?;
                    let xn = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                    let (vn, an) = self.velocity(t + h, xn)?;
                    Ok((xn, vn, an))
                };
                match step() {
                    Ok((xn, vn, an)) => {
                        t += h;
                        x = xn;
                        k1 = vn;
                        if an.m <= 1e-12 {
                            states.push(self.state(t, x, vn, &an));
                            return Ok(StickySeries { states, event: Some(StickyEvent::MassVanished { t, x_j: x }) });
                        }
                        if (t - target).abs() <= 1e-12 * (1.0 + t.abs()) {
                            t = target;
                            states.push(self.state(t, x, vn, &an));
                        }
                        break;
                    }
                    Err(Error::Geometry(msg)) => {
                        halvings += 1;
                        if halvings > self.cfg.max_halvings {
                            return Err(Error::Geometry(msg));
                        }
                        h /= 2.0;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(StickySeries { states, event: None })
    }
}

/// Shock evolution for piecewise-smooth data with a single initial jump at `x0`.
///
/// `atoms` are initial point masses; at most two characteristic feet may
/// reach the shock at any time.
pub fn jump_trajectory_general(
    data: &InitialData,
    atoms: &[Atom],
    x0: f64,
    t_end: f64,
    dt: f64,
    cfg: GeneralConfig,
) -> Result<StickySeries> {
    let p = Problem { data, atoms, core: (x0, x0), max_roots: 2, cfg };
    p.run(0.0, x0, t_end, dt)
}

/// Carried mass and momentum of a shock at `(t, x_j)` that started at `x0`.
pub fn absorbed(data: &InitialData, atoms: &[Atom], x0: f64, t: f64, x_j: f64, cfg: GeneralConfig) -> Result<Absorbed> {
    Problem { data, atoms, core: (x0, x0), max_roots: 3, cfg }.absorbed(t, x_j)
}

/// Shock born at the gradient catastrophe of smooth data, from `(t*, x*)` to `t_end`.
pub fn post_blowup_evolution(data: &InitialData, t_end: f64, dt: f64, cfg: GeneralConfig) -> Result<StickySeries> {
    let c = critical_time(&data.u0);
    if !c.t_star.is_finite() {
        return Err(Error::Geometry("velocity never blows up".into()));
    }
    let core = c.segment.unwrap_or((c.s_star, c.s_star));
    let p = Problem { data, atoms: &[], core, max_roots: 3, cfg };
    p.run(c.t_star, c.x_star, t_end.max(c.t_star), dt)
}

/// One merged group of particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub x: f64,
    pub m: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub clusters: Vec<Cluster>,
}

impl Snapshot {
    pub fn heaviest(&self) -> Cluster {
        *self.clusters.iter().max_by(|a, b| a.m.total_cmp(&b.m)).expect("nonempty")
    }

    pub fn total_mass(&self) -> f64 {
        self.clusters.iter().map(|c| c.m).sum()
    }

    pub fn total_momentum(&self) -> f64 {
        self.clusters.iter().map(|c| c.m * c.v).sum()
    }
}

#[derive(Debug, Clone, Copy)]
struct Body {
    m: f64,
    p: f64,
    x_ref: f64,
    t_ref: f64,
    prev: Option<usize>,
    next: Option<usize>,
    version: u64,
}

impl Body {
    fn v(&self) -> f64 {
        self.p / self.m
    }
    fn x(&self, t: f64) -> f64 {
        self.x_ref + self.v() * (t - self.t_ref)
    }
}

#[derive(Debug, PartialEq)]
struct Event {
    t: f64,
    left: usize,
    right: usize,
    vl: u64,
    vr: u64,
}

impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other.t.total_cmp(&self.t).then_with(|| other.left.cmp(&self.left))
    }
}

/// Exact event-driven sticky dynamics of point masses on a line.
pub struct ParticleSystem {
    bodies: Vec<Body>,
    heap: BinaryHeap<Event>,
    t: f64,
}

impl ParticleSystem {
    /// Particles `(x, m, v)`; positions need not be sorted.
    pub fn new(mut particles: Vec<(f64, f64, f64)>) -> Result<Self> {
        if particles.iter().any(|p| !(p.1 > 0.0) || !p.0.is_finite() || !p.2.is_finite()) {
            return domain("particles need positive mass and finite state");
        }
        particles.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = particles.len();
        let bodies = particles
            .iter()
            .enumerate()
            .map(|(i, &(x, m, v))| Body {
                m,
                p: m * v,
                x_ref: x,
                t_ref: 0.0,
                prev: i.checked_sub(1),
                next: (i + 1 < n).then_some(i + 1),
                version: 0,
            })
            .collect();
        let mut s = ParticleSystem { bodies, heap: BinaryHeap::new(), t: 0.0 };
        for i in 0..n.saturating_sub(1) {
            s.schedule(i, i + 1);
        }
        Ok(s)
    }

    /// Equal-spaced midpoint samples of `f₀` on `[a, b]` plus the given atoms.
    pub fn from_data(data: &InitialData, atoms: &[Atom], n: usize, a: f64, b: f64) -> Result<Self> {
        if n < 2 || !(b > a) {
            return domain("need n >= 2 and a < b");
        }
        let ds = (b - a) / n as f64;
        let mut ps = Vec::with_capacity(n + atoms.len());
        for i in 0..n {
            let s = a + (i as f64 + 0.5) * ds;
            let f = data.f0.eval(s);
            if f < 0.0 {
                return domain("negative initial density");
            }
            if f > 0.0 {
                ps.push((s, f * ds, data.u0.eval(s)));
            }
        }
        ps.extend(atoms.iter().copied().filter(|a| a.1 > 0.0));
        Self::new(ps)
    }

    fn schedule(&mut self, i: usize, j: usize) {
        let (bi, bj) = (self.bodies[i], self.bodies[j]);
        let (vi, vj) = (bi.v(), bj.v());
        if vi > vj {
            let gap = (bj.x(self.t) - bi.x(self.t)).max(0.0);
            self.heap.push(Event { t: self.t + gap / (vi - vj), left: i, right: j, vl: bi.version, vr: bj.version });
        }
    }

    /// Advances to time `t`, merging every pair that meets on the way.
    pub fn advance(&mut self, t: f64) {
        while let Some(ev) = self.heap.peek() {
            if ev.t > t {
                break;
            }
            let ev = self.heap.pop().expect("peeked");
            let (l, r) = (ev.left, ev.right);
            if self.bodies[l].version != ev.vl || self.bodies[r].version != ev.vr || self.bodies[l].next != Some(r) {
                continue;
            }
            self.t = ev.t.max(self.t);
            let x = self.bodies[l].x(self.t);
            let right = self.bodies[r];
            let b = &mut self.bodies[l];
            b.m += right.m;
            b.p += right.p;
            b.x_ref = x;
            b.t_ref = self.t;
            b.version += 1;
            b.next = right.next;
            self.bodies[r].version += 1;
            self.bodies[r].m = 0.0;
            if let Some(n) = right.next {
                self.bodies[n].prev = Some(l);
                self.schedule(l, n);
            }
            if let Some(p) = self.bodies[l].prev {
                self.schedule(p, l);
            }
        }
        self.t = t.max(self.t);
    }

    pub fn snapshot(&self) -> Snapshot {
        let mut clusters = Vec::new();
        let mut cur = self.bodies.iter().position(|b| b.m > 0.0 && b.prev.is_none());
        while let Some(i) = cur {
            let b = &self.bodies[i];
            clusters.push(Cluster { x: b.x(self.t), m: b.m, v: b.v() });
            cur = b.next;
        }
        Snapshot { t: self.t, clusters }
    }
}

/// Runs the particle oracle and records a snapshot at each requested time.
pub fn sticky_particle_oracle(
    data: &InitialData,
    atoms: &[Atom],
    n: usize,
    window: (f64, f64),
    times: &[f64],
) -> Result<Vec<Snapshot>> {
    if n < 1000 {
        return domain("the oracle needs at least 1000 particles");
    }
    let mut sys = ParticleSystem::from_data(data, atoms, n, window.0, window.1)?;
    let mut sorted: Vec<f64> = times.to_vec();
    if sorted.iter().any(|t| !(*t >= 0.0)) {
        return domain("snapshot times must be non-negative");
    }
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(sorted.len());
    for t in sorted {
        sys.advance(t);
        out.push(sys.snapshot());
    }
    Ok(out)
}

/// Oracle setup for constant-state data: `f₃` sits at `x₀` at rest.
pub fn riemann_oracle(data: &RiemannData<f64>, n: usize, half_width: f64, times: &[f64]) -> Result<Vec<Snapshot>> {
    let atoms = if data.f3 > 0.0 { vec![(data.x0, data.f3, 0.0)] } else { vec![] };
    sticky_particle_oracle(&data.regular_data(), &atoms, n, (data.x0 - half_width, data.x0 + half_width), times)
}
