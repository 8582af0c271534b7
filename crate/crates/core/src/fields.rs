//! Piecewise-smooth functions, measures with atoms, grids and Riemann data.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_split, Tolerance};
use crate::scalar::Scalar;

pub type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One smooth branch with optional analytic derivatives `[f', f'', ...]`.
#[derive(Clone)]
pub struct Piece {
    value: Func,
    derivs: Vec<Func>,
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Piece {{ analytic derivatives: {} }}", self.derivs.len())
    }
}

impl Piece {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Piece { value: Arc::new(f), derivs: Vec::new() }
    }

    /// Appends the next analytic derivative.
    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivs.push(Arc::new(d));
        self
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Piece::new(move |_| c);
        for _ in 0..6 {
            p = p.with_derivative(|_| 0.0);
        }
        p
    }

    /// `intercept + slope·x`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        let mut p = Piece::new(move |x| intercept + slope * x).with_derivative(move |_| slope);
        for _ in 0..5 {
            p = p.with_derivative(|_| 0.0);
        }
        p
    }

    pub fn analytic_orders(&self) -> usize {
        self.derivs.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    /// k-th derivative; orders without an analytic callable fall back to differences.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        if k == 0 {
            return self.eval(x);
        }
        if k <= self.derivs.len() {
            return (self.derivs[k - 1])(x);
        }
        let base: &Func = if self.derivs.is_empty() { &self.value } else { &self.derivs[self.derivs.len() - 1] };
        finite_difference(base.as_ref(), k - self.derivs.len(), x)
    }

    fn func(&self, k: usize) -> Option<Func> {
        if k == 0 {
            Some(self.value.clone())
        } else {
            self.derivs.get(k - 1).cloned()
        }
    }
}

/// Central differences: the plain step for orders 1–2, Richardson-extrapolated above.
pub fn finite_difference(f: &(dyn Fn(f64) -> f64 + Send + Sync), order: usize, x: f64) -> f64 {
    fn central(f: &(dyn Fn(f64) -> f64 + Send + Sync), n: usize, x: f64, h: f64) -> f64 {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * f(x + (n as f64 / 2.0 - j as f64) * h);
            binom = binom * (n - j) as f64 / (j + 1) as f64;
        }
        acc / h.powi(n as i32)
    }
    if order == 0 {
        return f(x);
    }
    if order <= 2 {
        let h = (1e-8 * x.abs()).max(1e-6);
        let h = if order == 2 { h * 100.0 } else { h };
        return central(f, order, x, h);
    }
    let h = 0.05 * (1.0 + x.abs()).min(10.0);
    let d1 = central(f, order, x, h);
    let d2 = central(f, order, x, h / 2.0);
    let d3 = central(f, order, x, h / 4.0);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Real function given by smooth pieces between strictly increasing breakpoints.
///
/// At a breakpoint the value is the mean of the two one-sided limits.
#[derive(Clone, Debug)]
pub struct PiecewiseFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
    bound: Option<f64>,
}

impl PiecewiseFunction {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return domain("number of pieces must be number of breakpoints + 1");
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return domain("breakpoints must be finite");
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return domain("breakpoints must be strictly increasing");
        }
        Ok(PiecewiseFunction { breakpoints, pieces, bound: None })
    }

    pub fn smooth(piece: Piece) -> Self {
        PiecewiseFunction { breakpoints: Vec::new(), pieces: vec![piece], bound: None }
    }

    pub fn constant(c: f64) -> Self {
        let mut f = Self::smooth(Piece::constant(c));
        f.bound = Some(c.abs());
        f
    }

    /// `left` for x < at, `right` for x > at.
    pub fn step(at: f64, left: f64, right: f64) -> Self {
        let mut f = PiecewiseFunction {
            breakpoints: vec![at],
            pieces: vec![Piece::constant(left), Piece::constant(right)],
            bound: None,
        };
        f.bound = Some(left.abs().max(right.abs()));
        f
    }

    /// Linear interpolation of samples, constant outside the sampled range.
    pub fn tabulated(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return domain("tabulated data needs at least two matching samples");
        }
        let mut pieces = vec![Piece::constant(ys[0])];
        for i in 0..xs.len() - 1 {
            let slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            pieces.push(Piece::linear(slope, ys[i] - slope * xs[i]));
        }
        pieces.push(Piece::constant(ys[ys.len() - 1]));
        let mut f = Self::new(xs.to_vec(), pieces)?;
        f.bound = Some(ys.iter().fold(0.0f64, |m, y| m.max(y.abs())));
        Ok(f)
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Index of the piece whose open interval contains `x`, or `Err(i)` when `x` is breakpoint `i`.
    pub fn locate(&self, x: f64) -> std::result::Result<usize, usize> {
        let i = self.breakpoints.partition_point(|b| *b < x);
        if i < self.breakpoints.len() && self.breakpoints[i] == x {
            Err(i)
        } else {
            Ok(i)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        match self.locate(x) {
            Ok(i) => self.pieces[i].derivative(k, x),
            Err(i) => 0.5 * (self.pieces[i].derivative(k, x) + self.pieces[i + 1].derivative(k, x)),
        }
    }

    pub fn left_limit(&self, x: f64) -> f64 {
        self.left_derivative(0, x)
    }

    pub fn right_limit(&self, x: f64) -> f64 {
        self.right_derivative(0, x)
    }

    pub fn left_derivative(&self, k: usize, x: f64) -> f64 {
        match self.locate(x) {
            Ok(i) | Err(i) => self.pieces[i].derivative(k, x),
        }
    }

    pub fn right_derivative(&self, k: usize, x: f64) -> f64 {
        match self.locate(x) {
            Ok(i) => self.pieces[i].derivative(k, x),
            Err(i) => self.pieces[i + 1].derivative(k, x),
        }
    }

    /// Breakpoints where the one-sided limits differ, with `(x, left, right)`.
    pub fn jumps(&self) -> Vec<(f64, f64, f64)> {
        self.breakpoints
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| {
                let l = self.pieces[i].eval(b);
                let r = self.pieces[i + 1].eval(b);
                (l != r).then_some((b, l, r))
            })
            .collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.jumps().is_empty()
    }

    /// Pointwise sum; derivatives are available up to the common analytic order.
    pub fn add(&self, other: &PiecewiseFunction) -> PiecewiseFunction {
        let mut bps: Vec<f64> = self.breakpoints.iter().chain(other.breakpoints.iter()).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let mut pieces = Vec::with_capacity(bps.len() + 1);
        for r in 0..=bps.len() {
            let probe = region_probe(&bps, r);
            let pa = self.pieces[self.locate(probe).unwrap_or_else(|i| i)].clone();
            let pb = other.pieces[other.locate(probe).unwrap_or_else(|i| i)].clone();
            let order = pa.analytic_orders().min(pb.analytic_orders());
            let (fa, fb) = (pa.value.clone(), pb.value.clone());
            let mut p = Piece::new(move |x| fa(x) + fb(x));
            for k in 1..=order {
                let (da, db) = (pa.func(k).unwrap(), pb.func(k).unwrap());
                p = p.with_derivative(move |x| da(x) + db(x));
            }
            pieces.push(p);
        }
        let bound = match (self.bound, other.bound) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        PiecewiseFunction { breakpoints: bps, pieces, bound }
    }

    /// Composition `g ∘ self`; `g_prime` enables the analytic first derivative.
    pub fn compose(
        &self,
        g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        g_prime: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> PiecewiseFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let inner = p.value.clone();
                let gg = g.clone();
                let mut q = Piece::new(move |x| gg(inner(x)));
                if let (Some(gp), Some(d1)) = (g_prime.clone(), p.func(1)) {
                    let inner = p.value.clone();
                    q = q.with_derivative(move |x| gp(inner(x)) * d1(x));
                }
                q
            })
            .collect();
        PiecewiseFunction { breakpoints: self.breakpoints.clone(), pieces, bound: None }
    }

    /// Largest |value| sampled over `[a, b]` (or the declared bound when set).
    pub fn sup_norm(&self, a: f64, b: f64) -> f64 {
        if let Some(bd) = self.bound {
            return bd;
        }
        let n = 2000;
        let mut m = 0.0f64;
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            m = m.max(self.left_limit(x).abs()).max(self.right_limit(x).abs());
        }
        m
    }
}

fn region_probe(bps: &[f64], r: usize) -> f64 {
    match (r, bps.len()) {
        (_, 0) => 0.0,
        (0, _) => bps[0] - 1.0,
        (r, n) if r == n => bps[n - 1] + 1.0,
        (r, _) => 0.5 * (bps[r - 1] + bps[r]),
    }
}

/// Shape of the continuous bridge that replaces a jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bridge {
    Linear,
    /// Cubic smoothstep `3τ² − 2τ³`.
    SmoothStep,
}

/// Piecewise-linear bridge across every jump on `(x_j − ε, x_j + ε)`.
pub fn mollify(f: &PiecewiseFunction, epsilon: f64) -> Result<PiecewiseFunction> {
    mollify_with(f, epsilon, Bridge::Linear)
}

pub fn mollify_with(f: &PiecewiseFunction, epsilon: f64, bridge: Bridge) -> Result<PiecewiseFunction> {
    if !(epsilon > 0.0) {
        return domain("epsilon must be positive");
    }
    let jumps = f.jumps();
    if jumps.windows(2).any(|w| w[1].0 - w[0].0 < 2.0 * epsilon) {
        return Err(Error::EpsilonTooLarge);
    }
    if jumps.is_empty() {
        return Ok(f.clone());
    }
    let inside = |x: f64| jumps.iter().any(|j| (x - j.0).abs() < epsilon);
    let mut bps: Vec<f64> = f.breakpoints.iter().copied().filter(|b| !inside(*b)).collect();
    for j in &jumps {
        bps.push(j.0 - epsilon);
        bps.push(j.0 + epsilon);
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let mut pieces = Vec::with_capacity(bps.len() + 1);
    for r in 0..=bps.len() {
        let probe = region_probe(&bps, r);
        if let Some(j) = jumps.iter().find(|j| (probe - j.0).abs() < epsilon) {
            let (lo, hi) = (j.0 - epsilon, j.0 + epsilon);
            let a = f.left_limit(lo);
            let b = f.right_limit(hi);
            pieces.push(bridge_piece(lo, hi, a, b, bridge));
        } else {
            pieces.push(f.pieces[f.locate(probe).unwrap_or_else(|i| i)].clone());
        }
    }
    Ok(PiecewiseFunction { breakpoints: bps, pieces, bound: f.bound })
}

fn bridge_piece(lo: f64, hi: f64, a: f64, b: f64, bridge: Bridge) -> Piece {
    let w = hi - lo;
    let d = b - a;
    match bridge {
        Bridge::Linear => Piece::linear(d / w, a - d / w * lo),
        Bridge::SmoothStep => Piece::new(move |x| {
            let s = (x - lo) / w;
            a + d * s * s * (3.0 - 2.0 * s)
        })
        .with_derivative(move |x| {
            let s = (x - lo) / w;
            d * 6.0 * s * (1.0 - s) / w
        })
        .with_derivative(move |x| {
            let s = (x - lo) / w;
            d * (6.0 - 12.0 * s) / (w * w)
        })
        .with_derivative(move |_| -12.0 * d / (w * w * w)),
    }
}

/// Gaussian of variance `epsilon` carrying total mass `amplitude` at `center`.
pub fn approximate_atom(amplitude: f64, center: f64, epsilon: f64) -> Result<PiecewiseFunction> {
    if !(epsilon > 0.0) {
        return domain("epsilon must be positive");
    }
    let c = amplitude / (2.0 * std::f64::consts::PI * epsilon).sqrt();
    let g = move |x: f64| c * (-(x - center) * (x - center) / (2.0 * epsilon)).exp();
    let piece = Piece::new(g).with_derivative(move |x| -g(x) * (x - center) / epsilon).with_derivative(move |x| {
        let z = (x - center) * (x - center) / epsilon;
        g(x) * (z - 1.0) / epsilon
    });
    Ok(PiecewiseFunction::smooth(piece).with_bound(c.abs()))
}

/// Regular density plus finitely many Dirac atoms.
#[derive(Clone, Debug)]
pub struct LineMeasure {
    regular: PiecewiseFunction,
    atoms: Vec<(f64, f64)>,
}

impl LineMeasure {
    /// Rejects negative atoms and regular densities that go negative on a coarse scan.
    pub fn new(regular: PiecewiseFunction, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|a| a.1 < 0.0 || !a.0.is_finite() || !a.1.is_finite()) {
            return domain("atom amplitudes must be finite and non-negative");
        }
        let bps = regular.breakpoints();
        let (lo, hi) = match (bps.first(), bps.last()) {
            (Some(a), Some(b)) => (a - 10.0, b + 10.0),
            _ => (-10.0, 10.0),
        };
        for i in 0..=400 {
            let x = lo + (hi - lo) * i as f64 / 400.0;
            if regular.left_limit(x) < 0.0 || regular.right_limit(x) < 0.0 {
                return domain("regular density must be non-negative");
            }
        }
        Ok(Self::signed(regular, atoms))
    }

    /// No sign checks; for differences of two approximations.
    pub fn signed(regular: PiecewiseFunction, atoms: Vec<(f64, f64)>) -> Self {
        let mut m = LineMeasure { regular, atoms: Vec::new() };
        for (x, a) in atoms {
            m.push_atom(x, a);
        }
        m
    }

    fn push_atom(&mut self, x: f64, a: f64) {
        match self.atoms.binary_search_by(|p| p.0.total_cmp(&x)) {
            Ok(i) => self.atoms[i].1 += a,
            Err(i) => self.atoms.insert(i, (x, a)),
        }
    }

    pub fn add_atom(&mut self, x: f64, amplitude: f64) -> Result<()> {
        if amplitude < 0.0 {
            return domain("atom amplitude must be non-negative");
        }
        self.push_atom(x, amplitude);
        Ok(())
    }

    pub fn regular(&self) -> &PiecewiseFunction {
        &self.regular
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Mass on the closed interval `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        let reg = integrate_split(|x| self.regular.eval(x), a, b, self.regular.breakpoints(), Tolerance::default())?;
        let at: f64 = self.atoms.iter().filter(|p| p.0 >= a && p.0 <= b).map(|p| p.1).sum();
        Ok(reg + at)
    }
}

/// Sampling grid at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub t: f64,
    pub xs: Vec<f64>,
}

impl Grid {
    pub fn new(t: f64, xs: Vec<f64>) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return domain("grid time must be finite and non-negative");
        }
        if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
            return domain("grid points must be finite and strictly increasing");
        }
        Ok(Grid { t, xs })
    }

    pub fn uniform(t: f64, a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 1 {
            return Grid::new(t, vec![a]);
        }
        if n == 0 || !(b > a) {
            return domain("uniform grid needs n >= 1 and b > a");
        }
        Grid::new(t, (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
    }
}

/// Density and velocity at time zero.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub f0: PiecewiseFunction,
    pub u0: PiecewiseFunction,
}

impl InitialData {
    pub fn new(f0: PiecewiseFunction, u0: PiecewiseFunction) -> Self {
        InitialData { f0, u0 }
    }

    /// Union of both functions' breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.f0.breakpoints().iter().chain(self.u0.breakpoints()).copied().collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Constant-state Riemann data `f₀ = f₁ + f₂θ(x−x₀) + f₃δ(x−x₀)`, `u₀ = u₁ + u₂θ(x−x₀)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannData<T> {
    pub f1: T,
    pub f2: T,
    pub u1: T,
    pub u2: T,
    pub f3: T,
    pub x0: T,
}

impl<T: Scalar> RiemannData<T> {
    pub fn new(f1: T, f2: T, u1: T, u2: T, f3: T) -> Result<Self> {
        let d = RiemannData { f1, f2, u1, u2, f3, x0: T::zero() };
        d.validate()?;
        if f3 < T::zero() {
            return domain("atom amplitude f3 must be non-negative");
        }
        Ok(d)
    }

    /// Permits a negative atom for the vanishing-mass diagnostics.
    pub fn diagnostic(f1: T, f2: T, u1: T, u2: T, f3: T) -> Result<Self> {
        let d = RiemannData { f1, f2, u1, u2, f3, x0: T::zero() };
        d.validate()?;
        Ok(d)
    }

    pub fn at(mut self, x0: T) -> Self {
        self.x0 = x0;
        self
    }

    fn validate(&self) -> Result<()> {
        let all = [self.f1, self.f2, self.u1, self.u2, self.f3, self.x0];
        if all.iter().any(|v| !v.is_finite()) {
            return domain("Riemann data must be finite");
        }
        if !(self.f1 > T::zero()) || !(self.f1 + self.f2 > T::zero()) {
            return domain("densities f1 and f1 + f2 must be positive");
        }
        Ok(())
    }

    /// `[f] = f₂`.
    pub fn jump_f(&self) -> T {
        self.f2
    }

    /// `[uf] = (u₁+u₂)(f₁+f₂) − u₁f₁`.
    pub fn jump_uf(&self) -> T {
        (self.u1 + self.u2) * (self.f1 + self.f2) - self.u1 * self.f1
    }

    /// `[u²f] = (u₁+u₂)²(f₁+f₂) − u₁²f₁`.
    pub fn jump_u2f(&self) -> T {
        let ur = self.u1 + self.u2;
        ur * ur * (self.f1 + self.f2) - self.u1 * self.u1 * self.f1
    }

    pub fn cast<S: Scalar>(&self) -> RiemannData<S> {
        let c = |v: T| S::lit(v.to_f64_lossy());
        RiemannData { f1: c(self.f1), f2: c(self.f2), u1: c(self.u1), u2: c(self.u2), f3: c(self.f3), x0: c(self.x0) }
    }
}

impl RiemannData<f64> {
    /// Discontinuous regular data; the atom is not included.
    pub fn regular_data(&self) -> InitialData {
        InitialData::new(
            PiecewiseFunction::step(self.x0, self.f1, self.f1 + self.f2),
            PiecewiseFunction::step(self.x0, self.u1, self.u1 + self.u2),
        )
    }

    /// Bridged data at scale `eps`, with the atom replaced by a Gaussian of variance `eps`.
    pub fn mollified(&self, eps: f64, bridge: Bridge) -> Result<InitialData> {
        let reg = self.regular_data();
        let mut f0 = mollify_with(&reg.f0, eps, bridge)?;
        if self.f3 != 0.0 {
            f0 = f0.add(&approximate_atom(self.f3, self.x0, eps)?);
        }
        Ok(InitialData::new(f0, mollify_with(&reg.u0, eps, bridge)?))
    }

    pub fn initial_measure(&self) -> Result<LineMeasure> {
        let atoms = if self.f3 > 0.0 { vec![(self.x0, self.f3)] } else { vec![] };
        LineMeasure::new(self.regular_data().f0, atoms)
    }
}
