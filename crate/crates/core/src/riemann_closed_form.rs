//! Closed forms for constant-state Riemann data, at finite `(ε, σ)` and in the limit.
//!
//! The mollified data is linear on `[−ε, ε]` and constant outside, so every
//! kernel integral reduces to a polynomial moment of a truncated Gaussian.

use crate::error::{Error, Result};
use crate::fields::{Piece, PiecewiseFunction, RiemannData};
use crate::scalar::{gauss, normal_cdf, normal_cdf_diff, Scalar};

/// `∫_{za}^{zb} (q₀ + q₁z + q₂z²) e^{−z²/2} dz`.
fn z_moments<T: Scalar>(za: T, zb: T, q: [T; 3]) -> T {
    let root2pi = (T::lit(2.0) * T::PI()).sqrt();
    let m0 = root2pi * normal_cdf_diff(za, zb);
    let m1 = gauss(za) - gauss(zb);
    let ze = |z: T| if z.is_infinite() { T::zero() } else { z * gauss(z) };
    let m2 = ze(za) - ze(zb) + m0;
    q[0] * m0 + q[1] * m1 + q[2] * m2
}

/// `∫_a^b p(s) exp(−(s−μ)²/(2τ²)) ds` for a quadratic `p`.
fn gaussian_poly<T: Scalar>(a: T, b: T, mu: T, tau: T, p: [T; 3]) -> T {
    let q0 = p[0] + p[1] * mu + p[2] * mu * mu;
    let q1 = (p[1] + T::lit(2.0) * p[2] * mu) * tau;
    let q2 = p[2] * tau * tau;
    let za = if a.is_infinite() { a } else { (a - mu) / tau };
    let zb = if b.is_infinite() { b } else { (b - mu) / tau };
    tau * z_moments(za, zb, [q0, q1, q2])
}

/// Finite-`(ε, σ)` quantities of the mollified constant-state problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifiedRiemannTerms<T> {
    pub c_minus: T,
    pub c_plus: T,
    pub f_eps: T,
    pub l_eps: T,
    pub n_eps: T,
    /// Evaluated with the undefined companion term set to zero.
    pub k_eps: T,
    pub a_se: T,
    pub b_se: T,
    pub k_plus_se: T,
    pub k_minus_se: T,
    pub d1_se: T,
    pub d2_se: T,
    /// Bridge contribution to the regular density.
    pub i1: T,
    /// Bridge contribution to the regular momentum excess `∫(u − u₁)f`.
    pub i2: T,
    /// Bridge contribution of the atom to the density.
    pub j2: T,
    /// Bridge contribution of the atom to the momentum excess.
    pub j3: T,
    pub rho_reg: T,
    pub rho_sing: T,
    /// `∫ (u − u₁) f e^{…}` over everything, normalized like ρ.
    pub momentum_excess: T,
}

impl<T: Scalar> MollifiedRiemannTerms<T> {
    pub fn rho(&self) -> T {
        self.rho_reg + self.rho_sing
    }

    /// Bridge density in the `L^ε, F^ε` form.
    pub fn i1_erf_form(&self, sigma: T, t: T) -> T {
        let st = sigma * t.sqrt();
        let two = T::lit(2.0);
        let e = |c: T| (-(c * c) / (two * st * st)).exp();
        self.l_eps * sigma * (e(self.c_plus) - e(self.c_minus))
            + self.f_eps * (normal_cdf(self.c_plus / st) - normal_cdf(self.c_minus / st))
    }

    /// Atom bridge density in the `A, B, K±` form.
    pub fn j2_erf_form(&self, data: &RiemannData<T>, sigma: T, t: T, x: T) -> T {
        let two = T::lit(2.0);
        let st = sigma * t.sqrt();
        let c = (data.u1 + data.u2 / two) * t - (x - data.x0);
        data.f3 / ((two * T::PI()).sqrt() * self.a_se.sqrt())
            * (-(c * c) / (two * self.a_se)).exp()
            * (normal_cdf(self.k_plus_se / st) - normal_cdf(self.k_minus_se / st))
    }
}

struct PieceSpec<T> {
    a: T,
    b: T,
    k: T,
    c: T,
    density: [T; 3],
    excess: [T; 3],
}

fn check<T: Scalar>(eps: T, sigma: T, t: T) -> Result<()> {
    if !(t > T::zero()) || !(eps > T::zero()) || !(sigma > T::zero()) {
        return Err(Error::Domain("t, eps and sigma must be positive".into()));
    }
    Ok(())
}

/// All finite-`(ε, σ)` terms at one point.
pub fn mollified_terms<T: Scalar>(
    data: &RiemannData<T>,
    eps: T,
    sigma: T,
    t: T,
    x: T,
) -> Result<MollifiedRiemannTerms<T>> {
    check(eps, sigma, t)?;
    let two = T::lit(2.0);
    let (f1, f2, u1, u2, f3) = (data.f1, data.f2, data.u1, data.u2, data.f3);
    let x = x - data.x0;
    let denom = u2 * t + two * eps;
    if denom == T::zero() {
        return Err(Error::DegenerateOverlap);
    }
    let kb = denom / (two * eps);
    let v = sigma * sigma * t;
    let zero = T::zero();
    let half_u2 = u2 / two;
    let pieces = [
        PieceSpec {
            a: T::neg_infinity(),
            b: -eps,
            k: T::one(),
            c: u1 * t - x,
            density: [f1, zero, zero],
            excess: [zero; 3],
        },
        PieceSpec {
            a: -eps,
            b: eps,
            k: kb,
            c: (u1 + half_u2) * t - x,
            density: [f1 + f2 / two, f2 / (two * eps), zero],
            excess: [
                half_u2 * (f1 + f2 / two),
                half_u2 * f2 / (two * eps) + u2 / (two * eps) * (f1 + f2 / two),
                u2 / (two * eps) * f2 / (two * eps),
            ],
        },
        PieceSpec {
            a: eps,
            b: T::infinity(),
            k: T::one(),
            c: (u1 + u2) * t - x,
            density: [f1 + f2, zero, zero],
            excess: [u2 * (f1 + f2), zero, zero],
        },
    ];
    let norm = (two * T::PI() * v).sqrt();
    let mut reg = [zero; 3];
    let mut reg_ex = [zero; 3];
    let mut sing = [zero; 3];
    let mut sing_ex = [zero; 3];
    for (i, p) in pieces.iter().enumerate() {
        let mu = -p.c / p.k;
        let tau = v.sqrt() / p.k.abs();
        reg[i] = gaussian_poly(p.a, p.b, mu, tau, p.density) / norm;
        reg_ex[i] = gaussian_poly(p.a, p.b, mu, tau, p.excess) / norm;
        if f3 != zero {
            let a_var = v + eps * p.k * p.k;
            let mu_a = -p.k * p.c * eps / a_var;
            let tau_a = (eps * v / a_var).sqrt();
            let pref = f3 / (two * T::PI() * eps).sqrt() * (-(p.c * p.c) / (two * a_var)).exp() / norm;
            let unit = [T::one(), zero, zero];
            sing[i] = pref * gaussian_poly(p.a, p.b, mu_a, tau_a, unit);
            let w = if i == 1 {
                [half_u2, u2 / (two * eps), zero]
            } else if i == 2 {
                [u2, zero, zero]
            } else {
                [zero; 3]
            };
            sing_ex[i] = pref * gaussian_poly(p.a, p.b, mu_a, tau_a, w);
        }
    }

    let c_minus = u1 * t - x - eps;
    let c_plus = (u1 + u2) * t - x + eps;
    let mid = x - (u1 + half_u2) * t;
    let f_eps = two * eps / denom * (f1 + f2 / two + f2 / denom * mid);
    let l_eps = -(two * t).sqrt() * f2 * eps / (T::PI().sqrt() * denom * denom);
    let n_eps = (u2 / denom * mid + half_u2) * f_eps;
    let k_eps = u2 * t.sqrt() / ((two * T::PI()).sqrt() * denom) * f_eps;
    let a_se = v + eps * kb * kb;
    let b_se = eps * kb * (-mid) / a_se.sqrt();
    let k_plus_se = (a_se.sqrt() * eps + b_se) / eps.sqrt();
    let k_minus_se = (-a_se.sqrt() * eps + b_se) / eps.sqrt();
    let ve = (v + eps).sqrt();
    let d1_se = (u1 * t - x) * eps.sqrt() / ve - (eps * (v + eps)).sqrt();
    let d2_se = ((u1 + u2) * t - x) * eps.sqrt() / ve + (eps * (v + eps)).sqrt();

    Ok(MollifiedRiemannTerms {
        c_minus,
        c_plus,
        f_eps,
        l_eps,
        n_eps,
        k_eps,
        a_se,
        b_se,
        k_plus_se,
        k_minus_se,
        d1_se,
        d2_se,
        i1: reg[1],
        i2: reg_ex[1],
        j2: sing[1],
        j3: sing_ex[1],
        rho_reg: reg[0] + reg[1] + reg[2],
        rho_sing: sing[0] + sing[1] + sing[2],
        momentum_excess: reg_ex[0] + reg_ex[1] + reg_ex[2] + sing_ex[0] + sing_ex[1] + sing_ex[2],
    })
}

/// Total density `ρ_reg + ρ_sing` of the mollified problem.
pub fn rho_eps_sigma_closed<T: Scalar>(data: &RiemannData<T>, eps: T, sigma: T, t: T, x: T) -> Result<T> {
    Ok(mollified_terms(data, eps, sigma, t, x)?.rho())
}

pub fn u_eps_sigma_closed<T: Scalar>(data: &RiemannData<T>, eps: T, sigma: T, t: T, x: T) -> Result<T> {
    let m = mollified_terms(data, eps, sigma, t, x)?;
    let rho = m.rho();
    if !(rho > T::min_positive_value()) {
        return Err(Error::Vacuum { t: t.to_f64_lossy(), x: x.to_f64_lossy() });
    }
    Ok(data.u1 + m.momentum_excess / rho)
}

/// `(ρ_sing, û)` for data with an atom.
pub fn singular_closed_forms<T: Scalar>(data: &RiemannData<T>, eps: T, sigma: T, t: T, x: T) -> Result<(T, T)> {
    let m = mollified_terms(data, eps, sigma, t, x)?;
    let u = u_eps_sigma_closed(data, eps, sigma, t, x)?;
    Ok((m.rho_sing, u))
}

/// Velocity obtained when the ε-limit is taken first: a single jump at `(u₁ + u₂/2)t`.
pub fn order_swapped_velocity<T: Scalar>(data: &RiemannData<T>, t: T, x: T) -> T {
    let s = (data.u1 + data.u2 / T::lit(2.0)) * t;
    let xr = x - data.x0;
    if xr < s {
        data.u1
    } else if xr > s {
        data.u1 + data.u2
    } else {
        data.u1 + data.u2 / T::lit(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Rarefaction,
    Compression,
    /// `u₂ = 0`: a contact discontinuity advected at `u₁`.
    NoWave,
}

/// Exact free-particle limit of a constant-state Riemann problem at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannFpResult<T> {
    pub data: RiemannData<T>,
    pub t: T,
    pub regime: Regime,
    /// Ascending absolute positions of the two breakpoints.
    pub breakpoints: [T; 2],
    /// Left, middle and right density values.
    pub density_values: [T; 3],
    pub density_midpoints: [T; 2],
    /// `(position, amplitude)` of the moving atoms.
    pub atoms: Vec<(T, T)>,
}

pub fn riemann_fp<T: Scalar>(data: &RiemannData<T>, t: T) -> Result<RiemannFpResult<T>> {
    if !(t > T::zero()) {
        return Err(Error::Domain("time must be positive".into()));
    }
    let two = T::lit(2.0);
    let (f1, f2, u1, u2, f3) = (data.f1, data.f2, data.u1, data.u2, data.f3);
    let p1 = data.x0 + u1 * t;
    let p2 = data.x0 + (u1 + u2) * t;
    let (regime, breakpoints, density_values, density_midpoints) = if u2 > T::zero() {
        (Regime::Rarefaction, [p1, p2], [f1, T::zero(), f1 + f2], [f1 / two, (f1 + f2) / two])
    } else if u2 < T::zero() {
        (
            Regime::Compression,
            [p2, p1],
            [f1, two * f1 + f2, f1 + f2],
            [(T::lit(3.0) * f1 + f2) / two, (T::lit(3.0) * f1 + two * f2) / two],
        )
    } else {
        let m = f1 + f2 / two;
        (Regime::NoWave, [p1, p1], [f1, m, f1 + f2], [m, m])
    };
    let atoms = if f3 == T::zero() {
        Vec::new()
    } else if regime == Regime::NoWave {
        vec![(p1, f3)]
    } else {
        let mut a = vec![(p1, f3 / two), (p2, f3 / two)];
        if p2 < p1 {
            a.swap(0, 1);
        }
        a
    };
    Ok(RiemannFpResult { data: *data, t, regime, breakpoints, density_values, density_midpoints, atoms })
}

enum Zone {
    Left,
    AtLow,
    Middle,
    AtHigh,
    Right,
}

impl<T: Scalar> RiemannFpResult<T> {
    fn zone(&self, x: T) -> Zone {
        let band = T::lit(1e-12) * x.abs().max(T::one());
        let [lo, hi] = self.breakpoints;
        if (x - lo).abs() < band {
            Zone::AtLow
        } else if (x - hi).abs() < band {
            Zone::AtHigh
        } else if x < lo {
            Zone::Left
        } else if x > hi {
            Zone::Right
        } else {
            Zone::Middle
        }
    }

    /// Regular density with midpoint values at the breakpoints.
    pub fn density(&self, x: T) -> T {
        match self.zone(x) {
            Zone::Left => self.density_values[0],
            Zone::AtLow => self.density_midpoints[0],
            Zone::Middle => self.density_values[1],
            Zone::AtHigh => self.density_midpoints[1],
            Zone::Right => self.density_values[2],
        }
    }

    pub fn velocity(&self, x: T) -> T {
        let d = &self.data;
        let ul = d.u1;
        let ur = d.u1 + d.u2;
        match (self.regime, self.zone(x)) {
            (_, Zone::Left) => ul,
            (_, Zone::Right) => ur,
            (Regime::Rarefaction, Zone::AtLow) => ul,
            (Regime::Rarefaction, Zone::AtHigh) => ur,
            (Regime::Rarefaction, Zone::Middle) => (x - d.x0) / self.t,
            (Regime::Compression, _) => self.middle_velocity(),
            (Regime::NoWave, _) => ul,
        }
    }

    /// `u₁ + (f₁+f₂)/(2f₁+f₂)·u₂`, the compression plateau value.
    pub fn middle_velocity(&self) -> T {
        let d = &self.data;
        d.u1 + (d.f1 + d.f2) / (T::lit(2.0) * d.f1 + d.f2) * d.u2
    }

    /// Spurious pressure carried by the overlap on compression, zero otherwise.
    pub fn pressure(&self, x: T) -> T {
        if self.regime != Regime::Compression {
            return T::zero();
        }
        let d = &self.data;
        let two = T::lit(2.0);
        let p = d.f1 * (d.f1 + d.f2) * d.u2 * d.u2 / (two * d.f1 + d.f2);
        match self.zone(x) {
            Zone::Left | Zone::Right => T::zero(),
            Zone::AtLow | Zone::AtHigh => p / two,
            Zone::Middle => p,
        }
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }
}

impl RiemannFpResult<f64> {
    pub fn density_function(&self) -> PiecewiseFunction {
        let [lo, hi] = self.breakpoints;
        let v = self.density_values;
        if lo == hi {
            return PiecewiseFunction::step(lo, v[0], v[2]);
        }
        PiecewiseFunction::new(vec![lo, hi], vec![Piece::constant(v[0]), Piece::constant(v[1]), Piece::constant(v[2])])
            .expect("ordered breakpoints")
    }

    pub fn velocity_function(&self) -> PiecewiseFunction {
        let [lo, hi] = self.breakpoints;
        let d = self.data;
        let ul = d.u1;
        let ur = d.u1 + d.u2;
        let middle = match self.regime {
            Regime::Rarefaction => Piece::linear(1.0 / self.t, -d.x0 / self.t),
            Regime::Compression => Piece::constant(self.middle_velocity()),
            Regime::NoWave => return PiecewiseFunction::constant(ul),
        };
        PiecewiseFunction::new(vec![lo, hi], vec![Piece::constant(ul), middle, Piece::constant(ur)])
            .expect("ordered breakpoints")
    }
}
