//! Jump conditions, the spurious pressure of compressive free-particle
//! solutions and the one-sided entropy inequality.

use crate::error::Result;
use crate::fields::{PiecewiseFunction, RiemannData};
use crate::riemann_closed_form::{riemann_fp, Regime, RiemannFpResult};
use crate::scalar::Scalar;
use crate::sticky::{jump_trajectory_constant, mass_discriminant, TrajectoryStatus};

/// One-sided state next to a jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Side<T> {
    pub f: T,
    pub u: T,
    pub p: T,
}

impl<T: Scalar> Side<T> {
    pub fn new(f: T, u: T, p: T) -> Self {
        Side { f, u, p }
    }
}

/// Rankine–Hugoniot bookkeeping for one jump. Brackets are right minus left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpAudit<T> {
    pub position: T,
    pub speed: T,
    pub jump_f: T,
    pub jump_fu: T,
    pub jump_fu2: T,
    pub jump_p: T,
    /// `[f]𝔇 − [fu]`.
    pub rh_mass_residual: T,
    /// `[fu]𝔇 − [fu² + p]`.
    pub rh_momentum_residual: T,
    /// Rate of change of the mass carried by a point mass on the jump.
    pub atom_mass_rate: T,
    pub atom_momentum_rate: T,
}

impl<T: Scalar> JumpAudit<T> {
    pub fn new(position: T, speed: T, left: Side<T>, right: Side<T>, atom_mass_rate: T, atom_momentum_rate: T) -> Self {
        let jump_f = right.f - left.f;
        let jump_fu = right.f * right.u - left.f * left.u;
        let jump_fu2 = right.f * right.u * right.u - left.f * left.u * left.u;
        let jump_p = right.p - left.p;
        JumpAudit {
            position,
            speed,
            jump_f,
            jump_fu,
            jump_fu2,
            jump_p,
            rh_mass_residual: jump_f * speed - jump_fu,
            rh_momentum_residual: jump_fu * speed - (jump_fu2 + jump_p),
            atom_mass_rate,
            atom_momentum_rate,
        }
    }

    /// Mass balance including the point mass: `[f]𝔇 − [fu] − ṁ`.
    pub fn generalized_mass_residual(&self) -> T {
        self.rh_mass_residual - self.atom_mass_rate
    }

    /// `[fu]𝔇 − [fu² + p] − d(m𝔇)/dt`.
    pub fn generalized_momentum_residual(&self) -> T {
        self.rh_momentum_residual - self.atom_momentum_rate
    }
}

/// `f₁(f₁+f₂)u₂²/(2f₁+f₂)` inside the overlap, half of it on the boundary, zero
/// elsewhere and for `u₂ ≥ 0`.
pub fn spurious_pressure<T: Scalar>(data: &RiemannData<T>, t: T, x: T) -> Result<T> {
    if !(data.u2 < T::zero()) {
        return Ok(T::zero());
    }
    Ok(riemann_fp(data, t)?.pressure(x))
}

/// Jumps of a free-particle Riemann solution, with or without its pressure.
pub fn audit_fp<T: Scalar>(sol: &RiemannFpResult<T>, with_pressure: bool) -> Vec<JumpAudit<T>> {
    let d = &sol.data;
    let [lo, hi] = sol.breakpoints;
    let (ul, ur) = (d.u1, d.u1 + d.u2);
    let [fl, fm, fr] = sol.density_values;
    let z = T::zero();
    let p = if with_pressure && sol.regime == Regime::Compression { sol.pressure((lo + hi) / T::lit(2.0)) } else { z };
    match sol.regime {
        Regime::Compression => {
            let um = sol.middle_velocity();
            vec![
                JumpAudit::new(lo, ur, Side::new(fl, ul, z), Side::new(fm, um, p), z, z),
                JumpAudit::new(hi, ul, Side::new(fm, um, p), Side::new(fr, ur, z), z, z),
            ]
        }
        Regime::Rarefaction => vec![
            JumpAudit::new(lo, ul, Side::new(fl, ul, z), Side::new(fm, ul, z), z, z),
            JumpAudit::new(hi, ur, Side::new(fm, ur, z), Side::new(fr, ur, z), z, z),
        ],
        Regime::NoWave => vec![JumpAudit::new(lo, ul, Side::new(fl, ul, z), Side::new(fr, ur, z), z, z)],
    }
}

/// The δ-shock of constant-state sticky data at time `t`, audited with `p = 0`.
///
/// Velocity and the carried-mass rate come from separate closed forms, so the
/// generalized residuals vanish only if the trajectory is consistent.
pub fn audit_sticky<T: Scalar>(data: &RiemannData<T>, t: T) -> Result<JumpAudit<T>> {
    let tr = jump_trajectory_constant(data, t)?;
    let s = tr.state;
    let two = T::lit(2.0);
    let (jf, a, b, f3) = (data.jump_f(), data.jump_uf(), data.jump_u2f(), data.f3);
    let (m_rate, accel) = match tr.status {
        TrajectoryStatus::MassVanished { .. } => (T::nan(), T::nan()),
        TrajectoryStatus::Regular if jf != T::zero() => {
            let disc = mass_discriminant(data, t);
            let r = disc.sqrt();
            let d1 = -two * a * f3 + two * (a * a - jf * b) * t;
            let d2 = two * (a * a - jf * b);
            (d1 / (two * r), (d2 / (two * r) - d1 * d1 / (T::lit(4.0) * r * r * r)) / jf)
        }
        TrajectoryStatus::Regular => {
            let m = f3 - a * t;
            let n = two * f3 * t - a * t * t;
            (-a, -b * (m * m + a * n) / (m * m * m))
        }
    };
    let z = T::zero();
    let left = Side::new(data.f1, data.u1, z);
    let right = Side::new(data.f1 + data.f2, data.u1 + data.u2, z);
    Ok(JumpAudit::new(s.x_j, s.v, left, right, m_rate, m_rate * s.v + s.m * accel))
}

/// `m(t) − (−[uf]t + [f]x_j + f₃)` for constant-state sticky data.
pub fn sticky_mass_identity<T: Scalar>(data: &RiemannData<T>, t: T) -> Result<T> {
    let s = jump_trajectory_constant(data, t)?.state;
    Ok(s.m - (-data.jump_uf() * t + data.jump_f() * (s.x_j - data.x0) + data.f3))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyCheck {
    pub pass: bool,
    /// `1/t` minus the difference quotient.
    pub margin: f64,
}

/// `(u(x₂) − u(x₁))/(x₂ − x₁) ≤ 1/t`, with a `1e−12` allowance.
pub fn entropy_check(velocity: &PiecewiseFunction, t: f64, x1: f64, x2: f64) -> EntropyCheck {
    let q = (velocity.eval(x2) - velocity.eval(x1)) / (x2 - x1);
    let margin = 1.0 / t - q;
    EntropyCheck { pass: margin >= -1e-12, margin }
}

/// Entropy checks on 21 pairs straddling `x_jump` with gaps `1e−6..1e−1`.
pub fn entropy_sweep(velocity: &PiecewiseFunction, t: f64, x_jump: f64) -> Vec<EntropyCheck> {
    (0..21)
        .map(|k| {
            let gap = 10f64.powf(-6.0 + 5.0 * k as f64 / 20.0);
            entropy_check(velocity, t, x_jump - gap / 2.0, x_jump + gap / 2.0)
        })
        .collect()
}
