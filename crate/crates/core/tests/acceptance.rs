//! Acceptance suite: one line per criterion, asserted at the stated tolerances.
//!
//! Criteria listed in `KNOWN_DEVIATIONS` are expected to fail; the suite
//! asserts that they still do, so a silent change in either direction shows up.

use std::time::Instant;

use pgd_core::blowup::{critical_time, km_constant, scaling_exponent};
use pgd_core::general_law::{back_transform_values, transform_problem, FluxMap};
use pgd_core::hugoniot::{audit_fp, audit_sticky, entropy_sweep, spurious_pressure, sticky_mass_identity};
use pgd_core::mollified_kernel::{approximation_independence, fp_solution, Field, Kernel, KernelParams, Schedule};
use pgd_core::quadrature::{integrate_split, Tolerance};
use pgd_core::riemann_closed_form::{order_swapped_velocity, riemann_fp, singular_closed_forms};
use pgd_core::sde_oracle::{estimate_fields, simulate, McConfig};
use pgd_core::sticky::{
    jump_trajectory_constant, jump_trajectory_general, mass_discriminant, post_blowup_evolution, riemann_oracle,
    sticky_particle_oracle, GeneralConfig, TrajectoryStatus,
};
use pgd_core::{Bridge, Grid, Piece, PiecewiseFunction, Preset, RiemannData};

/// `K₅₀/50 → √2/(e√π)`, not `√2/e`; the first half of criterion 4 cannot hold.
const KNOWN_DEVIATIONS: &[&str] = &["4a"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
    budget: f64,
}

fn run(id: &'static str, budget: f64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    Outcome { id, pass, detail, seconds: start.elapsed().as_secs_f64(), budget }
}

fn rd(f1: f64, f2: f64, u1: f64, u2: f64, f3: f64) -> RiemannData {
    RiemannData::new(f1, f2, u1, u2, f3).unwrap()
}

fn test_functions() -> Vec<Box<dyn Fn(f64) -> f64>> {
    vec![
        Box::new(|x: f64| (-(x + 0.2) * (x + 0.2)).exp()),
        Box::new(|x: f64| (1.0 + 0.5 * x) * (-x * x / 2.0).exp()),
        Box::new(|x: f64| 1.0 / (1.0 + (x + 1.3) * (x + 1.3))),
    ]
}

fn riemann_sets() -> Vec<RiemannData> {
    vec![
        rd(1.0, 0.0, 0.0, 1.0, 0.0),
        rd(1.0, 1.0, -0.5, 1.0, 0.0),
        rd(2.0, -1.0, 0.3, 0.8, 0.0),
        rd(0.5, 1.5, -1.0, 2.0, 0.0),
        rd(1.0, 0.0, 0.0, -1.0, 0.0),
        rd(1.0, 1.0, 0.0, -1.0, 0.0),
        rd(2.0, -1.0, 0.5, -1.5, 0.0),
        rd(0.5, 1.5, 1.0, -2.0, 0.0),
    ]
}

fn c1_riemann_limits() -> (bool, String) {
    let schedule = Schedule::default();
    let eps = schedule.last().eps;
    let t = 1.0;
    let grid = Grid::uniform(t, -2.5, 2.5, 51).unwrap();
    let mut worst: f64 = 0.0;
    for d in riemann_sets() {
        let sol = riemann_fp(&d, t).unwrap();
        let (fp, _) = fp_solution(|e| d.mollified(e, Bridge::Linear), &schedule, &grid, 20.0, 1e-10).unwrap();
        for (i, &x) in grid.xs.iter().enumerate() {
            if sol.breakpoints.iter().any(|b| (x - b).abs() < 2.0 * eps) {
                continue;
            }
            worst = worst.max((fp.density[i] - sol.density(x)).abs());
            worst = worst.max((fp.velocity[i] - sol.velocity(x)).abs());
        }
    }
    (worst < 5e-2, format!("max |error| = {worst:.3e} over 8 sets at eps = {eps}"))
}

fn c2_singular() -> (bool, String) {
    let (eps, sigma, t) = (1e-4, 1e-4, 1.0);
    let mut worst: f64 = 0.0;
    for d in [rd(1.0, 0.5, 0.2, -1.0, 0.8), rd(1.0, 0.5, -0.2, 1.0, 0.8)] {
        let (a, b) = (d.u1 * t, (d.u1 + d.u2) * t);
        let mut points = Vec::new();
        for c in [a, b] {
            for k in [-0.05, -0.01, -2e-3, 0.0, 2e-3, 0.01, 0.05] {
                points.push(c + k);
            }
        }
        for phi in test_functions() {
            let mut err = None;
            let got = integrate_split(
                |x| match singular_closed_forms(&d, eps, sigma, t, x) {
                    Ok((r, _)) => r * phi(x),
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                },
                -4.0,
                4.0,
                &points,
                Tolerance::new(1e-11, 1e-11),
            )
            .unwrap();
            assert!(err.is_none());
            let want = 0.5 * d.f3 * (phi(a) + phi(b));
            worst = worst.max(((got - want) / want).abs());
        }
    }
    (worst < 1e-2, format!("max relative error = {worst:.3e}"))
}

fn c3_blowup() -> (bool, String) {
    let data = "tanh".parse::<Preset>().unwrap().initial_data().unwrap();
    let sigmas: Vec<f64> = (0..5).map(|k| 10f64.powf(-1.0 - 0.5 * k as f64)).collect();
    let fit = scaling_exponent(&data, &sigmas, 20.0, 1e-10).unwrap();
    let k3: f64 = km_constant(3).unwrap();
    let (d1, d3) = (data.u0.derivative(1, 0.0), data.u0.derivative(3, 0.0));
    let expected = k3 * d1.abs().powf(1.0 / 3.0) / d3.abs().powf(1.0 / 3.0) * data.f0.eval(0.0);
    let slope_ok = (fit.slope + 2.0 / 3.0).abs() <= 0.03;
    let pre_rel = (fit.prefactor - expected).abs() / expected;
    (
        slope_ok && pre_rel < 0.05,
        format!(
            "slope = {:.4}, prefactor = {:.4} vs {expected:.4} ({:.2}%)",
            fit.slope,
            fit.prefactor,
            100.0 * pre_rel
        ),
    )
}

fn c4a_asymptotic() -> (bool, String) {
    let k50: f64 = km_constant(50).unwrap();
    let target = 2f64.sqrt() / std::f64::consts::E;
    let gap = (k50 / 50.0 - target).abs();
    (gap < 0.15, format!("K50/50 = {:.4}, sqrt(2)/e = {target:.4}, gap {gap:.4}", k50 / 50.0))
}

fn c4b_quadrature() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for m in [2usize, 3, 4] {
        // composite Simpson on [−3, 3]; the integrand is below 1e−30 outside
        let n = 200_000;
        let h = 6.0 / n as f64;
        let f = |s: f64| (-s.powi(2 * m as i32)).exp();
        let mut sum = f(-3.0) + f(3.0);
        for i in 1..n {
            let s = -3.0 + h * i as f64;
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(s);
        }
        let integral = sum * h / 3.0;
        let mf = m as f64;
        let fact: f64 = (1..=m).map(|k| k as f64).product();
        let direct =
            fact.powf(1.0 / mf) * integral / (2f64.powf((mf - 1.0) / (2.0 * mf)) * std::f64::consts::PI.sqrt());
        let k: f64 = km_constant(m).unwrap();
        worst = worst.max((k - direct).abs());
    }
    (worst < 1e-8, format!("max |K_m - quadrature| = {worst:.2e} for m = 2, 3, 4"))
}

fn c5_delta_amplitude() -> (bool, String) {
    let data = "linear-plateau".parse::<Preset>().unwrap().initial_data().unwrap();
    let c = critical_time(&data.u0);
    let k = Kernel::new(&data, KernelParams::new(1e-3, 20.0, 1e-10).unwrap());
    let delta = 0.02;
    let phi = move |x: f64| if x.abs() < delta { (1.0 - (x / delta).powi(2)).powi(2) } else { 0.0 };
    let got = k.pair(Field::Density, c.t_star, phi, -delta, delta, &[-3e-3, 0.0, 3e-3], 1e-10).unwrap();
    let err = (got - 2.0 * phi(0.0)).abs();
    (err < 5e-2 * phi(0.0), format!("t* = {}, pairing = {got:.5}, |error| = {err:.3e}", c.t_star))
}

fn c6_pressure() -> (bool, String) {
    let mut exact = true;
    for d in riemann_sets().into_iter().filter(|d| d.u2 < 0.0) {
        let plug = d.f1 * (d.f1 + d.f2) * d.u2 * d.u2 / (2.0 * d.f1 + d.f2);
        let mid = (d.u1 + d.u2 / 2.0) * 1.0;
        exact &= spurious_pressure(&d, 1.0, mid).unwrap() == plug;
    }
    let t = 1.0;
    let sigma = 1e-3;
    let pairing = |d: &RiemannData, phi: &dyn Fn(f64) -> f64| {
        let k = Kernel::new(&d.regular_data(), KernelParams::new(sigma, 20.0, 1e-10).unwrap());
        let (a, b) = (d.u1 * t, (d.u1 + d.u2) * t);
        let mut points = Vec::new();
        for c in [a, b] {
            for s in [-30.0, -8.0, -2.0, 0.0, 2.0, 8.0, 30.0] {
                points.push(c + s * sigma);
            }
        }
        k.pair(Field::IntegralTerm, t, phi, -4.0, 4.0, &points, 1e-9).unwrap()
    };
    let comp = rd(1.0, 0.0, 0.0, -1.0, 0.0);
    let p = spurious_pressure(&comp, t, -0.5).unwrap();
    let mut worst: f64 = 0.0;
    for phi in test_functions() {
        let got = pairing(&comp, &phi);
        // ∫ ∂ₓp φ dx for p constant on ((u₁+u₂)t, u₁t)
        let want = p * (phi((comp.u1 + comp.u2) * t) - phi(comp.u1 * t));
        worst = worst.max((got - want).abs());
    }
    let rare = rd(1.0, 0.0, 0.0, 1.0, 0.0);
    let control = test_functions().iter().map(|phi| pairing(&rare, phi).abs()).fold(0.0, f64::max);
    (
        exact && worst < 5e-2 && control < 1e-2,
        format!(
            "plug-in exact: {exact}; max |pairing - <dp/dx, phi>| = {worst:.3e}; rarefaction control = {control:.2e}"
        ),
    )
}

/// Exact rational arithmetic for the symbolic half of the Hugoniot audit.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Q(i128, i128);

impl Q {
    fn new(n: i128, d: i128) -> Q {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(n, d).max(1) * d.signum();
        Q(n / g, d / g)
    }
    fn from_f64(x: f64) -> Q {
        let mut d = 1i128;
        while (x * d as f64).fract() != 0.0 {
            d *= 2;
        }
        Q::new((x * d as f64) as i128, d)
    }
    fn add(self, o: Q) -> Q {
        Q::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    fn sub(self, o: Q) -> Q {
        self.add(Q(-o.0, o.1))
    }
    fn mul(self, o: Q) -> Q {
        Q::new(self.0 * o.0, self.1 * o.1)
    }
    fn div(self, o: Q) -> Q {
        Q::new(self.0 * o.1, self.1 * o.0)
    }
    fn to_f64(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

/// `([f]𝔇 − [fu], [fu]𝔇 − [fu² + p])` for states `(f, u, p)` on both sides.
fn rational_residuals(speed: Q, l: (Q, Q, Q), r: (Q, Q, Q)) -> (Q, Q) {
    let jf = r.0.sub(l.0);
    let jfu = r.0.mul(r.1).sub(l.0.mul(l.1));
    let jfu2 = r.0.mul(r.1).mul(r.1).sub(l.0.mul(l.1).mul(l.1));
    let jp = r.2.sub(l.2);
    (jf.mul(speed).sub(jfu), jfu.mul(speed).sub(jfu2.add(jp)))
}

fn c7_hugoniot() -> (bool, String) {
    let zero = Q(0, 1);
    let mut symbolic = true;
    let mut violated = 0usize;
    let mut checked = 0usize;
    let mut rounding: f64 = 0.0;
    for d in riemann_sets().into_iter().filter(|d| d.u2 < 0.0) {
        let [f1, f2, u1, u2] = [d.f1, d.f2, d.u1, d.u2].map(Q::from_f64);
        let two = Q(2, 1);
        let fm = two.mul(f1).add(f2);
        let um = u1.add(f1.add(f2).mul(u2).div(fm));
        let p = f1.mul(f1.add(f2)).mul(u2).mul(u2).div(fm);
        let (ur, fr) = (u1.add(u2), f1.add(f2));
        let jumps = [(ur, (f1, u1), (fm, um)), (u1, (fm, um), (fr, ur))];
        for (speed, l, r) in jumps {
            let (m0, p0) = rational_residuals(speed, (l.0, l.1, zero), (r.0, r.1, zero));
            let inside = |side: (Q, Q)| if side.0 == fm { p } else { zero };
            let (m1, p1) = rational_residuals(speed, (l.0, l.1, inside(l)), (r.0, r.1, inside(r)));
            symbolic &= m0 == zero && m1 == zero && p1 == zero;
            checked += 1;
            if p0 != zero {
                violated += 1;
            }
        }
        // the library's states are the rational ones, rounded
        let sol = riemann_fp(&d, 1.0).unwrap();
        symbolic &= (sol.middle_velocity() - um.to_f64()).abs() <= 4.0 * f64::EPSILON * (1.0 + um.to_f64().abs());
        symbolic &= (sol.pressure((sol.breakpoints[0] + sol.breakpoints[1]) / 2.0) - p.to_f64()).abs()
            <= 4.0 * f64::EPSILON * (1.0 + p.to_f64());
        for a in audit_fp(&sol, true) {
            rounding = rounding.max(a.rh_mass_residual.abs()).max(a.rh_momentum_residual.abs());
        }
        for a in audit_fp(&sol, false) {
            symbolic &= a.rh_momentum_residual.abs() > 1e-3;
        }
    }
    let mut sticky_worst: f64 = 0.0;
    for d in sticky_sets() {
        for t in [0.25, 1.0, 3.0] {
            let a = audit_sticky(&d, t).unwrap();
            sticky_worst =
                sticky_worst.max(a.generalized_mass_residual().abs()).max(a.generalized_momentum_residual().abs());
            sticky_worst = sticky_worst.max(sticky_mass_identity(&d, t).unwrap().abs());
        }
    }
    let ok = symbolic && violated == checked && rounding < 1e-14 && sticky_worst < 1e-12;
    (
        ok,
        format!(
            "FP: rational residuals exact, momentum violated at {violated}/{checked} jumps without p and zero with p, f64 rounding {rounding:.1e}; sticky max residual {sticky_worst:.1e}"
        ),
    )
}

fn sticky_sets() -> Vec<RiemannData> {
    vec![
        rd(1.0, 1.0, 0.0, -1.0, 0.0),
        rd(1.0, 0.0, 0.5, -1.0, 0.0),
        rd(2.0, 1.0, 0.5, -2.0, 0.5),
        rd(1.0, 0.5, 1.0, -1.5, 1.0),
    ]
}

fn c8_sticky() -> (bool, String) {
    let mut ok = true;
    let (mut dx, mut dm, mut ident): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for d in sticky_sets() {
        let s = jump_trajectory_constant(&d, 1.0).unwrap().state;
        let o = riemann_oracle(&d, 10_000, 4.0, &[1.0]).unwrap()[0].heaviest();
        dx = dx.max((o.x - s.x_j).abs());
        dm = dm.max((o.m - s.m).abs() / s.m);
        ok &= s.lax_holds() && s.x_j > (d.u1 + d.u2) && s.x_j < d.u1;
        for t in [0.1, 1.0, 4.0] {
            let st = jump_trajectory_constant(&d, t).unwrap().state;
            let linear = -d.jump_uf() * t + d.jump_f() * st.x_j + d.f3;
            let disc = mass_discriminant(&d, t);
            ident = ident.max((linear * linear - disc).abs() / disc);
        }
    }
    let vm = "vanishing-mass".parse::<Preset>().unwrap().riemann().unwrap();
    let event = matches!(jump_trajectory_constant(&vm, 1.0).unwrap().status, TrajectoryStatus::MassVanished { .. });
    ok &= dx < 0.02 && dm < 0.02 && ident < 1e-10 && event;
    (
        ok,
        format!(
            "|dx_j| = {dx:.2e}, |dm|/m = {dm:.2e}, m^2 identity {ident:.1e}, Lax strict, vanishing-mass event: {event}"
        ),
    )
}

fn c9_general() -> (bool, String) {
    let mut dev: f64 = 0.0;
    for d in sticky_sets() {
        let atoms = if d.f3 > 0.0 { vec![(0.0, d.f3, 0.0)] } else { vec![] };
        let s = jump_trajectory_general(&d.regular_data(), &atoms, 0.0, 1.0, 1e-3, GeneralConfig::default()).unwrap();
        let last = s.states.last().unwrap();
        let exact = jump_trajectory_constant(&d, 1.0).unwrap().state;
        dev = dev.max((last.x_j - exact.x_j).abs()).max((last.m - exact.m).abs());
    }
    let data = "tanh".parse::<Preset>().unwrap().initial_data().unwrap();
    let s = post_blowup_evolution(&data, 2.0, 1e-2, GeneralConfig::default()).unwrap();
    let sym = s.states.iter().map(|st| st.x_j.abs()).fold(0.0, f64::max);
    let m2 = s.states.last().unwrap().m;
    let o = sticky_particle_oracle(&data, &[], 40_000, (-4.0, 4.0), &[2.0]).unwrap()[0].heaviest();
    // s̄ = 2 tanh s̄ by bisection
    let (mut lo, mut hi) = (1.0f64, 3.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid - 2.0 * mid.tanh() < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let two_sbar = lo + hi;
    let ok = dev < 1e-6 && sym < 1e-6 && (m2 - o.m).abs() < 1e-3 && (m2 - two_sbar).abs() < 1e-3;
    (
        ok,
        format!("constant-state deviation {dev:.1e}; |x_j| <= {sym:.1e}; m(2) = {m2:.6} vs oracle {:.6} vs 2s = {two_sbar:.6}", o.m),
    )
}

fn c10_entropy() -> (bool, String) {
    let mut all = true;
    for d in riemann_sets() {
        let sol = riemann_fp(&d, 1.0).unwrap();
        let v = sol.velocity_function();
        for b in sol.breakpoints {
            all &= entropy_sweep(&v, 1.0, b).iter().all(|c| c.pass);
        }
    }
    for d in sticky_sets() {
        let s = jump_trajectory_constant(&d, 1.0).unwrap().state;
        let v = PiecewiseFunction::step(s.x_j, d.u1, d.u1 + d.u2);
        all &= entropy_sweep(&v, 1.0, s.x_j).iter().all(|c| c.pass);
    }
    let swapped = rd(1.0, 1.0, 0.0, 1.0, 0.0);
    let jump = (swapped.u1 + swapped.u2 / 2.0) * 1.0;
    let u = PiecewiseFunction::step(
        jump,
        order_swapped_velocity(&swapped, 1.0, jump - 1.0),
        order_swapped_velocity(&swapped, 1.0, jump + 1.0),
    );
    let fails = entropy_sweep(&u, 1.0, jump).iter().all(|c| !c.pass);
    (all && fails, format!("constructed solutions pass: {all}; order-swapped solution fails: {fails}"))
}

fn c11_sde() -> (bool, String) {
    let d = rd(1.0, 0.0, 0.0, -1.0, 0.0);
    let (sigma, t) = (0.05f64, 1.0f64);
    let h = sigma * t.sqrt() / 4.0;
    let cfg = McConfig { l: 4.0, bandwidth: Some(h), ..McConfig::new(100_000, sigma, 20_240_601) };
    let ens = simulate(&d.regular_data(), &cfg, t).unwrap();
    let grid = Grid::uniform(t, -2.0, 1.5, 71).unwrap();
    let est = estimate_fields(&ens, &grid, Some(h)).unwrap();
    let k = Kernel::new(&d.regular_data(), KernelParams::new(sigma, 20.0, 1e-10).unwrap());
    let (mut used, mut agree) = (0usize, 0usize);
    for e in est.iter().filter(|e| !e.insufficient) {
        let (rho, u) = k.fields(t, e.x).unwrap();
        used += 1;
        let ok_rho = (e.rho * ens.mass - rho).abs() <= 3.0 * e.stderr_rho * ens.mass;
        let ok_u = (e.u - u).abs() <= 3.0 * e.stderr_u.max(1e-12);
        if ok_rho && ok_u {
            agree += 1;
        }
    }
    let other = simulate(&d.regular_data(), &McConfig { dt: 1e-3, ..cfg }, t).unwrap();
    let bitwise = ens.x[..100].iter().zip(&other.x[..100]).all(|(a, b)| a.to_bits() == b.to_bits());
    let frac = agree as f64 / used as f64;
    (
        frac >= 0.95 && used > 30 && bitwise,
        format!("{agree}/{used} unflagged points within 3 stderr ({:.1}%); dt-independent: {bitwise}", 100.0 * frac),
    )
}

fn c12_independence() -> (bool, String) {
    let schedule = Schedule::default();
    let t = 1.0;
    let grid = Grid::uniform(t, -2.5, 2.5, 51).unwrap();
    let mut worst = (0.0f64, 0.0f64);
    for d in [rd(1.0, 1.0, -0.5, 1.0, 0.0), rd(1.0, 1.0, 0.0, -1.0, 0.0)] {
        let sol = riemann_fp(&d, t).unwrap();
        let disc = approximation_independence(
            |e| d.mollified(e, Bridge::Linear),
            |e| d.mollified(e, Bridge::SmoothStep),
            &schedule,
            &grid,
            &sol.breakpoints,
            0.05,
            20.0,
            1e-10,
        )
        .unwrap();
        worst = (worst.0.max(disc.density), worst.1.max(disc.velocity));
    }
    (worst.0 < 5e-2 && worst.1 < 5e-2, format!("max density gap {:.2e}, velocity gap {:.2e}", worst.0, worst.1))
}

fn c13_flux() -> (bool, String) {
    let mut round: f64 = 0.0;
    for flux in [FluxMap::identity(), FluxMap::square_positive(), FluxMap::exp()] {
        for i in 0..100 {
            let v = 0.05 + 0.1 * i as f64;
            round = round.max((flux.inverse(flux.eval(v)).unwrap() - v).abs());
        }
    }
    let v0 = PiecewiseFunction::smooth(
        Piece::new(|s: f64| 1.0 - 0.3 * s.tanh()).with_derivative(|s: f64| -0.3 / s.cosh().powi(2)),
    );
    let g0 = PiecewiseFunction::constant(1.0);
    let flux = FluxMap::exp();
    let p = transform_problem(&v0, &g0, &flux, (-20.0, 20.0)).unwrap();
    let k = Kernel::new(&p.data, KernelParams::new(1e-3, 20.0, 1e-11).unwrap());
    let v = |t: f64, x: f64| back_transform_values(&[k.u_hat_sigma(t, x).unwrap()], &flux).unwrap()[0];
    let (t, h) = (0.8, 1e-3);
    let mut residual: f64 = 0.0;
    for x in [-1.0, -0.3, 0.4, 1.1, 2.0] {
        let r = (v(t + h, x) - v(t - h, x)) / (2.0 * h) + flux.eval(v(t, x)) * (v(t, x + h) - v(t, x - h)) / (2.0 * h);
        residual = residual.max(r.abs());
    }
    (round < 1e-10 && residual < 1e-4, format!("round trip {round:.1e}; transformed residual {residual:.2e}"))
}

#[test]
fn acceptance() {
    let outcomes = vec![
        run("1", 60.0, c1_riemann_limits),
        run("2", 30.0, c2_singular),
        run("3", 120.0, c3_blowup),
        run("4a", 5.0, c4a_asymptotic),
        run("4b", 5.0, c4b_quadrature),
        run("5", 30.0, c5_delta_amplitude),
        run("6", f64::INFINITY, c6_pressure),
        run("7", f64::INFINITY, c7_hugoniot),
        run("8", 60.0, c8_sticky),
        run("9", 120.0, c9_general),
        run("10", f64::INFINITY, c10_entropy),
        run("11", 60.0, c11_sde),
        run("12", f64::INFINITY, c12_independence),
        run("13", f64::INFINITY, c13_flux),
    ];
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let in_time = o.seconds <= o.budget;
        let pass = o.pass && in_time;
        let known = KNOWN_DEVIATIONS.contains(&o.id);
        let tag = if pass {
            "PASS"
        } else if known {
            "FAIL (known deviation)"
        } else {
            "FAIL"
        };
        let time = if in_time { String::new() } else { format!(", over the {}s budget", o.budget) };
        println!("criterion {:>3}: {tag} [{:.1}s{time}] {}", o.id, o.seconds, o.detail);
        if pass == known {
            unexpected.push(o.id);
        }
    }
    assert!(unexpected.is_empty(), "unexpected outcome for criteria {unexpected:?}");
}
