//! Named initial data: `name` or `name:p1,p2,…`.
//!
//! | preset | parameters | data |
//! |---|---|---|
//! | `heaviside-riemann` (`riemann`) | `f1,f2,u1,u2[,f3]` | constant states, jump at 0 |
//! | `vanishing-mass` | none | `f1=2, f2=−1.8, u1=−1, u2=−2, f3=1` |
//! | `tanh` | `[a[,k]]` | `u₀ = −a·tanh(kx)`, `f₀ = 1` |
//! | `arctan` | `[a[,k]]` | `u₀ = −a·atan(kx)`, `f₀ = 1` |
//! | `linear-plateau` | `[w]` | `u₀ = −x` on `[−w, w]`, constant outside, `f₀ = 1` |

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fields::{Bridge, InitialData, Piece, PiecewiseFunction, RiemannData};

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Riemann(RiemannData<f64>),
    Tanh {
        a: f64,
        k: f64,
    },
    Arctan {
        a: f64,
        k: f64,
    },
    LinearPlateau {
        w: f64,
    },
    /// Linear interpolation of sampled `f₀` and `u₀`.
    Tabulated {
        xs: Vec<f64>,
        f: Vec<f64>,
        u: Vec<f64>,
    },
}

fn params(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad preset parameter `{p}`"))))
        .collect()
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let p = params(rest)?;
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if p.len() < lo || p.len() > hi {
                return Err(Error::Config(format!("preset `{name}` takes {lo} to {hi} parameters, got {}", p.len())));
            }
            Ok(())
        };
        let get = |i: usize, d: f64| p.get(i).copied().unwrap_or(d);
        match name.trim() {
            "heaviside-riemann" | "riemann" => {
                arity(4, 5)?;
                Ok(Preset::Riemann(RiemannData::new(p[0], p[1], p[2], p[3], get(4, 0.0))?))
            }
            "vanishing-mass" => {
                arity(0, 0)?;
                Ok(Preset::Riemann(RiemannData::diagnostic(2.0, -1.8, -1.0, -2.0, 1.0)?))
            }
            "tanh" | "arctan" => {
                arity(0, 2)?;
                let (a, k) = (get(0, 1.0), get(1, 1.0));
                if !(a.is_finite() && k.is_finite() && a * k > 0.0) {
                    return Err(Error::Config("need a·k > 0".into()));
                }
                Ok(if name == "tanh" { Preset::Tanh { a, k } } else { Preset::Arctan { a, k } })
            }
            "linear-plateau" => {
                arity(0, 1)?;
                let w = get(0, 1.0);
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::Config("plateau half-width must be positive".into()));
                }
                Ok(Preset::LinearPlateau { w })
            }
            other => Err(Error::Config(format!("unknown data preset `{other}`"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Riemann(d) => write!(f, "riemann:{},{},{},{},{}", d.f1, d.f2, d.u1, d.u2, d.f3),
            Preset::Tanh { a, k } => write!(f, "tanh:{a},{k}"),
            Preset::Arctan { a, k } => write!(f, "arctan:{a},{k}"),
            Preset::LinearPlateau { w } => write!(f, "linear-plateau:{w}"),
            Preset::Tabulated { xs, .. } => write!(f, "tabulated:{}", xs.len()),
        }
    }
}

impl Preset {
    pub fn tabulated(xs: Vec<f64>, f: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        PiecewiseFunction::tabulated(&xs, &f)?;
        PiecewiseFunction::tabulated(&xs, &u)?;
        Ok(Preset::Tabulated { xs, f, u })
    }

    pub fn riemann(&self) -> Option<RiemannData<f64>> {
        match self {
            Preset::Riemann(d) => Some(*d),
            _ => None,
        }
    }

    /// Regular part of the data; a Riemann atom is not included.
    pub fn initial_data(&self) -> Result<InitialData> {
        let one = PiecewiseFunction::constant(1.0);
        Ok(match self {
            Preset::Riemann(d) => d.regular_data(),
            &Preset::Tanh { a, k } => InitialData::new(
                one,
                PiecewiseFunction::smooth(
                    Piece::new(move |s: f64| -a * (k * s).tanh())
                        .with_derivative(move |s: f64| -a * k / (k * s).cosh().powi(2)),
                )
                .with_bound(a.abs()),
            ),
            &Preset::Arctan { a, k } => InitialData::new(
                one,
                PiecewiseFunction::smooth(
                    Piece::new(move |s: f64| -a * (k * s).atan())
                        .with_derivative(move |s: f64| -a * k / (1.0 + (k * s).powi(2))),
                )
                .with_bound(a.abs() * std::f64::consts::FRAC_PI_2),
            ),
            &Preset::LinearPlateau { w } => InitialData::new(
                one,
                PiecewiseFunction::new(
                    vec![-w, w],
                    vec![Piece::constant(w), Piece::linear(-1.0, 0.0), Piece::constant(-w)],
                )?
                .with_bound(w),
            ),
            Preset::Tabulated { xs, f, u } => {
                InitialData::new(PiecewiseFunction::tabulated(xs, f)?, PiecewiseFunction::tabulated(xs, u)?)
            }
        })
    }

    /// Point masses `(position, amplitude)` of the initial density.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            Preset::Riemann(d) if d.f3 != 0.0 => vec![(d.x0, d.f3)],
            _ => Vec::new(),
        }
    }

    /// Data at regularization scale `eps`: bridged jumps and Gaussian atoms for
    /// Riemann data, unchanged otherwise.
    pub fn regularized(&self, eps: f64, bridge: Bridge) -> Result<InitialData> {
        match self {
            Preset::Riemann(d) => d.mollified(eps, bridge),
            _ => self.initial_data(),
        }
    }
}
