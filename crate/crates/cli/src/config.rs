//! Run configuration: defaults, then a TOML file, then command-line flags.
//!
//! A file holds one `[section]` per subcommand. CSV artifacts start with the
//! same content as `# ` comment lines after a `# pgd <subcommand>` marker, so
//! any artifact can be passed back as `--config`.

use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::CliError;

pub const MARKER: &str = "# pgd ";
pub const OUT_DIR_ENV: &str = "PGD_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    /// A float, or `auto` for a value derived from the others.
    FloatOrAuto,
    Count,
    Seed,
    Text,
    Switch,
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Key {
    Key { name, kind, default, help }
}

const FLUX: Key =
    key("flux", Kind::Text, "identity", "Flux map G applied to the data velocity: identity, square-positive, exp");

const MOLLIFIED: &[Key] = &[
    key("data", Kind::Text, "riemann:1,0,0,-1", "Initial data preset, e.g. riemann:f1,f2,u1,u2[,f3], tanh:a,k"),
    key("t", Kind::Float, "1", "Evaluation time (time units)"),
    key("grid", Kind::Text, "-2:2:81", "Spatial grid a:b:n (length units, n points)"),
    key("sigma", Kind::Float, "0.001", "Noise amplitude σ (length per sqrt time)"),
    key("eps", Kind::Float, "0.01", "Regularization half-width ε of jumps and atoms (length units)"),
    key("bridge", Kind::Text, "linear", "Jump bridge shape: linear, smoothstep"),
    key("l", Kind::FloatOrAuto, "auto", "Integration half-width L (length units) or auto"),
    key("quad_tol", Kind::Float, "1e-10", "Absolute quadrature tolerance on the density"),
    key("h", Kind::Float, "0.001", "Finite-difference step for residuals (time and length units)"),
    FLUX,
];

const RIEMANN: &[Key] = &[
    key("f1", Kind::Float, "1", "Left density"),
    key("f2", Kind::Float, "0", "Density jump (right density is f1 + f2)"),
    key("u1", Kind::Float, "0", "Left velocity"),
    key("u2", Kind::Float, "-1", "Velocity jump (right velocity is u1 + u2)"),
    key("f3", Kind::Float, "0", "Point mass at the origin"),
    key("t", Kind::Float, "1", "Evaluation time (time units)"),
    key("grid", Kind::Text, "-2:2:81", "Spatial grid a:b:n (length units, n points)"),
    key("check", Kind::Switch, "false", "Also compare with the quadrature solver over the ε-σ schedule"),
    key("eps0", Kind::Float, "0.1", "First schedule stage ε₀ for --check (length units)"),
    key("stages", Kind::Count, "6", "Number of halvings of ε after the first stage for --check"),
    key("l", Kind::Float, "20", "Integration half-width L for --check (length units)"),
    key("quad_tol", Kind::Float, "1e-10", "Absolute quadrature tolerance for --check"),
    FLUX,
];

const BLOWUP: &[Key] = &[
    key("data", Kind::Text, "tanh", "Smooth initial data preset: tanh:a,k, arctan:a,k, linear-plateau:w"),
    key(
        "sigma_sweep",
        Kind::Text,
        "0.1,0.031623,0.01,0.0031623,0.001",
        "Comma-separated σ values (length per sqrt time)",
    ),
    key("l", Kind::Float, "20", "Integration half-width L (length units)"),
    key("quad_tol", Kind::Float, "1e-10", "Absolute quadrature tolerance"),
    FLUX,
];

const STICKY: &[Key] = &[
    key(
        "data",
        Kind::Text,
        "riemann:1,1,0,-1",
        "Initial data preset; non-Riemann data is evolved from its first blow-up",
    ),
    key("t_end", Kind::Float, "1", "Final time (time units)"),
    key("dt", Kind::Float, "0.01", "Output and integration step (time units)"),
    key("oracle_n", Kind::Count, "0", "Particles in the sticky-particle oracle; 0 disables it"),
    key("oracle_half_width", Kind::Float, "4", "Half-width of the oracle particle window (length units)"),
    key("weight", Kind::Text, "jacobian", "Branch weight of the general solver: jacobian, literal"),
    key("l", Kind::Float, "20", "Half-width searched for characteristic feet (length units)"),
    FLUX,
];

const ORACLE: &[Key] = &[
    key("data", Kind::Text, "riemann:1,0,0,-1", "Initial data preset (regular part only)"),
    key("paths", Kind::Count, "100000", "Number of Monte Carlo paths"),
    key("sigma", Kind::Float, "0.05", "Noise amplitude σ (length per sqrt time)"),
    key("seed", Kind::Seed, "1", "Seed of the per-path random streams"),
    key("t", Kind::Float, "1", "Terminal time (time units)"),
    key("dt", Kind::Float, "0.01", "Nominal time step; the exact update does not depend on it (time units)"),
    key("grid", Kind::Text, "-2:1.5:71", "Spatial grid a:b:n (length units, n points)"),
    key("bandwidth", Kind::FloatOrAuto, "auto", "Kernel bandwidth (length units) or auto for σ√t/4"),
    key("window", Kind::Float, "4", "Half-width of the sampling window for initial positions (length units)"),
    key("check", Kind::Switch, "false", "Compare with the quadrature solver at the same σ"),
    key("l", Kind::Float, "20", "Integration half-width L for --check (length units)"),
    key("quad_tol", Kind::Float, "1e-10", "Absolute quadrature tolerance for --check"),
    FLUX,
];

const FLUX_DEMO: &[Key] = &[
    key("v0", Kind::Text, "tanh:0.5,1", "Smooth preset for v₀ (the velocity is used as v₀, the density as g₀)"),
    key("t", Kind::Float, "0.5", "Evaluation time before the first blow-up (time units)"),
    key("grid", Kind::Text, "-3:3:61", "Spatial grid a:b:n (length units, n points)"),
    key("h", Kind::Float, "0.001", "Finite-difference step for residuals (time and length units)"),
    key("l", Kind::Float, "20", "Half-width searched for characteristic feet (length units)"),
    key("flux", Kind::Text, "exp", "Flux map G: identity, square-positive, exp"),
];

pub const COMMANDS: &[(&str, &str, &[Key])] = &[
    ("mollified", "Quadrature solution of the viscous problem at fixed σ and ε", MOLLIFIED),
    ("riemann", "Closed-form free-particle solution of a Riemann problem", RIEMANN),
    ("blowup", "Density scaling at the first gradient catastrophe", BLOWUP),
    ("sticky", "δ-shock trajectory, carried mass and velocity", STICKY),
    ("oracle", "Monte Carlo estimate of density and velocity from perturbed characteristics", ORACLE),
    ("flux-demo", "Classical solution of a transformed flux problem with residuals", FLUX_DEMO),
];

fn keys_of(command: &str) -> Option<&'static [Key]> {
    COMMANDS.iter().find(|c| c.0 == command).map(|c| c.2)
}

fn flag(name: &str) -> String {
    name.replace('_', "-")
}

/// The full command tree.
pub fn command() -> Command {
    let mut cmd = Command::new("pgd")
        .about("Generalized solutions of pressureless gas dynamics")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about, keys) in COMMANDS {
        let mut sub = Command::new(*name)
            .about(*about)
            .arg(Arg::new("config").long("config").value_name("FILE").help("TOML config or a CSV artifact to rerun"))
            .arg(
                Arg::new("out")
                    .long("out")
                    .value_name("FILE")
                    .help("Output CSV path [default: <out-dir>/<subcommand>.csv]"),
            )
            .arg(
                Arg::new("out_dir")
                    .long("out-dir")
                    .value_name("DIR")
                    .help(format!("Output directory [default: ${OUT_DIR_ENV} or .]")),
            );
        for k in keys.iter() {
            let arg = Arg::new(k.name).long(flag(k.name)).help(format!("{} [default: {}]", k.help, k.default));
            sub = sub.arg(match k.kind {
                Kind::Switch => arg.action(ArgAction::SetTrue),
                _ => arg.value_name("VALUE").allow_hyphen_values(true),
            });
        }
        cmd = cmd.subcommand(sub);
    }
    cmd.subcommand(
        Command::new("audit")
            .about("Recomputes a riemann or sticky artifact from its header and checks the jump conditions")
            .arg(Arg::new("artifact").required(true).value_name("CSV"))
            .arg(
                Arg::new("strict")
                    .long("strict")
                    .action(ArgAction::SetTrue)
                    .help("Exit with status 4 if a required check fails"),
            ),
    )
}

/// Leading `# ` lines of an artifact after the marker, or `None` if `text` has no marker.
pub fn header_of(text: &str) -> Option<(String, String)> {
    let mut lines = text.lines();
    let first = lines.next()?;
    let command = first.strip_prefix(MARKER)?.trim().to_string();
    let body: Vec<&str> = lines.map_while(|l| l.strip_prefix('#')).map(|l| l.strip_prefix(' ').unwrap_or(l)).collect();
    Some((command, body.join("\n")))
}

fn scalar_text(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Float(f) => Some(format!("{f}")),
        toml::Value::Boolean(b) => Some(b.to_string()),
        _ => None,
    }
}

/// `(key, value)` pairs of the `[command]` section of a config file.
fn file_values(path: &Path, command: &str) -> Result<Vec<(String, String)>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let source = match header_of(&text) {
        Some((cmd, body)) => {
            if cmd != command {
                return Err(CliError::Config(format!("{} was written by `{cmd}`, not `{command}`", path.display())));
            }
            body
        }
        None => text,
    };
    let table: toml::Table = source.parse().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (section, body) in &table {
        let Some(keys) = keys_of(section) else {
            return Err(CliError::Config(format!("unknown section [{section}]")));
        };
        let toml::Value::Table(body) = body else {
            return Err(CliError::Config(format!("key `{section}` outside a section")));
        };
        if section != command {
            continue;
        }
        for (k, v) in body {
            if !keys.iter().any(|key| key.name == k) {
                return Err(CliError::Config(format!("unknown key `{k}` in [{section}]")));
            }
            let s = scalar_text(v).ok_or_else(|| CliError::Config(format!("`{k}` must be a scalar")))?;
            out.push((k.clone(), s));
        }
    }
    Ok(out)
}

fn validate(k: &Key, v: &str) -> Result<(), CliError> {
    let bad = |what: &str| Err(CliError::Config(format!("--{} expects {what}, got `{v}`", flag(k.name))));
    match k.kind {
        Kind::Float => match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(()),
            _ => bad("a finite number"),
        },
        Kind::FloatOrAuto if v == "auto" => Ok(()),
        Kind::FloatOrAuto => match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(()),
            _ => bad("a finite number or auto"),
        },
        Kind::Count => v.parse::<usize>().map(|_| ()).or_else(|_| bad("a non-negative integer")),
        Kind::Seed => v.parse::<u64>().map(|_| ()).or_else(|_| bad("an unsigned integer")),
        Kind::Switch => v.parse::<bool>().map(|_| ()).or_else(|_| bad("true or false")),
        Kind::Text => Ok(()),
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    values: Vec<(Key, String)>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn resolve(command: &'static str, m: &ArgMatches) -> Result<Self, CliError> {
        let keys = keys_of(command).expect("known subcommand");
        let mut values: Vec<(Key, String)> = keys.iter().map(|k| (*k, k.default.to_string())).collect();
        if let Some(path) = m.get_one::<String>("config") {
            for (k, v) in file_values(Path::new(path), command)? {
                values.iter_mut().find(|e| e.0.name == k).expect("checked key").1 = v;
            }
        }
        for (k, v) in values.iter_mut() {
            if m.value_source(k.name) != Some(ValueSource::CommandLine) {
                continue;
            }
            *v = match k.kind {
                Kind::Switch => "true".to_string(),
                _ => m.get_one::<String>(k.name).expect("value present").clone(),
            };
        }
        for (k, v) in values.iter_mut() {
            validate(k, v)?;
            if matches!(k.kind, Kind::Float | Kind::FloatOrAuto) && v != "auto" {
                *v = format!("{:?}", v.parse::<f64>().expect("validated"));
            }
        }
        let dir = m
            .get_one::<String>("out_dir")
            .cloned()
            .or_else(|| std::env::var(OUT_DIR_ENV).ok())
            .unwrap_or_else(|| ".".to_string());
        let out = match m.get_one::<String>("out") {
            Some(p) => PathBuf::from(p),
            None => Path::new(&dir).join(format!("{command}.csv")),
        };
        Ok(RunConfig { command, values, out })
    }

    fn raw(&self, name: &str) -> &str {
        &self.values.iter().find(|e| e.0.name == name).unwrap_or_else(|| panic!("no key {name}")).1
    }

    pub fn f64(&self, name: &str) -> f64 {
        self.raw(name).parse().expect("validated")
    }

    pub fn auto_f64(&self, name: &str) -> Option<f64> {
        self.raw(name).parse().ok()
    }

    pub fn count(&self, name: &str) -> usize {
        self.raw(name).parse().expect("validated")
    }

    pub fn seed(&self, name: &str) -> u64 {
        self.raw(name).parse().expect("validated")
    }

    pub fn text(&self, name: &str) -> &str {
        self.raw(name)
    }

    pub fn switch(&self, name: &str) -> bool {
        self.raw(name) == "true"
    }

    /// Header block written at the top of every artifact.
    pub fn header(&self) -> String {
        let mut s = format!("{MARKER}{}\n# [{}]\n", self.command, self.command);
        for (k, v) in &self.values {
            let shown = match k.kind {
                Kind::Text | Kind::FloatOrAuto => toml::Value::String(v.clone()).to_string(),
                _ => v.clone(),
            };
            s.push_str(&format!("# {} = {shown}\n", k.name));
        }
        s
    }

    /// Sibling of the main output with `suffix` replacing `.csv`.
    pub fn sidecar(&self, suffix: &str) -> PathBuf {
        let stem = self.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        self.out.with_file_name(format!("{stem}.{suffix}"))
    }
}

/// Parses `a:b:n`.
pub fn parse_grid(spec: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Config(format!("grid `{spec}` must be a:b:n with a < b and n >= 2"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(a < b && a.is_finite() && b.is_finite() && n >= 2) {
        return Err(bad());
    }
    Ok((a, b, n))
}

/// Parses a comma-separated list of positive numbers.
pub fn parse_list(spec: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(|p| match p.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(CliError::Config(format!("bad list entry `{p}`"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec() {
        assert_eq!(parse_grid("-2:2:5").unwrap(), (-2.0, 2.0, 5));
        assert!(parse_grid("2:-2:5").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:1").is_err());
    }

    #[test]
    fn header_round_trip() {
        let m = command().try_get_matches_from(["pgd", "riemann", "--u2", "-2", "--check"]).unwrap();
        let (_, sub) = m.subcommand().unwrap();
        let cfg = RunConfig::resolve("riemann", sub).unwrap();
        assert_eq!(cfg.f64("u2"), -2.0);
        assert!(cfg.switch("check"));
        let text = format!("{}x,rho\n1,2\n", cfg.header());
        let (cmd, body) = header_of(&text).unwrap();
        assert_eq!(cmd, "riemann");
        let t: toml::Table = body.parse().unwrap();
        assert_eq!(t["riemann"]["u2"].as_float(), Some(-2.0));
        assert_eq!(t["riemann"]["stages"].as_integer(), Some(6));
        assert_eq!(t["riemann"]["flux"].as_str(), Some("identity"));
    }

    #[test]
    fn every_default_is_valid() {
        for (_, _, keys) in COMMANDS {
            for k in keys.iter() {
                validate(k, k.default).unwrap();
            }
        }
    }
}
