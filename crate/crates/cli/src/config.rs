use clap::{Args, Parser, ValueEnum};
use darboux_core::diffop::special_tau1_prime;
use darboux_core::soliton::{validate_spec, SolitonSpec, ValidatedSpec};
use darboux_core::susy::ExtendedSystem;
use darboux_core::verify::{Canonical, DEFAULT_SEED};
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::path::{Path, PathBuf};

/// Tolerance for calling two kappas equal when classifying a pair.
pub const KAPPA_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or spec parameters (exit 2).
    Config { invariant: String, message: String },
    /// A check ran and failed (exit 3); the report has been written.
    Failed,
}

impl CliError {
    pub fn config(invariant: &str, message: impl Into<String>) -> Self {
        CliError::Config { invariant: invariant.into(), message: message.into() }
    }

    /// Names the error after its enum variant, e.g. `OrderingViolation`.
    pub fn from_variant<E: Debug + std::fmt::Display>(e: &E) -> Self {
        let dbg = format!("{e:?}");
        let name = dbg.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or("Error");
        CliError::config(name, e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Build,
    Verify,
    Susy,
    Spectrum,
    Scatter,
    Pauli,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::Verify => "verify",
            Command::Susy => "susy",
            Command::Spectrum => "spectrum",
            Command::Scatter => "scatter",
            Command::Pauli => "pauli",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "darboux-lab", version, about = "Reflectionless potentials, their extended systems and numerical checks")]
pub struct Cli {
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Default)]
pub struct Opts {
    /// Key=value file read before the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub kappa: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub tau: Option<Vec<f64>>,
    /// Kappas of the lower block.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub kappa2: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub tau2: Option<Vec<f64>>,
    /// Identity ids to verify (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub id: Vec<String>,
    #[arg(long)]
    pub all: bool,
    /// Class filter for `verify`, e.g. complete-break or exact-generic.
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Grid points: CSV samples for build/pauli, finite-difference points for spectrum.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; without it reports go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
    /// Momenta for scatter and build, transverse momentum for pauli.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<f64>>,
    /// Gyromagnetic ratio for pauli: a number or `gn` for sqrt(2n(n+1)).
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<f64>,
}

/// Everything a command needs, after merging the config file under the flags.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub kappa: Option<Vec<f64>>,
    pub tau: Option<Vec<f64>>,
    pub kappa2: Option<Vec<f64>>,
    pub tau2: Option<Vec<f64>>,
    pub ids: Vec<String>,
    pub all: bool,
    pub class: Option<String>,
    pub preset: Option<String>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub timestamp: bool,
    pub k: Option<Vec<f64>>,
    pub g: Option<String>,
    pub c0: Option<f64>,
}

fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config("ConfigFile", format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config("ConfigFile", format!("line {}: expected key = value", no + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::config("ConfigFile", format!("bad value for {key}: {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_value(key, s.trim())).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::config("ConfigFile", format!("bad value for {key}: {v:?}"))),
    }
}

impl RunConfig {
    pub fn from_opts(o: Opts) -> Result<Self, CliError> {
        let mut cfg = RunConfig {
            n: o.n,
            kappa: o.kappa,
            tau: o.tau,
            kappa2: o.kappa2,
            tau2: o.tau2,
            ids: o.id,
            all: o.all,
            class: o.class,
            preset: o.preset,
            tol: o.tol,
            grid: o.grid,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            out: o.out,
            timestamp: !o.no_timestamp,
            k: o.k,
            g: o.g,
            c0: o.c0,
        };
        let Some(path) = o.config else { return Ok(cfg) };
        for (key, v) in parse_file(&path)? {
            let v = v.as_str();
            match key.as_str() {
                "n" => _ = cfg.n.get_or_insert(parse_value(&key, v)?),
                "kappa" => _ = cfg.kappa.get_or_insert(parse_list(&key, v)?),
                "tau" => _ = cfg.tau.get_or_insert(parse_list(&key, v)?),
                "kappa2" => _ = cfg.kappa2.get_or_insert(parse_list(&key, v)?),
                "tau2" => _ = cfg.tau2.get_or_insert(parse_list(&key, v)?),
                "k" => _ = cfg.k.get_or_insert(parse_list(&key, v)?),
                "id" => {
                    if cfg.ids.is_empty() {
                        cfg.ids = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                    }
                }
                "all" => cfg.all |= parse_bool(&key, v)?,
                "class" => _ = cfg.class.get_or_insert(v.to_string()),
                "preset" => _ = cfg.preset.get_or_insert(v.to_string()),
                "tol" => _ = cfg.tol.get_or_insert(parse_value(&key, v)?),
                "grid" => _ = cfg.grid.get_or_insert(parse_value(&key, v)?),
                "seed" => {
                    if o.seed.is_none() {
                        cfg.seed = parse_value(&key, v)?;
                    }
                }
                "out" => _ = cfg.out.get_or_insert(PathBuf::from(v)),
                "no_timestamp" => {
                    if parse_bool(&key, v)? {
                        cfg.timestamp = false;
                    }
                }
                "g" => _ = cfg.g.get_or_insert(v.to_string()),
                "c0" => _ = cfg.c0.get_or_insert(parse_value(&key, v)?),
                _ => return Err(CliError::config("ConfigFile", format!("unknown key {key:?}"))),
            }
        }
        Ok(cfg)
    }

    /// True when the command line or file names a system explicitly.
    pub fn has_system(&self) -> bool {
        self.preset.is_some() || self.kappa.is_some() || self.kappa2.is_some() || self.tau2.is_some()
    }

    fn broadcast(&self, v: &Option<Vec<f64>>, n: usize, default: f64) -> Vec<f64> {
        match v {
            None => vec![default; n],
            Some(v) if v.len() == 1 && n > 1 => vec![v[0]; n],
            Some(v) => v.clone(),
        }
    }

    fn preset_specs(&self, name: &str) -> Result<(SolitonSpec, SolitonSpec), CliError> {
        let canon = match name {
            "self-iso-pt" | "pt" => {
                let n = self.n.unwrap_or(2);
                let base = self.kappa.as_ref().and_then(|k| k.first().copied()).unwrap_or(1.0);
                let kap: Vec<f64> = (1..=n).map(|j| j as f64 * base).collect();
                let (t, tp) = (self.broadcast(&self.tau, n, 0.2), self.broadcast(&self.tau2, n, -0.4));
                return Ok((SolitonSpec::new(&kap, &t), SolitonSpec::new(&kap, &tp)));
            }
            "special-n2" => {
                let tp2 = self.tau2.as_ref().and_then(|t| t.last().copied()).unwrap_or(0.7);
                let t1 = special_tau1_prime(1.0, 2.0, 0.0, 0.0, tp2);
                return Ok((SolitonSpec::new(&[1.0, 2.0], &[0.0, 0.0]), SolitonSpec::new(&[1.0, 2.0], &[t1, tp2])));
            }
            "break1" => Canonical::Break1,
            "break2" => Canonical::Break2,
            "break3" => Canonical::Break3,
            "one-break" => Canonical::OneBreak,
            "one-self-iso" => Canonical::OneSelfIso,
            "two-break" => Canonical::TwoBreak,
            "common-shift" => Canonical::CommonShift,
            "common-virtual" => Canonical::CommonVirtual,
            "two-exact" => Canonical::TwoExact,
            "three-exact" => Canonical::ThreeExact,
            _ => return Err(CliError::config("UnknownPreset", format!("unknown preset {name:?}"))),
        };
        let (mut u, mut l) = canon.specs().expect("system presets have specs");
        if let Some(k) = &self.kappa {
            u.kappas = k.clone();
        }
        if let Some(t) = &self.tau {
            u.taus = t.clone();
        }
        if let Some(k) = &self.kappa2 {
            l.kappas = k.clone();
        }
        if let Some(t) = &self.tau2 {
            l.taus = t.clone();
        }
        Ok((u, l))
    }

    /// Upper spec and, when one is given, the lower one.
    pub fn specs(&self) -> Result<(SolitonSpec, Option<SolitonSpec>), CliError> {
        if let Some(p) = &self.preset {
            let (u, l) = self.preset_specs(p)?;
            return Ok((u, Some(l)));
        }
        let kappas = match (&self.kappa, self.n) {
            (Some(k), Some(n)) if k.len() != n => {
                return Err(CliError::config("LengthMismatch", format!("n = {n} but {} kappas", k.len())));
            }
            (Some(k), _) => k.clone(),
            (None, Some(n)) => (1..=n).map(|j| j as f64).collect(),
            (None, None) => return Err(CliError::config("MissingSpec", "give --n, --kappa or --preset")),
        };
        let taus = self.broadcast(&self.tau, kappas.len(), 0.0);
        let upper = SolitonSpec::new(&kappas, &taus);
        let lower = match (&self.kappa2, &self.tau2) {
            (None, None) => None,
            (k2, t2) => {
                let k2 = k2.clone().unwrap_or_else(|| kappas.clone());
                let t2 = self.broadcast(t2, k2.len(), 0.0);
                Some(SolitonSpec::new(&k2, &t2))
            }
        };
        Ok((upper, lower))
    }

    pub fn upper(&self) -> Result<ValidatedSpec, CliError> {
        validate_spec(&self.specs()?.0).map_err(|e| CliError::from_variant(&e))
    }

    pub fn system(&self) -> Result<ExtendedSystem, CliError> {
        let (u, l) = self.specs()?;
        let l = l.ok_or_else(|| CliError::config("MissingLowerSpec", "give --kappa2/--tau2 or a two-block --preset"))?;
        let u = validate_spec(&u).map_err(|e| CliError::from_variant(&e))?;
        let l = validate_spec(&l).map_err(|e| CliError::from_variant(&e))?;
        ExtendedSystem::new(&u, &l, KAPPA_TOL).map_err(|e| CliError::from_variant(&e))
    }
}
