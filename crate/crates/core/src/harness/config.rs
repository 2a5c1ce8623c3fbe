use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fan::{admissible_angle_range, ImaginaryGeometryParams};

/// The experiments `run_experiment` can dispatch to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    BesselCheck,
    Drive,
    Trace,
    Gff,
    Fan,
    Components,
    Connectivity,
    Recover,
    Dims,
    ExitSides,
    DeltaClose,
    Reversal,
    Coverage,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::BesselCheck,
        Experiment::Drive,
        Experiment::Trace,
        Experiment::Gff,
        Experiment::Fan,
        Experiment::Components,
        Experiment::Connectivity,
        Experiment::Recover,
        Experiment::Dims,
        Experiment::ExitSides,
        Experiment::DeltaClose,
        Experiment::Reversal,
        Experiment::Coverage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::BesselCheck => "bessel-check",
            Experiment::Drive => "drive",
            Experiment::Trace => "trace",
            Experiment::Gff => "gff",
            Experiment::Fan => "fan",
            Experiment::Components => "components",
            Experiment::Connectivity => "connectivity",
            Experiment::Recover => "recover",
            Experiment::Dims => "dims",
            Experiment::ExitSides => "exit-sides",
            Experiment::DeltaClose => "delta-close",
            Experiment::Reversal => "reversal",
            Experiment::Coverage => "coverage",
        }
    }

    /// Experiments that simulate a fan on the lattice.
    pub fn uses_fan(self) -> bool {
        matches!(
            self,
            Experiment::Fan
                | Experiment::Components
                | Experiment::Connectivity
                | Experiment::Recover
                | Experiment::Dims
                | Experiment::DeltaClose
                | Experiment::Reversal
        )
    }

    /// Experiment-specific knobs and their defaults.
    pub fn default_knobs(self) -> BTreeMap<String, Knob> {
        use Knob::{List, Num};
        let list: &[(&str, Knob)] = match self {
            Experiment::BesselCheck => &[("delta", Num(1.0)), ("t", Num(1.0)), ("y0", Num(0.0)), ("paths", Num(1000.0))],
            Experiment::Drive => &[("rho", Num(-0.5)), ("t_end", Num(1.0))],
            Experiment::Trace => &[("rho", Num(0.0)), ("t_end", Num(1.0))],
            Experiment::Gff => &[],
            Experiment::Fan | Experiment::Components | Experiment::Connectivity | Experiment::Reversal => {
                &[("theta1", Num(-1.0)), ("theta2", Num(1.0))]
            }
            Experiment::Recover => &[("theta1", Num(-1.0)), ("theta2", Num(1.0)), ("tolerance_px", Num(4.0))],
            Experiment::Dims => &[
                ("theta1", Num(-1.0)),
                ("theta2", Num(1.0)),
                ("sle_kappa", Num(2.0)),
                ("sle_t_end", Num(1.0)),
                ("scales", Num(7.0)),
            ],
            Experiment::ExitSides => &[
                ("rho", List(vec![-1.0, -1.5, -1.9, -1.99])),
                ("epsilon", Num(0.2)),
                ("t_max", Num(1.0)),
            ],
            Experiment::DeltaClose => &[("theta", Num(0.05)), ("delta_px", Num(4.0))],
            Experiment::Coverage => &[
                ("rho2", List(vec![-1.0, -1.5, -1.9])),
                ("r", Num(1.0)),
                ("delta0", Num(0.1)),
                ("t_end", Num(1.0)),
            ],
        };
        list.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| {
            let known: Vec<&str> = Experiment::ALL.iter().map(|e| e.as_str()).collect();
            Error::Config(format!("unknown experiment `{s}`; expected one of: {}", known.join(", ")))
        })
    }
}

/// An experiment knob: a number or a list of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Knob {
    Num(f64),
    List(Vec<f64>),
}

/// Everything a run depends on. Defaults are per experiment; a JSON file
/// and `key=value` overrides are layered on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub kappa: f64,
    /// Boundary data left and right of the origin; `null` means `λ`.
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub n_angles: usize,
    pub n_seeds: usize,
    pub base_seed: u64,
    /// Seeds (from index 0) that also write image or array side files.
    pub artifact_seeds: usize,
    pub out_dir: Option<String>,
    pub knobs: BTreeMap<String, Knob>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (kappa, n, dt, n_seeds) = match experiment {
            Experiment::BesselCheck => (2.0, 64, 1e-3, 10),
            Experiment::Drive => (2.0, 64, 1e-3, 500),
            Experiment::Trace => (2.0, 64, 1e-3, 4),
            Experiment::Gff => (1.0, 256, 1e-3, 4),
            Experiment::Fan | Experiment::Components => (1.0, 512, 1e-3, 4),
            Experiment::Connectivity | Experiment::Recover => (1.0, 512, 1e-3, 20),
            Experiment::Dims => (1.0, 512, 1e-4, 10),
            Experiment::ExitSides => (2.0, 64, 1e-4, 500),
            Experiment::DeltaClose => (1.0, 256, 1e-3, 20),
            Experiment::Reversal => (1.0, 256, 1e-3, 50),
            Experiment::Coverage => (2.0, 64, 1e-3, 20),
        };
        Self {
            experiment,
            kappa,
            a: None,
            b: None,
            nx: n,
            ny: n,
            dt,
            n_angles: 9,
            n_seeds,
            base_seed: 1,
            artifact_seeds: 1,
            out_dir: None,
            knobs: experiment.default_knobs(),
        }
    }

    /// Defaults for the experiment named in `json` (or `fallback`), with
    /// the fields present in `json` laid over them.
    pub fn from_json(json: &str, fallback: Option<Experiment>) -> Result<Self> {
        let v: Value = serde_json::from_str(json).map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?;
        let Value::Object(obj) = v else {
            return Err(Error::Config("config must be a JSON object".into()));
        };
        let named = match obj.get("experiment") {
            Some(Value::String(s)) => Some(s.parse::<Experiment>()?),
            Some(other) => return Err(Error::Config(format!("`experiment` must be a string, got {other}"))),
            None => None,
        };
        let experiment = match (named, fallback) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config file is for `{a}` but the `{b}` experiment was requested")))
            }
            (Some(e), _) | (None, Some(e)) => e,
            (None, None) => return Err(Error::Config("config does not name an experiment".into())),
        };
        let mut cfg = Self::defaults(experiment);
        for (k, v) in obj {
            cfg.set_value(&k, v)?;
        }
        Ok(cfg)
    }

    /// Applies a `key=value` override. Keys are config fields or knob names
    /// (optionally written `knobs.name`); values are JSON, or bare strings.
    pub fn apply_set(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not of the form key=value")))?;
        let (key, raw) = (key.trim(), raw.trim());
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        self.set_value(key, value)
    }

    fn set_value(&mut self, key: &str, value: Value) -> Result<()> {
        if key == "knobs" {
            let Value::Object(map) = value else {
                return Err(Error::Config("`knobs` must be an object".into()));
            };
            for (k, v) in map {
                self.set_knob(&k, v)?;
            }
            return Ok(());
        }
        if let Some(name) = key.strip_prefix("knobs.") {
            return self.set_knob(name, value);
        }
        if key == "experiment" {
            let e = match &value {
                Value::String(s) => s.parse::<Experiment>()?,
                _ => return Err(Error::Config("`experiment` must be a string".into())),
            };
            if e != self.experiment {
                return Err(Error::Config(format!("cannot change the experiment from `{}` to `{e}`", self.experiment)));
            }
            return Ok(());
        }
        let mut obj = match serde_json::to_value(&*self)? {
            Value::Object(o) => o,
            _ => unreachable!("config serializes to an object"),
        };
        if !obj.contains_key(key) {
            if self.knobs.contains_key(key) {
                return self.set_knob(key, value);
            }
            return Err(Error::Config(format!(
                "unknown setting `{key}` for `{}`; fields: {}; knobs: {}",
                self.experiment,
                obj.keys().filter(|k| *k != "knobs").cloned().collect::<Vec<_>>().join(", "),
                self.knob_names()
            )));
        }
        obj.insert(key.to_string(), value);
        *self = serde_json::from_value(Value::Object(obj)).map_err(|e| Error::Config(format!("bad value for `{key}`: {e}")))?;
        Ok(())
    }

    fn knob_names(&self) -> String {
        let names: Vec<String> = self.experiment.default_knobs().into_keys().collect();
        if names.is_empty() {
            "none".into()
        } else {
            names.join(", ")
        }
    }

    fn set_knob(&mut self, name: &str, value: Value) -> Result<()> {
        let defaults = self.experiment.default_knobs();
        let Some(default) = defaults.get(name) else {
            return Err(Error::Config(format!(
                "`{name}` is not a knob of `{}`; knobs: {}",
                self.experiment,
                self.knob_names()
            )));
        };
        let knob: Knob = serde_json::from_value(value.clone())
            .map_err(|_| Error::Config(format!("knob `{name}` must be a number or a list of numbers, got {value}")))?;
        let knob = match (default, knob) {
            (Knob::List(_), Knob::Num(x)) => Knob::List(vec![x]),
            (Knob::Num(_), Knob::List(_)) => {
                return Err(Error::Config(format!("knob `{name}` takes a single number")));
            }
            (_, k) => k,
        };
        self.knobs.insert(name.to_string(), knob);
        Ok(())
    }

    pub fn num(&self, name: &str) -> Result<f64> {
        match self.knobs.get(name) {
            Some(Knob::Num(x)) => Ok(*x),
            _ => Err(Error::Config(format!("knob `{name}` is missing or not a number"))),
        }
    }

    pub fn list(&self, name: &str) -> Result<Vec<f64>> {
        match self.knobs.get(name) {
            Some(Knob::List(v)) => Ok(v.clone()),
            Some(Knob::Num(x)) => Ok(vec![*x]),
            None => Err(Error::Config(format!("knob `{name}` is missing"))),
        }
    }

    /// A knob that must be a positive whole number.
    pub fn count(&self, name: &str) -> Result<usize> {
        let x = self.num(name)?;
        if x >= 1.0 && x.fract() == 0.0 && x < 1e12 {
            Ok(x as usize)
        } else {
            Err(Error::Config(format!("knob `{name}` must be a positive integer, got {x}")))
        }
    }

    pub fn params(&self) -> Result<ImaginaryGeometryParams> {
        let p = ImaginaryGeometryParams::symmetric(self.kappa).map_err(config_err)?;
        ImaginaryGeometryParams::new(self.kappa, self.a.unwrap_or(p.lambda), self.b.unwrap_or(p.lambda)).map_err(config_err)
    }

    /// Checks every field and knob the experiment uses.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.dt > 0.0 && self.dt < 1.0) {
            return bad(format!("dt must lie in (0, 1), got {}", self.dt));
        }
        if self.nx < 8 || self.ny < 8 {
            return bad(format!("grid must be at least 8×8, got {}×{}", self.nx, self.ny));
        }
        if self.nx * self.ny > 1 << 24 {
            return bad(format!("grid {}×{} exceeds 2^24 pixels", self.nx, self.ny));
        }
        if self.n_angles < 2 {
            return bad(format!("n_angles must be at least 2, got {}", self.n_angles));
        }
        let defaults = self.experiment.default_knobs();
        for name in self.knobs.keys() {
            if !defaults.contains_key(name) {
                return bad(format!("`{name}` is not a knob of `{}`; knobs: {}", self.experiment, self.knob_names()));
            }
        }
        for (name, k) in &self.knobs {
            let finite = match k {
                Knob::Num(x) => x.is_finite(),
                Knob::List(v) => !v.is_empty() && v.iter().all(|x| x.is_finite()),
            };
            if !finite {
                return bad(format!("knob `{name}` must be finite and nonempty"));
            }
        }
        let positive = |name: &str| -> Result<()> {
            let x = self.num(name)?;
            if x > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("knob `{name}` must be positive, got {x}")))
            }
        };
        match self.experiment {
            Experiment::BesselCheck => {
                positive("delta")?;
                positive("t")?;
                self.count("paths")?;
                if self.num("y0")? < 0.0 {
                    return bad("knob `y0` must be nonnegative".into());
                }
            }
            Experiment::Drive | Experiment::Trace => {
                positive("t_end")?;
                if !(self.num("rho")? > -2.0) {
                    return bad("knob `rho` must exceed -2".into());
                }
            }
            Experiment::Dims => {
                positive("sle_kappa")?;
                positive("sle_t_end")?;
                if self.count("scales")? < 4 {
                    return bad("knob `scales` must be at least 4".into());
                }
            }
            Experiment::ExitSides => {
                let e = self.num("epsilon")?;
                if !(e > 0.0 && e < 1.0) {
                    return bad(format!("knob `epsilon` must lie in (0, 1), got {e}"));
                }
                positive("t_max")?;
                if self.list("rho")?.iter().any(|&r| !(r > -2.0)) {
                    return bad("every `rho` must exceed -2".into());
                }
            }
            Experiment::Coverage => {
                positive("r")?;
                positive("delta0")?;
                positive("t_end")?;
                if self.list("rho2")?.iter().any(|&r| !(r > -2.0 && r < 0.0)) {
                    return bad("every `rho2` must lie in (-2, 0)".into());
                }
                self.params()?;
            }
            Experiment::DeltaClose => {
                positive("delta_px")?;
            }
            Experiment::Recover => {
                positive("tolerance_px")?;
            }
            _ => {}
        }
        if self.experiment.uses_fan() {
            let p = self.params()?;
            if !(self.kappa < 4.0) {
                return bad(format!("fan experiments need kappa in (0, 4), got {}", self.kappa));
            }
            let (lo, hi) = admissible_angle_range(&p).map_err(config_err)?;
            let angles: Vec<f64> = match self.experiment {
                Experiment::DeltaClose => vec![0.0, self.num("theta")?],
                _ => vec![self.num("theta1")?, self.num("theta2")?],
            };
            if angles[0] >= angles[1] {
                return bad(format!("need theta1 < theta2, got {} and {}", angles[0], angles[1]));
            }
            if angles.iter().any(|&t| t <= lo || t >= hi) {
                return bad(format!("angles {angles:?} leave the admissible range ({lo:.6}, {hi:.6})"));
            }
            if self.experiment == Experiment::Reversal && self.nx != self.ny {
                return bad("reversal needs a square grid".into());
            }
        }
        Ok(())
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Parameter(m) | Error::Domain(m) => Error::Config(m),
        other => other,
    }
}
