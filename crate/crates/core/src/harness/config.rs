//! Experiment configuration: flat `key=value` lines, `#` starts a comment.

use crate::error::{Error, Result};
use crate::fourier::DEFAULT_STEP;
use crate::grid::MAX_M;
use std::fmt;
use std::path::PathBuf;

/// Largest m with δ⁻² ≤ 2²⁸ squares.
pub const SQUARE_CAP_M: u32 = 14;
/// Largest m with n³ ≤ 2³⁰ triple sums.
pub const TRIPLE_CAP_M: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Incidence,
    Heavy,
    Energy,
    Fourier,
    Sumprod,
    Projection,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Incidence,
        Experiment::Heavy,
        Experiment::Energy,
        Experiment::Fourier,
        Experiment::Sumprod,
        Experiment::Projection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Incidence => "incidence",
            Experiment::Heavy => "heavy",
            Experiment::Energy => "energy",
            Experiment::Fourier => "fourier",
            Experiment::Sumprod => "sumprod",
            Experiment::Projection => "projection",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// Constructors this experiment understands; the first is the default.
    pub fn constructors(self) -> &'static [&'static str] {
        match self {
            Experiment::Incidence => &["bush", "layered", "cantor"],
            Experiment::Heavy => &["bush"],
            Experiment::Energy => &["cantor", "random"],
            Experiment::Fourier => &["cantor", "atom"],
            Experiment::Sumprod => &["cantor", "progression", "geometric"],
            Experiment::Projection => &["cantor"],
        }
    }

    fn cap(self) -> u32 {
        match self {
            Experiment::Energy => TRIPLE_CAP_M,
            _ => SQUARE_CAP_M,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Scale exponents, strictly increasing, already cut to the resource cap.
    pub ladder: Vec<u32>,
    /// Ladder points dropped by the cap.
    pub truncated: Vec<u32>,
    pub s: f64,
    /// Offset or fibre exponent; defaults to 1 − s for tube families and s
    /// for projections.
    pub d: Option<f64>,
    /// Direction exponent for projections, ratio content for sum-product.
    pub t: Option<f64>,
    pub constructor: String,
    pub seeds: Vec<u64>,
    /// Layered family constants (powers of two).
    pub k1: u32,
    pub k2: u32,
    /// Points per set for random energy instances.
    pub count: usize,
    pub c_tol: i64,
    pub eps: f64,
    pub radii: Vec<f64>,
    pub step: f64,
    /// Slope of the reference line in plots; each experiment has a default.
    pub theory_exponent: Option<f64>,
    pub out: Option<PathBuf>,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn list<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|x| x.trim().parse().map_err(|_| err(line, format!("{key}: `{x}` does not parse"))))
        .collect()
}

fn one<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.parse().map_err(|_| err(line, format!("{key}: `{v}` does not parse")))
}

fn exponent(v: f64, line: usize, key: &str, hi: f64) -> Result<f64> {
    if !(0.0..=hi).contains(&v) {
        return Err(err(line, format!("{key} = {v} outside [0, {hi}]")));
    }
    Ok(v)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut experiment = None;
        let mut ladder: Option<Vec<u32>> = None;
        let mut c = ExperimentConfig {
            experiment: Experiment::Incidence,
            ladder: Vec::new(),
            truncated: Vec::new(),
            s: 0.5,
            d: None,
            t: None,
            constructor: String::new(),
            seeds: vec![0],
            k1: 2,
            k2: 4,
            count: 8,
            c_tol: 2,
            eps: 0.1,
            radii: vec![64.0, 128.0, 256.0, 512.0],
            step: DEFAULT_STEP,
            theory_exponent: None,
            out: None,
        };
        let mut constructor = None;
        let mut seen: Vec<String> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, v) = line
                .split_once('=')
                .ok_or_else(|| err(ln, format!("`{line}` is not key=value")))?;
            let (key, v) = (key.trim(), v.trim());
            if seen.iter().any(|s| s == key) {
                return Err(err(ln, format!("key `{key}` repeated")));
            }
            seen.push(key.to_string());
            match key {
                "experiment" => {
                    experiment = Some(Experiment::parse(v).ok_or_else(|| err(ln, format!("unknown experiment `{v}`")))?)
                }
                "ladder" => ladder = Some(list(v, ln, key)?),
                "s" => c.s = exponent(one(v, ln, key)?, ln, key, 1.0)?,
                "d" => c.d = Some(exponent(one(v, ln, key)?, ln, key, 1.0)?),
                "t" => c.t = Some(exponent(one(v, ln, key)?, ln, key, 2.0)?),
                "constructor" => constructor = Some((v.to_string(), ln)),
                "seeds" => {
                    c.seeds = list(v, ln, key)?;
                    if c.seeds.is_empty() {
                        return Err(err(ln, "seeds: empty list"));
                    }
                }
                "k1" | "k2" => {
                    let x: u32 = one(v, ln, key)?;
                    if !x.is_power_of_two() {
                        return Err(err(ln, format!("{key} = {x} is not a power of two")));
                    }
                    if key == "k1" {
                        c.k1 = x;
                    } else {
                        c.k2 = x;
                    }
                }
                "count" => {
                    c.count = one(v, ln, key)?;
                    if c.count == 0 {
                        return Err(err(ln, "count must be positive"));
                    }
                }
                "c_tol" => {
                    c.c_tol = one(v, ln, key)?;
                    if c.c_tol < 1 {
                        return Err(err(ln, "c_tol must be at least 1"));
                    }
                }
                "eps" => {
                    c.eps = one(v, ln, key)?;
                    if !(c.eps > 0.0 && c.eps < 0.5) {
                        return Err(err(ln, format!("eps = {} outside (0, 1/2)", c.eps)));
                    }
                }
                "radii" => {
                    c.radii = list(v, ln, key)?;
                    if c.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                        return Err(err(ln, "radii must be positive"));
                    }
                }
                "step" => {
                    c.step = one(v, ln, key)?;
                    if !(c.step > 0.0 && c.step.is_finite()) {
                        return Err(err(ln, "step must be positive"));
                    }
                }
                "theory_exponent" => {
                    let x: f64 = one(v, ln, key)?;
                    if !x.is_finite() {
                        return Err(err(ln, "theory_exponent must be finite"));
                    }
                    c.theory_exponent = Some(x);
                }
                "out" => c.out = Some(PathBuf::from(v)),
                _ => return Err(err(ln, format!("unknown key `{key}`"))),
            }
        }
        c.experiment = experiment.ok_or_else(|| Error::Precondition("missing key `experiment`".into()))?;
        let ladder = ladder.ok_or_else(|| Error::Precondition("missing key `ladder`".into()))?;
        if ladder.is_empty() {
            return Err(Error::Precondition("empty scale ladder".into()));
        }
        if ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("scale ladder must be strictly increasing".into()));
        }
        if ladder[0] == 0 || *ladder.last().unwrap() > MAX_M {
            return Err(Error::Precondition(format!("ladder must lie in 1..={MAX_M}")));
        }
        let cap = c.experiment.cap();
        let (kept, cut): (Vec<u32>, Vec<u32>) = ladder.into_iter().partition(|&m| m <= cap);
        if kept.is_empty() {
            return Err(Error::Precondition(format!("every ladder point exceeds the cap m ≤ {cap}")));
        }
        c.ladder = kept;
        c.truncated = cut;
        let names = c.experiment.constructors();
        c.constructor = match constructor {
            None => names[0].to_string(),
            Some((name, ln)) => {
                if !names.contains(&name.as_str()) {
                    return Err(err(
                        ln,
                        format!("constructor `{name}` not available for {} (one of {})", c.experiment, names.join(", ")),
                    ));
                }
                name
            }
        };
        if c.experiment == Experiment::Fourier && (c.radii.len() < 4 || c.radii.windows(2).any(|w| w[0] >= w[1])) {
            return Err(Error::Precondition("fourier needs at least 4 increasing radii".into()));
        }
        Ok(c)
    }

    pub fn from_file(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::parse(&text)?)
    }
}
