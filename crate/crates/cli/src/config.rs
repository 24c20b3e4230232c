//! Run configuration: a flat `key = value` file merged with command-line
//! overrides, validated before any command runs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use centrolab_core::centro::EntryDist;
use centrolab_core::eig::default_max_sweeps;
use centrolab_core::oracle::DEFAULT_BUDGET;
use centrolab_core::poly::Polynomial;
use centrolab_core::variance::{DEFAULT_NODES, DEFAULT_RADIUS};
use centrolab_core::{Error, Result};

pub const KEYS: &[&str] = &[
    "command", "n", "trials", "seed", "f", "dist", "radius", "nodes", "kmax", "threads", "out", "n_list", "k_list",
    "l_list", "budget", "max_sweeps",
];

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Sample,
    Spectrum,
    Clt,
    Moments,
    Oracle,
    Variance,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Spectrum => "spectrum",
            Command::Clt => "clt",
            Command::Moments => "moments",
            Command::Oracle => "oracle",
            Command::Variance => "variance",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "sample" => Command::Sample,
            "spectrum" => Command::Spectrum,
            "clt" => Command::Clt,
            "moments" => Command::Moments,
            "oracle" => Command::Oracle,
            "variance" => Command::Variance,
            other => return Err(Error::Config(format!("unknown command '{other}'"))),
        })
    }
}

/// Raw string settings keyed by normalised name (`-` becomes `_`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

fn normalise_key(key: &str) -> String {
    key.trim().replace('-', "_").to_ascii_lowercase()
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1)))?;
            let key = normalise_key(key);
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(Settings(map))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = normalise_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        self.0.insert(key, value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

pub fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got '{value}'")))
}

pub fn parse_positive(key: &str, value: &str) -> Result<usize> {
    match parse_usize(key, value)? {
        0 => Err(Error::Config(format!("{key} must be positive"))),
        v => Ok(v),
    }
}

pub fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .trim()
        .parse::<u64>()
        .map_err(|_| Error::Config(format!("{key}: expected an unsigned 64-bit integer, got '{value}'")))
}

pub fn parse_f64(key: &str, value: &str) -> Result<f64> {
    match value.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Config(format!("{key}: expected a finite number, got '{value}'"))),
    }
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|t| parse_positive(key, t)).collect()
}

pub fn parse_polynomial(value: &str) -> Result<Polynomial> {
    value.parse::<Polynomial>().map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("f: {msg}")),
        other => other,
    })
}

/// Fully validated settings for one command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub f: Option<Polynomial>,
    pub dist: EntryDist,
    pub radius: f64,
    pub nodes: usize,
    pub kmax: usize,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub n_list: Vec<usize>,
    pub k_list: Vec<usize>,
    pub l_list: Vec<usize>,
    pub budget: u128,
    pub max_sweeps: usize,
}

impl RunConfig {
    /// Validates `settings` for `command`. `full_scale` switches CLT runs to
    /// `n = 4000`, 750 trials unless those keys are given explicitly.
    pub fn from_settings(command: Command, settings: &Settings, full_scale: bool) -> Result<Self> {
        if let Some(c) = settings.get("command") {
            let in_file: Command = c.parse()?;
            if in_file != command {
                return Err(Error::Config(format!("config is for '{in_file}' but '{command}' was requested")));
            }
        }
        let get = |key: &str| settings.get(key);

        let (default_n, default_trials) = match (command, full_scale) {
            (Command::Clt, true) => (4000, 750),
            (Command::Clt, false) => (1000, 750),
            (Command::Moments, _) => (1000, 2000),
            _ => (1000, 750),
        };
        let n = get("n").map(|v| parse_positive("n", v)).transpose()?.unwrap_or(default_n);
        let trials = get("trials").map(|v| parse_usize("trials", v)).transpose()?.unwrap_or(default_trials);
        if command == Command::Clt && trials < 2 {
            return Err(Error::Config(format!("trials must be at least 2 for clt, got {trials}")));
        }
        if command == Command::Moments && trials < 2 {
            return Err(Error::Config(format!("trials must be at least 2 for moments, got {trials}")));
        }
        let seed = get("seed").map(|v| parse_u64("seed", v)).transpose()?.unwrap_or(DEFAULT_SEED);
        let f = get("f").map(parse_polynomial).transpose()?;
        if matches!(command, Command::Clt | Command::Variance) && f.is_none() {
            return Err(Error::Config(format!("'{command}' needs a test function, e.g. --f \"0,0,1,0,0,4\"")));
        }
        let dist = get("dist").map(str::parse::<EntryDist>).transpose()?.unwrap_or(EntryDist::Gaussian);
        let radius = get("radius").map(|v| parse_f64("radius", v)).transpose()?.unwrap_or(DEFAULT_RADIUS);
        if command == Command::Variance && radius <= 1.0 {
            return Err(Error::Config(format!("radius must exceed 1, got {radius}")));
        }
        let nodes = get("nodes").map(|v| parse_positive("nodes", v)).transpose()?.unwrap_or(DEFAULT_NODES);
        let kmax = get("kmax").map(|v| parse_usize("kmax", v)).transpose()?.unwrap_or(5);
        if command == Command::Moments && kmax < 2 {
            return Err(Error::Config(format!("kmax must be at least 2, got {kmax}")));
        }
        let threads = get("threads").map(|v| parse_positive("threads", v)).transpose()?;
        let out = PathBuf::from(get("out").unwrap_or("."));
        let n_list = match get("n_list") {
            Some(v) => parse_list("n_list", v)?,
            None if get("n").is_some() => vec![n],
            None => vec![2, 3, 4],
        };
        let k_list = get("k_list").map(|v| parse_list("k_list", v)).transpose()?.unwrap_or_else(|| vec![2, 4]);
        let l_list = get("l_list").map(|v| parse_list("l_list", v)).transpose()?.unwrap_or_default();
        if command == Command::Oracle && (n_list.is_empty() || k_list.is_empty()) {
            return Err(Error::Config("oracle needs non-empty n_list and k_list".into()));
        }
        let budget = get("budget")
            .map(|v| {
                v.trim()
                    .parse::<u128>()
                    .map_err(|_| Error::Config(format!("budget: expected an integer, got '{v}'")))
            })
            .transpose()?
            .unwrap_or(DEFAULT_BUDGET);
        let max_sweeps = get("max_sweeps")
            .map(|v| parse_usize("max_sweeps", v))
            .transpose()?
            .unwrap_or_else(|| default_max_sweeps(n));

        Ok(RunConfig {
            command,
            n,
            trials,
            seed,
            f,
            dist,
            radius,
            nodes,
            kmax,
            threads,
            out,
            n_list,
            k_list,
            l_list,
            budget,
            max_sweeps,
        })
    }

    pub fn polynomial(&self) -> Result<&Polynomial> {
        self.f
            .as_ref()
            .ok_or_else(|| Error::Config(format!("'{}' needs a test function", self.command)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_with_comments() {
        let s = Settings::parse("# experiment\nn = 12\n\ndist = uniform # inline\nk-list = 2,4\n").unwrap();
        assert_eq!(s.get("n"), Some("12"));
        assert_eq!(s.get("dist"), Some("uniform"));
        assert_eq!(s.get("k_list"), Some("2,4"));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(Settings::parse("colour = red\n"), Err(Error::Config(_))));
        assert!(matches!(Settings::parse("n = 1\nn = 2\n"), Err(Error::Config(_))));
        assert!(matches!(Settings::parse("just text\n"), Err(Error::Config(_))));
    }

    #[test]
    fn validation() {
        let mut s = Settings::default();
        s.set("n", "0").unwrap();
        assert!(RunConfig::from_settings(Command::Sample, &s, false).is_err());

        let mut s = Settings::default();
        s.set("f", "0,1").unwrap();
        s.set("trials", "1").unwrap();
        assert!(RunConfig::from_settings(Command::Clt, &s, false).is_err());

        let mut s = Settings::default();
        s.set("kmax", "1").unwrap();
        assert!(RunConfig::from_settings(Command::Moments, &s, false).is_err());

        let mut s = Settings::default();
        s.set("f", "0,1").unwrap();
        s.set("radius", "1").unwrap();
        assert!(RunConfig::from_settings(Command::Variance, &s, false).is_err());

        assert!(RunConfig::from_settings(Command::Clt, &Settings::default(), false).is_err());

        let mut s = Settings::default();
        s.set("command", "clt").unwrap();
        assert!(RunConfig::from_settings(Command::Sample, &s, false).is_err());
    }

    #[test]
    fn defaults_and_full_scale() {
        let mut s = Settings::default();
        s.set("f", "0,0,1,0,0,4").unwrap();
        let c = RunConfig::from_settings(Command::Clt, &s, false).unwrap();
        assert_eq!((c.n, c.trials), (1000, 750));
        let c = RunConfig::from_settings(Command::Clt, &s, true).unwrap();
        assert_eq!((c.n, c.trials), (4000, 750));
        let m = RunConfig::from_settings(Command::Moments, &Settings::default(), false).unwrap();
        assert_eq!((m.n, m.trials, m.kmax), (1000, 2000, 5));
        let o = RunConfig::from_settings(Command::Oracle, &Settings::default(), false).unwrap();
        assert_eq!(o.n_list, vec![2, 3, 4]);
        assert_eq!(o.k_list, vec![2, 4]);
        assert!(o.l_list.is_empty());
    }
}
