//! Experiment configuration: an INI-like file of `key = value` lines grouped
//! in sections, overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use hubbard_cd::evolve::Variant;
use hubbard_cd::statevec::{NoiseChannel, NoiseModel};
use hubbard_cd::vqa::AnsatzKind;
use ini::Ini;
use serde::Serialize;

/// Every recognised `section.key`.
pub const KEYS: &[&str] = &[
    "lattice.nx",
    "lattice.ny",
    "lattice.tau",
    "lattice.u",
    "run.algorithm",
    "run.seed",
    "run.out",
    "measure.mode",
    "measure.shots",
    "evolve.T",
    "evolve.N",
    "evolve.dt",
    "evolve.order",
    "vqa.eta",
    "vqa.max_iter",
    "vqa.seeds",
    "vqa.layers",
    "vqa.trajectories",
    "noise.channel",
    "noise.p",
    "sweep.N",
    "sweep.dt",
    "sweep.variants",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Evolve(Variant),
    Vqa(AnsatzKind),
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Evolve(Variant::AdiabaticCd) => f.write_str("evolve:cd"),
            Algorithm::Evolve(v) => write!(f, "evolve:{v}"),
            Algorithm::Vqa(k) => write!(f, "vqa:{k}"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, name) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| anyhow!("algorithm '{s}' is not of the form evolve:<variant> or vqa:<ansatz>"))?;
        match family {
            "evolve" => Ok(Algorithm::Evolve(name.parse()?)),
            "vqa" => Ok(Algorithm::Vqa(name.parse()?)),
            _ => bail!("unknown algorithm family '{family}'"),
        }
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Shots { shots: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub channel: String,
    pub p: f64,
}

/// Fully resolved experiment settings; echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub nx: usize,
    pub ny: usize,
    pub tau: f64,
    pub u: f64,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Where outputs go; not part of the echo, so runs differing only in
    /// location produce identical files.
    #[serde(skip)]
    pub out: PathBuf,
    pub mode: Mode,
    #[serde(rename = "T")]
    pub total_time: f64,
    #[serde(rename = "N")]
    pub steps: usize,
    pub dt: f64,
    pub order: usize,
    pub eta: f64,
    pub max_iter: usize,
    pub seeds: usize,
    pub layers: usize,
    pub trajectories: usize,
    pub noise: Option<NoiseSpec>,
    pub sweep_steps: Vec<usize>,
    pub sweep_dts: Vec<f64>,
    pub sweep_variants: Vec<String>,
}

/// Raw `section.key → value` pairs before typing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).context("config is not valid key = value text")?;
        let mut raw = RawConfig::default();
        for (section, props) in ini.iter() {
            for (k, v) in props.iter() {
                let key = match section {
                    Some(s) => format!("{s}.{k}"),
                    None => k.to_string(),
                };
                raw.set(&key, v)?;
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            bail!("unknown config key '{key}'");
        }
        self.0.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("{key} = {v}: {e}")))
            .transpose()
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn list<T: FromStr>(&self, key: &str, default: &str) -> Result<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        self.0
            .get(key)
            .map_or(default, String::as_str)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|e| anyhow!("{key} entry '{s}': {e}")))
            .collect()
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let algorithm: Algorithm = self.or("run.algorithm", Algorithm::Evolve(Variant::AdiabaticCd))?;
        let mode = match self.or("measure.mode", "exact".to_string())?.as_str() {
            "exact" => Mode::Exact,
            "shots" => Mode::Shots {
                shots: self.or("measure.shots", hubbard_cd::measure::DEFAULT_SHOTS)?,
            },
            other => bail!("measure.mode must be exact or shots, not '{other}'"),
        };
        if let Mode::Shots { shots: 0 } = mode {
            bail!("measure.shots must be positive");
        }
        let (total_time, steps, dt) = resolve_time(
            self.get("evolve.T")?,
            self.get("evolve.N")?,
            self.get("evolve.dt")?,
        )?;
        let noise = match self.or("noise.channel", "none".to_string())?.as_str() {
            "none" => None,
            ch => {
                let channel: NoiseChannel = ch.parse()?;
                let p = self.or("noise.p", 0.01)?;
                NoiseModel::new(channel, p)?;
                Some(NoiseSpec {
                    channel: channel.name().to_string(),
                    p,
                })
            }
        };
        let sweep_variants: Vec<Variant> = self.list("sweep.variants", "adiabatic,adiabatic_cd,cd_only")?;
        let cfg = ExperimentConfig {
            nx: self.or("lattice.nx", 1)?,
            ny: self.or("lattice.ny", 1)?,
            tau: self.or("lattice.tau", 1.0)?,
            u: self.or("lattice.u", 1.5)?,
            algorithm,
            seed: self.or("run.seed", 0)?,
            out: self.or("run.out", PathBuf::from("out"))?,
            mode,
            total_time,
            steps,
            dt,
            order: self.or("evolve.order", 1)?,
            eta: self.or("vqa.eta", hubbard_cd::vqa::DEFAULT_ETA)?,
            max_iter: self.or("vqa.max_iter", hubbard_cd::vqa::DEFAULT_MAX_ITER)?,
            seeds: self.or("vqa.seeds", 10)?,
            layers: self.or("vqa.layers", 1)?,
            trajectories: self.or("vqa.trajectories", hubbard_cd::vqa::DEFAULT_TRAJECTORIES)?,
            noise,
            sweep_steps: self.list("sweep.N", "25,50,100")?,
            sweep_dts: self.list("sweep.dt", "0.02")?,
            sweep_variants: sweep_variants.iter().map(|v| v.name().to_string()).collect(),
        };
        if cfg.seeds == 0 || cfg.layers == 0 {
            bail!("vqa.seeds and vqa.layers must be positive");
        }
        if cfg.noise.is_some() && cfg.trajectories == 0 {
            bail!("vqa.trajectories must be positive under noise");
        }
        Ok(cfg)
    }
}

/// Fills in whichever of `T`, `N`, `δt` is missing; `T = N·δt` must hold
/// when all three are given. Defaults are `T = 1`, `δt = 0.02`.
pub fn resolve_time(t: Option<f64>, n: Option<usize>, dt: Option<f64>) -> Result<(f64, usize, f64)> {
    let steps_for = |t: f64, dt: f64| -> Result<usize> {
        let n = t / dt;
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) || n.round() < 1.0 {
            bail!("T = {t} is not a positive whole number of steps of δt = {dt}");
        }
        Ok(n.round() as usize)
    };
    let (t, n, dt) = match (t, n, dt) {
        (Some(t), Some(n), Some(dt)) => {
            if (t - n as f64 * dt).abs() > 1e-9 * t.abs().max(1.0) {
                bail!("inconsistent evolution settings: T = {t} but N·δt = {}", n as f64 * dt);
            }
            (t, n, dt)
        }
        (Some(t), Some(n), None) => (t, n, t / n as f64),
        (Some(t), None, dt) => {
            let dt = dt.unwrap_or(0.02);
            (t, steps_for(t, dt)?, dt)
        }
        (None, Some(n), dt) => {
            let dt = dt.unwrap_or(0.02);
            (n as f64 * dt, n, dt)
        }
        (None, None, dt) => {
            let dt = dt.unwrap_or(0.02);
            (1.0, steps_for(1.0, dt)?, dt)
        }
    };
    if n == 0 || !(dt > 0.0) || !t.is_finite() {
        bail!("evolution needs N ≥ 1 and δt > 0");
    }
    Ok((t, n, dt))
}

impl ExperimentConfig {
    pub fn noise_model(&self) -> Option<NoiseModel> {
        self.noise.as_ref().map(|n| {
            NoiseModel::new(n.channel.parse().expect("validated"), n.p).expect("validated")
        })
    }

    pub fn variants(&self) -> Vec<Variant> {
        self.sweep_variants.iter().map(|v| v.parse().expect("validated")).collect()
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialises")
    }

    /// Single-line JSON echo for CSV comment headers.
    pub fn echo_line(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_reference_settings() {
        let cfg = RawConfig::default().resolve().unwrap();
        assert_eq!((cfg.nx, cfg.ny, cfg.tau, cfg.u), (1, 1, 1.0, 1.5));
        assert_eq!((cfg.steps, cfg.dt, cfg.eta), (50, 0.02, 0.05));
        assert_eq!(cfg.mode, Mode::Exact);
    }

    #[test]
    fn sections_and_time_resolution() {
        let raw = RawConfig::parse(
            "[lattice]\nnx = 1\nny = 2\n[run]\nalgorithm = vqa:cd\n[evolve]\nT = 2\ndt = 0.05\n[noise]\nchannel = bit_flip\n",
        )
        .unwrap();
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.ny, 2);
        assert_eq!(cfg.algorithm, Algorithm::Vqa(AnsatzKind::CdInspired));
        assert_eq!(cfg.steps, 40);
        assert_eq!(cfg.noise.as_ref().unwrap().p, 0.01);
    }

    #[test]
    fn inconsistent_or_unknown_settings_fail() {
        assert!(resolve_time(Some(1.0), Some(10), Some(0.2)).is_err());
        assert!(resolve_time(Some(1.0), None, Some(0.3)).is_err());
        assert!(RawConfig::parse("[lattice]\nsize = 3\n").is_err());
        let mut raw = RawConfig::default();
        raw.set("measure.mode", "sometimes").unwrap();
        assert!(raw.resolve().is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for s in ["evolve:adiabatic", "evolve:cd", "evolve:cd_only", "vqa:hv", "vqa:cd"] {
            assert_eq!(s.parse::<Algorithm>().unwrap().to_string(), s);
        }
    }
}
