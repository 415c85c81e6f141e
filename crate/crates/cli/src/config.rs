//! Run configuration: a key-value file (`key = value`, `#` comments) or JSON.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use majorana_core::cauchy::{Bump, EndToEndConfig, MatterMode, SimConfig};
use majorana_core::phase_recovery::UNIT_TOL_ANALYTIC;

/// Everything any command may read from a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub sim: SimConfig,
    /// Recompute the margin from the other fields unless set explicitly.
    pub auto_margin: bool,
    /// Also run the half-resolution companion and report the drift order.
    pub convergence: bool,
    pub stride: usize,
    pub jet_accuracy: usize,
    pub probes: Vec<[f64; 3]>,
    pub unit_tol: f64,
    pub at: f64,
    pub seed: u64,
    pub points: usize,
    pub radius: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sim: SimConfig::default(),
            auto_margin: true,
            convergence: false,
            stride: 1,
            jet_accuracy: 8,
            probes: Vec::new(),
            unit_tol: UNIT_TOL_ANALYTIC,
            at: 0.0,
            seed: 1,
            points: 100,
            radius: 0.5,
        }
    }
}

impl RunConfig {
    /// Defaults for `fourth-deriv`: the reference end-to-end setup.
    pub fn end_to_end_defaults() -> Self {
        let e = EndToEndConfig::reference(64);
        RunConfig {
            sim: e.sim,
            stride: e.stride,
            jet_accuracy: e.jet_accuracy,
            probes: e.probes,
            unit_tol: e.unit_tol,
            ..RunConfig::default()
        }
    }

    pub fn simulation(&self) -> SimConfig {
        let mut sim = self.sim.clone();
        if self.auto_margin {
            sim.margin = sim.required_margin();
        }
        sim
    }

    pub fn end_to_end(&self) -> EndToEndConfig {
        EndToEndConfig {
            sim: self.sim.clone(),
            stride: self.stride,
            jet_accuracy: self.jet_accuracy,
            probes: self.probes.clone(),
            at: self.at,
            unit_tol: self.unit_tol,
        }
    }

    pub fn load(path: &Path, base: RunConfig) -> Result<RunConfig> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(&text)
                .with_context(|| format!("parsing JSON config {}", path.display()));
        }
        parse_kv(&text, base).map_err(|e| anyhow!("{}:{e}", path.display()))
    }
}

fn numbers<T: std::str::FromStr>(value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!("`{s}`: {e}")))
        .collect()
}

fn exactly<T: std::str::FromStr + Copy, const N: usize>(value: &str) -> Result<[T; N]>
where
    T::Err: std::fmt::Display,
{
    let v = numbers::<T>(value)?;
    v.as_slice()
        .try_into()
        .map_err(|_| anyhow!("expected {N} numbers, found {}", v.len()))
}

/// One value for all three axes, or three.
fn per_axis<T: std::str::FromStr + Copy>(value: &str) -> Result<[T; 3]>
where
    T::Err: std::fmt::Display,
{
    match numbers::<T>(value)?.as_slice() {
        [a] => Ok([*a; 3]),
        [a, b, c] => Ok([*a, *b, *c]),
        v => bail!("expected 1 or 3 numbers, found {}", v.len()),
    }
}

fn one<T: std::str::FromStr>(value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| anyhow!("`{value}`: {e}"))
}

fn bump(value: &str) -> Result<Bump> {
    let [amp, cx, cy, cz, width] = exactly::<f64, 5>(value)?;
    if !(width > 0.0) {
        bail!("bump width must be positive");
    }
    Ok(Bump {
        amp,
        center: [cx, cy, cz],
        width,
    })
}

#[derive(Debug)]
struct UnknownKey(String);

impl std::fmt::Display for UnknownKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unknown key `{}`", self.0)
    }
}

impl std::error::Error for UnknownKey {}

/// Parses key-value text on top of `base`. Errors carry the line number.
pub fn parse_kv(text: &str, base: RunConfig) -> Result<RunConfig> {
    let mut cfg = base;
    // repeatable keys replace their defaults on first use
    let mut seen: Vec<String> = Vec::new();
    let mut first = |key: &str| {
        let new = !seen.iter().any(|k| k == key);
        if new {
            seen.push(key.to_string());
        }
        new
    };
    let mut width_scale = 1.0;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ln = n + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{ln}: expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let mut apply = |cfg: &mut RunConfig, first: &mut dyn FnMut(&str) -> bool| -> Result<()> {
            let s = &mut cfg.sim;
            match key {
                "lo" => s.lo = per_axis(value)?,
                "hi" => s.hi = per_axis(value)?,
                "cells" => s.cells = per_axis(value)?,
                "dt" => s.dt = one(value)?,
                "steps" => s.steps = one(value)?,
                "m" => s.params.m = one(value)?,
                "e" => s.params.e = one(value)?,
                "accuracy" => s.accuracy = one(value)?,
                "margin" => {
                    s.margin = one(value)?;
                    cfg.auto_margin = false;
                }
                "snapshot_every" => s.snapshot_every = one(value)?,
                "cfl" => s.cfl = one(value)?,
                "blowup" => s.blowup = one(value)?,
                "mode" => {
                    let v = exactly::<f64, 7>(value)?;
                    if first("mode") {
                        s.modes.clear();
                    }
                    s.modes.push(MatterMode {
                        momentum: [v[0], v[1], v[2]],
                        seed: [v[3], v[4], v[5], v[6]],
                    });
                }
                "b1" | "b2" | "b3" | "bdot1" | "bdot2" | "line" => {
                    let slot = match key {
                        "b1" => &mut s.choices.b[0],
                        "b2" => &mut s.choices.b[1],
                        "b3" => &mut s.choices.b[2],
                        "bdot1" => &mut s.choices.bdot[0],
                        "bdot2" => &mut s.choices.bdot[1],
                        _ => &mut s.choices.bdot3_line,
                    };
                    if first(key) {
                        slot.clear();
                    }
                    if value != "none" {
                        slot.push(bump(value)?);
                    }
                }
                "width_scale" => width_scale = one(value)?,
                "convergence" => cfg.convergence = one(value)?,
                "stride" => cfg.stride = one(value)?,
                "jet_accuracy" => cfg.jet_accuracy = one(value)?,
                "probe" => {
                    if first("probe") {
                        cfg.probes.clear();
                    }
                    cfg.probes.push(exactly::<f64, 3>(value)?);
                }
                "unit_tol" => cfg.unit_tol = one(value)?,
                "at" => cfg.at = one(value)?,
                "seed" => cfg.seed = one(value)?,
                "points" => cfg.points = one(value)?,
                "radius" => cfg.radius = one(value)?,
                _ => return Err(UnknownKey(key.to_string()).into()),
            }
            Ok(())
        };
        apply(&mut cfg, &mut first).map_err(|e| match e.downcast::<UnknownKey>() {
            Ok(u) => anyhow!("{ln}: {u}"),
            Err(e) => anyhow!("{ln}: {key}: {e}"),
        })?;
    }
    if width_scale != 1.0 {
        if !(width_scale > 0.0) {
            bail!("width_scale must be positive");
        }
        cfg.sim.choices = cfg.sim.choices.clone().widened(width_scale);
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scalars_and_axes() {
        let cfg = parse_kv(
            "cells = 8\nlo = -1 -1 -2\ndt = 0.01 # step\n\nsteps = 10\ne = 0\n",
            RunConfig::default(),
        )
        .unwrap();
        assert_eq!(cfg.sim.cells, [8; 3]);
        assert_eq!(cfg.sim.lo, [-1.0, -1.0, -2.0]);
        assert_eq!(cfg.sim.steps, 10);
        assert_eq!(cfg.sim.params.e, 0.0);
        assert!(cfg.auto_margin);
    }

    #[test]
    fn repeated_keys_replace_defaults() {
        let cfg = parse_kv(
            "mode = 0.1 0 0 1 0 0 0\nmode = 0 0.2 0 0 1 0 0\nb1 = none\nprobe = 0 0 0\n",
            RunConfig::default(),
        )
        .unwrap();
        assert_eq!(cfg.sim.modes.len(), 2);
        assert!(cfg.sim.choices.b[0].is_empty());
        assert_eq!(cfg.sim.choices.b[1].len(), 1);
        assert_eq!(cfg.probes, vec![[0.0; 3]]);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_kv("dt = 0.1\nbogus = 3\n", RunConfig::default()).unwrap_err();
        assert_eq!(e.to_string(), "2: unknown key `bogus`");
        let e = parse_kv("lo = 1 2\n", RunConfig::default()).unwrap_err();
        assert!(
            e.to_string().starts_with("1: lo: expected 1 or 3 numbers"),
            "{e}"
        );
        let e = parse_kv("\nsteps\n", RunConfig::default()).unwrap_err();
        assert!(
            e.to_string().starts_with("2: expected `key = value`"),
            "{e}"
        );
    }
}
