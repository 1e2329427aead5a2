//! Run configuration: a flat `key = value` file overlaid with command-line
//! overrides. Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use relaxcouple_core::psystem::{CouplingApproach, Experiment, OuttakeSchedule, PSystemModel};

use crate::error::{Result, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Gas pipe with the time-dependent turbine outtake.
    PsystemJump,
    /// Riemann problem across a plain junction (no outtake).
    KirchhoffDemo,
    /// Turbine setup with user-chosen pressure law and initial states.
    Custom,
}

impl FromStr for Scenario {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psystem-jump" => Ok(Scenario::PsystemJump),
            "kirchhoff-demo" => Ok(Scenario::KirchhoffDemo),
            "custom" => Ok(Scenario::Custom),
            other => Err(RunError::Config(format!("unknown scenario `{other}`"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::PsystemJump => "psystem-jump",
            Scenario::KirchhoffDemo => "kirchhoff-demo",
            Scenario::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub approach: u8,
    pub cells: usize,
    pub cfl: f64,
    /// Relaxation rate; zero runs the central scheme.
    pub epsilon: f64,
    pub domain: (f64, f64),
    pub output_times: Vec<f64>,
    pub output_dir: PathBuf,
    pub alpha: f64,
    pub gamma: f64,
    pub rho_max: f64,
    pub left: [f64; 2],
    pub right: [f64; 2],
    /// Mesh sizes of a convergence sweep.
    pub cell_list: Vec<usize>,
}

const KEYS: &[&str] = &[
    "scenario",
    "approach",
    "cells",
    "cfl",
    "epsilon",
    "x_min",
    "x_max",
    "output_times",
    "output_dir",
    "alpha",
    "gamma",
    "rho_max",
    "rho_left",
    "m_left",
    "rho_right",
    "m_right",
    "cell_list",
];

impl RunConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let base = Self {
            scenario,
            approach: 3,
            cells: 1000,
            cfl: 0.49,
            epsilon: 0.0,
            domain: (-200.0, 200.0),
            output_times: Experiment::OUTPUT_TIMES.to_vec(),
            output_dir: PathBuf::from("out"),
            alpha: Experiment::ALPHA,
            gamma: 1.0,
            rho_max: 2.0,
            left: [1.0, 1.0],
            right: [1.0, 1.0],
            cell_list: vec![100, 200, 400, 800, 1600],
        };
        match scenario {
            Scenario::PsystemJump | Scenario::Custom => base,
            Scenario::KirchhoffDemo => Self {
                cells: 200,
                domain: (-1.0, 1.0),
                output_times: vec![0.1, 0.2],
                alpha: 1.0,
                gamma: 2.0,
                rho_max: 2.0,
                left: [1.0, 0.5],
                right: [0.5, 0.0],
                ..base
            },
        }
    }

    /// Builds a configuration from `key = value` pairs; later pairs win.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(RunError::Config(format!("unknown key `{k}`")));
            }
            map.insert(k.as_str(), v.as_str());
        }
        let scenario = map
            .get("scenario")
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(Scenario::PsystemJump);
        let mut c = Self::defaults(scenario);
        for (&key, &value) in &map {
            match key {
                "scenario" => {}
                "approach" => c.approach = parse(key, value)?,
                "cells" => c.cells = parse(key, value)?,
                "cfl" => c.cfl = parse(key, value)?,
                "epsilon" => c.epsilon = parse(key, value)?,
                "x_min" => c.domain.0 = parse(key, value)?,
                "x_max" => c.domain.1 = parse(key, value)?,
                "output_times" => c.output_times = parse_list(key, value)?,
                "output_dir" => c.output_dir = PathBuf::from(value),
                "alpha" => c.alpha = parse(key, value)?,
                "gamma" => c.gamma = parse(key, value)?,
                "rho_max" => c.rho_max = parse(key, value)?,
                "rho_left" => c.left[0] = parse(key, value)?,
                "m_left" => c.left[1] = parse(key, value)?,
                "rho_right" => c.right[0] = parse(key, value)?,
                "m_right" => c.right[1] = parse(key, value)?,
                "cell_list" => c.cell_list = parse_list(key, value)?,
                _ => unreachable!("keys are checked above"),
            }
        }
        if scenario != Scenario::Custom {
            for key in ["alpha", "gamma", "rho_max", "rho_left", "m_left", "rho_right", "m_right"] {
                if map.contains_key(key) {
                    return Err(RunError::Config(format!(
                        "`{key}` is only accepted by the custom scenario"
                    )));
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// Reads `path` (if given) and applies `overrides` on top.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut pairs = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| RunError::io(p, e))?;
                parse_pairs(&text)?
            }
            None => Vec::new(),
        };
        pairs.extend_from_slice(overrides);
        Self::from_pairs(&pairs)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(RunError::Config(m.to_string()));
        if self.cells < 4 || self.cells % 2 != 0 {
            return bad("cells must be even and at least 4");
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad("cfl must lie in (0, 1)");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be finite and non-negative");
        }
        if !(self.domain.0 < 0.0 && self.domain.1 > 0.0) {
            return bad("domain must contain the interface at x = 0");
        }
        if self.output_times.is_empty() {
            return bad("at least one output time is required");
        }
        if self.output_times.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) || self.output_times[0] < 0.0 {
            return bad("output times must be non-negative and strictly increasing");
        }
        if CouplingApproach::from_id(self.approach).is_err() {
            return bad("approach must be 1, 2, 3 or 4");
        }
        Ok(())
    }

    /// The simulation this configuration describes.
    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment_for(self.approach, self.cells)
    }

    pub fn experiment_for(&self, approach: u8, cells: usize) -> Result<Experiment> {
        let mut ex = Experiment::new(approach)?;
        ex.model = PSystemModel::new(self.alpha, self.gamma, self.rho_max)?;
        ex.x_min = self.domain.0;
        ex.x_max = self.domain.1;
        ex.cells = cells;
        ex.cfl = self.cfl;
        ex.epsilon = self.epsilon;
        ex.left = self.left;
        ex.right = self.right;
        ex.output_times = self.output_times.clone();
        if self.scenario == Scenario::KirchhoffDemo {
            // No outtake and approach 3 reduce the coupling to Q_R = Q_L.
            ex.approach = CouplingApproach::from_id(3)?;
            ex.schedule = OuttakeSchedule {
                plateau: 0.0,
                ..OuttakeSchedule::default()
            };
        }
        Ok(ex)
    }
}

/// Splits a config file into `(key, value)` pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split_once('#').map_or(line, |(body, _)| body).trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| RunError::Config(format!("line {}: expected `key = value`", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| RunError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}
