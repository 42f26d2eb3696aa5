//! Run configuration: JSON config file entries, overridden by command-line
//! flags, resolved against the documented defaults.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use qperc_core::coin::CoinParams;
use qperc_core::lattice::{build_spec, EdgeConfig, Geometry, LatticeSpec, Vertex};
use qperc_core::montecarlo::{DEFAULT_GRID_START, DEFAULT_RESOLUTION, DEFAULT_THRESHOLD, DEFAULT_TRIALS};
use qperc_core::walk::{EvolvePolicy, InitialState};

use crate::Command;

/// Config-file schema: every field optional so flags can fill the rest.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub geometry: Option<String>,
    pub size: Option<usize>,
    pub n_x: Option<usize>,
    pub n_y: Option<usize>,
    pub theta: Option<f64>,
    pub theta_random: Option<bool>,
    pub coin_seed: Option<u64>,
    pub r: Option<u32>,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub origin_x: Option<usize>,
    pub origin_y: Option<usize>,
    pub p: Option<f64>,
    pub p_start: Option<f64>,
    pub p_stop: Option<f64>,
    pub p_step: Option<f64>,
    pub trials: Option<u32>,
    pub master_seed: Option<u64>,
    pub max_steps: Option<usize>,
    pub eps_stat: Option<f64>,
    pub threshold: Option<f64>,
    pub pad: Option<usize>,
    pub steps: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
}

/// Fully resolved configuration; echoed in every artifact's provenance.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub geometry: String,
    pub n_x: usize,
    pub n_y: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub theta_random: bool,
    pub coin_seed: u64,
    pub r: u32,
    pub delta: f64,
    pub eta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin_x: Option<usize>,
    pub origin_y: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub p_start: f64,
    pub p_stop: f64,
    pub p_step: f64,
    pub trials: u32,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    pub eps_stat: f64,
    pub threshold: f64,
    pub pad: usize,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

macro_rules! take {
    ($self:ident, $src:expr => $($field:ident),+) => {
        $( if $src.$field.is_some() { $self.$field = $src.$field.clone(); } )+
    };
}

impl PartialConfig {
    /// Flags override file entries.
    pub fn overlay(&mut self, command: &Command) {
        let common = match command {
            Command::Walk(a) => &a.common,
            Command::Zeta(a) | Command::Sweep(a) | Command::Pa(a) | Command::Compare(a) => {
                &a.common
            }
            Command::Analytic(a) => &a.common,
        };
        take!(self, common => geometry, size, coin_seed, r, delta, eta, origin_x, origin_y,
              pad, max_steps, eps_stat, jobs, output, format);
        if common.nx.is_some() {
            self.n_x = common.nx;
        }
        if common.ny.is_some() {
            self.n_y = common.ny;
        }
        if common.seed.is_some() {
            self.master_seed = common.seed;
        }
        if let Some(theta) = common.theta {
            self.theta = Some(theta);
            self.theta_random = Some(false);
        }
        if let Some(deg) = common.theta_deg {
            self.theta = Some(deg.to_radians());
            self.theta_random = Some(false);
        }
        if common.theta_random {
            self.theta_random = Some(true);
        }
        match command {
            Command::Walk(a) => {
                if a.steps.is_some() {
                    self.steps = a.steps;
                }
                if a.p.is_some() {
                    self.p = a.p;
                }
            }
            Command::Zeta(a) | Command::Sweep(a) | Command::Pa(a) | Command::Compare(a) => {
                take!(self, a => p, p_start, p_stop, p_step, trials, threshold);
            }
            Command::Analytic(a) => {
                take!(self, a => p_start, p_stop, p_step, threshold);
            }
        }
    }

    pub fn resolve(self, command: &str) -> Result<RunConfig> {
        let size = self.size.unwrap_or(50);
        let format = self.format.unwrap_or_else(|| "csv".to_string());
        if format != "csv" && format != "json" {
            bail!("format must be csv or json, got {format}");
        }
        let geometry = self.geometry.unwrap_or_else(|| "square".to_string());
        parse_geometry(&geometry)?;
        Ok(RunConfig {
            command: command.to_string(),
            geometry,
            n_x: self.n_x.unwrap_or(size),
            n_y: self.n_y.unwrap_or(size),
            theta: self.theta,
            theta_random: self.theta_random.unwrap_or(false),
            coin_seed: self.coin_seed.unwrap_or(0),
            r: self.r.unwrap_or(1),
            delta: self.delta.unwrap_or(std::f64::consts::FRAC_PI_2),
            eta: self.eta.unwrap_or(std::f64::consts::FRAC_PI_2),
            origin_x: self.origin_x,
            origin_y: self.origin_y.unwrap_or(0),
            p: self.p,
            p_start: self.p_start.unwrap_or(DEFAULT_GRID_START),
            p_stop: self.p_stop.unwrap_or(1.0),
            p_step: self.p_step.unwrap_or(DEFAULT_RESOLUTION),
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            master_seed: self.master_seed.unwrap_or(1),
            max_steps: self.max_steps,
            eps_stat: self.eps_stat.unwrap_or(1e-8),
            threshold: self.threshold.unwrap_or(DEFAULT_THRESHOLD),
            pad: self.pad.unwrap_or(0),
            steps: self.steps.unwrap_or(100),
            output: self.output,
            format,
            jobs: self.jobs,
        })
    }
}

fn parse_geometry(name: &str) -> Result<Geometry> {
    match name {
        "square" => Ok(Geometry::Square),
        "honeycomb" => Ok(Geometry::Honeycomb),
        "nanotube" => Ok(Geometry::Nanotube),
        other => bail!("unknown geometry {other} (square, honeycomb, nanotube)"),
    }
}

impl RunConfig {
    pub fn geometry(&self) -> Result<Geometry> {
        parse_geometry(&self.geometry)
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        Ok(build_spec(self.geometry()?, self.n_x, self.n_y)?)
    }

    pub fn coin_params(&self) -> Result<CoinParams> {
        let base = if self.theta_random {
            CoinParams::random_field(self.coin_seed)
        } else {
            CoinParams::fixed(self.fixed_theta_or_default())?
        };
        Ok(base.with_r(self.r)?)
    }

    pub fn fixed_theta_or_default(&self) -> f64 {
        self.theta.unwrap_or(std::f64::consts::FRAC_PI_4)
    }

    /// Origin in simulated coordinates; user overrides are window-relative.
    pub fn initial_state(&self, edge: &EdgeConfig) -> Result<InitialState> {
        let origin = match self.origin_x {
            Some(x) => Vertex::new(x + edge.pad(), self.origin_y),
            None => Vertex::new(edge.sim_nx() / 2, self.origin_y),
        };
        Ok(InitialState::new(self.delta, self.eta, origin))
    }

    pub fn evolve_policy(&self, edge: &EdgeConfig) -> EvolvePolicy {
        let mut policy = EvolvePolicy::default_for(edge.sim_nx(), edge.sim_ny());
        policy.eps_stat = self.eps_stat;
        if let Some(max_steps) = self.max_steps {
            policy.max_steps = max_steps;
        }
        policy
    }

    pub fn format_json(&self) -> bool {
        self.format == "json"
    }
}
