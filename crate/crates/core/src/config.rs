//! Simulation configuration.
//!
//! Every field has a default matching the reference parameter table, so a
//! config file only needs to list what it changes. Keys are the snake_case
//! field names below, both in TOML/JSON files and as `--kebab-case` CLI flags.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::game::LearningParams;
use crate::net::ChannelParams;
use crate::objective::ObjectiveParams;

/// Speed of light in m/s, used to derive the carrier wavelength.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Dca,
    GreedyUnilateral,
    MstCfa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::Dca,
        Algorithm::GreedyUnilateral,
        Algorithm::MstCfa,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Dca => "dca",
            Algorithm::GreedyUnilateral => "greedy-unilateral",
            Algorithm::MstCfa => "mst-cfa",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Dca => "DCA",
            Algorithm::GreedyUnilateral => "GreedyUnilateral",
            Algorithm::MstCfa => "MSTCFA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "dca" => Ok(Algorithm::Dca),
            "greedy-unilateral" | "greedyunilateral" | "rloc" => Ok(Algorithm::GreedyUnilateral),
            "mst-cfa" | "mstcfa" | "m/s/t-cfa" => Ok(Algorithm::MstCfa),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    /// Every node starts as its own cluster.
    None,
    /// Lowest-ID bootstrap clustering on the first slot's graph.
    Cabp,
}

impl InitMode {
    pub fn tag(self) -> &'static str {
        match self {
            InitMode::None => "none",
            InitMode::Cabp => "cabp",
        }
    }
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(InitMode::None),
            "cabp" | "ca-bp" => Ok(InitMode::Cabp),
            _ => Err(Error::Config(format!("unknown init mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    // geometry and population
    pub area_length: f64,
    pub nodes: usize,
    /// Extra node counts to sweep; empty means just `nodes`.
    pub sweep: Vec<usize>,
    pub rsu_fraction: f64,
    pub range_min: f64,
    pub range_max: f64,
    pub rsu_range_factor: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub dt: f64,

    // channel
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub bandwidth_hz: f64,
    pub noise_dbm_per_mhz: f64,
    pub path_loss_exponent: f64,
    pub carrier_hz: f64,
    pub interference: bool,
    pub fading: bool,

    // objective
    pub multihop_loss: f64,
    pub beta: f64,
    pub v_intra: f64,
    pub v_inter: f64,
    pub n_max: usize,
    pub d_max: usize,
    pub zeta: f64,

    // learning
    pub epsilon: f64,
    pub epsilon_decay: f64,
    pub epsilon_floor: f64,

    // experiment
    pub slots: usize,
    pub seed: u64,
    pub runs: usize,
    pub algorithms: Vec<Algorithm>,
    pub inits: Vec<InitMode>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            area_length: 5000.0,
            nodes: 100,
            sweep: Vec::new(),
            rsu_fraction: 0.1,
            range_min: 200.0,
            range_max: 300.0,
            rsu_range_factor: 2.0,
            speed_min: 20.0,
            speed_max: 30.0,
            dt: 1.0,
            tx_power_dbm: 30.0,
            antenna_gain_dbi: 20.0,
            bandwidth_hz: 800e6,
            noise_dbm_per_mhz: -134.0,
            path_loss_exponent: 2.0,
            carrier_hz: 5.9e9,
            interference: false,
            fading: false,
            multihop_loss: 2.0,
            beta: 0.1,
            v_intra: 1.0,
            v_inter: 0.2,
            n_max: 15,
            d_max: 2,
            zeta: 0.5,
            epsilon: 0.1,
            epsilon_decay: 0.98,
            epsilon_floor: 1e-3,
            slots: 500,
            seed: 1,
            runs: 20,
            algorithms: Algorithm::ALL.to_vec(),
            inits: vec![InitMode::None],
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        }
        positive("area_length", self.area_length)?;
        positive("range_min", self.range_min)?;
        positive("range_max", self.range_max)?;
        positive("rsu_range_factor", self.rsu_range_factor)?;
        positive("dt", self.dt)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("path_loss_exponent", self.path_loss_exponent)?;
        positive("carrier_hz", self.carrier_hz)?;
        positive("epsilon", self.epsilon)?;
        positive("epsilon_floor", self.epsilon_floor)?;
        if self.nodes == 0 || self.sweep.contains(&0) {
            return Err(Error::Config("node count must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.rsu_fraction) {
            return Err(Error::Config(format!(
                "rsu_fraction must lie in [0,1], got {}",
                self.rsu_fraction
            )));
        }
        if self.range_min > self.range_max {
            return Err(Error::Config("range_min exceeds range_max".into()));
        }
        if !(self.speed_min >= 0.0
            && self.speed_min <= self.speed_max
            && self.speed_max.is_finite())
        {
            return Err(Error::Config(
                "speeds must satisfy 0 <= speed_min <= speed_max".into(),
            ));
        }
        if !(self.multihop_loss > 1.0) {
            return Err(Error::Config(format!(
                "multihop_loss must exceed 1, got {}",
                self.multihop_loss
            )));
        }
        if !(self.beta >= 0.0 && self.v_intra >= 0.0 && self.v_inter >= 0.0) {
            return Err(Error::Config(
                "beta, v_intra and v_inter must be non-negative".into(),
            ));
        }
        if self.v_intra + self.v_inter <= 0.0 {
            return Err(Error::Config("v_intra + v_inter must be positive".into()));
        }
        if self.n_max == 0 || self.d_max == 0 {
            return Err(Error::Config("n_max and d_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.zeta) {
            return Err(Error::Config(format!(
                "zeta must lie in [0,1], got {}",
                self.zeta
            )));
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            return Err(Error::Config("epsilon_decay must lie in (0,1]".into()));
        }
        if self.slots == 0 || self.runs == 0 {
            return Err(Error::Config("slots and runs must be at least 1".into()));
        }
        if self.algorithms.is_empty() || self.inits.is_empty() {
            return Err(Error::Config(
                "at least one algorithm and one init mode required".into(),
            ));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn channel(&self) -> ChannelParams {
        ChannelParams {
            tx_power_dbm: self.tx_power_dbm,
            antenna_gain_dbi: self.antenna_gain_dbi,
            bandwidth_hz: self.bandwidth_hz,
            noise_dbm_per_mhz: self.noise_dbm_per_mhz,
            path_loss_exponent: self.path_loss_exponent,
            wavelength: self.wavelength(),
            interference: self.interference,
        }
    }

    pub fn objective(&self) -> ObjectiveParams {
        ObjectiveParams {
            zeta: self.zeta,
            beta: self.beta,
            v_intra: self.v_intra,
            v_inter: self.v_inter,
            n_max: self.n_max,
            d_max: self.d_max,
        }
    }

    pub fn learning(&self) -> LearningParams {
        LearningParams {
            epsilon: self.epsilon,
            decay: self.epsilon_decay,
            floor: self.epsilon_floor,
            greedy: false,
        }
    }

    pub fn node_counts(&self) -> Vec<usize> {
        if self.sweep.is_empty() {
            vec![self.nodes]
        } else {
            self.sweep.clone()
        }
    }

    pub fn with_nodes(&self, n: usize) -> Self {
        Self {
            nodes: n,
            ..self.clone()
        }
    }

    /// SHA-256 over the canonical JSON encoding, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Derives an independent 64-bit seed for a named stream (splitmix64 finaliser).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
