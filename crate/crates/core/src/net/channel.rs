//! LOS channel: path loss, SINR and Shannon link rate.
//!
//! Unit conventions (all converted before combining):
//! - transmit power: `P_W = 10^((P_dBm - 30) / 10)`
//! - antenna gain: `G = 10^(G_dBi / 10)`
//! - noise: `N_W = 10^((N0_dBm/MHz - 30) / 10) * (W / 1e6)`

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::{Node, NodeId};
use crate::config::derive_seed;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub bandwidth_hz: f64,
    pub noise_dbm_per_mhz: f64,
    pub path_loss_exponent: f64,
    pub wavelength: f64,
    pub interference: bool,
}

impl ChannelParams {
    pub fn tx_power_watts(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn antenna_gain(&self) -> f64 {
        10f64.powf(self.antenna_gain_dbi / 10.0)
    }

    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm_per_mhz) * (self.bandwidth_hz / 1e6)
    }

    /// `(lambda / 4 pi)^alpha_L`, the loss of a unit-length link.
    pub fn unit_loss(&self) -> f64 {
        (self.wavelength / (4.0 * PI)).powf(self.path_loss_exponent)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Small-scale power gain `h_{i,j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelGain {
    Unit,
    /// Exponential(1) power gain, drawn statelessly from `(seed, epoch, i, j)`.
    Rayleigh {
        seed: u64,
        epoch: u64,
    },
}

impl ChannelGain {
    pub fn h(&self, i: NodeId, j: NodeId) -> f64 {
        match *self {
            ChannelGain::Unit => 1.0,
            ChannelGain::Rayleigh { seed, epoch } => {
                let pair = ((i as u64) << 32) | j as u64;
                let s = derive_seed(derive_seed(seed, epoch), pair);
                Exp1.sample(&mut ChaCha8Rng::seed_from_u64(s))
            }
        }
    }
}

/// Linear path-loss gain at distance `d`.
pub fn path_loss(d: f64, ch: &ChannelParams) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Config(format!(
            "path loss undefined at distance {d}"
        )));
    }
    Ok(ch.unit_loss() * d.powf(-ch.path_loss_exponent))
}

/// SINR of the link `i -> j`. Interference, when enabled, sums every other
/// transmitter `k` (neither `i` nor the receiver `j`) in ascending id order.
pub fn sinr(
    nodes: &[Node],
    i: NodeId,
    j: NodeId,
    ch: &ChannelParams,
    gain: &ChannelGain,
) -> Result<f64> {
    let d = nodes[i].distance(&nodes[j]);
    if d == 0.0 {
        return Err(Error::Collocated(i, j));
    }
    let pg = ch.tx_power_watts() * ch.antenna_gain();
    let signal = pg * gain.h(i, j) * path_loss(d, ch)?;
    let mut interference = 0.0;
    if ch.interference {
        let mut sum = 0.0;
        for (k, other) in nodes.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            let dk = other.distance(&nodes[j]);
            if dk == 0.0 {
                return Err(Error::Collocated(k, j));
            }
            sum += gain.h(k, j) * dk.powf(-ch.path_loss_exponent);
        }
        interference = pg * ch.unit_loss() * sum;
    }
    Ok(signal / (ch.noise_watts() + interference))
}

/// Shannon rate `W log2(1 + sinr)` in bits/s.
pub fn link_rate(sinr: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr).log2()
}
