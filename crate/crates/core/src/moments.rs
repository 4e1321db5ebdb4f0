//! Mass and energy of the liminf witness set over independent trials.

use alloc::vec::Vec;

use crate::bounds::{critical_c, energy_constant, s_exponent};
use crate::covering::liminf_witness_grid;
use crate::grid::GridCover;
use crate::growth::{c_l, k_mass};
use crate::math;
use crate::stats;
use crate::stream::{substream, SampleStream};
use crate::{Error, Result};

/// Grid mass of the witness set for trial seeds `substream(base_seed, t)`.
#[allow(clippy::too_many_arguments)]
pub fn witness_mass_trials(
    c: f64,
    d: u32,
    theta: f64,
    l: u32,
    q: u32,
    m: u32,
    trials: u64,
    base_seed: u64,
) -> Result<Vec<f64>> {
    (0..trials)
        .map(|t| {
            let s = SampleStream::uniform(substream(base_seed, t), d as usize)?;
            Ok(liminf_witness_grid(&s, c, d, theta, l, q, m)?.fraction())
        })
        .collect()
}

/// Grid estimate of `∬ ‖x - y‖^{-s} dx dy` over the set cells, using
/// cell-centre distances floored at half a cell and excluding self-pairs.
pub fn grid_energy(grid: &GridCover, s: f64) -> f64 {
    let h = 1.0 / grid.side() as f64;
    let cell = math::powi(h, grid.dim() as i32);
    let weight = |dist: f64| math::powf(dist.max(0.5 * h), -s);
    if grid.dim() == 1 && grid.bits() >= 6 {
        return cell * cell * line_energy_sum(grid, &weight);
    }
    let ones: Vec<u64> = grid.ones().collect();
    let d = grid.dim();
    let mut coords = alloc::vec![0u64; ones.len() * d];
    for (slot, &idx) in coords.chunks_exact_mut(d).zip(&ones) {
        grid.coords_of(idx, slot);
    }
    let side = grid.side();
    let mut sum = 0.0;
    for (a, ca) in coords.chunks_exact(d).enumerate() {
        for cb in coords.chunks_exact(d).skip(a + 1) {
            let steps = ca
                .iter()
                .zip(cb)
                .map(|(&x, &y)| {
                    let diff = x.abs_diff(y);
                    diff.min(side - diff)
                })
                .max()
                .unwrap_or(0);
            sum += 2.0 * weight(steps as f64 * h);
        }
    }
    cell * cell * sum
}

// d = 1: ordered pairs at cyclic offset δ are counted by popcount(g & rot(g, δ)).
fn line_energy_sum(grid: &GridCover, weight: &dyn Fn(f64) -> f64) -> f64 {
    let words = grid.words();
    let w = words.len();
    let side = grid.side();
    let h = 1.0 / side as f64;
    let mut sum = 0.0;
    for delta in 1..side {
        let ws = (delta / 64) as usize;
        let bs = (delta % 64) as u32;
        let mut count = 0u64;
        for (i, &a) in words.iter().enumerate() {
            let lo = words[(i + ws) % w];
            let rotated = if bs == 0 {
                lo
            } else {
                (lo >> bs) | (words[(i + ws + 1) % w] << (64 - bs))
            };
            count += (a & rotated).count_ones() as u64;
        }
        if count > 0 {
            sum += count as f64 * weight(delta.min(side - delta) as f64 * h);
        }
    }
    sum
}

/// Mass and energy of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WitnessTrial {
    pub mass: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SecondMomentConfig {
    pub c: f64,
    pub d: u32,
    pub theta: f64,
    pub l: u32,
    pub q: u32,
    pub m: u32,
    pub trials: u64,
    pub s: f64,
    pub base_seed: u64,
}

impl SecondMomentConfig {
    /// Checks `c > critical_c(θ, d)` and `0 < s < d - s(c, θ)`, the
    /// hypotheses under which the energy bound is finite.
    pub fn check(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(Error::invalid("trials", "need at least two trials"));
        }
        crate::covering::check_witness_args(self.c, self.l, self.q)?;
        let cc = critical_c(self.theta, self.d)?;
        if !(self.c > cc) {
            return Err(Error::Precondition(alloc::format!(
                "energy bound needs c > critical_c(theta, d) = {cc}, got c = {}",
                self.c
            )));
        }
        let sc = s_exponent(self.c, self.d, self.theta)?;
        let top = self.d as f64 - sc;
        if !(self.s > 0.0 && self.s < top) {
            return Err(Error::Precondition(alloc::format!(
                "energy bound needs 0 < s < d - s(c, theta) = {top}, got s = {}",
                self.s
            )));
        }
        Ok(())
    }

    /// Seed of trial `t`.
    pub fn trial_seed(&self, t: u64) -> u64 {
        substream(self.base_seed, t)
    }

    pub fn run_trial(&self, t: u64) -> Result<WitnessTrial> {
        let s = SampleStream::uniform(self.trial_seed(t), self.d as usize)?;
        let g = liminf_witness_grid(&s, self.c, self.d, self.theta, self.l, self.q, self.m)?;
        Ok(WitnessTrial {
            mass: g.fraction(),
            energy: grid_energy(&g, self.s),
        })
    }
}

/// Half-width parameter of the mass concentration window `(δK, (2-δ)K)`.
pub const CONCENTRATION_DELTA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SecondMomentReport {
    pub mass_mean: f64,
    pub mass_var: f64,
    pub energy_mean: f64,
    pub bounds_report: MomentBounds,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentBounds {
    pub k_mass: f64,
    /// `mass_mean / K`
    pub mass_ratio: f64,
    /// Empirical `E(mass²)`.
    pub mass_second_moment: f64,
    /// `K² (1 + C_l I_{s(c,θ)})`, the closed-form majorant of `K² ∬ Ψ`.
    pub second_moment_bound: f64,
    pub second_moment_within_bound: bool,
    /// `K² (I_s + C_l I_{s + s(c,θ)})`.
    pub energy_bound: f64,
    pub energy_within_bound: bool,
    pub delta: f64,
    /// Fraction of trials with mass in `(δK, (2-δ)K)`.
    pub fraction_within: f64,
}

impl SecondMomentReport {
    pub fn from_trials(cfg: &SecondMomentConfig, trials: &[WitnessTrial]) -> Result<Self> {
        cfg.check()?;
        let k = k_mass(cfg.theta, cfg.c, cfg.d, cfg.l, cfg.q)?;
        let sc = s_exponent(cfg.c, cfg.d, cfg.theta)?;
        let cl = c_l(cfg.c, cfg.d, cfg.theta, cfg.l)?;
        let psi_bound = k * k * (1.0 + cl * energy_constant(sc, cfg.d)?);
        let energy_bound = k * k * (energy_constant(cfg.s, cfg.d)? + cl * energy_constant(cfg.s + sc, cfg.d)?);

        let masses: Vec<f64> = trials.iter().map(|t| t.mass).collect();
        let squares: Vec<f64> = masses.iter().map(|m| m * m).collect();
        let energies: Vec<f64> = trials.iter().map(|t| t.energy).collect();
        let mass_mean = stats::mean(&masses);
        let second = stats::mean(&squares);
        let energy_mean = stats::mean(&energies);
        let delta = CONCENTRATION_DELTA;
        let inside = masses
            .iter()
            .filter(|&&m| m > delta * k && m < (2.0 - delta) * k)
            .count();
        Ok(Self {
            mass_mean,
            mass_var: stats::variance(&masses),
            energy_mean,
            bounds_report: MomentBounds {
                k_mass: k,
                mass_ratio: mass_mean / k,
                mass_second_moment: second,
                second_moment_bound: psi_bound,
                second_moment_within_bound: second <= psi_bound,
                energy_bound,
                energy_within_bound: energy_mean <= energy_bound,
                delta,
                fraction_within: inside as f64 / masses.len().max(1) as f64,
            },
        })
    }
}

pub fn second_moment_mc(cfg: &SecondMomentConfig) -> Result<SecondMomentReport> {
    cfg.check()?;
    let trials = (0..cfg.trials).map(|t| cfg.run_trial(t)).collect::<Result<Vec<_>>>()?;
    SecondMomentReport::from_trials(cfg, &trials)
}
