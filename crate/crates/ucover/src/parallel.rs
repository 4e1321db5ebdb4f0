//! Thread-parallel versions of the core experiments.

use rayon::prelude::*;
use ucover_core::covering::{self, ProbeExperiment};
use ucover_core::grid::{paint_balls_window, GridCover, Membership};
use ucover_core::growth::{greedy_cover_trace, CoverGrowthTrace};
use ucover_core::hitting::{hitting_ladders, HittingRecord};
use ucover_core::moments::{SecondMomentConfig, WitnessTrial};
use ucover_core::stats::Spread;
use ucover_core::stream::substream;
use ucover_core::{PointSource, RadiusSchedule, SampleStream, TorusPoint};

use crate::Result;

pub const THREADS_ENV: &str = "UCOVER_THREADS";

/// Thread count from `UCOVER_THREADS`, else the hardware parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

// below this many words a single painter is faster
const MIN_PARALLEL_WORDS: usize = 1 << 12;

/// Paints balls into `grid`, splitting its words into disjoint windows.
pub fn paint_parallel(grid: &mut GridCover, centers: &[f64], r: f64, membership: Membership) {
    let (d, bits) = (grid.dim(), grid.bits());
    let words = grid.words_mut();
    if words.len() < MIN_PARALLEL_WORDS || rayon::current_num_threads() == 1 {
        paint_balls_window(centers, d, r, membership, bits, 0, words);
        return;
    }
    let chunk = words
        .len()
        .div_ceil(4 * rayon::current_num_threads())
        .max(MIN_PARALLEL_WORDS / 4);
    words.par_chunks_mut(chunk).enumerate().for_each(|(i, w)| {
        paint_balls_window(centers, d, r, membership, bits, i * chunk, w);
    });
}

pub fn build_cover_grid<S: PointSource + Sync>(
    stream: &S,
    schedule: &RadiusSchedule,
    p: u64,
    checkpoints: &[u64],
    m: u32,
    membership: Membership,
) -> Result<GridCover> {
    Ok(covering::build_cover_grid_using(
        stream,
        schedule,
        p,
        checkpoints,
        m,
        |c, r, u| paint_parallel(u, c, r, membership),
    )?)
}

/// Per-seed statistics of an experiment, seeds in parallel.
pub fn probe_spread(experiment: &ProbeExperiment, seeds: &[u64]) -> Result<Spread> {
    if seeds.len() < 2 {
        return Err(ucover_core::Error::InvalidArgument {
            name: "seeds",
            reason: "need at least two seeds".into(),
        }
        .into());
    }
    let values = seeds
        .par_iter()
        .map(|&s| experiment.run(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Spread::of(values))
}

/// Witness-set trials `0..cfg.trials` in parallel, returned in trial order.
pub fn witness_trials(cfg: &SecondMomentConfig) -> Result<Vec<WitnessTrial>> {
    Ok((0..cfg.trials)
        .into_par_iter()
        .map(|t| cfg.run_trial(t))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Witness-set masses for seeds `substream(base_seed, t)`, no energy.
#[allow(clippy::too_many_arguments)]
pub fn witness_masses(
    c: f64,
    d: u32,
    theta: f64,
    l: u32,
    q: u32,
    m: u32,
    trials: u64,
    base_seed: u64,
) -> Result<Vec<f64>> {
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let s = SampleStream::uniform(substream(base_seed, t), d as usize)?;
            Ok(covering::liminf_witness_grid(&s, c, d, theta, l, q, m)?.fraction())
        })
        .collect::<Result<Vec<_>, ucover_core::Error>>()?)
}

/// Hitting ladders for many probes; probes are split into chunks that each
/// share one pass over the stream.
pub fn hitting_records<S: PointSource + Sync>(
    stream: &S,
    probes: &[TorusPoint],
    r_hi: f64,
    k: usize,
    n_max: u64,
    window: f64,
) -> Result<Vec<HittingRecord>> {
    let chunks = probes
        .par_chunks(4)
        .map(|ps| hitting_ladders(stream, ps, r_hi, k, n_max, window))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Greedy-cover traces for several seeds, in seed order.
pub fn greedy_traces(seeds: &[u64], c: f64, d: u32, theta: f64, l: u32, i_max: u32) -> Result<Vec<CoverGrowthTrace>> {
    Ok(seeds
        .par_iter()
        .map(|&s| {
            let stream = SampleStream::uniform(s, d as usize)?;
            greedy_cover_trace(&stream, c, d, theta, l, i_max)
        })
        .collect::<Result<Vec<_>, _>>()?)
}
