//! Acceptance suite: thirteen numbered criteria, each printed as one
//! PASS/FAIL line with its runtime. Every expected value is computed here by
//! an independent method rather than read back from the library.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use ucover::parallel;
use ucover_core::bounds::{energy_constant, lambda_matrix, lower_bound_dim, s_exponent, upper_bound_dim};
use ucover_core::covering::{ball_union_grid, build_cover_grid, empirical_covered_fraction, ProbeExperiment};
use ucover_core::criteria::{classify_dichotomy, Verdict};
use ucover_core::geometry::torus_dist;
use ucover_core::grid::Membership;
use ucover_core::growth::{c_l, greedy_cover, k_mass, pair_indicator_bound_mc, psi_kernel};
use ucover_core::hitting::{hitting_ladders, hitting_time, Tau};
use ucover_core::stats::{mean, std_dev};
use ucover_core::stream::{mix64, substream};
use ucover_core::{MeasureModel, PointSource, RadiusSchedule, SampleStream, TorusPoint};

type Check = Result<String, String>;

// name, runtime budget in seconds, check
type Criterion = (&'static str, u64, fn() -> Check);

struct Rng(u64);

impl Rng {
    fn unit(&mut self) -> f64 {
        self.0 = mix64(self.0.wrapping_add(0x9e37_79b9));
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, n: u32) -> u32 {
        ((self.unit() * n as f64) as u32).min(n - 1)
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// tanh-sinh rule on [a, b]; handles the integrable singularity at a
fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let h = 1.0 / 64.0;
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in -400i32..=400 {
        let t = k as f64 * h;
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        let gap = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let x = if u >= 0.0 { b - half * gap } else { a + half * gap };
        if gap > 1e-200 && w > 0.0 && x > a && x < b {
            sum += w * f(x);
        }
    }
    sum * h * half
}

fn c1_energy() -> Check {
    for d in 1..=5u32 {
        for i in 1..=10 {
            let s = d as f64 * i as f64 / 11.0;
            let expect = d as f64 * 2f64.powf(s) / (d as f64 - s);
            let got = energy_constant(s, d).map_err(|e| e.to_string())?;
            ensure((got - expect).abs() <= 1e-12 * expect.max(1.0), || {
                format!("s={s} d={d}: {got} vs {expect}")
            })?;
        }
    }
    // ∫_T |t|^{-1/2} dt = 2 ∫_0^{1/2} t^{-1/2} dt
    let quad = 2.0 * tanh_sinh(|t| t.powf(-0.5), 0.0, 0.5);
    let got = energy_constant(0.5, 1).map_err(|e| e.to_string())?;
    ensure(
        (quad - 2.0 * 2f64.sqrt()).abs() < 1e-3 && (got - quad).abs() < 1e-3,
        || format!("quadrature {quad}, closed form {got}"),
    )?;
    Ok(format!("50 grid points exact, quadrature {quad:.6} vs {got:.6}"))
}

fn c2_sign_table() -> Check {
    for d in 1..=3u32 {
        let df = d as f64;
        for i in 1..=40 {
            let c = 0.05 * i as f64;
            let lo = lower_bound_dim(c, d).map_err(|e| e.to_string())?.value;
            let hi = upper_bound_dim(c, d).map_err(|e| e.to_string())?.value;
            let bad = || format!("c={c} d={d}: lower {lo}, upper {hi}");
            if c <= 0.5 {
                ensure(lo.abs() <= 1e-6, bad)?;
            } else {
                ensure(lo > 1e-3, bad)?;
            }
            if c >= 0.5 {
                ensure((hi - df).abs() <= 1e-6, bad)?;
            } else {
                ensure(hi > 1e-3 && hi < df - 1e-3, bad)?;
            }
        }
    }
    Ok("120 (c, d) cells".into())
}

// both objectives written out from their definitions on a log grid
fn dense_scan(c: f64, d: u32) -> (f64, f64) {
    let n = 200_000;
    let df = d as f64;
    let (a, b) = ((1.0f64 + 1e-6).ln(), 1e6f64.ln());
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        let t = (a + (b - a) * i as f64 / (n - 1) as f64).exp();
        let miss = 1.0 - (-(2.0 * c).powf(df) * (t - 1.0) / (t * t)).exp();
        lo = lo.max(df + df * miss.ln() / t.ln());
        let (r1, r2) = (t.powf(-1.0 / df), t.powf(-2.0 / df));
        let big_theta = (t - 1.0) * (2.0 * c * (1.0 + r2)).powf(df);
        let delta = (t - 1.0) * (2.0 * c).powf(df) * ((1.0 + r1).powf(df) - (1.0 + r2).powf(df));
        let tr = 1.0 + big_theta + delta;
        let lam = 0.5 * (tr + (tr * tr - 4.0 * delta).sqrt());
        hi = hi.min(df * lam.ln() / t.ln());
    }
    (lo.clamp(0.0, df), hi.clamp(0.0, df))
}

fn c3_dense_grid() -> Check {
    let (lo_oracle, _) = dense_scan(1.0, 1);
    let (_, hi_oracle) = dense_scan(0.1, 1);
    let lo = lower_bound_dim(1.0, 1).map_err(|e| e.to_string())?.value;
    let hi = upper_bound_dim(0.1, 1).map_err(|e| e.to_string())?.value;
    ensure((lo - lo_oracle).abs() < 1e-3 && (lo - 0.2177).abs() < 1e-3, || {
        format!("lower {lo} vs oracle {lo_oracle}")
    })?;
    ensure((hi - hi_oracle).abs() < 1e-3 && (hi - 0.333).abs() < 1e-3, || {
        format!("upper {hi} vs oracle {hi_oracle}")
    })?;
    Ok(format!(
        "lower {lo:.5} (oracle {lo_oracle:.5}), upper {hi:.5} (oracle {hi_oracle:.5})"
    ))
}

fn c4_char_poly() -> Check {
    let mut rng = Rng(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let c = 0.01 + 2.0 * rng.unit();
        let d = 1 + rng.below(3);
        let theta = (1e-3f64.ln_1p() + rng.unit() * (1e3f64.ln() - 1e-3f64.ln_1p())).exp();
        let lm = lambda_matrix(c, d, theta).map_err(|e| e.to_string())?;
        let (l, t, dl) = (lm.lambda, lm.theta_cap, lm.delta);
        let res = (l * l - (1.0 + t + dl) * l + dl).abs() / (l * l);
        worst = worst.max(res);
    }
    ensure(worst <= 1e-10, || format!("worst relative residual {worst:e}"))?;
    Ok(format!("worst relative residual {worst:.2e}"))
}

fn box_dim(alpha: f64, d: usize, m: u32, seed: u64) -> Result<f64, String> {
    let exp = ProbeExperiment::BoxDim {
        schedule: RadiusSchedule::power_law(1.0, alpha).map_err(|e| e.to_string())?,
        measure: MeasureModel::uniform(d).map_err(|e| e.to_string())?,
        p: 1 << 8,
        n_max: 1 << 16,
        m,
        m_lo: m.div_ceil(2),
        m_hi: m,
        membership: Membership::CellTouch,
    };
    exp.run(seed).map_err(|e| e.to_string())
}

fn c5_box_dimension() -> Check {
    let a = box_dim(2.0, 1, 16, 0)?;
    let b = box_dim(0.5, 1, 16, 0)?;
    let c = box_dim(1.0, 2, 10, 0)?;
    let e = box_dim(0.25, 2, 10, 0)?;
    let summary = format!("d=1: {a:.3} (α=2), {b:.3} (α=1/2); d=2: {c:.3} (α=1), {e:.3} (α=1/4)");
    ensure(a <= 0.15 && b >= 0.85 && c <= 0.3 && e >= 1.7, || summary.clone())?;
    Ok(summary)
}

fn c6_measure_dichotomy() -> Check {
    let torus = MeasureModel::uniform(1).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (alpha, expect) in [
        (0.5, Verdict::FullMeasure),
        (1.0, Verdict::ZeroMeasure),
        (3.0, Verdict::CountableAS),
    ] {
        let sched = RadiusSchedule::power_law(1.0, alpha).map_err(|e| e.to_string())?;
        let v = classify_dichotomy(&sched, &torus).map_err(|e| e.to_string())?.verdict;
        ensure(v == expect, || format!("α={alpha}: verdict {v:?}"))?;
        let s = SampleStream::uniform(0, 1).map_err(|e| e.to_string())?;
        let f = empirical_covered_fraction(&s, &sched, 1 << 8, 1 << 17, 14).map_err(|e| e.to_string())?;
        let ok = match expect {
            Verdict::FullMeasure => f >= 0.99,
            Verdict::CountableAS => f <= 0.01,
            _ => f > 0.01 && f < 0.99,
        };
        ensure(ok, || format!("α={alpha}: verdict {v:?}, covered fraction {f}"))?;
        parts.push(format!("α={alpha} {v:?} {f:.4}"));
    }
    Ok(parts.join(", "))
}

fn c7_witness_mean() -> Check {
    let k = k_mass(2.0, 1.0, 1, 3, 8).map_err(|e| e.to_string())?;
    let masses = parallel::witness_masses(1.0, 1, 2.0, 3, 8, 12, 200, 0).map_err(|e| e.to_string())?;
    let m = mean(&masses);
    let rel = m / k - 1.0;
    let se = std_dev(&masses) / (masses.len() as f64).sqrt() / k;
    let summary = format!(
        "mean {m:.5} vs K {k:.5}: {:+.1}% (standard error {:.1}%)",
        100.0 * rel,
        100.0 * se
    );
    ensure(rel.abs() <= 0.05, || summary.clone())?;
    Ok(summary)
}

fn c8_psi_majorant() -> Check {
    let mut rng = Rng(8);
    let mut worst = f64::NEG_INFINITY;
    for cfg in 0..5 {
        // the kernel bound assumes exact integer ladders n_j = θ^j
        let theta = (2 + rng.below(4)) as f64;
        let d = 1 + rng.below(2);
        let c = 0.5 + 1e-3 + 1.5 * rng.unit();
        let l = 1 + rng.below(4);
        let q = l + rng.below(8);
        let s = s_exponent(c, d, theta).map_err(|e| e.to_string())?;
        let cl = c_l(c, d, theta, l).map_err(|e| e.to_string())?;
        for k in 0..10_000 {
            let coords: Vec<f64> = if k % 2 == 0 {
                (0..d).map(|_| rng.unit()).collect()
            } else {
                let r = (1e-6f64.ln() + rng.unit() * (0.5f64.ln() - 1e-6f64.ln())).exp();
                (0..d).map(|_| r * rng.unit()).collect()
            };
            let norm = coords.iter().map(|x| x.min(1.0 - x)).fold(0.0, f64::max);
            let t = TorusPoint::new(coords).map_err(|e| e.to_string())?;
            let psi = psi_kernel(&t, theta, c, d, l, q).map_err(|e| e.to_string())?;
            let bound = 1.0 + cl * norm.powf(-s);
            ensure(psi <= bound + 1e-12, || {
                format!("config {cfg} (c={c:.3} θ={theta} d={d} l={l} q={q}): Ψ {psi} > {bound}")
            })?;
            worst = worst.max(psi - bound);
        }
    }
    Ok(format!("5 × 10^4 points, max Ψ - bound = {worst:.3e}"))
}

fn c9_pair_indicator() -> Check {
    let mut rng = Rng(9);
    let trials = 10_000;
    for cfg in 0..100u64 {
        let d = 1 + rng.below(3) as usize;
        let ell = 0.02 + 0.28 * rng.unit();
        let x: Vec<f64> = (0..d).map(|_| rng.unit()).collect();
        let spread = if cfg % 2 == 0 { 4.0 * ell } else { 1.0 };
        let y: Vec<f64> = x
            .iter()
            .map(|&a| (a + spread * (rng.unit() - 0.5)).rem_euclid(1.0))
            .collect();
        let gap = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs().min(1.0 - (a - b).abs()))
            .fold(0.0, f64::max);
        let expect = if gap < 2.0 * ell {
            (2.0 * ell).powi(d as i32).min(1.0)
        } else {
            0.0
        };
        let (xp, yp) = (TorusPoint::new(x).unwrap(), TorusPoint::new(y).unwrap());
        let r = pair_indicator_bound_mc(&xp, &yp, ell, trials, substream(9, cfg)).map_err(|e| e.to_string())?;
        ensure((r.bound - expect).abs() <= 1e-12, || {
            format!("config {cfg}: bound {} vs {expect}", r.bound)
        })?;
        ensure(r.estimate <= r.bound + 3.0 * r.sigma, || {
            format!("config {cfg}: estimate {} > {} + 3·{}", r.estimate, r.bound, r.sigma)
        })?;
    }
    let mut worst = 0.0f64;
    for cfg in 0..10u64 {
        let d = 1 + (cfg % 3) as usize;
        let ell = 0.05 + 0.02 * cfg as f64;
        let x = TorusPoint::new((0..d).map(|_| rng.unit()).collect()).unwrap();
        let r = pair_indicator_bound_mc(&x, &x, ell, trials, substream(90, cfg)).map_err(|e| e.to_string())?;
        let p = (2.0 * ell).powi(d as i32);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let z = (r.estimate - p).abs() / sigma;
        ensure(z <= 3.0, || format!("x = y, d={d} ℓ={ell}: {} vs {p}", r.estimate))?;
        worst = worst.max(z);
    }
    Ok(format!("100 configs within bound + 3σ; x = y worst |z| = {worst:.2}"))
}

fn c10_growth() -> Check {
    let (c, theta, l, i_max) = (0.1, 2.0, 3u32, 14u32);
    let ln_lambda = lambda_matrix(c, 1, theta).map_err(|e| e.to_string())?.lambda.ln();
    let seeds: Vec<u64> = (0..32).collect();
    let traces = parallel::greedy_traces(&seeds, c, 1, theta, l, i_max).map_err(|e| e.to_string())?;
    let rate = mean(&traces.iter().map(|t| t.fitted_rate).collect::<Vec<_>>());
    ensure(rate <= ln_lambda + 0.1, || {
        format!("mean fitted rate {rate} > ln Λ {ln_lambda} + 0.1")
    })?;

    let sched = RadiusSchedule::critical(c, 1).unwrap();
    let mut escaping = 0u64;
    for &seed in &seeds {
        let s = SampleStream::uniform(seed, 1).unwrap();
        let g = greedy_cover(&s, c, 1, theta, l, i_max).map_err(|e| e.to_string())?;
        let lad = &g.trace.ladder;
        let ckpts = &lad[l as usize..=i_max as usize];
        let cover = build_cover_grid(&s, &sched, ckpts[0], ckpts, 14).map_err(|e| e.to_string())?;
        let mut centers: Vec<f64> = Vec::new();
        for &k in g.members.iter().chain(&g.frontier) {
            centers.extend(s.sample(k).coords());
        }
        let r = c * (lad[i_max as usize] as f64).powi(-1);
        let h = ball_union_grid(1, &centers, r, 14).map_err(|e| e.to_string())?;
        escaping += cover
            .words()
            .iter()
            .zip(h.words())
            .map(|(a, b)| (a & !b).count_ones() as u64)
            .sum::<u64>();
    }
    ensure(escaping == 0, || {
        format!("{escaping} cells of the cover grid escape H_i")
    })?;
    Ok(format!(
        "mean fitted rate {rate:.4} ≤ ln Λ + 0.1 = {:.4}; 0 escaping cells",
        ln_lambda + 0.1
    ))
}

fn c11_hitting() -> Check {
    let mut z = 11u64;
    for cfg in 0..1000u64 {
        z = mix64(z);
        let d = 1 + (z % 3) as usize;
        let s = SampleStream::uniform(z, d).unwrap();
        let y = s.sample(1 << 40);
        let r = 0.02 + 0.3 * ((z >> 20) % 1000) as f64 / 1000.0 / d as f64;
        let n_max = 200 + cfg % 300;
        let scan = (1..=n_max)
            .find(|&n| torus_dist(&s.sample(n), &y).unwrap() < r)
            .map_or(Tau::NotHitWithin(n_max), Tau::Hit);
        let got = hitting_time(&s, &y, r, n_max).map_err(|e| e.to_string())?;
        ensure(got == scan, || format!("config {cfg}: {got:?} vs scan {scan:?}"))?;
    }
    let probe = SampleStream::uniform(1111, 1).unwrap();
    let probes: Vec<TorusPoint> = (1..=64).map(|n| probe.sample(n)).collect();
    let mut pooled = Vec::new();
    for seed in 0..8 {
        let s = SampleStream::uniform(substream(11, seed), 1).unwrap();
        for rec in hitting_ladders(&s, &probes, 0.25, 10, 1_000_000, 1.0 / 3.0).map_err(|e| e.to_string())? {
            pooled.push(rec.h_upper_estimate.ok_or("probe never hit")?);
        }
    }
    let m = mean(&pooled);
    ensure((0.8..=1.2).contains(&m), || format!("pooled mean {m}"))?;
    Ok(format!(
        "10^3 scans exact; pooled estimate mean {m:.4} over {} records",
        pooled.len()
    ))
}

fn c12_concentration() -> Check {
    let seeds: Vec<u64> = (0..16).collect();
    let mut parts = Vec::new();
    for alpha in [2.0, 0.5] {
        let exp = ProbeExperiment::BoxDim {
            schedule: RadiusSchedule::power_law(1.0, alpha).unwrap(),
            measure: MeasureModel::uniform(1).unwrap(),
            p: 1 << 8,
            n_max: 1 << 16,
            m: 16,
            m_lo: 8,
            m_hi: 16,
            membership: Membership::CellTouch,
        };
        let spread = parallel::probe_spread(&exp, &seeds).map_err(|e| e.to_string())?;
        ensure(spread.std_dev <= 0.05, || format!("α={alpha}: std {}", spread.std_dev))?;
        parts.push(format!("α={alpha}: mean {:.3} std {:.4}", spread.mean, spread.std_dev));
    }
    Ok(parts.join(", "))
}

fn run_cli(args: &[&str], threads: usize) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ucover"))
        .args(args)
        .env(parallel::THREADS_ENV, threads.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "{args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok(out.stdout)
}

fn c13_determinism() -> Check {
    let max = std::thread::available_parallelism().map_or(2, |n| n.get()).max(2);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let grid = |t: usize| dir.path().join(format!("grid{t}.bin")).to_string_lossy().into_owned();
    let (g1, gmax) = (grid(1), grid(max));
    let runs: Vec<Vec<&str>> = vec![
        vec!["bounds", "--c", "1", "--d", "2"],
        vec!["classify", "--alpha", "1", "--n", "2000", "--format", "csv"],
        vec![
            "simulate",
            "--alpha",
            "0.5",
            "--d",
            "2",
            "--grid-bits",
            "10",
            "--seed",
            "3",
        ],
        vec!["boxdim", "--alpha", "2", "--grid-bits", "14", "--seed", "5"],
        vec![
            "hitting", "--probes", "16", "--n-max", "100000", "--seed", "2", "--format", "csv",
        ],
        vec![
            "greedy-cover",
            "--c",
            "0.1",
            "--theta",
            "2",
            "--l",
            "3",
            "--i-max",
            "12",
            "--seeds",
            "0..8",
            "--format",
            "csv",
        ],
        vec![
            "second-moment",
            "--c",
            "2",
            "--theta",
            "2",
            "--l",
            "4",
            "--q",
            "9",
            "--trials",
            "32",
            "--s",
            "0.1",
        ],
        vec!["zero-one", "--alpha", "0.5", "--seeds", "0..8", "--grid-bits", "12"],
    ];
    for args in &runs {
        let a = run_cli(args, 1)?;
        let b = run_cli(args, 1)?;
        let c = run_cli(args, max)?;
        ensure(a == b && a == c, || {
            format!("{} differs across runs or thread counts", args[0])
        })?;
    }
    let sim = [
        "simulate",
        "--alpha",
        "1",
        "--d",
        "2",
        "--grid-bits",
        "11",
        "--grid-out",
    ];
    let mut a1 = sim.to_vec();
    a1.push(&g1);
    let mut amax = sim.to_vec();
    amax.push(&gmax);
    run_cli(&a1, 1)?;
    run_cli(&amax, max)?;
    let (x, y) = (std::fs::read(&g1).unwrap(), std::fs::read(&gmax).unwrap());
    ensure(x == y, || "grid dumps differ".into())?;
    Ok(format!(
        "{} subcommands and a grid dump identical at 1 and {max} threads",
        runs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("energy closed form", 1, c1_energy),
        ("bound sign table", 10, c2_sign_table),
        ("bound values vs dense grid", 5, c3_dense_grid),
        ("growth eigenvalue identity", 1, c4_char_poly),
        ("box-dimension dichotomy", 240, c5_box_dimension),
        ("measure dichotomy", 60, c6_measure_dichotomy),
        ("witness mass mean", 120, c7_witness_mean),
        ("kernel majorant", 5, c8_psi_majorant),
        ("pair indicator bound", 30, c9_pair_indicator),
        ("greedy cover growth", 120, c10_growth),
        ("hitting exponent", 120, c11_hitting),
        ("zero-one concentration", 600, c12_concentration),
        ("determinism", 60, c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let got = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let over = took > Duration::from_secs(*budget);
        let (status, detail) = match (&got, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {status} {name} ({:.2} s): {detail}",
            i + 1,
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
