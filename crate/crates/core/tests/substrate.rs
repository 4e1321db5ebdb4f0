use proptest::prelude::*;
use ucover_core::geometry::{torus_dist, TorusPoint};
use ucover_core::{MeasureModel, PointSource, RadiusSchedule, SampleStream};

fn point(d: usize) -> impl Strategy<Value = TorusPoint> {
    proptest::collection::vec(0.0..1.0f64, d).prop_map(|c| TorusPoint::new(c).unwrap())
}

fn triple() -> impl Strategy<Value = (TorusPoint, TorusPoint, TorusPoint)> {
    (1usize..5).prop_flat_map(|d| (point(d), point(d), point(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn metric_axioms((x, y, z) in triple()) {
        let xy = torus_dist(&x, &y).unwrap();
        let yx = torus_dist(&y, &x).unwrap();
        let xz = torus_dist(&x, &z).unwrap();
        let zy = torus_dist(&z, &y).unwrap();
        prop_assert!((0.0..=0.5).contains(&xy));
        prop_assert_eq!(xy, yx);
        prop_assert_eq!(torus_dist(&x, &x).unwrap(), 0.0);
        prop_assert!(xy <= xz + zy + 1e-15);
    }
}

#[test]
fn ball_mass_matches_hit_frequency() {
    let n = 100_000u64;
    for d in 1..=3 {
        let m = MeasureModel::uniform(d).unwrap();
        let s = SampleStream::uniform(77 + d as u64, d).unwrap();
        let y = s.sample(n + 1);
        for r in [0.05, 0.2, 0.45] {
            let p = m.ball_mass(&y, r).unwrap();
            let hits = (1..=n).filter(|&k| torus_dist(&s.sample(k), &y).unwrap() < r).count() as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits / n as f64 - p).abs() <= 3.0 * sigma, "d={d} r={r}");
        }
    }
}

#[test]
fn subtorus_slab_mass_by_sampling() {
    // direct sampling of the support: first coordinate uniform, second 0
    let m = MeasureModel::subtorus(1, 2).unwrap();
    let y = TorusPoint::new(vec![0.3, 0.0]).unwrap();
    let s = SampleStream::new(5, m).unwrap();
    let n = 100_000u64;
    let hits = (1..=n).filter(|&k| torus_dist(&s.sample(k), &y).unwrap() < 0.1).count() as f64 / n as f64;
    let sigma = (0.2f64 * 0.8 / n as f64).sqrt();
    assert!((hits - 0.2).abs() <= 3.0 * sigma);
    assert!((m.ball_mass(&y, 0.1).unwrap() - 0.2).abs() < 1e-15);
}

#[test]
fn ball_mass_is_monotone_and_capped() {
    let y = TorusPoint::new(vec![0.1, 0.05]).unwrap();
    for m in [MeasureModel::uniform(2).unwrap(), MeasureModel::subtorus(1, 2).unwrap()] {
        let mut prev = 0.0;
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            let v = m.ball_mass(&y, r).unwrap();
            assert!((0.0..=1.0).contains(&v) && v >= prev);
            if r >= 0.5 {
                assert_eq!(v, 1.0);
            }
            prev = v;
        }
    }
}

#[test]
fn radii_are_nonincreasing() {
    let fams = [
        RadiusSchedule::power_law(0.7, 0.3).unwrap(),
        RadiusSchedule::power_law(2.0, 4.0).unwrap(),
        RadiusSchedule::critical(0.3, 3).unwrap(),
        RadiusSchedule::explicit(vec![0.5, 0.5, 0.2, 0.1]).unwrap(),
    ];
    for f in &fams {
        let top = f.term_count().unwrap_or(10_000);
        let mut prev = f64::INFINITY;
        for n in 1..=top {
            let r = f.radius_at(n).unwrap();
            assert!(r > 0.0 && r <= prev);
            prev = r;
        }
    }
}
