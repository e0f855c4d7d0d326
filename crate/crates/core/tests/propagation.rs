use proptest::prelude::*;
use squint_core::array::{ArrayConfig, ElementModel};
use squint_core::beampattern::{phased_pattern, BeamPattern, Mechanism, PatternOptions, ThetaGrid};
use squint_core::raytrace::{
    best_beam_selection, received_power, sls_point, spectral_efficiency, trace_paths, IndoorMap, LinkBudget,
    NoiseModel, Point, RxRegion, Segment, SlsPoint, Summation, Transmitter, Wall,
};
use squint_core::EvalModel;

fn room() -> IndoorMap {
    let c = [(0.0, 0.0), (8.0, 0.0), (8.0, 5.0), (0.0, 5.0)];
    let walls = (0..4)
        .map(|i| {
            let (a, b) = (c[i], c[(i + 1) % 4]);
            Wall {
                segment: Segment::new(Point::new(a.0, a.1), Point::new(b.0, b.1)),
                reflection_loss_db: 6.0,
            }
        })
        .collect();
    IndoorMap {
        walls,
        tx: Transmitter {
            position: Point::new(0.5, 2.5),
            azimuth_deg: 0.0,
        },
        rx_region: RxRegion {
            x0: 1.0,
            y0: 0.5,
            x1: 7.5,
            y1: 4.5,
            step_m: 0.5,
        },
        obstacles: vec![Segment::new(Point::new(4.0, 1.0), Point::new(4.0, 2.0))],
    }
}

fn beams(grid_step: f64) -> Vec<BeamPattern> {
    let cfg = ArrayConfig::new(16, 0.5, 28.5, vec![27.0, 28.5, 30.0], ElementModel::default_patch()).unwrap();
    let opts = PatternOptions {
        grid: ThetaGrid::full(grid_step).unwrap(),
        ..Default::default()
    };
    (0..7)
        .map(|k| phased_pattern(&cfg, Mechanism::Phase, -45.0 + 15.0 * k as f64, EvalModel::Em1, &opts).unwrap())
        .collect()
}

fn interior() -> impl Strategy<Value = Point> {
    (0.2f64..7.8, 0.2f64..4.8).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paths_are_reciprocal(a in interior(), b in interior(), order in 0usize..=2) {
        prop_assume!(a.dist(b) > 1e-3);
        let m = room();
        let fwd = trace_paths(&m.with_tx_at(a), b, order).unwrap();
        let back = trace_paths(&m.with_tx_at(b), a, order).unwrap();
        prop_assert_eq!(fwd.len(), back.len());
        let mut lf: Vec<(usize, f64)> = fwd.iter().map(|p| (p.reflections, p.length)).collect();
        let mut lb: Vec<(usize, f64)> = back.iter().map(|p| (p.reflections, p.length)).collect();
        lf.sort_by(|x, y| x.1.total_cmp(&y.1));
        lb.sort_by(|x, y| x.1.total_cmp(&y.1));
        for (x, y) in lf.iter().zip(&lb) {
            prop_assert_eq!(x.0, y.0);
            prop_assert!((x.1 - y.1).abs() < 1e-9);
        }
    }

    #[test]
    fn paths_respect_geometry(rx in interior(), order in 0usize..=2) {
        let m = room();
        let tx = m.tx.position;
        for p in trace_paths(&m, rx, order).unwrap() {
            prop_assert!(p.reflections <= order);
            prop_assert!(p.length >= tx.dist(rx) - 1e-9);
            prop_assert!((p.loss_db - 6.0 * p.reflections as f64).abs() < 1e-12);
            let legs: f64 = p.vertices.windows(2).map(|w| w[0].dist(w[1])).sum();
            prop_assert!((legs - p.length).abs() < 1e-9);
            for w in p.vertices.windows(2) {
                for o in &m.obstacles {
                    prop_assert!(!o.blocks(w[0], w[1]));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn se_is_monotone_in_tx_power(rx in interior(), p0 in -30.0f64..30.0, dp in 0.0f64..20.0) {
        let m = room();
        let b = beams(0.1);
        let mut lo = LinkBudget { tx_power_dbm: p0, ..Default::default() };
        let a = sls_point(&m, rx, &b, &[27.0, 28.5, 30.0], &lo).unwrap();
        lo.tx_power_dbm = p0 + dp;
        let c = sls_point(&m, rx, &b, &[27.0, 28.5, 30.0], &lo).unwrap();
        prop_assert!(c.se_squint >= a.se_squint - 1e-12);
        prop_assert!(c.se_baseline >= a.se_baseline - 1e-12);
    }

    #[test]
    fn beam_choice_ignores_tx_power(rx in interior(), p0 in -30.0f64..30.0, p1 in -30.0f64..30.0) {
        let m = room();
        let b = beams(0.1);
        let paths = trace_paths(&m, rx, 2).unwrap();
        let i = best_beam_selection(&b, &paths, p0, 0.0, Summation::Incoherent).unwrap();
        let j = best_beam_selection(&b, &paths, p1, 0.0, Summation::Incoherent).unwrap();
        prop_assert_eq!(i, j);
    }

    #[test]
    fn extra_paths_never_lower_incoherent_power(rx in interior()) {
        let m = room();
        let b = &beams(0.1)[3];
        let paths = trace_paths(&m, rx, 2).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=paths.len() {
            let p = received_power(&paths[..k], b, 28.5, 10.0, 0.0, Summation::Incoherent).unwrap();
            prop_assert!(p >= prev - 1e-9);
            prev = p;
        }
    }
}

#[test]
fn on_axis_ttd_link_has_no_squint_loss() {
    let m = room();
    let cfg = ArrayConfig::new(16, 0.5, 28.5, vec![27.0, 28.5, 30.0], ElementModel::Ideal).unwrap();
    let opts = PatternOptions {
        grid: ThetaGrid::full(0.1).unwrap(),
        ..Default::default()
    };
    let b = vec![phased_pattern(&cfg, Mechanism::Ttd, 0.0, EvalModel::Em2, &opts).unwrap()];
    let los = LinkBudget {
        max_reflections: 0,
        ..Default::default()
    };
    for x in [1.5, 3.0, 6.0, 7.5] {
        let p = sls_point(&m, Point::new(x, 2.5), &b, &[27.0, 28.5, 30.0], &los).unwrap();
        assert!(p.degradation_db().abs() < 1e-9, "{x}: {}", p.degradation_db());
        assert!((p.power_ratio_pct() - 100.0).abs() < 1e-9);
    }
}

#[test]
fn se_of_equal_subbands_is_the_single_band_value() {
    let n = NoiseModel::default();
    let p = n.floor_dbm() + 3.0;
    assert!((spectral_efficiency(&[p, p], &n) - spectral_efficiency(&[p], &n)).abs() < 1e-15);
    assert!((spectral_efficiency(&[n.floor_dbm()], &n) - 1.0).abs() < 1e-12);
}

#[test]
fn baseline_against_itself_is_lossless() {
    let m = room();
    let b = beams(0.1);
    let p = sls_point(
        &m,
        Point::new(5.0, 3.0),
        &b,
        &[27.0, 28.5, 30.0],
        &LinkBudget::default(),
    )
    .unwrap();
    let same = SlsPoint {
        power_dbm: p.baseline_dbm.clone(),
        se_squint: p.se_baseline,
        ..p
    };
    assert_eq!(same.degradation_db(), 0.0);
    assert_eq!(same.power_ratio_pct(), 100.0);
}
