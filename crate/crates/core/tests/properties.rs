mod common;

use common::*;
use dycf::basis::{basis_size, MonomialBasis};
use dycf::detectors::{Detector, Dycf};
use dycf::metrics::{auroc, average_precision, Aggregate, EvalReport, SubstreamResult};
use dycf::moments::{MomentConfig, MomentModel};
use dycf::streamgen::{
    generate, Distribution, ModeSpec, Shape, StreamConfig, StreamGenerator, TransitionSpec,
    Type1Spec, Type2Spec,
};
use proptest::prelude::*;

fn points(p: usize, n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, p), n)
}

fn scored_labels() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    prop::collection::vec((-100.0f64..100.0, any::<bool>()), 2..60)
        .prop_filter("both classes", |v| {
            v.iter().any(|x| x.1) && v.iter().any(|x| !x.1)
        })
        .prop_map(|v| v.into_iter().unzip())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_is_complete_and_distinct(p in 1usize..5, d in 0usize..6) {
        let basis = MonomialBasis::new(p, d).unwrap();
        let mut seen: Vec<&[u32]> = basis.indices().iter().map(|a| a.exponents()).collect();
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len(), basis_size(p, d).unwrap());
        prop_assert!(basis.indices().iter().all(|a| a.degree() as usize <= d));
    }

    #[test]
    fn basis_prefix_is_stable(p in 1usize..5, d in 1usize..6) {
        let small = MonomialBasis::new(p, d - 1).unwrap();
        let big = MonomialBasis::new(p, d).unwrap();
        prop_assert_eq!(small.indices(), &big.indices()[..small.len()]);
    }

    #[test]
    fn basis_at_origin_is_unit_vector(p in 1usize..5, d in 0usize..6) {
        let v = MonomialBasis::new(p, d).unwrap().eval(&vec![0.0; p]).unwrap();
        prop_assert_eq!(v[0], 1.0);
        prop_assert!(v[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn moments_ignore_sample_order(pts in points(2, 20..60), seed in any::<u64>()) {
        let mut shuffled = pts.clone();
        use rand::{seq::SliceRandom, SeedableRng};
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let fit = |s: &[Vec<f64>]| {
            MomentModel::fit_batch(s, MonomialBasis::new(2, 2).unwrap(), MomentConfig::exact()).unwrap()
        };
        prop_assert!(max_abs_diff(fit(&pts).matrix(), fit(&shuffled).matrix()) < 1e-12);
    }

    #[test]
    fn christoffel_score_is_positive(pts in points(2, 30..80), x in prop::collection::vec(-10.0f64..10.0, 2)) {
        let model = MomentModel::fit_batch(&pts, MonomialBasis::new(2, 3).unwrap(), MomentConfig::default())
            .unwrap();
        prop_assert!(model.score_q(&x).unwrap() > 0.0);
    }

    #[test]
    fn dycf_decision_is_score_threshold(pts in points(2, 40..80), x in prop::collection::vec(-6.0f64..6.0, 2)) {
        let dycf = Dycf::fit_batch(&pts, 4, MomentConfig::default()).unwrap();
        let s = dycf.score(&x).unwrap();
        prop_assert_eq!(dycf.is_outlier(&x).unwrap(), s >= 1.0);
        prop_assert_eq!(Detector::threshold(&dycf), Some(1.0));
    }

    #[test]
    fn larger_c_flags_fewer_points(pts in points(2, 40..80), probes in points(2, 20..40), c in 0.1f64..5.0) {
        let base = Dycf::fit_batch(&pts, 4, MomentConfig::default()).unwrap().with_c(c).unwrap();
        let looser = base.clone().with_c(2.0 * c).unwrap();
        for x in &probes {
            prop_assert!(looser.score(x).unwrap() <= base.score(x).unwrap());
            if looser.is_outlier(x).unwrap() {
                prop_assert!(base.is_outlier(x).unwrap());
            }
        }
    }

    #[test]
    fn dycf_scores_ignore_learning_order(pts in points(2, 50..80)) {
        let mut rev = pts.clone();
        rev.reverse();
        let a = Dycf::fit_batch(&pts, 3, MomentConfig::default()).unwrap();
        let b = Dycf::fit_batch(&rev, 3, MomentConfig::default()).unwrap();
        for x in pts.iter().take(10) {
            let (sa, sb) = (a.score(x).unwrap(), b.score(x).unwrap());
            prop_assert!((sa - sb).abs() <= 1e-7 * sa.max(1.0));
        }
    }

    #[test]
    fn ranking_metrics_survive_monotone_maps((scores, labels) in scored_labels()) {
        let mapped: Vec<f64> = scores.iter().map(|s| (s / 50.0).exp() * 3.0 + 1.0).collect();
        let a = auroc(&scores, &labels).unwrap();
        prop_assert!((a - auroc(&mapped, &labels).unwrap()).abs() < 1e-12);
        let ap = average_precision(&scores, &labels).unwrap();
        prop_assert!((ap - average_precision(&mapped, &labels).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&ap));
    }

    #[test]
    fn auroc_of_negated_scores_is_complement((scores, labels) in scored_labels()) {
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let sum = auroc(&scores, &labels).unwrap() + auroc(&neg, &labels).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generator_is_deterministic(cfg in stream_config(), sub in 0u64..4) {
        let a: Vec<_> = StreamGenerator::new(&cfg, sub).unwrap().take(300).collect();
        let b: Vec<_> = StreamGenerator::new(&cfg, sub).unwrap().take(300).collect();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iter().enumerate().all(|(i, s)| s.index == i as u64 && s.x.len() == cfg.p));
    }

    #[test]
    fn stream_config_text_round_trips(cfg in stream_config()) {
        let back = StreamConfig::parse(&cfg.to_text(), "round trip").unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn aggregate_is_population_moments(v in prop::collection::vec(-1e3f64..1e3, 1..30)) {
        let a = Aggregate::of(v.iter().copied()).unwrap();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        prop_assert!((a.mean - mean).abs() < 1e-9);
        let m2 = v.iter().map(|x| x * x).sum::<f64>() / n - mean * mean;
        prop_assert!((a.std * a.std - m2).abs() < 1e-6 * (1.0 + m2));
        prop_assert_eq!(a.count, v.len());
    }

    #[test]
    fn report_csv_round_trips(rows in prop::collection::vec(result_row(), 1..8)) {
        let rows: Vec<_> = rows.into_iter().enumerate().map(|(i, mut r)| { r.substream = i; r }).collect();
        let report = EvalReport::new("dycf", rows);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let back = EvalReport::read_csv(&buf[..], "dycf").unwrap();
        prop_assert_eq!(back, report);
    }
}

fn result_row() -> impl Strategy<Value = SubstreamResult> {
    let opt = || prop::option::of(0.0f64..1.0);
    (
        1usize..10_000,
        opt(),
        opt(),
        opt(),
        prop::option::of(0.0f64..50.0),
        1e-7f64..1e-3,
        opt(),
    )
        .prop_map(
            |(points, auroc, ap, em, mv, seconds_per_point, flagged)| SubstreamResult {
                substream: 0,
                points,
                auroc,
                ap,
                em,
                mv,
                seconds_per_point,
                flagged,
            },
        )
}

fn distribution(p: usize) -> impl Strategy<Value = Distribution> {
    let v = move |lo: f64, hi: f64| prop::collection::vec(lo..hi, p);
    prop_oneof![
        (v(-5.0, 5.0), v(0.05, 2.0)).prop_map(|(mean, std)| Distribution::Normal { mean, std }),
        (v(-5.0, 0.0), v(0.1, 3.0)).prop_map(|(low, w)| Distribution::Uniform {
            high: low.iter().zip(&w).map(|(l, w)| l + w).collect(),
            low,
        }),
    ]
}

fn stream_config() -> impl Strategy<Value = StreamConfig> {
    (1usize..4, 1usize..4)
        .prop_flat_map(|(p, k)| {
            (
                Just(p),
                prop::collection::vec((distribution(p), 0.5f64..1.0), k),
                prop::collection::vec(
                    (
                        prop_oneof![
                            Just(Shape::Linear),
                            Just(Shape::Logarithmic),
                            Just(Shape::Exponential)
                        ],
                        1usize..30,
                    ),
                    k,
                ),
                any::<u64>(),
                0.0f64..0.05,
                prop::collection::vec(0.1f64..4.0, p),
                (
                    0.0f64..0.01,
                    0.0f64..0.9,
                    prop::collection::vec(-2.0f64..2.0, p),
                ),
            )
        })
        .prop_map(
            |(p, modes, shapes, seed, q1, half_width, (appear, last, offset))| {
                let k = modes.len();
                let mut transitions = Vec::new();
                let modes = modes
                    .into_iter()
                    .enumerate()
                    .map(|(i, (distribution, dwell))| {
                        let dwell = if k == 1 { 1.0 } else { dwell };
                        if k > 1 {
                            // all leftover mass goes to the next mode
                            let (shape, duration) = shapes[i];
                            transitions.push(TransitionSpec {
                                from: i,
                                to: (i + 1) % k,
                                probability: 1.0 - dwell,
                                shape,
                                duration,
                            });
                        }
                        ModeSpec {
                            distribution,
                            dwell,
                        }
                    })
                    .collect();
                StreamConfig {
                    p,
                    seed,
                    substreams: 1,
                    length: 0,
                    modes,
                    transitions,
                    type1: Type1Spec {
                        probability: q1,
                        half_width,
                    },
                    type2: Type2Spec {
                        appear,
                        last,
                        offset,
                    },
                    alterations: Vec::new(),
                }
            },
        )
}

#[test]
fn generate_rejects_invalid_configs() {
    let mut cfg = StreamConfig::parse(
        "[stream]\np = 1\n\n[mode.0]\ndistribution = normal\nmean = 0\nstd = 1\ndwell = 1\n",
        "t",
    )
    .unwrap();
    assert_eq!(generate(&cfg, 5).unwrap().len(), 5);
    cfg.modes[0].dwell = 0.9;
    assert!(generate(&cfg, 5).is_err());
}
