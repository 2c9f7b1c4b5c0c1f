mod oracles;

use proptest::prelude::*;

use oracles::{
    dual_objective, enumeration_optimum, kkt_violation, labels, projected_gradient_optimum, q_matrix,
    random_dataset,
};
use tvsense::svm::{read_model, train_detailed, write_model, Kernel, LabeledSample, TrainParams};

const C: f64 = 10.0;

fn check_against_oracle(seed: u64, kernel: Kernel) {
    let samples = random_dataset(seed, 10);
    let report = train_detailed(&samples, &TrainParams::new(kernel, C)).unwrap();
    let q = q_matrix(&samples, kernel);
    let y = labels(&samples);

    let ours = dual_objective(&q, &report.alphas);
    let best = match kernel {
        Kernel::Rbf { .. } => enumeration_optimum(&q, &y, C),
        Kernel::Linear => projected_gradient_optimum(&q, &y, C, 20_000),
    };
    assert!(
        (ours - best).abs() <= 1e-3 * best.abs().max(1.0),
        "seed {seed} {kernel:?}: dual {ours} vs oracle {best}"
    );

    let balance: f64 = report.alphas.iter().zip(&y).map(|(a, y)| a * y).sum();
    assert!(balance.abs() <= 1e-6, "seed {seed}: sum(a y) = {balance}");
    assert!(report.alphas.iter().all(|&a| (-1e-12..=C + 1e-12).contains(&a)));

    let kkt = kkt_violation(&report.model, &samples, &report.alphas, C);
    assert!(kkt <= 1e-3, "seed {seed} {kernel:?}: KKT residual {kkt}");
}

#[test]
fn rbf_dual_matches_active_set_enumeration() {
    for seed in 0..20 {
        check_against_oracle(seed, Kernel::Rbf { gamma: 0.5 });
    }
}

#[test]
fn linear_dual_matches_projected_gradient() {
    for seed in 100..120 {
        check_against_oracle(seed, Kernel::Linear);
    }
}

#[test]
fn separable_margin_points_are_support_vectors() {
    use tvsense::svm::Label;
    let samples = vec![
        LabeledSample::new(vec![2.0, 0.0], Label::Tv),
        LabeledSample::new(vec![3.0, 1.0], Label::Tv),
        LabeledSample::new(vec![-2.0, 0.0], Label::NonTv),
        LabeledSample::new(vec![-3.0, -1.0], Label::NonTv),
    ];
    let report = train_detailed(&samples, &TrainParams::new(Kernel::Linear, 1e3)).unwrap();
    for s in &samples {
        let f = report.model.decision_value(&s.features).unwrap();
        assert!(s.label.sign() * f >= 1.0 - 1e-3);
    }
}

fn dataset(points: &[(f64, f64)], flip_at: usize) -> Vec<LabeledSample> {
    points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let tv = i % 2 == flip_at % 2;
            let shift = if tv { 1.0 } else { -1.0 };
            LabeledSample::new(vec![x + shift, y], tvsense::svm::Label::from_bool(tv))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flipping_labels_negates_decisions(pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 6..16)) {
        let a = dataset(&pts, 0);
        let b: Vec<LabeledSample> = a.iter().map(|s| LabeledSample::new(s.features.clone(), s.label.flipped())).collect();
        let kernel = Kernel::Rbf { gamma: 0.5 };
        let ma = train_detailed(&a, &TrainParams::new(kernel, C)).unwrap().model;
        let mb = train_detailed(&b, &TrainParams::new(kernel, C)).unwrap().model;
        for s in &a {
            let (fa, fb) = (ma.decision_value(&s.features).unwrap(), mb.decision_value(&s.features).unwrap());
            prop_assert!((fa + fb).abs() <= 1e-6, "{fa} vs {fb}");
        }
    }

    #[test]
    fn feature_scaling_does_not_change_predictions(
        pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 6..16),
        sx in 0.01f64..100.0,
        sy in 0.01f64..100.0,
        off in -50.0f64..50.0,
    ) {
        let a = dataset(&pts, 0);
        let scale = |s: &LabeledSample| vec![s.features[0] * sx + off, s.features[1] * sy - off];
        let b: Vec<LabeledSample> = a.iter().map(|s| LabeledSample::new(scale(s), s.label)).collect();
        let kernel = Kernel::Rbf { gamma: 0.5 };
        let ma = train_detailed(&a, &TrainParams::new(kernel, C)).unwrap().model;
        let mb = train_detailed(&b, &TrainParams::new(kernel, C)).unwrap().model;
        for (sa, sb) in a.iter().zip(&b) {
            let (fa, fb) = (ma.decision_value(&sa.features).unwrap(), mb.decision_value(&sb.features).unwrap());
            // Both solves stop within the SMO tolerance, not at the same iterate.
            prop_assert!((fa - fb).abs() <= 1e-2 * fa.abs().max(1.0), "{fa} vs {fb}");
            if fa.abs() > 1e-2 {
                prop_assert_eq!(fa > 0.0, fb > 0.0);
            }
        }
    }

    #[test]
    fn model_file_round_trip_is_exact(pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 4..12), linear in any::<bool>()) {
        let samples = dataset(&pts, 1);
        let kernel = if linear { Kernel::Linear } else { Kernel::Rbf { gamma: 0.3 } };
        let model = train_detailed(&samples, &TrainParams::new(kernel, 2.0)).unwrap().model;
        let mut bytes = Vec::new();
        write_model(&mut bytes, &model).unwrap();
        let back = read_model(bytes.as_slice()).unwrap();
        prop_assert_eq!(&back, &model);
        for s in &samples {
            prop_assert_eq!(back.decision_value(&s.features).unwrap(), model.decision_value(&s.features).unwrap());
        }
    }
}
