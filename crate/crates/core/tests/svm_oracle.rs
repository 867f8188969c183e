mod common;

use proptest::prelude::*;
use rand::Rng;
use svmspectra::backbone::{generate, BackboneSpec, ClassId, LabeledDataset};
use svmspectra::svm::{load_model, save_model, train, RbfKernel, SvmModel, TrainConfig};

fn random_problem(n: usize, seed: u64) -> (LabeledDataset, f64, f64) {
    let mut r = common::rng(seed);
    let points: Vec<[f64; 2]> = (0..n).map(|_| [r.random(), r.random()]).collect();
    let mut labels: Vec<ClassId> = (0..n)
        .map(|_| if r.random::<bool>() { ClassId::Minority } else { ClassId::Majority })
        .collect();
    labels[0] = ClassId::Minority;
    labels[1] = ClassId::Majority;
    let c = 2f64.powf(r.random_range(-2.0..4.0));
    let gamma = 2f64.powf(r.random_range(-1.0..3.0));
    (LabeledDataset::new(points, labels).unwrap(), c, gamma)
}

fn fit(data: &LabeledDataset, c: f64, gamma: f64) -> SvmModel {
    train(data, &TrainConfig::with_c(c), RbfKernel::new(gamma).unwrap()).unwrap()
}

#[test]
fn dual_objective_matches_exhaustive_qp() {
    let mut checked = 0;
    for seed in 0..40u64 {
        let n = 2 + (seed as usize % 7);
        let (data, c, gamma) = random_problem(n, seed);
        let y: Vec<f64> = data.labels.iter().map(|l| l.sign()).collect();
        let oracle = common::exhaustive_dual(&data.points, &y, c, gamma);
        let model = fit(&data, c, gamma);
        let ours = -model.dual_objective();
        assert!(
            (ours - oracle).abs() <= 1e-4,
            "seed {seed} (n={n}, C={c}, gamma={gamma}): trainer {ours}, oracle {oracle}"
        );
        checked += 1;
    }
    assert!(checked >= 20);
}

/// Signed margin `y f(x)` for every training point, paired with its multiplier.
fn margins(data: &LabeledDataset, model: &SvmModel) -> Vec<(f64, f64)> {
    data.points
        .iter()
        .zip(&data.labels)
        .map(|(p, l)| {
            let a = model
                .support_vectors
                .iter()
                .position(|s| s == p)
                .map_or(0.0, |k| model.coeffs[k].abs());
            (a, l.sign() * model.decision_value(p))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trained_models_are_dual_feasible_and_kkt(
        mu in 0.0..=1.0f64,
        alpha in 0.5..=0.8f64,
        n in 20usize..120,
        log2_c in -2.0..6.0f64,
        log2_gamma in -2.0..3.0f64,
        seed in any::<u64>(),
    ) {
        let data = generate(&BackboneSpec::new(mu, alpha, n, seed).unwrap()).unwrap();
        prop_assume!(data.count(ClassId::Minority) > 0);
        let c = log2_c.exp2();
        let cfg = TrainConfig::with_c(c);
        let model = fit(&data, c, log2_gamma.exp2());
        let sum: f64 = model.coeffs.iter().sum();
        prop_assert!(sum.abs() <= 1e-6, "sum of coefficients {sum}");
        for a in &model.coeffs {
            prop_assert!(a.abs() <= c + 1e-9 && *a != 0.0);
        }
        let tol = cfg.kkt_tol + 1e-9;
        for (a, m) in margins(&data, &model) {
            if a == 0.0 {
                prop_assert!(m >= 1.0 - tol, "inactive point with margin {m}");
            } else if a < c {
                prop_assert!((m - 1.0).abs() <= tol, "free SV with margin {m}");
            } else {
                prop_assert!(m <= 1.0 + tol, "bounded SV with margin {m}");
            }
        }
    }

    #[test]
    fn decision_is_linear_in_coefficients(t in -4.0..4.0f64, x in 0.0..1.0f64, y in 0.0..1.0f64) {
        let (data, c, gamma) = random_problem(8, 5);
        let m = fit(&data, c, gamma);
        let scaled = SvmModel {
            coeffs: m.coeffs.iter().map(|v| v * t).collect(),
            bias: m.bias * t,
            ..m.clone()
        };
        let (a, b) = (scaled.decision_value(&[x, y]), t * m.decision_value(&[x, y]));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn save_load_round_trip_is_exact(seed in any::<u64>(), n in 10usize..80) {
        let data = generate(&BackboneSpec::new(0.3, 0.6, n, seed).unwrap()).unwrap();
        prop_assume!(data.count(ClassId::Minority) > 0);
        let model = fit(&data, 4.0, 2.0);
        let bytes = save_model(&model);
        let back = load_model(&bytes).unwrap();
        prop_assert_eq!(save_model(&back), bytes);
        let mut r = common::rng(seed);
        for _ in 0..100 {
            let p = [r.random::<f64>(), r.random::<f64>()];
            prop_assert_eq!(model.decision_value(&p).to_bits(), back.decision_value(&p).to_bits());
        }
    }
}

#[test]
fn two_point_problem() {
    let data = LabeledDataset::new(
        vec![[0.1, 0.5], [0.9, 0.5]],
        vec![ClassId::Minority, ClassId::Majority],
    )
    .unwrap();
    let m = fit(&data, 1.0, 1.0);
    assert_eq!(m.n_support(), 2);
    assert_eq!(m.predict(&[0.1, 0.5]), ClassId::Minority);
    assert_eq!(m.predict(&[0.9, 0.5]), ClassId::Majority);
}

#[test]
fn xor_problem_is_fit_exactly() {
    let data = LabeledDataset::new(
        vec![[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]],
        vec![ClassId::Minority, ClassId::Minority, ClassId::Majority, ClassId::Majority],
    )
    .unwrap();
    let m = fit(&data, 10.0, 1.0);
    assert_eq!(m.n_support(), 4);
    for (p, l) in data.points.iter().zip(&data.labels) {
        assert_eq!(m.predict(p), *l);
    }
    let y: Vec<f64> = data.labels.iter().map(|l| l.sign()).collect();
    let oracle = common::exhaustive_dual(&data.points, &y, 10.0, 1.0);
    assert!((-m.dual_objective() - oracle).abs() < 1e-4);
}

#[test]
fn margin_support_vectors_of_a_separable_problem() {
    let data = generate(&BackboneSpec::new(0.0, 0.5, 60, 8).unwrap()).unwrap();
    let cfg = TrainConfig::with_c(1e4);
    let m = train(&data, &cfg, RbfKernel::new(8.0).unwrap()).unwrap();
    for (sv, c) in m.support_vectors.iter().zip(&m.coeffs) {
        if c.abs() < cfg.c {
            assert!(m.decision_value(sv).abs() >= 1.0 - cfg.kkt_tol);
        }
    }
}

#[test]
fn kernel_and_decision_basics() {
    let k = RbfKernel::new(2.0).unwrap();
    assert_eq!(k.eval(&[0.3, 0.4], &[0.3, 0.4]), 1.0);
    let d2: f64 = 0.2 * 0.2 + 0.1 * 0.1;
    assert!((k.eval(&[0.1, 0.1], &[0.3, 0.2]) - (-2.0 * d2).exp()).abs() < 1e-15);
    assert!(RbfKernel::new(0.0).is_err());

    let single = SvmModel::new(vec![[0.2, 0.2]], vec![1.0], 0.0, k, 1.0, 1).unwrap();
    assert_eq!(single.decision_value(&[0.5, 0.9]), k.eval(&[0.2, 0.2], &[0.5, 0.9]));
    let q = single.kernel_matrix();
    assert_eq!(q.as_matrix().row(0), &[1.0]);

    let flat = SvmModel::new(vec![[0.2, 0.2], [0.6, 0.1]], vec![0.0, 0.0], -0.25, k, 1.0, 2).unwrap();
    assert_eq!(flat.decision_value(&[0.9, 0.9]), -0.25);
    assert_eq!(flat.predict(&[0.9, 0.9]), ClassId::Majority);

    let dup = SvmModel::new(vec![[0.5, 0.5], [0.5, 0.5]], vec![1.0, -1.0], 0.0, k, 1.0, 2).unwrap();
    let q = dup.kernel_matrix();
    assert_eq!(q.as_matrix().row(0), &[1.0, 1.0]);
    assert_eq!(svmspectra::linalg::eigh(&q).unwrap().numeric_rank(), 1);
}

#[test]
fn single_class_input_is_a_training_error() {
    let data = LabeledDataset::new(vec![[0.1, 0.1], [0.2, 0.2]], vec![ClassId::Majority; 2]).unwrap();
    let e = train(&data, &TrainConfig::with_c(1.0), RbfKernel::new(1.0).unwrap()).unwrap_err();
    assert!(matches!(e, svmspectra::Error::Training(_)));
}

#[test]
fn malformed_model_files_are_parse_errors() {
    let data = generate(&BackboneSpec::new(0.0, 0.5, 20, 1).unwrap()).unwrap();
    let bytes = save_model(&fit(&data, 1.0, 1.0));
    let cut = &bytes[..bytes.len() / 2];
    assert!(matches!(load_model(cut), Err(svmspectra::Error::Parse { .. })));
    assert!(matches!(load_model(b"{}"), Err(svmspectra::Error::Parse { .. })));
}
