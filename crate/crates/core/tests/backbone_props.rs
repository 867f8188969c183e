mod common;

use proptest::prelude::*;
use svmspectra::backbone::{
    ambiguous_mass, ambiguous_region, bayes_f1, class_support, generate, BackboneSpec, ClassId,
};

fn spec_strategy() -> impl Strategy<Value = BackboneSpec> {
    (0.0..=1.0f64, 0.5..=0.95f64, 2usize..400, any::<u64>())
        .prop_map(|(mu, alpha, n, seed)| BackboneSpec::new(mu, alpha, n, seed).unwrap())
}

proptest! {
    #[test]
    fn supports_have_equal_length(mu in 0.0..=1.0f64) {
        let a = class_support(ClassId::Minority, mu).unwrap().total_length();
        let b = class_support(ClassId::Majority, mu).unwrap().total_length();
        prop_assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn supports_match_direct_interval_arithmetic(mu in 0.0..=1.0f64) {
        for (class, minority) in [(ClassId::Minority, true), (ClassId::Majority, false)] {
            let got: Vec<(f64, f64)> = class_support(class, mu)
                .unwrap()
                .intervals()
                .iter()
                .map(|iv| (iv.lo, iv.hi))
                .collect();
            let want = common::support_intervals(minority, mu);
            prop_assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g.0 - w.0).abs() < 1e-15 && (g.1 - w.1).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ambiguous_region_grows_with_mu(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = ambiguous_region(lo).unwrap();
        let large = ambiguous_region(hi).unwrap();
        prop_assert!(small.is_subset_of(&large));
        prop_assert!(small.total_length() <= large.total_length() + 1e-15);
    }

    #[test]
    fn generated_data_respects_spec(spec in spec_strategy()) {
        let d = generate(&spec).unwrap();
        prop_assert_eq!(d.len(), spec.n);
        let maj = d.count(ClassId::Majority) as f64;
        let diff = maj - spec.alpha * spec.n as f64;
        prop_assert!(diff > -1.0 && diff <= 1.0, "majority {maj} for alpha {}", spec.alpha);

        let smin = class_support(ClassId::Minority, spec.mu).unwrap();
        let smaj = class_support(ClassId::Majority, spec.mu).unwrap();
        for (p, l) in d.points.iter().zip(&d.labels) {
            let s = if *l == ClassId::Minority { &smin } else { &smaj };
            prop_assert!(s.contains(p[0]), "x1 = {} outside its class support", p[0]);
            prop_assert!((0.0..=1.0).contains(&p[1]));
        }
    }

    #[test]
    fn generation_is_a_pure_function(spec in spec_strategy()) {
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        let bits = |d: &svmspectra::backbone::LabeledDataset| -> Vec<(u64, u64)> {
            d.points.iter().map(|p| (p[0].to_bits(), p[1].to_bits())).collect()
        };
        prop_assert_eq!(bits(&a), bits(&b));
        prop_assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn bayes_f1_is_a_probability(mu in 0.0..=1.0f64, alpha in 0.5..=0.95f64) {
        let f = bayes_f1(mu, alpha).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
    }
}

#[test]
fn worked_interval_examples() {
    let s = class_support(ClassId::Minority, 0.4).unwrap();
    let iv: Vec<(f64, f64)> = s.intervals().iter().map(|i| (i.lo, i.hi)).collect();
    assert_eq!(iv.len(), 2);
    assert!((iv[0].0 - 0.0).abs() < 1e-12 && (iv[0].1 - 0.35).abs() < 1e-12);
    assert!((iv[1].0 - 0.4).abs() < 1e-12 && (iv[1].1 - 0.85).abs() < 1e-12);

    let a = ambiguous_region(0.4).unwrap();
    assert_eq!(a.intervals().len(), 3);
    assert!((a.total_length() - 0.6).abs() < 1e-12);
    assert!((ambiguous_mass(0.4).unwrap() - 0.75).abs() < 1e-12);
    assert!(ambiguous_region(0.0).unwrap().is_empty());
    assert!((ambiguous_region(1.0).unwrap().total_length() - 1.0).abs() < 1e-15);
}

#[test]
fn class_counts_follow_the_rounding_rule() {
    let d = generate(&BackboneSpec::new(0.0, 0.5, 200, 3).unwrap()).unwrap();
    assert_eq!(d.count(ClassId::Majority), 100);
    let d = generate(&BackboneSpec::new(0.4, 0.8, 1000, 3).unwrap()).unwrap();
    assert_eq!(d.count(ClassId::Majority), 800);
    assert_eq!(d.count(ClassId::Minority), 200);
}

#[test]
fn full_overlap_is_uniform_by_ks() {
    let d = generate(&BackboneSpec::new(1.0, 0.5, 5000, 17).unwrap()).unwrap();
    let x1: Vec<f64> = d.points.iter().map(|p| p[0]).collect();
    let stat = common::ks_statistic(&x1, |x| x.clamp(0.0, 1.0));
    assert!(stat < common::ks_critical_1pct(5000), "KS statistic {stat}");
}

#[test]
fn class_conditional_x1_is_uniform_on_support_by_ks() {
    // uniform on a union of intervals has a piecewise-linear CDF
    let mu = 0.4;
    let d = generate(&BackboneSpec::new(mu, 0.6, 6000, 5).unwrap()).unwrap();
    for (class, minority) in [(ClassId::Minority, true), (ClassId::Majority, false)] {
        let iv = common::support_intervals(minority, mu);
        let total: f64 = iv.iter().map(|(a, b)| b - a).sum();
        let cdf = |x: f64| {
            iv.iter().map(|&(a, b)| x.clamp(a, b) - a).sum::<f64>() / total
        };
        let xs: Vec<f64> = d
            .points
            .iter()
            .zip(&d.labels)
            .filter(|(_, l)| **l == class)
            .map(|(p, _)| p[0])
            .collect();
        let stat = common::ks_statistic(&xs, cdf);
        assert!(stat < common::ks_critical_1pct(xs.len()), "{class:?}: KS {stat}");
    }
}

#[test]
fn bayes_f1_closed_forms() {
    for alpha in [0.5, 0.7, 0.95] {
        assert!((bayes_f1(0.0, alpha).unwrap() - 1.0).abs() < 1e-12);
    }
    assert!((bayes_f1(1.0, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn bayes_f1_agrees_with_monte_carlo() {
    for (mu, alpha, seed) in [(0.4, 0.5, 1), (0.2, 0.59, 2), (0.6, 0.77, 3), (0.8, 0.5, 4)] {
        let closed = bayes_f1(mu, alpha).unwrap();
        let mc = common::monte_carlo_bayes_f1(mu, alpha, 1_000_000, seed);
        assert!(
            (closed - mc).abs() < 0.005,
            "mu {mu} alpha {alpha}: closed form {closed}, Monte Carlo {mc}"
        );
    }
}

#[test]
fn out_of_range_parameters_are_rejected() {
    assert!(BackboneSpec::new(1.1, 0.5, 10, 0).is_err());
    assert!(BackboneSpec::new(0.5, 0.96, 10, 0).is_err());
    assert!(BackboneSpec::new(0.5, 0.4, 10, 0).is_err());
    assert!(BackboneSpec::new(0.5, 0.5, 1, 0).is_err());
    assert!(class_support(ClassId::Minority, -0.1).is_err());
    assert!(bayes_f1(0.2, 0.99).is_err());
}
