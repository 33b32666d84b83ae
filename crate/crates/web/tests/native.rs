use interact2vec::model::train;
use interact2vec::synthetic::two_block;
use interact2vec::TrainConfig;
use interact2vec_web::{keep_curve, negative_distribution, TwoBlockDemo};

#[test]
fn negative_distribution_halves_sum_to_one() {
    let out = negative_distribution(50, 0.75, 20_000, 3).unwrap();
    assert_eq!(out.len(), 100);
    let (analytic, empirical) = out.split_at(50);
    assert!((analytic.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((empirical.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(analytic.windows(2).all(|w| w[0] + 1e-15 >= w[1]));
    let l1: f64 = analytic.iter().zip(empirical).map(|(a, b)| (a - b).abs()).sum();
    assert!(l1 < 0.1, "{l1}");
}

#[test]
fn negative_gamma_prefers_rare_items() {
    let out = negative_distribution(20, -1.0, 0, 0).unwrap();
    assert!(out[..20].windows(2).all(|w| w[0] <= w[1] + 1e-15));
}

#[test]
fn keep_curve_is_clamped_and_non_increasing() {
    let degrees: Vec<u32> = (1..=400).collect();
    let keep = keep_curve(degrees, 400, 1e-3).unwrap();
    assert!(keep.iter().all(|p| (0.0..=1.0).contains(p)));
    assert!(keep.windows(2).all(|w| w[0] >= w[1]));
    assert!(keep_curve(vec![1], 10, -1.0).is_err());
}

#[test]
fn stepping_matches_continuous_training() {
    let mut demo = TwoBlockDemo::new(4, 8, 0.025, 1.0, 5).unwrap();
    demo.step(3).unwrap();
    demo.step(4).unwrap();
    assert_eq!(demo.epochs(), 7);
    assert_eq!(demo.losses().len(), 7);
    let cfg = TrainConfig { dim: 8, learning_rate: 0.025, subsample_rho: 1.0, epochs: 7, seed: 4, ..TrainConfig::default() };
    let direct = train(&two_block(4).dataset, &cfg).unwrap();
    let want: Vec<f64> = direct.trace.iter().map(|e| e.mean_loss).collect();
    assert_eq!(demo.losses(), want);
}

#[test]
fn blocks_separate_and_recommendations_stay_in_block() {
    let mut demo = TwoBlockDemo::new(1, 16, 0.025, 1.0, 5).unwrap();
    let before = demo.gap();
    demo.step(40).unwrap();
    assert!(demo.gap() > before.max(0.2), "{before} -> {}", demo.gap());
    let n = demo.items();
    assert_eq!(demo.heatmap().len(), n * n);
    for strategy in ["user_item", "item_item", "weighted", "combined", "ensemble"] {
        let rec = demo.recommend(0, strategy, 5).unwrap();
        assert_eq!(rec.len(), 10);
        let in_block = rec.chunks(2).filter(|p| demo.item_block(p[0] as usize) == demo.user_block(0)).count();
        assert!(in_block >= 4, "{strategy}: {rec:?}");
    }
    assert!(demo.recommend(0, "nope", 5).is_err());
}
