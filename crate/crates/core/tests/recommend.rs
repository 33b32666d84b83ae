use interact2vec::dataset::InteractionDataset;
use interact2vec::model::EmbeddingModel;
use interact2vec::recommend::{
    combine_embeddings, cosine, item_item_scores, similarity_table, top_n, user_item_scores, weighted_scores, EnsembleConfig,
    Neighbours, RankWeight, Recommender, Strategy, StrategyConfig,
};
use proptest::prelude::*;

fn scalar_cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for k in 0..a.len() {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

fn row(v: &[f32]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn toy_model() -> EmbeddingModel {
    EmbeddingModel::from_parts(
        2,
        4,
        3,
        vec![0.5, -0.25, 1.0, 0.0, 0.75, -0.5],
        vec![1.0, 0.0, 0.5, -0.5, 0.25, 0.0, 0.125, 1.0, -1.0, 0.0, 0.0, 0.75],
    )
    .unwrap()
}

#[test]
fn user_item_matches_hand_cosines() {
    let m = EmbeddingModel::from_parts(1, 3, 2, vec![3.0, 4.0], vec![3.0, 4.0, 4.0, -3.0, 1.0, 0.0]).unwrap();
    let s = user_item_scores(&m, 0).unwrap();
    // (3,4) against (3,4), (4,-3), (1,0)
    let expected = [1.0, 0.0, 0.6];
    for (a, b) in s.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{s:?}");
    }
}

#[test]
fn item_item_matches_double_loop() {
    let m = toy_model();
    let consumed = [0u32, 2, 3];
    let scores = item_item_scores(&m, 0, &consumed).unwrap();
    for (i, &score) in scores.iter().enumerate() {
        let mut total = 0.0;
        for &j in &consumed {
            total += scalar_cosine(&row(m.item(i)), &row(m.item(j as usize)));
        }
        assert!((score - total / 3.0).abs() < 1e-12);
    }
}

#[test]
fn item_item_average_of_two_cosines() {
    // c at 60 degrees from a and at acos(0.3) from b
    let b_angle = 0.3f64.acos();
    let m = EmbeddingModel::from_parts(
        1,
        3,
        2,
        vec![1.0, 0.0],
        vec![1.0, 0.0, b_angle.cos() as f32, b_angle.sin() as f32, 0.5, (0.75f64).sqrt() as f32],
    )
    .unwrap();
    let ab = scalar_cosine(&row(m.item(0)), &row(m.item(2)));
    let cb = scalar_cosine(&row(m.item(1)), &row(m.item(2)));
    let s = item_item_scores(&m, 0, &[0, 1]).unwrap();
    assert!((s[2] - (ab + cb) / 2.0).abs() < 1e-12);
    assert!((ab - 0.5).abs() < 1e-6);
}

#[test]
fn weighted_reduces_to_components() {
    let m = toy_model();
    let su = user_item_scores(&m, 1).unwrap();
    let si = item_item_scores(&m, 1, &[1]).unwrap();
    let w = weighted_scores(&m, 1, &[1], 0.5, 0.5).unwrap();
    for i in 0..4 {
        assert!((w[i] - (su[i] + si[i]) / 2.0).abs() < 1e-15);
    }
    assert_eq!(weighted_scores(&m, 1, &[1], 1.0, 0.0).unwrap(), su);
}

fn toy_history() -> InteractionDataset {
    InteractionDataset::from_pairs(
        vec!["a".into(), "b".into(), "c".into()],
        vec!["x".into(), "y".into()],
        vec![(0, 0), (1, 0), (2, 0), (2, 1)],
    )
    .unwrap()
}

#[test]
fn combine_all_is_mean_of_consumers() {
    let m = EmbeddingModel::from_parts(3, 2, 2, vec![1.0, 2.0, -0.5, 0.25, 3.0, -1.0], vec![0.5, 0.5, 1.0, -1.0]).unwrap();
    let ds = toy_history();
    let aug = combine_embeddings(&m, &ds, Neighbours::All).unwrap();
    assert_eq!(aug.dim, 4);
    let mean = [(1.0 - 0.5 + 3.0) / 3.0, (2.0 + 0.25 - 1.0) / 3.0];
    assert_eq!(&aug.row(0)[..2], &[0.5, 0.5]);
    assert!((aug.row(0)[2] - mean[0]).abs() < 1e-12 && (aug.row(0)[3] - mean[1]).abs() < 1e-12);
    // single consumer
    assert_eq!(&aug.row(1)[2..], &[3.0, -1.0]);
    // K = 1 picks the consumer most aligned with (0.5, 0.5)
    let nearest = combine_embeddings(&m, &ds, Neighbours::Count(1)).unwrap();
    let best = (0..3)
        .max_by(|&a, &b| scalar_cosine(&[0.5, 0.5], &row(m.user(a))).total_cmp(&scalar_cosine(&[0.5, 0.5], &row(m.user(b)))))
        .unwrap();
    assert_eq!(&nearest.row(0)[2..], &row(m.user(best))[..]);
}

#[test]
fn similarity_table_matches_scan() {
    let items: Vec<f32> = vec![1.0, 0.0, 0.9, 0.1, 0.0, 1.0, -1.0, 0.2, 0.6, 0.6];
    let m = EmbeddingModel::from_parts(1, 5, 2, vec![1.0, 0.0], items).unwrap();
    let keys: Vec<String> = (0..5).map(|i| format!("k{i}")).collect();
    let seeds: Vec<String> = keys.clone();
    let table = similarity_table(&m, &keys, &seeds, 3).unwrap();
    for (s, entry) in table.iter().enumerate() {
        let mut scan: Vec<(f64, usize)> =
            (0..5).filter(|&j| j != s).map(|j| (scalar_cosine(&row(m.item(s)), &row(m.item(j))), j)).collect();
        scan.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let got = entry.neighbours.as_ref().unwrap();
        assert_eq!(got.len(), 3);
        for (g, e) in got.iter().zip(&scan) {
            assert_eq!(g.0 as usize, e.1);
            assert!((g.1 - e.0).abs() < 1e-12);
        }
    }
}

#[test]
fn duplicate_embedding_ranks_first() {
    let m = EmbeddingModel::from_parts(1, 3, 2, vec![1.0, 0.0], vec![0.3, 0.7, 1.0, 0.0, 0.3, 0.7]).unwrap();
    let keys: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let table = similarity_table(&m, &keys, &["a".into()], 2).unwrap();
    let first = table[0].neighbours.as_ref().unwrap()[0];
    assert_eq!(first.0, 2);
    assert!((first.1 - 1.0).abs() < 1e-12);
}

fn history_model() -> (EmbeddingModel, InteractionDataset) {
    let ds = InteractionDataset::from_pairs(
        (0..4).map(|u| format!("u{u}")).collect(),
        (0..6).map(|i| format!("i{i}")).collect(),
        vec![(0, 0), (0, 1), (1, 1), (1, 2), (2, 3), (2, 4), (3, 5), (3, 0), (2, 2)],
    )
    .unwrap();
    let users: Vec<f32> = (0..12).map(|k| ((k * 7 % 11) as f32 - 5.0) / 4.0).collect();
    let items: Vec<f32> = (0..18).map(|k| ((k * 5 % 13) as f32 - 6.0) / 5.0).collect();
    (EmbeddingModel::from_parts(4, 6, 3, users, items).unwrap(), ds)
}

fn all_strategies() -> Vec<Strategy> {
    vec![
        Strategy::UserItem,
        Strategy::ItemItem,
        Strategy::Weighted { beta: 0.75, mu: 0.25 },
        Strategy::Combined { k: Neighbours::Count(1) },
        Strategy::Ensemble(EnsembleConfig {
            depth: 4,
            members: vec![Strategy::UserItem, Strategy::ItemItem],
            method_weights: Some(vec![0.4, 0.6]),
            rank_weight: RankWeight::Linear,
        }),
    ]
}

#[test]
fn no_ranking_contains_history() {
    let (m, ds) = history_model();
    for strategy in all_strategies() {
        let rec = Recommender::new(&m, &ds, &StrategyConfig::new(strategy, 3)).unwrap();
        for u in 0..4 {
            let r = rec.recommend(u).unwrap();
            assert!(r.items.iter().all(|i| !ds.user_items(u).contains(i)));
            assert!(r.scores.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}

#[test]
fn weighted_extremes_reproduce_components() {
    let (m, ds) = history_model();
    let rank = |s: Strategy, u| Recommender::new(&m, &ds, &StrategyConfig::new(s, 5)).unwrap().recommend(u).unwrap().items;
    for u in 0..4 {
        assert_eq!(rank(Strategy::Weighted { beta: 1.0, mu: 0.0 }, u), rank(Strategy::UserItem, u));
        assert_eq!(rank(Strategy::Weighted { beta: 0.0, mu: 1.0 }, u), rank(Strategy::ItemItem, u));
    }
}

#[test]
fn single_member_ensemble_is_identity() {
    let (m, ds) = history_model();
    for member in [Strategy::UserItem, Strategy::Combined { k: Neighbours::All }] {
        let ens = Strategy::Ensemble(EnsembleConfig {
            depth: 3,
            members: vec![member.clone()],
            method_weights: None,
            rank_weight: RankWeight::Log,
        });
        let a = Recommender::new(&m, &ds, &StrategyConfig::new(ens, 3)).unwrap();
        let b = Recommender::new(&m, &ds, &StrategyConfig::new(member, 3)).unwrap();
        for u in 0..4 {
            assert_eq!(a.recommend(u).unwrap().items, b.recommend(u).unwrap().items);
        }
    }
}

#[test]
fn ensemble_depth_below_top_n_rejected() {
    let (m, ds) = history_model();
    let ens = Strategy::Ensemble(EnsembleConfig {
        depth: 10,
        members: vec![Strategy::UserItem],
        method_weights: None,
        rank_weight: RankWeight::Off,
    });
    assert!(Recommender::new(&m, &ds, &StrategyConfig::new(ens, 15)).is_err());
}

proptest! {
    #[test]
    fn cosine_symmetric_and_scale_invariant(
        a in prop::collection::vec(-10.0f64..10.0, 6),
        b in prop::collection::vec(-10.0f64..10.0, 6),
        c in 0.01f64..100.0,
    ) {
        let ab = cosine(&a, &b).unwrap();
        prop_assert!((ab - cosine(&b, &a).unwrap()).abs() < 1e-12);
        let scaled: Vec<f64> = a.iter().map(|x| x * c).collect();
        prop_assert!((ab - cosine(&scaled, &b).unwrap()).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn rescaled_query_keeps_ranking(c in 0.1f32..10.0, u in 0usize..4) {
        let (m, ds) = history_model();
        let mut scaled = m.clone();
        scaled.user_mut(u).iter_mut().for_each(|x| *x *= c);
        let cfg = StrategyConfig::new(Strategy::UserItem, 6);
        let a = Recommender::new(&m, &ds, &cfg).unwrap().recommend(u).unwrap();
        let b = Recommender::new(&scaled, &ds, &cfg).unwrap().recommend(u).unwrap();
        for (x, y) in a.scores.iter().zip(&b.scores) {
            prop_assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn top_n_is_sorted_and_excludes(scores in prop::collection::vec(-1.0f64..1.0, 1..30), n in 1usize..40) {
        let consumed: Vec<u32> = (0..scores.len() as u32).step_by(3).collect();
        let r = top_n(0, &scores, &consumed, n);
        prop_assert_eq!(r.items.len(), n.min(scores.len() - consumed.len()));
        prop_assert!(r.items.iter().all(|i| !consumed.contains(i)));
        for w in r.items.windows(2) {
            let (a, b) = (scores[w[0] as usize], scores[w[1] as usize]);
            prop_assert!(a > b || (a == b && w[0] < w[1]));
        }
    }
}
