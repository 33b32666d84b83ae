use interact2vec::dataset::{split_dataset, EvalSet, SplitRatios};
use interact2vec::eval::{
    evaluate, grid_search, sensitivity_sweep, ModelGrid, Selection, StrategyGrid, StrategyKind, SweepParameter,
};
use interact2vec::model::train;
use interact2vec::recommend::{cosine, Recommender, Strategy, StrategyConfig};
use interact2vec::synthetic::two_block;
use interact2vec::TrainConfig;

fn small_cfg() -> TrainConfig {
    TrainConfig { dim: 8, epochs: 3, subsample_rho: 1.0, learning_rate: 0.025, seed: 9, ..TrainConfig::default() }
}

fn block_gap(model: &interact2vec::EmbeddingModel, blocks: &[usize]) -> f64 {
    let (mut within, mut across, mut nw, mut na) = (0.0, 0.0, 0, 0);
    for a in 0..blocks.len() {
        for b in a + 1..blocks.len() {
            let c = cosine(model.item(a), model.item(b)).unwrap();
            if blocks[a] == blocks[b] {
                within += c;
                nw += 1;
            } else {
                across += c;
                na += 1;
            }
        }
    }
    within / nw as f64 - across / na as f64
}

#[test]
fn objective_block_means_descend() {
    // small step, no subsampling or penalty; 5-epoch block means from epoch 5 on
    let blocks = two_block(0);
    let cfg = TrainConfig {
        dim: 16,
        epochs: 50,
        subsample_rho: 1.0,
        regularization: 0.0,
        learning_rate: 0.0025,
        seed: 0,
        ..TrainConfig::default()
    };
    let out = train(&blocks.dataset, &cfg).unwrap();
    let losses: Vec<f64> = out.trace.iter().map(|e| e.mean_loss).collect();
    assert!(losses.iter().all(|l| l.is_finite()));
    let means: Vec<f64> = losses[5..].chunks(5).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    for w in means.windows(2) {
        assert!(w[1] <= w[0] + 1e-3, "{means:?}");
    }
    assert!(means.last().unwrap() < &means[0]);
}

#[test]
fn block_structure_emerges_with_small_step() {
    let blocks = two_block(1);
    let cfg = TrainConfig { dim: 16, epochs: 50, subsample_rho: 1.0, learning_rate: 0.025, seed: 1, ..TrainConfig::default() };
    let model = train(&blocks.dataset, &cfg).unwrap().model;
    let gap = block_gap(&model, &blocks.item_block);
    assert!(gap >= 0.2, "gap {gap}");
}

#[test]
fn evaluate_matches_scripted_loop() {
    let blocks = two_block(2);
    let split = split_dataset(&blocks.dataset, SplitRatios::new(0.8, 0.1, 0.1).unwrap(), 2).unwrap();
    let model = train(&split.train, &small_cfg()).unwrap().model;
    let cfg = StrategyConfig::new(Strategy::Weighted { beta: 0.5, mu: 0.5 }, 10);
    let report = evaluate(&split, &model, &cfg, EvalSet::Test).unwrap();

    let rec = Recommender::new(&model, &split.train, &cfg).unwrap();
    let truth = split.ground_truth(EvalSet::Test);
    let (mut p, mut r, mut g, mut users) = (0.0, 0.0, 0.0, 0);
    for (u, t) in truth.iter().enumerate() {
        if t.is_empty() {
            continue;
        }
        users += 1;
        let ranked = rec.recommend_n(u, 10).unwrap().items;
        let hits: Vec<bool> = ranked.iter().map(|i| t.contains(i)).collect();
        let h = hits.iter().filter(|&&x| x).count() as f64;
        p += h / 10.0;
        r += h / t.len() as f64;
        let dcg: f64 = hits.iter().enumerate().filter(|x| *x.1).map(|(k, _)| 1.0 / ((k + 2) as f64).log2()).sum();
        let idcg: f64 = (0..t.len().min(10)).map(|k| 1.0 / ((k + 2) as f64).log2()).sum();
        g += dcg / idcg;
    }
    let at = report.at(10);
    assert_eq!(report.users_evaluated, users);
    assert!((at.precision - p / users as f64).abs() < 1e-12);
    assert!((at.recall - r / users as f64).abs() < 1e-12);
    assert!((at.ndcg - g / users as f64).abs() < 1e-12);
}

#[test]
fn grid_matches_exhaustive_loop() {
    let blocks = two_block(3);
    let split = split_dataset(&blocks.dataset, SplitRatios::new(0.8, 0.1, 0.1).unwrap(), 3).unwrap();
    let models = ModelGrid { base: small_cfg(), dims: vec![4, 8], negatives: vec![2], neg_exponents: vec![0.75] };
    let strategies = StrategyGrid { kinds: vec![StrategyKind::UserItem, StrategyKind::ItemItem], ..StrategyGrid::default() };
    let selection: Selection = "ndcg@10".parse().unwrap();
    let result = grid_search(&split, &models, &strategies, selection, |_| {}).unwrap();
    assert_eq!(result.rows.len(), 4);

    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut k = 0;
    for dim in [4, 8] {
        let cfg = TrainConfig { dim, negatives: 2, ..small_cfg() };
        let model = train(&split.train, &cfg).unwrap().model;
        for s in [Strategy::UserItem, Strategy::ItemItem] {
            let v = evaluate(&split, &model, &StrategyConfig::new(s, 10), EvalSet::Validation).unwrap().value(selection);
            let got = result.rows[k].outcome.as_ref().unwrap().value(selection);
            assert_eq!(v, got);
            if v > best.0 {
                best = (v, k);
            }
            k += 1;
        }
    }
    assert_eq!(result.best, Some(best.1));
}

#[test]
fn single_value_sweep_equals_evaluate() {
    let blocks = two_block(4);
    let split = split_dataset(&blocks.dataset, SplitRatios::new(0.8, 0.1, 0.1).unwrap(), 4).unwrap();
    let strategy = StrategyConfig::new(Strategy::UserItem, 15);
    let points =
        sensitivity_sweep(&split, SweepParameter::Negatives, &[3.0], &small_cfg(), &strategy, EvalSet::Validation).unwrap();
    let cfg = TrainConfig { negatives: 3, ..small_cfg() };
    let model = train(&split.train, &cfg).unwrap().model;
    let direct = evaluate(&split, &model, &strategy, EvalSet::Validation).unwrap();
    assert_eq!(points[0].outcome.as_ref().unwrap().metrics, direct.metrics);
}
