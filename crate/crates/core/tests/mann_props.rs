use mann_core::mann::{
    combine_average, combine_selection, combine_weighted, decide, fit, fuse, one_hot, snn_outputs,
    train_global, train_local,
};
use mann_core::{
    classify, evaluate, synth_dataset, BlockGrid, Decision, EvalOptions, FeatureConfig, MannConfig,
    Rng, TrainConfig,
};

fn random_outputs(m: usize, l: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..l).map(|_| rng.unit()).collect())
        .collect()
}

/// Clusters with uniform jitter: class `c` sits at `e_(c mod dim)` plus
/// `0.5 e_(c / dim mod dim)`, the same in every space apart from scale.
fn clustered_spaces(
    m: usize,
    l: usize,
    per_class: usize,
    dim: usize,
    seed: u64,
) -> (Vec<Vec<Vec<f64>>>, Vec<usize>) {
    let mut rng = Rng::new(seed);
    let labels: Vec<usize> = (0..l * per_class).map(|i| i % l).collect();
    let spaces = (0..m)
        .map(|s| {
            labels
                .iter()
                .map(|&c| {
                    (0..dim)
                        .map(|j| {
                            let centre = if j == c % dim { 1.0 } else { 0.0 }
                                + if j == (c / dim) % dim { 0.5 } else { 0.0 };
                            centre * (1.0 + s as f64 * 0.1) + rng.uniform(-0.1, 0.1)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    (spaces, labels)
}

fn small_config(m: usize, l: usize, epochs: usize) -> MannConfig {
    let mut cfg = MannConfig::new(m, l);
    cfg.snn_hidden = 6;
    cfg.cnn_hidden = 3;
    cfg.train = TrainConfig {
        epochs,
        learning_rate: 0.3,
        ..TrainConfig::default()
    };
    cfg
}

#[test]
fn weighted_one_hot_selects_exactly() {
    let mut rng = Rng::new(1);
    for _ in 0..50 {
        let m = 1 + rng.below(6);
        let l = 1 + rng.below(7);
        let outputs = random_outputs(m, l, &mut rng);
        for i in 0..m {
            let r = one_hot(i, m);
            let weighted = combine_weighted(&outputs, &r).unwrap();
            assert_eq!(weighted, combine_selection(&outputs, i).unwrap());
            assert_eq!(weighted, outputs[i]);
        }
    }
}

#[test]
fn weighted_uniform_is_the_average() {
    let mut rng = Rng::new(2);
    for _ in 0..50 {
        let m = 1 + rng.below(6);
        let l = 1 + rng.below(7);
        let outputs = random_outputs(m, l, &mut rng);
        let weighted = combine_weighted(&outputs, &vec![1.0 / m as f64; m]).unwrap();
        // mean computed independently, in a different summation order
        for k in 0..l {
            let mean = outputs.iter().rev().map(|o| o[k]).sum::<f64>() / m as f64;
            assert!((weighted[k] - mean).abs() <= 1e-12);
        }
        let average = combine_average(&outputs).unwrap();
        for (a, b) in weighted.iter().zip(&average) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn collective_vectors_are_the_transpose() {
    let mut rng = Rng::new(3);
    for _ in 0..50 {
        let m = 1 + rng.below(6);
        let l = 1 + rng.below(7);
        let outputs = random_outputs(m, l, &mut rng);
        let cv = mann_core::mann::collective_vectors(&outputs).unwrap();
        assert_eq!(cv.len(), l);
        for (k, r) in cv.iter().enumerate() {
            assert_eq!(r.k, k);
            for (v, o) in r.values.iter().zip(&outputs) {
                assert_eq!(v.to_bits(), o[k].to_bits());
            }
        }
        let back: Vec<Vec<f64>> = (0..m)
            .map(|i| cv.iter().map(|r| r.values[i]).collect())
            .collect();
        assert_eq!(back, outputs);
    }
}

#[test]
fn mismatched_stacks_are_rejected() {
    let ragged = vec![vec![0.1, 0.2], vec![0.3]];
    assert!(combine_average(&ragged).is_err());
    assert!(combine_weighted(&[vec![0.1], vec![0.2]], &[1.0]).is_err());
    assert!(combine_selection(&[vec![0.1]], 1).is_err());
}

#[test]
fn global_training_leaves_sub_networks_untouched() {
    let (spaces, labels) = clustered_spaces(3, 3, 8, 3, 4);
    let cfg = small_config(3, 3, 20);
    let snns = train_local(&spaces, &labels, &cfg, 1).unwrap();
    let before = snns.clone();
    let cnns = train_global(&snns, &spaces, &labels, &cfg, 1).unwrap();
    assert_eq!(snns, before);
    for (a, b) in snns.iter().zip(&before) {
        assert!(a
            .w1
            .as_slice()
            .iter()
            .zip(b.w1.as_slice())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(a
            .w2
            .as_slice()
            .iter()
            .zip(b.w2.as_slice())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }
    assert_eq!(cnns.len(), 3);
}

#[test]
fn architecture_dimensions() {
    for (m, l) in [(2, 3), (4, 6)] {
        let dim = 5;
        let (spaces, labels) = clustered_spaces(m, l, 3, dim, 6);
        let cfg = small_config(m, l, 2);
        let snns = train_local(&spaces, &labels, &cfg, 1).unwrap();
        assert_eq!(snns.len(), m);
        for net in &snns {
            assert_eq!(
                (net.n_in, net.n_hidden, net.n_out),
                (dim, cfg.snn_hidden, l)
            );
            assert_eq!(net.w1.shape(), (cfg.snn_hidden, dim + 1));
            assert_eq!(net.w2.shape(), (l, cfg.snn_hidden + 1));
        }
        let cnns = train_global(&snns, &spaces, &labels, &cfg, 1).unwrap();
        assert_eq!(cnns.len(), l);
        for net in &cnns {
            assert_eq!((net.n_in, net.n_hidden, net.n_out), (m, cfg.cnn_hidden, 1));
            assert_eq!(net.w1.shape(), (cfg.cnn_hidden, m + 1));
            assert_eq!(net.w2.shape(), (1, cfg.cnn_hidden + 1));
        }
        let spaces0: Vec<&[f64]> = spaces.iter().map(|s| s[0].as_slice()).collect();
        let outputs = snn_outputs(&snns, &spaces0).unwrap();
        assert_eq!(outputs.len(), m);
        assert!(outputs.iter().all(|o| o.len() == l));
        let scores = fuse(&cnns, &outputs).unwrap();
        assert_eq!(scores.len(), l);
        assert!(scores.iter().all(|&s| (0.0..=1.0).contains(&s)));
    }
}

#[test]
fn component_networks_learn_perfect_collective_vectors() {
    // Sub-networks that already answer one-hot: the component networks
    // should learn to pass the agreed class through.
    use mann_core::mann::train_global_with_history;
    use mann_core::Mlp;
    let (m, l) = (3, 4);
    let per_class = 10;
    let labels: Vec<usize> = (0..l * per_class).map(|i| i % l).collect();
    // an identity-like sub-network on one-hot features: large weights on the
    // diagonal, negative bias, so outputs are near one-hot
    let identity_net = || {
        let mut net = mann_core::mlp_init(l, l, l, 0).unwrap();
        net.w1 = mann_core::Matrix::from_fn(l, l + 1, |i, j| {
            if j == l {
                -10.0
            } else if i == j {
                20.0
            } else {
                0.0
            }
        });
        net.w2 = mann_core::Matrix::from_fn(l, l + 1, |i, j| {
            if j == l {
                -10.0
            } else if i == j {
                20.0
            } else {
                0.0
            }
        });
        net
    };
    let snns: Vec<Mlp> = (0..m).map(|_| identity_net()).collect();
    let spaces: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|_| labels.iter().map(|&c| one_hot(c, l)).collect())
        .collect();
    let mut cfg = small_config(m, l, 400);
    cfg.train.learning_rate = 0.5;
    let trained = train_global_with_history(&snns, &spaces, &labels, &cfg, 2).unwrap();
    for (k, (_, history)) in trained.iter().enumerate() {
        let mse = 2.0 * history.last().unwrap();
        assert!(mse < 0.01, "CNN_{k}: mse {mse}");
    }
}

#[test]
fn local_training_separates_clusters() {
    let (spaces, labels) = clustered_spaces(2, 4, 15, 4, 8);
    let cfg = small_config(2, 4, 200);
    let snns = train_local(&spaces, &labels, &cfg, 2).unwrap();
    for (i, net) in snns.iter().enumerate() {
        let correct = spaces[i]
            .iter()
            .zip(&labels)
            .filter(|(x, &c)| {
                let out = net.forward(x).unwrap();
                mann_core::mann::argmax(&out) == Some(c)
            })
            .count();
        assert!(
            correct as f64 / labels.len() as f64 > 0.9,
            "SNN_{i}: {correct}/{}",
            labels.len()
        );
    }
}

#[test]
fn job_count_does_not_change_the_result() {
    let (spaces, labels) = clustered_spaces(4, 3, 6, 4, 10);
    let cfg = small_config(4, 3, 15);
    let a = train_local(&spaces, &labels, &cfg, 1).unwrap();
    let b = train_local(&spaces, &labels, &cfg, 4).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        train_global(&a, &spaces, &labels, &cfg, 1).unwrap(),
        train_global(&b, &spaces, &labels, &cfg, 3).unwrap()
    );
}

#[test]
fn decision_follows_argmax_and_threshold() {
    let mut rng = Rng::new(12);
    for _ in 0..200 {
        let l = 1 + rng.below(6);
        let scores: Vec<f64> = (0..l).map(|_| (rng.below(5) as f64) / 4.0).collect();
        let t = rng.unit();
        // reference: first index holding the maximum
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let first = scores.iter().position(|&s| s == max).unwrap();
        let expected = if max > t {
            Decision::Class(first)
        } else {
            Decision::Reject
        };
        assert_eq!(decide(&scores, t), expected);
        // a strictly increasing map that keeps values in [0, 1] and fixes the
        // threshold's image keeps the decision
        let f = |x: f64| x * x;
        let mapped: Vec<f64> = scores.iter().map(|&s| f(s)).collect();
        assert_eq!(decide(&mapped, f(t)), expected);
    }
    assert_eq!(decide(&[0.7, 0.7], 0.5), Decision::Class(0));
    assert_eq!(decide(&[0.5, 0.5], 0.5), Decision::Reject);
    assert_eq!(decide(&[0.999, 0.2], 0.999), Decision::Reject);
}

fn synthetic_fit(seed: u64, jobs: usize) -> (mann_core::MannModel, mann_core::Dataset) {
    let data = synth_dataset(3, 12, (8, 8), 5, 0.1).unwrap();
    let features = FeatureConfig {
        d: [2; 4],
        block_grid: BlockGrid::default(),
    };
    let mut cfg = MannConfig::new(4, 3);
    cfg.master_seed = seed;
    cfg.snn_hidden = 6;
    cfg.cnn_hidden = 3;
    cfg.train.epochs = 30;
    let (model, _) = fit(
        &data.images,
        &data.labels,
        data.label_names.clone(),
        &features,
        &cfg,
        jobs,
    )
    .unwrap();
    (model, data)
}

#[test]
fn whole_pipeline_is_deterministic() {
    let (a, data) = synthetic_fit(42, 1);
    let (b, _) = synthetic_fit(42, 4);
    assert_eq!(a, b);
    for img in &data.images {
        let x = classify(&a, img).unwrap();
        let y = classify(&b, img).unwrap();
        assert_eq!(x, y);
    }
    let (c, _) = synthetic_fit(43, 1);
    assert_ne!(a.snns, c.snns);
}

#[test]
fn evaluation_counts_match_a_recount() {
    let (model, data) = synthetic_fit(1, 2);
    let opts = EvalOptions {
        reliability: Some(vec![0.4, 0.3, 0.2, 0.1]),
        threshold: Some(0.6),
    };
    let rep = evaluate(&model, &data.images, &data.labels, &opts).unwrap();
    let names: Vec<&str> = rep.methods.iter().map(|m| m.name.as_str()).collect();
    assert_eq!(
        names,
        ["SNN_1", "SNN_2", "SNN_3", "SNN_4", "Average", "Weighted", "MANN"]
    );
    for m in &rep.methods {
        let correct = m
            .predictions
            .iter()
            .zip(&data.labels)
            .filter(|(p, &c)| **p == Decision::Class(c))
            .count();
        assert_eq!(
            m.accuracy,
            correct as f64 / data.labels.len() as f64,
            "{}",
            m.name
        );
        let total: usize = m.confusion.iter().flatten().sum();
        assert_eq!(total, data.labels.len());
    }
    let mann = rep.method("MANN").unwrap();
    for (img, p) in data.images.iter().zip(&mann.predictions) {
        let scores = classify(&model, img).unwrap().scores;
        assert_eq!(*p, decide(&scores, 0.6));
    }
    for m in &rep.methods[..6] {
        assert!(m.predictions.iter().all(|p| *p != Decision::Reject));
    }
}
