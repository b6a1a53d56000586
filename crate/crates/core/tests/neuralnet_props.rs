use mann_core::{mlp_gradient_check, mlp_init, mlp_train, Rng, TrainConfig};

#[test]
fn backprop_matches_finite_differences() {
    let mut rng = Rng::new(2024);
    for trial in 0..20 {
        let n_in = 1 + rng.below(5);
        let n_hidden = 1 + rng.below(6);
        let n_out = 1 + rng.below(4);
        let net = mlp_init(n_in, n_hidden, n_out, trial).unwrap();
        let x: Vec<f64> = (0..n_in).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let t: Vec<f64> = (0..n_out).map(|_| rng.unit()).collect();
        let err = mlp_gradient_check(&net, &x, &t, 1e-5).unwrap();
        assert!((0.0..1e-4).contains(&err), "trial {trial}: {err}");
    }
}

#[test]
fn loss_mostly_decreases_on_separable_data() {
    let mut rng = Rng::new(5);
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    for i in 0..40 {
        let class = i % 2;
        let centre = if class == 0 { -1.0 } else { 1.0 };
        inputs.push(vec![
            centre + rng.uniform(-0.4, 0.4),
            centre + rng.uniform(-0.4, 0.4),
        ]);
        targets.push(vec![class as f64]);
    }
    let cfg = TrainConfig {
        learning_rate: 0.1,
        epochs: 300,
        seed: 1,
        shuffle: true,
    };
    let (_, history) = mlp_train(&mlp_init(2, 3, 1, 4).unwrap(), &inputs, &targets, &cfg).unwrap();
    let tail = &history[10..];
    let rises = tail.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(
        rises * 20 < tail.len(),
        "{rises} increases in {} steps",
        tail.len() - 1
    );
    assert!(history.last().unwrap() < &history[0]);
}

#[test]
fn identical_seeds_give_identical_weights() {
    let inputs: Vec<Vec<f64>> = (0..12)
        .map(|i| vec![(i as f64).sin(), (i as f64).cos(), 0.5])
        .collect();
    let targets: Vec<Vec<f64>> = (0..12)
        .map(|i| vec![(i % 3 == 0) as u8 as f64, (i % 3 == 1) as u8 as f64])
        .collect();
    let cfg = TrainConfig {
        epochs: 40,
        seed: 99,
        ..TrainConfig::default()
    };
    let run = || mlp_train(&mlp_init(3, 5, 2, 17).unwrap(), &inputs, &targets, &cfg).unwrap();
    let (a, ha) = run();
    let (b, hb) = run();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
    let other = TrainConfig { seed: 100, ..cfg };
    let (c, _) = mlp_train(&mlp_init(3, 5, 2, 17).unwrap(), &inputs, &targets, &other).unwrap();
    assert_ne!(a, c);
}
