use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mann_bench::{config, symmetric, synthetic};
use mann_core::eigen::DEFAULT_TOLERANCE;
use mann_core::mann::fit;
use mann_core::{
    classify, fit_2dpca, jacobi_eigh, mlp_init, mlp_train, BlockGrid, FeatureConfig, Orientation,
    TrainConfig,
};

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi_eigh");
    for n in [8, 16, 32] {
        let s = symmetric(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| {
            b.iter(|| jacobi_eigh(black_box(s), DEFAULT_TOLERANCE).unwrap())
        });
    }
    group.finish();
}

fn projection(c: &mut Criterion) {
    let data = synthetic();
    let mut group = c.benchmark_group("fit_2dpca");
    for o in Orientation::ALL {
        group.bench_function(o.name(), |b| {
            b.iter(|| fit_2dpca(black_box(&data.images), 4, o, Some(BlockGrid::default())).unwrap())
        });
    }
    group.finish();
}

fn training(c: &mut Criterion) {
    let inputs: Vec<Vec<f64>> = (0..200)
        .map(|i| {
            (0..16)
                .map(|j| ((i * 31 + j * 7) % 17) as f64 / 17.0)
                .collect()
        })
        .collect();
    let targets: Vec<Vec<f64>> = (0..200)
        .map(|i| (0..6).map(|k| if i % 6 == k { 1.0 } else { 0.0 }).collect())
        .collect();
    let init = mlp_init(16, 16, 6, 3).unwrap();
    let cfg = TrainConfig {
        epochs: 10,
        ..TrainConfig::default()
    };
    c.bench_function("mlp_train 16-16-6, 200 samples, 10 epochs", |b| {
        b.iter(|| mlp_train(&init, black_box(&inputs), &targets, &cfg).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let data = synthetic();
    let features = FeatureConfig {
        d: [1; 4],
        block_grid: BlockGrid::default(),
    };
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    group.bench_function("fit 300 images, 50 epochs", |b| {
        b.iter(|| {
            fit(
                &data.images,
                &data.labels,
                data.label_names.clone(),
                &features,
                &config(50),
                1,
            )
            .unwrap()
        })
    });
    let (model, _) = fit(
        &data.images,
        &data.labels,
        data.label_names.clone(),
        &features,
        &config(50),
        1,
    )
    .unwrap();
    group.bench_function("classify one image", |b| {
        b.iter(|| classify(&model, black_box(&data.images[17])).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eigen, projection, training, pipeline);
criterion_main!(benches);
