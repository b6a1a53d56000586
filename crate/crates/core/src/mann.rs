//! The two-level ensemble: `m` sub-networks (one per feature space) and `l`
//! component networks (one per class).
//!
//! Sub-network `i` sees only feature space `i` and has `l` outputs. For class
//! `k` the collective vector `R_k` gathers the `k`-th output of every
//! sub-network, and component network `k` maps `R_k` to a single score.
//! Training runs in two phases: sub-networks first, then component networks
//! on the frozen sub-network outputs.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    extract_feature_set, fit_bases, order_bases, FeatureConfig, FeatureSet, ProjectionBasis,
};
use crate::matrix::Matrix;
use crate::neuralnet::{mlp_init, mlp_train, Mlp, TrainConfig};

/// Offset added to the master seed for component network seeds.
pub const CNN_SEED_OFFSET: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannConfig {
    /// Number of feature spaces, one sub-network each.
    pub m: usize,
    /// Number of classes, one component network each.
    pub l: usize,
    pub snn_hidden: usize,
    pub cnn_hidden: usize,
    pub threshold: f64,
    /// Shared by both phases; its `seed` is ignored in favour of the
    /// per-network seeds derived from `master_seed`.
    pub train: TrainConfig,
    pub master_seed: u64,
}

impl MannConfig {
    pub fn new(m: usize, l: usize) -> Self {
        MannConfig {
            m,
            l,
            snn_hidden: 16,
            cnn_hidden: 4,
            threshold: 0.5,
            train: TrainConfig::default(),
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        if self.l < 2 {
            return Err(Error::param(format!(
                "need at least 2 classes, got {}",
                self.l
            )));
        }
        if self.snn_hidden == 0 || self.cnn_hidden == 0 {
            return Err(Error::param("hidden layer sizes must be positive"));
        }
        check_threshold(self.threshold)?;
        self.train.validate()
    }

    pub fn snn_seed(&self, i: usize) -> u64 {
        self.master_seed.wrapping_add(i as u64)
    }

    pub fn cnn_seed(&self, k: usize) -> u64 {
        self.master_seed
            .wrapping_add(CNN_SEED_OFFSET)
            .wrapping_add(k as u64)
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::param(format!(
            "threshold must be in (0, 1), got {t}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Class(usize),
    Reject,
}

impl Decision {
    pub fn class(self) -> Option<usize> {
        match self {
            Decision::Class(k) => Some(k),
            Decision::Reject => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationOutcome {
    pub scores: Vec<f64>,
    pub decision: Decision,
    pub threshold_used: f64,
}

/// Index of the largest score, lowest index on ties. `None` for no scores.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    best
}

/// The class with the largest score if that score exceeds `threshold`.
pub fn decide(scores: &[f64], threshold: f64) -> Decision {
    match argmax(scores) {
        Some(k) if scores[k] > threshold => Decision::Class(k),
        _ => Decision::Reject,
    }
}

/// `R_k`: the `k`-th output of every sub-network.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveVector {
    pub k: usize,
    pub values: Vec<f64>,
}

fn check_stack(outputs: &[Vec<f64>]) -> Result<usize> {
    let first = outputs
        .first()
        .ok_or_else(|| Error::shape("no sub-network outputs"))?;
    if let Some((i, o)) = outputs
        .iter()
        .enumerate()
        .find(|(_, o)| o.len() != first.len())
    {
        return Err(Error::shape(format!(
            "output {i} has length {}, expected {}",
            o.len(),
            first.len()
        )));
    }
    Ok(first.len())
}

/// Selection: the outputs of sub-network `k`, unchanged.
pub fn combine_selection(outputs: &[Vec<f64>], k: usize) -> Result<Vec<f64>> {
    outputs.get(k).cloned().ok_or(Error::Index {
        index: k,
        len: outputs.len(),
    })
}

/// Average: the elementwise mean of all sub-network outputs.
pub fn combine_average(outputs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let l = check_stack(outputs)?;
    let m = outputs.len() as f64;
    Ok((0..l)
        .map(|k| outputs.iter().map(|o| o[k]).sum::<f64>() / m)
        .collect())
}

/// Weighted: `Σ_i r_i · outputs_i`.
pub fn combine_weighted(outputs: &[Vec<f64>], r: &[f64]) -> Result<Vec<f64>> {
    let l = check_stack(outputs)?;
    if r.len() != outputs.len() {
        return Err(Error::shape(format!(
            "{} reliability coefficients for {} sub-networks",
            r.len(),
            outputs.len()
        )));
    }
    Ok((0..l)
        .map(|k| outputs.iter().zip(r).map(|(o, w)| w * o[k]).sum())
        .collect())
}

/// Transposes the `m x l` output stack into `l` collective vectors.
pub fn collective_vectors(outputs: &[Vec<f64>]) -> Result<Vec<CollectiveVector>> {
    let l = check_stack(outputs)?;
    Ok((0..l)
        .map(|k| CollectiveVector {
            k,
            values: outputs.iter().map(|o| o[k]).collect(),
        })
        .collect())
}

pub fn one_hot(label: usize, l: usize) -> Vec<f64> {
    (0..l).map(|k| if k == label { 1.0 } else { 0.0 }).collect()
}

/// Runs `f(0..n)` on at most `jobs` threads, keeping results in index order.
fn run_indexed<T, F>(n: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if jobs <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.min(n))
        .build()
        .map_err(|e| Error::Configuration(format!("cannot start worker threads: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

/// Features for training: `features[space][sample]` is one feature vector.
fn check_features(features: &[Vec<Vec<f64>>], labels: &[usize], cfg: &MannConfig) -> Result<()> {
    if features.len() != cfg.m {
        return Err(Error::Configuration(format!(
            "{} feature spaces for m = {}",
            features.len(),
            cfg.m
        )));
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset("no training samples".into()));
    }
    for (i, space) in features.iter().enumerate() {
        if space.len() != labels.len() {
            return Err(Error::shape(format!(
                "feature space {i} has {} samples, there are {} labels",
                space.len(),
                labels.len()
            )));
        }
    }
    if let Some(&label) = labels.iter().find(|&&c| c >= cfg.l) {
        return Err(Error::Label {
            label,
            classes: cfg.l,
        });
    }
    Ok(())
}

/// Phase one: trains sub-network `i` on feature space `i` against one-hot
/// targets. Returns each network with its per-epoch loss.
pub fn train_local_with_history(
    features: &[Vec<Vec<f64>>],
    labels: &[usize],
    cfg: &MannConfig,
    jobs: usize,
) -> Result<Vec<(Mlp, Vec<f64>)>> {
    cfg.validate()?;
    check_features(features, labels, cfg)?;
    let targets: Vec<Vec<f64>> = labels.iter().map(|&c| one_hot(c, cfg.l)).collect();
    run_indexed(cfg.m, jobs, |i| {
        let space = &features[i];
        let dim = space[0].len();
        let seed = cfg.snn_seed(i);
        let init = mlp_init(dim, cfg.snn_hidden, cfg.l, seed)?;
        let tc = TrainConfig { seed, ..cfg.train };
        mlp_train(&init, space, &targets, &tc)
    })
}

/// Phase one without the loss histories.
pub fn train_local(
    features: &[Vec<Vec<f64>>],
    labels: &[usize],
    cfg: &MannConfig,
    jobs: usize,
) -> Result<Vec<Mlp>> {
    Ok(train_local_with_history(features, labels, cfg, jobs)?
        .into_iter()
        .map(|(net, _)| net)
        .collect())
}

/// Sub-network outputs for one sample, given its per-space features.
pub fn snn_outputs(snns: &[Mlp], spaces: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    if snns.len() != spaces.len() {
        return Err(Error::Configuration(format!(
            "{} sub-networks for {} feature spaces",
            snns.len(),
            spaces.len()
        )));
    }
    snns.iter()
        .zip(spaces)
        .map(|(net, x)| net.forward(x))
        .collect()
}

/// Phase two: with the sub-networks frozen, trains component network `k` on
/// `(R_k, [label == k])` pairs. Returns each network with its per-epoch loss.
pub fn train_global_with_history(
    snns: &[Mlp],
    features: &[Vec<Vec<f64>>],
    labels: &[usize],
    cfg: &MannConfig,
    jobs: usize,
) -> Result<Vec<(Mlp, Vec<f64>)>> {
    cfg.validate()?;
    check_features(features, labels, cfg)?;
    if snns.len() != cfg.m {
        return Err(Error::Configuration(format!(
            "{} sub-networks for m = {}",
            snns.len(),
            cfg.m
        )));
    }
    for (i, (net, space)) in snns.iter().zip(features).enumerate() {
        net.validate()?;
        if net.n_out != cfg.l || net.n_in != space[0].len() {
            return Err(Error::Configuration(format!(
                "sub-network {i} is {}-{}-{}, expected {} inputs and {} outputs",
                net.n_in,
                net.n_hidden,
                net.n_out,
                space[0].len(),
                cfg.l
            )));
        }
    }

    // collective[k][sample] = R_k for that sample
    let mut collective: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(labels.len()); cfg.l];
    for s in 0..labels.len() {
        let spaces: Vec<&[f64]> = features.iter().map(|f| f[s].as_slice()).collect();
        let outputs = snn_outputs(snns, &spaces)?;
        for r in collective_vectors(&outputs)? {
            collective[r.k].push(r.values);
        }
    }
    run_indexed(cfg.l, jobs, |k| {
        let targets: Vec<Vec<f64>> = labels
            .iter()
            .map(|&c| vec![if c == k { 1.0 } else { 0.0 }])
            .collect();
        let seed = cfg.cnn_seed(k);
        let init = mlp_init(cfg.m, cfg.cnn_hidden, 1, seed)?;
        let tc = TrainConfig { seed, ..cfg.train };
        mlp_train(&init, &collective[k], &targets, &tc)
    })
}

/// Phase two without the loss histories.
pub fn train_global(
    snns: &[Mlp],
    features: &[Vec<Vec<f64>>],
    labels: &[usize],
    cfg: &MannConfig,
    jobs: usize,
) -> Result<Vec<Mlp>> {
    Ok(
        train_global_with_history(snns, features, labels, cfg, jobs)?
            .into_iter()
            .map(|(net, _)| net)
            .collect(),
    )
}

/// Component network scores for one sample's sub-network outputs.
pub fn fuse(cnns: &[Mlp], outputs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let vectors = collective_vectors(outputs)?;
    if vectors.len() != cnns.len() {
        return Err(Error::Configuration(format!(
            "{} component networks for {} classes",
            cnns.len(),
            vectors.len()
        )));
    }
    cnns.iter()
        .zip(&vectors)
        .map(|(net, r)| Ok(net.forward(&r.values)?[0]))
        .collect()
}

/// A trained ensemble together with the four projection bases it reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MannModel {
    pub config: MannConfig,
    /// Column, row, diagonal and block bases, in that order.
    pub bases: Vec<ProjectionBasis>,
    pub snns: Vec<Mlp>,
    pub cnns: Vec<Mlp>,
    pub labels: Vec<String>,
}

impl MannModel {
    pub fn validate(&self) -> Result<()> {
        let cfg = &self.config;
        cfg.validate()
            .map_err(|e| Error::Configuration(format!("model config: {e}")))?;
        let bad = |msg: String| Err(Error::Configuration(msg));
        if self.bases.len() != cfg.m {
            return bad(format!("{} bases for m = {}", self.bases.len(), cfg.m));
        }
        let ordered = order_bases(&self.bases)?;
        for (b, o) in self.bases.iter().zip(ordered) {
            if b.orientation != o.orientation {
                return bad("bases are not in column, row, diagonal, block order".into());
            }
            b.validate()?;
        }
        let shape = self.bases[0].image_shape();
        if let Some(b) = self.bases.iter().find(|b| b.image_shape() != shape) {
            return bad(format!(
                "{} basis expects a different image shape",
                b.orientation
            ));
        }
        if self.snns.len() != cfg.m {
            return bad(format!(
                "{} sub-networks for m = {}",
                self.snns.len(),
                cfg.m
            ));
        }
        for (i, (net, basis)) in self.snns.iter().zip(&self.bases).enumerate() {
            net.validate()?;
            if net.n_in != basis.feature_len() || net.n_out != cfg.l {
                return bad(format!(
                    "sub-network {i} is {}-{}-{}, expected {} inputs and {} outputs",
                    net.n_in,
                    net.n_hidden,
                    net.n_out,
                    basis.feature_len(),
                    cfg.l
                ));
            }
        }
        if self.cnns.len() != cfg.l {
            return bad(format!(
                "{} component networks for l = {}",
                self.cnns.len(),
                cfg.l
            ));
        }
        for (k, net) in self.cnns.iter().enumerate() {
            net.validate()?;
            if net.n_in != cfg.m || net.n_out != 1 {
                return bad(format!(
                    "component network {k} is {}-{}-{}, expected {} inputs and 1 output",
                    net.n_in, net.n_hidden, net.n_out, cfg.m
                ));
            }
        }
        if self.labels.len() != cfg.l {
            return bad(format!("{} labels for l = {}", self.labels.len(), cfg.l));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.labels.iter().find(|s| !seen.insert(s.as_str())) {
            return bad(format!("duplicate label '{dup}'"));
        }
        Ok(())
    }

    pub fn image_shape(&self) -> (usize, usize) {
        self.bases[0].image_shape()
    }

    pub fn features(&self, image: &Matrix) -> Result<FeatureSet> {
        extract_feature_set(image, &self.bases)
    }

    /// Sub-network outputs for an already extracted feature set.
    pub fn snn_outputs(&self, set: &FeatureSet) -> Result<Vec<Vec<f64>>> {
        snn_outputs(&self.snns, &set.spaces())
    }

    pub fn classify_features(
        &self,
        set: &FeatureSet,
        threshold: f64,
    ) -> Result<ClassificationOutcome> {
        check_threshold(threshold)?;
        let scores = fuse(&self.cnns, &self.snn_outputs(set)?)?;
        Ok(ClassificationOutcome {
            decision: decide(&scores, threshold),
            scores,
            threshold_used: threshold,
        })
    }
}

/// Classifies one image with the model's stored threshold.
pub fn classify(model: &MannModel, image: &Matrix) -> Result<ClassificationOutcome> {
    classify_with_threshold(model, image, model.config.threshold)
}

pub fn classify_with_threshold(
    model: &MannModel,
    image: &Matrix,
    threshold: f64,
) -> Result<ClassificationOutcome> {
    let expected = model.image_shape();
    if image.shape() != expected {
        return Err(Error::shape(format!(
            "image is {}x{}, the model expects {}x{}",
            image.rows(),
            image.cols(),
            expected.0,
            expected.1
        )));
    }
    model.classify_features(&model.features(image)?, threshold)
}

/// Final training loss of every network, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSummary {
    pub snn_loss: Vec<Vec<f64>>,
    pub cnn_loss: Vec<Vec<f64>>,
}

/// Fits the bases, then runs both training phases.
pub fn fit(
    images: &[Matrix],
    labels: &[usize],
    label_names: Vec<String>,
    features: &FeatureConfig,
    cfg: &MannConfig,
    jobs: usize,
) -> Result<(MannModel, TrainingSummary)> {
    cfg.validate()?;
    if cfg.m != 4 {
        return Err(Error::Configuration(format!(
            "an image model has four feature spaces, m = {}",
            cfg.m
        )));
    }
    if label_names.len() != cfg.l {
        return Err(Error::Configuration(format!(
            "{} label names for l = {}",
            label_names.len(),
            cfg.l
        )));
    }
    if images.len() != labels.len() {
        return Err(Error::shape(format!(
            "{} images but {} labels",
            images.len(),
            labels.len()
        )));
    }
    let bases = fit_bases(images, features)?;
    let sets = images
        .iter()
        .map(|img| extract_feature_set(img, &bases))
        .collect::<Result<Vec<_>>>()?;
    let spaces: Vec<Vec<Vec<f64>>> = (0..4)
        .map(|i| sets.iter().map(|s| s.spaces()[i].to_vec()).collect())
        .collect();

    let local = train_local_with_history(&spaces, labels, cfg, jobs)?;
    let (snns, snn_loss): (Vec<_>, Vec<_>) = local.into_iter().unzip();
    let global = train_global_with_history(&snns, &spaces, labels, cfg, jobs)?;
    let (cnns, cnn_loss): (Vec<_>, Vec<_>) = global.into_iter().unzip();

    let model = MannModel {
        config: *cfg,
        bases,
        snns,
        cnns,
        labels: label_names,
    };
    model.validate()?;
    Ok((model, TrainingSummary { snn_loss, cnn_loss }))
}

/// Accuracy, macro precision and confusion counts for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub name: String,
    pub accuracy: f64,
    /// Mean over classes of per-class precision; a class never predicted
    /// counts as zero.
    pub macro_precision: f64,
    /// `confusion[true][predicted]`, with a final column for rejects.
    pub confusion: Vec<Vec<usize>>,
    pub predictions: Vec<Decision>,
}

impl MethodReport {
    fn from_predictions(
        name: String,
        truth: &[usize],
        predictions: Vec<Decision>,
        l: usize,
    ) -> Self {
        let mut confusion = vec![vec![0usize; l + 1]; l];
        for (&t, p) in truth.iter().zip(&predictions) {
            confusion[t][p.class().unwrap_or(l)] += 1;
        }
        let correct: usize = (0..l).map(|k| confusion[k][k]).sum();
        let precision_sum: f64 = (0..l)
            .map(|k| {
                let predicted: usize = (0..l).map(|t| confusion[t][k]).sum();
                if predicted == 0 {
                    0.0
                } else {
                    confusion[k][k] as f64 / predicted as f64
                }
            })
            .sum();
        MethodReport {
            name,
            accuracy: correct as f64 / truth.len() as f64,
            macro_precision: precision_sum / l as f64,
            confusion,
            predictions,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub labels: Vec<String>,
    pub truth: Vec<usize>,
    /// `SNN_1..SNN_m`, `Average`, optionally `Weighted`, then `MANN`.
    pub methods: Vec<MethodReport>,
}

impl EvaluationReport {
    pub fn method(&self, name: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalOptions {
    /// Reliability coefficients for the weighted baseline row.
    pub reliability: Option<Vec<f64>>,
    /// Overrides the model's stored threshold for the MANN row.
    pub threshold: Option<f64>,
}

/// Scores the model and the combination baselines on a labelled set.
///
/// Baselines take the plain argmax of their combined outputs and never
/// reject; the MANN row applies the threshold.
pub fn evaluate(
    model: &MannModel,
    images: &[Matrix],
    labels: &[usize],
    opts: &EvalOptions,
) -> Result<EvaluationReport> {
    if images.is_empty() {
        return Err(Error::EmptyDataset("nothing to evaluate".into()));
    }
    if images.len() != labels.len() {
        return Err(Error::shape(format!(
            "{} images but {} labels",
            images.len(),
            labels.len()
        )));
    }
    let cfg = &model.config;
    if let Some(&label) = labels.iter().find(|&&c| c >= cfg.l) {
        return Err(Error::Label {
            label,
            classes: cfg.l,
        });
    }
    if let Some(r) = &opts.reliability {
        if r.len() != cfg.m {
            return Err(Error::shape(format!(
                "{} reliability coefficients for {} sub-networks",
                r.len(),
                cfg.m
            )));
        }
    }
    let threshold = opts.threshold.unwrap_or(cfg.threshold);
    check_threshold(threshold)?;

    let argmax_decision = |v: &[f64]| argmax(v).map_or(Decision::Reject, Decision::Class);
    let n_rows = cfg.m + 2 + usize::from(opts.reliability.is_some());
    let mut preds: Vec<Vec<Decision>> = vec![Vec::with_capacity(images.len()); n_rows];
    for image in images {
        let set = extract_feature_set(image, &model.bases)?;
        let outputs = model.snn_outputs(&set)?;
        let mut row = 0;
        for i in 0..cfg.m {
            preds[row].push(argmax_decision(&combine_selection(&outputs, i)?));
            row += 1;
        }
        preds[row].push(argmax_decision(&combine_average(&outputs)?));
        row += 1;
        if let Some(r) = &opts.reliability {
            preds[row].push(argmax_decision(&combine_weighted(&outputs, r)?));
            row += 1;
        }
        let scores = fuse(&model.cnns, &outputs)?;
        preds[row].push(decide(&scores, threshold));
    }

    let mut names: Vec<String> = (1..=cfg.m).map(|i| format!("SNN_{i}")).collect();
    names.push("Average".into());
    if opts.reliability.is_some() {
        names.push("Weighted".into());
    }
    names.push("MANN".into());
    let methods = names
        .into_iter()
        .zip(preds)
        .map(|(name, p)| MethodReport::from_predictions(name, labels, p, cfg.l))
        .collect();
    Ok(EvaluationReport {
        labels: model.labels.clone(),
        truth: labels.to_vec(),
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decision_rule() {
        assert_eq!(decide(&[0.2, 0.5, 0.4], 0.5), Decision::Reject);
        assert_eq!(
            decide(&[0.05, 0.9, 0.1, 0.1, 0.05, 0.1], 0.5),
            Decision::Class(1)
        );
        assert_eq!(
            decide(&[0.1, 0.2, 0.8, 0.3, 0.8, 0.0], 0.5),
            Decision::Class(2)
        );
        assert_eq!(decide(&[], 0.5), Decision::Reject);
    }

    #[test]
    fn combination_examples() {
        let o = vec![vec![0.8, 0.2], vec![0.3, 0.7]];
        assert_eq!(combine_selection(&o, 1).unwrap(), vec![0.3, 0.7]);
        assert!(matches!(combine_selection(&o, 2), Err(Error::Index { .. })));
        assert_eq!(combine_selection(&o[..1], 0).unwrap(), vec![0.8, 0.2]);

        let avg = combine_average(&[vec![0.8, 0.2], vec![0.6, 0.4]]).unwrap();
        assert!((avg[0] - 0.7).abs() < 1e-15 && (avg[1] - 0.3).abs() < 1e-15);
        assert!(combine_average(&[vec![0.1], vec![0.1, 0.2]]).is_err());

        assert_eq!(combine_weighted(&o, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(combine_weighted(&o, &[0.0, 1.0]).unwrap(), o[1]);
        assert!(combine_weighted(&o, &[1.0]).is_err());
    }

    #[test]
    fn collective_vector_example() {
        let r = collective_vectors(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        assert_eq!(r[0].values, vec![0.9, 0.2]);
        assert_eq!(r[1].values, vec![0.1, 0.8]);
        let single = collective_vectors(&[vec![0.4, 0.6, 0.5]]).unwrap();
        assert_eq!(single.len(), 3);
        assert_eq!(single[2].values, vec![0.5]);
    }

    #[test]
    fn seeds() {
        let cfg = MannConfig {
            master_seed: 7,
            ..MannConfig::new(4, 6)
        };
        assert_eq!(cfg.snn_seed(2), 9);
        assert_eq!(cfg.cnn_seed(3), 1010);
        let wrap = MannConfig {
            master_seed: u64::MAX,
            ..cfg
        };
        assert_eq!(wrap.snn_seed(1), 0);
    }

    #[test]
    fn config_validation() {
        assert!(MannConfig::new(4, 6).validate().is_ok());
        assert!(MannConfig::new(0, 6).validate().is_err());
        assert!(MannConfig::new(4, 1).validate().is_err());
        let t = MannConfig {
            threshold: 1.0,
            ..MannConfig::new(4, 6)
        };
        assert!(t.validate().is_err());
    }

    #[test]
    fn method_report_counts() {
        let truth = [0, 0, 1, 1];
        let preds = vec![
            Decision::Class(0),
            Decision::Class(1),
            Decision::Class(1),
            Decision::Reject,
        ];
        let r = MethodReport::from_predictions("x".into(), &truth, preds, 2);
        assert_eq!(r.confusion, vec![vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(r.accuracy, 0.5);
        // class 0: 1/1, class 1: 1/2
        assert_eq!(r.macro_precision, 0.75);
    }

    #[test]
    fn label_out_of_range() {
        let cfg = MannConfig::new(1, 2);
        let features = vec![vec![vec![0.0], vec![1.0]]];
        assert!(matches!(
            train_local(&features, &[0, 2], &cfg, 1),
            Err(Error::Label {
                label: 2,
                classes: 2
            })
        ));
    }
}
