//! Multi-orientation 2D-PCA feature extraction and a two-level ensemble of
//! small neural networks for image classification.
//!
//! Each image is projected into four presentation spaces (column, row,
//! diagonal, block). One sub-network classifies each space, and a
//! per-class component network fuses the sub-network outputs into a final
//! score with a reject threshold.

// index loops read closer to the maths in the numeric kernels; `!(x > 0.0)`
// is used on purpose so NaN fails validation
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod dataio;
pub mod eigen;
mod error;
pub mod features;
pub mod mann;
pub mod matrix;
pub mod neuralnet;
pub mod rng;

pub use dataio::manifest::{load_manifest, Manifest, Record};
pub use dataio::model_file::{load_model, save_model, ModelFile, SplitParams, FORMAT_VERSION};
pub use dataio::pgm::{load_pgm, parse_pgm, save_pgm};
pub use dataio::split::split_dataset;
pub use dataio::synth::{synth_dataset, Dataset};
pub use eigen::{jacobi_eigh, EigenDecomposition};
pub use error::{Error, Result};
pub use features::{
    extract_feature_set, fit_2dpca, project_2dpca, reconstruct, BlockGrid, FeatureConfig,
    FeatureSet, FeatureVector, Orientation, ProjectionBasis,
};
pub use mann::{
    classify, evaluate, ClassificationOutcome, CollectiveVector, Decision, EvalOptions,
    EvaluationReport, MannConfig, MannModel,
};
pub use matrix::Matrix;
pub use neuralnet::{mlp_forward, mlp_gradient_check, mlp_init, mlp_train, Mlp, TrainConfig};
pub use rng::Rng;
