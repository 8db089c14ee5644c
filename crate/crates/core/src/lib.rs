//! Predicting users' social and functional expectations of robots from
//! multimodal embodiment features.
//!
//! The pipeline fuses hand-crafted, metaphor-embedding and image-embedding
//! feature blocks ([`features`]), trains an epsilon-SVR with an RBF kernel
//! by SMO ([`svr`]), scores it with k-fold cross-validation against a
//! mean predictor and a paired t-test ([`eval`]), and renders the
//! combination × construct results table ([`report`]).

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod matrix;
pub mod report;
pub mod svr;
pub mod synthetic;

pub use dataset::{Construct, Dataset, Modality, RobotRecord};
pub use error::{DatasetError, EvalError, ReportError, SvrError};
pub use features::{all_combos, fuse, label_vector, FeatureMatrix, ModalityCombo};
pub use matrix::Matrix;
pub use svr::{fit_svr, HyperParams, SvrModel};
