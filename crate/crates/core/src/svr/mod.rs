//! Epsilon-SVR with an RBF kernel, trained by SMO on the dual problem.

mod baseline;
mod kernel;
mod model;
pub mod smo;

pub use baseline::{fit_baseline, MeanBaseline};
pub use kernel::{
    pairwise_sq_distances, rbf_kernel, resolve_gamma, squared_distance, Gamma, Gram,
    DENSE_GRAM_LIMIT,
};
pub use model::{
    dual_objective, fit_svr, fit_svr_with, fit_with_gram, kkt_report, HyperParams, KktReport,
    SvrModel, SUPPORT_THRESHOLD,
};
pub use smo::SolverOptions;

pub(crate) use baseline::mean;
pub(crate) use kernel::gamma_for;
