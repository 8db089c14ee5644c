//! Cross-validation, grid search and significance testing against the
//! mean baseline.

mod cv;
mod folds;
mod stats;

pub use cv::{
    baseline_fold_mses, cross_validate, cross_validate_direct, cross_validate_with, grid_search,
    grid_search_with, run_experiment, run_experiment_with, CellResult, EvalOptions, FoldScores,
    GridSearchResult, GridSpec, RowKey, BASELINE_LABEL, DEFAULT_GRID_VALUES,
};
pub use folds::{make_folds, FoldPlan, DEFAULT_FOLDS, DEFAULT_SEED};
pub use stats::{mse, paired_t_test, stars};
