use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::folds::FoldPlan;
use super::stats::{mse, paired_t_test};
use crate::dataset::{Construct, Dataset};
use crate::error::{EvalError, SvrError};
use crate::features::{all_combos, fuse_with, label_vector, FuseOptions, ModalityCombo};
use crate::matrix::Matrix;
use crate::svr::{
    fit_svr_with, fit_with_gram, gamma_for, mean, pairwise_sq_distances, Gamma, Gram, HyperParams,
    SolverOptions, DENSE_GRAM_LIMIT,
};

/// Candidate values for the hyperparameter grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub c_values: Vec<f64>,
    pub epsilon_values: Vec<f64>,
}

/// `{.001, .01, .1, 1, 10, 100}` for both C and ε.
pub const DEFAULT_GRID_VALUES: [f64; 6] = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0];

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            c_values: DEFAULT_GRID_VALUES.to_vec(),
            epsilon_values: DEFAULT_GRID_VALUES.to_vec(),
        }
    }
}

impl GridSpec {
    /// All `(C, ε)` pairs, C-major, each list sorted ascending.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        let mut cs = self.c_values.clone();
        let mut es = self.epsilon_values.clone();
        cs.sort_by(f64::total_cmp);
        cs.dedup();
        es.sort_by(f64::total_cmp);
        es.dedup();
        cs.iter()
            .flat_map(|&c| es.iter().map(move |&e| (c, e)))
            .collect()
    }
}

/// Knobs shared by every evaluation entry point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
    pub solver: SolverOptions,
    pub fuse: FuseOptions,
}

/// Table row: a modality combination or the mean baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowKey {
    Combo(ModalityCombo),
    Baseline,
}

pub const BASELINE_LABEL: &str = "Predict Dataset Average (baseline)";

impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKey::Combo(c) => c.fmt(f),
            RowKey::Baseline => f.write_str(BASELINE_LABEL),
        }
    }
}

/// Cross-validated scores for one (row, construct) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub row: RowKey,
    pub construct: Construct,
    pub fold_mses: Vec<f64>,
    pub mean_mse: f64,
    pub baseline_fold_mses: Vec<f64>,
    /// Paired t-test against the baseline; `None` for baseline rows.
    pub p_value: Option<f64>,
}

/// Per-fold test MSE of the SVR and of the mean baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldScores {
    pub fold_mses: Vec<f64>,
    pub baseline_fold_mses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: HyperParams,
    pub pooled_mse: f64,
    /// Pooled MSE of every evaluated `(C, ε)` pair.
    pub evaluated: Vec<(f64, f64, f64)>,
}

/// Per-combination fused features plus cached pairwise distances.
struct ComboData {
    combo: ModalityCombo,
    x: Matrix,
    d2: Option<Matrix>,
}

struct Engine<'a> {
    plan: &'a FoldPlan,
    labels: Vec<Vec<f64>>,
    combos: Vec<ComboData>,
    constructs: Vec<Construct>,
    hps: Vec<HyperParams>,
    solver: SolverOptions,
}

type Key = (usize, usize, usize, usize); // combo, construct, hp, fold

impl Engine<'_> {
    /// Test MSE for every (combo, construct, hp, fold).
    fn run(&self) -> Result<BTreeMap<Key, f64>, EvalError> {
        let units: Vec<(usize, usize)> = (0..self.combos.len())
            .flat_map(|ci| (0..self.plan.k).map(move |f| (ci, f)))
            .collect();
        let parts: Vec<Result<Vec<(Key, f64)>, EvalError>> =
            units.par_iter().map(|&(ci, f)| self.unit(ci, f)).collect();
        let mut out = BTreeMap::new();
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }

    fn unit(&self, ci: usize, fold: usize) -> Result<Vec<(Key, f64)>, EvalError> {
        let cd = &self.combos[ci];
        let train = self.plan.train_indices(fold);
        let test = self.plan.test_indices(fold);
        let x_train = cd.x.select_rows(&train);
        let x_test = cd.x.select_rows(&test);
        let mut out = Vec::new();

        // gamma depends only on the training rows; hps differ in gamma only when explicit
        let mut grams: Vec<(Gamma, f64, Gram<'_>)> = Vec::new();
        for (hi, hp) in self.hps.iter().enumerate() {
            let ctx = |source: SvrError, construct: Construct| EvalError::Cell {
                combo: cd.combo,
                construct,
                fold,
                source,
            };
            let gi = match grams.iter().position(|(g, _, _)| *g == hp.gamma) {
                Some(gi) => gi,
                None => {
                    let gamma =
                        gamma_for(&x_train, hp.gamma).map_err(|e| ctx(e, self.constructs[0]))?;
                    let gram = match &cd.d2 {
                        Some(d2) => Gram::from_sq_distances(
                            &d2.select_rows(&train).select_cols(&train),
                            gamma,
                        ),
                        None => Gram::new(&x_train, gamma),
                    };
                    grams.push((hp.gamma, gamma, gram));
                    grams.len() - 1
                }
            };
            let (_, gamma, gram) = &grams[gi];
            for (ki, &c) in self.constructs.iter().enumerate() {
                let y = &self.labels[c.index()];
                let y_train: Vec<f64> = train.iter().map(|&i| y[i]).collect();
                let y_test: Vec<f64> = test.iter().map(|&i| y[i]).collect();
                let model = fit_with_gram(&x_train, gram, *gamma, &y_train, hp, self.solver)
                    .map_err(|e| ctx(e, c))?;
                let pred = model.predict(&x_test).map_err(|e| ctx(e, c))?;
                out.push(((ci, ki, hi, fold), mse(&pred, &y_test)?));
            }
        }
        Ok(out)
    }
}

fn build_engine<'a>(
    ds: &Dataset,
    combos: &[ModalityCombo],
    constructs: &[Construct],
    hps: &[HyperParams],
    plan: &'a FoldPlan,
    opts: &EvalOptions,
) -> Result<Engine<'a>, EvalError> {
    if plan.n() != ds.len() {
        return Err(EvalError::PlanMismatch {
            plan: plan.n(),
            data: ds.len(),
        });
    }
    let combos = combos
        .iter()
        .map(|&combo| {
            let x = fuse_with(ds, combo, opts.fuse).values;
            let d2 = (x.nrows() <= DENSE_GRAM_LIMIT).then(|| pairwise_sq_distances(&x));
            ComboData { combo, x, d2 }
        })
        .collect();
    Ok(Engine {
        plan,
        labels: Construct::ALL
            .iter()
            .map(|&c| label_vector(ds, c))
            .collect(),
        combos,
        constructs: constructs.to_vec(),
        hps: hps.to_vec(),
        solver: opts.solver,
    })
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Per-fold MSE of the mean predictor for one construct.
pub fn baseline_fold_mses(
    ds: &Dataset,
    c: Construct,
    plan: &FoldPlan,
) -> Result<Vec<f64>, EvalError> {
    if plan.n() != ds.len() {
        return Err(EvalError::PlanMismatch {
            plan: plan.n(),
            data: ds.len(),
        });
    }
    let y = label_vector(ds, c);
    (0..plan.k)
        .map(|f| {
            let train: Vec<f64> = plan.train_indices(f).iter().map(|&i| y[i]).collect();
            let test: Vec<f64> = plan.test_indices(f).iter().map(|&i| y[i]).collect();
            let m = mean(&train)?;
            mse(&vec![m; test.len()], &test)
        })
        .collect()
}

/// Trains the SVR and the mean baseline on each training split and scores
/// both on the held-out fold.
pub fn cross_validate(
    ds: &Dataset,
    combo: ModalityCombo,
    c: Construct,
    hp: &HyperParams,
    plan: &FoldPlan,
) -> Result<FoldScores, EvalError> {
    cross_validate_with(ds, combo, c, hp, plan, &EvalOptions::default())
}

pub fn cross_validate_with(
    ds: &Dataset,
    combo: ModalityCombo,
    c: Construct,
    hp: &HyperParams,
    plan: &FoldPlan,
    opts: &EvalOptions,
) -> Result<FoldScores, EvalError> {
    hp.validate()?;
    let engine = build_engine(ds, &[combo], &[c], &[*hp], plan, opts)?;
    let scores = in_pool(opts.jobs, || engine.run())?;
    Ok(FoldScores {
        fold_mses: (0..plan.k).map(|f| scores[&(0, 0, 0, f)]).collect(),
        baseline_fold_mses: baseline_fold_mses(ds, c, plan)?,
    })
}

/// Reference implementation of one cell without distance caching.
pub fn cross_validate_direct(
    ds: &Dataset,
    combo: ModalityCombo,
    c: Construct,
    hp: &HyperParams,
    plan: &FoldPlan,
    solver: SolverOptions,
) -> Result<Vec<f64>, EvalError> {
    let x = fuse_with(ds, combo, FuseOptions::default()).values;
    let y = label_vector(ds, c);
    (0..plan.k)
        .map(|f| {
            let train = plan.train_indices(f);
            let test = plan.test_indices(f);
            let y_train: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let y_test: Vec<f64> = test.iter().map(|&i| y[i]).collect();
            let m = fit_svr_with(&x.select_rows(&train), &y_train, hp, solver)?;
            mse(&m.predict(&x.select_rows(&test))?, &y_test)
        })
        .collect()
}

/// Picks the `(C, ε)` pair with the lowest fold MSE averaged over every
/// construct, every modality combination and every fold. Ties go to the
/// smaller C, then the smaller ε.
pub fn grid_search(
    ds: &Dataset,
    grid: &GridSpec,
    plan: &FoldPlan,
) -> Result<GridSearchResult, EvalError> {
    grid_search_with(ds, grid, plan, Gamma::Scale, &EvalOptions::default())
}

pub fn grid_search_with(
    ds: &Dataset,
    grid: &GridSpec,
    plan: &FoldPlan,
    gamma: Gamma,
    opts: &EvalOptions,
) -> Result<GridSearchResult, EvalError> {
    let pairs = grid.pairs();
    if pairs.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let hps: Vec<HyperParams> = pairs
        .iter()
        .map(|&(c, epsilon)| HyperParams { c, epsilon, gamma })
        .collect();
    for hp in &hps {
        hp.validate()?;
    }
    let combos = all_combos();
    let engine = build_engine(ds, &combos, &Construct::ALL, &hps, plan, opts)?;
    let scores = in_pool(opts.jobs, || engine.run())?;

    let mut evaluated = Vec::with_capacity(pairs.len());
    let mut best: Option<(usize, f64)> = None;
    for (hi, &(c, e)) in pairs.iter().enumerate() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for ci in 0..combos.len() {
            for ki in 0..Construct::ALL.len() {
                for f in 0..plan.k {
                    sum += scores[&(ci, ki, hi, f)];
                    count += 1;
                }
            }
        }
        let pooled = sum / count as f64;
        evaluated.push((c, e, pooled));
        // pairs are sorted by (C, ε), so strict < keeps the tie-break rule
        if best.is_none_or(|(_, b)| pooled < b) {
            best = Some((hi, pooled));
        }
    }
    let (hi, pooled_mse) = best.expect("non-empty grid");
    Ok(GridSearchResult {
        best: hps[hi],
        pooled_mse,
        evaluated,
    })
}

/// Runs all 7 combinations × 6 constructs plus the 6 baseline cells, in
/// table order (combinations first, baseline last; constructs inner).
pub fn run_experiment(
    ds: &Dataset,
    hp: &HyperParams,
    plan: &FoldPlan,
) -> Result<Vec<CellResult>, EvalError> {
    run_experiment_with(ds, hp, plan, &EvalOptions::default())
}

pub fn run_experiment_with(
    ds: &Dataset,
    hp: &HyperParams,
    plan: &FoldPlan,
    opts: &EvalOptions,
) -> Result<Vec<CellResult>, EvalError> {
    hp.validate()?;
    let combos = all_combos();
    let engine = build_engine(ds, &combos, &Construct::ALL, &[*hp], plan, opts)?;
    let scores = in_pool(opts.jobs, || engine.run())?;
    let baselines: Vec<Vec<f64>> = Construct::ALL
        .iter()
        .map(|&c| baseline_fold_mses(ds, c, plan))
        .collect::<Result<_, _>>()?;

    let mut out = Vec::with_capacity(48);
    for (ci, &combo) in combos.iter().enumerate() {
        for (ki, &c) in Construct::ALL.iter().enumerate() {
            let fold_mses: Vec<f64> = (0..plan.k).map(|f| scores[&(ci, ki, 0, f)]).collect();
            let (_, p) = paired_t_test(&fold_mses, &baselines[ki])?;
            out.push(CellResult {
                row: RowKey::Combo(combo),
                construct: c,
                mean_mse: mean(&fold_mses)?,
                fold_mses,
                baseline_fold_mses: baselines[ki].clone(),
                p_value: Some(p),
            });
        }
    }
    for (ki, &c) in Construct::ALL.iter().enumerate() {
        out.push(CellResult {
            row: RowKey::Baseline,
            construct: c,
            fold_mses: baselines[ki].clone(),
            mean_mse: mean(&baselines[ki])?,
            baseline_fold_mses: baselines[ki].clone(),
            p_value: None,
        });
    }
    Ok(out)
}
