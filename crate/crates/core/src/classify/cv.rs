use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{stratified_kfold, FoldPlan};
use super::logreg::{fit_rows, predict, FitOptions, LabeledDataset, TrainedModel};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub fit: FitOptions,
    pub allow_small_classes: bool,
    /// Labels written into the report.
    pub dataset: String,
    pub measure: String,
    pub classifier: String,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            folds: 5,
            seed: 0,
            fit: FitOptions::default(),
            allow_small_classes: false,
            dataset: String::new(),
            measure: String::new(),
            classifier: "logreg".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub index: usize,
    pub size: usize,
    pub error: f64,
}

/// Cross-validation report; field order is the JSON layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub dataset: String,
    pub measure: String,
    pub classifier: String,
    pub seed: u64,
    pub lambda: f64,
    pub folds: Vec<FoldResult>,
    pub mean_error: f64,
}

impl CvReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// One model per fold, each trained (and standardized) on that fold's
/// training split only.
pub fn fold_models(dataset: &LabeledDataset, plan: &FoldPlan, fit: &FitOptions) -> Result<Vec<TrainedModel>> {
    (0..plan.k)
        .into_par_iter()
        .map(|f| {
            let (x, y) = dataset.rows(&plan.train_indices(f));
            let model = fit_rows(&x, &y, dataset.class_count(), fit)?;
            if !model.converged {
                log::warn!(
                    "fold {f}: optimizer stopped at gradient norm {:e} after {} iterations",
                    model.gradient_norm,
                    model.iterations
                );
            }
            Ok(model)
        })
        .collect()
}

pub fn cross_validate(dataset: &LabeledDataset, opts: &CvOptions) -> Result<CvReport> {
    let plan = stratified_kfold(dataset.labels(), opts.folds, opts.seed, opts.allow_small_classes)?;
    let models = fold_models(dataset, &plan, &opts.fit)?;

    let mut folds = Vec::with_capacity(plan.k);
    let mut wrong_total = 0usize;
    for (f, model) in models.iter().enumerate() {
        let test = plan.test_indices(f);
        let mut wrong = 0;
        for &i in &test {
            if predict(model, dataset.features().row(i))? != dataset.labels()[i] {
                wrong += 1;
            }
        }
        wrong_total += wrong;
        let error = if test.is_empty() { 0.0 } else { wrong as f64 / test.len() as f64 };
        folds.push(FoldResult { index: f, size: test.len(), error });
    }
    Ok(CvReport {
        dataset: opts.dataset.clone(),
        measure: opts.measure.clone(),
        classifier: opts.classifier.clone(),
        seed: opts.seed,
        lambda: opts.fit.lambda,
        folds,
        mean_error: wrong_total as f64 / dataset.len() as f64,
    })
}
