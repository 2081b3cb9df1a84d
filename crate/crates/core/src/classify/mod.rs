//! ℓ2-regularized multinomial logistic regression and stratified k-fold
//! cross-validation.

mod cv;
mod folds;
mod logreg;

pub use cv::{cross_validate, fold_models, CvOptions, CvReport, FoldResult};
pub use folds::{stratified_kfold, FoldPlan};
pub use logreg::{fit, predict, FitOptions, LabeledDataset, Standardizer, TrainedModel};
