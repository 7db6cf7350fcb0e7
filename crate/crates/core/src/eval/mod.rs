//! Evaluation protocols: link prediction with directional negatives,
//! one-vs-rest node classification, and the neighbor-vote baseline.

pub mod auc;
pub mod labels;
pub mod logreg;
pub mod maxvote;
pub mod split;

pub use auc::{eval_lp, roc_auc};
pub use labels::{f1_scores, LabeledNodes, FOLD_COUNT};
pub use logreg::{
    nc_cross_validate, predict_and_score, train_logreg_ovr, ClassifierModel, DEFAULT_LAMBDA,
};
pub use maxvote::{max_vote_eval, max_vote_predict};
pub use split::{make_lp_split, validate_split, write_split, LinkSplit};
