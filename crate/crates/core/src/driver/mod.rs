//! Pretraining, training, evaluation and export.

mod eval;
mod export;
mod pretrain;
mod train;

pub use eval::{
    evaluate, evaluate_with, glue_connectivity, glue_jets, median_nn_spacing, Evaluation,
    GlueConnectivity,
};
pub use export::{domain_color, export_surface, hsl_to_rgb, sample_cloud, write_ply, CloudVertex};
pub use pretrain::{pretrain, pretrain_model, pretrain_with, Pretrained, reference_rmse, PretrainReport};
pub use train::{train, EpochLog, TrainOptions, TrainOutcome};
