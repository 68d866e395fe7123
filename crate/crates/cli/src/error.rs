//! CLI error type with process exit codes.
//!
//! Exit codes, kept stable for scripting:
//!
//! * 0 — success.
//! * 1 — a statistical validation check ran and failed.
//! * 2 — configuration errors: bad flags, fractions, levels, or ids
//!   (argument parse failures from the option parser also exit 2).
//! * 3 — data errors: unreadable, malformed, or unusable input files, and
//!   output i/o failures.
//! * 4 — the requested level is not admissible for the calibration size.
//! * 5 — internal errors that should not occur on valid inputs.

use thiserror::Error;

use skewconf_core::conformal::ConformalError;
use skewconf_core::data::DataError;
use skewconf_core::efficiency::EfficiencyError;
use skewconf_core::eval::EvalError;
use skewconf_core::learners::LearnerError;
use skewconf_core::synth::SynthError;
use skewconf_core::validate::ValidateError;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Efficiency(#[from] EfficiencyError),
    #[error(transparent)]
    Validate(#[from] ValidateError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("could not serialize the run config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("could not render a csv report: {0}")]
    Csv(#[from] csv::Error),
    #[error("one or more statistical checks failed")]
    ChecksFailed,
}

impl AppError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        AppError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Data(e) => data_code(e),
            AppError::Conformal(e) => conformal_code(e),
            AppError::Learner(e) => learner_code(e),
            AppError::Synth(e) => synth_code(e),
            AppError::Eval(e) => eval_code(e),
            AppError::Efficiency(e) => efficiency_code(e),
            AppError::Validate(e) => validate_code(e),
            AppError::Io { .. } => 3,
            AppError::Json(_) => 5,
            AppError::Csv(_) => 5,
            AppError::ChecksFailed => 1,
        }
    }
}

fn data_code(e: &DataError) -> u8 {
    match e {
        DataError::BadFractions { .. } => 2,
        _ => 3,
    }
}

fn conformal_code(e: &ConformalError) -> u8 {
    match e {
        ConformalError::NotAdmissible { .. } => 4,
        ConformalError::BadAlpha { .. } | ConformalError::UnknownMethod { .. } => 2,
        ConformalError::EmptyCalibration => 3,
        ConformalError::Learner(inner) => learner_code(inner),
        _ => 5,
    }
}

fn learner_code(e: &LearnerError) -> u8 {
    match e {
        LearnerError::InvalidParams { .. } | LearnerError::BadQuantileLevel { .. } => 2,
        LearnerError::EmptyTrainingSet => 3,
        _ => 5,
    }
}

fn synth_code(e: &SynthError) -> u8 {
    match e {
        SynthError::BadSpec { .. } | SynthError::BadLevel { .. } | SynthError::UnknownId { .. } => 2,
        SynthError::DimensionMismatch { .. } => 5,
    }
}

fn eval_code(e: &EvalError) -> u8 {
    match e {
        EvalError::NoMethods | EvalError::NoAlphas => 2,
        EvalError::Conformal(inner) => conformal_code(inner),
        EvalError::Data(inner) => data_code(inner),
        EvalError::Efficiency(inner) => efficiency_code(inner),
        _ => 5,
    }
}

fn efficiency_code(e: &EfficiencyError) -> u8 {
    match e {
        EfficiencyError::EmptyGrid | EfficiencyError::TooFewReplications { .. } => 2,
        EfficiencyError::Conformal(inner) => conformal_code(inner),
        EfficiencyError::Synth(inner) => synth_code(inner),
        _ => 5,
    }
}

fn validate_code(e: &ValidateError) -> u8 {
    match e {
        ValidateError::NoMethods
        | ValidateError::TooFewReplications { .. }
        | ValidateError::TooFewRows { .. } => 2,
        ValidateError::Conformal(inner) => conformal_code(inner),
        ValidateError::Synth(inner) => synth_code(inner),
        ValidateError::Eval(inner) => eval_code(inner),
    }
}
