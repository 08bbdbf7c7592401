//! Evaluation of pointing trials, typing sessions and usability questionnaires.

pub mod ftest;
pub mod pointing;
pub mod report;
pub mod stats;
pub mod sus;
pub mod typing;

use thiserror::Error;

pub use ftest::{f_test, f_test_ordered, FTestResult};
pub use pointing::{completion_time, path_length, summarize_trials, PointingSummary, TrialRecord};
pub use stats::{descriptive_stats, DescriptiveStats};
pub use sus::{sus_grade, sus_score, sus_summary, SusGrade, SusResponse, SusSummary};
pub use typing::{levenshtein, summarize_typing, typing_metrics, TypingMetrics, TypingRecord};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no {0}")]
    Empty(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("sample {sample} needs at least 2 values, got {n}")]
    InsufficientSamples { sample: &'static str, n: usize },
    #[error("sample {0} has zero variance")]
    DegenerateVariance(&'static str),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
