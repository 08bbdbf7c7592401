//! Point-and-click trials: cursor path length, completion time and the
//! balloon-popping level layouts.

use serde::{Deserialize, Serialize};

use super::stats::{descriptive_stats, DescriptiveStats};
use super::EvalError;

/// Balloon widths used by the pointing game, in pixels.
pub const STANDARD_WIDTHS: [u32; 4] = [32, 64, 96, 128];

/// One target appearance up to the click that popped it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub width: u32,
    pub center: [f64; 2],
    pub path: Vec<[f64; 2]>,
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default)]
    pub miss_clicks: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
}

impl TrialRecord {
    /// Check the record invariants. A non-standard width is accepted but
    /// reported through the returned warning.
    pub fn validate(&self) -> Result<Option<String>, EvalError> {
        if self.path.is_empty() {
            return Err(EvalError::Invalid(format!("trial {}: empty cursor path", self.trial)));
        }
        if !(self.t_end >= self.t_start) {
            return Err(EvalError::Invalid(format!("trial {}: t_end precedes t_start", self.trial)));
        }
        if !STANDARD_WIDTHS.contains(&self.width) {
            return Ok(Some(format!("trial {}: non-standard width {} px", self.trial, self.width)));
        }
        Ok(None)
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Sum of Euclidean distances between consecutive cursor positions.
pub fn path_length(path: &[[f64; 2]]) -> f64 {
    path.windows(2).map(|w| distance(w[0], w[1])).sum()
}

/// Seconds from target appearance to the popping click. Trials with miss
/// clicks count like any other.
pub fn completion_time(trial: &TrialRecord) -> f64 {
    trial.t_end - trial.t_start
}

/// Whether a click at `(x, y)` pops a balloon of `width` centred at `center`.
/// The boundary circle itself counts as a miss.
pub fn hits_target(center: [f64; 2], width: u32, x: f64, y: f64) -> bool {
    distance(center, [x, y]) < width as f64 / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidthSummary {
    pub width: u32,
    pub time: DescriptiveStats,
    pub mean_path_px: f64,
    pub miss_clicks: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointingSummary {
    pub time: DescriptiveStats,
    pub mean_path_px: f64,
    pub miss_clicks: u32,
    pub by_width: Vec<WidthSummary>,
    pub warnings: Vec<String>,
}

pub fn summarize_trials(trials: &[TrialRecord]) -> Result<PointingSummary, EvalError> {
    if trials.is_empty() {
        return Err(EvalError::Empty("trials"));
    }
    let mut warnings = Vec::new();
    for t in trials {
        if let Some(w) = t.validate()? {
            warnings.push(w);
        }
    }
    let summarize = |subset: &[&TrialRecord]| -> Result<(DescriptiveStats, f64, u32), EvalError> {
        let times: Vec<f64> = subset.iter().map(|t| completion_time(t)).collect();
        let paths: f64 = subset.iter().map(|t| path_length(&t.path)).sum();
        let misses = subset.iter().map(|t| t.miss_clicks).sum();
        Ok((descriptive_stats(&times)?, paths / subset.len() as f64, misses))
    };
    let all: Vec<&TrialRecord> = trials.iter().collect();
    let (time, mean_path_px, miss_clicks) = summarize(&all)?;

    let mut widths: Vec<u32> = trials.iter().map(|t| t.width).collect();
    widths.sort_unstable();
    widths.dedup();
    let mut by_width = Vec::with_capacity(widths.len());
    for width in widths {
        let subset: Vec<&TrialRecord> = trials.iter().filter(|t| t.width == width).collect();
        let (time, mean_path_px, miss_clicks) = summarize(&subset)?;
        by_width.push(WidthSummary {
            width,
            time,
            mean_path_px,
            miss_clicks,
        });
    }
    Ok(PointingSummary {
        time,
        mean_path_px,
        miss_clicks,
        by_width,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelKind {
    Homogeneous,
    Heterogeneous,
}

/// One level of the pointing game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub level: u32,
    pub kind: LevelKind,
    /// Widths drawn from for this level; a single entry for homogeneous levels.
    pub widths: Vec<u32>,
    pub targets: u32,
}

fn standard_levels(per_homogeneous: u32, heterogeneous: u32) -> Vec<LevelSpec> {
    let mut levels: Vec<LevelSpec> = [128, 96, 64, 32]
        .iter()
        .enumerate()
        .map(|(i, &w)| LevelSpec {
            level: i as u32 + 1,
            kind: LevelKind::Homogeneous,
            widths: vec![w],
            targets: per_homogeneous,
        })
        .collect();
    levels.push(LevelSpec {
        level: 5,
        kind: LevelKind::Heterogeneous,
        widths: STANDARD_WIDTHS.to_vec(),
        targets: heterogeneous,
    });
    levels
}

/// Layout for players with an upper-limb disability: 4 x 9 + 12 targets.
pub fn disabled_user_levels() -> Vec<LevelSpec> {
    standard_levels(9, 12)
}

/// Layout for able-bodied players: 4 x 15 + 30 targets.
pub fn healthy_user_levels() -> Vec<LevelSpec> {
    standard_levels(15, 30)
}

pub fn total_targets(levels: &[LevelSpec]) -> u32 {
    levels.iter().map(|l| l.targets).sum()
}
