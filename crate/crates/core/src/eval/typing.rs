//! Sentence-typing metrics on the no-backspace virtual keyboard.

use serde::{Deserialize, Serialize};

use super::stats::mean;
use super::EvalError;

/// Sentences shown by the typing task, in order.
pub const SENTENCES: [&str; 5] = [
    "Rise and shine.",
    "Nothing lasts forever.",
    "Be honest.",
    "Respect the elders.",
    "Follow your heart.",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypingRecord {
    pub target: String,
    pub typed: String,
    pub keystrokes: u32,
    pub t_appear: f64,
    pub t_first_key: f64,
    pub t_enter: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participant: Option<String>,
}

impl TypingRecord {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.t_appear <= self.t_first_key && self.t_first_key <= self.t_enter) {
            return Err(EvalError::Invalid(format!(
                "\"{}\": timestamps out of order",
                self.target
            )));
        }
        let typed_len = self.typed.chars().count();
        if (self.keystrokes as usize) < typed_len {
            return Err(EvalError::Invalid(format!(
                "\"{}\": {} keystrokes for {} typed characters",
                self.target, self.keystrokes, typed_len
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TypingMetrics {
    pub fat: f64,
    pub sct: f64,
    pub miss_types: usize,
    pub accuracy: f64,
    /// `None` when SCT is zero.
    pub wpm: Option<f64>,
    pub cpm: Option<f64>,
}

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = diag + usize::from(ca != cb);
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(row[j + 1] + 1);
        }
    }
    row[b.len()]
}

/// `max(0, (L - miss) / L) * 100`. An empty target scores 100 only when
/// nothing was mistyped.
pub fn accuracy_percent(target_len: usize, miss_types: f64) -> f64 {
    if target_len == 0 {
        return if miss_types == 0.0 { 100.0 } else { 0.0 };
    }
    let l = target_len as f64;
    ((l - miss_types) / l).max(0.0) * 100.0
}

/// Words per minute with a five-character word over the target length.
pub fn words_per_minute(target_len: usize, sct: f64) -> Option<f64> {
    (sct > 0.0).then(|| (target_len as f64 / 5.0) / (sct / 60.0))
}

pub fn chars_per_minute(typed_len: usize, sct: f64) -> Option<f64> {
    (sct > 0.0).then(|| typed_len as f64 / (sct / 60.0))
}

pub fn typing_metrics(rec: &TypingRecord) -> Result<TypingMetrics, EvalError> {
    rec.validate()?;
    let target_len = rec.target.chars().count();
    let miss_types = levenshtein(&rec.typed, &rec.target);
    let sct = rec.t_enter - rec.t_first_key;
    Ok(TypingMetrics {
        fat: rec.t_first_key - rec.t_appear,
        sct,
        miss_types,
        accuracy: accuracy_percent(target_len, miss_types as f64),
        wpm: words_per_minute(target_len, sct),
        cpm: chars_per_minute(rec.typed.chars().count(), sct),
    })
}

/// Per (sentence, device) means, one row of the typing report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentenceSummary {
    pub target: String,
    pub device: String,
    pub n: usize,
    pub fat: f64,
    pub sct: f64,
    pub miss_types: f64,
    pub accuracy: f64,
    /// Mean over records with a defined rate.
    pub wpm: Option<f64>,
    pub cpm: Option<f64>,
    /// Records whose SCT was zero.
    pub zero_sct: usize,
}

pub fn summarize_typing(records: &[TypingRecord]) -> Result<Vec<SentenceSummary>, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty("typing records"));
    }
    let mut rows: Vec<(String, String, Vec<TypingMetrics>)> = Vec::new();
    for rec in records {
        let m = typing_metrics(rec)?;
        let device = rec.device.clone().unwrap_or_else(|| "-".into());
        match rows.iter_mut().find(|(t, d, _)| *t == rec.target && *d == device) {
            Some((_, _, ms)) => ms.push(m),
            None => rows.push((rec.target.clone(), device, vec![m])),
        }
    }
    Ok(rows
        .into_iter()
        .map(|(target, device, ms)| {
            let col = |f: fn(&TypingMetrics) -> f64| {
                mean(&ms.iter().map(f).collect::<Vec<_>>()).unwrap_or(0.0)
            };
            let wpm: Vec<f64> = ms.iter().filter_map(|m| m.wpm).collect();
            let cpm: Vec<f64> = ms.iter().filter_map(|m| m.cpm).collect();
            SentenceSummary {
                n: ms.len(),
                fat: col(|m| m.fat),
                sct: col(|m| m.sct),
                miss_types: col(|m| m.miss_types as f64),
                accuracy: col(|m| m.accuracy),
                wpm: mean(&wpm),
                cpm: mean(&cpm),
                zero_sct: ms.len() - wpm.len(),
                target,
                device,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(a: &[char], b: &[char]) -> usize {
        match (a.split_first(), b.split_first()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((x, ra)), Some((y, rb))) => {
                let sub = naive(ra, rb) + usize::from(x != y);
                sub.min(naive(ra, b) + 1).min(naive(a, rb) + 1)
            }
        }
    }

    fn record(target: &str, typed: &str, sct: f64) -> TypingRecord {
        TypingRecord {
            target: target.into(),
            typed: typed.into(),
            keystrokes: typed.chars().count() as u32,
            t_appear: 0.0,
            t_first_key: 1.5,
            t_enter: 1.5 + sct,
            device: None,
            participant: None,
        }
    }

    #[test]
    fn edit_distances() {
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "Be honest."), 10);
        assert_eq!(levenshtein("Be honest.", ""), 10);
    }

    #[test]
    fn perfect_sentence() {
        let m = typing_metrics(&record("Be honest.", "Be honest.", 6.0)).unwrap();
        assert_eq!(m.miss_types, 0);
        assert_eq!(m.accuracy, 100.0);
        assert_eq!(m.fat, 1.5);
        assert!((m.wpm.unwrap() - 20.0).abs() < 1e-12);
        assert!((m.cpm.unwrap() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn mean_miss_types_give_table_accuracy() {
        assert!((accuracy_percent(15, 5.1111) - 66.00).abs() < 0.1);
        assert!((words_per_minute(10, 7.4531).unwrap() - 16.2004).abs() / 16.2004 < 0.01);
    }

    #[test]
    fn zero_sct_leaves_rates_undefined() {
        let m = typing_metrics(&record("Be honest.", "B", 0.0)).unwrap();
        assert_eq!((m.wpm, m.cpm), (None, None));
        let s = summarize_typing(&[record("Be honest.", "B", 0.0)]).unwrap();
        assert_eq!(s[0].zero_sct, 1);
    }

    #[test]
    fn invariant_violations_are_rejected() {
        let mut r = record("Be honest.", "Be", 2.0);
        r.keystrokes = 1;
        assert!(typing_metrics(&r).is_err());
        let mut r = record("Be honest.", "Be", 2.0);
        r.t_appear = 5.0;
        assert!(typing_metrics(&r).is_err());
    }

    #[test]
    fn summary_groups_by_sentence_and_device() {
        let mut a = record("Be honest.", "Be honest.", 6.0);
        a.device = Some("auxilio".into());
        let mut b = record("Be honest.", "Be honezt.", 4.0);
        b.device = Some("auxilio".into());
        let c = record("Be honest.", "Be honest.", 6.0);
        let rows = summarize_typing(&[a, b, c]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 2);
        assert!((rows[0].miss_types - 0.5).abs() < 1e-12);
        assert!((rows[0].wpm.unwrap() - 25.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn matches_recursive_oracle(a in "[ab ]{0,7}", b in "[abc]{0,7}") {
            let ac: Vec<char> = a.chars().collect();
            let bc: Vec<char> = b.chars().collect();
            prop_assert_eq!(levenshtein(&a, &b), naive(&ac, &bc));
        }

        #[test]
        fn accuracy_and_miss_bounds(target in "[a-z .]{1,25}", typed in "[a-z .]{0,25}") {
            let m = typing_metrics(&record(&target, &typed, 3.0)).unwrap();
            prop_assert!((0.0..=100.0).contains(&m.accuracy));
            prop_assert!(m.miss_types <= target.len().max(typed.len()));
        }
    }
}
