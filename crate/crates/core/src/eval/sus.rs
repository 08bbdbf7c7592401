//! System Usability Scale scoring and curved letter grades.

use std::fmt;

use serde::Serialize;

use super::stats::{mean, sample_variance};
use super::EvalError;

pub const SUS_ITEMS: usize = 10;

/// Ten Likert ratings in questionnaire order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SusResponse {
    ratings: [u8; SUS_ITEMS],
}

impl SusResponse {
    pub fn new(ratings: [u8; SUS_ITEMS]) -> Result<Self, EvalError> {
        if let Some((i, r)) = ratings.iter().enumerate().find(|(_, r)| !(1..=5).contains(*r)) {
            return Err(EvalError::Invalid(format!("SUS{}: rating {r} outside 1..=5", i + 1)));
        }
        Ok(Self { ratings })
    }

    pub fn ratings(&self) -> &[u8; SUS_ITEMS] {
        &self.ratings
    }
}

impl TryFrom<&[u8]> for SusResponse {
    type Error = EvalError;

    fn try_from(values: &[u8]) -> Result<Self, EvalError> {
        let ratings: [u8; SUS_ITEMS] = values.try_into().map_err(|_| {
            EvalError::Invalid(format!("expected {SUS_ITEMS} ratings, got {}", values.len()))
        })?;
        Self::new(ratings)
    }
}

pub fn sus_score(resp: &SusResponse) -> f64 {
    let raw: u32 = resp
        .ratings
        .iter()
        .enumerate()
        .map(|(i, &r)| if i % 2 == 0 { r as u32 - 1 } else { 5 - r as u32 })
        .sum();
    raw as f64 * 2.5
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SusGrade {
    #[serde(rename = "A+")]
    APlus,
    A,
    #[serde(rename = "A-")]
    AMinus,
    #[serde(rename = "B+")]
    BPlus,
    B,
    #[serde(rename = "B-")]
    BMinus,
    #[serde(rename = "C+")]
    CPlus,
    C,
    #[serde(rename = "C-")]
    CMinus,
    D,
    F,
}

/// Lower bound of each band, best first. `F` covers the rest.
const GRADE_BANDS: [(f64, SusGrade); 10] = [
    (84.1, SusGrade::APlus),
    (80.8, SusGrade::A),
    (78.9, SusGrade::AMinus),
    (77.2, SusGrade::BPlus),
    (74.1, SusGrade::B),
    (72.6, SusGrade::BMinus),
    (71.1, SusGrade::CPlus),
    (65.0, SusGrade::C),
    (62.7, SusGrade::CMinus),
    (51.7, SusGrade::D),
];

impl SusGrade {
    pub fn label(self) -> &'static str {
        match self {
            SusGrade::APlus => "A+",
            SusGrade::A => "A",
            SusGrade::AMinus => "A-",
            SusGrade::BPlus => "B+",
            SusGrade::B => "B",
            SusGrade::BMinus => "B-",
            SusGrade::CPlus => "C+",
            SusGrade::C => "C",
            SusGrade::CMinus => "C-",
            SusGrade::D => "D",
            SusGrade::F => "F",
        }
    }
}

impl fmt::Display for SusGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn sus_grade(score: f64) -> SusGrade {
    GRADE_BANDS
        .iter()
        .find(|(lo, _)| score >= *lo)
        .map_or(SusGrade::F, |&(_, g)| g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SusSummary {
    pub scores: Vec<f64>,
    pub grades: Vec<SusGrade>,
    pub item_mean: [f64; SUS_ITEMS],
    /// Sample SD per item; zeros for a single response.
    pub item_sd: [f64; SUS_ITEMS],
    pub score_mean: f64,
    pub score_sd: f64,
    pub grade: SusGrade,
}

pub fn sus_summary(responses: &[SusResponse]) -> Result<SusSummary, EvalError> {
    if responses.is_empty() {
        return Err(EvalError::Empty("SUS responses"));
    }
    let scores: Vec<f64> = responses.iter().map(sus_score).collect();
    let mut item_mean = [0.0; SUS_ITEMS];
    let mut item_sd = [0.0; SUS_ITEMS];
    for i in 0..SUS_ITEMS {
        let col: Vec<f64> = responses.iter().map(|r| r.ratings[i] as f64).collect();
        item_mean[i] = mean(&col).unwrap_or(0.0);
        item_sd[i] = sample_variance(&col).map_or(0.0, f64::sqrt);
    }
    let score_mean = mean(&scores).unwrap_or(0.0);
    Ok(SusSummary {
        grades: scores.iter().map(|&s| sus_grade(s)).collect(),
        score_sd: sample_variance(&scores).map_or(0.0, f64::sqrt),
        grade: sus_grade(score_mean),
        scores,
        item_mean,
        item_sd,
        score_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resp(r: [u8; 10]) -> SusResponse {
        SusResponse::new(r).unwrap()
    }

    #[test]
    fn example_scores() {
        assert_eq!(sus_score(&resp([4, 1, 5, 1, 5, 1, 4, 1, 4, 1])), 92.5);
        assert_eq!(sus_score(&resp([3; 10])), 50.0);
        assert_eq!(sus_score(&resp([4, 1, 3, 2, 4, 2, 3, 2, 3, 2])), 70.0);
        assert_eq!(sus_score(&resp([5, 1, 5, 1, 5, 1, 5, 1, 5, 1])), 100.0);
        assert_eq!(sus_score(&resp([1, 5, 1, 5, 1, 5, 1, 5, 1, 5])), 0.0);
    }

    #[test]
    fn grade_examples() {
        assert_eq!(sus_grade(92.5), SusGrade::APlus);
        assert_eq!(sus_grade(72.5), SusGrade::CPlus);
        assert_eq!(sus_grade(80.0), SusGrade::AMinus);
        assert_eq!(sus_grade(84.1), SusGrade::APlus);
        assert_eq!(sus_grade(51.6), SusGrade::F);
        assert_eq!(SusGrade::BMinus.to_string(), "B-");
    }

    #[test]
    fn bands_are_total_and_ordered() {
        let mut prev = SusGrade::APlus;
        let order: Vec<SusGrade> = GRADE_BANDS.iter().map(|b| b.1).chain([SusGrade::F]).collect();
        for step in (0..=1000).rev() {
            let g = sus_grade(step as f64 / 10.0);
            let (pi, gi) = (
                order.iter().position(|&x| x == prev).unwrap(),
                order.iter().position(|&x| x == g).unwrap(),
            );
            assert!(gi >= pi, "grade got better as score fell");
            prev = g;
        }
    }

    #[test]
    fn every_rating_pattern_is_a_multiple_of_two_and_a_half() {
        // 5^10 is large; walk a mixed-radix counter in steps of 7
        let mut k = 0u64;
        while k < 9_765_625 {
            let mut r = [0u8; 10];
            let mut v = k;
            for slot in r.iter_mut() {
                *slot = (v % 5) as u8 + 1;
                v /= 5;
            }
            let s = sus_score(&resp(r));
            assert!((0.0..=100.0).contains(&s));
            assert_eq!((s / 2.5).fract(), 0.0);
            k += 7;
        }
    }

    #[test]
    fn rejects_out_of_range_and_wrong_length() {
        assert!(SusResponse::new([0, 1, 1, 1, 1, 1, 1, 1, 1, 1]).is_err());
        assert!(SusResponse::new([6, 1, 1, 1, 1, 1, 1, 1, 1, 1]).is_err());
        assert!(SusResponse::try_from(&[3u8; 9][..]).is_err());
    }

    #[test]
    fn single_response_summary() {
        let r = resp([4, 2, 4, 1, 5, 2, 4, 2, 3, 1]);
        let s = sus_summary(&[r]).unwrap();
        assert_eq!(s.score_mean, sus_score(&r));
        assert_eq!(s.item_mean[0], 4.0);
        assert_eq!(s.item_sd, [0.0; 10]);
    }
}
