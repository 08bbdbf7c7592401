//! Input parsing and text/CSV rendering for the evaluation reports.

use std::fmt::Write as _;
use std::io::{BufRead, Read};

use serde::de::DeserializeOwned;

use super::pointing::PointingSummary;
use super::stats::DescriptiveStats;
use super::sus::{SusResponse, SusSummary, SUS_ITEMS};
use super::typing::SentenceSummary;
use super::EvalError;

/// One JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| EvalError::Json { line: i + 1, source })?);
    }
    Ok(out)
}

/// SUS ratings, one respondent per row. Rows hold either the ten ratings or
/// a label followed by them. A leading non-numeric row is taken as a header.
pub fn read_sus_csv<R: Read>(reader: R) -> Result<Vec<SusResponse>, EvalError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let fields: Vec<&str> = record.iter().collect();
        let ratings = match fields.len() {
            SUS_ITEMS => &fields[..],
            n if n == SUS_ITEMS + 1 => &fields[1..],
            n => {
                return Err(EvalError::Invalid(format!(
                    "row {}: expected {SUS_ITEMS} ratings, got {n} columns",
                    i + 1
                )))
            }
        };
        let parsed: Result<Vec<u8>, _> = ratings.iter().map(|f| f.parse::<u8>()).collect();
        match parsed {
            Ok(values) => out.push(SusResponse::try_from(&values[..])?),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(EvalError::Invalid(format!("row {}: non-integer rating", i + 1))),
        }
    }
    Ok(out)
}

/// Numeric values of the named column of a headed CSV file.
pub fn read_csv_column<R: Read>(reader: R, column: &str) -> Result<Vec<f64>, EvalError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let idx = rdr
        .headers()?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| EvalError::Invalid(format!("no column named \"{column}\"")))?;
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let field = record.get(idx).unwrap_or("");
        let v = field.parse::<f64>().map_err(|_| {
            EvalError::Invalid(format!("row {}: \"{field}\" is not a number", i + 2))
        })?;
        out.push(v);
    }
    Ok(out)
}

const TIME_HEADER: [&str; 8] = ["Tasks", "Mean", "SD", "Min", "25th", "50th", "75th", "Max"];

fn time_cells(s: &DescriptiveStats) -> Vec<String> {
    let sd = if s.sd_defined { format!("{:.4}", s.sd) } else { "n/a".into() };
    let mut cells = vec![s.n.to_string(), format!("{:.4}", s.mean), sd];
    cells.extend([s.min, s.p25, s.p50, s.p75, s.max].iter().map(|v| format!("{v:.4}")));
    cells
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, header.to_vec());
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    let _ = writeln!(out, "{}", "-".repeat(total));
    for row in rows {
        line(&mut out, row.iter().map(String::as_str).collect());
    }
    out
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Io(e.into_error()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn pointing_rows(s: &PointingSummary) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut push = |label: String, t: &DescriptiveStats, path: f64, miss: u32| {
        let mut row = vec![label];
        row.extend(time_cells(t));
        row.push(format!("{path:.1}"));
        row.push(miss.to_string());
        rows.push(row);
    };
    push("all".into(), &s.time, s.mean_path_px, s.miss_clicks);
    for w in &s.by_width {
        push(format!("{} px", w.width), &w.time, w.mean_path_px, w.miss_clicks);
    }
    rows
}

fn pointing_header() -> Vec<&'static str> {
    let mut h = vec!["Width"];
    h.extend(TIME_HEADER);
    h.extend(["Path(px)", "Misses"]);
    h
}

/// Completion-time statistics in seconds, overall then per width.
pub fn pointing_table(s: &PointingSummary) -> String {
    let mut out = render_table(&pointing_header(), &pointing_rows(s));
    for w in &s.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn pointing_csv(s: &PointingSummary) -> Result<String, EvalError> {
    to_csv(&pointing_header(), &pointing_rows(s))
}

const TYPING_HEADER: [&str; 9] = [
    "Sentence", "Device", "N", "FAT", "SCT", "MissTypes", "Accuracy", "WPM", "CPM",
];

fn typing_rows(rows: &[SentenceSummary]) -> Vec<Vec<String>> {
    let rate = |v: Option<f64>| v.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"));
    rows.iter()
        .map(|r| {
            vec![
                r.target.clone(),
                r.device.clone(),
                r.n.to_string(),
                format!("{:.4}", r.fat),
                format!("{:.4}", r.sct),
                format!("{:.4}", r.miss_types),
                format!("{:.2}", r.accuracy),
                rate(r.wpm),
                rate(r.cpm),
            ]
        })
        .collect()
}

/// Per-sentence means for each device.
pub fn typing_table(rows: &[SentenceSummary]) -> String {
    let mut out = render_table(&TYPING_HEADER, &typing_rows(rows));
    for r in rows.iter().filter(|r| r.zero_sct > 0) {
        let _ = writeln!(
            out,
            "warning: \"{}\" ({}): {} record(s) with zero SCT excluded from WPM/CPM",
            r.target, r.device, r.zero_sct
        );
    }
    out
}

pub fn typing_csv(rows: &[SentenceSummary]) -> Result<String, EvalError> {
    to_csv(&TYPING_HEADER, &typing_rows(rows))
}

fn sus_header() -> Vec<String> {
    let mut h = vec!["Respondent".to_string()];
    h.extend((1..=SUS_ITEMS).map(|i| format!("SUS{i}")));
    h.extend(["Score".into(), "Grade".into()]);
    h
}

fn sus_rows(responses: &[SusResponse], s: &SusSummary) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = responses
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![format!("R{}", i + 1)];
            row.extend(r.ratings().iter().map(u8::to_string));
            row.push(format!("{:.2}", s.scores[i]));
            row.push(s.grades[i].to_string());
            row
        })
        .collect();
    let mut mean_row = vec!["Mean".to_string()];
    mean_row.extend(s.item_mean.iter().map(|v| format!("{v:.2}")));
    mean_row.push(format!("{:.2}", s.score_mean));
    mean_row.push(s.grade.to_string());
    let mut sd_row = vec!["SD".to_string()];
    sd_row.extend(s.item_sd.iter().map(|v| format!("{v:.2}")));
    sd_row.push(format!("{:.2}", s.score_sd));
    sd_row.push(String::new());
    rows.push(mean_row);
    rows.push(sd_row);
    rows
}

/// Ratings, scores and grades per respondent with mean and SD footers.
pub fn sus_table(responses: &[SusResponse], s: &SusSummary) -> String {
    let header = sus_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    render_table(&header, &sus_rows(responses, s))
}

pub fn sus_csv(responses: &[SusResponse], s: &SusSummary) -> Result<String, EvalError> {
    let header = sus_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    to_csv(&header, &sus_rows(responses, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::pointing::TrialRecord;
    use crate::eval::{summarize_trials, sus_summary};

    #[test]
    fn sus_csv_with_header_and_labels() {
        let text = "respondent,SUS1,SUS2,SUS3,SUS4,SUS5,SUS6,SUS7,SUS8,SUS9,SUS10\n\
                    R1,4,1,5,1,5,1,4,1,4,1\n\
                    R2,3,3,3,3,3,3,3,3,3,3\n";
        let rs = read_sus_csv(text.as_bytes()).unwrap();
        assert_eq!(rs.len(), 2);
        let bare = read_sus_csv("4,1,5,1,5,1,4,1,4,1\n".as_bytes()).unwrap();
        assert_eq!(bare[0], rs[0]);
        assert!(read_sus_csv("4,1,5\n".as_bytes()).is_err());
        assert!(read_sus_csv("4,1,5,1,5,1,4,1,4,1\nx,1,5,1,5,1,4,1,4,1\n".as_bytes()).is_err());
    }

    #[test]
    fn named_column() {
        let v = read_csv_column("id,time\n1,0.5\n2,0.75\n".as_bytes(), "time").unwrap();
        assert_eq!(v, vec![0.5, 0.75]);
        assert!(read_csv_column("id,time\n".as_bytes(), "wpm").is_err());
        assert!(read_csv_column("id,time\n1,abc\n".as_bytes(), "time").is_err());
    }

    #[test]
    fn jsonl_reports_line_numbers() {
        let text = "{\"trial\":1,\"width\":32,\"center\":[0,0],\"path\":[[0,0]],\"t_start\":0,\"t_end\":1}\n\nnot json\n";
        match read_jsonl::<TrialRecord, _>(text.as_bytes()) {
            Err(EvalError::Json { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tables_contain_all_columns() {
        let t = TrialRecord {
            trial: 1,
            width: 32,
            center: [0.0, 0.0],
            path: vec![[0.0, 0.0], [3.0, 4.0]],
            t_start: 0.0,
            t_end: 0.782,
            miss_clicks: 0,
            level: None,
        };
        let s = summarize_trials(&[t]).unwrap();
        let text = pointing_table(&s);
        for h in TIME_HEADER {
            assert!(text.contains(h), "{h} missing");
        }
        assert!(text.contains("0.7820"));
        assert!(pointing_csv(&s).unwrap().starts_with("Width,Tasks,Mean,SD"));

        let r = SusResponse::new([4, 1, 5, 1, 5, 1, 4, 1, 4, 1]).unwrap();
        let sum = sus_summary(&[r]).unwrap();
        assert!(sus_table(&[r], &sum).contains("92.50"));
    }
}
