//! Confusion-matrix CSV and label files.

use partdist_core::{ConfusionMatrix, Labeling};

use crate::error::CliError;

// Comment lines are blanked rather than dropped so reported line numbers
// match the file.
fn uncommented(text: &str) -> String {
    text.lines()
        .map(|line| if line.trim_start().starts_with('#') { "" } else { line })
        .collect::<Vec<_>>()
        .join("\n")
}

fn reader(text: &str, delimiter: u8) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn line_at(text: &str, position: Option<&csv::Position>) -> u64 {
    position.map_or(0, |p| {
        let bytes = text.as_bytes();
        let mut byte = (p.byte() as usize).min(bytes.len());
        while byte < bytes.len() && matches!(bytes[byte], b'\n' | b'\r') {
            byte += 1;
        }
        bytes[..byte].iter().filter(|&&b| b == b'\n').count() as u64 + 1
    })
}

fn parse_error(source: &str, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse { file: source.to_string(), line, message: message.into() }
}

/// Parses headerless rows of nonnegative integers. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_matrix_csv(text: &str, source: &str) -> Result<ConfusionMatrix, CliError> {
    let text = uncommented(text);
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for record in reader(&text, b',').records() {
        let record = record.map_err(|e| {
            let line = line_at(&text, e.position());
            parse_error(source, line, e.to_string())
        })?;
        let line = line_at(&text, record.position());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|cell| cell.parse::<u64>().map_err(|_| parse_error(source, line, format!("not a count: {cell:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_error(
                    source,
                    line,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(source, 0, "no matrix rows"));
    }
    let m = ConfusionMatrix::from_rows(&rows)?;
    if m.total() == 0 {
        return Err(parse_error(source, 0, "matrix total is zero"));
    }
    Ok(m)
}

pub fn serialize_matrix_csv(m: &ConfusionMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(u64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Two label columns, one object per line.
pub fn parse_label_pairs(
    text: &str,
    delimiter: u8,
    source: &str,
) -> Result<(Labeling<String>, Labeling<String>), CliError> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let text = uncommented(text);
    for record in reader(&text, delimiter).records() {
        let record = record.map_err(|e| {
            let line = line_at(&text, e.position());
            parse_error(source, line, e.to_string())
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_error(source, line_at(&text, record.position()), format!("expected 2 labels, found {}", record.len())));
        }
        left.push(record[0].to_string());
        right.push(record[1].to_string());
    }
    if left.is_empty() {
        return Err(parse_error(source, 0, "no labels"));
    }
    Ok((Labeling::new(left)?, Labeling::new(right)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let text = "# iris\n50, 0, 0\n0,48,2\n\n0,1,49\n";
        let m = parse_matrix_csv(text, "iris.csv").unwrap();
        assert_eq!(m.to_rows(), vec![vec![50, 0, 0], vec![0, 48, 2], vec![0, 1, 49]]);
        let again = parse_matrix_csv(&serialize_matrix_csv(&m), "again").unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn matrix_errors_carry_lines() {
        match parse_matrix_csv("1,2\n3,x\n", "m.csv") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_matrix_csv("1,2\n# note\n3,4,5\n", "m.csv") {
            Err(CliError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("expected 2"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_matrix_csv("-1,2\n", "m.csv").is_err());
        assert!(parse_matrix_csv("0,0\n", "m.csv").is_err());
        assert!(parse_matrix_csv("", "m.csv").is_err());
    }

    #[test]
    fn label_pairs() {
        let (a, b) = parse_label_pairs("x\t1\ny\t1\nx\t2\n", b'\t', "l.tsv").unwrap();
        assert_eq!(a.cluster_count(), 2);
        assert_eq!(b.len(), 3);
        match parse_label_pairs("x,1\ny\n", b',', "l.csv") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
