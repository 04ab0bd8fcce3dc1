use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

use super::{Dataset, Sample};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    BadLabel,
    MissingColon,
    BadIndex,
    IndexBelowOne,
    NonIncreasingIndex,
    BadValue,
    Io(String),
}

/// Location of the first malformed token (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind:?} in token {token:?}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub kind: ParseErrorKind,
}

/// Parses LIBSVM text: each non-empty line is `<label> (<index>:<value>)*`.
///
/// Labels `≤ 0` become 0 and labels `> 0` become 1.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Dataset, ParseError> {
    let mut ds = Dataset::default();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ParseError {
            line: lineno + 1,
            column: 0,
            token: String::new(),
            kind: ParseErrorKind::Io(e.to_string()),
        })?;
        if let Some(sample) = parse_line(&line, lineno + 1)? {
            if let Some(&(i, _)) = sample.features.last() {
                ds.dim = ds.dim.max(i as usize);
            }
            ds.samples.push(sample);
        }
    }
    Ok(ds)
}

pub fn read_libsvm_file(path: &Path) -> Result<Dataset, ParseError> {
    let file = std::fs::File::open(path).map_err(|e| ParseError {
        line: 0,
        column: 0,
        token: path.display().to_string(),
        kind: ParseErrorKind::Io(e.to_string()),
    })?;
    parse_libsvm(std::io::BufReader::new(file))
}

fn parse_line(line: &str, lineno: usize) -> Result<Option<Sample>, ParseError> {
    let mut tokens = tokens_with_columns(line);
    let Some((col, label_tok)) = tokens.next() else {
        return Ok(None);
    };
    let err = |column: usize, token: &str, kind| ParseError {
        line: lineno,
        column,
        token: token.to_string(),
        kind,
    };
    let label: f64 = label_tok
        .parse()
        .ok()
        .filter(|v: &f64| !v.is_nan())
        .ok_or_else(|| err(col, label_tok, ParseErrorKind::BadLabel))?;
    let mut features = Vec::new();
    let mut last = 0u32;
    for (col, tok) in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| err(col, tok, ParseErrorKind::MissingColon))?;
        let idx: i64 = idx
            .parse()
            .map_err(|_| err(col, tok, ParseErrorKind::BadIndex))?;
        if idx < 1 {
            return Err(err(col, tok, ParseErrorKind::IndexBelowOne));
        }
        let idx = u32::try_from(idx).map_err(|_| err(col, tok, ParseErrorKind::BadIndex))?;
        if idx <= last {
            return Err(err(col, tok, ParseErrorKind::NonIncreasingIndex));
        }
        let val: f64 = val
            .parse()
            .map_err(|_| err(col, tok, ParseErrorKind::BadValue))?;
        if !val.is_finite() {
            return Err(err(col, tok, ParseErrorKind::BadValue));
        }
        features.push((idx, val));
        last = idx;
    }
    Ok(Some(Sample {
        features,
        label: u8::from(label > 0.0),
    }))
}

fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_ascii_whitespace().map(move |tok| {
        // tokens are sub-slices of `line`, so the pointer offset is the byte column
        let offset = tok.as_ptr() as usize - line.as_ptr() as usize;
        (line[..offset].chars().count() + 1, tok)
    })
}

/// Serialises a dataset so that [`parse_libsvm`] reproduces it exactly.
pub fn to_libsvm(ds: &Dataset) -> String {
    let mut out = String::new();
    for s in &ds.samples {
        out.push_str(if s.label == 1 { "+1" } else { "-1" });
        for &(i, v) in &s.features {
            // `{}` on f64 prints the shortest representation that round-trips
            let _ = write!(out, " {i}:{v}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset, ParseError> {
        parse_libsvm(text.as_bytes())
    }

    #[test]
    fn basic_line() {
        let ds = parse("+1 1:0.5 3:1\n").unwrap();
        assert_eq!(ds.samples[0].label, 1);
        assert_eq!(ds.samples[0].features, vec![(1, 0.5), (3, 1.0)]);
        assert_eq!(ds.dim, 3);
    }

    #[test]
    fn empty_feature_list() {
        let ds = parse("-1\n\n   \n").unwrap();
        assert_eq!(ds.samples.len(), 1);
        assert_eq!(ds.samples[0].label, 0);
        assert!(ds.samples[0].features.is_empty());
    }

    #[test]
    fn zero_label_maps_to_zero() {
        let ds = parse("0 2:1\n2 1:1\n").unwrap();
        assert_eq!(ds.samples[0].label, 0);
        assert_eq!(ds.samples[1].label, 1);
    }

    #[test]
    fn bad_value_is_located() {
        let e = parse("1 3:abc").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(e.column, 3);
        assert_eq!(e.token, "3:abc");
        assert_eq!(e.kind, ParseErrorKind::BadValue);
    }

    #[test]
    fn index_rules() {
        assert_eq!(
            parse("1 0:1").unwrap_err().kind,
            ParseErrorKind::IndexBelowOne
        );
        let e = parse("1 1:1\n-1 2:1 2:3").unwrap_err();
        assert_eq!(
            (e.line, e.column, e.kind),
            (2, 8, ParseErrorKind::NonIncreasingIndex)
        );
        assert_eq!(parse("1 5").unwrap_err().kind, ParseErrorKind::MissingColon);
        assert_eq!(parse("x 1:1").unwrap_err().kind, ParseErrorKind::BadLabel);
    }

    #[test]
    fn round_trip() {
        let text = "+1 1:0.5 3:1\n-1\n+1 2:-1e-300 7:0.1\n";
        let ds = parse(text).unwrap();
        let again = parse(&to_libsvm(&ds)).unwrap();
        assert_eq!(ds, again);
    }
}
