use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, RowError};

/// One directed account pair, aggregated over all of its transactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransactionEdge {
    pub source: String,
    pub target: String,
    pub tx_count: u64,
    pub total_amount: f64,
    pub start_year: i32,
    pub end_year: i32,
}

impl TransactionEdge {
    pub fn average_amount(&self) -> f64 {
        self.total_amount / self.tx_count as f64
    }
}

const COLUMNS: [&str; 6] = [
    "source",
    "target",
    "tx_count",
    "total_amount",
    "start_year",
    "end_year",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    /// Any malformed row fails the whole parse.
    #[default]
    Strict,
    /// Malformed rows are skipped and reported as diagnostics.
    Lenient,
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub delimiter: u8,
    pub mode: ParseMode,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            delimiter: b',',
            mode: ParseMode::Strict,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseReport {
    pub edges: Vec<TransactionEdge>,
    /// Rows with `source == target`; these are always dropped.
    pub self_loops: usize,
    /// Malformed rows skipped in lenient mode.
    pub diagnostics: Vec<RowError>,
}

/// Parses a header-bearing delimited edge list.
///
/// Columns are located by header name (case-insensitive), so extra columns
/// and any column order are accepted. Row order is preserved.
pub fn parse_edge_list<R: Read>(reader: R, opts: ParseOptions) -> Result<ParseReport> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    let mut cols = [0usize; 6];
    for (slot, name) in cols.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }

    let mut report = ParseReport::default();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                report.diagnostics.push(RowError {
                    line,
                    field: "*".into(),
                    message: e.to_string(),
                });
                continue;
            }
        }
        let line = record.position().map_or(line, |p| p.line());
        match parse_row(&record, &cols, line) {
            Ok(edge) if edge.source == edge.target => report.self_loops += 1,
            Ok(edge) => report.edges.push(edge),
            Err(e) => report.diagnostics.push(e),
        }
    }

    if opts.mode == ParseMode::Strict && !report.diagnostics.is_empty() {
        return Err(Error::MalformedRows(report.diagnostics));
    }
    Ok(report)
}

fn parse_row(record: &csv::StringRecord, cols: &[usize; 6], line: u64) -> Result<TransactionEdge, RowError> {
    let field = |i: usize| -> Result<&str, RowError> {
        record.get(cols[i]).ok_or_else(|| RowError {
            line,
            field: COLUMNS[i].into(),
            message: "missing value".into(),
        })
    };
    let bad = |i: usize, message: String| RowError {
        line,
        field: COLUMNS[i].into(),
        message,
    };

    let source = field(0)?;
    let target = field(1)?;
    for (i, tok) in [(0, source), (1, target)] {
        if tok.is_empty() {
            return Err(bad(i, "empty account id".into()));
        }
    }
    let tx_count: u64 = field(2)?
        .parse()
        .map_err(|e| bad(2, format!("not a positive integer: {e}")))?;
    if tx_count == 0 {
        return Err(bad(2, "must be at least 1".into()));
    }
    let total_amount: f64 = field(3)?
        .parse()
        .map_err(|e| bad(3, format!("not a number: {e}")))?;
    if !(total_amount.is_finite() && total_amount > 0.0) {
        return Err(bad(3, "must be positive and finite".into()));
    }
    let start_year: i32 = field(4)?
        .parse()
        .map_err(|e| bad(4, format!("not a year: {e}")))?;
    let end_year: i32 = field(5)?
        .parse()
        .map_err(|e| bad(5, format!("not a year: {e}")))?;
    if start_year > end_year {
        return Err(bad(5, format!("end year {end_year} precedes start year {start_year}")));
    }
    Ok(TransactionEdge {
        source: source.to_string(),
        target: target.to_string(),
        tx_count,
        total_amount,
        start_year,
        end_year,
    })
}

/// Writes edges in the format [`parse_edge_list`] reads.
pub fn write_edge_list<W: Write>(edges: &[TransactionEdge], writer: W, delimiter: u8) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    w.write_record(COLUMNS)?;
    for e in edges {
        w.write_record([
            e.source.as_str(),
            e.target.as_str(),
            &e.tx_count.to_string(),
            &format_amount(e.total_amount),
            &e.start_year.to_string(),
            &e.end_year.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// `{}` on f64 prints the shortest representation that parses back exactly.
fn format_amount(x: f64) -> String {
    format!("{x}")
}

/// Cleaning thresholds applied before graph construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleanThresholds {
    /// Edges are kept only when `total_amount / tx_count` is strictly below this.
    pub max_average_amount: f64,
    pub require_same_year: bool,
}

impl Default for CleanThresholds {
    fn default() -> Self {
        CleanThresholds {
            max_average_amount: 10_000.0,
            require_same_year: true,
        }
    }
}

impl CleanThresholds {
    pub fn keeps(&self, e: &TransactionEdge) -> bool {
        e.average_amount() < self.max_average_amount
            && (!self.require_same_year || e.start_year == e.end_year)
    }
}

/// Keeps account pairs averaging under 10,000 per transaction whose
/// transactions all fall in a single year.
pub fn clean_filter(edges: Vec<TransactionEdge>) -> Vec<TransactionEdge> {
    clean_filter_with(edges, &CleanThresholds::default())
}

pub fn clean_filter_with(edges: Vec<TransactionEdge>, thresholds: &CleanThresholds) -> Vec<TransactionEdge> {
    edges.into_iter().filter(|e| thresholds.keeps(e)).collect()
}
