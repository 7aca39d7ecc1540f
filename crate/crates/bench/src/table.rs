use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Value};
use toda_core::{ErrorReport, InitialDataKind, MethodKind, RegionKind, Status, TodaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
    Json,
}

impl FromStr for TableFormat {
    type Err = TodaError;

    fn from_str(s: &str) -> Result<Self, TodaError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "json" => Ok(TableFormat::Json),
            _ => Err(TodaError::InvalidParameter(format!("unknown table format '{s}'"))),
        }
    }
}

/// Rows of a benchmark run in cell-key order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchTable {
    pub rows: Vec<ErrorReport>,
}

impl BenchTable {
    pub fn new(rows: Vec<ErrorReport>) -> Self {
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows grouped by (initial data, region kind), blocks in first-seen order.
    pub fn blocks(&self) -> Vec<((InitialDataKind, RegionKind), Vec<&ErrorReport>)> {
        let mut blocks: Vec<((InitialDataKind, RegionKind), Vec<&ErrorReport>)> = Vec::new();
        for row in &self.rows {
            let key = (row.id, row.region.kind);
            match blocks.iter_mut().find(|(k, _)| *k == key) {
                Some((_, rows)) => rows.push(row),
                None => blocks.push((key, vec![row])),
            }
        }
        blocks
    }

    /// The row for one cell, if present.
    pub fn find(
        &self,
        method: MethodKind,
        id: &InitialDataKind,
        dt: f64,
        t_final: f64,
        region: RegionKind,
    ) -> Option<&ErrorReport> {
        self.rows.iter().find(|r| {
            r.method == method && r.id == *id && r.dt == dt && r.t_final == t_final && r.region.kind == region
        })
    }
}

/// Four significant digits, or `inf` for a diverged cell.
fn fmt_error(value: f64, status: Status) -> String {
    match status {
        Status::Diverged => "inf".to_string(),
        Status::Ok => format!("{value:.3e}"),
    }
}

const CSV_HEADER: &str = "method,id,dt,T,region,lo,hi,metric,source,status,err_a,err_b";

fn to_csv(table: &BenchTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.id,
            r.dt,
            r.t_final,
            r.region.kind,
            r.region.lo(),
            r.region.hi(),
            r.metric.label(),
            r.source,
            r.status.label(),
            fmt_error(r.err_a, r.status),
            fmt_error(r.err_b, r.status),
        );
    }
    out
}

fn json_error(value: f64, status: Status) -> Value {
    let text = fmt_error(value, status);
    match text.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(n) if status == Status::Ok => Value::Number(n),
        _ => Value::String(text),
    }
}

fn to_json(table: &BenchTable) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "method": r.method.label(),
                "id": r.id.to_string(),
                "dt": r.dt,
                "T": r.t_final,
                "region": r.region.kind.label(),
                "lo": r.region.lo(),
                "hi": r.region.hi(),
                "metric": r.metric.label(),
                "source": r.source.label(),
                "status": r.status.label(),
                "err_a": json_error(r.err_a, r.status),
                "err_b": json_error(r.err_b, r.status),
            })
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&Value::Array(rows)).expect("table rows serialise");
    out.push('\n');
    out
}

fn to_markdown(table: &BenchTable) -> String {
    let mut out = String::new();
    for ((id, kind), rows) in table.blocks() {
        let mut columns: Vec<(f64, f64)> = Vec::new();
        let mut methods: Vec<MethodKind> = Vec::new();
        let mut ranges: Vec<String> = Vec::new();
        for r in &rows {
            if !columns.contains(&(r.t_final, r.dt)) {
                columns.push((r.t_final, r.dt));
            }
            if !methods.contains(&r.method) {
                methods.push(r.method);
            }
            let range = format!("T = {}: [{}, {}]", r.t_final, r.region.lo(), r.region.hi());
            if !ranges.contains(&range) {
                ranges.push(range);
            }
        }
        let metric = rows[0].metric.label();
        let _ = writeln!(out, "### {id}, {kind} region ({metric} error, a / b)\n");
        let _ = writeln!(out, "Sites {}; reference: {}.\n", ranges.join("; "), rows[0].source);

        out.push_str("| method |");
        for (t, dt) in &columns {
            let _ = write!(out, " T = {t}, dt = {dt} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(columns.len()));
        out.push('\n');
        for m in &methods {
            let _ = write!(out, "| {m} |");
            for &(t, dt) in &columns {
                let cell = rows.iter().find(|r| r.method == *m && r.t_final == t && r.dt == dt);
                let text = match cell {
                    Some(r) if r.status == Status::Ok => {
                        format!("{} / {}", fmt_error(r.err_a, r.status), fmt_error(r.err_b, r.status))
                    }
                    Some(_) => "—".to_string(),
                    None => String::new(),
                };
                let _ = write!(out, " {text} |");
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Serialises `table`. Output depends only on the rows, so equal tables give
/// byte-identical text.
pub fn emit_table(table: &BenchTable, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => to_csv(table),
        TableFormat::Markdown => to_markdown(table),
        TableFormat::Json => to_json(table),
    }
}
