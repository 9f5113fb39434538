//! CSV records and whitespace-separated plot data.
//!
//! Reals are written in Rust's shortest round-trip form, so parsing a field
//! back yields the identical `f64`. Optional fields are left empty.

use std::fs;
use std::path::Path;

use rigalign::theory::{ReportRow, REPORT_CSV_HEADER};
use rigalign::{Error, Result};

use crate::sweep::{Axis, PhaseCell};
use crate::trial::{Method, TrialRecord};

pub const CSV_HEADER: &str =
    "trial,seed,n,d,s,m,t,sigma,q,method,align_error,feat_rel_dist,feat_exact,objective,swap_events,mean_degree,runtime_ms";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One line per (record, method); `trial` is the record's index.
pub fn csv_string(records: &[TrialRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (k, r) in records.iter().enumerate() {
        for o in &r.outcomes {
            let fields = [
                k.to_string(),
                r.seed.to_string(),
                r.n.to_string(),
                r.d.to_string(),
                r.s.to_string(),
                r.m.to_string(),
                r.t.to_string(),
                r.sigma.to_string(),
                r.q.to_string(),
                o.method.to_string(),
                o.align_error.to_string(),
                opt(o.feat_rel_dist),
                opt(o.feat_exact.map(u8::from)),
                o.objective.to_string(),
                opt(o.swap_events),
                r.mean_degree.to_string(),
                o.runtime_ms.to_string(),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn write_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    write_text(path, &csv_string(records))
}

/// A parsed CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub s: f64,
    pub m: f64,
    pub t: u32,
    pub sigma: f64,
    pub q: f64,
    pub method: Method,
    pub align_error: f64,
    pub feat_rel_dist: Option<f64>,
    pub feat_exact: Option<bool>,
    pub objective: f64,
    pub swap_events: Option<u64>,
    pub mean_degree: f64,
    pub runtime_ms: f64,
}

fn field<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Format(format!("line {line}: bad {name} `{s}`")))
}

fn opt_field<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        field(s, name, line).map(Some)
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Format("missing or unexpected CSV header".into()));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let no = k + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 17 {
            return Err(Error::Format(format!("line {no}: expected 17 fields, got {}", f.len())));
        }
        let feat_exact = match f[12] {
            "" => None,
            "0" => Some(false),
            "1" => Some(true),
            other => return Err(Error::Format(format!("line {no}: bad feat_exact `{other}`"))),
        };
        rows.push(CsvRow {
            trial: field(f[0], "trial", no)?,
            seed: field(f[1], "seed", no)?,
            n: field(f[2], "n", no)?,
            d: field(f[3], "d", no)?,
            s: field(f[4], "s", no)?,
            m: field(f[5], "m", no)?,
            t: field(f[6], "t", no)?,
            sigma: field(f[7], "sigma", no)?,
            q: field(f[8], "q", no)?,
            method: f[9].parse()?,
            align_error: field(f[10], "align_error", no)?,
            feat_rel_dist: opt_field(f[11], "feat_rel_dist", no)?,
            feat_exact,
            objective: field(f[13], "objective", no)?,
            swap_events: opt_field(f[14], "swap_events", no)?,
            mean_degree: field(f[15], "mean_degree", no)?,
            runtime_ms: field(f[16], "runtime_ms", no)?,
        });
    }
    Ok(rows)
}

/// The per-point quantity summarized in plot data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotMetric {
    #[default]
    AlignError,
    FeatRelDist,
    Objective,
}

impl PlotMetric {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlotMetric::AlignError => "align_error",
            PlotMetric::FeatRelDist => "feat_rel_dist",
            PlotMetric::Objective => "objective",
        }
    }

    fn value(&self, r: &TrialRecord, method: Method) -> Option<f64> {
        let o = r.outcome(method)?;
        match self {
            PlotMetric::AlignError => Some(o.align_error),
            PlotMetric::FeatRelDist => o.feat_rel_dist,
            PlotMetric::Objective => Some(o.objective),
        }
    }
}

/// Mean and standard error of the mean (sample variance, `n - 1`).
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub axis_value: f64,
    /// `(method, mean, standard error)` in method order.
    pub series: Vec<(Method, f64, f64)>,
}

/// Groups records by axis value, in order of first appearance.
pub fn summarize(records: &[TrialRecord], axis: Axis, metric: PlotMetric) -> Vec<PlotPoint> {
    let mut methods: Vec<Method> = records
        .iter()
        .flat_map(|r| r.outcomes.iter().map(|o| o.method))
        .collect();
    methods.sort();
    methods.dedup();
    let mut values: Vec<f64> = Vec::new();
    for r in records {
        let v = axis.value_of(r);
        if !values.contains(&v) {
            values.push(v);
        }
    }
    values
        .into_iter()
        .map(|v| {
            let series = methods
                .iter()
                .map(|&meth| {
                    let xs: Vec<f64> = records
                        .iter()
                        .filter(|r| axis.value_of(r) == v)
                        .filter_map(|r| metric.value(r, meth))
                        .collect();
                    let (mean, se) = mean_se(&xs);
                    (meth, mean, se)
                })
                .collect();
            PlotPoint { axis_value: v, series }
        })
        .collect()
}

pub fn plot_data_string(records: &[TrialRecord], axis: Axis, metric: PlotMetric) -> String {
    let points = summarize(records, axis, metric);
    let mut header = format!("# {}", axis.as_str());
    if let Some(first) = points.first() {
        for (m, _, _) in &first.series {
            header.push_str(&format!(" {m}_{0}_mean {m}_{0}_se", metric.as_str()));
        }
    }
    let mut out = header;
    out.push('\n');
    for p in points {
        out.push_str(&p.axis_value.to_string());
        for (_, mean, se) in &p.series {
            out.push_str(&format!(" {mean} {se}"));
        }
        out.push('\n');
    }
    out
}

pub fn emit_plot_data(records: &[TrialRecord], axis: Axis, metric: PlotMetric, path: &Path) -> Result<()> {
    write_text(path, &plot_data_string(records, axis, metric))
}

pub fn phase_string(cells: &[PhaseCell]) -> String {
    let mut out = String::from("# alpha beta m d s margin_ratio condition method rate\n");
    for c in cells {
        let prefix = format!(
            "{} {} {} {} {} {} {}",
            c.alpha,
            c.beta,
            c.m,
            c.d,
            c.s,
            c.margin_ratio,
            u8::from(c.condition_satisfied)
        );
        if let Some(reason) = &c.skipped {
            out.push_str(&format!("{prefix} skipped NaN # {reason}\n"));
            continue;
        }
        for (m, rate) in &c.recovery_rate {
            out.push_str(&format!("{prefix} {m} {rate}\n"));
        }
    }
    out
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}
