//! Aggregated tables and plots over a metric log.
//!
//! Run ids have the form `model/nN/sSEED`; everything before the first `/`
//! names the model. For every run only its latest epoch counts for a given
//! split and metric. Runs are then pooled per (model, N) into a mean and a
//! sample standard deviation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lsm_core::metrics::MetricRecord;

use crate::error::{LsmError, Result};
use crate::format::{create_dir, write_file};

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub model: String,
    pub split: String,
    pub metric: String,
    pub n_percent: u32,
    /// One value per run, in record order.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; `None` for a single run.
    pub std: Option<f64>,
}

pub fn model_of(run_id: &str) -> &str {
    run_id.split('/').next().unwrap_or(run_id)
}

pub fn mean_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() > 1).then(|| {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    });
    (mean, std)
}

/// Pools records into cells. Models keep their order of first appearance.
pub fn aggregate(records: &[MetricRecord]) -> Result<Vec<Cell>> {
    if records.is_empty() {
        return Err(LsmError::Usage("no metric records to report".into()));
    }
    // Latest epoch per (run, split, metric).
    let mut latest: BTreeMap<(&str, &str, &str), (usize, usize)> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let key = (r.run_id.as_str(), r.split.as_str(), r.metric.as_str());
        let e = latest.entry(key).or_insert((r.epoch, i));
        if r.epoch >= e.0 {
            *e = (r.epoch, i);
        }
    }
    let mut keep: Vec<usize> = latest.values().map(|&(_, i)| i).collect();
    keep.sort_unstable();

    let mut models: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(usize, &str, &str, u32), Vec<f64>> = BTreeMap::new();
    for i in keep {
        let r = &records[i];
        let model = model_of(&r.run_id);
        let mi = match models.iter().position(|m| *m == model) {
            Some(p) => p,
            None => {
                models.push(model);
                models.len() - 1
            }
        };
        groups
            .entry((mi, r.split.as_str(), r.metric.as_str(), u32::MAX - r.n_percent))
            .or_default()
            .push(r.value);
    }
    Ok(groups
        .into_iter()
        .map(|((mi, split, metric, inv_n), values)| {
            let (mean, std) = mean_std(&values);
            Cell {
                model: models[mi].to_string(),
                split: split.to_string(),
                metric: metric.to_string(),
                n_percent: u32::MAX - inv_n,
                values,
                mean,
                std,
            }
        })
        .collect())
}

fn select<'a>(cells: &'a [Cell], split: &str, metric: &str) -> Vec<&'a Cell> {
    cells.iter().filter(|c| c.split == split && c.metric == metric).collect()
}

/// Supervision levels present, in descending order.
fn levels(cells: &[&Cell]) -> Vec<u32> {
    let mut n: Vec<u32> = cells.iter().map(|c| c.n_percent).collect();
    n.sort_unstable_by(|a, b| b.cmp(a));
    n.dedup();
    n
}

fn models(cells: &[&Cell]) -> Vec<String> {
    let mut m: Vec<String> = Vec::new();
    for c in cells {
        if !m.contains(&c.model) {
            m.push(c.model.clone());
        }
    }
    m
}

pub fn format_cell(c: &Cell) -> String {
    match c.std {
        Some(s) => format!("{:.4} ± {:.4}", c.mean, s),
        None => format!("{:.4}", c.mean),
    }
}

/// Rows are models, columns supervision levels in descending order; missing
/// combinations stay blank.
pub fn markdown_table(cells: &[Cell], split: &str, metric: &str) -> String {
    let sel = select(cells, split, metric);
    let cols = levels(&sel);
    let mut out = String::new();
    out.push_str("| model |");
    for n in &cols {
        let _ = write!(out, " {n}% |");
    }
    out.push_str("\n|---|");
    for _ in &cols {
        out.push_str("---|");
    }
    out.push('\n');
    for m in models(&sel) {
        let _ = write!(out, "| {m} |");
        for n in &cols {
            match sel.iter().find(|c| c.model == m && c.n_percent == *n) {
                Some(c) => {
                    let _ = write!(out, " {} |", format_cell(c));
                }
                None => out.push_str("  |"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn summary_csv(cells: &[Cell]) -> String {
    let mut out = String::from("model,split,metric,n_percent,count,mean,std\n");
    for c in cells {
        let std = c.std.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.model,
            c.split,
            c.metric,
            c.n_percent,
            c.values.len(),
            c.mean,
            std
        );
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Geometry of the plot area.
pub struct Axes {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub columns: usize,
}

impl Axes {
    pub fn x(&self, col: usize) -> f64 {
        if self.columns <= 1 {
            self.left + self.width / 2.0
        } else {
            self.left + self.width * col as f64 / (self.columns - 1) as f64
        }
    }

    pub fn y(&self, v: f64) -> f64 {
        self.top + self.height * (self.y_max - v) / (self.y_max - self.y_min)
    }
}

/// Mean line per model over descending supervision levels, with a band of
/// plus or minus one sample standard deviation. Missing levels break the
/// line instead of being interpolated.
pub fn svg_plot(cells: &[Cell], split: &str, metric: &str) -> String {
    let sel = select(cells, split, metric);
    let cols = levels(&sel);
    let lo = sel.iter().map(|c| c.mean - c.std.unwrap_or(0.0)).fold(f64::INFINITY, f64::min);
    let hi = sel.iter().map(|c| c.mean + c.std.unwrap_or(0.0)).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    };
    let ax = Axes {
        left: 70.0,
        top: 30.0,
        width: 480.0,
        height: 300.0,
        y_min: lo,
        y_max: hi,
        columns: cols.len(),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="720" height="400" viewBox="0 0 720 400" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<title>{metric} ({split}) vs supervision level</title>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#444"/>"##,
        ax.left, ax.top, ax.width, ax.height
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = ax.y(v);
        let _ = writeln!(
            s,
            r##"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#ddd"/><text x="{:.3}" y="{:.3}" text-anchor="end">{v:.3}</text>"##,
            ax.left,
            ax.left + ax.width,
            ax.left - 6.0,
            y + 4.0
        );
    }
    for (i, n) in cols.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{n}%</text>"#,
            ax.x(i),
            ax.top + ax.height + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">supervision level N</text>"#,
        ax.left + ax.width / 2.0,
        ax.top + ax.height + 38.0
    );
    let _ = writeln!(s, r#"<text x="16" y="{:.3}" transform="rotate(-90 16 {:.3})" text-anchor="middle">{metric}</text>"#, ax.top + ax.height / 2.0, ax.top + ax.height / 2.0);

    for (mi, m) in models(&sel).iter().enumerate() {
        let color = PALETTE[mi % PALETTE.len()];
        let points: Vec<Option<&Cell>> = cols
            .iter()
            .map(|n| sel.iter().copied().find(|c| &c.model == m && c.n_percent == *n))
            .collect();
        // Contiguous runs of present levels.
        let mut runs: Vec<Vec<(usize, &Cell)>> = Vec::new();
        let mut cur = Vec::new();
        for (i, p) in points.iter().enumerate() {
            match p {
                Some(c) => cur.push((i, *c)),
                None if !cur.is_empty() => runs.push(std::mem::take(&mut cur)),
                None => {}
            }
        }
        if !cur.is_empty() {
            runs.push(cur);
        }
        let _ = writeln!(s, r#"<g class="model" data-model="{m}">"#);
        for run in &runs {
            let mut band = String::new();
            for &(i, c) in run {
                let _ = write!(band, "{:.3},{:.3} ", ax.x(i), ax.y(c.mean + c.std.unwrap_or(0.0)));
            }
            for &(i, c) in run.iter().rev() {
                let _ = write!(band, "{:.3},{:.3} ", ax.x(i), ax.y(c.mean - c.std.unwrap_or(0.0)));
            }
            let _ = writeln!(
                s,
                r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                band.trim_end()
            );
            let line: Vec<String> = run
                .iter()
                .map(|&(i, c)| format!("{:.3},{:.3}", ax.x(i), ax.y(c.mean)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="mean" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
        for (i, p) in points.iter().enumerate() {
            if let Some(c) = p {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{color}" data-n="{}" data-mean="{}" data-std="{}" data-count="{}"/>"#,
                    ax.x(i),
                    ax.y(c.mean),
                    c.n_percent,
                    c.mean,
                    c.std.unwrap_or(0.0),
                    c.values.len()
                );
            }
        }
        let ly = ax.top + 14.0 + 18.0 * mi as f64;
        let lx = ax.left + ax.width + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.3}" y1="{ly:.3}" x2="{:.3}" y2="{ly:.3}" stroke="{color}" stroke-width="2"/><text x="{:.3}" y="{:.3}">{m}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Paths written by [`write_report`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub table: PathBuf,
    pub summary: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Writes `table.md`, `summary.csv` and one `plot_<split>_<metric>.svg`
/// per split and metric into `out`.
pub fn write_report(records: &[MetricRecord], out: &Path) -> Result<ReportFiles> {
    let cells = aggregate(records)?;
    create_dir(out)?;
    let mut pairs: Vec<(String, String)> = Vec::new();
    for c in &cells {
        let p = (c.split.clone(), c.metric.clone());
        if !pairs.contains(&p) {
            pairs.push(p);
        }
    }
    // Test results first, then validation, then anything else.
    let rank = |s: &str| match s {
        "test" => 0,
        "val" => 1,
        _ => 2,
    };
    pairs.sort_by(|a, b| (rank(&a.0), &a.0, &a.1).cmp(&(rank(&b.0), &b.0, &b.1)));
    let mut md = String::new();
    let mut plots = Vec::new();
    for (split, metric) in &pairs {
        let _ = writeln!(md, "## {metric} ({split})\n");
        md.push_str(&markdown_table(&cells, split, metric));
        md.push('\n');
        let path = out.join(format!("plot_{split}_{metric}.svg"));
        write_file(&path, svg_plot(&cells, split, metric).as_bytes())?;
        plots.push(path);
    }
    let table = out.join("table.md");
    write_file(&table, md.as_bytes())?;
    let summary = out.join("summary.csv");
    write_file(&summary, summary_csv(&cells).as_bytes())?;
    Ok(ReportFiles { table, summary, plots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(run: &str, n: u32, v: f64) -> MetricRecord {
        MetricRecord {
            run_id: run.into(),
            config_hash: "h".into(),
            n_percent: n,
            epoch: 1,
            split: "test".into(),
            metric: "miou".into(),
            value: v,
        }
    }

    #[test]
    fn single_record_is_one_by_one() {
        let cells = aggregate(&[rec("lsm/n100/s1", 100, 0.5)]).unwrap();
        let t = markdown_table(&cells, "test", "miou");
        assert_eq!(t, "| model | 100% |\n|---|---|\n| lsm | 0.5000 |\n");
    }

    #[test]
    fn columns_descend_and_missing_blank() {
        let recs = [
            rec("a/n1/s1", 1, 0.1),
            rec("a/n100/s1", 100, 0.9),
            rec("b/n60/s1", 60, 0.6),
            rec("a/n60/s1", 60, 0.7),
        ];
        let cells = aggregate(&recs).unwrap();
        let t = markdown_table(&cells, "test", "miou");
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "| model | 100% | 60% | 1% |");
        assert_eq!(lines[3], "| b |  | 0.6000 |  |");
    }

    #[test]
    fn latest_epoch_wins() {
        let mut a = rec("a/n1/s1", 1, 0.1);
        let mut b = rec("a/n1/s1", 1, 0.3);
        a.epoch = 5;
        b.epoch = 2;
        let cells = aggregate(&[a, b]).unwrap();
        assert_eq!(cells[0].values, vec![0.1]);
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(m, 3.0);
        assert!((s.unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[2.0]).1, None);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(aggregate(&[]).is_err());
    }
}
