//! Per-pair metric evaluation, corpus batches and the CSV tables they emit.
//!
//! Every CSV starts with a `#` line echoing the full configuration. Reals are
//! written with 17 significant digits; infinite PSNR is written as `inf`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use qomega_core::{
    composite_loss, freq_loss, l1_loss, psnr, ssim, BaseLoss, LossParams, OmegaParams, OmegaResult, QParams, Summary,
    SweepConfig, SweepRow,
};
use rayon::prelude::*;

use crate::io::{load_image, IoError};
use crate::parallel::{par_compute_omega, par_compute_q, thread_pool};

/// Full-precision CSV formatting of a real.
pub fn fmt_full(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Six-significant-digit formatting for human-readable summaries.
pub fn fmt_short(x: f64) -> String {
    if !x.is_finite() {
        return fmt_full(x);
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Which metrics a report computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSet {
    pub psnr: bool,
    pub ssim: bool,
    pub q: bool,
    pub omega: bool,
    pub l1: bool,
    pub freq: bool,
    pub composite: bool,
}

impl Default for MetricSet {
    fn default() -> Self {
        MetricSet {
            psnr: true,
            ssim: true,
            q: true,
            omega: true,
            l1: true,
            freq: true,
            composite: true,
        }
    }
}

impl MetricSet {
    /// PSNR, SSIM, Q and Ω only.
    pub fn core() -> Self {
        MetricSet {
            psnr: true,
            ssim: true,
            q: true,
            omega: true,
            l1: false,
            freq: false,
            composite: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    pub q: QParams,
    pub omega: OmegaParams,
    pub loss: LossParams,
    pub base: BaseLoss,
    pub metrics: MetricSet,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            q: QParams::default(),
            omega: OmegaParams::default(),
            loss: LossParams::default(),
            base: BaseLoss::L1,
            metrics: MetricSet::default(),
        }
    }
}

fn base_name(b: BaseLoss) -> &'static str {
    match b {
        BaseLoss::L1 => "l1",
        BaseLoss::L1Freq => "l1+freq",
    }
}

pub fn describe_q(q: &QParams) -> String {
    format!("k={} tau={}", q.patch_size, fmt_full(q.tau))
}

pub fn describe_omega(o: &OmegaParams) -> String {
    format!(
        "R={} alpha0={} m={} psnr_cap={} alpha_cap={}",
        o.steepness,
        o.alpha0,
        o.patch_size,
        qomega_core::omega::PSNR_CAP,
        o.alpha_cap
    )
}

impl MetricConfig {
    pub fn describe(&self) -> String {
        let m = &self.metrics;
        let mut enabled = Vec::new();
        for (on, name) in [
            (m.psnr, "psnr"),
            (m.ssim, "ssim"),
            (m.q, "q"),
            (m.omega, "omega"),
            (m.l1, "l1"),
            (m.freq, "freq_loss"),
            (m.composite, "composite"),
        ] {
            if on {
                enabled.push(name);
            }
        }
        format!(
            "{} {} beta={} lambda_freq={} base={} metrics={}",
            describe_q(&self.q),
            describe_omega(&self.omega),
            self.loss.beta,
            self.loss.lambda_freq,
            base_name(self.base),
            enabled.join(",")
        )
    }

    /// Column names of the per-pair table, in order.
    pub fn columns(&self) -> Vec<&'static str> {
        let m = &self.metrics;
        let mut cols = Vec::new();
        if m.psnr {
            cols.push("psnr");
        }
        if m.ssim {
            cols.push("ssim");
        }
        if m.q {
            cols.extend(["q_ref", "q_rest"]);
        }
        if m.omega {
            cols.push("omega");
        }
        if m.l1 {
            cols.push("l1");
        }
        if m.freq {
            cols.push("freq_loss");
        }
        if m.composite {
            cols.push("composite");
        }
        cols
    }
}

/// Metric values for one pair, keyed like [`MetricConfig::columns`].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValues {
    pub values: Vec<(&'static str, f64)>,
    pub omega: Option<OmegaResult>,
}

impl MetricValues {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

/// Evaluates every enabled metric on one aligned pair.
pub fn evaluate_pair(
    reference: &qomega_core::LumaImage,
    restored: &qomega_core::LumaImage,
    config: &MetricConfig,
    pool: &rayon::ThreadPool,
) -> qomega_core::Result<MetricValues> {
    if reference.dims() != restored.dims() {
        return Err(qomega_core::Error::mismatch(reference.dims(), restored.dims()));
    }
    let m = &config.metrics;
    let mut values = Vec::new();
    let mut omega = None;
    if m.psnr {
        values.push(("psnr", psnr(reference, restored)?));
    }
    if m.ssim {
        values.push(("ssim", ssim(reference, restored)?));
    }
    if m.q {
        values.push((
            "q_ref",
            par_compute_q(pool, reference, config.q.patch_size, config.q.tau)?.q,
        ));
        values.push((
            "q_rest",
            par_compute_q(pool, restored, config.q.patch_size, config.q.tau)?.q,
        ));
    }
    if m.omega {
        let r = par_compute_omega(pool, reference, restored, &config.omega)?;
        values.push(("omega", r.omega));
        omega = Some(r);
    }
    if m.l1 {
        values.push(("l1", l1_loss(reference, restored)?));
    }
    if m.freq {
        values.push(("freq_loss", freq_loss(reference, restored)?));
    }
    if m.composite {
        let loss = LossParams {
            q: config.q,
            ..config.loss
        };
        values.push(("composite", composite_loss(reference, restored, config.base, &loss)?));
    }
    Ok(MetricValues { values, omega })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub id: String,
    pub result: Result<Vec<f64>, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub columns: Vec<&'static str>,
    pub rows: Vec<MetricRow>,
    /// One summary per column over the successful rows.
    pub summary: Vec<(&'static str, Summary)>,
    pub provenance: String,
}

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error("batch is empty")]
    Empty,
    #[error("all {count} pairs failed; first error: {first}")]
    AllFailed { count: usize, first: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub reference: PathBuf,
    pub restored: PathBuf,
}

impl Pair {
    pub fn id(&self) -> String {
        self.restored.display().to_string()
    }
}

fn evaluate_paths(pair: &Pair, config: &MetricConfig, pool: &rayon::ThreadPool) -> Result<Vec<f64>, String> {
    let reference = load_image(&pair.reference).map_err(|e| e.to_string())?;
    let restored = load_image(&pair.restored).map_err(|e| e.to_string())?;
    let v = evaluate_pair(&reference, &restored, config, pool).map_err(|e| format!("{}: {e}", pair.id()))?;
    Ok(v.values.into_iter().map(|(_, x)| x).collect())
}

/// Evaluates all pairs, `threads` at a time. Rows keep input order; failed
/// pairs keep their error text instead of aborting the batch.
pub fn batch_evaluate(
    pairs: &[Pair],
    config: &MetricConfig,
    threads: Option<usize>,
) -> Result<MetricReport, BatchError> {
    if pairs.is_empty() {
        return Err(BatchError::Empty);
    }
    let pool = thread_pool(threads);
    // pairs run in parallel; per-patch work inside a pair stays on the same worker
    let inner = thread_pool(Some(1));
    let results: Vec<Result<Vec<f64>, String>> =
        pool.install(|| pairs.par_iter().map(|p| evaluate_paths(p, config, &inner)).collect());
    if let Some(first) = results
        .iter()
        .all(Result::is_err)
        .then(|| results[0].clone().unwrap_err())
    {
        return Err(BatchError::AllFailed {
            count: pairs.len(),
            first,
        });
    }
    let rows = pairs
        .iter()
        .zip(results)
        .map(|(p, result)| MetricRow { id: p.id(), result })
        .collect();
    Ok(MetricReport::from_rows(config, rows))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl MetricReport {
    pub fn from_rows(config: &MetricConfig, rows: Vec<MetricRow>) -> Self {
        let columns = config.columns();
        let summary = columns
            .iter()
            .enumerate()
            .map(|(j, &name)| {
                let col: Vec<f64> = rows
                    .iter()
                    .filter_map(|r| r.result.as_ref().ok().map(|v| v[j]))
                    .collect();
                (name, Summary::of(&col))
            })
            .collect();
        MetricReport {
            columns,
            rows,
            summary,
            provenance: config.describe(),
        }
    }

    pub fn write_csv(&self, command: &str, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "# qomega {command} {}", self.provenance)?;
        writeln!(out, "id,{},error", self.columns.join(","))?;
        for row in &self.rows {
            let mut line = csv_field(&row.id);
            match &row.result {
                Ok(values) => {
                    for v in values {
                        line.push(',');
                        line.push_str(&fmt_full(*v));
                    }
                    line.push(',');
                }
                Err(e) => {
                    for _ in &self.columns {
                        line.push(',');
                    }
                    line.push(',');
                    line.push_str(&csv_field(e));
                }
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn write_summary_csv(&self, command: &str, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "# qomega {command} {}", self.provenance)?;
        writeln!(out, "metric,count,mean,std")?;
        for (name, s) in &self.summary {
            writeln!(out, "{name},{},{},{}", s.count, fmt_full(s.mean), fmt_full(s.std))?;
        }
        Ok(())
    }

    pub fn human_summary(&self) -> String {
        let failed = self.rows.iter().filter(|r| r.result.is_err()).count();
        let mut s = format!("{} pairs, {} failed\n", self.rows.len(), failed);
        for (name, sum) in &self.summary {
            let _ = writeln!(
                s,
                "  {name:<10} mean {} std {}",
                fmt_short(sum.mean),
                fmt_short(sum.std)
            );
        }
        for row in self.rows.iter().filter(|r| r.result.is_err()) {
            let _ = writeln!(s, "  failed: {}", row.result.as_ref().unwrap_err());
        }
        s
    }
}

/// Per-patch Ω breakdown.
pub fn write_omega_csv(result: &OmegaResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "# qomega omega omega={} {}",
        fmt_full(result.omega),
        describe_omega(&result.params)
    )?;
    writeln!(out, "patch_row,patch_col,q_ref,q_rest,alpha,sigma,p_prime,omega")?;
    for p in &result.per_patch {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p.row,
            p.col,
            fmt_full(p.q_ref),
            fmt_full(p.q_rest),
            fmt_full(p.alpha),
            fmt_full(p.sigma),
            fmt_full(p.p_prime),
            fmt_full(p.omega)
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv(rows: &[SweepRow], config: &SweepConfig, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "# qomega sweep radius_sigma={} {} {}",
        config.radius_sigma,
        describe_q(&config.q),
        describe_omega(&config.omega)
    )?;
    writeln!(out, "gamma,q,psnr,omega,mean_alpha")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_full(r.gamma),
            fmt_full(r.q),
            fmt_full(r.psnr),
            fmt_full(r.omega),
            fmt_full(r.mean_alpha)
        )?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}:{line}: expected `ref_path<TAB>restored_path`")]
    Syntax { path: PathBuf, line: usize },
}

/// Parses a manifest: one `ref<TAB>restored` per line, `#` comments and
/// blank lines ignored. Relative paths resolve against the manifest's folder.
pub fn read_manifest(path: &Path) -> Result<Vec<Pair>, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_manifest(&text, base).map_err(|line| ManifestError::Syntax {
        path: path.to_path_buf(),
        line,
    })
}

/// Returns the 1-based offending line on error.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<Pair>, usize> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(r), Some(d), None) if !r.is_empty() && !d.is_empty() => pairs.push(Pair {
                reference: base.join(r),
                restored: base.join(d),
            }),
            _ => return Err(i + 1),
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_round_trips() {
        for x in [0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, -2.5] {
            assert_eq!(fmt_full(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_full(f64::INFINITY), "inf");
    }

    #[test]
    fn short_format_has_six_significant_digits() {
        assert_eq!(fmt_short(20.0), "20.0000");
        assert_eq!(fmt_short(0.123456789), "0.123457");
        assert_eq!(fmt_short(1234567.0), "1.23457e6");
        assert_eq!(fmt_short(0.0), "0");
    }

    #[test]
    fn manifest_parsing() {
        let text = "# header\nref/a.png\tout/a.png\n\n  # indented comment\nb.png\tc.png\r\n";
        let pairs = parse_manifest(text, Path::new("/data")).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].reference, Path::new("/data/ref/a.png"));
        assert_eq!(pairs[1].restored, Path::new("/data/c.png"));
        assert_eq!(parse_manifest("a.png b.png\n", Path::new("")), Err(1));
        assert_eq!(parse_manifest("#x\na\tb\tc\n", Path::new("")), Err(2));
    }

    #[test]
    fn columns_follow_enabled_metrics() {
        let c = MetricConfig {
            metrics: MetricSet::core(),
            ..MetricConfig::default()
        };
        assert_eq!(c.columns(), ["psnr", "ssim", "q_ref", "q_rest", "omega"]);
    }
}
