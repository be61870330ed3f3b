use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qomega::config::SynthConfig;
use qomega::report::{fmt_full, fmt_short, read_manifest, write_omega_csv, write_sweep_csv, MetricRow};
use qomega::{
    batch_evaluate, evaluate_pair, load_image, par_compute_omega, par_compute_q, save_image, thread_pool, MetricConfig,
    MetricReport, MetricSet,
};
use qomega_core::sharpness::{self, DEFAULT_DELTA, DEFAULT_PATCH_SIZE, DEFAULT_SEED, DEFAULT_TRIALS};
use qomega_core::{
    calibrate_threshold, degrade, gamma_sweep, paired_t_test, unsharp_mask, BaseLoss, LossParams, OmegaParams, QParams,
    SweepConfig,
};

/// Sharpness (Q) and ringing-aware (Omega) image quality measurements.
#[derive(Debug, Parser)]
#[command(name = "qomega", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// All metrics for one reference/restored pair
    Measure {
        /// Reference image (PNG, PGM or PPM)
        reference: PathBuf,
        /// Restored image, same dimensions as the reference
        restored: PathBuf,
        #[command(flatten)]
        metrics: MetricArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// No-reference sharpness Q of one image
    Q {
        /// Input image (PNG, PGM or PPM)
        image: PathBuf,
        #[command(flatten)]
        q: QArgs,
        /// Write the per-patch breakdown as CSV to this path
        #[arg(long)]
        patches: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Omega of a pair, with a per-patch CSV breakdown (patch PSNR capped at 50 dB)
    Omega {
        /// Reference image (PNG, PGM or PPM)
        reference: PathBuf,
        /// Restored image, same dimensions as the reference
        restored: PathBuf,
        #[command(flatten)]
        omega: OmegaArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sharpen with each gamma and tabulate Q, PSNR and Omega
    Sweep {
        /// Input image (PNG, PGM or PPM)
        image: PathBuf,
        /// Comma-separated, ascending sharpening amounts
        #[arg(long, value_delimiter = ',', default_value = "0.8,1.3,2.5,11.8,13.8")]
        gammas: Vec<f64>,
        /// Gaussian std of the unsharp-mask blur
        #[arg(long, default_value_t = 1.0)]
        radius_sigma: f64,
        #[command(flatten)]
        q: QArgs,
        #[command(flatten)]
        omega: OmegaArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Gaussian blur followed by additive Gaussian noise
    Degrade {
        /// Input image (PNG, PGM or PPM)
        image: PathBuf,
        /// Output image (.png or .pgm)
        #[arg(long)]
        out: PathBuf,
        /// TOML file with kernel_size, sigma_blur, sigma_noise, seed; flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        /// Odd blur kernel size K [default: 9]
        #[arg(long)]
        kernel_size: Option<usize>,
        /// Gaussian blur std [default: 2.0]
        #[arg(long)]
        sigma_blur: Option<f64>,
        /// Noise std in [0, 1] units [default: 0]
        #[arg(long)]
        sigma_noise: Option<f64>,
        /// Noise seed [default: 0]
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Unsharp-mask sharpening
    Sharpen {
        /// Input image (PNG, PGM or PPM)
        image: PathBuf,
        /// Output image (.png or .pgm)
        #[arg(long)]
        out: PathBuf,
        /// TOML file with gamma, radius_sigma; flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sharpening amount gamma [default: 0.8]
        #[arg(long)]
        gamma: Option<f64>,
        /// Gaussian std of the unsharp-mask blur [default: 1.0]
        #[arg(long)]
        radius_sigma: Option<f64>,
    },
    /// Metrics for every pair in a manifest (`ref<TAB>restored` per line)
    Batch {
        /// Manifest file: one `reference<TAB>restored` pair per line, `#` comments allowed
        manifest: PathBuf,
        /// Also write per-metric mean/std/count as CSV to this path
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        metrics: MetricArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Two-sided paired t-test between two CSV columns
    Ttest {
        /// CSV holding the first column
        x_file: PathBuf,
        /// CSV holding the second column [default: same file as x]
        y_file: Option<PathBuf>,
        /// Column name in the first file
        #[arg(long)]
        x: String,
        /// Column name in the second file [default: same as --x]
        #[arg(long)]
        y: Option<String>,
        /// Write the result to this path instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Write machine-readable output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct QArgs {
    /// Patch size k for Q
    #[arg(long = "patch-size", default_value_t = DEFAULT_PATCH_SIZE)]
    patch_size: usize,
    /// Coherence threshold; overrides calibration [default: frozen value for k=8, delta=0.001]
    #[arg(long)]
    tau: Option<f64>,
    /// Recalibrate the threshold for this false-alarm rate (default 0.001 when recalibrating)
    #[arg(long)]
    delta: Option<f64>,
    /// Monte-Carlo trials for recalibration
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Seed for recalibration
    #[arg(long = "calibration-seed", default_value_t = DEFAULT_SEED)]
    calibration_seed: u64,
}

impl QArgs {
    fn params(&self) -> Result<QParams> {
        let tau = match (self.tau, self.delta) {
            (Some(tau), _) => tau,
            (None, None) if self.patch_size == DEFAULT_PATCH_SIZE => sharpness::DEFAULT_TAU,
            (None, delta) => calibrate_threshold(
                self.patch_size,
                delta.unwrap_or(DEFAULT_DELTA),
                self.trials,
                self.calibration_seed,
            )?,
        };
        Ok(QParams {
            patch_size: self.patch_size,
            tau,
        })
    }
}

#[derive(Debug, Args)]
struct OmegaArgs {
    /// Sigmoid steepness R
    #[arg(long, default_value_t = 5.0)]
    steepness: f64,
    /// Sigmoid midpoint alpha0
    #[arg(long, default_value_t = 1.2)]
    alpha0: f64,
    /// Omega patch size m
    #[arg(long = "omega-patch", default_value_t = 16)]
    omega_patch: usize,
    /// Deviation ratio used when the reference patch is flat and the restored one is not
    #[arg(long, default_value_t = 10.0)]
    alpha_cap: f64,
}

impl OmegaArgs {
    fn params(&self) -> OmegaParams {
        OmegaParams {
            steepness: self.steepness,
            alpha0: self.alpha0,
            patch_size: self.omega_patch,
            alpha_cap: self.alpha_cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    L1,
    L1Freq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricName {
    Psnr,
    Ssim,
    Q,
    Omega,
    L1,
    Freq,
    Composite,
}

#[derive(Debug, Args)]
struct MetricArgs {
    #[command(flatten)]
    q: QArgs,
    #[command(flatten)]
    omega: OmegaArgs,
    /// Sharpness weight beta of the composite loss
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    /// Weight of the frequency loss in the l1-freq base loss
    #[arg(long, default_value_t = 1.0)]
    lambda_freq: f64,
    /// Base fidelity loss of the composite loss
    #[arg(long, value_enum, default_value_t = BaseArg::L1)]
    base: BaseArg,
    /// Comma-separated metrics to compute
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "psnr,ssim,q,omega,l1,freq,composite"
    )]
    metrics: Vec<MetricName>,
}

impl MetricArgs {
    fn config(&self) -> Result<MetricConfig> {
        let on = |m| self.metrics.contains(&m);
        Ok(MetricConfig {
            q: self.q.params()?,
            omega: self.omega.params(),
            loss: LossParams {
                beta: self.beta,
                lambda_freq: self.lambda_freq,
                q: QParams::default(),
            },
            base: match self.base {
                BaseArg::L1 => BaseLoss::L1,
                BaseArg::L1Freq => BaseLoss::L1Freq,
            },
            metrics: MetricSet {
                psnr: on(MetricName::Psnr),
                ssim: on(MetricName::Ssim),
                q: on(MetricName::Q),
                omega: on(MetricName::Omega),
                l1: on(MetricName::L1),
                freq: on(MetricName::Freq),
                composite: on(MetricName::Composite),
            },
        })
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("{}: cannot create", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Measure {
            reference,
            restored,
            metrics,
            common,
        } => {
            let config = metrics.config()?;
            let pool = thread_pool(common.threads);
            let a = load_image(&reference)?;
            let b = load_image(&restored)?;
            let values = evaluate_pair(&a, &b, &config, &pool)?;
            let row = MetricRow {
                id: restored.display().to_string(),
                result: Ok(values.values.iter().map(|&(_, v)| v).collect()),
            };
            let report = MetricReport::from_rows(&config, vec![row]);
            let mut out = output(common.out.as_deref())?;
            report.write_csv("measure", &mut out)?;
            out.flush()?;
            for (name, v) in &values.values {
                eprintln!("{name:<10} {}", fmt_short(*v));
            }
        }
        Command::Q {
            image,
            q,
            patches,
            common,
        } => {
            let params = q.params()?;
            let img = load_image(&image)?;
            let pool = thread_pool(common.threads);
            let r = par_compute_q(&pool, &img, params.patch_size, params.tau)?;
            let mut out = output(common.out.as_deref())?;
            writeln!(out, "# qomega q k={} tau={}", params.patch_size, fmt_full(params.tau))?;
            writeln!(out, "q,selected_count,total_count")?;
            writeln!(out, "{},{},{}", fmt_full(r.q), r.selected_count, r.total_count)?;
            out.flush()?;
            if let Some(path) = patches {
                let mut f = output(Some(&path))?;
                writeln!(f, "# qomega q k={} tau={}", params.patch_size, fmt_full(params.tau))?;
                writeln!(f, "patch_row,patch_col,s1,s2,coherence,q_patch,selected")?;
                for p in &r.per_patch {
                    let s = &p.spectrum;
                    writeln!(
                        f,
                        "{},{},{},{},{},{},{}",
                        p.row,
                        p.col,
                        fmt_full(s.s1),
                        fmt_full(s.s2),
                        fmt_full(s.coherence),
                        fmt_full(s.q_patch),
                        u8::from(p.selected)
                    )?;
                }
                f.flush()?;
            }
            eprintln!(
                "q = {}, selected {}/{}",
                fmt_short(r.q),
                r.selected_count,
                r.total_count
            );
        }
        Command::Omega {
            reference,
            restored,
            omega,
            common,
        } => {
            let params = omega.params();
            let a = load_image(&reference)?;
            let b = load_image(&restored)?;
            let pool = thread_pool(common.threads);
            let r = par_compute_omega(&pool, &a, &b, &params)?;
            let mut out = output(common.out.as_deref())?;
            write_omega_csv(&r, &mut out)?;
            out.flush()?;
            eprintln!("omega = {} over {} patches", fmt_short(r.omega), r.per_patch.len());
        }
        Command::Sweep {
            image,
            gammas,
            radius_sigma,
            q,
            omega,
            common,
        } => {
            let config = SweepConfig {
                radius_sigma,
                q: q.params()?,
                omega: omega.params(),
            };
            let img = load_image(&image)?;
            let rows = gamma_sweep(&img, &gammas, &config)?;
            let mut out = output(common.out.as_deref())?;
            write_sweep_csv(&rows, &config, &mut out)?;
            out.flush()?;
            for r in &rows {
                eprintln!(
                    "gamma {:>8}  q {:>10}  psnr {:>10}  omega {:>10}",
                    fmt_short(r.gamma),
                    fmt_short(r.q),
                    fmt_short(r.psnr),
                    fmt_short(r.omega)
                );
            }
        }
        Command::Degrade {
            image,
            out,
            config,
            kernel_size,
            sigma_blur,
            sigma_noise,
            seed,
        } => {
            let file = config
                .as_deref()
                .map(SynthConfig::load)
                .transpose()?
                .unwrap_or_default();
            let spec = file
                .merged(SynthConfig {
                    kernel_size,
                    sigma_blur,
                    sigma_noise,
                    seed,
                    ..SynthConfig::default()
                })
                .degrade_spec();
            let img = load_image(&image)?;
            save_image(&degrade(&img, &spec)?, &out)?;
            eprintln!(
                "degraded with kernel_size={} sigma_blur={} sigma_noise={} seed={}",
                spec.kernel_size, spec.sigma_blur, spec.sigma_noise, spec.seed
            );
        }
        Command::Sharpen {
            image,
            out,
            config,
            gamma,
            radius_sigma,
        } => {
            let file = config
                .as_deref()
                .map(SynthConfig::load)
                .transpose()?
                .unwrap_or_default();
            let spec = file
                .merged(SynthConfig {
                    gamma,
                    radius_sigma,
                    ..SynthConfig::default()
                })
                .sharpen_spec();
            let img = load_image(&image)?;
            save_image(&unsharp_mask(&img, &spec)?, &out)?;
            eprintln!("sharpened with gamma={} radius_sigma={}", spec.gamma, spec.radius_sigma);
        }
        Command::Batch {
            manifest,
            summary,
            metrics,
            common,
        } => {
            let config = metrics.config()?;
            let pairs = read_manifest(&manifest)?;
            let report = batch_evaluate(&pairs, &config, common.threads)?;
            let mut out = output(common.out.as_deref())?;
            report.write_csv("batch", &mut out)?;
            out.flush()?;
            if let Some(path) = summary {
                let mut f = output(Some(&path))?;
                report.write_summary_csv("batch", &mut f)?;
                f.flush()?;
            }
            eprint!("{}", report.human_summary());
        }
        Command::Ttest {
            x_file,
            y_file,
            x,
            y,
            out,
        } => {
            let y_file = y_file.unwrap_or_else(|| x_file.clone());
            let y = y.unwrap_or_else(|| x.clone());
            let xs = read_column(&x_file, &x)?;
            let ys = read_column(&y_file, &y)?;
            let r = paired_t_test(&xs, &ys)?;
            let mut w = output(out.as_deref())?;
            writeln!(
                w,
                "# qomega ttest x={}:{} y={}:{} two-sided",
                x_file.display(),
                x,
                y_file.display(),
                y
            )?;
            writeln!(w, "t_statistic,degrees_of_freedom,p_value,significant_at_5pct")?;
            writeln!(
                w,
                "{},{},{},{}",
                fmt_full(r.t_statistic),
                r.degrees_of_freedom,
                fmt_full(r.p_value),
                r.significant_at_5pct
            )?;
            w.flush()?;
            eprintln!(
                "t = {}, df = {}, p = {}{}",
                fmt_short(r.t_statistic),
                r.degrees_of_freedom,
                fmt_short(r.p_value),
                if r.significant_at_5pct {
                    " (significant at 5%)"
                } else {
                    ""
                }
            );
        }
    }
    Ok(())
}

/// Reads a numeric column, skipping `#` comment lines and rows where the
/// column is empty (failed batch rows).
fn read_column(path: &Path, name: &str) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("{}: cannot read CSV", path.display()))?;
    let headers = reader.headers()?.clone();
    let idx = headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| anyhow!("{}: no column `{name}`", path.display()))?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let field = record.get(idx).unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        let v: f64 = field
            .parse()
            .map_err(|_| anyhow!("{}: row {}: `{field}` is not a number", path.display(), i + 1))?;
        values.push(v);
    }
    if values.is_empty() {
        bail!("{}: column `{name}` has no values", path.display());
    }
    Ok(values)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // exits 0 for --help/--version and 2 for usage errors
            e.exit();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // module errors already embed their cause in the message
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg = format!("{msg}: {c}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
