//! `eur`: entropic uncertainty bounds, information diagrams, entropy regions
//! and separability witnesses from the command line.
//!
//! Tables go to standard output; CSV and JSON only ever go to `--out`.
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eur_core::bounds::{applicable_bounds_for, BoundResult};
use eur_core::diagrams::{
    entropy_region_constrained, entropy_region_mub, entropy_sum, gap_report, info_diagram, soundness_violations,
    write_diagram_csv, write_region_csv, Axis, DiagramConfig, Strategy, DEFAULT_BINS,
};
use eur_core::entanglement::werner_threshold;
use eur_core::probdist::EntropyOrder;
use eur_core::quantum::{
    gsic, gsic_a_of_t, gsic_t_for_a, mub_set, mum_kappa_of_t, mum_set, mum_t_for_kappa, sic_set, sic_set_from_file,
    DensityMatrix, MeasurementKind, MeasurementSet,
};
use eur_core::verify::{run_suite, suite_passed, SuiteSize};
use eur_core::Error;

#[derive(Parser)]
#[command(name = "eur", version, about = "Entropic uncertainty relations for MUBs, MUMs and SIC-POVMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every applicable bound on the summed entropy.
    Bounds(BoundsArgs),
    /// Sample an information diagram and write it to a file.
    Diagram(DiagramArgs),
    /// Sample an entropy region of three distributions.
    Region(RegionArgs),
    /// Scan the Werner family for violations of the separability criterion.
    Witness(WitnessArgs),
    /// Run the invariant and oracle suite.
    Verify(VerifyArgs),
    /// Compare bounds with sampled extremes per purity stratum.
    Gaps(GapsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Mub,
    Mum,
    Gsic,
    Sic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SetArgs {
    /// Hilbert-space dimension.
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value = "mub")]
    kind: Kind,
    /// Number of measurements (MUB/MUM); defaults to the complete set d+1.
    #[arg(long = "M")]
    m: Option<usize>,
    /// MUM efficiency parameter.
    #[arg(long)]
    kappa: Option<f64>,
    /// General SIC-POVM parameter.
    #[arg(long)]
    a: Option<f64>,
    /// Construction parameter t, an alternative to --kappa / --a.
    #[arg(long)]
    t: Option<f64>,
    /// SIC fiducials file (`re im` per line) for dimensions without a built-in SIC.
    #[arg(long)]
    fiducials: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Purity Tr(ρ²).
    #[arg(long, conflicts_with = "state")]
    purity: Option<f64>,
    /// Density matrix as JSON: row-major list of d² [re, im] pairs.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Rényi order; `inf` for min-entropy.
    #[arg(long, default_value = "1", value_parser = parse_order)]
    alpha: EntropyOrder,
}

#[derive(Args)]
struct DiagramArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long, default_value = "1", value_parser = parse_order)]
    alpha: EntropyOrder,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, env = "EUR_SEED", default_value_t = 0)]
    seed: u64,
    /// hs, stratified, conjecture, rank_sweep or mixed.
    #[arg(long, default_value = "mixed", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Horizontal axis: purity or ic.
    #[arg(long, default_value = "purity", value_parser = parse_axis)]
    axis: Axis,
    #[arg(long, default_value_t = DEFAULT_BINS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    bins: u64,
    /// Slack allowed before a point counts as violating a proven bound.
    #[arg(long, default_value_t = 1e-9, value_parser = parse_tolerance)]
    tolerance: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, env = "EUR_SEED", default_value_t = 0)]
    seed: u64,
    /// Sample distributions under the summed-IC window instead of states.
    #[arg(long)]
    constrained: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value = "inf", value_parser = parse_order)]
    alpha: EntropyOrder,
    #[arg(long, default_value_t = 1e-4, value_parser = parse_tolerance)]
    resolution: f64,
    /// JSON report destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced sizes for a fast run.
    #[arg(long)]
    quick: bool,
    #[arg(long, env = "EUR_SEED", default_value_t = 0)]
    seed: u64,
    /// JSON report destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GapsArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long, default_value = "1", value_parser = parse_order)]
    alpha: EntropyOrder,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    strata: u64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    per_stratum: u64,
    #[arg(long, env = "EUR_SEED", default_value_t = 0)]
    seed: u64,
    /// JSON report destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_order(s: &str) -> Result<EntropyOrder, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl SetArgs {
    fn count(&self, full: usize) -> Result<usize, Failure> {
        match (self.kind, self.m) {
            (Kind::Mub | Kind::Mum, Some(m)) if m == 0 || m > self.d + 1 => Err(usage(format!(
                "--M must lie in [1, d+1] = [1, {}], got {m}",
                self.d + 1
            ))),
            (Kind::Mub | Kind::Mum, Some(m)) => Ok(m),
            (Kind::Gsic | Kind::Sic, Some(_)) => Err(usage("--M applies only to mub and mum")),
            (_, None) => Ok(full),
        }
    }

    fn mum_t(&self) -> Result<f64, Failure> {
        match (self.kappa, self.t) {
            (Some(k), None) => Ok(mum_t_for_kappa(self.d, k)?),
            (None, Some(t)) => Ok(t),
            (Some(_), Some(_)) => Err(usage("give either --kappa or --t, not both")),
            (None, None) => Err(usage("mum needs --kappa or --t")),
        }
    }

    fn gsic_t(&self) -> Result<f64, Failure> {
        match (self.a, self.t) {
            (Some(a), None) => Ok(gsic_t_for_a(self.d, a)?),
            (None, Some(t)) => Ok(t),
            (Some(_), Some(_)) => Err(usage("give either --a or --t, not both")),
            (None, None) => Err(usage("gsic needs --a or --t")),
        }
    }

    /// Family tag and number of measurements, without building operators.
    fn kind(&self) -> Result<(MeasurementKind, usize), Failure> {
        let full = self.d + 1;
        Ok(match self.kind {
            Kind::Mub => (MeasurementKind::Mub, self.count(full)?),
            Kind::Mum => {
                let kappa = match (self.kappa, self.t) {
                    (Some(k), None) => k,
                    _ => mum_kappa_of_t(self.d, self.mum_t()?),
                };
                (MeasurementKind::Mum { kappa }, self.count(full)?)
            }
            Kind::Gsic => {
                let a = match (self.a, self.t) {
                    (Some(a), None) => a,
                    _ => gsic_a_of_t(self.d, self.gsic_t()?),
                };
                (MeasurementKind::Gsic { a }, self.count(1)?)
            }
            Kind::Sic => (MeasurementKind::Sic, self.count(1)?),
        })
    }

    fn build(&self) -> Result<MeasurementSet, Failure> {
        let set = match self.kind {
            Kind::Mub => mub_set(self.d)?,
            Kind::Mum => mum_set(self.d, self.mum_t()?)?,
            Kind::Gsic => gsic(self.d, self.gsic_t()?)?,
            Kind::Sic => match &self.fiducials {
                Some(path) => sic_set_from_file(self.d, path)?,
                None => sic_set(self.d)?,
            },
        };
        match self.m {
            Some(m) if m < set.len() => Ok(set.subset(&(0..m).collect::<Vec<_>>())?),
            _ => Ok(set),
        }
    }
}

fn check_dim(d: usize) -> Result<(), Failure> {
    if d < 2 {
        return Err(usage(format!("--d must be at least 2, got {d}")));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Outcome {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Truncated decimals such as `0.3333` for 1/3 land just outside [1/d, 1];
/// values within `PURITY_SNAP` of an end are moved onto it.
const PURITY_SNAP: f64 = 1e-4;

fn snap_purity(d: usize, purity: f64) -> f64 {
    let lo = 1.0 / d as f64;
    let snapped = if purity < lo && lo - purity <= PURITY_SNAP {
        lo
    } else if purity > 1.0 && purity - 1.0 <= PURITY_SNAP {
        1.0
    } else {
        return purity;
    };
    println!("note: purity {purity} taken as {snapped}");
    snapped
}

fn lower(s: impl std::fmt::Debug) -> String {
    format!("{s:?}").to_lowercase()
}

fn print_bound(b: &BoundResult) {
    let tight = match b.tight {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    };
    let params: Vec<String> = b.params.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
    let flag = if b.out_of_domain { " (clamped)" } else { "" };
    println!(
        "{:<14} {:<6} {:<11} {:>14.9} {:<6} {}{flag}",
        b.formula.to_string(),
        lower(b.side),
        lower(b.status),
        b.value,
        tight,
        params.join(" ")
    );
}

fn cmd_bounds(args: &BoundsArgs) -> Outcome {
    check_dim(args.set.d)?;
    let (kind, m) = args.set.kind()?;
    let state = match &args.state {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let rho = DensityMatrix::from_json(&text)?;
            if rho.dim() != args.set.d {
                return Err(usage(format!("state has dimension {}, but --d is {}", rho.dim(), args.set.d)));
            }
            Some(rho)
        }
        None => None,
    };
    let purity = match (&state, args.purity) {
        (Some(rho), _) => rho.purity(),
        (None, Some(p)) => p,
        (None, None) => return Err(usage("give --purity or --state")),
    };
    let purity = snap_purity(args.set.d, purity);
    let bounds = applicable_bounds_for(kind, args.set.d, m, purity, args.alpha)?;
    println!("d={} kind={kind} M={m} purity={purity} alpha={}", args.set.d, args.alpha);
    println!("{:<14} {:<6} {:<11} {:>14} {:<6} params", "formula", "side", "status", "value", "tight");
    for b in &bounds {
        print_bound(b);
    }
    if bounds.is_empty() {
        println!("(no bound applies at this order)");
    }
    if let Some(rho) = &state {
        match args.set.build() {
            Ok(set) => println!("measured entropy sum: {:.9}", entropy_sum(&set, rho, args.alpha)?.0),
            Err(Failure::Usage(e)) => println!("measured entropy sum unavailable: {e}"),
            Err(Failure::Verification) => unreachable!(),
        }
    }
    Ok(())
}

fn cmd_diagram(args: &DiagramArgs) -> Outcome {
    check_dim(args.set.d)?;
    let set = args.set.build()?;
    let cfg = DiagramConfig {
        order: args.alpha,
        samples: args.samples as usize,
        strategy: args.strategy,
        seed: args.seed,
        axis: args.axis,
        bins: args.bins as usize,
    };
    let points = info_diagram(&set, &cfg)?;
    let mut w = create(&args.out)?;
    match args.format {
        Format::Csv => write_diagram_csv(&points, &mut w)?,
        Format::Json => {
            serde_json::to_writer(&mut w, &points)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    let (ymin, ymax) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
    let violations = soundness_violations(&set, args.alpha, &points, args.tolerance)?;
    println!("d={} kind={} M={} alpha={}", set.dim(), set.kind(), set.len(), args.alpha);
    println!("points              {}", points.len());
    println!("entropy sum range   [{ymin:.6}, {ymax:.6}]");
    println!("bound violations    {}", violations.len());
    println!("written             {}", args.out.display());
    if let Some(v) = violations.first() {
        eprintln!("first violation: {v:?}");
        return Err(Failure::Verification);
    }
    Ok(())
}

fn cmd_region(args: &RegionArgs) -> Outcome {
    check_dim(args.d)?;
    let vectors = if args.constrained {
        entropy_region_constrained(args.d, args.samples as usize, args.seed)?
    } else {
        entropy_region_mub(args.d, args.samples as usize, args.seed)?
    };
    let mut w = create(&args.out)?;
    match args.format {
        Format::Csv => write_region_csv(&vectors, &mut w)?,
        Format::Json => {
            serde_json::to_writer(&mut w, &vectors)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    let min = vectors.iter().map(|v| v.sum()).fold(f64::INFINITY, f64::min);
    println!("d={} region={}", args.d, if args.constrained { "constrained" } else { "mub" });
    println!("vectors             {}", vectors.len());
    println!("smallest sum        {min:.6}");
    println!("written             {}", args.out.display());
    Ok(())
}

fn cmd_witness(args: &WitnessArgs) -> Outcome {
    let report = werner_threshold(args.d, args.alpha, args.resolution)?;
    let closest = report
        .scan_points
        .iter()
        .min_by(|a, b| (a.lhs - a.rhs).total_cmp(&(b.lhs - b.rhs)))
        .copied();
    println!("d={} alpha={}", report.d, report.alpha);
    if report.found {
        println!("threshold           {:.4}", report.threshold);
    } else {
        println!("threshold           none in [0, 1] (reported as {})", report.threshold);
    }
    if let Some(s) = closest {
        println!("closest approach    lhs - rhs = {:.3e} at p = {:.2}", s.lhs - s.rhs, s.p);
    }
    println!("entangled for       p > {:.4}", 1.0 / (args.d as f64 + 1.0));
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        println!("written             {}", out.display());
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let size = if args.quick { SuiteSize::Quick } else { SuiteSize::Full };
    let reports = run_suite(size, args.seed)?;
    for r in &reports {
        println!("{:<20} {:<8} {:>7.1}s  {}", r.name, r.verdict(), r.seconds, r.summary);
        if let Some(ce) = &r.counterexample {
            println!("{:<20} first counterexample: {ce}", "");
        }
    }
    if let Some(out) = &args.out {
        write_json(out, &reports)?;
    }
    if suite_passed(&reports) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_gaps(args: &GapsArgs) -> Outcome {
    check_dim(args.set.d)?;
    let set = args.set.build()?;
    let rows = gap_report(&set, args.alpha, args.strata as usize, args.per_stratum as usize, args.seed)?;
    println!("d={} kind={} M={} alpha={}", set.dim(), set.kind(), set.len(), args.alpha);
    for row in &rows {
        let gaps: Vec<String> = row.gaps.iter().map(|g| format!("{}={:.4}", g.formula, g.gap)).collect();
        println!(
            "[{:.4}, {:.4}]  n={:<5} H in [{:.5}, {:.5}]  {}",
            row.purity_lo,
            row.purity_hi,
            row.samples,
            row.empirical_min,
            row.empirical_max,
            gaps.join(" ")
        );
    }
    if let Some(out) = &args.out {
        write_json(out, &rows)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Diagram(a) => cmd_diagram(a),
        Command::Region(a) => cmd_region(a),
        Command::Witness(a) => cmd_witness(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gaps(a) => cmd_gaps(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
