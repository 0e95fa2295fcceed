//! Command-line front end for the causal-transport toolkit: spectral
//! evolution, violation quantifiers, sweep tables, Dirac causality checks,
//! discrete-measure coupling, and continuity-equation verification.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-budget failure
//! (a grid could not meet its resolution or truncation budget). All CSV
//! artifacts are deterministic for a fixed configuration; each written
//! artifact gets a `.manifest.json` sidecar with diagnostics.

mod config;
mod manifest;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use causalflow::continuity::{
    causal_current_check, continuity_residual_check, velocity_bound_check, SampledFlow,
};
use causalflow::dirac;
use causalflow::packets::{GridSpec, PacketError, SpectralEvolver};
use causalflow::quantify::{HalfWidthScan, Quantifier, QuantifyError, TimeScan, HALF_WIDTH_SCAN};
use causalflow::transport::{self, DiscreteMeasure};

use config::{config_hash, DispersionSpec, ExperimentConfig, FamilySpec};
use manifest::ManifestBuilder;

#[derive(Parser)]
#[command(
    name = "causalflow",
    version,
    about = "Causal-precedence checks and superluminal-flow quantifiers for wave packets"
)]
struct Cli {
    /// Cap the worker pool (also honours CAUSALFLOW_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a packet and write x, Re ψ, Im ψ, |ψ|² as CSV.
    Evolve(EvolveArgs),
    /// Cone deficiency of an interval, or its interval-maximised peak.
    Quantify(QuantifyArgs),
    /// Fill a (t, a) deficiency table and write t,a,M rows.
    Sweep(SweepArgs),
    /// Reproduce a published violation table as CSV.
    ReproduceTable(ReproduceArgs),
    /// Evolve a spinor and verify causal precedence of every time pair.
    DiracCheck(DiracArgs),
    /// Optimal causal coupling of two discrete measures.
    Transport(TransportArgs),
    /// Verify a sampled density/flux field against the causal-flow criteria.
    ContinuityCheck(ContinuityArgs),
}

#[derive(Args)]
struct PipelineArgs {
    /// Family spec, e.g. gaussian:1.0, sech:1.5, sinc-power:2:1.0@0.5.
    #[arg(long)]
    family: Option<String>,
    /// Dispersion spec: relativistic:<m>, massless, nonrelativistic:<m>.
    #[arg(long)]
    dispersion: Option<String>,
    /// JSON experiment configuration file (flags override its fields).
    #[arg(long)]
    config: Option<PathBuf>,
}

impl PipelineArgs {
    fn resolve(&self) -> Result<ExperimentConfig, String> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                serde_json::from_str::<ExperimentConfig>(&text)
                    .map_err(|e| format!("bad config {}: {e}", path.display()))?
            }
            None => ExperimentConfig {
                family: FamilySpec::Gaussian {
                    width_sq: 1.0,
                    boost: 0.0,
                },
                dispersion: DispersionSpec::Relativistic { mass: 1.0 },
                grid: None,
                time_scan: None,
                half_width_scan: None,
            },
        };
        if let Some(f) = &self.family {
            config.family = FamilySpec::parse(f)?;
        }
        if let Some(d) = &self.dispersion {
            config.dispersion = DispersionSpec::parse(d)?;
        }
        Ok(config)
    }
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Evolution time.
    #[arg(long)]
    t: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QuantifyArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Evolution time.
    #[arg(long)]
    t: f64,
    /// Half-width of the symmetric interval [−a, a].
    #[arg(long, conflicts_with = "scan")]
    a: Option<f64>,
    /// Maximise over intervals instead of evaluating a single one.
    #[arg(long)]
    scan: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Time horizon (default 3/m).
    #[arg(long)]
    t_max: Option<f64>,
    /// Time step (default 0.01/m).
    #[arg(long)]
    t_step: Option<f64>,
    /// Output CSV path (columns t,a,M).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Which table: gaussian, sech, or sinexp.
    table: String,
    /// Output CSV path (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiracArgs {
    /// Initial spinor: gaussian:<width> (upper component) or random:<seed>.
    #[arg(long)]
    state: String,
    /// Comma-separated strictly increasing times.
    #[arg(long)]
    times: String,
    /// Fermion mass.
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
}

#[derive(Args)]
struct TransportArgs {
    #[command(subcommand)]
    action: TransportAction,
}

#[derive(Subcommand)]
enum TransportAction {
    /// Maximal causal coupling between two measure files.
    Solve {
        /// Source measure CSV (columns x,mass) at time 0.
        #[arg(long)]
        mu: PathBuf,
        /// Target measure CSV (columns x,mass) at time dt.
        #[arg(long)]
        nu: PathBuf,
        /// Time separation of the slices.
        #[arg(long)]
        dt: f64,
    },
}

#[derive(Args)]
struct ContinuityArgs {
    /// Flow CSV with columns t,x,rho,j on a uniform (t, x) grid.
    #[arg(long)]
    flow: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("CAUSALFLOW_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global()
        .ok();

    let result = match cli.command {
        Command::Evolve(args) => run_evolve(args),
        Command::Quantify(args) => run_quantify(args),
        Command::Sweep(args) => run_sweep(args),
        Command::ReproduceTable(args) => run_reproduce(args),
        Command::DiracCheck(args) => run_dirac(args),
        Command::Transport(args) => run_transport(args),
        Command::ContinuityCheck(args) => run_continuity(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        Failure::config(message)
    }
}

impl From<PacketError> for Failure {
    fn from(e: PacketError) -> Self {
        match e {
            PacketError::Resolution { .. } | PacketError::TailMass { .. } => {
                Failure::numerical(e.to_string())
            }
            _ => Failure::config(e.to_string()),
        }
    }
}

impl From<QuantifyError> for Failure {
    fn from(e: QuantifyError) -> Self {
        match e {
            QuantifyError::Packet(inner) => inner.into(),
            other => Failure::config(other.to_string()),
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::config(format!("io error: {e}"))
}

fn build_quantifier(
    config: &ExperimentConfig,
    t_max: f64,
) -> Result<(Quantifier, ManifestBuilder), Failure> {
    let family = config.family.build().map_err(Failure::config)?;
    let dispersion = config.dispersion.build();
    dispersion.validate().map_err(Failure::from)?;
    let quantifier = match &config.grid {
        Some(g) => {
            let grid = GridSpec::new(g.x0, g.dx, g.n).map_err(Failure::from)?;
            Quantifier::with_grid(family, dispersion, grid, t_max)
        }
        None => Quantifier::new(family, dispersion, t_max),
    }
    .map_err(Failure::from)?;
    let mut builder = ManifestBuilder::new(config_hash(config));
    let grid = quantifier.grid();
    builder.record_grid(grid.n, grid.dx, grid.half_width());
    Ok((quantifier, builder))
}

fn run_evolve(args: EvolveArgs) -> Result<(), Failure> {
    let config = args.pipeline.resolve()?;
    if args.t < 0.0 {
        return Err(Failure::config("evolution time must be ≥ 0"));
    }
    let family = config.family.build().map_err(Failure::config)?;
    let dispersion = config.dispersion.build();
    let grid = match &config.grid {
        Some(g) => GridSpec::new(g.x0, g.dx, g.n).map_err(Failure::from)?,
        None => GridSpec::auto(&family, &dispersion, args.t).map_err(Failure::from)?,
    };
    let mut builder = ManifestBuilder::new(config_hash(&config));
    builder.record_grid(grid.n, grid.dx, grid.half_width());
    let evolver = SpectralEvolver::new(family, dispersion, grid, args.t).map_err(Failure::from)?;
    let packet = evolver.evolve(args.t).map_err(Failure::from)?;
    builder.record(
        packet.tail_bound(),
        packet.renorm_delta(),
        packet.edge_band_mass(),
    );

    let mut out = String::from("x,re_psi,im_psi,density\n");
    for (k, amp) in packet.psi().iter().enumerate() {
        let x = grid.center(k);
        out.push_str(&format!("{x},{},{},{}\n", amp.re, amp.im, amp.norm_sqr()));
    }
    std::fs::write(&args.out, out).map_err(io_failure)?;
    builder.write_beside(&args.out).map_err(io_failure)?;
    println!("wrote {} ({} cells)", args.out.display(), grid.n);
    Ok(())
}

fn run_quantify(args: QuantifyArgs) -> Result<(), Failure> {
    let config = args.pipeline.resolve()?;
    let (quantifier, _) = build_quantifier(&config, args.t * 1.01 + 1e-6)?;
    let slice = quantifier.slice(args.t).map_err(Failure::from)?;
    let scan = half_width_scan(&config);
    let report = match args.a {
        Some(a) if !args.scan => {
            let d = quantifier.symmetric_deficiency(&slice, a);
            serde_json::json!({
                "t": args.t,
                "mode": "interval",
                "a": a,
                "deficiency": d.value,
                "noise_floor": d.floor,
                "detected": d.detected(),
            })
        }
        _ => {
            let peak = quantifier.peak(&slice, &scan);
            serde_json::json!({
                "t": args.t,
                "mode": "peak",
                "deficiency": peak.value,
                "noise_floor": peak.floor,
                "detected": peak.detected(),
                "interval": [peak.interval.0, peak.interval.1],
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(())
}

fn half_width_scan(config: &ExperimentConfig) -> HalfWidthScan {
    match config.half_width_scan {
        Some((min, max, per_decade)) => HalfWidthScan {
            min,
            max,
            per_decade,
        },
        None => HALF_WIDTH_SCAN,
    }
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let config = args.pipeline.resolve()?;
    let dispersion = config.dispersion.build();
    let default_scan = TimeScan::default_for(&dispersion);
    let times = TimeScan {
        t_max: args
            .t_max
            .or(config.time_scan.map(|(t, _)| t))
            .unwrap_or(default_scan.t_max),
        step: args
            .t_step
            .or(config.time_scan.map(|(_, s)| s))
            .unwrap_or(default_scan.step),
    };
    if !(times.step > 0.0 && times.t_max >= 0.0) {
        return Err(Failure::config("time scan must have positive step"));
    }
    let (quantifier, mut builder) = build_quantifier(&config, times.t_max * 1.01 + 1e-6)?;
    let scan = half_width_scan(&config);

    // Sweep cells are independent; shard the time axis over the pool and
    // assemble rows in deterministic order.
    let steps: Vec<usize> = (0..=((times.t_max / times.step).round() as usize)).collect();
    let a_values = scan.values();
    let rows: Vec<Result<String, Failure>> = steps
        .par_iter()
        .map(|&i| {
            let t = i as f64 * times.step;
            let slice = quantifier.slice(t).map_err(Failure::from)?;
            let mut chunk = String::new();
            for &a in &a_values {
                let d = quantifier.symmetric_deficiency(&slice, a);
                chunk.push_str(&format!("{t},{a},{}\n", d.value));
            }
            Ok(chunk)
        })
        .collect();

    let mut out = String::from("t,a,M\n");
    for row in rows {
        out.push_str(&row?);
    }
    std::fs::write(&args.out, out).map_err(io_failure)?;
    let initial = quantifier.initial();
    builder.record(0.0, initial.norm_error, initial.packet_error / 3.0);
    builder.write_beside(&args.out).map_err(io_failure)?;
    println!(
        "wrote {} ({} times × {} half-widths)",
        args.out.display(),
        steps.len(),
        a_values.len()
    );
    Ok(())
}

fn run_reproduce(args: ReproduceArgs) -> Result<(), Failure> {
    let rows: Vec<(String, f64, f64, f64)> = match args.table.as_str() {
        "gaussian" => [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
            .par_iter()
            .map(|&d| {
                let spec = FamilySpec::Gaussian {
                    width_sq: d,
                    boost: 0.0,
                };
                peak_row(format!("{d:e}"), spec, 3.0, 0.01)
            })
            .collect::<Result<_, _>>()?,
        "sech" => [3.0, 2.0, 5.0 / 3.0, 1.5]
            .par_iter()
            .map(|&alpha| {
                let spec = FamilySpec::Sech {
                    decay: alpha,
                    boost: 0.0,
                };
                peak_row(format!("{alpha}"), spec, 3.0, 0.01)
            })
            .collect::<Result<_, _>>()?,
        "sinexp" => (0..=16)
            .into_par_iter()
            .map(|i| {
                let alpha = 0.25 * i as f64;
                let spec = FamilySpec::SincSech {
                    decay: alpha,
                    boost: 0.0,
                };
                peak_row(format!("{alpha}"), spec, 3.0, 0.01)
            })
            .collect::<Result<_, _>>()?,
        other => {
            return Err(Failure::config(format!(
                "unknown table '{other}' (expected gaussian, sech, or sinexp)"
            )))
        }
    };

    let header = match args.table.as_str() {
        "gaussian" => "d,m_tilde,t1,a_m\n",
        "sech" => "alpha,m_tilde,t1,a_m\n",
        _ => "alpha,m_tilde_star,t1,a_m\n",
    };
    let mut text = String::from(header);
    for (label, m, t1, a) in rows {
        text.push_str(&format!("{label},{m},{t1},{a}\n"));
    }
    match &args.out {
        Some(path) => {
            std::fs::write(path, text).map_err(io_failure)?;
            println!("wrote {}", path.display());
        }
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(io_failure)?;
        }
    }
    Ok(())
}

fn peak_row(
    label: String,
    family: FamilySpec,
    t_max: f64,
    step: f64,
) -> Result<(String, f64, f64, f64), Failure> {
    let config = ExperimentConfig {
        family,
        dispersion: DispersionSpec::Relativistic { mass: 1.0 },
        grid: None,
        time_scan: Some((t_max, step)),
        half_width_scan: None,
    };
    let (quantifier, _) = build_quantifier(&config, t_max * 1.01 + 1e-6)?;
    let profile = quantifier
        .sweep(&TimeScan { t_max, step }, &HALF_WIDTH_SCAN)
        .map_err(Failure::from)?;
    Ok((
        label,
        profile.peak.value,
        profile.peak_t,
        profile.peak.half_width(),
    ))
}

fn run_dirac(args: DiracArgs) -> Result<(), Failure> {
    let times: Vec<f64> = args
        .times
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::config(format!("bad time '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let grid = dirac::default_grid(t_max);

    let field = match args.state.split(':').collect::<Vec<_>>().as_slice() {
        ["gaussian", w] => {
            let width: f64 = w
                .parse()
                .map_err(|_| Failure::config(format!("bad width '{w}'")))?;
            dirac::SpinorField::from_profiles(
                grid,
                args.mass,
                move |x| num_complex::Complex64::new((-x * x / (2.0 * width * width)).exp(), 0.0),
                |_| num_complex::Complex64::new(0.0, 0.0),
            )
            .map_err(|e| Failure::config(e.to_string()))?
        }
        ["random", seed] => {
            let seed: u64 = seed
                .parse()
                .map_err(|_| Failure::config(format!("bad seed '{seed}'")))?;
            dirac::random_spinor(grid, args.mass, seed)
        }
        _ => {
            return Err(Failure::config(format!(
                "unknown state '{}' (expected gaussian:<width> or random:<seed>)",
                args.state
            )))
        }
    };

    let mut max_ratio = 0.0f64;
    for &t in &times {
        let ratio = field
            .evolve(t)
            .map_err(|e| Failure::numerical(e.to_string()))?
            .current()
            .max_speed_ratio();
        max_ratio = max_ratio.max(ratio);
    }
    let checks = dirac::causality_check(&field, &times)
        .map_err(|e| Failure::config(e.to_string()))?;
    let verdicts: Vec<_> = checks
        .iter()
        .map(|c| {
            serde_json::json!({
                "s": c.s,
                "t": c.t,
                "n_tilde": c.acausal_mass,
                "causal": c.acausal_mass <= 1e-6,
            })
        })
        .collect();
    let report = serde_json::json!({
        "state": args.state,
        "mass": args.mass,
        "max_speed_ratio": max_ratio,
        "pairs": verdicts,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(())
}

fn read_discrete_csv(path: &Path, t: f64) -> Result<DiscreteMeasure, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    let mut atoms = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let mut parts = line.split(',');
        let x: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Failure::config(format!("{}:{}: bad x", path.display(), lineno + 1)))?;
        let m: f64 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(|| {
            Failure::config(format!("{}:{}: bad mass", path.display(), lineno + 1))
        })?;
        atoms.push((x, m));
    }
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    DiscreteMeasure::new(t, atoms).map_err(|e| Failure::config(e.to_string()))
}

fn run_transport(args: TransportArgs) -> Result<(), Failure> {
    let TransportAction::Solve { mu, nu, dt } = args.action;
    if dt < 0.0 {
        return Err(Failure::config("dt must be ≥ 0"));
    }
    let mu_measure = read_discrete_csv(&mu, 0.0)?;
    let nu_measure = read_discrete_csv(&nu, dt)?;
    let result = transport::max_causal_mass(&mu_measure, &nu_measure)
        .map_err(|e| Failure::config(e.to_string()))?;
    let witness_region = result.witness_region(&mu_measure);
    let report = serde_json::json!({
        "causal_mass": result.causal_mass,
        "n_tilde": result.acausal_mass,
        "witness": result
            .witness
            .iter()
            .map(|&i| mu_measure.positions()[i])
            .collect::<Vec<_>>(),
        "witness_intervals": witness_region.intervals(),
        "witness_deficiency": result.witness_deficiency,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(())
}

fn run_continuity(args: ContinuityArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.flow)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", args.flow.display())))?;
    let mut rows: Vec<(f64, f64, f64, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let values: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                Failure::config(format!("{}:{}: bad row", args.flow.display(), lineno + 1))
            })?;
        if values.len() != 4 {
            return Err(Failure::config(format!(
                "{}:{}: expected t,x,rho,j",
                args.flow.display(),
                lineno + 1
            )));
        }
        rows.push((values[0], values[1], values[2], values[3]));
    }
    let flow = assemble_flow(rows).map_err(Failure::config)?;
    let (current_ok, ratio) = causal_current_check(&flow);
    let residual = continuity_residual_check(&flow);
    let (speed_ok, speed) = velocity_bound_check(&flow);
    let report = serde_json::json!({
        "causal_current": { "ok": current_ok, "max_ratio": ratio },
        "continuity_residual": residual,
        "velocity_bound": { "ok": speed_ok, "max_speed": speed },
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(())
}

/// Reconstructs the uniform (t, x) grid from row-major t,x,rho,j rows.
fn assemble_flow(rows: Vec<(f64, f64, f64, f64)>) -> Result<SampledFlow, String> {
    if rows.len() < 9 {
        return Err("need at least a 3×3 flow grid".into());
    }
    let x0 = rows[0].1;
    let nx = rows.iter().take_while(|r| r.0 == rows[0].0).count();
    if nx < 3 || !rows.len().is_multiple_of(nx) {
        return Err("rows do not form a rectangular grid".into());
    }
    let nt = rows.len() / nx;
    let dx = rows[1].1 - rows[0].1;
    let dt = rows[nx].0 - rows[0].0;
    if !(dx > 0.0 && dt > 0.0) {
        return Err("grid steps must be positive".into());
    }
    let rho = rows.iter().map(|r| r.2).collect();
    let j = rows.iter().map(|r| r.3).collect();
    SampledFlow::new(rows[0].0, dt, x0, dx, nt, nx, rho, j).map_err(|e| e.to_string())
}
