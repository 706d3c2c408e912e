//! `bowtie`: seed, run, verify and snapshot figure-eight flows.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bowtie_core::flowcore::{estimate_vanishing_time, FlowState};
use bowtie_core::runner::{run, run_sweep, snapshot_svg, verify, Checkpoint, Provenance, RunConfig};
use bowtie_core::seeds::{validate_monotone, SeedSpec};
use bowtie_core::{Error, RenormMode, ThetaInterval};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bowtie", version, about = "Curve shortening flow of symmetric figure-eights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a seed arc, check its monotonicity and save it as a checkpoint.
    Seed(SeedArgs),
    /// Evolve a seed to a stop condition, writing trace, checkpoints and report.
    Run(Box<RunArgs>),
    /// Evaluate the acceptance criteria on a trace.
    Verify(VerifyArgs),
    /// Render a checkpoint as an SVG.
    Snapshot(SnapshotArgs),
}

#[derive(Args, Clone, Default)]
struct SeedFlags {
    /// Lemniscate scale.
    #[arg(long)]
    a: Option<f64>,
    /// Vertex count of a lemniscate or circle seed.
    #[arg(long)]
    n: Option<usize>,
    /// Read the quarter arc from an `x,y` CSV file instead.
    #[arg(long, conflicts_with_all = ["a", "circle_radius"])]
    points: Option<PathBuf>,
    /// Closed circle control run of this radius.
    #[arg(long, conflicts_with = "a")]
    circle_radius: Option<f64>,
}

impl SeedFlags {
    fn apply(&self, seed: &mut SeedSpec) {
        if let Some(p) = &self.points {
            *seed = SeedSpec::FromPoints { source_path: p.clone() };
            return;
        }
        if let Some(r) = self.circle_radius {
            let n = match *seed {
                SeedSpec::Circle { n, .. } | SeedSpec::Lemniscate { n, .. } => n,
                SeedSpec::FromPoints { .. } => 256,
            };
            *seed = SeedSpec::Circle { radius: r, n };
        }
        match seed {
            SeedSpec::Lemniscate { a, n } => {
                *a = self.a.unwrap_or(*a);
                *n = self.n.unwrap_or(*n);
            }
            SeedSpec::Circle { n, .. } => *n = self.n.unwrap_or(*n),
            SeedSpec::FromPoints { .. } => {
                if self.a.is_some() || self.n.is_some() {
                    *seed = SeedSpec::Lemniscate { a: self.a.unwrap_or(1.0), n: self.n.unwrap_or(800) };
                }
            }
        }
    }
}

#[derive(Args)]
struct SeedArgs {
    #[command(flatten)]
    seed: SeedFlags,
    /// Checkpoint file to write.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run config; flags override its fields.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedFlags,
    #[arg(long)]
    safety: Option<f64>,
    #[arg(long)]
    dtheta_max: Option<f64>,
    #[arg(long)]
    h_max: Option<f64>,
    #[arg(long)]
    kappa_h_stop: Option<f64>,
    #[arg(long)]
    x_floor: Option<f64>,
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long)]
    coarsen_ratio: Option<f64>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    diag_interval: Option<u64>,
    /// Lower end of the Grim Reaper comparison window.
    #[arg(long)]
    j_lo: Option<f64>,
    /// Upper end of the Grim Reaper comparison window.
    #[arg(long)]
    j_hi: Option<f64>,
    #[arg(long)]
    checkpoint_every: Option<u64>,
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Run one config per value, in parallel, each in `<out_dir>/<field>_<value>`.
    /// Form: `field=v1,v2,...` with field one of n, a, safety, dtheta_max.
    #[arg(long)]
    sweep: Option<String>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::reference("out"),
        };
        if let Some(d) = &self.out_dir {
            c.out_dir = d.clone();
        }
        self.seed.apply(&mut c.seed);
        let s = &mut c.step;
        set(&mut s.safety, self.safety);
        set(&mut s.dtheta_max, self.dtheta_max);
        set(&mut s.kappa_h_stop, self.kappa_h_stop);
        set(&mut s.x_floor, self.x_floor);
        set(&mut s.coarsen_ratio, self.coarsen_ratio);
        s.h_max = self.h_max.or(s.h_max);
        s.max_steps = self.max_steps.or(s.max_steps);
        s.max_points = self.max_points.or(s.max_points);
        set(&mut c.diag_interval, self.diag_interval);
        set(&mut c.checkpoint_every, self.checkpoint_every);
        set(&mut c.rng_seed, self.rng_seed);
        c.j = ThetaInterval { lo: self.j_lo.unwrap_or(c.j.lo), hi: self.j_hi.unwrap_or(c.j.hi) };
        c.validate()?;
        Ok(c)
    }
}

fn set<T>(field: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *field = v;
    }
}

/// Expands `field=v1,v2,...` into one config per value.
fn sweep_configs(base: &RunConfig, spec: &str) -> Result<Vec<RunConfig>, Error> {
    let bad = |why: &str| Error::Config(format!("--sweep {spec}: {why}"));
    let (field, values) = spec.split_once('=').ok_or_else(|| bad("expected field=v1,v2,..."))?;
    let mut out = Vec::new();
    for v in values.split(',').map(str::trim) {
        let mut c = base.clone();
        let num: f64 = v.parse().map_err(|_| bad(&format!("{v} is not a number")))?;
        match (field, &mut c.seed) {
            ("n", SeedSpec::Lemniscate { n, .. } | SeedSpec::Circle { n, .. }) => {
                *n = v.parse().map_err(|_| bad(&format!("{v} is not a vertex count")))?
            }
            ("a", SeedSpec::Lemniscate { a, .. }) => *a = num,
            ("safety", _) => c.step.safety = num,
            ("dtheta_max", _) => c.step.dtheta_max = num,
            _ => return Err(bad("unsupported field for this seed")),
        }
        c.out_dir = base.out_dir.join(format!("{field}_{v}"));
        c.validate()?;
        out.push(c);
    }
    Ok(out)
}

#[derive(Args)]
struct VerifyArgs {
    /// Trace CSV of the run under test.
    trace: PathBuf,
    /// Trace of the same configuration at a quarter of the resolution, for
    /// the refinement check.
    #[arg(long)]
    coarse: Option<PathBuf>,
    /// Also write the results as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Box,
    Width,
    Parabolic,
    Reaper,
}

#[derive(Args)]
struct SnapshotArgs {
    checkpoint: PathBuf,
    #[arg(long, value_enum, default_value = "box")]
    mode: Mode,
    #[arg(long, short)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Seed(a) => seed(a),
        Command::Run(a) => run_cmd(*a),
        Command::Verify(a) => verify_cmd(a),
        Command::Snapshot(a) => snapshot(a),
    }
}

fn seed(args: SeedArgs) -> Result<u8, Error> {
    let mut spec = SeedSpec::Lemniscate { a: 1.0, n: 800 };
    args.seed.apply(&mut spec);
    let arc = spec.build()?;
    let report = validate_monotone(&arc)?;
    let state = FlowState::new(arc);
    let t_hat = estimate_vanishing_time(&state)?;
    let provenance = Provenance { config_hash: String::new(), crate_version: env!("CARGO_PKG_VERSION").into() };
    Checkpoint::new(&state, t_hat, None, provenance).save(&args.out)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!("vertices {}  T_hat {t_hat:.6}", state.arc.len());
    Ok(if report.passes() { 0 } else { 1 })
}

fn run_cmd(args: RunArgs) -> Result<u8, Error> {
    let config = args.config()?;
    let configs = match &args.sweep {
        Some(spec) => sweep_configs(&config, spec)?,
        None => vec![config],
    };
    let results = if configs.len() == 1 { vec![run(&configs[0])] } else { run_sweep(&configs) };
    let mut code = 0;
    for (c, r) in configs.iter().zip(results) {
        match r {
            Ok(rep) => println!(
                "{}: stop {} after {} steps, t = {:.9}, T_hat = {:.9}, {} trace rows",
                c.out_dir.display(),
                rep.stop_reason,
                rep.steps,
                rep.t_end,
                rep.t_hat,
                rep.trace_rows
            ),
            Err(e) => {
                eprintln!("{}: error: {e}", c.out_dir.display());
                code = 2;
            }
        }
    }
    Ok(code)
}

fn verify_cmd(args: VerifyArgs) -> Result<u8, Error> {
    let report = verify(&args.trace, args.coarse.as_deref())?;
    print!("{}", report.table());
    if let Some(p) = &args.json {
        write_text(p, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(report.exit_code() as u8)
}

fn snapshot(args: SnapshotArgs) -> Result<u8, Error> {
    let cp = Checkpoint::load(&args.checkpoint)?;
    let mode = match args.mode {
        Mode::Box => RenormMode::Box,
        Mode::Width => RenormMode::Width,
        Mode::Parabolic => RenormMode::Parabolic { t: cp.t, t_hat: cp.t_hat },
        Mode::Reaper => RenormMode::Reaper,
    };
    snapshot_svg(&cp, mode, &args.out)?;
    Ok(0)
}

fn write_text(path: &Path, text: String) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.into(), source })
}
