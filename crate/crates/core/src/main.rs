use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isac_fusion::config_file::ConfigFile;
use isac_fusion::harness::{
    render_csv, render_lattice_csv, run_geometry_sweep, run_sweep, scene_from_config, summary_table,
    write_csv, ExperimentSpec, FusionMode, PointContext,
};
use isac_fusion::theory::{harmonic_bound, reconstruction_gain_factor, LogBase, SnrPrediction};
use isac_fusion::{Error, Result};

#[derive(Parser)]
#[command(name = "isac-fusion", version, about = "Multi-station cooperative OFDM sensing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over SNR, station count and resource sizes.
    Sweep(Common),
    /// Two-station angle study (defaults to 20..160 degrees, symbol mode).
    Geometry(Common),
    /// One trial with detailed output and optional diagnostic dumps.
    SingleTrial {
        #[command(flatten)]
        common: Common,
        /// Trial index of the generated scene.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Directory for report records and lattice weight CSVs.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Closed-form SNR predictions for the configured numerology.
    Theory(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SNR values in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Vec<f64>,
    /// Station counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    bs_count: Vec<usize>,
    /// Two-station angles in degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    theta_deg: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Estimators to run, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    mode: Vec<FusionMode>,
    /// Disable receiver noise.
    #[arg(long)]
    noiseless: bool,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Loaded {
    spec: ExperimentSpec,
    file: ConfigFile,
    out: Option<PathBuf>,
}

fn load(common: &Common) -> Result<Loaded> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut spec = ExperimentSpec::from_config(&file)?;
    if !common.snr.is_empty() {
        spec.snr_db = common.snr.clone();
    }
    if !common.bs_count.is_empty() {
        spec.bs_counts = common.bs_count.clone();
    }
    if !common.theta_deg.is_empty() {
        spec.theta_deg = common.theta_deg.clone();
    }
    if !common.mode.is_empty() {
        spec.modes = common.mode.clone();
    }
    if let Some(t) = common.trials {
        spec.trials = t;
    }
    if let Some(s) = common.seed {
        spec.seed = s;
    }
    spec.noiseless |= common.noiseless;
    let out = common.out.clone().or_else(|| file.out.as_ref().map(PathBuf::from));
    Ok(Loaded { spec, file, out })
}

fn emit(rows: &[isac_fusion::harness::ResultRow], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            write_csv(rows, path)?;
            print!("{}", summary_table(rows));
            println!("wrote {}", path.display());
        }
        None => print!("{}", render_csv(rows)),
    }
    Ok(())
}

fn sweep(common: &Common) -> Result<()> {
    let l = load(common)?;
    let rows = run_sweep(&l.spec)?;
    emit(&rows, l.out.as_deref())
}

fn geometry(common: &Common) -> Result<()> {
    let mut l = load(common)?;
    if l.spec.theta_deg.is_empty() {
        l.spec.theta_deg = (1..=8).map(|i| 20.0 * i as f64).collect();
    }
    if common.mode.is_empty() && l.file.modes.is_none() {
        l.spec.modes = vec![FusionMode::Symbol];
    }
    let rows = run_geometry_sweep(&l.spec)?;
    emit(&rows, l.out.as_deref())
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes)?;
    Ok(())
}

fn single_trial(common: &Common, trial: u64, dump_dir: Option<&Path>) -> Result<()> {
    let l = load(common)?;
    l.spec.validate()?;
    let point = l.spec.points()[0];
    let scene = scene_from_config(&l.file)?;
    let mut ctx = PointContext::new(&l.spec, point)?;
    if let Some(sc) = &scene {
        ctx = ctx.with_stations(sc.stations.clone());
    }
    if l.spec.modes.contains(&FusionMode::Mle) {
        let (vr, vv) = ctx.calibrate(l.spec.calibration_trials)?;
        println!("mle variances: range {vr:.6} m^2, radial velocity {vv:.6} (m/s)^2");
    }
    let scenario = scene.unwrap_or_else(|| ctx.scenario(trial));
    let run = ctx.run(scenario, &l.spec.modes)?;
    let sc = &run.scenario;
    println!(
        "snr {} dB, {} stations, target ({:.4}, {:.4}) m, velocity ({:.4}, {:.4}) m/s",
        point.snr_db,
        sc.station_count(),
        sc.target_position.x,
        sc.target_position.y,
        sc.target_velocity.x,
        sc.target_velocity.y
    );
    for (w, rep) in run.reports.iter().enumerate() {
        println!(
            "bs {w}: range {:.3} m (true {:.4}), radial velocity {:.3} m/s (true {:.4})",
            rep.range,
            sc.range(w)?,
            rep.velocity,
            sc.radial_velocity(w)?
        );
    }
    for (name, fix) in [("symbol", &run.symbol), ("mle", &run.mle)] {
        match fix {
            Some(Ok((loc, vel))) => println!(
                "{name}: location ({:.4}, {:.4}) m, error {:.4} m; velocity ({:.4}, {:.4}) m/s, error {:.4} m/s",
                loc.position.x,
                loc.position.y,
                (loc.position - sc.target_position).norm(),
                vel.velocity.x,
                vel.velocity.y,
                (vel.velocity - sc.target_velocity).norm()
            ),
            Some(Err(e)) => println!("{name}: failed: {e}"),
            None => {}
        }
    }

    if let Some(dir) = dump_dir {
        fs::create_dir_all(dir)?;
        for rep in &run.reports {
            write(&dir.join(format!("report_bs{}.bin", rep.bs_index)), rep.encode()?)?;
            write(&dir.join(format!("report_bs{}.txt", rep.bs_index)), rep.to_text())?;
        }
        for (prefix, fix) in [("symbol", &run.symbol), ("mle", &run.mle)] {
            if let Some(Ok((loc, vel))) = fix {
                write(
                    &dir.join(format!("{prefix}_location_weights.csv")),
                    render_lattice_csv(&loc.lattice, &loc.weights),
                )?;
                write(
                    &dir.join(format!("{prefix}_velocity_weights.csv")),
                    render_lattice_csv(&vel.lattice, &vel.weights),
                )?;
            }
        }
        println!("dumped diagnostics to {}", dir.display());
    }
    Ok(())
}

fn theory(common: &Common) -> Result<()> {
    let l = load(common)?;
    l.spec.validate()?;
    println!("nc,ns,snr_db,noise_variance,snr_2dfft,snr_g_sum_lower_bound,harmonic_sum,harmonic_bound");
    for &nc in &l.spec.subcarrier_variants {
        for &ns in &l.spec.symbol_variants {
            for &snr in &l.spec.snr_db {
                let var = 10f64.powf(-snr / 10.0);
                let p = SnrPrediction::new(nc, ns, var)?;
                println!(
                    "{nc},{ns},{snr},{var:.6},{:.6},{:.6},{:.6},{:.6}",
                    p.snr_2dfft,
                    p.snr_g_sum_lower_bound,
                    p.harmonic_sum,
                    harmonic_bound::<f64>(nc)
                );
            }
            println!(
                "# nc={nc} ns={ns}: reconstruction gain factor {:.4} (natural log), {:.4} (base-10 log)",
                reconstruction_gain_factor::<f64>(nc, ns, LogBase::Natural),
                reconstruction_gain_factor::<f64>(nc, ns, LogBase::Ten)
            );
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep(c) => sweep(c),
        Command::Geometry(c) => geometry(c),
        Command::SingleTrial { common, trial, dump_dir } => single_trial(common, *trial, dump_dir.as_deref()),
        Command::Theory(c) => theory(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
