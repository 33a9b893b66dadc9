//! Command-line front end: every command reads a JSON config, writes a
//! `manifest.json` (config hash, seed, version) plus machine-readable
//! outputs into `--out`, and exits with a code describing the outcome:
//! `0` success, `1` usage or configuration problem, `2` measured property
//! violation, `3` hypothesis refusal (the instance is outside the class the
//! estimates cover).

use clap::{Args, Parser, Subcommand};
use mixedweak::config::{
    write_field, ClaimsConfig, DecomposeConfig, ExperimentConfig, LuxemburgConfig, MaximalConfig,
    ModeSpec, WeightsConfig, YoungCheckConfig,
};
use mixedweak::czdecomp::{claims_battery, level_set_decomposition};
use mixedweak::error::{Error, Result};
use mixedweak::field::{FieldKind, SampledField};
use mixedweak::grid::DyadicGrid;
use mixedweak::maximal::{
    luxemburg_average, maximal_hl_uncentered_field, maximal_orlicz_field, sawyer_field,
    MaximalMode,
};
use mixedweak::quad::log_grid;
use mixedweak::verify::VerificationReport;
use mixedweak::weights::{ap_constant, cube_family, rh_constant};
use mixedweak::young::{check_fr, inverse_product_check};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "mixedweak",
    version,
    about = "Numerical laboratory for weighted Orlicz maximal inequalities",
    disable_help_subcommand = true,
    after_help = "Config file schemas live in schemas/*.schema.json; example configs in configs/.\n\
                  Exit codes: 0 success, 1 usage/config error, 2 property violation, 3 hypothesis refusal."
)]
struct Cli {
    /// Cap the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Rerun at double resolution and report the drift of the constant.
    #[arg(long)]
    resolution_doubling: bool,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Class checks for a convex profile: lower type, submultiplicativity,
    /// growth bound, and the inverse-conjugate product law.
    Young(IoArgs),
    /// Muckenhoupt and reverse Hölder constants of a weight.
    Weights(IoArgs),
    /// Maximal transform of a field (optionally perturbed by a weight).
    Maximal(IoArgs),
    /// Normalized average of a field over one box.
    Luxemburg(IoArgs),
    /// Maximal-cube decomposition of one level set.
    Decompose(IoArgs),
    /// Full two-sided sweep of the mixed weak-type inequality.
    Verify(VerifyArgs),
    /// Stopping-time battery: layers, principal cubes, summation claims.
    Claims(IoArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap exits 2 on usage errors by default; this tool reserves 2
            // for measured property violations.
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Err(e) = dispatch(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Json(_) | Error::Io(_) => 1,
        Error::Property(_) | Error::Structural(_) | Error::NotAWeight(_) => 2,
        Error::Hypothesis(_) => 3,
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Young(io) => cmd_young(&io),
        Command::Weights(io) => cmd_weights(&io),
        Command::Maximal(io) => cmd_maximal(&io),
        Command::Luxemburg(io) => cmd_luxemburg(&io),
        Command::Decompose(io) => cmd_decompose(&io),
        Command::Verify(args) => cmd_verify(&args),
        Command::Claims(io) => cmd_claims(&io),
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_sha256: String,
    seed: u64,
    version: &'a str,
}

/// Reads the raw config bytes (hashed verbatim into the manifest) and
/// deserializes them.
fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let cfg = serde_json::from_slice(&bytes)?;
    Ok((cfg, bytes))
}

fn write_manifest(out: &Path, command: &str, config_bytes: &[u8], seed: u64) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let manifest = Manifest {
        command,
        config_sha256: format!("{:x}", Sha256::digest(config_bytes)),
        seed,
        version: env!("CARGO_PKG_VERSION"),
    };
    write_json(&out.join("manifest.json"), &manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

fn mode_of(mode: ModeSpec, identity: bool, dim: u8) -> MaximalMode {
    match mode {
        ModeSpec::UncenteredHl => MaximalMode::UncenteredHl,
        ModeSpec::DyadicMax => MaximalMode::DyadicMax,
        ModeSpec::Inflated => MaximalMode::Inflated,
        ModeSpec::Auto => {
            if identity && dim == 1 {
                MaximalMode::UncenteredHl
            } else {
                MaximalMode::DyadicMax
            }
        }
    }
}

fn cmd_young(io: &IoArgs) -> Result<()> {
    let (cfg, bytes) = load_config::<YoungCheckConfig>(&io.config)?;
    write_manifest(&io.out, "young", &bytes, 0)?;
    let phi = cfg.phi.build()?;
    let fr = check_fr(&phi, cfg.r)?;
    let grid = log_grid(1e-3, 1e3, 200);
    let product = inverse_product_check(&phi, &grid)?;
    #[derive(Serialize)]
    struct YoungReport<'a> {
        fr: &'a mixedweak::young::FrReport,
        inverse_product: &'a mixedweak::young::InverseProductReport,
    }
    write_json(
        &io.out.join("report.json"),
        &YoungReport {
            fr: &fr,
            inverse_product: &product,
        },
    )?;
    println!(
        "class member (r = {}): {}; product ratio in [{:.6}, {:.6}]",
        fr.r, fr.member, product.min_ratio, product.max_ratio
    );
    Ok(())
}

fn cmd_weights(io: &IoArgs) -> Result<()> {
    let (cfg, bytes) = load_config::<WeightsConfig>(&io.config)?;
    write_manifest(&io.out, "weights", &bytes, cfg.seed)?;
    let w = cfg.weight.build(cfg.dim, cfg.half_width, cfg.cells)?;
    let family = cube_family(&w, cfg.random_cubes, cfg.seed)?;
    let p_list = if cfg.p.is_empty() { vec![1.0] } else { cfg.p.clone() };
    let ap: Vec<_> = p_list
        .iter()
        .map(|&p| ap_constant(&w, p, &family))
        .collect::<Result<_>>()?;
    let rh: Vec<_> = cfg
        .s
        .iter()
        .map(|&s| rh_constant(&w, s, &family))
        .collect::<Result<_>>()?;
    #[derive(Serialize)]
    struct WeightsReport {
        cubes_scanned: usize,
        ap: Vec<mixedweak::weights::MuckenhouptReport>,
        rh: Vec<mixedweak::weights::MuckenhouptReport>,
    }
    let report = WeightsReport {
        cubes_scanned: family.len(),
        ap,
        rh,
    };
    write_json(&io.out.join("report.json"), &report)?;
    for m in report.ap.iter().chain(report.rh.iter()) {
        println!("exponent {}: constant {:.6}", m.p, m.constant);
    }
    Ok(())
}

fn cmd_maximal(io: &IoArgs) -> Result<()> {
    let (cfg, bytes) = load_config::<MaximalConfig>(&io.config)?;
    write_manifest(&io.out, "maximal", &bytes, cfg.seed)?;
    let f = cfg.f.build(cfg.dim, cfg.half_width, cfg.cells, cfg.seed)?;
    let phi = cfg.phi.build()?;
    let mode = mode_of(cfg.mode, phi.is_identity(), cfg.dim);
    let values = match &cfg.v {
        Some(vspec) => {
            let v = vspec.build(cfg.dim, cfg.half_width, cfg.cells)?;
            sawyer_field(&f, &v, &phi, mode)?
        }
        None => match mode {
            MaximalMode::UncenteredHl => maximal_hl_uncentered_field(&f)?,
            MaximalMode::DyadicMax => maximal_orlicz_field(&f, &phi)?.dyadic_max,
            MaximalMode::Inflated => maximal_orlicz_field(&f, &phi)?.inflated,
        },
    };
    let transform = SampledField::new(
        cfg.dim,
        cfg.half_width,
        cfg.cells,
        FieldKind::Function,
        values,
    )?;
    let fields = io.out.join("fields");
    std::fs::create_dir_all(&fields)?;
    write_field(&fields.join("input"), &f)?;
    write_field(&fields.join("transform"), &transform)?;
    let sup = transform.values().iter().copied().fold(0.0f64, f64::max);
    #[derive(Serialize)]
    struct MaximalReport {
        sup: f64,
        cells: usize,
    }
    write_json(
        &io.out.join("report.json"),
        &MaximalReport {
            sup,
            cells: transform.values().len(),
        },
    )?;
    println!("sup of transform: {sup:.9}");
    Ok(())
}

fn cmd_luxemburg(io: &IoArgs) -> Result<()> {
    let (cfg, bytes) = load_config::<LuxemburgConfig>(&io.config)?;
    write_manifest(&io.out, "luxemburg", &bytes, cfg.seed)?;
    let f = cfg.f.build(cfg.dim, cfg.half_width, cfg.cells, cfg.seed)?;
    let phi = cfg.phi.build()?;
    let range = f.snap_box(&cfg.low, cfg.side).ok_or_else(|| {
        Error::Config("averaging box lies outside the domain or snaps to nothing".into())
    })?;
    let lux = luxemburg_average(&f, &range, &phi)?;
    #[derive(Serialize)]
    struct LuxReport {
        value: f64,
        iterations: u32,
        residual: f64,
    }
    write_json(
        &io.out.join("report.json"),
        &LuxReport {
            value: lux.value,
            iterations: lux.iterations,
            residual: lux.residual,
        },
    )?;
    println!("luxemburg average: {:.12}", lux.value);
    Ok(())
}

fn cmd_decompose(io: &IoArgs) -> Result<()> {
    let (cfg, bytes) = load_config::<DecomposeConfig>(&io.config)?;
    cfg.validate()?;
    write_manifest(&io.out, "decompose", &bytes, cfg.seed)?;
    let g = cfg.g.build(cfg.dim, cfg.half_width, cfg.cells, cfg.seed)?;
    let phi = cfg.phi.build()?;
    let grid = DyadicGrid::new(cfg.dim, cfg.grid)?;
    let forest = level_set_decomposition(&g, &phi, &grid, cfg.lambda)?;
    write_json(&io.out.join("forest.json"), &forest)?;
    println!(
        "threshold {}: {} maximal cubes",
        forest.lambda,
        forest.cubes.len()
    );
    Ok(())
}

fn write_rows_csv(path: &Path, report: &VerificationReport) -> Result<()> {
    let mut csv = String::from("t,lhs,rhs,ratio,flags\n");
    for row in &report.rows {
        let flags = if row.truncated { "truncated" } else { "" };
        csv.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{flags}\n",
            row.t, row.lhs, row.rhs, row.ratio
        ));
    }
    std::fs::write(path, csv)?;
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let io = &args.io;
    let (mut cfg, bytes) = load_config::<ExperimentConfig>(&io.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    write_manifest(&io.out, "verify", &bytes, cfg.seed)?;
    let report = cfg.run()?;
    write_rows_csv(&io.out.join("rows.csv"), &report)?;

    let (u, v, f, phi) = cfg.build_fields(cfg.cells)?;
    let s_values = sawyer_field(&f, &v, &phi, cfg.maximal_mode(&phi))?;
    let s = SampledField::new(cfg.dim, cfg.half_width, cfg.cells, FieldKind::Function, s_values)?;
    let fields = io.out.join("fields");
    std::fs::create_dir_all(&fields)?;
    write_field(&fields.join("u"), &u)?;
    write_field(&fields.join("v"), &v)?;
    write_field(&fields.join("f"), &f)?;
    write_field(&fields.join("transform"), &s)?;

    let doubled = if args.resolution_doubling {
        let mut fine = cfg.clone();
        fine.cells = cfg.cells * 2;
        Some(fine.run()?)
    } else {
        None
    };
    #[derive(Serialize)]
    struct VerifyOutput<'a> {
        report: &'a VerificationReport,
        c_emp_doubled: Option<f64>,
        /// `|c_fine - c| / c` under resolution doubling.
        c_emp_drift: Option<f64>,
    }
    let c_emp_doubled = doubled.as_ref().map(|r| r.c_emp);
    let c_emp_drift = c_emp_doubled.map(|c| (c - report.c_emp).abs() / report.c_emp);
    write_json(
        &io.out.join("report.json"),
        &VerifyOutput {
            report: &report,
            c_emp_doubled,
            c_emp_drift,
        },
    )?;
    println!(
        "c_emp = {:.9} over {} thresholds ({} truncated)",
        report.c_emp,
        report.rows.len(),
        report.truncated_rows
    );
    if let (Some(c), Some(d)) = (c_emp_doubled, c_emp_drift) {
        println!("c_emp at doubled resolution = {c:.9} (drift {:.4}%)", 100.0 * d);
    }
    Ok(())
}

fn cmd_claims(io: &IoArgs) -> Result<()> {
    let (cfg, bytes) = load_config::<ClaimsConfig>(&io.config)?;
    cfg.experiment.validate()?;
    write_manifest(&io.out, "claims", &bytes, cfg.experiment.seed)?;
    let exp = &cfg.experiment;
    let (u, v, f, phi) = exp.build_fields(exp.cells)?;
    let grid = DyadicGrid::new(exp.dim, cfg.grid)?;
    let total = f.values().len();
    let cells: Vec<usize> = match &cfg.sample_cells {
        Some(list) => {
            if let Some(&bad) = list.iter().find(|&&c| c >= total) {
                return Err(Error::Config(format!(
                    "sample cell {bad} out of range (field has {total} cells)"
                )));
            }
            list.clone()
        }
        None => (0..5).map(|i| total * (2 * i + 1) / 10).collect(),
    };
    let battery = claims_battery(
        &u,
        &v,
        &f,
        exp.r,
        &phi,
        cfg.t,
        exp.a,
        exp.beta,
        cfg.n_trunc,
        &grid,
        &cells,
        exp.seed,
    )?;
    write_json(&io.out.join("claims.json"), &battery)?;
    println!(
        "layers k = {}..={}; claim constants: {:.6} / worst2 {:.6} / worst3 {:.6}",
        battery.k_range.0,
        battery.k_range.1,
        battery.claim1.constant,
        battery
            .claim2
            .iter()
            .map(|c| c.constant)
            .fold(0.0f64, f64::max),
        battery
            .claim3
            .iter()
            .map(|c| c.constant)
            .fold(0.0f64, f64::max)
    );
    Ok(())
}
