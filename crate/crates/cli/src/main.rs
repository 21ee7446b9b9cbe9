//! `nfscan` command-line front end.
//!
//! Exit status: 0 on success, 2 for usage, configuration and input errors,
//! 3 for numerical failures during evaluation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nfscan::calibration::{calibrate, GeometryKernel, SignMode};
use nfscan::config::ScanConfig;
use nfscan::io::{
    parse_cf_csv, parse_map_csv, parse_touchstone, render_pgm, write_cf_csv, write_map_csv,
    write_profile_csv, write_touchstone, Axis, DataFormat, FieldMap,
};
use nfscan::probe::probe_transfer;
use nfscan::scan::{apply_calibration_to_scan, extract_profile, map_stats, run_simulated_scan};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "nfscan",
    version,
    about = "Virtual magnetic near-field scanner and probe calibration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a raster scan and write per-frequency S21, port-voltage and field maps.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; output is identical for any value.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the synthetic probe two-port measured over the middle of the configured trace.
    ProbeTransfer {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Touchstone data format: ri, ma or db.
        #[arg(long, default_value = "ri")]
        fmt: DataFormat,
    },
    /// Derive an antenna-factor table from a probe two-port file.
    Calibrate {
        #[arg(long)]
        probe: PathBuf,
        /// Probe height above the trace (mm).
        #[arg(long)]
        d: f64,
        /// Substrate thickness (mm).
        #[arg(long)]
        h: f64,
        #[arg(long, default_value = "paper")]
        kernel: GeometryKernel,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a port-voltage map to a field map with an antenna-factor table.
    Extract {
        #[arg(long)]
        scan: PathBuf,
        #[arg(long)]
        cf: PathBuf,
        /// Frequency (Hz) at which the antenna factor is looked up.
        #[arg(long)]
        freq: f64,
        #[arg(long, default_value = "eq1-consistent")]
        sign_mode: SignMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract one row or column of a map.
    Profile {
        #[arg(long)]
        map: PathBuf,
        /// Direction of travel: x or y.
        #[arg(long)]
        axis: Axis,
        /// Position on the other axis (mm).
        #[arg(long, allow_hyphen_values = true)]
        at: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the minimum and maximum of a dB map with their coordinates.
    Stats {
        #[arg(long)]
        map: PathBuf,
    },
    /// Render a dB map as a binary PGM image.
    Render {
        #[arg(long)]
        map: PathBuf,
        /// Value drawn black (defaults to the map minimum).
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        /// Value drawn white (defaults to the map maximum).
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<nfscan::Error> for Failure {
    fn from(e: nfscan::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> CmdResult {
    fs::write(path, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_map(path: &Path) -> Result<FieldMap, Failure> {
    parse_map_csv(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Display range for a map whose values may all be equal.
fn auto_range(map: &FieldMap) -> Result<(f64, f64), Failure> {
    let s = map_stats(map)?;
    let (lo, hi) = (s.min.value, s.max.value);
    Ok(if hi > lo { (lo, hi) } else { (lo, lo + 1.0) })
}

fn simulate(config: &Path, out: &Path, threads: Option<usize>) -> CmdResult {
    let text = read(config)?;
    let cfg = ScanConfig::load(&text)?;
    let result = match threads {
        Some(0) => return Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?
            .install(|| run_simulated_scan(&cfg.setup))?,
        None => run_simulated_scan(&cfg.setup)?,
    };
    fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;

    let mut files = Vec::new();
    for m in &result.maps {
        let tag = format!("{}GHz", m.freq / 1e9);
        let field = m.h_truth.component.to_string();
        let outputs = [
            ("s21", &m.s21),
            ("v", &m.v_port),
            (field.as_str(), &m.h_truth),
        ];
        for (name, map) in outputs {
            let file = format!("{name}_{tag}.csv");
            write(&out.join(&file), write_map_csv(&map.to_db()?))?;
            files.push(file);
        }
        let db = m.h_truth.to_db()?;
        let (lo, hi) = auto_range(&db)?;
        let file = format!("{field}_{tag}.pgm");
        write(&out.join(&file), render_pgm(&db, lo, hi)?)?;
        files.push(file);
    }

    let g = result.grid;
    let c = &cfg.calibration;
    let sidecar = json!({
        "tool": "nfscan",
        "version": env!("CARGO_PKG_VERSION"),
        "config_digest_sha256": result.provenance.config_digest,
        "kernel": c.kernel.as_str(),
        "sign_mode": c.sign_mode.as_str(),
        "cal_d_m": c.d,
        "cal_h_m": c.h,
        "frequencies_hz": result.maps.iter().map(|m| m.freq).collect::<Vec<_>>(),
        "grid": {"nx": g.nx(), "ny": g.ny(), "x_min_m": g.x_min, "y_min_m": g.y_min,
                 "dx_m": g.dx, "dy_m": g.dy, "z_height_m": g.z_height},
        "files": files,
    });
    let mut body =
        serde_json::to_string_pretty(&sidecar).map_err(|e| Failure::Usage(e.to_string()))?;
    body.push('\n');
    write(&out.join("provenance.json"), body)?;
    println!(
        "wrote {} maps for {} frequencies to {}",
        files.len(),
        result.maps.len(),
        out.display()
    );
    Ok(())
}

fn cmd_probe_transfer(config: &Path, out: &Path, fmt: DataFormat) -> CmdResult {
    let cfg = ScanConfig::load(&read(config)?)?;
    let s = &cfg.setup;
    let net = probe_transfer(
        &s.model,
        &s.dut.trace,
        &s.dut.substrate,
        cfg.probe_height,
        &s.sweep,
        &s.drive,
        s.eps_geom,
    )?;
    write(out, write_touchstone(&net, fmt))
}

fn cmd_calibrate(
    probe: &Path,
    d_mm: f64,
    h_mm: f64,
    kernel: GeometryKernel,
    out: &Path,
) -> CmdResult {
    let net = parse_touchstone(&read(probe)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", probe.display())))?;
    let table = calibrate(&net, d_mm * 1e-3, h_mm * 1e-3, kernel)?;
    write(out, write_cf_csv(&table))
}

fn cmd_extract(scan: &Path, cf: &Path, freq: f64, sign_mode: SignMode, out: &Path) -> CmdResult {
    let v = read_map(scan)?;
    let table =
        parse_cf_csv(&read(cf)?).map_err(|e| Failure::Usage(format!("{}: {e}", cf.display())))?;
    let h = apply_calibration_to_scan(&v, &table, freq, sign_mode)?;
    write(out, write_map_csv(&h))
}

fn cmd_profile(map: &Path, axis: Axis, at_mm: f64, out: &Path) -> CmdResult {
    let m = read_map(map)?;
    let p = extract_profile(&m, axis, at_mm * 1e-3)?;
    write(out, write_profile_csv(&p))
}

fn cmd_stats(map: &Path) -> CmdResult {
    let m = read_map(map)?;
    let s = map_stats(&m)?;
    let unit = m.unit();
    for (label, e) in [("min", s.min), ("max", s.max)] {
        println!(
            "{label} {} {unit} at x={} mm y={} mm (ix={}, iy={})",
            e.value,
            e.x * 1e3,
            e.y * 1e3,
            e.ix,
            e.iy
        );
    }
    Ok(())
}

fn cmd_render(map: &Path, lo: Option<f64>, hi: Option<f64>, out: &Path) -> CmdResult {
    let m = read_map(map)?;
    let (auto_lo, auto_hi) = auto_range(&m)?;
    write(
        out,
        render_pgm(&m, lo.unwrap_or(auto_lo), hi.unwrap_or(auto_hi))?,
    )
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Simulate {
            config,
            out,
            threads,
        } => simulate(&config, &out, threads),
        Command::ProbeTransfer { config, out, fmt } => cmd_probe_transfer(&config, &out, fmt),
        Command::Calibrate {
            probe,
            d,
            h,
            kernel,
            out,
        } => cmd_calibrate(&probe, d, h, kernel, &out),
        Command::Extract {
            scan,
            cf,
            freq,
            sign_mode,
            out,
        } => cmd_extract(&scan, &cf, freq, sign_mode, &out),
        Command::Profile { map, axis, at, out } => cmd_profile(&map, axis, at, &out),
        Command::Stats { map } => cmd_stats(&map),
        Command::Render { map, lo, hi, out } => cmd_render(&map, lo, hi, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(3)
        }
    }
}
