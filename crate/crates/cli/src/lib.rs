//! Command-line front end: argument parsing, output files and manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub mod commands;

#[derive(Parser, Debug, Serialize)]
#[command(name = "percolab", version, about = "Critical and dynamical percolation experiments")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of trials; each subcommand has its own default.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads, 0 for all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Output directory; defaults to $PERCOLAB_OUT, then the current directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write whitespace-separated x, y, err columns.
    #[arg(long, global = true)]
    pub emit_gnuplot_data: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum EventName {
    OneArm,
    OneArmBlack,
    TwoArm,
    FourArm,
    Alternating,
    HalfPlane,
    JClusters,
    FiveArm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum LatticeName {
    Triangular,
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum MethodName {
    Decide,
    Exploration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum AlgName {
    Box,
    Annulus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum CorpusName {
    Builtin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ShapeName {
    Box,
    Rhombus,
    Annulus,
}

#[derive(Args, Debug, Serialize)]
pub struct EventArgs {
    #[arg(long, value_enum, default_value = "one-arm")]
    pub event: EventName,
    #[arg(long, value_enum, default_value = "triangular")]
    pub lattice: LatticeName,
    /// Arm count for `alternating`.
    #[arg(long)]
    pub k: Option<u32>,
    /// Colors for `half-plane`, right base to left base, e.g. `wbw`.
    #[arg(long)]
    pub colors: Option<String>,
    /// Cluster count for `j-clusters`.
    #[arg(long)]
    pub j: Option<u32>,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Arm probabilities with Wilson intervals.
    ArmEstimate {
        #[command(flatten)]
        event: EventArgs,
        #[arg(long)]
        r: u32,
        /// Outer radii, comma separated.
        #[arg(long = "R", value_delimiter = ',', required = true)]
        big_r: Vec<u32>,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, value_enum, default_value = "decide")]
        method: MethodName,
    },
    /// Log-log exponent fit over outer radii.
    FitExponent {
        #[command(flatten)]
        event: EventArgs,
        #[arg(long)]
        r: u32,
        #[arg(long = "R", value_delimiter = ',', required = true)]
        big_r: Vec<u32>,
        /// Allowed distance from the reference exponent.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Keep the smallest radius in the fit.
        #[arg(long)]
        keep_smallest: bool,
    },
    /// Per-cell examination rates of the exploration algorithms.
    Revealment {
        #[arg(long, value_enum)]
        alg: AlgName,
        #[arg(long = "R")]
        big_r: u32,
        /// Inner radius for the annulus algorithm.
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Exact level-weight bound on small functions.
    FourierCheck {
        #[arg(long, value_enum, default_value = "builtin")]
        corpus: CorpusName,
    },
    /// E[f(w_0) f(w_t)] for a crossing event.
    DynamicsCorrelation {
        #[arg(long, value_enum, default_value = "rhombus")]
        domain: ShapeName,
        #[arg(long, default_value_t = 3)]
        size: u32,
        #[arg(long = "t", value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0])]
        lags: Vec<f64>,
    },
    /// Crossing time sets, boundary counts and covering numbers.
    CrossingTimes {
        #[arg(long, value_enum, default_value = "box")]
        domain: ShapeName,
        /// Box side.
        #[arg(long, default_value_t = 8)]
        size: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long = "R", default_value_t = 8)]
        big_r: u32,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
    },
    /// Upper bound on the dimension of exceptional times.
    DimensionBound {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        influence: Option<f64>,
        /// Estimate both inputs for the one-arm event at these radii.
        #[arg(long = "R", value_delimiter = ',')]
        big_r: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Quasi-multiplicativity ratios over all radius triples.
    QuasiMult {
        #[arg(long, default_value_t = 2)]
        j: u32,
        #[arg(long, value_delimiter = ',', default_values_t = vec![4, 8, 16, 32, 64])]
        radii: Vec<u32>,
    },
    /// Tail of the separation of crossing interfaces.
    SeparationTail {
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long = "R", default_value_t = 64)]
        big_r: u32,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.5])]
        deltas: Vec<f64>,
    },
    /// Noise sensitivity of box crossings.
    NoiseCurve {
        #[arg(long, value_delimiter = ',', default_values_t = vec![16, 32, 64])]
        size: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// Use eps = m^(-gamma), folded into [0, 1/2].
        #[arg(long)]
        gamma: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ArmEstimate { .. } => "arm-estimate",
            Command::FitExponent { .. } => "fit-exponent",
            Command::Revealment { .. } => "revealment",
            Command::FourierCheck { .. } => "fourier-check",
            Command::DynamicsCorrelation { .. } => "dynamics-correlation",
            Command::CrossingTimes { .. } => "crossing-times",
            Command::DimensionBound { .. } => "dimension-bound",
            Command::QuasiMult { .. } => "quasi-mult",
            Command::SeparationTail { .. } => "separation-tail",
            Command::NoiseCurve { .. } => "noise-curve",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags; exit code 2.
    Usage(String),
    /// Failure while running; exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<percolab::Error> for CliError {
    fn from(e: percolab::Error) -> CliError {
        use percolab::Error as E;
        match e {
            E::InvalidDomain(_) | E::InvalidArc(_) | E::DomainMismatch(_) | E::InvalidParameter(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A result table plus plot columns and a summary for the manifest.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub plot: Vec<[f64; 3]>,
    pub summary: Value,
    /// Set when the run completed but found something wrong.
    pub failure: Option<String>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Table {
        Table { header: header.to_vec(), summary: json!({}), ..Table::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal; `nan`, `inf` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub fn csv_bytes(t: &Table) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Runtime(format!("csv: {e}"));
    w.write_record(&t.header).map_err(io)?;
    for r in &t.rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(format!("csv: {e}")))
}

/// Git-style object hash: SHA-256 of `blob <len>\0` followed by the bytes.
pub fn payload_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

pub fn output_dir(common: &Common) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| std::env::var_os("PERCOLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Writes `<name>.csv`, `<name>.json` and optionally `<name>.dat`; returns
/// the manifest path.
pub fn write_outputs(cli: &Cli, table: &Table, started: Instant) -> Result<PathBuf, CliError> {
    let dir = output_dir(&cli.common);
    let io = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", dir.display()));
    fs::create_dir_all(&dir).map_err(io)?;
    let name = cli.command.name();
    let payload = csv_bytes(table)?;
    let csv_name = format!("{name}.csv");
    fs::write(dir.join(&csv_name), &payload).map_err(io)?;
    if cli.common.emit_gnuplot_data {
        let mut s = String::from("# x y err\n");
        for p in &table.plot {
            s.push_str(&format!("{} {} {}\n", num(p[0]), num(p[1]), num(p[2])));
        }
        fs::write(dir.join(format!("{name}.dat")), s).map_err(io)?;
    }
    let records: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Object(table.header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect()))
        .collect();
    let manifest = json!({
        "schema": 1,
        "tool": "percolab",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": name,
        "config": cli,
        "payload": csv_name,
        "payload_hash": payload_hash(&payload),
        "payload_hash_kind": "sha256 of git blob",
        "rows": table.rows.len(),
        "summary": table.summary,
        "records": records,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    let path = dir.join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(io)?;
    Ok(path)
}

/// Re-reads a manifest and checks the payload hash.
pub fn verify_manifest(path: &Path) -> Result<bool, CliError> {
    let rt = |e: String| CliError::Runtime(e);
    let text = fs::read_to_string(path).map_err(|e| rt(e.to_string()))?;
    let m: Value = serde_json::from_str(&text).map_err(|e| rt(e.to_string()))?;
    let name = m["payload"].as_str().ok_or_else(|| rt("manifest has no payload".into()))?;
    let bytes = fs::read(path.with_file_name(name)).map_err(|e| rt(e.to_string()))?;
    Ok(m["schema"] == 1 && m["payload_hash"].as_str() == Some(payload_hash(&bytes).as_str()))
}

/// Parses, runs and writes outputs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let started = Instant::now();
    let result = commands::execute(&cli).and_then(|t| {
        let path = write_outputs(&cli, &t, started)?;
        eprintln!("wrote {}", path.display());
        match t.failure {
            Some(f) => Err(CliError::Runtime(f)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
