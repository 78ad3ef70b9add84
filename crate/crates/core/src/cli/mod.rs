//! Command-line front end: one subcommand per operation, a TOML run
//! config, deterministic CSV/JSON reports and a run manifest with SHA-256
//! checksums of every report.
//!
//! Reports are assembled in memory and only written once the command has
//! succeeded, each through a temporary file and an atomic rename, so a
//! failing run leaves no partial output behind.

mod commands;
pub mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

pub use config::RunConfig;

use crate::error::{Error, Result};
use crate::scheme::{PadicScheme, QuadScheme, SchemeKind, DEFAULT_POINT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Enumerate the (sub)set of the model set inside the region.
    Generate,
    /// Finite-scale approximate-lattice axioms.
    Axioms,
    /// Densities along a Følner family.
    Density,
    /// Empirical Banach density and counting bounds.
    Banach,
    /// Gap set of a dilated pattern or progression.
    Gapset,
    /// Arithmetic-progression gap set.
    Apscan,
    /// Multiple-recurrence scan over endomorphisms.
    Multirec,
    /// Covering radius of a gap set across scales.
    Synd,
    /// Patch census.
    Patches,
    /// Separation of the difference set from the origin.
    Separation,
    /// Shrunk-window powers and dilated-pattern search.
    Ip,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Axioms => "axioms",
            Command::Density => "density",
            Command::Banach => "banach",
            Command::Gapset => "gapset",
            Command::Apscan => "apscan",
            Command::Multirec => "multirec",
            Command::Synd => "synd",
            Command::Patches => "patches",
            Command::Separation => "separation",
            Command::Ip => "ip",
        }
    }

    pub const ALL: [Command; 11] = [
        Command::Generate,
        Command::Axioms,
        Command::Density,
        Command::Banach,
        Command::Gapset,
        Command::Apscan,
        Command::Multirec,
        Command::Synd,
        Command::Patches,
        Command::Separation,
        Command::Ip,
    ];

    pub fn from_name(name: &str) -> Option<Command> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Parser)]
#[command(name = "approxlat", version, about = "Exact approximate-lattice experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Re-verify every reported witness by direct membership.
    #[arg(long, global = true)]
    pub recheck: bool,
    /// Cap on the estimated size of any single enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_POINT_CAP)]
    pub cap: u64,
}

/// Options of one run, independent of how they were obtained.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub command: Command,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub recheck: bool,
    pub cap: u64,
}

/// A report file produced by a command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(name: &str, s: String) -> Self {
        Artifact {
            name: name.to_string(),
            bytes: s.into_bytes(),
        }
    }

    pub fn json(name: &str, v: &serde_json::Value) -> Self {
        let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
        s.push('\n');
        Self::text(name, s)
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    /// `(file name, sha256 hex)` of every report written, in write order.
    pub outputs: Vec<(String, String)>,
    pub manifest: PathBuf,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, dir.join(name))?;
    Ok(())
}

/// Runs one command on a config text and writes its reports.
pub fn run_config(text: &str, opts: &RunOptions) -> Result<RunSummary> {
    let cfg = RunConfig::parse(text)?;
    let start = Instant::now();
    let artifacts = match opts.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::usage(format!("cannot start {n} workers: {e}")))?;
            pool.install(|| dispatch(&cfg, opts))?
        }
        None => dispatch(&cfg, opts)?,
    };
    let wall_ms = start.elapsed().as_millis() as u64;

    let formats = cfg.formats();
    let kept: Vec<&Artifact> = artifacts
        .iter()
        .filter(|a| {
            let ext = a.name.rsplit('.').next().unwrap_or("");
            formats.iter().any(|f| f == ext)
        })
        .collect();
    fs::create_dir_all(&opts.out)?;
    let mut outputs = Vec::new();
    for a in kept {
        write_atomic(&opts.out, &a.name, &a.bytes)?;
        outputs.push((a.name.clone(), sha256_hex(&a.bytes)));
    }
    let manifest = json!({
        "command": opts.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": sha256_hex(text.as_bytes()),
        "seeds": cfg.seeds(),
        "wall_time_ms": wall_ms,
        "workers": opts.workers.unwrap_or_else(rayon::current_num_threads),
        "recheck": opts.recheck,
        "cap": opts.cap,
        "outputs": outputs
            .iter()
            .map(|(f, h)| json!({ "file": f, "sha256": h }))
            .collect::<Vec<_>>(),
    });
    let name = format!("manifest_{}.json", opts.command.name());
    let m = Artifact::json(&name, &manifest);
    write_atomic(&opts.out, &name, &m.bytes)?;
    Ok(RunSummary {
        outputs,
        manifest: opts.out.join(name),
    })
}

fn dispatch(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let w = cfg.window()?;
    let closed = cfg.window_closed();
    match cfg.kind()? {
        SchemeKind::Quadratic => {
            let s = QuadScheme::new(cfg.radicand()?, w, closed)?;
            commands::run(&s, cfg, opts)
        }
        SchemeKind::Padic => {
            let s = PadicScheme::new(cfg.prime()?, w, closed)?;
            commands::run(&s, cfg, opts)
        }
    }
}

/// Parses arguments, runs, reports errors on stderr; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(summary) => {
            for (f, h) in &summary.outputs {
                println!("{h}  {f}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli) -> Result<RunSummary> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let text = fs::read_to_string(path)?;
    let cfg = RunConfig::parse(&text)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out_dir().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    run_config(
        &text,
        &RunOptions {
            command: cli.command,
            out,
            workers: cli.workers,
            recheck: cli.recheck,
            cap: cli.cap,
        },
    )
}
