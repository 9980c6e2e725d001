use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use thzce::bench::{
    emit_csv, emit_plot, gen_dataset, read_csv, run_experiment, ExperimentConfig, Preset, Sweep,
    OUTPUT_DIR_ENV,
};
use thzce::estimators::Algorithm;
use thzce::frontend::PilotScheme;
use thzce::metrics::aggregate;

#[derive(Parser)]
#[command(
    name = "thzce",
    version,
    about = "One-bit THz MIMO channel estimation benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Pilot-count sweep at fixed SNR.
    SweepPilots {
        #[arg(long, default_value = "fig4")]
        preset: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// SNR sweep at fixed pilot count.
    SweepSnr {
        #[arg(long, default_value = "fig5")]
        preset: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Simulate channels and observations and write them as a JSON dataset.
    GenDataset {
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Dataset path; defaults to <output dir>/dataset.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Plot a results CSV.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Default)]
struct Overrides {
    /// Set any config field: `--set estimator.epochs=50`. The value is JSON;
    /// bare words are taken as strings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    m_t: Option<usize>,
    #[arg(long)]
    m_r: Option<usize>,
    #[arg(long)]
    frequency: Option<f64>,
    #[arg(long)]
    distance: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    absorption_table: Option<PathBuf>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of lr,nn,pga,fw.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    /// Comma-separated pilot schemes: dft, zc or zc:<root>.
    #[arg(long, value_delimiter = ',')]
    pilot_schemes: Option<Vec<String>>,
    /// Pilot counts; a single value for an SNR sweep.
    #[arg(long, value_delimiter = ',')]
    pilots: Option<Vec<usize>>,
    /// SNR values in dB; a single value for a pilot sweep.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    /// Record wall-clock training time (CSV is then not reproducible).
    #[arg(long)]
    timing: bool,
}

fn parse_scheme(s: &str) -> thzce::Result<PilotScheme> {
    match s.split_once(':') {
        None if s == "dft" => Ok(PilotScheme::Dft),
        None if s == "zc" => Ok(PilotScheme::Zc { root: 1 }),
        Some(("zc", root)) => root
            .parse()
            .map(|root| PilotScheme::Zc { root })
            .map_err(|_| thzce::Error::InvalidParameter(format!("bad ZC root `{root}`"))),
        _ => Err(thzce::Error::InvalidParameter(format!(
            "unknown pilot scheme `{s}`"
        ))),
    }
}

fn set_path(root: &mut Value, assignment: &str) -> thzce::Result<()> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| {
        thzce::Error::InvalidParameter(format!("`{assignment}` is not KEY=VALUE"))
    })?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        let obj = node.as_object_mut().ok_or_else(|| {
            thzce::Error::InvalidParameter(format!("`{key}` does not name a config field"))
        })?;
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
    }
    node.as_object_mut()
        .ok_or_else(|| {
            thzce::Error::InvalidParameter(format!("`{key}` does not name a config field"))
        })?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl Overrides {
    fn apply(&self, base: Value) -> thzce::Result<ExperimentConfig> {
        let mut value = base;
        for s in &self.set {
            set_path(&mut value, s)?;
        }
        let mut cfg = ExperimentConfig::from_json(&value.to_string())?;
        macro_rules! take {
            ($field:ident, $target:expr) => {
                if let Some(v) = self.$field.clone() {
                    $target = v;
                }
            };
        }
        take!(m_t, cfg.m_t);
        take!(m_r, cfg.m_r);
        take!(frequency, cfg.frequency_hz);
        take!(distance, cfg.distance_m);
        take!(temperature, cfg.temperature_k);
        take!(realizations, cfg.realizations);
        take!(seed, cfg.master_seed);
        take!(out_dir, cfg.output_dir);
        if let Some(p) = &self.absorption_table {
            cfg.absorption_table = Some(p.clone());
        }
        if let Some(names) = &self.algorithms {
            cfg.algorithms = names
                .iter()
                .map(|n| Algorithm::parse(n))
                .collect::<thzce::Result<_>>()?;
        }
        if let Some(names) = &self.pilot_schemes {
            cfg.pilot_schemes = names
                .iter()
                .map(|n| parse_scheme(n))
                .collect::<thzce::Result<_>>()?;
        }
        if let Some(e) = self.epochs {
            cfg.estimator.epochs = Some(e);
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        if self.timing {
            cfg.record_timing = true;
        }
        cfg.sweep = match (cfg.sweep.clone(), &self.pilots, &self.snr) {
            (Sweep::Pilots { snr_db, n_pilots }, p, s) => Sweep::Pilots {
                snr_db: single(s, snr_db, "--snr")?,
                n_pilots: p.clone().unwrap_or(n_pilots),
            },
            (Sweep::Snr { n_pilots, snr_db }, p, s) => Sweep::Snr {
                n_pilots: single(p, n_pilots, "--pilots")?,
                snr_db: s.clone().unwrap_or(snr_db),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn single<T: Copy>(list: &Option<Vec<T>>, default: T, flag: &str) -> thzce::Result<T> {
    match list.as_deref() {
        None => Ok(default),
        Some([v]) => Ok(*v),
        Some(_) => Err(thzce::Error::InvalidParameter(format!(
            "{flag} takes one value on this sweep axis"
        ))),
    }
}

fn preset_value(name: &str) -> thzce::Result<Value> {
    Ok(serde_json::to_value(ExperimentConfig::from_preset(
        Preset::parse(name)?,
    ))?)
}

fn file_value(path: &Path) -> thzce::Result<Value> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn run_and_report(cfg: &ExperimentConfig, stem: &str) -> thzce::Result<bool> {
    let out = run_experiment(cfg)?;
    for f in &out.failures {
        eprintln!(
            "FAILED {} {} N_p={} snr={} realization={}: {}",
            f.algorithm.name(),
            f.pilot_scheme,
            f.n_pilots,
            f.snr_db,
            f.realization,
            f.error
        );
    }
    if out.records.is_empty() {
        eprintln!("no successful records");
        return Ok(false);
    }
    let csv = cfg.output_dir.join(format!("{stem}.csv"));
    let svg = cfg.output_dir.join(format!("{stem}.svg"));
    emit_csv(&out.records, &csv)?;
    emit_plot(&out.records, &svg)?;
    println!(
        "{:<4} {:<4} {:>5} {:>7} {:>9} {:>7}",
        "alg", "pil", "N_p", "snr_db", "mean_db", "std_db"
    );
    for g in aggregate(&out.records)? {
        println!(
            "{:<4} {:<4} {:>5} {:>7.1} {:>9.2} {:>7.2}",
            g.algorithm.name(),
            g.pilot_scheme,
            g.n_pilots,
            g.snr_db,
            g.mean_db,
            g.std_db
        );
    }
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(out.is_clean())
}

fn dispatch(cli: Cli) -> thzce::Result<bool> {
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = overrides.apply(file_value(&config)?)?;
            let stem = config
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("run")
                .to_string();
            run_and_report(&cfg, &stem)
        }
        Command::SweepPilots { preset, overrides } => {
            let cfg = overrides.apply(preset_value(&preset)?)?;
            if !matches!(cfg.sweep, Sweep::Pilots { .. }) {
                return Err(thzce::Error::InvalidParameter(format!(
                    "preset `{preset}` is not a pilot sweep"
                )));
            }
            run_and_report(&cfg, &preset)
        }
        Command::SweepSnr { preset, overrides } => {
            let cfg = overrides.apply(preset_value(&preset)?)?;
            if !matches!(cfg.sweep, Sweep::Snr { .. }) {
                return Err(thzce::Error::InvalidParameter(format!(
                    "preset `{preset}` is not an SNR sweep"
                )));
            }
            run_and_report(&cfg, &preset)
        }
        Command::GenDataset {
            config,
            preset,
            out,
            overrides,
        } => {
            let base = match (&config, &preset) {
                (Some(path), _) => file_value(path)?,
                (None, Some(name)) => preset_value(name)?,
                (None, None) => serde_json::to_value(ExperimentConfig::default())?,
            };
            let cfg = overrides.apply(base)?;
            let path = out.unwrap_or_else(|| cfg.output_dir.join("dataset.json"));
            let ds = gen_dataset(&cfg, &path)?;
            let blocks: usize = ds.realizations.iter().map(|r| r.blocks.len()).sum();
            println!(
                "wrote {} realizations, {blocks} blocks to {}",
                ds.realizations.len(),
                path.display()
            );
            Ok(true)
        }
        Command::Plot { input, out } => {
            emit_plot(&read_csv(&input)?, &out)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
