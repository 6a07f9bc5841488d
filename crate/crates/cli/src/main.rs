use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;
use tessera::characteristics::{sample_pdt_typical_cell, EstimateOptions, DEFAULT_INTERIOR_FRACTION};
use tessera::geom::{CentroidRule, Vector};
use tessera::io::{read_document, render_svg, report_csv, write_document, ColorBy, Meta};
use tessera::models::{monte_carlo_sweep, ModelSpec, DEFAULT_Z_THRESHOLD};
use tessera::process::Seed;
use tessera::Error;

#[derive(Parser)]
#[command(name = "tessera", version, about = "Random tessellations: simulate, measure, validate")]
struct Cli {
    /// Worker threads for replicate parallelism.
    #[arg(long, global = true, env = "TESSERA_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one realization and write it as JSON.
    Generate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate characteristics of a stored realization.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "gravity")]
        centroid: String,
        #[arg(long, default_value_t = DEFAULT_INTERIOR_FRACTION)]
        interior_fraction: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo sweep against the model's mean-value formulas.
    Validate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest acceptable |z|.
        #[arg(long, default_value_t = DEFAULT_Z_THRESHOLD)]
        threshold: f64,
    },
    /// Draw a planar realization as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "cell")]
        color_by: String,
    },
    /// Factorial study: one CSV row per parameter setting.
    Sweep {
        #[arg(long)]
        model: String,
        #[arg(long)]
        params: Option<PathBuf>,
        /// `key=v1,v2,...`; dotted keys reach nested parameters. Repeatable.
        #[arg(long, required = true)]
        grid: Vec<String>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct samples of a typical cell.
    TypicalCell {
        #[arg(long, default_value = "pdt")]
        model: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Error with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_config() || matches!(e, Error::Io(_)) { 2 } else { 3 };
        Failure { code, message: e.to_string() }
    }
}

fn config(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

fn read_params(path: Option<&Path>) -> Result<Value, Failure> {
    match path {
        None => Ok(Value::Null),
        Some(p) => {
            let s = std::fs::read_to_string(p).map_err(|e| config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&s).map_err(|e| config(format!("{}: {e}", p.display())))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn centroid_rule(s: &str) -> Result<CentroidRule, Failure> {
    match s {
        "gravity" => Ok(CentroidRule::GravityCenter),
        "circumball" => Ok(CentroidRule::CircumballCenter),
        _ => Err(config(format!("unknown centroid rule {s:?}, expected gravity|circumball"))),
    }
}

/// Sets `path` (dot separated) in a JSON object.
fn set_path(v: &mut Value, path: &str, x: Value) -> Result<(), Failure> {
    if v.is_null() {
        *v = Value::Object(Default::default());
    }
    let mut cur = v;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, k) in keys.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| config(format!("grid key {path:?} does not name an object field")))?;
        if i + 1 == keys.len() {
            obj.insert(k.to_string(), x);
            return Ok(());
        }
        cur = obj.entry(k.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

fn parse_grid(specs: &[String]) -> Result<Vec<(String, Vec<Value>)>, Failure> {
    specs
        .iter()
        .map(|g| {
            let (k, vs) = g.split_once('=').ok_or_else(|| config(format!("grid entry {g:?} must look like key=v1,v2")))?;
            let vals = vs
                .split(',')
                .map(|s| serde_json::from_str(s.trim()).unwrap_or_else(|_| Value::String(s.trim().to_string())))
                .collect::<Vec<_>>();
            if vals.is_empty() || k.is_empty() {
                return Err(config(format!("empty grid entry {g:?}")));
            }
            Ok((k.to_string(), vals))
        })
        .collect()
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| config(e.to_string()))?;
    }
    match cli.command {
        Command::Generate { model, params, seed, out } => {
            let spec = ModelSpec::from_parts(&model, read_params(params.as_deref())?)?;
            let r = spec.generate(Seed::new(seed))?;
            let meta = Meta { params: serde_json::to_value(&spec).map_err(Error::from)?, seed: Some(seed) };
            write_document(&out, &r, &meta)?;
            Ok(0)
        }
        Command::Stats { input, centroid, interior_fraction, out } => {
            if !(interior_fraction > 0.0 && interior_fraction <= 1.0) {
                return Err(config("--interior-fraction must lie in (0, 1]"));
            }
            let (r, _) = read_document(&input)?;
            let opts = EstimateOptions { centroid: centroid_rule(&centroid)?, interior_fraction };
            emit(out.as_deref(), &report_csv(&r.report(&opts)?))?;
            Ok(0)
        }
        Command::Validate { model, params, reps, seed, out, threshold } => {
            if reps < 2 {
                return Err(config("--reps must be at least 2"));
            }
            let spec = ModelSpec::from_parts(&model, read_params(params.as_deref())?)?;
            if spec.oracle()?.is_none() {
                return Err(config(format!("model {} with these parameters has no analytic mean values", spec.name())));
            }
            let table = monte_carlo_sweep(&spec, reps, Seed::new(seed), &EstimateOptions::default())?;
            emit(out.as_deref(), &table.to_csv())?;
            let worst = table.max_abs_z();
            if worst > threshold {
                eprintln!("validation failed: max |z| = {worst:.3} exceeds {threshold}");
                return Ok(1);
            }
            Ok(0)
        }
        Command::Render { input, out, color_by } => {
            let (r, _) = read_document(&input)?;
            let color: ColorBy = color_by.parse()?;
            emit(Some(&out), &render_svg(&r, color)?)?;
            Ok(0)
        }
        Command::Sweep { model, params, grid, reps, seed, out } => {
            if reps < 2 {
                return Err(config("--reps must be at least 2"));
            }
            let base = read_params(params.as_deref())?;
            let axes = parse_grid(&grid)?;
            let mut settings: Vec<Vec<Value>> = vec![Vec::new()];
            for (_, vals) in &axes {
                settings = settings.into_iter().flat_map(|s| vals.iter().map(move |v| [s.clone(), vec![v.clone()]].concat())).collect();
            }
            let mut tables = Vec::with_capacity(settings.len());
            for (k, setting) in settings.iter().enumerate() {
                let mut p = base.clone();
                for ((key, _), v) in axes.iter().zip(setting) {
                    set_path(&mut p, key, v.clone())?;
                }
                let spec = ModelSpec::from_parts(&model, p)?;
                tables.push(monte_carlo_sweep(&spec, reps, Seed::new(seed).derive(k as u64, "setting"), &EstimateOptions::default())?);
            }
            let mut names: Vec<&str> = tables.iter().flat_map(|t| t.rows.iter().map(|r| r.name.as_str())).collect();
            names.sort_unstable();
            names.dedup();
            let mut csv = axes.iter().map(|a| a.0.clone()).collect::<Vec<_>>();
            for n in &names {
                csv.push(n.to_string());
                csv.push(format!("{n}_se"));
            }
            csv.push("max_abs_z".into());
            let mut text = csv.join(",") + "\n";
            for (setting, t) in settings.iter().zip(&tables) {
                let mut row: Vec<String> = setting.iter().map(csv_value).collect();
                for n in &names {
                    match t.row(n) {
                        Some(r) => {
                            row.push(format!("{:?}", r.estimate));
                            row.push(format!("{:?}", r.se));
                        }
                        None => row.extend([String::new(), String::new()]),
                    }
                }
                row.push(format!("{:?}", t.max_abs_z()));
                text += &(row.join(",") + "\n");
            }
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::TypicalCell { model, lambda, n, seed, out } => {
            if model != "pdt" {
                return Err(config(format!("direct typical-cell sampling is available for pdt only, not {model:?}")));
            }
            let mut rng = Seed::new(seed).rng(0, "typical-cell");
            let mut text = String::from("index,area,perimeter,x0,y0,x1,y1,x2,y2\n");
            for i in 0..n {
                let c = sample_pdt_typical_cell(lambda, &mut rng)?;
                let v = c.vertices();
                text += &format!(
                    "{i},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n",
                    c.area(),
                    c.perimeter(),
                    v[0].coord(0),
                    v[0].coord(1),
                    v[1].coord(0),
                    v[1].coord(1),
                    v[2].coord(0),
                    v[2].coord(1)
                );
            }
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
