use clap::{Args, Parser, Subcommand};
use junctionlab::error::Error;
use junctionlab::model::parse::parse_constant;
use junctionlab::model::templates::{template_names, Template};
use junctionlab::pipeline::{analyze, analyze_loop, AnalysisConfig, LoopConfig, PipelineError, Source, Stage};
use junctionlab::tracking::{write_points_csv, write_trajectory_csv};
use num_complex::Complex;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "junctionlab", version, about = "Gauge algebras of deformed elliptic fibrations from string junctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vanishing cycles, junction lattice and algebra of one model.
    Analyze(Common),
    /// Like analyze, and also write the root trajectories as CSV.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trace_dir: PathBuf,
    },
    /// Outer monodromy of the I0* slice around a loop in t.
    Monodromy {
        #[command(flatten)]
        common: Common,
        /// `steps=<n>,radius=<r>`; either key may be omitted.
        #[arg(long = "loop", value_name = "SPEC")]
        loop_spec: Option<String>,
    },
    /// List template names.
    Templates,
}

#[derive(Args)]
struct Common {
    #[arg(long, conflicts_with = "spec")]
    template: Option<String>,
    /// Model file with `f = ...` and `g = ...` statements.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    #[arg(long)]
    radius: Option<f64>,
    /// Base point `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    base: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_error(msg: impl Into<String>) -> PipelineError {
    PipelineError { stage: Stage::Model, error: Error::Config(msg.into()) }
}

fn build_config(c: &Common) -> Result<AnalysisConfig, PipelineError> {
    let mut params = BTreeMap::new();
    for p in &c.params {
        let (k, v) = p.split_once('=').ok_or_else(|| config_error(format!("--param expects name=value, got '{p}'")))?;
        let v = parse_constant(v).map_err(|e| config_error(format!("--param {k}: {e}")))?;
        params.insert(k.trim().to_string(), v);
    }
    let source = match (&c.template, &c.spec) {
        (Some(name), None) => {
            let t = Template::parse(name)
                .ok_or_else(|| config_error(format!("unknown template '{name}'; available: {}", template_names().join(", "))))?;
            Source::Template { template: t, params }
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            Source::Spec { text, params }
        }
        _ => return Err(config_error("exactly one of --template or --spec is required")),
    };
    let mut cfg = AnalysisConfig::template(Template::I(2));
    cfg.source = source;
    cfg.radius = c.radius;
    cfg.seed = c.seed;
    if let Some(b) = &c.base {
        let parts: Vec<&str> = b.split(',').collect();
        let nums: Vec<f64> = parts.iter().filter_map(|x| x.trim().parse().ok()).collect();
        if parts.len() != 2 || nums.len() != 2 {
            return Err(config_error(format!("--base expects re,im, got '{b}'")));
        }
        cfg.base = Complex::new(nums[0], nums[1]);
    }
    Ok(cfg)
}

fn parse_loop(spec: Option<&str>) -> Result<LoopConfig, PipelineError> {
    let mut lp = LoopConfig::default();
    let Some(spec) = spec else { return Ok(lp) };
    for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| config_error(format!("--loop entry '{part}' is not key=value")))?;
        match k.trim() {
            "steps" => lp.steps = v.trim().parse().map_err(|_| config_error(format!("bad steps '{v}'")))?,
            "radius" => lp.radius = Some(v.trim().parse().map_err(|_| config_error(format!("bad radius '{v}'")))?),
            other => return Err(config_error(format!("unknown --loop key '{other}'"))),
        }
    }
    Ok(lp)
}

fn emit(report: &junctionlab::pipeline::Report, out: Option<&PathBuf>) -> Result<(), PipelineError> {
    let io = |e: std::io::Error| PipelineError { stage: Stage::Output, error: Error::Io(e) };
    let text = serde_json::to_string_pretty(report).map_err(|e| io(std::io::Error::other(e)))?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").map_err(io),
        None => {
            let mut h = std::io::stdout().lock();
            writeln!(h, "{text}").map_err(io)
        }
    }
}

fn write_trace(an: &junctionlab::pipeline::Analysis, dir: &PathBuf) -> Result<(), PipelineError> {
    let io = |e: Error| PipelineError { stage: Stage::Output, error: e };
    std::fs::create_dir_all(dir).map_err(|e| io(e.into()))?;
    let f = File::create(dir.join("points.csv")).map_err(|e| io(e.into()))?;
    write_points_csv(&an.points, BufWriter::new(f)).map_err(io)?;
    for t in &an.trajectories {
        let f = File::create(dir.join(format!("path_{}.csv", t.path_index + 1))).map_err(|e| io(e.into()))?;
        write_trajectory_csv(t, BufWriter::new(f)).map_err(io)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Templates => {
            println!("{}", template_names().join("\n"));
            Ok(())
        }
        Command::Analyze(c) => {
            let an = analyze(&build_config(&c)?)?;
            emit(&an.report, c.out.as_ref())
        }
        Command::Trace { common, trace_dir } => {
            let an = analyze(&build_config(&common)?)?;
            write_trace(&an, &trace_dir)?;
            emit(&an.report, common.out.as_ref())
        }
        Command::Monodromy { common, loop_spec } => {
            let lp = parse_loop(loop_spec.as_deref())?;
            let an = analyze_loop(&build_config(&common)?, lp)?;
            emit(&an.report, common.out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("JUNCTIONLAB_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
