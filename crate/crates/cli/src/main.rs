use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use antiflow::scoring::DispersionMode;
use antiflow::synth::{generate, SynthSpec};
use antiflow::{build_graph, parse_edge_list, CentralityVariant, ParseMode, ParseOptions};
use antiflow_cli::artifacts::{verify, write_atomic, write_json, Manifest, MANIFEST};
use antiflow_cli::{Error, PipelineConfig, Result, Stage, Workspace};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "antiflow", version, about = "Rank directed transaction cycles by anti-centrality")]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override values from the config file.
#[derive(Args)]
struct Overrides {
    /// TOML config file; missing keys take their defaults.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    delimiter: Option<char>,
    /// Skip malformed rows instead of failing.
    #[arg(long, global = true)]
    lenient: bool,
    /// Multi-threaded training; results are no longer bit-reproducible.
    #[arg(long, global = true)]
    parallel: bool,
    /// Number of embedding runs.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Random comparison sets per CNS evaluation.
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    percentile: Option<f64>,
    #[arg(long, global = true, value_enum)]
    variant: Option<Variant>,
    #[arg(long, global = true, value_enum)]
    dispersion: Option<Dispersion>,
    /// Recompute stages even when cached outputs are current.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Degree,
    Pagerank,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dispersion {
    SetRelative,
    Anchored,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and clean the input edge list.
    Ingest,
    /// Detect communities.
    Communities,
    /// Enumerate cycles inside communities.
    Cycles,
    /// Enumerate directed paths in communities that hold cycles.
    Paths {
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Train the k embeddings.
    Embed,
    /// Per-community centralities.
    Centrality,
    /// r′ per run and CNS per measure for every cycle.
    Score,
    /// Spread numbers, R and the ranked report.
    Report,
    /// Every stage from ingest to report.
    Run,
    /// Write a synthetic network and its ground truth.
    Synth {
        /// TOML generator spec; defaults apply to missing keys.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value = "edges.csv")]
        edges: PathBuf,
        #[arg(long, default_value = "truth.json")]
        truth: PathBuf,
    },
    /// Check every artifact in the output directory against the manifest.
    Validate,
    /// Node and edge counts of an edge list, as JSON.
    Stats {
        /// Edge list; defaults to the configured input.
        file: Option<PathBuf>,
        /// Apply the cleaning thresholds first.
        #[arg(long)]
        clean: bool,
    },
    /// Print the effective configuration.
    Config,
}

fn load_config(o: &Overrides) -> Result<PipelineConfig> {
    let mut c = match &o.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(x) = &o.input {
        c.input = x.clone();
    }
    if let Some(x) = &o.out {
        c.output = x.clone();
    }
    if let Some(x) = o.seed {
        c.seed = x;
    }
    if let Some(x) = o.threads {
        c.threads = x;
    }
    if let Some(x) = o.delimiter {
        c.delimiter = x;
    }
    if o.lenient {
        c.parse_mode = ParseMode::Lenient;
    }
    if o.parallel {
        c.deterministic = false;
    }
    if let Some(x) = o.k {
        c.scoring.k = x;
    }
    if let Some(x) = o.m {
        c.scoring.m = x;
    }
    if let Some(x) = o.percentile {
        c.scoring.percentile = x;
    }
    if let Some(v) = o.variant {
        c.scoring.variant = match v {
            Variant::Degree => CentralityVariant::Degree,
            Variant::Pagerank => CentralityVariant::PageRank,
        };
    }
    if let Some(d) = o.dispersion {
        c.scoring.dispersion = match d {
            Dispersion::SetRelative => DispersionMode::SetRelative,
            Dispersion::Anchored => DispersionMode::Anchored,
        };
    }
    c.validate()?;
    Ok(c)
}

fn report_status(statuses: &[antiflow_cli::pipeline::StageStatus]) {
    for s in statuses {
        eprintln!("{}: {}", s.stage.name(), if s.cached { "up to date" } else { "done" });
    }
}

fn run_stage(cfg: PipelineConfig, force: bool, stage: Stage) -> Result<()> {
    let mut ws = Workspace::open(cfg, force)?;
    report_status(&[ws.run_stage(stage)?]);
    Ok(())
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn execute(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli.opts)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let force = cli.opts.force;
    let stage = match cli.command {
        Command::Ingest => Stage::Ingest,
        Command::Communities => Stage::Communities,
        Command::Cycles => Stage::Cycles,
        Command::Paths { limit } => {
            if let Some(l) = limit {
                cfg.paths.limit = l;
            }
            Stage::Paths
        }
        Command::Embed => Stage::Embed,
        Command::Centrality => Stage::Centrality,
        Command::Score => Stage::Score,
        Command::Report => Stage::Report,
        Command::Run => {
            let statuses = antiflow_cli::run_pipeline(cfg, force)?;
            report_status(&statuses);
            return Ok(());
        }
        Command::Synth { spec, edges, truth } => return synth(spec, &edges, &truth, cli.opts.seed),
        Command::Validate => return validate(&cfg),
        Command::Stats { file, clean } => return stats(&cfg, file.unwrap_or_else(|| cfg.input.clone()), clean),
        Command::Config => {
            print!("{}", cfg.to_toml());
            return Ok(());
        }
    };
    run_stage(cfg, force, stage)
}

fn synth(spec: Option<PathBuf>, edges: &Path, truth: &Path, seed: Option<u64>) -> Result<()> {
    let mut s = match spec {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| Error::Usage(format!("{}: {e}", p.display())))?;
            toml::from_str::<SynthSpec>(&text).map_err(|e| Error::Usage(format!("{}: {e}", p.display())))?
        }
        None => SynthSpec::default(),
    };
    if let Some(x) = seed {
        s.seed = x;
    }
    let out = generate(&s).map_err(|e| match e {
        antiflow::Error::InvalidParam(m) => Error::Usage(m),
        e => Error::Data { stage: "synth", source: e },
    })?;
    write_atomic(edges, |w| {
        antiflow::graph::write_edge_list(&out.edges, w, b',').map_err(|e| Error::Data { stage: "synth", source: e })
    })?;
    write_json(truth, &out.truth)?;
    print_json(&json!({"nodes": out.graph.node_count(), "edges": out.graph.edge_count(), "planted": out.truth.planted.len()}));
    Ok(())
}

fn validate(cfg: &PipelineConfig) -> Result<()> {
    let dir = &cfg.output;
    if !dir.join(MANIFEST).is_file() {
        return Err(Error::artifact(dir.join(MANIFEST), "no manifest; nothing to validate"));
    }
    let manifest = Manifest::load(dir)?;
    let findings = verify(dir, &manifest);
    let ok = findings.is_empty();
    print_json(&json!({"ok": ok, "stages": manifest.stages.len(), "findings": findings}));
    if ok {
        Ok(())
    } else {
        Err(Error::artifact(dir.join(MANIFEST), format!("{} artifact problem(s)", findings.len())))
    }
}

fn stats(cfg: &PipelineConfig, file: PathBuf, clean: bool) -> Result<()> {
    let f = File::open(&file).map_err(|e| Error::artifact(&file, e))?;
    let opts = ParseOptions {
        delimiter: cfg.delimiter as u8,
        mode: cfg.parse_mode,
    };
    let stage = "stats";
    let parsed = parse_edge_list(BufReader::new(f), opts).map_err(|e| Error::Data { stage, source: e })?;
    let before = parsed.edges.len();
    let edges = if clean {
        antiflow::graph::clean_filter_with(parsed.edges, &cfg.clean)
    } else {
        parsed.edges
    };
    let g = build_graph(&edges).map_err(|e| Error::Data { stage, source: e })?;
    let max_in = g.nodes().map(|v| g.in_degree(v)).max().unwrap_or(0);
    let max_out = g.nodes().map(|v| g.out_degree(v)).max().unwrap_or(0);
    print_json(&json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "self_loops": parsed.self_loops,
        "malformed_rows": parsed.diagnostics.len(),
        "removed_by_cleaning": before - edges.len(),
        "max_in_degree": max_in,
        "max_out_degree": max_out,
    }));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            let mut err = BufWriter::new(std::io::stderr());
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
