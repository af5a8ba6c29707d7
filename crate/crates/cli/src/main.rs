use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use sbmm::bounds::predicted_rate_exponent;
use sbmm::format::{fmt_f64, pmf_csv, sparse_pmf_csv, to_json};
use sbmm::{
    count_copies, cp_pmf, lambda_params, run_experiment, tv_bound, BoundOptions, BoundVariant, Error,
    ExperimentConfig, KappaVariant, ObservedMultigraph, PatternGraph, SbmmSpec,
};

#[derive(Parser)]
#[command(name = "sbmm", version, about = "Pattern counts in stochastic block multigraph models")]
struct Cli {
    /// Worker threads for the parallel enumerations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Balancedness profile of a pattern.
    Analyze {
        /// Shortcut (`triangle`, `cycle:4`, ...), inline JSON, or a JSON file.
        pattern: String,
    },
    /// Total-variation bound for a model and pattern.
    Bound {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        variant: BoundVariant,
        /// Replaces the default constant c(lambda) or Poisson factor.
        #[arg(long)]
        c_override: Option<f64>,
        /// Bound on the neglected lambda mass behind the default constant.
        #[arg(long, default_value_t = sbmm::cp::DEFAULT_EPS)]
        eps: f64,
    },
    /// Compound Poisson parameters, followed by the CP pmf as CSV.
    Lambda {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        pattern: String,
        /// Per-slot truncation level.
        #[arg(long, default_value_t = sbmm::cp::DEFAULT_EPS)]
        eps: f64,
        /// Last atom of the pmf (default: where the remaining mass drops below 1e-12).
        #[arg(long)]
        kmax: Option<usize>,
        /// Write the CSV here instead of after the JSON.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Draw one multigraph and write it as an edge list.
    Sample {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count copies of a pattern in an edge-list graph.
    Count {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: String,
    },
    /// Run an exact or Monte Carlo experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for `observed_pmf.csv` and `target_pmf.csv`.
        #[arg(long)]
        csv_dir: Option<PathBuf>,
    },
    /// Balancedness values of trees, cycles, complete graphs and complete graphs
    /// minus an edge for v = 3..6.
    Table1,
}

fn read(path: &Path) -> sbmm::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: &Path, text: &str) -> sbmm::Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_pattern(arg: &str) -> sbmm::Result<PatternGraph> {
    let path = Path::new(arg);
    if !arg.trim_start().starts_with('{') && path.is_file() {
        PatternGraph::parse(&read(path)?)
    } else {
        PatternGraph::parse(arg)
    }
}

fn load_spec(path: &Path) -> sbmm::Result<SbmmSpec> {
    SbmmSpec::from_json(&read(path)?)
}

fn profile_json(pattern: &PatternGraph) -> sbmm::Result<Value> {
    let p = pattern.balancedness_profile()?;
    let v = pattern.vertex_count();
    let kappas = |variant| -> sbmm::Result<Vec<String>> {
        (1..v).map(|i| pattern.kappa(i, variant).map(|k| k.to_string())).collect()
    };
    Ok(json!({
        "pattern": pattern.to_json(),
        "vertices": v,
        "edges": pattern.edge_count(),
        "rho": pattern.rho(),
        "density": p.density.to_string(),
        "pseudo_density": p.pseudo_density.to_string(),
        "alpha": p.alpha.to_string(),
        "gamma": p.gamma.to_string(),
        "alpha_m": p.alpha_m.to_string(),
        "gamma_m": p.gamma_m.to_string(),
        "strictly_balanced": p.strictly_balanced,
        "strictly_pseudo_balanced": p.strictly_pseudo_balanced,
        "kappa": kappas(KappaVariant::Simple)?,
        "kappa_m": kappas(KappaVariant::Multi)?,
    }))
}

fn table1() -> sbmm::Result<String> {
    let mut out = format!("{:<22} {:>2} {:>8} {:>8} {:>6} {:>9}\n", "graph", "v", "d", "alpha", "gamma", "rate");
    for v in 3..=6 {
        let rows = [
            ("tree (path)", PatternGraph::path(v)?),
            ("cycle", PatternGraph::cycle(v)?),
            ("complete minus edge", PatternGraph::complete_minus_edge(v)?),
            ("complete", PatternGraph::complete(v)?),
        ];
        for (name, g) in rows {
            let p = g.balancedness_profile()?;
            let rate = predicted_rate_exponent(&p, BoundVariant::RegimeCorpn)
                .map_or_else(|| "-".to_string(), |r| format!("n^{r:.4}"));
            out.push_str(&format!(
                "{name:<22} {v:>2} {:>8} {:>8} {:>6} {rate:>9}\n",
                p.density.to_string(),
                p.alpha.to_string(),
                p.gamma.to_string()
            ));
        }
    }
    Ok(out)
}

/// Smallest `k >= imax` whose cumulative CP mass reaches `1 - 1e-12`.
fn default_kmax(params: &sbmm::CompoundPoissonParams) -> usize {
    let mut kmax = params.imax.max(16);
    loop {
        let mass: f64 = cp_pmf(params, kmax).iter().sum();
        if mass >= 1.0 - 1e-12 || kmax >= 1 << 20 {
            return kmax;
        }
        kmax *= 2;
    }
}

fn run(cli: Cli) -> sbmm::Result<String> {
    match cli.command {
        Command::Analyze { pattern } => to_json(&profile_json(&load_pattern(&pattern)?)?),
        Command::Bound { spec, pattern, variant, c_override, eps } => {
            let opts = BoundOptions { c_override, eps, ..Default::default() };
            to_json(&tv_bound(&load_spec(&spec)?, &load_pattern(&pattern)?, variant, &opts)?)
        }
        Command::Lambda { spec, pattern, eps, kmax, csv } => {
            let params = lambda_params(&load_spec(&spec)?, &load_pattern(&pattern)?, eps)?;
            let kmax = kmax.unwrap_or_else(|| default_kmax(&params));
            let table = pmf_csv(&cp_pmf(&params, kmax));
            let text = to_json(&params)?;
            match csv {
                Some(path) => {
                    write(&path, &table)?;
                    Ok(text)
                }
                None => Ok(format!("{text}\n\n{}", table.trim_end())),
            }
        }
        Command::Sample { spec, seed, out } => {
            let g = load_spec(&spec)?.sample(seed);
            match out {
                Some(path) => {
                    write(&path, &g.to_edge_list())?;
                    Ok(format!("wrote {} edges to {}", g.edge_total(), path.display()))
                }
                None => Ok(g.to_edge_list().trim_end().to_string()),
            }
        }
        Command::Count { graph, pattern } => {
            let g = ObservedMultigraph::parse_edge_list(&read(&graph)?)?;
            Ok(count_copies(&g, &load_pattern(&pattern)?)?.to_string())
        }
        Command::Experiment { config, out, csv_dir } => {
            let cfg: ExperimentConfig = serde_json::from_str(&read(&config)?)?;
            let report = run_experiment(&cfg)?;
            if let Some(dir) = csv_dir {
                fs::create_dir_all(&dir)?;
                write(&dir.join("observed_pmf.csv"), &sparse_pmf_csv(&report.observed_pmf))?;
                write(&dir.join("target_pmf.csv"), &pmf_csv(&report.target_pmf))?;
            }
            let text = to_json(&report)?;
            match out {
                Some(path) => {
                    write(&path, &text)?;
                    Ok(format!(
                        "d_TV {} bound {} pass {}",
                        fmt_f64(report.tv_distance),
                        fmt_f64(report.bound.value),
                        report.pass
                    ))
                }
                None => Ok(text),
            }
        }
        Command::Table1 => Ok(table1()?.trim_end().to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(text) => match writeln!(std::io::stdout().lock(), "{text}") {
            // a closed downstream pipe (`| head`) is not a failure
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
            _ => ExitCode::SUCCESS,
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_precondition() { 2 } else { 1 })
        }
    }
}
