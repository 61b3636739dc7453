use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ccvms::scenario::{
    emit_report, parse_scenario, run_scenario_with, search_counterexamples, CircleSummary,
    ReportFormat, RunOptions, Scenario,
};
use ccvms::space::{sample_points, verify_axioms};
use ccvms::theorems::ConditionId;

#[derive(Parser)]
#[command(name = "ccvms", version, about = "Fixed-circle checks on C*-algebra valued metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks a scenario file asks for and print a report.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Comparison tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sample size for complement circles, Theorem 8 and pair conditions.
        #[arg(long)]
        samples: Option<usize>,
        /// Grid step for the diagonal scan.
        #[arg(long)]
        grid_step: Option<f64>,
        /// Record wall time in the report (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Solve and print the scenario's circles.
    SolveCircle {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check the metric axioms on a sample of the scenario's space.
    Axioms {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for mappings where one circle condition holds and another fails.
    Search {
        file: PathBuf,
        /// Two condition tags, e.g. 2.2,2.3: the first must hold, the second fail.
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write each hit as a scenario file into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut sc = parse_scenario(&text).map_err(|e| format!("{}:{e}", path.display()))?;
    if sc.id.is_none() {
        sc.id = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Ok(sc)
}

fn run(cli: Cli) -> Result<u8, String> {
    let mut stdout = std::io::stdout().lock();
    let mut out = |bytes: &[u8]| stdout.write_all(bytes).map_err(|e| e.to_string());
    match cli.command {
        Command::Check {
            file,
            format,
            tol,
            seed,
            samples,
            grid_step,
            timing,
        } => {
            let mut sc = load(&file)?;
            if let Some(t) = tol {
                sc.set_tolerance(t);
            }
            let check = sc.check_mut();
            if let Some(s) = seed {
                check.seed = s;
            }
            if let Some(n) = samples {
                check.sample_size = n;
            }
            if let Some(g) = grid_step {
                check.grid_step = g;
            }
            let report = run_scenario_with(&sc, RunOptions { timing });
            out(&emit_report(&report, format.into()))?;
            if !report.consistency {
                if let Some(dump) = &report.conclusion.error {
                    eprintln!("consistency violation:\n{dump}");
                }
            }
            Ok(report.exit_code() as u8)
        }
        Command::SolveCircle { file, format } => {
            let sc = load(&file)?;
            let p = sc.prepare().map_err(|e| e.to_string())?;
            let circles: Vec<CircleSummary> = p.circles.iter().map(CircleSummary::new).collect();
            let text = match format {
                Format::Json => {
                    let doc = serde_json::json!({ "scenario": sc.id_or(""), "circles": circles });
                    serde_json::to_string_pretty(&doc).expect("json") + "\n"
                }
                Format::Text => circles
                    .iter()
                    .map(|c| format!("C({}, {}) = {}\n", c.center, c.radius, c.set_notation()))
                    .collect(),
            };
            out(text.as_bytes())?;
            Ok(0)
        }
        Command::Axioms {
            file,
            samples,
            seed,
        } => {
            let sc = load(&file)?;
            let p = sc.prepare().map_err(|e| e.to_string())?;
            let sample = sample_points(&p.space, seed, samples, &[]).map_err(|e| e.to_string())?;
            let report = verify_axioms(&p.space, &sample);
            let mut text = String::new();
            for r in &report.results {
                text.push_str(&format!(
                    "{} {} ({} checked)",
                    r.axiom,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.checked
                ));
                if let Some(w) = &r.witness {
                    let pts: Vec<String> = w.iter().map(|p| p.to_string()).collect();
                    text.push_str(&format!(" witness {}", pts.join(", ")));
                }
                text.push('\n');
            }
            out(text.as_bytes())?;
            Ok(0)
        }
        Command::Search {
            file,
            pair,
            budget,
            seed,
            out: dir,
        } => {
            let sc = load(&file)?;
            let ids: Vec<ConditionId> = pair
                .split(',')
                .map(|s| s.parse::<ConditionId>())
                .collect::<Result<_, _>>()?;
            if ids.len() != 2 {
                return Err(format!("--pair takes two condition tags, got `{pair}`"));
            }
            let hits = search_counterexamples(&sc, (ids[0], ids[1]), budget, seed)
                .map_err(|e| e.to_string())?;
            let mut text = format!(
                "{} hit(s) with {} holding and {} failing\n",
                hits.len(),
                ids[0],
                ids[1]
            );
            for (k, h) in hits.iter().enumerate() {
                text.push_str(&format!(
                    "hit {}: trial {} score {}\n  {}\n",
                    k + 1,
                    h.trial,
                    h.score,
                    h.summary
                ));
                if let Some(dir) = &dir {
                    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
                    let mut hit = h.scenario.clone();
                    hit.id = Some(format!("{}_hit{}", sc.id_or("scenario"), k + 1));
                    let path = dir.join(format!("{}.scn", hit.id.as_deref().unwrap()));
                    std::fs::write(&path, hit.to_text()).map_err(|e| e.to_string())?;
                }
            }
            out(text.as_bytes())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
