use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pmuplace::caseio::{load_case, PowerCase};
use pmuplace::eadj::to_dot;
use pmuplace::harness::{self, CaseSource, FigureKind, PipelineOptions};
use pmuplace::netmat::{self, matrix_csv, VoltageProfile};
use pmuplace::placement::{solve_placement, SolveStatus};
use pmuplace::resistance::{check_metric, electrical_distance};
use pmuplace::{bundled, Error};

#[derive(Parser)]
#[command(
    name = "pmuplace",
    version,
    about = "Electrical-structure PMU placement for MATPOWER cases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Case file inspection
    Caseio {
        #[command(subcommand)]
        cmd: CaseioCmd,
    },
    /// Admittance matrix and power-angle Jacobian
    Netmat {
        #[command(subcommand)]
        cmd: NetmatCmd,
    },
    /// Resistance-distance matrix, or `resistance check <case>` for the metric report
    #[command(args_conflicts_with_subcommands = true)]
    Resistance {
        #[command(subcommand)]
        cmd: Option<ResistanceCmd>,
        #[command(flatten)]
        args: ResistanceArgs,
    },
    /// Electrical adjacency from the smallest resistance distances
    Eadj {
        case: String,
        #[command(flatten)]
        pipe: PipeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Minimum PMU placement
    Place {
        case: String,
        #[arg(long, value_enum, default_value = "topo")]
        structure: Structure,
        #[command(flatten)]
        pipe: PipeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// λ vector, components and component-rule placement; `structural compare <case>` checks it against exact search
    #[command(args_conflicts_with_subcommands = true)]
    Structural {
        #[command(subcommand)]
        cmd: Option<StructuralCmd>,
        #[command(flatten)]
        args: StructuralArgs,
    },
    /// Topological vs electrical minimum PMU counts for several cases
    Table {
        /// Case files or bundled case names; defaults to all bundled cases
        cases: Vec<String>,
        /// Also run every case39*.m / case162*.m found in this directory
        #[arg(long)]
        case_dir: Option<PathBuf>,
        /// Print the comparison with published counts to stderr
        #[arg(long)]
        diff: bool,
        /// Include wall-clock times (makes output non-reproducible)
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        pipe: PipeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Figure data: λ CSV or graph DOT
    Export {
        case: String,
        #[arg(long)]
        which: String,
        #[command(flatten)]
        pipe: PipeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CaseioCmd {
    /// Parsed case as JSON
    Dump {
        case: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum NetmatCmd {
    Ybus {
        case: String,
        #[command(flatten)]
        out: OutArgs,
    },
    Jacobian {
        case: String,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum ResistanceCmd {
    Check {
        case: String,
        #[command(flatten)]
        pipe: PipeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ResistanceArgs {
    case: Option<String>,
    #[command(flatten)]
    pipe: PipeArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Subcommand)]
enum StructuralCmd {
    Compare {
        case: String,
        #[command(flatten)]
        pipe: PipeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct StructuralArgs {
    case: Option<String>,
    #[command(flatten)]
    pipe: PipeArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PipeArgs {
    /// External label of the ground bus (default: slack bus)
    #[arg(long)]
    ground: Option<i64>,
    /// Electrical edge count (default: number of in-service branches)
    #[arg(long)]
    edges: Option<usize>,
    /// Solver time budget in seconds
    #[arg(long, default_value_t = 600.0)]
    budget: f64,
    /// JSON voltage profile {"v_mag": [...], "v_ang_deg": [...]} (default: flat start)
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Structure {
    Topo,
    Elec,
}

/// Exit status 2: a solver stopped at its budget without proving optimality.
struct Unproven(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Unproven(msg))) => {
            eprintln!("warning: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn resolve_case(arg: &str) -> pmuplace::Result<PowerCase> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(case) = bundled::load(arg) {
            return case;
        }
    }
    load_case(path)
}

fn source_for(arg: &str) -> CaseSource {
    if !Path::new(arg).exists() && bundled::text(arg).is_some() {
        CaseSource::Bundled(arg.to_string())
    } else {
        CaseSource::File(PathBuf::from(arg))
    }
}

fn options(pipe: &PipeArgs, case: Option<&PowerCase>) -> pmuplace::Result<PipelineOptions> {
    let profile = match (&pipe.profile, case) {
        (Some(path), Some(case)) => Some(VoltageProfile::from_json(
            &fs::read_to_string(path)?,
            case.bus_count(),
        )?),
        (Some(_), None) => {
            return Err(Error::Validation("--profile needs a single case".into()));
        }
        (None, _) => None,
    };
    if pipe.budget.is_nan() || pipe.budget < 0.0 {
        return Err(Error::Validation(format!("invalid budget {}", pipe.budget)));
    }
    Ok(PipelineOptions {
        profile,
        ground: pipe.ground,
        edges: pipe.edges,
        budget: Duration::from_secs_f64(pipe.budget),
    })
}

fn emit(out: Option<&Path>, text: &str) -> pmuplace::Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> pmuplace::Result<Option<Unproven>> {
    match cli.command {
        Command::Caseio {
            cmd: CaseioCmd::Dump { case, out },
        } => {
            let case = resolve_case(&case)?;
            warn_all(&harness::pipeline_warnings(&case, None));
            emit(out.as_deref(), &(case.to_json()? + "\n"))?;
        }
        Command::Netmat { cmd } => match cmd {
            NetmatCmd::Ybus { case, out } => {
                let case = resolve_case(&case)?;
                let y = netmat::build_ybus(&case)?;
                let text = match out.format.unwrap_or(Format::Json) {
                    Format::Json => y.to_json(&case)? + "\n",
                    Format::Csv => y.to_csv(&case),
                    Format::Dot => {
                        return Err(Error::Validation("ybus supports json or csv".into()))
                    }
                };
                emit(out.out.as_deref(), &text)?;
            }
            NetmatCmd::Jacobian { case, profile, out } => {
                let case = resolve_case(&case)?;
                let profile = match profile {
                    Some(p) => {
                        VoltageProfile::from_json(&fs::read_to_string(p)?, case.bus_count())?
                    }
                    None => netmat::flat_profile(&case),
                };
                if out.format.is_some_and(|f| f != Format::Csv) {
                    return Err(Error::Validation("jacobian supports csv only".into()));
                }
                let h = netmat::power_angle_jacobian(&case, &profile)?;
                emit(out.out.as_deref(), &h.to_csv(&case))?;
            }
        },
        Command::Resistance { cmd, args } => match (cmd, args) {
            (Some(ResistanceCmd::Check { case, pipe, out }), _) => {
                let case = resolve_case(&case)?;
                let opts = options(&pipe, Some(&case))?;
                let profile = opts
                    .profile
                    .clone()
                    .unwrap_or_else(|| netmat::flat_profile(&case));
                let d = electrical_distance(&case, &profile, opts.ground_index(&case)?)?;
                let report = check_metric(&d.distances);
                emit(
                    out.as_deref(),
                    &(serde_json::to_string_pretty(&report)? + "\n"),
                )?;
            }
            (
                None,
                ResistanceArgs {
                    case: Some(case),
                    pipe,
                    out,
                },
            ) => {
                let case = resolve_case(&case)?;
                let opts = options(&pipe, Some(&case))?;
                if out.format.is_some_and(|f| f != Format::Csv) {
                    return Err(Error::Validation("resistance supports csv only".into()));
                }
                let profile = opts
                    .profile
                    .clone()
                    .unwrap_or_else(|| netmat::flat_profile(&case));
                let d = electrical_distance(&case, &profile, opts.ground_index(&case)?)?;
                emit(
                    out.out.as_deref(),
                    &matrix_csv(d.distances.entries(), &case),
                )?;
            }
            (None, ResistanceArgs { case: None, .. }) => {
                return Err(Error::Validation("resistance needs a case".into()))
            }
        },
        Command::Eadj { case, pipe, out } => {
            let case = resolve_case(&case)?;
            let opts = options(&pipe, Some(&case))?;
            let elec = harness::electrical_structure(&case, &opts)?;
            warn_all(&harness::pipeline_warnings(&case, Some(&elec)));
            let adj = elec.adjacency();
            let text = match out.format.unwrap_or(Format::Csv) {
                Format::Dot => to_dot(adj, &labels(&case), case.name()),
                Format::Csv => adjacency_csv(&case, &adj.to_dense()),
                Format::Json => {
                    let v = serde_json::json!({
                        "case": case.name(),
                        "bus_ids": labels(&case),
                        "edge_count": adj.edge_count(),
                        "tau": finite_or_null(elec.threshold.tau),
                        "ties_broken": elec.threshold.ties_broken,
                        "edges": adj.edges().iter().map(|&(i, j)| [case.bus_label(i), case.bus_label(j)]).collect::<Vec<_>>(),
                    });
                    serde_json::to_string_pretty(&v)? + "\n"
                }
            };
            emit(out.out.as_deref(), &text)?;
        }
        Command::Place {
            case,
            structure,
            pipe,
            out,
        } => {
            let case = resolve_case(&case)?;
            let opts = options(&pipe, Some(&case))?;
            let adj = match structure {
                Structure::Topo => netmat::topological_adjacency(&case),
                Structure::Elec => {
                    let elec = harness::electrical_structure(&case, &opts)?;
                    warn_all(&harness::pipeline_warnings(&case, Some(&elec)));
                    elec.threshold.adjacency
                }
            };
            if out.format.is_some_and(|f| f != Format::Json) {
                return Err(Error::Validation("place supports json only".into()));
            }
            let r = solve_placement(&adj, opts.budget);
            let v = serde_json::json!({
                "case": case.name(),
                "structure": match structure { Structure::Topo => "topological", Structure::Elec => "electrical" },
                "result": r,
                "site_bus_ids": r.sites().iter().map(|&i| case.bus_label(i)).collect::<Vec<_>>(),
            });
            emit(
                out.out.as_deref(),
                &(serde_json::to_string_pretty(&v)? + "\n"),
            )?;
            if r.status != SolveStatus::Optimal {
                return Ok(Some(Unproven(format!(
                    "budget expired: {} PMUs found, lower bound {}",
                    r.count, r.lower_bound
                ))));
            }
        }
        Command::Structural { cmd, args } => match (cmd, args) {
            (Some(StructuralCmd::Compare { case, pipe, out }), _) => {
                let case = resolve_case(&case)?;
                let opts = options(&pipe, Some(&case))?;
                let c = harness::structural_compare(&case, &opts)?;
                let verdict = format!(
                    "{}: {} ({})\n",
                    case.name(),
                    if c.agree {
                        "consistent"
                    } else {
                        "INCONSISTENT"
                    },
                    c.detail
                );
                emit(out.as_deref(), &verdict)?;
                if c.ilp_status != SolveStatus::Optimal {
                    return Ok(Some(Unproven(
                        "exact search did not prove optimality".into(),
                    )));
                }
            }
            (
                None,
                StructuralArgs {
                    case: Some(case),
                    pipe,
                    out,
                },
            ) => {
                let case = resolve_case(&case)?;
                let opts = options(&pipe, Some(&case))?;
                let report = harness::structural_report(&case, &opts)?;
                emit(
                    out.as_deref(),
                    &(serde_json::to_string_pretty(&report)? + "\n"),
                )?;
            }
            (None, StructuralArgs { case: None, .. }) => {
                return Err(Error::Validation("structural needs a case".into()))
            }
        },
        Command::Table {
            cases,
            case_dir,
            diff,
            timings,
            pipe,
            out,
        } => {
            let mut sources: Vec<CaseSource> = if cases.is_empty() {
                bundled::NAMES
                    .iter()
                    .map(|n| CaseSource::Bundled(n.to_string()))
                    .collect()
            } else {
                cases.iter().map(|c| source_for(c)).collect()
            };
            if let Some(dir) = case_dir {
                sources.extend(extra_cases(&dir)?);
            }
            let opts = options(&pipe, None)?;
            let entries = harness::run_table(&sources, &opts);
            let text = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => harness::render_table_csv(&entries, timings),
                Format::Json => harness::render_table_json(&entries)? + "\n",
                Format::Dot => return Err(Error::Validation("table supports csv or json".into())),
            };
            emit(out.out.as_deref(), &text)?;
            if diff {
                eprint!("{}", harness::render_table_diff(&entries));
            }
            let mut failed = false;
            let mut unproven = false;
            for e in &entries {
                match &e.outcome {
                    harness::RowOutcome::Row(r) => unproven |= !r.all_optimal(),
                    harness::RowOutcome::Failed { error } => {
                        eprintln!("error: {}: {error}", e.case_name);
                        failed = true;
                    }
                }
            }
            if failed {
                return Err(Error::Validation("one or more cases failed".into()));
            }
            if unproven {
                return Ok(Some(Unproven("some counts are not proven optimal".into())));
            }
        }
        Command::Export {
            case,
            which,
            pipe,
            out,
        } => {
            let case = resolve_case(&case)?;
            let opts = options(&pipe, Some(&case))?;
            let kind: FigureKind = which.parse()?;
            let text = harness::export_figure_data(&case, kind, &opts)?;
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(None)
}

fn labels(case: &PowerCase) -> Vec<i64> {
    case.buses().iter().map(|b| b.id).collect()
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn adjacency_csv(case: &PowerCase, dense: &[Vec<u8>]) -> String {
    let mut out = String::from("bus");
    for id in labels(case) {
        out.push_str(&format!(",{id}"));
    }
    out.push('\n');
    for (i, row) in dense.iter().enumerate() {
        out.push_str(&case.bus_label(i).to_string());
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// User-supplied 39- and 162-bus cases, sorted by file name.
fn extra_cases(dir: &Path) -> pmuplace::Result<Vec<CaseSource>> {
    let mut found: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|e| e == "m")
                && p.file_stem()
                    .and_then(|s| s.to_str())
                    .is_some_and(|s| s.starts_with("case39") || s.starts_with("case162"))
        })
        .collect();
    found.sort();
    Ok(found.into_iter().map(CaseSource::File).collect())
}
