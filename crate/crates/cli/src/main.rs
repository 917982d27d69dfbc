use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use finegame::descriptor::{GameDescriptor, StateDescriptor};
use finegame::equilibrium::{grid_ne_search, product_state_interior_solve, verify_ne_factorizable};
use finegame::fine::{bell_slacks, reconstruct_unchecked, xi_bounds, XiRule};
use finegame::games::StrategyTriple;
use finegame::measurement::{
    convert_marginals, extract_marginals, weights_from_marginals, MarginalConvention, MarginalSet,
};
use finegame::render::{key_value_markdown, to_json_string};
use finegame::scenarios::{reports_markdown, run_all, run_scenario, SCENARIO_IDS};
use finegame::{tol, Error};

#[derive(Parser)]
#[command(
    name = "finegame",
    version,
    about = "Marginal-based analysis of three-player quantum games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Equilibrium tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Lattice points per axis for grid searches.
    #[arg(long, global = true)]
    resolution: Option<usize>,

    /// Seed for randomized samples.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    Parity,
    Conjunction,
}

impl From<Convention> for MarginalConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Parity => MarginalConvention::Parity,
            Convention::Conjunction => MarginalConvention::Conjunction,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum XiChoice {
    Given,
    Mid,
    Lower,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NeMode {
    Verify,
    Grid,
    Interior,
}

#[derive(Subcommand)]
enum Command {
    /// Run a registered case study.
    Scenario {
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        id: Option<String>,
        /// Every registered scenario.
        #[arg(long)]
        all: bool,
        /// Run scenarios concurrently (with --all).
        #[arg(long, requires = "all")]
        parallel: bool,
        /// JSON object of scenario parameters, or @path to read it from a file.
        #[arg(long)]
        params: Option<String>,
    },
    /// Seven marginals of a state from POVM traces.
    Marginals {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = Convention::Parity)]
        convention: Convention,
    },
    /// Bell slacks, feasible ξ range and joint reconstruction.
    Fine {
        #[arg(long)]
        marginals: PathBuf,
        #[arg(long, value_enum, default_value_t = XiChoice::Mid)]
        xi: XiChoice,
        /// Treat parity values as if they were conjunction values instead of
        /// converting them.
        #[arg(long)]
        literal: bool,
    },
    /// Equilibrium checks on the factorizable payoffs of a game.
    Ne {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = NeMode::Verify)]
        mode: NeMode,
        /// Strategy triple `λ,μ,ν` for verify mode.
        #[arg(long, value_delimiter = ',')]
        triple: Option<Vec<f64>>,
    },
    /// Basis weights reproducing a set of marginals.
    InvertMarginals {
        #[arg(long)]
        marginals: PathBuf,
    },
}

/// Output document plus whether it reports an infeasible or violated result.
struct Outcome {
    title: String,
    body: Value,
    markdown: Option<String>,
    flagged: bool,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn scenario_params(cli: &Cli, raw: Option<&str>) -> Result<Value, String> {
    let mut params = match raw {
        None => Value::Object(Map::new()),
        Some(s) => {
            let text = match s.strip_prefix('@') {
                Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?,
                None => s.to_string(),
            };
            serde_json::from_str(&text).map_err(|e| format!("--params: {e}"))?
        }
    };
    let Value::Object(map) = &mut params else {
        return Err("--params must be a JSON object".into());
    };
    if let Some(t) = cli.tol {
        map.insert("tol".into(), json!(t));
    }
    if let Some(r) = cli.resolution {
        map.insert("resolution".into(), json!(r));
    }
    if let Some(s) = cli.seed {
        map.insert("seed".into(), json!(s));
    }
    Ok(params)
}

fn fail(e: Error) -> String {
    e.to_string()
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Command::Scenario {
            id,
            all,
            parallel,
            params,
        } => {
            let params = scenario_params(cli, params.as_deref())?;
            if *all {
                let reports = run_all(&params, *parallel).map_err(fail)?;
                Ok(Outcome {
                    title: "scenarios".into(),
                    markdown: Some(reports_markdown(&reports)),
                    body: to_value(&reports),
                    flagged: false,
                })
            } else {
                let id = id.as_deref().expect("clap enforces --id or --all");
                if !SCENARIO_IDS.contains(&id) {
                    return Err(format!(
                        "unknown scenario `{id}`; expected one of {}",
                        SCENARIO_IDS.join(", ")
                    ));
                }
                let report = run_scenario(id, &params).map_err(fail)?;
                Ok(Outcome {
                    title: id.to_string(),
                    markdown: Some(report.to_markdown()),
                    body: to_value(&report),
                    flagged: false,
                })
            }
        }
        Command::Marginals { state, convention } => {
            let d: StateDescriptor = read_json(state)?;
            let rho = d.density().map_err(fail)?;
            let m = extract_marginals(&rho, (*convention).into()).map_err(fail)?;
            Ok(Outcome {
                title: "marginals".into(),
                body: to_value(&m),
                markdown: None,
                flagged: false,
            })
        }
        Command::Fine { marginals, xi, literal } => {
            let m: MarginalSet = read_json(marginals)?;
            let evaluated = match (m.convention(), literal) {
                (MarginalConvention::Conjunction, _) => m,
                (MarginalConvention::Parity, true) => m.reinterpreted_as(MarginalConvention::Conjunction),
                (MarginalConvention::Parity, false) => {
                    convert_marginals(&m, MarginalConvention::Conjunction).map_err(fail)?
                }
            };
            let rule = match xi {
                XiChoice::Given => XiRule::UseGivenXi,
                XiChoice::Mid => XiRule::Midpoint,
                XiChoice::Lower => XiRule::Lower,
            };
            let bell = bell_slacks(&evaluated);
            let interval = xi_bounds(&evaluated);
            let mut body = Map::new();
            body.insert("input".into(), to_value(&m));
            body.insert("evaluated".into(), to_value(&evaluated));
            body.insert("bell_report".into(), to_value(&bell));
            body.insert(
                "xi_interval".into(),
                json!({"lower": interval.lower, "upper": interval.upper, "empty": interval.is_empty()}),
            );
            let joint_ok = match reconstruct_unchecked(&evaluated, rule) {
                Ok(j) => {
                    body.insert("joint".into(), to_value(j.prob()));
                    true
                }
                Err(Error::NoJoint(nj)) => {
                    body.insert("no_joint".into(), to_value(&*nj));
                    false
                }
                Err(e) => return Err(e.to_string()),
            };
            Ok(Outcome {
                title: "fine".into(),
                body: Value::Object(body),
                markdown: None,
                flagged: !bell.satisfied || !joint_ok,
            })
        }
        Command::Ne { game, mode, triple } => {
            let d: GameDescriptor = read_json(game)?;
            let table = d.table().map_err(fail)?;
            let ne_tol = cli.tol.unwrap_or(tol::NE);
            if !(ne_tol.is_finite() && ne_tol >= 0.0) {
                return Err("--tol must be a non-negative number".into());
            }
            match mode {
                NeMode::Verify => {
                    let t = triple.as_ref().ok_or("--triple is required in verify mode")?;
                    if t.len() != 3 {
                        return Err(format!("--triple needs three values, got {}", t.len()));
                    }
                    let s = StrategyTriple::new(t[0], t[1], t[2]).map_err(fail)?;
                    let cert = verify_ne_factorizable(&table, &s, ne_tol);
                    Ok(Outcome {
                        title: "ne verify".into(),
                        flagged: !cert.is_ne,
                        body: to_value(&cert),
                        markdown: None,
                    })
                }
                NeMode::Grid => {
                    let found = grid_ne_search(&table, cli.resolution.unwrap_or(11), ne_tol).map_err(fail)?;
                    Ok(Outcome {
                        title: "ne grid".into(),
                        flagged: found.is_empty(),
                        body: to_value(&found),
                        markdown: None,
                    })
                }
                NeMode::Interior => {
                    let sol = product_state_interior_solve(&table).map_err(fail)?;
                    Ok(Outcome {
                        title: "ne interior".into(),
                        flagged: sol.triple.is_none(),
                        body: to_value(&sol),
                        markdown: None,
                    })
                }
            }
        }
        Command::InvertMarginals { marginals } => {
            let m: MarginalSet = read_json(marginals)?;
            let parity = convert_marginals(&m, MarginalConvention::Parity).map_err(fail)?;
            let inv = weights_from_marginals(&parity).map_err(fail)?;
            Ok(Outcome {
                title: "invert-marginals".into(),
                flagged: !inv.is_feasible(),
                body: to_value(&inv),
                markdown: None,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.format {
        Format::Json => to_json_string(&outcome.body),
        Format::Md => match outcome.markdown {
            Some(md) => Ok(md),
            None => key_value_markdown(&outcome.title, &outcome.body),
        },
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.flagged {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
