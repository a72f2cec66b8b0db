//! `pcsp`: command-line front end.
//!
//! Exit codes: 0 when the command found what it looked for, 1 when it found
//! nothing, 2 on usage or input errors.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use pcsp_core::blp::round_search_detailed;
use pcsp_core::choice::{check_condition, Variant};
use pcsp_core::label_cover::{
    layerize, measure_smoothness, minor_condition_trivial, random_bipartite, to_minor_condition,
    LayeredLC,
};
use pcsp_core::minion::{
    build_layered_refutation, build_multichoice_refutation, heavy_coordinate_bound, st_membership,
    symmetric_minor_search, StMethod, DEFAULT_SEARCH_CAP,
};
use pcsp_core::rational::{format_rational, parse_rational};
use pcsp_core::threshold::{canonical_presentation, compute_preorder, find_fixing_pairs};
use pcsp_core::{
    BipartiteLC, BooleanFunction, BooleanRelation, BooleanStructure, ChainMember, ChoiceFunction,
    Error, Instance, LtfPresentation, MinorChain, MinorCondition,
};

use crate::io::{load, CliError};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser)]
#[command(
    name = "pcsp",
    version,
    about = "Promise-CSP toolkit for Boolean threshold minions"
)]
struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FunctionInput {
    /// Threshold presentation file.
    #[arg(long)]
    ltf: Option<PathBuf>,
    /// Truth-table file.
    #[arg(long)]
    function: Option<PathBuf>,
}

impl FunctionInput {
    fn table(&self) -> Result<BooleanFunction, CliError> {
        match (&self.ltf, &self.function) {
            (Some(p), _) => Ok(load::<LtfPresentation>(p)?.truth_table()?),
            (_, Some(p)) => load(p),
            _ => unreachable!("clap enforces one input"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Recursive,
    Template,
    Bruteforce,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefuteVariant {
    Multiple,
    Layered,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Single,
    Multiple,
    Layered,
    InjectiveLayered,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership in ST.
    StMember {
        #[command(flatten)]
        input: FunctionInput,
        #[arg(long, value_enum, default_value = "recursive")]
        method: MethodArg,
    },
    /// Search for a symmetric minor and test the heavy-coordinate bound.
    WpCheck {
        #[arg(long)]
        ltf: PathBuf,
        /// Arity of the symmetric minor to look for.
        #[arg(long, default_value_t = 5)]
        arity: usize,
        #[arg(long, default_value = "1/80")]
        bound: String,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u128,
    },
    /// Canonical presentation of a threshold function.
    Canonical {
        #[arg(long)]
        ltf: PathBuf,
    },
    /// Coordinate preorder, its classes and monotonicity.
    Preorder {
        #[command(flatten)]
        input: FunctionInput,
    },
    /// All fixing pairs, in lexicographic order.
    FixingPairs {
        #[command(flatten)]
        input: FunctionInput,
    },
    /// Build a refutation of a choice condition.
    RefuteChoice {
        #[arg(long)]
        choice: PathBuf,
        #[arg(long)]
        bound: usize,
        #[arg(long, value_enum)]
        variant: RefuteVariant,
    },
    /// Evaluate a choice condition on explicit chains.
    CheckCondition {
        /// A JSON array of chains.
        #[arg(long)]
        chains: PathBuf,
        #[arg(long)]
        choice: PathBuf,
        #[arg(long)]
        bound: usize,
        #[arg(long, value_enum)]
        variant: VariantArg,
    },
    /// Label cover tools.
    Lc {
        #[command(subcommand)]
        command: LcCommand,
    },
    /// Search for a homomorphism by rounding the LP relaxation.
    Solve {
        /// `{"a": structure, "b": structure}`.
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Close a relation under a list of functions.
    CloseRelation {
        #[arg(long)]
        relation: PathBuf,
        /// A JSON array of truth tables or threshold presentations.
        #[arg(long)]
        functions: PathBuf,
    },
}

#[derive(Subcommand)]
enum LcCommand {
    /// Exact smoothness of a bipartite instance.
    Smooth {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_set_size: usize,
    },
    /// Layered instance built from a bipartite one.
    Layerize {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        layers: usize,
    },
    /// Minor condition of a layered instance.
    McGen {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Look for a projection solution of a minor condition.
    McTrivial {
        #[arg(long)]
        condition: PathBuf,
    },
    /// Random biregular bipartite instance, seeded by `--seed`.
    Random {
        #[arg(long)]
        y: usize,
        #[arg(long)]
        z: usize,
        #[arg(long)]
        dy: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        r: usize,
        /// Plant a satisfying assignment.
        #[arg(long)]
        planted: bool,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplatePair {
    a: BooleanStructure,
    b: BooleanStructure,
}

#[derive(Serialize)]
struct Outcome {
    found: bool,
    value: serde_json::Value,
}

fn found(value: impl Serialize) -> Result<Outcome, CliError> {
    Ok(Outcome {
        found: true,
        value: serde_json::to_value(value).map_err(|e| CliError::Input(e.to_string()))?,
    })
}

fn none(value: impl Serialize) -> Result<Outcome, CliError> {
    Ok(Outcome {
        found: false,
        value: serde_json::to_value(value).map_err(|e| CliError::Input(e.to_string()))?,
    })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::StMember { input, method } => {
            let f = input.table()?;
            let method = match method {
                MethodArg::Recursive => StMethod::Recursive,
                MethodArg::Template => StMethod::Template,
                MethodArg::Bruteforce => StMethod::BruteForce,
            };
            match st_membership(&f, method)? {
                Some(w) => {
                    let mut v = json!({ "member": true, "m": w.m });
                    if let Some(rho) = w.rho {
                        v["rho"] = serde_json::to_value(rho).expect("map serializes");
                    }
                    found(v)
                }
                None => none(json!({ "member": false })),
            }
        }
        Command::WpCheck {
            ltf,
            arity,
            bound,
            cap,
        } => {
            let p: LtfPresentation = load(ltf)?;
            let bound = parse_rational(bound)?;
            let hit = symmetric_minor_search(&p, *arity, *cap)?;
            let heavy = heavy_coordinate_bound(&canonical_presentation(&p)?, &bound);
            let v = json!({
                "symmetric_minor": hit,
                "heavy": heavy,
                "bound": format_rational(&bound),
            });
            if hit.is_some() {
                found(v)
            } else {
                none(v)
            }
        }
        Command::Canonical { ltf } => {
            let p: LtfPresentation = load(ltf)?;
            found(canonical_presentation(&p)?)
        }
        Command::Preorder { input } => {
            let f = input.table()?;
            let pre = compute_preorder(&f)?;
            let mono: Vec<_> = (1..=f.arity()).map(|i| pre.monotonicity(i)).collect();
            found(json!({
                "classes": pre.classes(),
                "descending": pre.descending(),
                "monotonicity": mono,
            }))
        }
        Command::FixingPairs { input } => {
            let pairs = find_fixing_pairs(&input.table()?);
            let v = json!({ "pairs": pairs });
            if pairs.is_empty() {
                none(v)
            } else {
                found(v)
            }
        }
        Command::RefuteChoice {
            choice,
            bound,
            variant,
        } => {
            let choice: ChoiceFunction = load(choice)?;
            let built = match variant {
                RefuteVariant::Multiple => {
                    build_multichoice_refutation(&choice, *bound).map(serde_json::to_value)
                }
                RefuteVariant::Layered => {
                    build_layered_refutation(&choice, *bound).map(serde_json::to_value)
                }
            };
            match built {
                Ok(v) => found(v.map_err(|e| CliError::Input(e.to_string()))?),
                Err(Error::Construction(msg)) => none(json!({ "error": msg })),
                Err(e) => Err(e.into()),
            }
        }
        Command::CheckCondition {
            chains,
            choice,
            bound,
            variant,
        } => {
            let chains: Vec<MinorChain> = load(chains)?;
            let choice: ChoiceFunction = load(choice)?;
            let variant = match variant {
                VariantArg::Single => Variant::Single,
                VariantArg::Multiple => Variant::Multiple,
                VariantArg::Layered => Variant::Layered,
                VariantArg::InjectiveLayered => Variant::InjectiveLayered,
            };
            let verdicts = check_condition(&chains, &choice, *bound, variant)?;
            if verdicts.iter().all(|v| v.satisfied) {
                found(verdicts)
            } else {
                none(verdicts)
            }
        }
        Command::Lc { command } => run_lc(command, cli.seed),
        Command::Solve { template, instance } => {
            let t: TemplatePair = load(template)?;
            let inst: Instance = load(instance)?;
            match round_search_detailed(&inst, &t.a, &t.b)? {
                Some(r) => found(r),
                None => none(json!({ "map": null })),
            }
        }
        Command::CloseRelation {
            relation,
            functions,
        } => {
            let r: BooleanRelation = load(relation)?;
            let members: Vec<ChainMember> = load(functions)?;
            let fns = members
                .iter()
                .map(ChainMember::table)
                .collect::<Result<Vec<_>, _>>()?;
            found(r.close(&fns))
        }
    }
}

fn run_lc(command: &LcCommand, seed: u64) -> Result<Outcome, CliError> {
    match command {
        LcCommand::Smooth {
            instance,
            max_set_size,
        } => {
            let g: BipartiteLC = load(instance)?;
            let delta = measure_smoothness(&g, *max_set_size)?;
            found(json!({ "delta": format_rational(&delta), "max_set_size": max_set_size }))
        }
        LcCommand::Layerize { instance, layers } => {
            let g: BipartiteLC = load(instance)?;
            found(layerize(&g, *layers)?)
        }
        LcCommand::McGen { instance } => {
            let p: LayeredLC = load(instance)?;
            found(to_minor_condition(&p))
        }
        LcCommand::McTrivial { condition } => {
            let c: MinorCondition = load(condition)?;
            match minor_condition_trivial(&c)? {
                Some(choice) => found(json!({ "trivial": true, "choice": choice })),
                None => none(json!({ "trivial": false })),
            }
        }
        LcCommand::Random {
            y,
            z,
            dy,
            l,
            r,
            planted,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, sigma) = random_bipartite(&mut rng, *y, *z, *dy, *l, *r, *planted)?;
            found(json!({ "instance": g, "assignment": sigma }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&outcome.value).expect("values serialize") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if outcome.found { 0 } else { 1 })
}
