//! `fdlb`: check, rank, complete and explain fuzzy decision bases.
//!
//! Exit codes: 0 ok, 1 usage or parse error, 2 inconsistent knowledge base,
//! 3 incomplete decision base (`complete`, or `rank --strict-complete`),
//! 4 no derivation for the requested pair.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fdlb::decision::{
    completeness_report, rank_experts, DecisionReport, FuzzyDecisionBase, UtilityBox,
};
use fdlb::par::Execution;
use fdlb::reasoner::{saturate, Entailment, ExplainError, SaturatedKb};
use fdlb::text::{parse_concept, parse_ubox, Diagnostic};
use fdlb::KnowledgeBase;
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 1;
const EXIT_INCONSISTENT: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;
const EXIT_NO_DERIVATION: u8 = 4;

#[derive(Parser)]
#[command(name = "fdlb", version, about = "Fuzzy decision bases: consistency, ranking, completeness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a knowledge base for consistency.
    Check {
        kb: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Rank choices for each expert.
    Rank {
        kb: PathBuf,
        #[command(flatten)]
        eval: Evaluation,
        /// Refuse to rank if any attribute of any choice is undecided.
        #[arg(long)]
        strict_complete: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the (choice, attribute) pairs whose degree cannot be derived.
    Complete {
        kb: PathBuf,
        #[command(flatten)]
        eval: Evaluation,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Show the derivation of an individual's degree in a concept.
    Explain {
        kb: PathBuf,
        #[arg(long)]
        individual: String,
        /// Concept expression, e.g. "Tablet AND EXISTS hasPrice GT 500 EUR".
        #[arg(long)]
        concept: String,
    },
}

#[derive(Args)]
struct Evaluation {
    /// Utility box file; repeat for several experts.
    #[arg(long = "ubox", required = true)]
    uboxes: Vec<PathBuf>,
    #[command(flatten)]
    choices: Choices,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Choices {
    /// Comma-separated choice individuals.
    #[arg(long, value_delimiter = ',')]
    choices: Vec<String>,
    /// Use every individual of the knowledge base as a choice.
    #[arg(long)]
    all_individuals: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

/// A failure that ends the run with the given exit code; the message has
/// already been printed.
struct Exit(u8);

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        Exit(EXIT_USAGE)
    })
}

fn report_diagnostics(path: &Path, diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{}:{d}", path.display());
    }
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Exit> {
    let text = read(path)?;
    match fdlb::text::parse_kb_with_diagnostics(&text) {
        (Some(kb), warnings) => {
            report_diagnostics(path, &warnings);
            Ok(kb)
        }
        (None, diags) => {
            report_diagnostics(path, &diags);
            Err(Exit(EXIT_USAGE))
        }
    }
}

fn load_ubox(path: &Path) -> Result<UtilityBox, Exit> {
    parse_ubox(&read(path)?).map_err(|diags| {
        report_diagnostics(path, &diags);
        Exit(EXIT_USAGE)
    })
}

fn saturated(kb: &KnowledgeBase) -> Result<SaturatedKb, Exit> {
    saturate(kb).map_err(|report| {
        print!("{report}");
        Exit(EXIT_INCONSISTENT)
    })
}

fn choice_list(choices: &Choices, kb: &KnowledgeBase) -> Vec<String> {
    if choices.all_individuals {
        kb.individuals().iter().cloned().collect()
    } else {
        choices.choices.clone()
    }
}

fn evaluate(
    sat: &SaturatedKb,
    eval: &Evaluation,
) -> Result<Vec<(UtilityBox, DecisionReport)>, Exit> {
    let uboxes = eval
        .uboxes
        .iter()
        .map(|p| load_ubox(p))
        .collect::<Result<Vec<_>, _>>()?;
    let choices = choice_list(&eval.choices, sat.kb());
    let reports = rank_experts(Execution::default(), sat, &uboxes, &choices);
    uboxes
        .into_iter()
        .zip(reports)
        .map(|(u, r)| match r {
            Ok(r) => Ok((u, r)),
            Err(e) => {
                eprintln!("{}: {e}", u.expert());
                Err(Exit(EXIT_USAGE))
            }
        })
        .collect()
}

fn degree_json(d: Entailment) -> Value {
    match d {
        Entailment::Decided(n) => json!(n.to_string()),
        Entailment::Undecided => Value::Null,
    }
}

fn pairs_json(pairs: &[(String, String)]) -> Value {
    pairs
        .iter()
        .map(|(c, a)| json!({ "choice": c, "attribute": a }))
        .collect()
}

fn report_json(r: &DecisionReport) -> Value {
    let ranking: Vec<Value> = r
        .ranking
        .iter()
        .map(|c| {
            let contributions: Vec<Value> = c
                .attributes
                .iter()
                .map(|a| {
                    json!({
                        "attribute": a.attribute,
                        "weight": a.weight.to_string(),
                        "degree": degree_json(a.degree),
                        "contribution": a.contribution.to_string(),
                    })
                })
                .collect();
            json!({ "choice": c.choice, "score": c.score.to_string(), "contributions": contributions })
        })
        .collect();
    json!({
        "id": r.expert,
        "ranking": ranking,
        "ideal": r.ideal,
        "undecided": pairs_json(&r.undecided),
    })
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn print_undecided(expert: &str, pairs: &[(String, String)]) {
    if pairs.is_empty() {
        println!("expert {expert}: complete");
        return;
    }
    println!("expert {expert}: incomplete, {} undecided pair(s)", pairs.len());
    for (c, a) in pairs {
        println!("  {c} : {a}");
    }
}

fn check(kb_path: &Path, format: Format) -> Result<(), Exit> {
    let kb = load_kb(kb_path)?;
    let report = fdlb::reasoner::check_consistency(&kb);
    match format {
        Format::Text => print!("{report}"),
        Format::Structured => {
            let conflicts: Vec<Value> = report
                .conflicts
                .iter()
                .map(|c| {
                    json!({
                        "individual": c.individual,
                        "concept": c.concept.to_string(),
                        "lower": c.lower.value.to_string(),
                        "upper": c.upper.value.to_string(),
                    })
                })
                .collect();
            print_json(&json!({
                "kb": kb_path.display().to_string(),
                "consistent": report.is_consistent(),
                "conflicts": conflicts,
            }));
        }
    }
    if report.is_consistent() {
        Ok(())
    } else {
        Err(Exit(EXIT_INCONSISTENT))
    }
}

fn rank(kb_path: &Path, eval: &Evaluation, strict: bool, format: Format) -> Result<(), Exit> {
    let sat = saturated(&load_kb(kb_path)?)?;
    let results = evaluate(&sat, eval)?;
    if strict && results.iter().any(|(_, r)| !r.complete()) {
        eprintln!("decision base is incomplete; not ranking");
        for (u, r) in &results {
            print_undecided(u.expert(), &r.undecided);
        }
        return Err(Exit(EXIT_INCOMPLETE));
    }
    match format {
        Format::Text => {
            for (_, r) in &results {
                print!("{r}");
            }
        }
        Format::Structured => print_json(&json!({
            "kb": kb_path.display().to_string(),
            "consistent": true,
            "experts": results.iter().map(|(_, r)| report_json(r)).collect::<Vec<_>>(),
        })),
    }
    Ok(())
}

fn complete(kb_path: &Path, eval: &Evaluation, format: Format) -> Result<(), Exit> {
    let sat = saturated(&load_kb(kb_path)?)?;
    let choices = choice_list(&eval.choices, sat.kb());
    let mut all = Vec::new();
    for path in &eval.uboxes {
        let u = load_ubox(path)?;
        let pairs = FuzzyDecisionBase::new(&sat, &u, choices.iter().cloned())
            .and_then(|base| completeness_report(&base))
            .map_err(|e| {
                eprintln!("{}: {e}", u.expert());
                Exit(EXIT_USAGE)
            })?;
        all.push((u.expert().to_string(), pairs));
    }
    match format {
        Format::Text => {
            for (expert, pairs) in &all {
                print_undecided(expert, pairs);
            }
        }
        Format::Structured => {
            let experts: Vec<Value> = all
                .iter()
                .map(|(id, pairs)| json!({ "id": id, "complete": pairs.is_empty(), "undecided": pairs_json(pairs) }))
                .collect();
            print_json(&json!({
                "kb": kb_path.display().to_string(),
                "consistent": true,
                "experts": experts,
            }));
        }
    }
    if all.iter().all(|(_, p)| p.is_empty()) {
        Ok(())
    } else {
        Err(Exit(EXIT_INCOMPLETE))
    }
}

fn explain(kb_path: &Path, individual: &str, concept: &str) -> Result<(), Exit> {
    let kb = load_kb(kb_path)?;
    let c = parse_concept(concept, &kb).map_err(|diags| {
        for d in &diags {
            eprintln!("--concept:{d}");
        }
        Exit(EXIT_USAGE)
    })?;
    let sat = saturated(&kb)?;
    match sat.explain(individual, &c) {
        Ok(ex) => {
            print!("{ex}");
            Ok(())
        }
        Err(e @ ExplainError::NoDerivation { .. }) => {
            println!("{e}");
            Err(Exit(EXIT_NO_DERIVATION))
        }
        Err(e) => {
            eprintln!("{e}");
            Err(Exit(EXIT_USAGE))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Check { kb, format } => check(kb, *format),
        Command::Rank {
            kb,
            eval,
            strict_complete,
            format,
        } => rank(kb, eval, *strict_complete, *format),
        Command::Complete { kb, eval, format } => complete(kb, eval, *format),
        Command::Explain {
            kb,
            individual,
            concept,
        } => explain(kb, individual, concept),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code)) => ExitCode::from(code),
    }
}
