//! Command-line interface.
//!
//! Exit codes are a total function of the outcome: 0 success or accepted,
//! 1 query rejected or no candidate recommended (fallback used), 2 parse
//! error, 3 validation error, 4 usage error. Standard output for identical
//! inputs is byte-identical unless `--timing` is given; ANSI colour is used
//! only on a terminal and never when `NO_COLOR` is set.

use std::ffi::OsString;
use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::af::parse_af;
use crate::framework::{build_framework, ArgumentationFramework};
use crate::ground::{ground_program, GroundError, DEFAULT_INSTANCE_CAP};
use crate::kb::{
    merge_programs, parse_program, parse_query, print_program, validate_program, ParseError,
    Program, Query, ValidationReport,
};
use crate::report::{
    abstract_report, build_trace, query_report, selection_report, to_dot, JsonTiming,
};
use crate::selector::{
    facts_from_profile, select_explainer, ExplainerProfile, SelectorError, StakeholderModel,
};
use crate::solver::{accept, grounded_labelling, AcceptanceMode, Labelling, QueryVerdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_PARSE_ERROR: i32 = 2;
pub const EXIT_VALIDATION_ERROR: i32 = 3;
pub const EXIT_USAGE_ERROR: i32 = 4;

#[derive(Parser)]
#[command(
    name = "gavel",
    version,
    about = "Preference-based argumentation engine for selecting context-appropriate explainers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate knowledge-base files; report statement counts.
    Validate {
        /// Knowledge-base files (.gkb).
        #[arg(required = true)]
        kb: Vec<PathBuf>,
        /// Write the validation report as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the canonical ground program for a goal.
    Ground {
        #[arg(required = true)]
        kb: Vec<PathBuf>,
        /// Goal literal, e.g. "neg(use(X = lime))".
        #[arg(long)]
        goal: String,
        /// Cap on generated ground instances.
        #[arg(long, default_value_t = DEFAULT_INSTANCE_CAP)]
        max_instances: usize,
    },
    /// Solve a goal against knowledge-base files.
    Query {
        #[arg(required = true)]
        kb: Vec<PathBuf>,
        /// Goal literal, e.g. "neg(use(X = lime))".
        #[arg(long)]
        goal: String,
        /// Print the full reasoning trace, not only the result.
        #[arg(long)]
        trace: bool,
        /// Write the solved framework as a DOT graph to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the JSON report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Add a non-canonical timing block to the output.
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = DEFAULT_INSTANCE_CAP)]
        max_instances: usize,
    },
    /// Solve an abstract framework file (.af) directly.
    SolveAf {
        file: PathBuf,
        /// Argument id to decide; exit reflects its acceptance.
        #[arg(long)]
        query: Option<String>,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Rank candidate explainers over a knowledge base and choose one.
    Select {
        #[arg(required = true)]
        kb: Vec<PathBuf>,
        /// Comma-separated candidate explainer names.
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<String>,
        /// Directory of <name>.profile.json files to compile into facts.
        #[arg(long)]
        profiles: Option<PathBuf>,
        /// Stakeholder model file (.stakeholder.json).
        #[arg(long)]
        stakeholder: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Add a non-canonical timing block to the output.
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = DEFAULT_INSTANCE_CAP)]
        max_instances: usize,
    },
    /// Export a solved framework as a DOT graph.
    ExportDot {
        /// Knowledge-base files, or a single .af file.
        #[arg(required = true)]
        input: Vec<PathBuf>,
        /// Goal literal; required for knowledge-base input.
        #[arg(long)]
        goal: Option<String>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_INSTANCE_CAP)]
        max_instances: usize,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE_ERROR,
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION_ERROR,
            message: message.into(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(err: ParseError) -> Self {
        Self {
            code: EXIT_PARSE_ERROR,
            message: err.to_string(),
        }
    }
}

impl From<GroundError> for Failure {
    fn from(err: GroundError) -> Self {
        Failure::validation(err.to_string())
    }
}

impl From<SelectorError> for Failure {
    fn from(err: SelectorError) -> Self {
        let code = match &err {
            SelectorError::Parse(_) | SelectorError::Json { .. } => EXIT_PARSE_ERROR,
            SelectorError::InvalidKnowledgeBase(_) | SelectorError::Ground(_) => {
                EXIT_VALIDATION_ERROR
            }
            _ => EXIT_USAGE_ERROR,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn issue_lines(report: &ValidationReport) -> String {
    let mut out = String::new();
    for issue in &report.errors {
        out.push_str(&format!(
            "error[{}]: {} ({}:{}:{})\n",
            issue.code, issue.message, issue.file, issue.line, issue.col
        ));
    }
    for issue in &report.warnings {
        out.push_str(&format!(
            "warning[{}]: {} ({}:{}:{})\n",
            issue.code, issue.message, issue.file, issue.line, issue.col
        ));
    }
    for issue in &report.infos {
        out.push_str(&format!(
            "info[{}]: {} ({}:{}:{})\n",
            issue.code, issue.message, issue.file, issue.line, issue.col
        ));
    }
    out
}

/// Reads, parses and merges knowledge-base files. Duplicate labels across
/// files are a validation failure.
fn load_merged(paths: &[PathBuf]) -> Result<(Program, Vec<String>), Failure> {
    let mut programs = Vec::new();
    let mut names = Vec::new();
    for path in paths {
        let text = read_file(path)?;
        let name = path.display().to_string();
        programs.push(parse_program(&text, &name)?);
        names.push(name);
    }
    let merged = merge_programs(&programs)
        .map_err(|report| Failure::validation(issue_lines(&report).trim_end().to_string()))?;
    Ok((merged, names))
}

/// Full pipeline for one goal: merge, validate, ground, build, solve.
fn solve_goal(
    paths: &[PathBuf],
    goal: &str,
    cap: usize,
) -> Result<(Vec<String>, ArgumentationFramework, QueryVerdict), Failure> {
    let (program, names) = load_merged(paths)?;
    let report = validate_program(&program);
    if !report.is_valid() {
        return Err(Failure::validation(
            issue_lines(&report).trim_end().to_string(),
        ));
    }
    let query = parse_goal(goal)?;
    let gp = ground_program(&program, &query, cap)?;
    let af = build_framework(&gp, &query.literal);
    let verdict = accept(&af, &query.literal, AcceptanceMode::default());
    Ok((names, af, verdict))
}

fn parse_goal(goal: &str) -> Result<Query, Failure> {
    let query = parse_query(goal, "<goal>")?;
    if !query.literal.is_ground() {
        return Err(Failure::usage(format!(
            "goal `{}` is not ground; bind its variables with `Var = constant`",
            query.literal
        )));
    }
    Ok(query)
}

fn use_color() -> bool {
    if std::env::var_os("NO_COLOR")
        .map(|v| !v.is_empty())
        .unwrap_or(false)
    {
        return false;
    }
    std::io::stdout().is_terminal()
}

fn result_text(af: &ArgumentationFramework, verdict: &QueryVerdict, color: bool) -> String {
    let trace = build_trace(af, &verdict.labelling, Some(verdict));
    let full = trace.render_text(color);
    // The result block is the tail of the full trace.
    match full.find("== result ==\n") {
        Some(at) => full[at + "== result ==\n".len()..].to_string(),
        None => full,
    }
}

fn timing_block(start: Instant, wanted: bool) -> Option<JsonTiming> {
    wanted.then(|| JsonTiming {
        total_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}

fn cmd_validate(kb: &[PathBuf], json: Option<&Path>) -> Result<i32, Failure> {
    // Validation itself detects cross-file duplicates, so the files are
    // concatenated rather than merged: counts stay meaningful either way.
    let mut concatenated = Program::default();
    for path in kb {
        let text = read_file(path)?;
        let name = path.display().to_string();
        let program = parse_program(&text, &name)?;
        concatenated.rules.extend(program.rules);
        concatenated.provenance.push(name);
    }
    let report = validate_program(&concatenated);
    let statements = concatenated.rules.len();

    print!(
        "statements: {statements} (rules {}, preferences {}, facts {})\n{}",
        report.counts.rules,
        report.counts.preferences,
        report.counts.facts,
        issue_lines(&report)
    );
    println!(
        "{}",
        if report.is_valid() {
            "valid"
        } else {
            "invalid"
        }
    );
    if let Some(path) = json {
        write_file(path, &report.to_json())?;
    }
    Ok(if report.is_valid() {
        EXIT_OK
    } else {
        EXIT_VALIDATION_ERROR
    })
}

fn cmd_ground(kb: &[PathBuf], goal: &str, cap: usize) -> Result<i32, Failure> {
    let (program, _) = load_merged(kb)?;
    let report = validate_program(&program);
    if !report.is_valid() {
        return Err(Failure::validation(
            issue_lines(&report).trim_end().to_string(),
        ));
    }
    let query = parse_goal(goal)?;
    let gp = ground_program(&program, &query, cap)?;
    print!("{}", print_program(&gp.program));
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_query(
    kb: &[PathBuf],
    goal: &str,
    trace: bool,
    dot: Option<&Path>,
    json: Option<&Path>,
    timing: bool,
    cap: usize,
) -> Result<i32, Failure> {
    let start = Instant::now();
    let (names, af, verdict) = solve_goal(kb, goal, cap)?;
    let color = use_color();

    if trace {
        let document = build_trace(&af, &verdict.labelling, Some(&verdict));
        print!("{}", document.render_text(color));
    } else {
        print!("{}", result_text(&af, &verdict, color));
    }

    if let Some(path) = dot {
        write_file(path, &to_dot(&af, &verdict.labelling))?;
    }
    let timing = timing_block(start, timing);
    if let Some(t) = &timing {
        println!("timing: total {:.1}ms", t.total_ms);
    }
    if let Some(path) = json {
        write_file(path, &query_report(&names, &af, &verdict, timing).to_text())?;
    }
    Ok(if verdict.accepted {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_solve_af(
    file: &Path,
    query: Option<&str>,
    dot: Option<&Path>,
    json: Option<&Path>,
) -> Result<i32, Failure> {
    let text = read_file(file)?;
    let name = file.display().to_string();
    let doc = parse_af(&text, &name)?;
    let af = doc.build();
    if let Some(id) = query {
        if !af.arguments.contains_key(id) {
            return Err(Failure::usage(format!(
                "argument `{id}` is not declared in {name}"
            )));
        }
    }
    let labelling: Labelling = grounded_labelling(&af);
    let accepted = query.map(|id| labelling.is_in(id));

    let document = build_trace(&af, &labelling, None);
    print!("{}", document.render_text(use_color()));
    if let Some(id) = query {
        println!(
            "argument {id}: {}",
            if accepted == Some(true) {
                "accepted"
            } else {
                "not accepted"
            }
        );
    }

    if let Some(path) = dot {
        write_file(path, &to_dot(&af, &labelling))?;
    }
    if let Some(path) = json {
        let report = abstract_report(&name, &af, &labelling, query.zip(accepted));
        write_file(path, &report.to_text())?;
    }
    Ok(match accepted {
        Some(false) => EXIT_NEGATIVE,
        _ => EXIT_OK,
    })
}

/// Loads `<name>.profile.json` for each candidate from the profiles
/// directory, failing with the registered names when one is missing.
fn load_profiles(dir: &Path, candidates: &[String]) -> Result<Vec<ExplainerProfile>, Failure> {
    let mut profiles = Vec::new();
    for name in candidates {
        let path = dir.join(format!("{name}.profile.json"));
        if !path.exists() {
            let mut registered: Vec<String> = fs::read_dir(dir)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", dir.display())))?
                .filter_map(|entry| entry.ok())
                .filter_map(|entry| {
                    entry
                        .file_name()
                        .to_str()
                        .and_then(|n| n.strip_suffix(".profile.json").map(str::to_string))
                })
                .collect();
            registered.sort();
            return Err(SelectorError::UnknownCandidate {
                name: name.clone(),
                registered: if registered.is_empty() {
                    "none".to_string()
                } else {
                    registered.join(", ")
                },
            }
            .into());
        }
        let text = read_file(&path)?;
        let profile = ExplainerProfile::from_json(&text, &path.display().to_string())
            .map_err(Failure::from)?;
        if &profile.name != name {
            return Err(Failure::usage(format!(
                "profile {} declares name `{}`, expected `{name}`",
                path.display(),
                profile.name
            )));
        }
        profiles.push(profile);
    }
    Ok(profiles)
}

#[allow(clippy::too_many_arguments)]
fn cmd_select(
    kb: &[PathBuf],
    candidates: &[String],
    profiles: Option<&Path>,
    stakeholder: Option<&Path>,
    json: Option<&Path>,
    timing: bool,
    cap: usize,
) -> Result<i32, Failure> {
    let start = Instant::now();
    let (mut program, names) = load_merged(kb)?;

    if let Some(dir) = profiles {
        for profile in load_profiles(dir, candidates)? {
            program
                .rules
                .extend(facts_from_profile(&profile).map_err(Failure::from)?);
        }
        program.provenance.push(dir.display().to_string());
    }

    let model = match stakeholder {
        Some(path) => {
            let text = read_file(path)?;
            StakeholderModel::from_json(&text, &path.display().to_string())
                .map_err(Failure::from)?
        }
        None => StakeholderModel::default_only(candidates[0].clone()),
    };
    if let Some(dir) = profiles {
        // The fallback must name a registered profile.
        let default_profile = dir.join(format!("{}.profile.json", model.default_explainer));
        if !default_profile.exists() {
            return Err(Failure::usage(format!(
                "default explainer `{}` has no profile in {}",
                model.default_explainer,
                dir.display()
            )));
        }
    }

    let report = select_explainer(&program, candidates, &model, cap).map_err(Failure::from)?;

    for outcome in &report.candidates {
        println!("candidate {}: {}", outcome.name, outcome.status);
        for verdict in [&outcome.use_verdict, &outcome.neg_use_verdict] {
            let text = if verdict.accepted {
                format!(
                    "accepted (via {})",
                    verdict
                        .supporting
                        .iter()
                        .cloned()
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            } else {
                "not accepted".to_string()
            };
            println!("  {}: {}", verdict.query, text);
        }
    }
    if report.fallback_used {
        println!("fallback: no candidate recommended; default explainer chosen");
    }
    println!("chosen: {}", report.chosen);

    let timing = timing_block(start, timing);
    if let Some(t) = &timing {
        println!("timing: total {:.1}ms", t.total_ms);
    }
    if let Some(path) = json {
        write_file(
            path,
            &selection_report(&names, candidates, &report, timing).to_text(),
        )?;
    }
    Ok(if report.fallback_used {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    })
}

fn cmd_export_dot(
    input: &[PathBuf],
    goal: Option<&str>,
    out: Option<&Path>,
    cap: usize,
) -> Result<i32, Failure> {
    let is_af = input.len() == 1
        && input[0]
            .extension()
            .map(|e| e.eq_ignore_ascii_case("af"))
            .unwrap_or(false);
    let dot = if is_af {
        if goal.is_some() {
            return Err(Failure::usage(
                "--goal does not apply to abstract framework files",
            ));
        }
        let text = read_file(&input[0])?;
        let af = parse_af(&text, &input[0].display().to_string())?.build();
        let labelling = grounded_labelling(&af);
        to_dot(&af, &labelling)
    } else {
        let goal =
            goal.ok_or_else(|| Failure::usage("--goal is required for knowledge-base input"))?;
        let (_, af, verdict) = solve_goal(input, goal, cap)?;
        to_dot(&af, &verdict.labelling)
    };
    match out {
        Some(path) => write_file(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(EXIT_OK)
}

/// Parses arguments, dispatches, and maps every outcome to its exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{err}");
                    EXIT_USAGE_ERROR
                }
            }
        }
    };

    let result = match &cli.command {
        Command::Validate { kb, json } => cmd_validate(kb, json.as_deref()),
        Command::Ground {
            kb,
            goal,
            max_instances,
        } => cmd_ground(kb, goal, *max_instances),
        Command::Query {
            kb,
            goal,
            trace,
            dot,
            json,
            timing,
            max_instances,
        } => cmd_query(
            kb,
            goal,
            *trace,
            dot.as_deref(),
            json.as_deref(),
            *timing,
            *max_instances,
        ),
        Command::SolveAf {
            file,
            query,
            dot,
            json,
        } => cmd_solve_af(file, query.as_deref(), dot.as_deref(), json.as_deref()),
        Command::Select {
            kb,
            candidates,
            profiles,
            stakeholder,
            json,
            timing,
            max_instances,
        } => cmd_select(
            kb,
            candidates,
            profiles.as_deref(),
            stakeholder.as_deref(),
            json.as_deref(),
            *timing,
            *max_instances,
        ),
        Command::ExportDot {
            input,
            goal,
            out,
            max_instances,
        } => cmd_export_dot(input, goal.as_deref(), out.as_deref(), *max_instances),
    };

    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}
