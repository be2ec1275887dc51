//! Subcommand implementations. Each returns the process exit code and writes
//! its report to the given stream.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use lazyhint_core::certify::{check_hint, CheckReport, Consistency, Verdict, Witness};
use lazyhint_core::evaluator::prelude;
use lazyhint_core::linter::{render_suggestion, scan, Suggestion};
use lazyhint_core::syntax::{parse_hint, parse_hints, Hint, HintParseError, SourceError};
use lazyhint_core::typing::{infer, TypeError};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::args::{Cli, Command, Format, Options};
use crate::proof;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{origin}: {error}")]
    Hint {
        origin: String,
        error: HintParseError,
    },
    #[error("no hints given; use --with=<hint> or --hints=<file>")]
    NoHints,
    #[error("{}:{}:{}: parse error: {}", file.display(), error.line, error.column, error.message)]
    Source { file: PathBuf, error: SourceError },
    #[error("{hint}: ill-typed: {error}")]
    Type { hint: String, error: TypeError },
    #[error("{0}")]
    Output(#[from] io::Error),
}

/// Exit status for usage, parse and type failures.
pub const EXIT_ERROR: i32 = 2;

/// Runs a parsed command line; errors are printed to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Certify => run_certify(&cli.opts, out),
        Command::Lint { files } => run_lint(&cli.opts, files, out),
        Command::EmitProofs => emit_proofs(&cli.opts, out),
        Command::DumpPrelude => out
            .write_all(prelude().dump().as_bytes())
            .map(|_| 0)
            .map_err(CliError::from),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "lazyhint: {e}");
        EXIT_ERROR
    })
}

/// Hints from `--hints` files in order, then `--with` strings in order.
pub fn load_hints(opts: &Options) -> Result<Vec<Hint>, CliError> {
    let mut hints = Vec::new();
    for path in &opts.hints {
        let text = read(path)?;
        for (line, parsed) in parse_hints(&text) {
            hints.push(parsed.map_err(|error| CliError::Hint {
                origin: format!("{}:{line}", path.display()),
                error,
            })?);
        }
    }
    for (i, text) in opts.with.iter().enumerate() {
        hints.push(parse_hint(text).map_err(|error| CliError::Hint {
            origin: format!("--with #{}", i + 1),
            error,
        })?);
    }
    if hints.is_empty() && opts.with.is_empty() && opts.hints.is_empty() {
        return Err(CliError::NoHints);
    }
    Ok(hints)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Certifies hints concurrently; reports come back in input order.
pub fn certify_all(hints: &[Hint], opts: &Options) -> Vec<CheckReport> {
    let cfg = opts.check_config();
    hints.par_iter().map(|h| check_hint(h, &cfg)).collect()
}

/// 2 for rejected hints, else 1 for annotation problems, else 3 when some
/// verdict is Inconclusive, else 0.
pub fn certify_exit_code(reports: &[CheckReport]) -> i32 {
    if reports
        .iter()
        .any(|r| matches!(r.verdict, Verdict::Rejected(_)))
    {
        EXIT_ERROR
    } else if reports
        .iter()
        .any(|r| r.consistency != Consistency::Consistent)
    {
        1
    } else if reports
        .iter()
        .any(|r| matches!(r.verdict, Verdict::Inconclusive { .. }))
    {
        3
    } else {
        0
    }
}

pub fn run_certify(opts: &Options, out: &mut dyn Write) -> Result<i32, CliError> {
    let hints = load_hints(opts)?;
    let reports = certify_all(&hints, opts);
    match opts.format {
        Format::Json => {
            let doc = json!({
                "config": opts.check_config().to_string(),
                "reports": reports.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
            });
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("report is valid JSON")
            )?;
        }
        Format::Text => {
            for r in &reports {
                out.write_all(render_report(r).as_bytes())?;
            }
            writeln!(out, "{}", summary(&reports))?;
        }
    }
    Ok(certify_exit_code(&reports))
}

fn render_witness(label: &str, w: &Witness, out: &mut String) {
    out.push_str(&format!("  {label}: {}\n", w.env_text()));
    out.push_str(&format!("    lhs = {}\n    rhs = {}\n", w.lhs, w.rhs));
}

/// Human-readable block for one report.
pub fn render_report(r: &CheckReport) -> String {
    let mut out = format!("{}\n  verdict: {}\n", r.hint.source_text, r.verdict.name());
    match &r.verdict {
        Verdict::Rejected(reason) => out.push_str(&format!("  reason: {reason}\n")),
        Verdict::Mixed { less, greater } => {
            render_witness("lhs less defined at", less, &mut out);
            render_witness("lhs more defined at", greater, &mut out);
        }
        Verdict::Inconclusive { first, .. } => {
            render_witness("first undetermined at", first, &mut out)
        }
        v => {
            if let Some(w) = v.witness() {
                render_witness("witness", w, &mut out);
            }
        }
    }
    out.push_str(&format!("  consistency: {}\n", r.consistency.label()));
    if !r.types.is_empty() {
        let types: Vec<String> = r.types.iter().map(|(k, t)| format!("{k} :: {t}")).collect();
        out.push_str(&format!("  types: {}\n", types.join(", ")));
    }
    out.push_str(&format!(
        "  tested: {} valuations, {} undetermined, {:.1} ms\n",
        r.tested,
        r.indefinite,
        r.duration.as_secs_f64() * 1000.0
    ));
    for n in &r.notes {
        out.push_str(&format!("  note: {n}\n"));
    }
    out.push('\n');
    out
}

fn summary(reports: &[CheckReport]) -> String {
    let count = |c: Consistency| reports.iter().filter(|r| r.consistency == c).count();
    let rejected = reports
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Rejected(_)))
        .count();
    format!(
        "{} hints: {} consistent, {} invalid, {} missing note, {} unnecessary note ({} rejected)",
        reports.len(),
        count(Consistency::Consistent),
        count(Consistency::InvalidHint) - rejected,
        count(Consistency::MissingNote),
        count(Consistency::UnnecessaryNote),
        rejected
    )
}

pub fn run_lint(opts: &Options, files: &[PathBuf], out: &mut dyn Write) -> Result<i32, CliError> {
    let hints = load_hints(opts)?;
    let mut found: Vec<Suggestion> = Vec::new();
    for file in files {
        let text = read(file)?;
        let name = file.display().to_string();
        found.extend(
            scan(&name, &text, &hints).map_err(|error| CliError::Source {
                file: file.clone(),
                error,
            })?,
        );
    }
    match opts.format {
        Format::Json => {
            let items: Vec<_> = found
                .iter()
                .map(|s| {
                    json!({
                        "file": s.file,
                        "line": s.line,
                        "column": s.column,
                        "severity": s.hint.severity,
                        "hint": s.hint.source_text,
                        "found": s.found,
                        "replacement": s.replacement.to_string(),
                        "note": s.note,
                    })
                })
                .collect();
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&items).expect("suggestions are valid JSON")
            )?;
        }
        Format::Text => {
            let blocks: Vec<String> = found.iter().map(render_suggestion).collect();
            out.write_all(blocks.join("\n").as_bytes())?;
        }
    }
    Ok(if found.is_empty() { 0 } else { 1 })
}

/// Goal lines for well-typed hints, LF-terminated.
pub fn proof_text(hints: &[Hint]) -> Result<String, CliError> {
    let sig = prelude().signature();
    let mut text = String::new();
    for h in hints {
        infer(h, sig).map_err(|error| CliError::Type {
            hint: h.source_text.clone(),
            error,
        })?;
        text.push_str(&proof::goal(h));
        text.push('\n');
    }
    Ok(text)
}

pub fn emit_proofs(opts: &Options, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = proof_text(&load_hints(opts)?)?;
    match &opts.proof {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(0)
}
