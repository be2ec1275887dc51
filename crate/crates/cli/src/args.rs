use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lazyhint_core::certify::CheckConfig;
use lazyhint_core::enumeration::EnumConfig;
use lazyhint_core::evaluator::{DEFAULT_FUEL, DEFAULT_OBS_DEPTH};
use num_bigint::BigInt;

#[derive(Debug, Parser)]
#[command(
    name = "lazyhint",
    version,
    about = "Certify and apply rewrite hints for a lazy core language"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every hint against the prelude semantics
    Certify,
    /// Report hint matches in source files
    Lint {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Write one Isabelle/HOLCF goal per hint
    EmitProofs,
    /// Print the embedded prelude
    DumpPrelude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Inline hint, e.g. --with='warn = reverse (reverse x) ==> x'
    #[arg(long = "with", global = true, value_name = "HINT")]
    pub with: Vec<String>,
    /// Hint file, one hint per line
    #[arg(long = "hints", global = true, value_name = "FILE")]
    pub hints: Vec<PathBuf>,
    /// Where emit-proofs writes its goals (stdout when absent)
    #[arg(long, global = true, value_name = "FILE")]
    pub proof: Option<PathBuf>,
    /// Maximum rank of enumerated values
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    /// Evaluation steps allowed per side and valuation
    #[arg(long, global = true, default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
    /// Constructor depth at which results are cut off
    #[arg(long = "obs-depth", global = true, default_value_t = DEFAULT_OBS_DEPTH)]
    pub obs_depth: usize,
    /// Integer pool as an inclusive range
    #[arg(long, global = true, value_name = "LO..HI", value_parser = parse_range, default_value = "-1..2")]
    pub ints: (i64, i64),
    /// Character pool
    #[arg(long, global = true, value_name = "SET", default_value = "ab")]
    pub chars: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            with: Vec::new(),
            hints: Vec::new(),
            proof: None,
            depth: 3,
            fuel: DEFAULT_FUEL,
            obs_depth: DEFAULT_OBS_DEPTH,
            ints: (-1, 2),
            chars: "ab".into(),
            format: Format::Text,
        }
    }
}

impl Options {
    pub fn check_config(&self) -> CheckConfig {
        let (lo, hi) = self.ints;
        let mut chars: Vec<char> = Vec::new();
        for c in self.chars.chars() {
            if !chars.contains(&c) {
                chars.push(c);
            }
        }
        CheckConfig {
            enumeration: EnumConfig {
                depth: self.depth,
                ints: (lo..=hi).map(BigInt::from).collect(),
                chars,
            },
            fuel: self.fuel,
            obs_depth: self.obs_depth,
        }
    }
}

pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound `{lo}`: {e}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound `{hi}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_core_defaults() {
        let cli = Cli::try_parse_from(["lazyhint", "certify"]).unwrap();
        assert_eq!(cli.opts.check_config(), CheckConfig::default());
        assert_eq!(Options::default().check_config(), CheckConfig::default());
    }

    #[test]
    fn flags() {
        let cli = Cli::try_parse_from([
            "lazyhint",
            "--with=warn = x ==> x",
            "certify",
            "--ints=0..2",
            "--depth=2",
            "--chars=xyx",
            "--format=json",
        ])
        .unwrap();
        assert_eq!(cli.opts.with, vec!["warn = x ==> x"]);
        let cfg = cli.opts.check_config();
        assert_eq!(
            cfg.enumeration.ints,
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(2)]
        );
        assert_eq!(cfg.enumeration.chars, vec!['x', 'y']);
        assert_eq!(cfg.enumeration.depth, 2);
        assert_eq!(cli.opts.format, Format::Json);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-3..-1"), Ok((-3, -1)));
        assert!(parse_range("2..1").is_err());
        assert!(parse_range("1-2").is_err());
    }
}
