//! Command implementations behind the `trustcbc` binary.
//!
//! Every command except `serve` runs to completion and returns a
//! [`CommandOutcome`]: the text to print and the exit code.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use trustcbc::conjoint::{
    importance_counts, sample_size_check, simulate_respondents, tally, utility_counts,
    utility_levels, Attribute, Design, DesignKind, FitConfig, ImportanceVector, PartWorths, Tally,
};
use trustcbc::ingest::{
    export_results, load_annotations, load_choices, load_values, read_design, read_results,
};
use trustcbc::ingest::{write_choices, write_design, DataError};
use trustcbc::trust::{
    derive_thresholds_ecdf, score_all, ClassShares, ScoreParams, TranslatorThresholds, TrustWeights,
};
use trustcbc::{presets, Execution};
use trustcbc_service::{compute_results, ServiceConfig, SurveyResults};

#[derive(Debug, Parser)]
#[command(
    name = "trustcbc",
    version,
    about = "Trust scoring and choice-based conjoint analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score annotations and translate each trust value to a degree.
    Score(ScoreArgs),
    /// Generate a conjoint design.
    Design(DesignArgs),
    /// Estimate part-worths and importances from recorded choices.
    Estimate(EstimateArgs),
    /// Apply the minimum sample size rule n·t·a/c ≥ 500.
    Check(CheckArgs),
    /// Simulate logit respondents answering a design.
    Simulate(SimulateArgs),
    /// Derive translator thresholds from a sample of trust values.
    Thresholds(ThresholdArgs),
    /// Run the survey HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Annotation file (JSON Lines or a JSON array); `-` reads stdin.
    pub annotations: PathBuf,
    /// Dimension weights alpha,beta,gamma.
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<TrustWeights>,
    /// Number of top authors counted for quality.
    #[arg(long, default_value_t = 2)]
    pub ntop: usize,
    /// Translator cuts vt,t,u.
    #[arg(long, value_parser = parse_thresholds)]
    pub thresholds: Option<TranslatorThresholds>,
    /// End of the observation window; defaults to each annotation's last edit.
    #[arg(long)]
    pub until: Option<i64>,
    /// Also write the full score breakdowns as JSON Lines.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Attribute as NAME=LEVEL,LEVEL,...; repeat per attribute. Defaults to
    /// the three survey attributes.
    #[arg(long = "attribute", value_parser = parse_attribute)]
    pub attributes: Vec<Attribute>,
    /// `1` for the full factorial, `1/2` for the half fraction.
    #[arg(long, default_value = "1/2", value_parser = parse_fraction)]
    pub fraction: DesignKind,
    /// Alternatives per task.
    #[arg(long, default_value_t = 4)]
    pub alts: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Design file to write; `-` writes to stdout.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// Choice file; `-` reads stdin.
    #[arg(long)]
    pub choices: PathBuf,
    /// Only compute the counting estimates, skipping the logit fit.
    #[arg(long)]
    pub tally_only: bool,
    /// Results file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Respondents.
    pub n: u64,
    /// Tasks per respondent.
    pub t: u64,
    /// Alternatives per task.
    pub a: u64,
    /// Largest number of levels of any attribute.
    pub c: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// Results file holding the true part-worths. Defaults to the reference
    /// survey utilities.
    #[arg(long)]
    pub partworths: Option<PathBuf>,
    #[arg(long, default_value_t = 350)]
    pub respondents: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Choice file to write; `-` writes to stdout.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// One trust value per line; `-` reads stdin.
    pub values: PathBuf,
    /// Target shares vt,t,u,vu.
    #[arg(long, value_parser = parse_shares)]
    pub shares: Option<ClassShares>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Design file. Without one the service answers 503 until restarted
    /// with a design.
    #[arg(long, env = "TRUSTCBC_DESIGN")]
    pub design: Option<PathBuf>,
    /// Append-only choice log.
    #[arg(long, env = "TRUSTCBC_LOG", default_value = "choices.csv")]
    pub log: PathBuf,
    #[arg(long, env = "TRUSTCBC_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
}

impl ServeArgs {
    pub fn config(&self) -> ServiceConfig {
        ServiceConfig {
            listen: self.listen,
            design: self.design.clone(),
            log: self.log.clone(),
        }
    }
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    /// 0 iff no error was reported.
    pub exit_code: i32,
    pub report: String,
}

impl CommandOutcome {
    fn new(report: String, errors: usize) -> Self {
        Self {
            exit_code: i32::from(errors > 0),
            report,
        }
    }

    pub fn failure(error: &anyhow::Error) -> Self {
        Self {
            exit_code: 1,
            report: format!("error: {error:#}\n"),
        }
    }
}

fn numbers<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, found {}", v.len()))
}

fn parse_weights(s: &str) -> Result<TrustWeights, String> {
    let [a, b, g] = numbers::<3>(s)?;
    TrustWeights::new(a, b, g).map_err(|e| e.to_string())
}

fn parse_thresholds(s: &str) -> Result<TranslatorThresholds, String> {
    let [vt, t, u] = numbers::<3>(s)?;
    TranslatorThresholds::new(vt, t, u).map_err(|e| e.to_string())
}

fn parse_shares(s: &str) -> Result<ClassShares, String> {
    let [very_trusted, trusted, untrusted, very_untrusted] = numbers::<4>(s)?;
    let shares = ClassShares {
        very_trusted,
        trusted,
        untrusted,
        very_untrusted,
    };
    shares.validate().map_err(|e| e.to_string())?;
    Ok(shares)
}

fn parse_fraction(s: &str) -> Result<DesignKind, String> {
    match s.trim() {
        "1" => Ok(DesignKind::FullFactorial),
        "1/2" | "0.5" => Ok(DesignKind::HalfFraction),
        other => Err(format!("unsupported fraction {other:?}; use 1 or 1/2")),
    }
}

fn parse_attribute(s: &str) -> Result<Attribute, String> {
    let (name, levels) = s.split_once('=').ok_or("expected NAME=LEVEL,LEVEL,...")?;
    let levels = levels
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Attribute::new(name.trim(), levels, None).map_err(|e| e.to_string())
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdin().lock()))
    } else {
        let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        Ok(Box::new(f))
    }
}

fn open_output(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

/// Keeps stdout clean when it carries the command's data.
fn summary(out: &Path, text: String) -> CommandOutcome {
    if out.as_os_str() == "-" {
        eprint!("{text}");
        CommandOutcome::new(String::new(), 0)
    } else {
        CommandOutcome::new(text, 0)
    }
}

fn report_data_errors(out: &mut String, what: &str, errors: &[DataError]) {
    for e in errors {
        let _ = writeln!(
            out,
            "rejected {what} {}: {}: {}",
            e.record_index, e.field, e.reason
        );
    }
}

/// Runs any command but `serve`.
pub fn run(command: &Command) -> CommandOutcome {
    let result = match command {
        Command::Score(args) => score(args),
        Command::Design(args) => design(args),
        Command::Estimate(args) => estimate(args),
        Command::Check(args) => check(args),
        Command::Simulate(args) => simulate(args),
        Command::Thresholds(args) => thresholds(args),
        Command::Serve(_) => Err(anyhow::anyhow!("serve runs through the async entry point")),
    };
    result.unwrap_or_else(|e| CommandOutcome::failure(&e))
}

pub fn score(args: &ScoreArgs) -> Result<CommandOutcome> {
    let loaded = load_annotations(open_input(&args.annotations)?)?;
    let params = ScoreParams {
        weights: args.weights.unwrap_or_default(),
        top_n: args.ntop,
        thresholds: args.thresholds.unwrap_or_default(),
        until: args.until,
    };
    let mut out = String::new();
    let mut errors = loaded.errors.len();
    report_data_errors(&mut out, "annotation", &loaded.errors);
    let _ = writeln!(
        out,
        "{:<24} {:>10} {:>12} {:>10} {:>10}  degree",
        "id", "stability", "credibility", "quality", "trust"
    );
    let mut sink = args.out.as_deref().map(open_output).transpose()?;
    for (a, s) in loaded
        .items
        .iter()
        .zip(score_all(&loaded.items, &params, Execution::default()))
    {
        match s {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{:<24} {:>10} {:>12.3} {:>10.3} {:>10.3}  {}",
                    s.id, s.stability, s.credibility.value, s.quality.value, s.trust, s.degree
                );
                if let Some(w) = sink.as_mut() {
                    serde_json::to_writer(&mut *w, &s)?;
                    writeln!(w)?;
                }
            }
            Err(e) => {
                errors += 1;
                let _ = writeln!(out, "{:<24} error: {e}", a.id);
            }
        }
    }
    if let Some(mut w) = sink {
        w.flush()?;
    }
    Ok(CommandOutcome::new(out, errors))
}

pub fn design(args: &DesignArgs) -> Result<CommandOutcome> {
    let attributes = if args.attributes.is_empty() {
        presets::survey_attributes()
    } else {
        args.attributes.clone()
    };
    let design = Design::generate(attributes, args.fraction, args.alts, args.seed)?;
    let mut w = open_output(&args.out)?;
    write_design(&design, &mut w)?;
    w.flush()?;
    let concepts: usize = design.tasks.iter().map(|t| t.concepts.len()).sum();
    let report = format!(
        "{} concepts in {} tasks of {} alternatives (seed {})\n",
        concepts,
        design.tasks.len(),
        args.alts,
        args.seed
    );
    Ok(summary(&args.out, report))
}

fn load_design(path: &Path) -> Result<Design> {
    read_design(open_input(path)?).with_context(|| format!("reading design {}", path.display()))
}

fn write_tally(out: &mut String, t: &Tally, count_utilities: &[Vec<f64>]) {
    let _ = writeln!(
        out,
        "{:<16} {:>10} {:>9} {:>9} {:>9} {:>9}",
        "attribute", "level", "selected", "offered", "utility", "level-u"
    );
    for (cell, utilities) in t.attributes.iter().zip(count_utilities) {
        let level_u = utility_levels(&cell.levels);
        for l in 0..cell.levels.len() {
            let _ = writeln!(
                out,
                "{:<16} {:>10} {:>9} {:>9} {:>9} {:>9}",
                cell.name,
                cell.levels[l],
                cell.selected[l],
                cell.offered[l],
                utilities[l],
                level_u[l]
            );
        }
    }
}

fn write_importances(out: &mut String, title: &str, imp: &ImportanceVector) {
    let _ = writeln!(out, "{title}");
    for e in &imp.entries {
        let _ = writeln!(out, "  {:<16} {:>6.2}%", e.attribute, 100.0 * e.importance);
    }
}

fn write_part_worths(out: &mut String, pw: &PartWorths) {
    let _ = writeln!(out, "{:<16} {:>10} {:>10}", "attribute", "level", "utility");
    for a in &pw.attributes {
        for (l, u) in a.levels.iter().zip(&a.utilities) {
            let _ = writeln!(out, "{:<16} {:>10} {:>10.4}", a.name, l, u);
        }
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<CommandOutcome> {
    let design = load_design(&args.design)?;
    let loaded = load_choices(open_input(&args.choices)?, &design)?;
    let mut out = String::new();
    let mut errors = loaded.errors.len();
    report_data_errors(&mut out, "choice", &loaded.errors);
    if loaded.items.is_empty() {
        bail!("{out}empty data: no valid choices to estimate from");
    }

    if args.tally_only {
        let t = tally(&design, &loaded.items)?;
        write_tally(&mut out, &t, &utility_counts(&t)?);
        match importance_counts(&t) {
            Ok(imp) => write_importances(&mut out, "count importance", &imp),
            Err(e) => {
                errors += 1;
                let _ = writeln!(out, "count importance: {e}");
            }
        }
        return Ok(CommandOutcome::new(out, errors));
    }

    let SurveyResults::Ready(r) = compute_results(&design, &loaded.items, &FitConfig::default())?
    else {
        unreachable!("choices are non-empty")
    };
    let _ = writeln!(
        out,
        "{} choices from {} respondents",
        r.choices, r.respondents
    );
    write_tally(&mut out, &r.tally, &utility_counts(&r.tally)?);
    if let Some(imp) = &r.importance_counts {
        write_importances(&mut out, "count importance", imp);
    }
    match (&r.part_worths, &r.importance_partworths) {
        (Some(pw), Some(imp)) => {
            let _ = writeln!(
                out,
                "logit fit, log-likelihood {:.4}",
                r.log_likelihood.unwrap_or(f64::NAN)
            );
            write_part_worths(&mut out, pw);
            write_importances(&mut out, "part-worth importance", imp);
            if let Some(path) = &args.out {
                let mut w = open_output(path)?;
                export_results(pw, imp, &mut w)?;
                w.flush()?;
            }
        }
        _ => errors += 1,
    }
    for note in &r.notes {
        let _ = writeln!(out, "{note}");
    }
    let c = r.sample_size_check;
    let _ = writeln!(
        out,
        "sample size ratio {:.1}: {}",
        c.ratio,
        if c.pass { "pass" } else { "fail" }
    );
    Ok(CommandOutcome::new(out, errors))
}

pub fn check(args: &CheckArgs) -> Result<CommandOutcome> {
    let c = sample_size_check(args.n, args.t, args.a, args.c)?;
    Ok(CommandOutcome::new(
        format!(
            "ratio {} {}\n",
            c.ratio,
            if c.pass { "pass" } else { "fail" }
        ),
        0,
    ))
}

pub fn simulate(args: &SimulateArgs) -> Result<CommandOutcome> {
    let design = load_design(&args.design)?;
    let truth = match &args.partworths {
        Some(path) => read_results(open_input(path)?)?.0,
        None => presets::reference_part_worths(),
    };
    let choices = simulate_respondents(
        &truth,
        &design,
        args.respondents,
        args.seed,
        Execution::default(),
    )?;
    let mut w = open_output(&args.out)?;
    write_choices(&choices, &mut w)?;
    w.flush()?;
    Ok(summary(
        &args.out,
        format!(
            "{} choices from {} respondents (seed {})\n",
            choices.len(),
            args.respondents,
            args.seed
        ),
    ))
}

pub fn thresholds(args: &ThresholdArgs) -> Result<CommandOutcome> {
    let loaded = load_values(open_input(&args.values)?)?;
    let mut out = String::new();
    report_data_errors(&mut out, "value", &loaded.errors);
    let t = derive_thresholds_ecdf(&loaded.items, &args.shares.unwrap_or_default())?;
    let _ = writeln!(out, "very trusted >= {}", t.very_trusted);
    let _ = writeln!(out, "trusted      >= {}", t.trusted);
    let _ = writeln!(out, "untrusted    >= {}", t.untrusted);
    Ok(CommandOutcome::new(out, loaded.errors.len()))
}
