use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gapedit::access::{certify_non_adaptive, Certificate, MeteredString, RandomStream};
use gapedit::exec::Execution;
use gapedit::harness::{
    adjudicate, generate, read_csv, run_grid, run_tester, write_csv, write_report, Family, GridConfig, InstanceSpec,
    RunParams, Side, TesterKind,
};
use gapedit::reductions::key_lemma_check;
use gapedit::{Constants, TesterError};

/// Exit status when every cell of a grid lies outside the supported regime.
const EXIT_UNSUPPORTED: u8 = 2;

#[derive(Parser)]
#[command(name = "gapedit", version, about = "Sublinear gap edit distance testers and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance pair and print its distance bounds.
    Gen(GenArgs),
    /// Run an experiment grid and write trial records as CSV.
    Run(Box<RunArgs>),
    /// Compute per-cell error rates from a records CSV.
    Adjudicate(AdjudicateArgs),
    /// Check that a tester's read positions do not depend on the input.
    CertifyNonadaptive(CertifyArgs),
    /// Check the multi-scale block counting lemma on random pairs.
    LemmaCheck(LemmaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Near,
    Far,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: gapedit::HarnessError| e.to_string())
}

fn parse_tester(s: &str) -> Result<TesterKind, String> {
    s.parse().map_err(|e: gapedit::HarnessError| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_family, default_value = "random-edits")]
    family: Family,
    #[arg(long, value_enum, default_value = "near")]
    side: SideArg,
    #[arg(long)]
    n: usize,
    /// Edit budget, planted distance or rotation shift.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    alphabet: u32,
    /// Padded-hard core length is six times this.
    #[arg(long, default_value_t = 1)]
    core_scale: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML grid file; flags given on the command line override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    c: Vec<f64>,
    /// Use these α values instead of round(k^c).
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    h: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_tester)]
    tester: Vec<TesterKind>,
    #[arg(long, value_delimiter = ',', value_parser = parse_family)]
    family: Vec<Family>,
    #[arg(long)]
    alphabet: Option<u32>,
    /// Scaled constants with this base.
    #[arg(long)]
    scale: Option<u64>,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
    /// Use the standard n/k/c ladder as the starting grid.
    #[arg(long)]
    ladder: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn grid(&self) -> Result<GridConfig> {
        let mut g = match (&self.config, self.ladder) {
            (Some(p), _) => GridConfig::from_path(p).with_context(|| format!("reading {}", p.display()))?,
            (None, true) => GridConfig::ladder(),
            (None, false) => GridConfig::default(),
        };
        fn over<T: Clone>(dst: &mut Vec<T>, src: &[T]) {
            if !src.is_empty() {
                *dst = src.to_vec();
            }
        }
        over(&mut g.n, &self.n);
        over(&mut g.k, &self.k);
        over(&mut g.c, &self.c);
        over(&mut g.alpha, &self.alpha);
        over(&mut g.h, &self.h);
        over(&mut g.delta, &self.delta);
        over(&mut g.tester, &self.tester);
        over(&mut g.family, &self.family);
        g.trials = self.trials.unwrap_or(g.trials);
        g.seed = self.seed.unwrap_or(g.seed);
        g.alphabet = self.alphabet.unwrap_or(g.alphabet);
        g.scale = self.scale.or(g.scale);
        if self.sequential {
            g.execution = Execution::Sequential;
        }
        g.validate()?;
        Ok(g)
    }
}

#[derive(Args)]
struct AdjudicateArgs {
    /// Records CSV written by `run`.
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_parser = parse_tester, default_value = "main")]
    tester: TesterKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    #[arg(long)]
    alpha: Option<usize>,
    #[arg(long)]
    h: Option<u32>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Content pairs to compare.
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    scale: Option<u64>,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Thresholds τ to check.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4, 8])]
    k: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    alphabet: u32,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn join(symbols: &[u32]) -> String {
    symbols.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn gen(a: &GenArgs) -> Result<ExitCode> {
    let spec = InstanceSpec {
        family: a.family,
        side: match a.side {
            SideArg::Near => Side::Near,
            SideArg::Far => Side::Far,
        },
        n: a.n,
        k: a.k,
        alphabet_size: a.alphabet,
        core_scale: a.core_scale,
        seed: a.seed,
    };
    let g = generate(&spec)?;
    let mut out = output(a.out.as_deref())?;
    writeln!(
        out,
        "# family={} n={} ed_lower={} ed_upper={} verified={}",
        a.family, a.n, g.bounds.lower, g.bounds.upper, g.bounds.verified
    )?;
    writeln!(out, "{}", join(&g.x))?;
    writeln!(out, "{}", join(&g.y))?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn run(a: &RunArgs) -> Result<ExitCode> {
    let grid = a.grid()?;
    let outcome = run_grid(&grid)?;
    let mut out = output(a.out.as_deref())?;
    write_csv(&outcome.records, &mut out)?;
    out.flush()?;
    if outcome.all_unsupported() {
        eprintln!("every cell is outside the supported parameter regime");
        return Ok(ExitCode::from(EXIT_UNSUPPORTED));
    }
    Ok(ExitCode::SUCCESS)
}

fn adjudicate_cmd(a: &AdjudicateArgs) -> Result<ExitCode> {
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let reports = adjudicate(&read_csv(file)?);
    let mut out = output(a.out.as_deref())?;
    write_report(&reports, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn certify(a: &CertifyArgs) -> Result<ExitCode> {
    let params = RunParams {
        alpha: a.alpha.unwrap_or_else(|| gapedit::harness::grid::alpha_of(a.k, a.c)),
        beta: a.k,
        h: a.h,
        delta: a.delta,
        constants: a.scale.map_or_else(Constants::default, Constants::scaled),
    };
    let mut failure: Option<TesterError> = None;
    let cert = certify_non_adaptive(
        |x: &MeteredString, y: &MeteredString, rs: &mut RandomStream| {
            if let Err(e) = run_tester(a.tester, x, y, &params, rs) {
                failure.get_or_insert(e);
            }
        },
        a.n,
        a.seed,
        a.trials,
    );
    if let Some(e) = failure {
        eprintln!("{e}");
        return Ok(ExitCode::from(match e {
            TesterError::UnsupportedRegime { .. } => EXIT_UNSUPPORTED,
            TesterError::Params(_) => 1,
        }));
    }
    match cert {
        Certificate::Pass { plan_len } => {
            println!("PASS {}: {} content pairs, {plan_len} reads each", a.tester, a.trials);
            Ok(ExitCode::SUCCESS)
        }
        Certificate::Fail { trial, .. } => {
            println!("FAIL {}: read plan differs on content pair {trial}", a.tester);
            Ok(ExitCode::FAILURE)
        }
    }
}

fn lemma_check(a: &LemmaArgs) -> Result<ExitCode> {
    if a.k.contains(&0) {
        bail!("thresholds must be positive");
    }
    let root = RandomStream::new(a.seed);
    let (mut checked, mut violations) = (0usize, 0usize);
    for t in 0..a.trials {
        let mut rs = root.child(t as u64);
        let tau = a.k[t % a.k.len()];
        let budget = rs.uniform_index(a.n / 2 + 1);
        let g = generate(&InstanceSpec {
            family: Family::RandomEdits,
            side: Side::Near,
            n: a.n,
            k: budget,
            alphabet_size: a.alphabet,
            core_scale: 1,
            seed: rs.next_u64(),
        })?;
        if let Some(holds) = key_lemma_check(&g.x, &g.y, tau)?.holds() {
            checked += 1;
            if !holds {
                violations += 1;
                println!("counterexample: trial {t}, tau {tau}");
            }
        }
    }
    println!("checked {checked} applicable pairs of {}, {violations} counterexamples", a.trials);
    Ok(if violations == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Adjudicate(a) => adjudicate_cmd(a),
        Command::CertifyNonadaptive(a) => certify(a),
        Command::LemmaCheck(a) => lemma_check(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
