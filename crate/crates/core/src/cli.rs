//! Command-line front end. `main` maps every outcome to an exit code:
//! 0 ok, 1 usage, 2 certification failure, 3 analysis unavailable, 4 verification failure.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{diophantine_scan, identity_word, runtime_profile, trace_gap_scan, AlphaSpec};
use crate::dfr::{build_named_dfr, Dfr, DfrSpec};
use crate::error::{Error, Result};
use crate::group::Presentation;
use crate::io;
use crate::machine::{
    analyze_acceptance, assemble_exp_machine, assemble_poly_machine, assemble_unbounded_machine, build_mo1qfa,
    run_montecarlo, transform_overgroup, McConfig, QcfaMachine, DEFAULT_STEP_LIMIT,
};
use crate::scalar::{DEFAULT_PRECISION, MIN_PRECISION};
use crate::verify::{run_suite, Fixtures, LibraryOracle, Sizes};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        Format::from_str_ci(s)
    }
}

impl Format {
    fn from_str_ci(s: &str) -> Result<Format> {
        <Format as ValueEnum>::from_str(s, true).map_err(|_| Error::Parse(format!("unknown format {s:?}")))
    }
}

/// Settings shared by all subcommands. Config file values are overridden by flags.
#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub precision: usize,
    pub eps_num: Option<f64>,
    pub seed: u64,
    pub trials: u64,
    pub step_limit: u64,
    pub format: Format,
    pub threads: Option<usize>,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            precision: DEFAULT_PRECISION,
            eps_num: None,
            seed: 0,
            trials: 1000,
            step_limit: DEFAULT_STEP_LIMIT,
            format: Format::Pretty,
            threads: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("bad value {v:?} for {key}")))
}

impl CliConfig {
    /// `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<CliConfig> {
        let mut c = CliConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "precision" => c.precision = parse_value(k, v)?,
                "eps_num" => c.eps_num = Some(parse_value(k, v)?),
                "seed" => c.seed = parse_value(k, v)?,
                "trials" => c.trials = parse_value(k, v)?,
                "step_limit" => c.step_limit = parse_value(k, v)?,
                "format" => c.format = Format::from_str_ci(v)?,
                "threads" => c.threads = Some(parse_value(k, v)?),
                _ => return Err(Error::Parse(format!("config line {}: unknown key {k:?}", i + 1))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision < MIN_PRECISION {
            return Err(Error::Invalid(format!("precision {} < {MIN_PRECISION}", self.precision)));
        }
        if self.trials < 1 {
            return Err(Error::Invalid("trials must be ≥ 1".into()));
        }
        Ok(())
    }

    fn apply(&mut self, g: &Global) {
        if let Some(p) = g.precision {
            self.precision = p;
        }
        if g.eps_num.is_some() {
            self.eps_num = g.eps_num;
        }
        if let Some(s) = g.seed {
            self.seed = s;
        }
        if let Some(t) = g.trials {
            self.trials = t;
        }
        if let Some(s) = g.step_limit {
            self.step_limit = s;
        }
        if let Some(f) = g.format {
            self.format = f;
        }
        if g.threads.is_some() {
            self.threads = g.threads;
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qcfa", version, about = "Representation families and quantum-classical automata for group word problems")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct Global {
    /// key=value config file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[arg(long, global = true)]
    pub eps_num: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub step_limit: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build or certify distinguishing families
    #[command(subcommand)]
    Dfr(DfrCmd),
    /// Assemble, run, analyze and profile machines
    #[command(subcommand)]
    Machine(MachineCmd),
    /// Run an acceptance suite: diophantine, gaps, machines, overgroup or all
    Verify {
        suite: String,
        #[arg(long)]
        quick: bool,
    },
    /// Scan ‖qα‖ for q ≤ q_max
    Diophantine {
        /// sqrt:N, rational:P/Q or acos:P/Q (for arccos(P/Q)/2π)
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 100_000)]
        q_max: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum DfrCmd {
    Build {
        /// trivial, zm, z, z-delta, f2, fr, abelian, abelian-delta, dpf, tan, shalen
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        r: Option<usize>,
        /// comma-separated torsion factors
        #[arg(long, value_delimiter = ',')]
        torsion: Vec<u64>,
        /// comma-separated free ranks
        #[arg(long, value_delimiter = ',')]
        ranks: Vec<usize>,
        #[arg(long)]
        delta: Option<f64>,
        /// α = √alpha for the free-product family
        #[arg(long)]
        alpha: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    Certify {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
        /// defaults to rewriting the input file
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Poly,
    Exp,
    Unbounded,
    Mo1qfa,
    Overgroup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Overgroup {
    ZOver2z,
    DinfOverZ,
}

#[derive(Subcommand, Debug)]
pub enum MachineCmd {
    Build {
        #[arg(long)]
        dfr: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 0.125)]
        eps: f64,
        /// target group for --mode overgroup
        #[arg(long, value_enum)]
        overgroup: Option<Overgroup>,
        #[arg(short, long, default_value = "machine.json")]
        output: PathBuf,
    },
    Run {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    Analyze {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Expected steps on identity words g^{n/2} g^{−n/2}
    Profile {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![10, 20, 30, 40, 50])]
        lengths: Vec<usize>,
    },
}

pub fn parse_family(
    family: &str,
    m: Option<u64>,
    r: Option<usize>,
    torsion: &[u64],
    ranks: &[usize],
    delta: Option<f64>,
    alpha: Option<u64>,
) -> Result<DfrSpec> {
    let need = |o: Option<usize>, name: &str| o.ok_or_else(|| Error::Invalid(format!("--{name} is required for {family}")));
    let need_delta = || delta.ok_or_else(|| Error::Invalid(format!("--delta is required for {family}")));
    Ok(match family {
        "trivial" => DfrSpec::Trivial,
        "zm" => {
            let m = m.ok_or_else(|| Error::Invalid("--m is required for zm".into()))?;
            if m < 2 {
                return Err(Error::Invalid(format!("ℤ_m needs m ≥ 2, got {m}")));
            }
            DfrSpec::Zm(m)
        }
        "z" => DfrSpec::ZAlgebraic,
        "z-delta" => DfrSpec::ZNonAlgebraic { delta: need_delta()? },
        "f2" => DfrSpec::F2,
        "fr" => DfrSpec::Fr(need(r, "r")?),
        "abelian" => DfrSpec::AbelianAlgebraic { r: r.unwrap_or(0), torsion: torsion.to_vec() },
        "abelian-delta" => DfrSpec::AbelianNonAlgebraic { r: r.unwrap_or(0), torsion: torsion.to_vec(), delta: need_delta()? },
        "dpf" => DfrSpec::DirectProductOfFrees(ranks.to_vec()),
        "tan" => DfrSpec::TanZr(need(r, "r")?),
        "shalen" => DfrSpec::ShalenZFreeZr { r: need(r, "r")?, alpha_radicand: alpha.unwrap_or(2) },
        _ => return Err(Error::Invalid(format!("unknown family {family:?}"))),
    })
}

pub fn parse_alpha(s: &str) -> Result<AlphaSpec> {
    let bad = || Error::Parse(format!("bad alpha {s:?}; expected sqrt:N, rational:P/Q or acos:P/Q"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let frac = |r: &str| -> Result<(i64, i64)> {
        let (p, q) = r.split_once('/').ok_or_else(bad)?;
        Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
    };
    match kind {
        "sqrt" => Ok(AlphaSpec::Sqrt { n: rest.parse().map_err(|_| bad())? }),
        "rational" => frac(rest).map(|(num, den)| AlphaSpec::Rational { num, den }),
        "acos" => frac(rest).map(|(num, den)| AlphaSpec::AcosOverTwoPi { num, den }),
        _ => Err(bad()),
    }
}

fn load_dfr(p: &Path) -> Result<Dfr> {
    io::dfr_from_json(&io::read_json(p)?)
}

fn load_machine(p: &Path) -> Result<QcfaMachine> {
    io::machine_from_json(&io::read_json(p)?)
}

fn emit(cfg: &CliConfig, v: &Value, pretty: impl FnOnce() -> String, csv: impl FnOnce() -> Result<String>) -> Result<()> {
    match cfg.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v)?),
        Format::Csv => print!("{}", csv()?),
        Format::Pretty => println!("{}", pretty()),
    }
    Ok(())
}

fn minima_table(minima: &[Option<f64>]) -> String {
    let mut s = String::from("   n   m(n)\n");
    for (n, m) in minima.iter().enumerate().skip(1) {
        match m {
            Some(m) => s.push_str(&format!("{n:>4}   {m:.6e}\n")),
            None => s.push_str(&format!("{n:>4}   -\n")),
        }
    }
    s
}

fn cmd_dfr(cmd: &DfrCmd, cfg: &CliConfig) -> Result<i32> {
    match cmd {
        DfrCmd::Build { family, m, r, torsion, ranks, delta, alpha, output } => {
            let spec = parse_family(family, *m, *r, torsion, ranks, *delta, *alpha)?;
            let f = build_named_dfr(&spec)?;
            io::write_json(output, &io::dfr_to_json(&f))?;
            if cfg.format == Format::Pretty {
                println!("{}: k = {}, d = {}, τ = {}", f.name, f.k(), f.d(), f.tau);
                for (j, rep) in f.reps.iter().enumerate() {
                    for (i, img) in rep.images().iter().enumerate() {
                        println!("ρ_{}({}) =\n{}", j + 1, f.group().labels[i], img);
                    }
                }
                println!("wrote {}", output.display());
            }
            Ok(EXIT_OK)
        }
        DfrCmd::Certify { file, radius, output } => {
            let mut f = load_dfr(file)?;
            let report = trace_gap_scan(&f, *radius)?;
            if !report.passed {
                return Err(Error::Certification(format!("gap scan of {} failed at radius {radius}", f.name)));
            }
            f.certify(*radius)?;
            io::write_json(output.as_ref().unwrap_or(file), &io::dfr_to_json(&f))?;
            let v = io::gap_report_to_json(&report, f.group());
            emit(
                cfg,
                &v,
                || format!("{} certified at radius {radius} over {} elements; τ = {}\n{}", f.name, report.elements, f.tau, minima_table(&report.minima)),
                || io::gap_report_to_csv(&report, f.group()),
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_machine(cmd: &MachineCmd, cfg: &CliConfig) -> Result<i32> {
    match cmd {
        MachineCmd::Build { dfr, mode, eps, overgroup, output } => {
            let f = load_dfr(dfr)?;
            let m = match mode {
                Mode::Poly => assemble_poly_machine(&f, *eps)?,
                Mode::Exp => assemble_exp_machine(&f, *eps)?,
                Mode::Unbounded => assemble_unbounded_machine(&f)?,
                Mode::Mo1qfa => build_mo1qfa(&f)?,
                Mode::Overgroup => {
                    let target = match overgroup {
                        Some(Overgroup::ZOver2z) => Presentation::z_over_2z(),
                        Some(Overgroup::DinfOverZ) => Presentation::dinf_over_z(),
                        None => return Err(Error::Invalid("--mode overgroup needs --overgroup".into())),
                    };
                    let base = if f.tau.as_exp().is_some() && f.tau.as_poly().is_none() {
                        assemble_exp_machine(&f, *eps)?
                    } else if f.tau.is_unbounded() {
                        assemble_unbounded_machine(&f)?
                    } else {
                        assemble_poly_machine(&f, *eps)?
                    };
                    transform_overgroup(&base, &target)?
                }
            };
            io::write_json(output, &io::machine_to_json(&m))?;
            if cfg.format == Format::Pretty {
                println!(
                    "{} machine over {}: d = {}, {} classical states, {} unitaries; wrote {}",
                    m.kind_tag(),
                    m.group.family.tag(),
                    m.d,
                    m.states.len(),
                    m.unitaries.len(),
                    output.display()
                );
            }
            Ok(EXIT_OK)
        }
        MachineCmd::Run { file, word } => {
            let m = load_machine(file)?;
            let w = m.group.parse_word(word)?;
            let mc = McConfig { trials: cfg.trials, seed: cfg.seed, step_limit: cfg.step_limit };
            let s = run_montecarlo(&m, &w, &mc)?;
            emit(
                cfg,
                &io::stats_to_json(&s),
                || {
                    format!(
                        "trials {}  accepts {}  rejects {}  step limits {}\naccept_freq {}  95% CI [{:.6}, {:.6}]\nmean steps {:.3}  sd {:.3}",
                        s.trials, s.accepts, s.rejects, s.step_limits, s.accept_freq, s.accept_ci.0, s.accept_ci.1, s.mean_steps, s.std_steps
                    )
                },
                || io::stats_to_csv(&[(word.clone(), s.clone())]),
            )?;
            Ok(EXIT_OK)
        }
        MachineCmd::Analyze { file, word } => {
            let m = load_machine(file)?;
            let w = m.group.parse_word(word)?;
            let a = analyze_acceptance(&m, &w)?;
            let v = io::round_analysis_to_json(&a);
            emit(
                cfg,
                &v,
                || {
                    format!(
                        "p_acc {}\np_rej {}\noverall_accept {} ({:.9})\noverall_reject {} ({:.9})\nexpected steps {:.3}",
                        a.p_acc,
                        a.p_rej,
                        a.overall_accept,
                        a.overall_accept_f64(),
                        a.overall_reject,
                        a.overall_reject_f64(),
                        a.expected_steps
                    )
                },
                || {
                    Ok(format!(
                        "p_acc,p_rej,overall_accept,overall_reject,expected_steps\n{},{},{},{},{}\n",
                        a.p_acc_f64(),
                        a.p_rej_f64(),
                        a.overall_accept_f64(),
                        a.overall_reject_f64(),
                        a.expected_steps
                    ))
                },
            )?;
            Ok(EXIT_OK)
        }
        MachineCmd::Profile { file, lengths } => {
            let m = load_machine(file)?;
            let fit = runtime_profile(&m, lengths, identity_word)?;
            emit(
                cfg,
                &io::runtime_fit_to_json(&fit),
                || {
                    let mut s = String::from("   n   expected steps\n");
                    for (n, e) in fit.lengths.iter().zip(&fit.expected_steps) {
                        s.push_str(&format!("{n:>4}   {e:.6e}\n"));
                    }
                    s.push_str(&format!(
                        "log-log slope {:.3} (R² {:.4}); log-linear slope {:.4} (R² {:.4}){}",
                        fit.poly_exponent,
                        fit.poly_r2,
                        fit.exp_slope,
                        fit.exp_r2,
                        if fit.noisy { "; sampled" } else { "" }
                    ));
                    s
                },
                || io::runtime_fit_to_csv(&fit),
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_verify(suite: &str, quick: bool, cfg: &CliConfig) -> Result<i32> {
    let mut sizes = if quick { Sizes::quick() } else { Sizes::full() };
    if cfg.seed != 0 {
        sizes.seed = cfg.seed;
    }
    let fx = Fixtures::new(sizes);
    let pretty = cfg.format == Format::Pretty;
    let results = run_suite(suite, &fx, &LibraryOracle, &mut |r| {
        if pretty {
            println!("{}", r.line());
        }
    })?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    match cfg.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&json!({ "suite": suite, "quick": quick, "results": results }))?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "title", "passed", "seconds", "detail"]).map_err(|e| Error::Invalid(e.to_string()))?;
            for r in &results {
                w.write_record([&r.id, &r.title, &r.passed.to_string(), &format!("{:.3}", r.seconds), &r.detail])
                    .map_err(|e| Error::Invalid(e.to_string()))?;
            }
            print!("{}", String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).unwrap());
        }
        Format::Pretty => println!("{}/{} criteria passed", results.len() - failed.len(), results.len()),
    }
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("verification failed: {}", failed.join(", "));
        Ok(EXIT_VERIFY)
    }
}

fn cmd_diophantine(alpha: &str, q_max: u64, cfg: &CliConfig) -> Result<i32> {
    let a = parse_alpha(alpha)?;
    let r = diophantine_scan(&a, q_max, cfg.precision)?;
    emit(
        cfg,
        &io::diophantine_to_json(&r),
        || {
            let mut s = format!("{} for q ≤ {q_max}: min ‖qα‖ = {:.6e}\n   q   ‖qα‖\n", a.describe(), r.min_distance());
            for (q, d) in &r.records {
                s.push_str(&format!("{q:>8}   {d:.6e}\n"));
            }
            s
        },
        || {
            let mut s = String::from("q,distance\n");
            for (q, d) in &r.records {
                s.push_str(&format!("{q},{d}\n"));
            }
            Ok(s)
        },
    )?;
    Ok(EXIT_OK)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Certification(_) => EXIT_CERTIFICATION,
        Error::AnalysisUnavailable(_) => EXIT_ANALYSIS,
        _ => EXIT_USAGE,
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let mut cfg = match &cli.global.config {
        Some(p) => CliConfig::parse(&std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?)?,
        None => CliConfig::default(),
    };
    cfg.apply(&cli.global);
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    match &cli.command {
        Command::Dfr(c) => cmd_dfr(c, &cfg),
        Command::Machine(c) => cmd_machine(c, &cfg),
        Command::Verify { suite, quick } => cmd_verify(suite, *quick, &cfg),
        Command::Diophantine { alpha, q_max } => cmd_diophantine(alpha, *q_max, &cfg),
    }
}

/// Parse `args`, run, and return the exit code. Errors are printed to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_and_overrides() {
        let mut c = CliConfig::parse("# lab box\nseed = 7\ntrials=50\nformat = json\n").unwrap();
        assert_eq!((c.seed, c.trials, c.format), (7, 50, Format::Json));
        c.apply(&Global { trials: Some(9), ..Global::default() });
        assert_eq!((c.seed, c.trials), (7, 9));
        assert!(CliConfig::parse("precision = 16").is_err());
        assert!(CliConfig::parse("trials = 0").is_err());
        assert!(CliConfig::parse("colour = red").is_err());
    }

    #[test]
    fn zm_with_m_1_is_usage_error() {
        assert_eq!(main_with_args(["qcfa", "dfr", "build", "--family", "zm", "--m", "1", "-o", "/dev/null"]), EXIT_USAGE);
    }

    #[test]
    fn unknown_suite_is_usage_error() {
        assert_eq!(main_with_args(["qcfa", "verify", "everything"]), EXIT_USAGE);
    }

    #[test]
    fn alpha_specs() {
        assert_eq!(parse_alpha("sqrt:2").unwrap(), AlphaSpec::Sqrt { n: 2 });
        assert_eq!(parse_alpha("rational:1/3").unwrap(), AlphaSpec::Rational { num: 1, den: 3 });
        assert!(parse_alpha("pi").is_err());
    }
}
