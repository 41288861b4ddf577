use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use equidist::analysis::{oscillation_test, star_discrepancy, ud_test, Tabular};
use equidist::harness::{run_experiment, scan_alpha, scan_beta, ScanConfig, ScanReport, EXPERIMENTS};
use equidist::mobius::{mobius_sequence, mobius_sieve};
use equidist::sequences::{
    generate_power_sequence_with, parse_kv, poly_mod_one, to_exponential, ComplexSequence, GenerateOptions,
    ModOneSample, Polynomial, SequenceSpec,
};
use equidist::{Error, ExactReal};

#[derive(Parser)]
#[command(name = "equidist", version, about = "Equidistribution experiments for lacunary sequences modulo one")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified fractional parts of alpha beta^n g(beta) prod (beta^h - 1) + Q(n)
    Gen(Common),
    /// Weyl sums for h = 1..H with a uniform-distribution verdict
    Weyl(Common),
    /// Star discrepancy of a generated sample
    Discrepancy(Common),
    /// Averages of c_n e(P(n)) and the growth condition
    Oscillation(Common),
    /// Möbius sieve summary and optional table dump
    Mobius(Common),
    /// Scan dyadic beta values with alpha fixed
    ScanBeta(Common),
    /// Scan dyadic alpha values with beta fixed
    ScanAlpha(Common),
    /// Run a named experiment
    Experiment {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

/// Every option is also accepted as `key = value` in `--config` files and
/// as `--set key=value`; command-line flags win over the config file.
#[derive(Args, Default)]
struct Common {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// g(x), e.g. "x*pow1m(x,2) + 1/3"
    #[arg(long)]
    g: Option<String>,
    /// Product exponents h1,h2,...
    #[arg(long)]
    hs: Option<String>,
    /// Coefficients c0,c1,... of Q
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Target bits for `gen`, sample resolution for scans
    #[arg(long)]
    bits: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output file (directory for `experiment`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lo: Option<String>,
    #[arg(long)]
    hi: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    /// Largest Weyl frequency H
    #[arg(long)]
    h: Option<String>,
    /// spec, poly, mobius or ones
    #[arg(long)]
    source: Option<String>,
    /// Phase polynomials for `oscillation`, separated by ';'
    #[arg(long, allow_hyphen_values = true)]
    phase: Option<String>,
    /// Growth exponents, comma separated
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    checkpoints: Option<String>,
    /// Extra scan values, separated by ';'
    #[arg(long)]
    overrides: Option<String>,
    /// Minimum pass fraction for scans
    #[arg(long)]
    min_fraction: Option<String>,
    /// Binary table file for `mobius`
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn settings(&self) -> Result<Settings, Error> {
        let mut map = match &self.config {
            Some(path) => parse_kv(&fs::read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("g", &self.g),
            ("hs", &self.hs),
            ("q", &self.q),
            ("n", &self.n),
            ("bits", &self.bits),
            ("seed", &self.seed),
            ("format", &self.format),
            ("lo", &self.lo),
            ("hi", &self.hi),
            ("samples", &self.samples),
            ("threshold", &self.threshold),
            ("h", &self.h),
            ("source", &self.source),
            ("phase", &self.phase),
            ("lambda", &self.lambda),
            ("checkpoints", &self.checkpoints),
            ("overrides", &self.overrides),
            ("min_fraction", &self.min_fraction),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            map.insert(k.trim().replace('-', "_"), v.trim().to_string());
        }
        if let Some(out) = &self.out {
            map.insert("out".into(), out.display().to_string());
        }
        if let Some(d) = &self.dump {
            map.insert("dump".into(), d.display().to_string());
        }
        Ok(Settings(map))
    }
}

struct Settings(BTreeMap<String, String>);

impl Settings {
    fn str(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, Error> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| Error::Config(format!("bad value {v:?} for {key}"))),
        }
    }

    fn json(&self) -> Result<bool, Error> {
        match self.str("format").unwrap_or("csv") {
            "csv" => Ok(false),
            "json" => Ok(true),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }

    fn checkpoints(&self) -> Result<Vec<usize>, Error> {
        match self.str("checkpoints") {
            None => Ok(Vec::new()),
            Some(s) => s
                .split(',')
                .map(|c| c.trim().parse().map_err(|_| Error::Config(format!("bad checkpoint {c:?}"))))
                .collect(),
        }
    }

    fn spec(&self) -> Result<SequenceSpec, Error> {
        let mut map = self.0.clone();
        map.entry("alpha".into()).or_insert_with(|| "1".into());
        let spec = SequenceSpec::from_map(&map)?;
        spec.validate()?;
        Ok(spec)
    }

    fn n(&self) -> Result<usize, Error> {
        self.num("n", 1000)
    }

    /// The sample selected by `source` (`spec` or `poly`).
    fn sample(&self) -> Result<ModOneSample, Error> {
        match self.str("source").unwrap_or("spec") {
            "spec" => {
                let opts = GenerateOptions {
                    target_bits: self.num("bits", 60)?,
                    max_bits: self.num("max_bits", 1 << 24)?,
                    ..GenerateOptions::default()
                };
                generate_power_sequence_with(&self.spec()?, self.n()?, &opts)
            }
            "poly" => {
                let q = Polynomial::parse_list(self.str("q").ok_or_else(|| Error::Config("poly source needs q".into()))?)?;
                poly_mod_one(&q, self.n()?)
            }
            other => Err(Error::Config(format!("unknown sample source {other:?}"))),
        }
    }

    fn emit(&self, text: &str) -> Result<(), Error> {
        match self.str("out") {
            Some(path) => fs::write(path, text)?,
            None => io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn emit_report<T: Tabular>(&self, r: &T) -> Result<(), Error> {
        let text = if self.json()? { r.to_json() + "\n" } else { r.to_csv() };
        self.emit(&text)
    }
}

/// 0 pass, 1 criterion failure, 2 usage or config error, 3 precision exhausted.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted { .. } => 3,
        _ => 2,
    }
}

fn verdict(ok: bool) -> u8 {
    u8::from(!ok)
}

fn gen(s: &Settings) -> Result<u8, Error> {
    let x = s.sample()?;
    if s.json()? {
        s.emit(&(x.to_json() + "\n"))?;
    } else {
        let mut out = format!("# {} certified_error={:e} working_bits={}\nn,value\n", x.meta.source, x.certified_error, x.meta.working_bits);
        for (i, v) in x.values.iter().enumerate() {
            out.push_str(&format!("{},{:e}\n", i + 1, v));
        }
        s.emit(&out)?;
    }
    Ok(0)
}

fn weyl(s: &Settings) -> Result<u8, Error> {
    let x = s.sample()?;
    let threshold = s.str("threshold").map(|_| s.num("threshold", 0.0)).transpose()?;
    let r = ud_test(&x, s.num("h", 5)?, &s.checkpoints()?, threshold)?;
    s.emit_report(&r)?;
    eprintln!("max |S| = {:e}, threshold = {:e}, consistent with u.d.: {}", r.final_max, r.threshold, r.consistent_with_ud);
    Ok(verdict(r.consistent_with_ud))
}

fn discrepancy(s: &Settings) -> Result<u8, Error> {
    let x = s.sample()?;
    let r = star_discrepancy(&x.values);
    s.emit_report(&r)?;
    Ok(match s.str("threshold") {
        Some(_) => verdict(r.d_star < s.num("threshold", 0.0)?),
        None => 0,
    })
}

fn oscillation(s: &Settings) -> Result<u8, Error> {
    let n = s.n()?;
    let c: ComplexSequence<f64> = match s.str("source").unwrap_or("mobius") {
        "mobius" => mobius_sequence(&mobius_sieve(n)?, n)?,
        "ones" => ComplexSequence::ones(n),
        "spec" | "poly" => to_exponential(&s.sample()?),
        other => return Err(Error::Config(format!("unknown sequence source {other:?}"))),
    };
    let phases: Vec<Polynomial<ExactReal>> = s
        .str("phase")
        .unwrap_or("0,sqrt(2)-1")
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(Polynomial::parse_list)
        .collect::<Result<_, _>>()?;
    let lambdas: Vec<f64> = match s.str("lambda") {
        None => vec![2.0],
        Some(l) => l
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| Error::Config(format!("bad lambda {v:?}"))))
            .collect::<Result<_, _>>()?,
    };
    let r = oscillation_test(&c, &phases, &s.checkpoints()?, &lambdas)?;
    s.emit_report(&r)?;
    let threshold: f64 = s.num("threshold", 0.05)?;
    let ok = phases.iter().all(|p| r.final_magnitude(&p.to_csv_list()).is_some_and(|m| m < threshold));
    Ok(verdict(ok))
}

fn mobius(s: &Settings) -> Result<u8, Error> {
    let n = s.num("n", 1_000_000)?;
    let t = mobius_sieve(n)?;
    if let Some(path) = s.str("dump") {
        t.dump(io::BufWriter::new(fs::File::create(path)?))?;
    }
    let squarefree = t.values().iter().filter(|&&m| m != 0).count();
    let mertens: i64 = t.values().iter().map(|&m| m as i64).sum();
    let density = squarefree as f64 / n as f64;
    let text = if s.json()? {
        format!("{{\n  \"n\": {n},\n  \"squarefree_density\": {density},\n  \"mertens\": {mertens}\n}}\n")
    } else {
        format!("n,squarefree_density,mertens\n{n},{density:e},{mertens}\n")
    };
    s.emit(&text)?;
    Ok(0)
}

fn scan(s: &Settings, beta_axis: bool) -> Result<u8, Error> {
    let base = if beta_axis { ScanConfig::beta_default() } else { ScanConfig::alpha_default() };
    let mut keys = s.0.clone();
    for k in ["source", "phase", "lambda", "checkpoints", "min_fraction", "dump"] {
        keys.remove(k);
    }
    let cfg = base.apply(&keys)?;
    let r: ScanReport = if beta_axis { scan_beta(&cfg)? } else { scan_alpha(&cfg)? };
    s.emit_report(&r)?;
    eprintln!("pass fraction {:.3} ({} pass, {} fail, {} error)", r.pass_fraction, r.passes, r.fails, r.errors);
    Ok(verdict(r.pass_fraction >= s.num("min_fraction", 0.95)?))
}

fn experiment(name: &str, s: &Settings) -> Result<u8, Error> {
    if !EXPERIMENTS.contains(&name) {
        return Err(Error::UnknownExperiment(format!("{name} (known: {})", EXPERIMENTS.join(", "))));
    }
    let mut overrides = s.0.clone();
    overrides.remove("out");
    overrides.remove("format");
    let o = run_experiment(name, &overrides)?;
    match s.str("out") {
        Some(dir) => o.write(std::path::Path::new(dir))?,
        None if s.json()? => println!("{}", o.to_json()),
        None => print!("{}", o.csv),
    }
    for c in &o.checks {
        eprintln!("[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(verdict(o.passed))
}

fn run(cli: Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Gen(c) => gen(&c.settings()?),
        Command::Weyl(c) => weyl(&c.settings()?),
        Command::Discrepancy(c) => discrepancy(&c.settings()?),
        Command::Oscillation(c) => oscillation(&c.settings()?),
        Command::Mobius(c) => mobius(&c.settings()?),
        Command::ScanBeta(c) => scan(&c.settings()?, true),
        Command::ScanAlpha(c) => scan(&c.settings()?, false),
        Command::Experiment { name, common } => experiment(name, &common.settings()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
