use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use siegel2::format::{fraction, read_expansion, write_expansion};
use siegel2::verify::{
    check_congruence, check_vanishing, sharpness_witness, sturm_bound, verify_identities, Report, Suite, Verdict,
};
use siegel2::{Error, GeneratorName, GeneratorRegistry, PrimePower, Rational};

/// Exact Siegel modular form expansions and Sturm-bound checks.
#[derive(Parser, Debug)]
#[command(name = "siegel2", version)]
struct Cli {
    /// Cache directory for generator expansions [default: $SIEGEL2_CACHE or ./cache]
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Output style for verification reports
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    /// Every check line
    Text,
    /// Only the RESULT lines
    Summary,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a generator and store it in the cache
    Build {
        #[arg(long)]
        name: GeneratorName,
        #[arg(long, default_value_t = 8)]
        prec: u32,
    },
    /// Print a generator expansion, or one coefficient with --at m,r,n
    Show {
        #[arg(long)]
        name: GeneratorName,
        #[arg(long, default_value_t = 8)]
        prec: u32,
        #[arg(long, value_parser = parse_index, allow_hyphen_values = true)]
        at: Option<(i64, i64, i64)>,
    },
    /// Print the Sturm bound b_{ki}
    SturmBound {
        #[arg(long, allow_hyphen_values = true)]
        weight: i64,
        #[arg(long, default_value_t = 1)]
        index: i64,
    },
    /// Check that an expansion file vanishes mod p^nu up to a bound
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        nu: u32,
        /// Bound on m, n (may be a fraction) [default: the Sturm bound of the file's weight]
        #[arg(long, value_parser = parse_rational)]
        bound: Option<Rational>,
        /// Index i for the default bound b_{ki}
        #[arg(long, default_value_t = 1)]
        index: i64,
    },
    /// Check that two expansion files are congruent mod p^nu
    Congruent {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        nu: u32,
    },
    /// Produce and certify the sharpness witness of weight k
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        weight: i64,
        #[arg(long)]
        prime: u64,
    },
    /// Run a verification suite (or `all`)
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        prec: Option<u32>,
    },
}

fn parse_index(s: &str) -> Result<(i64, i64, i64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected m,r,n, got {s:?}"));
    }
    let v: Vec<i64> = parts
        .iter()
        .map(|p| p.parse::<i64>().map_err(|_| format!("invalid integer {p:?}")))
        .collect::<Result<_, _>>()?;
    Ok((v[0], v[1], v[2]))
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    siegel2::format::parse_fraction(s).ok_or_else(|| format!("invalid rational {s:?}"))
}

/// Exit status: 0 pass, 1 mathematical failure, 2 usage or data error.
enum Outcome {
    Pass,
    Fail,
    Unusable,
}

fn registry(cli: &Cli) -> GeneratorRegistry {
    let dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(siegel2::generators::CACHE_ENV).filter(|d| !d.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cache"));
    GeneratorRegistry::with_cache_dir(dir)
}

fn print_report(report: &Report, output: Output) {
    match output {
        Output::Text => print!("{report}"),
        Output::Summary => {
            let text = report.to_string();
            if let Some(last) = text.lines().last() {
                println!("{last}");
            }
        }
    }
}

fn report_outcome(report: &Report) -> Outcome {
    if report.failed() {
        Outcome::Fail
    } else if report.passed() {
        Outcome::Pass
    } else {
        Outcome::Unusable
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Build { name, prec } => {
            let reg = registry(cli);
            let f = reg.get(*name, *prec)?;
            let path = reg.cache_path(*name, *prec).expect("cache directory configured");
            if !path.exists() {
                siegel2::format::save_expansion(&path, name.as_str(), &f)?;
            }
            println!("{name} weight {} precision {} entries {}", f.weight(), f.precision(), f.nonzero_entries().count());
            println!("cached {}", path.display());
            Ok(Outcome::Pass)
        }
        Command::Show { name, prec, at } => {
            let f = registry(cli).get(*name, *prec)?;
            match at {
                Some((m, r, n)) => {
                    if *m < 0 || *n < 0 || *m > f.bound() || *n > f.bound() {
                        return Err(Error::Precision(format!("index ({m}, {r}, {n}) outside precision {prec}")));
                    }
                    println!("{}", fraction(&f.coeff(*m, *r, *n)));
                }
                None => print!("{}", write_expansion(name.as_str(), &f)),
            }
            Ok(Outcome::Pass)
        }
        Command::SturmBound { weight, index } => {
            if *weight < 0 || *index < 1 {
                return Err(Error::Usage("weight must be nonnegative and index at least 1".into()));
            }
            println!("{}", sturm_bound(*weight, *index));
            Ok(Outcome::Pass)
        }
        Command::Check { file, prime, nu, bound, index } => {
            let pp = PrimePower::new(*prime, *nu)?;
            let (_, f) = read_expansion(file)?;
            let bound = match bound {
                Some(b) => b.clone(),
                None => Rational::from_integer(sturm_bound(f.weight(), *index).into()),
            };
            let report = check_vanishing(&f, pp, &bound)?;
            print!("{report}");
            if report.precision_note.is_some() {
                return Ok(Outcome::Unusable);
            }
            Ok(match report.verdict {
                Verdict::Pass => Outcome::Pass,
                Verdict::Fail => Outcome::Fail,
                Verdict::Inconclusive => Outcome::Unusable,
            })
        }
        Command::Congruent { a, b, prime, nu } => {
            let pp = PrimePower::new(*prime, *nu)?;
            let (_, f) = read_expansion(a)?;
            let (_, g) = read_expansion(b)?;
            let report = check_congruence(&f, &g, pp)?;
            print!("{report}");
            Ok(if report.passed() { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Witness { weight, prime } => {
            let w = sharpness_witness(&registry(cli), *weight, *prime)?;
            print!("{w}");
            Ok(if w.certified() { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Verify { suite, prime, prec } => {
            let reg = registry(cli);
            let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
            let mut outcome = Outcome::Pass;
            let mut total = Report::new("all");
            for s in suites {
                let report = verify_identities(&reg, s, *prime, *prec)?;
                print_report(&report, cli.output);
                match report_outcome(&report) {
                    Outcome::Fail => outcome = Outcome::Fail,
                    Outcome::Unusable if !matches!(outcome, Outcome::Fail) => outcome = Outcome::Unusable,
                    _ => {}
                }
                total.extend(report);
            }
            if suite == "all" {
                println!("RESULT all {}/{}", total.pass_count(), total.checked_count());
            }
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Ok(Outcome::Unusable) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
