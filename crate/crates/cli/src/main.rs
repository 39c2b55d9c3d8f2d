use std::io::{ErrorKind, Read, Write};
use std::process::ExitCode;

use atl_core::counters::{self, count_via_term, twin, CountResult, Family};
use atl_core::expdio::{system_to_json, witness_to_json};
use atl_core::generators::{FactorialScheme, Generator};
use atl_core::mazzanti::{count_solutions, instance_from_json};
use atl_core::sequences::{extract_divmod_term, CRecSpec};
use atl_core::term::{self, Env};
use atl_core::verify::{verify_suite, Selector};
use atl_core::{Budget, Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rug::Integer;
use serde_json::{json, Value};

/// Arithmetic terms for special primes.
#[derive(Parser)]
#[command(name = "atl", version)]
struct Cli {
    /// Largest intermediate integer in bits (default: ATL_BIT_BUDGET or 2^24).
    #[arg(long, global = true)]
    bit_budget: Option<u64>,
    /// Largest number of lattice points a brute-force count may visit.
    #[arg(long, global = true)]
    point_budget: Option<u64>,
    /// Print huge numbers in full.
    #[arg(long, global = true)]
    full: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a term.
    Eval {
        #[arg(long)]
        expr: String,
        /// Variable binding NAME=VALUE; repeatable.
        #[arg(long, value_parser = parse_binding)]
        bind: Vec<(String, Integer)>,
        /// Rewrite sugar into the base language before evaluating.
        #[arg(long)]
        expand: bool,
    },
    /// Print a term's JSON syntax tree.
    Parse {
        #[arg(long)]
        expr: String,
    },
    /// Tabulate a prime generator.
    Gen {
        family: GenFamily,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = 1)]
        variant: u8,
        #[arg(long, value_enum, default_value_t = Mode::Semantic)]
        mode: Mode,
    },
    /// Count special primes up to n.
    Count {
        family: CountFamily,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = CountMode::Oracle)]
        mode: CountMode,
    },
    /// Print the witness of a counting system as JSON.
    Witness {
        family: SystemFamily,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_enum, default_value_t = Scheme::Minimal)]
        scheme: Scheme,
    },
    /// Print a counting system with its t(n) and w(n).
    System {
        family: SystemFamily,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
        #[arg(long, value_enum, default_value_t = Scheme::Pow8sq)]
        scheme: Scheme,
    },
    /// Count solutions of a CountingInstance read from a file or stdin.
    MazzantiCount {
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Div-mod closed form of a C-recursive sequence read from a file or stdin.
    Crec {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Run the verification suite and print its JSON report.
    Verify {
        #[arg(value_parser = parse_selector)]
        selector: Selector,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    Mersenne,
    Fermat,
    Twin,
    Sophie,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountFamily {
    Mersenne,
    Fermat,
    Twin,
    Sophie,
    Demo,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemFamily {
    Mersenne,
    Fermat,
    Twin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Semantic,
    Term,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMode {
    Oracle,
    Term,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Pow8sq,
    Minimal,
}

impl From<Scheme> for FactorialScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Pow8sq => FactorialScheme::Pow8Sq,
            Scheme::Minimal => FactorialScheme::Minimal,
        }
    }
}

fn parse_binding(s: &str) -> std::result::Result<(String, Integer), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value = value.trim().parse::<Integer>().map_err(|e| e.to_string())?;
    if value < 0 {
        return Err("values must be nonnegative".into());
    }
    Ok((name.trim().to_string(), value))
}

fn parse_selector(s: &str) -> std::result::Result<Selector, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

macro_rules! outln {
    ($($arg:tt)*) => {
        emit(&format!("{}\n", format_args!($($arg)*)))
    };
}

/// Numbers with more digits print as a digit count with head and tail.
const FULL_DIGITS: usize = 10_000;
const HEAD_TAIL: usize = 20;

fn show(v: &Integer, full: bool) -> String {
    let s = v.to_string();
    if full || s.len() <= FULL_DIGITS {
        return s;
    }
    format!(
        "{}...{} ({} digits)",
        &s[..HEAD_TAIL],
        &s[s.len() - HEAD_TAIL..],
        s.len()
    )
}

fn read_json(input: &str) -> Result<Value> {
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Format(e.to_string()))?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| Error::Format(format!("{input}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn generator(family: GenFamily, variant: u8) -> Generator {
    match family {
        GenFamily::Mersenne => Generator::Mersenne(variant),
        GenFamily::Fermat => Generator::Fermat(variant),
        GenFamily::Twin => Generator::Twin,
        GenFamily::Sophie => Generator::Sophie,
    }
}

fn family_of(f: CountFamily) -> Family {
    match f {
        CountFamily::Mersenne => Family::Mersenne,
        CountFamily::Fermat => Family::Fermat,
        CountFamily::Twin => Family::Twin,
        CountFamily::Sophie => Family::Sophie,
        CountFamily::Demo => Family::Demo,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut budget = Budget::from_env();
    if let Some(bits) = cli.bit_budget {
        budget = budget.with_bits(bits);
    }
    if let Some(points) = cli.point_budget {
        budget = budget.with_points(points);
    }
    let full = cli.full;
    match cli.command {
        Command::Eval { expr, bind, expand } => {
            let mut t = term::parse(&expr)?;
            if expand {
                t = term::expand_sugar(&t);
            }
            let env: Env = bind.into_iter().collect();
            outln!("{}", show(&term::eval_with(&t, &env, budget)?, full));
        }
        Command::Parse { expr } => outln!("{}", pretty(&term::to_json(&term::parse(&expr)?))),
        Command::Gen {
            family,
            n_max,
            variant,
            mode,
        } => {
            let g = generator(family, variant);
            let mut out = String::new();
            for n in 0..=n_max {
                let v = match mode {
                    Mode::Semantic => Integer::from(g.semantic(n)?),
                    Mode::Term => g.term_eval(n, budget)?,
                };
                match family {
                    GenFamily::Twin => {
                        out.push_str(&format!("{n}\t{v},{}\n", Integer::from(&v + 2u32)))
                    }
                    _ => out.push_str(&format!("{n}\t{}\n", show(&v, full))),
                }
            }
            emit(&out);
        }
        Command::Count { family, n, mode } => {
            let family = family_of(family);
            match mode {
                CountMode::Oracle => outln!("{}", family.oracle_count(n, budget)?),
                CountMode::Term => match count_via_term(family, n, budget)? {
                    CountResult::Count(c) => outln!("{c}"),
                    CountResult::Symbolic(rep) => {
                        outln!(
                            "{}",
                            pretty(&serde_json::to_value(&*rep).expect("report serializes"))
                        )
                    }
                },
            }
        }
        Command::Witness {
            family,
            k,
            n,
            scheme,
        } => {
            let n = n.unwrap_or(match family {
                SystemFamily::Twin => k + 2,
                _ => k,
            });
            let out = match family {
                SystemFamily::Mersenne => {
                    counters::mersenne_witness(k, n)?.map(|w| witness_to_json(&w))
                }
                SystemFamily::Fermat => {
                    counters::fermat_witness(k, n)?.map(|w| witness_to_json(&w))
                }
                SystemFamily::Twin => counters::twin_witness(k, n, scheme.into(), budget)?.map(
                    |tw| json!({ "values": witness_to_json(&tw.values), "pending": tw.pending }),
                ),
            };
            outln!("{}", pretty(&out.unwrap_or(Value::Null)));
        }
        Command::System {
            family,
            emit,
            scheme,
        } => {
            let spec = match family {
                SystemFamily::Mersenne => counters::build_r(),
                SystemFamily::Fermat => counters::build_s(),
                SystemFamily::Twin => counters::build_twin_system(scheme.into()),
            };
            match emit {
                Emit::Json => {
                    let mut v = json!({
                        "system": system_to_json(&spec.system),
                        "t": term::to_json(&spec.t_of_n),
                        "w": term::to_json(&spec.w_of_n),
                        "offset": spec.offset,
                        "k_vars": spec.k_vars(),
                    });
                    if let SystemFamily::Twin = family {
                        v["chain"] = serde_json::to_value(twin::twin_chain(scheme.into()))
                            .expect("steps serialize");
                    }
                    outln!("{}", pretty(&v));
                }
                Emit::Text => {
                    let p = atl_core::expdio::ExpPolynomial::new(
                        spec.system.unknowns.clone(),
                        spec.system.params.clone(),
                        Vec::new(),
                    );
                    for sq in &spec.system.squares {
                        let side = |ms: &[atl_core::expdio::Monomial]| {
                            let mut q = p.clone();
                            q.monomials = ms.to_vec();
                            if ms.is_empty() {
                                "0".to_string()
                            } else {
                                q.to_text()
                            }
                        };
                        outln!("({} - {})^2", side(&sq.l), side(&sq.r));
                    }
                    outln!("unknowns: {}", spec.system.unknowns.join(", "));
                    outln!("t(n) = {}", term::render(&spec.t_of_n));
                    outln!("w(n) = {}", term::render(&spec.w_of_n));
                    outln!("offset: {}", spec.offset);
                }
            }
        }
        Command::MazzantiCount { input } => {
            let ci = instance_from_json(&read_json(&input)?)?;
            outln!("{}", count_solutions(&ci, budget)?);
        }
        Command::Crec { input, emit } => {
            let spec = CRecSpec::from_json(&read_json(&input)?)?;
            let d = extract_divmod_term(&spec)?;
            match emit {
                Emit::Text => {
                    outln!("{}", term::render(&d.term));
                    outln!(
                        "c = {}, validity: {:?}, valid for n >= {}",
                        d.c, d.validity, d.valid_from
                    );
                }
                Emit::Json => outln!(
                    "{}",
                    pretty(&json!({
                        "term": term::to_json(&d.term),
                        "c": d.c.to_string(),
                        "validity": d.validity,
                        "valid_from": d.valid_from,
                    }))
                ),
            }
        }
        Command::Verify { selector } => {
            let report = verify_suite(selector, budget);
            outln!(
                "{}",
                pretty(&serde_json::to_value(&report).expect("report serializes"))
            );
            if !report.all_passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
