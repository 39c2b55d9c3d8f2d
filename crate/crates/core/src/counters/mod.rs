//! Counting systems for special primes, their witnesses, and the oracle-side
//! primality criteria.

mod criteria;
pub mod fermat;
pub mod mersenne;
pub mod twin;

use std::fmt;
use std::str::FromStr;

use rug::Integer;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::expdio::{expand_squares, ExpPolynomial, SquareSystem};
use crate::generators::FactorialScheme;
use crate::mazzanti::{
    choose_w_symbolic, count_solutions, m_profile, CountingInstance, LinearW, MProfile,
};
use crate::term::{eval_with, BinOp, Env, Term, UnOp};

pub use criteria::*;
pub use fermat::{build_s, fermat_witness};
pub use mersenne::{build_r, mersenne_witness};
pub use twin::{build_twin_system, twin_witness, TwinWitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Mersenne,
    Fermat,
    Twin,
    Sophie,
    /// (x + 2 - y)^2 with t(n) = n.
    Demo,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Mersenne,
        Family::Fermat,
        Family::Twin,
        Family::Sophie,
        Family::Demo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Mersenne => "mersenne",
            Family::Fermat => "fermat",
            Family::Twin => "twin",
            Family::Sophie => "sophie",
            Family::Demo => "demo",
        }
    }

    /// The counting system, if the family has one.
    pub fn spec(self) -> Option<CountingSpec> {
        match self {
            Family::Mersenne => Some(build_r()),
            Family::Fermat => Some(build_s()),
            Family::Twin => Some(build_twin_system(FactorialScheme::default())),
            Family::Sophie => None,
            Family::Demo => Some(demo_spec()),
        }
    }

    pub fn oracle_count(self, n: u64, budget: Budget) -> Result<u64> {
        match self {
            Family::Mersenne => mersenne_count_oracle(n, budget),
            Family::Fermat => fermat_count_oracle(n, budget),
            Family::Twin => twin_count_oracle(n, budget),
            Family::Sophie => sg_count_oracle(n, budget),
            Family::Demo => {
                let spec = demo_spec();
                let t = spec.t_at(n, budget)?.to_u64().unwrap_or(u64::MAX);
                crate::expdio::brute_count(&spec.poly(), t, budget)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family `{s}`")))
    }
}

/// A system of squares with bounds t(n), w(n) in the parameter n. The count
/// is HW(M(P, t(n), w(n))) / w(n) - t(n)^k + offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingSpec {
    pub family: Family,
    pub system: SquareSystem,
    pub t_of_n: Term,
    pub w_of_n: Term,
    pub offset: i64,
}

fn env_n(n: u64) -> Env {
    Env::from([("n".to_string(), Integer::from(n))])
}

impl CountingSpec {
    pub fn k_vars(&self) -> usize {
        self.system.unknowns.len()
    }

    pub fn poly(&self) -> ExpPolynomial {
        expand_squares(&self.system)
    }

    pub fn t_at(&self, n: u64, budget: Budget) -> Result<Integer> {
        eval_with(&self.t_of_n, &env_n(n), budget)
    }

    pub fn w_at(&self, n: u64, budget: Budget) -> Result<Integer> {
        eval_with(&self.w_of_n, &env_n(n), budget)
    }

    pub fn t_magnitude(&self, n: u64) -> Magnitude {
        Magnitude::of(&self.t_of_n, n)
    }

    pub fn w_magnitude(&self, n: u64) -> Magnitude {
        Magnitude::of(&self.w_of_n, n)
    }

    /// log10 of 2 w(n) t(n)^k, the bit length of M's largest term.
    pub fn log10_m_bits(&self, n: u64) -> f64 {
        let lt = self.t_magnitude(n).log10;
        let lw = self.w_magnitude(n).log10;
        std::f64::consts::LOG10_2 + lw + self.k_vars() as f64 * lt
    }
}

fn demo_spec() -> CountingSpec {
    let system =
        SquareSystem::parse(&["x", "y"], &[], &[("x + 2", "y")]).expect("static system parses");
    let lw: LinearW = choose_w_symbolic(&expand_squares(&system));
    let t = Term::var("n");
    CountingSpec {
        family: Family::Demo,
        system,
        w_of_n: Term::add(
            Term::mul(Term::int(lw.slope), t.clone()),
            Term::int(lw.intercept),
        ),
        t_of_n: t,
        offset: 0,
    }
}

/// Size of a nonnegative value: exact when small enough to compute.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Magnitude {
    pub log10: f64,
    /// Decimal digit count.
    pub digits: f64,
    pub exact: Option<String>,
}

const EXACT_BITS: u64 = 1 << 16;

impl Magnitude {
    pub fn of(t: &Term, n: u64) -> Magnitude {
        let env = env_n(n);
        match eval_with(t, &env, Budget::default().with_bits(EXACT_BITS)) {
            Ok(v) => Magnitude::from_integer(&v),
            Err(_) => {
                let log10 = log2_term(t, &env) * std::f64::consts::LOG10_2;
                Magnitude {
                    log10,
                    digits: log10.floor() + 1.0,
                    exact: None,
                }
            }
        }
    }

    pub fn from_integer(v: &Integer) -> Magnitude {
        let digits = if *v == 0 {
            1
        } else {
            v.to_string_radix(10).trim_start_matches('-').len()
        };
        Magnitude {
            log10: log2_int(v) * std::f64::consts::LOG10_2,
            digits: digits as f64,
            exact: Some(v.to_string()),
        }
    }
}

fn log2_int(v: &Integer) -> f64 {
    if *v <= 0 {
        return f64::NEG_INFINITY;
    }
    let bits = v.significant_bits();
    let shift = bits.saturating_sub(64);
    let top = Integer::from(v >> shift).to_f64();
    top.log2() + f64::from(shift)
}

/// log2 of a huge term value in floating point; subterms that fit
/// [`EXACT_BITS`] are evaluated exactly.
fn log2_term(t: &Term, env: &Env) -> f64 {
    if let Ok(v) = eval_with(t, env, Budget::default().with_bits(EXACT_BITS)) {
        return log2_int(&v);
    }
    // value of a subterm as f64, possibly infinite
    let val = |t: &Term| log2_term(t, env).exp2();
    match t {
        Term::Const(v) => log2_int(v),
        Term::Var(_) => f64::NAN,
        Term::Un(UnOp::Pow2, e) => val(e),
        Term::Un(UnOp::Fact, e) => {
            let x = val(e);
            x * x.log2() - x * std::f64::consts::LOG2_E
        }
        Term::Un(_, _) => f64::NAN,
        Term::Bin(op, l, r) => {
            let (a, b) = (log2_term(l, env), log2_term(r, env));
            match op {
                BinOp::Add => a.max(b) + (1.0 + (-(a - b).abs()).exp2()).log2(),
                BinOp::Monus => {
                    if a > b {
                        a + (1.0 - (b - a).exp2()).log2()
                    } else {
                        f64::NEG_INFINITY
                    }
                }
                BinOp::Mul => a + b,
                BinOp::DivFloor => a - b,
                BinOp::Pow => b.exp2() * a,
                BinOp::Min => a.min(b),
                BinOp::Mod => a.min(b),
                _ => f64::NAN,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolicReport {
    pub family: Family,
    pub n: u64,
    pub k_vars: Option<usize>,
    pub squares: Option<usize>,
    pub raw_monomials: Option<usize>,
    pub monomials: Option<usize>,
    pub profile: Option<MProfile>,
    pub linear_w: Option<LinearW>,
    pub offset: Option<i64>,
    pub t: Option<Magnitude>,
    pub w: Option<Magnitude>,
    /// log10 of the bit length of M's largest term.
    pub log10_m_bits: Option<f64>,
    pub oracle_count: Option<u64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountResult {
    Count(i64),
    Symbolic(Box<SymbolicReport>),
}

/// Counts through M when it fits the budget, else reports the sizes
/// involved.
pub fn count_via_term(family: Family, n: u64, budget: Budget) -> Result<CountResult> {
    let oracle = family.oracle_count(n, budget).ok();
    let Some(spec) = family.spec() else {
        return Ok(CountResult::Symbolic(Box::new(SymbolicReport {
            family,
            n,
            k_vars: None,
            squares: None,
            raw_monomials: None,
            monomials: None,
            profile: None,
            linear_w: None,
            offset: None,
            t: None,
            w: None,
            log10_m_bits: None,
            oracle_count: oracle,
            note: "no counting system for this family".into(),
        })));
    };
    let log10_bits = spec.log10_m_bits(n);
    if log10_bits.is_finite() && log10_bits < (budget.bits as f64).log10() {
        let t = spec.t_at(n, budget)?.to_u64();
        let w = spec.w_at(n, budget)?.to_u64();
        if let (Some(t), Some(w)) = (t, w) {
            if t > 0 {
                let poly = spec
                    .poly()
                    .fix_params(&vec![Integer::from(n); spec.system.params.len()])?;
                let c = count_solutions(&CountingInstance::new(poly, t, w)?, budget)?;
                return Ok(CountResult::Count(c as i64 + spec.offset));
            }
        }
    }
    let poly = spec.poly();
    Ok(CountResult::Symbolic(Box::new(SymbolicReport {
        family,
        n,
        k_vars: Some(spec.k_vars()),
        squares: Some(spec.system.squares.len()),
        raw_monomials: Some(spec.system.raw_monomial_count()),
        monomials: Some(poly.len()),
        profile: Some(m_profile(&poly)),
        linear_w: Some(choose_w_symbolic(&poly)),
        offset: Some(spec.offset),
        t: Some(spec.t_magnitude(n)),
        w: Some(spec.w_magnitude(n)),
        log10_m_bits: Some(log10_bits),
        oracle_count: oracle,
        note: format!("M needs about 10^{log10_bits:.1} bits"),
    })))
}
