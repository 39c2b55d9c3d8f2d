//! Prime generators from Wilson's theorem. Each generator has a semantic
//! evaluator (modular factorials) and a term builder in `n`.

use std::fmt;
use std::str::FromStr;

use rug::Integer;
use serde::Serialize;

use crate::budget::Budget;
use crate::counters::factorial_mod_u64;
use crate::error::{Error, Result};
use crate::term::{eval_with, Env, Term};

/// The choice of r(n) >= (n+1)^{n+2} in n! = floor(r^n / C(r, n)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum FactorialScheme {
    /// r(n) = 8^{n^2}
    #[default]
    Pow8Sq,
    /// r(n) = (n+1)^{n+2}
    Minimal,
}

impl FactorialScheme {
    pub fn name(self) -> &'static str {
        match self {
            FactorialScheme::Pow8Sq => "pow8sq",
            FactorialScheme::Minimal => "minimal",
        }
    }

    /// r(x) as a term.
    pub fn r_term(self, x: Term) -> Term {
        match self {
            FactorialScheme::Pow8Sq => Term::pow(Term::int(8), Term::mul(x.clone(), x)),
            FactorialScheme::Minimal => Term::pow(
                Term::add(x.clone(), Term::int(1)),
                Term::add(x, Term::int(2)),
            ),
        }
    }
}

impl fmt::Display for FactorialScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FactorialScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pow8sq" => Ok(FactorialScheme::Pow8Sq),
            "minimal" => Ok(FactorialScheme::Minimal),
            _ => Err(Error::InvalidArgument(format!(
                "unknown factorial scheme `{s}`"
            ))),
        }
    }
}

pub const FACTORIAL_SEMANTIC_MAX_N: u64 = 5000;
pub const MERSENNE_GEN_MAX_N: u64 = 20;
pub const FERMAT_GEN1_MAX_N: u64 = 16;
pub const FERMAT_GEN2_MAX_N: u64 = 4;

pub fn factorial_semantic(n: u64) -> Result<Integer> {
    if n > FACTORIAL_SEMANTIC_MAX_N {
        return Err(Error::budget(
            "n!",
            format!("n = {n}"),
            format!("n <= {FACTORIAL_SEMANTIC_MAX_N}"),
        ));
    }
    Ok(Integer::from(Integer::factorial(n as u32)))
}

/// n! mod m by a product loop; m = 0 is rejected.
pub fn factorial_mod(n: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(factorial_mod_u64(n, m))
}

/// floor(r(n)^n / C(r(n), n)).
pub fn factorial_term(scheme: FactorialScheme) -> Term {
    let n = || Term::var("n");
    let r = || scheme.r_term(n());
    Term::div(Term::pow(r(), n()), Term::binom(r(), n()))
}

/// Evaluates [`factorial_term`] with binomials as primitives.
pub fn factorial_term_eval(n: u64, scheme: FactorialScheme, budget: Budget) -> Result<Integer> {
    eval_with(&factorial_term(scheme), &env_n(n), budget)
}

fn env_n(n: u64) -> Env {
    Env::from([("n".to_string(), Integer::from(n))])
}

fn check_c(c: u64) -> Result<()> {
    if c == 2 || c == 3 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("c must be 2 or 3, got {c}")))
    }
}

/// c + (c n!) mod (n + 1): t(n) for c = 2, z(n) for c = 3.
pub fn wilson_gen(c: u64, n: u64) -> Result<u64> {
    check_c(c)?;
    let m = u128::from(n) + 1;
    let f = u128::from(factorial_mod_u64(n, n + 1));
    Ok(c + ((u128::from(c) * f) % m) as u64)
}

/// c + (c x!) mod (x + 1) as a term.
pub fn wilson_term(c: u64, x: Term) -> Term {
    Term::add(
        Term::int(c),
        Term::rem(
            Term::mul(Term::int(c), Term::fact(x.clone())),
            Term::add(x, Term::int(1)),
        ),
    )
}

fn pow2_minus(e: u64, sub: u64, max_e: u64) -> Result<u64> {
    if e > max_e {
        return Err(Error::budget(
            "generator argument",
            format!("2^{e}"),
            format!("2^{max_e}"),
        ));
    }
    Ok((1u64 << e) - sub)
}

/// m1(n) = z(2^{n+1} - 2), m2(n) = z(2^{t(n)} - 2).
pub fn mersenne_gen(n: u64, variant: u8) -> Result<u64> {
    let arg = match variant {
        1 => {
            if n > MERSENNE_GEN_MAX_N {
                return Err(Error::budget(
                    "m1",
                    format!("n = {n}"),
                    format!("n <= {MERSENNE_GEN_MAX_N}"),
                ));
            }
            pow2_minus(n + 1, 2, MERSENNE_GEN_MAX_N + 1)?
        }
        2 => pow2_minus(wilson_gen(2, n)?, 2, MERSENNE_GEN_MAX_N + 1)?,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "variant must be 1 or 2, got {variant}"
            )))
        }
    };
    wilson_gen(3, arg)
}

/// f1(n) = z(2^{n+2}), f2(n) = z(2^{2^n}).
pub fn fermat_gen(n: u64, variant: u8) -> Result<u64> {
    let arg = match variant {
        1 => {
            if n > FERMAT_GEN1_MAX_N {
                return Err(Error::budget(
                    "f1",
                    format!("n = {n}"),
                    format!("n <= {FERMAT_GEN1_MAX_N}"),
                ));
            }
            1u64 << (n + 2)
        }
        2 => {
            if n > FERMAT_GEN2_MAX_N {
                return Err(Error::budget(
                    "f2",
                    format!("n = {n}"),
                    format!("n <= {FERMAT_GEN2_MAX_N}"),
                ));
            }
            1u64 << (1u64 << n)
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "variant must be 1 or 2, got {variant}"
            )))
        }
    };
    wilson_gen(3, arg)
}

/// (p1, p1 + 2) with p1 = min(z(n+2), z(n+4)).
pub fn twin_gen(n: u64) -> (u64, u64) {
    let p1 = wilson_gen(3, n + 2)
        .expect("c = 3")
        .min(wilson_gen(3, n + 4).expect("c = 3"));
    (p1, p1 + 2)
}

/// g(n) = min(t(n), t(2n+2)).
pub fn sophie_gen(n: u64) -> u64 {
    wilson_gen(2, n)
        .expect("c = 2")
        .min(wilson_gen(2, 2 * n + 2).expect("c = 2"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Mersenne(u8),
    Fermat(u8),
    /// The lower member p1 of the pair.
    Twin,
    Sophie,
}

impl Generator {
    pub fn semantic(self, n: u64) -> Result<u64> {
        match self {
            Generator::Mersenne(v) => mersenne_gen(n, v),
            Generator::Fermat(v) => fermat_gen(n, v),
            Generator::Twin => Ok(twin_gen(n).0),
            Generator::Sophie => Ok(sophie_gen(n)),
        }
    }

    /// The generator as a term in n, with factorials as primitives.
    pub fn term(self) -> Result<Term> {
        let n = || Term::var("n");
        let z = |x: Term| wilson_term(3, x);
        let t = |x: Term| wilson_term(2, x);
        Ok(match self {
            Generator::Mersenne(1) => z(Term::monus(
                Term::pow2(Term::add(n(), Term::int(1))),
                Term::int(2),
            )),
            Generator::Mersenne(2) => z(Term::monus(Term::pow2(t(n())), Term::int(2))),
            Generator::Fermat(1) => z(Term::pow2(Term::add(n(), Term::int(2)))),
            Generator::Fermat(2) => z(Term::pow2(Term::pow2(n()))),
            Generator::Twin => Term::min(
                z(Term::add(n(), Term::int(2))),
                z(Term::add(n(), Term::int(4))),
            ),
            Generator::Sophie => Term::min(
                t(n()),
                t(Term::add(Term::mul(Term::int(2), n()), Term::int(2))),
            ),
            Generator::Mersenne(v) | Generator::Fermat(v) => {
                return Err(Error::InvalidArgument(format!(
                    "variant must be 1 or 2, got {v}"
                )))
            }
        })
    }

    pub fn term_eval(self, n: u64, budget: Budget) -> Result<Integer> {
        eval_with(&self.term()?, &env_n(n), budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(factorial_semantic(5).unwrap(), 120);
        assert_eq!(factorial_mod(6, 7).unwrap(), 6);
        assert_eq!(factorial_mod(3, 4).unwrap(), 2);
        let b = Budget::default();
        assert_eq!(
            factorial_term_eval(0, FactorialScheme::Pow8Sq, b).unwrap(),
            1
        );
        assert_eq!(
            factorial_term_eval(7, FactorialScheme::Pow8Sq, b).unwrap(),
            5040
        );
        assert_eq!(
            factorial_term_eval(12, FactorialScheme::Minimal, b).unwrap(),
            479_001_600
        );
        for n in 0..=20 {
            for s in [FactorialScheme::Pow8Sq, FactorialScheme::Minimal] {
                assert_eq!(
                    factorial_term_eval(n, s, b).unwrap(),
                    factorial_semantic(n).unwrap(),
                    "{n} {s}"
                );
            }
        }
    }

    #[test]
    fn wilson_values() {
        assert_eq!(wilson_gen(2, 4).unwrap(), 5);
        assert_eq!(wilson_gen(2, 3).unwrap(), 2);
        assert_eq!(wilson_gen(3, 6).unwrap(), 7);
        assert_eq!(wilson_gen(3, 4).unwrap(), 5);
        // 4 is composite, yet z(3) = 3 + 18 mod 4 = 5
        assert_eq!(wilson_gen(3, 3).unwrap(), 5);
        assert!(wilson_gen(4, 3).is_err());
    }

    #[test]
    fn family_examples() {
        assert_eq!(mersenne_gen(2, 1).unwrap(), 7);
        assert_eq!(mersenne_gen(3, 1).unwrap(), 3);
        assert_eq!(mersenne_gen(4, 2).unwrap(), 31);
        assert!(mersenne_gen(21, 1).unwrap_err().is_budget());
        assert_eq!(fermat_gen(2, 1).unwrap(), 17);
        assert_eq!(fermat_gen(1, 1).unwrap(), 3);
        assert_eq!(fermat_gen(4, 2).unwrap(), 65537);
        assert_eq!(twin_gen(0), (3, 5));
        assert_eq!(twin_gen(8), (11, 13));
        assert_eq!(twin_gen(4), (3, 5));
        assert_eq!(sophie_gen(1), 2);
        assert_eq!(sophie_gen(2), 3);
        assert_eq!(sophie_gen(6), 2);
    }

    #[test]
    fn terms_match_semantics() {
        let b = Budget::default();
        let cases = [
            (Generator::Mersenne(1), 0..=8),
            (Generator::Mersenne(2), 0..=12),
            (Generator::Fermat(1), 0..=8),
            (Generator::Fermat(2), 0..=3),
            (Generator::Twin, 0..=60),
            (Generator::Sophie, 0..=60),
        ];
        for (g, range) in cases {
            for n in range {
                assert_eq!(
                    g.term_eval(n, b).unwrap(),
                    g.semantic(n).unwrap(),
                    "{g:?} n={n}"
                );
            }
        }
    }
}
