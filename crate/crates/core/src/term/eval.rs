use rug::ops::Pow;
use rug::Integer;

use super::{BinOp, Env, Term, UnOp};
use crate::budget::Budget;
use crate::error::{Error, Result};

/// Exact evaluator. Sugar nodes are computed from their mathematical
/// definitions; every operation whose result would exceed the bit budget
/// fails with [`Error::BudgetExceeded`] before any work is done.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    pub budget: Budget,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            budget: Budget::from_env(),
        }
    }
}

/// Evaluates with the default budget.
pub fn eval(t: &Term, env: &Env) -> Result<Integer> {
    Evaluator::default().eval(t, env)
}

pub fn eval_with(t: &Term, env: &Env, budget: Budget) -> Result<Integer> {
    Evaluator { budget }.eval(t, env)
}

fn bits(v: &Integer) -> u64 {
    u64::from(v.significant_bits())
}

impl Evaluator {
    fn check(&self, what: &str, needed: u64) -> Result<()> {
        if needed > self.budget.bits {
            Err(Error::budget(
                what,
                format!("{needed} bits"),
                format!("{} bits", self.budget.bits),
            ))
        } else {
            Ok(())
        }
    }

    fn small(&self, what: &str, v: &Integer) -> Result<u64> {
        match v.to_u64() {
            Some(x) if x <= self.budget.bits.max(u32::MAX as u64) => Ok(x),
            _ => Err(Error::budget(
                what,
                format!("exponent {} bits wide", bits(v)),
                self.budget.bits,
            )),
        }
    }

    pub fn eval(&self, t: &Term, env: &Env) -> Result<Integer> {
        match t {
            Term::Const(v) => Ok(v.clone()),
            Term::Var(name) => env
                .get(name)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(name.clone())),
            Term::Un(op, a) => {
                let a = self.eval(a, env)?;
                self.unary(*op, a)
            }
            Term::Bin(op, l, r) => {
                let l = self.eval(l, env)?;
                let r = self.eval(r, env)?;
                self.binary(*op, l, r)
            }
        }
    }

    fn unary(&self, op: UnOp, a: Integer) -> Result<Integer> {
        match op {
            UnOp::Pow2 => {
                let e = self.small("2^x", &a)?;
                self.check("2^x", e + 1)?;
                Ok(Integer::from(1) << (e as u32))
            }
            UnOp::Fact => {
                let n = self.small("n!", &a)?;
                // log2(n!) <= n log2 n
                let est = n.saturating_mul(64 - n.leading_zeros() as u64);
                self.check("n!", est)?;
                Ok(Integer::from(Integer::factorial(n as u32)))
            }
            UnOp::Nu2 => {
                if a == 0 {
                    return Err(Error::Nu2OfZero);
                }
                Ok(Integer::from(a.find_one(0).expect("nonzero")))
            }
            UnOp::Hw => Ok(Integer::from(a.count_ones().expect("nonnegative"))),
        }
    }

    fn binary(&self, op: BinOp, l: Integer, r: Integer) -> Result<Integer> {
        match op {
            BinOp::Add => Ok(l + r),
            BinOp::Monus => Ok(if l > r { l - r } else { Integer::new() }),
            BinOp::Mul => {
                self.check("product", bits(&l) + bits(&r))?;
                Ok(l * r)
            }
            BinOp::DivFloor => {
                if r == 0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(l / r)
            }
            BinOp::Mod => {
                if r == 0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(l % r)
            }
            BinOp::Pow => pow(self, l, r),
            BinOp::AbsDiff => Ok((l - r).abs()),
            BinOp::Min => Ok(l.min(r)),
            BinOp::Binom => binom(self, l, r),
            BinOp::Gcd => Ok(l.gcd(&r)),
        }
    }
}

fn pow(ev: &Evaluator, base: Integer, exp: Integer) -> Result<Integer> {
    if exp == 0 {
        return Ok(Integer::from(1));
    }
    if base <= 1 {
        return Ok(base);
    }
    let e = ev.small("a^b", &exp)?;
    ev.check("a^b", (bits(&base) - 1).saturating_mul(e))?;
    Ok(base.pow(e as u32))
}

fn binom(ev: &Evaluator, a: Integer, b: Integer) -> Result<Integer> {
    if b > a {
        return Ok(Integer::new());
    }
    let k = (a.clone() - &b).min(b);
    let k = ev.small("binomial", &k)?;
    ev.check("binomial", k.saturating_mul(bits(&a)))?;
    match a.to_u32() {
        Some(n) => Ok(Integer::from(Integer::binomial_u(n, k as u32))),
        None => {
            let mut num = Integer::from(1);
            for i in 0..k {
                num *= Integer::from(&a - i);
            }
            Ok(num / Integer::from(Integer::factorial(k as u32)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn env(pairs: &[(&str, u64)]) -> Env {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), Integer::from(*v)))
            .collect()
    }

    fn ev(s: &str, pairs: &[(&str, u64)]) -> Result<Integer> {
        eval(&parse(s).unwrap(), &env(pairs))
    }

    #[test]
    fn base_semantics() {
        assert_eq!(ev("3 - 5", &[]).unwrap(), 0);
        assert_eq!(ev("2^(x) * x", &[("x", 5)]).unwrap(), 160);
        assert_eq!(
            ev("x / y", &[("x", 7), ("y", 0)]),
            Err(Error::DivisionByZero)
        );
        assert_eq!(
            ev("x % y", &[("x", 7), ("y", 0)]),
            Err(Error::DivisionByZero)
        );
        assert_eq!(ev("17 % 5", &[]).unwrap(), 2);
        assert_eq!(ev("2^n - 1", &[("n", 5)]).unwrap(), 31);
        assert_eq!(ev("n + 1", &[]), Err(Error::UnboundVariable("n".into())));
    }

    #[test]
    fn sugar_semantics() {
        assert_eq!(ev("0^0", &[]).unwrap(), 1);
        assert_eq!(ev("3^4", &[]).unwrap(), 81);
        assert_eq!(ev("absdiff(4, 9)", &[]).unwrap(), 5);
        assert_eq!(ev("min(4, 9)", &[]).unwrap(), 4);
        assert_eq!(ev("binom(5, 2)", &[]).unwrap(), 10);
        assert_eq!(ev("binom(2, 5)", &[]).unwrap(), 0);
        assert_eq!(ev("fact(5)", &[]).unwrap(), 120);
        assert_eq!(ev("gcd(12, 18)", &[]).unwrap(), 6);
        assert_eq!(ev("gcd(0, 0)", &[]).unwrap(), 0);
        assert_eq!(ev("nu2(40)", &[]).unwrap(), 3);
        assert_eq!(ev("nu2(0)", &[]), Err(Error::Nu2OfZero));
        assert_eq!(ev("hw(13)", &[]).unwrap(), 3);
        assert_eq!(ev("hw(0)", &[]).unwrap(), 0);
    }

    #[test]
    fn binomial_with_huge_top() {
        // C(2^100, 2) = 2^100 (2^100 - 1) / 2
        let top = Integer::from(1) << 100;
        let expect = (&top * Integer::from(&top - 1u32)) / 2u32;
        let got = eval(&parse("binom(2^100, 2)").unwrap(), &Env::new()).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn budget_is_distinct_from_math_errors() {
        let t = parse("2^(2^40)").unwrap();
        let err = eval_with(&t, &Env::new(), Budget::default()).unwrap_err();
        assert!(err.is_budget());
        assert!(!Error::DivisionByZero.is_budget());
        let t = parse("fact(100000000)").unwrap();
        assert!(eval_with(&t, &Env::new(), Budget::default())
            .unwrap_err()
            .is_budget());
    }
}
