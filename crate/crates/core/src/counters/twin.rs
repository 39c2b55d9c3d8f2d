//! A singlefold system for twin-prime pairs: the factorial f = (k+1)! is
//! unwound into a chain of definitions and Euclidean divisions, followed by
//! Clement's divisibility (k+2)(k+4) | 4f + k + 6.

use std::collections::BTreeSet;

use rug::ops::Pow;
use rug::Integer;
use serde::Serialize;

use super::criteria::clement_test;
use super::{CountingSpec, Family};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::expdio::{
    expand_squares, ExpPolynomial, Monomial, Sparse, Square, SquareSystem, Witness,
};
use crate::generators::FactorialScheme;
use crate::mazzanti::choose_w_symbolic;
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepKind {
    /// out = expression in earlier variables.
    Define,
    /// dividend = q * divisor + rem and rem + slack + 1 = divisor.
    DivRem,
    /// dividend = q * divisor with divisor >= 1 everywhere.
    ExactDiv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub outputs: Vec<String>,
    pub dividend: String,
    pub divisor: String,
}

fn define(out: &str, expr: &str) -> Step {
    Step {
        kind: StepKind::Define,
        outputs: vec![out.into()],
        dividend: expr.into(),
        divisor: String::new(),
    }
}

fn divrem(dividend: &str, divisor: &str, q: &str, rem: &str, slack: &str) -> Step {
    Step {
        kind: StepKind::DivRem,
        outputs: vec![q.into(), rem.into(), slack.into()],
        dividend: dividend.into(),
        divisor: divisor.into(),
    }
}

/// base^exp through 2^{(base*exp + base + 1) exp} mod (2^{base*exp + base + 1} - base).
fn power(steps: &mut Vec<Step>, tag: &str, l_expr: &str, e_expr: &str, base: &str, out: &str) {
    let (l, e, big_e, t, q, s) = (
        format!("L{tag}"),
        format!("e{tag}"),
        format!("E{tag}"),
        format!("T{tag}"),
        format!("q{tag}"),
        format!("s{tag}"),
    );
    steps.push(define(&l, l_expr));
    steps.push(define(&e, &e_expr.replace('L', &l)));
    steps.push(define(&big_e, &format!("2^{e}")));
    steps.push(define(&t, &format!("2^{l}")));
    steps.push(divrem(&big_e, &format!("{t} - {base}"), &q, out, &s));
}

/// The definition chain, in order; k is the only free unknown.
pub fn twin_chain(scheme: FactorialScheme) -> Vec<Step> {
    let mut steps = vec![define("a", "n - k - 2"), define("m", "k + 1")];
    match scheme {
        // r = (k+2)^{k+3}; base*exp + base + 1 = (k+3)^2
        FactorialScheme::Minimal => {
            power(&mut steps, "1", "k^2 + 6*k + 9", "L*k + 3*L", "k - 2", "r")
        }
        // r = 8^{m^2}
        FactorialScheme::Pow8Sq => {
            steps.push(define("M2", "m^2"));
            steps.push(define("r", "8^M2"));
        }
    }
    // RM = r^m
    power(&mut steps, "2", "r*m + r + 1", "L*m", "r", "RM");
    // C = floor((2^r + 1)^r / 2^{rm}) mod 2^r
    steps.push(define("U", "2^r"));
    power(&mut steps, "3", "U*r + r + U + 2", "L*r", "U - 1", "V");
    steps.push(define("rm", "r*m"));
    steps.push(define("W", "2^rm"));
    steps.push(divrem("V", "W", "Qc", "Rc", "sc"));
    steps.push(divrem("Qc", "U", "Qq", "C", "sq"));
    // f = floor(r^m / C)
    steps.push(divrem("RM", "C", "f", "Rf", "sf"));
    steps.push(Step {
        kind: StepKind::ExactDiv,
        outputs: vec!["b".into()],
        dividend: "4*f + k + 6".into(),
        divisor: "k^2 + 6*k + 8".into(),
    });
    steps
}

/// Unknowns in chain order, starting with k.
pub fn chain_unknowns(steps: &[Step]) -> Vec<String> {
    std::iter::once("k".to_string())
        .chain(steps.iter().flat_map(|s| s.outputs.iter().cloned()))
        .collect()
}

fn parse_expr(unknowns: &[String], text: &str) -> Result<ExpPolynomial> {
    let u: Vec<&str> = unknowns.iter().map(String::as_str).collect();
    ExpPolynomial::parse(&u, &["n"], text)
}

fn var_monomial(unknowns: &[String], name: &str) -> Monomial {
    parse_expr(unknowns, name).expect("known name").monomials[0].clone()
}

/// The signed equations of a step, each meaning "= 0".
fn step_equations(unknowns: &[String], step: &Step) -> Result<Vec<Vec<Monomial>>> {
    let neg = |ms: &[Monomial]| -> Vec<Monomial> {
        ms.iter().map(|m| m.scaled(&Integer::from(-1))).collect()
    };
    let dividend = parse_expr(unknowns, &step.dividend)?.monomials;
    Ok(match step.kind {
        StepKind::Define => {
            let out = var_monomial(unknowns, &step.outputs[0]);
            let mut eq = vec![out];
            eq.extend(neg(&dividend));
            vec![eq]
        }
        StepKind::DivRem | StepKind::ExactDiv => {
            let divisor = parse_expr(unknowns, &step.divisor)?.monomials;
            let q = var_monomial(unknowns, &step.outputs[0]);
            let mut first = dividend;
            first.extend(neg(&divisor.iter().map(|d| q.mul(d)).collect::<Vec<_>>()));
            if step.kind == StepKind::ExactDiv {
                return Ok(vec![first]);
            }
            let rem = var_monomial(unknowns, &step.outputs[1]);
            let slack = var_monomial(unknowns, &step.outputs[2]);
            first.push(rem.scaled(&Integer::from(-1)));
            let mut second = vec![rem, slack, Monomial::constant(1, unknowns.len() + 1)];
            second.extend(neg(&divisor));
            vec![first, second]
        }
    })
}

/// Splits a signed sum into the square (positive part, negated negative part).
fn to_square(unknowns: &[String], eq: Vec<Monomial>) -> Square {
    let p = ExpPolynomial::new(unknowns.to_vec(), vec!["n".into()], eq);
    let (l, r): (Vec<Monomial>, Vec<Monomial>) = p.monomials.into_iter().partition(|m| m.coeff > 0);
    Square {
        l,
        r: r.into_iter()
            .map(|m| m.scaled(&Integer::from(-1)))
            .collect(),
    }
}

/// The system's squares, one or two per step.
pub fn twin_system(scheme: FactorialScheme) -> SquareSystem {
    let steps = twin_chain(scheme);
    let unknowns = chain_unknowns(&steps);
    let squares = steps
        .iter()
        .flat_map(|s| step_equations(&unknowns, s).expect("static chain parses"))
        .map(|eq| to_square(&unknowns, eq))
        .collect();
    SquareSystem::new(unknowns, vec!["n".into()], squares).expect("nonnegative sides")
}

/// Largest r(k+1) over k <= n - 2, as a term in n.
fn r_max(scheme: FactorialScheme) -> Term {
    let n = || Term::var("n");
    match scheme {
        FactorialScheme::Minimal => Term::pow(n(), Term::add(n(), Term::int(1))),
        FactorialScheme::Pow8Sq => {
            let m = || Term::monus(n(), Term::int(1));
            Term::pow(Term::int(8), Term::mul(m(), m()))
        }
    }
}

/// t(n) = 2^{e3} + 1 with e3 = (U R + R + U + 2) R, U = 2^R, R = r_max(n): the
/// largest chain value is E3 = 2^{e3} and every other one is below it.
pub fn twin_t_term(scheme: FactorialScheme) -> Term {
    let r = || r_max(scheme);
    let u = || Term::pow2(r());
    let l3 = Term::add(
        Term::add(Term::add(Term::mul(u(), r()), r()), u()),
        Term::int(2),
    );
    Term::add(Term::pow2(Term::mul(l3, r())), Term::int(1))
}

pub fn build_twin_system(scheme: FactorialScheme) -> CountingSpec {
    let system = twin_system(scheme);
    let lw = choose_w_symbolic(&expand_squares(&system));
    let t = twin_t_term(scheme);
    let w = Term::add(
        Term::mul(Term::int(lw.slope), t.clone()),
        Term::int(lw.intercept),
    );
    CountingSpec {
        family: Family::Twin,
        system,
        t_of_n: t,
        w_of_n: w,
        offset: 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterminismReport {
    pub steps: usize,
    pub unknowns: usize,
    pub free: Vec<String>,
}

/// Checks that every step only reads earlier values and writes fresh ones,
/// that Define outputs occur linearly, and that every unknown is written
/// exactly once. Each step then admits at most one value for its outputs
/// (Euclidean division with rem + slack + 1 = divisor forces divisor >= 1),
/// so k determines the whole witness.
pub fn verify_chain(scheme: FactorialScheme) -> Result<DeterminismReport> {
    let steps = twin_chain(scheme);
    let unknowns = chain_unknowns(&steps);
    let nvars = unknowns.len() + 1;
    let mut known: BTreeSet<String> = ["k".to_string(), "n".to_string()].into();
    let index = |name: &str| unknowns.iter().position(|u| u == name).expect("known name");
    let reads = |text: &str| -> Result<BTreeSet<usize>> {
        let p = parse_expr(&unknowns, text)?;
        Ok((0..nvars)
            .filter(|&i| p.monomials.iter().any(|m| !m.factors[i].is_one()))
            .collect())
    };
    let name_of = |i: usize| -> String {
        if i < unknowns.len() {
            unknowns[i].clone()
        } else {
            "n".to_string()
        }
    };
    for (idx, step) in steps.iter().enumerate() {
        let fail = |msg: String| Error::InvariantViolation(format!("step {idx}: {msg}"));
        let mut inputs = reads(&step.dividend)?;
        if !step.divisor.is_empty() {
            inputs.extend(reads(&step.divisor)?);
            let div = parse_expr(&unknowns, &step.divisor)?;
            if step.kind == StepKind::ExactDiv
                && !(div.monomials.iter().all(|m| m.coeff > 0) && div.constant_term() >= 1)
            {
                return Err(fail("exact divisor is not provably positive".into()));
            }
        }
        for i in inputs {
            let name = name_of(i);
            if !known.contains(&name) {
                return Err(fail(format!("reads `{name}` before it is defined")));
            }
        }
        for out in &step.outputs {
            if !known.insert(out.clone()) {
                return Err(fail(format!("`{out}` is defined twice")));
            }
        }
        if step.kind == StepKind::Define {
            let eq = &step_equations(&unknowns, step)?[0];
            let o = index(&step.outputs[0]);
            let hits: Vec<&Monomial> = eq.iter().filter(|m| !m.factors[o].is_one()).collect();
            let linear = hits.len() == 1
                && hits[0].factors[o]
                    == crate::expdio::Factor {
                        v: Integer::from(1),
                        r: 1,
                    }
                && hits[0].coeff.clone().abs() == 1
                && hits[0]
                    .factors
                    .iter()
                    .enumerate()
                    .all(|(i, f)| i == o || f.is_one());
            if !linear {
                return Err(fail(format!(
                    "`{}` is not defined linearly",
                    step.outputs[0]
                )));
            }
        }
    }
    let missing: Vec<&String> = unknowns.iter().filter(|u| !known.contains(*u)).collect();
    if !missing.is_empty() {
        return Err(Error::InvariantViolation(format!(
            "never defined: {missing:?}"
        )));
    }
    Ok(DeterminismReport {
        steps: steps.len(),
        unknowns: unknowns.len(),
        free: vec!["k".into()],
    })
}

/// Values for a twin pair (k+2, k+4); chain values too large for the budget
/// are listed in `pending`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinWitness {
    pub values: Witness,
    pub pending: Vec<String>,
}

impl TwinWitness {
    pub fn is_complete(&self) -> bool {
        self.pending.is_empty()
    }
}

/// (q, a^b, 2^l - a - a^b - 1) for the quotient and remainder of
/// 2^{lb} by 2^l - a, where q = sum_{j<b} a^j 2^{l(b-1-j)}.
fn marchenkov_parts(
    a: &Integer,
    b: &Integer,
    l: &Integer,
    budget: Budget,
) -> Result<(Sparse, Integer, Sparse)> {
    let bu = b
        .to_u32()
        .filter(|&b| u64::from(b) <= budget.bits)
        .ok_or_else(|| Error::budget("power quotient terms", b, budget.bits))?;
    let bits = u64::from(a.significant_bits()) * u64::from(bu);
    if bits > budget.bits {
        return Err(Error::budget(
            "power remainder",
            format!("{bits} bits"),
            budget.bits,
        ));
    }
    let mut q = Sparse::zero();
    let mut aj = Integer::from(1);
    for j in 0..bu {
        q = q.add(&Sparse::term(aj.clone(), Integer::from(l * (bu - 1 - j))));
        aj *= a;
    }
    let slack = Sparse::pow2(l.clone()).sub(&Sparse::from_int(Integer::from(a + &aj) + 1u32));
    Ok((q, aj, slack))
}

fn small(v: &Integer, budget: Budget, what: &str) -> Result<Integer> {
    if u64::from(v.significant_bits()) > budget.bits {
        return Err(Error::budget(
            what,
            format!("{} bits", v.significant_bits()),
            budget.bits,
        ));
    }
    Ok(v.clone())
}

/// The unique solution for k (with parameter n >= k + 2), or None when
/// (k+2, k+4) is not a twin pair.
pub fn twin_witness(
    k: u64,
    n: u64,
    scheme: FactorialScheme,
    budget: Budget,
) -> Result<Option<TwinWitness>> {
    if n < k + 2 {
        return Err(Error::InvalidArgument(
            "the witness needs n >= k + 2".into(),
        ));
    }
    if !clement_test(k)? {
        return Ok(None);
    }
    let mut w = Witness::new();
    let mut pending = Vec::new();
    let put = |w: &mut Witness, name: &str, v: Sparse| {
        w.insert(name.to_string(), v);
    };
    let int = |v: &Integer| Sparse::from_int(v.clone());
    let kk = Integer::from(k);
    let m = Integer::from(k + 1);
    put(&mut w, "k", int(&kk));
    put(&mut w, "n", Sparse::from_int(n));
    put(&mut w, "a", Sparse::from_int(n - k - 2));
    put(&mut w, "m", int(&m));

    let power_chain = |w: &mut Witness,
                       pending: &mut Vec<String>,
                       tag: &str,
                       base: &Integer,
                       exp: &Integer|
     -> Result<Option<Integer>> {
        let l = Integer::from(base * exp) + base + 1u32;
        let e = Integer::from(&l * exp);
        put(w, &format!("L{tag}"), int(&l));
        put(w, &format!("e{tag}"), int(&e));
        put(w, &format!("E{tag}"), Sparse::pow2(e));
        put(w, &format!("T{tag}"), Sparse::pow2(l.clone()));
        match marchenkov_parts(base, exp, &l, budget) {
            Ok((q, res, s)) => {
                put(w, &format!("q{tag}"), q);
                put(w, &format!("s{tag}"), s);
                Ok(Some(res))
            }
            Err(err) if err.is_budget() => {
                pending.extend([format!("q{tag}"), format!("s{tag}")]);
                Ok(None)
            }
            Err(err) => Err(err),
        }
    };

    let r = match scheme {
        FactorialScheme::Minimal => {
            let base = Integer::from(k + 2);
            let exp = Integer::from(k + 3);
            let r = power_chain(&mut w, &mut pending, "1", &base, &exp)?;
            r.unwrap_or_else(|| base.pow(k as u32 + 3))
        }
        FactorialScheme::Pow8Sq => {
            let m2 = Integer::from(&m * &m);
            put(&mut w, "M2", int(&m2));
            Integer::from(1) << (3 * m2.to_u32().expect("small"))
        }
    };
    let r = small(&r, budget, "r")?;
    put(&mut w, "r", int(&r));
    let rm_pow = power_chain(&mut w, &mut pending, "2", &r, &m)?;
    let rm_val = rm_pow.unwrap_or_else(|| r.clone().pow(m.to_u32().expect("small")));
    put(&mut w, "RM", int(&rm_val));

    put(&mut w, "U", Sparse::pow2(r.clone()));
    let rm = Integer::from(&r * &m);
    put(&mut w, "rm", int(&rm));
    put(&mut w, "W", Sparse::pow2(rm.clone()));
    // (2^r + 1)^r needs about r^2 bits; past the budget only C is derived
    let ru = r.to_u32().filter(|&ru| u64::from(ru) <= budget.bits);
    let v = match ru {
        Some(ru) => {
            let u1 = (Integer::from(1) << ru) + 1u32;
            power_chain(&mut w, &mut pending, "3", &u1, &r)?
        }
        None => {
            let l3 = Sparse::term(r.clone(), r.clone())
                .add(&Sparse::pow2(r.clone()))
                .add(&Sparse::from_int(Integer::from(&r + 2u32)));
            put(&mut w, "e3", l3.mul_int(&r));
            put(&mut w, "L3", l3);
            pending.extend(["E3", "T3", "q3", "s3"].map(String::from));
            None
        }
    };

    let c = match (v, ru) {
        (Some(v), Some(ru)) => {
            let rmu = rm.to_u32().expect("below (r + 1) r bits");
            put(&mut w, "V", int(&v));
            let qc = Integer::from(&v >> rmu);
            let rc = Integer::from(v.keep_bits_ref(rmu));
            put(
                &mut w,
                "sc",
                Sparse::pow2(rm.clone()).sub(&Sparse::from_int(Integer::from(&rc + 1u32))),
            );
            put(&mut w, "Rc", int(&rc));
            let qq = Integer::from(&qc >> ru);
            let c = Integer::from(qc.keep_bits_ref(ru));
            put(&mut w, "Qc", int(&qc));
            put(&mut w, "Qq", int(&qq));
            c
        }
        _ => {
            pending.extend(["V", "Qc", "Rc", "sc", "Qq"].map(String::from));
            r.clone().binomial(m.to_u32().expect("small"))
        }
    };
    put(&mut w, "C", int(&c));
    put(
        &mut w,
        "sq",
        Sparse::pow2(r.clone()).sub(&Sparse::from_int(Integer::from(&c + 1u32))),
    );
    let (f, rf) = rm_val.div_rem(c.clone());
    let fact = Integer::from(Integer::factorial(u32::try_from(k + 1).expect("small")));
    if f != fact {
        return Err(Error::InvariantViolation(format!(
            "factorial chain gives {f}, expected {fact}"
        )));
    }
    put(&mut w, "sf", int(&(Integer::from(&c - &rf) - 1u32)));
    put(&mut w, "Rf", int(&rf));
    put(&mut w, "f", int(&f));
    let (b, rem) = (Integer::from(&f * 4u32) + k + 6u32).div_rem(Integer::from((k + 2) * (k + 4)));
    if rem != 0 {
        return Err(Error::InvariantViolation(
            "Clement divisibility disagrees with the chain".into(),
        ));
    }
    put(&mut w, "b", int(&b));
    pending.sort();
    Ok(Some(TwinWitness { values: w, pending }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialCheck {
    pub checked: usize,
    pub total: usize,
    pub all_zero: bool,
}

/// Evaluates every square whose variables all have values.
pub fn check_twin_witness(
    system: &SquareSystem,
    tw: &TwinWitness,
    budget: Budget,
) -> Result<PartialCheck> {
    let mut checked = 0;
    let mut all_zero = true;
    for sq in &system.squares {
        let vars: BTreeSet<usize> =
            sq.l.iter()
                .chain(&sq.r)
                .flat_map(|m| {
                    m.factors
                        .iter()
                        .enumerate()
                        .filter(|(_, f)| !f.is_one())
                        .map(|(i, _)| i)
                })
                .collect();
        let ready = vars.iter().all(|&i| {
            let name = system.unknowns.get(i).map_or("n", String::as_str);
            tw.values.contains_key(name)
        });
        if !ready {
            continue;
        }
        let single = SquareSystem::new(
            system.unknowns.clone(),
            system.params.clone(),
            vec![sq.clone()],
        )?;
        let mut full = tw.values.clone();
        for name in single.unknowns.iter() {
            full.entry(name.clone()).or_insert_with(Sparse::zero);
        }
        checked += 1;
        all_zero &= single.residuals(&full, budget)?[0].is_zero();
    }
    Ok(PartialCheck {
        checked,
        total: system.squares.len(),
        all_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expdio::expand_squares;

    #[test]
    fn chain_is_deterministic() {
        for scheme in [FactorialScheme::Minimal, FactorialScheme::Pow8Sq] {
            let rep = verify_chain(scheme).unwrap();
            assert_eq!(rep.unknowns, twin_system(scheme).unknowns.len());
        }
    }

    #[test]
    fn minimal_witness_at_one() {
        let spec = build_twin_system(FactorialScheme::Minimal);
        let tw = twin_witness(1, 3, FactorialScheme::Minimal, Budget::default())
            .unwrap()
            .unwrap();
        assert!(tw.is_complete());
        assert_eq!(tw.values["r"], Sparse::from_int(81));
        assert_eq!(tw.values["f"], Sparse::from_int(2));
        assert_eq!(tw.values["b"], Sparse::from_int(1));
        let chk = check_twin_witness(&spec.system, &tw, Budget::default()).unwrap();
        assert_eq!(chk.checked, chk.total);
        assert!(chk.all_zero);
        let poly = expand_squares(&spec.system);
        assert!(poly
            .eval_sparse(&tw.values, Budget::default())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn other_witnesses() {
        let b = Budget::default();
        assert!(twin_witness(2, 4, FactorialScheme::Minimal, b)
            .unwrap()
            .is_none());
        assert!(twin_witness(5, 7, FactorialScheme::Minimal, b)
            .unwrap()
            .is_none());
        let tw = twin_witness(3, 5, FactorialScheme::Minimal, b)
            .unwrap()
            .unwrap();
        assert!(!tw.is_complete());
        assert_eq!(tw.values["f"], Sparse::from_int(24));
        let spec = build_twin_system(FactorialScheme::Minimal);
        let chk = check_twin_witness(&spec.system, &tw, b).unwrap();
        assert!(chk.all_zero && chk.checked < chk.total && chk.checked > 0);
    }

    #[test]
    fn perturbing_the_witness_breaks_it() {
        let spec = build_twin_system(FactorialScheme::Minimal);
        let tw = twin_witness(1, 3, FactorialScheme::Minimal, Budget::default())
            .unwrap()
            .unwrap();
        for name in &spec.system.unknowns {
            let mut moved = tw.values.clone();
            let v = moved[name].add(&Sparse::from_int(1));
            moved.insert(name.clone(), v);
            let res = spec.system.residuals(&moved, Budget::default()).unwrap();
            assert!(res.iter().any(|s| !s.is_zero()), "{name}");
        }
    }
}
