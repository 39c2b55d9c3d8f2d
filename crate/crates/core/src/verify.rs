//! The verification suite: named checks grouped by module, each reporting a
//! status, the measured values and the tolerance it was held to.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::Integer;
use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::counters::{
    self, build_r, build_s, count_via_term, fermat_witness, mersenne_witness, twin, CountResult,
    Family,
};
use crate::error::{Error, Result};
use crate::expdio::{
    brute_count, expand_squares, ExpPolynomial, Factor, Monomial, Square, SquareSystem, Witness,
};
use crate::generators::{self, FactorialScheme};
use crate::mazzanti::{choose_w, count_solutions, delta, m_profile, popcount, CountingInstance};
use crate::oracles::{fixtures, is_prime, sieve_flags};
use crate::sequences::{
    crec_eval, lehmer_s, lehmer_s_term_eval, pell_x_term_eval, CRecSpec, LEHMER_TERM_MAX_N,
};
use crate::term::identities;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Value,
    pub tolerance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub selector: String,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    All,
    Terms,
    Mazzanti,
    Sequences,
    Generators,
    Counters,
}

impl Selector {
    pub const ALL: [Selector; 6] = [
        Selector::All,
        Selector::Terms,
        Selector::Mazzanti,
        Selector::Sequences,
        Selector::Generators,
        Selector::Counters,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Selector::All => "all",
            Selector::Terms => "terms",
            Selector::Mazzanti => "mazzanti",
            Selector::Sequences => "sequences",
            Selector::Generators => "generators",
            Selector::Counters => "counters",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Selector::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown selector `{s}`")))
    }
}

/// Exact checks; no numeric slack anywhere in the suite.
const EXACT: &str = "exact";

type Outcome = Result<(bool, Value)>;

fn run(name: &str, tolerance: &str, f: impl FnOnce() -> Outcome) -> Check {
    let (status, measured) = match f() {
        Ok((true, v)) => (Status::Pass, v),
        Ok((false, v)) => (Status::Fail, v),
        Err(e) => (Status::Error, json!({ "error": e.to_string() })),
    };
    Check {
        name: name.into(),
        status,
        measured,
        tolerance: tolerance.into(),
    }
}

/// Seed of every randomized check.
pub const SEED: u64 = 0x5eed_a71c;

pub fn verify_suite(selector: Selector, budget: Budget) -> Report {
    let mut checks = Vec::new();
    let want = |s: Selector| selector == Selector::All || selector == s;
    if want(Selector::Terms) {
        checks.extend(term_checks(budget));
    }
    if want(Selector::Mazzanti) {
        checks.extend(mazzanti_checks(budget));
    }
    if want(Selector::Sequences) {
        checks.extend(sequence_checks(budget));
    }
    if want(Selector::Generators) {
        checks.extend(generator_checks());
    }
    if want(Selector::Counters) {
        checks.extend(counter_checks(budget));
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().filter(|c| c.status == Status::Pass).count();
    Report {
        selector: selector.name().into(),
        passed,
        failed: checks.len() - passed,
        checks,
    }
}

fn first_mismatch<T: fmt::Debug>(items: impl IntoIterator<Item = (T, bool)>) -> (bool, Value) {
    let mut count = 0u64;
    for (case, ok) in items {
        count += 1;
        if !ok {
            return (
                false,
                json!({ "cases": count, "first_mismatch": format!("{case:?}") }),
            );
        }
    }
    (true, json!({ "cases": count }))
}

fn term_checks(budget: Budget) -> Vec<Check> {
    vec![
        run("terms.binomial", EXACT, || {
            let mut cases = Vec::new();
            for a in 0..=40u64 {
                for b in 0..=a + 2 {
                    let want = Integer::from(Integer::binomial_u(a as u32, b as u32));
                    let ok = identities::binom_formula_shifted(a, b, budget)? == want
                        && (a == 0 || identities::binom_formula(a, b, budget)? == want);
                    cases.push(((a, b), ok));
                }
            }
            Ok(first_mismatch(cases))
        }),
        run("terms.gcd", EXACT, || {
            let mut cases = Vec::new();
            for a in 1..=60u64 {
                for b in 1..=60u64 {
                    let want = Integer::from(a).gcd(&Integer::from(b));
                    let mut ok = identities::gcd_formula_fast(a, b)? == want;
                    if a <= 6 && b <= 6 {
                        ok &= identities::gcd_formula_literal(a, b, budget)? == want;
                    }
                    cases.push(((a, b), ok));
                }
            }
            Ok(first_mismatch(cases))
        }),
        run("terms.nu2", EXACT, || {
            let mut cases = Vec::new();
            for n in 1..=512u64 {
                cases.push((
                    n,
                    identities::nu2_formula(&Integer::from(n), budget)? == n.trailing_zeros(),
                ));
            }
            Ok(first_mismatch(cases))
        }),
        run("terms.hw", EXACT, || {
            let mut cases = Vec::new();
            for n in 1..=4096u64 {
                cases.push((n, identities::hw_via_term(n, budget)? == n.count_ones()));
            }
            Ok(first_mismatch(cases))
        }),
        run("terms.marchenkov_pow", EXACT, || {
            let mut cases = Vec::new();
            for a in 0..=20u64 {
                for b in 0..=12u64 {
                    cases.push((
                        (a, b),
                        identities::marchenkov_pow(a, b, budget)? == Integer::from(a).pow(b as u32),
                    ));
                }
            }
            Ok(first_mismatch(cases))
        }),
    ]
}

fn random_side(rng: &mut ChaCha8Rng, k: usize) -> Vec<Monomial> {
    (0..rng.gen_range(1..=2))
        .map(|_| Monomial {
            coeff: Integer::from(rng.gen_range(0..=4)),
            factors: (0..k)
                .map(|_| Factor {
                    v: Integer::from(rng.gen_range(1..=3)),
                    r: rng.gen_range(0..=1),
                })
                .collect(),
        })
        .filter(|m| m.coeff != 0)
        .collect()
}

/// Random nonnegative instance: a sum of one or two squared differences.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (ExpPolynomial, u64) {
    let k = rng.gen_range(1..=3usize);
    let t = rng.gen_range(2..=5u64);
    let names: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
    let squares = (0..rng.gen_range(1..=2))
        .map(|_| Square {
            l: random_side(rng, k),
            r: random_side(rng, k),
        })
        .collect();
    let system = SquareSystem::new(names, Vec::new(), squares).expect("nonnegative sides");
    (expand_squares(&system), t)
}

fn mazzanti_checks(budget: Budget) -> Vec<Check> {
    vec![
        run("mazzanti.delta_hw", EXACT, || {
            let mut cases = Vec::new();
            for b in 1..=12u64 {
                for a in 0..1u64 << b {
                    let want = if a == 0 { 2 * b } else { b };
                    cases.push(((a, b), popcount(&delta(&Integer::from(a), b)?) == want));
                }
            }
            Ok(first_mismatch(cases))
        }),
        run("mazzanti.fixed_examples", EXACT, || {
            let mut got = Vec::new();
            for (vars, text, t, want) in [
                (&["x"][..], "x^2 - 2*x + 1", 3, 1),
                (&["x", "y"][..], "x^2 + y^2 - 2*x*y + 4*x - 4*y + 4", 6, 4),
                (&["x"][..], "x^2 + 2*x + 1", 4, 0),
            ] {
                let p = ExpPolynomial::parse(vars, &[], text)?;
                let w = choose_w(&p, t);
                got.push((
                    count_solutions(&CountingInstance::new(p, t, w)?, budget)?,
                    want,
                ));
            }
            Ok((got.iter().all(|(a, b)| a == b), json!(got)))
        }),
        run("mazzanti.random_vs_brute", EXACT, || {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let mut cases = Vec::new();
            for _ in 0..120 {
                let (p, t) = random_instance(&mut rng);
                let w = choose_w(&p, t);
                let text = p.to_text();
                let ok = count_solutions(&CountingInstance::new(p.clone(), t, w)?, budget)?
                    == brute_count(&p, t, budget)?;
                cases.push(((text, t), ok));
            }
            Ok(first_mismatch(cases))
        }),
    ]
}

fn sequence_checks(budget: Budget) -> Vec<Check> {
    vec![
        run("sequences.pell_term", EXACT, || {
            let pell = CRecSpec::pell_x();
            let fx = &fixtures().pell_x_values;
            let prefix_ok = (0..fx.len()).all(|n| crec_eval(&pell, n as u64) == fx[n]);
            let mut cases = Vec::new();
            for n in 1..=300u64 {
                cases.push((n, pell_x_term_eval(n, budget)? == crec_eval(&pell, n)));
            }
            let (ok, v) = first_mismatch(cases);
            Ok((
                ok && prefix_ok,
                json!({ "term": v, "fixture_prefix": prefix_ok }),
            ))
        }),
        run("sequences.lehmer_term", EXACT, || {
            let fx = &fixtures().s_values;
            let mut cases = Vec::new();
            for n in 1..=8u64 {
                let s = lehmer_s(n, None, budget)?;
                let fixture_ok = fx.get(n as usize - 1).is_none_or(|v| *v == s);
                cases.push((
                    n,
                    fixture_ok && lehmer_s_term_eval(n, LEHMER_TERM_MAX_N, budget)? == s,
                ));
            }
            Ok(first_mismatch(cases))
        }),
    ]
}

fn image(values: impl IntoIterator<Item = Result<u64>>) -> Result<BTreeSet<u64>> {
    values.into_iter().collect()
}

fn generator_checks() -> Vec<Check> {
    vec![
        run("generators.mersenne_image", EXACT, || {
            let img = image((0..=12).map(|n| generators::mersenne_gen(n, 1)))?;
            let want: BTreeSet<u64> = [3, 7, 31, 127, 8191].into();
            Ok((img == want, json!(img)))
        }),
        run("generators.fermat_image", EXACT, || {
            let img = image((0..=16).map(|n| generators::fermat_gen(n, 1)))?;
            let allowed: BTreeSet<u64> = [3, 5, 17, 257, 65537].into();
            let ok = img.is_subset(&allowed) && img.contains(&17) && img.contains(&257);
            Ok((ok, json!(img)))
        }),
        run("generators.twin_pairs", EXACT, || {
            let flags = sieve_flags(20_020)?;
            Ok(first_mismatch((0..=10_000u64).map(|n| {
                let (p, q) = generators::twin_gen(n);
                (n, q == p + 2 && flags[p as usize] && flags[q as usize])
            })))
        }),
        run("generators.sophie_primes", EXACT, || {
            let flags = sieve_flags(40_020)?;
            Ok(first_mismatch((0..=10_000u64).map(|n| {
                let g = generators::sophie_gen(n);
                (n, flags[g as usize] && flags[2 * g as usize + 1])
            })))
        }),
        run("generators.z3_exception", EXACT, || {
            let z3 = generators::wilson_gen(3, 3)?;
            Ok((z3 == 5, json!({ "z(3)": z3 })))
        }),
    ]
}

/// Unknowns of `w` at or above t, compared exactly.
fn coordinates_at_or_above(w: &Witness, t: &Integer, budget: Budget) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (name, v) in w.iter().filter(|(name, _)| name.as_str() != "n") {
        if v.to_integer(budget)? >= *t {
            out.push(name.clone());
        }
    }
    Ok(out)
}

/// Random points of [0, t-1]^vars; returns whether 0 <= P < 2^bound holds.
fn bound_holds(p: &ExpPolynomial, t: u64, bound: u64, rng: &mut ChaCha8Rng) -> bool {
    let nv = p.k() + p.params.len();
    (0..100).all(|_| {
        let point: Vec<Integer> = (0..nv)
            .map(|_| Integer::from(rng.gen_range(0..t)))
            .collect();
        let v = p.eval_at(&point);
        v >= 0 && u64::from(v.significant_bits()) <= bound
    })
}

/// The m_profile printed for S.
pub fn expected_s_profile() -> Vec<(&'static str, usize)> {
    vec![("G2*G2", 2), ("G2", 3), ("G1*G1*G1", 2), ("G0 only", 10)]
}

fn counter_checks(budget: Budget) -> Vec<Check> {
    vec![
        run("counters.mersenne_monomials", EXACT, || {
            let n = expand_squares(&build_r().system).len();
            Ok((n == 48, json!(n)))
        }),
        run("counters.mersenne_witnesses", EXACT, || {
            let r = build_r();
            let p = r.poly();
            let wb = counters::mersenne::witness_check_budget().with_points(budget.points);
            let mut out = Vec::new();
            for k in [1u64, 3, 5, 11] {
                let w = mersenne_witness(k, k)?
                    .ok_or_else(|| Error::InvariantViolation(format!("no witness at k = {k}")))?;
                let zero = p.eval_sparse(&w, wb)?.is_zero();
                let outside = coordinates_at_or_above(&w, &r.t_at(k, wb)?, wb)?;
                out.push(json!({ "k": k, "zero": zero, "not_below_t": outside }));
            }
            let none9 = mersenne_witness(9, 9)?.is_none();
            let ok = none9
                && out.iter().all(|v| {
                    v["zero"] == true && v["not_below_t"].as_array().is_some_and(Vec::is_empty)
                });
            Ok((ok, json!({ "witnesses": out, "k9_none": none9 })))
        }),
        run("counters.mersenne_bound", EXACT, || {
            let p = build_r().poly();
            let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
            Ok(first_mismatch(
                (2..=8u64).map(|t| (t, bound_holds(&p, t, 36 * t + 6, &mut rng))),
            ))
        }),
        run("counters.fermat_monomials", EXACT, || {
            let n = expand_squares(&build_s().system).len();
            Ok((n == 17, json!(n)))
        }),
        run("counters.fermat_profile", EXACT, || {
            let prof = m_profile(&build_s().poly());
            let want = expected_s_profile();
            let ok = prof.groups.len() == want.len()
                && want.iter().all(|(k, v)| prof.groups.get(*k) == Some(v));
            Ok((
                ok,
                json!({ "computed": prof.groups, "printed": want.into_iter().collect::<std::collections::BTreeMap<_, _>>() }),
            ))
        }),
        run("counters.jones_sweep", EXACT, || {
            let hits: Vec<u64> = (0..=11_000).filter(|&g| counters::jones_test(g)).collect();
            Ok((hits == [0, 2, 42, 10922], json!(hits)))
        }),
        run("counters.fermat_witnesses", EXACT, || {
            let p = build_s().poly();
            let mut out = Vec::new();
            for g in [0u64, 2, 42] {
                let w = fermat_witness(g, g)?
                    .ok_or_else(|| Error::InvariantViolation(format!("no witness at g = {g}")))?;
                out.push((g, p.eval_sparse(&w, budget)?.is_zero()));
            }
            Ok((out.iter().all(|(_, ok)| *ok), json!(out)))
        }),
        run("counters.fermat_bound", EXACT, || {
            let p = build_s().poly();
            let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
            Ok(first_mismatch(
                (2..=8u64).map(|t| (t, bound_holds(&p, t, 22 * t + 27, &mut rng))),
            ))
        }),
        run("counters.oracle_counts", EXACT, || {
            let got = [
                counters::mersenne_count_oracle(11, budget)?,
                counters::fermat_count_oracle(10922, budget)?,
                counters::twin_count_oracle(30, budget)?,
                counters::sg_count_oracle(30, budget)?,
            ];
            Ok((got == [5, 4, 5, 6], json!(got)))
        }),
        run("counters.clement_vs_sieve", EXACT, || {
            let flags = sieve_flags(10_010)?;
            let mut cases = Vec::new();
            for k in 0..=10_000u64 {
                cases.push((
                    k,
                    counters::clement_test(k)? == (flags[k as usize + 2] && flags[k as usize + 4]),
                ));
            }
            Ok(first_mismatch(cases))
        }),
        run("counters.sg_criteria_agree", EXACT, || {
            Ok(first_mismatch((0..=10_000u64).map(|p| {
                (
                    p,
                    counters::sg_test_rotondo(p) == counters::sg_test_wilson(p),
                )
            })))
        }),
        run("counters.twin_system", EXACT, || {
            let scheme = FactorialScheme::Minimal;
            let spec = counters::build_twin_system(scheme);
            let simple = spec
                .system
                .squares
                .iter()
                .flat_map(|s| s.l.iter().chain(&s.r))
                .all(|m| m.coeff >= 0);
            let tw = counters::twin_witness(1, 3, scheme, budget)?
                .ok_or_else(|| Error::InvariantViolation("no witness at k = 1".into()))?;
            let zero = tw.is_complete() && spec.poly().eval_sparse(&tw.values, budget)?.is_zero();
            let det = twin::verify_chain(scheme).is_ok()
                && twin::verify_chain(FactorialScheme::Pow8Sq).is_ok();
            let mut agree = Vec::new();
            for k in 0..=10u64 {
                let has = counters::twin_witness(k, k + 2, scheme, budget)?.is_some();
                agree.push((k, has == counters::clement_test(k)?));
            }
            let (agree_ok, agree_v) = first_mismatch(agree);
            Ok((
                simple && zero && det && agree_ok,
                json!({ "simple": simple, "witness_k1_zero": zero, "chain_deterministic": det, "witness_iff_twin": agree_v }),
            ))
        }),
        run("counters.symbolic_reports", EXACT, || {
            let mut out = Vec::new();
            for (family, t, w) in [
                (
                    Family::Mersenne,
                    Integer::from(121),
                    Integer::from(36 * 121 + 6),
                ),
                (
                    Family::Fermat,
                    Integer::from(1728),
                    Integer::from(22 * 1728 + 27),
                ),
            ] {
                let CountResult::Symbolic(rep) = count_via_term(family, 0, budget)? else {
                    return Ok((false, json!({ "counted": family.name() })));
                };
                let digits = |v: &Integer| v.to_string().len() as f64;
                let ok = rep.t.as_ref().is_some_and(|m| m.digits == digits(&t))
                    && rep.w.as_ref().is_some_and(|m| m.digits == digits(&w))
                    && rep.oracle_count == Some(1);
                out.push(json!({ "family": family.name(), "ok": ok, "report": rep }));
            }
            let ok = out.iter().all(|v| v["ok"] == true);
            Ok((ok, json!(out)))
        }),
        run("counters.special_forms_vs_primality", EXACT, || {
            let mut cases = Vec::new();
            for p in 2..=64u64 {
                let m = (Integer::from(1) << p as u32) - 1u32;
                let probable = m.is_probably_prime(40) != rug::integer::IsPrime::No;
                cases.push((
                    format!("2^{p}-1"),
                    counters::lucas_lehmer_test(p) == probable && is_prime(&m) == probable,
                ));
            }
            for j in 0..=11u32 {
                let f = (Integer::from(1) << (1u32 << j)) + 1u32;
                let probable = f.is_probably_prime(40) != rug::integer::IsPrime::No;
                cases.push((
                    format!("2^2^{j}+1"),
                    counters::pepin_test(1 << j) == probable && is_prime(&f) == probable,
                ));
            }
            Ok(first_mismatch(cases))
        }),
    ]
}
