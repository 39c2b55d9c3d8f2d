//! C-recursive sequences and their div-mod closed forms, with the Pell
//! sequence x(n) and the Lucas-Lehmer sequence s(n) as instances.

use num_complex::Complex64;
use rug::ops::Pow;
use rug::Integer;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::term::{eval_with, Env, Term};

/// Generating function A(z)/B(z) with B(0) = 1, plus an optional base c.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CRecSpec {
    /// Coefficients of A, constant first.
    pub a: Vec<Integer>,
    /// Coefficients of B, constant first.
    pub b: Vec<Integer>,
    pub c: Option<Integer>,
}

fn ints(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| Integer::from(x)).collect()
}

impl CRecSpec {
    pub fn new(a: Vec<Integer>, b: Vec<Integer>, c: Option<Integer>) -> Result<Self> {
        let mut b = b;
        while b.len() > 1 && b.last() == Some(&Integer::new()) {
            b.pop();
        }
        let mut a = a;
        while a.last() == Some(&Integer::new()) {
            a.pop();
        }
        if b.first() != Some(&Integer::from(1)) {
            return Err(Error::InvalidArgument("B(0) must be 1".into()));
        }
        if !a.is_empty() && a.len() >= b.len() {
            return Err(Error::InvalidArgument("deg A must be below deg B".into()));
        }
        if matches!(&c, Some(c) if *c < 2) {
            return Err(Error::InvalidArgument("base c must be at least 2".into()));
        }
        Ok(CRecSpec { a, b, c })
    }

    /// x^2 - 3y^2 = 1: A = 1 - 2z, B = 1 - 4z + z^2, c = 11.
    pub fn pell_x() -> Self {
        CRecSpec::new(ints(&[1, -2]), ints(&[1, -4, 1]), Some(Integer::from(11))).expect("valid")
    }

    pub fn fibonacci() -> Self {
        CRecSpec::new(ints(&[0, 1]), ints(&[1, -1, -1]), Some(Integer::from(8))).expect("valid")
    }

    pub fn constant_one() -> Self {
        CRecSpec::new(ints(&[1]), ints(&[1, -1]), Some(Integer::from(8))).expect("valid")
    }

    pub fn degree(&self) -> usize {
        self.b.len() - 1
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let list = |key: &str| -> Result<Vec<Integer>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Format(format!("`{key}` must be an array")))?
                .iter()
                .map(|s| {
                    s.as_str().and_then(|s| s.parse().ok()).ok_or_else(|| {
                        Error::Format(format!("`{key}` entries must be decimal strings"))
                    })
                })
                .collect()
        };
        let c = match v.get("c") {
            None | Some(Value::Null) => None,
            Some(s) => Some(
                s.as_str()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Format("`c` must be a decimal string".into()))?,
            ),
        };
        CRecSpec::new(list("A")?, list("B")?, c)
    }

    pub fn to_json(&self) -> Value {
        let strs = |v: &[Integer]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let mut obj = json!({"A": strs(&self.a), "B": strs(&self.b)});
        if let Some(c) = &self.c {
            obj["c"] = json!(c.to_string());
        }
        obj
    }
}

/// First `len` coefficients of A/B.
pub fn crec_prefix(spec: &CRecSpec, len: usize) -> Vec<Integer> {
    let mut t: Vec<Integer> = Vec::with_capacity(len);
    for n in 0..len {
        let mut v = spec.a.get(n).cloned().unwrap_or_default();
        for (i, bi) in spec.b.iter().enumerate().skip(1) {
            if i <= n {
                v -= Integer::from(bi * &t[n - i]);
            }
        }
        t.push(v);
    }
    t
}

/// n-th coefficient of A/B by the recurrence.
pub fn crec_eval(spec: &CRecSpec, n: u64) -> Integer {
    let d = spec.degree();
    let n = n as usize;
    if n < d.max(spec.a.len()) + 1 {
        return crec_prefix(spec, n + 1).pop().expect("nonempty");
    }
    let head = crec_prefix(spec, d.max(spec.a.len()) + 1);
    let mut window: Vec<Integer> = head[head.len() - d..].to_vec();
    for _ in head.len()..=n {
        let mut v = Integer::new();
        for (i, bi) in spec.b.iter().enumerate().skip(1) {
            v -= Integer::from(bi * &window[d - i]);
        }
        window.remove(0);
        window.push(v);
    }
    window.pop().expect("nonempty")
}

/// Roots of a real polynomial (constant first) by Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[Integer]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.iter().map(Integer::to_f64).collect();
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}

/// Radius of convergence of A/B at 0, taken as the smallest root modulus of B
/// (infinite for polynomial sequences).
pub fn radius_of_convergence(spec: &CRecSpec) -> f64 {
    polynomial_roots(&spec.b)
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Validity {
    /// c >= 8, 1/c < R, t(n) < c^{n/3}: valid for n >= 1.
    CubeRoot,
    /// c^{-m} < R, t(n) < c^{n-2} for n >= m: valid for n >= m.
    Shifted { m: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivModTerm {
    pub term: Term,
    pub c: Integer,
    pub validity: Validity,
    /// Smallest n covered by the validity condition.
    pub valid_from: u64,
}

/// Terms checked when validating a spec numerically.
pub const VALIDITY_PREFIX: usize = 64;

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_cube_root(t: &[Integer], c: &Integer, radius: f64) -> Result<()> {
    if *c < 8 {
        return Err(Error::ValidityCheckFailed(format!("c = {c} < 8")));
    }
    let cf = c.to_f64();
    if !(1.0 / cf < radius) {
        return Err(Error::ValidityCheckFailed(format!("1/c >= R = {radius}")));
    }
    if !(1.0 / radius < cf.cbrt()) && radius.is_finite() {
        return Err(Error::ValidityCheckFailed(
            "growth rate exceeds c^(1/3)".into(),
        ));
    }
    for (n, v) in t.iter().enumerate().skip(1) {
        if Integer::from(v.pow(3)) >= c.clone().pow(n as u32) {
            return Err(Error::ValidityCheckFailed(format!("t({n})^3 >= c^{n}")));
        }
    }
    Ok(())
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_shifted(t: &[Integer], c: &Integer, radius: f64) -> Result<u64> {
    let cf = c.to_f64();
    if !(1.0 / radius < cf) && radius.is_finite() {
        return Err(Error::ValidityCheckFailed("growth rate exceeds c".into()));
    }
    // smallest m >= 2 with c^{-m} < R and t(n) < c^{n-2} on the rest of the prefix
    let mut m = t.len() as u64;
    for n in (2..t.len()).rev() {
        if t[n] >= c.clone().pow(n as u32 - 2) {
            break;
        }
        m = n as u64;
    }
    while m < t.len() as u64 && !(cf.powi(-(m as i32)) < radius) {
        m += 1;
    }
    if m + 8 > t.len() as u64 {
        return Err(Error::ValidityCheckFailed(format!(
            "t(n) < c^(n-2) does not settle within {} terms",
            t.len()
        )));
    }
    Ok(m)
}

fn validity_for(spec: &CRecSpec, t: &[Integer], c: &Integer) -> Result<(Validity, u64)> {
    let radius = radius_of_convergence(spec);
    match check_cube_root(t, c, radius) {
        Ok(()) => Ok((Validity::CubeRoot, 1)),
        Err(first) => match check_shifted(t, c, radius) {
            Ok(m) => Ok((Validity::Shifted { m }, m)),
            Err(second) => Err(Error::ValidityCheckFailed(format!("{first}; {second}"))),
        },
    }
}

fn c_power(c: &Integer, e: Term) -> Term {
    if *c == 2 {
        Term::pow2(e)
    } else {
        Term::pow(Term::int(c.clone()), e)
    }
}

/// sum_i coeffs[i] * c^{base + (d-i) n}, split into its positive and negative
/// parts and joined with truncated subtraction.
fn signed_sum(coeffs: &[Integer], d: usize, c: &Integer, base: Option<Term>) -> Term {
    let n = || Term::var("n");
    let mut pos: Option<Term> = None;
    let mut neg: Option<Term> = None;
    for (i, k) in coeffs.iter().enumerate() {
        if *k == 0 {
            continue;
        }
        let shift = d - i;
        let lin = match shift {
            0 => None,
            1 => Some(n()),
            s => Some(Term::mul(Term::int(s), n())),
        };
        let exp = match (base.clone(), lin) {
            (Some(b), Some(l)) => Some(Term::add(b, l)),
            (Some(b), None) => Some(b),
            (None, l) => l,
        };
        let power = exp.map(|e| c_power(c, e));
        let mag = Integer::from(k.abs_ref());
        let piece = match power {
            None => Term::int(mag),
            Some(p) if mag == 1 => p,
            Some(p) => Term::mul(Term::int(mag), p),
        };
        let slot = if *k > 0 { &mut pos } else { &mut neg };
        *slot = Some(match slot.take() {
            None => piece,
            Some(acc) => Term::add(acc, piece),
        });
    }
    let pos = pos.unwrap_or_else(|| Term::int(0));
    match neg {
        None => pos,
        Some(neg) => Term::monus(pos, neg),
    }
}

/// floor(c^{n^2} A~(c^n) / B~(c^n)) mod c^n, with A~, B~ the reversed
/// polynomials scaled to degree d = deg B.
pub fn divmod_term(spec: &CRecSpec, c: &Integer) -> Term {
    let d = spec.degree();
    let nn = Term::mul(Term::var("n"), Term::var("n"));
    let num = signed_sum(&spec.a, d, c, Some(nn));
    let den = signed_sum(&spec.b, d, c, None);
    Term::rem(Term::div(num, den), c_power(c, Term::var("n")))
}

/// Smallest c >= 8 accepted by either validity condition.
pub fn minimal_base(spec: &CRecSpec) -> Result<Integer> {
    let t = crec_prefix(spec, VALIDITY_PREFIX);
    let mut last = None;
    for c in 8..=4096u32 {
        match validity_for(spec, &t, &Integer::from(c)) {
            Ok(_) => return Ok(Integer::from(c)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("searched at least one base"))
}

/// Div-mod closed form for `spec`, using its base c when given and the
/// minimal admissible base otherwise.
pub fn extract_divmod_term(spec: &CRecSpec) -> Result<DivModTerm> {
    let t = crec_prefix(spec, VALIDITY_PREFIX);
    if let Some(n) = t.iter().position(|v| *v < 0) {
        return Err(Error::ValidityCheckFailed(format!("t({n}) is negative")));
    }
    let c = match &spec.c {
        Some(c) => c.clone(),
        None => minimal_base(spec)?,
    };
    let (validity, valid_from) = validity_for(spec, &t, &c)?;
    Ok(DivModTerm {
        term: divmod_term(spec, &c),
        c,
        validity,
        valid_from,
    })
}

pub fn eval_at_n(term: &Term, n: u64, budget: Budget) -> Result<Integer> {
    let mut env = Env::new();
    env.insert("n".into(), Integer::from(n));
    eval_with(term, &env, budget)
}

/// floor((11^{n^2+2n} - 2*11^{n^2+n}) / (11^{2n} - 4*11^n + 1)) mod 11^n.
pub fn pell_x_term() -> Term {
    divmod_term(&CRecSpec::pell_x(), &Integer::from(11))
}

pub fn pell_x_term_eval(n: u64, budget: Budget) -> Result<Integer> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "the closed form for x(n) needs n >= 1".into(),
        ));
    }
    eval_at_n(&pell_x_term(), n, budget)
}

/// Exact s(n) is refused past this n.
pub const LEHMER_EXACT_MAX_N: u64 = 25;

/// s(1) = 4, s(k+1) = s(k)^2 - 2; reduced mod `modulus` when given.
pub fn lehmer_s(n: u64, modulus: Option<&Integer>, budget: Budget) -> Result<Integer> {
    if n == 0 {
        return Err(Error::InvalidArgument("s(n) starts at n = 1".into()));
    }
    match modulus {
        Some(m) => {
            if *m <= 0 {
                return Err(Error::InvalidArgument("modulus must be positive".into()));
            }
            let mut s = Integer::from(4) % m;
            for _ in 1..n {
                s.square_mut();
                s -= 2u32;
                s %= m;
                if s < 0 {
                    s += m;
                }
            }
            Ok(s)
        }
        None => {
            // log2 s(n) ~ 2^{n-1} log2(2 + sqrt 3)
            let bits = 2f64.powi(n as i32 - 1) * (2.0 + 3f64.sqrt()).log2();
            if n > LEHMER_EXACT_MAX_N || bits > budget.bits as f64 {
                return Err(Error::budget(
                    "exact s(n)",
                    format!("{bits:.0} bits"),
                    budget.bits,
                ));
            }
            let mut s = Integer::from(4);
            for _ in 1..n {
                s.square_mut();
                s -= 2u32;
            }
            Ok(s)
        }
    }
}

/// 2 ((floor((11^{2^{2n-2}+2^n} - 2*11^{2^{2n-2}+2^{n-1}}) /
///   (11^{2^n} - 4*11^{2^{n-1}} + 1))) mod 11^{2^{n-1}}).
pub fn lehmer_s_term() -> Term {
    let n = || Term::var("n");
    let p = |e: Term| Term::pow(Term::int(11), e);
    let q = || Term::pow2(Term::monus(Term::mul(Term::int(2), n()), Term::int(2)));
    let h = || Term::pow2(Term::monus(n(), Term::int(1)));
    let num = Term::monus(
        p(Term::add(q(), Term::pow2(n()))),
        Term::mul(Term::int(2), p(Term::add(q(), h()))),
    );
    let den = Term::add(
        Term::monus(p(Term::pow2(n())), Term::mul(Term::int(4), p(h()))),
        Term::int(1),
    );
    Term::mul(Term::int(2), Term::rem(Term::div(num, den), p(h())))
}

pub const LEHMER_TERM_MAX_N: u64 = 8;

pub fn lehmer_s_term_eval(n: u64, max_n: u64, budget: Budget) -> Result<Integer> {
    if n == 0 {
        return Err(Error::InvalidArgument("s(n) starts at n = 1".into()));
    }
    if n > max_n {
        return Err(Error::budget(
            "s(n) closed form",
            format!("n = {n}"),
            format!("n <= {max_n}"),
        ));
    }
    eval_at_n(&lehmer_s_term(), n, budget)
}
