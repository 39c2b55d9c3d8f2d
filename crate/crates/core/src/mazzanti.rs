//! Counting the zeros of a simple exponential polynomial in a cube through
//! the Hamming weight of one big integer M(f, t, w).

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::Integer;
use serde::Serialize;
use serde_json::Value;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::expdio::{self, ExpPolynomial};

fn pow2(e: u64) -> Integer {
    Integer::from(1) << u32::try_from(e).expect("exponent checked against the bit budget")
}

fn exact_div(num: Integer, den: &Integer, what: &str) -> Result<Integer> {
    let (q, r) = num.div_rem(den.clone());
    if r != 0 {
        return Err(Error::InvariantViolation(format!(
            "{what}: inexact division"
        )));
    }
    Ok(q)
}

/// S_r(q, t) = sum_{j<t} j^r q^j, with 0^0 = 1.
pub fn geo_sum(r: u32, q: &Integer, t: u64) -> Integer {
    if t == 0 {
        return Integer::new();
    }
    if *q == 1 {
        let t = Integer::from(t);
        return match r {
            0 => t,
            1 => (&t * Integer::from(&t - 1u32)) / 2u32,
            2 => {
                let s = Integer::from(&t - 1u32) * &t * (Integer::from(&t * 2u32) - 1u32);
                s / 6u32
            }
            _ => geo_sum_direct(r, q, t.to_u64().expect("small")),
        };
    }
    if *q < 2 || r > 2 {
        return geo_sum_direct(r, q, t);
    }
    let n = t - 1;
    let qm1 = Integer::from(q - 1u32);
    let qn = q.clone().pow(u32::try_from(n).expect("t fits u32"));
    let qn1 = Integer::from(&qn * q);
    let (num, den) = match r {
        0 => (qn1 - 1u32, qm1),
        1 => {
            // q (n q^{n+1} - (n+1) q^n + 1) / (q-1)^2
            let inner = Integer::from(&qn1 * n) - Integer::from(&qn * (n + 1)) + 1u32;
            (inner * q, qm1.square())
        }
        _ => {
            // q ((n+1)^2 q^n - (2n^2+2n-1) q^{n+1} + n^2 q^{n+2} - 1 - q) / (q-1)^3
            let n = Integer::from(n);
            let qn2 = Integer::from(&qn1 * q);
            let a = Integer::from(&n + 1u32).square();
            let b = Integer::from(&n * &n) * 2u32 + Integer::from(&n * 2u32) - 1u32;
            let c = Integer::from(&n * &n);
            let inner = a * &qn - b * &qn1 + c * qn2 - 1u32 - q;
            (inner * q, qm1.pow(3))
        }
    };
    exact_div(num, &den, "geometric sum").expect("closed forms divide exactly")
}

fn geo_sum_direct(r: u32, q: &Integer, t: u64) -> Integer {
    let mut acc = Integer::new();
    let mut qj = Integer::from(1);
    for j in 0..t {
        acc += Integer::from(j).pow(r) * &qj;
        qj *= q;
    }
    acc
}

/// delta(a, b) = (2^b - 1)(2^b - a + 1), defined for 0 <= a < 2^b.
pub fn delta(a: &Integer, b: u64) -> Result<Integer> {
    if b == 0 || *a < 0 || *a >= pow2(b) {
        return Err(Error::InvalidArgument(format!(
            "delta needs 0 <= a < 2^b, got a={a}, b={b}"
        )));
    }
    Ok(delta_unchecked(a, b))
}

fn delta_unchecked(a: &Integer, b: u64) -> Integer {
    let p = pow2(b);
    Integer::from(&p - 1u32) * (p - a + 1u32)
}

pub fn popcount(n: &Integer) -> u64 {
    u64::from(n.count_ones().expect("nonnegative"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingInstance {
    /// Polynomial in its unknowns only.
    pub poly: ExpPolynomial,
    pub t: u64,
    pub w: u64,
}

impl CountingInstance {
    pub fn new(poly: ExpPolynomial, t: u64, w: u64) -> Result<Self> {
        if !poly.params.is_empty() {
            return Err(Error::InvalidArgument("fix the parameters first".into()));
        }
        if t == 0 || w == 0 {
            return Err(Error::InvalidArgument("t and w must be positive".into()));
        }
        Ok(CountingInstance { poly, t, w })
    }

    /// Bits of M's largest term, 2w t^k.
    pub fn m_bits(&self) -> Option<u64> {
        let tk = self.t.checked_pow(u32::try_from(self.poly.k()).ok()?)?;
        tk.checked_mul(2)?.checked_mul(self.w)
    }

    fn check_budget(&self, budget: Budget) -> Result<()> {
        match self.m_bits() {
            Some(b) if b <= budget.bits => Ok(()),
            other => Err(Error::budget(
                "M(f, t, w)",
                other.map_or("more than 2^64 bits".to_string(), |b| format!("{b} bits")),
                format!("{} bits", budget.bits),
            )),
        }
    }
}

/// C_k(c0, t, w) = (2^w - c0 + 1)(2^{2w t^k} - 1) / (2^w + 1).
pub fn term_c(c0: &Integer, t: u64, w: u64, k: u32) -> Result<Integer> {
    let pw = pow2(w);
    let tk = t.pow(k);
    let num = Integer::from(&pw - c0) + 1u32;
    let num = num * (pow2(2 * w * tk) - 1u32);
    exact_div(num, &(pw + 1u32), "C_k")
}

/// A_k(m, t, w) = -(2^w - 1) c prod_i S_{r_i}(2^{2w t^{i-1}} v_i, t).
pub fn term_a(m: &expdio::Monomial, t: u64, w: u64) -> Integer {
    let mut acc = (-(pow2(w) - 1u32)) * &m.coeff;
    let mut stride = 2 * w;
    for f in &m.factors {
        let q = Integer::from(&f.v << u32::try_from(stride).expect("budgeted"));
        acc *= geo_sum(f.r, &q, t);
        stride *= t;
    }
    acc
}

/// M(f, t, w) = C_k(c0) + sum over non-constant monomials of A_k.
pub fn build_m(ci: &CountingInstance, budget: Budget) -> Result<Integer> {
    ci.check_budget(budget)?;
    let k = u32::try_from(ci.poly.k()).expect("few unknowns");
    let mut m = term_c(&ci.poly.constant_term(), ci.t, ci.w, k)?;
    for mono in ci.poly.monomials.iter().filter(|m| !m.is_constant()) {
        m += term_a(mono, ci.t, ci.w);
    }
    Ok(m)
}

/// M by its definition, sum over the cube of 2^{2w beta(a)} delta(f(a), w).
/// Used as an oracle; f may take any integer values here.
pub fn build_m_direct(ci: &CountingInstance, budget: Budget) -> Result<Integer> {
    ci.check_budget(budget)?;
    let k = ci.poly.k();
    let mut point = vec![Integer::new(); k];
    let mut idx = vec![0u64; k];
    let total = ci.t.pow(k as u32);
    let mut m = Integer::new();
    for beta in 0..total {
        for (p, &i) in point.iter_mut().zip(&idx) {
            *p = Integer::from(i);
        }
        let f = ci.poly.eval_at(&point);
        m += delta_unchecked(&f, ci.w) << u32::try_from(2 * ci.w * beta).expect("budgeted");
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < ci.t {
                break;
            }
            *slot = 0;
        }
    }
    Ok(m)
}

/// HW(M)/w - t^k.
pub fn count_solutions(ci: &CountingInstance, budget: Budget) -> Result<u64> {
    let m = build_m(ci, budget)?;
    if m < 0 {
        return Err(Error::InvariantViolation(
            "M is negative; f leaves [0, 2^w)".into(),
        ));
    }
    let hw = popcount(&m);
    if !hw.is_multiple_of(ci.w) {
        return Err(Error::InvariantViolation(format!(
            "HW(M) = {hw} is not a multiple of w = {}",
            ci.w
        )));
    }
    let tk = ci.t.pow(ci.poly.k() as u32);
    (hw / ci.w)
        .checked_sub(tk)
        .ok_or_else(|| Error::InvariantViolation("HW(M)/w < t^k".into()))
}

/// Smallest w with sum |c| prod v^{t-1} (t-1)^r < 2^w (at least 1).
pub fn choose_w(p: &ExpPolynomial, t: u64) -> u64 {
    let top = Integer::from(t.saturating_sub(1));
    let point = vec![top; p.k() + p.params.len()];
    let bound: Integer = p.monomials.iter().map(|m| m.eval_at(&point).abs()).sum();
    u64::from(bound.significant_bits()).max(1)
}

/// w(t) = slope t + intercept, valid for every t >= 1: each monomial is at
/// most |c| 2^{t (log2 prod v + sum r)} when every variable, parameters
/// included, lies in [0, t-1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearW {
    pub slope: u64,
    pub intercept: u64,
}

impl LinearW {
    pub fn at(&self, t: &Integer) -> Integer {
        Integer::from(t * self.slope) + self.intercept
    }
}

pub fn choose_w_symbolic(p: &ExpPolynomial) -> LinearW {
    let slope = p
        .monomials
        .iter()
        .map(|m| {
            let prod: Integer = m.factors.iter().map(|f| f.v.clone()).product();
            let log = u64::from(Integer::from(&prod - 1u32).significant_bits());
            log + m.factors.iter().map(|f| u64::from(f.r)).sum::<u64>()
        })
        .max()
        .unwrap_or(0);
    let coeffs: Integer = p.monomials.iter().map(|m| m.coeff.clone().abs()).sum();
    LinearW {
        slope,
        intercept: u64::from(coeffs.significant_bits()).max(1),
    }
}

/// Non-constant monomials grouped by the multiset of their nonzero r_i over
/// the unknowns; the empty key collects the products of G_0 factors only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MProfile {
    pub groups: BTreeMap<String, usize>,
    pub products: usize,
    pub total_monomials: usize,
}

pub fn profile_key(rs: &[u32]) -> String {
    if rs.is_empty() {
        "G0 only".into()
    } else {
        let parts: Vec<String> = rs.iter().map(|r| format!("G{r}")).collect();
        parts.join("*")
    }
}

pub fn m_profile(p: &ExpPolynomial) -> MProfile {
    let k = p.k();
    let mut groups = BTreeMap::new();
    let mut products = 0;
    for m in p.monomials.iter().filter(|m| !m.is_constant()) {
        let mut rs: Vec<u32> = m.factors[..k]
            .iter()
            .map(|f| f.r)
            .filter(|&r| r > 0)
            .collect();
        rs.sort_unstable_by(|a, b| b.cmp(a));
        *groups.entry(profile_key(&rs)).or_insert(0) += 1;
        products += 1;
    }
    MProfile {
        groups,
        products,
        total_monomials: p.len(),
    }
}

/// Polynomial JSON plus `"t"` and `"w"` as decimal strings; `"w"` may be
/// omitted, in which case [`choose_w`] picks it.
pub fn instance_from_json(v: &Value) -> Result<CountingInstance> {
    let poly = expdio::poly_from_json(v)?;
    let num = |key: &str| -> Result<Option<u64>> {
        match v.get(key) {
            None => Ok(None),
            Some(x) => x
                .as_u64()
                .or_else(|| x.as_str().and_then(|s| s.parse().ok()))
                .map(Some)
                .ok_or_else(|| {
                    Error::Format(format!(
                        "`{key}` must be a natural number or decimal string"
                    ))
                }),
        }
    };
    let t = num("t")?.ok_or_else(|| Error::Format("instance needs `t`".into()))?;
    let w = match num("w")? {
        Some(w) => w,
        None => choose_w(&poly, t),
    };
    CountingInstance::new(poly, t, w)
}

pub fn instance_to_json(ci: &CountingInstance) -> Value {
    let mut v = expdio::poly_to_json(&ci.poly);
    v["t"] = Value::String(ci.t.to_string());
    v["w"] = Value::String(ci.w.to_string());
    v
}
