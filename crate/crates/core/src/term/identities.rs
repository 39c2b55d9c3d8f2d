//! Closed-form identities for the sugar functions, evaluated on big integers.
//!
//! Each function computes the printed formula literally except where noted;
//! the results are compared against the direct definitions in tests.

use rug::ops::{Pow, RemRounding};
use rug::Integer;

use crate::budget::Budget;
use crate::error::{Error, Result};

fn pow2(e: u64) -> Integer {
    Integer::from(1) << (e as u32)
}

fn need(budget: Budget, what: &str, bits: u64) -> Result<()> {
    if bits > budget.bits {
        Err(Error::budget(
            what,
            format!("{bits} bits"),
            format!("{} bits", budget.bits),
        ))
    } else {
        Ok(())
    }
}

/// floor((2^a + 1)^a / 2^{ab}) mod 2^a. Correct for a >= 1; at a = 0 it
/// yields 0 instead of C(0, 0) = 1.
pub fn binom_formula(a: u64, b: u64, budget: Budget) -> Result<Integer> {
    need(budget, "binomial formula", a * a + a + 1)?;
    let top = (pow2(a) + 1u32).pow(a as u32);
    let shift = a.saturating_mul(b);
    let q = if shift > a * a + a {
        Integer::new()
    } else {
        top >> (shift as u32)
    };
    Ok(q.keep_bits(a as u32))
}

/// floor((2^{a+1} + 1)^a / 2^{(a+1)b}) mod 2^{a+1}, the form used by
/// `expand_sugar`; correct for every a >= 0.
pub fn binom_formula_shifted(a: u64, b: u64, budget: Budget) -> Result<Integer> {
    let s = a + 1;
    need(budget, "binomial formula", s * a + s)?;
    let top = (pow2(s) + 1u32).pow(a as u32);
    let shift = s.saturating_mul(b);
    let q = if shift > s * a + s {
        Integer::new()
    } else {
        top >> (shift as u32)
    };
    Ok(q.keep_bits(s as u32))
}

/// Base-5 gcd formula evaluated literally:
/// (floor(5^{ab(ab+a+b)} / ((5^{a^2 b} - 1)(5^{ab^2} - 1))) mod 5^{ab}) - 1.
pub fn gcd_formula_literal(a: u64, b: u64, budget: Budget) -> Result<Integer> {
    if a == 0 || b == 0 {
        return Err(Error::DivisionByZero);
    }
    let ab = a * b;
    let e = ab * (ab + a + b);
    need(
        budget,
        "gcd formula",
        (e as f64 * 5f64.log2()).ceil() as u64,
    )?;
    let five = Integer::from(5);
    let num = five.clone().pow(e as u32);
    let den = (five.clone().pow((a * a * b) as u32) - 1u32)
        * (five.clone().pow((a * b * b) as u32) - 1u32);
    let q = (num / den) % five.pow(ab as u32);
    Ok(if q > 0 { q - 1u32 } else { q })
}

/// Same value as [`gcd_formula_literal`] without materializing 5^{ab(ab+a+b)}.
///
/// With P = 5^A - 1, Q = 5^B - 1 (A = a^2 b, B = ab^2) and E = A(b+1) + B,
/// 5^E = (Q+1)(1 + P G) with G = sum_{j<=b} 5^{Aj}, so
/// 5^E mod PQ = (Q + 1 + P (G mod Q)) mod PQ, and G mod Q only needs the
/// exponents Aj mod B = ab (aj mod b), summed by Horner in base 5^{ab}.
/// The quotient mod 5^{ab} then follows
/// from 5^{ab} | 5^E and gcd(PQ, 5) = 1.
pub fn gcd_formula_fast(a: u64, b: u64) -> Result<Integer> {
    if a == 0 || b == 0 {
        return Err(Error::DivisionByZero);
    }
    let ab = a * b;
    let five = Integer::from(5);
    let p = five.clone().pow((a * a * b) as u32) - 1u32;
    let q = five.clone().pow((a * b * b) as u32) - 1u32;
    let mut counts = vec![0u32; b as usize];
    for j in 0..=b {
        counts[((a * j) % b) as usize] += 1;
    }
    let x = five.clone().pow(ab as u32);
    let mut g = Integer::new();
    for &c in counts.iter().rev() {
        g *= &x;
        g += c;
    }
    g %= &q;
    let d = Integer::from(&p * &q);
    let s = (Integer::from(&q + 1u32) + Integer::from(&p * &g)) % &d;
    let m = five.pow(ab as u32);
    let d_inv = Integer::from(&d % &m)
        .invert(&m)
        .map_err(|_| Error::InvariantViolation("denominator not invertible mod 5^ab".into()))?;
    let r = (-s * d_inv).rem_euc(&m);
    Ok(if r > 0 { r - 1u32 } else { r })
}

/// floor((gcd(n, 2^n)^{n+1} mod (2^{n+1} - 1)^2) / (2^{n+1} - 1)), with the
/// inner gcd computed directly.
///
/// The gcd is 2^v, so with m = 2^{n+1} - 1 the power is (m + 1)^v, which is
/// 1 + v m mod m^2.
pub fn nu2_formula(n: &Integer, budget: Budget) -> Result<Integer> {
    if *n == 0 {
        return Err(Error::Nu2OfZero);
    }
    let n64 = n
        .to_u64()
        .filter(|&v| 2 * (v + 1) <= budget.bits)
        .ok_or_else(|| {
            Error::budget(
                "nu2 formula",
                format!("2^{} modulus", n),
                format!("{} bits", budget.bits),
            )
        })?;
    let g = n.clone().gcd(&pow2(n64));
    let m = pow2(n64 + 1) - 1u32;
    let m2 = Integer::from(&m * &m);
    let v = g.find_one(0).expect("gcd is positive");
    let p = (Integer::from(&m * v) + 1u32) % &m2;
    Ok(p / m)
}

/// Largest (2^{2n} + 1)^{2n} that [`hw_via_term`] expands literally.
pub const HW_BINOM_LITERAL_BITS: u64 = 1 << 20;

/// Hamming weight via nu2(C(2n, n)). The binomial comes from the closed form
/// while (2n)^2 fits the budget and [`HW_BINOM_LITERAL_BITS`], and the nu2
/// formula is used while its 2^{C+1} modulus fits; past either point the
/// direct function is used.
pub fn hw_via_term(n: u64, budget: Budget) -> Result<Integer> {
    if n == 0 {
        return Err(Error::InvalidArgument("hw_via_term needs n >= 1".into()));
    }
    let capped = budget.with_bits(budget.bits.min(HW_BINOM_LITERAL_BITS));
    let c = match binom_formula(2 * n, n, capped) {
        Ok(c) => c,
        Err(e) if e.is_budget() => Integer::from(Integer::binomial_u(2 * n as u32, n as u32)),
        Err(e) => return Err(e),
    };
    match nu2_formula(&c, budget) {
        Ok(v) => Ok(v),
        Err(e) if e.is_budget() => Ok(Integer::from(c.find_one(0).expect("C(2n,n) > 0"))),
        Err(e) => Err(e),
    }
}

/// 2^{(ab+a+1)b} mod (2^{ab+a+1} - a).
pub fn marchenkov_pow(a: u64, b: u64, budget: Budget) -> Result<Integer> {
    let l = a * b + a + 1;
    need(budget, "power formula", l * b + 1)?;
    let m = pow2(l) - a;
    Ok(pow2(l * b) % m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(a: u64, b: u64) -> Integer {
        Integer::from(Integer::binomial_u(a as u32, b as u32))
    }

    #[test]
    fn binomial_closed_forms() {
        let bud = Budget::default();
        for a in 1..=40 {
            for b in 0..=a + 2 {
                assert_eq!(binom_formula(a, b, bud).unwrap(), binom(a, b), "C({a},{b})");
            }
        }
        assert_eq!(binom_formula(0, 0, bud).unwrap(), 0);
        for a in 0..=40 {
            for b in 0..=a + 2 {
                assert_eq!(binom_formula_shifted(a, b, bud).unwrap(), binom(a, b));
            }
        }
    }

    #[test]
    fn gcd_fast_matches_literal() {
        let bud = Budget::default();
        for a in 1..=12 {
            for b in 1..=12 {
                assert_eq!(
                    gcd_formula_fast(a, b).unwrap(),
                    gcd_formula_literal(a, b, bud).unwrap()
                );
            }
        }
        assert_eq!(gcd_formula_fast(1, 1).unwrap(), 1);
        assert_eq!(gcd_formula_fast(0, 3), Err(Error::DivisionByZero));
    }

    #[test]
    fn nu2_and_hw() {
        let bud = Budget::default();
        for n in 1..=300u64 {
            let v = nu2_formula(&Integer::from(n), bud).unwrap();
            assert_eq!(v, n.trailing_zeros());
            let g = Integer::from(n).gcd(&pow2(n));
            let m = pow2(n + 1) - 1u32;
            let literal = g
                .pow_mod(&Integer::from(n + 1), &Integer::from(&m * &m))
                .unwrap()
                / m;
            assert_eq!(v, literal);
        }
        assert_eq!(hw_via_term(13, bud).unwrap(), 3);
        assert_eq!(hw_via_term(1, bud).unwrap(), 1);
        assert_eq!(hw_via_term(64, bud).unwrap(), 1);
        assert!(hw_via_term(0, bud).is_err());
    }

    #[test]
    fn pow_formula() {
        assert_eq!(marchenkov_pow(0, 0, Budget::default()).unwrap(), 1);
        assert_eq!(marchenkov_pow(3, 4, Budget::default()).unwrap(), 81);
    }
}
