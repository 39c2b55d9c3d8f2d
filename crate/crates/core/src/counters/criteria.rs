//! Primality criteria for the special families and the counting oracles built
//! on them. Factorials are only ever reduced modulo the relevant divisor.

use rug::Integer;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::oracles::check_range;

pub const MERSENNE_ORACLE_MAX_N: u64 = 60;
pub const FERMAT_ORACLE_MAX_N: u64 = 20_000;
pub const CLEMENT_MAX_K: u64 = 100_000;
pub const SG_MAX_P: u64 = 100_000;

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    a * b % m
}

/// m! mod modulus for modulus < 2^64.
pub fn factorial_mod_u64(m: u64, modulus: u64) -> u64 {
    let md = u128::from(modulus);
    let mut acc = 1u128 % md;
    for i in 2..=u128::from(m) {
        acc = mul_mod(acc, i % md, md);
        if acc == 0 {
            break;
        }
    }
    acc as u64
}

/// 2^p - 1 is prime iff it divides s(p-1); p = 2 is special-cased.
pub fn lucas_lehmer_test(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p == 2 {
        return true;
    }
    let bits = u32::try_from(p).expect("exponent fits u32");
    let m: Integer = (Integer::from(1) << bits) - 1u32;
    let mut s = Integer::from(4);
    for _ in 0..p - 2 {
        s.square_mut();
        s -= 2u32;
        // x mod 2^p - 1 = (x & (2^p - 1)) + (x >> p), applied until below 2^p
        while s.significant_bits() > bits {
            let hi = Integer::from(&s >> bits);
            s.keep_bits_mut(bits);
            s += hi;
        }
        if s == m {
            s = Integer::new();
        }
    }
    s == 0
}

/// 2^m + 1 is prime iff 12^{2^{m-1}} = -1 mod 2^m + 1; m <= 1 special-cased.
pub fn pepin_test(m: u64) -> bool {
    if m <= 1 {
        return true;
    }
    let bits = u32::try_from(m).expect("exponent fits u32");
    let n: Integer = (Integer::from(1) << bits) + 1u32;
    let e = Integer::from(1) << (bits - 1);
    let r = Integer::from(12).pow_mod(&e, &n).expect("positive modulus");
    r == Integer::from(&n - 1u32)
}

/// (3g+2) | 12^{3g+2} and (6g+5) | 12^{3g+2} + 1.
pub fn jones_test(g: u64) -> bool {
    let e = Integer::from(3 * g + 2);
    let twelve = Integer::from(12);
    let first = twelve.clone().pow_mod(&e, &e).expect("positive modulus") == 0;
    let n = Integer::from(6 * g + 5);
    let second = twelve.pow_mod(&e, &n).expect("positive modulus") == Integer::from(&n - 1u32);
    first && second
}

/// |{k <= n : 2^{k+2} - 1 prime}|.
pub fn mersenne_count_oracle(n: u64, budget: Budget) -> Result<u64> {
    check_range("Mersenne oracle", n, MERSENNE_ORACLE_MAX_N, budget)?;
    Ok((0..=n).filter(|&k| lucas_lehmer_test(k + 2)).count() as u64)
}

/// |{g <= n : 6g + 5 a Fermat prime}|.
pub fn fermat_count_oracle(n: u64, budget: Budget) -> Result<u64> {
    check_range("Fermat oracle", n, FERMAT_ORACLE_MAX_N, budget)?;
    Ok((0..=n).filter(|&g| jones_test(g)).count() as u64)
}

/// (k+2)(k+4) | 4 (k+1)! + k + 6.
pub fn clement_test(k: u64) -> Result<bool> {
    if k > CLEMENT_MAX_K {
        return Err(Error::budget("Clement test", k, CLEMENT_MAX_K));
    }
    let m = (k + 2) * (k + 4);
    let f = u128::from(factorial_mod_u64(k + 1, m));
    let v = (4 * f + u128::from(k) + 6) % u128::from(m);
    Ok(v == 0)
}

/// True unless n has a prime factor below 50 other than itself.
fn passes_wheel(n: u64) -> bool {
    const SMALL: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    SMALL.iter().all(|&p| n == p || !n.is_multiple_of(p))
}

/// Primes p <= n with p + 2 prime, by Clement's criterion. Candidates with a
/// small factor in p or p + 2 are skipped without running the criterion.
pub fn twin_count_oracle(n: u64, budget: Budget) -> Result<u64> {
    check_range("twin oracle", n, CLEMENT_MAX_K, budget)?;
    let mut count = 0;
    for p in 2..=n {
        if passes_wheel(p) && passes_wheel(p + 2) && clement_test(p - 2)? {
            count += 1;
        }
    }
    Ok(count)
}

/// p = 2 or p(2p+1) | ((p-1)!)^2 + 6p - 1.
pub fn sg_test_rotondo(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p == 2 {
        return true;
    }
    let m = p * (2 * p + 1);
    let f = u128::from(factorial_mod_u64(p - 1, m));
    let md = u128::from(m);
    (f * f % md + 6 * u128::from(p) - 1) % md == 0
}

/// p | (p-1)! + 1 and (2p+1) | (2p)! + 1.
pub fn sg_test_wilson(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let a = (factorial_mod_u64(p - 1, p) + 1).is_multiple_of(p);
    let q = 2 * p + 1;
    a && (factorial_mod_u64(2 * p, q) + 1).is_multiple_of(q)
}

/// p and 2p + 1 both prime; both criteria are evaluated and must agree.
pub fn sg_test(p: u64) -> Result<bool> {
    if p > SG_MAX_P {
        return Err(Error::budget("Sophie Germain test", p, SG_MAX_P));
    }
    let r = sg_test_rotondo(p);
    let w = sg_test_wilson(p);
    if r != w {
        return Err(Error::InvariantViolation(format!(
            "Sophie Germain criteria disagree at p = {p}"
        )));
    }
    Ok(r)
}

/// Sophie Germain primes p <= n, with the same small-factor prefilter as
/// [`twin_count_oracle`].
pub fn sg_count_oracle(n: u64, budget: Budget) -> Result<u64> {
    check_range("Sophie Germain oracle", n, SG_MAX_P, budget)?;
    let mut count = 0;
    for p in 2..=n {
        if passes_wheel(p) && passes_wheel(2 * p + 1) && sg_test(p)? {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{is_prime_u64, sieve_flags};

    #[test]
    fn examples() {
        assert!(lucas_lehmer_test(3));
        assert!(!lucas_lehmer_test(11));
        assert!(lucas_lehmer_test(13));
        assert!(pepin_test(2));
        assert!(jones_test(0));
        assert!(!jones_test(1));
        assert!(jones_test(42));
        assert!(jones_test(10922));
        assert!(clement_test(1).unwrap());
        assert!(clement_test(3).unwrap());
        assert!(!clement_test(5).unwrap());
        assert!(sg_test(2).unwrap());
        assert!(sg_test(5).unwrap());
        assert!(!sg_test(7).unwrap());
        assert_eq!(factorial_mod_u64(6, 7), 6);
        assert_eq!(factorial_mod_u64(3, 4), 2);
    }

    #[test]
    fn counts() {
        let b = Budget::default();
        assert_eq!(mersenne_count_oracle(0, b).unwrap(), 1);
        assert_eq!(mersenne_count_oracle(5, b).unwrap(), 4);
        assert_eq!(mersenne_count_oracle(11, b).unwrap(), 5);
        assert_eq!(fermat_count_oracle(0, b).unwrap(), 1);
        assert_eq!(fermat_count_oracle(2, b).unwrap(), 2);
        assert_eq!(twin_count_oracle(10, b).unwrap(), 2);
        assert_eq!(twin_count_oracle(30, b).unwrap(), 5);
        assert_eq!(twin_count_oracle(2, b).unwrap(), 0);
        assert_eq!(sg_count_oracle(30, b).unwrap(), 6);
        assert!(mersenne_count_oracle(61, b).unwrap_err().is_budget());
    }

    #[test]
    fn special_forms_agree_with_primality() {
        for p in 2..=64u64 {
            let m = (1u128 << p) - 1;
            if m < u128::from(u64::MAX) {
                assert_eq!(lucas_lehmer_test(p), is_prime_u64(m as u64), "p={p}");
            }
        }
        for m in 0..=16u64 {
            assert_eq!(pepin_test(m), is_prime_u64((1 << m) + 1), "m={m}");
        }
        for g in 0..=11_000u64 {
            let n = 6 * g + 5;
            let fermat = (n - 1).is_power_of_two() && (n - 1).trailing_zeros().is_power_of_two();
            assert_eq!(jones_test(g), fermat && is_prime_u64(n), "g={g}");
        }
    }

    #[test]
    fn clement_and_sg_agree_with_sieve() {
        let flags = sieve_flags(20_100).unwrap();
        for k in 0..=2000u64 {
            let twin = flags[(k + 2) as usize] && flags[(k + 4) as usize];
            assert_eq!(clement_test(k).unwrap(), twin, "k={k}");
        }
        for p in 0..=2000u64 {
            let sg = flags[p as usize] && flags[(2 * p + 1) as usize];
            assert_eq!(sg_test(p).unwrap(), sg, "p={p}");
        }
    }
}
