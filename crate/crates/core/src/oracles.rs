//! Ground truth: primality, a sieve, and frozen reference values.

use std::sync::OnceLock;

use rug::integer::IsPrime;
use rug::Integer;
use serde::Deserialize;

use crate::budget::Budget;
use crate::counters::{lucas_lehmer_test, pepin_test};
use crate::error::{Error, Result};

pub const SIEVE_LIMIT: u64 = 100_000_000;

/// Miller-Rabin rounds for inputs past 2^64; error probability below 4^-40.
pub const PROBABLE_PRIME_ROUNDS: u32 = 40;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic for every u64 with the first twelve primes as bases.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exact below 2^64 and for 2^p - 1, 2^m + 1; probabilistic otherwise.
pub fn is_prime(n: &Integer) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if *n < 0 {
        return false;
    }
    let up = Integer::from(n + 1u32);
    if up.is_power_of_two() {
        let p = up.significant_bits() - 1;
        return is_prime_u64(u64::from(p)) && lucas_lehmer_test(u64::from(p));
    }
    let down = Integer::from(n - 1u32);
    if down.is_power_of_two() {
        let m = down.significant_bits() - 1;
        return m.is_power_of_two() && pepin_test(u64::from(m));
    }
    n.is_probably_prime(PROBABLE_PRIME_ROUNDS) != IsPrime::No
}

/// Primes up to n.
pub fn sieve(n: u64) -> Result<Vec<u64>> {
    Ok(sieve_flags(n)?
        .iter()
        .enumerate()
        .filter(|(_, &p)| p)
        .map(|(i, _)| i as u64)
        .collect())
}

/// flags[i] is true iff i is prime, for 0 <= i <= n.
pub fn sieve_flags(n: u64) -> Result<Vec<bool>> {
    if n > SIEVE_LIMIT {
        return Err(Error::budget("sieve", n, SIEVE_LIMIT));
    }
    let n = n as usize;
    let mut flags = vec![true; n + 1];
    flags[0] = false;
    if n >= 1 {
        flags[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if flags[i] {
            for j in (i * i..=n).step_by(i) {
                flags[j] = false;
            }
        }
        i += 1;
    }
    Ok(flags)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSet {
    pub mersenne_primes_prefix: Vec<Integer>,
    pub fermat_primes: Vec<Integer>,
    pub twin_lower_prefix: Vec<Integer>,
    pub sophie_prefix: Vec<Integer>,
    /// s(1), s(2), ...
    pub s_values: Vec<Integer>,
    /// x(0), x(1), ...
    pub pell_x_values: Vec<Integer>,
}

#[derive(Deserialize)]
struct RawFixtures {
    mersenne_primes_prefix: Vec<String>,
    fermat_primes: Vec<String>,
    twin_lower_prefix: Vec<String>,
    sophie_prefix: Vec<String>,
    s_values: Vec<String>,
    pell_x_values: Vec<String>,
}

pub const FIXTURES_JSON: &str = include_str!("../data/fixtures.json");

pub fn fixtures() -> &'static FixtureSet {
    static CELL: OnceLock<FixtureSet> = OnceLock::new();
    CELL.get_or_init(|| {
        let raw: RawFixtures = serde_json::from_str(FIXTURES_JSON).expect("bundled fixtures parse");
        let ints = |v: Vec<String>| -> Vec<Integer> {
            v.iter()
                .map(|s| s.parse().expect("bundled fixtures are integers"))
                .collect()
        };
        FixtureSet {
            mersenne_primes_prefix: ints(raw.mersenne_primes_prefix),
            fermat_primes: ints(raw.fermat_primes),
            twin_lower_prefix: ints(raw.twin_lower_prefix),
            sophie_prefix: ints(raw.sophie_prefix),
            s_values: ints(raw.s_values),
            pell_x_values: ints(raw.pell_x_values),
        }
    })
}

/// Budget for oracle sweeps, expressed as a point count.
pub(crate) fn check_range(what: &str, n: u64, limit: u64, budget: Budget) -> Result<()> {
    let limit = limit.min(budget.points);
    if n > limit {
        return Err(Error::budget(what, n, limit));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn examples() {
        assert!(is_prime(&Integer::from(8191)));
        assert!(!is_prime(&Integer::from(2047)));
        assert!(is_prime(&Integer::from(65537)));
        assert_eq!(sieve(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(sieve(2).unwrap(), vec![2]);
        assert_eq!(sieve(30).unwrap().len(), 10);
        assert!(sieve(SIEVE_LIMIT + 1).unwrap_err().is_budget());
        let f = fixtures();
        assert_eq!(f.s_values[3], 37634);
        assert_eq!(f.pell_x_values[7], 5042);
        assert_eq!(
            f.fermat_primes,
            [3, 5, 17, 257, 65537].map(Integer::from).to_vec()
        );
    }

    #[test]
    fn large_special_forms() {
        let m127: Integer = (Integer::from(1) << 127) - 1u32;
        assert!(is_prime(&m127));
        let m67: Integer = (Integer::from(1) << 67) - 1u32;
        assert!(!is_prime(&m67));
        let f5: Integer = (Integer::from(1) << 32) + 1u32;
        assert!(!is_prime(&f5));
        let p: Integer = Integer::from(10).pow(30u32) + 57u32;
        assert_eq!(is_prime(&p), p.is_probably_prime(50) != IsPrime::No);
    }

    #[test]
    fn agrees_with_sieve() {
        let flags = sieve_flags(1_000_000).unwrap();
        for (n, &f) in flags.iter().enumerate() {
            assert_eq!(is_prime_u64(n as u64), f, "{n}");
        }
    }
}
