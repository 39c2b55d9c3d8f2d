use rug::ops::Pow;
use rug::Integer;

use super::ExpPolynomial;
use crate::budget::Budget;
use crate::error::{Error, Result};

/// Number of zeros of `p` in [0, t)^k by exhaustive enumeration.
pub fn brute_count(p: &ExpPolynomial, t: u64, budget: Budget) -> Result<u64> {
    brute_count_box(p, &vec![t; p.k()], budget)
}

/// Number of zeros of `p` in the box prod [0, bounds_i).
pub fn brute_count_box(p: &ExpPolynomial, bounds: &[u64], budget: Budget) -> Result<u64> {
    if !p.params.is_empty() {
        return Err(Error::InvalidArgument(
            "fix the parameters before counting".into(),
        ));
    }
    if bounds.len() != p.k() {
        return Err(Error::InvalidArgument(
            "one bound per unknown required".into(),
        ));
    }
    let points = bounds
        .iter()
        .try_fold(1u64, |acc, &b| acc.checked_mul(b))
        .filter(|&n| n <= budget.points)
        .ok_or_else(|| {
            Error::budget(
                "brute-force enumeration",
                format!("{bounds:?} box"),
                format!("{} points", budget.points),
            )
        })?;
    if points == 0 {
        return Ok(0);
    }
    // table[m][i][a] = value of monomial m's factor for unknown i at a
    let tables: Vec<Vec<Vec<Integer>>> = p
        .monomials
        .iter()
        .map(|m| {
            m.factors
                .iter()
                .zip(bounds)
                .map(|(f, &b)| {
                    (0..b)
                        .map(|a| {
                            let e = u32::try_from(a).expect("bounded by the point budget");
                            f.v.clone().pow(e) * Integer::from(a).pow(f.r)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut point = vec![0usize; bounds.len()];
    let mut count = 0;
    loop {
        let mut sum = Integer::new();
        for (m, table) in p.monomials.iter().zip(&tables) {
            let mut v = m.coeff.clone();
            for (i, &a) in point.iter().enumerate() {
                v *= &table[i][a];
            }
            sum += v;
        }
        if sum == 0 {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == point.len() {
                return Ok(count);
            }
            point[i] += 1;
            if (point[i] as u64) < bounds[i] {
                break;
            }
            point[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{expand_squares, SquareSystem};
    use super::*;

    fn count(text: &str, vars: &[&str], t: u64) -> u64 {
        let p = ExpPolynomial::parse(vars, &[], text).unwrap();
        brute_count(&p, t, Budget::default()).unwrap()
    }

    #[test]
    fn small_counts() {
        let s = SquareSystem::parse(&["x", "y"], &[], &[("x + 2", "y")]).unwrap();
        assert_eq!(
            brute_count(&expand_squares(&s), 6, Budget::default()).unwrap(),
            4
        );
        assert_eq!(count("x^2 - 2*x + 1", &["x"], 3), 1);
        assert_eq!(count("x^2 + 2*x + 1", &["x"], 4), 0);
        assert_eq!(count("0", &["x", "y"], 3), 9);
        assert_eq!(count("2^x - 4", &["x"], 10), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let p = ExpPolynomial::parse(&["x", "y", "z"], &[], "x").unwrap();
        let err = brute_count(&p, 1000, Budget::default().with_points(1000)).unwrap_err();
        assert!(err.is_budget());
    }
}
