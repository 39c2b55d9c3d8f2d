use rug::Integer;

use super::{Factor, Monomial, Square, SquareSystem};
use crate::error::{Error, Result};

/// Turns E = sum(pos) - sum(neg) into a square system F with one fresh
/// unknown y_i per monomial: F = sum (y_i - m_i)^2 + (2^{sum y_pos} - 2^{sum y_neg})^2.
/// The fresh unknowns are appended after `unknowns` in order y_1..y_m.
pub fn nonneg_singlefold_transform(
    unknowns: &[String],
    pos: &[Monomial],
    neg: &[Monomial],
) -> Result<SquareSystem> {
    let k = unknowns.len();
    let m = pos.len() + neg.len();
    for mono in pos.iter().chain(neg) {
        if mono.coeff < 0 {
            return Err(Error::InvalidArgument(
                "monomials must have nonnegative coefficients".into(),
            ));
        }
        if mono.factors.len() != k {
            return Err(Error::InvalidArgument("monomial arity mismatch".into()));
        }
    }
    let mut names = unknowns.to_vec();
    for i in 1..=m {
        let y = format!("y_{i}");
        if names.contains(&y) {
            return Err(Error::InvalidArgument(format!(
                "`{y}` is already an unknown"
            )));
        }
        names.push(y);
    }
    let nvars = k + m;
    let widen = |mono: &Monomial| {
        let mut factors = mono.factors.clone();
        factors.resize(nvars, Factor::one());
        Monomial {
            coeff: mono.coeff.clone(),
            factors,
        }
    };
    let y = |i: usize, f: Factor| {
        let mut mono = Monomial::constant(1, nvars);
        mono.factors[k + i] = f;
        mono
    };
    let mut squares: Vec<Square> = pos
        .iter()
        .chain(neg)
        .enumerate()
        .map(|(i, mono)| Square {
            l: vec![y(
                i,
                Factor {
                    v: Integer::from(1),
                    r: 1,
                },
            )],
            r: vec![widen(mono)],
        })
        .collect();
    let side = |range: std::ops::Range<usize>| {
        let mut mono = Monomial::constant(1, nvars);
        for i in range {
            mono.factors[k + i] = Factor {
                v: Integer::from(2),
                r: 0,
            };
        }
        mono
    };
    let l = side(0..pos.len());
    let r = side(pos.len()..m);
    squares.push(Square {
        l: vec![l],
        r: vec![r],
    });
    SquareSystem::new(names, Vec::new(), squares)
}

#[cfg(test)]
mod tests {
    use super::super::{brute_count, brute_count_box, expand_squares, ExpPolynomial};
    use super::*;
    use crate::budget::Budget;

    fn monos(unknowns: &[&str], text: &str) -> Vec<Monomial> {
        if text.is_empty() {
            return Vec::new();
        }
        ExpPolynomial::parse(unknowns, &[], text).unwrap().monomials
    }

    fn names(u: &[&str]) -> Vec<String> {
        u.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn x_minus_y() {
        let u = ["x", "y"];
        let f = nonneg_singlefold_transform(&names(&u), &monos(&u, "x"), &monos(&u, "y")).unwrap();
        assert_eq!(f.squares.len(), 3);
        assert_eq!(f.unknowns, names(&["x", "y", "y_1", "y_2"]));
        assert_eq!(expand_squares(&f).len(), 9);
    }

    #[test]
    fn affine_example_matches_brute_force() {
        let u = ["x", "y"];
        let f = nonneg_singlefold_transform(&names(&u), &monos(&u, "2*x"), &monos(&u, "y + 1"))
            .unwrap();
        assert_eq!(f.squares.len(), 4);
        let p = expand_squares(&f);
        assert_eq!(p.len(), 12);
        let e = ExpPolynomial::parse(&u, &[], "2*x - y - 1").unwrap();
        for t in 1..=8u64 {
            let direct = brute_count(&e, t, Budget::default()).unwrap();
            let bounds = [t, t, 2 * t, t + 1, t + 1];
            assert_eq!(
                brute_count_box(&p, &bounds, Budget::default()).unwrap(),
                direct,
                "t={t}"
            );
        }
    }

    #[test]
    fn empty_difference() {
        let u = ["x"];
        let f = nonneg_singlefold_transform(&names(&u), &[], &[]).unwrap();
        assert_eq!(f.squares.len(), 1);
        assert_eq!(f.raw_monomial_count(), 3);
        let p = expand_squares(&f);
        assert!(p.is_empty());
        assert_eq!(brute_count(&p, 5, Budget::default()).unwrap(), 5);
    }

    #[test]
    fn rejects_negative_coefficients() {
        let u = ["x"];
        let neg = monos(&u, "-x");
        assert!(nonneg_singlefold_transform(&names(&u), &neg, &[]).is_err());
    }
}
