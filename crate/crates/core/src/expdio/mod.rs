//! Simple exponential polynomials c * prod v_i^{x_i} x_i^{r_i} and systems of
//! squared differences built from them.

mod brute;
mod json;
mod parse;
mod sparse;
mod transform;

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::Integer;

use crate::budget::Budget;
use crate::error::{Error, Result};

pub use brute::{brute_count, brute_count_box};
pub use json::{
    poly_from_json, poly_to_json, system_from_json, system_to_json, witness_from_json,
    witness_to_json,
};
pub use sparse::Sparse;
pub use transform::nonneg_singlefold_transform;

/// Assignment of values to unknowns (and parameters such as `n`).
pub type Witness = BTreeMap<String, Sparse>;

/// The factor v^x * x^r contributed by one variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub v: Integer,
    pub r: u32,
}

impl Factor {
    pub fn one() -> Self {
        Factor {
            v: Integer::from(1),
            r: 0,
        }
    }

    pub fn is_one(&self) -> bool {
        self.v == 1 && self.r == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: Integer,
    /// One entry per variable of the owning polynomial, unknowns first.
    pub factors: Vec<Factor>,
}

impl Monomial {
    pub fn constant(c: impl Into<Integer>, nvars: usize) -> Self {
        Monomial {
            coeff: c.into(),
            factors: vec![Factor::one(); nvars],
        }
    }

    pub fn is_constant(&self) -> bool {
        self.factors.iter().all(Factor::is_one)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            coeff: Integer::from(&self.coeff * &other.coeff),
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| Factor {
                    v: Integer::from(&a.v * &b.v),
                    r: a.r + b.r,
                })
                .collect(),
        }
    }

    pub fn scaled(&self, k: &Integer) -> Monomial {
        Monomial {
            coeff: Integer::from(&self.coeff * k),
            factors: self.factors.clone(),
        }
    }

    /// Exact value at a point of small coordinates.
    pub fn eval_at(&self, point: &[Integer]) -> Integer {
        let mut acc = self.coeff.clone();
        for (f, x) in self.factors.iter().zip(point) {
            if f.r > 0 {
                acc *= Integer::from(x.pow(f.r));
            }
            if f.v != 1 {
                let e = x.to_u32().expect("point coordinate fits u32");
                acc *= f.v.clone().pow(e);
            }
        }
        acc
    }

    /// Exact value at a point whose coordinates may be astronomically large.
    /// Exponentials with an odd part are materialized within the budget; pure
    /// powers of two only need the exponent.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn eval_sparse(&self, point: &[Sparse], budget: Budget) -> Result<Sparse> {
        let mut acc = Sparse::from_int(self.coeff.clone());
        let mut shift = Integer::new();
        for (f, x) in self.factors.iter().zip(point) {
            if f.r > 0 {
                acc = acc.mul(&x.pow(f.r));
            }
            if f.v == 1 {
                continue;
            }
            let s = f.v.find_one(0).expect("v >= 1");
            let odd = Integer::from(&f.v >> s);
            let xv = x.to_integer(budget)?;
            if s > 0 {
                shift += Integer::from(&xv * s);
            }
            if odd != 1 {
                let need = f64::from(odd.significant_bits()) * xv.to_f64();
                if !(need <= budget.bits as f64) {
                    return Err(Error::budget(
                        "odd exponential",
                        format!("{need:.0} bits"),
                        budget.bits,
                    ));
                }
                let p = odd.pow(xv.to_u32().expect("checked by budget"));
                acc = acc.mul_int(&p);
            }
        }
        Ok(acc.shl(&shift))
    }

    /// Upper bound of log2 |m| at the given coordinates (floats, no overflow).
    pub fn log2_at(&self, point: &[f64]) -> f64 {
        let mut l = self.coeff.to_f64().abs().log2();
        for (f, &x) in self.factors.iter().zip(point) {
            if f.r > 0 && x > 0.0 {
                l += f64::from(f.r) * x.log2();
            }
            if f.v != 1 {
                l += x * f.v.to_f64().log2();
            }
        }
        l
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpPolynomial {
    pub unknowns: Vec<String>,
    /// Fixed inputs such as `n`; their factors follow the unknowns' factors.
    pub params: Vec<String>,
    pub monomials: Vec<Monomial>,
}

fn canonicalize(monomials: Vec<Monomial>) -> Vec<Monomial> {
    let mut merged: BTreeMap<Vec<Factor>, Integer> = BTreeMap::new();
    for m in monomials {
        *merged.entry(m.factors).or_default() += m.coeff;
    }
    merged
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(factors, coeff)| Monomial { coeff, factors })
        .collect()
}

impl ExpPolynomial {
    pub fn new(unknowns: Vec<String>, params: Vec<String>, monomials: Vec<Monomial>) -> Self {
        let nvars = unknowns.len() + params.len();
        assert!(monomials.iter().all(|m| m.factors.len() == nvars));
        ExpPolynomial {
            unknowns,
            params,
            monomials: canonicalize(monomials),
        }
    }

    /// Parses e.g. `"x^2 - 2*x + 1"` or `"2*11^f*121^a*b^2"`.
    pub fn parse(unknowns: &[&str], params: &[&str], text: &str) -> Result<Self> {
        let u: Vec<String> = unknowns.iter().map(|s| s.to_string()).collect();
        let p: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let monomials = parse::parse_sum(&u, &p, text)?;
        Ok(ExpPolynomial::new(u, p, monomials))
    }

    pub fn k(&self) -> usize {
        self.unknowns.len()
    }

    pub fn var_names(&self) -> impl Iterator<Item = &String> {
        self.unknowns.iter().chain(&self.params)
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Constant monomial's coefficient (0 if absent).
    pub fn constant_term(&self) -> Integer {
        self.monomials
            .iter()
            .find(|m| m.is_constant())
            .map(|m| m.coeff.clone())
            .unwrap_or_default()
    }

    /// Substitutes the parameters, leaving a polynomial in the unknowns only.
    pub fn fix_params(&self, values: &[Integer]) -> Result<ExpPolynomial> {
        if values.len() != self.params.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} parameter values, got {}",
                self.params.len(),
                values.len()
            )));
        }
        let k = self.k();
        let monomials = self
            .monomials
            .iter()
            .map(|m| {
                let tail = Monomial {
                    coeff: Integer::from(1),
                    factors: m.factors[k..].to_vec(),
                };
                Monomial {
                    coeff: (&m.coeff * tail.eval_at(values)),
                    factors: m.factors[..k].to_vec(),
                }
            })
            .collect();
        Ok(ExpPolynomial::new(
            self.unknowns.clone(),
            Vec::new(),
            monomials,
        ))
    }

    fn point(&self, w: &Witness) -> Result<Vec<Sparse>> {
        self.var_names()
            .map(|name| {
                w.get(name)
                    .cloned()
                    .ok_or_else(|| Error::UnboundVariable(name.clone()))
            })
            .collect()
    }

    /// Exact value as a sparse sum; suitable for exact zero tests at huge
    /// witnesses.
    pub fn eval_sparse(&self, w: &Witness, budget: Budget) -> Result<Sparse> {
        let point = self.point(w)?;
        let mut acc = Sparse::zero();
        for m in &self.monomials {
            acc = acc.add(&m.eval_sparse(&point, budget)?);
        }
        Ok(acc)
    }

    /// Exact value at small coordinates.
    pub fn eval_at(&self, point: &[Integer]) -> Integer {
        self.monomials.iter().map(|m| m.eval_at(point)).sum()
    }

    pub fn to_text(&self) -> String {
        parse::render_sum(&self.unknowns, &self.params, &self.monomials)
    }
}

impl fmt::Display for ExpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Exact signed value of `p` at `w`.
pub fn eval_poly(p: &ExpPolynomial, w: &Witness, budget: Budget) -> Result<Integer> {
    p.eval_sparse(w, budget)?.to_integer(budget)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub l: Vec<Monomial>,
    pub r: Vec<Monomial>,
}

/// Represents sum_i (L_i - R_i)^2 = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareSystem {
    pub unknowns: Vec<String>,
    pub params: Vec<String>,
    pub squares: Vec<Square>,
}

impl SquareSystem {
    /// Builds a system from textual sides; unknowns are sorted.
    pub fn parse(unknowns: &[&str], params: &[&str], squares: &[(&str, &str)]) -> Result<Self> {
        let mut u: Vec<String> = unknowns.iter().map(|s| s.to_string()).collect();
        u.sort();
        u.dedup();
        if u.len() != unknowns.len() {
            return Err(Error::InvalidArgument("duplicate unknown".into()));
        }
        let p: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let squares = squares
            .iter()
            .map(|(l, r)| {
                Ok(Square {
                    l: parse::parse_sum(&u, &p, l)?,
                    r: parse::parse_sum(&u, &p, r)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SquareSystem::new(u, p, squares)
    }

    pub fn new(unknowns: Vec<String>, params: Vec<String>, squares: Vec<Square>) -> Result<Self> {
        let nvars = unknowns.len() + params.len();
        for sq in &squares {
            for m in sq.l.iter().chain(&sq.r) {
                if m.factors.len() != nvars {
                    return Err(Error::InvalidArgument("monomial arity mismatch".into()));
                }
                if m.coeff < 0 {
                    return Err(Error::InvalidArgument(
                        "square sides must have nonnegative coefficients".into(),
                    ));
                }
            }
        }
        Ok(SquareSystem {
            unknowns,
            params,
            squares,
        })
    }

    fn diff(sq: &Square) -> Vec<Monomial> {
        sq.l.iter()
            .cloned()
            .chain(sq.r.iter().map(|m| m.scaled(&Integer::from(-1))))
            .collect()
    }

    /// Number of monomials produced by expanding each square before any
    /// merging: a side difference of p terms gives p(p+1)/2 products.
    pub fn raw_monomial_count(&self) -> usize {
        self.squares
            .iter()
            .map(|sq| {
                let p = sq.l.len() + sq.r.len();
                p * (p + 1) / 2
            })
            .sum()
    }

    /// Value of every L_i - R_i at the witness.
    pub fn residuals(&self, w: &Witness, budget: Budget) -> Result<Vec<Sparse>> {
        let probe = ExpPolynomial {
            unknowns: self.unknowns.clone(),
            params: self.params.clone(),
            monomials: Vec::new(),
        };
        let point = probe.point(w)?;
        self.squares
            .iter()
            .map(|sq| {
                let mut acc = Sparse::zero();
                for m in Self::diff(sq) {
                    acc = acc.add(&m.eval_sparse(&point, budget)?);
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Expands sum (L - R)^2 into canonical monomials.
pub fn expand_squares(s: &SquareSystem) -> ExpPolynomial {
    let mut out = Vec::new();
    for sq in &s.squares {
        let d = SquareSystem::diff(sq);
        for i in 0..d.len() {
            out.push(d[i].mul(&d[i]));
            for j in i + 1..d.len() {
                out.push(d[i].mul(&d[j]).scaled(&Integer::from(2)));
            }
        }
    }
    ExpPolynomial::new(s.unknowns.clone(), s.params.clone(), out)
}

/// Witness from small integer values.
pub fn witness<I: IntoIterator<Item = (S, V)>, S: Into<String>, V: Into<Integer>>(
    items: I,
) -> Witness {
    items
        .into_iter()
        .map(|(k, v)| (k.into(), Sparse::from_int(v.into())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_square() {
        let s = SquareSystem::parse(&["a", "k"], &[], &[("a", "2^k")]).unwrap();
        let p = expand_squares(&s);
        assert_eq!(p.len(), 3);
        assert_eq!(s.raw_monomial_count(), 3);
        let expect = ExpPolynomial::parse(&["a", "k"], &[], "a^2 - 2*a*2^k + 4^k").unwrap();
        assert_eq!(p, expect);
    }

    #[test]
    fn eval_examples() {
        let p = ExpPolynomial::parse(&["x"], &[], "x^2 - 2*x + 1").unwrap();
        assert_eq!(
            eval_poly(&p, &witness([("x", 1)]), Budget::default()).unwrap(),
            0
        );
        let s = SquareSystem::parse(&["x", "y"], &[], &[("x + 2", "y")]).unwrap();
        let p = expand_squares(&s);
        assert_eq!(
            eval_poly(&p, &witness([("x", 0), ("y", 2)]), Budget::default()).unwrap(),
            0
        );
        assert_eq!(
            eval_poly(&p, &witness([("x", 0), ("y", 0)]), Budget::default()).unwrap(),
            4
        );
        assert!(matches!(
            eval_poly(&p, &witness([("x", 0)]), Budget::default()),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn merging_and_params() {
        let s =
            SquareSystem::parse(&["c"], &["n"], &[("2^c", "2^n"), ("2*2^c", "2^n*2^n")]).unwrap();
        assert_eq!(s.raw_monomial_count(), 6);
        let p = expand_squares(&s);
        // 4^c appears in both squares
        assert_eq!(p.len(), 5);
        let fixed = p.fix_params(&[Integer::from(3)]).unwrap();
        assert!(fixed.params.is_empty());
        for c in 0..6u32 {
            let w = witness([("c", c), ("n", 3)]);
            assert_eq!(
                eval_poly(&p, &w, Budget::default()).unwrap(),
                fixed.eval_at(&[Integer::from(c)])
            );
        }
    }

    #[test]
    fn sparse_evaluation_of_huge_points() {
        let s = SquareSystem::parse(&["g", "l", "h"], &[], &[("2^g*16^l", "4^h")]).unwrap();
        let p = expand_squares(&s);
        let g = Integer::from(1) << 300;
        let h = Integer::from(&g >> 1) + 2u32;
        let w: Witness = [
            ("g".to_string(), Sparse::from_int(g)),
            ("l".to_string(), Sparse::from_int(1)),
            ("h".to_string(), Sparse::from_int(h)),
        ]
        .into_iter()
        .collect();
        assert!(p.eval_sparse(&w, Budget::default()).unwrap().is_zero());
        let mut off = w.clone();
        off.insert("l".into(), Sparse::from_int(2));
        let v = p.eval_sparse(&off, Budget::default()).unwrap();
        assert_eq!(v.signum(), std::cmp::Ordering::Greater);
        assert!(eval_poly(&p, &off, Budget::default())
            .unwrap_err()
            .is_budget());
    }
}
