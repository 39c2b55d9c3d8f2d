use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rug::Integer;

use crate::budget::Budget;
use crate::error::{Error, Result};

/// An integer written as a finite sum of c * 2^e, with arbitrary-precision
/// exponents. Numbers such as 2^(11^4000000) stay representable, and sums of
/// them can still be compared exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sparse {
    /// exponent -> nonzero coefficient
    terms: BTreeMap<Integer, Integer>,
}

fn bits(v: &Integer) -> u64 {
    u64::from(v.significant_bits())
}

impl Sparse {
    pub fn zero() -> Self {
        Sparse::default()
    }

    pub fn from_int(v: impl Into<Integer>) -> Self {
        let mut s = Sparse::zero();
        s.add_term(v.into(), Integer::new());
        s
    }

    /// 2^e
    pub fn pow2(e: impl Into<Integer>) -> Self {
        Sparse::term(1, e)
    }

    /// c * 2^e
    pub fn term(c: impl Into<Integer>, e: impl Into<Integer>) -> Self {
        let mut s = Sparse::zero();
        s.add_term(c.into(), e.into());
        s
    }

    fn add_term(&mut self, c: Integer, e: Integer) {
        if c == 0 {
            return;
        }
        let mut remove = false;
        {
            let slot = self.terms.entry(e.clone()).or_default();
            *slot += c;
            if *slot == 0 {
                remove = true;
            }
        }
        if remove {
            self.terms.remove(&e);
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Integer, &Integer)> {
        self.terms.iter().map(|(e, c)| (c, e))
    }

    pub fn neg(&self) -> Sparse {
        Sparse {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), Integer::from(-c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &Sparse) -> Sparse {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(c.clone(), e.clone());
        }
        out
    }

    pub fn sub(&self, other: &Sparse) -> Sparse {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Sparse) -> Sparse {
        let mut out = Sparse::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(Integer::from(c1 * c2), Integer::from(e1 + e2));
            }
        }
        out
    }

    pub fn mul_int(&self, k: &Integer) -> Sparse {
        self.mul(&Sparse::from_int(k.clone()))
    }

    /// self * 2^e
    pub fn shl(&self, e: &Integer) -> Sparse {
        Sparse {
            terms: self
                .terms
                .iter()
                .map(|(x, c)| (Integer::from(x + e), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, r: u32) -> Sparse {
        let mut out = Sparse::from_int(1);
        for _ in 0..r {
            out = out.mul(self);
        }
        out
    }

    /// Merges terms whose exponents are close and returns blocks
    /// (exponent, coefficient) such that each block is smaller in absolute
    /// value than 2^(next block's exponent - 1). The sign of the sum is then
    /// the sign of the last block.
    fn blocks(&self) -> Vec<(Integer, Integer)> {
        let mut blocks: Vec<(Integer, Integer)> = Vec::new();
        for (e, c) in &self.terms {
            if let Some((e0, c0)) = blocks.last_mut() {
                let gap = Integer::from(e - &*e0);
                if gap <= bits(c0) + 1 {
                    *c0 += Integer::from(c << gap.to_u32().expect("small gap"));
                    if *c0 == 0 {
                        blocks.pop();
                    }
                    continue;
                }
            }
            blocks.push((e.clone(), c.clone()));
        }
        blocks
    }

    pub fn signum(&self) -> Ordering {
        match self.blocks().last() {
            None => Ordering::Equal,
            Some((_, c)) => c.cmp0(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    pub fn cmp_sparse(&self, other: &Sparse) -> Ordering {
        self.sub(other).signum()
    }

    /// Upper bound on log2 |self| (exact to within one bit for one block).
    pub fn log2_upper(&self) -> Option<Integer> {
        let blocks = self.blocks();
        let (e, c) = blocks.last()?;
        Some(Integer::from(e + bits(c)))
    }

    /// Exact value, provided it fits the bit budget.
    pub fn to_integer(&self, budget: Budget) -> Result<Integer> {
        let mut out = Integer::new();
        for (e, c) in &self.terms {
            let need = Integer::from(e + bits(c));
            let fits = need.to_u64().map(|n| n <= budget.bits).unwrap_or(false);
            if !fits {
                return Err(Error::budget(
                    "materializing a sparse integer",
                    format!("{need} bits"),
                    format!("{} bits", budget.bits),
                ));
            }
            if *e < 0 {
                return Err(Error::InvalidArgument("negative exponent".into()));
            }
            out += Integer::from(c << e.to_u32().expect("checked"));
        }
        Ok(out)
    }

    /// The value as an integer when it needs at most 2^16 bits.
    pub fn as_small(&self) -> Option<Integer> {
        self.to_integer(Budget::default().with_bits(1 << 16)).ok()
    }
}

impl From<Integer> for Sparse {
    fn from(v: Integer) -> Self {
        Sparse::from_int(v)
    }
}

impl From<u64> for Sparse {
    fn from(v: u64) -> Self {
        Sparse::from_int(v)
    }
}

impl fmt::Display for Sparse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let (sign, mag) = if *c < 0 {
                ("-", Integer::from(-c))
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (*e == 0, mag == 1) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "2^{e}")?,
                (false, false) => write!(f, "{mag}*2^{e}")?,
            }
        }
        Ok(())
    }
}
