//! Arithmetic terms over the naturals.
//!
//! The base language has constants, variables, `+`, truncated `-`, `*`,
//! floor division and `2^x`. Everything else (`%`, general powers, `min`,
//! binomials, factorials, `gcd`, `nu2`, Hamming weight) is sugar that
//! [`expand_sugar`] rewrites into the base language.

mod eval;
mod expand;
pub mod identities;
mod json;
mod parse;
mod render;

use std::collections::BTreeMap;
use std::fmt;

use rug::Integer;

pub use eval::{eval, eval_with, Evaluator};
pub use expand::expand_sugar;
pub use json::{from_json, to_json};
pub use parse::parse;

/// Variable bindings for evaluation.
pub type Env = BTreeMap<String, Integer>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Monus,
    Mul,
    DivFloor,
    Mod,
    Pow,
    AbsDiff,
    Min,
    Binom,
    Gcd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    Pow2,
    Fact,
    Nu2,
    Hw,
}

impl BinOp {
    pub const ALL: [BinOp; 10] = [
        BinOp::Add,
        BinOp::Monus,
        BinOp::Mul,
        BinOp::DivFloor,
        BinOp::Mod,
        BinOp::Pow,
        BinOp::AbsDiff,
        BinOp::Min,
        BinOp::Binom,
        BinOp::Gcd,
    ];

    /// Name used in the JSON format.
    pub fn name(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Monus => "monus",
            BinOp::Mul => "mul",
            BinOp::DivFloor => "divfloor",
            BinOp::Mod => "mod",
            BinOp::Pow => "pow",
            BinOp::AbsDiff => "absdiff",
            BinOp::Min => "min",
            BinOp::Binom => "binom",
            BinOp::Gcd => "gcd",
        }
    }

    pub fn is_base(self) -> bool {
        matches!(
            self,
            BinOp::Add | BinOp::Monus | BinOp::Mul | BinOp::DivFloor
        )
    }
}

impl UnOp {
    pub const ALL: [UnOp; 4] = [UnOp::Pow2, UnOp::Fact, UnOp::Nu2, UnOp::Hw];

    pub fn name(self) -> &'static str {
        match self {
            UnOp::Pow2 => "pow2",
            UnOp::Fact => "fact",
            UnOp::Nu2 => "nu2",
            UnOp::Hw => "hw",
        }
    }

    pub fn is_base(self) -> bool {
        self == UnOp::Pow2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Integer),
    Var(String),
    Bin(BinOp, Box<Term>, Box<Term>),
    Un(UnOp, Box<Term>),
}

#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn int(v: impl Into<Integer>) -> Term {
        let v = v.into();
        assert!(v >= 0, "terms range over the naturals");
        Term::Const(v)
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn bin(op: BinOp, l: Term, r: Term) -> Term {
        Term::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn un(op: UnOp, t: Term) -> Term {
        Term::Un(op, Box::new(t))
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Add, l, r)
    }

    pub fn monus(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Monus, l, r)
    }

    pub fn mul(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Mul, l, r)
    }

    pub fn div(l: Term, r: Term) -> Term {
        Term::bin(BinOp::DivFloor, l, r)
    }

    pub fn rem(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Mod, l, r)
    }

    pub fn pow(base: Term, exp: Term) -> Term {
        Term::bin(BinOp::Pow, base, exp)
    }

    pub fn pow2(exp: Term) -> Term {
        Term::un(UnOp::Pow2, exp)
    }

    pub fn min(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Min, l, r)
    }

    pub fn absdiff(l: Term, r: Term) -> Term {
        Term::bin(BinOp::AbsDiff, l, r)
    }

    pub fn binom(a: Term, b: Term) -> Term {
        Term::bin(BinOp::Binom, a, b)
    }

    pub fn gcd(a: Term, b: Term) -> Term {
        Term::bin(BinOp::Gcd, a, b)
    }

    pub fn fact(n: Term) -> Term {
        Term::un(UnOp::Fact, n)
    }

    pub fn nu2(n: Term) -> Term {
        Term::un(UnOp::Nu2, n)
    }

    pub fn hw(n: Term) -> Term {
        Term::un(UnOp::Hw, n)
    }

    /// True iff only constants, variables and the five base operations occur.
    pub fn is_pure(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) => true,
            Term::Bin(op, l, r) => op.is_base() && l.is_pure() && r.is_pure(),
            Term::Un(op, t) => op.is_base() && t.is_pure(),
        }
    }

    /// Free variables in sorted order.
    pub fn free_vars(&self) -> Vec<String> {
        fn walk(t: &Term, out: &mut std::collections::BTreeSet<String>) {
            match t {
                Term::Const(_) => {}
                Term::Var(v) => {
                    out.insert(v.clone());
                }
                Term::Bin(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Term::Un(_, a) => walk(a, out),
            }
        }
        let mut set = std::collections::BTreeSet::new();
        walk(self, &mut set);
        set.into_iter().collect()
    }

    /// Replaces every occurrence of `name` by `value`.
    pub fn substitute(&self, name: &str, value: &Term) -> Term {
        match self {
            Term::Var(v) if v == name => value.clone(),
            Term::Const(_) | Term::Var(_) => self.clone(),
            Term::Bin(op, l, r) => {
                Term::bin(*op, l.substitute(name, value), r.substitute(name, value))
            }
            Term::Un(op, a) => Term::un(*op, a.substitute(name, value)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

pub use render::render;

/// Size statistics of a term tree.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Metrics {
    pub node_count: u64,
    pub depth: u64,
    /// Occurrences per operator; leaves are counted as `const` and `var`.
    pub histogram: BTreeMap<String, u64>,
}

pub fn metrics(t: &Term) -> Metrics {
    fn walk(t: &Term, hist: &mut BTreeMap<String, u64>) -> (u64, u64) {
        let key = match t {
            Term::Const(_) => "const",
            Term::Var(_) => "var",
            Term::Bin(op, _, _) => op.name(),
            Term::Un(op, _) => op.name(),
        };
        *hist.entry(key.to_string()).or_default() += 1;
        match t {
            Term::Const(_) | Term::Var(_) => (1, 1),
            Term::Bin(_, l, r) => {
                let (nl, dl) = walk(l, hist);
                let (nr, dr) = walk(r, hist);
                (nl + nr + 1, dl.max(dr) + 1)
            }
            Term::Un(_, a) => {
                let (n, d) = walk(a, hist);
                (n + 1, d + 1)
            }
        }
    }
    let mut histogram = BTreeMap::new();
    let (node_count, depth) = walk(t, &mut histogram);
    Metrics {
        node_count,
        depth,
        histogram,
    }
}
