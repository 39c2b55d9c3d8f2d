use rug::ops::Pow;
use rug::Integer;

use super::{CountingSpec, Family};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::expdio::{Sparse, SquareSystem, Witness};
use crate::term::Term;

pub const UNKNOWNS: [&str; 19] = [
    "k", "v", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "K", "l", "m", "p", "x", "y", "z",
];

pub const SQUARES: [(&str, &str); 16] = [
    ("a", "2^k"),
    ("f", "4^k"),
    ("g", "11^f*121^a"),
    ("h", "11^f*11^a"),
    ("i", "11^a"),
    ("j", "121^a"),
    ("K", "121^a*b"),
    ("l", "11^a*b"),
    ("m", "11^a*e"),
    ("p", "4*2^k*z"),
    ("2^g*16^l", "4^h*2^K*2^b*2^c"),
    ("2^j", "16^i*2^c*2^d"),
    ("2^b", "2^m*2^x"),
    ("2^i", "2*2^x*2^y"),
    ("2^p", "2^x*2^z"),
    ("2^n", "2^k*2^v"),
];

pub const WITNESS_MAX_K: u64 = 11;

/// t(n) = 11^{2^{2n+1}}
pub fn t_term() -> Term {
    let n = Term::var("n");
    Term::pow(
        Term::int(11),
        Term::pow2(Term::add(Term::mul(Term::int(2), n), Term::int(1))),
    )
}

/// w(n) = 36 t(n) + 6
pub fn w_term() -> Term {
    Term::add(Term::mul(Term::int(36), t_term()), Term::int(6))
}

pub fn build_r() -> CountingSpec {
    let system = SquareSystem::parse(&UNKNOWNS, &["n"], &SQUARES).expect("static system parses");
    CountingSpec {
        family: Family::Mersenne,
        system,
        t_of_n: t_term(),
        w_of_n: w_term(),
        offset: 1,
    }
}

/// The unique solution of R for exponent k, if 2^{k+2} - 1 is prime.
pub fn mersenne_witness(k: u64, n: u64) -> Result<Option<Witness>> {
    if k > WITNESS_MAX_K {
        return Err(Error::budget(
            "Mersenne witness",
            format!("k = {k}"),
            format!("k <= {WITNESS_MAX_K}"),
        ));
    }
    if n < k {
        return Err(Error::InvalidArgument("the witness needs n >= k".into()));
    }
    let kk = k as u32;
    let a = Integer::from(1) << kk;
    let f = Integer::from(1) << (2 * kk);
    let au = a.to_u32().expect("small");
    let fu = f.to_u32().expect("small");
    let i = Integer::from(11).pow(au);
    let j = Integer::from(&i * &i);
    let eleven_f = Integer::from(11).pow(fu);
    let g = Integer::from(&eleven_f * &j);
    let h = eleven_f * &i;
    let num = &g - Integer::from(&h * 2u32);
    let den = (&j - Integer::from(&i * 4u32)) + 1u32;
    let (b, c) = num.div_rem(den);
    let d = (&j - Integer::from(&i * 4u32)) - &c;
    let (e, x) = b.clone().div_rem(i.clone());
    let y = Integer::from(&i - &x) - 1u32;
    let big_k = Integer::from(&j * &b);
    let l = Integer::from(&i * &b);
    let m = Integer::from(&i * &e);
    let modulus: Integer = (Integer::from(1) << (kk + 2)) - 1u32;
    let (z, rem) = x.clone().div_rem(modulus);
    if rem != 0 {
        return Ok(None);
    }
    let p = Integer::from(&z << (kk + 2));
    let values = [
        ("k", Integer::from(k)),
        ("v", Integer::from(n - k)),
        ("a", a),
        ("b", b),
        ("c", c),
        ("d", d),
        ("e", e),
        ("f", f),
        ("g", g),
        ("h", h),
        ("i", i),
        ("j", j),
        ("K", big_k),
        ("l", l),
        ("m", m),
        ("p", p),
        ("x", x),
        ("y", y),
        ("z", z),
        ("n", Integer::from(n)),
    ];
    Ok(Some(
        values
            .into_iter()
            .map(|(name, v)| (name.to_string(), Sparse::from_int(v)))
            .collect(),
    ))
}

/// Bit budget large enough to evaluate the expanded system at the k = 11
/// witness, where 121^f has about 2^{24.8} bits.
pub fn witness_check_budget() -> Budget {
    Budget::default().with_bits(1 << 26)
}
