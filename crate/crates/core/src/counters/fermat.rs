use rug::ops::Pow;
use rug::Integer;

use super::{CountingSpec, Family};
use crate::error::{Error, Result};
use crate::expdio::{Sparse, SquareSystem, Witness};
use crate::term::Term;

pub const UNKNOWNS: [&str; 7] = ["g", "v", "a", "b", "c", "d", "e"];

pub const SQUARES: [(&str, &str); 6] = [
    ("c", "144*1728^g"),
    ("d", "a*g"),
    ("e", "b*g"),
    ("2^n", "2^g*2^v"),
    ("2^c", "8^d*4^a"),
    ("2*2^c", "64^e*32^b"),
];

pub const WITNESS_MAX_G: u64 = 11_000;

/// t(n) = 12^{3n+3}
pub fn t_term() -> Term {
    Term::pow(
        Term::int(12),
        Term::add(Term::mul(Term::int(3), Term::var("n")), Term::int(3)),
    )
}

/// w(n) = 22 t(n) + 27
pub fn w_term() -> Term {
    Term::add(Term::mul(Term::int(22), t_term()), Term::int(27))
}

pub fn build_s() -> CountingSpec {
    let system = SquareSystem::parse(&UNKNOWNS, &["n"], &SQUARES).expect("static system parses");
    CountingSpec {
        family: Family::Fermat,
        system,
        t_of_n: t_term(),
        w_of_n: w_term(),
        offset: 0,
    }
}

/// The unique solution of S for g, if 6g + 5 is a Fermat prime.
pub fn fermat_witness(g: u64, n: u64) -> Result<Option<Witness>> {
    if g > WITNESS_MAX_G {
        return Err(Error::budget(
            "Fermat witness",
            format!("g = {g}"),
            format!("g <= {WITNESS_MAX_G}"),
        ));
    }
    if n < g {
        return Err(Error::InvalidArgument("the witness needs n >= g".into()));
    }
    let e3 = 3 * g + 2;
    let c = Integer::from(12).pow(u32::try_from(e3).expect("small"));
    let (a, ra) = c.clone().div_rem(Integer::from(e3));
    let (b, rb) = Integer::from(&c + 1u32).div_rem(Integer::from(6 * g + 5));
    if ra != 0 || rb != 0 {
        return Ok(None);
    }
    let d = Integer::from(&a * g);
    let e = Integer::from(&b * g);
    let values = [
        ("g", Integer::from(g)),
        ("v", Integer::from(n - g)),
        ("a", a),
        ("b", b),
        ("c", c),
        ("d", d),
        ("e", e),
        ("n", Integer::from(n)),
    ];
    Ok(Some(
        values
            .into_iter()
            .map(|(name, v)| (name.to_string(), Sparse::from_int(v)))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::expdio::expand_squares;
    use crate::mazzanti::m_profile;

    #[test]
    fn shape() {
        let s = build_s();
        assert_eq!(s.system.raw_monomial_count(), 18);
        let p = expand_squares(&s.system);
        assert_eq!(p.len(), 17);
        let prof = m_profile(&p);
        assert_eq!(prof.groups["G2*G2"], 2);
        assert_eq!(prof.groups["G2"], 3);
        assert_eq!(prof.groups["G1*G1*G1"], 2);
        assert_eq!(prof.groups["G1"], 1);
        assert_eq!(prof.groups["G0 only"], 9);
        assert_eq!(s.t_at(0, Budget::default()).unwrap(), 1728);
    }

    #[test]
    fn witnesses() {
        let s = build_s();
        let p = expand_squares(&s.system);
        let w0 = fermat_witness(0, 0).unwrap().unwrap();
        assert_eq!(w0["c"], Sparse::from_int(144));
        assert_eq!(w0["a"], Sparse::from_int(72));
        assert_eq!(w0["b"], Sparse::from_int(29));
        for g in [0, 2, 42] {
            let w = fermat_witness(g, g + 3).unwrap().unwrap();
            assert!(
                p.eval_sparse(&w, Budget::default()).unwrap().is_zero(),
                "g={g}"
            );
        }
        assert!(fermat_witness(1, 1).unwrap().is_none());
        assert!(fermat_witness(3, 3).unwrap().is_none());
    }
}
