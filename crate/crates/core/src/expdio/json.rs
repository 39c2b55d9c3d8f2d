use rug::Integer;
use serde_json::{json, Map, Value};

use super::{ExpPolynomial, Factor, Monomial, Sparse, Square, SquareSystem, Witness};
use crate::error::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn int_of(v: &Value, what: &str) -> Result<Integer> {
    let s = v
        .as_str()
        .ok_or_else(|| bad(format!("{what} must be a decimal string")))?;
    s.parse::<Integer>()
        .map_err(|_| bad(format!("{what}: `{s}` is not an integer")))
}

fn names_of(v: Option<&Value>, what: &str) -> Result<Vec<String>> {
    match v {
        None => Ok(Vec::new()),
        Some(v) => v
            .as_array()
            .ok_or_else(|| bad(format!("`{what}` must be an array")))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad(format!("`{what}` entries must be strings")))
            })
            .collect(),
    }
}

fn monomial_to_json(m: &Monomial) -> Value {
    json!({
        "c": m.coeff.to_string(),
        "factors": m.factors.iter().map(|f| json!({"v": f.v.to_string(), "r": f.r})).collect::<Vec<_>>(),
    })
}

fn monomial_from_json(v: &Value, nvars: usize) -> Result<Monomial> {
    let coeff = int_of(v.get("c").ok_or_else(|| bad("monomial needs `c`"))?, "c")?;
    let factors = v
        .get("factors")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("monomial needs a `factors` array"))?;
    if factors.len() != nvars {
        return Err(bad(format!(
            "expected {nvars} factors, got {}",
            factors.len()
        )));
    }
    let factors = factors
        .iter()
        .map(|f| {
            let v = int_of(f.get("v").ok_or_else(|| bad("factor needs `v`"))?, "v")?;
            if v < 1 {
                return Err(bad("factor base must be at least 1"));
            }
            let r = f
                .get("r")
                .and_then(Value::as_u64)
                .and_then(|r| u32::try_from(r).ok())
                .ok_or_else(|| bad("factor needs a small nonnegative `r`"))?;
            Ok(Factor { v, r })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Monomial { coeff, factors })
}

fn header(unknowns: &[String], params: &[String]) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("unknowns".into(), json!(unknowns));
    if !params.is_empty() {
        obj.insert("params".into(), json!(params));
    }
    obj
}

pub fn poly_to_json(p: &ExpPolynomial) -> Value {
    let mut obj = header(&p.unknowns, &p.params);
    obj.insert(
        "monomials".into(),
        Value::Array(p.monomials.iter().map(monomial_to_json).collect()),
    );
    Value::Object(obj)
}

pub fn poly_from_json(v: &Value) -> Result<ExpPolynomial> {
    let unknowns = names_of(v.get("unknowns"), "unknowns")?;
    let params = names_of(v.get("params"), "params")?;
    let nvars = unknowns.len() + params.len();
    let monomials = v
        .get("monomials")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("polynomial needs a `monomials` array"))?
        .iter()
        .map(|m| monomial_from_json(m, nvars))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpPolynomial::new(unknowns, params, monomials))
}

pub fn system_to_json(s: &SquareSystem) -> Value {
    let mut obj = header(&s.unknowns, &s.params);
    obj.insert(
        "squares".into(),
        Value::Array(
            s.squares
                .iter()
                .map(|sq| {
                    json!({
                        "l": sq.l.iter().map(monomial_to_json).collect::<Vec<_>>(),
                        "r": sq.r.iter().map(monomial_to_json).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        ),
    );
    Value::Object(obj)
}

pub fn system_from_json(v: &Value) -> Result<SquareSystem> {
    let unknowns = names_of(v.get("unknowns"), "unknowns")?;
    let params = names_of(v.get("params"), "params")?;
    let nvars = unknowns.len() + params.len();
    let side = |sq: &Value, key: &str| -> Result<Vec<Monomial>> {
        sq.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| bad(format!("square needs `{key}`")))?
            .iter()
            .map(|m| monomial_from_json(m, nvars))
            .collect()
    };
    let squares = v
        .get("squares")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("system needs a `squares` array"))?
        .iter()
        .map(|sq| {
            Ok(Square {
                l: side(sq, "l")?,
                r: side(sq, "r")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SquareSystem::new(unknowns, params, squares)
}

/// Values print as decimal strings; values too large to print are given as
/// `{"sum_of_powers_of_two": [["c", "e"], ...]}`.
pub fn witness_to_json(w: &Witness) -> Value {
    let mut obj = Map::new();
    for (k, v) in w {
        let val = match v.as_small() {
            Some(i) => Value::String(i.to_string()),
            None => json!({
                "sum_of_powers_of_two": v
                    .terms()
                    .map(|(c, e)| json!([c.to_string(), e.to_string()]))
                    .collect::<Vec<_>>()
            }),
        };
        obj.insert(k.clone(), val);
    }
    Value::Object(obj)
}

pub fn witness_from_json(v: &Value) -> Result<Witness> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("witness must be an object"))?;
    obj.iter()
        .map(|(k, v)| {
            let val = if v.is_string() {
                Sparse::from_int(int_of(v, k)?)
            } else {
                let terms = v
                    .get("sum_of_powers_of_two")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad(format!("bad value for `{k}`")))?;
                let mut s = Sparse::zero();
                for t in terms {
                    let pair = t
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| bad("expected [c, e]"))?;
                    s = s.add(&Sparse::term(
                        int_of(&pair[0], "c")?,
                        int_of(&pair[1], "e")?,
                    ));
                }
                s
            };
            Ok((k.clone(), val))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::expand_squares;
    use super::*;

    #[test]
    fn polynomial_format() {
        let p = ExpPolynomial::parse(&["x", "y"], &[], "-2*x*2^y").unwrap();
        let v = poly_to_json(&p);
        assert_eq!(
            v,
            json!({"unknowns":["x","y"],"monomials":[{"c":"-2","factors":[{"v":"1","r":1},{"v":"2","r":0}]}]})
        );
        assert_eq!(poly_from_json(&v).unwrap(), p);
    }

    #[test]
    fn system_round_trip() {
        let s =
            SquareSystem::parse(&["a", "k"], &["n"], &[("a", "2^k"), ("2^n", "2^k*2^a")]).unwrap();
        let back = system_from_json(&system_to_json(&s)).unwrap();
        assert_eq!(back, s);
        assert_eq!(expand_squares(&back), expand_squares(&s));
    }

    #[test]
    fn witness_round_trip() {
        let mut w = Witness::new();
        w.insert("a".into(), Sparse::from_int(12));
        w.insert(
            "t".into(),
            Sparse::pow2(Integer::from(1) << 100).add(&Sparse::from_int(3)),
        );
        let v = witness_to_json(&w);
        assert_eq!(v["a"], json!("12"));
        assert_eq!(witness_from_json(&v).unwrap(), w);
    }
}
