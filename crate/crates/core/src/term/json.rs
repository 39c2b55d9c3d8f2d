use rug::Integer;
use serde_json::{json, Value};

use super::{BinOp, Term, UnOp};
use crate::error::{Error, Result};

pub fn to_json(t: &Term) -> Value {
    match t {
        Term::Const(v) => json!({ "const": v.to_string() }),
        Term::Var(name) => json!({ "var": name }),
        Term::Bin(op, l, r) => json!({ "op": op.name(), "args": [to_json(l), to_json(r)] }),
        Term::Un(op, a) => json!({ "op": op.name(), "args": [to_json(a)] }),
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn from_json(v: &Value) -> Result<Term> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("term must be a JSON object"))?;
    if let Some(c) = obj.get("const") {
        let s = c
            .as_str()
            .ok_or_else(|| bad("`const` must be a decimal string"))?;
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(format!("`{s}` is not a natural number")));
        }
        return Ok(Term::Const(
            s.parse::<Integer>().map_err(|e| bad(e.to_string()))?,
        ));
    }
    if let Some(name) = obj.get("var") {
        let name = name.as_str().ok_or_else(|| bad("`var` must be a string"))?;
        let ok = name.starts_with(|c: char| c.is_ascii_lowercase())
            && name
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if !ok {
            return Err(bad(format!("`{name}` is not an identifier")));
        }
        return Ok(Term::var(name));
    }
    let op = obj
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("expected `const`, `var` or `op`"))?;
    let args = obj
        .get("args")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("`args` must be an array"))?;
    let args = args.iter().map(from_json).collect::<Result<Vec<_>>>()?;
    if let Some(b) = BinOp::ALL.iter().find(|b| b.name() == op) {
        let [l, r]: [Term; 2] = args
            .try_into()
            .map_err(|_| bad(format!("`{op}` takes two arguments")))?;
        return Ok(Term::bin(*b, l, r));
    }
    if let Some(u) = UnOp::ALL.iter().find(|u| u.name() == op) {
        let [a]: [Term; 1] = args
            .try_into()
            .map_err(|_| bad(format!("`{op}` takes one argument")))?;
        return Ok(Term::un(*u, a));
    }
    Err(bad(format!("unknown op `{op}`")))
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn json_shape() {
        let t = parse("2^n - 1").unwrap();
        let v = to_json(&t);
        assert_eq!(
            v,
            json!({"op":"monus","args":[{"op":"pow2","args":[{"var":"n"}]},{"const":"1"}]})
        );
        assert_eq!(from_json(&v).unwrap(), t);
    }

    #[test]
    fn json_round_trip_all_ops() {
        let t = parse("min(a, b) + absdiff(a, 3) * binom(a, 2) / gcd(a, b) % hw(nu2(fact(x ^ 2)))")
            .unwrap();
        assert_eq!(from_json(&to_json(&t)).unwrap(), t);
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(from_json(&json!({"const": "-3"})).is_err());
        assert!(from_json(&json!({"const": 3})).is_err());
        assert!(from_json(&json!({"var": "X"})).is_err());
        assert!(from_json(&json!({"op": "add", "args": [{"const": "1"}]})).is_err());
        assert!(from_json(&json!({"op": "sqrt", "args": []})).is_err());
    }
}
