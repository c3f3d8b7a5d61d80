//! The JSON interchange format for arrays.
//!
//! ```json
//! {"kind": "omega", "n": 2, "d": 1, "entries": [[1, 0], [0, "1/1"]]}
//! ```
//!
//! `entries` is nested `d + 1` deep. Each entry is an integer or a string
//! `"p/q"` in lowest terms. Unknown top-level keys are ignored, so documents
//! may carry extra metadata.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::array::{Array, Kind, PolytopeSpec, Rational};
use crate::error::{Error, Result};

pub fn rational_to_value(q: &Rational) -> Value {
    if q.denom().is_one() {
        if let Some(v) = q.numer().to_i64() {
            return Value::from(v);
        }
        return Value::String(q.numer().to_string());
    }
    Value::String(format!("{}/{}", q.numer(), q.denom()))
}

/// `"p/q"` string for a rational, integers without a denominator.
pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{text}` is not an integer or p/q"));
    match text.split_once('/') {
        None => Ok(Rational::from_integer(text.trim().parse::<BigInt>().map_err(|_| bad())?)),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if !q.is_positive() {
                return Err(Error::Parse(format!("`{text}` needs a positive denominator")));
            }
            if !p.gcd(&q).is_one() {
                return Err(Error::Parse(format!("`{text}` is not in lowest terms")));
            }
            Ok(Rational::new_raw(p, q))
        }
    }
}

pub fn rational_from_value(value: &Value) -> Result<Rational> {
    match value {
        Value::Number(num) => match num.as_i64() {
            Some(v) => Ok(Rational::from_integer(v.into())),
            None => Err(Error::Parse(format!("entry {num} is not an integer"))),
        },
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("entry {other} is neither a number nor a string"))),
    }
}

fn nest(entries: &[Rational], n: usize, depth: usize) -> Value {
    if depth == 1 {
        return Value::Array(entries.iter().map(rational_to_value).collect());
    }
    let chunk = entries.len() / n;
    Value::Array(
        entries
            .chunks(chunk)
            .map(|c| nest(c, n, depth - 1))
            .collect(),
    )
}

fn flatten(value: &Value, n: usize, depth: usize, out: &mut Vec<Rational>) -> Result<()> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::Parse("entries must be nested arrays".into()))?;
    if items.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "nested entry list has length {} instead of n={n}",
            items.len()
        )));
    }
    for item in items {
        if depth == 1 {
            out.push(rational_from_value(item)?);
        } else {
            flatten(item, n, depth - 1, out)?;
        }
    }
    Ok(())
}

pub fn array_to_value(array: &Array, kind: Kind) -> Value {
    json!({
        "kind": kind,
        "n": array.n(),
        "d": array.d(),
        "entries": nest(array.entries(), array.n(), array.d() + 1),
    })
}

/// Object form of [`array_to_value`], for callers that add metadata keys.
pub fn array_to_map(array: &Array, kind: Kind) -> Map<String, Value> {
    match array_to_value(array, kind) {
        Value::Object(map) => map,
        _ => unreachable!(),
    }
}

pub fn array_from_value(value: &Value) -> Result<(Array, PolytopeSpec)> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("array document must be a JSON object".into()))?;
    let kind: Kind = match obj.get("kind") {
        Some(Value::String(s)) => s.parse()?,
        Some(_) => return Err(Error::Parse("`kind` must be a string".into())),
        None => return Err(Error::Parse("missing `kind`".into())),
    };
    let field = |name: &str| -> Result<usize> {
        obj.get(name)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| Error::Parse(format!("missing or invalid `{name}`")))
    };
    let n = field("n")?;
    let d = field("d")?;
    let spec = PolytopeSpec::new(kind, n, d)?;
    let entries = obj
        .get("entries")
        .ok_or_else(|| Error::Parse("missing `entries`".into()))?;
    let mut flat = Vec::with_capacity(spec.cell_count());
    flatten(entries, n, d + 1, &mut flat)?;
    Ok((Array::from_entries(n, d, flat)?, spec))
}

pub fn array_to_string(array: &Array, kind: Kind) -> String {
    serde_json::to_string_pretty(&array_to_value(array, kind)).expect("serializable")
}

pub fn array_from_str(text: &str) -> Result<(Array, PolytopeSpec)> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    array_from_value(&value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fixture_syntax() {
        let text = r#"{"kind":"omega","n":2,"d":1,"entries":[["1/2","1/2"],["1/2","1/2"]],"meta":{"x":1}}"#;
        let (a, spec) = array_from_str(text).unwrap();
        assert_eq!(spec, PolytopeSpec::omega(2, 1));
        assert!(a.is_member(&spec).unwrap());
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(parse_rational("2/4").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_rational("-3/7").unwrap(), Rational::new((-3).into(), 7.into()));
        let short = r#"{"kind":"omega","n":2,"d":1,"entries":[[1,0]]}"#;
        assert!(matches!(array_from_str(short), Err(Error::DimensionMismatch(_))));
        let kind = r#"{"kind":"delta","n":1,"d":1,"entries":[[1]]}"#;
        assert!(array_from_str(kind).is_err());
    }

    #[test]
    fn writes_integers_as_numbers() {
        let mut a = Array::zeros(2, 1);
        a.set(&[0, 1], Rational::new(1.into(), 3.into()));
        let v = array_to_value(&a, Kind::Sigma);
        assert_eq!(v["entries"], json!([[0, "1/3"], [0, 0]]));
        assert_eq!(v["kind"], json!("sigma"));
    }

    fn arb_array() -> impl Strategy<Value = Array> {
        (1usize..4, 1usize..3).prop_flat_map(|(n, d)| {
            let len = n.pow(d as u32 + 1);
            proptest::collection::vec((-1000i64..1000, 1i64..50), len).prop_map(move |pairs| {
                let entries = pairs
                    .into_iter()
                    .map(|(p, q)| Rational::new(p.into(), q.into()))
                    .collect();
                Array::from_entries(n, d, entries).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip(a in arb_array()) {
            let text = array_to_string(&a, Kind::Omega);
            let (b, _) = array_from_str(&text).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
