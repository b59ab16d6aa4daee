//! JSON schema for classical symbols.
//!
//! `{ "k", "order", "floor", "components": [{"degree", "plus", "minus"}] }`
//! with TrigPoly as `{ "J", "coeffs": [{"j", "matrix": [[scalar]]}] }`.
//! `floor` is an integer or `null` for a fully determined (exact) symbol.
//! Scalars are `{"re": "p/q", "im": "p/q"}` in exact mode and
//! `{"re": number, "im": number}` in float mode; loading rejects leaves
//! of the wrong kind, so a file cannot silently change modes.

use crate::error::CoreError;
use crate::scalar::Scalar;
use crate::symbol::{ClassicalSymbol, Floor, HomComponent};
use crate::trig::TrigPoly;
use serde_json::Value;

pub fn floor_to_json(floor: Floor) -> Value {
    match floor {
        Floor::Exact => Value::Null,
        Floor::At(f) => Value::from(f),
    }
}

pub fn floor_from_json(v: &Value, pointer: &str) -> Result<Floor, CoreError> {
    match v {
        Value::Null => Ok(Floor::Exact),
        Value::Number(n) => n
            .as_i64()
            .map(Floor::At)
            .ok_or_else(|| CoreError::parse(pointer, "floor must be an integer or null")),
        _ => Err(CoreError::parse(
            pointer,
            "floor must be an integer or null",
        )),
    }
}

pub fn symbol_to_json<S: Scalar>(a: &ClassicalSymbol<S>) -> Value {
    serde_json::json!({
        "k": a.k(),
        "order": a.order(),
        "floor": floor_to_json(a.floor()),
        "components": a
            .components()
            .map(|c| serde_json::json!({
                "degree": c.degree,
                "plus": c.plus.to_json(),
                "minus": c.minus.to_json(),
            }))
            .collect::<Vec<_>>(),
    })
}

pub fn symbol_from_json<S: Scalar>(v: &Value) -> Result<ClassicalSymbol<S>, CoreError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CoreError::parse("", "expected a symbol object"))?;
    let k = obj
        .get("k")
        .and_then(|k| k.as_u64())
        .filter(|&k| k > 0)
        .ok_or_else(|| CoreError::parse("/k", "expected a positive integer"))? as usize;
    let order = obj
        .get("order")
        .and_then(|o| o.as_i64())
        .ok_or_else(|| CoreError::parse("/order", "expected an integer"))?;
    let floor = floor_from_json(obj.get("floor").unwrap_or(&Value::Null), "/floor")?;
    if let Floor::At(f) = floor {
        if f > order {
            return Err(CoreError::parse(
                "/floor",
                format!("floor {f} exceeds order {order}"),
            ));
        }
    }
    let mut out = ClassicalSymbol::zero(k, order, floor);
    if let Some(components) = obj.get("components") {
        let arr = components
            .as_array()
            .ok_or_else(|| CoreError::parse("/components", "expected an array"))?;
        for (i, cv) in arr.iter().enumerate() {
            let ptr = format!("/components/{i}");
            let co = cv
                .as_object()
                .ok_or_else(|| CoreError::parse(&ptr, "expected a component object"))?;
            let degree = co
                .get("degree")
                .and_then(|d| d.as_i64())
                .ok_or_else(|| CoreError::parse(format!("{ptr}/degree"), "expected an integer"))?;
            if degree > order {
                return Err(CoreError::parse(
                    format!("{ptr}/degree"),
                    format!("degree {degree} exceeds order {order}"),
                ));
            }
            if !floor.admits(degree) {
                return Err(CoreError::parse(
                    format!("{ptr}/degree"),
                    format!("degree {degree} lies below floor {floor}"),
                ));
            }
            let plus = TrigPoly::from_json(
                co.get("plus")
                    .ok_or_else(|| CoreError::parse(&ptr, "missing field `plus`"))?,
                k,
                &format!("{ptr}/plus"),
            )?;
            let minus = TrigPoly::from_json(
                co.get("minus")
                    .ok_or_else(|| CoreError::parse(&ptr, "missing field `minus`"))?,
                k,
                &format!("{ptr}/minus"),
            )?;
            out.set_component(HomComponent::new(degree, plus, minus));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gauss_ratio, ExactScalar};
    use num_traits::One;

    #[test]
    fn symbol_round_trip() {
        let mut a = ClassicalSymbol::<ExactScalar>::xi(2);
        a = a
            .add(&ClassicalSymbol::homogeneous(HomComponent::new(
                0,
                TrigPoly::mode(1, crate::mat::Mat::identity(2).scale(&gauss_ratio(1, 3, -2, 7))),
                TrigPoly::zero(2),
            )))
            .unwrap();
        let v = symbol_to_json(&a);
        let back: ClassicalSymbol<ExactScalar> = symbol_from_json(&v).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn truncated_symbol_round_trip() {
        let a = ClassicalSymbol::<ExactScalar>::szego(1)
            .truncate_to(Floor::At(-3))
            .unwrap();
        let v = symbol_to_json(&a);
        assert_eq!(v["floor"], serde_json::json!(-3));
        let back: ClassicalSymbol<ExactScalar> = symbol_from_json(&v).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn floor_above_order_rejected() {
        let v = serde_json::json!({
            "k": 1, "order": 0, "floor": 2, "components": []
        });
        match symbol_from_json::<ExactScalar>(&v) {
            Err(CoreError::Parse { pointer, .. }) => assert_eq!(pointer, "/floor"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_carries_pointer() {
        let v = serde_json::json!({
            "k": 1, "order": 1, "floor": null,
            "components": [{"degree": 1, "plus": {"J": 0, "coeffs": [{"j": 0, "matrix": [["bad"]]}]}, "minus": {"J": 0, "coeffs": []}}]
        });
        match symbol_from_json::<ExactScalar>(&v) {
            Err(CoreError::Parse { pointer, .. }) => {
                assert_eq!(pointer, "/components/0/plus/coeffs/0/matrix/0/0");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn float_file_rejected_in_exact_mode() {
        let f = ClassicalSymbol::<crate::scalar::C64>::multiplication_op(TrigPoly::scalar_mode(
            1,
            crate::scalar::C64::one(),
        ));
        let v = symbol_to_json(&f);
        assert!(symbol_from_json::<ExactScalar>(&v).is_err());
    }
}
