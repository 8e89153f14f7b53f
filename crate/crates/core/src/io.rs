//! JSON forms of exact values.
//!
//! A scalar is `{"r":[num,den],"s3":[num,den]}` (value `r + s3*sqrt 3`);
//! integers that do not fit in 64 bits are written as decimal strings.
//! A point is `[x, y]`, a pose is `{c, s, tx, ty, reflected}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::geometry::{Isometry, Point};
use crate::scalar::Scalar;

fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

fn int_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn ratio_to_json(q: &BigRational) -> Value {
    Value::Array(vec![int_to_json(q.numer()), int_to_json(q.denom())])
}

fn ratio_from_json(v: &Value) -> Result<BigRational, String> {
    let arr = v.as_array().ok_or("expected [num, den]")?;
    if arr.len() != 2 {
        return Err("expected [num, den]".into());
    }
    let n = int_from_json(&arr[0]).ok_or("numerator is not an integer")?;
    let d = int_from_json(&arr[1]).ok_or("denominator is not an integer")?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(n, d))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = serde_json::Map::new();
        m.insert("r".into(), ratio_to_json(self.rat_part()));
        m.insert("s3".into(), ratio_to_json(self.root3_part()));
        Value::Object(m).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let obj = v.as_object().ok_or_else(|| D::Error::custom("scalar must be an object {r, s3}"))?;
        for k in obj.keys() {
            if k != "r" && k != "s3" {
                return Err(D::Error::custom(format!("unknown scalar field `{k}`")));
            }
        }
        let part = |k: &str| -> Result<BigRational, D::Error> {
            match obj.get(k) {
                None => Ok(BigRational::zero()),
                Some(v) => ratio_from_json(v).map_err(|e| D::Error::custom(format!("scalar field `{k}`: {e}"))),
            }
        };
        Ok(Scalar::new(part("r")?, part("s3")?))
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.x, &self.y).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (x, y) = <(Scalar, Scalar)>::deserialize(d)?;
        Ok(Point::new(x, y))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseRepr {
    c: Scalar,
    s: Scalar,
    tx: Scalar,
    ty: Scalar,
    #[serde(default)]
    reflected: bool,
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PoseRepr {
            c: self.c.clone(),
            s: self.s.clone(),
            tx: self.t.x.clone(),
            ty: self.t.y.clone(),
            reflected: self.reflected,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = PoseRepr::deserialize(d)?;
        Isometry::new(p.c, p.s, Point::new(p.tx, p.ty), p.reflected).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_roundtrip() {
        let x = Scalar::quad((-3, 7), (5, 2));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"r":[-3,7],"s3":[5,2]}"#);
        assert_eq!(serde_json::from_str::<Scalar>(&s).unwrap(), x);
    }

    #[test]
    fn zero_denominator_rejected() {
        let e = serde_json::from_str::<Scalar>(r#"{"r":[1,0],"s3":[0,1]}"#).unwrap_err();
        assert!(e.to_string().contains("zero denominator"));
    }

    #[test]
    fn pose_must_be_unit() {
        let bad = r#"{"c":{"r":[1,1]},"s":{"r":[1,1]},"tx":{"r":[0,1]},"ty":{"r":[0,1]}}"#;
        assert!(serde_json::from_str::<Isometry>(bad).is_err());
    }
}
