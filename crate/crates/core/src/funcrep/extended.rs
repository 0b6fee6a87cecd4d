//! Serde support for extended reals: a JSON number, or `"inf"` for +∞.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Raw {
    Num(f64),
    Text(String),
}

fn parse<E: de::Error>(raw: Raw) -> Result<f64, E> {
    match raw {
        Raw::Num(x) => Ok(x),
        Raw::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| E::custom(format!("expected a number or \"inf\", got {s:?}"))),
        },
    }
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_infinite() && *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    parse(Raw::deserialize(d)?)
}

/// Same convention for optional fields.
pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Raw>::deserialize(d)? {
            Some(raw) => parse(raw).map(Some),
            None => Ok(None),
        }
    }
}

/// Wrapper usable in containers (`Vec<Ext>`) and as a plain value.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Ext(pub f64);

impl serde::Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        deserialize(d).map(Ext)
    }
}

#[cfg(test)]
mod tests {
    use super::Ext;

    #[test]
    fn round_trip() {
        let v: Vec<Ext> = serde_json::from_str(r#"[1.5, "inf", "Infinity"]"#).unwrap();
        assert_eq!(v, vec![Ext(1.5), Ext(f64::INFINITY), Ext(f64::INFINITY)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1.5,"inf","inf"]"#);
        assert!(serde_json::from_str::<Ext>(r#""big""#).is_err());
    }
}
