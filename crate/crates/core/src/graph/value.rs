use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::GraphError;

/// The kind tag of an [`AttrValue`], used by schema rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrKind {
    Text,
    Float,
    Int,
    Bool,
}

impl fmt::Display for AttrKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AttrKind::Text => "text",
            AttrKind::Float => "float",
            AttrKind::Int => "int",
            AttrKind::Bool => "bool",
        };
        f.write_str(s)
    }
}

/// A typed attribute value stored on nodes and edges.
///
/// Floats are always finite; use [`AttrValue::float`] to construct one from
/// an untrusted `f64`.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Text(String),
    Float(f64),
    Int(i64),
    Bool(bool),
}

impl AttrValue {
    pub fn float(value: f64) -> Result<Self, GraphError> {
        if value.is_finite() {
            Ok(AttrValue::Float(value))
        } else {
            Err(GraphError::NonFiniteFloat)
        }
    }

    pub fn text(value: impl Into<String>) -> Self {
        AttrValue::Text(value.into())
    }

    pub fn kind(&self) -> AttrKind {
        match self {
            AttrValue::Text(_) => AttrKind::Text,
            AttrValue::Float(_) => AttrKind::Float,
            AttrValue::Int(_) => AttrKind::Int,
            AttrValue::Bool(_) => AttrKind::Bool,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            AttrValue::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Numeric view of float and integer values.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttrValue::Float(f) => Some(*f),
            AttrValue::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    /// Typed comparison. Integers and floats compare by exact value; any
    /// other pair of differing kinds is a type error.
    pub fn try_cmp(&self, other: &AttrValue) -> Result<Ordering, KindMismatch> {
        match (self, other) {
            (AttrValue::Text(a), AttrValue::Text(b)) => Ok(a.cmp(b)),
            (AttrValue::Bool(a), AttrValue::Bool(b)) => Ok(a.cmp(b)),
            (AttrValue::Int(a), AttrValue::Int(b)) => Ok(a.cmp(b)),
            (AttrValue::Float(a), AttrValue::Float(b)) => Ok(a.partial_cmp(b).unwrap_or_else(|| a.total_cmp(b))),
            (AttrValue::Int(a), AttrValue::Float(b)) => Ok(cmp_int_float(*a, *b)),
            (AttrValue::Float(a), AttrValue::Int(b)) => Ok(cmp_int_float(*b, *a).reverse()),
            (a, b) => Err(KindMismatch {
                left: a.kind(),
                right: b.kind(),
            }),
        }
    }
}

/// Returned by [`AttrValue::try_cmp`] for values of incomparable kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KindMismatch {
    pub left: AttrKind,
    pub right: AttrKind,
}

/// Compares an integer against a finite float without lossy conversion.
pub(crate) fn cmp_int_float(i: i64, f: f64) -> Ordering {
    // 2^63 is exactly representable; every i64 lies in [-2^63, 2^63).
    const TWO_63: f64 = 9_223_372_036_854_775_808.0;
    if f >= TWO_63 {
        return Ordering::Less;
    }
    if f < -TWO_63 {
        return Ordering::Greater;
    }
    let whole = f.trunc();
    match i.cmp(&(whole as i64)) {
        Ordering::Equal => {
            let frac = f - whole;
            if frac > 0.0 {
                Ordering::Less
            } else if frac < 0.0 {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
        other => other,
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Text(s) => write!(f, "{s:?}"),
            AttrValue::Float(v) if v.fract() == 0.0 && v.abs() < 1e16 => write!(f, "{v:.1}"),
            AttrValue::Float(v) => write!(f, "{v}"),
            AttrValue::Int(v) => write!(f, "{v}"),
            AttrValue::Bool(v) => write!(f, "{v}"),
        }
    }
}

impl From<&str> for AttrValue {
    fn from(value: &str) -> Self {
        AttrValue::Text(value.to_string())
    }
}

impl From<String> for AttrValue {
    fn from(value: String) -> Self {
        AttrValue::Text(value)
    }
}

impl From<i64> for AttrValue {
    fn from(value: i64) -> Self {
        AttrValue::Int(value)
    }
}

impl From<bool> for AttrValue {
    fn from(value: bool) -> Self {
        AttrValue::Bool(value)
    }
}

impl Serialize for AttrValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AttrValue::Text(s) => serializer.serialize_str(s),
            // serde_json always writes a decimal point or exponent for f64.
            AttrValue::Float(v) => serializer.serialize_f64(*v),
            AttrValue::Int(v) => serializer.serialize_i64(*v),
            AttrValue::Bool(v) => serializer.serialize_bool(*v),
        }
    }
}

impl<'de> Deserialize<'de> for AttrValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AttrVisitor;

        impl Visitor<'_> for AttrVisitor {
            type Value = AttrValue;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a string, number or boolean")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<AttrValue, E> {
                Ok(AttrValue::Text(v.to_string()))
            }

            fn visit_string<E: de::Error>(self, v: String) -> Result<AttrValue, E> {
                Ok(AttrValue::Text(v))
            }

            fn visit_bool<E: de::Error>(self, v: bool) -> Result<AttrValue, E> {
                Ok(AttrValue::Bool(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<AttrValue, E> {
                Ok(AttrValue::Int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<AttrValue, E> {
                i64::try_from(v)
                    .map(AttrValue::Int)
                    .map_err(|_| E::custom("integer attribute out of 64-bit signed range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<AttrValue, E> {
                AttrValue::float(v).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(AttrVisitor)
    }
}
