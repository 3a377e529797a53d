//! Serde helpers for exact integers in JSON.

/// Serializes a `BigInt` as a bare JSON number of any size.
///
/// Requires serde_json's `arbitrary_precision` feature for big values to
/// survive a round trip.
pub mod bigint {
    use std::str::FromStr;

    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
        let num = serde_json::Number::from_str(&n.to_string()).map_err(serde::ser::Error::custom)?;
        num.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<BigInt, D::Error> {
        let num = serde_json::Number::deserialize(deserializer)?;
        BigInt::from_str(&num.to_string()).map_err(|_| de::Error::custom(format!("not an integer: {num}")))
    }
}

/// Serializes a rational as the string `"a/b"` (or `"a"`).
pub mod rational {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::scalar::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}
