//! Wire format for exact rationals: decimal strings for numerator and
//! denominator plus an approximate float that is for display only.

use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::RationalInterval;
use crate::Rational;

pub fn rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Rational", 3)?;
    st.serialize_field("num", &r.numer().to_string())?;
    st.serialize_field("den", &r.denom().to_string())?;
    st.serialize_field("approx", &r.to_f64())?;
    st.end()
}

/// Borrowing wrapper that serializes a [`Rational`] in the wire format.
#[derive(Debug, Clone, Copy)]
pub struct Exact<'a>(pub &'a Rational);

impl Serialize for Exact<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational(self.0, s)
    }
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RationalInterval", 2)?;
        st.serialize_field("lo", &Exact(self.lo()))?;
        st.serialize_field("hi", &Exact(self.hi()))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fields() {
        let r = Rational::new((-13).into(), 200.into());
        let v = serde_json::to_value(Exact(&r)).unwrap();
        assert_eq!(v["num"], "-13");
        assert_eq!(v["den"], "200");
        assert!((v["approx"].as_f64().unwrap() + 0.065).abs() < 1e-12);
        let iv = RationalInterval::new(r.clone(), Rational::from_integer(1.into())).unwrap();
        let v = serde_json::to_value(&iv).unwrap();
        assert_eq!(v["hi"]["den"], "1");
    }
}
