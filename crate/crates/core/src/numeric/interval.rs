use super::rational::{fmt_rational, midpoint, parse_rational, to_f64, Rational};
use num_traits::{One, Signed, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: Rational,
    hi: Rational,
}

impl RationalInterval {
    /// Panics if `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RationalInterval { lo, hi }
    }

    /// Builds the hull of two values in either order.
    pub fn hull(a: Rational, b: Rational) -> Self {
        if a <= b {
            RationalInterval { lo: a, hi: b }
        } else {
            RationalInterval { lo: b, hi: a }
        }
    }

    pub fn point(x: Rational) -> Self {
        RationalInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        midpoint(&self.lo, &self.hi)
    }

    pub fn radius(&self) -> Rational {
        self.width() / Rational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &RationalInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &RationalInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Largest absolute value attained on the interval.
    pub fn mag(&self) -> Rational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }

    pub fn add(&self, o: &RationalInterval) -> RationalInterval {
        RationalInterval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &RationalInterval) -> RationalInterval {
        RationalInterval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> RationalInterval {
        RationalInterval::new(-&self.hi, -&self.lo)
    }

    pub fn add_scalar(&self, c: &Rational) -> RationalInterval {
        RationalInterval::new(&self.lo + c, &self.hi + c)
    }

    pub fn scale(&self, c: &Rational) -> RationalInterval {
        RationalInterval::hull(&self.lo * c, &self.hi * c)
    }

    pub fn mul(&self, o: &RationalInterval) -> RationalInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RationalInterval::new(lo, hi)
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &RationalInterval) -> Option<RationalInterval> {
        if o.contains_zero() {
            return None;
        }
        let inv = RationalInterval::new(o.hi.recip(), o.lo.recip());
        Some(self.mul(&inv))
    }

    pub fn powi(&self, e: u32) -> RationalInterval {
        let mut acc = RationalInterval::point(Rational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        if e.is_multiple_of(2) && self.contains_zero() {
            // even powers of a sign-straddling interval are nonnegative
            acc = RationalInterval::new(Rational::zero(), acc.hi);
        }
        acc
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [fmt_rational(&self.lo), fmt_rational(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = parse_rational(&lo).map_err(D::Error::custom)?;
        let hi = parse_rational(&hi).map_err(D::Error::custom)?;
        if lo > hi {
            return Err(D::Error::custom("interval endpoints out of order"));
        }
        Ok(RationalInterval { lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::rat;

    #[test]
    fn arithmetic_encloses() {
        let a = RationalInterval::new(rat(-1, 2), rat(1, 3));
        let b = RationalInterval::new(rat(2, 1), rat(3, 1));
        let p = a.mul(&b);
        assert_eq!(p.lo(), &rat(-3, 2));
        assert_eq!(p.hi(), &rat(1, 1));
        assert_eq!(a.powi(2).lo(), &rat(0, 1));
        assert_eq!(a.powi(2).hi(), &rat(1, 4));
        assert!(b.div(&a).is_none());
        let q = a.div(&b).unwrap();
        assert_eq!(q.lo(), &rat(-1, 4));
        assert_eq!(q.hi(), &rat(1, 6));
    }

    #[test]
    fn json_form() {
        let a = RationalInterval::new(rat(1, 3), rat(1, 2));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"["1/3","1/2"]"#);
        let back: RationalInterval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<RationalInterval>(r#"["1/2","1/3"]"#).is_err());
    }
}
