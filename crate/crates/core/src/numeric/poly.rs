//! Factored polynomials `p(y) = Π (1 + k_i·y)^{e_i}` and the root calculus
//! for `p(y) = 1` on `(0, 1)`.
//!
//! When the factors include both a negative and a positive `k`, all with
//! `k ≥ -1`, the equation `p(y) = 1` has a root in `(0, 1)` exactly when
//! `Σ e_i·k_i > 0` and `p(1) < 1`. That root is unique and `p` crosses 1
//! downward there, which is what makes plain sign bisection a certificate.

use super::interval::RationalInterval;
use super::rational::{fmt_rational, int, midpoint, parse_rational, simplest_between, Rational};
use super::NumericError;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredPolynomial {
    /// Sorted by `k` ascending, distinct `k`, every exponent positive.
    factors: Vec<(Rational, u32)>,
}

impl FactoredPolynomial {
    /// Normalizes the factor list: equal `k` values are merged and the
    /// result is sorted. Zero exponents are dropped.
    pub fn new(factors: Vec<(Rational, u32)>) -> Result<Self, NumericError> {
        let mut fs: Vec<(Rational, u32)> = factors.into_iter().filter(|(_, e)| *e > 0).collect();
        fs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rational, u32)> = Vec::with_capacity(fs.len());
        for (k, e) in fs {
            match merged.last_mut() {
                Some((lk, le)) if *lk == k => *le += e,
                _ => merged.push((k, e)),
            }
        }
        if merged.is_empty() {
            return Err(NumericError::ZeroDegree);
        }
        if merged[0].0 < -Rational::one() {
            return Err(NumericError::FactorBelowMinusOne(fmt_rational(&merged[0].0)));
        }
        Ok(FactoredPolynomial { factors: merged })
    }

    /// One linear factor per entry of `ks`, repeats allowed.
    pub fn from_linear_factors<'a>(ks: impl IntoIterator<Item = &'a Rational>) -> Result<Self, NumericError> {
        Self::new(ks.into_iter().map(|k| (k.clone(), 1)).collect())
    }

    pub fn factors(&self) -> &[(Rational, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        let one = Rational::one();
        self.factors.iter().fold(Rational::one(), |acc, (k, e)| {
            acc * num_traits::pow(&one + k * y, *e as usize)
        })
    }

    /// `p'(y)` by the logarithmic-derivative expansion.
    pub fn derivative(&self, y: &Rational) -> Rational {
        let one = Rational::one();
        let mut total = Rational::zero();
        for (i, (ki, ei)) in self.factors.iter().enumerate() {
            let mut term = ki * int(*ei as i64) * num_traits::pow(&one + ki * y, (*ei - 1) as usize);
            for (j, (kj, ej)) in self.factors.iter().enumerate() {
                if i != j {
                    term *= num_traits::pow(&one + kj * y, *ej as usize);
                }
            }
            total += term;
        }
        total
    }

    /// Interval enclosure of `p` over `ys`.
    pub fn eval_interval(&self, ys: &RationalInterval) -> RationalInterval {
        let one = Rational::one();
        self.factors
            .iter()
            .fold(RationalInterval::point(one.clone()), |acc, (k, e)| {
                acc.mul(&ys.scale(k).add_scalar(&one).powi(*e))
            })
    }

    /// Interval enclosure of `p'` over `ys`.
    pub fn derivative_interval(&self, ys: &RationalInterval) -> RationalInterval {
        let one = Rational::one();
        let mut total = RationalInterval::point(Rational::zero());
        for (i, (ki, ei)) in self.factors.iter().enumerate() {
            let c = ki * int(*ei as i64);
            let mut term = ys.scale(ki).add_scalar(&one).powi(ei - 1).scale(&c);
            for (j, (kj, ej)) in self.factors.iter().enumerate() {
                if i != j {
                    term = term.mul(&ys.scale(kj).add_scalar(&one).powi(*ej));
                }
            }
            total = total.add(&term);
        }
        total
    }

    /// `Σ e_i·k_i`, i.e. `p'(0)`.
    pub fn weighted_sum(&self) -> Rational {
        self.factors
            .iter()
            .map(|(k, e)| k * int(*e as i64))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Whether `p(y) = 1` has a solution in `(0, 1)`.
    ///
    /// Errors when the factors do not have mixed signs, since the shape
    /// criterion does not apply to such polynomials.
    pub fn is_plausible_shape(&self) -> Result<bool, NumericError> {
        let has_neg = self.factors.iter().any(|(k, _)| k.is_negative());
        let has_pos = self.factors.iter().any(|(k, _)| k.is_positive());
        if !(has_neg && has_pos) {
            return Err(NumericError::UnmixedSigns(self.to_string()));
        }
        Ok(self.weighted_sum().is_positive() && self.eval(&Rational::one()) < Rational::one())
    }

    /// Certified enclosure of the unique root of `p(y) = 1` in `(0, 1)`.
    ///
    /// The result has `hi - lo ≤ width`, `p(lo) > 1 > p(hi)`, and `lo > 0`.
    /// If a bisection midpoint is an exact root the degenerate interval
    /// `[y*, y*]` is returned instead.
    pub fn unique_root(&self, width: &Rational) -> Result<RationalInterval, NumericError> {
        if !width.is_positive() {
            return Err(NumericError::NonPositiveWidth);
        }
        if !self.is_plausible_shape()? {
            return Err(NumericError::NotPlausible(self.to_string()));
        }
        Ok(self.bisect_root(Rational::zero(), Rational::one(), width))
    }

    /// Bisects on a bracket with `p(lo) ≥ 1 > p(hi)`; continues until the
    /// lower end is strictly above 1 as well as narrow enough.
    fn bisect_root(&self, mut lo: Rational, mut hi: Rational, width: &Rational) -> RationalInterval {
        let one = Rational::one();
        loop {
            let lo_strict = self.eval(&lo) > one;
            if lo_strict && &(&hi - &lo) <= width {
                return RationalInterval::new(lo, hi);
            }
            let mid = midpoint(&lo, &hi);
            match self.eval(&mid).cmp(&one) {
                Ordering::Greater => lo = mid,
                Ordering::Less => hi = mid,
                Ordering::Equal => return RationalInterval::point(mid),
            }
        }
    }

    /// Narrows an enclosure previously returned by [`unique_root`].
    ///
    /// [`unique_root`]: FactoredPolynomial::unique_root
    pub fn refine_root(&self, enclosure: &RationalInterval, width: &Rational) -> RationalInterval {
        if enclosure.is_point() || &enclosure.width() <= width {
            return enclosure.clone();
        }
        self.bisect_root(enclosure.lo().clone(), enclosure.hi().clone(), width)
    }

    /// The root of `p(y) = 1` in `(0, 1)` when it is rational.
    ///
    /// Clearing denominators turns `p(y) - 1` into an integer polynomial whose
    /// leading coefficient `L` is `Π num(k_i)^{e_i}`, so a rational root has a
    /// denominator dividing `L`. An enclosure narrower than `1/L²` then holds
    /// at most one fraction of such denominator: the simplest one.
    pub fn rational_root(&self) -> Result<Option<Rational>, NumericError> {
        let lead: BigInt = self
            .factors
            .iter()
            .filter(|(k, _)| !k.is_zero())
            .map(|(k, e)| num_traits::pow(k.numer().abs(), *e as usize))
            .product();
        let width = Rational::new(BigInt::one(), &lead * &lead + BigInt::one());
        let enc = self.unique_root(&width)?;
        if enc.is_point() {
            return Ok(Some(enc.lo().clone()));
        }
        let cand = simplest_between(enc.lo(), Some(enc.hi()));
        Ok(if self.eval(&cand).is_one() { Some(cand) } else { None })
    }
}

impl fmt::Display for FactoredPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(k, e)| {
                if *e == 1 {
                    format!("(1 + ({})y)", k)
                } else {
                    format!("(1 + ({})y)^{}", k, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join(""))
    }
}

impl Serialize for FactoredPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[String; 2]> = self
            .factors
            .iter()
            .map(|(k, e)| [fmt_rational(k), e.to_string()])
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FactoredPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<[String; 2]>::deserialize(d)?;
        let mut fs = Vec::with_capacity(v.len());
        for [k, e] in v {
            let k = parse_rational(&k).map_err(D::Error::custom)?;
            let e: u32 = e.parse().map_err(D::Error::custom)?;
            fs.push((k, e));
        }
        FactoredPolynomial::new(fs).map_err(D::Error::custom)
    }
}

/// A real number known either exactly or as the isolated root of a
/// factored polynomial equation `p(y) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CertifiedReal {
    Exact {
        #[serde(with = "super::rational::serde_rational")]
        exact: Rational,
    },
    Isolated {
        poly: FactoredPolynomial,
        interval: RationalInterval,
    },
}

impl CertifiedReal {
    pub fn exact(x: Rational) -> Self {
        CertifiedReal::Exact { exact: x }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            CertifiedReal::Exact { exact } => Some(exact),
            CertifiedReal::Isolated { .. } => None,
        }
    }

    pub fn enclosure(&self) -> RationalInterval {
        match self {
            CertifiedReal::Exact { exact } => RationalInterval::point(exact.clone()),
            CertifiedReal::Isolated { interval, .. } => interval.clone(),
        }
    }

    pub fn refined(&self, width: &Rational) -> CertifiedReal {
        match self {
            CertifiedReal::Exact { .. } => self.clone(),
            CertifiedReal::Isolated { poly, interval } => CertifiedReal::Isolated {
                poly: poly.clone(),
                interval: poly.refine_root(interval, width),
            },
        }
    }

    pub fn approx(&self) -> f64 {
        let e = self.enclosure();
        let (a, b) = e.to_f64_pair();
        0.5 * (a + b)
    }
}
