//! Standard-like forcings.
//!
//! A reduced PL forcing is given by weights `w` (the slopes of `φ`) and
//! interval lengths `ℓ`, with `Σℓ = 1`, `w·ℓ = 0`, `w₁ = -1` and every
//! `w_i ≥ -1`. The only smooth forcing is the sine wave of the standard
//! family, `φ(x) = sin(2πx)/(2π)`.

use crate::numeric::fint::Fi;
use crate::numeric::{fmt_rational, frac, from_f64, int, parse_rational, rat, to_f64, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// First violated condition of the reduced-forcing constraints.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("w has {w} entries but l has {ell}")]
    LengthMismatch { w: usize, ell: usize },
    #[error("need at least two pieces, got {0}")]
    TooFewPieces(usize),
    #[error("length l[{0}] is not positive")]
    NonPositiveLength(usize),
    #[error("lengths sum to {0}, not 1")]
    LengthSum(String),
    #[error("w·l = {0} ≠ 0")]
    NotPeriodic(String),
    #[error("w[0] = {0}, must be -1")]
    FirstWeight(String),
    #[error("w[{0}] is below -1")]
    WeightBelowMinusOne(usize),
    #[error("w[{0}] equals the next weight (cyclically), so its end is not a break point")]
    RepeatedWeight(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForcingError {
    #[error("invalid reduced forcing: {0}")]
    Invalid(#[from] Violation),
    #[error("forcing is constant")]
    ConstantForcing,
    #[error("slope -1 occurs on {0} intervals of definition; reduction is ambiguous")]
    AmbiguousReduction(usize),
    #[error("forcing is not standard-like: minimum slope {0} is not -1")]
    NotStandardLike(String),
    #[error("value cell {0} has no samples; use fewer cells")]
    EmptyCell(usize),
    #[error("bad general PL forcing: {0}")]
    BadGeneral(&'static str),
    #[error("cannot parse forcing spec `{0}`")]
    Parse(String),
}

/// Checks every constraint defining a reduced PL forcing.
pub fn validate_reduced(w: &[Rational], ell: &[Rational]) -> Result<(), Violation> {
    if w.len() != ell.len() {
        return Err(Violation::LengthMismatch {
            w: w.len(),
            ell: ell.len(),
        });
    }
    let k = w.len();
    if k < 2 {
        return Err(Violation::TooFewPieces(k));
    }
    if let Some(i) = ell.iter().position(|l| !l.is_positive()) {
        return Err(Violation::NonPositiveLength(i));
    }
    let sum: Rational = ell.iter().sum();
    if !sum.is_one() {
        return Err(Violation::LengthSum(fmt_rational(&sum)));
    }
    let dot: Rational = w.iter().zip(ell).map(|(a, b)| a * b).sum();
    if !dot.is_zero() {
        return Err(Violation::NotPeriodic(fmt_rational(&dot)));
    }
    if w[0] != -Rational::one() {
        return Err(Violation::FirstWeight(fmt_rational(&w[0])));
    }
    if let Some(i) = w.iter().position(|x| *x < -Rational::one()) {
        return Err(Violation::WeightBelowMinusOne(i));
    }
    if let Some(i) = (0..k).find(|&i| w[i] == w[(i + 1) % k]) {
        return Err(Violation::RepeatedWeight(i));
    }
    Ok(())
}

/// Reduced PL forcing `φ_{w,ℓ}(x) = ∫_0^x Σ w_i·1_{X_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawReduced", into = "RawReduced")]
pub struct ReducedPLForcing {
    w: Vec<Rational>,
    ell: Vec<Rational>,
    /// Left endpoints of the `X_i`; `starts[0] = 0`.
    starts: Vec<Rational>,
    /// `φ` at each left endpoint.
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawReduced {
    #[serde(with = "crate::numeric::serde_rational_vec")]
    w: Vec<Rational>,
    #[serde(rename = "l", with = "crate::numeric::serde_rational_vec")]
    ell: Vec<Rational>,
}

impl TryFrom<RawReduced> for ReducedPLForcing {
    type Error = Violation;
    fn try_from(r: RawReduced) -> Result<Self, Violation> {
        ReducedPLForcing::new(r.w, r.ell)
    }
}

impl From<ReducedPLForcing> for RawReduced {
    fn from(f: ReducedPLForcing) -> Self {
        RawReduced { w: f.w, ell: f.ell }
    }
}

impl ReducedPLForcing {
    pub fn new(w: Vec<Rational>, ell: Vec<Rational>) -> Result<Self, Violation> {
        validate_reduced(&w, &ell)?;
        let mut starts = Vec::with_capacity(w.len());
        let mut values = Vec::with_capacity(w.len());
        let mut x = Rational::zero();
        let mut v = Rational::zero();
        for (wi, li) in w.iter().zip(&ell) {
            starts.push(x.clone());
            values.push(v.clone());
            x += li;
            v += wi * li;
        }
        Ok(ReducedPLForcing { w, ell, starts, values })
    }

    /// Two-break forcing with positive weight `w`: `ℓ = (w/(w+1), 1/(w+1))`.
    pub fn two_break(w: Rational) -> Result<Self, Violation> {
        let one = Rational::one();
        let l2 = (&one + &w).recip();
        let l1 = &one - &l2;
        ReducedPLForcing::new(vec![-one, w], vec![l1, l2])
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    pub fn w(&self) -> &[Rational] {
        &self.w
    }

    pub fn ell(&self) -> &[Rational] {
        &self.ell
    }

    /// Left endpoints of the intervals of definition (the break points).
    pub fn breakpoints(&self) -> &[Rational] {
        &self.starts
    }

    /// The weight `w` when this is a two-break forcing.
    pub fn two_break_weight(&self) -> Option<&Rational> {
        (self.k() == 2).then(|| &self.w[1])
    }

    /// Index of the interval of definition containing `frac(x)` (left-closed).
    pub fn piece_index(&self, x: &Rational) -> usize {
        let y = frac(x);
        self.starts.partition_point(|s| *s <= y) - 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let y = frac(x);
        let i = self.starts.partition_point(|s| *s <= y) - 1;
        &self.values[i] + &self.w[i] * (y - &self.starts[i])
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let y = x - x.floor();
        let i = self.starts.iter().rposition(|s| to_f64(s) <= y).unwrap_or(0);
        to_f64(&self.values[i]) + to_f64(&self.w[i]) * (y - to_f64(&self.starts[i]))
    }

    /// Values of `φ` at the break points.
    pub fn break_values(&self) -> &[Rational] {
        &self.values
    }

    /// `(min φ, max φ)`, attained at break points.
    pub fn range(&self) -> (Rational, Rational) {
        let lo = self.values.iter().min().unwrap().clone();
        let hi = self.values.iter().max().unwrap().clone();
        (lo, hi)
    }

    pub fn max_weight(&self) -> &Rational {
        self.w.iter().max().unwrap()
    }

    pub fn spec_string(&self) -> String {
        let w: Vec<String> = self.w.iter().map(|x| x.to_string()).collect();
        let l: Vec<String> = self.ell.iter().map(|x| x.to_string()).collect();
        format!("pl:w={};l={}", w.join(","), l.join(","))
    }
}

/// The standard family forcing `sin(2πx)/(2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SineForcing;

impl SineForcing {
    pub fn eval(x: f64) -> f64 {
        (TAU * x).sin() / TAU
    }

    pub fn derivative(x: f64) -> f64 {
        (TAU * x).cos()
    }

    pub fn eval_interval(x: Fi) -> Fi {
        x.sin_turns()
            .mul(Fi::new(1.0 / TAU, 1.0 / TAU).mul(Fi::new(1.0f64.next_down(), 1.0f64.next_up())))
    }

    pub fn derivative_interval(x: Fi) -> Fi {
        x.cos_turns()
    }

    /// Midpoint samples of `φ'` on a uniform grid of `m` cells.
    pub fn derivative_samples(m: usize) -> Vec<f64> {
        (0..m).map(|i| Self::derivative((i as f64 + 0.5) / m as f64)).collect()
    }
}

/// Triangle wave whose decreasing part has width `δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleForcing {
    pub delta: Rational,
}

impl TriangleForcing {
    pub fn new(delta: Rational) -> Result<Self, ForcingError> {
        if !delta.is_positive() || delta >= Rational::one() {
            return Err(ForcingError::Parse(format!("triangle width {delta} outside (0,1)")));
        }
        Ok(TriangleForcing { delta })
    }

    /// `w = (-1, δ/(1-δ))`, `ℓ = (δ, 1-δ)`.
    pub fn to_reduced(&self) -> ReducedPLForcing {
        let one = Rational::one();
        let w2 = &self.delta / (&one - &self.delta);
        ReducedPLForcing::new(vec![-one.clone(), w2], vec![self.delta.clone(), one - &self.delta])
            .expect("triangle parameters always valid")
    }
}

/// A forcing usable in a standard-like family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Forcing {
    Pl(ReducedPLForcing),
    Sine,
}

impl Forcing {
    pub fn triangle(delta: Rational) -> Result<Forcing, ForcingError> {
        Ok(Forcing::Pl(TriangleForcing::new(delta)?.to_reduced()))
    }

    pub fn as_pl(&self) -> Option<&ReducedPLForcing> {
        match self {
            Forcing::Pl(f) => Some(f),
            Forcing::Sine => None,
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            Forcing::Pl(f) => f.eval_f64(x),
            Forcing::Sine => SineForcing::eval(x),
        }
    }

    /// Upper bound on `|φ'|`.
    pub fn max_abs_derivative(&self) -> f64 {
        match self {
            Forcing::Pl(f) => f.w().iter().map(|w| to_f64(w).abs()).fold(0.0, f64::max),
            Forcing::Sine => 1.0,
        }
    }

    /// Bounds on `φ` as floats.
    pub fn range_f64(&self) -> (f64, f64) {
        match self {
            Forcing::Pl(f) => {
                let (a, b) = f.range();
                (to_f64(&a), to_f64(&b))
            }
            Forcing::Sine => (-1.0 / TAU, 1.0 / TAU),
        }
    }
}

impl fmt::Display for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Pl(p) => write!(f, "{}", p.spec_string()),
            Forcing::Sine => write!(f, "sine"),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<Rational>, ForcingError> {
    s.split(',')
        .map(|t| parse_rational(t).map_err(|e| ForcingError::Parse(e.to_string())))
        .collect()
}

impl FromStr for Forcing {
    type Err = ForcingError;

    /// Grammar: `sine` | `triangle:<rat>` | `pl:w=<rat,...>;l=<rat,...>`.
    fn from_str(s: &str) -> Result<Forcing, ForcingError> {
        let t = s.trim();
        if t == "sine" {
            return Ok(Forcing::Sine);
        }
        if let Some(d) = t.strip_prefix("triangle:") {
            let delta = parse_rational(d).map_err(|e| ForcingError::Parse(e.to_string()))?;
            return Forcing::triangle(delta);
        }
        if let Some(body) = t.strip_prefix("pl:") {
            let (wpart, lpart) = body.split_once(';').ok_or_else(|| ForcingError::Parse(s.to_string()))?;
            let w = wpart
                .trim()
                .strip_prefix("w=")
                .ok_or_else(|| ForcingError::Parse(s.to_string()))?;
            let l = lpart
                .trim()
                .strip_prefix("l=")
                .ok_or_else(|| ForcingError::Parse(s.to_string()))?;
            let f = ReducedPLForcing::new(parse_list(w)?, parse_list(l)?)?;
            return Ok(Forcing::Pl(f));
        }
        Err(ForcingError::Parse(s.to_string()))
    }
}

/// PL forcing in general position: break points anywhere on the circle.
///
/// `slopes[i]` holds on `[breakpoints[i], breakpoints[i+1])`, the last piece
/// wrapping around through 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralPLForcing {
    breakpoints: Vec<Rational>,
    slopes: Vec<Rational>,
    first_value: Rational,
}

impl GeneralPLForcing {
    pub fn new(breakpoints: Vec<Rational>, slopes: Vec<Rational>, first_value: Rational) -> Result<Self, ForcingError> {
        if breakpoints.is_empty() || breakpoints.len() != slopes.len() {
            return Err(ForcingError::BadGeneral("need one slope per break point"));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        if breakpoints.iter().any(|b| *b < zero || *b >= one) || breakpoints.windows(2).any(|p| p[0] >= p[1]) {
            return Err(ForcingError::BadGeneral("break points must be increasing in [0,1)"));
        }
        let g = GeneralPLForcing {
            breakpoints,
            slopes,
            first_value,
        };
        let rise: Rational = (0..g.k()).map(|i| &g.slopes[i] * g.length(i)).sum();
        if !rise.is_zero() {
            return Err(ForcingError::BadGeneral("slopes do not integrate to zero"));
        }
        Ok(g)
    }

    /// Pieces start at 0 with the given lengths; `φ(0) = value_at_zero`.
    pub fn from_slopes(
        slopes: Vec<Rational>,
        lengths: &[Rational],
        value_at_zero: Rational,
    ) -> Result<Self, ForcingError> {
        let mut bps = Vec::with_capacity(lengths.len());
        let mut x = Rational::zero();
        for l in lengths {
            bps.push(x.clone());
            x += l;
        }
        if !x.is_one() {
            return Err(ForcingError::BadGeneral("lengths must sum to 1"));
        }
        GeneralPLForcing::new(bps, slopes, value_at_zero)
    }

    pub fn k(&self) -> usize {
        self.slopes.len()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    fn length(&self, i: usize) -> Rational {
        let next = if i + 1 < self.k() {
            self.breakpoints[i + 1].clone()
        } else {
            &self.breakpoints[0] + Rational::one()
        };
        next - &self.breakpoints[i]
    }

    pub fn lengths(&self) -> Vec<Rational> {
        (0..self.k()).map(|i| self.length(i)).collect()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let x0 = &self.breakpoints[0];
        // position measured from the first break point, in [0, 1)
        let t = frac(&(x - x0));
        let mut v = self.first_value.clone();
        let mut acc = Rational::zero();
        for i in 0..self.k() {
            let len = self.length(i);
            if t < &acc + &len {
                return v + &self.slopes[i] * (t - acc);
            }
            v += &self.slopes[i] * &len;
            acc += len;
        }
        unreachable!("t lies in [0, 1)")
    }

    /// `ψ = r + φ_{w,ℓ}∘T_s`, i.e. `ψ(x) = r + φ(x + s)`.
    pub fn shift_translate(r: &Rational, s: &Rational, f: &ReducedPLForcing) -> GeneralPLForcing {
        let mut pieces: Vec<(Rational, Rational, Rational)> = (0..f.k())
            .map(|i| {
                let pos = frac(&(&f.breakpoints()[i] - s));
                (pos, f.w()[i].clone(), r + &f.break_values()[i])
            })
            .collect();
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        let first_value = pieces[0].2.clone();
        let (bps, slopes): (Vec<_>, Vec<_>) = pieces.into_iter().map(|(p, w, _)| (p, w)).unzip();
        GeneralPLForcing::new(bps, slopes, first_value).expect("shift of a valid forcing is valid")
    }

    /// Scales by `1/|min slope|` so the minimum slope becomes -1.
    pub fn normalize_standard_like(&self) -> Result<GeneralPLForcing, ForcingError> {
        let min = self.slopes.iter().min().unwrap();
        if !min.is_negative() {
            return Err(ForcingError::ConstantForcing);
        }
        let c = min.abs();
        Ok(GeneralPLForcing {
            breakpoints: self.breakpoints.clone(),
            slopes: self.slopes.iter().map(|s| s / &c).collect(),
            first_value: &self.first_value / &c,
        })
    }
}

/// Sampled path of the standard-like normalization: divides samples of `φ`
/// on a uniform periodic grid by the steepest descending difference quotient.
pub fn normalize_samples(samples: &[f64]) -> Result<Vec<f64>, ForcingError> {
    let m = samples.len();
    if m < 2 {
        return Err(ForcingError::ConstantForcing);
    }
    let h = 1.0 / m as f64;
    let min_slope = (0..m)
        .map(|i| (samples[(i + 1) % m] - samples[i]) / h)
        .fold(f64::INFINITY, f64::min);
    if min_slope >= 0.0 {
        return Err(ForcingError::ConstantForcing);
    }
    Ok(samples.iter().map(|v| v / min_slope.abs()).collect())
}

/// Recovers `(r, s, f)` with `shift_translate(r, s, f) = ψ`.
///
/// `s` is returned in `[0, 1)`.
pub fn reduce_general_pl(psi: &GeneralPLForcing) -> Result<(Rational, Rational, ReducedPLForcing), ForcingError> {
    let minus_one = -Rational::one();
    let minima: Vec<usize> = (0..psi.k()).filter(|&i| psi.slopes[i] == minus_one).collect();
    match minima.len() {
        0 => {
            let m = psi.slopes.iter().min().unwrap();
            return Err(ForcingError::NotStandardLike(fmt_rational(m)));
        }
        1 => {}
        n => return Err(ForcingError::AmbiguousReduction(n)),
    }
    if psi.slopes.iter().any(|s| *s < minus_one) {
        let m = psi.slopes.iter().min().unwrap();
        return Err(ForcingError::NotStandardLike(fmt_rational(m)));
    }
    let i0 = minima[0];
    let left = psi.breakpoints[i0].clone();
    let r = psi.eval(&left);
    let s = frac(&-&left);
    let k = psi.k();
    let lengths = psi.lengths();
    let w: Vec<Rational> = (0..k).map(|j| psi.slopes[(i0 + j) % k].clone()).collect();
    let ell: Vec<Rational> = (0..k).map(|j| lengths[(i0 + j) % k].clone()).collect();
    let f = ReducedPLForcing::new(w, ell)?;
    Ok((r, s, f))
}

/// Value-range binning of derivative samples into a reduced PL forcing.
///
/// `deriv_samples` are values of `φ'` on a uniform grid (each sample carries
/// mass `1/M`). The samples are centred to mean zero, the value range is cut
/// into `n_cells` equal left-closed cells (the last one closed), and each
/// cell becomes one interval of definition whose weight is the cell average
/// and whose length is the cell mass. Finally all weights are divided by the
/// magnitude of the lowest one, so `w₁ = -1` and `w·ℓ = 0` hold exactly.
pub fn discretize(deriv_samples: &[f64], n_cells: usize) -> Result<ReducedPLForcing, ForcingError> {
    if n_cells < 2 || deriv_samples.len() < 2 {
        return Err(ForcingError::BadGeneral("need at least two cells and two samples"));
    }
    let m = deriv_samples.len();
    let exact: Vec<Rational> = deriv_samples
        .iter()
        .map(|x| from_f64(*x).ok_or(ForcingError::BadGeneral("non-finite sample")))
        .collect::<Result<_, _>>()?;
    let mean: Rational = exact.iter().sum::<Rational>() / int(m as i64);
    let centred: Vec<Rational> = exact.iter().map(|x| x - &mean).collect();
    let lo = centred.iter().min().unwrap().clone();
    let hi = centred.iter().max().unwrap().clone();
    if lo == hi {
        return Err(ForcingError::ConstantForcing);
    }
    let span = &hi - &lo;
    let n = n_cells as i64;
    let mut sums = vec![Rational::zero(); n_cells];
    let mut counts = vec![0usize; n_cells];
    for v in &centred {
        let pos = (v - &lo) / &span * int(n);
        let idx = (pos.floor().to_integer().try_into().unwrap_or(i64::MAX)).min(n - 1) as usize;
        sums[idx] += v;
        counts[idx] += 1;
    }
    if let Some(i) = counts.iter().position(|c| *c == 0) {
        return Err(ForcingError::EmptyCell(i));
    }
    let avgs: Vec<Rational> = sums.iter().zip(&counts).map(|(s, c)| s / int(*c as i64)).collect();
    let scale = avgs[0].abs();
    let w: Vec<Rational> = avgs.iter().map(|a| a / &scale).collect();
    let ell: Vec<Rational> = counts.iter().map(|c| rat(*c as i64, m as i64)).collect();
    Ok(ReducedPLForcing::new(w, ell)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|(a, b)| rat(*a, *b)).collect()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_reduced(&rv(&[(-1, 1), (1, 1)]), &rv(&[(1, 2), (1, 2)])).is_ok());
        assert_eq!(
            validate_reduced(&rv(&[(-1, 1), (2, 1)]), &rv(&[(1, 2), (1, 2)])),
            Err(Violation::NotPeriodic("1/2".into()))
        );
        assert!(validate_reduced(&rv(&[(-1, 1), (2, 1)]), &rv(&[(2, 3), (1, 3)])).is_ok());
        assert!(matches!(
            validate_reduced(&rv(&[(-1, 1), (1, 1), (1, 1)]), &rv(&[(1, 2), (1, 4), (1, 4)])),
            Err(Violation::RepeatedWeight(1))
        ));
        assert!(matches!(
            validate_reduced(&rv(&[(-1, 2), (1, 2)]), &rv(&[(1, 2), (1, 2)])),
            Err(Violation::FirstWeight(_))
        ));
        assert!(matches!(
            validate_reduced(&rv(&[(-1, 1)]), &rv(&[(1, 1)])),
            Err(Violation::TooFewPieces(1))
        ));
    }

    #[test]
    fn eval_examples() {
        let f = TriangleForcing::new(rat(1, 2)).unwrap().to_reduced();
        assert_eq!(f.eval(&rat(0, 1)), rat(0, 1));
        assert_eq!(f.eval(&rat(1, 1)), rat(0, 1));
        assert_eq!(f.eval(&rat(1, 2)), rat(-1, 2));
        assert_eq!(f.eval(&rat(1, 4)), rat(-1, 4));
        assert_eq!(f.eval(&rat(-1, 4)), rat(-1, 4));
        let g = ReducedPLForcing::new(rv(&[(-1, 1), (2, 1)]), rv(&[(2, 3), (1, 3)])).unwrap();
        assert_eq!(g.eval(&rat(5, 6)), rat(-1, 3));
    }

    #[test]
    fn triangle_is_two_break() {
        let t = TriangleForcing::new(rat(4, 7)).unwrap().to_reduced();
        assert_eq!(t, ReducedPLForcing::two_break(rat(4, 3)).unwrap());
        assert_eq!(t.two_break_weight(), Some(&rat(4, 3)));
    }

    #[test]
    fn parse_spec_strings() {
        let f: Forcing = "triangle:1/2".parse().unwrap();
        assert_eq!(f.as_pl().unwrap().w(), &rv(&[(-1, 1), (1, 1)])[..]);
        assert_eq!("sine".parse::<Forcing>().unwrap(), Forcing::Sine);
        let g: Forcing = "pl:w=-1,2;l=2/3,1/3".parse().unwrap();
        assert_eq!(g.as_pl().unwrap().ell(), &rv(&[(2, 3), (1, 3)])[..]);
        assert_eq!(g.to_string(), "pl:w=-1,2;l=2/3,1/3");
        assert!("pl:w=-1,2;l=1/2,1/2".parse::<Forcing>().is_err());
        assert!("cosine".parse::<Forcing>().is_err());
        assert!("triangle:3/2".parse::<Forcing>().is_err());
    }

    #[test]
    fn normalize_examples() {
        let lens = rv(&[(1, 2), (1, 2)]);
        let g = GeneralPLForcing::from_slopes(rv(&[(-2, 1), (2, 1)]), &lens, rat(0, 1)).unwrap();
        assert_eq!(
            g.normalize_standard_like().unwrap().slopes(),
            &rv(&[(-1, 1), (1, 1)])[..]
        );
        let g = GeneralPLForcing::from_slopes(rv(&[(-1, 1), (1, 1)]), &lens, rat(0, 1)).unwrap();
        assert_eq!(g.normalize_standard_like().unwrap(), g);
        let g = GeneralPLForcing::from_slopes(rv(&[(-1, 2), (1, 2)]), &lens, rat(0, 1)).unwrap();
        assert_eq!(
            g.normalize_standard_like().unwrap().slopes(),
            &rv(&[(-1, 1), (1, 1)])[..]
        );
        let flat = GeneralPLForcing::from_slopes(rv(&[(0, 1), (0, 1)]), &lens, rat(0, 1)).unwrap();
        assert_eq!(flat.normalize_standard_like(), Err(ForcingError::ConstantForcing));
    }

    #[test]
    fn normalize_sampled() {
        let m = 1000;
        let s: Vec<f64> = (0..m).map(|i| 3.0 * SineForcing::eval(i as f64 / m as f64)).collect();
        let n = normalize_samples(&s).unwrap();
        let min_slope = (0..m)
            .map(|i| (n[(i + 1) % m] - n[i]) * m as f64)
            .fold(f64::INFINITY, f64::min);
        assert!((min_slope + 1.0).abs() < 1e-12);
        assert_eq!(normalize_samples(&[1.0; 8]), Err(ForcingError::ConstantForcing));
    }

    #[test]
    fn reduction_examples() {
        // -13/30 + 2/10 + 7/30 = 0
        let f = ReducedPLForcing::new(rv(&[(-1, 1), (2, 1), (1, 2)]), rv(&[(13, 30), (1, 10), (7, 15)])).unwrap();
        let same = GeneralPLForcing::shift_translate(&rat(0, 1), &rat(0, 1), &f);
        let (r, s, g) = reduce_general_pl(&same).unwrap();
        assert_eq!((r, s, &g), (rat(0, 1), rat(0, 1), &f));

        let psi = GeneralPLForcing::shift_translate(&rat(1, 8), &rat(1, 4), &f);
        assert_eq!(psi.eval(&rat(0, 1)), rat(1, 8) + f.eval(&rat(1, 4)));
        let (r, s, g) = reduce_general_pl(&psi).unwrap();
        assert_eq!((r, s, g), (rat(1, 8), rat(1, 4), f));

        let two = GeneralPLForcing::from_slopes(
            rv(&[(-1, 1), (1, 1), (-1, 1), (1, 1)]),
            &rv(&[(1, 4), (1, 4), (1, 4), (1, 4)]),
            rat(0, 1),
        )
        .unwrap();
        assert_eq!(reduce_general_pl(&two), Err(ForcingError::AmbiguousReduction(2)));
    }

    #[test]
    fn discretize_examples() {
        let m = 64;
        let tri: Vec<f64> = (0..m).map(|i| if i < m / 2 { -1.0 } else { 1.0 }).collect();
        let f = discretize(&tri, 2).unwrap();
        assert_eq!(f, TriangleForcing::new(rat(1, 2)).unwrap().to_reduced());

        let f = discretize(&SineForcing::derivative_samples(512), 8).unwrap();
        let dot: Rational = f.w().iter().zip(f.ell()).map(|(a, b)| a * b).sum();
        assert!(dot.is_zero());
        assert_eq!(f.w()[0], rat(-1, 1));
        assert_eq!(f.k(), 8);

        // two sample values only: any third cell between them is empty
        assert_eq!(discretize(&tri, 3), Err(ForcingError::EmptyCell(1)));
    }

    proptest! {
        #[test]
        fn continuity_at_breaks(a in 1i64..20, b in 1i64..20, c in 1i64..20) {
            // w = (-1, x, y) with lengths built to satisfy w·l = 0
            let l2 = rat(a, 1);
            let l3 = rat(b, 1);
            let w2 = rat(c, 7);
            let l1 = &w2 * &l2 + rat(1, 3) * &l3;
            let total = &l1 + &l2 + &l3;
            let f = ReducedPLForcing::new(
                vec![rat(-1, 1), w2, rat(1, 3)],
                vec![l1 / &total, l2 / &total, l3 / &total],
            );
            prop_assume!(f.is_ok());
            let f = f.unwrap();
            for (i, x) in f.breakpoints().iter().enumerate() {
                let prev = if i == 0 { f.k() - 1 } else { i - 1 };
                let left = &f.break_values()[prev] + &f.w()[prev] * &f.ell()[prev];
                let expect = if i == 0 { rat(0, 1) } else { f.eval(x) };
                prop_assert_eq!(left, expect);
            }
        }

        #[test]
        fn reduction_round_trip(r in -5i64..5, s in 0i64..12, wn in 1i64..9) {
            let f = ReducedPLForcing::two_break(rat(wn, 3)).unwrap();
            let (r, s) = (rat(r, 4), rat(s, 12));
            let psi = GeneralPLForcing::shift_translate(&r, &s, &f);
            prop_assert_eq!(reduce_general_pl(&psi).unwrap(), (r, s, f));
        }

        #[test]
        fn discretize_is_exactly_valid(m in 50usize..300, n in 2usize..6, amp in 0.2f64..3.0) {
            let samples: Vec<f64> = (0..m).map(|i| amp * SineForcing::derivative((i as f64 + 0.3) / m as f64)).collect();
            if let Ok(f) = discretize(&samples, n) {
                prop_assert!(validate_reduced(f.w(), f.ell()).is_ok());
                prop_assert_eq!(&f.w()[0], &rat(-1, 1));
            }
        }
    }
}
