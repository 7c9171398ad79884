//! Pinch points: the two-break closed form, certification, itinerary
//! census, configurations, conjugacies and invariant densities.

use crate::circle_map::ratio;
use crate::forcing::{reduce_general_pl, ForcingError, GeneralPLForcing, ReducedPLForcing};
use crate::numeric::{
    fmt_rational, frac, int, rat, CertifiedReal, FactoredPolynomial, NumericError, Rational, RationalInterval,
};
use crate::pl::{pl_from_family, BreakType, PLMap, PlError};
use crate::tongue_scan::fractions;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Sup-norm bound the interval certificate must clear.
pub const DEFAULT_BOUND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PinchError {
    #[error("j = {j} outside 1..={tau}")]
    JOutOfRange { j: u32, tau: u32 },
    #[error("two-break weight must be positive")]
    NonPositiveWeight,
    #[error("not a pinch: |F^q(x) - x - p| = {displacement} at x = {witness}")]
    NotPinch { witness: String, displacement: String },
    #[error("map is not an exact pinch")]
    NotExactPinch,
    #[error("interval certificate needs a two-break forcing")]
    NotTwoBreak,
    #[error("could not certify: {0}")]
    Unresolved(String),
    #[error("{0} is not a p_(q,j,w) polynomial for this forcing")]
    WrongPolynomial(String),
    #[error("census equations fail")]
    CensusViolated,
    #[error("configuration has no weights")]
    Unweighted,
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Forcing(#[from] ForcingError),
    #[error(transparent)]
    Pl(#[from] PlError),
}

/// `τ(q, w) = ⌈q·w/(w+1)⌉ - 1`.
pub fn pinch_count(q: u32, w: &Rational) -> u32 {
    assert!(w.is_positive(), "pinch_count needs w > 0");
    let delta = w / (w + Rational::one());
    let c = (delta * int(q as i64)).ceil() - Rational::one();
    c.to_integer().try_into().unwrap_or(0)
}

/// `p_{q,j,w}(y) = (1 - y)^j (1 + w·y)^{q-j}`.
pub fn pinch_polynomial(q: u32, j: u32, w: &Rational) -> FactoredPolynomial {
    FactoredPolynomial::new(vec![(int(-1), j), (w.clone(), q - j)]).expect("valid factors")
}

fn check_j(q: u32, j: u32, w: &Rational) -> Result<(), PinchError> {
    if !w.is_positive() {
        return Err(PinchError::NonPositiveWeight);
    }
    let tau = pinch_count(q, w);
    if j < 1 || j > tau {
        return Err(PinchError::JOutOfRange { j, tau });
    }
    Ok(())
}

/// Default enclosure width for irrational `b`.
pub fn default_b_width() -> Rational {
    rat(1, 1 << 62)
}

/// Certified `b_{q,j,w}`; exact when the root is rational.
pub fn pinch_b(q: u32, j: u32, w: &Rational) -> Result<CertifiedReal, PinchError> {
    pinch_b_width(q, j, w, &default_b_width())
}

pub fn pinch_b_width(q: u32, j: u32, w: &Rational, width: &Rational) -> Result<CertifiedReal, PinchError> {
    check_j(q, j, w)?;
    let poly = pinch_polynomial(q, j, w);
    if let Some(r) = poly.rational_root()? {
        return Ok(CertifiedReal::exact(r));
    }
    let interval = poly.unique_root(width)?;
    Ok(CertifiedReal::Isolated { poly, interval })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PinchOmega {
    Exact {
        #[serde(with = "crate::numeric::serde_rational")]
        exact: Rational,
    },
    Interval {
        interval: RationalInterval,
    },
}

impl PinchOmega {
    pub fn enclosure(&self) -> RationalInterval {
        match self {
            PinchOmega::Exact { exact } => RationalInterval::point(exact.clone()),
            PinchOmega::Interval { interval } => interval.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            PinchOmega::Exact { exact } => Some(exact),
            PinchOmega::Interval { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Certificate {
    ExactTranslation,
    /// `sup |F^q(x) - x - p| ≤ bound` over the parameter box, and the
    /// type-down break is periodic for some parameter in the box.
    IntervalCertified {
        bound: f64,
    },
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Certificate::ExactTranslation => write!(f, "exact"),
            Certificate::IntervalCertified { bound } => write!(f, "interval:{bound:e}"),
        }
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let s = String::deserialize(d)?;
        if s == "exact" {
            return Ok(Certificate::ExactTranslation);
        }
        s.strip_prefix("interval:")
            .and_then(|b| b.parse().ok())
            .map(|bound| Certificate::IntervalCertified { bound })
            .ok_or_else(|| D::Error::custom(format!("bad certificate {s}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinchPoint {
    pub p: i64,
    pub q: u32,
    pub j: u32,
    pub b: CertifiedReal,
    pub omega: PinchOmega,
    pub certificate: Certificate,
}

/// `x + ω + b·φ(x)`.
fn family_eval(f: &ReducedPLForcing, b: &Rational, omega: &Rational, x: &Rational) -> Rational {
    x + omega + b * f.eval(x)
}

/// `F^q(0) - p` at exact parameters.
fn break_displacement(f: &ReducedPLForcing, b: &Rational, omega: &Rational, p: i64, q: u32) -> Rational {
    let mut y = Rational::zero();
    for _ in 0..q {
        y = family_eval(f, b, omega, &y);
    }
    y - int(p)
}

/// Solves `F^q(0) = p` for ω assuming the orbit of 0 keeps the itinerary
/// it has at `probe`. Along a fixed itinerary each iterate is affine in ω.
fn solve_on_itinerary(f: &ReducedPLForcing, b: &Rational, probe: &Rational, p: i64, q: u32) -> Rational {
    let one = Rational::one();
    let (mut a, mut c) = (Rational::zero(), Rational::zero());
    let mut y = Rational::zero();
    for _ in 0..q {
        let n = y.floor();
        let i = f.piece_index(&y);
        let wi = &f.w()[i];
        let s = &one + b * wi;
        let shift = b * (&f.break_values()[i] - wi * (&n + &f.breakpoints()[i]));
        a = &a * &s + &one;
        c = &c * &s + shift;
        y = family_eval(f, b, probe, &y);
    }
    (int(p) - c) / a
}

/// Exact ω with `F^q(0) = 0 + p` at rational `b`.
pub(crate) fn exact_omega(f: &ReducedPLForcing, b: &Rational, p: i64, q: u32) -> Result<Rational, PinchError> {
    let center = ratio(p, q);
    let mut lo = &center - rat(3, 2);
    let mut hi = &center + rat(3, 2);
    for _ in 0..400 {
        for probe in [&lo, &hi] {
            let cand = solve_on_itinerary(f, b, probe, p, q);
            if lo <= cand && cand <= hi && break_displacement(f, b, &cand, p, q).is_zero() {
                return Ok(cand);
            }
        }
        let mid = (&lo + &hi) / int(2);
        let g = break_displacement(f, b, &mid, p, q);
        if g.is_zero() {
            return Ok(mid);
        } else if g.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(PinchError::Unresolved(format!("exact omega for {p}/{q}")))
}

/// Encloses `x + ω + b·φ(x)` for `x ∈ xs`, `b ∈ bs` at fixed ω, using that
/// the map is nondecreasing in `x` and affine in `b`.
fn step_enclosure(
    f: &ReducedPLForcing,
    bs: &RationalInterval,
    omega: &RationalInterval,
    xs: &RationalInterval,
) -> RationalInterval {
    let lo = [bs.lo(), bs.hi()]
        .iter()
        .map(|b| family_eval(f, b, omega.lo(), xs.lo()))
        .min()
        .unwrap();
    let hi = [bs.lo(), bs.hi()]
        .iter()
        .map(|b| family_eval(f, b, omega.hi(), xs.hi()))
        .max()
        .unwrap();
    RationalInterval::new(lo, hi)
}

/// Enclosures of `F^t(0)` for `t = 0..=q` over the parameter box.
fn break_orbit_enclosure(
    f: &ReducedPLForcing,
    bs: &RationalInterval,
    omega: &RationalInterval,
    q: u32,
) -> Vec<RationalInterval> {
    let mut out = vec![RationalInterval::point(Rational::zero())];
    for t in 0..q as usize {
        let next = step_enclosure(f, bs, omega, &out[t]);
        out.push(next);
    }
    out
}

/// Enclosure of `F^q(0) - p` for all `b ∈ bs` at fixed ω.
fn displacement_enclosure(
    f: &ReducedPLForcing,
    bs: &RationalInterval,
    omega: &Rational,
    p: i64,
    q: u32,
) -> RationalInterval {
    let om = RationalInterval::point(omega.clone());
    break_orbit_enclosure(f, bs, &om, q)[q as usize].add_scalar(&int(-p))
}

/// Bisects ω on the sign of `F^q(0) - p`, which is increasing in ω, valid
/// for every `b` in the enclosure of `b_cert`.
fn interval_omega(
    f: &ReducedPLForcing,
    b_cert: &CertifiedReal,
    p: i64,
    q: u32,
    tol: &Rational,
) -> Result<RationalInterval, PinchError> {
    let center = ratio(p, q);
    let mut lo = &center - rat(3, 2);
    let mut hi = &center + rat(3, 2);
    let mut b = b_cert.clone();
    let mut refinements = 0;
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / int(2);
        let g = displacement_enclosure(f, &b.enclosure(), &mid, p, q);
        if g.hi().is_negative() {
            lo = mid;
        } else if g.lo().is_positive() {
            hi = mid;
        } else {
            refinements += 1;
            let w = b.enclosure().width();
            if refinements > 8 || w.is_zero() {
                return Err(PinchError::Unresolved(format!("omega bracket for {p}/{q}")));
            }
            b = b.refined(&(w / int(1 << 20)));
        }
    }
    Ok(RationalInterval::new(lo, hi))
}

/// `ω_{p/q,j,w}`: exact for rational `b_{q,j,w}`, otherwise an enclosure of
/// width ≤ `tol`.
pub fn pinch_omega(p: i64, q: u32, j: u32, w: &Rational, tol: &Rational) -> Result<PinchOmega, PinchError> {
    let b = pinch_b(q, j, w)?;
    let f = ReducedPLForcing::two_break(w.clone()).map_err(|_| PinchError::NonPositiveWeight)?;
    omega_for(&f, &b, p, q, tol)
}

fn omega_for(
    f: &ReducedPLForcing,
    b: &CertifiedReal,
    p: i64,
    q: u32,
    tol: &Rational,
) -> Result<PinchOmega, PinchError> {
    match b.as_exact() {
        Some(bx) => Ok(PinchOmega::Exact {
            exact: exact_omega(f, bx, p, q)?,
        }),
        None => Ok(PinchOmega::Interval {
            interval: interval_omega(f, b, p, q, tol)?,
        }),
    }
}

/// Checks that `F^q = R_p`, exactly or with an interval certificate.
pub fn verify_pinch(
    b: &CertifiedReal,
    omega: &PinchOmega,
    f: &ReducedPLForcing,
    p: i64,
    q: u32,
) -> Result<Certificate, PinchError> {
    verify_pinch_bound(b, omega, f, p, q, DEFAULT_BOUND)
}

pub fn verify_pinch_bound(
    b: &CertifiedReal,
    omega: &PinchOmega,
    f: &ReducedPLForcing,
    p: i64,
    q: u32,
    bound: f64,
) -> Result<Certificate, PinchError> {
    if let (Some(bx), Some(ox)) = (b.as_exact(), omega.as_exact()) {
        let g = pl_from_family(bx, ox, f)?.power(q)?;
        if g.is_translation(p) {
            return Ok(Certificate::ExactTranslation);
        }
        let (x, d) = g.worst_displacement(p);
        return Err(PinchError::NotPinch {
            witness: fmt_rational(&x),
            displacement: fmt_rational(&d.abs()),
        });
    }
    let w = f.two_break_weight().ok_or(PinchError::NotTwoBreak)?;
    if let CertifiedReal::Isolated { poly, .. } = b {
        let j = poly
            .factors()
            .iter()
            .find(|(k, _)| *k == int(-1))
            .map_or(0, |(_, e)| *e);
        if *poly != pinch_polynomial(q, j, w) || check_j(q, j, w).is_err() {
            return Err(PinchError::WrongPolynomial(poly.to_string()));
        }
    }
    let bs = b.enclosure();
    let om = omega.enclosure();
    // periodic break somewhere in the box (intermediate value theorem)
    let below = displacement_enclosure(f, &bs, om.lo(), p, q);
    let above = displacement_enclosure(f, &bs, om.hi(), p, q);
    let periodic = !below.hi().is_positive() && !above.lo().is_negative();

    let (b_c, o_c) = (bs.mid(), om.mid());
    let g = pl_from_family(&b_c, &o_c, f)?.power(q)?;
    let (x, d) = g.worst_displacement(p);
    let one = Rational::one();
    let s_max = &one + bs.hi() * f.max_weight();
    let mut l_omega = Rational::zero();
    let mut pw = one.clone();
    for _ in 0..q {
        l_omega += &pw;
        pw *= &s_max;
    }
    let (lo, hi) = f.range();
    let phi_max = lo.abs().max(hi.abs());
    let slack = &l_omega * om.radius() + &l_omega * phi_max * bs.radius();
    let eps = d.abs() + &slack;
    let bound_r = crate::numeric::from_f64(bound).expect("finite bound");
    if d.abs() - &slack > bound_r {
        return Err(PinchError::NotPinch {
            witness: fmt_rational(&x),
            displacement: fmt_rational(&d.abs()),
        });
    }
    if eps > bound_r || !periodic {
        return Err(PinchError::Unresolved(format!(
            "sup bound {} (periodic break: {periodic})",
            crate::numeric::to_f64(&eps)
        )));
    }
    Ok(Certificate::IntervalCertified { bound })
}

/// `ω_{p/q,j,w}` and `b_{q,j,w}` with a certificate.
pub fn find_pinch(p: i64, q: u32, j: u32, w: &Rational, tol: &Rational) -> Result<PinchPoint, PinchError> {
    let b = pinch_b(q, j, w)?;
    let f = ReducedPLForcing::two_break(w.clone()).map_err(|_| PinchError::NonPositiveWeight)?;
    let omega = omega_for(&f, &b, p, q, tol)?;
    let certificate = verify_pinch(&b, &omega, &f, p, q)?;
    Ok(PinchPoint {
        p,
        q,
        j,
        b,
        omega,
        certificate,
    })
}

/// Every `(p/q, j)` with `p/q ∈ [0,1)`, `q ≤ q_max`, `1 ≤ j ≤ τ(q, w)`.
pub fn enumerate_pinches(w: &Rational, q_max: u32, tol: &Rational) -> Vec<Result<PinchPoint, PinchError>> {
    let tasks: Vec<(i64, u32, u32)> = fractions(q_max)
        .into_iter()
        .flat_map(|(p, q)| (1..=pinch_count(q, w)).map(move |j| (p, q, j)))
        .collect();
    tasks.par_iter().map(|&(p, q, j)| find_pinch(p, q, j, w, tol)).collect()
}

/// Masses `λ_0..λ_q` of `{x : γ(x) = j}`, where `γ` counts the visits of
/// `x, F(x), …, F^{q-1}(x)` to the contracting piece. Both census
/// equations are checked before returning.
pub fn itinerary_census(
    f: &ReducedPLForcing,
    b: &Rational,
    omega: &Rational,
    q: u32,
) -> Result<Vec<Rational>, PinchError> {
    let w = f.two_break_weight().ok_or(PinchError::NotTwoBreak)?;
    let map = pl_from_family(b, omega, f)?;
    let cells = map.itinerary_cells(q)?;
    let mut lambda = vec![Rational::zero(); q as usize + 1];
    let one = Rational::one();
    for (i, a) in cells.iter().enumerate() {
        let end = cells.get(i + 1).unwrap_or(&one);
        let mid = (a + end) / int(2);
        let gamma = crate::pl::Itinerary::of(&map, &mid, q).gamma;
        lambda[gamma] += end - a;
    }
    let total: Rational = lambda.iter().sum();
    let weighted: Rational = lambda
        .iter()
        .enumerate()
        .map(|(j, l)| pinch_polynomial(q, j as u32, w).eval(b) * l)
        .sum();
    if !total.is_one() || !weighted.is_one() {
        return Err(PinchError::CensusViolated);
    }
    Ok(lambda)
}

/// Combinatorics of the break-point orbits of a pinch, moved onto orbits
/// of the rigid rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub p: i64,
    pub q: u32,
    pub m: usize,
    #[serde(with = "crate::numeric::serde_rational_vec")]
    pub anchors: Vec<Rational>,
    #[serde(with = "crate::numeric::serde_rational_vec")]
    pub marked: Vec<Rational>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "crate::numeric::serde_rational_opt_vec"
    )]
    pub weights: Option<Vec<Rational>>,
}

impl Configuration {
    /// `m = 1`.
    pub fn is_cyclic(&self) -> bool {
        self.m == 1
    }

    /// One degree-`q` polynomial per interval between consecutive anchors.
    pub fn induced_polynomials(&self) -> Result<Vec<FactoredPolynomial>, PinchError> {
        let ws = self.weights.as_ref().ok_or(PinchError::Unweighted)?;
        let step = ratio(self.p, self.q);
        let last = rat(1, self.q as i64);
        let mut out = Vec::with_capacity(self.m);
        for i in 0..self.m {
            let end = self.anchors.get(i + 1).unwrap_or(&last);
            let mid = (&self.anchors[i] + end) / int(2);
            let factors: Vec<&Rational> = (0..self.q)
                .map(|j| {
                    let y = frac(&(&mid + &step * int(j as i64)));
                    let s = self.marked.partition_point(|x| *x <= y) - 1;
                    &ws[s]
                })
                .collect();
            out.push(FactoredPolynomial::from_linear_factors(factors)?);
        }
        Ok(out)
    }
}

/// Configuration of the orbits of `marked` (sorted, starting at 0) under a
/// map with `g^q = R_p`.
pub fn configuration_from_orbits(
    g: &PLMap,
    marked: &[Rational],
    weights: Option<&[Rational]>,
    p: i64,
    q: u32,
) -> Result<Configuration, PinchError> {
    if marked.first().is_none_or(|x| !x.is_zero()) || marked.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PlError::Invalid("marked points must start at 0 and increase").into());
    }
    let not_pinch = |x: &Rational, d: Rational| PinchError::NotPinch {
        witness: fmt_rational(x),
        displacement: fmt_rational(&d.abs()),
    };
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    for x in marked {
        let mut y = x.clone();
        for _ in 0..q {
            points.insert(frac(&y));
            y = g.eval(&y);
        }
        if y != x + int(p) {
            return Err(not_pinch(x, y - x - int(p)));
        }
    }
    let d = points.len();
    if !d.is_multiple_of(q as usize) {
        return Err(PinchError::NotExactPinch);
    }
    let m = d / q as usize;
    let mut orbit0 = Vec::with_capacity(q as usize);
    let mut y = g.eval(&Rational::zero());
    for _ in 1..q {
        orbit0.push(frac(&y));
        y = g.eval(&y);
    }
    let a = orbit0.into_iter().min().unwrap_or_else(Rational::one);
    let zs: Vec<Rational> = points.iter().filter(|z| **z < a).cloned().collect();
    if zs.len() != m {
        return Err(PinchError::NotExactPinch);
    }
    let mut address: BTreeMap<Rational, (usize, u32)> = BTreeMap::new();
    for (i, z) in zs.iter().enumerate() {
        let mut y = z.clone();
        for j in 0..q {
            address.insert(frac(&y), (i, j));
            y = g.eval(&y);
        }
    }
    let anchors: Vec<Rational> = (0..m).map(|i| rat(i as i64, (q as usize * m) as i64)).collect();
    let step = ratio(p, q);
    let breve = marked
        .iter()
        .map(|x| {
            let (i, j) = address.get(&frac(x)).ok_or(PinchError::NotExactPinch)?;
            Ok(frac(&(&anchors[*i] + &step * int(*j as i64))))
        })
        .collect::<Result<Vec<_>, PinchError>>()?;
    Ok(Configuration {
        p,
        q,
        m,
        anchors,
        marked: breve,
        weights: weights.map(|ws| ws.to_vec()),
    })
}

/// Weighted configuration of an exact pinch of the family.
pub fn extract_configuration(
    f: &ReducedPLForcing,
    b: &Rational,
    omega: &Rational,
    p: i64,
    q: u32,
) -> Result<Configuration, PinchError> {
    let g = pl_from_family(b, omega, f)?;
    let gq = g.power(q)?;
    if !gq.is_translation(p) {
        let (x, d) = gq.worst_displacement(p);
        return Err(PinchError::NotPinch {
            witness: fmt_rational(&x),
            displacement: fmt_rational(&d.abs()),
        });
    }
    configuration_from_orbits(&g, f.breakpoints(), Some(f.w()), p, q)
}

/// Configuration of a certified two-break pinch, exact or not.
///
/// Both breaks lie on one orbit; the orbit index linking the type-down
/// break 0 to the type-up break is the unique `t` whose enclosure of
/// `F^t(0)` contains it.
pub fn pinch_configuration(pinch: &PinchPoint, w: &Rational) -> Result<Configuration, PinchError> {
    let f = ReducedPLForcing::two_break(w.clone()).map_err(|_| PinchError::NonPositiveWeight)?;
    if let (Some(b), Some(o)) = (pinch.b.as_exact(), pinch.omega.as_exact()) {
        return extract_configuration(&f, b, o, pinch.p, pinch.q);
    }
    let orbit = break_orbit_enclosure(&f, &pinch.b.enclosure(), &pinch.omega.enclosure(), pinch.q);
    let up = &f.breakpoints()[1];
    let hits: Vec<usize> = (1..pinch.q as usize)
        .filter(|&t| {
            let e = &orbit[t];
            let n = (e.hi() - up).floor();
            e.contains(&(up + n))
        })
        .collect();
    if hits.len() != 1 {
        return Err(PinchError::Unresolved("orbit index of the type-up break".into()));
    }
    let x2 = frac(&(ratio(pinch.p, pinch.q) * int(hits[0] as i64)));
    Ok(Configuration {
        p: pinch.p,
        q: pinch.q,
        m: 1,
        anchors: vec![Rational::zero()],
        marked: vec![Rational::zero(), x2],
        weights: Some(f.w().to_vec()),
    })
}

/// Whether `p(y) = 1` at the certified value: exactly, or by a sign change
/// of `p - 1` across the enclosure (the root in `(0,1)` is unique).
pub fn shares_root(poly: &FactoredPolynomial, b: &CertifiedReal) -> bool {
    let one = Rational::one();
    match b.as_exact() {
        Some(x) => poly.eval(x) == one,
        None => {
            let e = b.enclosure();
            poly.is_plausible_shape().unwrap_or(false) && poly.eval(e.lo()) >= one && poly.eval(e.hi()) <= one
        }
    }
}

/// Sorted union of the orbits of the break points.
fn break_orbits(g: &PLMap, q: u32) -> Vec<Rational> {
    let mut pts = BTreeSet::new();
    for z in g.breakpoints() {
        let mut y = z;
        for _ in 0..q {
            pts.insert(frac(&y));
            y = g.eval(&y);
        }
    }
    pts.into_iter().collect()
}

/// PL homeomorphism `h` with `h∘g = R_{p/q}∘h`, sending the `a`-th point
/// of the break orbits to `a/d`.
pub fn build_conjugacy(g: &PLMap, p: i64, q: u32) -> Result<PLMap, PinchError> {
    let pts = break_orbits(g, q);
    let h = if pts.is_empty() {
        PLMap::identity()
    } else {
        let d = pts.len() as i64;
        let nodes: Vec<(Rational, Rational)> = pts
            .into_iter()
            .enumerate()
            .map(|(a, x)| (x, rat(a as i64, d)))
            .collect();
        PLMap::interpolate(&nodes)?
    };
    let lhs = h.compose(g)?;
    let rhs = PLMap::rotation(ratio(p, q)).compose(&h)?;
    if lhs != rhs {
        return Err(PinchError::NotExactPinch);
    }
    Ok(h)
}

/// Step function `η ≥ 0` with `∫η = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDensity {
    #[serde(with = "crate::numeric::serde_rational_vec")]
    pub breakpoints: Vec<Rational>,
    #[serde(with = "crate::numeric::serde_rational_vec")]
    pub values: Vec<Rational>,
}

impl StepDensity {
    pub fn integral(&self) -> Rational {
        let one = Rational::one();
        self.breakpoints
            .iter()
            .enumerate()
            .map(|(i, a)| (self.breakpoints.get(i + 1).unwrap_or(&one) - a) * &self.values[i])
            .sum()
    }

    pub fn distinct_values(&self) -> usize {
        self.values.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn eval(&self, x: &Rational) -> &Rational {
        let y = frac(x);
        &self.values[self.breakpoints.partition_point(|t| *t <= y) - 1]
    }
}

/// `η = h'`, checked to be `g`-invariant: `η(g(x))·g'(x) = η(x)` on every
/// cell where both sides are constant.
pub fn invariant_density(g: &PLMap, h: &PLMap) -> Result<StepDensity, PinchError> {
    let eta = StepDensity {
        breakpoints: h.nodes().to_vec(),
        values: h.slopes().to_vec(),
    };
    if eta.values.iter().any(|v| !v.is_positive()) || !eta.integral().is_one() {
        return Err(PinchError::NotExactPinch);
    }
    let cells = h.compose_cells(g)?;
    let one = Rational::one();
    for (i, a) in cells.iter().enumerate() {
        let mid = (a + cells.get(i + 1).unwrap_or(&one)) / int(2);
        if eta.eval(&g.eval(&mid)) * g.slope_ahead(&mid) != *eta.eval(&mid) {
            return Err(PinchError::NotExactPinch);
        }
    }
    Ok(eta)
}

/// The four equivalent descriptions of a pinch of `g`:
/// `g^q = R_p`; every break on a periodic orbit holding breaks of both
/// types; a conjugacy to `R_{p/q}` with at most `⌊qk/2⌋` breaks; an
/// invariant step density with at most `⌊qk/2⌋` values.
pub fn characterizations(g: &PLMap, p: i64, q: u32) -> [bool; 4] {
    let breaks = g.breakpoints();
    let cap = ((q as usize * breaks.len()) / 2).max(1);
    let a = g.power(q).is_ok_and(|m| m.is_translation(p));
    let b = breaks.iter().all(|z| {
        let o = g.break_orbit(z, q, p);
        o.periodic && o.types.contains(&BreakType::Up) && o.types.contains(&BreakType::Down)
    });
    let conj = build_conjugacy(g, p, q);
    let c = conj.as_ref().is_ok_and(|h| h.breakpoints().len() <= cap);
    let d = conj
        .as_ref()
        .ok()
        .and_then(|h| invariant_density(g, h).ok())
        .is_some_and(|eta| eta.distinct_values() <= cap);
    [a, b, c, d]
}

/// `h⁻¹∘R_{p/q}∘h`, a pinch for every homeomorphism `h`.
pub fn conjugated_rotation(h: &PLMap, p: i64, q: u32) -> Result<PLMap, PinchError> {
    let r = PLMap::rotation(ratio(p, q));
    Ok(h.inverse()?.compose(&r.compose(h)?)?)
}

/// A family member conjugate to `g` by a translation.
///
/// For a PL homeomorphism `g` with a slope below 1 on exactly one maximal
/// piece, returns `(b, ω, f, s)` such that `x ↦ g(x - s) + s` is
/// `x ↦ x + ω + b·φ_f(x)`.
pub fn family_form(g: &PLMap) -> Result<(Rational, Rational, ReducedPLForcing, Rational), PinchError> {
    let one = Rational::one();
    let breaks = g.breakpoints();
    if breaks.is_empty() {
        return Err(PinchError::Forcing(ForcingError::ConstantForcing));
    }
    let slopes: Vec<Rational> = breaks.iter().map(|x| g.slope_ahead(x).clone()).collect();
    let b = &one - slopes.iter().min().unwrap();
    let psi_slopes: Vec<Rational> = slopes.iter().map(|s| (s - &one) / &b).collect();
    let first = (g.eval(&breaks[0]) - &breaks[0]) / &b;
    let psi = GeneralPLForcing::new(breaks, psi_slopes, first)?;
    let (r, s, f) = reduce_general_pl(&psi)?;
    let omega = &b * r;
    Ok((b, omega, f, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::to_f64;
    use proptest::prelude::*;

    fn oracle_root(coeffs: &[f64]) -> f64 {
        // coefficients of a polynomial increasing from negative at 0 to positive at 1
        let eval = |y: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if eval(m) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        lo
    }

    #[test]
    fn counts() {
        assert_eq!(pinch_count(3, &rat(1, 1)), 1);
        assert_eq!(pinch_count(2, &rat(1, 1)), 0);
        assert_eq!(pinch_count(5, &rat(1, 1)), 2);
        assert_eq!(pinch_count(4, &rat(1, 1)), 1);
        assert_eq!(pinch_count(1, &rat(7, 1)), 0);
    }

    #[test]
    fn b_values() {
        let b3 = pinch_b(3, 1, &rat(1, 1)).unwrap();
        let e = b3.enclosure();
        let r = oracle_root(&[-1.0, 1.0, 1.0]);
        assert!(to_f64(e.lo()) <= r + 1e-15 && r - 1e-15 <= to_f64(e.hi()));
        let b4 = pinch_b(4, 1, &rat(1, 1)).unwrap();
        let r = oracle_root(&[-2.0, 0.0, 2.0, 1.0]);
        assert!((to_f64(&b4.enclosure().mid()) - r).abs() < 1e-14);
        assert_eq!(pinch_b(3, 1, &rat(4, 3)).unwrap(), CertifiedReal::exact(rat(3, 4)));
        assert!(matches!(pinch_b(2, 1, &rat(1, 1)), Err(PinchError::JOutOfRange { .. })));
    }

    #[test]
    fn exact_pinch_pipeline() {
        let w = rat(4, 3);
        let pp = find_pinch(1, 3, 1, &w, &rat(1, 1 << 50)).unwrap();
        assert_eq!(pp.certificate, Certificate::ExactTranslation);
        let om = pp.omega.as_exact().unwrap().clone();
        let f = ReducedPLForcing::two_break(w.clone()).unwrap();
        let g = pl_from_family(&rat(3, 4), &om, &f).unwrap();
        assert_eq!(g.power(3).unwrap(), PLMap::rotation(rat(1, 1)));
        let o = g.break_orbit(&rat(0, 1), 3, 1);
        assert!(o.periodic && o.types.contains(&BreakType::Up) && o.types.contains(&BreakType::Down));
        for xn in [1i64, 5, 11, 17] {
            let x = rat(xn, 19);
            if let Ok(d) = g.derivative_product(&x, 3) {
                assert_eq!(d, rat(1, 1));
            }
        }
        let c = extract_configuration(&f, &rat(3, 4), &om, 1, 3).unwrap();
        assert!(c.is_cyclic());
        assert_eq!(c.marked.len(), 2);
        let polys = c.induced_polynomials().unwrap();
        assert_eq!(polys, vec![pinch_polynomial(3, 1, &w)]);
        assert_eq!(polys[0].eval(&rat(3, 4)), rat(1, 1));
        let h = build_conjugacy(&g, 1, 3).unwrap();
        assert!(h.breakpoints().len() <= 3);
        let eta = invariant_density(&g, &h).unwrap();
        assert_eq!(eta.integral(), rat(1, 1));
        assert!(eta.distinct_values() <= 3);
        assert_eq!(characterizations(&g, 1, 3), [true; 4]);
    }

    #[test]
    fn interval_pinch() {
        let w = rat(1, 1);
        let pp = find_pinch(1, 3, 1, &w, &rat(1, 1 << 50)).unwrap();
        assert!(matches!(pp.certificate, Certificate::IntervalCertified { .. }));
        let c = pinch_configuration(&pp, &w).unwrap();
        assert!(c.is_cyclic());
        for poly in c.induced_polynomials().unwrap() {
            assert!(shares_root(&poly, &pp.b));
        }
        // left and right boundaries agree at the pinch
        let f = crate::forcing::Forcing::triangle(rat(1, 2)).unwrap();
        let b = pp.b.enclosure().mid();
        let tol = rat(1, 1 << 40);
        let l = crate::tongue_scan::left_boundary(&f, &b, 1, 3, &tol).unwrap();
        let r = crate::tongue_scan::right_boundary(&f, &b, 1, 3, &tol).unwrap();
        assert!((l.mid() - r.mid()).abs() < rat(1, 1 << 30));
        assert!(matches!(
            pinch_omega(1, 2, 1, &w, &tol),
            Err(PinchError::JOutOfRange { .. })
        ));
    }

    #[test]
    fn verify_rejects() {
        let f = ReducedPLForcing::two_break(rat(1, 1)).unwrap();
        let b = CertifiedReal::exact(rat(1, 2));
        for o in [rat(1, 3), rat(2, 5), rat(1, 2)] {
            let r = verify_pinch(&b, &PinchOmega::Exact { exact: o }, &f, 1, 3);
            assert!(matches!(r, Err(PinchError::NotPinch { .. })));
        }
        let r0 = verify_pinch(
            &CertifiedReal::exact(rat(0, 1)),
            &PinchOmega::Exact { exact: rat(1, 3) },
            &f,
            1,
            3,
        );
        assert_eq!(r0.unwrap(), Certificate::ExactTranslation);
    }

    #[test]
    fn census_examples() {
        let f = ReducedPLForcing::two_break(rat(1, 1)).unwrap();
        let l0 = itinerary_census(&f, &rat(0, 1), &rat(1, 7), 3).unwrap();
        assert_eq!(l0.iter().filter(|l| !l.is_zero()).count(), 1);
        let g = ReducedPLForcing::two_break(rat(4, 3)).unwrap();
        let pp = find_pinch(1, 3, 1, &rat(4, 3), &rat(1, 1 << 40)).unwrap();
        let l = itinerary_census(&g, &rat(3, 4), pp.omega.as_exact().unwrap(), 3).unwrap();
        assert_eq!(l, vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1)]);
        // generic ω: more than two classes can be occupied
        let l = itinerary_census(&f, &rat(1, 2), &rat(3, 10), 3).unwrap();
        assert!(l.iter().filter(|l| !l.is_zero()).count() > 2);
        // on the left boundary the type-down break is periodic: two adjacent classes
        let om = exact_omega(&f, &rat(1, 2), 1, 3).unwrap();
        let l = itinerary_census(&f, &rat(1, 2), &om, 3).unwrap();
        let nz: Vec<usize> = (0..4).filter(|&j| !l[j].is_zero()).collect();
        assert!(nz.len() <= 2);
        if nz.len() == 2 {
            assert_eq!(nz[1], nz[0] + 1);
        }
    }

    #[test]
    fn rotation_configuration_and_conjugacy() {
        let r = PLMap::rotation(rat(1, 3));
        let c = configuration_from_orbits(&r, &[rat(0, 1), rat(1, 3)], Some(&[rat(0, 1), rat(0, 1)]), 1, 3).unwrap();
        assert_eq!(c.marked, vec![rat(0, 1), rat(1, 3)]);
        assert_eq!(c.anchors, vec![rat(0, 1)]);
        assert!(c
            .induced_polynomials()
            .unwrap()
            .iter()
            .all(|p| p.degree() == 0 || p.factors().iter().all(|(k, _)| k.is_zero())));
        let ws = [rat(-1, 1), rat(2, 1), rat(1, 2)];
        let c2 = configuration_from_orbits(&r, &[rat(0, 1), rat(1, 6), rat(1, 3)], Some(&ws), 1, 3).unwrap();
        assert_eq!(c2.m, 2);
        let ps = c2.induced_polynomials().unwrap();
        assert_eq!(ps.len(), 2);
        assert_ne!(ps[0], ps[1]);
        assert_eq!(build_conjugacy(&r, 1, 3).unwrap(), PLMap::identity());
        let eta = invariant_density(&r, &PLMap::identity()).unwrap();
        assert_eq!(eta.values, vec![rat(1, 1)]);
        let f = ReducedPLForcing::two_break(rat(1, 1)).unwrap();
        let g = pl_from_family(&rat(1, 2), &rat(3, 10), &f).unwrap();
        assert!(matches!(build_conjugacy(&g, 1, 3), Err(PinchError::NotExactPinch)));
        assert!(extract_configuration(&f, &rat(1, 2), &rat(3, 10), 1, 3).is_err());
    }

    #[test]
    fn json_report() {
        let pp = find_pinch(1, 3, 1, &rat(4, 3), &rat(1, 1 << 40)).unwrap();
        let s = serde_json::to_string(&pp).unwrap();
        assert!(s.contains(r#""b":{"exact":"3/4"}"#), "{s}");
        assert!(s.contains(r#""certificate":"exact""#));
        let back: PinchPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pp);
        let pi = find_pinch(1, 3, 1, &rat(1, 1), &rat(1, 1 << 50)).unwrap();
        let s = serde_json::to_string(&pi).unwrap();
        assert!(s.contains(r#""certificate":"interval:1e-12""#), "{s}");
        assert!(s.contains(r#""poly":[["-1/1","1"],["1/1","2"]]"#), "{s}");
    }

    /// `q = 2j` pinches at any rational `b`: `w = 1/(1-b)` makes
    /// `(1-b)^j (1+wb)^j = 1`.
    fn even_pinch(bn: i64, bd: i64, j: u32) -> (ReducedPLForcing, Rational, u32) {
        let b = rat(bn, bd);
        let w = (Rational::one() - &b).recip();
        (ReducedPLForcing::two_break(w).unwrap(), b, 2 * j)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reverse_ordering(wn in 1i64..40, wd in 1i64..20, bn in 1i64..99, q in 2u32..9) {
            let w = rat(wn, wd);
            let b = rat(bn, 100);
            let vals: Vec<Rational> = (0..=q).map(|j| pinch_polynomial(q, j, &w).eval(&b)).collect();
            prop_assert!(vals.windows(2).all(|v| v[0] > v[1]));
        }

        #[test]
        fn census_equations(wn in 1i64..12, wd in 1i64..6, bn in 0i64..=16, on in -10i64..30, q in 1u32..6) {
            let f = ReducedPLForcing::two_break(rat(wn, wd)).unwrap();
            prop_assert!(itinerary_census(&f, &rat(bn, 16), &rat(on, 23), q).is_ok());
        }

        #[test]
        fn conjugated_rotations_are_family_pinches(
            xs in prop::collection::btree_set(1i64..37, 3),
            ys in prop::collection::btree_set(1i64..41, 3),
            p in 1i64..4,
            q in 2u32..5,
        ) {
            prop_assume!(crate::numeric::gcd_i64(p, q as i64) == 1 && p < q as i64);
            let mut pts = vec![(rat(0, 1), rat(0, 1))];
            pts.extend(xs.iter().zip(&ys).map(|(x, y)| (rat(*x, 37), rat(*y, 41))));
            let h = PLMap::interpolate(&pts).unwrap();
            let g = conjugated_rotation(&h, p, q).unwrap();
            prop_assert!(g.power(q).unwrap().is_translation(p));
            let Ok((b, omega, f, s)) = family_form(&g) else {
                // rotations and maps whose steepest descent is split
                return Ok(());
            };
            let fam = pl_from_family(&b, &omega, &f).unwrap();
            let shifted = PLMap::rotation(s.clone()).compose(&g.compose(&PLMap::rotation(-s)).unwrap()).unwrap();
            prop_assert_eq!(&fam, &shifted);
            prop_assert_eq!(characterizations(&fam, p, q), [true; 4]);
            let cap = (q as usize * f.k()) / 2;
            let hc = build_conjugacy(&fam, p, q).unwrap();
            prop_assert!(hc.breakpoints().len() <= cap.max(1));
            prop_assert_eq!(exact_omega(&f, &b, p, q).unwrap(), omega);
        }

        #[test]
        fn even_q_exact_pinches(bn in 1i64..9, j in 1u32..3, p_raw in 0i64..8) {
            let (f, b, q) = even_pinch(bn, 10, j);
            let w = f.two_break_weight().unwrap().clone();
            prop_assume!(j <= pinch_count(q, &w));
            let p = p_raw % q as i64;
            prop_assume!(crate::numeric::gcd_i64(p, q as i64) == 1);
            prop_assert_eq!(pinch_b(q, j, &w).unwrap(), CertifiedReal::exact(b.clone()));
            let om = pinch_omega(p, q, j, &w, &rat(1, 1 << 40)).unwrap();
            let cert = verify_pinch(&CertifiedReal::exact(b.clone()), &om, &f, p, q).unwrap();
            prop_assert_eq!(cert, Certificate::ExactTranslation);
            let g = pl_from_family(&b, om.as_exact().unwrap(), &f).unwrap();
            prop_assert_eq!(characterizations(&g, p, q), [true; 4]);
        }
    }
}
