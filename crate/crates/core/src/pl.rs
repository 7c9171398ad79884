//! Exact lifts of degree-one piecewise-linear circle maps.
//!
//! A [`PLMap`] stores the lift `F: ℝ → ℝ` restricted to `[0, 1)` as a list of
//! nodes `0 = t_0 < t_1 < … < t_{m-1} < 1`, one slope per piece
//! `[t_i, t_{i+1})` (with `t_m = 1`), and the anchor `F(0)`. Outside `[0,1)`
//! the lift is extended by `F(x + 1) = F(x) + 1`.
//!
//! Maps are kept in a normal form where adjacent pieces always have
//! different slopes (node 0 is always present), so two maps are equal as
//! functions exactly when their representations are equal.

use crate::forcing::ReducedPLForcing;
use crate::numeric::{fmt_rational, frac, int, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use thiserror::Error;

/// Maximum number of pieces a composed map may have.
pub const MAX_PIECES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("coupling b = {0} outside [0, 1]")]
    CouplingOutOfRange(String),
    #[error("invalid PL map: {0}")]
    Invalid(&'static str),
    #[error("composition would exceed {MAX_PIECES} pieces")]
    TooManyPieces,
    #[error("orbit point {0} is a break point")]
    OrbitHitsBreakpoint(String),
    #[error("map is not invertible")]
    NotInvertible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BreakType {
    Up,
    Down,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct PLMap {
    nodes: Vec<Rational>,
    slopes: Vec<Rational>,
    /// `F(t_i)` for every node, plus `F(1)` as the last entry.
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    #[serde(with = "crate::numeric::serde_rational_vec")]
    breakpoints: Vec<Rational>,
    #[serde(with = "crate::numeric::serde_rational_vec")]
    slopes: Vec<Rational>,
    #[serde(with = "crate::numeric::serde_rational")]
    anchor: Rational,
}

impl TryFrom<RawMap> for PLMap {
    type Error = PlError;
    fn try_from(r: RawMap) -> Result<PLMap, PlError> {
        PLMap::new(r.breakpoints, r.slopes, r.anchor)
    }
}

impl From<PLMap> for RawMap {
    fn from(m: PLMap) -> RawMap {
        let anchor = m.anchor().clone();
        RawMap {
            breakpoints: m.nodes,
            slopes: m.slopes,
            anchor,
        }
    }
}

impl PLMap {
    /// `nodes[0]` must be 0; slopes must be nonnegative and rise by exactly 1
    /// over `[0, 1)`.
    pub fn new(nodes: Vec<Rational>, slopes: Vec<Rational>, anchor: Rational) -> Result<PLMap, PlError> {
        if nodes.is_empty() || nodes.len() != slopes.len() {
            return Err(PlError::Invalid("need one slope per node"));
        }
        if !nodes[0].is_zero() {
            return Err(PlError::Invalid("first node must be 0"));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) || nodes.last().unwrap() >= &Rational::one() {
            return Err(PlError::Invalid("nodes must increase inside [0, 1)"));
        }
        if slopes.iter().any(|s| s.is_negative()) {
            return Err(PlError::Invalid("negative slope"));
        }
        let m = PLMap::from_parts(nodes, slopes, anchor);
        if m.values.last().unwrap() != &(m.anchor() + Rational::one()) {
            return Err(PlError::Invalid("total rise is not 1"));
        }
        Ok(m.normalized())
    }

    fn from_parts(nodes: Vec<Rational>, slopes: Vec<Rational>, anchor: Rational) -> PLMap {
        let mut values = Vec::with_capacity(nodes.len() + 1);
        values.push(anchor);
        for i in 0..nodes.len() {
            let next = nodes.get(i + 1).cloned().unwrap_or_else(Rational::one);
            let v = &values[i] + &slopes[i] * (next - &nodes[i]);
            values.push(v);
        }
        PLMap { nodes, slopes, values }
    }

    pub fn rotation(a: Rational) -> PLMap {
        PLMap::from_parts(vec![Rational::zero()], vec![Rational::one()], a)
    }

    pub fn identity() -> PLMap {
        PLMap::rotation(Rational::zero())
    }

    /// Degree-one map through the given points (`x` increasing in `[0,1)`,
    /// `y` nondecreasing with `y_last ≤ y_0 + 1`), affine in between.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Result<PLMap, PlError> {
        if points.is_empty() {
            return Err(PlError::Invalid("no points"));
        }
        let one = Rational::one();
        if points.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 > w[1].1)
            || points[0].0.is_negative()
            || points.last().unwrap().0 >= one
            || points.last().unwrap().1 > &points[0].1 + &one
        {
            return Err(PlError::Invalid("points not monotone in [0,1)"));
        }
        let (x0, y0) = &points[0];
        let (xl, yl) = points.last().unwrap();
        let mut pts: Vec<(Rational, Rational)> = points.to_vec();
        if !x0.is_zero() {
            // wrap-around segment from (x_last - 1, y_last - 1) to (x0, y0)
            let xa = xl - &one;
            let ya = yl - &one;
            let y_at_0 = &ya + (y0 - &ya) * (-&xa) / (x0 - &xa);
            pts.insert(0, (Rational::zero(), y_at_0));
        }
        let mut nodes = Vec::with_capacity(pts.len());
        let mut slopes = Vec::with_capacity(pts.len());
        for i in 0..pts.len() {
            let (xn, yn) = if i + 1 < pts.len() {
                pts[i + 1].clone()
            } else {
                (&pts[0].0 + &one, &pts[0].1 + &one)
            };
            nodes.push(pts[i].0.clone());
            slopes.push((yn - &pts[i].1) / (xn - &pts[i].0));
        }
        PLMap::new(nodes, slopes, pts[0].1.clone())
    }

    fn normalized(self) -> PLMap {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut slopes: Vec<Rational> = Vec::with_capacity(self.nodes.len());
        for (t, s) in self.nodes.into_iter().zip(self.slopes) {
            if slopes.last() == Some(&s) {
                continue;
            }
            nodes.push(t);
            slopes.push(s);
        }
        PLMap::from_parts(nodes, slopes, self.values[0].clone())
    }

    /// Node positions; `nodes()[0] = 0` always.
    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn anchor(&self) -> &Rational {
        &self.values[0]
    }

    /// Right end of piece `i`.
    #[cfg(test)]
    fn node_end(&self, i: usize) -> Rational {
        self.nodes.get(i + 1).cloned().unwrap_or_else(Rational::one)
    }

    pub fn piece_count(&self) -> usize {
        self.nodes.len()
    }

    /// Break points: nodes where the slope actually changes.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let n = self.nodes.len();
        (0..n)
            .filter(|&i| {
                let prev = if i == 0 { n - 1 } else { i - 1 };
                self.slopes[i] != self.slopes[prev]
            })
            .map(|i| self.nodes[i].clone())
            .collect()
    }

    fn piece_of(&self, y: &Rational) -> usize {
        self.nodes.partition_point(|t| t <= y) - 1
    }

    /// Lift value `F(x)`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let n = x.floor();
        let y = x - &n;
        let i = self.piece_of(&y);
        &self.values[i] + &self.slopes[i] * (&y - &self.nodes[i]) + n
    }

    /// Slope of the piece containing `frac(x)` (the slope just ahead of `x`).
    pub fn slope_ahead(&self, x: &Rational) -> &Rational {
        &self.slopes[self.piece_of(&frac(x))]
    }

    /// Slope just behind `x`.
    pub fn slope_behind(&self, x: &Rational) -> &Rational {
        let y = frac(x);
        let i = self.piece_of(&y);
        if self.nodes[i] == y {
            let prev = if i == 0 { self.nodes.len() - 1 } else { i - 1 };
            &self.slopes[prev]
        } else {
            &self.slopes[i]
        }
    }

    pub fn break_type(&self, x: &Rational) -> BreakType {
        match self.slope_ahead(x).cmp(self.slope_behind(x)) {
            Ordering::Greater => BreakType::Up,
            Ordering::Less => BreakType::Down,
            Ordering::Equal => BreakType::None,
        }
    }

    pub fn is_breakpoint(&self, x: &Rational) -> bool {
        self.break_type(x) != BreakType::None
    }

    /// `self ∘ inner` without merging equal-slope pieces; the nodes are all
    /// nodes of `inner` together with every `inner`-preimage of a node of
    /// `self`.
    pub(crate) fn compose_raw(&self, inner: &PLMap) -> Result<PLMap, PlError> {
        let mut cuts: Vec<Rational> = inner.nodes.clone();
        for i in 0..inner.nodes.len() {
            let s = &inner.slopes[i];
            if s.is_zero() {
                continue;
            }
            let (va, vb) = (&inner.values[i], &inner.values[i + 1]);
            for u in &self.nodes {
                // u + n strictly inside (va, vb)
                let mut n = (va - u).floor() + Rational::one();
                while &(u + &n) < vb {
                    let target = u + &n;
                    cuts.push(&inner.nodes[i] + (target - va) / s);
                    n += Rational::one();
                }
            }
            if cuts.len() > MAX_PIECES {
                return Err(PlError::TooManyPieces);
            }
        }
        cuts.sort();
        cuts.dedup();
        let hs: Vec<Rational> = cuts.iter().map(|x| self.eval(&inner.eval(x))).collect();
        let one = Rational::one();
        let h_end = &hs[0] + &one;
        let slopes: Vec<Rational> = (0..cuts.len())
            .map(|i| {
                let (xn, hn) = if i + 1 < cuts.len() {
                    (&cuts[i + 1], &hs[i + 1])
                } else {
                    (&one, &h_end)
                };
                (hn - &hs[i]) / (xn - &cuts[i])
            })
            .collect();
        Ok(PLMap::from_parts(cuts, slopes, hs[0].clone()))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PLMap) -> Result<PLMap, PlError> {
        Ok(self.compose_raw(inner)?.normalized())
    }

    /// `q`-fold iterate by repeated composition.
    pub fn power(&self, q: u32) -> Result<PLMap, PlError> {
        assert!(q >= 1, "power needs q >= 1");
        let mut acc = self.clone();
        for _ in 1..q {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Nodes of the unmerged `q`-th iterate: the cells on which the whole
    /// itinerary `x, F(x), …, F^{q-1}(x)` stays in fixed pieces.
    pub(crate) fn itinerary_cells(&self, q: u32) -> Result<Vec<Rational>, PlError> {
        let mut acc = self.clone();
        for _ in 1..q {
            acc = self.compose_raw(&acc)?;
        }
        Ok(acc.nodes)
    }

    /// Cells on which both `inner` and `self ∘ inner` are affine.
    pub(crate) fn compose_cells(&self, inner: &PLMap) -> Result<Vec<Rational>, PlError> {
        Ok(self.compose_raw(inner)?.nodes)
    }

    /// Inverse of a strictly increasing map.
    pub fn inverse(&self) -> Result<PLMap, PlError> {
        if self.slopes.iter().any(|s| s.is_zero()) {
            return Err(PlError::NotInvertible);
        }
        let one = Rational::one();
        let mut pts: Vec<(Rational, Rational)> = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(x, y)| {
                let n = y.floor();
                (y - &n, x - &n)
            })
            .collect();
        pts.sort();
        // the images wrap around once, so the preimages rise by less than 1
        debug_assert!(pts.last().unwrap().1 < &pts[0].1 + &one);
        PLMap::interpolate(&pts)
    }

    /// Exact `(min, max)` of `F(x) - x - p` over `x ∈ [0, 1)`.
    pub fn displacement_range(&self, p: i64) -> (Rational, Rational) {
        let p = int(p);
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for (t, v) in self.nodes.iter().zip(&self.values) {
            let d = v - t - &p;
            if lo.as_ref().is_none_or(|l| d < *l) {
                lo = Some(d.clone());
            }
            if hi.as_ref().is_none_or(|h| d > *h) {
                hi = Some(d);
            }
        }
        (lo.unwrap(), hi.unwrap())
    }

    /// Node at which `|F(x) - x - p|` is largest, with that displacement.
    pub fn worst_displacement(&self, p: i64) -> (Rational, Rational) {
        let p = int(p);
        self.nodes
            .iter()
            .zip(&self.values)
            .map(|(t, v)| (t.clone(), v - t - &p))
            .max_by(|a, b| a.1.abs().cmp(&b.1.abs()))
            .unwrap()
    }

    /// `F = R_p` exactly.
    pub fn is_translation(&self, p: i64) -> bool {
        self.nodes.len() == 1 && self.slopes[0].is_one() && *self.anchor() == int(p)
    }

    pub fn break_orbit(&self, x: &Rational, q: u32, p: i64) -> BreakOrbit {
        let mut points = Vec::with_capacity(q as usize);
        let mut y = x.clone();
        for _ in 0..q {
            points.push(y.clone());
            y = self.eval(&y);
        }
        let types = points.iter().map(|z| self.break_type(z)).collect();
        BreakOrbit {
            periodic: y == x + int(p),
            points,
            types,
        }
    }

    /// `(F^q)'(x)` as the product of slopes along the orbit.
    pub fn derivative_product(&self, x: &Rational, q: u32) -> Result<Rational, PlError> {
        let mut y = x.clone();
        let mut d = Rational::one();
        for _ in 0..q {
            if self.is_breakpoint(&y) {
                return Err(PlError::OrbitHitsBreakpoint(fmt_rational(&y)));
            }
            d *= self.slope_ahead(&y);
            y = self.eval(&y);
        }
        Ok(d)
    }

    /// Piece indices visited by `x, F(x), …, F^{q-1}(x)`.
    pub fn itinerary(&self, x: &Rational, q: u32) -> Vec<usize> {
        let mut y = x.clone();
        let mut out = Vec::with_capacity(q as usize);
        for _ in 0..q {
            out.push(self.piece_of(&frac(&y)));
            y = self.eval(&y);
        }
        out
    }
}

/// Forward orbit of a point together with the break type at each point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakOrbit {
    /// Lifted orbit `x, F(x), …, F^{q-1}(x)`.
    pub points: Vec<Rational>,
    /// `F^q(x) = x + p`.
    pub periodic: bool,
    pub types: Vec<BreakType>,
}

/// Symbolic itinerary of a point for a two-break family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Itinerary {
    /// `-1` while in the contracting piece, `1` otherwise.
    pub symbols: Vec<i8>,
    /// Number of `-1` symbols.
    pub gamma: usize,
}

impl Itinerary {
    /// Symbols by slope: the region where `F' < 1` is `-1`.
    pub fn of(map: &PLMap, x: &Rational, q: u32) -> Itinerary {
        let mut y = x.clone();
        let mut symbols = Vec::with_capacity(q as usize);
        for _ in 0..q {
            symbols.push(if map.slope_ahead(&y) < &Rational::one() { -1 } else { 1 });
            y = map.eval(&y);
        }
        let gamma = symbols.iter().filter(|s| **s == -1).count();
        Itinerary { symbols, gamma }
    }
}

/// `x ↦ x + ω + b·φ_{w,ℓ}(x)` as an exact PL lift.
pub fn pl_from_family(b: &Rational, omega: &Rational, f: &ReducedPLForcing) -> Result<PLMap, PlError> {
    if b.is_negative() || b > &Rational::one() {
        return Err(PlError::CouplingOutOfRange(fmt_rational(b)));
    }
    let one = Rational::one();
    let slopes = f.w().iter().map(|w| &one + b * w).collect();
    PLMap::new(f.breakpoints().to_vec(), slopes, omega.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::TriangleForcing;
    use crate::numeric::rat;
    use proptest::prelude::*;

    fn triangle_map(b: Rational, omega: Rational) -> PLMap {
        let f = TriangleForcing::new(rat(1, 2)).unwrap().to_reduced();
        pl_from_family(&b, &omega, &f).unwrap()
    }

    #[test]
    fn family_examples() {
        let f = TriangleForcing::new(rat(1, 2)).unwrap().to_reduced();
        let r = pl_from_family(&rat(0, 1), &rat(1, 5), &f).unwrap();
        assert_eq!(r, PLMap::rotation(rat(1, 5)));
        let t = triangle_map(rat(1, 2), rat(0, 1));
        assert_eq!(t.nodes(), &[rat(0, 1), rat(1, 2)]);
        assert_eq!(t.slopes(), &[rat(1, 2), rat(3, 2)]);
        let g = ReducedPLForcing::new(vec![rat(-1, 1), rat(4, 3)], vec![rat(4, 7), rat(3, 7)]).unwrap();
        let m = pl_from_family(&rat(3, 4), &rat(0, 1), &g).unwrap();
        assert_eq!(m.slopes(), &[rat(1, 4), rat(2, 1)]);
        assert!(matches!(
            pl_from_family(&rat(5, 4), &rat(0, 1), &g),
            Err(PlError::CouplingOutOfRange(_))
        ));
        // b = 1 gives a flat piece but is still admitted
        let flat = pl_from_family(&rat(1, 1), &rat(0, 1), &g).unwrap();
        assert_eq!(flat.slopes()[0], rat(0, 1));
    }

    #[test]
    fn compose_examples() {
        let a = PLMap::rotation(rat(1, 3));
        let b = PLMap::rotation(rat(1, 5));
        assert_eq!(a.compose(&b).unwrap(), PLMap::rotation(rat(8, 15)));
        let t = triangle_map(rat(1, 2), rat(1, 7));
        assert_eq!(t.compose(&PLMap::identity()).unwrap(), t);
        assert_eq!(PLMap::identity().compose(&t).unwrap(), t);
        let tt = triangle_map(rat(1, 2), rat(0, 1)).power(2).unwrap();
        assert!(tt.piece_count() <= 4);
        let allowed = [rat(1, 4), rat(3, 4), rat(9, 4)];
        assert!(tt.slopes().iter().all(|s| allowed.contains(s)));
        assert_eq!(PLMap::rotation(rat(1, 3)).power(3).unwrap(), PLMap::rotation(rat(1, 1)));
    }

    #[test]
    fn displacement_examples() {
        let r = PLMap::rotation(rat(1, 3));
        assert_eq!(r.displacement_range(0), (rat(1, 3), rat(1, 3)));
        assert_eq!(r.power(3).unwrap().displacement_range(1), (rat(0, 1), rat(0, 1)));
        let t = triangle_map(rat(1, 2), rat(0, 1));
        let (lo, hi) = t.displacement_range(0);
        assert!(lo < rat(0, 1) && hi >= rat(0, 1));
        assert_eq!(lo, rat(-1, 4));
        assert_eq!(hi, rat(0, 1));
    }

    #[test]
    fn translation_examples() {
        assert!(PLMap::rotation(rat(1, 3)).power(3).unwrap().is_translation(1));
        assert!(!PLMap::rotation(rat(1, 3)).power(3).unwrap().is_translation(0));
        let t = triangle_map(rat(1, 2), rat(3, 10)).power(3).unwrap();
        assert!(!t.is_translation(1));
        assert!(t.slopes().iter().any(|s| !s.is_one()));
    }

    #[test]
    fn orbit_examples() {
        let r = PLMap::rotation(rat(1, 3));
        let o = r.break_orbit(&rat(0, 1), 3, 1);
        assert_eq!(o.points, vec![rat(0, 1), rat(1, 3), rat(2, 3)]);
        assert!(o.periodic);
        assert!(o.types.iter().all(|t| *t == BreakType::None));

        let t = triangle_map(rat(1, 2), rat(0, 1));
        let o = t.break_orbit(&rat(1, 2), 3, 1);
        assert!(!o.periodic);
        assert_eq!(o.types[0], BreakType::Up);
        assert_eq!(t.break_type(&rat(0, 1)), BreakType::Down);
    }

    #[test]
    fn derivative_examples() {
        let r = PLMap::rotation(rat(2, 7));
        assert_eq!(r.derivative_product(&rat(1, 9), 5).unwrap(), rat(1, 1));
        // itinerary (-1, 1, 1) for the triangle map at ω = 0.3
        let t = triangle_map(rat(1, 2), rat(3, 10));
        let x = rat(9, 20);
        let it = Itinerary::of(&t, &x, 3);
        assert_eq!(it.symbols, vec![-1, 1, 1]);
        assert_eq!(t.derivative_product(&x, 3).unwrap(), rat(9, 8));
        assert!(matches!(
            t.derivative_product(&rat(1, 2), 2),
            Err(PlError::OrbitHitsBreakpoint(_))
        ));
    }

    #[test]
    fn inverse_and_interpolate() {
        let t = triangle_map(rat(1, 3), rat(2, 9));
        let inv = t.inverse().unwrap();
        assert_eq!(inv.compose(&t).unwrap(), PLMap::identity());
        assert_eq!(t.compose(&inv).unwrap(), PLMap::identity());
        let flat = triangle_map(rat(1, 1), rat(0, 1));
        assert_eq!(flat.inverse(), Err(PlError::NotInvertible));
        let m = PLMap::interpolate(&[(rat(1, 4), rat(1, 2)), (rat(3, 4), rat(3, 4))]).unwrap();
        assert_eq!(m.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(m.eval(&rat(5, 4)), rat(3, 2));
    }

    #[test]
    fn json_round_trip() {
        let t = triangle_map(rat(1, 2), rat(1, 3));
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(
            s,
            r#"{"breakpoints":["0/1","1/2"],"slopes":["1/2","3/2"],"anchor":"1/3"}"#
        );
        let back: PLMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<PLMap>(r#"{"breakpoints":["0/1"],"slopes":["2/1"],"anchor":"0/1"}"#).is_err());
    }

    fn family_strategy() -> impl Strategy<Value = PLMap> {
        (1i64..8, 0i64..=16, -16i64..16).prop_map(|(wn, bn, on)| {
            let f = ReducedPLForcing::two_break(rat(wn, 3)).unwrap();
            pl_from_family(&rat(bn, 16), &rat(on, 17), &f).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn degree_one(m in family_strategy(), xn in -40i64..40) {
            let x = rat(xn, 13);
            prop_assert_eq!(m.eval(&(&x + rat(1, 1))), m.eval(&x) + rat(1, 1));
            let rise: Rational = (0..m.piece_count())
                .map(|i| &m.slopes()[i] * (m.node_end(i) - &m.nodes()[i]))
                .sum();
            prop_assert_eq!(rise, rat(1, 1));
        }

        #[test]
        fn power_is_iterated_composition(m in family_strategy(), q in 1u32..5) {
            let mut acc = m.clone();
            for _ in 1..q {
                acc = acc.compose(&m).unwrap();
            }
            prop_assert_eq!(m.power(q).unwrap(), acc);
            prop_assert!(m.power(q).unwrap().piece_count() <= 2 * q as usize);
        }

        #[test]
        fn translation_characterizations(m in family_strategy(), q in 1u32..4, p in -2i64..3) {
            let g = m.power(q).unwrap();
            let (lo, hi) = g.displacement_range(p);
            let single = g.piece_count() == 1 && g.slopes()[0].is_one();
            prop_assert_eq!(g.is_translation(p), lo.is_zero() && hi.is_zero());
            prop_assert_eq!(g.is_translation(p), single && g.anchor() == &int(p));
        }

        #[test]
        fn derivative_matches_power_slope(m in family_strategy(), q in 1u32..5, xn in 0i64..97) {
            let x = rat(xn, 97);
            if let Ok(d) = m.derivative_product(&x, q) {
                let g = m.power(q).unwrap();
                prop_assert_eq!(&d, g.slope_ahead(&x));
            }
        }
    }
}
