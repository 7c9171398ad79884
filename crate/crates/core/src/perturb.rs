//! Plausible index sets, the Jacobian of the plausible-root map, and small
//! perturbations of reduced forcings that separate plausible roots.

use crate::forcing::{validate_reduced, ReducedPLForcing, Violation};
use crate::numeric::{fmt_rational, gcd_i64, int, rat, FactoredPolynomial, NumericError, Rational, RationalInterval};
use crate::pinch::{exact_omega, PinchError};
use crate::pl::pl_from_family;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Largest number of multisets [`enumerate_plausible`] will visit.
pub const MAX_SETS: u64 = 1_000_000;
/// Width of root enclosures produced by [`enumerate_plausible`].
const ROOT_BITS: u32 = 64;
/// Width used when two enclosures overlap and need a second look.
const FINE_BITS: u32 = 128;
const DIRECTIONS: usize = 64;
const HALVINGS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerturbError {
    #[error("precondition failed: {0}")]
    Precondition(&'static str),
    #[error("{0} multisets exceed the enumeration guard")]
    TooManySets(u64),
    #[error("factor 1 + b·w[{index}] of {set} is not bounded away from 0")]
    DegenerateFactor { set: String, index: usize },
    #[error("k = 2: the constraint space has no free direction")]
    NoFreeDirection,
    #[error("w[2] = 0: l1/l2 is fixed by the weights")]
    RatioFixed,
    #[error("no separating perturbation found after {0} attempts")]
    BudgetExhausted(usize),
    #[error(transparent)]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Pinch(#[from] PinchError),
}

/// A multiset of 0-based weight indices, shown 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexMultiset {
    entries: Vec<(usize, u32)>,
}

impl IndexMultiset {
    pub fn new(pairs: Vec<(usize, u32)>) -> IndexMultiset {
        let mut entries: Vec<(usize, u32)> = Vec::new();
        let mut sorted: Vec<(usize, u32)> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        sorted.sort();
        for (j, e) in sorted {
            match entries.last_mut() {
                Some((lj, le)) if *lj == j => *le += e,
                _ => entries.push((j, e)),
            }
        }
        IndexMultiset { entries }
    }

    pub fn from_indices(idx: &[usize]) -> IndexMultiset {
        IndexMultiset::new(idx.iter().map(|j| (*j, 1)).collect())
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn size(&self) -> u32 {
        self.entries.iter().map(|(_, e)| e).sum()
    }

    pub fn multiplicity(&self, j: usize) -> u32 {
        self.entries.iter().find(|(i, _)| *i == j).map_or(0, |(_, e)| *e)
    }

    pub fn polynomial(&self, w: &[Rational]) -> Result<FactoredPolynomial, NumericError> {
        FactoredPolynomial::new(self.entries.iter().map(|(j, e)| (w[*j].clone(), *e)).collect())
    }

    fn mixed(&self, w: &[Rational]) -> bool {
        self.entries.iter().any(|(j, _)| w[*j].is_negative()) && self.entries.iter().any(|(j, _)| w[*j].is_positive())
    }

    /// Every multiset of size `q` over `0..n`, in lexicographic order.
    pub fn all(n: usize, q: u32) -> Vec<IndexMultiset> {
        fn rec(n: usize, start: usize, left: u32, cur: &mut Vec<usize>, out: &mut Vec<IndexMultiset>) {
            if left == 0 {
                out.push(IndexMultiset::from_indices(cur));
                return;
            }
            for j in start..n {
                cur.push(j);
                rec(n, j, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, 0, q, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for IndexMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .flat_map(|(j, e)| std::iter::repeat_n((j + 1).to_string(), *e as usize))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for IndexMultiset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlausibleSet {
    pub set: IndexMultiset,
    pub poly: FactoredPolynomial,
    /// Encloses the root of `G(·, w, J) = 1`, inside `[1/n, 1]`.
    pub root: RationalInterval,
    /// Encloses `p'` over `root`; strictly negative.
    pub alpha: RationalInterval,
}

/// `G(b, w, J) = Π_{j∈J} (1 + b·w_j)`.
pub fn g_eval(b: &Rational, w: &[Rational], set: &IndexMultiset) -> Rational {
    let one = Rational::one();
    set.entries().iter().fold(Rational::one(), |acc, (j, e)| {
        acc * num_traits::pow(&one + b * &w[*j], *e as usize)
    })
}

/// `C(n + q - 1, q)`, saturating.
fn multiset_count(n: usize, q: u32) -> u64 {
    let mut c: u128 = 1;
    for i in 0..q as u128 {
        c = c * (n as u128 + i) / (i + 1);
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

fn width_bits(bits: u32) -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::one() << bits)
}

/// The plausible set for `J`, if `G(·, w, J) = 1` has a root in `[1/n, 1]`.
fn plausible(w: &[Rational], set: IndexMultiset, n: u32) -> Result<Option<PlausibleSet>, PerturbError> {
    if !set.mixed(w) {
        return Ok(None);
    }
    let poly = set.polynomial(w)?;
    let one = Rational::one();
    let low = rat(1, n as i64);
    let root = if poly.is_plausible_shape()? {
        match poly.eval(&low).cmp(&one) {
            std::cmp::Ordering::Less => return Ok(None),
            std::cmp::Ordering::Equal => RationalInterval::point(low),
            std::cmp::Ordering::Greater => {
                let r = poly.unique_root(&width_bits(ROOT_BITS))?;
                let lo = if r.lo() < &low { low } else { r.lo().clone() };
                RationalInterval::new(lo, r.hi().clone())
            }
        }
    } else if poly.weighted_sum().is_positive() && poly.eval(&one).is_one() {
        RationalInterval::point(one)
    } else {
        return Ok(None);
    };
    let (root, alpha) = certify_alpha(&poly, root)?;
    Ok(Some(PlausibleSet { set, poly, root, alpha }))
}

/// Narrows `root` until the derivative enclosure is strictly negative.
fn certify_alpha(
    poly: &FactoredPolynomial,
    mut root: RationalInterval,
) -> Result<(RationalInterval, RationalInterval), PerturbError> {
    for bits in ROOT_BITS..=4 * ROOT_BITS {
        let alpha = poly.derivative_interval(&root);
        if alpha.hi().is_negative() {
            return Ok((root, alpha));
        }
        root = poly.refine_root(&root, &width_bits(bits + 1));
    }
    Err(NumericError::NotPlausible(poly.to_string()).into())
}

/// All `(1/n)`-plausible index multisets of size `q` for the weights `w`.
pub fn enumerate_plausible(w: &[Rational], q: u32, n: u32) -> Result<Vec<PlausibleSet>, PerturbError> {
    if w.is_empty() || w[0] != -Rational::one() {
        return Err(PerturbError::Precondition("w[1] must be -1"));
    }
    if !w.iter().any(|x| x.is_positive()) {
        return Err(PerturbError::Precondition("some weight must be positive"));
    }
    if n < 2 || q == 0 {
        return Err(PerturbError::Precondition("need n > 1 and q > 0"));
    }
    let count = multiset_count(w.len(), q);
    if count > MAX_SETS {
        return Err(PerturbError::TooManySets(count));
    }
    let mut out = Vec::new();
    for set in IndexMultiset::all(w.len(), q) {
        if let Some(p) = plausible(w, set, n)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// `A_ij = -b_i·e_ij / (α_i·(1 + b_i·w_j))`, zero when `j ∉ J_i`.
pub fn jacobian(w: &[Rational], sets: &[PlausibleSet]) -> Result<Vec<Vec<RationalInterval>>, PerturbError> {
    if sets.is_empty() {
        return Err(PerturbError::Precondition("no plausible sets"));
    }
    let one = Rational::one();
    let zero = RationalInterval::point(Rational::zero());
    sets.iter()
        .map(|s| {
            (0..w.len())
                .map(|j| {
                    let e = s.set.multiplicity(j);
                    if e == 0 {
                        return Ok(zero.clone());
                    }
                    let factor = s.root.scale(&w[j]).add_scalar(&one);
                    let den = s.alpha.mul(&factor);
                    let num = s.root.scale(&-int(e as i64));
                    num.div(&den).ok_or_else(|| PerturbError::DegenerateFactor {
                        set: s.set.to_string(),
                        index: j,
                    })
                })
                .collect()
        })
        .collect()
}

/// Whether every pair of plausible roots is certified distinct.
pub fn roots_distinct(sets: &[PlausibleSet]) -> bool {
    let fine = width_bits(FINE_BITS);
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if !a.root.intersects(&b.root) {
                continue;
            }
            if a.poly == b.poly {
                return false;
            }
            let ra = a.poly.refine_root(&a.root, &fine);
            let rb = b.poly.refine_root(&b.root, &fine);
            if ra.intersects(&rb) {
                return false;
            }
        }
    }
    true
}

/// Moves `w` within `ε` (keeping `ℓ`, `w₁` and `w·ℓ = 0`) until all
/// plausible roots for `(q, n)` are pairwise distinct.
pub fn separate_roots(
    w: &[Rational],
    ell: &[Rational],
    q: u32,
    n: u32,
    eps: &Rational,
    seed: u64,
) -> Result<(Vec<Rational>, Vec<Rational>), PerturbError> {
    validate_reduced(w, ell)?;
    let k = w.len();
    if k < 3 {
        return Err(PerturbError::NoFreeDirection);
    }
    if !eps.is_positive() {
        return Err(PerturbError::Precondition("epsilon must be positive"));
    }
    if roots_distinct(&enumerate_plausible(w, q, n)?) {
        return Ok((w.to_vec(), ell.to_vec()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..DIRECTIONS {
        let mut v = vec![Rational::zero(); k];
        while v[1..k - 1].iter().all(|x| x.is_zero()) {
            for x in v.iter_mut().take(k - 1).skip(1) {
                *x = int(rng.gen_range(-8..=8));
            }
        }
        let dot: Rational = (1..k - 1).map(|i| &v[i] * &ell[i]).sum();
        v[k - 1] = -dot / &ell[k - 1];
        let norm = v.iter().map(|x| x.abs()).max().unwrap();
        let mut t = eps / (int(2) * norm);
        for _ in 0..HALVINGS {
            let cand: Vec<Rational> = w.iter().zip(&v).map(|(a, b)| a + &t * b).collect();
            if validate_reduced(&cand, ell).is_ok() && roots_distinct(&enumerate_plausible(&cand, q, n)?) {
                return Ok((cand, ell.to_vec()));
            }
            t /= int(2);
        }
    }
    Err(PerturbError::BudgetExhausted(DIRECTIONS * HALVINGS))
}

/// A new `ℓ` within `ε` of `ell`, valid for the same `w`, with a different
/// ratio `ℓ₁/ℓ₂`.
pub fn perturb_length_ratio(w: &[Rational], ell: &[Rational], eps: &Rational) -> Result<Vec<Rational>, PerturbError> {
    validate_reduced(w, ell)?;
    let k = w.len();
    if k < 3 {
        return Err(PerturbError::NoFreeDirection);
    }
    if k == 3 && w[2].is_zero() {
        return Err(PerturbError::RatioFixed);
    }
    if !eps.is_positive() {
        return Err(PerturbError::Precondition("epsilon must be positive"));
    }
    let old_ratio = &ell[0] / &ell[1];
    let mut t = eps / int(4);
    for _ in 0..256 {
        for sign in [1, -1] {
            let mut cand = ell.to_vec();
            cand[0] = &ell[0] + &t * int(sign);
            let (a, b) = (k - 2, k - 1);
            let rest_len: Rational = cand[..a].iter().sum();
            let rest_dot: Rational = cand[..a].iter().zip(w).map(|(l, x)| l * x).sum();
            let s = Rational::one() - rest_len;
            let d = -rest_dot;
            cand[a] = (&d - &w[b] * &s) / (&w[a] - &w[b]);
            cand[b] = &s - &cand[a];
            let close = cand.iter().zip(ell).all(|(x, y)| (x - y).abs() < *eps);
            if close && validate_reduced(w, &cand).is_ok() && &cand[0] / &cand[1] != old_ratio {
                return Ok(cand);
            }
        }
        t /= int(2);
    }
    Err(PerturbError::BudgetExhausted(512))
}

/// A random valid reduced forcing with `k` pieces and small denominators.
pub fn random_reduced<R: Rng>(k: usize, rng: &mut R) -> ReducedPLForcing {
    assert!(k >= 2);
    loop {
        let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=24)).collect();
        let total: i64 = raw.iter().sum();
        let ell: Vec<Rational> = raw.iter().map(|r| rat(*r, total)).collect();
        let mut w = vec![-Rational::one()];
        for _ in 1..k - 1 {
            w.push(rat(rng.gen_range(-11..=36), 12));
        }
        let dot: Rational = w.iter().zip(&ell).map(|(a, b)| a * b).sum();
        w.push(-dot / &ell[k - 1]);
        if let Ok(f) = ReducedPLForcing::new(w, ell) {
            return f;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactPinch {
    pub p: i64,
    pub q: u32,
    #[serde(with = "crate::numeric::serde_rational")]
    pub b: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    pub omega: Rational,
}

/// Every pinch with rational `b ∈ (0, 1)` in the tongues `p/q`, `q ≤ q_max`.
///
/// At a pinch every orbit has derivative product 1, so `b` solves
/// `G(b, w, J) = 1` for some mixed multiset `J` of size `q`; the candidates
/// are the rational roots of those equations.
pub fn exact_pinch_scan(f: &ReducedPLForcing, q_max: u32) -> Result<Vec<ExactPinch>, PerturbError> {
    let w = f.w();
    let mut out = Vec::new();
    for q in 2..=q_max {
        let mut candidates = BTreeSet::new();
        for set in IndexMultiset::all(w.len(), q) {
            if !set.mixed(w) {
                continue;
            }
            let poly = set.polynomial(w)?;
            if poly.is_plausible_shape()? {
                if let Some(b) = poly.rational_root()? {
                    candidates.insert(b);
                }
            }
        }
        for b in &candidates {
            for p in 1..q as i64 {
                if gcd_i64(p, q as i64) != 1 {
                    continue;
                }
                let omega = exact_omega(f, b, p, q)?;
                let g = pl_from_family(b, &omega, f).map_err(PinchError::from)?;
                if g.power(q).map_err(PinchError::from)?.is_translation(p) {
                    out.push(ExactPinch {
                        p,
                        q,
                        b: b.clone(),
                        omega,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbStage {
    #[serde(with = "crate::numeric::serde_rational_vec")]
    pub w: Vec<Rational>,
    #[serde(rename = "l", with = "crate::numeric::serde_rational_vec")]
    pub ell: Vec<Rational>,
    pub distinct: bool,
    pub sets: Vec<PlausibleSet>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbReport {
    pub q: u32,
    pub n: u32,
    pub epsilon: String,
    pub seed: u64,
    pub before: PerturbStage,
    pub after: PerturbStage,
}

fn stage(w: Vec<Rational>, ell: Vec<Rational>, q: u32, n: u32) -> Result<PerturbStage, PerturbError> {
    let sets = enumerate_plausible(&w, q, n)?;
    Ok(PerturbStage {
        distinct: roots_distinct(&sets),
        w,
        ell,
        sets,
    })
}

/// Plausible sets before and after [`separate_roots`].
pub fn perturb_demo(
    f: &ReducedPLForcing,
    q: u32,
    n: u32,
    eps: &Rational,
    seed: u64,
) -> Result<PerturbReport, PerturbError> {
    let before = stage(f.w().to_vec(), f.ell().to_vec(), q, n)?;
    let (w2, l2) = separate_roots(f.w(), f.ell(), q, n, eps, seed)?;
    let after = stage(w2, l2, q, n)?;
    Ok(PerturbReport {
        q,
        n,
        epsilon: fmt_rational(eps),
        seed,
        before,
        after,
    })
}
