//! Tongue boundaries by bisection in ω, and (ω, b) sweeps.

use crate::circle_map::{ratio, CircleMapError, FamilyPoint, ModeLock};
use crate::forcing::Forcing;
use crate::numeric::{fmt_rational, gcd_i64, midpoint, rat, Rational, RationalInterval};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TongueError {
    #[error("boundary of {p}/{q} at b = {b} could not be certified")]
    Unresolved { p: i64, q: u32, b: String },
    #[error(transparent)]
    CircleMap(#[from] CircleMapError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TongueRecord {
    pub p: i64,
    pub q: u32,
    #[serde(with = "crate::numeric::serde_rational")]
    pub b: Rational,
    pub omega_left: RationalInterval,
    pub omega_right: RationalInterval,
    #[serde(with = "crate::numeric::serde_rational")]
    pub width_lower_bound: Rational,
}

impl TongueRecord {
    pub fn new(
        p: i64,
        q: u32,
        b: Rational,
        omega_left: RationalInterval,
        omega_right: RationalInterval,
    ) -> TongueRecord {
        let gap = omega_right.lo() - omega_left.hi();
        let width_lower_bound = if gap.is_positive() { gap } else { Rational::zero() };
        TongueRecord {
            p,
            q,
            b,
            omega_left,
            omega_right,
            width_lower_bound,
        }
    }

    pub fn width_upper_bound(&self) -> Rational {
        self.omega_right.hi() - self.omega_left.lo()
    }
}

/// Default boundary tolerance, `2^-40`.
pub fn default_tol() -> Rational {
    rat(1, 1 << 40)
}

/// `{i/steps : 1 ≤ i ≤ steps}`.
pub fn b_grid(steps: u32) -> Vec<Rational> {
    (1..=steps as i64).map(|i| rat(i, steps as i64)).collect()
}

/// Reduced fractions `p/q ∈ [0, 1)` with `q ≤ q_max`, ordered by `q` then `p`.
pub fn fractions(q_max: u32) -> Vec<(i64, u32)> {
    let mut out = Vec::new();
    for q in 1..=q_max {
        for p in 0..q as i64 {
            if gcd_i64(p, q as i64) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

fn classify(f: &Forcing, b: &Rational, omega: &Rational, p: i64, q: u32) -> Result<Option<ModeLock>, CircleMapError> {
    let fp = FamilyPoint::new(b.clone(), omega.clone(), f.clone())?;
    match fp.mode_lock_test(p, q) {
        Ok(m) => Ok(Some(m)),
        Err(CircleMapError::Unresolved { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Exact displacement extremum for PL forcings, used to detect an exact hit.
fn exact_extremum(f: &Forcing, b: &Rational, omega: &Rational, p: i64, q: u32, side: Boundary) -> Option<Rational> {
    let fp = FamilyPoint::new(b.clone(), omega.clone(), f.clone()).ok()?;
    let (lo, hi) = fp.pl_map()?.power(q).ok()?.displacement_range(p);
    Some(if side == Boundary::Left { hi } else { lo })
}

/// Certified enclosure (width ≤ `tol`) of the left or right boundary of the
/// `p/q` tongue at coupling `b`.
pub fn boundary(
    f: &Forcing,
    b: &Rational,
    p: i64,
    q: u32,
    tol: &Rational,
    side: Boundary,
) -> Result<RationalInterval, TongueError> {
    assert!(tol.is_positive());
    let unresolved = || TongueError::Unresolved {
        p,
        q,
        b: fmt_rational(b),
    };
    let center = ratio(p, q);
    // `past(ω)`: ω lies at or beyond the boundary, on the side away from
    // the window start.
    let past = |omega: &Rational| -> Result<Option<bool>, TongueError> {
        Ok(classify(f, b, omega, p, q)?.map(|m| match side {
            Boundary::Left => m != ModeLock::Below,
            Boundary::Right => m == ModeLock::Above,
        }))
    };
    let mut window = None;
    for half in [rat(1, 2), rat(3, 2)] {
        let lo = &center - &half;
        let hi = &center + &half;
        if past(&lo)? == Some(false) && past(&hi)? == Some(true) {
            window = Some((lo, hi));
            break;
        }
    }
    let (mut lo, mut hi) = window.ok_or_else(unresolved)?;
    let offsets = [rat(1, 2), rat(3, 8), rat(5, 8), rat(1, 4), rat(3, 4)];
    while &hi - &lo > *tol {
        let mut moved = false;
        for t in &offsets {
            let m = &lo + (&hi - &lo) * t;
            match past(&m)? {
                Some(true) => {
                    if exact_extremum(f, b, &m, p, q, side).is_some_and(|e| e.is_zero()) {
                        return Ok(RationalInterval::point(m));
                    }
                    hi = m;
                }
                Some(false) => lo = m,
                None => continue,
            }
            moved = true;
            break;
        }
        if !moved {
            return Err(unresolved());
        }
    }
    Ok(RationalInterval::new(lo, hi))
}

pub fn left_boundary(
    f: &Forcing,
    b: &Rational,
    p: i64,
    q: u32,
    tol: &Rational,
) -> Result<RationalInterval, TongueError> {
    boundary(f, b, p, q, tol, Boundary::Left)
}

pub fn right_boundary(
    f: &Forcing,
    b: &Rational,
    p: i64,
    q: u32,
    tol: &Rational,
) -> Result<RationalInterval, TongueError> {
    boundary(f, b, p, q, tol, Boundary::Right)
}

pub fn tongue_record(f: &Forcing, b: &Rational, p: i64, q: u32, tol: &Rational) -> Result<TongueRecord, TongueError> {
    if b.is_zero() {
        let c = RationalInterval::point(ratio(p, q));
        return Ok(TongueRecord::new(p, q, b.clone(), c.clone(), c));
    }
    let l = left_boundary(f, b, p, q, tol)?;
    let r = right_boundary(f, b, p, q, tol)?;
    Ok(TongueRecord::new(p, q, b.clone(), l, r))
}

/// All tongues `p/q ∈ [0,1)` with `q ≤ q_max` at every `b`, ordered by `q`,
/// `p`, then `b`. Failures are reported per record.
pub fn scan_tongues(
    f: &Forcing,
    q_max: u32,
    b_values: &[Rational],
    tol: &Rational,
) -> Vec<Result<TongueRecord, TongueError>> {
    assert!(q_max >= 1);
    let tasks: Vec<(i64, u32, &Rational)> = fractions(q_max)
        .into_iter()
        .flat_map(|(p, q)| b_values.iter().map(move |b| (p, q, b)))
        .collect();
    tasks
        .par_iter()
        .map(|(p, q, b)| tongue_record(f, b, *p, *q, tol))
        .collect()
}

/// `(p, q, b)` of records whose width upper bound is below `threshold`.
pub fn pinch_candidates(records: &[TongueRecord], threshold: &Rational) -> Vec<(i64, u32, Rational)> {
    records
        .iter()
        .filter(|r| r.width_upper_bound() < *threshold)
        .map(|r| (r.p, r.q, r.b.clone()))
        .collect()
}

/// Midpoint of a record's tongue, for plotting.
pub fn record_center(r: &TongueRecord) -> Rational {
    midpoint(&r.omega_left.mid(), &r.omega_right.mid())
}
