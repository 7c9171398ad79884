//! The family `f_{b,ω}(x) = x + ω + b·φ(x)`: evaluation, rotation numbers and
//! mode-lock predicates.

use crate::forcing::{Forcing, SineForcing};
use crate::numeric::fint::Fi;
use crate::numeric::{fmt_rational, to_f64, Rational};
use crate::pl::{pl_from_family, PLMap, PlError};
use num_traits::{One, Signed};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Cells per unit of `q` in the initial smooth-path partition.
const INITIAL_CELLS: usize = 64;
/// Cell evaluations allowed per sign question on the smooth path.
const CELL_BUDGET: usize = 1 << 17;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircleMapError {
    #[error("coupling b = {0} outside [0, 1]: map is not order preserving")]
    NonMonotone(String),
    #[error("cannot certify mode-lock sign for {p}/{q}")]
    Unresolved { p: i64, q: u32 },
    #[error(transparent)]
    Pl(#[from] PlError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyPoint {
    pub b: Rational,
    /// Kept as a lift parameter: `ω` and `ω + 1` give lifts differing by 1.
    pub omega: Rational,
    pub forcing: Forcing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationEstimate {
    pub lo: f64,
    pub hi: f64,
    pub iterations: u64,
}

impl RotationEstimate {
    pub fn contains(&self, r: f64) -> bool {
        self.lo <= r && r <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeLock {
    Below,
    Locked,
    Above,
}

impl FamilyPoint {
    pub fn new(b: Rational, omega: Rational, forcing: Forcing) -> Result<FamilyPoint, CircleMapError> {
        if b.is_negative() || b > Rational::one() {
            return Err(CircleMapError::NonMonotone(fmt_rational(&b)));
        }
        Ok(FamilyPoint { b, omega, forcing })
    }

    pub fn lift_eval(&self, x: f64) -> f64 {
        x + to_f64(&self.omega) + to_f64(&self.b) * self.forcing.eval_f64(x)
    }

    /// Exact value for PL forcings.
    pub fn lift_eval_exact(&self, x: &Rational) -> Option<Rational> {
        let f = self.forcing.as_pl()?;
        Some(x + &self.omega + &self.b * f.eval(x))
    }

    /// The exact lift as a [`PLMap`] (PL forcings only).
    pub fn pl_map(&self) -> Option<PLMap> {
        let f = self.forcing.as_pl()?;
        Some(pl_from_family(&self.b, &self.omega, f).expect("b checked at construction"))
    }

    pub fn rotation_estimate(&self, n: u64, x0: f64) -> RotationEstimate {
        assert!(n >= 1);
        let mut x = x0;
        for _ in 0..n {
            x = self.lift_eval(x);
        }
        let d = x - x0;
        let nf = n as f64;
        RotationEstimate {
            lo: (d - 1.0) / nf,
            hi: (d + 1.0) / nf,
            iterations: n,
        }
    }

    /// Compares `ρ(f)` with `p/q` through the sign of `F^q(x) - x - p`.
    pub fn mode_lock_test(&self, p: i64, q: u32) -> Result<ModeLock, CircleMapError> {
        assert!(q >= 1);
        if let Some(m) = self.pl_map() {
            let (lo, hi) = m.power(q)?.displacement_range(p);
            return Ok(if hi.is_negative() {
                ModeLock::Below
            } else if lo.is_positive() {
                ModeLock::Above
            } else {
                ModeLock::Locked
            });
        }
        let d = SmoothDisplacement::new(self, p, q);
        let unresolved = || CircleMapError::Unresolved { p, q };
        if !d.sup_reaches(Side::Max).ok_or_else(unresolved)? {
            return Ok(ModeLock::Below);
        }
        if !d.sup_reaches(Side::Min).ok_or_else(unresolved)? {
            return Ok(ModeLock::Above);
        }
        Ok(ModeLock::Locked)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Max,
    Min,
}

/// Certified enclosures of `D(x) = F^q(x) - x - p` for the sine family.
struct SmoothDisplacement {
    b: Fi,
    omega: Fi,
    p: f64,
    q: u32,
}

struct Cell {
    key: f64,
    lo: f64,
    hi: f64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Cell) -> bool {
        self.key.total_cmp(&o.key) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Cell) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Cell) -> Ordering {
        self.key.total_cmp(&o.key)
    }
}

impl SmoothDisplacement {
    fn new(fp: &FamilyPoint, p: i64, q: u32) -> SmoothDisplacement {
        SmoothDisplacement {
            b: Fi::from_rational(&fp.b),
            omega: Fi::from_rational(&fp.omega),
            p: p as f64,
            q,
        }
    }

    fn step(&self, x: Fi) -> Fi {
        x.add(self.omega).add(self.b.mul(SineForcing::eval_interval(x)))
    }

    fn point(&self, x: f64) -> Fi {
        let mut y = Fi::point(x);
        for _ in 0..self.q {
            y = self.step(y);
        }
        y.sub(Fi::point(x)).add_f(-self.p)
    }

    /// Encloses `D` on `[a, c]`: the tighter of the monotone bound and the
    /// centred form.
    fn cell(&self, a: f64, c: f64) -> Fi {
        let mut ya = Fi::point(a);
        let mut yc = Fi::point(c);
        let mut dq = Fi::point(1.0);
        for _ in 0..self.q {
            let orbit = Fi::new(ya.lo, yc.hi);
            dq = dq.mul(Fi::point(1.0).add(self.b.mul(SineForcing::derivative_interval(orbit))));
            ya = self.step(ya);
            yc = self.step(yc);
        }
        let x = Fi::new(a, c);
        let mono = Fi::new(ya.lo, yc.hi).sub(x).add_f(-self.p);
        let m = 0.5 * (a + c);
        let r = (c - m).max(m - a);
        let centred = self.point(m).add(dq.add_f(-1.0).mul(Fi::new(-r, r)));
        let lo = mono.lo.max(centred.lo);
        let hi = mono.hi.min(centred.hi);
        if lo <= hi {
            Fi::new(lo, hi)
        } else {
            mono
        }
    }

    /// For `Max`: whether `max D ≥ 0`; for `Min`: whether `min D ≤ 0`.
    /// `None` when the budget runs out first.
    fn sup_reaches(&self, side: Side) -> Option<bool> {
        let sgn = if side == Side::Max { 1.0 } else { -1.0 };
        let n0 = INITIAL_CELLS * self.q as usize;
        let mut heap = BinaryHeap::with_capacity(n0);
        let push = |heap: &mut BinaryHeap<Cell>, a: f64, c: f64| -> Option<bool> {
            let mid = self.point(0.5 * (a + c));
            let plo = if sgn > 0.0 { mid.lo } else { -mid.hi };
            if plo >= 0.0 {
                return Some(true);
            }
            let e = self.cell(a, c);
            let top = if sgn > 0.0 { e.hi } else { -e.lo };
            if top >= 0.0 {
                heap.push(Cell { key: top, lo: a, hi: c });
            }
            None
        };
        for i in 0..n0 {
            let a = i as f64 / n0 as f64;
            let c = (i + 1) as f64 / n0 as f64;
            if push(&mut heap, a, c) == Some(true) {
                return Some(true);
            }
        }
        let mut evaluations = n0;
        while let Some(cell) = heap.pop() {
            let m = 0.5 * (cell.lo + cell.hi);
            if !(cell.lo < m && m < cell.hi) || evaluations >= CELL_BUDGET {
                return None;
            }
            evaluations += 2;
            if push(&mut heap, cell.lo, m) == Some(true) || push(&mut heap, m, cell.hi) == Some(true) {
                return Some(true);
            }
        }
        Some(false)
    }
}

/// `p/q` as an exact rational.
pub fn ratio(p: i64, q: u32) -> Rational {
    crate::numeric::rat(p, q as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use proptest::prelude::*;

    fn tri() -> Forcing {
        Forcing::triangle(rat(1, 2)).unwrap()
    }

    #[test]
    fn lift_examples() {
        let fp = FamilyPoint::new(rat(0, 1), rat(1, 3), Forcing::Sine).unwrap();
        assert!((fp.lift_eval(0.0) - 1.0 / 3.0).abs() < 1e-15);
        let t = FamilyPoint::new(rat(1, 2), rat(0, 1), tri()).unwrap();
        assert_eq!(
            t.lift_eval_exact(&rat(1, 4)).unwrap(),
            rat(1, 4) + rat(1, 2) * rat(-1, 4)
        );
        for x in [-1.3, 0.0, 0.2, 0.77] {
            for fp in [&fp, &t] {
                assert!((fp.lift_eval(x + 1.0) - fp.lift_eval(x) - 1.0).abs() < 1e-12);
            }
        }
        assert!(matches!(
            FamilyPoint::new(rat(3, 2), rat(0, 1), Forcing::Sine),
            Err(CircleMapError::NonMonotone(_))
        ));
    }

    #[test]
    fn rotation_examples() {
        let r = FamilyPoint::new(rat(0, 1), rat(2, 5), Forcing::Sine).unwrap();
        let e = r.rotation_estimate(100, 0.0);
        assert!(e.contains(0.4) && e.hi - e.lo <= 1.0 / 50.0 + 1e-15);
        let s2 = std::f64::consts::SQRT_2 - 1.0;
        let fp = FamilyPoint::new(rat(0, 1), crate::numeric::from_f64(s2).unwrap(), Forcing::Sine).unwrap();
        assert!(fp.rotation_estimate(10_000, 0.1).contains(s2));
        // the triangle wave has mean -1/4, so the 1/2 tongue is centred at 1/2 + b/4
        let t = FamilyPoint::new(rat(1, 2), rat(5, 8), tri()).unwrap();
        assert!(t.rotation_estimate(1000, 0.0).contains(0.5));
    }

    #[test]
    fn mode_lock_examples() {
        let r = FamilyPoint::new(rat(0, 1), rat(1, 3), tri()).unwrap();
        assert_eq!(r.mode_lock_test(1, 3).unwrap(), ModeLock::Locked);
        assert_eq!(r.mode_lock_test(1, 2).unwrap(), ModeLock::Below);
        let t = FamilyPoint::new(rat(1, 2), rat(0, 1), tri()).unwrap();
        assert_eq!(t.mode_lock_test(0, 1).unwrap(), ModeLock::Locked);
        let s = FamilyPoint::new(rat(1, 2), rat(0, 1), Forcing::Sine).unwrap();
        assert_eq!(s.mode_lock_test(0, 1).unwrap(), ModeLock::Locked);
        let s = FamilyPoint::new(rat(1, 2), rat(1, 5), Forcing::Sine).unwrap();
        assert_eq!(s.mode_lock_test(0, 1).unwrap(), ModeLock::Above);
        assert_eq!(s.mode_lock_test(1, 3).unwrap(), ModeLock::Below);
        let s = FamilyPoint::new(rat(1, 1), rat(1, 2), Forcing::Sine).unwrap();
        assert_eq!(s.mode_lock_test(1, 2).unwrap(), ModeLock::Locked);
    }

    fn verdict_rank(m: ModeLock) -> u8 {
        match m {
            ModeLock::Below => 0,
            ModeLock::Locked => 1,
            ModeLock::Above => 2,
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn monotone_in_omega(bn in 0i64..=8, o1 in -20i64..20, d in 1i64..10, q in 1u32..4, sine in any::<bool>()) {
            let f = if sine { Forcing::Sine } else { tri() };
            let p = 1i64.min(q as i64 - 1);
            let a = FamilyPoint::new(rat(bn, 8), rat(o1, 40), f.clone()).unwrap().mode_lock_test(p, q);
            let b = FamilyPoint::new(rat(bn, 8), rat(o1 + d, 40), f).unwrap().mode_lock_test(p, q);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(verdict_rank(a) <= verdict_rank(b));
            }
        }

        #[test]
        fn rotation_estimates_nest(bn in 0i64..=8, on in 0i64..40, n in 10u64..400) {
            let fp = FamilyPoint::new(rat(bn, 8), rat(on, 40), Forcing::Sine).unwrap();
            let a = fp.rotation_estimate(n, 0.3);
            let b = fp.rotation_estimate(2 * n, 0.3);
            prop_assert!(a.lo <= b.hi && b.lo <= a.hi);
        }
    }
}
