//! Outward-rounded floating intervals for the smooth forcing path.
//!
//! Every arithmetic result is widened by one ulp on each side. The
//! trigonometric enclosures add a fixed absolute pad on top of that, since
//! the platform `sin`/`cos` are not correctly rounded.

use super::rational::{to_f64, Rational};
use std::f64::consts::TAU;

/// Absolute pad applied to trigonometric endpoint values.
const TRIG_PAD: f64 = 8e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fi {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    x.next_down()
}

fn up(x: f64) -> f64 {
    x.next_up()
}

#[allow(clippy::should_implement_trait)]
impl Fi {
    pub fn new(lo: f64, hi: f64) -> Fi {
        debug_assert!(lo <= hi, "bad float interval [{lo}, {hi}]");
        Fi { lo, hi }
    }

    pub fn point(x: f64) -> Fi {
        Fi { lo: x, hi: x }
    }

    /// Encloses an exact rational.
    pub fn from_rational(r: &Rational) -> Fi {
        let x = to_f64(r);
        Fi::new(down(x), up(x))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn add(self, o: Fi) -> Fi {
        Fi::new(down(self.lo + o.lo), up(self.hi + o.hi))
    }

    pub fn sub(self, o: Fi) -> Fi {
        Fi::new(down(self.lo - o.hi), up(self.hi - o.lo))
    }

    pub fn add_f(self, c: f64) -> Fi {
        self.add(Fi::point(c))
    }

    pub fn mul(self, o: Fi) -> Fi {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Fi::new(down(lo), up(hi))
    }

    pub fn hull(self, o: Fi) -> Fi {
        Fi::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Encloses `sin(2πx)` for `x` in the interval.
    pub fn sin_turns(self) -> Fi {
        trig_turns(self, 0.25, 0.75, |t| (TAU * t).sin())
    }

    /// Encloses `cos(2πx)` for `x` in the interval.
    pub fn cos_turns(self) -> Fi {
        trig_turns(self, 0.0, 0.5, |t| (TAU * t).cos())
    }
}

/// `f` has period 1 with its maximum at `max_at` and minimum at `min_at`.
fn trig_turns(x: Fi, max_at: f64, min_at: f64, f: impl Fn(f64) -> f64) -> Fi {
    if x.hi - x.lo >= 1.0 {
        return Fi::new(-1.0, 1.0);
    }
    // argument error of 2π·x grows with |x|
    let pad = TRIG_PAD * (1.0 + x.lo.abs().max(x.hi.abs()));
    let a = f(x.lo);
    let b = f(x.hi);
    let mut lo = a.min(b) - pad;
    let mut hi = a.max(b) + pad;
    let hits = |c: f64| (x.lo - c - 1e-12).ceil() <= (x.hi - c + 1e-12).floor();
    if hits(max_at) {
        hi = 1.0;
    }
    if hits(min_at) {
        lo = -1.0;
    }
    Fi::new(lo.max(-1.0), hi.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_enclosure_contains_samples() {
        let cells = [(0.1, 0.2), (0.2, 0.3), (0.7, 0.8), (-0.3, -0.2), (2.24, 2.26)];
        for (a, b) in cells {
            let e = Fi::new(a, b).sin_turns();
            for i in 0..=100 {
                let t = a + (b - a) * i as f64 / 100.0;
                let v = (TAU * t).sin();
                assert!(e.lo <= v && v <= e.hi, "{t} {v} {e:?}");
            }
            let c = Fi::new(a, b).cos_turns();
            for i in 0..=100 {
                let t = a + (b - a) * i as f64 / 100.0;
                let v = (TAU * t).cos();
                assert!(c.lo <= v && v <= c.hi);
            }
        }
        let e = Fi::new(0.2, 0.3).sin_turns();
        assert_eq!(e.hi, 1.0);
    }

    #[test]
    fn rational_enclosure() {
        let r = crate::numeric::rat(1, 3);
        let e = Fi::from_rational(&r);
        assert!(e.lo < 1.0 / 3.0 + 1e-17 && e.hi > 1.0 / 3.0 - 1e-17);
        assert!(e.lo < e.hi);
    }
}
