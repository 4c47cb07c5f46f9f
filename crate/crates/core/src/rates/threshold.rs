//! Level-set search on a nonincreasing tail curve `γ ↦ fₙ(γ)`.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::engine::{Functional, TailEvaluator};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bracket doublings attempted before giving up.
pub const MAX_DOUBLINGS: usize = 60;

/// Which side of the level counts as "above".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// Boundary of `{γ : f(γ) > target}`; equals `inf{γ : f(γ) ≤ target}`.
    Strict,
    /// Boundary of `{γ : f(γ) ≥ target}`; equals `sup{γ : f(γ) ≥ target}`.
    Inclusive,
}

/// Memoized evaluations of one functional, shared by every level searched
/// at the same blocklength.
pub struct CachedCurve<'a, T: Real> {
    eval: &'a TailEvaluator<T>,
    which: Functional,
    cache: RefCell<HashMap<u64, T>>,
}

impl<'a, T: Real> CachedCurve<'a, T> {
    pub fn new(eval: &'a TailEvaluator<T>, which: Functional) -> Self {
        Self {
            eval,
            which,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn at(&self, gamma: T) -> Result<T> {
        let key = gamma.as_f64().to_bits();
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(*v);
        }
        let v = self.eval.eval(gamma, self.which)?;
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    pub fn evaluations(&self) -> usize {
        self.cache.borrow().len()
    }

    /// Boundary `γ*` of the "above target" set, returned as the midpoint of a
    /// final bracket of width ≤ `tol`, so `|result − γ*| ≤ tol/2`.
    ///
    /// Steps follow the ITP method (interpolate, truncate, project), which
    /// never needs more than one evaluation beyond plain bisection and
    /// converges superlinearly where the curve is smooth.
    pub fn crossing(&self, target: T, level: Level, bracket: (T, T), tol: T) -> Result<T> {
        let above_value = |f: T| match level {
            Level::Strict => f > target,
            Level::Inclusive => f >= target,
        };
        let above = |g: T| -> Result<bool> { Ok(above_value(self.at(g)?)) };
        let (mut lo, mut hi) = bracket;
        let (lo0, hi0) = bracket;
        let mut width = hi - lo;
        let mut k = 0;
        while !above(lo)? {
            if k == MAX_DOUBLINGS {
                return Err(self.unbracketable(target, lo, hi0));
            }
            hi = lo;
            lo -= width;
            width += width;
            k += 1;
        }
        let mut width = hi0 - lo0;
        let mut k = 0;
        while above(hi)? {
            if k == MAX_DOUBLINGS {
                return Err(self.unbracketable(target, lo, hi));
            }
            lo = hi;
            hi += width;
            width += width;
            k += 1;
        }
        // earlier searches on this curve may already pin the boundary closer
        for (&bits, &f) in self.cache.borrow().iter() {
            let g = T::lit(f64::from_bits(bits));
            if g > lo && g < hi {
                if above_value(f) {
                    lo = g;
                } else {
                    hi = g;
                }
            }
        }

        let two = T::lit(2.0);
        let half_tol = tol / two;
        let (mut f_lo, mut f_hi) = (self.at(lo)? - target, self.at(hi)? - target);
        let kappa1 = T::lit(0.2) / (hi - lo);
        let n_half = if hi - lo > tol {
            ((hi - lo) / tol).log2().ceil().to_i32().unwrap_or(0).max(0)
        } else {
            0
        };
        let mut budget = n_half + 1;
        while hi - lo > tol {
            let mid = (lo + hi) / two;
            let r = (half_tol * two.powi(budget) - (hi - lo) / two).max(T::zero());
            let delta = kappa1 * (hi - lo) * (hi - lo);
            let denom = f_lo - f_hi;
            let x_f = if denom > T::zero() {
                (hi * f_lo - lo * f_hi) / denom
            } else {
                mid
            };
            let sigma = if mid >= x_f { T::one() } else { -T::one() };
            let x_t = if delta <= (mid - x_f).abs() { x_f + sigma * delta } else { mid };
            let mut x = if (x_t - mid).abs() <= r { x_t } else { mid - sigma * r };
            if !(x > lo && x < hi) {
                x = mid;
                if x <= lo || x >= hi {
                    break;
                }
            }
            let f = self.at(x)?;
            if above_value(f) {
                lo = x;
                f_lo = f - target;
            } else {
                hi = x;
                f_hi = f - target;
            }
            budget -= 1;
        }
        Ok((lo + hi) / two)
    }

    fn unbracketable(&self, target: T, gamma_lo: T, gamma_hi: T) -> Error {
        let f = |g: T| self.at(g).map(|v| v.as_f64()).unwrap_or(f64::NAN);
        Error::Unbracketable {
            target: target.as_f64(),
            low: f(gamma_hi),
            high: f(gamma_lo),
            gamma_lo: gamma_lo.as_f64(),
            gamma_hi: gamma_hi.as_f64(),
        }
    }
}
