//! Seeded sampling domains and sampling-based expression equivalence.
//!
//! Identity checking throughout the engine is numeric: two expressions are
//! considered equal when they agree at `k` seeded-random points of an open
//! box, to a relative tolerance. All randomness flows through a ChaCha
//! stream keyed by the caller's seed, so every verdict is reproducible.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::expr::{EvalError, Expr, Point};

/// Open box: a finite open interval per coordinate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SamplingDomain {
    intervals: BTreeMap<String, (f64, f64)>,
}

/// Invalid interval passed to [`SamplingDomain::insert`].
#[derive(Debug, Clone, PartialEq)]
pub struct BadInterval {
    pub coord: String,
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Display for BadInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "interval for `{}` must be finite with lo < hi, got ({}, {})",
            self.coord, self.lo, self.hi
        )
    }
}

impl SamplingDomain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, coord: &str, lo: f64, hi: f64) -> Result<(), BadInterval> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(BadInterval {
                coord: coord.to_string(),
                lo,
                hi,
            });
        }
        self.intervals.insert(coord.to_string(), (lo, hi));
        Ok(())
    }

    pub fn get(&self, coord: &str) -> Option<(f64, f64)> {
        self.intervals.get(coord).copied()
    }

    pub fn coords(&self) -> impl Iterator<Item = &str> {
        self.intervals.keys().map(|k| k.as_str())
    }

    pub fn contains_coord(&self, coord: &str) -> bool {
        self.intervals.contains_key(coord)
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Union of two domains; `other` wins on shared coordinates.
    pub fn extended(&self, other: &SamplingDomain) -> SamplingDomain {
        let mut out = self.clone();
        for (k, (lo, hi)) in &other.intervals {
            out.intervals.insert(k.clone(), (*lo, *hi));
        }
        out
    }
}

fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits shifted into the open interval (0, 1)
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn draw(dom: &SamplingDomain, rng: &mut ChaCha8Rng) -> Point {
    dom.intervals
        .iter()
        .map(|(k, (lo, hi))| (k.as_str(), lo + (hi - lo) * unit_open(rng)))
        .collect()
}

/// `k` i.i.d. uniform points strictly inside the box, deterministic per seed.
pub fn sample_points(dom: &SamplingDomain, k: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| draw(dom, &mut rng)).collect()
}

/// How many fresh points to try when one hits a domain error.
pub const RESAMPLE_LIMIT: usize = 50;

/// Parameters for a sampled-equivalence check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivConfig {
    pub points: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig {
            points: 20,
            tol: 1e-9,
            seed: 0,
        }
    }
}

/// The sampler could not find an evaluable point within the retry bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Unsampleable {
    pub last_error: EvalError,
    pub last_point: Point,
}

impl fmt::Display for Unsampleable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no evaluable sample point after {RESAMPLE_LIMIT} resamples; last error: {}",
            self.last_error
        )
    }
}

/// Largest scale-free residual of `lhs - rhs` over the sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub max: f64,
    pub witness: Point,
}

impl Residual {
    pub fn zero() -> Self {
        Residual {
            max: 0.0,
            witness: Point::new(),
        }
    }

    pub fn merge(&mut self, other: Residual) {
        if other.max > self.max {
            *self = other;
        }
    }
}

fn eval_pair(lhs: &Expr, rhs: &Expr, p: &Point) -> Result<(f64, f64), EvalError> {
    let a = lhs.evaluate(p)?;
    let b = rhs.evaluate(p)?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(EvalError::Domain {
            expr: lhs.to_string(),
            reason: "non-finite value".to_string(),
        });
    }
    Ok((a, b))
}

/// |lhs - rhs| / (1 + max(|lhs|, |rhs|)), maximized over `cfg.points`
/// seeded sample points. Points hitting domain errors are resampled up to
/// [`RESAMPLE_LIMIT`] times before the check fails as unsampleable.
pub fn max_residual(
    lhs: &Expr,
    rhs: &Expr,
    dom: &SamplingDomain,
    cfg: &EquivConfig,
) -> Result<Residual, Unsampleable> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Residual::zero();
    for _ in 0..cfg.points.max(1) {
        let mut attempt = 0;
        loop {
            let p = draw(dom, &mut rng);
            match eval_pair(lhs, rhs, &p) {
                Ok((a, b)) => {
                    let r = (a - b).abs() / (1.0 + a.abs().max(b.abs()));
                    out.merge(Residual {
                        max: r,
                        witness: p,
                    });
                    break;
                }
                Err(e) => {
                    attempt += 1;
                    if attempt > RESAMPLE_LIMIT {
                        return Err(Unsampleable {
                            last_error: e,
                            last_point: p,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Sampled equivalence of two expressions over an open box.
pub fn equivalent(
    lhs: &Expr,
    rhs: &Expr,
    dom: &SamplingDomain,
    cfg: &EquivConfig,
) -> Result<bool, Unsampleable> {
    // Structural zero first; sampling is the arbiter otherwise.
    if (lhs.clone() - rhs.clone()).simplify().is_zero() {
        return Ok(true);
    }
    Ok(max_residual(lhs, rhs, dom, cfg)?.max <= cfg.tol)
}

/// Sampled check that an expression vanishes identically on the box.
pub fn vanishes(
    e: &Expr,
    dom: &SamplingDomain,
    cfg: &EquivConfig,
) -> Result<bool, Unsampleable> {
    equivalent(e, &Expr::zero(), dom, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(pairs: &[(&str, f64, f64)]) -> SamplingDomain {
        let mut d = SamplingDomain::new();
        for &(c, lo, hi) in pairs {
            d.insert(c, lo, hi).unwrap();
        }
        d
    }

    #[test]
    fn sample_points_reproducible_and_inside() {
        let d = dom(&[("x", -1.0, 1.0), ("y", 2.0, 3.0)]);
        let a = sample_points(&d, 5, 42);
        let b = sample_points(&d, 5, 42);
        assert_eq!(a, b);
        for p in &a {
            let x = p.get("x").unwrap();
            let y = p.get("y").unwrap();
            assert!(x > -1.0 && x < 1.0);
            assert!(y > 2.0 && y < 3.0);
        }
        let c = sample_points(&d, 1, 43);
        assert_ne!(a[0], c[0]);
    }

    #[test]
    fn pythagorean_identity() {
        let t = Expr::var("t");
        let lhs = t.sin().powi(2) + t.cos().powi(2);
        let d = dom(&[("t", -10.0, 10.0)]);
        assert!(equivalent(&lhs, &Expr::one(), &d, &EquivConfig::default()).unwrap());
    }

    #[test]
    fn detects_small_offset() {
        let x = Expr::var("x");
        let rhs = x.clone() + Expr::constant(1e-3);
        let d = dom(&[("x", -5.0, 5.0)]);
        assert!(!equivalent(&x, &rhs, &d, &EquivConfig::default()).unwrap());
    }

    #[test]
    fn binomial_expansion() {
        let (x, y) = (Expr::var("x"), Expr::var("y"));
        let lhs = (x.clone() + y.clone()).powi(2);
        let rhs = x.powi(2) + Expr::constant(2.0) * x.clone() * y.clone() + y.powi(2);
        let d = dom(&[("x", -5.0, 5.0), ("y", -5.0, 5.0)]);
        assert!(equivalent(&lhs, &rhs, &d, &EquivConfig::default()).unwrap());
    }

    #[test]
    fn unsampleable_domain_reported() {
        // log(x) on a strictly negative box can never be evaluated
        let e = Expr::var("x").log();
        let d = dom(&[("x", -2.0, -1.0)]);
        let err = max_residual(&e, &Expr::zero(), &d, &EquivConfig::default());
        assert!(err.is_err());
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let x = Expr::var("x");
        let lhs = x.sin() * x.exp();
        let d = dom(&[("x", 0.0, 2.0)]);
        let cfg = EquivConfig::default();
        let a = max_residual(&lhs, &Expr::zero(), &d, &cfg).unwrap();
        let b = max_residual(&lhs, &Expr::zero(), &d, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
