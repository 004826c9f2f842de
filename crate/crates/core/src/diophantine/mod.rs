//! Exact arithmetic for rotation vectors: torus distances, continued
//! fractions, exponentially-Liouville certificates, equidistribution counts
//! and rationality tests.

pub mod cf;
pub mod liouville;
pub mod magnitude;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use cf::ContinuedFraction;
pub use liouville::{
    construct_exp_liouville, exp_liouville_witnesses, ExpLiouvilleConstruction, GrowthSchedule,
    LiouvilleCertificate, StageMethod, StageReport,
};
pub use magnitude::{exp_interval, log2_bounds, rational_to_f64, Magnitude, NegLog, RatInterval};

use crate::{parallel, Error, Result};

/// One coordinate of a rotation vector: an exact rational or a continued
/// fraction handle (canonical representative in `[0, 1)`).
#[derive(Debug, Clone, PartialEq)]
pub enum TorusComponent {
    Rational(BigRational),
    Irrational(ContinuedFraction),
}

impl TorusComponent {
    pub fn rational(n: i64, d: i64) -> TorusComponent {
        let mut x = BigRational::new(n.into(), d.into());
        x -= x.floor();
        TorusComponent::Rational(x)
    }

    /// Exact bracket of `‖j · x‖` (circle distance of the multiple to 0).
    pub fn norm_times(&self, j: &BigInt) -> Result<RatInterval> {
        match self {
            TorusComponent::Rational(x) => {
                let v = BigRational::from_integer(j.clone()) * x;
                let frac = &v - v.floor();
                let half = BigRational::new(BigInt::one(), 2.into());
                let d = if frac > half {
                    BigRational::one() - frac
                } else {
                    frac
                };
                Ok(RatInterval::point(d))
            }
            TorusComponent::Irrational(cf) => {
                let mut cf = cf.clone();
                cf.norm_times_refined(j, cf.depth() + 96)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            TorusComponent::Rational(x) => rational_to_f64(x),
            TorusComponent::Irrational(cf) => cf.value_interval().to_f64(),
        }
    }
}

/// Rotation vector on the `k`-torus with exact components.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusVector {
    pub components: Vec<TorusComponent>,
}

impl TorusVector {
    pub fn circle(c: TorusComponent) -> TorusVector {
        TorusVector {
            components: vec![c],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `max_i ‖x_i‖` as an exact bracket.
    pub fn norm(&self) -> Result<RatInterval> {
        self.norm_times(&BigInt::one())
    }

    /// `max_i ‖j x_i‖` as an exact bracket.
    pub fn norm_times(&self, j: &BigInt) -> Result<RatInterval> {
        if self.components.is_empty() {
            return Err(Error::domain("empty torus vector"));
        }
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (i, c) in self.components.iter().enumerate() {
            let iv = c.norm_times(j)?;
            if i == 0 || iv.lo > lo {
                lo = iv.lo.clone();
            }
            if i == 0 || iv.hi > hi {
                hi = iv.hi.clone();
            }
        }
        Ok(RatInterval::new(lo, hi))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.to_f64()).collect()
    }
}

/// Expand a rational to its complete continued fraction, capped at `depth`.
pub fn cf_expand_rational(x: &BigRational, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::domain("depth must be >= 1"));
    }
    let cf = ContinuedFraction::from_rational(x);
    let _ = depth; // complete expansions are finite; depth is a cap, not a target
    Ok(cf)
}

/// `#{1 ≤ j ≤ N : max_i ‖j α_i‖ < eps} / N`, every term decided exactly.
///
/// For irrational components whose bracket straddles `eps` the expansion is
/// deepened on demand; with rational `eps` and irrational `α` the
/// comparison is always decidable at finite depth.
pub fn equidistribution_density(alpha: &TorusVector, eps: &BigRational, n: u64) -> Result<f64> {
    if !eps.is_positive() || *eps > BigRational::new(BigInt::one(), 2.into()) {
        return Err(Error::domain("eps must lie in (0, 1/2]"));
    }
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    // Components are cloned once and pre-deepened so the per-term loop can
    // run in parallel over an immutable vector.
    let mut comps = alpha.components.clone();
    for c in &mut comps {
        if let TorusComponent::Irrational(cf) = c {
            if cf.can_extend() {
                // Deep enough that bracket widths N/(q_{d-1} q_d) resolve
                // any comparison that is not razor-thin.
                while cf.depth() < 256
                    && *cf.denominator(cf.depth() - 1) < (BigInt::from(n) << 96)
                {
                    let d = cf.depth() + 16;
                    cf.extend_to(d)?;
                }
            }
        }
    }
    let hits = parallel::map_indexed(n as usize, |i| {
        let j = BigInt::from(i as u64 + 1);
        for c in &comps {
            let iv = match c {
                TorusComponent::Rational(_) => c.norm_times(&j)?,
                TorusComponent::Irrational(cf) => match cf.norm_times(&j) {
                    Some(iv) => iv,
                    None => {
                        return Err(Error::CfDepth(format!(
                            "undecided multiple j={j} at depth {}",
                            cf.depth()
                        )))
                    }
                },
            };
            if iv.hi < *eps {
                continue; // this component passes
            }
            if iv.lo >= *eps {
                return Ok(false);
            }
            return Err(Error::CfDepth(format!(
                "‖{j}α‖ bracket straddles eps; deepen the expansion"
            )));
        }
        Ok(true)
    });
    let mut count = 0u64;
    for h in hits {
        if h? {
            count += 1;
        }
    }
    Ok(count as f64 / n as f64)
}

/// Best rational approximation search: a `p/q` with `q ≤ q_max` within
/// `tol` of `x`, or `None`.  Candidates are the convergents of `x` and the
/// final semiconvergent, which realize all best approximations.
pub fn is_rational_within(
    x: &BigRational,
    q_max: u64,
    tol: &BigRational,
) -> Option<(BigInt, BigInt)> {
    assert!(q_max >= 1);
    let cf = ContinuedFraction::from_rational(x);
    let qmax = BigInt::from(q_max);
    let mut best: Option<(BigInt, BigInt)> = None;
    let mut check = |p: BigInt, q: BigInt| {
        if q.is_positive() && q <= qmax && (x - BigRational::new(p.clone(), q.clone())).abs() <= *tol
        {
            best = Some((p, q));
        }
    };
    let depth = cf.depth();
    for m in 0..depth {
        let c = cf.convergent(m);
        check(c.numer().clone(), c.denom().clone());
    }
    // Semiconvergents p = t*p_{m-1} + p_{m-2}, q = t*q_{m-1} + q_{m-2} with
    // the largest t keeping q <= q_max.
    for m in 2..depth {
        let p1 = cf.convergent(m - 1);
        let p2 = cf.convergent(m - 2);
        let q1 = p1.denom();
        let q2 = p2.denom();
        if *q1 > BigInt::zero() && q1 <= &qmax {
            let t = (&qmax - q2) / q1;
            if t.is_positive() {
                check(&t * p1.numer() + p2.numer(), &t * q1 + q2);
            }
        }
    }
    best
}

/// Convenience: `f64` value of a torus norm bracket midpoint.
pub fn torus_norm_f64(alpha: &TorusVector) -> Result<f64> {
    Ok(alpha.norm()?.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn torus_norm_examples() {
        let v = TorusVector::circle(TorusComponent::rational(3, 10));
        let iv = v.norm().unwrap();
        assert_eq!(iv.lo, rat(3, 10));
        let v = TorusVector::circle(TorusComponent::rational(9, 10));
        assert_eq!(v.norm().unwrap().lo, rat(1, 10));
        let v = TorusVector {
            components: vec![
                TorusComponent::rational(1, 4),
                TorusComponent::rational(3, 4),
            ],
        };
        assert_eq!(v.norm().unwrap().lo, rat(1, 4));
    }

    #[test]
    fn equidistribution_golden() {
        let alpha = TorusVector::circle(TorusComponent::Irrational(ContinuedFraction::golden(
            64,
        )));
        let d = equidistribution_density(&alpha, &rat(1, 10), 100_000).unwrap();
        assert!((d - 0.2).abs() < 0.01, "density {d}");
    }

    #[test]
    fn equidistribution_rational_third() {
        let alpha = TorusVector::circle(TorusComponent::rational(1, 3));
        let d = equidistribution_density(&alpha, &rat(1, 20), 999).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-2, "density {d}");
    }

    #[test]
    fn equidistribution_product_two_torus() {
        let alpha = TorusVector {
            components: vec![
                TorusComponent::Irrational(ContinuedFraction::golden(64)),
                TorusComponent::Irrational(ContinuedFraction::sqrt2(64)),
            ],
        };
        let d = equidistribution_density(&alpha, &rat(1, 10), 100_000).unwrap();
        assert!((d - 0.04).abs() < 0.01, "density {d}");
    }

    #[test]
    fn rational_detection() {
        let x = rat(333_334, 1_000_000); // 0.333334
        let hit = is_rational_within(&x, 10, &rat(1, 100_000)).unwrap();
        assert_eq!((hit.0.to_string(), hit.1.to_string()), ("1".into(), "3".into()));
        let hit = is_rational_within(&rat(1, 2), 10, &rat(0, 1)).unwrap();
        assert_eq!(hit.1, BigInt::from(2));
    }

    #[test]
    fn golden_is_not_rational_within() {
        // High-precision rational stand-in for the golden rotation number.
        let golden = ContinuedFraction::golden(64).convergent(60);
        assert!(is_rational_within(&golden, 1_000, &rat(1, 10_000_000_000)).is_none());
    }
}
