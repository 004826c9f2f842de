//! Exact continued fractions with arbitrary-precision convergents.
//!
//! A number is described either by an exact rational (finite expansion),
//! by a quadratic surd `(m + √d)/q` (periodic expansion, extendable to any
//! depth), or by an explicit list of partial quotients.  Convergents obey
//! `p_n = a_n p_{n-1} + p_{n-2}` and bracket the value, which is the basis
//! of every interval computation here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::magnitude::RatInterval;
use crate::{Error, Result};

/// How partial quotients beyond the stored prefix are produced.
#[derive(Debug, Clone, PartialEq)]
enum Generator {
    /// Rational: the stored expansion is complete.
    Terminated,
    /// Quadratic surd `(m + √d) / q` in the canonical algorithm state
    /// reached after the stored prefix.
    Surd { m: BigInt, d: BigInt, q: BigInt },
    /// Explicit prefix only; no rule to extend.
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction {
    /// Partial quotients `a_0; a_1, a_2, …` (`a_i ≥ 1` for `i ≥ 1`).
    a: Vec<BigInt>,
    /// Convergent numerators/denominators aligned with `a`.
    p: Vec<BigInt>,
    q: Vec<BigInt>,
    generator: Generator,
}

fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

impl ContinuedFraction {
    fn push_quotient(&mut self, a: BigInt) {
        let n = self.a.len();
        assert!(n == 0 || a >= BigInt::one(), "a_i >= 1 for i >= 1");
        let (p, q) = match n {
            0 => (a.clone(), BigInt::one()),
            1 => (&a * &self.p[0] + 1, a.clone()),
            _ => (
                &a * &self.p[n - 1] + &self.p[n - 2],
                &a * &self.q[n - 1] + &self.q[n - 2],
            ),
        };
        self.a.push(a);
        self.p.push(p);
        self.q.push(q);
    }

    /// Complete expansion of an exact rational.
    pub fn from_rational(x: &BigRational) -> ContinuedFraction {
        let mut cf = ContinuedFraction {
            a: vec![],
            p: vec![],
            q: vec![],
            generator: Generator::Terminated,
        };
        let mut num = x.numer().clone();
        let mut den = x.denom().clone();
        loop {
            let a = num.div_floor(&den);
            let r = &num - &a * &den;
            cf.push_quotient(a);
            if r.is_zero() {
                break;
            }
            num = den;
            den = r;
        }
        cf
    }

    /// Explicit list of partial quotients (no extension rule).
    pub fn from_quotients(quotients: Vec<BigInt>) -> Result<ContinuedFraction> {
        if quotients.is_empty() {
            return Err(Error::domain("empty quotient list"));
        }
        let mut cf = ContinuedFraction {
            a: vec![],
            p: vec![],
            q: vec![],
            generator: Generator::Fixed,
        };
        for (i, a) in quotients.into_iter().enumerate() {
            if i > 0 && a < BigInt::one() {
                return Err(Error::domain("partial quotients must be >= 1"));
            }
            cf.push_quotient(a);
        }
        Ok(cf)
    }

    /// Quadratic surd `(m + √d) / q`, `d` not a perfect square and
    /// `q | (d - m²)` (the classical algorithm's integrality condition).
    pub fn quadratic_surd(m: i64, d: u64, q: i64, depth: usize) -> Result<ContinuedFraction> {
        let (m, d, q) = (BigInt::from(m), BigInt::from(d), BigInt::from(q));
        if q.is_zero() {
            return Err(Error::domain("surd denominator must be nonzero"));
        }
        let s = isqrt(&d);
        if &s * &s == d {
            return Err(Error::domain("d must not be a perfect square"));
        }
        if !((&d - &m * &m) % &q).is_zero() {
            return Err(Error::domain("surd needs q | (d - m^2)"));
        }
        let mut cf = ContinuedFraction {
            a: vec![],
            p: vec![],
            q: vec![],
            generator: Generator::Surd { m, d, q },
        };
        cf.extend_to(depth)?;
        Ok(cf)
    }

    /// The golden-type rotation number `(√5 - 1)/2 = [0; 1, 1, 1, …]`.
    pub fn golden(depth: usize) -> ContinuedFraction {
        ContinuedFraction::quadratic_surd(-1, 5, 2, depth).expect("valid surd")
    }

    pub fn sqrt2(depth: usize) -> ContinuedFraction {
        ContinuedFraction::quadratic_surd(0, 2, 1, depth).expect("valid surd")
    }

    /// Extend the expansion to at least `depth` quotients where a rule
    /// exists; errors if the prefix is fixed and too short.
    pub fn extend_to(&mut self, depth: usize) -> Result<()> {
        while self.a.len() < depth {
            match &mut self.generator {
                Generator::Terminated => break,
                Generator::Fixed => {
                    return Err(Error::CfDepth(format!(
                        "have {} quotients, need {}",
                        self.a.len(),
                        depth
                    )))
                }
                Generator::Surd { m, d, q } => {
                    // x = (m + √d)/q; a = floor(x); advance the state.
                    let s = isqrt(d);
                    // floor((m + √d)/q): adjust for sign of q.
                    let num = &*m + &s;
                    let a = num.div_floor(q);
                    let m1 = &a * &*q - &*m;
                    let q1 = (&*d - &m1 * &m1) / &*q;
                    *m = m1;
                    *q = q1;
                    self.push_quotient(a);
                }
            }
        }
        Ok(())
    }

    pub fn quotients(&self) -> &[BigInt] {
        &self.a
    }

    pub fn depth(&self) -> usize {
        self.a.len()
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self.generator, Generator::Terminated)
    }

    pub fn can_extend(&self) -> bool {
        matches!(self.generator, Generator::Surd { .. })
    }

    /// Convergent `p_n / q_n`.
    pub fn convergent(&self, n: usize) -> BigRational {
        BigRational::new(self.p[n].clone(), self.q[n].clone())
    }

    pub fn denominator(&self, n: usize) -> &BigInt {
        &self.q[n]
    }

    pub fn denominators(&self) -> &[BigInt] {
        &self.q
    }

    /// Exact value bracket from the deepest convergent pair (a point for
    /// terminated rationals).
    pub fn value_interval(&self) -> RatInterval {
        let n = self.a.len();
        if self.is_terminated() || n == 1 {
            let v = self.convergent(n - 1);
            if self.is_terminated() {
                return RatInterval::point(v);
            }
            // Single quotient, not terminated: value in (a0, a0 + 1).
            return RatInterval::new(v.clone(), v + BigRational::one());
        }
        let u = self.convergent(n - 2);
        let v = self.convergent(n - 1);
        if u <= v {
            RatInterval::new(u, v)
        } else {
            RatInterval::new(v, u)
        }
    }

    /// Index of `k` among the convergent denominators, if any.
    pub fn denominator_index(&self, k: &BigInt) -> Option<usize> {
        self.q.iter().position(|q| q == k)
    }

    /// Classical bracket `1/(q_{m+1}+q_m) < ‖q_m x‖ < 1/q_{m+1}`, valid for
    /// every continuation of a non-terminated expansion (a fixed prefix is
    /// read as the prefix of an infinite one).
    pub fn norm_of_denominator(&self, m: usize) -> Option<RatInterval> {
        if self.is_terminated() || m + 1 >= self.q.len() {
            return None;
        }
        let qn = &self.q[m + 1];
        Some(RatInterval::new(
            BigRational::new(BigInt::one(), qn + &self.q[m]),
            BigRational::new(BigInt::one(), qn.clone()),
        ))
    }

    /// Exact bracket of the circle distance `‖k·x‖`; `None` when the stored
    /// depth cannot separate the interval from a half-integer ambiguity.
    pub fn norm_times(&self, k: &BigInt) -> Option<RatInterval> {
        assert!(k.is_positive());
        let v = self.value_interval();
        let kq = BigRational::from_integer(k.clone());
        let lo = &kq * &v.lo;
        let hi = &kq * &v.hi;
        // Nearest integer to the midpoint.
        let mid = (&lo + &hi) / BigRational::from_integer(2.into());
        let m = (&mid + BigRational::new(BigInt::one(), 2.into()))
            .floor()
            .to_integer();
        let mr = BigRational::from_integer(m);
        let half = BigRational::new(BigInt::one(), 2.into());
        // The whole interval must stay within [m - 1/2, m + 1/2].
        if lo < &mr - &half || hi > &mr + &half {
            return None;
        }
        let (dl, dh) = (&lo - &mr, &hi - &mr);
        let (alo, ahi) = if dl.is_negative() && !dh.is_negative() {
            (BigRational::zero(), dl.abs().max(dh.abs()))
        } else {
            let a = dl.abs();
            let b = dh.abs();
            if a <= b { (a, b) } else { (b, a) }
        };
        Some(RatInterval::new(alo, ahi))
    }

    /// `‖k·x‖` refined (for extendable expansions) until the bracket
    /// excludes zero and has width below `k · 2^-margin_bits` of its lower
    /// endpoint, or the depth cap is hit.
    pub fn norm_times_refined(&mut self, k: &BigInt, max_depth: usize) -> Result<RatInterval> {
        loop {
            if let Some(iv) = self.norm_times(k) {
                let width = &iv.hi - &iv.lo;
                let tight_enough = iv.lo.is_positive()
                    && &width * BigRational::from_integer(16.into()) < iv.lo;
                if tight_enough || self.is_terminated() {
                    return Ok(iv);
                }
            }
            if !self.can_extend() || self.depth() >= max_depth {
                if let Some(iv) = self.norm_times(k) {
                    if self.is_terminated() || iv.lo.is_positive() {
                        return Ok(iv);
                    }
                }
                return Err(Error::CfDepth(format!(
                    "undecided at depth cap {max_depth}"
                )));
            }
            let d = self.depth() + 8;
            self.extend_to(d)?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn rational_three_quarters() {
        let cf = ContinuedFraction::from_rational(&BigRational::new(3.into(), 4.into()));
        assert_eq!(cf.quotients(), &[big(0), big(1), big(3)]);
        assert_eq!(cf.convergent(2), BigRational::new(3.into(), 4.into()));
    }

    #[test]
    fn sqrt2_expansion_and_convergents() {
        let cf = ContinuedFraction::sqrt2(6);
        assert_eq!(cf.quotients()[0], big(1));
        assert!(cf.quotients()[1..].iter().all(|a| *a == big(2)));
        // Classical convergents 1, 3/2, 7/5, 17/12.
        assert_eq!(cf.convergent(1), BigRational::new(3.into(), 2.into()));
        assert_eq!(cf.convergent(2), BigRational::new(7.into(), 5.into()));
        assert_eq!(cf.convergent(3), BigRational::new(17.into(), 12.into()));
    }

    #[test]
    fn golden_denominators_are_fibonacci() {
        let cf = ContinuedFraction::golden(12);
        assert!(cf.quotients()[1..].iter().all(|a| *a == big(1)));
        let mut fib = (1i64, 1i64);
        for n in 1..12 {
            assert_eq!(*cf.denominator(n), big(fib.1));
            fib = (fib.1, fib.0 + fib.1);
        }
    }

    #[test]
    fn convergent_law_exact() {
        // |q_n x - p_n| < 1/q_{n+1} with exact interval arithmetic.
        let mut cf = ContinuedFraction::sqrt2(20);
        for n in 1..18 {
            let q = cf.denominator(n).clone();
            let iv = cf.norm_times_refined(&q, 64).unwrap();
            let bound = BigRational::new(BigInt::one(), cf.denominator(n + 1).clone());
            assert!(iv.hi < bound, "n={n}");
            assert!(iv.lo.is_positive());
        }
    }

    #[test]
    fn best_approximation_exhaustive() {
        // For k < q_{n+1}: ‖k x‖ >= ‖q_n x‖ (golden, all q_{n+1} <= 1e4).
        let mut cf = ContinuedFraction::golden(40);
        let denoms: Vec<BigInt> = cf.denominators().to_vec();
        let mut n_star = 0;
        for k in 1..10_000u32 {
            let kb = BigInt::from(k);
            while n_star + 1 < denoms.len() && denoms[n_star + 1] <= kb {
                n_star += 1;
            }
            let best = cf.norm_times_refined(&denoms[n_star].clone(), 80).unwrap();
            let cur = cf.norm_times_refined(&kb, 80).unwrap();
            assert!(cur.hi >= best.lo, "k={k}");
        }
    }

    #[test]
    fn norm_times_rational_hits_zero() {
        let mut cf = ContinuedFraction::from_rational(&BigRational::new(1.into(), 3.into()));
        let iv = cf.norm_times_refined(&big(3), 8).unwrap();
        assert!(iv.lo.is_zero() && iv.hi.is_zero());
    }
}
