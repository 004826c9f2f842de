//! Exact-rational interval arithmetic, certified bounds for `exp`, and a
//! log2-domain magnitude type.
//!
//! Liouville certificates compare `‖kα‖` against `e^{-ck}`.  For moderate
//! exponents both sides are bracketed by explicit rationals (`RatInterval`,
//! with a truncated Taylor series plus remainder bound for the
//! exponential).  Late construction stages produce quantities like
//! `e^{c·q}` with `q ~ 10^16` whose decimal expansion cannot be
//! materialized at all; those are carried as `Magnitude` values — exact
//! rational brackets on the base-2 logarithm — and every comparison is done
//! in the log2 domain.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

/// Precision (bits) intervals are outward-rounded to after each expensive
/// step, keeping numerator/denominator sizes bounded during powering.
const ROUND_BITS: u64 = 192;

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Round `x` down (resp. up) to a dyadic rational keeping `ROUND_BITS`
/// *significant* bits — sound outward rounding that preserves relative
/// precision even for values like `e^{-10^4}`.
fn sig_scale(x: &BigRational) -> i64 {
    // Exponent such that |x| * 2^scale has about ROUND_BITS bits.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    ROUND_BITS as i64 - (nb - db)
}

fn round_down(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let s = sig_scale(x);
    BigRational::new((x * pow2(s)).floor().to_integer(), BigInt::one()) * pow2(-s)
}

fn round_up(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let s = sig_scale(x);
    BigRational::new((x * pow2(s)).ceil().to_integer(), BigInt::one()) * pow2(-s)
}

impl RatInterval {
    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn mul(&self, rhs: &RatInterval) -> RatInterval {
        // General sign handling: take min/max over endpoint products.
        let cands = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        RatInterval { lo, hi }
    }

    fn rounded(&self) -> RatInterval {
        RatInterval {
            lo: round_down(&self.lo),
            hi: round_up(&self.hi),
        }
    }

    /// `self^n` for positive intervals, square-and-multiply with outward
    /// rounding each step.
    pub fn powi(&self, n: u64) -> RatInterval {
        assert!(self.lo.is_positive(), "powi needs a positive interval");
        let mut result = RatInterval::point(BigRational::one());
        let mut base = self.rounded();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base).rounded();
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).rounded();
            }
        }
        result
    }

    pub fn recip(&self) -> RatInterval {
        assert!(self.lo.is_positive() || self.hi.is_negative());
        RatInterval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    // Scale into f64 range via bit lengths before dividing.
    let n = x.numer();
    let d = x.denom();
    if n.is_zero() {
        return 0.0;
    }
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = (nb - db).clamp(-900, 900);
    let (sn, sd) = if shift >= 0 {
        (n.clone(), d.clone() << shift as usize)
    } else {
        (n.clone() << (-shift) as usize, d.clone())
    };
    let q = BigRational::new(sn, sd);
    // q is within 2x of +-1; approximate via integer part of q * 2^52.
    let scaled = (&q * pow2(52)).to_integer();
    let approx: f64 = match scaled.sign() {
        Sign::Minus => -bigint_to_f64_abs(&(-scaled)),
        _ => bigint_to_f64_abs(&scaled),
    };
    approx / 2f64.powi(52) * 2f64.powi(shift as i32)
}

fn bigint_to_f64_abs(x: &BigInt) -> f64 {
    let mut out = 0.0;
    for d in x.to_u64_digits().1.iter().rev() {
        out = out * 1.8446744073709552e19 + *d as f64;
    }
    out
}

/// Certified bracket of `e^x` for rational `x` of moderate size.
///
/// Argument reduction `e^x = (e^{x/2^s})^{2^s}` brings `|x| ≤ 1/2`, then a
/// truncated Taylor series with a geometric remainder bound gives exact
/// rational endpoints.
pub fn exp_interval(x: &BigRational) -> RatInterval {
    if x.is_negative() {
        return exp_interval(&(-x)).recip();
    }
    // Beyond this the result has too many bits to materialize; callers must
    // switch to `Magnitude::exp`.
    assert!(
        *x <= BigRational::from_integer(100_000.into()),
        "exp_interval argument too large; use Magnitude::exp"
    );
    // Choose s with x / 2^s <= 1/2.
    let mut s: u64 = 0;
    let half = BigRational::new(BigInt::one(), 2.into());
    let mut y = x.clone();
    while y > half {
        y = y / BigRational::from_integer(2.into());
        s += 1;
        assert!(s < 80, "exponent too large for rational exp");
    }
    // Taylor sum_{i<n} y^i/i! with remainder < 2 * y^n / n!.
    let n = 24usize;
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for i in 1..n {
        term = &term * &y / BigRational::from_integer(BigInt::from(i));
        sum = &sum + &term;
    }
    let rem = &term * &y / BigRational::from_integer(BigInt::from(n))
        * BigRational::from_integer(2.into());
    let core = RatInterval::new(sum.clone(), sum + rem);
    core.powi(1u64 << s)
}

/// Exact bracket `[lo, hi]` of `log2(x)` for positive rational `x`, with
/// `frac_bits` fractional bits of precision.
pub fn log2_bounds(x: &BigRational, frac_bits: u32) -> (BigRational, BigRational) {
    assert!(x.is_positive());
    // Integer part: e with 2^e <= x < 2^{e+1}.
    let mut e: i64 = (x.numer().bits() as i64) - (x.denom().bits() as i64);
    loop {
        let lower = pow2(e);
        if *x < lower {
            e -= 1;
            continue;
        }
        if *x >= pow2(e + 1) {
            e += 1;
            continue;
        }
        break;
    }
    // Fractional part by repeated squaring of y = x / 2^e in [1, 2).
    let mut y = RatInterval::point(x / pow2(e));
    let mut frac = BigRational::zero();
    let two = BigRational::from_integer(2.into());
    for bit in 1..=frac_bits {
        y = y.mul(&y).rounded();
        if y.lo >= two {
            y = RatInterval {
                lo: &y.lo / &two,
                hi: &y.hi / &two,
            };
            frac = frac + pow2(-(bit as i64));
        } else if y.hi >= two {
            // Endpoints straddle 2: stop refining, widen by one ulp.
            let lo = BigRational::from_integer(BigInt::from(e)) + &frac;
            let hi = lo.clone() + pow2(-(bit as i64 - 1));
            return (lo, hi);
        }
    }
    let lo = BigRational::from_integer(BigInt::from(e)) + &frac;
    let hi = lo.clone() + pow2(-(frac_bits as i64));
    (lo, hi)
}

/// Certified bracket of `log2(e)`: rationals `l < log2 e < h`.
pub fn log2_e_bounds() -> (BigRational, BigRational) {
    let e = exp_interval(&BigRational::one());
    let (lo, _) = log2_bounds(&e.lo, 48);
    let (_, hi) = log2_bounds(&e.hi, 48);
    (lo, hi)
}

/// A positive quantity known only through `value ∈ [2^lo, 2^hi]` with
/// exact rational log2 endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Magnitude {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Magnitude {
    pub fn from_log2(lo: BigRational, hi: BigRational) -> Magnitude {
        debug_assert!(lo <= hi);
        Magnitude { lo, hi }
    }

    pub fn from_rational(x: &BigRational) -> Magnitude {
        let (lo, hi) = log2_bounds(x, 40);
        Magnitude { lo, hi }
    }

    pub fn from_bigint(x: &BigInt) -> Magnitude {
        Magnitude::from_rational(&BigRational::from_integer(x.clone()))
    }

    /// `e^{x}` for rational `x` of any size, via `x · log2(e)`.
    pub fn exp(x: &BigRational) -> Magnitude {
        let (l, h) = log2_e_bounds();
        let (a, b) = (x * &l, x * &h);
        if x.is_negative() {
            Magnitude { lo: b, hi: a }
        } else {
            Magnitude { lo: a, hi: b }
        }
    }

    pub fn mul(&self, rhs: &Magnitude) -> Magnitude {
        Magnitude {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }

    pub fn recip(&self) -> Magnitude {
        Magnitude {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    /// `self + rhs` when `rhs` is provably far smaller: requires a gap of
    /// at least 40 binary orders, then `log2(1 + 2^{hi_r - lo_s}) < 2^{-38}`
    /// bounds the perturbation.
    pub fn add_much_smaller(&self, rhs: &Magnitude) -> Magnitude {
        let gap = &self.lo - &rhs.hi;
        assert!(
            gap >= BigRational::from_integer(40.into()),
            "add_much_smaller needs 40+ binary orders of separation"
        );
        Magnitude {
            lo: self.lo.clone(),
            hi: &self.hi + pow2(-38),
        }
    }

    /// Increment by at most 1 (for `ceil`): sound when the value is huge.
    pub fn ceil_of(self) -> Magnitude {
        // value >= 2^lo, so ceil(value) <= value + 1 <= value (1 + 2^{-lo}).
        assert!(self.lo >= BigRational::from_integer(40.into()));
        Magnitude {
            lo: self.lo,
            hi: self.hi + pow2(-38),
        }
    }

    /// `true` iff provably `self < rhs`; `false` iff provably `>=`;
    /// `None` when the brackets overlap.
    pub fn lt(&self, rhs: &Magnitude) -> Option<bool> {
        if self.hi < rhs.lo {
            Some(true)
        } else if self.lo >= rhs.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn log2_f64(&self) -> f64 {
        rational_to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }
}

/// A value `v ∈ (0, 1)` represented through `L = -log2 v > 0` at one of two
/// depths: `Level1` brackets `L` itself by exact rationals; `Level2`
/// brackets `log2 L` instead, for doubly-exponentially small values whose
/// `L` has more bits than can be materialized.
#[derive(Debug, Clone, PartialEq)]
pub enum NegLog {
    Level1 { lo: BigRational, hi: BigRational },
    Level2 { lo: BigRational, hi: BigRational },
}

impl NegLog {
    pub fn level1(lo: BigRational, hi: BigRational) -> NegLog {
        debug_assert!(lo.is_positive() && lo <= hi);
        NegLog::Level1 { lo, hi }
    }

    pub fn level2(lo: BigRational, hi: BigRational) -> NegLog {
        debug_assert!(lo <= hi);
        NegLog::Level2 { lo, hi }
    }

    /// From a magnitude bracket of a value `> 1`: the reciprocal's neg-log.
    pub fn recip_of(m: &Magnitude) -> NegLog {
        debug_assert!(m.lo.is_positive());
        NegLog::Level1 {
            lo: m.lo.clone(),
            hi: m.hi.clone(),
        }
    }

    /// Bracket of `log2 L` at whichever level; lifts Level1 via
    /// [`log2_bounds`].
    fn log_l(&self) -> (BigRational, BigRational) {
        match self {
            NegLog::Level1 { lo, hi } => {
                let (a, _) = log2_bounds(lo, 40);
                let (_, b) = log2_bounds(hi, 40);
                (a, b)
            }
            NegLog::Level2 { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    /// `true` iff provably `value(self) < value(other)` (i.e. `L` larger);
    /// `None` when brackets overlap.
    pub fn value_lt(&self, other: &NegLog) -> Option<bool> {
        if let (NegLog::Level1 { lo: a, hi: b }, NegLog::Level1 { lo: c, hi: d }) = (self, other)
        {
            return if a > d {
                Some(true)
            } else if b <= c {
                Some(false)
            } else {
                None
            };
        }
        let (a, b) = self.log_l();
        let (c, d) = other.log_l();
        if a > d {
            Some(true)
        } else if b <= c {
            Some(false)
        } else {
            None
        }
    }

    /// Human-readable rendering: `2^-L` or `2^-2^(log2 L)`.
    pub fn describe(&self) -> String {
        match self {
            NegLog::Level1 { lo, hi } => {
                format!("2^-[{:.6e}]", rational_to_f64(&((lo + hi) / BigRational::from_integer(2.into()))))
            }
            NegLog::Level2 { lo, hi } => {
                format!("2^-2^[{:.6e}]", rational_to_f64(&((lo + hi) / BigRational::from_integer(2.into()))))
            }
        }
    }

    /// `log2` of the value as f64, `-inf` when it underflows f64.
    pub fn log2_f64(&self) -> f64 {
        match self {
            NegLog::Level1 { lo, hi } => {
                -rational_to_f64(&((lo + hi) / BigRational::from_integer(2.into())))
            }
            NegLog::Level2 { lo, hi } => {
                let l = rational_to_f64(&((lo + hi) / BigRational::from_integer(2.into())));
                -(2f64.powf(l))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exp_one_brackets_e() {
        let e = exp_interval(&BigRational::one());
        let lo = rational_to_f64(&e.lo);
        let hi = rational_to_f64(&e.hi);
        assert!(lo <= std::f64::consts::E && std::f64::consts::E <= hi);
        assert!(hi - lo < 1e-12);
    }

    #[test]
    fn exp_negative_brackets() {
        let v = exp_interval(&rat(-34, 1));
        let mid = v.to_f64();
        let want = (-34.0f64).exp();
        assert!((mid - want).abs() / want < 1e-9, "mid={mid} want={want}");
        assert!(v.lo.is_positive());
    }

    #[test]
    fn log2_of_1024() {
        let (lo, hi) = log2_bounds(&rat(1024, 1), 20);
        assert!(lo <= rat(10, 1) && rat(10, 1) <= hi);
        assert!(rational_to_f64(&(&hi - &lo)) < 1e-5);
    }

    #[test]
    fn log2_e_value() {
        let (lo, hi) = log2_e_bounds();
        let want = std::f64::consts::LOG2_E;
        assert!(rational_to_f64(&lo) <= want && want <= rational_to_f64(&hi));
        assert!(rational_to_f64(&(&hi - &lo)) < 1e-10);
    }

    #[test]
    fn magnitude_exp_huge() {
        // e^{10^6}: log2 ≈ 1442695.04; no materialization involved.
        let m = Magnitude::exp(&rat(1_000_000, 1));
        let l = m.log2_f64();
        assert!((l - 1.4426950408889634e6).abs() < 1.0);
    }

    #[test]
    fn magnitude_compare() {
        let a = Magnitude::exp(&rat(-100, 1));
        let b = Magnitude::exp(&rat(-99, 1));
        assert_eq!(a.lt(&b), Some(true));
        assert_eq!(b.lt(&a), Some(false));
    }

    #[test]
    fn neglog_cross_level_compare() {
        // 2^-100 vs 2^-2^20: the latter is far smaller.
        let a = NegLog::level1(rat(100, 1), rat(100, 1));
        let b = NegLog::level2(rat(20, 1), rat(20, 1));
        assert_eq!(b.value_lt(&a), Some(true));
        assert_eq!(a.value_lt(&b), Some(false));
        // Same level comparisons.
        let c = NegLog::level1(rat(99, 1), rat(99, 1));
        assert_eq!(a.value_lt(&c), Some(true));
        assert_eq!(a.value_lt(&a), Some(false));
    }

    #[test]
    fn rational_to_f64_roundtrip() {
        for (n, d) in [(1i64, 3i64), (-7, 2), (355, 113), (1, 1_000_000_007)] {
            let x = rat(n, d);
            let f = rational_to_f64(&x);
            assert!((f - n as f64 / d as f64).abs() < 1e-12 * (n as f64 / d as f64).abs().max(1.0));
        }
    }
}
