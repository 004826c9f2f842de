//! Exponentially-Liouville certificates: witness scans and the explicit
//! doubly-exponential construction.
//!
//! A witness is an integer `k` with `0 < ‖kα‖ < e^{-ck}`, certified with
//! exact rational interval arithmetic.  The constructive direction builds
//! quotients `a_{n+1} = ceil(e^{c_n q_n})`; from stage 3 on these integers
//! have more bits than fit in memory, so late stages are certified
//! structurally (`ceil(x) ≥ x` and `q_{n+1} > a_{n+1}`) and reported
//! through exact base-2 logarithm brackets instead of materialized values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::cf::ContinuedFraction;
use super::magnitude::{exp_interval, rational_to_f64, Magnitude, NegLog, RatInterval};
use crate::{parallel, Error, Result};

/// Full exact scan is performed below this k; beyond it only convergent
/// denominators are candidates (best approximations occur at convergents).
pub const FULL_SCAN_BELOW: u64 = 1_000;

#[derive(Debug, Clone)]
pub struct WitnessEntry {
    pub k: BigInt,
    /// Exact bracket of `‖kα‖`.
    pub dist: RatInterval,
    /// Exact bracket of `e^{-ck}`.
    pub bound: RatInterval,
}

#[derive(Debug, Clone)]
pub struct LiouvilleCertificate {
    pub c: BigRational,
    pub witnesses: Vec<WitnessEntry>,
    /// Candidates the interval arithmetic could not decide at the depth cap.
    pub undecided: Vec<BigInt>,
    pub k_max: u64,
}

#[derive(Debug, Serialize)]
struct WitnessJson {
    k: String,
    dist_num: f64,
    dist_den_log2: f64,
    bound_log: f64,
}

#[derive(Debug, Serialize)]
struct CertificateJson {
    c: f64,
    witnesses: Vec<WitnessJson>,
    undecided: Vec<String>,
    k_max: u64,
}

impl LiouvilleCertificate {
    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// JSON rendering: distances as `dist_num · 2^{-dist_den_log2}` with
    /// mantissa in `[1, 2)`, bounds as natural logs `-c·k`.
    pub fn to_json(&self) -> serde_json::Value {
        let witnesses = self
            .witnesses
            .iter()
            .map(|w| {
                let m = Magnitude::from_rational(&w.dist.hi);
                let l2 = m.log2_f64();
                WitnessJson {
                    k: w.k.to_string(),
                    dist_num: 2f64.powf(l2 - l2.floor()),
                    dist_den_log2: -l2.floor(),
                    bound_log: -rational_to_f64(&(&self.c * BigRational::from_integer(w.k.clone()))),
                }
            })
            .collect();
        serde_json::to_value(CertificateJson {
            c: rational_to_f64(&self.c),
            witnesses,
            undecided: self.undecided.iter().map(|k| k.to_string()).collect(),
            k_max: self.k_max,
        })
        .expect("serializable")
    }

    /// Re-verify every witness independently: fresh distance brackets at
    /// doubled CF depth and a fresh exponential bracket.
    pub fn verify(&self, alpha: &ContinuedFraction) -> Result<bool> {
        let mut deep = alpha.clone();
        if deep.can_extend() {
            deep.extend_to(alpha.depth() * 2)?;
        }
        for w in &self.witnesses {
            let dist = match deep
                .denominator_index(&w.k)
                .and_then(|m| deep.norm_of_denominator(m))
            {
                Some(iv) => iv,
                None => deep.norm_times_refined(&w.k, deep.depth() + 64)?,
            };
            let kc = &self.c * BigRational::from_integer(w.k.clone());
            let bound = exp_interval(&(-kc));
            if !(dist.lo.is_positive() && dist.hi < bound.lo) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn decide_witness(
    alpha: &ContinuedFraction,
    k: &BigInt,
    c: &BigRational,
) -> Option<Option<WitnessEntry>> {
    // Convergent denominators get the classical two-sided bracket, which
    // also certifies strict positivity for fixed prefixes.
    let dist = match alpha
        .denominator_index(k)
        .and_then(|m| alpha.norm_of_denominator(m))
    {
        Some(iv) => iv,
        None => alpha.norm_times(k)?,
    };
    let kc = c * BigRational::from_integer(k.clone());
    let bound = exp_interval(&(-kc));
    if dist.hi < bound.lo {
        if dist.lo.is_positive() {
            return Some(Some(WitnessEntry {
                k: k.clone(),
                dist,
                bound,
            }));
        }
        if alpha.is_terminated() && dist.hi.is_zero() {
            // ‖kα‖ = 0 exactly: excluded by the strict inequality.
            return Some(None);
        }
        // Zero not excluded yet: undecided at this depth.
        return None;
    }
    if dist.lo >= bound.hi {
        return Some(None);
    }
    None
}

/// Scan `k ≤ k_max` (full scan below [`FULL_SCAN_BELOW`], convergent
/// denominators beyond) and certify every witness exactly.
pub fn exp_liouville_witnesses(
    alpha: &mut ContinuedFraction,
    c: &BigRational,
    k_max: u64,
) -> Result<LiouvilleCertificate> {
    if !c.is_positive() {
        return Err(Error::domain("decay parameter c must be positive"));
    }
    if alpha.is_terminated() {
        // Rational α: all distances are eventually exactly 0, excluded by
        // strictness; scan still runs to catch small-k accidental hits.
    } else if alpha.can_extend() {
        // Pre-extend so the parallel scan works on an immutable expansion:
        // brackets are decisive once q_{n+1} dwarfs k_max.
        let target = BigInt::from(k_max).pow(2) << 64;
        while *alpha.denominator(alpha.depth() - 1) < target && alpha.depth() < 4096 {
            let d = alpha.depth() + 16;
            alpha.extend_to(d)?;
        }
    }
    let mut candidates: Vec<BigInt> = (1..=k_max.min(FULL_SCAN_BELOW))
        .map(BigInt::from)
        .collect();
    for q in alpha.denominators() {
        if *q > BigInt::from(FULL_SCAN_BELOW) && *q <= BigInt::from(k_max) {
            candidates.push(q.clone());
        }
    }
    candidates.sort();
    candidates.dedup();
    let verdicts = parallel::map_indexed(candidates.len(), |i| {
        decide_witness(alpha, &candidates[i], c)
    });
    let mut witnesses = Vec::new();
    let mut undecided = Vec::new();
    for (k, verdict) in candidates.into_iter().zip(verdicts) {
        match verdict {
            Some(Some(w)) => witnesses.push(w),
            Some(None) => {}
            None => undecided.push(k),
        }
    }
    Ok(LiouvilleCertificate {
        c: c.clone(),
        witnesses,
        undecided,
        k_max,
    })
}

/// Stage growth schedules `c_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthSchedule {
    /// `c_n = n` — unbounded, proves membership in the exponentially
    /// Liouville class.
    Linear,
    /// Constant `c` — yields witnesses for every `c' < c` but is flagged as
    /// not proving membership (the class needs `c_n → ∞`).
    Constant(BigRational),
}

impl GrowthSchedule {
    pub fn c(&self, n: usize) -> BigRational {
        match self {
            GrowthSchedule::Linear => BigRational::from_integer(BigInt::from(n)),
            GrowthSchedule::Constant(c) => c.clone(),
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, GrowthSchedule::Linear)
    }

    pub fn validate(&self) -> Result<()> {
        if let GrowthSchedule::Constant(c) = self {
            if !c.is_positive() {
                return Err(Error::Schedule("constant schedule must be positive".into()));
            }
        }
        Ok(())
    }
}

/// How a stage inequality `1/q_{n+1} < e^{-c_n q_n}` was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageMethod {
    /// Materialized `q_{n+1}` compared against an exact rational bracket of
    /// the exponential.
    ExactRational,
    /// `a_{n+1} = ceil(e^{c_n q_n}) ≥ e^{c_n q_n}` and `q_{n+1} > a_{n+1}`
    /// hold by construction; magnitudes carry exact log2 brackets only.
    StructuralLog2,
}

#[derive(Debug, Clone)]
pub struct StageReport {
    pub n: usize,
    pub c_n: BigRational,
    /// Witness iterate `k = q_n`, when it is materializable.
    pub k: Option<BigInt>,
    /// Exact log2 bracket of `k` (also available when `k` is symbolic).
    pub k_log2: Magnitude,
    /// The distance `‖q_nα‖ ∈ (1/(q_{n+1}+q_n), 1/q_{n+1})`: certified
    /// upper/lower values at the appropriate log depth.
    pub dist_hi: NegLog,
    pub dist_lo: NegLog,
    /// `e^{-c_n q_n}` at the appropriate log depth.
    pub bound: NegLog,
    pub method: StageMethod,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct ExpLiouvilleConstruction {
    /// Materialized prefix of the expansion (quotients below the bit cap).
    pub cf: ContinuedFraction,
    pub stages: Vec<StageReport>,
    /// False for bounded schedules: witnesses exist but membership in the
    /// exponentially Liouville class is not proven.
    pub proves_membership: bool,
}

/// Quotients with more than this many bits stay symbolic.
pub const MATERIALIZE_CAP_BITS: u64 = 4096;

/// Exact `ceil(e^x)` for modest rational `x` (bracket width far below 1).
fn ceil_exp_exact(x: &BigRational) -> Result<BigInt> {
    let iv = exp_interval(x);
    let lo = iv.lo.ceil().to_integer();
    let hi = iv.hi.ceil().to_integer();
    if lo != hi {
        return Err(Error::domain(
            "exponential bracket too wide to determine the ceiling",
        ));
    }
    Ok(lo)
}

/// State of the denominator recursion once quotients stop fitting in
/// memory.
enum BuildState {
    /// Both `q_{n-1}` and `q_n` materialized.
    Mat { q_prev: BigInt, q_cur: BigInt },
    /// `q_n` known only through a log2 bracket; `q_{n-1}` still exact.
    Sym1 { q_prev: BigInt, q_cur: Magnitude },
    /// `q_n` known only through a log2(log2) bracket; no further stage can
    /// be certified.
    Sym2,
}

/// Lift a log2 bracket (rational endpoints) of a value to a bracket of
/// `log2(value)` seen as a `Magnitude` — i.e. bracket `log2` of the
/// endpoints themselves.
fn log_of_log(m: &Magnitude) -> Magnitude {
    let (lo, _) = super::magnitude::log2_bounds(&m.lo, 40);
    let (_, hi) = super::magnitude::log2_bounds(&m.hi, 40);
    Magnitude::from_log2(lo, hi)
}

/// Build `a_{n+1} = ceil(e^{c_n q_n})` for `stages` stages starting from
/// `[0; 2]`, certifying `‖q_nα‖ < e^{-c_n q_n}` per stage.  Late stages go
/// symbolic: the report then carries exact log2 (or log2 log2) brackets and
/// a structural certificate instead of materialized integers.
pub fn construct_exp_liouville(
    schedule: &GrowthSchedule,
    stages: usize,
) -> Result<ExpLiouvilleConstruction> {
    schedule.validate()?;
    if stages == 0 {
        return Err(Error::Schedule("need at least one stage".into()));
    }
    let (log2e_lo, log2e_hi) = super::magnitude::log2_e_bounds();
    let mut quotients: Vec<BigInt> = vec![BigInt::zero(), BigInt::from(2)];
    // Convergent denominators q_0 = 1, q_1 = 2 for [0; 2].
    let mut state = BuildState::Mat {
        q_prev: BigInt::one(),
        q_cur: BigInt::from(2),
    };
    let mut reports = Vec::new();
    for n in 1..=stages {
        let c_n = schedule.c(n);
        state = match state {
            BuildState::Mat { q_prev, q_cur } => {
                let k = q_cur.clone();
                let exponent = &c_n * BigRational::from_integer(k.clone());
                let bound_l = &exponent * &log2e_lo;
                let bound_h = &exponent * &log2e_hi;
                let bound = NegLog::level1(bound_l.clone(), bound_h.clone());
                if bound_h <= BigRational::from_integer(MATERIALIZE_CAP_BITS.into()) {
                    // Fully exact stage.
                    let a_next = ceil_exp_exact(&exponent)?;
                    let q_next = &a_next * &q_cur + &q_prev;
                    // q_{n+1} > e^{c_n q_n} ⟺ 1/q_{n+1} < e^{-c_n q_n}.
                    let holds =
                        BigRational::from_integer(q_next.clone()) > exp_interval(&exponent).hi;
                    reports.push(StageReport {
                        n,
                        c_n,
                        k: Some(k.clone()),
                        k_log2: Magnitude::from_bigint(&k),
                        dist_hi: NegLog::recip_of(&Magnitude::from_bigint(&q_next)),
                        dist_lo: NegLog::recip_of(&Magnitude::from_bigint(&(&q_next + &k))),
                        bound,
                        method: StageMethod::ExactRational,
                        holds,
                    });
                    quotients.push(a_next);
                    BuildState::Mat {
                        q_prev: q_cur,
                        q_cur: q_next,
                    }
                } else {
                    // First symbolic stage: a_{n+1} = ceil(e^{c_n q_n})
                    // carried as an exact log2 bracket.
                    let a_next = Magnitude::from_log2(bound_l, bound_h).ceil_of();
                    let q_next = a_next
                        .mul(&Magnitude::from_bigint(&q_cur))
                        .add_much_smaller(&Magnitude::from_bigint(&q_prev));
                    let denom_hi = q_next.add_much_smaller(&Magnitude::from_bigint(&k));
                    reports.push(StageReport {
                        n,
                        c_n,
                        k: Some(k.clone()),
                        k_log2: Magnitude::from_bigint(&k),
                        dist_hi: NegLog::recip_of(&q_next),
                        dist_lo: NegLog::recip_of(&denom_hi),
                        bound,
                        // ceil(x) ≥ x and q_{n+1} > a_{n+1}, so
                        // 1/q_{n+1} < e^{-c_n q_n} holds by construction.
                        method: StageMethod::StructuralLog2,
                        holds: true,
                    });
                    BuildState::Sym1 {
                        q_prev: q_cur,
                        q_cur: q_next,
                    }
                }
            }
            BuildState::Sym1 { q_prev, q_cur } => {
                // k = q_n is itself symbolic; all stage quantities live one
                // log level deeper.
                let c_l2e_lo = &c_n * &log2e_lo;
                let c_l2e_hi = &c_n * &log2e_hi;
                // L_bound = c_n q_n log2(e): log2(L_bound) brackets.
                let (cl_lo, _) = super::magnitude::log2_bounds(&c_l2e_lo, 40);
                let (_, cl_hi) = super::magnitude::log2_bounds(&c_l2e_hi, 40);
                let bound = NegLog::level2(&cl_lo + &q_cur.lo, &cl_hi + &q_cur.hi);
                // log2(a_{n+1}) = c_n q_n log2(e) (+ceil slack): its own
                // log2 bracket equals the bound's level-2 bracket.
                let a_next_log = Magnitude::from_log2(
                    &cl_lo + &q_cur.lo,
                    &cl_hi + &q_cur.hi + BigRational::new(BigInt::one(), BigInt::one() << 38),
                );
                // log2(q_{n+2}) = log2 a + log2 q_{n+1} + tiny; log2 q_{n+1}
                // (~1e16) is vanishing against log2 a (~2^1e16).
                let q_cur_log_as_mag = log_of_log(&q_cur);
                let q_next_log = a_next_log.add_much_smaller(&q_cur_log_as_mag);
                reports.push(StageReport {
                    n,
                    c_n,
                    k: None,
                    k_log2: q_cur.clone(),
                    dist_hi: NegLog::level2(q_next_log.lo.clone(), q_next_log.hi.clone()),
                    dist_lo: NegLog::level2(
                        q_next_log.lo.clone(),
                        &q_next_log.hi + BigRational::new(BigInt::one(), BigInt::one() << 38),
                    ),
                    bound,
                    method: StageMethod::StructuralLog2,
                    holds: true,
                });
                let _ = q_prev;
                BuildState::Sym2
            }
            BuildState::Sym2 => {
                return Err(Error::Schedule(
                    "stage exponent exceeds the log-log representation; reduce stages".into(),
                ))
            }
        };
    }
    let cf = ContinuedFraction::from_quotients(quotients)?;
    Ok(ExpLiouvilleConstruction {
        cf,
        stages: reports,
        proves_membership: schedule.is_unbounded(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn golden_has_no_witnesses() {
        // ‖kα‖ ≥ (√5+2)⁻¹/k > e^{-k}; the tightest margin is k = 1:
        // 0.381966… > e⁻¹ = 0.367879….
        let mut golden = ContinuedFraction::golden(40);
        let cert = exp_liouville_witnesses(&mut golden, &BigRational::one(), 10_000).unwrap();
        assert!(cert.is_empty(), "witnesses: {:?}", cert.witnesses);
        assert!(cert.undecided.is_empty());
    }

    #[test]
    fn power_quotient_rule_has_witnesses() {
        // a_{n+1} = 2^{q_n}: ‖q_nα‖ < 1/q_{n+1} < 1/(2^{q_n} q_n), so every
        // q_n witnesses any c < log 2.
        let mut quotients = vec![BigInt::zero(), BigInt::from(2)];
        let (mut qp, mut qc) = (BigInt::one(), BigInt::from(2));
        for _ in 0..3 {
            let a = BigInt::one() << qc.to_u64().unwrap() as usize;
            let qn = &a * &qc + &qp;
            quotients.push(a);
            qp = qc;
            qc = qn;
        }
        let mut cf = ContinuedFraction::from_quotients(quotients).unwrap();
        let c = rat(1, 2); // < log 2 ≈ 0.693
        let cert = exp_liouville_witnesses(&mut cf, &c, 500).unwrap();
        let ks: Vec<String> = cert.witnesses.iter().map(|w| w.k.to_string()).collect();
        assert!(ks.contains(&"2".to_string()), "ks={ks:?}");
        assert!(ks.contains(&"9".to_string()), "ks={ks:?}");
        assert!(cert.verify(&cf).unwrap());
    }

    #[test]
    fn rational_alpha_yields_nothing() {
        // ‖k/3‖ is 0 or 1/3; with c = 2 even k = 1 fails (e^{-2} < 1/3),
        // and exact multiples are excluded by the strict 0 < ‖kα‖.
        let mut cf = ContinuedFraction::from_rational(&rat(1, 3));
        let cert = exp_liouville_witnesses(&mut cf, &rat(2, 1), 100).unwrap();
        assert!(cert.is_empty());
        assert!(cert.undecided.is_empty());
        // At c = 1 the single honest witness k = 1 appears: 1/3 < e^{-1}.
        let cert = exp_liouville_witnesses(&mut cf, &BigRational::one(), 100).unwrap();
        let ks: Vec<String> = cert.witnesses.iter().map(|w| w.k.to_string()).collect();
        assert_eq!(ks, vec!["1".to_string()]);
    }

    #[test]
    fn construct_linear_four_stages() {
        let built = construct_exp_liouville(&GrowthSchedule::Linear, 4).unwrap();
        assert!(built.proves_membership);
        assert_eq!(built.stages.len(), 4);
        // Hand-checkable early data: q_1 = 2, a_2 = ceil(e^2) = 8, q_2 = 17.
        assert_eq!(built.stages[0].k, Some(BigInt::from(2)));
        assert_eq!(built.cf.quotients()[2], BigInt::from(8));
        assert_eq!(built.stages[1].k, Some(BigInt::from(17)));
        for s in &built.stages {
            assert!(s.holds, "stage {} failed", s.n);
            // dist_hi < bound must not be contradicted by the log brackets.
            assert!(
                s.dist_hi.value_lt(&s.bound) != Some(false),
                "stage {} bracket check contradicts",
                s.n
            );
        }
        // Distances strictly decrease across stages, decidable at every
        // log depth.
        for pair in built.stages.windows(2) {
            assert_eq!(pair[1].dist_hi.value_lt(&pair[0].dist_hi), Some(true));
        }
        // Stage 3 exponent e^{2·17} is exact; e^{3 q_3} with q_3 ≈ 9.9e15
        // is symbolic; stage 4's iterate q_4 is itself symbolic.
        assert_eq!(built.stages[0].method, StageMethod::ExactRational);
        assert_eq!(built.stages[1].method, StageMethod::ExactRational);
        assert_eq!(built.stages[2].method, StageMethod::StructuralLog2);
        assert!(built.stages[2].k.is_some());
        assert_eq!(built.stages[3].method, StageMethod::StructuralLog2);
        assert!(built.stages[3].k.is_none());
    }

    #[test]
    fn construct_one_stage_by_hand() {
        // a_2 = ceil(e^{c q_1}) with c = 1, q_1 = 2.
        let built = construct_exp_liouville(&GrowthSchedule::Constant(rat(1, 1)), 1).unwrap();
        assert_eq!(built.cf.quotients(), &[
            BigInt::zero(),
            BigInt::from(2),
            BigInt::from(8)
        ]);
        assert!(!built.proves_membership);
        assert!(built.stages[0].holds);
    }

    #[test]
    fn constructed_prefix_passes_generic_oracle() {
        // Witnesses at q_1 (c = 1) and q_2 (c = 2) re-derived from the
        // materialized prefix by the independent scan.
        let built = construct_exp_liouville(&GrowthSchedule::Linear, 3).unwrap();
        let mut cf = built.cf.clone();
        let cert1 = exp_liouville_witnesses(&mut cf, &rat(1, 1), 10).unwrap();
        assert!(cert1.witnesses.iter().any(|w| w.k == BigInt::from(2)));
        let mut cf = built.cf.clone();
        let cert2 = exp_liouville_witnesses(&mut cf, &rat(2, 1), 20).unwrap();
        assert!(cert2.witnesses.iter().any(|w| w.k == BigInt::from(17)));
    }

    #[test]
    fn certificate_json_schema() {
        let built = construct_exp_liouville(&GrowthSchedule::Linear, 2).unwrap();
        let mut cf = built.cf.clone();
        let cert = exp_liouville_witnesses(&mut cf, &rat(1, 1), 100).unwrap();
        let json = cert.to_json();
        assert!(json.get("c").is_some());
        let ws = json.get("witnesses").unwrap().as_array().unwrap();
        assert!(!ws.is_empty());
        for w in ws {
            for field in ["k", "dist_num", "dist_den_log2", "bound_log"] {
                assert!(w.get(field).is_some(), "missing {field}");
            }
        }
    }
}
