//! Recurrence-density measurements: how often `‖jα‖` falls under the
//! displacement-energy threshold that forces `φʲ(A) ∩ A ≠ ∅`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::Serialize;

use crate::diophantine::{equidistribution_density, ContinuedFraction, TorusVector};
use crate::{Error, Result};

/// The recurring set, with a certified displacement-energy lower bound.
#[derive(Debug, Clone, Serialize)]
pub enum SetSpec {
    /// Embedded metric ball of radius `r`: `e(A) ≥ πr²` (energy–capacity).
    Ball { r: f64 },
    /// Collar `|I − i0| ≤ halfwidth` around a circle Lagrangian: the
    /// inscribed ball of radius `halfwidth` gives `e(A) ≥ π·halfwidth²`.
    LagrangianCollar { i0: f64, halfwidth: f64 },
}

impl SetSpec {
    pub fn e_lower(&self) -> f64 {
        let r = match self {
            SetSpec::Ball { r } => *r,
            SetSpec::LagrangianCollar { halfwidth, .. } => *halfwidth,
        };
        std::f64::consts::PI * r * r
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    pub set: SetSpec,
    pub n: u64,
    /// `C″ = 1/(2k‖μ‖_∞)`.
    pub c_dprime: f64,
    /// Circle-case measure normalization of `B(ε) ∩ G`.
    pub c_prime: f64,
    pub d: u32,
    /// `C″·e_lower(A)`: iterates with `‖jα‖` below this must return.
    pub threshold: f64,
    pub density: f64,
    /// `min{1, C′·(C″ e_lower)^d}`.
    pub bound: f64,
    /// Equidistribution slack from the partial quotients actually involved.
    pub discrepancy: f64,
    pub ok: bool,
}

/// Three-distance/Ostrowski discrepancy bound for the first `n` multiples:
/// `D_N ≤ (Σ_{q_m ≤ N} a_{m+1} + 2) / N`.
fn discrepancy_bound(alpha: &TorusVector, n: u64) -> f64 {
    use crate::diophantine::TorusComponent;
    let mut worst: f64 = 0.0;
    for comp in &alpha.components {
        let cf = match comp {
            TorusComponent::Irrational(cf) => cf.clone(),
            TorusComponent::Rational(x) => ContinuedFraction::from_rational(x),
        };
        let quotients = cf.quotients();
        let denoms = cf.denominators();
        let mut sum = 2.0;
        for m in 1..denoms.len() {
            if denoms[m] <= BigInt::from(n) {
                if m + 1 < quotients.len() {
                    sum += crate::diophantine::rational_to_f64(&BigRational::from_integer(
                        quotients[m + 1].clone(),
                    ));
                }
            } else {
                break;
            }
        }
        worst = worst.max(sum / n as f64);
    }
    worst
}

/// Count `j ≤ N` with `‖jα‖ < C″·e_lower(A)` and compare against the
/// density floor `min{1, C′·(C″ e_lower)^d}`.
pub fn recurrence_experiment(
    alpha: &TorusVector,
    set: &SetSpec,
    n: u64,
    k: u32,
    mu_sup: f64,
) -> Result<RecurrenceReport> {
    let e_lower = set.e_lower();
    if !(e_lower > 0.0) {
        return Err(Error::domain("set needs positive displacement energy"));
    }
    if !(mu_sup > 0.0) || k == 0 {
        return Err(Error::domain("need k >= 1 and ‖μ‖_∞ > 0"));
    }
    let c_dprime = 1.0 / (2.0 * k as f64 * mu_sup);
    let c_prime = 2.0; // circle case; see module docs for k >= 2 policy
    let d = 1u32;
    let threshold = (c_dprime * e_lower).min(0.5);
    let eps = BigRational::from_f64(threshold)
        .ok_or_else(|| Error::domain("threshold is not finite"))?;
    let density = equidistribution_density(alpha, &eps, n)?;
    let bound = (c_prime * (c_dprime * e_lower).powi(d as i32)).min(1.0);
    let discrepancy = discrepancy_bound(alpha, n);
    let ok = density >= bound - 3.0 * discrepancy;
    Ok(RecurrenceReport {
        set: set.clone(),
        n,
        c_dprime,
        c_prime,
        d,
        threshold,
        density,
        bound,
        discrepancy,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::TorusComponent;

    #[test]
    fn golden_ball_density_matches_threshold_measure() {
        let alpha = TorusVector::circle(TorusComponent::Irrational(ContinuedFraction::golden(
            64,
        )));
        // r = 0.1: e_lower = 0.01π, threshold = 0.005π ≈ 0.0157.
        let rep = recurrence_experiment(&alpha, &SetSpec::Ball { r: 0.1 }, 50_000, 1, 1.0)
            .unwrap();
        assert!((rep.threshold - 0.005 * std::f64::consts::PI).abs() < 1e-12);
        // Equidistribution: density → 2·threshold ≈ 0.0314 = bound.
        assert!(
            (rep.density - 2.0 * rep.threshold).abs() < 0.003,
            "density {}",
            rep.density
        );
        assert!(rep.ok, "density {} bound {}", rep.density, rep.bound);
    }

    #[test]
    fn rational_third_returns_every_third_step() {
        let alpha = TorusVector::circle(TorusComponent::rational(1, 3));
        let rep = recurrence_experiment(&alpha, &SetSpec::Ball { r: 0.3 }, 999, 1, 1.0).unwrap();
        // ‖jα‖ = 0 < threshold for every j divisible by 3.
        assert!(rep.density >= 1.0 / 3.0 - 1e-9, "density {}", rep.density);
    }

    #[test]
    fn lagrangian_collar_reports() {
        let alpha = TorusVector::circle(TorusComponent::Irrational(ContinuedFraction::sqrt2(
            64,
        )));
        let set = SetSpec::LagrangianCollar {
            i0: 0.5,
            halfwidth: 0.08,
        };
        let rep = recurrence_experiment(&alpha, &set, 20_000, 1, 1.0).unwrap();
        assert!(rep.ok, "density {} bound {}", rep.density, rep.bound);
    }

    #[test]
    fn zero_energy_rejected() {
        let alpha = TorusVector::circle(TorusComponent::rational(1, 3));
        assert!(
            recurrence_experiment(&alpha, &SetSpec::Ball { r: 0.0 }, 10, 1, 1.0).is_err()
        );
    }
}
