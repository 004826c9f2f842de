//! Seeded random-map sweep of the Hölder-type inequality
//! `d_C⁰(φ, Id) ≤ C √γ(φ) ‖Dφ‖` with certified γ upper bounds, plus the
//! non-displacement step of the proof and the refined plane form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::grid::GridSpec;
use crate::hamiltonian::{BumpProfile, Hamiltonian};
use crate::maps::MapExpr;
use crate::norms::{
    self, check_holder_inequality, check_plane_refined, nondisplacement_witness, HolderReport,
    WitnessOutcome,
};
use crate::phase_space::{Atlas, AtlasConstants, Manifold, Point};
use crate::{Error, Result};

/// One sampled map with its verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub gamma_ub: f64,
    pub holder: HolderReport,
    /// `Some(true/false)` when the sample was sub-δ and the witness search
    /// ran; `None` when γ_ub ≥ δ.
    pub witness_found: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub count: usize,
    pub seed: u64,
    pub constants: AtlasConstants,
    pub violations: usize,
    pub witness_attempts: usize,
    pub witness_successes: usize,
    /// Smallest `rhs / lhs` over samples with a nonzero lhs.
    pub min_slack_ratio: f64,
    pub samples: Vec<SampleOutcome>,
}

/// Draw one annulus sample: the composition of a small rigid-action flow
/// (`c·I`, `c ≤ 0.05`) with a small conjugator flow.  Subadditivity of the
/// Hofer norm certifies `γ ≤ osc(H₁) + osc(H₂)`.
fn annulus_sample(rng: &mut ChaCha8Rng) -> (MapExpr, f64) {
    // Log-uniform so roughly half the family lands under the atlas delta.
    let t: f64 = rng.gen_range(0.0..1.0);
    let c = 0.001 * 50f64.powf(t);
    let amp: f64 = rng.gen_range(0.0..0.02);
    let freq: u32 = rng.gen_range(2..6);
    let phase: f64 = rng.gen_range(0.0..1.0);
    let action = Hamiltonian::AnnulusAction { coeff: c };
    let conj = Hamiltonian::AnnulusConjugator {
        frequency: freq,
        phase,
        amplitude: amp,
        profile: BumpProfile::default(),
    };
    let gamma_ub = action.oscillation() + conj.oscillation();
    let map = MapExpr::compose(vec![MapExpr::flow(action, 1.0), MapExpr::flow(conj, 1.0)]);
    (map, gamma_ub)
}

/// Run `count` seeded annulus samples against the atlas constants.
pub fn inequality_harness(
    count: usize,
    seed: u64,
    grid: &GridSpec,
    witness_budget: &GridSpec,
) -> Result<InequalityReport> {
    let atlas = Atlas::default_for(Manifold::Annulus);
    let constants = atlas.constants(&GridSpec::new(64, 64), &Default::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    let mut violations = 0;
    let mut witness_attempts = 0;
    let mut witness_successes = 0;
    let mut min_slack = f64::INFINITY;
    for index in 0..count {
        let (map, gamma_ub) = annulus_sample(&mut rng);
        let holder = check_holder_inequality(&map, gamma_ub, constants.c, grid)?;
        if holder.violation {
            violations += 1;
        }
        if holder.lhs_lower > 0.0 {
            min_slack = min_slack.min(holder.rhs / holder.lhs_lower);
        }
        // The proof's non-displacement step: γ(φ) < δ forces φ(B) ∩ B ≠ ∅
        // for balls of radius 2L√(γ/π).
        let witness_found = if gamma_ub < constants.delta {
            witness_attempts += 1;
            let r = 2.0 * constants.lipschitz_l * (gamma_ub / std::f64::consts::PI).sqrt();
            // Center well inside the action interval so the ball fits.
            let x = Point::annulus(0.37, 0.5);
            let found = matches!(
                nondisplacement_witness(&map, &x, r, witness_budget)?,
                WitnessOutcome::Found { .. }
            );
            if found {
                witness_successes += 1;
            }
            Some(found)
        } else {
            None
        };
        samples.push(SampleOutcome {
            index,
            gamma_ub,
            holder,
            witness_found,
        });
    }
    Ok(InequalityReport {
        count,
        seed,
        constants,
        violations,
        witness_attempts,
        witness_successes,
        min_slack_ratio: min_slack,
        samples,
    })
}

/// Refined plane sweep (the `√γ(1 + ‖Dφ‖)` form) over C²-small radial bump
/// flows with oscillation in `[osc_min, osc_max]`; γ is exact for these.
pub fn plane_refined_harness(
    count: usize,
    seed: u64,
    osc_min: f64,
    osc_max: f64,
    grid: &GridSpec,
) -> Result<InequalityReport> {
    if !(0.0 < osc_min && osc_min <= osc_max) {
        return Err(Error::domain("need 0 < osc_min <= osc_max"));
    }
    let atlas = Atlas::default_for(Manifold::Plane);
    // The default plane chart has K = [-1,1]²; sample constants inside it.
    let constants = atlas.constants(&GridSpec::new(64, 64), &crate::grid::PlaneWindow::square(0.9))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for index in 0..count {
        // Log-uniform oscillation across the decades.
        let t: f64 = rng.gen_range(0.0..1.0);
        let peak = osc_min * (osc_max / osc_min).powf(t);
        let radius = rng.gen_range(0.4..1.0);
        let bump = Hamiltonian::PlaneRadialBump {
            cx: rng.gen_range(-0.3..0.3),
            cy: rng.gen_range(-0.3..0.3),
            radius,
            peak,
        };
        let gamma = norms::gamma_exact_small(&bump);
        let map = MapExpr::flow(bump, 1.0);
        let holder = check_plane_refined(&map, gamma.value, grid)?;
        if holder.violation {
            violations += 1;
        }
        if holder.lhs_lower > 0.0 {
            min_slack = min_slack.min(holder.rhs / holder.lhs_lower);
        }
        samples.push(SampleOutcome {
            index,
            gamma_ub: gamma.value,
            holder,
            witness_found: None,
        });
    }
    Ok(InequalityReport {
        count,
        seed,
        constants,
        violations,
        witness_attempts: 0,
        witness_successes: 0,
        min_slack_ratio: min_slack,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report() {
        let r = inequality_harness(0, 1, &GridSpec::new(8, 8), &GridSpec::new(5, 5)).unwrap();
        assert_eq!(r.count, 0);
        assert_eq!(r.violations, 0);
        assert!(r.samples.is_empty());
    }

    #[test]
    fn small_annulus_sweep_has_no_violations() {
        let r = inequality_harness(12, 7, &GridSpec::new(24, 12), &GridSpec::new(9, 9)).unwrap();
        assert_eq!(r.violations, 0, "report: {:?}", r.samples);
        // Every sub-delta sample must be witnessed.
        assert!(r.witness_attempts >= 1);
        assert_eq!(r.witness_successes, r.witness_attempts);
        assert!(r.min_slack_ratio >= 1.0);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let a = inequality_harness(4, 11, &GridSpec::new(12, 8), &GridSpec::new(5, 5)).unwrap();
        let b = inequality_harness(4, 11, &GridSpec::new(12, 8), &GridSpec::new(5, 5)).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn plane_refined_sweep() {
        let r = plane_refined_harness(8, 3, 1e-3, 1e-1, &GridSpec::new(24, 24)).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.min_slack_ratio >= 1.0, "slack {}", r.min_slack_ratio);
    }
}
