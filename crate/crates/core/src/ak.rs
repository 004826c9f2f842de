//! Anosov–Katok conjugation schedules at desk scale.
//!
//! A schedule is a list of rational rotation numbers `α_m = p_m/q_m` with
//! divisibility-nested denominators and one conjugator per stage.  The
//! conjugators are time-1 flows of `R_{1/q_m}`-invariant Hamiltonians, so
//! re-conjugating an earlier rotation is an exact identity rather than a
//! `C^∞`-smallness argument; what remains to measure is how far each stage
//! map `φ_m = h_m^{-1} R_{α_m} h_m` moves from its predecessor in `C⁰`
//! and `C¹`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::hamiltonian::{BumpProfile, Hamiltonian};
use crate::maps::MapExpr;
use crate::norms::{self, NormEstimate};
use crate::phase_space::{mesh_size, sample_points, Manifold};
use crate::{parallel, Error, Result};

/// One conjugator `g_m`: the time-1 flow of
/// `amplitude · A(I) sin(2πqθ + phase) / (2πq)` on the annulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugatorSpec {
    pub frequency: u32,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub profile: BumpProfile,
}

impl ConjugatorSpec {
    pub fn hamiltonian(&self) -> Hamiltonian {
        Hamiltonian::AnnulusConjugator {
            frequency: self.frequency,
            phase: self.phase,
            amplitude: self.amplitude,
            profile: self.profile,
        }
    }

    pub fn map(&self) -> MapExpr {
        if self.amplitude == 0.0 {
            MapExpr::Identity {
                manifold: Manifold::Annulus,
            }
        } else {
            MapExpr::flow(self.hamiltonian(), 1.0)
        }
    }
}

/// One stage: rotation number `alpha_num/alpha_den`, its conjugator, and a
/// closeness budget for the measured `C⁰` gap to the previous stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AKStage {
    pub alpha_num: i64,
    pub alpha_den: i64,
    pub conjugator: ConjugatorSpec,
    pub tol: f64,
}

impl AKStage {
    pub fn alpha(&self) -> Rational64 {
        Rational64::new(self.alpha_num, self.alpha_den)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AKSchedule {
    pub stages: Vec<AKStage>,
}

impl AKSchedule {
    /// Denominators strictly increasing and divisibility-nested, conjugator
    /// frequencies matching, positive budgets, and no collapse back to the
    /// trivial rotation after stage 1.
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::config("schedule has no stages"));
        }
        let mut prev_q: Option<i64> = None;
        for (i, s) in self.stages.iter().enumerate() {
            if s.alpha_den <= 0 {
                return Err(Error::config("stage denominator must be positive"));
            }
            let a = s.alpha(); // reduced
            let q = *a.denom();
            if let Some(p) = prev_q {
                if q <= p || q % p != 0 {
                    return Err(Error::config(format!(
                        "stage {} denominator {} does not strictly refine {}",
                        i + 1,
                        q,
                        p
                    )));
                }
            }
            if i > 0 && a.is_integer() {
                return Err(Error::config(
                    "rotation number collapses to an integer beyond stage 1",
                ));
            }
            if s.conjugator.frequency as i64 != q {
                return Err(Error::config(format!(
                    "stage {} conjugator frequency {} != denominator {}",
                    i + 1,
                    s.conjugator.frequency,
                    q
                )));
            }
            if !(s.tol > 0.0) {
                return Err(Error::config("stage tolerance must be positive"));
            }
            prev_q = Some(q);
        }
        Ok(())
    }

    /// Partial sums of the closeness budgets, reported alongside runs.
    pub fn budget_partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.stages
            .iter()
            .map(|s| {
                acc += s.tol;
                acc
            })
            .collect()
    }
}

/// One realized stage with its diagnostics.
#[derive(Debug, Clone)]
pub struct AKApproximant {
    pub stage: usize,
    pub alpha: Rational64,
    /// `φ_m = h_m^{-1} R_{α_m} h_m`.
    pub map: MapExpr,
    /// Measured `d_{C⁰}(φ_m, φ_{m-1})`.
    pub c0_gap: NormEstimate,
    /// Grid sup of `‖Dφ_m − Dφ_{m-1}‖_F` in orthonormal frames.
    pub c1_gap: f64,
    /// Measured `‖Dh_m‖` lower estimate (the derivative growth ledger).
    pub deriv_h: f64,
    /// `d_{C⁰}(g_m ∘ R_{α_m}, R_{α_m} ∘ g_m)` — zero up to integrator
    /// tolerance by invariance of the conjugator Hamiltonian.
    pub commutation_residual: f64,
    /// `d_{C⁰}(h_m^{-1} R_{α_{m-1}} h_m, φ_{m-1})`: the previous stage map
    /// re-expressed through the *new* conjugation tower.  Exact up to the
    /// integrator, because `g_m` commutes with `R_{α_{m-1}}`.
    pub consistency_prev: Option<f64>,
    /// Whether the measured gap stayed within `tol_m` plus grid slack.
    pub accepted: bool,
}

/// `d_{C⁰}(g ∘ R_α, R_α ∘ g).lower` on the conjugator's manifold.
pub fn commutation_check(g: &MapExpr, alpha: f64, grid: &GridSpec) -> Result<f64> {
    let manifold = g.manifold()?;
    let rot = MapExpr::Rotation { manifold, alpha };
    let lhs = MapExpr::compose(vec![g.clone(), rot.clone()]);
    let rhs = MapExpr::compose(vec![rot, g.clone()]);
    Ok(norms::c0_distance(&lhs, &rhs, grid)?.lower)
}

/// Next rotation number `α_m + 1/(ℓ·q_next)` with the smallest `ℓ ≥ 1`
/// such that the rotation perturbation, pushed through a map of Lipschitz
/// constant `lip_bound`, stays below `tol`.  On the flat annulus a rotation
/// by `Δα` moves every point exactly `‖Δα‖`, so the diameter factor is 1.
pub fn ak_next_alpha(
    alpha: Rational64,
    q_next: i64,
    lip_bound: f64,
    tol: f64,
) -> Result<Rational64> {
    if q_next <= 0 || q_next % alpha.denom() != 0 {
        return Err(Error::Schedule(format!(
            "q_next = {q_next} is not a positive multiple of {}",
            alpha.denom()
        )));
    }
    if !(lip_bound >= 1.0) {
        return Err(Error::Schedule("lip_bound must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Schedule("tol must be positive".into()));
    }
    let ell = if tol.is_infinite() {
        1.0
    } else {
        (lip_bound / (tol * q_next as f64)).ceil().max(1.0)
    };
    if !(ell <= i64::MAX as f64 / q_next.max(1) as f64) {
        return Err(Error::Schedule(format!(
            "no admissible denominator: would need ell = {ell:e}"
        )));
    }
    Ok(alpha + Rational64::new(1, ell as i64 * q_next))
}

/// Like [`ak_next_alpha`], but keeps increasing `ℓ` until the *reduced*
/// denominator of the result strictly refines that of `α_m` — reduction can
/// break nesting (1/3 + 1/24 = 3/8).  Schedule builders should use this.
pub fn ak_next_alpha_nested(
    alpha: Rational64,
    q_next: i64,
    lip_bound: f64,
    tol: f64,
) -> Result<Rational64> {
    let first = ak_next_alpha(alpha, q_next, lip_bound, tol)?;
    let base = first - alpha; // 1/(ell * q_next)
    let mut ell = *base.denom() / q_next;
    for _ in 0..64 {
        let next = alpha + Rational64::new(1, ell * q_next);
        let q = *next.denom();
        if q > *alpha.denom() && q % *alpha.denom() == 0 {
            return Ok(next);
        }
        ell = ell
            .checked_add(1)
            .ok_or_else(|| Error::Schedule("denominator overflow".into()))?;
        ell.checked_mul(q_next)
            .ok_or_else(|| Error::Schedule("denominator overflow".into()))?;
    }
    Err(Error::Schedule(
        "no nested denominator within 64 bumps".into(),
    ))
}

/// Grid sup of the Frobenius difference of the two Jacobians in orthonormal
/// frames.
fn c1_gap(f: &MapExpr, g: &MapExpr, grid: &GridSpec) -> Result<f64> {
    let manifold = f.manifold()?;
    let window = Default::default();
    let points = sample_points(manifold, grid, &window);
    let rows = parallel::map_indexed(points.len(), |i| {
        let p = &points[i];
        let (fp, tf) = f.evaluate_with_tangent(p)?;
        let (gp, tg) = g.evaluate_with_tangent(p)?;
        Ok::<_, Error>(tf.restrict(p, &fp).frobenius_diff(&tg.restrict(p, &gp)))
    });
    let mut sup = 0.0_f64;
    for r in rows {
        sup = sup.max(r?);
    }
    Ok(sup)
}

/// Run the schedule stage by stage.  Measurement within a stage is
/// parallel; stages are sequential because each tower extends the last.
/// A stage whose measured `C⁰` gap exceeds its budget by more than the
/// grid slack is marked rejected and construction stops there, returning
/// the partial run.
pub fn ak_build(schedule: &AKSchedule, grid: &GridSpec) -> Result<Vec<AKApproximant>> {
    schedule.validate()?;
    grid.validate()?;
    let manifold = Manifold::Annulus;
    let identity = MapExpr::Identity { manifold };
    let mut conjugators: Vec<MapExpr> = Vec::new();
    let mut out: Vec<AKApproximant> = Vec::new();
    let mut prev_map = identity.clone();
    let mut prev_alpha: Option<Rational64> = None;
    let mut prev_deriv = 0.0_f64;
    for (idx, stage) in schedule.stages.iter().enumerate() {
        let alpha = stage.alpha();
        let alpha_f = *alpha.numer() as f64 / *alpha.denom() as f64;
        let g = stage.conjugator.map();
        // New conjugator first in the factor list = applied last = adjacent
        // to the rotation, so h_{m+1}^{-1} R_{α_m} h_{m+1} collapses to φ_m
        // exactly (g_{m+1} commutes with R_{α_m}).
        conjugators.insert(0, g.clone());
        let h = MapExpr::compose(conjugators.clone());
        let rot = MapExpr::Rotation {
            manifold,
            alpha: alpha_f,
        };
        let map = MapExpr::compose(vec![h.clone().inverse(), rot, h.clone()]);
        let c0_gap = norms::c0_distance(&map, &prev_map, grid)?;
        let c1 = c1_gap(&map, &prev_map, grid)?;
        let deriv_h = norms::derivative_norm(&h, grid)?.lower;
        let commutation_residual = commutation_check(&g, alpha_f, grid)?;
        let consistency_prev = match prev_alpha {
            None => None,
            Some(pa) => {
                let pa_f = *pa.numer() as f64 / *pa.denom() as f64;
                let prev_rot = MapExpr::Rotation {
                    manifold,
                    alpha: pa_f,
                };
                let reexpressed =
                    MapExpr::compose(vec![h.clone().inverse(), prev_rot, h.clone()]);
                Some(norms::c0_distance(&reexpressed, &prev_map, grid)?.lower)
            }
        };
        let slack = c0_gap.upper - c0_gap.lower;
        let accepted = c0_gap.lower <= stage.tol + slack;
        // Derivative ledger must not decrease: the tower only grows.  A
        // small sampling allowance covers grid jitter.
        if deriv_h + 1e-9 < prev_deriv {
            return Err(Error::invariant(format!(
                "derivative ledger decreased at stage {}: {} < {}",
                idx + 1,
                deriv_h,
                prev_deriv
            )));
        }
        prev_deriv = prev_deriv.max(deriv_h);
        out.push(AKApproximant {
            stage: idx + 1,
            alpha,
            map: map.clone(),
            c0_gap,
            c1_gap: c1,
            deriv_h,
            commutation_residual,
            consistency_prev,
            accepted,
        });
        if !accepted {
            break;
        }
        prev_map = map;
        prev_alpha = Some(alpha);
    }
    let _ = mesh_size(manifold, grid, &Default::default());
    Ok(out)
}
