//! Rigidity scans along iterates of conjugated rotations: exact `‖nα‖`,
//! Hofer upper bounds, measured `C⁰`/derivative norms, the Hölder right
//! side, and the exponential envelope of the rigidity corollary.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::diophantine::liouville::ExpLiouvilleConstruction;
use crate::diophantine::ContinuedFraction;
use crate::grid::GridSpec;
use crate::maps::MapExpr;
use crate::norms::{self, NormEstimate};
use crate::phase_space::{Atlas, Manifold};
use crate::{Error, Result};

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Below this rotation angle a grid measurement says nothing (the composed
/// flow round-off dominates); such rows carry the Lipschitz certificate
/// instead of a measurement.
const MEASURABLE_ANGLE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct RigidityRow {
    /// Iterate count, exact (decimal string: convergent denominators can
    /// exceed `i64`).
    pub n: String,
    /// `‖nα‖` bracket midpoint; underflows to 0 for the extreme stages.
    pub torus_dist: f64,
    /// `log2` of the certified upper bound on `‖nα‖` (finite even when the
    /// value itself underflows).
    pub torus_dist_log2: f64,
    /// Stated rotation bound `2k‖μ‖_∞·‖nα‖`.
    pub hofer_ub: f64,
    pub hofer_ub_log2: f64,
    /// For certificate-driven rows: the exact verdict `‖q_nα‖ < e^{-c_n q_n}`.
    pub hofer_chain_ok: Option<bool>,
    /// Measured `d_C⁰(φⁿ, Id)` when the angle is measurable.
    pub c0: Option<NormEstimate>,
    /// `log2` of the `C⁰` value this row certifies: measured upper bound
    /// when available, otherwise `Lip(h⁻¹)·‖nα‖`.
    pub c0_log2: f64,
    pub measured: bool,
    pub deriv: Option<NormEstimate>,
    /// `C·sqrt(hofer_ub)·‖Dφⁿ‖` (inflated); `+inf` for unmeasured rows.
    pub holder_rhs: f64,
    pub holder_ok: bool,
    /// `log2` of `C·e^{n(log‖Dφ‖ − c)}`; `None` when the premise
    /// `c > log‖Dφ‖` fails (row skipped, not failed).
    pub cor13_envelope_log2: Option<f64>,
    pub cor13_ok: Option<bool>,
}

struct ScanContext {
    h: MapExpr,
    h_inv: MapExpr,
    atlas_c: f64,
    lip_h: f64,
    log_deriv1: f64,
    c: f64,
    grid: GridSpec,
}

impl ScanContext {
    fn new(h: &MapExpr, alpha_value: f64, c: f64, grid: &GridSpec) -> Result<ScanContext> {
        if h.manifold()? != Manifold::Annulus {
            return Err(Error::domain("rigidity scans run on the annulus"));
        }
        let atlas = Atlas::default_for(Manifold::Annulus);
        let constants = atlas.constants(&GridSpec::new(64, 64), &Default::default())?;
        let base = conjugated_rotation(h, alpha_value);
        let deriv1 = norms::derivative_norm(&base, grid)?;
        let lip_h = 1.1 * norms::derivative_norm(h, grid)?.lower.max(1.0);
        Ok(ScanContext {
            h: h.clone(),
            h_inv: h.clone().inverse(),
            atlas_c: constants.c,
            lip_h,
            log_deriv1: (1.1 * deriv1.lower.max(1.0)).ln(),
            c,
            grid: grid.clone(),
        })
    }

    /// One row from an exact iterate `n` with a certified `log2 ‖nα‖`
    /// bracket (`dist_log2_hi` bounds it above) and the stated Hofer bound
    /// `2k‖μ‖_∞‖nα‖` passed through `hofer_factor = 2k‖μ‖_∞`.
    fn row(
        &self,
        n: &BigInt,
        dist_mid: f64,
        dist_log2_hi: f64,
        hofer_factor: f64,
        hofer_chain_ok: Option<bool>,
    ) -> Result<RigidityRow> {
        let hofer_ub = hofer_factor * dist_mid;
        let hofer_ub_log2 = hofer_factor.log2() + dist_log2_hi;
        let n_f64 = n.to_f64().unwrap_or(f64::INFINITY);
        let envelope_log2 = if self.c > self.log_deriv1 {
            Some(self.atlas_c.log2() + n_f64 * (self.log_deriv1 - self.c) * LOG2_E)
        } else {
            None
        };
        let measured = dist_mid > MEASURABLE_ANGLE;
        let (c0, deriv, c0_log2, holder_rhs) = if measured {
            let phi_n = MapExpr::compose(vec![
                self.h_inv.clone(),
                MapExpr::Rotation {
                    manifold: Manifold::Annulus,
                    alpha: dist_mid,
                },
                self.h.clone(),
            ]);
            let id = MapExpr::Identity {
                manifold: Manifold::Annulus,
            };
            let c0 = norms::c0_distance(&phi_n, &id, &self.grid)?;
            let deriv = norms::derivative_norm(&phi_n, &self.grid)?;
            let deriv_infl = if deriv.upper.is_finite() {
                deriv.upper
            } else {
                1.1 * deriv.lower
            };
            let rhs = self.atlas_c * hofer_ub.sqrt() * deriv_infl;
            let c0_log2 = c0.upper.log2();
            (Some(c0), Some(deriv), c0_log2, rhs)
        } else {
            // Certified: d_C⁰(h⁻¹R_δh, Id) ≤ Lip(h⁻¹)·δ, and in det-1
            // 2x2 frames Lip(h⁻¹) is bounded by sup σ_max(Dh).
            (
                None,
                None,
                self.lip_h.log2() + dist_log2_hi,
                f64::INFINITY,
            )
        };
        let holder_ok = match &c0 {
            Some(e) => e.lower <= holder_rhs,
            None => true,
        };
        let cor13_ok = envelope_log2.map(|env| c0_log2 <= env);
        Ok(RigidityRow {
            n: n.to_string(),
            torus_dist: dist_mid,
            torus_dist_log2: dist_log2_hi,
            hofer_ub,
            hofer_ub_log2,
            hofer_chain_ok,
            c0,
            c0_log2,
            measured,
            deriv,
            holder_rhs,
            holder_ok,
            cor13_envelope_log2: envelope_log2,
            cor13_ok,
        })
    }
}

fn conjugated_rotation(h: &MapExpr, alpha: f64) -> MapExpr {
    MapExpr::compose(vec![
        h.clone().inverse(),
        MapExpr::Rotation {
            manifold: Manifold::Annulus,
            alpha,
        },
        h.clone(),
    ])
}

/// Scan `φⁿ = h⁻¹ R_{nα} h` over the given iterates (sorted ascending).
/// The exact rotation fast path — one `h`, one `h⁻¹`, exact `‖nα‖` — keeps
/// the map depth independent of `n`.
pub fn rigidity_scan(
    h: &MapExpr,
    alpha: &ContinuedFraction,
    iterates: &[i64],
    c: f64,
    grid: &GridSpec,
) -> Result<Vec<RigidityRow>> {
    let alpha_f = alpha.value_interval().to_f64();
    let ctx = ScanContext::new(h, alpha_f, c, grid)?;
    let mut ns: Vec<i64> = iterates.iter().copied().filter(|&n| n >= 1).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let nb = BigInt::from(n);
        let mut cf = alpha.clone();
        let depth = cf.depth() + 64;
        let dist = cf.norm_times_refined(&nb, depth)?;
        let mid = dist.to_f64();
        let (_, log2_hi) = crate::diophantine::magnitude::log2_bounds(&dist.hi, 24);
        let log2_hi = crate::diophantine::magnitude::rational_to_f64(&log2_hi);
        // k = 1 circle action generated by μ = I with ‖μ‖_∞ = 1.
        rows.push(ctx.row(&nb, mid, log2_hi, 2.0, None)?);
    }
    Ok(rows)
}

/// Rows for the materialized stages (`k` known exactly) of an exp-Liouville
/// construction: `‖q_nα‖` comes from the stage certificate rather than a
/// fresh continued-fraction scan, so doubly-exponentially small distances
/// keep finite `log2` bookkeeping.
pub fn exp_liouville_rigidity(
    built: &ExpLiouvilleConstruction,
    h: &MapExpr,
    c: f64,
    grid: &GridSpec,
) -> Result<Vec<RigidityRow>> {
    let alpha_f = built.cf.value_interval().to_f64();
    let ctx = ScanContext::new(h, alpha_f, c, grid)?;
    let mut rows = Vec::new();
    for stage in &built.stages {
        let Some(k) = &stage.k else { continue };
        let dist_log2 = stage.dist_hi.log2_f64();
        let dist_mid = 2f64.powf(dist_log2); // underflows to 0 when tiny
        rows.push(ctx.row(k, dist_mid, dist_log2, 2.0, Some(stage.holds))?);
    }
    Ok(rows)
}
