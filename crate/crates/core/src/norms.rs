//! Certified norm estimation: C0 distance, sup derivative norm, Hofer upper
//! bounds, the exact C2-small spectral value, displacement-energy bounds,
//! the non-displacement witness search and the inequality checker.
//!
//! Estimates come as `[lower, upper]` brackets.  Lower bounds are grid
//! maxima and therefore always sound; upper bounds carry a Lipschitz or
//! refinement certificate and degrade to `+inf` when none is available,
//! which keeps inequality checks sound (they only consume lower bounds on
//! the left and inflated estimates on the right).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, PlaneWindow};
use crate::hamiltonian::Hamiltonian;
use crate::linalg;
use crate::maps::MapExpr;
use crate::parallel;
use crate::phase_space::{
    circle_dist, mesh_size, riemannian_distance, sample_points, Manifold, Point,
};
use crate::{Error, Result};

/// Two-sided estimate of a sup-type quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    /// `+inf` when no Lipschitz/refinement certificate is available.
    pub upper: f64,
    pub method: String,
    /// Covering radius of the grid the lower bound was taken on.
    pub mesh: f64,
    /// Lipschitz bound used for the upper certificate, if any.
    pub lipschitz: Option<f64>,
}

impl NormEstimate {
    fn check(self) -> NormEstimate {
        debug_assert!(self.lower >= 0.0 && self.lower <= self.upper + 1e-15);
        self
    }

    /// Width of the bracket; `+inf` without an upper certificate.
    pub fn margin(&self) -> f64 {
        self.upper - self.lower
    }
}

fn sampling_window(maps: &[&MapExpr]) -> PlaneWindow {
    let mut window = PlaneWindow::default();
    for f in maps {
        if let Some(w) = f.support_window() {
            window = window.union(&w);
        }
    }
    window.inflate(0.25)
}

/// Max over the grid of `d(f(x), g(x))` plus a Lipschitz upper certificate.
pub fn c0_distance(f: &MapExpr, g: &MapExpr, grid: &GridSpec) -> Result<NormEstimate> {
    grid.validate()?;
    let mf = f.manifold()?;
    if mf != g.manifold()? {
        return Err(Error::domain("c0_distance needs maps on the same surface"));
    }
    let window = sampling_window(&[f, g]);
    let points = sample_points(mf, grid, &window);
    // One sweep collects the pointwise displacement and the sampled
    // derivative sups of both maps (the Lipschitz data for the upper bound).
    let rows = parallel::map_indexed(points.len(), |i| {
        let p = &points[i];
        let (fp, tf) = f.evaluate_with_tangent(p)?;
        let (gp, tg) = g.evaluate_with_tangent(p)?;
        Ok::<_, Error>((
            riemannian_distance(&fp, &gp)?,
            tf.restrict(p, &fp).sigma_max(),
            tg.restrict(p, &gp).sigma_max(),
        ))
    });
    let mut lower = 0.0_f64;
    let mut lip_f = 0.0_f64;
    let mut lip_g = 0.0_f64;
    for row in rows {
        let (d, sf, sg) = row?;
        lower = lower.max(d);
        lip_f = lip_f.max(sf);
        lip_g = lip_g.max(sg);
    }
    let mesh = mesh_size(mf, grid, &window);
    // |d(fx,gx) - d(fy,gy)| <= (Lip f + Lip g) d(x,y); the sampled sups are
    // inflated 10% to stand in for true sups.
    let lip = 1.1 * (lip_f + lip_g);
    Ok(NormEstimate {
        lower,
        upper: lower + lip * mesh,
        method: format!("grid max + Lipschitz certificate ({})", grid.describe()),
        mesh,
        lipschitz: Some(lip),
    }
    .check())
}

/// Max over the grid of the largest singular value of `Df` in orthonormal
/// frames, with an upper estimate from the refinement trend.
pub fn derivative_norm(f: &MapExpr, grid: &GridSpec) -> Result<NormEstimate> {
    grid.validate()?;
    let mf = f.manifold()?;
    let window = sampling_window(&[f]);
    let mut levels = Vec::with_capacity(grid.refine_levels + 1);
    let mut lower = 0.0_f64;
    for level in 0..=grid.refine_levels {
        let g = grid.at_level(level);
        let points = sample_points(mf, &g, &window);
        let vals = parallel::map_indexed(points.len(), |i| f.derivative_at(&points[i]));
        for v in vals {
            lower = lower.max(v?);
        }
        levels.push(lower);
    }
    // Geometric extrapolation of the remaining gain.  Without refinement
    // data there is no certificate and the upper is +inf.
    let upper = match levels.len() {
        1 => f64::INFINITY,
        n => {
            let gain = (levels[n - 1] - levels[n - 2]).max(0.0);
            let ratio = if n >= 3 && levels[n - 2] > levels[n - 3] {
                ((levels[n - 1] - levels[n - 2]) / (levels[n - 2] - levels[n - 3])).clamp(0.0, 0.9)
            } else {
                0.5
            };
            levels[n - 1] + gain * ratio / (1.0 - ratio) + 1e-12
        }
    };
    let finest = grid.at_level(grid.refine_levels);
    Ok(NormEstimate {
        lower,
        upper,
        method: format!(
            "grid max of sigma_max, {} refinement level(s)",
            grid.refine_levels
        ),
        mesh: mesh_size(mf, &finest, &window),
        lipschitz: None,
    }
    .check())
}

/// `osc(H)` for an autonomous Hamiltonian: upper-bounds the Hofer norm of
/// its time-1 flow by definition.
pub fn hofer_upper(h: &Hamiltonian) -> f64 {
    h.oscillation()
}

/// Hofer upper bound for a whole expression tree via bi-invariance and the
/// triangle inequality; `None` when a factor has no generating Hamiltonian
/// with a known oscillation (linear maps).
pub fn hofer_upper_map(f: &MapExpr) -> Option<f64> {
    match f {
        MapExpr::Identity { .. } => Some(0.0),
        MapExpr::Rotation { manifold, alpha } => {
            let a = circle_dist(*alpha, 0.0);
            Some(match manifold {
                // Generated by a*I with osc 1, resp. 2π a z with osc 4π a.
                Manifold::Annulus | Manifold::Plane => a,
                Manifold::Sphere => 4.0 * PI * a,
            })
        }
        // Generated by s I²/2, osc = |s|/2 on I ∈ [0,1].
        MapExpr::Twist { strength } => Some(strength.abs() / 2.0),
        MapExpr::Linear { .. } => None,
        MapExpr::HamFlow {
            hamiltonian, time, ..
        } => Some(time.abs() * hamiltonian.oscillation()),
        MapExpr::Compose { factors } => factors.iter().map(hofer_upper_map).sum(),
        MapExpr::Inverse { inner } => hofer_upper_map(inner),
        MapExpr::Iterate { inner, n } => hofer_upper_map(inner).map(|v| v * n.unsigned_abs() as f64),
    }
}

/// Both sides of the rotation Hofer estimate: the proof's tight bound
/// `Σ |α_i| osc(H_i)` and the stated `2k ‖α‖ ‖μ‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationBound {
    pub tight: f64,
    pub stated: f64,
}

pub fn hofer_rotation_bound(alpha: &[f64], action: &[Hamiltonian]) -> Result<RotationBound> {
    if action.is_empty() || alpha.len() != action.len() {
        return Err(Error::domain(
            "rotation bound needs one Hamiltonian per torus component",
        ));
    }
    let k = alpha.len() as f64;
    let mut tight = 0.0;
    let mut norm_alpha = 0.0_f64;
    let mut mu_inf = 0.0_f64;
    for (a, h) in alpha.iter().zip(action) {
        let ai = circle_dist(*a, 0.0);
        tight += ai * h.oscillation();
        norm_alpha = norm_alpha.max(ai);
        mu_inf = mu_inf.max(h.sup_abs());
    }
    let stated = 2.0 * k * norm_alpha * mu_inf;
    debug_assert!(tight <= stated + 1e-12);
    Ok(RotationBound { tight, stated })
}

/// γ/Hofer value of a C2-small autonomous flow, or a flagged fallback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaBound {
    pub value: f64,
    /// True when the C2-smallness gate passed and `value` is the exact
    /// spectral norm; false when it is only the oscillation upper bound.
    pub exact: bool,
    pub hessian_sup: f64,
    pub threshold: f64,
}

pub const C2_SMALL_THRESHOLD: f64 = 0.1;

pub fn gamma_exact_small(h: &Hamiltonian) -> GammaBound {
    gamma_exact_small_with(h, C2_SMALL_THRESHOLD)
}

pub fn gamma_exact_small_with(h: &Hamiltonian, threshold: f64) -> GammaBound {
    let hessian_sup = h.hessian_sup(256);
    GammaBound {
        value: h.oscillation(),
        exact: hessian_sup <= threshold,
        hessian_sup,
        threshold,
    }
}

/// Energy–capacity lower bound and an explicit displacing upper bound for a
/// metric ball of radius `r`.
pub fn displacement_energy_bounds(
    manifold: Manifold,
    center: &Point,
    r: f64,
) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::domain("ball radius must be positive"));
    }
    let lower = PI * r * r;
    let upper = match manifold {
        Manifold::Plane => {
            // Translation by 2.5r generated by v·S(y) on a strip of half the
            // collar below and above the ball.
            let v = 2.5 * r;
            let collar = 1.5 * r;
            let h = Hamiltonian::PlaneTranslation {
                speed: v,
                y0: center.c[1] - r,
                y1: center.c[1] + r,
                collar,
            };
            hofer_upper(&h)
        }
        Manifold::Annulus => {
            // Full rotation by 2.5r: moves every point 2.5r > 2r along the
            // circle as long as that is still a circle displacement.
            let shift = 2.5 * r;
            if shift > 0.5 {
                return Err(Error::domain("ball too large for the rotation displacer"));
            }
            if center.c[1] - r < 0.0 || center.c[1] + r > 1.0 {
                return Err(Error::domain("ball leaves the annulus"));
            }
            shift
        }
        Manifold::Sphere => {
            // Rotation about the axis; needs the ball away from both poles.
            let rho = linalg::normalize3(center.c)[2].clamp(-1.0, 1.0).acos();
            let rho_min = (rho - r).min(PI - rho - r);
            if rho_min <= r {
                return Err(Error::domain(
                    "ball too close to a rotation pole to displace by rotation",
                ));
            }
            let sin_min = (rho - r).sin().min((rho + r).sin()).abs();
            // Smallest turn moving every ball point further than 2r, +10%.
            let need = (1.0 - (2.0 * r).cos()) / (sin_min * sin_min);
            if need >= 2.0 {
                return Err(Error::domain("no axis rotation displaces this ball"));
            }
            let beta = 1.1 * (1.0 - need).clamp(-1.0, 1.0).acos() / (2.0 * PI);
            // osc of 2π β z over the sphere.
            4.0 * PI * beta.min(0.5)
        }
    };
    Ok((lower, upper))
}

/// Outcome of the non-displacement search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WitnessOutcome {
    /// `y` with `y ∈ B` and `f⁻¹(y) ∈ B`.
    Found { y: Point, preimage: Point },
    /// Search failure at the given mesh — not a disproof.
    NotFound { mesh: f64 },
}

/// Scan the ball `B(x, r)` for a point `z` with `f(z) ∈ B(x, r)`; the image
/// `y = f(z)` then witnesses `f(B) ∩ B ≠ ∅`.
pub fn nondisplacement_witness(
    f: &MapExpr,
    x: &Point,
    r: f64,
    budget: &GridSpec,
) -> Result<WitnessOutcome> {
    if !(r > 0.0) {
        return Err(Error::domain("witness search needs r > 0"));
    }
    budget.validate()?;
    let manifold = f.manifold()?;
    let [n0, n1] = budget.counts;
    let candidates: Vec<Point> = match manifold {
        Manifold::Annulus | Manifold::Plane => {
            let mut out = Vec::with_capacity(n0 * n1);
            for i in 0..n0 {
                for j in 0..n1 {
                    let dx = -r + 2.0 * r * i as f64 / (n0 - 1) as f64;
                    let dy = -r + 2.0 * r * j as f64 / (n1 - 1) as f64;
                    if dx * dx + dy * dy > r * r {
                        continue;
                    }
                    let p = match manifold {
                        Manifold::Annulus => {
                            let act = (x.c[1] + dy).clamp(0.0, 1.0);
                            Point::annulus(x.c[0] + dx, act)
                        }
                        _ => Point::plane(x.c[0] + dx, x.c[1] + dy),
                    };
                    out.push(p);
                }
            }
            out
        }
        Manifold::Sphere => {
            let n = linalg::normalize3(x.c);
            let (e1, e2) = linalg::tangent_basis(n);
            let mut out = vec![*x];
            for i in 1..n0 {
                let s = r * i as f64 / (n0 - 1) as f64;
                for j in 0..n1 {
                    let phi = std::f64::consts::TAU * j as f64 / n1 as f64;
                    let dir = linalg::add3(
                        linalg::scale3(e1, phi.cos()),
                        linalg::scale3(e2, phi.sin()),
                    );
                    let p = linalg::add3(
                        linalg::scale3(n, s.cos()),
                        linalg::scale3(dir, s.sin()),
                    );
                    out.push(Point::sphere(p)?);
                }
            }
            out
        }
    };
    let hits = parallel::map_indexed(candidates.len(), |i| {
        let z = &candidates[i];
        let y = f.evaluate(z)?;
        let d = riemannian_distance(&y, x)?;
        Ok::<_, Error>(if d <= r { Some((y, *z)) } else { None })
    });
    for hit in hits {
        if let Some((y, z)) = hit? {
            return Ok(WitnessOutcome::Found { y, preimage: z });
        }
    }
    Ok(WitnessOutcome::NotFound {
        mesh: 2.0 * r / (n0.max(n1) as f64),
    })
}

/// Result of checking `d_C0(f, Id) ≤ C √γ ‖Df‖` with certified inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub lhs_lower: f64,
    pub deriv_lower: f64,
    /// Derivative estimate inflated by its refinement margin.
    pub deriv_inflated: f64,
    pub rhs: f64,
    pub violation: bool,
}

fn inflate_deriv(deriv: &NormEstimate) -> f64 {
    if deriv.upper.is_finite() {
        deriv.upper
    } else {
        1.1 * deriv.lower
    }
}

pub fn check_holder_inequality(
    f: &MapExpr,
    gamma_ub: f64,
    c: f64,
    grid: &GridSpec,
) -> Result<HolderReport> {
    if gamma_ub < 0.0 {
        return Err(Error::domain("gamma upper bound must be nonnegative"));
    }
    let id = MapExpr::Identity {
        manifold: f.manifold()?,
    };
    let lhs = c0_distance(f, &id, grid)?;
    let deriv = derivative_norm(f, grid)?;
    let deriv_inflated = inflate_deriv(&deriv);
    let rhs = c * gamma_ub.sqrt() * deriv_inflated;
    Ok(HolderReport {
        lhs_lower: lhs.lower,
        deriv_lower: deriv.lower,
        deriv_inflated,
        rhs,
        violation: lhs.lower > rhs,
    })
}

/// Plane refinement `d_C0(f, Id) ≤ √γ (1 + ‖Df‖)` for compactly supported
/// plane maps.
pub fn check_plane_refined(f: &MapExpr, gamma_ub: f64, grid: &GridSpec) -> Result<HolderReport> {
    if gamma_ub < 0.0 {
        return Err(Error::domain("gamma upper bound must be nonnegative"));
    }
    if f.manifold()? != Manifold::Plane {
        return Err(Error::domain("refined inequality is for plane maps"));
    }
    let id = MapExpr::Identity {
        manifold: Manifold::Plane,
    };
    let lhs = c0_distance(f, &id, grid)?;
    let deriv = derivative_norm(f, grid)?;
    let deriv_inflated = inflate_deriv(&deriv);
    let rhs = gamma_ub.sqrt() * (1.0 + deriv_inflated);
    Ok(HolderReport {
        lhs_lower: lhs.lower,
        deriv_lower: deriv.lower,
        deriv_inflated,
        rhs,
        violation: lhs.lower > rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn annulus_rotation(alpha: f64) -> MapExpr {
        MapExpr::Rotation {
            manifold: Manifold::Annulus,
            alpha,
        }
    }

    #[test]
    fn rotation_c0_distance_quarter_turn() {
        let id = MapExpr::Identity {
            manifold: Manifold::Annulus,
        };
        let est = c0_distance(&annulus_rotation(0.25), &id, &GridSpec::new(64, 16)).unwrap();
        // Every annulus point moves exactly 0.25 along the circle.
        assert_abs_diff_eq!(est.lower, 0.25, epsilon = 1e-12);
        assert!(est.upper >= 0.25);
    }

    #[test]
    fn sphere_rotation_c0_distance() {
        let id = MapExpr::Identity {
            manifold: Manifold::Sphere,
        };
        let rot = MapExpr::Rotation {
            manifold: Manifold::Sphere,
            alpha: 0.1,
        };
        let est = c0_distance(&rot, &id, &GridSpec::new(128, 128)).unwrap();
        // Max displacement 0.2π, attained on the equator (on the grid for
        // even polar counts).
        assert_abs_diff_eq!(est.lower, 0.2 * PI, epsilon = 1e-9);
    }

    #[test]
    fn identity_distance_zero() {
        let id = MapExpr::Identity {
            manifold: Manifold::Annulus,
        };
        let est = c0_distance(&id, &id, &GridSpec::new(8, 8)).unwrap();
        assert_eq!(est.lower, 0.0);
    }

    #[test]
    fn twist_derivative_is_golden_ratio() {
        let est =
            derivative_norm(&MapExpr::Twist { strength: 1.0 }, &GridSpec::new(16, 16)).unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(est.lower, golden, epsilon = 1e-9);
    }

    #[test]
    fn plane_linear_derivative() {
        let f = MapExpr::Linear {
            manifold: Manifold::Plane,
            entries: [[2.0, 0.0], [0.0, 0.5]],
        };
        let est = derivative_norm(&f, &GridSpec::with_refinement(8, 8, 2)).unwrap();
        assert_abs_diff_eq!(est.lower, 2.0, epsilon = 1e-12);
        assert!(est.upper >= 2.0 && est.upper.is_finite());
    }

    #[test]
    fn hofer_upper_examples() {
        assert_abs_diff_eq!(
            hofer_upper(&Hamiltonian::AnnulusAction { coeff: 0.3 }),
            0.3
        );
        assert_abs_diff_eq!(
            hofer_upper(&Hamiltonian::SphereHeight { coeff: 0.1 }),
            0.4 * PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rotation_bound_annulus() {
        let b = hofer_rotation_bound(&[0.3], &[Hamiltonian::AnnulusAction { coeff: 1.0 }])
            .unwrap();
        assert_abs_diff_eq!(b.tight, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(b.stated, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn rotation_bound_sphere_coincides() {
        let b = hofer_rotation_bound(&[0.1], &[Hamiltonian::SphereHeight { coeff: 1.0 }])
            .unwrap();
        assert_abs_diff_eq!(b.tight, 0.4 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(b.stated, 0.4 * PI, epsilon = 1e-12);
    }

    #[test]
    fn gamma_small_action() {
        let g = gamma_exact_small(&Hamiltonian::AnnulusAction { coeff: 0.01 });
        assert!(g.exact);
        assert_abs_diff_eq!(g.value, 0.01, epsilon = 1e-15);
    }

    #[test]
    fn displacement_bounds_plane() {
        let (lo, up) =
            displacement_energy_bounds(Manifold::Plane, &Point::plane(0.0, 0.0), 0.1).unwrap();
        assert_abs_diff_eq!(lo, 0.01 * PI, epsilon = 1e-15);
        // 2.5r translation over a (2r + collar) effective height.
        assert_abs_diff_eq!(up, 0.25 * 0.35, epsilon = 1e-12);
        assert!(lo < up);
    }

    #[test]
    fn witness_trivial_and_displaced() {
        let x = Point::annulus(0.5, 0.5);
        let id = MapExpr::Identity {
            manifold: Manifold::Annulus,
        };
        match nondisplacement_witness(&id, &x, 0.05, &GridSpec::new(9, 9)).unwrap() {
            WitnessOutcome::Found { .. } => {}
            other => panic!("expected witness, got {other:?}"),
        }
        match nondisplacement_witness(&annulus_rotation(0.01), &x, 0.1, &GridSpec::new(17, 17))
            .unwrap()
        {
            WitnessOutcome::Found { .. } => {}
            other => panic!("expected witness, got {other:?}"),
        }
        match nondisplacement_witness(&annulus_rotation(0.4), &x, 0.05, &GridSpec::new(17, 17))
            .unwrap()
        {
            WitnessOutcome::NotFound { .. } => {}
            other => panic!("ball is displaced, got {other:?}"),
        }
    }

    #[test]
    fn holder_check_rotation() {
        let report = check_holder_inequality(
            &annulus_rotation(0.01),
            0.01,
            12.7,
            &GridSpec::new(32, 8),
        )
        .unwrap();
        assert!(!report.violation);
        assert_abs_diff_eq!(report.lhs_lower, 0.01, epsilon = 1e-12);
    }

    #[test]
    fn holder_check_identity_zero() {
        let id = MapExpr::Identity {
            manifold: Manifold::Annulus,
        };
        let report = check_holder_inequality(&id, 0.0, 12.7, &GridSpec::new(8, 8)).unwrap();
        assert!(!report.violation);
        assert_eq!(report.lhs_lower, 0.0);
        assert_eq!(report.rhs, 0.0);
    }

    #[test]
    fn plane_refined_bump() {
        let h = Hamiltonian::PlaneRadialBump {
            cx: 0.0,
            cy: 0.0,
            radius: 1.0,
            peak: 0.01,
        };
        let g = gamma_exact_small(&h);
        assert!(g.exact, "hessian sup {}", g.hessian_sup);
        let f = MapExpr::flow(h, 1.0);
        let report = check_plane_refined(&f, g.value, &GridSpec::new(48, 48)).unwrap();
        assert!(!report.violation);
        assert!(report.lhs_lower > 0.0);
    }
}
