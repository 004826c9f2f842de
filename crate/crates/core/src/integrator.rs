//! Implicit midpoint integration of Hamiltonian flows.
//!
//! The midpoint rule `z1 = z0 + dt * X((z0+z1)/2)` is symplectic and second
//! order; the tangent map of each discrete step is the Cayley transform
//! `(I - dt S/2)^{-1} (I + dt S/2)` of the field Jacobian `S` at the
//! midpoint, which has unit determinant whenever `tr S = 0`.  Sphere flows
//! integrate the ambient field with a projection back to the sphere after
//! each step; the projection derivative is folded into the tangent.

use serde::{Deserialize, Serialize};

use crate::hamiltonian::Hamiltonian;
use crate::linalg::{self, Mat2, Mat3, Vec3};
use crate::phase_space::{Manifold, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorParams {
    /// Step size (positive); runs use `ceil(|t|/step)` equal steps.
    pub step: f64,
    /// Fixed-point tolerance for the implicit solve.
    pub tol: f64,
    /// Fixed-point iteration cap.
    pub max_iter: usize,
}

impl Default for IntegratorParams {
    fn default() -> Self {
        IntegratorParams {
            step: 1e-2,
            tol: 1e-13,
            max_iter: 60,
        }
    }
}

impl IntegratorParams {
    pub fn with_step(step: f64) -> Self {
        IntegratorParams {
            step,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::config("invalid integrator parameters"));
        }
        Ok(())
    }

    fn steps_for(&self, t: f64) -> (usize, f64) {
        if t == 0.0 {
            return (0, 0.0);
        }
        let n = (t.abs() / self.step).ceil().max(1.0) as usize;
        (n, t / n as f64)
    }
}

fn midpoint_step_planar(
    h: &Hamiltonian,
    manifold: Manifold,
    z: [f64; 2],
    dt: f64,
    params: &IntegratorParams,
    t_now: f64,
) -> Result<[f64; 2]> {
    let point = |c: [f64; 2]| Point {
        manifold,
        c: [c[0], c[1], 0.0],
    };
    let mut z1 = {
        // Explicit Euler predictor.
        let v = h.velocity(&point(z));
        [z[0] + dt * v[0], z[1] + dt * v[1]]
    };
    for _ in 0..params.max_iter {
        let mid = point([(z[0] + z1[0]) / 2.0, (z[1] + z1[1]) / 2.0]);
        let v = h.velocity(&mid);
        let next = [z[0] + dt * v[0], z[1] + dt * v[1]];
        let delta = ((next[0] - z1[0]).powi(2) + (next[1] - z1[1]).powi(2)).sqrt();
        z1 = next;
        if delta <= params.tol {
            return Ok(z1);
        }
    }
    Err(Error::Integration {
        t: t_now,
        step: dt,
        message: format!("fixed point did not converge at z = {z:?}"),
    })
}

/// Tangent map of one planar midpoint step: Cayley transform of `dt*S/2`.
fn cayley2(s: &Mat2, dt: f64) -> Mat2 {
    let half = dt / 2.0;
    // (I - h S)^{-1} (I + h S) with h = dt/2.
    let a = Mat2::new(
        1.0 - half * s.m[0][0],
        -half * s.m[0][1],
        -half * s.m[1][0],
        1.0 - half * s.m[1][1],
    );
    let b = Mat2::new(
        1.0 + half * s.m[0][0],
        half * s.m[0][1],
        half * s.m[1][0],
        1.0 + half * s.m[1][1],
    );
    let det = a.det();
    let inv = Mat2::new(
        a.m[1][1] / det,
        -a.m[0][1] / det,
        -a.m[1][0] / det,
        a.m[0][0] / det,
    );
    inv.mul(&b)
}

/// Flow the planar (annulus/plane) Hamiltonian for time `t`, optionally
/// propagating the tangent map.
pub fn flow_planar(
    h: &Hamiltonian,
    manifold: Manifold,
    start: &Point,
    t: f64,
    params: &IntegratorParams,
    mut tangent: Option<&mut Mat2>,
) -> Result<Point> {
    let (n, dt) = params.steps_for(t);
    let mut z = [start.c[0], start.c[1]];
    for k in 0..n {
        let z1 = midpoint_step_planar(h, manifold, z, dt, params, k as f64 * dt)?;
        if let Some(tg) = tangent.as_deref_mut() {
            let mid = Point {
                manifold,
                c: [(z[0] + z1[0]) / 2.0, (z[1] + z1[1]) / 2.0, 0.0],
            };
            let s = h.velocity_jacobian_planar(&mid);
            *tg = cayley2(&s, dt).mul(tg);
        }
        z = z1;
    }
    Ok(match manifold {
        Manifold::Annulus => Point::annulus(z[0], z[1]),
        Manifold::Plane => Point::plane(z[0], z[1]),
        Manifold::Sphere => unreachable!(),
    })
}

fn solve3(a: &Mat3, b: Vec3) -> Vec3 {
    // Cramer's rule; matrices here are well-conditioned perturbations of I.
    let m = &a.m;
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let col = |idx: usize| {
        let mut mm = *m;
        for (row, mr) in mm.iter_mut().enumerate() {
            mr[idx] = b[row];
        }
        mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1])
            - mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0])
            + mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0])
    };
    [col(0) / det, col(1) / det, col(2) / det]
}

fn cayley3(s: &Mat3, dt: f64) -> Mat3 {
    let half = dt / 2.0;
    let mut a = Mat3::IDENTITY;
    let mut b = Mat3::IDENTITY;
    for i in 0..3 {
        for j in 0..3 {
            a.m[i][j] -= half * s.m[i][j];
            b.m[i][j] += half * s.m[i][j];
        }
    }
    // Columns of a^{-1} b.
    let mut out = Mat3::IDENTITY;
    for j in 0..3 {
        let bj = [b.m[0][j], b.m[1][j], b.m[2][j]];
        let x = solve3(&a, bj);
        out.m[0][j] = x[0];
        out.m[1][j] = x[1];
        out.m[2][j] = x[2];
    }
    out
}

/// Flow a sphere Hamiltonian in ambient coordinates, re-projecting to the
/// sphere each step.  Returns the end point; `tangent`, when requested,
/// accumulates the ambient tangent including the projection derivatives.
pub fn flow_sphere(
    h: &Hamiltonian,
    start: &Point,
    t: f64,
    params: &IntegratorParams,
    mut tangent: Option<&mut Mat3>,
) -> Result<Point> {
    let (n, dt) = params.steps_for(t);
    let mut z = start.c;
    for k in 0..n {
        let point = |c: Vec3| Point {
            manifold: Manifold::Sphere,
            c,
        };
        let mut z1 = {
            let v = h.velocity(&point(z));
            linalg::add3(z, linalg::scale3(v, dt))
        };
        let mut converged = false;
        for _ in 0..params.max_iter {
            let mid = point(linalg::scale3(linalg::add3(z, z1), 0.5));
            let v = h.velocity(&mid);
            let next = linalg::add3(z, linalg::scale3(v, dt));
            let delta = linalg::norm3(linalg::sub3(next, z1));
            z1 = next;
            if delta <= params.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Integration {
                t: k as f64 * dt,
                step: dt,
                message: "sphere fixed point did not converge".into(),
            });
        }
        if let Some(tg) = tangent.as_deref_mut() {
            let mid = point(linalg::scale3(linalg::add3(z, z1), 0.5));
            let s = h.velocity_jacobian_ambient(&mid);
            *tg = cayley3(&s, dt).mul(tg);
        }
        // Project back to the sphere.
        let nrm = linalg::norm3(z1);
        if let Some(tg) = tangent.as_deref_mut() {
            // D(x/|x|) = (I - n n^T)/|x| at x = z1.
            let nn = linalg::scale3(z1, 1.0 / nrm);
            let mut proj = Mat3::IDENTITY;
            for i in 0..3 {
                for j in 0..3 {
                    proj.m[i][j] = (if i == j { 1.0 } else { 0.0 }) - nn[i] * nn[j];
                    proj.m[i][j] /= nrm;
                }
            }
            *tg = proj.mul(tg);
        }
        z = linalg::scale3(z1, 1.0 / nrm);
    }
    Ok(Point {
        manifold: Manifold::Sphere,
        c: z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::circle_dist;
    use approx::assert_abs_diff_eq;

    #[test]
    fn action_flow_is_rotation() {
        // Closed-form flow of 0.3*I equals Rotation(0.3).
        let h = Hamiltonian::AnnulusAction { coeff: 0.3 };
        let params = IntegratorParams::default();
        let p = Point::annulus(0.2, 0.7);
        let q = flow_planar(&h, Manifold::Annulus, &p, 1.0, &params, None).unwrap();
        assert!(circle_dist(q.c[0], 0.5) < 1e-10);
        assert_abs_diff_eq!(q.c[1], 0.7, epsilon = 1e-12);
    }

    #[test]
    fn reverse_flow_inverts() {
        let h = Hamiltonian::AnnulusConjugator {
            frequency: 2,
            phase: 0.0,
            amplitude: 0.8,
            profile: Default::default(),
        };
        let params = IntegratorParams::with_step(1e-3);
        let p = Point::annulus(0.31, 0.47);
        let q = flow_planar(&h, Manifold::Annulus, &p, 1.0, &params, None).unwrap();
        let back = flow_planar(&h, Manifold::Annulus, &q, -1.0, &params, None).unwrap();
        assert!(circle_dist(back.c[0], p.c[0]) < 1e-10);
        assert_abs_diff_eq!(back.c[1], p.c[1], epsilon = 1e-10);
    }

    #[test]
    fn tangent_determinant_is_one() {
        let h = Hamiltonian::AnnulusConjugator {
            frequency: 3,
            phase: 0.2,
            amplitude: 1.1,
            profile: Default::default(),
        };
        let params = IntegratorParams::with_step(1e-3);
        let p = Point::annulus(0.13, 0.52);
        let mut tg = Mat2::IDENTITY;
        flow_planar(&h, Manifold::Annulus, &p, 1.0, &params, Some(&mut tg)).unwrap();
        assert_abs_diff_eq!(tg.det(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sphere_height_flow_rotates() {
        let h = Hamiltonian::SphereHeight { coeff: 0.25 };
        let params = IntegratorParams::with_step(1e-3);
        let p = Point::sphere([1.0, 0.0, 0.0]).unwrap();
        let q = flow_sphere(&h, &p, 1.0, &params, None).unwrap();
        // Quarter turn about z; phase error is O(step^2).
        assert_abs_diff_eq!(q.c[0], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(q.c[1], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(q.c[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn midpoint_c0_error_second_order() {
        // Against the exact rotation, halving the step shrinks the flow
        // error for the conjugator family roughly 4x.
        let h = Hamiltonian::AnnulusConjugator {
            frequency: 2,
            phase: 0.7,
            amplitude: 1.0,
            profile: Default::default(),
        };
        let p = Point::annulus(0.41, 0.55);
        let fine = flow_planar(
            &h,
            Manifold::Annulus,
            &p,
            1.0,
            &IntegratorParams::with_step(1e-4),
            None,
        )
        .unwrap();
        let err = |step: f64| {
            let q = flow_planar(
                &h,
                Manifold::Annulus,
                &p,
                1.0,
                &IntegratorParams::with_step(step),
                None,
            )
            .unwrap();
            crate::phase_space::riemannian_distance(&q, &fine).unwrap()
        };
        let e1 = err(4e-2);
        let e2 = err(2e-2);
        assert!(e2 < e1 / 2.5, "e1={e1}, e2={e2}");
    }
}
