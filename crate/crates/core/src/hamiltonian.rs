//! Closed-form generating Hamiltonians.
//!
//! Every family ships its value, Hamiltonian vector field, the field's
//! Jacobian (for the variational equation), exact oscillation `max - min`,
//! sup norm, and a Hessian sup estimate for the C2-smallness gate.
//!
//! Sign convention on the annulus and plane (coordinates `(q, p)` =
//! `(theta, I)` resp. `(x, y)`): `q_dot = dH/dp`, `p_dot = -dH/dq`, so the
//! flow of `c * I` is the rotation `theta -> theta + c t`.  On the sphere the
//! field is ambient: `X_H(p) = grad(H) x p`, so the flow of `2 pi c z` is the
//! rotation about the z-axis by `c` turns per unit time.

use serde::{Deserialize, Serialize};

use crate::grid::PlaneWindow;
use crate::linalg::{Mat2, Mat3, Vec3};
use crate::phase_space::{Manifold, Point};

const TAU: f64 = std::f64::consts::TAU;

/// C2 smoothstep `6t^5 - 15t^4 + 10t^3` clamped to `[0, 1]`.
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

fn smoothstep_d1(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

fn smoothstep_d2(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    }
}

/// Antiderivative of smoothstep with value 0 at `t = 0`; equals `t - 1/2`
/// for `t >= 1`.
fn smoothstep_int(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        t - 0.5
    } else {
        let t4 = t * t * t * t;
        t4 * (2.5 + t * (-3.0 + t)) // t^6 - 3 t^5 + 2.5 t^4
    }
}

/// Smooth bump in the action variable, vanishing identically outside
/// `(rise.0, fall.1)` and equal to 1 on the plateau `[rise.1, fall.0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub rise: (f64, f64),
    pub fall: (f64, f64),
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile {
            rise: (0.05, 0.30),
            fall: (0.70, 0.95),
        }
    }
}

impl BumpProfile {
    pub fn value(&self, x: f64) -> f64 {
        let up = smoothstep((x - self.rise.0) / (self.rise.1 - self.rise.0));
        let down = smoothstep((self.fall.1 - x) / (self.fall.1 - self.fall.0));
        up * down
    }

    pub fn d1(&self, x: f64) -> f64 {
        let wu = self.rise.1 - self.rise.0;
        let wd = self.fall.1 - self.fall.0;
        let tu = (x - self.rise.0) / wu;
        let td = (self.fall.1 - x) / wd;
        smoothstep_d1(tu) / wu * smoothstep(td) - smoothstep(tu) * smoothstep_d1(td) / wd
    }

    pub fn d2(&self, x: f64) -> f64 {
        let wu = self.rise.1 - self.rise.0;
        let wd = self.fall.1 - self.fall.0;
        let tu = (x - self.rise.0) / wu;
        let td = (self.fall.1 - x) / wd;
        smoothstep_d2(tu) / (wu * wu) * smoothstep(td)
            - 2.0 * smoothstep_d1(tu) / wu * smoothstep_d1(td) / wd
            + smoothstep(tu) * smoothstep_d2(td) / (wd * wd)
    }

    /// Width of the collar on which the bump vanishes near 0 and 1.
    pub fn boundary_collar(&self) -> f64 {
        self.rise.0.min(1.0 - self.fall.1)
    }
}

/// The closed-form Hamiltonian families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Hamiltonian {
    /// `c * I` on the annulus; time-1 flow is `Rotation(c)`.
    AnnulusAction { coeff: f64 },
    /// `amplitude * A(I) * sin(2 pi q theta + phase) / (2 pi q)`.  The flow
    /// commutes exactly with rotation by any multiple of `1/q` and is the
    /// identity on the boundary collar where `A` vanishes.
    AnnulusConjugator {
        frequency: u32,
        phase: f64,
        amplitude: f64,
        profile: BumpProfile,
    },
    /// `2 pi c z` on the sphere; time-1 flow is `Rotation(c)` about z.
    SphereHeight { coeff: f64 },
    /// `peak * (1 - (rho/radius)^2)^3` inside the disc of `radius` about
    /// `(cx, cy)`, zero outside.
    PlaneRadialBump {
        cx: f64,
        cy: f64,
        radius: f64,
        peak: f64,
    },
    /// Cut-off translation: `speed * S(y)` where `S' = 1` on `[y0, y1]` with
    /// smooth collars of width `collar`.  The flow translates the strip in x.
    PlaneTranslation {
        speed: f64,
        y0: f64,
        y1: f64,
        collar: f64,
    },
}

impl Hamiltonian {
    pub fn manifold(&self) -> Manifold {
        match self {
            Hamiltonian::AnnulusAction { .. } | Hamiltonian::AnnulusConjugator { .. } => {
                Manifold::Annulus
            }
            Hamiltonian::SphereHeight { .. } => Manifold::Sphere,
            Hamiltonian::PlaneRadialBump { .. } | Hamiltonian::PlaneTranslation { .. } => {
                Manifold::Plane
            }
        }
    }

    pub fn value(&self, p: &Point) -> f64 {
        match self {
            Hamiltonian::AnnulusAction { coeff } => coeff * p.c[1],
            Hamiltonian::AnnulusConjugator {
                frequency,
                phase,
                amplitude,
                profile,
            } => {
                let q = *frequency as f64;
                let psi = TAU * (q * p.c[0]).rem_euclid(1.0) + phase;
                amplitude * profile.value(p.c[1]) * psi.sin() / (TAU * q)
            }
            Hamiltonian::SphereHeight { coeff } => TAU * coeff * p.c[2],
            Hamiltonian::PlaneRadialBump {
                cx,
                cy,
                radius,
                peak,
            } => {
                let s2 = ((p.c[0] - cx).powi(2) + (p.c[1] - cy).powi(2)) / (radius * radius);
                if s2 >= 1.0 {
                    0.0
                } else {
                    peak * (1.0 - s2).powi(3)
                }
            }
            Hamiltonian::PlaneTranslation {
                speed,
                y0,
                y1,
                collar,
            } => {
                let y = p.c[1];
                // S(y) = int S'(u) du, piecewise over rising collar,
                // plateau, falling collar.
                let s = if y <= y0 - collar {
                    0.0
                } else if y <= *y0 {
                    collar * smoothstep_int((y - (y0 - collar)) / collar)
                } else if y <= *y1 {
                    collar * 0.5 + (y - y0)
                } else if y <= y1 + collar {
                    collar * 0.5
                        + (y1 - y0)
                        + collar * (0.5 - smoothstep_int(1.0 - (y - y1) / collar))
                } else {
                    (y1 - y0) + collar
                };
                speed * s
            }
        }
    }

    /// Hamiltonian vector field at `p`, as chart-coordinate velocity for the
    /// annulus/plane (third component unused) or an ambient 3-vector for the
    /// sphere.
    pub fn velocity(&self, p: &Point) -> Vec3 {
        match self {
            Hamiltonian::AnnulusAction { coeff } => [*coeff, 0.0, 0.0],
            Hamiltonian::AnnulusConjugator {
                frequency,
                phase,
                amplitude,
                profile,
            } => {
                let q = *frequency as f64;
                let psi = TAU * (q * p.c[0]).rem_euclid(1.0) + phase;
                let a = profile.value(p.c[1]) * amplitude;
                let a1 = profile.d1(p.c[1]) * amplitude;
                [a1 * psi.sin() / (TAU * q), -a * psi.cos(), 0.0]
            }
            Hamiltonian::SphereHeight { coeff } => {
                // grad(2 pi c z) x p
                let w = TAU * coeff;
                [-w * p.c[1], w * p.c[0], 0.0]
            }
            Hamiltonian::PlaneRadialBump {
                cx,
                cy,
                radius,
                peak,
            } => {
                let (dx, dy) = (p.c[0] - cx, p.c[1] - cy);
                let s2 = (dx * dx + dy * dy) / (radius * radius);
                if s2 >= 1.0 {
                    return [0.0, 0.0, 0.0];
                }
                // H = P f(s), f = (1-s^2)^3; dH = P f'(s)/ (R rho) * (dx, dy)
                // with f'(s)/s = -6 (1-s^2)^2 regular at the center.
                let fp_over_s = -6.0 * (1.0 - s2) * (1.0 - s2);
                let c = peak * fp_over_s / (radius * radius);
                [c * dy, -c * dx, 0.0]
            }
            Hamiltonian::PlaneTranslation {
                speed,
                y0,
                y1,
                collar,
            } => {
                let y = p.c[1];
                let sp = smoothstep((y - (y0 - collar)) / collar)
                    * smoothstep(((y1 + collar) - y) / collar);
                [speed * sp, 0.0, 0.0]
            }
        }
    }

    /// Jacobian of the planar velocity field (annulus/plane families).
    pub fn velocity_jacobian_planar(&self, p: &Point) -> Mat2 {
        match self {
            Hamiltonian::AnnulusAction { .. } => Mat2::new(0.0, 0.0, 0.0, 0.0),
            Hamiltonian::AnnulusConjugator {
                frequency,
                phase,
                amplitude,
                profile,
            } => {
                let q = *frequency as f64;
                let psi = TAU * (q * p.c[0]).rem_euclid(1.0) + phase;
                let a = profile.value(p.c[1]) * amplitude;
                let a1 = profile.d1(p.c[1]) * amplitude;
                let a2 = profile.d2(p.c[1]) * amplitude;
                Mat2::new(
                    a1 * psi.cos(),
                    a2 * psi.sin() / (TAU * q),
                    a * psi.sin() * TAU * q,
                    -a1 * psi.cos(),
                )
            }
            Hamiltonian::SphereHeight { .. } => {
                unreachable!("sphere fields use velocity_jacobian_ambient")
            }
            Hamiltonian::PlaneRadialBump {
                cx,
                cy,
                radius,
                peak,
            } => {
                let (dx, dy) = (p.c[0] - cx, p.c[1] - cy);
                let r2 = radius * radius;
                let s2 = (dx * dx + dy * dy) / r2;
                if s2 >= 1.0 {
                    return Mat2::new(0.0, 0.0, 0.0, 0.0);
                }
                let u = 1.0 - s2;
                // g(rho) = P f(rho/R): g'(rho)/rho and g''(rho) in terms of s^2.
                let gp_over_rho = peak * (-6.0) * u * u / r2;
                // d/drho [g'(rho)] : g'' = P [f''(s)] / R^2, f'' = -6(1-s^2)^2 + 24 s^2 (1-s^2)
                let gpp = peak * (-6.0 * u * u + 24.0 * s2 * u) / r2;
                let rho2 = dx * dx + dy * dy;
                let (hxx, hyy, hxy);
                if rho2 == 0.0 {
                    hxx = gp_over_rho;
                    hyy = gp_over_rho;
                    hxy = 0.0;
                } else {
                    let (xh2, yh2) = (dx * dx / rho2, dy * dy / rho2);
                    hxx = gpp * xh2 + gp_over_rho * yh2;
                    hyy = gpp * yh2 + gp_over_rho * xh2;
                    hxy = (gpp - gp_over_rho) * dx * dy / rho2;
                }
                Mat2::new(hxy, hyy, -hxx, -hxy)
            }
            Hamiltonian::PlaneTranslation {
                speed,
                y0,
                y1,
                collar,
            } => {
                let y = p.c[1];
                let tu = (y - (y0 - collar)) / collar;
                let td = ((y1 + collar) - y) / collar;
                let spp = smoothstep_d1(tu) / collar * smoothstep(td)
                    - smoothstep(tu) * smoothstep_d1(td) / collar;
                Mat2::new(0.0, speed * spp, 0.0, 0.0)
            }
        }
    }

    /// Ambient Jacobian of the sphere field.
    pub fn velocity_jacobian_ambient(&self, _p: &Point) -> Mat3 {
        match self {
            Hamiltonian::SphereHeight { coeff } => {
                let w = TAU * coeff;
                Mat3 {
                    m: [[0.0, -w, 0.0], [w, 0.0, 0.0], [0.0, 0.0, 0.0]],
                }
            }
            _ => unreachable!("planar fields use velocity_jacobian_planar"),
        }
    }

    /// Exact oscillation `max H - min H` over the surface.
    pub fn oscillation(&self) -> f64 {
        match self {
            Hamiltonian::AnnulusAction { coeff } => coeff.abs(),
            Hamiltonian::AnnulusConjugator {
                frequency,
                amplitude,
                ..
            } => amplitude.abs() / (std::f64::consts::PI * *frequency as f64),
            Hamiltonian::SphereHeight { coeff } => 2.0 * TAU * coeff.abs(),
            Hamiltonian::PlaneRadialBump { peak, .. } => peak.abs(),
            Hamiltonian::PlaneTranslation {
                speed,
                y0,
                y1,
                collar,
            } => speed.abs() * ((y1 - y0) + collar),
        }
    }

    /// Exact sup norm `max |H|`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            Hamiltonian::AnnulusAction { coeff } => coeff.abs(),
            Hamiltonian::AnnulusConjugator {
                frequency,
                amplitude,
                ..
            } => amplitude.abs() / (TAU * *frequency as f64),
            Hamiltonian::SphereHeight { coeff } => TAU * coeff.abs(),
            Hamiltonian::PlaneRadialBump { peak, .. } => peak.abs(),
            Hamiltonian::PlaneTranslation {
                speed,
                y0,
                y1,
                collar,
            } => speed.abs() * ((y1 - y0) + collar),
        }
    }

    /// Sampled sup of the Hessian norm, used by the C2-smallness gate.
    pub fn hessian_sup(&self, samples: usize) -> f64 {
        match self {
            Hamiltonian::AnnulusAction { .. } => 0.0,
            Hamiltonian::SphereHeight { coeff } => TAU * coeff.abs(),
            _ => {
                // The planar velocity Jacobian entries are (signed) second
                // derivatives of H; its sigma_max equals the Hessian norm.
                let window = self.support_window().unwrap_or_default();
                let pts = crate::phase_space::sample_points(
                    self.manifold(),
                    &crate::grid::GridSpec::new(samples, samples),
                    &window,
                );
                pts.iter()
                    .map(|p| self.velocity_jacobian_planar(p).sigma_max())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Bounding window of the support for plane families.
    pub fn support_window(&self) -> Option<PlaneWindow> {
        match self {
            Hamiltonian::PlaneRadialBump {
                cx, cy, radius, ..
            } => Some(PlaneWindow::new(
                cx - radius,
                cx + radius,
                cy - radius,
                cy + radius,
            )),
            Hamiltonian::PlaneTranslation {
                y0, y1, collar, ..
            } => Some(PlaneWindow::new(
                -4.0,
                4.0,
                y0 - collar,
                y1 + collar,
            )),
            _ => None,
        }
    }

    /// For conjugator Hamiltonians: the rotation frequency `q` such that the
    /// flow commutes exactly with `Rotation(j/q)`.
    pub fn invariance_frequency(&self) -> Option<u32> {
        match self {
            Hamiltonian::AnnulusConjugator { frequency, .. } => Some(*frequency),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bump_vanishes_on_collar_and_plateaus() {
        let b = BumpProfile::default();
        assert_eq!(b.value(0.0), 0.0);
        assert_eq!(b.value(0.03), 0.0);
        assert_eq!(b.value(1.0), 0.0);
        assert_eq!(b.value(0.5), 1.0);
        assert_eq!(b.d1(0.5), 0.0);
        assert_eq!(b.d1(0.02), 0.0);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = BumpProfile::default();
        let h = 1e-6;
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let fd1 = (b.value(x + h) - b.value(x - h)) / (2.0 * h);
            let fd2 = (b.value(x + h) - 2.0 * b.value(x) + b.value(x - h)) / (h * h);
            assert_abs_diff_eq!(b.d1(x), fd1, epsilon = 1e-6);
            // Second differences at h = 1e-6 carry ~1e-4 relative rounding
            // noise; |d2| reaches ~60 on the default profile.
            assert_abs_diff_eq!(b.d2(x), fd2, epsilon = 1e-2);
        }
    }

    #[test]
    fn oscillations_closed_form() {
        let h = Hamiltonian::AnnulusAction { coeff: 0.3 };
        assert_abs_diff_eq!(h.oscillation(), 0.3, epsilon = 1e-15);
        let h = Hamiltonian::SphereHeight { coeff: 0.1 };
        assert_abs_diff_eq!(h.oscillation(), 0.4 * std::f64::consts::PI, epsilon = 1e-12);
        let h = Hamiltonian::PlaneRadialBump {
            cx: 0.0,
            cy: 0.0,
            radius: 1.0,
            peak: 0.02,
        };
        assert_abs_diff_eq!(h.oscillation(), 0.02, epsilon = 1e-15);
    }

    #[test]
    fn conjugator_field_jacobian_matches_finite_differences() {
        let h = Hamiltonian::AnnulusConjugator {
            frequency: 3,
            phase: 0.4,
            amplitude: 0.7,
            profile: BumpProfile::default(),
        };
        let eps = 1e-6;
        for i in 0..40 {
            let p = Point::annulus(0.017 + i as f64 * 0.023, 0.08 + (i as f64 * 0.021) % 0.84);
            let j = h.velocity_jacobian_planar(&p);
            for (k, dv) in [(0, [eps, 0.0]), (1, [0.0, eps])] {
                let pp = Point::annulus(p.c[0] + dv[0], p.c[1] + dv[1]);
                let pm = Point::annulus(p.c[0] - dv[0], p.c[1] - dv[1]);
                let vp = h.velocity(&pp);
                let vm = h.velocity(&pm);
                for r in 0..2 {
                    let fd = (vp[r] - vm[r]) / (2.0 * eps);
                    assert_abs_diff_eq!(j.m[r][k], fd, epsilon = 1e-4);
                }
            }
        }
    }

    #[test]
    fn radial_bump_jacobian_matches_finite_differences() {
        let h = Hamiltonian::PlaneRadialBump {
            cx: 0.1,
            cy: -0.2,
            radius: 0.8,
            peak: 0.5,
        };
        let eps = 1e-6;
        for i in 0..40 {
            let p = Point::plane(0.1 + (i as f64 * 0.029) % 0.7 - 0.35, -0.2 + (i as f64 * 0.017) % 0.6 - 0.3);
            let j = h.velocity_jacobian_planar(&p);
            for (k, dv) in [(0, [eps, 0.0]), (1, [0.0, eps])] {
                let vp = h.velocity(&Point::plane(p.c[0] + dv[0], p.c[1] + dv[1]));
                let vm = h.velocity(&Point::plane(p.c[0] - dv[0], p.c[1] - dv[1]));
                for r in 0..2 {
                    let fd = (vp[r] - vm[r]) / (2.0 * eps);
                    assert_abs_diff_eq!(j.m[r][k], fd, epsilon = 1e-4);
                }
            }
        }
    }

    #[test]
    fn translation_value_is_plateau_integral() {
        let h = Hamiltonian::PlaneTranslation {
            speed: 0.25,
            y0: -0.2,
            y1: 0.2,
            collar: 0.1,
        };
        // Below the strip H = 0, above it H = speed * (width + collar).
        assert_abs_diff_eq!(h.value(&Point::plane(0.0, -0.5)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            h.value(&Point::plane(0.0, 0.5)),
            0.25 * 0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(h.oscillation(), 0.25 * 0.5, epsilon = 1e-12);
        // Value matches the integral of the velocity profile.
        let mut acc = 0.0;
        let n = 20000;
        let (a, b) = (-0.4, 0.15);
        let dy = (b - a) / n as f64;
        for i in 0..n {
            let y = a + (i as f64 + 0.5) * dy;
            acc += h.velocity(&Point::plane(0.0, y))[0] * dy;
        }
        assert_abs_diff_eq!(h.value(&Point::plane(0.0, b)), acc, epsilon = 1e-6);
    }

    #[test]
    fn hessian_sup_scales_with_amplitude() {
        let small = Hamiltonian::PlaneRadialBump {
            cx: 0.0,
            cy: 0.0,
            radius: 1.0,
            peak: 0.001,
        };
        let big = Hamiltonian::PlaneRadialBump {
            cx: 0.0,
            cy: 0.0,
            radius: 1.0,
            peak: 1.0,
        };
        let hs = small.hessian_sup(64);
        let hb = big.hessian_sup(64);
        assert!(hs < 0.1);
        assert_abs_diff_eq!(hb * 0.001, hs, epsilon = 1e-12);
    }
}
