//! Composable area-preserving maps.
//!
//! A map is an expression tree over a few generators: rigid rotations,
//! integrable twists, linear maps (torus automorphisms on the annulus read
//! as a torus, hyperbolic linear maps on the plane) and implicit-midpoint
//! Hamiltonian flows.  Trees compose, invert and iterate; evaluation can
//! carry the tangent map along, which is what the derivative-norm and
//! symplecticity estimators consume.

use serde::{Deserialize, Serialize};

use crate::grid::PlaneWindow;
use crate::hamiltonian::Hamiltonian;
use crate::integrator::{self, IntegratorParams};
use crate::linalg::{self, Mat2, Mat3};
use crate::phase_space::{wrap_unit, Manifold, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapExpr {
    Identity {
        manifold: Manifold,
    },
    /// Rigid rotation: `θ -> θ + alpha` (turns) on the annulus, rotation by
    /// `alpha` turns about the z-axis on the sphere.
    Rotation {
        manifold: Manifold,
        alpha: f64,
    },
    /// Integrable annulus twist `(θ, I) -> (θ + strength·I, I)`.
    Twist {
        strength: f64,
    },
    /// Linear map.  On the annulus both coordinates are read mod 1 (torus
    /// automorphism; entries must be integers with determinant ±1).  On the
    /// plane it is the plain linear map and must have determinant 1.
    Linear {
        manifold: Manifold,
        entries: [[f64; 2]; 2],
    },
    /// Time-`time` flow of an autonomous Hamiltonian.
    HamFlow {
        hamiltonian: Hamiltonian,
        time: f64,
        #[serde(default)]
        params: IntegratorParams,
    },
    /// `Compose([f, g, ...])` applies the *last* entry first, i.e. it is
    /// the usual `f ∘ g ∘ ...`.
    Compose {
        factors: Vec<MapExpr>,
    },
    Inverse {
        inner: Box<MapExpr>,
    },
    Iterate {
        inner: Box<MapExpr>,
        n: i64,
    },
}

/// Tangent map carried along an evaluation: 2x2 in surface coordinates for
/// the planar manifolds, ambient 3x3 for the sphere.
#[derive(Debug, Clone, Copy)]
pub enum Tangent {
    Planar(Mat2),
    Ambient(Mat3),
}

impl Tangent {
    fn identity(manifold: Manifold) -> Tangent {
        match manifold {
            Manifold::Sphere => Tangent::Ambient(Mat3::IDENTITY),
            _ => Tangent::Planar(Mat2::IDENTITY),
        }
    }

    /// Restrict to a 2x2 matrix between orthonormal tangent frames at the
    /// start and end points (identity frames for planar manifolds).
    pub fn restrict(&self, start: &Point, end: &Point) -> Mat2 {
        match self {
            Tangent::Planar(m) => *m,
            Tangent::Ambient(m) => {
                let (a1, a2) = linalg::tangent_basis(linalg::normalize3(start.c));
                let (b1, b2) = linalg::tangent_basis(linalg::normalize3(end.c));
                let ma1 = m.apply(a1);
                let ma2 = m.apply(a2);
                Mat2::new(
                    linalg::dot3(b1, ma1),
                    linalg::dot3(b1, ma2),
                    linalg::dot3(b2, ma1),
                    linalg::dot3(b2, ma2),
                )
            }
        }
    }
}

impl MapExpr {
    pub fn flow(hamiltonian: Hamiltonian, time: f64) -> MapExpr {
        MapExpr::HamFlow {
            hamiltonian,
            time,
            params: IntegratorParams::default(),
        }
    }

    pub fn flow_with(hamiltonian: Hamiltonian, time: f64, params: IntegratorParams) -> MapExpr {
        MapExpr::HamFlow {
            hamiltonian,
            time,
            params,
        }
    }

    pub fn compose(factors: Vec<MapExpr>) -> MapExpr {
        MapExpr::Compose { factors }
    }

    pub fn inverse(self) -> MapExpr {
        match self {
            MapExpr::Identity { manifold } => MapExpr::Identity { manifold },
            MapExpr::Rotation { manifold, alpha } => MapExpr::Rotation {
                manifold,
                alpha: -alpha,
            },
            MapExpr::Twist { strength } => MapExpr::Twist {
                strength: -strength,
            },
            MapExpr::HamFlow {
                hamiltonian,
                time,
                params,
            } => MapExpr::HamFlow {
                hamiltonian,
                time: -time,
                params,
            },
            MapExpr::Compose { factors } => MapExpr::Compose {
                factors: factors.into_iter().rev().map(MapExpr::inverse).collect(),
            },
            MapExpr::Inverse { inner } => *inner,
            MapExpr::Iterate { inner, n } => MapExpr::Iterate { inner, n: -n },
            linear @ MapExpr::Linear { .. } => MapExpr::Inverse {
                inner: Box::new(linear),
            },
        }
    }

    pub fn iterate(self, n: i64) -> MapExpr {
        // Exact fast paths where the iterate has a closed form.
        match self {
            MapExpr::Rotation { manifold, alpha } => {
                return MapExpr::Rotation {
                    manifold,
                    alpha: alpha * n as f64,
                }
            }
            MapExpr::Twist { strength } => {
                return MapExpr::Twist {
                    strength: strength * n as f64,
                }
            }
            // (p ∘ R ∘ p⁻¹)ⁿ = p ∘ Rⁿ ∘ p⁻¹ when the outer factors are
            // structurally inverse to each other.
            MapExpr::Compose { ref factors } if factors.len() == 3 => {
                if let MapExpr::Rotation { manifold, alpha } = factors[1] {
                    if factors[0] == factors[2].clone().inverse()
                        || factors[2] == factors[0].clone().inverse()
                    {
                        return MapExpr::Compose {
                            factors: vec![
                                factors[0].clone(),
                                MapExpr::Rotation {
                                    manifold,
                                    alpha: alpha * n as f64,
                                },
                                factors[2].clone(),
                            ],
                        };
                    }
                }
            }
            _ => {}
        }
        MapExpr::Iterate {
            inner: Box::new(self),
            n,
        }
    }

    pub fn manifold(&self) -> Result<Manifold> {
        match self {
            MapExpr::Identity { manifold }
            | MapExpr::Rotation { manifold, .. }
            | MapExpr::Linear { manifold, .. } => Ok(*manifold),
            MapExpr::Twist { .. } => Ok(Manifold::Annulus),
            MapExpr::HamFlow { hamiltonian, .. } => Ok(hamiltonian.manifold()),
            MapExpr::Compose { factors } => {
                let mut found: Option<Manifold> = None;
                for f in factors {
                    let m = f.manifold()?;
                    match found {
                        None => found = Some(m),
                        Some(prev) if prev != m => {
                            return Err(Error::domain(
                                "composition mixes maps of different surfaces",
                            ))
                        }
                        _ => {}
                    }
                }
                found.ok_or_else(|| Error::domain("empty composition"))
            }
            MapExpr::Inverse { inner } => inner.manifold(),
            MapExpr::Iterate { inner, .. } => inner.manifold(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let manifold = self.manifold()?;
        self.validate_on(manifold)
    }

    fn validate_on(&self, manifold: Manifold) -> Result<()> {
        match self {
            MapExpr::Identity { .. } | MapExpr::Rotation { .. } | MapExpr::Twist { .. } => Ok(()),
            MapExpr::Linear { manifold, entries } => {
                let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
                match manifold {
                    Manifold::Annulus => {
                        let integral = entries
                            .iter()
                            .flatten()
                            .all(|e| (e - e.round()).abs() == 0.0);
                        if !integral {
                            return Err(Error::domain(
                                "annulus linear maps must have integer entries (torus automorphism)",
                            ));
                        }
                        if det.abs() != 1.0 {
                            return Err(Error::domain("torus automorphism needs |det| = 1"));
                        }
                    }
                    Manifold::Plane => {
                        if (det - 1.0).abs() > 1e-12 {
                            return Err(Error::domain("plane linear maps must have det = 1"));
                        }
                    }
                    Manifold::Sphere => {
                        return Err(Error::domain("linear maps are not defined on the sphere"))
                    }
                }
                Ok(())
            }
            MapExpr::HamFlow {
                hamiltonian,
                params,
                ..
            } => {
                params.validate()?;
                if hamiltonian.manifold() != manifold {
                    return Err(Error::domain("flow Hamiltonian lives on a different surface"));
                }
                Ok(())
            }
            MapExpr::Compose { factors } => {
                for f in factors {
                    f.validate_on(manifold)?;
                }
                Ok(())
            }
            MapExpr::Inverse { inner } => {
                if matches!(**inner, MapExpr::Linear { .. }) {
                    inner.validate_on(manifold)
                } else {
                    // Normalised away by `inverse`; still accept the raw tree.
                    inner.validate_on(manifold)
                }
            }
            MapExpr::Iterate { inner, .. } => inner.validate_on(manifold),
        }
    }

    /// Apply the map to a point.
    pub fn evaluate(&self, p: &Point) -> Result<Point> {
        self.eval_impl(p, None).map(|(q, _)| q)
    }

    /// Apply the map, returning the image point and the tangent map.
    pub fn evaluate_with_tangent(&self, p: &Point) -> Result<(Point, Tangent)> {
        let manifold = self.manifold()?;
        let tangent = Tangent::identity(manifold);
        let (q, t) = self.eval_impl(p, Some(tangent))?;
        Ok((q, t.expect("tangent requested")))
    }

    fn eval_impl(&self, p: &Point, tangent: Option<Tangent>) -> Result<(Point, Option<Tangent>)> {
        match self {
            MapExpr::Identity { .. } => Ok((*p, tangent)),
            MapExpr::Rotation { manifold, alpha } => {
                let q = match manifold {
                    Manifold::Annulus => Point::annulus(wrap_unit(p.c[0] + alpha), p.c[1]),
                    Manifold::Sphere => {
                        let ang = std::f64::consts::TAU * alpha;
                        let (s, c) = ang.sin_cos();
                        Point {
                            manifold: Manifold::Sphere,
                            c: [
                                c * p.c[0] - s * p.c[1],
                                s * p.c[0] + c * p.c[1],
                                p.c[2],
                            ],
                        }
                    }
                    Manifold::Plane => {
                        let ang = std::f64::consts::TAU * alpha;
                        let (s, c) = ang.sin_cos();
                        Point::plane(c * p.c[0] - s * p.c[1], s * p.c[0] + c * p.c[1])
                    }
                };
                let tangent = tangent.map(|t| match t {
                    Tangent::Planar(m) => {
                        if *manifold == Manifold::Annulus {
                            Tangent::Planar(m)
                        } else {
                            let ang = std::f64::consts::TAU * alpha;
                            let (s, c) = ang.sin_cos();
                            Tangent::Planar(Mat2::new(c, -s, s, c).mul(&m))
                        }
                    }
                    Tangent::Ambient(m) => {
                        let ang = std::f64::consts::TAU * alpha;
                        let (s, c) = ang.sin_cos();
                        let rot = Mat3 {
                            m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
                        };
                        Tangent::Ambient(rot.mul(&m))
                    }
                });
                Ok((q, tangent))
            }
            MapExpr::Twist { strength } => {
                let q = Point::annulus(wrap_unit(p.c[0] + strength * p.c[1]), p.c[1]);
                let tangent = tangent.map(|t| match t {
                    Tangent::Planar(m) => {
                        Tangent::Planar(Mat2::new(1.0, *strength, 0.0, 1.0).mul(&m))
                    }
                    amb => amb,
                });
                Ok((q, tangent))
            }
            MapExpr::Linear { manifold, entries } => {
                let e = entries;
                let x = e[0][0] * p.c[0] + e[0][1] * p.c[1];
                let y = e[1][0] * p.c[0] + e[1][1] * p.c[1];
                let q = match manifold {
                    Manifold::Annulus => Point::annulus(wrap_unit(x), wrap_unit(y)),
                    Manifold::Plane => Point::plane(x, y),
                    Manifold::Sphere => {
                        return Err(Error::domain("linear maps are not defined on the sphere"))
                    }
                };
                let tangent = tangent.map(|t| match t {
                    Tangent::Planar(m) => {
                        Tangent::Planar(Mat2::new(e[0][0], e[0][1], e[1][0], e[1][1]).mul(&m))
                    }
                    amb => amb,
                });
                Ok((q, tangent))
            }
            MapExpr::HamFlow {
                hamiltonian,
                time,
                params,
            } => match hamiltonian.manifold() {
                Manifold::Sphere => {
                    let mut amb = Mat3::IDENTITY;
                    let want = tangent.is_some();
                    let q = integrator::flow_sphere(
                        hamiltonian,
                        p,
                        *time,
                        params,
                        if want { Some(&mut amb) } else { None },
                    )?;
                    let tangent = tangent.map(|t| match t {
                        Tangent::Ambient(m) => Tangent::Ambient(amb.mul(&m)),
                        planar => planar,
                    });
                    Ok((q, tangent))
                }
                manifold => {
                    let mut step = Mat2::IDENTITY;
                    let want = tangent.is_some();
                    let q = integrator::flow_planar(
                        hamiltonian,
                        manifold,
                        p,
                        *time,
                        params,
                        if want { Some(&mut step) } else { None },
                    )?;
                    let tangent = tangent.map(|t| match t {
                        Tangent::Planar(m) => Tangent::Planar(step.mul(&m)),
                        amb => amb,
                    });
                    Ok((q, tangent))
                }
            },
            MapExpr::Compose { factors } => {
                let mut cur = (*p, tangent);
                for f in factors.iter().rev() {
                    cur = f.eval_impl(&cur.0, cur.1)?;
                }
                Ok(cur)
            }
            MapExpr::Inverse { inner } => match &**inner {
                MapExpr::Linear { manifold, entries } => {
                    let e = entries;
                    let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
                    let inv = [
                        [e[1][1] / det, -e[0][1] / det],
                        [-e[1][0] / det, e[0][0] / det],
                    ];
                    MapExpr::Linear {
                        manifold: *manifold,
                        entries: inv,
                    }
                    .eval_impl(p, tangent)
                }
                other => other.clone().inverse().eval_impl(p, tangent),
            },
            MapExpr::Iterate { inner, n } => {
                let (map, count) = if *n < 0 {
                    (inner.as_ref().clone().inverse(), (-n) as u64)
                } else {
                    (inner.as_ref().clone(), *n as u64)
                };
                let mut cur = (*p, tangent);
                for _ in 0..count {
                    cur = map.eval_impl(&cur.0, cur.1)?;
                }
                Ok(cur)
            }
        }
    }

    /// Operator norm of the differential at `p` (restricted to tangent
    /// frames on the sphere).
    pub fn derivative_at(&self, p: &Point) -> Result<f64> {
        let (q, t) = self.evaluate_with_tangent(p)?;
        Ok(t.restrict(p, &q).sigma_max())
    }

    /// `|det Dφ(p) - 1|` measured in orthonormal tangent frames; an exact
    /// area-preserving map has defect 0 up to rounding and integrator
    /// tolerance.
    pub fn symplecticity_defect(&self, p: &Point) -> Result<f64> {
        let (q, t) = self.evaluate_with_tangent(p)?;
        Ok((t.restrict(p, &q).det() - 1.0).abs())
    }

    /// Union of the compact supports of the plane Hamiltonians in the tree,
    /// if every generator moving points has one.
    pub fn support_window(&self) -> Option<PlaneWindow> {
        match self {
            MapExpr::Identity { .. } => None,
            MapExpr::HamFlow { hamiltonian, .. } => hamiltonian.support_window(),
            MapExpr::Compose { factors } => {
                let mut acc: Option<PlaneWindow> = None;
                for f in factors {
                    if let Some(w) = f.support_window() {
                        acc = Some(match acc {
                            Some(prev) => prev.union(&w),
                            None => w,
                        });
                    }
                }
                acc
            }
            MapExpr::Inverse { inner } | MapExpr::Iterate { inner, .. } => inner.support_window(),
            _ => None,
        }
    }
}
