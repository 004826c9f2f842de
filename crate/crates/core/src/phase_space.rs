//! Model surfaces, their Riemannian distances, and Darboux atlases.
//!
//! Three surfaces are supported: the flat annulus `S^1 x [0,1]` (angle
//! `theta` in `[0,1)`, action `I` in `[0,1]`, area form `dI ^ dtheta`, flat
//! product metric), the unit round sphere (area form of total area `4 pi`),
//! and the Euclidean plane (maps compactly supported).  An atlas of Darboux
//! charts with nested compacts `K ⊂ K'` yields the two constants
//! `epsilon = min d(∂K, ∂K')` and `L = max ‖Dψ⁻¹‖`, from which the
//! inequality constants `delta = pi epsilon² / 4L²` and `C = 8L/sqrt(pi)`
//! (raised to `diam(M)/sqrt(delta)` when smaller) are formed.

use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, PlaneWindow};
use crate::linalg::{self, Vec3};
use crate::parallel;
use crate::{Error, Result};

pub const SPHERE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manifold {
    Annulus,
    Sphere,
    Plane,
}

impl Manifold {
    /// Diameter of the surface; the plane uses the window of interest.
    pub fn diameter(&self, window: &PlaneWindow) -> f64 {
        match self {
            Manifold::Annulus => (0.25f64 + 1.0).sqrt(),
            Manifold::Sphere => std::f64::consts::PI,
            Manifold::Plane => window.diameter(),
        }
    }
}

/// A point on one of the model surfaces.
///
/// Coordinates: annulus `(theta, I, _)` with `theta` reduced to `[0,1)`;
/// sphere: unit 3-vector; plane `(x, y, _)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub manifold: Manifold,
    pub c: [f64; 3],
}

/// Reduce to `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed representative of `x mod 1` in `(-0.5, 0.5]`.
pub fn wrap_signed(x: f64) -> f64 {
    let r = wrap_unit(x);
    if r > 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Distance from `x mod 1` to `0` on the circle of circumference 1.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    wrap_signed(a - b).abs()
}

impl Point {
    pub fn annulus(theta: f64, action: f64) -> Point {
        Point {
            manifold: Manifold::Annulus,
            c: [wrap_unit(theta), action, 0.0],
        }
    }

    pub fn plane(x: f64, y: f64) -> Point {
        Point {
            manifold: Manifold::Plane,
            c: [x, y, 0.0],
        }
    }

    pub fn sphere(v: Vec3) -> Result<Point> {
        let n = linalg::norm3(v);
        if (n - 1.0).abs() > 1e-6 {
            return Err(Error::domain(format!(
                "sphere point has norm {n}, expected 1"
            )));
        }
        Ok(Point {
            manifold: Manifold::Sphere,
            c: linalg::scale3(v, 1.0 / n),
        })
    }

    /// Sphere point from polar angle `rho` (from the north pole) and
    /// azimuth fraction `phi` in turns.
    pub fn sphere_polar(rho: f64, phi_turns: f64) -> Point {
        let phi = 2.0 * std::f64::consts::PI * phi_turns;
        Point {
            manifold: Manifold::Sphere,
            c: [
                rho.sin() * phi.cos(),
                rho.sin() * phi.sin(),
                rho.cos(),
            ],
        }
    }

    pub fn theta(&self) -> f64 {
        self.c[0]
    }

    pub fn action(&self) -> f64 {
        self.c[1]
    }
}

/// Riemannian distance between two points on the same surface.
pub fn riemannian_distance(p: &Point, q: &Point) -> Result<f64> {
    if p.manifold != q.manifold {
        return Err(Error::domain("distance between points on different manifolds"));
    }
    Ok(match p.manifold {
        Manifold::Annulus => {
            let dt = circle_dist(p.c[0], q.c[0]);
            let di = p.c[1] - q.c[1];
            (dt * dt + di * di).sqrt()
        }
        Manifold::Sphere => linalg::dot3(p.c, q.c).clamp(-1.0, 1.0).acos(),
        Manifold::Plane => {
            let dx = p.c[0] - q.c[0];
            let dy = p.c[1] - q.c[1];
            (dx * dx + dy * dy).sqrt()
        }
    })
}

/// Uniform sample grid of the surface.  The sphere is sampled uniformly in
/// polar angle and azimuth (both poles included), so the equator lies on the
/// grid for even polar counts.
pub fn sample_points(manifold: Manifold, grid: &GridSpec, window: &PlaneWindow) -> Vec<Point> {
    let [n0, n1] = grid.counts;
    let mut pts = Vec::with_capacity(n0.saturating_add(1) * n1.saturating_add(1));
    match manifold {
        Manifold::Annulus => {
            for i in 0..n0 {
                let theta = i as f64 / n0 as f64;
                for j in 0..n1 {
                    let action = j as f64 / (n1 - 1) as f64;
                    pts.push(Point::annulus(theta, action));
                }
            }
        }
        Manifold::Sphere => {
            for i in 0..=n0 {
                let rho = std::f64::consts::PI * i as f64 / n0 as f64;
                // One azimuth suffices at the poles.
                let nphi = if i == 0 || i == n0 { 1 } else { n1 };
                for j in 0..nphi {
                    pts.push(Point::sphere_polar(rho, j as f64 / n1 as f64));
                }
            }
        }
        Manifold::Plane => {
            for i in 0..n0 {
                let x = window.x0 + (window.x1 - window.x0) * i as f64 / (n0 - 1) as f64;
                for j in 0..n1 {
                    let y = window.y0 + (window.y1 - window.y0) * j as f64 / (n1 - 1) as f64;
                    pts.push(Point::plane(x, y));
                }
            }
        }
    }
    pts
}

/// Covering radius of the sample grid: every point of the surface is within
/// this distance of some sample.
pub fn mesh_size(manifold: Manifold, grid: &GridSpec, window: &PlaneWindow) -> f64 {
    let [n0, n1] = grid.counts;
    match manifold {
        Manifold::Annulus => {
            let h0 = 1.0 / n0 as f64;
            let h1 = 1.0 / (n1 - 1) as f64;
            0.5 * (h0 * h0 + h1 * h1).sqrt()
        }
        Manifold::Sphere => {
            let h0 = std::f64::consts::PI / n0 as f64;
            let h1 = 2.0 * std::f64::consts::PI / n1 as f64;
            0.5 * (h0 * h0 + h1 * h1).sqrt()
        }
        Manifold::Plane => {
            let h0 = (window.x1 - window.x0) / (n0 - 1) as f64;
            let h1 = (window.y1 - window.y0) / (n1 - 1) as f64;
            0.5 * (h0 * h0 + h1 * h1).sqrt()
        }
    }
}

// ---------------------------------------------------------------------------
// Darboux charts
// ---------------------------------------------------------------------------

/// A Darboux chart with nested compacts `K ⊂ K' ⊂ U`.
///
/// Annulus chart sets are theta-slabs times the full action interval; their
/// boundary is taken in the circle factor (the action boundary is the
/// boundary of the surface itself).  Sphere charts use symplectic polar
/// coordinates `u = sqrt(2(1-z)) cos(phi)`, `v = sqrt(2(1-z)) sin(phi)`
/// about a pole, with `K`, `K'` the caps above a `z`-threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DarbouxChart {
    PlaneBox { k_half: f64, kp_half: f64 },
    AnnulusStrip { center: f64, k_half: f64, kp_half: f64 },
    SpherePolar { south: bool, z_k: f64, z_kp: f64 },
}

impl DarbouxChart {
    pub fn manifold(&self) -> Manifold {
        match self {
            DarbouxChart::PlaneBox { .. } => Manifold::Plane,
            DarbouxChart::AnnulusStrip { .. } => Manifold::Annulus,
            DarbouxChart::SpherePolar { .. } => Manifold::Sphere,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DarbouxChart::PlaneBox { k_half, kp_half } => 0.0 < *k_half && k_half < kp_half,
            DarbouxChart::AnnulusStrip {
                k_half, kp_half, ..
            } => 0.0 < *k_half && k_half < kp_half && *kp_half < 0.5,
            DarbouxChart::SpherePolar { z_k, z_kp, .. } => {
                -1.0 < *z_kp && z_kp < z_k && *z_k < 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid chart compacts: {self:?}")))
        }
    }

    pub fn contains_interior_k(&self, p: &Point) -> bool {
        match self {
            DarbouxChart::PlaneBox { k_half, .. } => {
                p.c[0].abs() < *k_half && p.c[1].abs() < *k_half
            }
            DarbouxChart::AnnulusStrip { center, k_half, .. } => {
                circle_dist(p.c[0], *center) < *k_half
            }
            DarbouxChart::SpherePolar { south, z_k, .. } => {
                let z = if *south { -p.c[2] } else { p.c[2] };
                z > *z_k
            }
        }
    }

    pub fn contains_kp(&self, p: &Point) -> bool {
        match self {
            DarbouxChart::PlaneBox { kp_half, .. } => {
                p.c[0].abs() <= *kp_half && p.c[1].abs() <= *kp_half
            }
            DarbouxChart::AnnulusStrip {
                center, kp_half, ..
            } => circle_dist(p.c[0], *center) <= *kp_half,
            DarbouxChart::SpherePolar { south, z_kp, .. } => {
                let z = if *south { -p.c[2] } else { p.c[2] };
                z >= *z_kp
            }
        }
    }

    /// Forward chart map to standard `R^2` coordinates.
    pub fn psi(&self, p: &Point) -> [f64; 2] {
        match self {
            DarbouxChart::PlaneBox { .. } => [p.c[0], p.c[1]],
            DarbouxChart::AnnulusStrip { center, .. } => {
                [center + wrap_signed(p.c[0] - center), p.c[1]]
            }
            DarbouxChart::SpherePolar { south, .. } => {
                let (x, y, z) = if *south {
                    (p.c[0], -p.c[1], -p.c[2])
                } else {
                    (p.c[0], p.c[1], p.c[2])
                };
                // u^2 + v^2 = 2(1-z)
                let s = (2.0 / (1.0 + z).max(1e-300)).sqrt();
                [x * s, y * s]
            }
        }
    }

    pub fn psi_inv(&self, uv: [f64; 2]) -> Point {
        match self {
            DarbouxChart::PlaneBox { .. } => Point::plane(uv[0], uv[1]),
            DarbouxChart::AnnulusStrip { .. } => Point::annulus(uv[0], uv[1]),
            DarbouxChart::SpherePolar { south, .. } => {
                let rho2 = uv[0] * uv[0] + uv[1] * uv[1];
                let w = (1.0 - rho2 / 4.0).max(0.0).sqrt();
                let (x, y, z) = (uv[0] * w, uv[1] * w, 1.0 - rho2 / 2.0);
                let c = if *south { [x, -y, -z] } else { [x, y, z] };
                Point {
                    manifold: Manifold::Sphere,
                    c: linalg::normalize3(c),
                }
            }
        }
    }

    /// Operator norm of `D psi^{-1}` at chart coordinates `uv`, with respect
    /// to the Euclidean metric on the chart and the surface metric.
    pub fn opnorm_dpsi_inv(&self, uv: [f64; 2]) -> f64 {
        match self {
            DarbouxChart::PlaneBox { .. } | DarbouxChart::AnnulusStrip { .. } => 1.0,
            DarbouxChart::SpherePolar { .. } => {
                let (u, v) = (uv[0], uv[1]);
                let rho2 = u * u + v * v;
                let w = (1.0 - rho2 / 4.0).max(1e-12).sqrt();
                // Ambient partials of (u w, v w, 1 - rho2/2).
                let j = [
                    [w - u * u / (4.0 * w), -u * v / (4.0 * w)],
                    [-u * v / (4.0 * w), w - v * v / (4.0 * w)],
                    [-u, -v],
                ];
                // Largest singular value via J^T J.
                let a = j[0][0] * j[0][0] + j[1][0] * j[1][0] + j[2][0] * j[2][0];
                let b = j[0][0] * j[0][1] + j[1][0] * j[1][1] + j[2][0] * j[2][1];
                let d = j[0][1] * j[0][1] + j[1][1] * j[1][1] + j[2][1] * j[2][1];
                let disc = ((a - d) * (a - d) + 4.0 * b * b).max(0.0).sqrt();
                (((a + d) + disc) / 2.0).max(0.0).sqrt()
            }
        }
    }

    /// `|det D psi - 1|` measured against the surface area form, at `uv`.
    pub fn area_defect(&self, uv: [f64; 2]) -> f64 {
        match self {
            DarbouxChart::PlaneBox { .. } | DarbouxChart::AnnulusStrip { .. } => 0.0,
            DarbouxChart::SpherePolar { .. } => {
                let (u, v) = (uv[0], uv[1]);
                let rho2 = u * u + v * v;
                let w = (1.0 - rho2 / 4.0).max(1e-12).sqrt();
                let ju = [w - u * u / (4.0 * w), -u * v / (4.0 * w), -u];
                let jv = [-u * v / (4.0 * w), w - v * v / (4.0 * w), -v];
                // Evaluate in the unreflected frame: the south reflection
                // diag(1,-1,-1) has determinant 1 and drops out of the
                // triple product.
                let p = linalg::normalize3([u * w, v * w, 1.0 - rho2 / 2.0]);
                (linalg::dot3(p, linalg::cross3(ju, jv)).abs() - 1.0).abs()
            }
        }
    }

    /// Sample points on the boundary curves of `K` and `K'`.
    fn boundary_samples(&self, n: usize) -> (Vec<Point>, Vec<Point>) {
        let mut bk = Vec::new();
        let mut bkp = Vec::new();
        match self {
            DarbouxChart::PlaneBox { k_half, kp_half } => {
                for (half, out) in [(k_half, &mut bk), (kp_half, &mut bkp)] {
                    for i in 0..n {
                        let t = -half + 2.0 * half * i as f64 / (n - 1) as f64;
                        out.push(Point::plane(t, -half));
                        out.push(Point::plane(t, *half));
                        out.push(Point::plane(-half, t));
                        out.push(Point::plane(*half, t));
                    }
                }
            }
            DarbouxChart::AnnulusStrip {
                center,
                k_half,
                kp_half,
            } => {
                for (half, out) in [(k_half, &mut bk), (kp_half, &mut bkp)] {
                    for i in 0..n {
                        let action = i as f64 / (n - 1) as f64;
                        out.push(Point::annulus(center - half, action));
                        out.push(Point::annulus(center + half, action));
                    }
                }
            }
            DarbouxChart::SpherePolar { south, z_k, z_kp } => {
                for (z, out) in [(z_k, &mut bk), (z_kp, &mut bkp)] {
                    let zz = if *south { -z } else { *z };
                    let r = (1.0 - zz * zz).max(0.0).sqrt();
                    for i in 0..n {
                        let phi = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                        out.push(Point {
                            manifold: Manifold::Sphere,
                            c: [r * phi.cos(), r * phi.sin(), zz],
                        });
                    }
                }
            }
        }
        (bk, bkp)
    }

    /// Sample points of `K'` mapped through `psi` (chart coordinates).
    fn kp_chart_samples(&self, grid: &GridSpec) -> Vec<[f64; 2]> {
        let [n0, n1] = grid.counts;
        let mut out = Vec::new();
        match self {
            DarbouxChart::PlaneBox { kp_half, .. } => {
                for i in 0..n0 {
                    for j in 0..n1 {
                        out.push([
                            -kp_half + 2.0 * kp_half * i as f64 / (n0 - 1) as f64,
                            -kp_half + 2.0 * kp_half * j as f64 / (n1 - 1) as f64,
                        ]);
                    }
                }
            }
            DarbouxChart::AnnulusStrip {
                center, kp_half, ..
            } => {
                for i in 0..n0 {
                    for j in 0..n1 {
                        out.push([
                            center - kp_half + 2.0 * kp_half * i as f64 / (n0 - 1) as f64,
                            j as f64 / (n1 - 1) as f64,
                        ]);
                    }
                }
            }
            DarbouxChart::SpherePolar { z_kp, .. } => {
                let r_max = (2.0 * (1.0 - z_kp)).sqrt();
                for i in 0..n0 {
                    let r = r_max * i as f64 / (n0 - 1) as f64;
                    for j in 0..n1 {
                        let phi = 2.0 * std::f64::consts::PI * j as f64 / n1 as f64;
                        out.push([r * phi.cos(), r * phi.sin()]);
                    }
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Atlas
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Atlas {
    pub manifold: Manifold,
    pub charts: Vec<DarbouxChart>,
}

/// Sampled atlas constants, reported together with the mesh that produced
/// them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtlasConstants {
    pub epsilon: f64,
    pub lipschitz_l: f64,
    pub delta: f64,
    pub c: f64,
    pub diameter: f64,
    pub mesh: String,
}

impl Atlas {
    pub fn new(manifold: Manifold, charts: Vec<DarbouxChart>) -> Result<Atlas> {
        for ch in &charts {
            ch.validate()?;
            if ch.manifold() != manifold {
                return Err(Error::config("chart manifold mismatch"));
            }
        }
        if charts.is_empty() {
            return Err(Error::config("atlas needs at least one chart"));
        }
        Ok(Atlas { manifold, charts })
    }

    /// Single identity chart on the plane, `K = [-1,1]^2`, `K' = [-2,2]^2`.
    pub fn plane_default() -> Atlas {
        Atlas {
            manifold: Manifold::Plane,
            charts: vec![DarbouxChart::PlaneBox {
                k_half: 1.0,
                kp_half: 2.0,
            }],
        }
    }

    /// Two unrolled theta-strips on the annulus; epsilon = 0.1, L = 1.
    pub fn annulus_default() -> Atlas {
        Atlas {
            manifold: Manifold::Annulus,
            charts: vec![
                DarbouxChart::AnnulusStrip {
                    center: 0.25,
                    k_half: 0.30,
                    kp_half: 0.40,
                },
                DarbouxChart::AnnulusStrip {
                    center: 0.75,
                    k_half: 0.30,
                    kp_half: 0.40,
                },
            ],
        }
    }

    /// Two symplectic-polar caps about the poles, `K'` down to `z = -0.5`
    /// (mirrored for the south chart); L = 2 at the cap edge.
    pub fn sphere_default() -> Atlas {
        Atlas {
            manifold: Manifold::Sphere,
            charts: vec![
                DarbouxChart::SpherePolar {
                    south: false,
                    z_k: -0.2,
                    z_kp: -0.5,
                },
                DarbouxChart::SpherePolar {
                    south: true,
                    z_k: -0.2,
                    z_kp: -0.5,
                },
            ],
        }
    }

    pub fn default_for(manifold: Manifold) -> Atlas {
        match manifold {
            Manifold::Plane => Atlas::plane_default(),
            Manifold::Annulus => Atlas::annulus_default(),
            Manifold::Sphere => Atlas::sphere_default(),
        }
    }

    /// Every grid sample must lie in some `int(K_i)`.  The plane is checked
    /// on the window of interest and only requires the union of the `K_i` to
    /// contain it (compactly supported maps live there).
    pub fn check_cover(&self, grid: &GridSpec, window: &PlaneWindow) -> Result<()> {
        let pts = sample_points(self.manifold, grid, window);
        for p in &pts {
            if !self.charts.iter().any(|ch| ch.contains_interior_k(p)) {
                return Err(Error::config(format!(
                    "atlas cover check failed at {:?}",
                    p.c
                )));
            }
        }
        Ok(())
    }

    /// Sampled `(epsilon, L)` with the inequality constants derived from
    /// them.  `epsilon` is a sampled minimum over charts of the distance
    /// between the boundary curves of `K` and `K'`; `L` is a sampled maximum
    /// of the operator norm of `D psi^{-1}` over `psi(K')`.
    pub fn constants(&self, sample_density: &GridSpec, window: &PlaneWindow) -> Result<AtlasConstants> {
        sample_density.validate()?;
        self.check_cover(sample_density, window)?;
        let nb = sample_density.counts[0].max(64);

        let mut epsilon = f64::INFINITY;
        let mut lipschitz_l: f64 = 0.0;
        for ch in &self.charts {
            let (bk, bkp) = ch.boundary_samples(nb);
            let min_d = parallel::map_indexed(bk.len(), |i| {
                let mut best = f64::INFINITY;
                for q in &bkp {
                    let d = riemannian_distance(&bk[i], q).unwrap_or(f64::INFINITY);
                    if d < best {
                        best = d;
                    }
                }
                best
            })
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            epsilon = epsilon.min(min_d);

            let samples = ch.kp_chart_samples(sample_density);
            let l = parallel::max_over(samples.len(), |i| ch.opnorm_dpsi_inv(samples[i]));
            lipschitz_l = lipschitz_l.max(l);
        }
        if !(epsilon > 0.0) {
            return Err(Error::config("sampled epsilon is not positive"));
        }
        lipschitz_l = lipschitz_l.max(1.0);

        let diameter = self.manifold.diameter(window);
        let (delta, c) = inequality_constants(epsilon, lipschitz_l, Some(diameter))?;
        Ok(AtlasConstants {
            epsilon,
            lipschitz_l,
            delta,
            c,
            diameter,
            mesh: sample_density.describe(),
        })
    }

    /// Max area-form defect `|det D psi - 1|` over chart samples.
    pub fn max_area_defect(&self, sample_density: &GridSpec) -> f64 {
        let mut worst: f64 = 0.0;
        for ch in &self.charts {
            let samples = ch.kp_chart_samples(sample_density);
            let d = parallel::max_over(samples.len(), |i| ch.area_defect(samples[i]));
            worst = worst.max(d);
        }
        worst
    }
}

/// `delta = pi eps^2 / (4 L^2)`, `C = 8L/sqrt(pi)`, with `C` raised to
/// `diam/sqrt(delta)` when that is larger.
pub fn inequality_constants(
    epsilon: f64,
    lipschitz_l: f64,
    diameter: Option<f64>,
) -> Result<(f64, f64)> {
    if !(epsilon > 0.0) || !(lipschitz_l >= 1.0) {
        return Err(Error::domain(
            "inequality constants need epsilon > 0 and L >= 1",
        ));
    }
    let delta = std::f64::consts::PI * epsilon * epsilon / (4.0 * lipschitz_l * lipschitz_l);
    let mut c = 8.0 * lipschitz_l / std::f64::consts::PI.sqrt();
    if let Some(diam) = diameter {
        c = c.max(diam / delta.sqrt());
    }
    Ok((delta, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wraparound_circle_distance() {
        let p = Point::annulus(0.9, 0.5);
        let q = Point::annulus(0.1, 0.5);
        assert_abs_diff_eq!(riemannian_distance(&p, &q).unwrap(), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn antipodal_geodesic() {
        let n = Point::sphere([0.0, 0.0, 1.0]).unwrap();
        let s = Point::sphere([0.0, 0.0, -1.0]).unwrap();
        assert_abs_diff_eq!(
            riemannian_distance(&n, &s).unwrap(),
            std::f64::consts::PI,
            epsilon = 1e-14
        );
    }

    #[test]
    fn pythagoras() {
        let p = Point::plane(0.0, 0.0);
        let q = Point::plane(3.0, 4.0);
        assert_abs_diff_eq!(riemannian_distance(&p, &q).unwrap(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn mismatched_manifolds_error() {
        let p = Point::plane(0.0, 0.0);
        let q = Point::annulus(0.0, 0.0);
        assert!(riemannian_distance(&p, &q).is_err());
    }

    #[test]
    fn distance_symmetric_and_triangle() {
        // Random triples on each manifold; tolerance 1e-12.
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let tri = [
                Point::annulus(next(), next()),
                Point::annulus(next(), next()),
                Point::annulus(next(), next()),
            ];
            let d01 = riemannian_distance(&tri[0], &tri[1]).unwrap();
            let d10 = riemannian_distance(&tri[1], &tri[0]).unwrap();
            let d12 = riemannian_distance(&tri[1], &tri[2]).unwrap();
            let d02 = riemannian_distance(&tri[0], &tri[2]).unwrap();
            assert!((d01 - d10).abs() <= 1e-12);
            assert!(d02 <= d01 + d12 + 1e-12);

            let sp = [
                Point::sphere_polar(next() * std::f64::consts::PI, next()),
                Point::sphere_polar(next() * std::f64::consts::PI, next()),
                Point::sphere_polar(next() * std::f64::consts::PI, next()),
            ];
            let d01 = riemannian_distance(&sp[0], &sp[1]).unwrap();
            let d12 = riemannian_distance(&sp[1], &sp[2]).unwrap();
            let d02 = riemannian_distance(&sp[0], &sp[2]).unwrap();
            assert!(d02 <= d01 + d12 + 1e-12);
        }
    }

    #[test]
    fn plane_identity_atlas_constants() {
        let atlas = Atlas::plane_default();
        let c = atlas
            .constants(&GridSpec::new(64, 64), &PlaneWindow::square(0.9))
            .unwrap();
        // Sampled boundary min overshoots true epsilon by O(mesh^2).
        assert_abs_diff_eq!(c.epsilon, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(c.lipschitz_l, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn annulus_atlas_l_is_one() {
        let atlas = Atlas::annulus_default();
        let c = atlas
            .constants(&GridSpec::new(64, 64), &PlaneWindow::default())
            .unwrap();
        assert_abs_diff_eq!(c.lipschitz_l, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.epsilon, 0.1, epsilon = 1e-6);
    }

    #[test]
    fn sphere_polar_chart_round_trip() {
        let ch = DarbouxChart::SpherePolar {
            south: false,
            z_k: -0.2,
            z_kp: -0.5,
        };
        for i in 0..200 {
            let rho = std::f64::consts::PI * 0.6 * (i as f64 + 0.5) / 200.0;
            let p = Point::sphere_polar(rho, (i as f64 * 0.137).fract());
            if !ch.contains_kp(&p) {
                continue;
            }
            let q = ch.psi_inv(ch.psi(&p));
            // acos resolves distances near 0 only to ~1.5e-8.
            assert!(riemannian_distance(&p, &q).unwrap() < 1e-7);
        }
    }

    #[test]
    fn sphere_opnorm_matches_closed_form() {
        // Closed form on the polar cap: 1 / sqrt(1 - r^2/4).
        let ch = DarbouxChart::SpherePolar {
            south: false,
            z_k: -0.2,
            z_kp: -0.5,
        };
        for i in 1..100 {
            let r = (3.0f64).sqrt() * i as f64 / 100.0;
            let have = ch.opnorm_dpsi_inv([r, 0.0]);
            let want = 1.0 / (1.0 - r * r / 4.0).sqrt();
            assert_abs_diff_eq!(have, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn sphere_atlas_constants_sampled() {
        // Oracle: L = 2 at the cap edge (closed form), epsilon = difference
        // of colatitudes of the two boundary circles.
        let atlas = Atlas::sphere_default();
        let c = atlas
            .constants(&GridSpec::new(400, 256), &PlaneWindow::default())
            .unwrap();
        assert_abs_diff_eq!(c.lipschitz_l, 2.0, epsilon = 1e-6);
        let want_eps = (-0.5f64).acos() - (-0.2f64).acos();
        assert_abs_diff_eq!(c.epsilon, want_eps, epsilon = 1e-3);
        assert!(c.c >= c.diameter / c.delta.sqrt() - 1e-12);
    }

    #[test]
    fn chart_area_defect_small() {
        let atlas = Atlas::sphere_default();
        assert!(atlas.max_area_defect(&GridSpec::new(128, 128)) <= 1e-8);
    }

    #[test]
    fn inequality_constants_closed_forms() {
        let (d, c) = inequality_constants(1.0, 1.0, None).unwrap();
        assert_abs_diff_eq!(d, std::f64::consts::PI / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 8.0 / std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        let (d, c) = inequality_constants(0.2, 2.0, None).unwrap();
        assert_abs_diff_eq!(d, std::f64::consts::PI * 0.04 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 16.0 / std::f64::consts::PI.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn inequality_constants_monotone_in_l() {
        let (d1, c1) = inequality_constants(0.5, 1.0, None).unwrap();
        let (d2, c2) = inequality_constants(0.5, 2.0, None).unwrap();
        assert!(d2 < d1);
        assert!(c2 > c1);
    }
}
