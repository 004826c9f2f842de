//! Entropy upper bound via derivative growth: least-squares slope of
//! `log ‖Dfⁿ‖` against `n`, times the manifold dimension.

use crate::grid::GridSpec;
use crate::maps::MapExpr;
use crate::norms;
use crate::Result;

/// Sampled iterate list: everything up to 16, then ~8 evenly spaced points
/// reaching `n_max` (keeps `O(n²)` iterate evaluation affordable).
fn iterate_samples(n_max: usize) -> Vec<usize> {
    if n_max <= 16 {
        return (1..=n_max).collect();
    }
    let mut v: Vec<usize> = (1..=8).collect();
    let steps = 8;
    for i in 1..=steps {
        v.push(8 + (n_max - 8) * i / steps);
    }
    v.dedup();
    v
}

/// `(slope, bound)`: the fitted growth rate of `log ‖Dfⁿ‖.lower` over the
/// upper half of the sampled range and `dim(M)·max(slope, 0)`.  Stops
/// early (partial fit) if the derivative overflows.
pub fn entropy_slope(f: &MapExpr, n_max: usize, grid: &GridSpec) -> Result<(f64, f64)> {
    assert!(n_max >= 8, "entropy fit needs n_max >= 8");
    let mut points: Vec<(f64, f64)> = Vec::new();
    for n in iterate_samples(n_max) {
        let it = f.clone().iterate(n as i64);
        let d = norms::derivative_norm(&it, grid)?.lower;
        if !d.is_finite() || d <= 0.0 {
            break; // overflow: fit what we have
        }
        points.push((n as f64, d.ln()));
    }
    // Least squares on the upper half of the collected range.
    let cut = points.last().map(|p| p.0 / 2.0).unwrap_or(0.0);
    let fit: Vec<&(f64, f64)> = points.iter().filter(|p| p.0 >= cut).collect();
    let m = fit.len() as f64;
    let (sx, sy): (f64, f64) = fit.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (sxx, sxy): (f64, f64) = fit
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
    let denom = m * sxx - sx * sx;
    let slope = if fit.len() >= 2 && denom.abs() > 0.0 {
        (m * sxy - sx * sy) / denom
    } else {
        0.0
    };
    let bound = 2.0 * slope.max(0.0);
    Ok((slope, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::Manifold;

    #[test]
    fn rotation_slope_is_zero() {
        let f = MapExpr::Rotation {
            manifold: Manifold::Annulus,
            alpha: 0.3,
        };
        let (slope, bound) = entropy_slope(&f, 16, &GridSpec::new(12, 8)).unwrap();
        assert!(slope.abs() < 1e-12);
        assert_eq!(bound, 0.0);
    }

    #[test]
    fn cat_map_slope_matches_eigenvalue() {
        let f = MapExpr::Linear {
            manifold: Manifold::Annulus,
            entries: [[2.0, 1.0], [1.0, 1.0]],
        };
        let (slope, bound) = entropy_slope(&f, 40, &GridSpec::new(8, 8)).unwrap();
        let expected = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(
            (slope - expected).abs() < 0.02 * expected,
            "slope {slope} vs {expected}"
        );
        assert!((bound - 2.0 * expected).abs() < 0.04 * expected);
    }

    #[test]
    fn conjugated_rotation_slope_vanishes() {
        let h = MapExpr::Twist { strength: 1.3 };
        let f = MapExpr::compose(vec![
            h.clone().inverse(),
            MapExpr::Rotation {
                manifold: Manifold::Annulus,
                alpha: std::f64::consts::FRAC_1_SQRT_2 / 2.0,
            },
            h,
        ]);
        let (slope, _) = entropy_slope(&f, 64, &GridSpec::new(16, 8)).unwrap();
        assert!(slope.abs() <= 0.01, "slope {slope}");
    }
}
