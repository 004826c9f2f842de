//! Minimal 2x2 / 3x3 helpers used by Jacobian and chart computations.

/// Row-major 2x2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2 {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Largest singular value, via the closed form for 2x2 matrices.
    pub fn sigma_max(&self) -> f64 {
        let (s1, _) = self.singular_values();
        s1
    }

    /// Singular values `(sigma_max, sigma_min)`.
    pub fn singular_values(&self) -> (f64, f64) {
        let [[a, b], [c, d]] = self.m;
        // Eigenvalues of A^T A.
        let q = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (q * q - 4.0 * det * det).max(0.0).sqrt();
        let s1 = ((q + disc) / 2.0).max(0.0).sqrt();
        let s2 = ((q - disc) / 2.0).max(0.0).sqrt();
        (s1, s2)
    }

    pub fn frobenius_diff(&self, rhs: &Mat2) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let d = self.m[i][j] - rhs.m[i][j];
                s += d * d;
            }
        }
        s.sqrt()
    }
}

pub type Vec3 = [f64; 3];

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn scale3(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn normalize3(a: Vec3) -> Vec3 {
    scale3(a, 1.0 / norm3(a))
}

/// Row-major 3x3 matrix, used for ambient sphere differentials.
#[derive(Debug, Clone, Copy)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn apply(&self, v: Vec3) -> Vec3 {
        [
            dot3(self.m[0], v),
            dot3(self.m[1], v),
            dot3(self.m[2], v),
        ]
    }

    pub fn mul(&self, rhs: &Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for (k, rk) in rhs.m.iter().enumerate() {
                    out[i][j] += self.m[i][k] * rk[j];
                }
            }
        }
        Mat3 { m: out }
    }
}

/// Orthonormal basis of the plane orthogonal to unit vector `n`.
pub fn tangent_basis(n: Vec3) -> (Vec3, Vec3) {
    // Pick the coordinate axis least aligned with n.
    let ax = if n[0].abs() <= n[1].abs() && n[0].abs() <= n[2].abs() {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() <= n[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalize3(cross3(n, ax));
    let e2 = cross3(n, e1);
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_singular_values() {
        let m = Mat2::new(1.0, 1.0, 0.0, 1.0);
        let (s1, s2) = m.singular_values();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((s1 - golden).abs() < 1e-12);
        assert!((s2 - 1.0 / golden).abs() < 1e-12);
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let n = normalize3([0.3, -0.2, 0.93]);
        let (e1, e2) = tangent_basis(n);
        assert!(dot3(e1, n).abs() < 1e-14);
        assert!(dot3(e2, n).abs() < 1e-14);
        assert!(dot3(e1, e2).abs() < 1e-14);
        assert!((norm3(e1) - 1.0).abs() < 1e-14);
        assert!((norm3(e2) - 1.0).abs() < 1e-14);
    }
}
