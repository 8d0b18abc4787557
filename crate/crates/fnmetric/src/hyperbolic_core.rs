//! Elementary hyperbolic geometry: 2x2 real matrices acting on the upper half
//! plane, trace/length conversions, collar bounds and pair-of-pants geometry.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance inside which a trace is considered parabolic (|tr| == 2).
pub const PARABOLIC_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("elliptic element: |trace| = {trace} < 2")]
    EllipticElement { trace: f64 },
    #[error("invalid length {value}: {reason}")]
    InvalidLength { value: f64, reason: String },
    #[error("matrix is not unimodular: det = {det}")]
    NonUnimodular { det: f64 },
}

/// Real 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    /// Diagonal translation matrix diag(e^{t/2}, e^{-t/2}): twist/length flow
    /// along the axis (0, inf).
    pub fn translation(t: f64) -> Mat2 {
        let e = (t / 2.0).exp();
        Mat2::new(e, 0.0, 0.0, 1.0 / e)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse for det = +1 matrices (adjugate); avoids overflow for huge entries.
    pub fn inv_unimodular(&self) -> Mat2 {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Rescale to det +-1. Errors if det is (numerically) zero.
    pub fn normalized(&self) -> Result<Mat2, CoreError> {
        let det = self.det();
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(CoreError::NonUnimodular { det });
        }
        Ok(self.scale(1.0 / det.abs().sqrt()))
    }

    /// g M g^{-1} for unimodular g.
    pub fn conj_by(&self, g: &Mat2) -> Mat2 {
        g.mul(self).mul(&g.inv_unimodular())
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Moebius action on the boundary R u {inf}.
    pub fn apply(&self, z: f64) -> f64 {
        if z.is_infinite() {
            if self.c == 0.0 {
                return f64::INFINITY;
            }
            return self.a / self.c;
        }
        let den = self.c * z + self.d;
        if den.abs() < 1e-300 {
            f64::INFINITY
        } else {
            (self.a * z + self.b) / den
        }
    }

    /// Fixed points of a hyperbolic element as (repelling, attracting).
    /// Requires |trace| > 2.
    pub fn axis_endpoints(&self) -> Result<(f64, f64), CoreError> {
        let tr = self.trace();
        if tr.abs() <= 2.0 + PARABOLIC_TOL {
            return Err(CoreError::EllipticElement { trace: tr });
        }
        if self.c.abs() < 1e-300 * self.max_abs().max(1.0) {
            // inf is fixed; the finite fixed point is b/(d-a).
            let other = self.b / (self.d - self.a);
            // inf is attracting iff |a| > |d| (eigenvalue a on e1).
            if self.a.abs() > self.d.abs() {
                return Ok((other, f64::INFINITY));
            }
            return Ok((f64::INFINITY, other));
        }
        // c z^2 + (d-a) z - b = 0; z_pm = ((a-d) +- sqrt(tr^2-4)) / (2c),
        // with multiplier at z_pm equal to ((a+d) +- sqrt(tr^2-4))/2.
        let disc = (tr * tr - 4.0).sqrt();
        let zp = ((self.a - self.d) + disc) / (2.0 * self.c);
        let zm = ((self.a - self.d) - disc) / (2.0 * self.c);
        if tr > 0.0 {
            Ok((zm, zp))
        } else {
            Ok((zp, zm))
        }
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::mul(&self, &rhs)
    }
}

/// arccosh that stays accurate for arguments just above 1.
pub fn acosh_stable(x: f64) -> f64 {
    if x < 1.0 {
        return f64::NAN;
    }
    let y = x - 1.0;
    if y < 0.5 {
        (y + (y * (2.0 + y)).sqrt()).ln_1p()
    } else {
        x.acosh()
    }
}

/// arccosh clamped from below: arguments within `tol` below 1 are treated as 1.
pub fn acosh_clamped(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        acosh_stable(x)
    }
}

/// Translation length of a hyperbolic isometry from its trace:
/// l = 2 arccosh(|tr|/2). Parabolic (|tr| = 2 within tolerance) gives 0;
/// elliptic |tr| < 2 is an error.
pub fn trace_to_length(tr: f64) -> Result<f64, CoreError> {
    let a = tr.abs();
    if a < 2.0 - PARABOLIC_TOL {
        return Err(CoreError::EllipticElement { trace: tr });
    }
    if a <= 2.0 + PARABOLIC_TOL {
        return Ok(0.0);
    }
    Ok(2.0 * acosh_stable(a / 2.0))
}

/// Half-width of the standard embedded collar around a simple closed geodesic
/// of length l: w(l) = arcsinh(1 / sinh(l/2)). Diverges as l -> 0.
pub fn collar_lower_bound(l: f64) -> Result<f64, CoreError> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(CoreError::InvalidLength { value: l, reason: "need a positive finite length".into() });
    }
    Ok((1.0 / (l / 2.0).sinh()).asinh())
}

/// Distances between boundary components of a hyperbolic pair of pants with
/// cuff lengths (l1, l2, l3); zero length means a cusp. Entry `i` of the
/// result is the distance between the two cuffs *other than* cuff i:
/// cosh d = (cosh(l_i/2) + cosh(l_j/2) cosh(l_k/2)) / (sinh(l_j/2) sinh(l_k/2)).
/// Distances to a cusp are infinite.
pub fn pants_half_lengths(l1: f64, l2: f64, l3: f64) -> Result<[f64; 3], CoreError> {
    let ls = [l1, l2, l3];
    for &l in &ls {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(CoreError::InvalidLength { value: l, reason: "cuff lengths must be finite and >= 0".into() });
        }
    }
    let mut out = [0.0; 3];
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        if ls[j] == 0.0 || ls[k] == 0.0 {
            out[i] = f64::INFINITY;
            continue;
        }
        let num = (ls[i] / 2.0).cosh() + (ls[j] / 2.0).cosh() * (ls[k] / 2.0).cosh();
        let den = (ls[j] / 2.0).sinh() * (ls[k] / 2.0).sinh();
        out[i] = acosh_stable(num / den);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_and_trace() {
        let m = Mat2::translation(1.4);
        assert!((m.det() - 1.0).abs() < 1e-15);
        assert!((trace_to_length(m.trace()).unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn trace_to_length_parabolic_and_elliptic() {
        assert_eq!(trace_to_length(2.0).unwrap(), 0.0);
        assert_eq!(trace_to_length(-2.0 - 0.5e-9).unwrap(), 0.0);
        assert!(matches!(trace_to_length(1.9), Err(CoreError::EllipticElement { .. })));
    }

    #[test]
    fn acosh_stable_near_one() {
        // acosh(1 + x) ~ sqrt(2x) for small x (x chosen exactly representable
        // in 1 + x so the comparison is meaningful)
        let x = 2.0f64.powi(-40);
        let v = acosh_stable(1.0 + x);
        assert!((v - (2.0 * x).sqrt()).abs() < 1e-9 * v);
    }

    #[test]
    fn collar_value() {
        assert!((collar_lower_bound(1.0).unwrap() - 1.406829113747295).abs() < 1e-12);
        assert!(collar_lower_bound(0.0).is_err());
        // collar grows like |log l| as l -> 0
        assert!(collar_lower_bound(1e-8).unwrap() > 18.0);
    }

    #[test]
    fn pants_half_lengths_values() {
        let d = pants_half_lengths(1.0, 1.0, 1.0).unwrap();
        for v in d {
            assert!((v - 2.868695141619822).abs() < 1e-12);
        }
        let d = pants_half_lengths(0.7, 1.1, 2.0).unwrap();
        assert!((d[0] - 2.110360069621718).abs() < 1e-12);
        // swapping two cuffs swaps the corresponding entries
        let e = pants_half_lengths(1.1, 0.7, 2.0).unwrap();
        assert!((d[0] - e[1]).abs() < 1e-15 && (d[1] - e[0]).abs() < 1e-15 && (d[2] - e[2]).abs() < 1e-15);
        // cusp: distances touching the cusp are infinite
        let d = pants_half_lengths(0.0, 1.0, 1.0).unwrap();
        assert!(d[1].is_infinite() && d[2].is_infinite() && d[0].is_finite());
    }

    #[test]
    fn axis_endpoints_classification() {
        let g = Mat2::new(2.0, 1.0, 1.0, 1.0); // trace 3, hyperbolic
        let (r, p) = g.axis_endpoints().unwrap();
        // attracting fixed point: iterate and check convergence
        let mut z = 0.37;
        for _ in 0..60 {
            z = g.apply(z);
        }
        assert!((z - p).abs() < 1e-9);
        let mut z = 0.37;
        let gi = g.inv_unimodular();
        for _ in 0..60 {
            z = gi.apply(z);
        }
        assert!((z - r).abs() < 1e-9);
    }
}
