//! Closed-form coordinate transforms under a single elementary move: the
//! one-holed-torus case and the four-holed-sphere case, plus the lift of a
//! move to a full FN coordinate point.

use crate::hyperbolic_core::acosh_clamped;
use crate::pants_complex::{
    elementary_move, CurveId, CurveKind, CurveParams, FNPoint, MoveDescriptor, MoveKind,
    PantsDecomposition, PantsError,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest curve length accepted verbatim; shorter positive inputs are
/// clamped here and reported via a DomainNarrowed warning.
pub const MIN_LENGTH: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum TransformError {
    #[error("invalid move input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Pants(#[from] PantsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Warning {
    /// An input was clamped into the numerically safe domain.
    DomainNarrowed { field: String, given: f64, used: f64 },
}

/// One-holed torus S_{1,1}: boundary length l0 (0 = cusp), curve length l,
/// twist tau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusMoveInput {
    pub l0: f64,
    pub l: f64,
    pub tau: f64,
}

/// Four-holed sphere S_{0,4}: hole lengths (l1..l4) in the cyclic order of
/// the move neighborhood (alpha separates {l2, l3} from {l4, l1}), curve
/// length l, twist tau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereMoveInput {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveResult {
    pub l_prime: f64,
    pub tau_prime: f64,
    /// True when only |tau_prime| is determined (input twist 0 gives a
    /// mirror-symmetric configuration; here tau_prime = 0 anyway).
    pub abs_only: bool,
    pub warnings: Vec<Warning>,
}

fn check_hole(name: &str, v: f64) -> Result<(), TransformError> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(TransformError::InvalidInput(format!("{name} = {v}: need finite >= 0")));
    }
    Ok(())
}

fn clamp_curve_length(name: &str, v: f64, warnings: &mut Vec<Warning>) -> Result<f64, TransformError> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(TransformError::InvalidInput(format!("{name} = {v}: need finite > 0")));
    }
    if v < MIN_LENGTH {
        warnings.push(Warning::DomainNarrowed { field: name.to_string(), given: v, used: MIN_LENGTH });
        return Ok(MIN_LENGTH);
    }
    Ok(v)
}

/// Sign convention for the dual twist: opposite sign to the input twist;
/// zero input twist gives exactly zero.
fn signed_tau_prime(tau: f64, magnitude: f64) -> f64 {
    if tau == 0.0 {
        0.0
    } else {
        -tau.signum() * magnitude
    }
}

/// Elementary move on the one-holed torus.
///
/// cosh(l'/2) = cosh(tau/2) sqrt((cosh l + cosh(l0/2)) / 2) / sinh(l/2)
/// cosh(tau'/2) = cosh(l/2) sinh(l'/2) / sqrt((cosh l' + cosh(l0/2)) / 2)
///
/// The second identity consumes the transformed length, which makes the move
/// an exact involution on lengths and maps tau = 0 to tau' = 0 exactly.
pub fn torus_move(input: &TorusMoveInput) -> Result<MoveResult, TransformError> {
    let mut warnings = Vec::new();
    check_hole("l0", input.l0)?;
    let l = clamp_curve_length("l", input.l, &mut warnings)?;
    if !input.tau.is_finite() {
        return Err(TransformError::InvalidInput(format!("tau = {}: need finite", input.tau)));
    }
    let ch0 = (input.l0 / 2.0).cosh();
    let root = ((l.cosh() + ch0) / 2.0).sqrt();
    let cosh_half_lp = (input.tau / 2.0).cosh() * root / (l / 2.0).sinh();
    let l_prime = 2.0 * acosh_clamped(cosh_half_lp);
    let cosh_half_tp =
        (l / 2.0).cosh() * (l_prime / 2.0).sinh() / ((l_prime.cosh() + ch0) / 2.0).sqrt();
    let magnitude = 2.0 * acosh_clamped(cosh_half_tp);
    Ok(MoveResult {
        l_prime,
        tau_prime: signed_tau_prime(input.tau, magnitude),
        abs_only: input.tau == 0.0,
        warnings,
    })
}

/// Elementary move on the four-holed sphere. With c_i = cosh(l_i/2),
/// cl = cosh(l/2):
///
/// A = c1 c2 + c3 c4 + cl (c1 c3 + c2 c4)
/// B = sqrt(cl^2 + 2 c1 c4 cl + c1^2 + c4^2 - 1)
///     * sqrt(cl^2 + 2 c2 c3 cl + c2^2 + c3^2 - 1)
/// cosh(l'/2) = (A + cosh(tau) B) / sinh^2(l/2)
///
/// E = sinh^2(l'/2) cl - c1 c4 - c2 c3 - cosh(l'/2)(c1 c3 + c2 c4)
/// F = sqrt(c1^2 + c2^2 + 2 c1 c2 cosh(l'/2) + sinh^2(l'/2))
///     * sqrt(c3^2 + c4^2 + 2 c3 c4 cosh(l'/2) + sinh^2(l'/2))
/// cosh(tau') = E / F
pub fn sphere_move(input: &SphereMoveInput) -> Result<MoveResult, TransformError> {
    let mut warnings = Vec::new();
    for (name, v) in [("l1", input.l1), ("l2", input.l2), ("l3", input.l3), ("l4", input.l4)] {
        check_hole(name, v)?;
    }
    let l = clamp_curve_length("l", input.l, &mut warnings)?;
    if !input.tau.is_finite() {
        return Err(TransformError::InvalidInput(format!("tau = {}: need finite", input.tau)));
    }
    let (c1, c2, c3, c4) = (
        (input.l1 / 2.0).cosh(),
        (input.l2 / 2.0).cosh(),
        (input.l3 / 2.0).cosh(),
        (input.l4 / 2.0).cosh(),
    );
    let cl = (l / 2.0).cosh();
    let sh2 = (l / 2.0).sinh().powi(2);
    let a = c1 * c2 + c3 * c4 + cl * (c1 * c3 + c2 * c4);
    let b = (cl * cl + 2.0 * c1 * c4 * cl + c1 * c1 + c4 * c4 - 1.0).sqrt()
        * (cl * cl + 2.0 * c2 * c3 * cl + c2 * c2 + c3 * c3 - 1.0).sqrt();
    let cosh_half_lp = (a + input.tau.cosh() * b) / sh2;
    let l_prime = 2.0 * acosh_clamped(cosh_half_lp);
    let cp = (l_prime / 2.0).cosh();
    let sp2 = (l_prime / 2.0).sinh().powi(2);
    let e = sp2 * cl - c1 * c4 - c2 * c3 - cp * (c1 * c3 + c2 * c4);
    let f = (c1 * c1 + c2 * c2 + 2.0 * c1 * c2 * cp + sp2).sqrt()
        * (c3 * c3 + c4 * c4 + 2.0 * c3 * c4 * cp + sp2).sqrt();
    let magnitude = acosh_clamped(e / f);
    Ok(MoveResult {
        l_prime,
        tau_prime: signed_tau_prime(input.tau, magnitude),
        abs_only: input.tau == 0.0,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MovedPoint {
    pub point: FNPoint,
    pub decomposition: PantsDecomposition,
    pub descriptor: MoveDescriptor,
    pub result: MoveResult,
    /// Interior curves adjacent to the move neighborhood whose twist values
    /// are not transformed analytically; they must be re-measured from a
    /// holonomy model.
    pub oracle_required: Vec<CurveId>,
}

/// Lift an elementary move to a full FN point: the dual curve carries
/// (l', tau') from the closed-form transform; all lengths outside the
/// neighborhood are unchanged; twists of interior curves adjacent to the
/// neighborhood are flagged for oracle measurement.
pub fn move_fn_point(
    x: &FNPoint,
    p: &PantsDecomposition,
    c: &CurveId,
) -> Result<MovedPoint, TransformError> {
    let (p_new, descriptor) = elementary_move(p, c)?;
    let cur = x
        .get(c)
        .ok_or_else(|| TransformError::Pants(PantsError::UnknownCurve(c.clone())))?;
    let tau = cur
        .twist
        .ok_or_else(|| TransformError::Pants(PantsError::NoTwistParameter(c.clone())))?;
    let hole_len = |id: &CurveId| -> Result<f64, TransformError> {
        x.get(id)
            .map(|p| p.length)
            .ok_or_else(|| TransformError::Pants(PantsError::UnknownCurve(id.clone())))
    };
    let result = match descriptor.kind {
        MoveKind::TorusMove => torus_move(&TorusMoveInput {
            l0: hole_len(&descriptor.neighborhood[0])?,
            l: cur.length,
            tau,
        })?,
        MoveKind::SphereMove => sphere_move(&SphereMoveInput {
            l1: hole_len(&descriptor.neighborhood[0])?,
            l2: hole_len(&descriptor.neighborhood[1])?,
            l3: hole_len(&descriptor.neighborhood[2])?,
            l4: hole_len(&descriptor.neighborhood[3])?,
            l: cur.length,
            tau,
        })?,
    };
    let mut point = x.clone();
    point.base.remove(c);
    point.overrides.remove(c);
    point
        .overrides
        .insert(descriptor.new_curve.clone(), CurveParams::interior(result.l_prime, result.tau_prime));
    let oracle_required: Vec<CurveId> = descriptor
        .neighborhood
        .iter()
        .filter(|id| matches!(p.curves.get(id), Some(CurveKind::Interior)))
        .cloned()
        .collect();
    Ok(MovedPoint { point, decomposition: p_new, descriptor, result, oracle_required })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn torus_frozen_values() {
        let r = torus_move(&TorusMoveInput { l0: 1.0, l: 1.0, tau: 0.7 }).unwrap();
        assert!(close(r.l_prime, 3.002251254140774, 1e-12));
        assert!(close(r.tau_prime, -0.346826601470643, 1e-12));
        assert!(!r.abs_only);

        let r = torus_move(&TorusMoveInput { l0: 0.0, l: 1.0, tau: 0.0 }).unwrap();
        assert!(close(r.l_prime, 2.813658227494590, 1e-12));
        assert_eq!(r.tau_prime, 0.0);
        assert!(r.abs_only);

        let r = torus_move(&TorusMoveInput { l0: 0.5, l: 2.0, tau: -1.3 }).unwrap();
        assert!(close(r.l_prime, 2.102858371334514, 1e-12));
        assert!(close(r.tau_prime, 1.255483858663744, 1e-12));

        let r = torus_move(&TorusMoveInput { l0: 2.0, l: 0.3, tau: 1.1 }).unwrap();
        assert!(close(r.l_prime, 5.712719919698035, 1e-12));
        assert!(close(r.tau_prime, -0.150310321197693, 1e-12));
    }

    #[test]
    fn torus_move_is_involution_on_lengths() {
        for (l0, l, tau) in [(1.0, 1.0, 0.7), (0.0, 0.4, -1.9), (2.5, 3.0, 0.05), (0.3, 0.05, 2.0)] {
            let r = torus_move(&TorusMoveInput { l0, l, tau }).unwrap();
            let back =
                torus_move(&TorusMoveInput { l0, l: r.l_prime, tau: r.tau_prime }).unwrap();
            assert!(close(back.l_prime, l, 1e-9), "l0={l0} l={l} tau={tau}: {}", back.l_prime);
            assert!(close(back.tau_prime.abs(), tau.abs(), 1e-9));
        }
    }

    #[test]
    fn sphere_frozen_values() {
        let r = sphere_move(&SphereMoveInput { l1: 1.0, l2: 1.0, l3: 1.0, l4: 1.0, l: 1.2, tau: 0.4 })
            .unwrap();
        assert!(close(r.l_prime, 8.162389374622544, 1e-12));
        assert!(close(r.tau_prime, -0.119087028573937, 1e-12));

        // all-cusp case: cosh(l'/2) = (cosh(1/2) + 3)/(cosh(1/2) - 1)
        let r = sphere_move(&SphereMoveInput { l1: 0.0, l2: 0.0, l3: 0.0, l4: 0.0, l: 1.0, tau: 0.0 })
            .unwrap();
        assert!(close(r.l_prime, 8.338523877299503, 1e-12));
        assert_eq!(r.tau_prime, 0.0);

        let r = sphere_move(&SphereMoveInput { l1: 0.5, l2: 1.0, l3: 1.5, l4: 2.0, l: 0.8, tau: 0.9 })
            .unwrap();
        assert!(close(r.l_prime, 10.492856770700223, 1e-12));
        assert!(close(r.tau_prime, -0.168616674126231, 1e-12));
    }

    #[test]
    fn domain_narrowing() {
        let r = torus_move(&TorusMoveInput { l0: 1.0, l: 1e-15, tau: 0.2 }).unwrap();
        assert!(matches!(r.warnings[0], Warning::DomainNarrowed { .. }));
        assert!(r.l_prime.is_finite());
        assert!(torus_move(&TorusMoveInput { l0: -1.0, l: 1.0, tau: 0.0 }).is_err());
        assert!(sphere_move(&SphereMoveInput { l1: 0.0, l2: 0.0, l3: 0.0, l4: 0.0, l: 0.0, tau: 0.0 })
            .is_err());
    }

    #[test]
    fn move_fn_point_s04() {
        use std::collections::BTreeMap;
        let p = PantsDecomposition::four_holed_sphere();
        let mut base = BTreeMap::new();
        base.insert(CurveId::new("s1"), CurveParams::interior(1.2, 0.4));
        for h in ["h0a", "h0b", "h1a", "h1b"] {
            base.insert(CurveId::new(h), CurveParams::boundary(1.0));
        }
        let x = FNPoint::new(base);
        let moved = move_fn_point(&x, &p, &CurveId::new("s1")).unwrap();
        let np = moved.point.get(&moved.descriptor.new_curve).unwrap();
        assert!(close(np.length, 8.162389374622544, 1e-12));
        assert!(moved.oracle_required.is_empty());
        assert!(moved.point.get(&CurveId::new("s1")).is_none());
        // boundary lengths untouched
        assert_eq!(moved.point.get(&CurveId::new("h0a")).unwrap().length, 1.0);
    }
}
