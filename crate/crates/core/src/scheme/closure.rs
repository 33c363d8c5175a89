//! Parameter closures: from the free parameters of P1/P2/P3 to every
//! dependent coefficient, following the explicit substitution order
//! (2x2 auxiliary-weight system first, then the direct relations).

use crate::error::{Error, Result};

use super::{derived_weights, BoundaryBlock, SchemeDefinition, SchemeId};

/// Condition number above which the 2x2 auxiliary-weight system counts as singular.
const MAX_CONDITION: f64 = 1e12;
/// Auxiliary weights that appear as divisors must exceed this in magnitude.
const MIN_DIVISOR: f64 = 1e-12;

/// Build a complete scheme from its free parameters.
///
/// Parameter order follows [`SchemeId::free_param_names`]:
/// P1 `(w0)`, P2 `(a03, b03, w0)`, P3 `(a03, b03, a13, b13, w'0, w0)`.
/// The diagonal coefficients are fixed to `a_ii = 1`, `b_ii = 0`.
pub fn close_scheme(scheme_id: SchemeId, free_params: &[f64]) -> Result<SchemeDefinition> {
    let expected = scheme_id.n_free_params();
    if free_params.len() != expected {
        return Err(Error::InvalidParamCount {
            scheme: scheme_id,
            expected,
            got: free_params.len(),
        });
    }
    let scheme = match scheme_id {
        SchemeId::P1 => close_p1(free_params[0])?,
        SchemeId::P2 => close_p2(free_params[0], free_params[1], free_params[2])?,
        SchemeId::P3 => close_p3(
            free_params[0],
            free_params[1],
            free_params[2],
            free_params[3],
            free_params[4],
            free_params[5],
        )?,
    };
    let all_finite = scheme
        .named_coefficients()
        .iter()
        .all(|(_, v)| v.is_finite());
    if !all_finite {
        return Err(singular(scheme_id, "closure produced non-finite coefficients"));
    }
    Ok(scheme)
}

fn singular(scheme: SchemeId, reason: impl Into<String>) -> Error {
    Error::SingularClosure {
        scheme,
        reason: reason.into(),
    }
}

fn check_divisor(scheme: SchemeId, name: &str, value: f64) -> Result<()> {
    if value.abs() <= MIN_DIVISOR || !value.is_finite() {
        return Err(singular(scheme, format!("{name} = {value:e} cannot be divided by")));
    }
    Ok(())
}

/// Solve `[[m00, m01], [m10, m11]] x = r`, rejecting ill-conditioned systems.
fn solve_2x2(scheme: SchemeId, m: [[f64; 2]; 2], r: [f64; 2]) -> Result<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let fro2 = m.iter().flatten().map(|v| v * v).sum::<f64>();
    // 2-norm condition number of a 2x2 matrix from its invariants
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s_max = ((fro2 + disc) / 2.0).sqrt();
    let s_min = if det == 0.0 { 0.0 } else { det.abs() / s_max };
    if !(s_min > 0.0) || s_max / s_min > MAX_CONDITION {
        return Err(singular(
            scheme,
            format!("auxiliary-weight system has condition number {:e}", s_max / s_min),
        ));
    }
    Ok([
        (r[0] * m[1][1] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - r[0] * m[1][0]) / det,
    ])
}

fn close_p1(w0: f64) -> Result<SchemeDefinition> {
    let id = SchemeId::P1;
    let weights = derived_weights(w0);
    let a00 = 1.0;

    let wp0 = -(4.0 / 3.0 - 8.0 * w0) / (8.0 * a00);
    check_divisor(id, "w'0", wp0)?;
    let b00 = -1.0 / (2.0 * wp0);
    let a03 = -a00 - 5.0 / 12.0 * b00;
    let a01 = -5.0 * a03 - 4.0 * b00 - 8.0 * a00;
    let a02 = -8.0 * a03 - 2.0 * b00 - 5.0 * a00;
    let b01 = -b00;

    let mut block = BoundaryBlock::new(1)?;
    block.set_rows(0, [a00, a01, a02, a03], [b00, b01, 0.0, 0.0]);
    SchemeDefinition::new(id, block, weights, vec![wp0])
}

fn close_p2(a03: f64, b03: f64, w0: f64) -> Result<SchemeDefinition> {
    let id = SchemeId::P2;
    let weights = derived_weights(w0);
    let w3 = weights.w(3);
    let (a00, a11, b00, b11) = (1.0, 1.0, 0.0, 0.0);

    let [wp0, wp1] = solve_2x2(
        id,
        [
            [b00 - 9.0 / 4.0 * a03 + b03, -3.0 / 4.0 * a11 - 0.5 * b11],
            [12.0 * a00 + 12.0 * a03 + 4.0 * b00 - 5.0 * b03, b11],
        ],
        [5.0 / 4.0 - 9.0 / 4.0 * w3, 0.5],
    )?;
    check_divisor(id, "w'1", wp1)?;

    let a13 = (w3 - 1.0 - wp0 * a03) / wp1;
    let b13 = -wp0 * b03 / wp1;
    let b01 = 12.0 * a00 + 12.0 * a03 + 4.0 * b00 - 5.0 * b03;
    let b02 = 4.0 * b03 - 12.0 * a03 - 5.0 * b00 - 12.0 * a00;
    let a01 = 2.0 * b03 - 5.0 * a03 - 4.0 * b00 - 8.0 * a00;
    let a02 = 4.0 * b03 - 8.0 * a03 - 2.0 * b00 - 5.0 * a00;
    let b10 = 9.0 / 4.0 * a13 - 3.0 / 4.0 * a11 - 0.5 * b11 - b13;
    let b12 = 3.0 / 4.0 * a11 - 9.0 / 4.0 * a13 - 0.5 * b11;
    let a10 = 0.25 * a11 - 7.0 / 4.0 * a13 + 0.25 * b11 + 3.0 / 4.0 * b13;
    let a12 = 0.25 * a11 - 15.0 / 4.0 * a13 - 0.25 * b11 + 9.0 / 4.0 * b13;

    let mut block = BoundaryBlock::new(2)?;
    block.set_rows(0, [a00, a01, a02, a03], [b00, b01, b02, b03]);
    block.set_rows(1, [a10, a11, a12, a13], [b10, b11, b12, b13]);
    SchemeDefinition::new(id, block, weights, vec![wp0, wp1])
}

fn close_p3(a03: f64, b03: f64, a13: f64, b13: f64, wp0: f64, w0: f64) -> Result<SchemeDefinition> {
    let id = SchemeId::P3;
    let weights = derived_weights(w0);
    let (w2, w3) = (weights.w(2), weights.w(3));
    let (a00, a11, a22, b00, b11, b22) = (1.0, 1.0, 1.0, 0.0, 0.0, 0.0);

    let [wp1, wp2] = solve_2x2(
        id,
        [
            [
                0.25 * a11 + 0.25 * b11 + 57.0 / 4.0 * a13 - 45.0 / 4.0 * b13,
                2.0 * b22 - 5.0 * a22,
            ],
            [
                0.25 * a11 - 15.0 / 4.0 * a13 - 0.25 * b11 + 9.0 / 4.0 * b13,
                a22,
            ],
        ],
        [
            w0 + 16.0 * w3 - 58.0 / 3.0 - wp0 * (a00 + 16.0 * a03 - 12.0 * b03),
            w2 - 1.0 / 6.0 - wp0 * (4.0 * b03 - 8.0 * a03 - 2.0 * b00 - 5.0 * a00),
        ],
    )?;
    check_divisor(id, "w'2", wp2)?;

    let a23 = (w3 - 5.0 / 6.0 - wp0 * a03 - wp1 * a13) / wp2;
    let b23 = (0.5 - wp0 * b03 - wp1 * b13) / wp2;
    let b01 = 12.0 * a00 + 12.0 * a03 + 4.0 * b00 - 5.0 * b03;
    let b02 = 4.0 * b03 - 12.0 * a03 - 5.0 * b00 - 12.0 * a00;
    let a01 = 2.0 * b03 - 5.0 * a03 - 4.0 * b00 - 8.0 * a00;
    let a02 = 4.0 * b03 - 8.0 * a03 - 2.0 * b00 - 5.0 * a00;
    let b10 = 9.0 / 4.0 * a13 - 3.0 / 4.0 * a11 - 0.5 * b11 - b13;
    let b12 = 3.0 / 4.0 * a11 - 9.0 / 4.0 * a13 - 0.5 * b11;
    let a10 = 0.25 * a11 - 7.0 / 4.0 * a13 + 0.25 * b11 + 3.0 / 4.0 * b13;
    let a12 = 0.25 * a11 - 15.0 / 4.0 * a13 - 0.25 * b11 + 9.0 / 4.0 * b13;
    let b20 = 12.0 * a22 + 36.0 * a23 - 5.0 * b22 - 28.0 * b23;
    let b21 = 4.0 * b22 - 36.0 * a23 - 12.0 * a22 + 27.0 * b23;
    let a20 = 2.0 * b22 - 16.0 * a23 - 5.0 * a22 + 12.0 * b23;
    let a21 = 4.0 * b22 - 21.0 * a23 - 8.0 * a22 + 18.0 * b23;

    let mut block = BoundaryBlock::new(3)?;
    block.set_rows(0, [a00, a01, a02, a03], [b00, b01, b02, b03]);
    block.set_rows(1, [a10, a11, a12, a13], [b10, b11, b12, b13]);
    block.set_rows(2, [a20, a21, a22, a23], [b20, b21, b22, b23]);
    SchemeDefinition::new(id, block, weights, vec![wp0, wp1, wp2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn p1_table_values() {
        let s = close_scheme(SchemeId::P1, &[0.365512831337005295040]).unwrap();
        let b = &s.boundary;
        assert!(rel(s.aux_weights[0], 0.19884616467033863763) < 1e-12);
        assert!(rel(b.b(0, 0), -2.51450663294882081900) < 1e-12);
        assert!(rel(b.a(0, 3), 0.04771109706200871159) < 1e-10);
        assert!(rel(b.a(0, 1), 1.819471046485240606224) < 1e-12);
        assert!(rel(b.a(0, 2), -0.35267551059842805472) < 1e-12);
        assert!(rel(b.b(0, 1), 2.51450663294882081900) < 1e-12);
        assert_eq!(b.b(0, 2), 0.0);
        assert_eq!(b.b(0, 3), 0.0);
    }

    #[test]
    fn p1_singular_at_one_sixth() {
        let err = close_scheme(SchemeId::P1, &[1.0 / 6.0]).unwrap_err();
        assert!(matches!(err, Error::SingularClosure { scheme: SchemeId::P1, .. }), "{err}");
    }

    #[test]
    fn p3_table_values() {
        let s = close_scheme(
            SchemeId::P3,
            &[
                -2.31431720758483284,
                -8.73186685916462579,
                3.22663580200212241,
                8.92730087492692626,
                4.16532467660117156,
                0.26663842939298732,
            ],
        )
        .unwrap();
        assert!(rel(s.aux_weights[1], -12.33339535057291) < 1e-9);
        assert!(rel(s.aux_weights[2], 191.24292432666243) < 1e-9);
        assert!(rel(s.boundary.b(0, 1), 27.88752780480513) < 1e-9);
        assert!(rel(s.boundary.a(2, 3), 0.25993267978377244) < 1e-9);
    }

    #[test]
    fn wrong_arity() {
        let err = close_scheme(SchemeId::P2, &[0.1, 0.2]).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidParamCount {
                scheme: SchemeId::P2,
                expected: 3,
                got: 2
            }
        );
    }

    #[test]
    fn p2_singular_system() {
        // With b11 = 0 the second row is (12 + 12 a03 - 5 b03, 0), so the system is
        // singular when b03 = 9/4 a03 and 12 + 12 a03 - 5 b03 = 0, i.e. a03 = -16.
        let a03 = -16.0;
        let b03 = 9.0 / 4.0 * a03;
        let err = close_scheme(SchemeId::P2, &[a03, b03, 0.36]).unwrap_err();
        assert!(matches!(err, Error::SingularClosure { .. }), "{err}");
    }

    #[test]
    fn fixed_diagonal_coefficients() {
        let s = close_scheme(SchemeId::P3, &[-2.3, -8.7, 3.2, 8.9, 4.2, 0.27]).unwrap();
        for i in 0..3 {
            assert_eq!(s.boundary.a(i, i), 1.0);
            assert_eq!(s.boundary.b(i, i), 0.0);
        }
    }
}
