//! Convergence of the rotation Hofer bound along `α_m → α`: the computable
//! shadow of `‖R_{α_m}^j‖_Hof → ‖R_α^j‖_Hof`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::diophantine::TorusVector;
use crate::hamiltonian::Hamiltonian;
use crate::norms::{self, RotationBound};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct HoferConvRow {
    pub m: usize,
    pub j: i64,
    pub bound_m: RotationBound,
    pub bound_limit: RotationBound,
    /// `|stated bound(jα_m) − stated bound(jα)|`.
    pub diff: f64,
}

fn bound_at(alpha: &TorusVector, j: i64, action: &[Hamiltonian]) -> Result<RotationBound> {
    if alpha.dim() != action.len() {
        return Err(Error::domain(
            "need one action Hamiltonian per torus component",
        ));
    }
    let jb = BigInt::from(j);
    let mut comps = Vec::with_capacity(alpha.dim());
    for c in &alpha.components {
        comps.push(c.norm_times(&jb)?.to_f64());
    }
    norms::hofer_rotation_bound(&comps, action)
}

/// Rows `(m, j, |bound(jα_m) − bound(jα)|)` for every `m` and `j`.
pub fn hofer_convergence_diagnostic(
    alpha_seq: &[TorusVector],
    alpha_limit: &TorusVector,
    j_list: &[i64],
    action: &[Hamiltonian],
) -> Result<Vec<HoferConvRow>> {
    let mut rows = Vec::with_capacity(alpha_seq.len() * j_list.len());
    for (m, am) in alpha_seq.iter().enumerate() {
        for &j in j_list {
            if j < 1 {
                return Err(Error::domain("iterates must be >= 1"));
            }
            let bound_m = bound_at(am, j, action)?;
            let bound_limit = bound_at(alpha_limit, j, action)?;
            rows.push(HoferConvRow {
                m,
                j,
                bound_m,
                bound_limit,
                diff: (bound_m.stated - bound_limit.stated).abs(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::{ContinuedFraction, TorusComponent};
    use num_rational::BigRational;

    fn action() -> Vec<Hamiltonian> {
        vec![Hamiltonian::AnnulusAction { coeff: 1.0 }]
    }

    fn golden_convergent(m: usize) -> TorusVector {
        let cf = ContinuedFraction::golden(m + 4);
        let c: BigRational = cf.convergent(m + 2);
        TorusVector::circle(TorusComponent::Rational(&c - c.floor()))
    }

    #[test]
    fn convergents_drive_diff_to_zero() {
        let seq: Vec<TorusVector> = (1..10).map(golden_convergent).collect();
        let limit = TorusVector::circle(TorusComponent::Irrational(ContinuedFraction::golden(
            64,
        )));
        let rows = hofer_convergence_diagnostic(&seq, &limit, &[1], &action()).unwrap();
        // Differences shrink along the sequence and end tiny.
        assert!(rows.last().unwrap().diff < 1e-3);
        assert!(rows.last().unwrap().diff < rows[0].diff);
        for w in rows.windows(2) {
            assert!(w[1].diff <= w[0].diff * 1.5 + 1e-12);
        }
    }

    #[test]
    fn constant_sequence_is_exactly_zero() {
        let a = TorusVector::circle(TorusComponent::rational(2, 7));
        let rows =
            hofer_convergence_diagnostic(&[a.clone(), a.clone()], &a, &[1, 3, 5], &action())
                .unwrap();
        for r in rows {
            assert_eq!(r.diff, 0.0);
        }
    }
}
