//! Small-grid verification engine.
//!
//! Dense matrices stand in for `H₀`, the composition rule is evaluated by
//! nested finite differences, and the closed-form operator products and
//! time derivatives are checked against both. Everything here is `f64`.

pub mod algebra;
pub mod appendix;
pub mod commutator;
pub mod composition;
pub mod dense;
pub mod suite;
pub mod taylor;

pub use appendix::{appendix_product, AppendixId, Letter};
pub use commutator::{fd_double_commutator, CommutatorReport};
pub use composition::{vhat_apply, vhat_apply_with_step, word_value, FdValue, Handle};
pub use dense::{dense_h0, dense_kinetic, DenseOperator};
pub use suite::{run_suite, IdentityRow, SuiteConfig};
pub use taylor::{fourth_derivative_uncorrected, taylor_derivative, taylor_derivative_by, taylor_residual_curve, Route};

use crate::num::Complex;

/// Points with `|ψ| ≤ MASK_FLOOR·max|ψ|` are ignored by [`relative_error`].
pub const MASK_FLOOR: f64 = 1e-6;

/// `max |a - b| / max |b|`, both maxima over the points where
/// `|ψ| > MASK_FLOOR·max|ψ|`. Multi-component fields are compared blockwise
/// against the same per-point mask layout as `psi`.
pub fn relative_error(a: &[Complex<f64>], b: &[Complex<f64>], psi: &[Complex<f64>]) -> f64 {
    assert_eq!(a.len(), b.len(), "field lengths differ");
    assert_eq!(a.len(), psi.len(), "field and state lengths differ");
    let peak = psi.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for ((x, y), p) in a.iter().zip(b).zip(psi) {
        if p.norm() > MASK_FLOOR * peak {
            diff = diff.max((*x - *y).norm());
            scale = scale.max(y.norm());
        }
    }
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_ignores_nodes() {
        let psi = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        let a = vec![Complex::new(2.0, 0.0), Complex::new(5.0, 0.0)];
        let b = vec![Complex::new(2.0, 0.0), Complex::new(0.0, 0.0)];
        assert_eq!(relative_error(&a, &b, &psi), 0.0);
        let zero = vec![Complex::new(0.0, 0.0); 2];
        assert_eq!(relative_error(&zero, &zero, &psi), 0.0);
    }
}
