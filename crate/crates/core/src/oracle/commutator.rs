//! Finite-difference double commutator `[B,[B,A]]Ψ` with
//! `B = V_ext + V̂` and `A = κ(-∇²)`.
//!
//! The nested commutator is expanded to `BBA - 2BAB + ABB` and every word
//! over `{A, V_ext, V̂}` is evaluated with the composition rule. The result
//! is divided by `Ψ` where `|Ψ|` clears a floor and compared against the
//! literal field `W` and the canonical field `2W`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::hamiltonian::{LinearHamiltonian, NonlinearPotential};
use crate::num::Complex;
use crate::profiles::smooth_random_state;
use crate::propagator::{CommutatorVariant, Propagator};

use super::composition::{word_value, Handle};
use super::dense::{dense_kinetic, DenseOperator};

type C64 = Complex<f64>;

/// Points with `|Ψ| < FLOOR·max|Ψ|` are left out of the quotient.
pub const FLOOR: f64 = 0.05;
/// A variant matches when its relative deviation is below this.
pub const MATCH_TOL: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct CommutatorReport {
    /// `Re([B,[B,A]]Ψ / Ψ)`; zero outside the mask.
    pub fd_field: Vec<f64>,
    pub mask: Vec<bool>,
    /// Largest `|Im([B,[B,A]]Ψ / Ψ)|` on the mask.
    pub max_imaginary: f64,
    pub paper_field: Vec<f64>,
    pub canonical_field: Vec<f64>,
    /// `max |fd - W| / max |fd|` on the mask.
    pub paper_error: f64,
    pub canonical_error: f64,
    /// Largest finite-difference error estimate over the words.
    pub fd_error_estimate: f64,
}

impl CommutatorReport {
    pub fn matching_variant(&self) -> Option<CommutatorVariant> {
        if self.canonical_error < MATCH_TOL && self.canonical_error <= self.paper_error {
            Some(CommutatorVariant::Canonical)
        } else if self.paper_error < MATCH_TOL {
            Some(CommutatorVariant::Paper)
        } else {
            None
        }
    }

    pub fn summary(&self) -> String {
        let verdict = match self.matching_variant() {
            Some(v) => format!("matches {}", v.name()),
            None => "matches neither variant".into(),
        };
        format!(
            "fd double commutator {verdict} (paper rel err {:.3e}, canonical rel err {:.3e}, max |Im| {:.3e})",
            self.paper_error, self.canonical_error, self.max_imaginary
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum L {
    A,
    X,
    V,
}

fn words(prefix: &[L]) -> Vec<Vec<L>> {
    // expand each B into X + V
    let mut out = vec![Vec::new()];
    for l in prefix {
        let choices: &[L] = if *l == L::V { &[L::X, L::V] } else { &[L::A] };
        out = out
            .into_iter()
            .flat_map(|w| {
                choices.iter().map(move |c| {
                    let mut w = w.clone();
                    w.push(*c);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn fd_double_commutator(psi: &WaveFunction<f64>, h0: &LinearHamiltonian<f64>, g: f64) -> Result<CommutatorReport> {
    if psi.components() != 1 || h0.components() != 1 {
        return Err(Error::Oracle("the double commutator oracle is single-component".into()));
    }
    let grid = psi.grid();
    let kinetic = Arc::new(dense_kinetic(grid, h0.kappa())?);
    let ext = Arc::new(DenseOperator::diagonal(h0.external(0).values()));
    let v = NonlinearPotential::cubic(g);

    let mut total = vec![C64::new(0.0, 0.0); grid.len()];
    let mut fd_error_estimate = 0.0f64;
    // B B A - 2 B A B + A B B, with V standing in for B before expansion
    for (weight, shape) in [(1.0, [L::V, L::V, L::A]), (-2.0, [L::V, L::A, L::V]), (1.0, [L::A, L::V, L::V])] {
        for w in words(&shape) {
            let handles: Vec<Handle> = w
                .iter()
                .map(|l| match l {
                    L::A => Handle::linear(&kinetic),
                    L::X => Handle::linear(&ext),
                    L::V => Handle::NonlinearV,
                })
                .collect();
            let val = word_value(&handles, psi, &v)?;
            fd_error_estimate = fd_error_estimate.max(val.error_estimate);
            for (t, z) in total.iter_mut().zip(&val.value) {
                *t += *z * weight;
            }
        }
    }

    let peak = psi.max_amplitude();
    let mask: Vec<bool> = psi.data().iter().map(|z| z.norm() > FLOOR * peak).collect();
    let kept = mask.iter().filter(|m| **m).count();
    if peak == 0.0 || 2 * kept < grid.len() {
        return Err(Error::Oracle(format!(
            "state vanishes on too much of the grid: {kept} of {} points above the floor",
            grid.len()
        )));
    }
    let mut fd_field = vec![0.0; grid.len()];
    let mut max_imaginary = 0.0f64;
    for i in 0..grid.len() {
        if mask[i] {
            let q = total[i] / psi.data()[i];
            fd_field[i] = q.re;
            max_imaginary = max_imaginary.max(q.im.abs());
        }
    }

    let prop = Propagator::new(h0.clone(), v)?;
    let paper_field = prop.commutator_field(psi, CommutatorVariant::Paper)?;
    let canonical_field = prop.commutator_field(psi, CommutatorVariant::Canonical)?;
    let scale = masked_max(&fd_field, &mask, |x| x.abs());
    let rel = |w: &[f64]| {
        let d = (0..w.len())
            .filter(|&i| mask[i])
            .fold(0.0f64, |acc, i| acc.max((fd_field[i] - w[i]).abs()));
        if scale > 0.0 {
            d / scale
        } else {
            d
        }
    };
    Ok(CommutatorReport {
        paper_error: rel(&paper_field),
        canonical_error: rel(&canonical_field),
        fd_field,
        mask,
        max_imaginary,
        paper_field,
        canonical_field,
        fd_error_estimate,
    })
}

/// A smooth random state lifted away from zero, so that the quotient by `Ψ`
/// does not amplify finite-difference noise near nodes.
pub fn nodeless_state(grid: &Grid<f64>, seed: u64) -> WaveFunction<f64> {
    let mut psi = smooth_random_state(grid, 1, seed);
    let lift = 3.0 * psi.max_amplitude();
    psi.data_mut().iter_mut().for_each(|z| *z += lift);
    psi.normalize();
    psi
}

fn masked_max(x: &[f64], mask: &[bool], f: impl Fn(f64) -> f64) -> f64 {
    x.iter().zip(mask).filter(|(_, m)| **m).fold(0.0f64, |acc, (v, _)| acc.max(f(*v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ExternalPotential;
    use std::f64::consts::PI;

    fn periodic(g: &Grid<f64>, amp: f64) -> LinearHamiltonian<f64> {
        let vals = (0..g.len()).map(|p| amp * (2.0 * PI * g.position(p)[0] / 10.0).cos()).collect();
        let ext = ExternalPotential::from_values(g, vals).unwrap();
        LinearHamiltonian::uniform(g, 1.0, ext, 1).unwrap()
    }

    #[test]
    fn free_linear_case_is_zero() {
        let g = Grid::<f64>::new(&[32], &[10.0]).unwrap();
        let psi = smooth_random_state(&g, 1, 5);
        let r = fd_double_commutator(&psi, &LinearHamiltonian::free(&g), 0.0).unwrap();
        assert!(r.fd_field.iter().all(|w| w.abs() < 1e-10));

        let flat = WaveFunction::from_fn(&g, 1, |_, _| C64::new(0.3, 0.1));
        let r = fd_double_commutator(&flat, &LinearHamiltonian::free(&g), 1.0).unwrap();
        assert!(r.fd_field.iter().all(|w| w.abs() < 1e-8));
    }

    #[test]
    fn linear_case_matches_matrix_commutator() {
        let g = Grid::<f64>::new(&[32], &[10.0]).unwrap();
        let h0 = periodic(&g, 0.7);
        let psi = smooth_random_state(&g, 1, 6);
        let r = fd_double_commutator(&psi, &h0, 0.0).unwrap();
        let a = dense_kinetic(&g, 1.0).unwrap();
        let b = DenseOperator::diagonal(h0.external(0).values());
        let (am, bm) = (a.matrix(), b.matrix());
        let c = bm * bm * am - (bm * am * bm) * C64::new(2.0, 0.0) + am * bm * bm;
        let want = DenseOperator::from_matrix(c).apply(psi.data());
        for i in 0..g.len() {
            if r.mask[i] {
                let q = want[i] / psi.data()[i];
                assert!((q.re - r.fd_field[i]).abs() < 1e-9);
            }
        }
        assert_eq!(r.matching_variant(), Some(CommutatorVariant::Canonical));
    }

    #[test]
    fn nonlinear_case_picks_a_variant() {
        let g = Grid::<f64>::new(&[32], &[10.0]).unwrap();
        let psi = nodeless_state(&g, 7);
        let r = fd_double_commutator(&psi, &periodic(&g, 0.4), 1.0).unwrap();
        assert!(r.max_imaginary < 1e-4, "{}", r.summary());
        assert_eq!(r.matching_variant(), Some(CommutatorVariant::Canonical), "{}", r.summary());
    }

    #[test]
    fn refuses_vanishing_state() {
        let g = Grid::<f64>::new(&[32], &[10.0]).unwrap();
        let mut psi = WaveFunction::zeros(&g, 1);
        psi.data_mut()[3] = C64::new(1.0, 0.0);
        assert!(fd_double_commutator(&psi, &LinearHamiltonian::free(&g), 1.0).is_err());
    }
}
