//! Finite-difference evaluation of the composition rule
//!
//! ```text
//! V̂(K₁⋯K_n Ψ) = iⁿ ∂ⁿ/∂λ₁⋯∂λ_n [ V(Φ, Φ̄) Φ ] at λ = 0,
//! Φ = e^{-iλ₁K₁}⋯e^{-iλ_nK_n} Ψ,   Φ̄ = e^{iλ₁K₁}⋯e^{iλ_nK_n} Ψ*.
//! ```
//!
//! The conjugate channel `Φ̄` is carried separately: for a complex scalar
//! `K = c` it is not the complex conjugate of `Φ`. The potential is
//! evaluated in its bilinear form, `g Φ Φ̄` instead of `g|Φ|²`.
//!
//! Each derivative is a central difference in its own `λ_j`; the nested
//! stencil at steps `h` and `h/2` is combined by Richardson extrapolation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::hamiltonian::NonlinearPotential;
use crate::num::Complex;

use super::dense::DenseOperator;

type C64 = Complex<f64>;

pub const MAX_DEPTH: usize = 3;
pub const DEFAULT_STEP: f64 = 1e-3;

/// An element of the operator set the composition rule acts on.
#[derive(Clone, Debug)]
pub enum Handle {
    Scalar(C64),
    Linear(Arc<DenseOperator>),
    /// `M + c`, for linear combinations with a complex scalar.
    Affine(Arc<DenseOperator>, C64),
    /// The nonlinear operator itself.
    NonlinearV,
}

impl Handle {
    pub fn linear(op: &Arc<DenseOperator>) -> Self {
        Handle::Linear(Arc::clone(op))
    }

    fn is_nonlinear(&self) -> bool {
        matches!(self, Handle::NonlinearV)
    }

    pub fn label(&self) -> String {
        match self {
            Handle::Scalar(c) => format!("({c})"),
            Handle::Linear(_) => "M".into(),
            Handle::Affine(_, c) => format!("(M+{c})"),
            Handle::NonlinearV => "V".into(),
        }
    }
}

/// Result of a finite-difference evaluation.
#[derive(Clone, Debug)]
pub struct FdValue {
    pub value: Vec<C64>,
    /// `max |R - D(h/2)|`, an estimate of the remaining truncation error.
    pub error_estimate: f64,
}

/// `V(Φ, Φ̄)` in bilinear form, component-major.
pub fn bilinear_potential(v: &NonlinearPotential<f64>, p: &[C64], pb: &[C64], points: usize) -> Result<Vec<C64>> {
    match v {
        NonlinearPotential::Cubic { g } => Ok(p.iter().zip(pb).map(|(a, b)| *a * *b * *g).collect()),
        NonlinearPotential::CoupledCubic { g } => {
            let c = g.len();
            let mut out = vec![C64::new(0.0, 0.0); c * points];
            for j in 0..c {
                for k in 0..c {
                    for i in 0..points {
                        out[j * points + i] += p[k * points + i] * pb[k * points + i] * g[j][k];
                    }
                }
            }
            Ok(out)
        }
        other => Err(Error::Unsupported(format!(
            "the oracle evaluates cubic and coupled-cubic potentials, not {}",
            other.name()
        ))),
    }
}

struct Pair {
    p: Vec<C64>,
    pb: Vec<C64>,
}

fn act(handle: &Handle, lambda: f64, state: &mut Pair, v: &NonlinearPotential<f64>, points: usize) -> Result<()> {
    let mi = C64::new(0.0, -1.0);
    let lam = C64::new(lambda, 0.0);
    match handle {
        Handle::Scalar(c) => {
            let f = (mi * lam * *c).exp();
            let fb = (-mi * lam * *c).exp();
            state.p.iter_mut().for_each(|z| *z *= f);
            state.pb.iter_mut().for_each(|z| *z *= fb);
        }
        Handle::Linear(m) => {
            state.p = m.exp_apply(lam, &state.p)?;
            state.pb = m.exp_apply(-lam, &state.pb)?;
        }
        Handle::Affine(m, c) => {
            act(&Handle::Linear(Arc::clone(m)), lambda, state, v, points)?;
            act(&Handle::Scalar(*c), lambda, state, v, points)?;
        }
        Handle::NonlinearV => {
            let u = bilinear_potential(v, &state.p, &state.pb, points)?;
            for ((z, zb), w) in state.p.iter_mut().zip(state.pb.iter_mut()).zip(&u) {
                *z *= (mi * lam * *w).exp();
                *zb *= (-mi * lam * *w).exp();
            }
        }
    }
    Ok(())
}

/// `V(Φ, Φ̄)Φ` with `Φ` produced by the handles at the given `λ`s
/// (rightmost handle first).
fn target(handles: &[Handle], lambdas: &[f64], psi: &WaveFunction<f64>, v: &NonlinearPotential<f64>) -> Result<Vec<C64>> {
    let points = psi.grid().len();
    let mut state = Pair {
        p: psi.data().to_vec(),
        pb: psi.data().iter().map(|z| z.conj()).collect(),
    };
    for (h, &l) in handles.iter().zip(lambdas).rev() {
        act(h, l, &mut state, v, points)?;
    }
    let u = bilinear_potential(v, &state.p, &state.pb, points)?;
    Ok(u.iter().zip(&state.p).map(|(a, b)| *a * *b).collect())
}

fn nested_difference(handles: &[Handle], h: f64, psi: &WaveFunction<f64>, v: &NonlinearPotential<f64>) -> Result<Vec<C64>> {
    let n = handles.len();
    let mut acc = vec![C64::new(0.0, 0.0); psi.data().len()];
    let mut lambdas = vec![0.0; n];
    for mask in 0..(1usize << n) {
        let mut sign = 1.0;
        for (j, l) in lambdas.iter_mut().enumerate() {
            if mask & (1 << j) != 0 {
                *l = -h;
                sign = -sign;
            } else {
                *l = h;
            }
        }
        let f = target(handles, &lambdas, psi, v)?;
        for (a, z) in acc.iter_mut().zip(&f) {
            *a += *z * sign;
        }
    }
    let scale = C64::new(0.0, 1.0).powu(n as u32) / (2.0 * h).powi(n as i32);
    acc.iter_mut().for_each(|z| *z *= scale);
    Ok(acc)
}

/// `V̂(K₁⋯K_n Ψ)` for up to three handles, listed leftmost first.
pub fn vhat_apply(handles: &[Handle], psi: &WaveFunction<f64>, v: &NonlinearPotential<f64>) -> Result<FdValue> {
    vhat_apply_with_step(handles, psi, v, DEFAULT_STEP)
}

pub fn vhat_apply_with_step(handles: &[Handle], psi: &WaveFunction<f64>, v: &NonlinearPotential<f64>, h: f64) -> Result<FdValue> {
    if handles.len() > MAX_DEPTH {
        return Err(Error::Oracle(format!(
            "composition depth {} exceeds the supported {MAX_DEPTH}",
            handles.len()
        )));
    }
    if !(h > 1e-8) || !h.is_finite() {
        return Err(Error::Oracle(format!("finite-difference step {h} is too small")));
    }
    v.check_components(psi.components())?;
    if handles.is_empty() {
        return Ok(FdValue {
            value: target(&[], &[], psi, v)?,
            error_estimate: 0.0,
        });
    }
    let coarse = nested_difference(handles, h, psi, v)?;
    let fine = nested_difference(handles, h / 2.0, psi, v)?;
    let value: Vec<C64> = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (*f * 4.0 - *c) / 3.0)
        .collect();
    let error_estimate = value
        .iter()
        .zip(&fine)
        .fold(0.0f64, |acc, (r, f)| acc.max((*r - *f).norm()));
    Ok(FdValue { value, error_estimate })
}

/// Applies linear handles right to left: `K₁⋯K_n x`.
fn apply_linear(handles: &[Handle], x: Vec<C64>) -> Result<Vec<C64>> {
    let mut x = x;
    for h in handles.iter().rev() {
        x = match h {
            Handle::Scalar(c) => x.into_iter().map(|z| z * *c).collect(),
            Handle::Linear(m) => m.apply(&x),
            Handle::Affine(m, c) => m.apply(&x).into_iter().zip(&x).map(|(a, b)| a + *b * *c).collect(),
            Handle::NonlinearV => return Err(Error::Oracle("nonlinear handle in a linear product".into())),
        };
    }
    Ok(x)
}

/// Value of an operator word acting on `Ψ`, leftmost letter last. The
/// letters before the first `V̂` are linear and act on the composition-rule
/// value of the remaining word.
pub fn word_value(word: &[Handle], psi: &WaveFunction<f64>, v: &NonlinearPotential<f64>) -> Result<FdValue> {
    match word.iter().position(Handle::is_nonlinear) {
        None => Ok(FdValue {
            value: apply_linear(word, psi.data().to_vec())?,
            error_estimate: 0.0,
        }),
        Some(j) => {
            let inner = vhat_apply(&word[j + 1..], psi, v)?;
            Ok(FdValue {
                value: apply_linear(&word[..j], inner.value)?,
                error_estimate: inner.error_estimate,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::oracle::dense::dense_h0;
    use crate::oracle::relative_error;
    use crate::profiles::smooth_random_state;

    fn setup() -> (WaveFunction<f64>, Arc<DenseOperator>, NonlinearPotential<f64>) {
        let g = Grid::<f64>::new(&[32], &[10.0]).unwrap();
        let ext: Vec<f64> = (0..32).map(|p| 0.5 * (2.0 * std::f64::consts::PI * g.position(p)[0] / 10.0).cos()).collect();
        let h0 = Arc::new(dense_h0(&g, &ext, 1.0).unwrap());
        (smooth_random_state(&g, 1, 1), h0, NonlinearPotential::cubic(1.0))
    }

    #[test]
    fn empty_word_is_the_local_potential() {
        let (psi, _, v) = setup();
        let out = vhat_apply(&[], &psi, &v).unwrap();
        for (o, z) in out.value.iter().zip(psi.data()) {
            assert!((*o - *z * z.norm_sqr()).norm() < 1e-15);
        }
    }

    #[test]
    fn first_appendix_product() {
        let (psi, h0, v) = setup();
        let fd = vhat_apply(&[Handle::linear(&h0)], &psi, &v).unwrap();
        let hp = h0.apply(psi.data());
        let conj: Vec<C64> = psi.data().iter().map(|z| z.conj()).collect();
        let hc = h0.apply(&conj);
        let want: Vec<C64> = (0..32)
            .map(|i| {
                let z = psi.data()[i];
                hp[i] * 2.0 * z.norm_sqr() - z * z * hc[i]
            })
            .collect();
        assert!(relative_error(&fd.value, &want, psi.data()) < 1e-8);
    }

    #[test]
    fn depth_and_family_limits() {
        let (psi, h0, v) = setup();
        let four = vec![Handle::linear(&h0); 4];
        assert!(vhat_apply(&four, &psi, &v).is_err());
        let fwm = NonlinearPotential::four_wave(1.0, [[0.0; 4]; 4]);
        let psi4 = smooth_random_state(psi.grid(), 4, 2);
        assert!(vhat_apply(&[], &psi4, &fwm).is_err());
        assert!(vhat_apply_with_step(&[Handle::linear(&h0)], &psi, &v, 0.0).is_err());
    }
}
