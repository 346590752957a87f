//! Time derivatives `∂ₜⁿΨ` at `t = 0` for the cubic equation
//! `i∂ₜΨ = (H₀ + g|Ψ|²)Ψ`, and the truncated Taylor propagator.
//!
//! Four independent routes are provided:
//!
//! * [`Route::ClosedForm`]: explicit expansions for `n ≤ 4`.
//! * [`Route::Appendix`]: `(-i)ⁿ (H₀ + V̂)ⁿ Ψ` expanded into words, each word
//!   evaluated from the closed-form products and the power identity.
//! * [`Route::FiniteDifference`]: the same words through the composition rule.
//! * [`Route::Recurrence`]: Taylor coefficients of `Ψ` and `Ψ*` generated
//!   directly from the equation of motion.
//!
//! The commonly quoted fourth derivative has two slips: the term written
//! `2gH₀(|Ψ|²H₀Ψ)` on its second line must be `2gH₀(|Ψ|²H₀²Ψ)`, and
//! `-2g²Ψ²H₀(|Ψ|²H₀Ψ*)` is listed twice but occurs once. [`Route::ClosedForm`]
//! uses the corrected expansion; [`fourth_derivative_uncorrected`] keeps the
//! literal one for comparison.

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::hamiltonian::{LinearHamiltonian, NonlinearPotential};
use crate::num::Complex;
use crate::propagator::{Method, Propagator};
use crate::schemes;

use super::algebra::{Ctx, Field};
use super::appendix::{appendix_field, AppendixId, Letter};
use super::composition::{word_value, Handle};
use super::dense::{dense_h0, DenseOperator};

type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    ClosedForm,
    Appendix,
    FiniteDifference,
    Recurrence,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::ClosedForm => "closed-form",
            Route::Appendix => "appendix-words",
            Route::FiniteDifference => "fd-words",
            Route::Recurrence => "recurrence",
        }
    }
}

fn check_order(n: usize) -> Result<()> {
    if !(1..=4).contains(&n) {
        return Err(Error::Oracle(format!("derivative order {n} outside 1..=4")));
    }
    Ok(())
}

/// `∂ₜⁿΨ` by the chosen route. `h0` must be the dense form of the
/// Hamiltonian the state lives under.
pub fn taylor_derivative_by(route: Route, n: usize, psi: &WaveFunction<f64>, h0: &DenseOperator, g: f64) -> Result<Vec<C64>> {
    check_order(n)?;
    if psi.components() != 1 {
        return Err(Error::ComponentMismatch {
            expected: 1,
            found: psi.components(),
        });
    }
    let x = Ctx::new(h0, g, psi.data());
    Ok(match route {
        Route::ClosedForm => closed_form(n, &x, false).into_inner(),
        Route::Appendix => word_sum(n, |w| Ok(appendix_word(w, &x)))?,
        Route::FiniteDifference => {
            let v = NonlinearPotential::cubic(g);
            let op = std::sync::Arc::new(h0.clone());
            word_sum(n, |w| {
                let handles: Vec<Handle> = w
                    .iter()
                    .map(|l| match l {
                        Letter::H => Handle::linear(&op),
                        Letter::V => Handle::NonlinearV,
                    })
                    .collect();
                Ok(Field(word_value(&handles, psi, &v)?.value))
            })?
        }
        Route::Recurrence => recurrence(n, &x),
    })
}

/// Closed-form `∂ₜⁿΨ` (corrected fourth derivative).
pub fn taylor_derivative(n: usize, psi: &WaveFunction<f64>, h0: &DenseOperator, g: f64) -> Result<Vec<C64>> {
    taylor_derivative_by(Route::ClosedForm, n, psi, h0, g)
}

/// The commonly quoted fourth derivative, slips included.
pub fn fourth_derivative_uncorrected(psi: &[C64], h0: &DenseOperator, g: f64) -> Vec<C64> {
    closed_form(4, &Ctx::new(h0, g, psi), true).into_inner()
}

/// `(-i)ⁿ Σ_w w(Ψ)` over all words `w ∈ {H₀, V̂}ⁿ`.
fn word_sum(n: usize, mut eval: impl FnMut(&[Letter]) -> Result<Field>) -> Result<Vec<C64>> {
    let mut total: Option<Field> = None;
    for mask in 0..(1usize << n) {
        let word: Vec<Letter> = (0..n)
            .map(|j| if mask & (1 << j) != 0 { Letter::V } else { Letter::H })
            .collect();
        let f = eval(&word)?;
        total = Some(match total {
            None => f,
            Some(t) => t + f,
        });
    }
    let phase = C64::new(0.0, -1.0).powu(n as u32);
    Ok((phase * total.expect("n >= 1")).into_inner())
}

/// One word from closed forms: leading `H₀`s act on `V̂(suffix Ψ)`.
fn appendix_word(word: &[Letter], x: &Ctx) -> Field {
    let Some(j) = word.iter().position(|l| *l == Letter::V) else {
        return x.hn(word.len(), x.p.clone());
    };
    let suffix = &word[j + 1..];
    let inner = if suffix.iter().all(|l| *l == Letter::V) {
        // power identity: V̂^{m+1} Ψ = (g|Ψ|²)^{m+1} Ψ
        let m = suffix.len() as u32 + 1;
        x.g.powi(m as i32) * x.a.powi(m) * x.p.clone()
    } else {
        let id = AppendixId::for_word(suffix).expect("every mixed word of length <= 3 is tabulated");
        appendix_field(id, x)
    };
    x.hn(j, inner)
}

fn closed_form(n: usize, x: &Ctx, uncorrected: bool) -> Field {
    let (g, p, c, a) = (x.g, &x.p, &x.c, &x.a);
    let i = C64::new(0.0, 1.0);
    let g2 = g * g;
    let g3 = g2 * g;
    let p2 = p.powi(2);
    let hp = x.h(p.clone());
    let hc = x.h(c.clone());
    let h2p = x.h(hp.clone());
    let h2c = x.h(hc.clone());
    let h3p = x.h(h2p.clone());
    let h3c = x.h(h2c.clone());
    let ap = a.clone() * p.clone();
    let ac = a.clone() * c.clone();
    let h = |f: Field| x.h(f);
    match n {
        1 => -i * (hp + g * ap),
        2 => -h2p - g * h(ap) - 2.0 * g * a.clone() * hp + g * p2 * hc - g2 * a.powi(2) * p.clone(),
        3 => {
            i * (h3p + g * h(h(ap.clone())) + 2.0 * g * h(a.clone() * hp.clone()) - g * h(p2.clone() * hc.clone())
                + 2.0 * g * a.clone() * h2p
                + 2.0 * g * c.clone() * hp.powi(2)
                - 4.0 * g * p.clone() * hp.clone() * hc.clone()
                + g * p2.clone() * h2c
                + g2 * h(a.powi(2) * p.clone())
                + 2.0 * g2 * a.clone() * h(ap.clone())
                + 3.0 * g2 * a.powi(2) * hp
                - 4.0 * g2 * a.clone() * p2.clone() * hc
                + g2 * p2 * h(ac)
                + g3 * a.powi(3) * p.clone())
        }
        4 => {
            let h_ap = h(ap.clone());
            let h_ac = h(ac.clone());
            let second_line = if uncorrected {
                2.0 * g * h(a.clone() * hp.clone())
            } else {
                2.0 * g * h(a.clone() * h2p.clone())
            };
            let mut sum = h(h3p.clone())
                + g * h(h(h_ap.clone()))
                + 2.0 * g * h(h(a.clone() * hp.clone()))
                - g * h(h(p2.clone() * hc.clone()))
                + second_line
                + 2.0 * g * h(c.clone() * hp.powi(2))
                - 4.0 * g * h(p.clone() * hp.clone() * hc.clone())
                + g * h(p2.clone() * h2c.clone())
                + 2.0 * g * a.clone() * h3p
                + 6.0 * g * c.clone() * hp.clone() * h2p.clone()
                - 6.0 * g * hp.powi(2) * hc.clone()
                - 6.0 * g * p.clone() * hc.clone() * h2p.clone()
                + 6.0 * g * p.clone() * hp.clone() * h2c.clone()
                - g * p2.clone() * h3c
                + g2 * h(h(a.powi(2) * p.clone()))
                + 2.0 * g2 * h(a.clone() * h_ap.clone())
                + g2 * h(p2.clone() * h_ac.clone())
                + 6.0 * g2 * c.clone() * hp.clone() * h_ap.clone()
                - 6.0 * g2 * p.clone() * hc.clone() * h_ap.clone()
                + 6.0 * g2 * p.clone() * hp.clone() * h_ac.clone()
                + 6.0 * g2 * a.clone() * p2.clone() * h2c.clone()
                - 4.0 * g2 * h(a.clone() * p2.clone() * hc.clone())
                + 2.0 * g2 * a.clone() * h(h_ap.clone())
                - g2 * p2.clone() * h(h_ac.clone())
                + 3.0 * g2 * h(a.powi(2) * hp.clone())
                - 2.0 * g2 * a.clone() * h(p2.clone() * hc.clone())
                + 4.0 * g2 * a.clone() * h(a.clone() * hp.clone())
                + 4.0 * g2 * a.clone() * c.clone() * hp.powi(2)
                + 3.0 * g2 * a.powi(2) * h2p
                + 4.0 * g2 * p.powi(3) * hc.powi(2)
                - 22.0 * g2 * a.clone() * p.clone() * hp.clone() * hc.clone()
                + g2 * p2.clone() * h(c.powi(2) * hp.clone())
                - 2.0 * g2 * p2.clone() * h(a.clone() * hc.clone())
                + g3 * h(a.powi(3) * p.clone())
                + 2.0 * g3 * a.clone() * h(a.powi(2) * p.clone())
                + 3.0 * g3 * a.powi(2) * h_ap
                - 11.0 * g3 * a.powi(2) * p2.clone() * hc.clone()
                + 6.0 * g3 * a.clone() * p2.clone() * h_ac
                - g3 * p2.clone() * h(a.powi(2) * c.clone())
                + 4.0 * g3 * a.powi(3) * hp
                + g2 * g2 * a.powi(4) * p.clone();
            if uncorrected {
                sum = sum - 2.0 * g2 * p2 * h(a.clone() * hc);
            }
            sum
        }
        _ => unreachable!("order checked"),
    }
}

/// Taylor coefficients from `i ċ = H₀c + g c² d` and `-i ḋ = H₀d + g d² c`,
/// where `d` is the series of `Ψ*`. Returns `n!·c_n`.
fn recurrence(n: usize, x: &Ctx) -> Vec<C64> {
    let mut cs = vec![x.p.clone()];
    let mut ds = vec![x.c.clone()];
    let len = x.p.0.len();
    for k in 0..n {
        let mut nl_c = Field::zeros(len);
        let mut nl_d = Field::zeros(len);
        for ia in 0..=k {
            for ib in 0..=(k - ia) {
                let ic = k - ia - ib;
                nl_c = nl_c + cs[ia].clone() * cs[ib].clone() * ds[ic].clone();
                nl_d = nl_d + ds[ia].clone() * ds[ib].clone() * cs[ic].clone();
            }
        }
        let scale = 1.0 / (k as f64 + 1.0);
        let next_c = C64::new(0.0, -scale) * (x.h(cs[k].clone()) + x.g * nl_c);
        let next_d = C64::new(0.0, scale) * (x.h(ds[k].clone()) + x.g * nl_d);
        cs.push(next_c);
        ds.push(next_d);
    }
    let factorial: f64 = (1..=n).map(|j| j as f64).product();
    (factorial * cs.pop().expect("n >= 1")).into_inner()
}

/// `‖Ψ_ref(t) - Σ_{n≤4} tⁿ/n! ∂ₜⁿΨ‖` for each `t`, with the reference from an
/// eighth-order split propagation at substeps no larger than `1e-3`.
pub fn taylor_residual_curve(psi: &WaveFunction<f64>, h0: &LinearHamiltonian<f64>, g: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    if h0.components() != 1 {
        return Err(Error::Oracle("Taylor certification needs a single component".into()));
    }
    let dense = dense_h0(psi.grid(), h0.external(0).values(), h0.kappa())?;
    let derivs: Vec<Vec<C64>> = (1..=4)
        .map(|n| taylor_derivative(n, psi, &dense, g))
        .collect::<Result<_>>()?;
    let mut prop = Propagator::new(h0.clone(), NonlinearPotential::cubic(g))?;
    let method = Method::Split(schemes::order8());
    let dv = psi.grid().cell_volume();
    ts.iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::Oracle(format!("non-positive time {t}")));
            }
            let substeps = ((t / 1e-3).ceil() as usize).max(4);
            let reference = prop
                .evolve(psi, &method, t / substeps as f64, substeps)
                .map_err(|e| Error::Oracle(format!("reference propagation failed: {e}")))?;
            let mut sq = 0.0;
            for i in 0..psi.data().len() {
                let mut series = psi.data()[i];
                let mut coeff = 1.0;
                for (n, d) in derivs.iter().enumerate() {
                    coeff *= t / (n as f64 + 1.0);
                    series += d[i] * coeff;
                }
                sq += (reference.data()[i] - series).norm_sqr();
            }
            Ok((t, (sq * dv).sqrt()))
        })
        .collect()
}
