//! Empirical convergence order.

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::num::Real;
use crate::propagator::{Method, Propagator};
use crate::schemes;

/// Reference steps are at most this fraction of the smallest tested step.
pub const REFERENCE_REFINEMENT: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub dt: f64,
    pub n_steps: usize,
    /// `‖ψ(T) - ψ_ref(T)‖₂`.
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    pub reference_dt: f64,
}

impl ConvergenceStudy {
    /// Slope over the points whose error lies in `[lo, hi]`.
    pub fn slope_in(&self, lo: f64, hi: f64) -> Result<f64> {
        let (dts, errs): (Vec<f64>, Vec<f64>) = self
            .points
            .iter()
            .filter(|p| p.error >= lo && p.error <= hi)
            .map(|p| (p.dt, p.error))
            .unzip();
        loglog_slope(&dts, &errs)
    }

    pub fn slope(&self) -> Result<f64> {
        self.slope_in(0.0, f64::INFINITY)
    }

    pub fn local_slopes(&self) -> Vec<f64> {
        let dts: Vec<f64> = self.points.iter().map(|p| p.dt).collect();
        let errs: Vec<f64> = self.points.iter().map(|p| p.error).collect();
        local_slopes(&dts, &errs)
    }
}

/// The order-6 reference solution at `dt_ref = t_final / n_ref`, with
/// `n_ref` the smallest step count for which `dt_ref ≤ min(dts)/20`.
pub fn reference_solution<T: Real>(
    prop: &mut Propagator<T>,
    psi0: &WaveFunction<T>,
    t_final: f64,
    dts: &[f64],
) -> Result<(WaveFunction<T>, f64)> {
    let min_dt = dts.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_dt > 0.0) || !min_dt.is_finite() {
        return Err(Error::InvalidParameter("need at least one positive dt".into()));
    }
    let n_ref = (t_final * REFERENCE_REFINEMENT as f64 / min_dt).ceil() as usize;
    let method = if prop.potential().has_mixing() {
        Method::FourWave { order: 6 }
    } else {
        Method::Split(schemes::order6())
    };
    let dt_ref = t_final / n_ref as f64;
    Ok((prop.evolve(psi0, &method, dt_ref, n_ref)?, dt_ref))
}

/// Propagates `psi0` to `t_final` at every `dt` and measures the distance
/// to `reference`. Each `dt` must divide `t_final`.
pub fn study<T: Real>(
    prop: &mut Propagator<T>,
    psi0: &WaveFunction<T>,
    method: &Method,
    t_final: f64,
    dts: &[f64],
    reference: &WaveFunction<T>,
    reference_dt: f64,
) -> Result<ConvergenceStudy> {
    let points = dts
        .iter()
        .map(|&dt| {
            let n_steps = steps_for(t_final, dt)?;
            let out = prop.evolve(psi0, method, dt, n_steps)?;
            Ok(ConvergencePoint {
                dt,
                n_steps,
                error: out.distance(reference).as_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceStudy { points, reference_dt })
}

/// Least-squares slope of `log(error)` against `log(dt)`.
pub fn loglog_slope(dts: &[f64], errors: &[f64]) -> Result<f64> {
    if dts.len() != errors.len() || dts.len() < 2 {
        return Err(Error::InvalidParameter("need at least two (dt, error) pairs".into()));
    }
    if dts.iter().chain(errors).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("step sizes and errors must be positive and finite".into()));
    }
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("degenerate fit: all step sizes equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Number of steps that reach `t_final` with step `dt`, if `dt` divides it.
pub fn steps_for(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_final > 0.0) {
        return Err(Error::InvalidParameter("final time and dt must be positive".into()));
    }
    let n = (t_final / dt).round();
    if n < 1.0 || ((n * dt - t_final) / t_final).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "dt = {dt} does not divide the final time {t_final}"
        )));
    }
    Ok(n as usize)
}

/// Local slopes between consecutive points.
pub fn local_slopes(dts: &[f64], errors: &[f64]) -> Vec<f64> {
    dts.windows(2)
        .zip(errors.windows(2))
        .map(|(d, e)| (e[1] / e[0]).ln() / (d[1] / d[0]).ln())
        .collect()
}
