//! The identity table behind `oracle-verify`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::convergence::loglog_slope;
use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::hamiltonian::{ExternalPotential, LinearHamiltonian, NonlinearPotential};
use crate::num::Complex;
use crate::profiles::smooth_random_state;

use super::appendix::{appendix_product, AppendixId, Letter};
use super::commutator::{fd_double_commutator, nodeless_state};
use super::composition::{vhat_apply, Handle};
use super::dense::{dense_h0, dense_kinetic, DenseOperator};
use super::relative_error;
use super::taylor::{fourth_derivative_uncorrected, taylor_derivative, taylor_derivative_by, taylor_residual_curve, Route};

type C64 = Complex<f64>;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub points: usize,
    pub length: f64,
    pub g: f64,
    /// Amplitude of the periodic external potential `a·cos(2πx/L)`.
    pub external_amplitude: f64,
    /// Finite-difference identity tolerance.
    pub tol: f64,
    /// Seeds of the smooth random states; the first drives the identities.
    pub seeds: Vec<u64>,
    /// Keep only rows whose name starts with one of these.
    pub only: Option<Vec<String>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            points: 32,
            length: 10.0,
            g: 1.0,
            external_amplitude: 0.5,
            tol: 1e-5,
            seeds: vec![11, 12, 13],
            only: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdentityRow {
    pub name: String,
    pub description: String,
    pub grid: String,
    pub tol: f64,
    pub error: f64,
    pub pass: bool,
    /// Informational rows never fail the suite.
    pub informational: bool,
    pub note: String,
}

impl IdentityRow {
    pub fn status(&self) -> &'static str {
        match (self.informational, self.pass) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        }
    }
}

pub const TAYLOR_TIMES: [f64; 9] = [1e-3, 1.78e-3, 3.16e-3, 5.62e-3, 1e-2, 1.78e-2, 3.16e-2, 5.62e-2, 1e-1];

struct Setup {
    label: String,
    psi: WaveFunction<f64>,
    h0_lin: LinearHamiltonian<f64>,
    h0: Arc<DenseOperator>,
    kinetic: Arc<DenseOperator>,
    ext: Arc<DenseOperator>,
    v: NonlinearPotential<f64>,
}

struct Table<'a> {
    cfg: &'a SuiteConfig,
    grid_label: String,
    rows: Vec<IdentityRow>,
}

impl Table<'_> {
    fn wanted(&self, name: &str) -> bool {
        match &self.cfg.only {
            None => true,
            Some(list) => list.iter().any(|p| name.starts_with(p.as_str())),
        }
    }

    fn push(&mut self, name: &str, description: &str, tol: f64, error: f64, informational: bool, note: String) {
        self.rows.push(IdentityRow {
            name: name.into(),
            description: description.into(),
            grid: self.grid_label.clone(),
            tol,
            error,
            pass: error.is_finite() && error <= tol,
            informational,
            note,
        });
    }

    fn check(&mut self, name: &str, description: &str, tol: f64, f: impl FnOnce() -> Result<f64>) -> Result<()> {
        if !self.wanted(name) {
            return Ok(());
        }
        let err = f()?;
        self.push(name, description, tol, err, false, String::new());
        Ok(())
    }
}

fn build(cfg: &SuiteConfig, seed: u64) -> Result<Setup> {
    let grid = Grid::new(&[cfg.points], &[cfg.length])?;
    let vals: Vec<f64> = (0..grid.len())
        .map(|p| cfg.external_amplitude * (2.0 * PI * grid.position(p)[0] / cfg.length).cos())
        .collect();
    let h0 = Arc::new(dense_h0(&grid, &vals, 1.0)?);
    let ext_pot = ExternalPotential::from_values(&grid, vals.clone())?;
    Ok(Setup {
        label: format!("n={} L={} seed={seed}", cfg.points, cfg.length),
        psi: smooth_random_state(&grid, 1, seed),
        h0_lin: LinearHamiltonian::uniform(&grid, 1.0, ext_pot, 1)?,
        h0,
        kinetic: Arc::new(dense_kinetic(&grid, 1.0)?),
        ext: Arc::new(DenseOperator::diagonal(&vals)),
        v: NonlinearPotential::cubic(cfg.g),
    })
}

fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scaled(a: &[C64], c: C64) -> Vec<C64> {
    a.iter().map(|x| x * c).collect()
}

fn local(psi: &WaveFunction<f64>, g: f64, power: i32) -> Vec<C64> {
    psi.data().iter().map(|z| z * (g * z.norm_sqr()).powi(power)).collect()
}

/// `V̂ e^{-iλK}Ψ` through `Σ_{n≤3} (-iλ)ⁿ/n! V̂(KⁿΨ)` against
/// `V(e^{-iλK}Ψ)e^{-iλK}Ψ`, both with `V̂Ψ` removed so only the
/// λ-dependent part is compared.
fn conjugation_error(k: Handle, lambda: f64, s: &Setup) -> Result<f64> {
    let base = vhat_apply(&[], &s.psi, &s.v)?.value;
    let mut series = vec![C64::new(0.0, 0.0); base.len()];
    let mut coeff = C64::new(1.0, 0.0);
    for n in 1..=3 {
        coeff *= C64::new(0.0, -lambda) / n as f64;
        let word = vec![k.clone(); n];
        series = add(&series, &scaled(&vhat_apply(&word, &s.psi, &s.v)?.value, coeff));
    }
    let moved: Vec<C64> = match &k {
        Handle::Linear(m) => m.exp_apply(C64::new(lambda, 0.0), s.psi.data())?,
        Handle::Scalar(c) => scaled(s.psi.data(), (C64::new(0.0, -lambda) * c).exp()),
        _ => return Err(Error::Oracle("conjugation check takes a linear or scalar handle".into())),
    };
    let direct: Vec<C64> = moved
        .iter()
        .zip(&base)
        .map(|(z, b)| z * (s.g() * z.norm_sqr()) - b)
        .collect();
    Ok(relative_error(&series, &direct, s.psi.data()))
}

impl Setup {
    fn g(&self) -> f64 {
        match self.v {
            NonlinearPotential::Cubic { g } => g,
            _ => 0.0,
        }
    }

    fn handles(&self, word: &[Letter]) -> Vec<Handle> {
        word.iter()
            .map(|l| match l {
                Letter::H => Handle::linear(&self.h0),
                Letter::V => Handle::NonlinearV,
            })
            .collect()
    }
}

/// Runs the identity table. Rows outside `cfg.only` are skipped.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<IdentityRow>> {
    if cfg.seeds.is_empty() {
        return Err(Error::InvalidParameter("the identity suite needs at least one seed".into()));
    }
    let s = build(cfg, cfg.seeds[0])?;
    let mut t = Table {
        cfg,
        grid_label: s.label.clone(),
        rows: Vec::new(),
    };
    let tol = cfg.tol;
    let g = cfg.g;
    let psi = &s.psi;

    t.check("composition-empty", "V(psi) psi from the empty word", 1e-14, || {
        Ok(relative_error(&vhat_apply(&[], psi, &s.v)?.value, &local(psi, g, 1), psi.data()))
    })?;
    t.check("scalar-commute", "V(c psi) = c V psi for complex c", tol, || {
        let c = C64::new(0.7, -0.4);
        let fd = vhat_apply(&[Handle::Scalar(c)], psi, &s.v)?.value;
        Ok(relative_error(&fd, &scaled(&local(psi, g, 1), c), psi.data()))
    })?;
    t.check("linearity-operators", "V((K1+K2) psi) = V(K1 psi) + V(K2 psi)", tol, || {
        let sum = Arc::new(s.kinetic.sum(&s.ext));
        let lhs = vhat_apply(&[Handle::linear(&sum)], psi, &s.v)?.value;
        let a = vhat_apply(&[Handle::linear(&s.kinetic)], psi, &s.v)?.value;
        let b = vhat_apply(&[Handle::linear(&s.ext)], psi, &s.v)?.value;
        Ok(relative_error(&lhs, &add(&a, &b), psi.data()))
    })?;
    t.check("linearity-affine", "V((H0+c) psi) = V(H0 psi) + c V psi", tol, || {
        let c = C64::new(0.3, 0.2);
        let lhs = vhat_apply(&[Handle::Affine(Arc::clone(&s.h0), c)], psi, &s.v)?.value;
        let a = vhat_apply(&[Handle::linear(&s.h0)], psi, &s.v)?.value;
        Ok(relative_error(&lhs, &add(&a, &scaled(&local(psi, g, 1), c)), psi.data()))
    })?;
    t.check("conjugation-linear", "V exp(-i lambda V_ext) psi, truncated series", tol, || {
        conjugation_error(Handle::linear(&s.ext), 0.02, &s)
    })?;
    t.check("conjugation-scalar", "V exp(-i lambda c) psi, truncated series", tol, || {
        conjugation_error(Handle::Scalar(C64::new(1.3, 0.0)), 0.02, &s)
    })?;
    for n in 1..=3usize {
        let name = format!("power-{n}");
        t.check(&name, "V^n psi = (g|psi|^2)^n psi", tol, || {
            let word = vec![Handle::NonlinearV; n - 1];
            let fd = vhat_apply(&word, psi, &s.v)?.value;
            Ok(relative_error(&fd, &local(psi, g, n as i32), psi.data()))
        })?;
    }
    t.check("power-coupled", "coupled cubic V^2 psi = U^2 psi per component", tol, || {
        let v = NonlinearPotential::coupled(&[vec![1.0, 0.6], vec![0.6, 0.8]])?;
        let two = smooth_random_state(psi.grid(), 2, cfg.seeds[0]);
        let u = v.eval_nonlinear(&two)?;
        let want: Vec<C64> = two.data().iter().zip(&u).map(|(z, w)| z * w * w).collect();
        let fd = vhat_apply(&[Handle::NonlinearV], &two, &v)?.value;
        Ok(relative_error(&fd, &want, two.data()))
    })?;
    for id in AppendixId::ALL {
        t.check(id.name(), &id.display_word(), tol, || {
            let fd = vhat_apply(&s.handles(id.word()), psi, &s.v)?;
            let closed = appendix_product(id, psi.data(), &s.h0, g);
            Ok(relative_error(&closed, &fd.value, psi.data()))
        })?;
    }

    for (n, name) in [(2, "appeq2"), (3, "appeq3"), (4, "appeq4")] {
        t.check(name, "closed-form time derivative against the series recurrence", 1e-10, || {
            let closed = taylor_derivative(n, psi, &s.h0, g)?;
            let rec = taylor_derivative_by(Route::Recurrence, n, psi, &s.h0, g)?;
            Ok(relative_error(&closed, &rec, psi.data()))
        })?;
    }
    if t.wanted("appeq4-uncorrected") {
        let closed = taylor_derivative(4, psi, &s.h0, g)?;
        let uncorrected = fourth_derivative_uncorrected(psi.data(), &s.h0, g);
        let err = relative_error(&uncorrected, &closed, psi.data());
        t.push(
            "appeq4-uncorrected",
            "fourth derivative with its two typographical slips kept",
            1e-10,
            err,
            true,
            "corrected form is used everywhere else".into(),
        );
    }
    t.check("taylor-fd-words", "fourth derivative from finite-difference words", tol, || {
        let closed = taylor_derivative(4, psi, &s.h0, g)?;
        let fd = taylor_derivative_by(Route::FiniteDifference, 4, psi, &s.h0, g)?;
        Ok(relative_error(&fd, &closed, psi.data()))
    })?;

    t.check("linear-taylor", "g=0 derivatives equal (-i H0)^n psi", 1e-10, || {
        let mut worst = 0.0f64;
        let mut want = psi.data().to_vec();
        for n in 1..=4 {
            want = scaled(&s.h0.apply(&want), C64::new(0.0, -1.0));
            let d = taylor_derivative(n, psi, &s.h0, 0.0)?;
            worst = worst.max(relative_error(&d, &want, psi.data()));
        }
        Ok(worst)
    })?;
    t.check("linear-commutator", "g=0 double commutator equals the matrix one", 1e-10, || {
        let r = fd_double_commutator(psi, &s.h0_lin, 0.0)?;
        let (a, b) = (s.kinetic.matrix(), s.ext.matrix());
        let c = b * b * a - (b * a * b) * C64::new(2.0, 0.0) + a * b * b;
        let want = DenseOperator::from_matrix(c).apply(psi.data());
        let peak = r.fd_field.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut diff = 0.0f64;
        for i in 0..want.len() {
            if r.mask[i] {
                diff = diff.max(((want[i] / psi.data()[i]).re - r.fd_field[i]).abs());
            }
        }
        Ok(if peak > 0.0 { diff / peak } else { diff })
    })?;

    if t.wanted("commutator") {
        let lifted = nodeless_state(psi.grid(), cfg.seeds[0]);
        let r = fd_double_commutator(&lifted, &s.h0_lin, g)?;
        let best = r.paper_error.min(r.canonical_error);
        t.push(
            "commutator",
            "finite-difference [B,[B,A]] against the literal and doubled fields",
            super::commutator::MATCH_TOL,
            best,
            true,
            r.summary(),
        );
    }

    for &seed in &cfg.seeds {
        let name = format!("taylor-slope-{seed}");
        if !t.wanted(&name) {
            continue;
        }
        let st = build(cfg, seed)?;
        let curve = taylor_residual_curve(&st.psi, &st.h0_lin, g, &TAYLOR_TIMES)?;
        let (ts, rs): (Vec<f64>, Vec<f64>) = curve.into_iter().unzip();
        let slope = loglog_slope(&ts, &rs)?;
        t.grid_label = st.label.clone();
        t.push(
            &name,
            "log-log slope of the fourth-order Taylor residual",
            0.3,
            (slope - 5.0).abs(),
            false,
            format!("slope {slope:.3}"),
        );
    }
    Ok(t.rows)
}

pub fn all_passed(rows: &[IdentityRow]) -> bool {
    rows.iter().all(|r| r.informational || r.pass)
}

pub fn format_table(rows: &[IdentityRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<22} {:<6} {:<24} {:>10} {:>12}  note", "identity", "status", "grid", "tol", "error");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<22} {:<6} {:<24} {:>10.1e} {:>12.3e}  {}",
            r.name,
            r.status(),
            r.grid,
            r.tol,
            r.error,
            if r.note.is_empty() { &r.description } else { &r.note }
        );
    }
    out
}

pub fn to_csv(rows: &[IdentityRow]) -> String {
    let mut out = String::from("identity,status,grid,tol,error,description,note\n");
    let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{:.17e},{},{}",
            r.name,
            r.status(),
            quote(&r.grid),
            r.tol,
            r.error,
            quote(&r.description),
            quote(&r.note)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_filter_selects_rows() {
        let cfg = SuiteConfig {
            only: Some(vec!["power".into(), "appeq5".into()]),
            ..SuiteConfig::default()
        };
        let rows = run_suite(&cfg).unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["power-1", "power-2", "power-3", "power-coupled", "appeq5"]);
        assert!(all_passed(&rows), "{}", format_table(&rows));
        assert!(to_csv(&rows).lines().count() == 6);
    }
}
