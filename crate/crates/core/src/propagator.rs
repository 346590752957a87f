//! Time stepping.
//!
//! The right-hand side is split as `A = κ(-∇²)`, applied as a phase in
//! spectral space, and `B = V_ext + V_nl(ψ)`, applied as a pointwise phase.
//! Each `B` factor is evaluated on the state produced by all previous
//! factors of the same step (most-recent-update rule). Because a pointwise
//! phase leaves every density unchanged, `e^{-iθB}` is exact even though
//! `B` depends on `ψ`.

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::hamiltonian::{energy, LinearHamiltonian, MixingTerm, NonlinearPotential};
use crate::num::{cis_m1, rotate, Complex, Real};
use crate::schemes::{self, triple_jump_weights, GradientScheme, SplittingScheme};

/// Which commutator field the gradient scheme uses for `B̃`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CommutatorVariant {
    /// The field
    /// `W = g²|∇ρ|² + 2g²ρ∇²ρ + 2gρ∇²V - |∇V|²` (`ρ = |ψ|²`) with
    /// `B̃ = B - (τ²/48) W`, taken literally.
    #[default]
    Paper,
    /// The double commutator `[B,[B,A]]` acting on `ψ`, which is the
    /// multiplicative field `2W`, with `B̃ = B + (τ²/48)·2W`. This is the
    /// sign and weight for which the third-order error cancels.
    Canonical,
}

impl CommutatorVariant {
    pub fn name(self) -> &'static str {
        match self {
            CommutatorVariant::Paper => "paper",
            CommutatorVariant::Canonical => "canonical",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(CommutatorVariant::Paper),
            "canonical" => Ok(CommutatorVariant::Canonical),
            other => Err(Error::InvalidParameter(format!(
                "unknown commutator variant '{other}'; valid: paper, canonical"
            ))),
        }
    }
}

/// A complete step rule.
#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Split(SplittingScheme),
    Gradient(GradientScheme, CommutatorVariant),
    /// Palindromic four-wave-mixing step (order 2), lifted to `order` 4 or 6
    /// by triple-jump composition.
    FourWave { order: usize },
}

impl Method {
    /// Resolves a scheme name for a given potential family. Four-wave mixing
    /// always uses its own palindromic step; `strang` selects order 2 and
    /// `forest-ruth`/`order6` select the composed versions.
    pub fn by_name(name: &str, potential: &NonlinearPotential<impl Real>, variant: CommutatorVariant) -> Result<Self> {
        if name == "chin" {
            return Ok(Method::Gradient(schemes::chin_gradient(), variant));
        }
        let split = schemes::splitting_by_name(name)?;
        if potential.has_mixing() {
            return match split.order {
                2 | 4 | 6 => Ok(Method::FourWave { order: split.order }),
                o => Err(Error::Unsupported(format!("four-wave mixing step of order {o}"))),
            };
        }
        Ok(Method::Split(split))
    }

    pub fn order(&self) -> usize {
        match self {
            Method::Split(s) => s.order,
            Method::Gradient(g, _) => g.order(),
            Method::FourWave { order } => *order,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Method::Split(s) => s.name.clone(),
            Method::Gradient(_, v) => format!("chin[{}]", v.name()),
            Method::FourWave { order } => format!("four-wave[{order}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub method: Method,
    /// Record observables every this many steps. The initial and final
    /// states are always recorded.
    pub observe_every: usize,
    pub record_energy: bool,
}

impl PropagationConfig {
    pub fn new(dt: f64, n_steps: usize, method: Method) -> Self {
        Self {
            dt,
            n_steps,
            method,
            observe_every: n_steps.max(1),
            record_energy: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.observe_every == 0 {
            return Err(Error::InvalidParameter("observe_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRecord {
    pub step: usize,
    pub time: f64,
    pub norm_total: f64,
    pub norm_per_component: Vec<f64>,
    pub energy: Option<f64>,
}

const PHASE_CACHE_LIMIT: usize = 32;

/// Owns the Hamiltonian, the potential and the scratch space for stepping.
#[derive(Clone)]
pub struct Propagator<T: Real> {
    h0: LinearHamiltonian<T>,
    potential: NonlinearPotential<T>,
    phases: Vec<(u64, Vec<Complex<T>>)>,
    field: Vec<T>,
    coupling: Vec<Complex<T>>,
}

impl<T: Real> Propagator<T> {
    pub fn new(h0: LinearHamiltonian<T>, potential: NonlinearPotential<T>) -> Result<Self> {
        potential.check_components(h0.components())?;
        let n = h0.grid().len();
        let c = h0.components();
        Ok(Self {
            h0,
            potential,
            phases: Vec::new(),
            field: vec![T::zero(); c * n],
            coupling: vec![Complex::new(T::zero(), T::zero()); n],
        })
    }

    pub fn hamiltonian(&self) -> &LinearHamiltonian<T> {
        &self.h0
    }

    pub fn potential(&self) -> &NonlinearPotential<T> {
        &self.potential
    }

    /// Checks that `method` can drive this Hamiltonian and potential.
    pub fn check_method(&self, method: &Method) -> Result<()> {
        match method {
            Method::Split(s) => {
                if self.potential.has_mixing() {
                    return Err(Error::Unsupported(
                        "four-wave mixing needs its own step; splitting schemes handle diagonal potentials only".into(),
                    ));
                }
                if !s.is_consistent(1e-12) {
                    return Err(Error::Scheme(format!("scheme '{}' is inconsistent", s.name)));
                }
            }
            Method::Gradient(..) => {
                if !matches!(self.potential, NonlinearPotential::Cubic { .. }) {
                    return Err(Error::Unsupported(format!(
                        "the gradient scheme needs a cubic potential, got {}",
                        self.potential.name()
                    )));
                }
                if self.h0.kappa() != T::one() {
                    return Err(Error::Unsupported(format!(
                        "the gradient scheme assumes kinetic coefficient 1, got {}",
                        self.h0.kappa()
                    )));
                }
            }
            Method::FourWave { order } => {
                if !self.potential.has_mixing() {
                    return Err(Error::Unsupported("four-wave step needs a four-wave mixing potential".into()));
                }
                if ![2, 4, 6].contains(order) {
                    return Err(Error::Unsupported(format!("four-wave step of order {order}")));
                }
            }
        }
        Ok(())
    }

    fn check_state(&self, psi: &WaveFunction<T>) -> Result<()> {
        self.h0.check_components(psi)
    }

    fn kinetic_phase(&mut self, theta: T) -> usize {
        let key = theta.as_f64().to_bits();
        if let Some(i) = self.phases.iter().position(|(k, _)| *k == key) {
            return i;
        }
        if self.phases.len() >= PHASE_CACHE_LIMIT {
            self.phases.clear();
        }
        let kappa = self.h0.kappa();
        let table = self
            .h0
            .grid()
            .k_squared()
            .iter()
            .map(|&k2| cis_m1(-theta * kappa * k2))
            .collect();
        self.phases.push((key, table));
        self.phases.len() - 1
    }

    /// `ψ ← e^{-iθκ(-∇²)} ψ` on every component.
    pub fn apply_kinetic_phase(&mut self, psi: &mut WaveFunction<T>, theta: T) {
        if theta == T::zero() {
            return;
        }
        let idx = self.kinetic_phase(theta);
        let grid = psi.grid().clone();
        let n = grid.len();
        let phase = &self.phases[idx].1;
        for chunk in psi.data_mut().chunks_mut(n) {
            grid.spectral_rotate(chunk, phase);
        }
    }

    /// `ψ ← e^{-iθ(V_ext + V_nl(ψ))} ψ` pointwise. For four-wave mixing only
    /// the diagonal `U_j` part is used.
    pub fn apply_potential_phase(&mut self, psi: &mut WaveFunction<T>, theta: T) {
        if theta == T::zero() {
            return;
        }
        let n = psi.grid().len();
        self.potential.eval_into(psi.data(), n, &mut self.field);
        for c in 0..psi.components() {
            let ext = self.h0.external(c).values();
            let field = &self.field[c * n..(c + 1) * n];
            for ((z, &u), &v) in psi.component_mut(c).iter_mut().zip(field).zip(ext) {
                *z = rotate(*z, cis_m1(-theta * (u + v)));
            }
        }
    }

    /// `ψ ← e^{-iθ V_j} ψ` for one mixing term: an exact rotation of the
    /// pair `(a, b)` by angle `θ|c|`, identity where `c = 0`.
    pub fn apply_mixing_rotation(&mut self, psi: &mut WaveFunction<T>, theta: T, term: MixingTerm) {
        let n = psi.grid().len();
        self.potential.coupling_into(term, psi.data(), n, &mut self.coupling);
        let (a, b) = term.pair();
        let data = psi.data_mut();
        let (lo, hi) = data.split_at_mut(b * n);
        let pa = &mut lo[a * n..(a + 1) * n];
        let pb = &mut hi[..n];
        let mi = Complex::new(T::zero(), -T::one());
        for ((x, y), &c) in pa.iter_mut().zip(pb.iter_mut()).zip(&self.coupling) {
            let mag = c.norm();
            if mag == T::zero() {
                continue;
            }
            let (s, co) = (theta * mag).sin_cos();
            let u = c / mag;
            let (xa, yb) = (*x, *y);
            *x = xa * co + mi * u * yb * s;
            *y = mi * u.conj() * xa * s + yb * co;
        }
    }

    /// One step of a splitting scheme, stages in application order.
    pub fn split_step(&mut self, psi: &mut WaveFunction<T>, scheme: &SplittingScheme, dt: T) {
        for stage in &scheme.stages {
            self.apply_kinetic_phase(psi, T::of(stage.a) * dt);
            self.apply_potential_phase(psi, T::of(stage.b) * dt);
        }
    }

    /// Commutator field for the gradient scheme on a cubic potential with
    /// coupling `g`; see [`CommutatorVariant`].
    pub fn commutator_field(&self, psi: &WaveFunction<T>, variant: CommutatorVariant) -> Result<Vec<T>> {
        let NonlinearPotential::Cubic { g } = self.potential else {
            return Err(Error::Unsupported("commutator field is defined for the cubic potential".into()));
        };
        self.check_state(psi)?;
        let w = literal_commutator(psi, &self.h0, g);
        Ok(match variant {
            CommutatorVariant::Paper => w,
            CommutatorVariant::Canonical => w.into_iter().map(|x| x * T::of(2.0)).collect(),
        })
    }

    /// One step of the gradient product.
    pub fn gradient_step(&mut self, psi: &mut WaveFunction<T>, scheme: &GradientScheme, variant: CommutatorVariant, dt: T) {
        let NonlinearPotential::Cubic { g } = self.potential else {
            panic!("gradient step on a non-cubic potential");
        };
        self.apply_potential_phase(psi, T::of(scheme.outer_b) * dt);
        self.apply_kinetic_phase(psi, T::of(scheme.inner_a) * dt);

        // B̃ = V_ext + g|ψ|² + s·w·τ²·W
        let w = literal_commutator(psi, &self.h0, g);
        let weight = T::of(scheme.commutator_weight) * dt * dt;
        let correction = match variant {
            CommutatorVariant::Paper => -weight,
            CommutatorVariant::Canonical => weight * T::of(2.0),
        };
        let theta = T::of(scheme.mid_b) * dt;
        let ext = self.h0.external(0).values();
        for ((z, &v), &wp) in psi.data_mut().iter_mut().zip(ext).zip(&w) {
            let b = v + g * z.norm_sqr() + correction * wp;
            *z = rotate(*z, cis_m1(-theta * b));
        }

        self.apply_kinetic_phase(psi, T::of(scheme.inner_a) * dt);
        self.apply_potential_phase(psi, T::of(scheme.outer_b) * dt);
    }

    /// Second-order palindromic four-wave-mixing step:
    /// `H₀/2, V₀/2, V₁/2, V₂/2, V₃/2, V₄, V₃/2, V₂/2, V₁/2, V₀/2, H₀/2`.
    pub fn fwm_step(&mut self, psi: &mut WaveFunction<T>, dt: T) {
        let half = dt * T::of(0.5);
        self.apply_kinetic_phase(psi, half);
        self.apply_potential_phase(psi, half);
        for term in [MixingTerm::V1, MixingTerm::V2, MixingTerm::V3] {
            self.apply_mixing_rotation(psi, half, term);
        }
        self.apply_mixing_rotation(psi, dt, MixingTerm::V4);
        for term in [MixingTerm::V3, MixingTerm::V2, MixingTerm::V1] {
            self.apply_mixing_rotation(psi, half, term);
        }
        self.apply_potential_phase(psi, half);
        self.apply_kinetic_phase(psi, half);
    }

    fn fwm_composed(&mut self, psi: &mut WaveFunction<T>, order: usize, dt: T) {
        if order <= 2 {
            self.fwm_step(psi, dt);
            return;
        }
        let (z1, z0) = triple_jump_weights(order - 2);
        self.fwm_composed(psi, order - 2, T::of(z1) * dt);
        self.fwm_composed(psi, order - 2, T::of(z0) * dt);
        self.fwm_composed(psi, order - 2, T::of(z1) * dt);
    }

    /// One step of `method`. Negative `dt` steps backwards.
    pub fn step(&mut self, psi: &mut WaveFunction<T>, method: &Method, dt: T) -> Result<()> {
        self.check_method(method)?;
        self.check_state(psi)?;
        self.step_unchecked(psi, method, dt);
        Ok(())
    }

    fn step_unchecked(&mut self, psi: &mut WaveFunction<T>, method: &Method, dt: T) {
        match method {
            Method::Split(s) => self.split_step(psi, s, dt),
            Method::Gradient(g, v) => self.gradient_step(psi, g, *v, dt),
            Method::FourWave { order } => self.fwm_composed(psi, *order, dt),
        }
    }

    pub fn observe(&self, psi: &WaveFunction<T>, step: usize, time: f64, with_energy: bool) -> ObservableRecord {
        let per: Vec<f64> = psi.component_norms().iter().map(|x| x.as_f64()).collect();
        let total = per.iter().map(|x| x * x).sum::<f64>().sqrt();
        let energy = if with_energy {
            energy(psi, &self.h0, &self.potential).ok().map(|e| e.as_f64())
        } else {
            None
        };
        ObservableRecord {
            step,
            time,
            norm_total: total,
            norm_per_component: per,
            energy,
        }
    }

    /// Runs `config.n_steps` steps. `observer` sees every recorded state;
    /// returning an error from it aborts the run.
    pub fn propagate<F>(
        &mut self,
        mut psi: WaveFunction<T>,
        config: &PropagationConfig,
        mut observer: F,
    ) -> Result<(WaveFunction<T>, Vec<ObservableRecord>)>
    where
        F: FnMut(&WaveFunction<T>, &ObservableRecord) -> Result<()>,
    {
        config.validate()?;
        self.check_method(&config.method)?;
        self.check_state(&psi)?;
        let dt = T::of(config.dt);
        let mut records = Vec::new();

        let first = self.observe(&psi, 0, 0.0, config.record_energy);
        observer(&psi, &first)?;
        records.push(first);

        let mut last_max = psi.max_amplitude().as_f64();
        for step in 1..=config.n_steps {
            self.step_unchecked(&mut psi, &config.method, dt);
            let mut max = T::zero();
            let mut finite = true;
            for z in psi.data() {
                let a = z.norm();
                if !a.is_finite() {
                    finite = false;
                    break;
                }
                max = max.max(a);
            }
            if !finite {
                return Err(Error::NonFinite {
                    step,
                    max_amplitude: last_max,
                });
            }
            last_max = max.as_f64();
            if step % config.observe_every == 0 || step == config.n_steps {
                let rec = self.observe(&psi, step, step as f64 * config.dt, config.record_energy);
                observer(&psi, &rec)?;
                records.push(rec);
            }
        }
        Ok((psi, records))
    }

    /// Convenience wrapper: `n_steps` steps, no observation.
    pub fn evolve(&mut self, psi: &WaveFunction<T>, method: &Method, dt: f64, n_steps: usize) -> Result<WaveFunction<T>> {
        self.check_method(method)?;
        self.check_state(psi)?;
        let mut out = psi.clone();
        for _ in 0..n_steps {
            self.step_unchecked(&mut out, method, T::of(dt));
        }
        if !out.is_finite() {
            return Err(Error::NonFinite {
                step: n_steps,
                max_amplitude: f64::NAN,
            });
        }
        Ok(out)
    }
}

/// `g²|∇ρ|² + 2g²ρ∇²ρ + 2gρ∇²V - |∇V|²` with spectral derivatives of `ρ`.
fn literal_commutator<T: Real>(psi: &WaveFunction<T>, h0: &LinearHamiltonian<T>, g: T) -> Vec<T> {
    let grid = psi.grid();
    let ext = h0.external(0);
    let two = T::of(2.0);
    let mut w: Vec<T> = vec![T::zero(); grid.len()];
    for grad_v in ext.gradient() {
        for (o, &dv) in w.iter_mut().zip(grad_v) {
            *o = *o - dv * dv;
        }
    }
    if g == T::zero() {
        return w;
    }
    let rho = psi.density(0);
    let lap = grid.laplacian_real(&rho);
    let grad = grid.gradient_real(&rho);
    for p in 0..grid.len() {
        let grad2 = grad.iter().fold(T::zero(), |acc, d| acc + d[p] * d[p]);
        w[p] = w[p] + g * g * grad2 + two * g * g * rho[p] * lap[p] + two * g * rho[p] * ext.laplacian()[p];
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::hamiltonian::ExternalPotential;
    use crate::profiles::smooth_random_state;
    use crate::num::cis;
    use crate::schemes::{forest_ruth, strang};
    use std::f64::consts::PI;

    fn grid() -> Grid<f64> {
        Grid::<f64>::new(&[64], &[10.0]).unwrap()
    }

    fn cubic(g: f64, grid: &Grid<f64>, ext: ExternalPotential<f64>) -> Propagator<f64> {
        let h0 = LinearHamiltonian::uniform(grid, 1.0, ext, 1).unwrap();
        Propagator::new(h0, NonlinearPotential::cubic(g)).unwrap()
    }

    #[test]
    fn kinetic_phase_on_plane_wave() {
        let g = grid();
        let k0 = 2.0 * PI * 3.0 / 10.0;
        let mut p = cubic(0.0, &g, ExternalPotential::zero(&g));
        let psi0 = WaveFunction::from_fn(&g, 1, |_, r| Complex::from_polar(1.0, k0 * r[0]));
        let mut psi = psi0.clone();
        p.apply_kinetic_phase(&mut psi, 0.0);
        assert_eq!(psi, psi0);
        p.apply_kinetic_phase(&mut psi, 0.7);
        let phase = cis(-k0 * k0 * 0.7);
        for (a, b) in psi.data().iter().zip(psi0.data()) {
            assert!((*a - *b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn phases_preserve_norm_and_density() {
        let g = grid();
        let mut p = cubic(1.3, &g, ExternalPotential::harmonic(&g, 1.0));
        let psi0 = smooth_random_state(&g, 1, 3);
        let mut psi = psi0.clone();
        p.apply_kinetic_phase(&mut psi, 0.37);
        assert!((psi.norm() - psi0.norm()).abs() < 1e-13);
        let before = psi.clone();
        p.apply_potential_phase(&mut psi, 2.1);
        for (a, b) in psi.data().iter().zip(before.data()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn potential_phase_on_constant_state() {
        let g = grid();
        let mut p = cubic(2.0, &g, ExternalPotential::constant(&g, 0.5));
        let c = Complex::new(0.3, 0.4);
        let mut psi = WaveFunction::from_fn(&g, 1, |_, _| c);
        p.apply_potential_phase(&mut psi, 1.1);
        let want = c * cis(-1.1 * (0.5 + 2.0 * 0.25));
        assert!(psi.data().iter().all(|z| (*z - want).norm() < 1e-15));
    }

    #[test]
    fn strang_matches_hand_unrolled_step() {
        let g = grid();
        let mut p = cubic(1.0, &g, ExternalPotential::harmonic(&g, 1.0));
        let psi0 = smooth_random_state(&g, 1, 5);
        let tau = 0.05;

        let mut a = psi0.clone();
        p.step(&mut a, &Method::Split(strang()), tau).unwrap();

        // Φ₁ = e^{-iτH_kin/2}Ψ, phase with V(Φ₁), then the second half kick.
        let mut phi = psi0;
        p.apply_kinetic_phase(&mut phi, tau / 2.0);
        let ext = p.hamiltonian().external(0).values().to_vec();
        let rho: Vec<f64> = phi.density(0);
        for ((z, v), r) in phi.data_mut().iter_mut().zip(&ext).zip(&rho) {
            *z = *z * cis(-tau * (v + r));
        }
        p.apply_kinetic_phase(&mut phi, tau / 2.0);
        assert!(a.max_difference(&phi) < 1e-15);
    }

    #[test]
    fn free_strang_step_is_exact() {
        let g = grid();
        let mut p = cubic(0.0, &g, ExternalPotential::zero(&g));
        let psi0 = smooth_random_state(&g, 1, 9);
        let mut a = psi0.clone();
        p.step(&mut a, &Method::Split(strang()), 0.3).unwrap();
        let mut b = psi0;
        p.apply_kinetic_phase(&mut b, 0.3);
        assert!(a.max_difference(&b) < 1e-14);
    }

    #[test]
    fn time_reversal() {
        let g = grid();
        let mut p = cubic(1.0, &g, ExternalPotential::harmonic(&g, 1.0));
        let psi0 = smooth_random_state(&g, 1, 21);
        for method in [Method::Split(strang()), Method::Split(forest_ruth())] {
            let mut psi = psi0.clone();
            p.step(&mut psi, &method, 0.01).unwrap();
            p.step(&mut psi, &method, -0.01).unwrap();
            assert!(psi.max_difference(&psi0) < 1e-13, "{}", method.name());
        }
    }

    #[test]
    fn literal_field_limits() {
        let g = Grid::<f64>::new(&[64], &[10.0]).unwrap();
        let p = cubic(0.0, &g, ExternalPotential::harmonic(&g, 2f64.sqrt()));
        let psi = smooth_random_state(&g, 1, 1);
        let w = p.commutator_field(&psi, CommutatorVariant::Paper).unwrap();
        for (i, wv) in w.iter().enumerate() {
            let x = g.position(i)[0];
            assert!((wv + 4.0 * x * x).abs() < 1e-12);
        }
        let p = cubic(1.5, &g, ExternalPotential::zero(&g));
        let flat = WaveFunction::from_fn(&g, 1, |_, _| Complex::new(0.7, 0.1));
        let w = p.commutator_field(&flat, CommutatorVariant::Canonical).unwrap();
        assert!(w.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn gradient_step_free_case_is_kinetic_only() {
        let g = grid();
        let mut p = cubic(0.0, &g, ExternalPotential::zero(&g));
        let psi0 = smooth_random_state(&g, 1, 4);
        let mut a = psi0.clone();
        p.step(&mut a, &Method::Gradient(schemes::chin_gradient(), CommutatorVariant::Paper), 0.2)
            .unwrap();
        let mut b = psi0;
        p.apply_kinetic_phase(&mut b, 0.2);
        assert!(a.max_difference(&b) < 1e-14);
    }

    #[test]
    fn method_checks() {
        let g = grid();
        let h0 = LinearHamiltonian::uniform(&g, 0.5, ExternalPotential::zero(&g), 1).unwrap();
        let mut p = Propagator::new(h0, NonlinearPotential::cubic(1.0)).unwrap();
        let chin = Method::Gradient(schemes::chin_gradient(), CommutatorVariant::Paper);
        assert!(p.check_method(&chin).is_err());
        assert!(p.check_method(&Method::FourWave { order: 2 }).is_err());
        let mut psi = WaveFunction::zeros(&g, 2);
        assert!(p.step(&mut psi, &Method::Split(strang()), 0.1).is_err());
    }

    #[test]
    fn nan_is_reported_with_step() {
        let g = grid();
        let h0 = LinearHamiltonian::free(&g);
        let bad = NonlinearPotential::CustomLocal(crate::hamiltonian::CustomLocal::new(
            "blowup",
            1,
            |z: &[Complex<f64>], out: &mut [f64]| out[0] = if z[0].norm() > 0.0 { f64::NAN } else { 0.0 },
        ));
        let mut p = Propagator::new(h0, bad).unwrap();
        let psi = smooth_random_state(&g, 1, 2);
        let cfg = PropagationConfig::new(0.1, 5, Method::Split(strang()));
        match p.propagate(psi, &cfg, |_, _| Ok(())) {
            Err(Error::NonFinite { step, max_amplitude }) => {
                assert_eq!(step, 1);
                assert!(max_amplitude > 0.0);
            }
            other => panic!("expected failure, got {:?}", other.map(|r| r.1)),
        }
    }

    #[test]
    fn observation_cadence() {
        let g = grid();
        let mut p = cubic(1.0, &g, ExternalPotential::zero(&g));
        let psi = smooth_random_state(&g, 1, 2);
        let mut cfg = PropagationConfig::new(0.01, 10, Method::Split(strang()));
        cfg.observe_every = 4;
        cfg.record_energy = true;
        let mut seen = 0;
        let (_, recs) = p
            .propagate(psi.clone(), &cfg, |_, _| {
                seen += 1;
                Ok(())
            })
            .unwrap();
        let steps: Vec<usize> = recs.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 4, 8, 10]);
        assert_eq!(seen, 4);
        assert!(recs.iter().all(|r| r.energy.is_some()));
        let r = &recs[3];
        assert!((r.norm_total.powi(2) - r.norm_per_component.iter().map(|x| x * x).sum::<f64>()).abs() < 1e-15);

        let cfg0 = PropagationConfig::new(0.01, 0, Method::Split(strang()));
        let (out, recs) = p.propagate(psi.clone(), &cfg0, |_, _| Ok(())).unwrap();
        assert_eq!(out, psi);
        assert_eq!(recs.len(), 1);
    }
}
