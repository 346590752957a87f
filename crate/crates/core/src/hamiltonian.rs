//! Linear Hamiltonian `H₀ = κ(-∇²) + V_ext`, local nonlinear potentials and
//! the energy functional.
//!
//! Potential fields are stored in the same component-major layout as
//! [`WaveFunction::data`]: entry `c·N + p` belongs to component `c` at point `p`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::num::{cis, Complex, Real};

#[derive(Clone, Debug, PartialEq)]
pub enum ExternalKind {
    Zero,
    Constant(f64),
    /// `½ω²|r|²`.
    Harmonic { omega: f64 },
    /// Sampled values; derivatives are spectral.
    Table,
}

/// A real external potential together with its gradient and Laplacian.
///
/// Analytic forms carry exact derivatives. A harmonic trap is not periodic,
/// so spectral derivatives of it would ring at the box edge.
#[derive(Clone, Debug)]
pub struct ExternalPotential<T: Real> {
    kind: ExternalKind,
    values: Vec<T>,
    gradient: Vec<Vec<T>>,
    laplacian: Vec<T>,
}

impl<T: Real> ExternalPotential<T> {
    pub fn zero(grid: &Grid<T>) -> Self {
        Self::constant(grid, 0.0).with_kind(ExternalKind::Zero)
    }

    pub fn constant(grid: &Grid<T>, value: f64) -> Self {
        let n = grid.len();
        Self {
            kind: ExternalKind::Constant(value),
            values: vec![T::of(value); n],
            gradient: vec![vec![T::zero(); n]; grid.dims()],
            laplacian: vec![T::zero(); n],
        }
    }

    pub fn harmonic(grid: &Grid<T>, omega: f64) -> Self {
        let w2 = T::of(omega * omega);
        let half = T::of(0.5);
        let n = grid.len();
        let dims = grid.dims();
        let mut values = vec![T::zero(); n];
        let mut gradient = vec![vec![T::zero(); n]; dims];
        for (p, v) in values.iter_mut().enumerate() {
            let r = grid.position(p);
            let mut r2 = T::zero();
            for a in 0..dims {
                r2 = r2 + r[a] * r[a];
                gradient[a][p] = w2 * r[a];
            }
            *v = half * w2 * r2;
        }
        Self {
            kind: ExternalKind::Harmonic { omega },
            values,
            gradient,
            laplacian: vec![w2 * T::of(dims as f64); n],
        }
    }

    /// Tabulated potential; gradient and Laplacian are taken spectrally.
    pub fn from_values(grid: &Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "external potential is not finite at point {p}"
            )));
        }
        Ok(Self {
            kind: ExternalKind::Table,
            gradient: grid.gradient_real(&values),
            laplacian: grid.laplacian_real(&values),
            values,
        })
    }

    fn with_kind(mut self, kind: ExternalKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn kind(&self) -> &ExternalKind {
        &self.kind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn gradient(&self) -> &[Vec<T>] {
        &self.gradient
    }

    pub fn laplacian(&self) -> &[T] {
        &self.laplacian
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }
}

/// `H₀ = κ(-∇²) + V_ext`, block diagonal over components.
#[derive(Clone, Debug)]
pub struct LinearHamiltonian<T: Real> {
    grid: Grid<T>,
    kappa: T,
    external: Vec<ExternalPotential<T>>,
}

impl<T: Real> LinearHamiltonian<T> {
    /// One external potential per component.
    pub fn new(grid: &Grid<T>, kappa: f64, external: Vec<ExternalPotential<T>>) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kinetic coefficient must be positive, got {kappa}"
            )));
        }
        if external.is_empty() {
            return Err(Error::InvalidParameter("need an external potential per component".into()));
        }
        if let Some(v) = external.iter().find(|v| v.values.len() != grid.len()) {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: v.values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            kappa: T::of(kappa),
            external,
        })
    }

    /// The same external potential on every component.
    pub fn uniform(grid: &Grid<T>, kappa: f64, external: ExternalPotential<T>, components: usize) -> Result<Self> {
        Self::new(grid, kappa, vec![external; components.max(1)])
    }

    /// Free particle, one component, `κ = 1`.
    pub fn free(grid: &Grid<T>) -> Self {
        Self::uniform(grid, 1.0, ExternalPotential::zero(grid), 1).expect("valid defaults")
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn components(&self) -> usize {
        self.external.len()
    }

    pub fn external(&self, c: usize) -> &ExternalPotential<T> {
        &self.external[c]
    }

    pub fn check_components(&self, psi: &WaveFunction<T>) -> Result<()> {
        if psi.components() != self.components() {
            return Err(Error::ComponentMismatch {
                expected: self.components(),
                found: psi.components(),
            });
        }
        if psi.grid().points() != self.grid.points() {
            return Err(Error::InvalidGrid("state and Hamiltonian live on different grids".into()));
        }
        Ok(())
    }

    /// `H₀ψ`.
    pub fn apply(&self, psi: &WaveFunction<T>) -> Result<WaveFunction<T>> {
        self.check_components(psi)?;
        let mut out = psi.spectral_laplacian();
        for c in 0..self.components() {
            let v = self.external[c].values();
            for ((o, z), &vp) in out.component_mut(c).iter_mut().zip(psi.component(c)).zip(v) {
                *o = *z * vp - *o * self.kappa;
            }
        }
        Ok(out)
    }
}

/// Pairwise mixing terms of the four-wave-mixing split, `V₁ … V₄`.
///
/// Term `V_j` couples two components `(a, b)` through the field
/// `c = g·conj(φ_s)·φ_t` built from the other two:
///
/// | term | pair (a, b) | c          |
/// |------|-------------|------------|
/// | V1   | (1, 3)      | g φ₂* φ₄   |
/// | V2   | (1, 4)      | g φ₂* φ₃   |
/// | V3   | (2, 3)      | g φ₁* φ₄   |
/// | V4   | (2, 4)      | g φ₁* φ₃   |
///
/// Components are numbered from 1 here; the methods return 0-based indices.
/// `V₁ + V₂` acting on `φ₁` gives `g φ₂*φ₄ φ₃ + g φ₂*φ₃ φ₄ = 2g φ₂*φ₃φ₄`,
/// the full mixing term of the four-component equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixingTerm {
    V1,
    V2,
    V3,
    V4,
}

impl MixingTerm {
    pub const ALL: [MixingTerm; 4] = [MixingTerm::V1, MixingTerm::V2, MixingTerm::V3, MixingTerm::V4];

    /// Rotated components `(a, b)`.
    pub fn pair(self) -> (usize, usize) {
        match self {
            MixingTerm::V1 => (0, 2),
            MixingTerm::V2 => (0, 3),
            MixingTerm::V3 => (1, 2),
            MixingTerm::V4 => (1, 3),
        }
    }

    /// `(s, t)` with `c = g·conj(φ_s)·φ_t`.
    pub fn sources(self) -> (usize, usize) {
        match self {
            MixingTerm::V1 => (1, 3),
            MixingTerm::V2 => (1, 2),
            MixingTerm::V3 => (0, 3),
            MixingTerm::V4 => (0, 2),
        }
    }

    pub fn index(self) -> usize {
        match self {
            MixingTerm::V1 => 1,
            MixingTerm::V2 => 2,
            MixingTerm::V3 => 3,
            MixingTerm::V4 => 4,
        }
    }
}

type LocalFn<T> = dyn Fn(&[Complex<T>], &mut [T]) + Send + Sync;

/// User-supplied local potential.
///
/// The closure receives the `C` complex amplitudes at one point and writes
/// one real potential value per component. Passing amplitudes rather than
/// densities lets a caller build phase-sensitive potentials, which
/// [`NonlinearPotential::check_phase_invariance`] then reports. Only
/// phase-invariant functions give a pointwise-phase exponential that is exact.
#[derive(Clone)]
pub struct CustomLocal<T: Real> {
    pub name: String,
    pub components: usize,
    f: Arc<LocalFn<T>>,
}

impl<T: Real> CustomLocal<T> {
    pub fn new(
        name: impl Into<String>,
        components: usize,
        f: impl Fn(&[Complex<T>], &mut [T]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            components,
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, local: &[Complex<T>], out: &mut [T]) {
        (self.f)(local, out)
    }
}

impl<T: Real> fmt::Debug for CustomLocal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLocal")
            .field("name", &self.name)
            .field("components", &self.components)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum NonlinearPotential<T: Real> {
    /// `g|ψ|²`, single component.
    Cubic { g: T },
    /// Component `j` sees `Σ_k g[j][k] |φ_k|²`.
    CoupledCubic { g: Vec<Vec<T>> },
    /// Four components. Diagonal part `U_j = Σ_k phase_mod[j][k] |φ_k|²`,
    /// mixing through [`MixingTerm`]s with strength `g`.
    FourWaveMixing { g: T, phase_mod: [[T; 4]; 4] },
    CustomLocal(CustomLocal<T>),
}

impl<T: Real> NonlinearPotential<T> {
    pub fn cubic(g: f64) -> Self {
        NonlinearPotential::Cubic { g: T::of(g) }
    }

    pub fn coupled(g: &[Vec<f64>]) -> Result<Self> {
        let c = g.len();
        if c == 0 || g.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter("coupling matrix must be square and non-empty".into()));
        }
        Ok(NonlinearPotential::CoupledCubic {
            g: g.iter().map(|row| row.iter().map(|&v| T::of(v)).collect()).collect(),
        })
    }

    pub fn four_wave(g: f64, phase_mod: [[f64; 4]; 4]) -> Self {
        NonlinearPotential::FourWaveMixing {
            g: T::of(g),
            phase_mod: phase_mod.map(|row| row.map(T::of)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            NonlinearPotential::Cubic { .. } => "cubic",
            NonlinearPotential::CoupledCubic { .. } => "coupled-cubic",
            NonlinearPotential::FourWaveMixing { .. } => "four-wave",
            NonlinearPotential::CustomLocal(c) => &c.name,
        }
    }

    /// Number of components the potential acts on.
    pub fn components(&self) -> usize {
        match self {
            NonlinearPotential::Cubic { .. } => 1,
            NonlinearPotential::CoupledCubic { g } => g.len(),
            NonlinearPotential::FourWaveMixing { .. } => 4,
            NonlinearPotential::CustomLocal(c) => c.components,
        }
    }

    pub fn check_components(&self, found: usize) -> Result<()> {
        if found != self.components() {
            return Err(Error::ComponentMismatch {
                expected: self.components(),
                found,
            });
        }
        Ok(())
    }

    pub fn has_mixing(&self) -> bool {
        matches!(self, NonlinearPotential::FourWaveMixing { .. })
    }

    /// True when the potential vanishes identically.
    pub fn is_trivial(&self) -> bool {
        match self {
            NonlinearPotential::Cubic { g } => *g == T::zero(),
            NonlinearPotential::CoupledCubic { g } => g.iter().flatten().all(|v| *v == T::zero()),
            NonlinearPotential::FourWaveMixing { g, phase_mod } => {
                *g == T::zero() && phase_mod.iter().flatten().all(|v| *v == T::zero())
            }
            NonlinearPotential::CustomLocal(_) => false,
        }
    }

    /// Diagonal potential evaluated on raw component-major data, written into
    /// `out` (same layout). For four-wave mixing this is the `U_j` part only.
    pub fn eval_into(&self, data: &[Complex<T>], points: usize, out: &mut [T]) {
        let comps = self.components();
        debug_assert_eq!(data.len(), comps * points);
        debug_assert_eq!(out.len(), comps * points);
        match self {
            NonlinearPotential::Cubic { g } => {
                for (o, z) in out.iter_mut().zip(data) {
                    *o = *g * z.norm_sqr();
                }
            }
            NonlinearPotential::CoupledCubic { g } => {
                density_mix(data, points, comps, |j, k| g[j][k], out);
            }
            NonlinearPotential::FourWaveMixing { phase_mod, .. } => {
                density_mix(data, points, 4, |j, k| phase_mod[j][k], out);
            }
            NonlinearPotential::CustomLocal(custom) => {
                let mut local = vec![Complex::new(T::zero(), T::zero()); comps];
                let mut value = vec![T::zero(); comps];
                for p in 0..points {
                    for c in 0..comps {
                        local[c] = data[c * points + p];
                    }
                    custom.eval(&local, &mut value);
                    for c in 0..comps {
                        out[c * points + p] = value[c];
                    }
                }
            }
        }
    }

    /// `V_nl(ψ)` as a real field per component (component-major).
    pub fn eval_nonlinear(&self, psi: &WaveFunction<T>) -> Result<Vec<T>> {
        self.check_components(psi.components())?;
        let mut out = vec![T::zero(); psi.data().len()];
        self.eval_into(psi.data(), psi.grid().len(), &mut out);
        Ok(out)
    }

    /// Coupling field `c` of a four-wave mixing term, on raw data.
    pub fn coupling_into(&self, term: MixingTerm, data: &[Complex<T>], points: usize, out: &mut [Complex<T>]) {
        let NonlinearPotential::FourWaveMixing { g, .. } = self else {
            panic!("coupling field requested from a non-mixing potential");
        };
        let (s, t) = term.sources();
        let ds = &data[s * points..(s + 1) * points];
        let dt = &data[t * points..(t + 1) * points];
        for ((o, a), b) in out.iter_mut().zip(ds).zip(dt) {
            *o = a.conj() * *b * *g;
        }
    }

    pub fn mixing_coupling(&self, term: MixingTerm, psi: &WaveFunction<T>) -> Result<Vec<Complex<T>>> {
        if !self.has_mixing() {
            return Err(Error::Unsupported(format!("{} has no mixing terms", self.name())));
        }
        self.check_components(psi.components())?;
        let n = psi.grid().len();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        self.coupling_into(term, psi.data(), n, &mut out);
        Ok(out)
    }

    /// `max |V(e^{iθ}ψ) - V(ψ)|` over every evaluated entry, including the
    /// mixing coupling fields.
    pub fn check_phase_invariance(&self, psi: &WaveFunction<T>, theta: f64) -> Result<T> {
        let mut rotated = psi.clone();
        rotated.scale(cis(T::of(theta)));
        let a = self.eval_nonlinear(psi)?;
        let b = self.eval_nonlinear(&rotated)?;
        let mut dev = a
            .iter()
            .zip(&b)
            .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).abs()));
        if self.has_mixing() {
            for term in MixingTerm::ALL {
                let ca = self.mixing_coupling(term, psi)?;
                let cb = self.mixing_coupling(term, &rotated)?;
                dev = ca.iter().zip(&cb).fold(dev, |acc, (x, y)| acc.max((*x - *y).norm()));
            }
        }
        Ok(dev)
    }
}

fn density_mix<T: Real>(
    data: &[Complex<T>],
    points: usize,
    comps: usize,
    coeff: impl Fn(usize, usize) -> T,
    out: &mut [T],
) {
    for v in out.iter_mut() {
        *v = T::zero();
    }
    for k in 0..comps {
        let rho_k = &data[k * points..(k + 1) * points];
        for j in 0..comps {
            let gjk = coeff(j, k);
            if gjk == T::zero() {
                continue;
            }
            for (o, z) in out[j * points..(j + 1) * points].iter_mut().zip(rho_k) {
                *o = *o + gjk * z.norm_sqr();
            }
        }
    }
}

fn require_symmetric<T: Real>(n: usize, coeff: impl Fn(usize, usize) -> T) -> Result<()> {
    for row in 0..n {
        for col in row + 1..n {
            if coeff(row, col) != coeff(col, row) {
                return Err(Error::AsymmetricCoupling { row, col });
            }
        }
    }
    Ok(())
}

/// Energy functional
///
/// ```text
/// E = Σ_c ∫ κ|∇φ_c|² + V_ext,c |φ_c|² dv + E_nl
/// ```
///
/// with `E_nl = ½∫g|ψ|⁴` (cubic) or `½Σ_jk ∫g_jk ρ_j ρ_k` (coupled, symmetric
/// matrix required). For four-wave mixing the phase-modulation part takes the
/// coupled form and the mixing part is `4g ∫Re(φ₁φ₂φ₃*φ₄*)`; its variation
/// reproduces the `2g` mixing terms. That functional is an extension, checked
/// only through conservation in fine-step runs. Custom potentials have no
/// energy.
///
/// The kinetic term is evaluated in spectral space, `Σ κ|k|²|ψ̂|² Δv`.
pub fn energy<T: Real>(psi: &WaveFunction<T>, h0: &LinearHamiltonian<T>, v: &NonlinearPotential<T>) -> Result<T> {
    h0.check_components(psi)?;
    v.check_components(psi.components())?;
    match v {
        NonlinearPotential::CustomLocal(c) => {
            return Err(Error::Unsupported(format!(
                "energy is not defined for custom potential '{}'",
                c.name
            )))
        }
        NonlinearPotential::CoupledCubic { g } => require_symmetric(g.len(), |j, k| g[j][k])?,
        NonlinearPotential::FourWaveMixing { phase_mod, .. } => require_symmetric(4, |j, k| phase_mod[j][k])?,
        NonlinearPotential::Cubic { .. } => {}
    }

    let grid = psi.grid();
    let n = grid.len();
    let dv = grid.cell_volume();
    let half = T::of(0.5);

    let spec = psi.to_spectral();
    let mut kinetic = T::zero();
    for c in 0..psi.components() {
        kinetic = spec
            .component(c)
            .iter()
            .zip(grid.k_squared())
            .fold(kinetic, |acc, (z, &k2)| acc + k2 * z.norm_sqr());
    }
    kinetic = kinetic * h0.kappa();

    let mut external = T::zero();
    for c in 0..psi.components() {
        external = psi
            .component(c)
            .iter()
            .zip(h0.external(c).values())
            .fold(external, |acc, (z, &vp)| acc + vp * z.norm_sqr());
    }

    // ½ Σ_j ρ_j U_j covers the cubic, coupled and phase-modulation parts.
    let mut field = vec![T::zero(); psi.data().len()];
    v.eval_into(psi.data(), n, &mut field);
    let mut quartic = psi
        .data()
        .iter()
        .zip(&field)
        .fold(T::zero(), |acc, (z, &u)| acc + u * z.norm_sqr())
        * half;

    if let NonlinearPotential::FourWaveMixing { g, .. } = v {
        let (p1, p2, p3, p4) = (psi.component(0), psi.component(1), psi.component(2), psi.component(3));
        let mut mix = T::zero();
        for i in 0..n {
            mix = mix + (p1[i] * p2[i] * p3[i].conj() * p4[i].conj()).re;
        }
        quartic = quartic + T::of(4.0) * *g * mix;
    }

    Ok((kinetic + external + quartic) * dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{assemble, smooth_random_state, Profile};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn grid(n: usize, l: f64) -> Grid<f64> {
        Grid::<f64>::new(&[n], &[l]).unwrap()
    }

    #[test]
    fn cubic_on_constant_state() {
        let g = grid(16, 4.0);
        let psi = WaveFunction::from_fn(&g, 1, |_, _| c(0.5, 0.0));
        let v = NonlinearPotential::cubic(1.0).eval_nonlinear(&psi).unwrap();
        assert!(v.iter().all(|&x| x == 0.25));
        let zero = WaveFunction::zeros(&g, 1);
        assert!(NonlinearPotential::cubic(3.0).eval_nonlinear(&zero).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn coupled_cubic_arithmetic() {
        let g = grid(8, 1.0);
        let psi = WaveFunction::from_fn(&g, 2, |comp, _| if comp == 0 { c(0.6, 0.8) } else { c(1.0, 1.0) });
        let v = NonlinearPotential::coupled(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let field = v.eval_nonlinear(&psi).unwrap();
        assert!((field[0] - 5.0).abs() < 1e-14);
        assert!((field[8] - 11.0).abs() < 1e-14);
    }

    #[test]
    fn component_count_is_checked() {
        let g = grid(8, 1.0);
        let psi = WaveFunction::zeros(&g, 2);
        assert!(matches!(
            NonlinearPotential::cubic(1.0).eval_nonlinear(&psi),
            Err(Error::ComponentMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn phase_invariance_of_shipped_families_and_custom_negative() {
        let g = grid(32, 10.0);
        let one = smooth_random_state(&g, 1, 11);
        let four = smooth_random_state(&g, 4, 12);
        let two = smooth_random_state(&g, 2, 13);
        let theta = std::f64::consts::PI / 3.0;
        assert!(NonlinearPotential::cubic(1.0).check_phase_invariance(&one, theta).unwrap() <= 1e-15);
        let cc = NonlinearPotential::coupled(&[vec![1.0, 0.5], vec![0.5, 2.0]]).unwrap();
        assert!(cc.check_phase_invariance(&two, theta).unwrap() <= 1e-12);
        let fwm = NonlinearPotential::four_wave(0.7, [[0.1; 4]; 4]);
        assert!(fwm.check_phase_invariance(&four, theta).unwrap() <= 1e-12);

        let sensitive = NonlinearPotential::CustomLocal(CustomLocal::new("re", 1, |z, out| out[0] = z[0].re));
        assert!(sensitive.check_phase_invariance(&one, theta).unwrap() > 1e-3);
        let fine = NonlinearPotential::CustomLocal(CustomLocal::new("sat", 1, |z: &[Complex<f64>], out: &mut [f64]| {
            let r = z[0].norm_sqr();
            out[0] = r / (1.0 + r);
        }));
        assert!(fine.check_phase_invariance(&one, theta).unwrap() <= 1e-12);
    }

    #[test]
    fn mixing_couplings_follow_the_table() {
        let g = grid(8, 1.0);
        let vals = [c(1.0, 0.5), c(-0.3, 0.2), c(0.7, -1.1), c(0.4, 0.9)];
        let psi = WaveFunction::from_fn(&g, 4, |comp, _| vals[comp]);
        let v = NonlinearPotential::four_wave(2.0, [[0.0; 4]; 4]);
        let expect = |s: usize, t: usize| vals[s].conj() * vals[t] * 2.0;
        let cases = [
            (MixingTerm::V1, expect(1, 3)),
            (MixingTerm::V2, expect(1, 2)),
            (MixingTerm::V3, expect(0, 3)),
            (MixingTerm::V4, expect(0, 2)),
        ];
        for (term, want) in cases {
            let got = v.mixing_coupling(term, &psi).unwrap();
            assert!((got[3] - want).norm() < 1e-15, "{term:?}");
        }
    }

    #[test]
    fn harmonic_ground_state_energy_equals_norm() {
        let g = grid(256, 20.0);
        let h0 = LinearHamiltonian::uniform(&g, 1.0, ExternalPotential::harmonic(&g, 2f64.sqrt()), 1).unwrap();
        let psi = assemble(&g, &[Profile::OscillatorGround { omega: 2f64.sqrt() }], 1.0).unwrap();
        let e = energy(&psi, &h0, &NonlinearPotential::cubic(0.0)).unwrap();
        assert!((e - psi.norm_squared()).abs() < 1e-10, "{e}");
    }

    #[test]
    fn soliton_energy() {
        let g = grid(512, 64.0);
        let h0 = LinearHamiltonian::free(&g);
        let psi = assemble(&g, &[Profile::Sech { x0: 0.0, width: 1.0, k0: 0.0 }], 1.0).unwrap();
        let e = energy(&psi, &h0, &NonlinearPotential::cubic(-2.0)).unwrap();
        assert!((e + 2.0 / 3.0).abs() < 1e-10, "{e}");
        assert_eq!(energy(&WaveFunction::zeros(&g, 1), &h0, &NonlinearPotential::cubic(-2.0)).unwrap(), 0.0);
    }

    #[test]
    fn energy_refusals() {
        let g = grid(16, 4.0);
        let h0 = LinearHamiltonian::uniform(&g, 1.0, ExternalPotential::zero(&g), 2).unwrap();
        let psi = smooth_random_state(&g, 2, 1);
        let asym = NonlinearPotential::coupled(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!(matches!(energy(&psi, &h0, &asym), Err(Error::AsymmetricCoupling { row: 0, col: 1 })));
        let custom = NonlinearPotential::CustomLocal(CustomLocal::new("x", 2, |_, out: &mut [f64]| out.fill(0.0)));
        assert!(matches!(energy(&psi, &h0, &custom), Err(Error::Unsupported(_))));
    }

    #[test]
    fn table_potential_derivatives_are_spectral() {
        let l = 6.0;
        let g = grid(64, l);
        let k = 2.0 * std::f64::consts::PI / l;
        let vals: Vec<f64> = (0..64).map(|p| (k * g.position(p)[0]).cos()).collect();
        let v = ExternalPotential::from_values(&g, vals).unwrap();
        for p in 0..64 {
            let x = g.position(p)[0];
            assert!((v.gradient()[0][p] + k * (k * x).sin()).abs() < 1e-12);
            assert!((v.laplacian()[p] + k * k * (k * x).cos()).abs() < 1e-12);
        }
        assert!(ExternalPotential::from_values(&g, vec![f64::NAN; 64]).is_err());
    }

    #[test]
    fn h0_apply_on_plane_wave() {
        let l = 5.0;
        let g = grid(32, l);
        let k0 = 2.0 * std::f64::consts::PI * 2.0 / l;
        let h0 = LinearHamiltonian::uniform(&g, 0.5, ExternalPotential::constant(&g, 3.0), 1).unwrap();
        let psi = WaveFunction::from_fn(&g, 1, |_, r| Complex::from_polar(1.0, k0 * r[0]));
        let out = h0.apply(&psi).unwrap();
        for (a, b) in out.data().iter().zip(psi.data()) {
            assert!((*a - *b * (0.5 * k0 * k0 + 3.0)).norm() < 1e-12);
        }
    }
}
