//! Uniform periodic grids, multi-component complex fields and the unitary
//! spectral transform.
//!
//! Storage is row-major with axis 0 slowest. A [`WaveFunction`] keeps its
//! components in contiguous blocks, component 0 first. The discrete Fourier
//! transform is scaled by `1/sqrt(N)` in both directions, so it is unitary
//! and `Σ|ψ|² = Σ|ψ̂|²` exactly; kinetic phases can be applied in spectral
//! space without any rescaling.
//!
//! Boundary conditions are periodic. Confining potentials must keep the
//! state negligible near the box edges, otherwise the periodic images
//! interact.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::num::{rotate, Complex, Real};

pub const MAX_DIMS: usize = 3;
pub const MIN_POINTS: usize = 4;

struct GridInner<T: Real> {
    points: Vec<usize>,
    lengths: Vec<T>,
    spacing: Vec<T>,
    strides: Vec<usize>,
    wavenumbers: Vec<Vec<T>>,
    k_squared: Vec<T>,
    forward: Vec<Arc<dyn Fft<T>>>,
    inverse: Vec<Arc<dyn Fft<T>>>,
    scratch_len: usize,
    len: usize,
}

/// Uniform periodic lattice in one to three dimensions.
///
/// Cheap to clone; clones share the wavenumber tables and FFT plans.
#[derive(Clone)]
pub struct Grid<T: Real> {
    inner: Arc<GridInner<T>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("points", &self.inner.points)
            .field("lengths", &self.inner.lengths)
            .finish()
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.points == other.inner.points && self.inner.lengths == other.inner.lengths)
    }
}

/// Signed alias index of FFT slot `m` on an axis with `n` points, in `[-n/2, n/2)`.
pub fn signed_index(m: usize, n: usize) -> i64 {
    if m <= (n - 1) / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Checked constructor mirroring the `(dims, points, lengths)` form used by
/// configuration files.
pub fn make_grid<T: Real>(dims: usize, points: &[usize], lengths: &[T]) -> Result<Grid<T>> {
    if !(1..=MAX_DIMS).contains(&dims) {
        return Err(Error::InvalidGrid(format!("dims must be 1, 2 or 3, got {dims}")));
    }
    if points.len() != dims || lengths.len() != dims {
        return Err(Error::InvalidGrid(format!(
            "expected {dims} point counts and lengths, got {} and {}",
            points.len(),
            lengths.len()
        )));
    }
    Grid::new(points, lengths)
}

impl<T: Real> Grid<T> {
    pub fn new(points: &[usize], lengths: &[T]) -> Result<Self> {
        let dims = points.len();
        if !(1..=MAX_DIMS).contains(&dims) {
            return Err(Error::InvalidGrid(format!("dims must be 1, 2 or 3, got {dims}")));
        }
        if lengths.len() != dims {
            return Err(Error::InvalidGrid(format!(
                "{dims} point counts but {} lengths",
                lengths.len()
            )));
        }
        for (axis, (&n, &l)) in points.iter().zip(lengths).enumerate() {
            if n < MIN_POINTS {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: need at least {MIN_POINTS} points, got {n}"
                )));
            }
            if !(l > T::zero()) || !l.is_finite() {
                return Err(Error::InvalidGrid(format!("axis {axis}: length must be positive, got {l}")));
            }
        }

        let len: usize = points.iter().product();
        let mut strides = vec![1; dims];
        for axis in (0..dims.saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * points[axis + 1];
        }
        let spacing: Vec<T> = points
            .iter()
            .zip(lengths)
            .map(|(&n, &l)| l / T::of(n as f64))
            .collect();
        let wavenumbers: Vec<Vec<T>> = points
            .iter()
            .zip(lengths)
            .map(|(&n, &l)| {
                let step = T::of(2.0 * std::f64::consts::PI) / l;
                (0..n).map(|m| step * T::of(signed_index(m, n) as f64)).collect()
            })
            .collect();

        let mut k_squared = vec![T::zero(); len];
        for (flat, k2) in k_squared.iter_mut().enumerate() {
            *k2 = (0..dims)
                .map(|axis| {
                    let k = wavenumbers[axis][(flat / strides[axis]) % points[axis]];
                    k * k
                })
                .fold(T::zero(), |acc, v| acc + v);
        }

        let mut planner = FftPlanner::new();
        let forward: Vec<_> = points
            .iter()
            .map(|&n| planner.plan_fft(n, FftDirection::Forward))
            .collect();
        let inverse: Vec<_> = points
            .iter()
            .map(|&n| planner.plan_fft(n, FftDirection::Inverse))
            .collect();
        let scratch_len = forward
            .iter()
            .chain(&inverse)
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);

        Ok(Self {
            inner: Arc::new(GridInner {
                points: points.to_vec(),
                lengths: lengths.to_vec(),
                spacing,
                strides,
                wavenumbers,
                k_squared,
                forward,
                inverse,
                scratch_len,
                len,
            }),
        })
    }

    pub fn dims(&self) -> usize {
        self.inner.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.inner.points
    }

    pub fn lengths(&self) -> &[T] {
        &self.inner.lengths
    }

    pub fn spacing(&self) -> &[T] {
        &self.inner.spacing
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    /// Volume element `Δv = Π Δx`.
    pub fn cell_volume(&self) -> T {
        self.inner.spacing.iter().fold(T::one(), |acc, &d| acc * d)
    }

    /// Wavenumbers of one axis in FFT order.
    pub fn wavenumbers(&self, axis: usize) -> &[T] {
        &self.inner.wavenumbers[axis]
    }

    /// `|k|²` at every spectral point.
    pub fn k_squared(&self) -> &[T] {
        &self.inner.k_squared
    }

    /// Coordinates along one axis; the box is centred on the origin,
    /// `x_j = -L/2 + j Δx`.
    pub fn coordinates(&self, axis: usize) -> Vec<T> {
        let n = self.inner.points[axis];
        let dx = self.inner.spacing[axis];
        let half = self.inner.lengths[axis] / T::of(2.0);
        (0..n).map(|j| T::of(j as f64) * dx - half).collect()
    }

    /// Index along `axis` of the flat position `flat`.
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.inner.strides[axis]) % self.inner.points[axis]
    }

    /// Position of a flat index; unused axes are zero.
    pub fn position(&self, flat: usize) -> [T; MAX_DIMS] {
        let mut r = [T::zero(); MAX_DIMS];
        for (axis, slot) in r.iter_mut().enumerate().take(self.dims()) {
            let j = self.axis_index(flat, axis);
            *slot = T::of(j as f64) * self.inner.spacing[axis] - self.inner.lengths[axis] / T::of(2.0);
        }
        r
    }

    /// Flat index of the spectral point whose wavenumber on each axis is
    /// `2π m / L` for the given signed indices.
    pub fn mode_index(&self, modes: &[i64]) -> Option<usize> {
        if modes.len() != self.dims() {
            return None;
        }
        let mut flat = 0;
        for (axis, &m) in modes.iter().enumerate() {
            let n = self.inner.points[axis] as i64;
            let slot = m.rem_euclid(n) as usize;
            if signed_index(slot, n as usize) != m {
                return None;
            }
            flat += slot * self.inner.strides[axis];
        }
        Some(flat)
    }

    fn is_nyquist(&self, axis: usize, index: usize) -> bool {
        let n = self.inner.points[axis];
        n % 2 == 0 && index == n / 2
    }

    fn transform(&self, data: &mut [Complex<T>], plans: &[Arc<dyn Fft<T>>]) {
        self.transform_unscaled(data, plans);
        let scale = T::one() / T::of(self.len() as f64).sqrt();
        for v in data.iter_mut() {
            *v = *v * scale;
        }
    }

    fn transform_unscaled(&self, data: &mut [Complex<T>], plans: &[Arc<dyn Fft<T>>]) {
        assert_eq!(data.len(), self.len(), "field does not match grid size");
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); self.inner.scratch_len];
        let mut line = Vec::new();
        for (axis, plan) in plans.iter().enumerate() {
            let n = self.inner.points[axis];
            let stride = self.inner.strides[axis];
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            line.resize(n, Complex::new(T::zero(), T::zero()));
            let block = stride * n;
            for outer in (0..self.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }

    /// `ψ ← F⁻¹[(1 + w_k) F ψ]` with unnormalized transforms and a single
    /// `1/N` in between; `w` holds `e^{iθ_k} - 1`.
    pub(crate) fn spectral_rotate(&self, data: &mut [Complex<T>], w: &[Complex<T>]) {
        self.transform_unscaled(data, &self.inner.forward);
        let inv_n = T::one() / T::of(self.len() as f64);
        for (z, m) in data.iter_mut().zip(w) {
            *z = rotate(*z, *m) * inv_n;
        }
        self.transform_unscaled(data, &self.inner.inverse);
    }

    /// Unitary forward transform of a single component, in place.
    pub fn forward_in_place(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.inner.forward);
    }

    /// Unitary inverse transform of a single component, in place.
    pub fn inverse_in_place(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.inner.inverse);
    }

    /// Laplacian of one complex component via multiplication by `-|k|²`.
    pub fn laplacian_in_place(&self, data: &mut [Complex<T>]) {
        self.forward_in_place(data);
        for (v, &k2) in data.iter_mut().zip(self.k_squared()) {
            *v = *v * (-k2);
        }
        self.inverse_in_place(data);
    }

    /// Laplacian of a real field.
    pub fn laplacian_real(&self, field: &[T]) -> Vec<T> {
        let mut buf: Vec<Complex<T>> = field.iter().map(|&f| Complex::new(f, T::zero())).collect();
        self.laplacian_in_place(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Gradient of a real field, one vector per axis. The Nyquist mode is
    /// dropped so the result of a real field stays real.
    pub fn gradient_real(&self, field: &[T]) -> Vec<Vec<T>> {
        assert_eq!(field.len(), self.len(), "field does not match grid size");
        let mut spectrum: Vec<Complex<T>> = field.iter().map(|&f| Complex::new(f, T::zero())).collect();
        self.forward_in_place(&mut spectrum);
        (0..self.dims())
            .map(|axis| {
                let ks = self.wavenumbers(axis);
                let mut d: Vec<Complex<T>> = spectrum
                    .iter()
                    .enumerate()
                    .map(|(flat, &z)| {
                        let j = self.axis_index(flat, axis);
                        if self.is_nyquist(axis, j) {
                            Complex::new(T::zero(), T::zero())
                        } else {
                            // i k z
                            Complex::new(-ks[j] * z.im, ks[j] * z.re)
                        }
                    })
                    .collect();
                self.inverse_in_place(&mut d);
                d.into_iter().map(|z| z.re).collect()
            })
            .collect()
    }

    /// Riemann sum `Σ f Δv` of a real field.
    pub fn integrate(&self, field: &[T]) -> T {
        field.iter().fold(T::zero(), |acc, &f| acc + f) * self.cell_volume()
    }
}

/// A `C`-component complex field sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction<T: Real> {
    grid: Grid<T>,
    components: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> WaveFunction<T> {
    pub fn zeros(grid: &Grid<T>, components: usize) -> Self {
        assert!(components >= 1, "a wave function needs at least one component");
        Self {
            grid: grid.clone(),
            components,
            data: vec![Complex::new(T::zero(), T::zero()); components * grid.len()],
        }
    }

    /// Samples `f(component, position)` at every grid point.
    pub fn from_fn(
        grid: &Grid<T>,
        components: usize,
        mut f: impl FnMut(usize, &[T; MAX_DIMS]) -> Complex<T>,
    ) -> Self {
        let mut psi = Self::zeros(grid, components);
        let n = grid.len();
        for c in 0..components {
            for p in 0..n {
                psi.data[c * n + p] = f(c, &grid.position(p));
            }
        }
        psi
    }

    pub fn from_data(grid: &Grid<T>, components: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if components == 0 {
            return Err(Error::InvalidParameter("component count must be at least 1".into()));
        }
        if data.len() != components * grid.len() {
            return Err(Error::LengthMismatch {
                expected: components * grid.len(),
                found: data.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            components,
            data,
        })
    }

    pub fn from_components(grid: &Grid<T>, components: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let count = components.len();
        let mut data = Vec::with_capacity(count * grid.len());
        for comp in components {
            if comp.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    found: comp.len(),
                });
            }
            data.extend(comp);
        }
        Self::from_data(grid, count, data)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[Complex<T>] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex<T>] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Values of every component at one grid point.
    pub fn local(&self, point: usize, out: &mut [Complex<T>]) {
        let n = self.grid.len();
        for (c, slot) in out.iter_mut().enumerate().take(self.components) {
            *slot = self.data[c * n + point];
        }
    }

    /// `|φ_c|²` at every point of component `c`.
    pub fn density(&self, c: usize) -> Vec<T> {
        self.component(c).iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm_squared(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()) * self.grid.cell_volume()
    }

    /// `sqrt(Σ_{c,points} |ψ|² Δv)`.
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn component_norms(&self) -> Vec<T> {
        let dv = self.grid.cell_volume();
        (0..self.components)
            .map(|c| {
                (self.component(c).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()) * dv).sqrt()
            })
            .collect()
    }

    pub fn max_amplitude(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Grid L2 distance `‖self - other‖`.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        let sum = self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr());
        (sum * self.grid.cell_volume()).sqrt()
    }

    /// `max |self - other|` over all points and components.
    pub fn max_difference(&self, other: &Self) -> T {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn scale(&mut self, factor: Complex<T>) {
        for z in &mut self.data {
            *z = *z * factor;
        }
    }

    /// Rescales to unit norm. Leaves a zero field untouched.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::zero() {
            self.scale(Complex::new(T::one() / n, T::zero()));
        }
    }

    pub fn to_spectral(&self) -> SpectralField<T> {
        let mut data = self.data.clone();
        let n = self.grid.len();
        for chunk in data.chunks_mut(n) {
            self.grid.forward_in_place(chunk);
        }
        SpectralField {
            grid: self.grid.clone(),
            components: self.components,
            data,
        }
    }

    /// `∇²ψ` of every component.
    pub fn spectral_laplacian(&self) -> Self {
        let mut out = self.clone();
        let n = self.grid.len();
        for chunk in out.data.chunks_mut(n) {
            self.grid.laplacian_in_place(chunk);
        }
        out
    }

    /// Converts to another precision.
    pub fn cast<U: Real>(&self, grid: &Grid<U>) -> Result<WaveFunction<U>> {
        if grid.points() != self.grid.points() {
            return Err(Error::InvalidGrid("target grid has a different shape".into()));
        }
        let data = self
            .data
            .iter()
            .map(|z| Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64())))
            .collect();
        WaveFunction::from_data(grid, self.components, data)
    }
}

/// Spectral coefficients of a [`WaveFunction`] under the unitary transform.
#[derive(Clone, Debug)]
pub struct SpectralField<T: Real> {
    grid: Grid<T>,
    components: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn component(&self, c: usize) -> &[Complex<T>] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    /// Norm computed from the coefficients (Parseval).
    pub fn norm(&self) -> T {
        (self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()) * self.grid.cell_volume()).sqrt()
    }

    pub fn from_spectral(self) -> WaveFunction<T> {
        let mut data = self.data;
        let n = self.grid.len();
        for chunk in data.chunks_mut(n) {
            self.grid.inverse_in_place(chunk);
        }
        WaveFunction {
            grid: self.grid,
            components: self.components,
            data,
        }
    }
}
