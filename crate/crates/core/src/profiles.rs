//! Named initial states.
//!
//! Shifts `x0` and momenta `k0` act along axis 0. On higher-dimensional
//! grids the remaining axes get the same envelope centred at the origin.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction, MAX_DIMS};
use crate::num::{cis, Complex, Real};

#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `exp(-(x-x0)²/(2σ²)) e^{i k0 x}`.
    Gaussian { x0: f64, sigma: f64, k0: f64 },
    /// `sech((x-x0)/width) e^{i k0 x}`.
    Sech { x0: f64, width: f64, k0: f64 },
    /// Ground state of `-κ∇² + ½ω²|r|²`, unnormalized: `exp(-α|r|²)` with
    /// `α = ω / (2 sqrt(2κ))`.
    OscillatorGround { omega: f64 },
    Uniform { amplitude: f64 },
    /// Band-limited random state with unit norm. Only modes with
    /// `|m| <= n/8` on every axis are populated.
    SmoothRandom { seed: u64 },
    Zero,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Gaussian { .. } => "gaussian",
            Profile::Sech { .. } => "sech",
            Profile::OscillatorGround { .. } => "oscillator-ground",
            Profile::Uniform { .. } => "uniform",
            Profile::SmoothRandom { .. } => "smooth-random",
            Profile::Zero => "zero",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{}: {what}", self.name())));
        match *self {
            Profile::Gaussian { sigma, .. } if !(sigma > 0.0) => bad("sigma must be positive"),
            Profile::Sech { width, .. } if !(width > 0.0) => bad("width must be positive"),
            Profile::OscillatorGround { omega } if !(omega > 0.0) => bad("omega must be positive"),
            _ => Ok(()),
        }
    }

    /// Samples the profile as one component on `grid`. `kappa` is the kinetic
    /// coefficient, needed only by the oscillator ground state.
    pub fn sample<T: Real>(&self, grid: &Grid<T>, kappa: f64) -> Result<Vec<Complex<T>>> {
        self.validate()?;
        if let Profile::SmoothRandom { seed } = *self {
            return Ok(smooth_random(grid, seed));
        }
        let dims = grid.dims();
        let values = (0..grid.len())
            .map(|p| {
                let pos = grid.position(p);
                let mut r = [0.0; MAX_DIMS];
                for (a, v) in r.iter_mut().enumerate().take(dims) {
                    *v = pos[a].as_f64();
                }
                let z = self.at(&r[..dims], kappa);
                Complex::new(T::of(z.re), T::of(z.im))
            })
            .collect();
        Ok(values)
    }

    fn at(&self, r: &[f64], kappa: f64) -> Complex<f64> {
        match *self {
            Profile::Gaussian { x0, sigma, k0 } => {
                let d2: f64 = r
                    .iter()
                    .enumerate()
                    .map(|(a, &x)| if a == 0 { (x - x0).powi(2) } else { x * x })
                    .sum();
                cis(k0 * r[0]) * (-d2 / (2.0 * sigma * sigma)).exp()
            }
            Profile::Sech { x0, width, k0 } => {
                let env: f64 = r
                    .iter()
                    .enumerate()
                    .map(|(a, &x)| {
                        let u = if a == 0 { x - x0 } else { x };
                        1.0 / (u / width).cosh()
                    })
                    .product();
                cis(k0 * r[0]) * env
            }
            Profile::OscillatorGround { omega } => {
                let alpha = omega / (2.0 * (2.0 * kappa).sqrt());
                let r2: f64 = r.iter().map(|x| x * x).sum();
                Complex::new((-alpha * r2).exp(), 0.0)
            }
            Profile::Uniform { amplitude } => Complex::new(amplitude, 0.0),
            Profile::Zero => Complex::new(0.0, 0.0),
            Profile::SmoothRandom { .. } => unreachable!("sampled spectrally"),
        }
    }
}

/// One component per profile.
pub fn assemble<T: Real>(grid: &Grid<T>, profiles: &[Profile], kappa: f64) -> Result<WaveFunction<T>> {
    if profiles.is_empty() {
        return Err(Error::InvalidParameter("at least one component profile is required".into()));
    }
    let comps = profiles
        .iter()
        .map(|p| p.sample(grid, kappa))
        .collect::<Result<Vec<_>>>()?;
    WaveFunction::from_components(grid, comps)
}

fn smooth_random<T: Real>(grid: &Grid<T>, seed: u64) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for (flat, z) in spec.iter_mut().enumerate() {
        let inside = (0..grid.dims()).all(|a| {
            let n = grid.points()[a];
            let m = crate::grid::signed_index(grid.axis_index(flat, a), n);
            m.unsigned_abs() as usize <= n / 8
        });
        // Draw for every slot so the sequence does not depend on the band.
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        if inside {
            *z = Complex::new(T::of(re), T::of(im));
        }
    }
    grid.inverse_in_place(&mut spec);
    let mut psi = WaveFunction::from_data(grid, 1, spec).expect("length matches grid");
    psi.normalize();
    psi.into_data()
}

/// Convenience: a unit-norm smooth random state with `components` independent
/// components, seeded `seed, seed+1, …`.
pub fn smooth_random_state<T: Real>(grid: &Grid<T>, components: usize, seed: u64) -> WaveFunction<T> {
    let comps = (0..components)
        .map(|c| smooth_random(grid, seed.wrapping_add(c as u64)))
        .collect();
    let mut psi = WaveFunction::from_components(grid, comps).expect("lengths match grid");
    psi.normalize();
    psi
}
