//! Spectral split-operator propagation for nonlinear Schrödinger and
//! Gross-Pitaevskii equations.
//!
//! The equation solved is
//!
//! ```text
//! i ∂ψ/∂t = [κ(-∇²) + V_ext + V_nl(ψ)] ψ
//! ```
//!
//! on a periodic box, with one or more components. Time stepping splits the
//! right-hand side into the kinetic part (diagonal in Fourier space) and the
//! local potential part (diagonal in position space). Every nonlinear factor
//! is evaluated on the most recent intermediate state, which keeps the
//! nominal order of the underlying linear splitting.
//!
//! The crate is generic over the real scalar (`f32` or `f64`) through
//! [`Real`]; the aliases below fix it to one precision. The [`oracle`]
//! module is double precision only.

pub mod convergence;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod num;
pub mod oracle;
pub mod profiles;
pub mod propagator;
pub mod schemes;
pub mod snapshot;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid, SpectralField, WaveFunction};
pub use hamiltonian::{ExternalPotential, LinearHamiltonian, MixingTerm, NonlinearPotential};
pub use num::{Complex, Real};
pub use propagator::{
    CommutatorVariant, Method, ObservableRecord, PropagationConfig, Propagator,
};
pub use schemes::{GradientScheme, SplittingScheme};

pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type WaveFunction64 = WaveFunction<f64>;
pub type WaveFunction32 = WaveFunction<f32>;
pub type LinearHamiltonian64 = LinearHamiltonian<f64>;
pub type LinearHamiltonian32 = LinearHamiltonian<f32>;
pub type NonlinearPotential64 = NonlinearPotential<f64>;
pub type NonlinearPotential32 = NonlinearPotential<f32>;
pub type Propagator64 = Propagator<f64>;
pub type Propagator32 = Propagator<f32>;
pub type Complex64 = Complex<f64>;
pub type Complex32 = Complex<f32>;
