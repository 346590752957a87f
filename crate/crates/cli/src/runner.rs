//! Turns a [`RunConfig`] into library objects and drives propagation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nlsprop::convergence::{self, ConvergencePoint, ConvergenceStudy};
use nlsprop::hamiltonian::{CustomLocal, ExternalPotential, LinearHamiltonian, NonlinearPotential};
use nlsprop::profiles::assemble;
use nlsprop::snapshot;
use nlsprop::{Complex, Grid, Method, ObservableRecord, PropagationConfig, Propagator, Real, WaveFunction};
use rayon::prelude::*;

use crate::config::{ExternalSpec, InitialSpec, PotentialSpec, RunConfig};
use crate::Failure;

/// Everything needed to step one configured problem.
pub struct Problem<T: Real> {
    pub propagator: Propagator<T>,
    pub method: Method,
    pub initial: WaveFunction<T>,
}

pub fn build<T: Real + 'static>(cfg: &RunConfig) -> Result<Problem<T>> {
    let lengths: Vec<T> = cfg.lengths.iter().map(|l| T::of(*l)).collect();
    let grid = Grid::new(&cfg.points, &lengths).context("building grid")?;

    let mut initial: WaveFunction<T> = match &cfg.initial {
        InitialSpec::Profiles(p) => assemble(&grid, p, cfg.kappa).context("sampling initial profiles")?,
        InitialSpec::Snapshot(path) => {
            let psi: WaveFunction<T> =
                snapshot::load(path).with_context(|| format!("loading initial snapshot {}", path.display()))?;
            if psi.grid().points() != grid.points() {
                bail!(
                    "initial snapshot grid {:?} does not match [grid] points {:?}",
                    psi.grid().points(),
                    grid.points()
                );
            }
            WaveFunction::from_data(&grid, psi.components(), psi.into_data())?
        }
    };
    if let Some(n) = cfg.norm {
        initial.normalize();
        initial.scale(Complex::new(T::of(n), T::zero()));
    }
    let components = initial.components();

    let external = match &cfg.external {
        ExternalSpec::Zero => ExternalPotential::zero(&grid),
        ExternalSpec::Constant(v) => ExternalPotential::constant(&grid, *v),
        ExternalSpec::Harmonic(w) => ExternalPotential::harmonic(&grid, *w),
        ExternalSpec::Table(path) => {
            let values = snapshot::load_real_field(path, &grid)
                .with_context(|| format!("loading potential table {}", path.display()))?;
            ExternalPotential::from_values(&grid, values)?
        }
    };
    let h0 = LinearHamiltonian::uniform(&grid, cfg.kappa, external, components)?;

    let potential = match &cfg.potential {
        PotentialSpec::Free => {
            if components == 1 {
                NonlinearPotential::cubic(0.0)
            } else {
                NonlinearPotential::coupled(&vec![vec![0.0; components]; components])?
            }
        }
        PotentialSpec::Cubic { g } => NonlinearPotential::cubic(*g),
        PotentialSpec::Coupled { matrix } => NonlinearPotential::coupled(matrix)?,
        PotentialSpec::FourWave { g, phase_mod } => NonlinearPotential::four_wave(*g, *phase_mod),
        PotentialSpec::Saturable { g, s } => {
            let (g, s) = (T::of(*g), T::of(*s));
            NonlinearPotential::CustomLocal(CustomLocal::new("saturable", 1, move |z: &[Complex<T>], out: &mut [T]| {
                let rho = z[0].norm_sqr();
                out[0] = g * rho / (T::one() + s * rho);
            }))
        }
    };
    let method = Method::by_name(&cfg.scheme, &potential, cfg.commutator_variant)?;
    let propagator = Propagator::new(h0, potential)?;
    propagator.check_method(&method)?;
    Ok(Problem {
        propagator,
        method,
        initial,
    })
}

pub fn csv_header(components: usize) -> String {
    let mut h = String::from("time,norm_total");
    for c in 0..components {
        h.push_str(&format!(",norm_c{c}"));
    }
    h.push_str(",energy");
    h
}

pub fn csv_row(r: &ObservableRecord) -> String {
    let mut s = format!("{:.17e},{:.17e}", r.time, r.norm_total);
    for n in &r.norm_per_component {
        s.push_str(&format!(",{n:.17e}"));
    }
    match r.energy {
        Some(e) => s.push_str(&format!(",{e:.17e}")),
        None => s.push_str(",nan"),
    }
    s
}

pub fn snapshot_path(prefix: &Path, step: usize) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!("{step:08}.nlsp"));
    PathBuf::from(name)
}

pub struct RunSummary {
    pub records: Vec<ObservableRecord>,
    pub final_norm: f64,
    pub max_drift: f64,
}

pub fn run<T: Real + 'static>(cfg: &RunConfig) -> Result<RunSummary, Failure> {
    let Problem {
        mut propagator,
        method,
        initial,
    } = build::<T>(cfg).map_err(Failure::Config)?;
    let mut csv = match &cfg.output.csv {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display())).map_err(Failure::Config)?;
            let mut w = BufWriter::new(f);
            writeln!(w, "{}", csv_header(initial.components())).map_err(|e| Failure::Config(e.into()))?;
            Some(w)
        }
        None => None,
    };
    let pc = PropagationConfig {
        dt: cfg.dt,
        n_steps: cfg.steps,
        method,
        observe_every: cfg.observe_every,
        record_energy: cfg.energy,
    };
    let out = &cfg.output;
    let (psi, records) = propagator
        .propagate(initial, &pc, |psi, rec| {
            if let Some(w) = csv.as_mut() {
                writeln!(w, "{}", csv_row(rec))?;
            }
            if let Some(prefix) = &out.snapshot_prefix {
                if out.snapshot_every > 0 && rec.step % out.snapshot_every == 0 {
                    snapshot::save(psi, snapshot_path(prefix, rec.step))?;
                }
            }
            Ok(())
        })
        .map_err(|e| match e {
            nlsprop::Error::Io(_) | nlsprop::Error::Snapshot(_) => Failure::Config(anyhow::Error::new(e).context("writing output")),
            other => Failure::Numerical(anyhow::Error::new(other).context("propagation failed")),
        })?;
    if let Some(mut w) = csv {
        w.flush().map_err(|e| Failure::Config(e.into()))?;
    }
    if let Some(p) = &out.snapshot {
        snapshot::save(&psi, p)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::Config)?;
    }
    let n0 = records.first().map_or(0.0, |r| r.norm_total);
    let max_drift = records
        .iter()
        .map(|r| (r.norm_total - n0).abs() / n0.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(RunSummary {
        final_norm: psi.norm().as_f64(),
        records,
        max_drift,
    })
}

/// Requires at least four steps spanning 1.5 decades.
pub fn check_dts(dts: &[f64]) -> Result<()> {
    if dts.len() < 4 {
        bail!("a convergence study needs at least 4 dt values, got {}", dts.len());
    }
    let lo = dts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = dts.iter().copied().fold(0.0, f64::max);
    if (hi / lo).log10() < 1.5 {
        bail!("dt values must span at least 1.5 decades (got {:.2})", (hi / lo).log10());
    }
    Ok(())
}

/// Error against an order-6 reference at every `dt`, runs in parallel.
pub fn converge<T: Real + 'static>(cfg: &RunConfig, t_final: f64, dts: &[f64]) -> Result<ConvergenceStudy, Failure> {
    check_dts(dts).map_err(Failure::Config)?;
    let steps: Vec<usize> = dts
        .iter()
        .map(|dt| convergence::steps_for(t_final, *dt))
        .collect::<nlsprop::Result<_>>()
        .map_err(|e| Failure::Config(e.into()))?;
    let problem = build::<T>(cfg).map_err(Failure::Config)?;
    let mut reference_prop = problem.propagator.clone();
    let (reference, reference_dt) = convergence::reference_solution(&mut reference_prop, &problem.initial, t_final, dts)
        .map_err(|e| Failure::Numerical(anyhow::Error::new(e).context("reference run failed")))?;
    let points = dts
        .par_iter()
        .zip(&steps)
        .map(|(&dt, &n_steps)| {
            let mut prop = problem.propagator.clone();
            let out = prop
                .evolve(&problem.initial, &problem.method, dt, n_steps)
                .with_context(|| format!("run at dt = {dt}"))?;
            Ok(ConvergencePoint {
                dt,
                n_steps,
                error: out.distance(&reference).as_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(Failure::Numerical)?;
    Ok(ConvergenceStudy { points, reference_dt })
}
