//! Dense matrices for small grids.
//!
//! The kinetic matrix is assembled from its closed-form circulant column,
//! independently of the FFT path used by the propagator.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::num::Complex;

type C64 = Complex<f64>;

pub const MAX_DENSE_POINTS: usize = 4096;

struct Eigen {
    values: DVector<f64>,
    vectors: DMatrix<C64>,
}

/// A dense complex matrix acting on one component of a field.
pub struct DenseOperator {
    matrix: DMatrix<C64>,
    hermitian: bool,
    eigen: OnceLock<Eigen>,
}

impl Clone for DenseOperator {
    fn clone(&self) -> Self {
        Self::from_matrix(self.matrix.clone())
    }
}

impl std::fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseOperator")
            .field("n", &self.dim())
            .field("hermitian", &self.hermitian)
            .finish()
    }
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Self {
        assert!(matrix.is_square(), "dense operator must be square");
        let scale = matrix.iter().fold(0.0f64, |acc, z| acc.max(z.norm())).max(f64::MIN_POSITIVE);
        let hermitian = hermitian_residual(&matrix) <= 1e-12 * scale;
        Self {
            matrix,
            hermitian,
            eigen: OnceLock::new(),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `max |M - M†|`.
    pub fn hermitian_residual(&self) -> f64 {
        hermitian_residual(&self.matrix)
    }

    pub fn sum(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator::from_matrix(&self.matrix + &other.matrix)
    }

    pub fn product(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator::from_matrix(&self.matrix * &other.matrix)
    }

    /// `M v` applied blockwise when `v` holds several components.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len() % n, 0, "vector length is not a multiple of the operator size");
        let mut out = Vec::with_capacity(v.len());
        for block in v.chunks(n) {
            let x = DVector::from_column_slice(block);
            out.extend((&self.matrix * x).iter());
        }
        out
    }

    fn eigen(&self) -> &Eigen {
        self.eigen.get_or_init(|| {
            let e = SymmetricEigen::new(self.matrix.clone());
            Eigen {
                values: e.eigenvalues,
                vectors: e.eigenvectors,
            }
        })
    }

    /// Eigenvalues in ascending order. Hermitian operators only.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.require_hermitian()?;
        let mut v: Vec<f64> = self.eigen().values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    /// Eigenpairs sorted by eigenvalue.
    pub fn eigenpairs(&self) -> Result<Vec<(f64, Vec<C64>)>> {
        self.require_hermitian()?;
        let e = self.eigen();
        let mut pairs: Vec<(f64, Vec<C64>)> = (0..self.dim())
            .map(|j| (e.values[j], e.vectors.column(j).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(pairs)
    }

    fn require_hermitian(&self) -> Result<()> {
        if !self.hermitian {
            return Err(Error::Oracle("operator is not Hermitian".into()));
        }
        if self.matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Oracle("operator has non-finite entries".into()));
        }
        Ok(())
    }

    /// `e^{-iλM} v` through the eigendecomposition, blockwise.
    pub fn exp_apply(&self, lambda: C64, v: &[C64]) -> Result<Vec<C64>> {
        self.require_hermitian()?;
        let n = self.dim();
        if v.len() % n != 0 {
            return Err(Error::LengthMismatch {
                expected: n,
                found: v.len(),
            });
        }
        if lambda == C64::new(0.0, 0.0) {
            return Ok(v.to_vec());
        }
        let e = self.eigen();
        let mi = C64::new(0.0, -1.0);
        let phases: Vec<C64> = e.values.iter().map(|&w| (mi * lambda * w).exp()).collect();
        let mut out = Vec::with_capacity(v.len());
        for block in v.chunks(n) {
            let x = DVector::from_column_slice(block);
            let mut y = e.vectors.adjoint() * x;
            for (yj, p) in y.iter_mut().zip(&phases) {
                *yj *= *p;
            }
            out.extend((&e.vectors * y).iter());
        }
        Ok(out)
    }
}

fn hermitian_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut r = 0.0f64;
    for i in 0..n {
        for j in i..n {
            r = r.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    r
}

/// Column of the circulant `-d²/dx²` on one periodic axis:
/// `c_d = (1/n) Σ_m k_m² cos(k_m d Δx)`.
pub fn circulant_column(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|d| {
            (0..n)
                .map(|m| {
                    let mt = crate::grid::signed_index(m, n) as f64;
                    let k = 2.0 * PI * mt / length;
                    k * k * (2.0 * PI * mt * d as f64 / n as f64).cos()
                })
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// `κ(-∇²)` as a dense matrix on `grid`.
pub fn dense_kinetic(grid: &Grid<f64>, kappa: f64) -> Result<DenseOperator> {
    let n = grid.len();
    if n > MAX_DENSE_POINTS {
        return Err(Error::Oracle(format!(
            "grid has {n} points; dense operators are limited to {MAX_DENSE_POINTS}"
        )));
    }
    let dims = grid.dims();
    let columns: Vec<Vec<f64>> = (0..dims)
        .map(|a| circulant_column(grid.points()[a], grid.lengths()[a]))
        .collect();
    let m = DMatrix::from_fn(n, n, |p, q| {
        let mut differing = None;
        let mut count = 0;
        for a in 0..dims {
            if grid.axis_index(p, a) != grid.axis_index(q, a) {
                differing = Some(a);
                count += 1;
            }
        }
        let v = match (count, differing) {
            (0, _) => (0..dims).map(|a| columns[a][0]).sum(),
            (1, Some(a)) => {
                let na = grid.points()[a];
                let d = (grid.axis_index(p, a) + na - grid.axis_index(q, a)) % na;
                columns[a][d]
            }
            _ => 0.0,
        };
        C64::new(kappa * v, 0.0)
    });
    Ok(DenseOperator::from_matrix(m))
}

/// `H₀ = κ(-∇²) + diag(V_ext)`.
pub fn dense_h0(grid: &Grid<f64>, external: &[f64], kappa: f64) -> Result<DenseOperator> {
    if external.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: external.len(),
        });
    }
    if external.iter().any(|v| !v.is_finite()) {
        return Err(Error::Oracle("external potential has non-finite values".into()));
    }
    let mut op = dense_kinetic(grid, kappa)?;
    for (i, &v) in external.iter().enumerate() {
        op.matrix[(i, i)] += C64::new(v, 0.0);
    }
    Ok(DenseOperator::from_matrix(op.matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WaveFunction;
    use crate::profiles::smooth_random_state;

    #[test]
    fn kinetic_matches_spectral_laplacian() {
        let g = Grid::<f64>::new(&[16, 8], &[3.0, 2.0]).unwrap();
        let k = dense_kinetic(&g, 1.0).unwrap();
        let psi = smooth_random_state(&g, 1, 4);
        let dense = k.apply(psi.data());
        let spectral = psi.spectral_laplacian();
        for (a, b) in dense.iter().zip(spectral.data()) {
            assert!((*a + *b).norm() < 1e-11);
        }
    }

    #[test]
    fn free_eigenvalues_are_k_squared() {
        let g = Grid::<f64>::new(&[16], &[5.0]).unwrap();
        let k = dense_kinetic(&g, 0.5).unwrap();
        assert!(k.is_hermitian());
        assert!(k.hermitian_residual() <= 1e-12);
        let mut want: Vec<f64> = g.k_squared().iter().map(|k2| 0.5 * k2).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in k.eigenvalues().unwrap().iter().zip(&want) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn exponential_limits() {
        let g = Grid::<f64>::new(&[16], &[5.0]).unwrap();
        let h = dense_h0(&g, &vec![0.3; 16], 1.0).unwrap();
        let psi: WaveFunction<f64> = smooth_random_state(&g, 1, 2);
        let v = psi.data();
        assert_eq!(h.exp_apply(C64::new(0.0, 0.0), v).unwrap(), v.to_vec());
        let w = h.exp_apply(C64::new(0.8, 0.0), v).unwrap();
        let n0: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let n1: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        assert!((n0 - n1).abs() < 1e-12);

        let d = DenseOperator::diagonal(&[1.0, 2.0, 3.0]);
        let x = vec![C64::new(1.0, 0.0); 3];
        let y = d.exp_apply(C64::new(0.5, 0.0), &x).unwrap();
        for (j, z) in y.iter().enumerate() {
            assert!((*z - C64::from_polar(1.0, -0.5 * (j + 1) as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn oscillator_spectrum() {
        let g = Grid::<f64>::new(&[256], &[20.0]).unwrap();
        let v: Vec<f64> = (0..256).map(|p| g.position(p)[0].powi(2)).collect();
        let h = dense_h0(&g, &v, 1.0).unwrap();
        let e = h.eigenvalues().unwrap();
        for (j, ej) in e.iter().take(4).enumerate() {
            assert!((ej - (2 * j + 1) as f64).abs() < 1e-6, "level {j}: {ej}");
        }
    }

    #[test]
    fn size_limit() {
        let g = Grid::<f64>::new(&[128, 64], &[1.0, 1.0]).unwrap();
        assert!(dense_kinetic(&g, 1.0).is_err());
    }
}
