//! Pointwise field arithmetic for writing closed forms the way they read.

use std::ops::{Add, Mul, Neg, Sub};

use crate::num::Complex;

use super::dense::DenseOperator;

type C64 = Complex<f64>;

#[derive(Clone, Debug)]
pub struct Field(pub Vec<C64>);

impl Field {
    pub fn zeros(n: usize) -> Self {
        Field(vec![C64::new(0.0, 0.0); n])
    }

    pub fn conj(&self) -> Self {
        Field(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn abs2(&self) -> Self {
        Field(self.0.iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect())
    }

    pub fn powi(&self, k: u32) -> Self {
        Field(self.0.iter().map(|z| z.powu(k)).collect())
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }
}

macro_rules! elementwise {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for Field {
            type Output = Field;
            fn $f(self, rhs: Field) -> Field {
                Field(self.0.into_iter().zip(rhs.0).map(|(a, b)| a $op b).collect())
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);
elementwise!(Mul, mul, *);

impl Neg for Field {
    type Output = Field;
    fn neg(self) -> Field {
        Field(self.0.into_iter().map(|z| -z).collect())
    }
}

impl Mul<Field> for f64 {
    type Output = Field;
    fn mul(self, rhs: Field) -> Field {
        Field(rhs.0.into_iter().map(|z| z * self).collect())
    }
}

impl Mul<Field> for C64 {
    type Output = Field;
    fn mul(self, rhs: Field) -> Field {
        Field(rhs.0.into_iter().map(|z| z * self).collect())
    }
}

/// Ingredients shared by the closed forms: `Ψ`, `Ψ*`, `|Ψ|²` and the
/// operator `H₀`.
pub struct Ctx<'a> {
    pub h: &'a DenseOperator,
    pub g: f64,
    pub p: Field,
    pub c: Field,
    pub a: Field,
}

impl<'a> Ctx<'a> {
    pub fn new(h: &'a DenseOperator, g: f64, psi: &[C64]) -> Self {
        let p = Field(psi.to_vec());
        Self {
            h,
            g,
            c: p.conj(),
            a: p.abs2(),
            p,
        }
    }

    /// `H₀ f`.
    pub fn h(&self, f: Field) -> Field {
        Field(self.h.apply(&f.0))
    }

    /// `H₀ⁿ f`.
    pub fn hn(&self, n: usize, f: Field) -> Field {
        (0..n).fold(f, |acc, _| self.h(acc))
    }
}
