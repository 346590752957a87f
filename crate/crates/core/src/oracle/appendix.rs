//! Closed-form products of the nonlinear operator with `H₀` for the cubic
//! potential `g|Ψ|²`, transcribed term by term.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::num::Complex;

use super::algebra::{Ctx, Field};
use super::dense::DenseOperator;

type C64 = Complex<f64>;

/// Letters of an operator word, leftmost first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    H,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AppendixId {
    Eq5,
    Eq6,
    Eq7,
    Eq8,
    Eq9,
    Eq10,
    Eq11,
    Eq12,
    Eq13,
    Eq14,
    Eq15,
}

impl AppendixId {
    pub const ALL: [AppendixId; 11] = [
        AppendixId::Eq5,
        AppendixId::Eq6,
        AppendixId::Eq7,
        AppendixId::Eq8,
        AppendixId::Eq9,
        AppendixId::Eq10,
        AppendixId::Eq11,
        AppendixId::Eq12,
        AppendixId::Eq13,
        AppendixId::Eq14,
        AppendixId::Eq15,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AppendixId::Eq5 => "appeq5",
            AppendixId::Eq6 => "appeq6",
            AppendixId::Eq7 => "appeq7",
            AppendixId::Eq8 => "appeq8",
            AppendixId::Eq9 => "appeq9",
            AppendixId::Eq10 => "appeq10",
            AppendixId::Eq11 => "appeq11",
            AppendixId::Eq12 => "appeq12",
            AppendixId::Eq13 => "appeq13",
            AppendixId::Eq14 => "appeq14",
            AppendixId::Eq15 => "appeq15",
        }
    }

    /// The handles `K₁…K_n` inside `V̂(K₁⋯K_n Ψ)`, leftmost first.
    pub fn word(self) -> &'static [Letter] {
        use Letter::{H, V};
        match self {
            AppendixId::Eq5 => &[H],
            AppendixId::Eq6 => &[V, H],
            AppendixId::Eq7 => &[V, V, H],
            AppendixId::Eq8 => &[H, H],
            AppendixId::Eq9 => &[H, V],
            AppendixId::Eq10 => &[H, H, H],
            AppendixId::Eq11 => &[H, H, V],
            AppendixId::Eq12 => &[H, V, H],
            AppendixId::Eq13 => &[V, H, H],
            AppendixId::Eq14 => &[H, V, V],
            AppendixId::Eq15 => &[V, H, V],
        }
    }

    /// Inverse of [`word`](Self::word).
    pub fn for_word(word: &[Letter]) -> Option<Self> {
        AppendixId::ALL.into_iter().find(|id| id.word() == word)
    }

    pub fn display_word(self) -> String {
        let inner: String = self
            .word()
            .iter()
            .map(|l| match l {
                Letter::H => "H0 ",
                Letter::V => "V ",
            })
            .collect();
        format!("V {inner}psi")
    }
}

impl fmt::Display for AppendixId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AppendixId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AppendixId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Oracle(format!("unknown appendix identity '{s}'")))
    }
}

/// Closed form of `V̂(word Ψ)` for the cubic potential.
pub fn appendix_product(id: AppendixId, psi: &[C64], h0: &DenseOperator, g: f64) -> Vec<C64> {
    let x = Ctx::new(h0, g, psi);
    appendix_field(id, &x).into_inner()
}

pub(crate) fn appendix_field(id: AppendixId, x: &Ctx) -> Field {
    let (g, p, c, a) = (x.g, &x.p, &x.c, &x.a);
    let g2 = g * g;
    let g3 = g2 * g;
    let p2 = p.powi(2);
    let hp = x.h(p.clone());
    let hc = x.h(c.clone());
    let h2p = x.h(hp.clone());
    let h2c = x.h(hc.clone());
    let ap = a.clone() * p.clone();
    let ac = a.clone() * c.clone();
    match id {
        AppendixId::Eq5 => 2.0 * g * a.clone() * hp - g * p2 * hc,
        AppendixId::Eq6 => 3.0 * g2 * a.powi(2) * hp - 2.0 * g2 * a.clone() * p2 * hc,
        AppendixId::Eq7 => 4.0 * g3 * a.powi(3) * hp - 3.0 * g3 * a.powi(2) * p2 * hc,
        AppendixId::Eq8 => {
            g * p2 * h2c - 4.0 * g * p.clone() * hp.clone() * hc + 2.0 * g * c.clone() * hp.powi(2)
                + 2.0 * g * a.clone() * h2p
        }
        AppendixId::Eq9 => {
            g2 * p2.clone() * x.h(ac) - 2.0 * g2 * a.clone() * p2 * hc + 2.0 * g2 * a.clone() * x.h(ap)
        }
        AppendixId::Eq10 => {
            let h3p = x.h(h2p.clone());
            let h3c = x.h(h2c.clone());
            -g * p2 * h3c + 6.0 * g * p.clone() * hp.clone() * h2c - 6.0 * g * p.clone() * hc.clone() * h2p.clone()
                + 2.0 * g * a.clone() * h3p
                - 6.0 * g * hp.powi(2) * hc
                + 6.0 * g * c.clone() * hp * h2p
        }
        AppendixId::Eq11 => {
            let h_ac = x.h(ac);
            let h_ap = x.h(ap);
            -g2 * p2.clone() * x.h(h_ac.clone()) + 4.0 * g2 * p.clone() * hp.clone() * h_ac
                + 2.0 * g2 * a.clone() * p2 * h2c
                - 4.0 * g2 * p.clone() * hc.clone() * h_ap.clone()
                + 2.0 * g2 * a.clone() * x.h(h_ap.clone())
                - 2.0 * g2 * a.clone() * c.clone() * hp.powi(2)
                - 4.0 * g2 * a.clone() * p.clone() * hp.clone() * hc
                + 4.0 * g2 * c.clone() * hp * h_ap
        }
        AppendixId::Eq12 => {
            let h_ac = x.h(ac);
            let h_ap = x.h(ap);
            -2.0 * g2 * p2.clone() * x.h(a.clone() * hc.clone())
                + g2 * p2.clone() * x.h(c.powi(2) * hp.clone())
                + 2.0 * g2 * a.clone() * p2.clone() * h2c
                + 2.0 * g2 * p.clone() * hp.clone() * h_ac
                - 2.0 * g2 * p.clone() * hc.clone() * h_ap.clone()
                + 2.0 * g2 * p.powi(3) * hc.powi(2)
                + 4.0 * g2 * a.clone() * x.h(a.clone() * hp.clone())
                - 2.0 * g2 * a.clone() * x.h(p2 * hc.clone())
                - 6.0 * g2 * a.clone() * p.clone() * hp.clone() * hc
                + 2.0 * g2 * c.clone() * hp * h_ap
        }
        AppendixId::Eq13 => {
            2.0 * g2 * p.powi(3) * hc.powi(2) + 2.0 * g2 * a.clone() * p2 * h2c
                - 12.0 * g2 * a.clone() * p.clone() * hp.clone() * hc
                + 6.0 * g2 * a.clone() * c.clone() * hp.powi(2)
                + 3.0 * g2 * a.powi(2) * h2p
        }
        AppendixId::Eq14 => {
            -g3 * p2.clone() * x.h(a.powi(2) * c.clone()) + 4.0 * g3 * a.clone() * p2.clone() * x.h(ac)
                - 4.0 * g3 * a.powi(2) * p2 * hc
                + 2.0 * g3 * a.clone() * x.h(a.powi(2) * p.clone())
        }
        AppendixId::Eq15 => {
            2.0 * g3 * a.clone() * p2.clone() * x.h(ac) - 4.0 * g3 * a.powi(2) * p2 * hc
                + 3.0 * g3 * a.powi(2) * x.h(ap)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::oracle::dense::dense_h0;

    #[test]
    fn constant_state_without_potential_gives_zero() {
        let g = Grid::<f64>::new(&[16], &[4.0]).unwrap();
        let h0 = dense_h0(&g, &[0.0; 16], 1.0).unwrap();
        let psi = vec![C64::new(0.6, -0.2); 16];
        let out = appendix_product(AppendixId::Eq5, &psi, &h0, 1.3);
        assert!(out.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn names_and_words_round_trip() {
        for id in AppendixId::ALL {
            assert_eq!(id.name().parse::<AppendixId>().unwrap(), id);
            assert_eq!(AppendixId::for_word(id.word()), Some(id));
        }
        assert!("appeq16".parse::<AppendixId>().is_err());
        assert_eq!(AppendixId::Eq12.display_word(), "V H0 V H0 psi");
    }
}
