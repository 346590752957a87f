//! Splitting coefficient tables.
//!
//! A [`SplittingScheme`] approximates `e^{λ(A+B)}` by the product of
//! `e^{λ a_k A} e^{λ b_k B}` over its stages. Stages are listed in the order
//! they act on the state: stage 1 first, and within a stage the `A` factor
//! before the `B` factor. Written as an operator product this is the usual
//! right-to-left reading, so Strang `e^{λA/2} e^{λB} e^{λA/2}` becomes
//! `[(1/2, 1), (1/2, 0)]`.
//!
//! Coefficients are kept as `f64` closed forms evaluated at construction.

use std::fmt;

use crate::error::{Error, Result};

/// Highest order produced by repeated composition.
pub const MAX_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stage {
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplittingScheme {
    pub name: String,
    pub order: usize,
    pub stages: Vec<Stage>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Factor {
    A(f64),
    B(f64),
}

impl SplittingScheme {
    pub fn new(name: impl Into<String>, order: usize, stages: Vec<(f64, f64)>) -> Result<Self> {
        let scheme = Self {
            name: name.into(),
            order,
            stages: stages.into_iter().map(|(a, b)| Stage { a, b }).collect(),
        };
        if scheme.stages.is_empty() {
            return Err(Error::Scheme("a scheme needs at least one stage".into()));
        }
        if scheme.stages.iter().any(|s| !s.a.is_finite() || !s.b.is_finite()) {
            return Err(Error::Scheme("non-finite coefficient".into()));
        }
        if !scheme.is_consistent(1e-12) {
            return Err(Error::Scheme(format!(
                "inconsistent coefficients: sum a = {}, sum b = {}",
                scheme.sum_a(),
                scheme.sum_b()
            )));
        }
        Ok(scheme)
    }

    pub fn sum_a(&self) -> f64 {
        self.stages.iter().map(|s| s.a).sum()
    }

    pub fn sum_b(&self) -> f64 {
        self.stages.iter().map(|s| s.b).sum()
    }

    pub fn is_consistent(&self, tol: f64) -> bool {
        (self.sum_a() - 1.0).abs() <= tol && (self.sum_b() - 1.0).abs() <= tol
    }

    /// Interleaved coefficients `[a1, b1, a2, b2, …]` with zero factors
    /// dropped and neighbours of the same kind merged.
    pub fn flattened(&self) -> Vec<f64> {
        self.factors()
            .into_iter()
            .map(|f| match f {
                Factor::A(x) | Factor::B(x) => x,
            })
            .collect()
    }

    fn factors(&self) -> Vec<Factor> {
        let raw = self.stages.iter().flat_map(|s| [Factor::A(s.a), Factor::B(s.b)]);
        merge(raw)
    }

    /// The factor sequence reads the same in both directions.
    pub fn is_palindromic(&self, tol: f64) -> bool {
        let f = self.factors();
        f.iter().zip(f.iter().rev()).all(|(x, y)| match (x, y) {
            (Factor::A(p), Factor::A(q)) | (Factor::B(p), Factor::B(q)) => (p - q).abs() <= tol,
            _ => false,
        })
    }

    /// Number of `B` evaluations per step.
    pub fn potential_evaluations(&self) -> usize {
        self.stages.iter().filter(|s| s.b != 0.0).count()
    }

    pub fn has_negative_coefficient(&self) -> bool {
        self.stages.iter().any(|s| s.a < 0.0 || s.b < 0.0)
    }

    /// The scheme with every coefficient multiplied by `z`, for composition.
    fn scaled(&self, z: f64) -> impl Iterator<Item = Factor> + '_ {
        self.stages
            .iter()
            .flat_map(move |s| [Factor::A(z * s.a), Factor::B(z * s.b)])
    }
}

impl fmt::Display for SplittingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {}, {} stages)", self.name, self.order, self.stages.len())
    }
}

fn merge(factors: impl Iterator<Item = Factor>) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::new();
    for f in factors {
        let zero = matches!(f, Factor::A(x) | Factor::B(x) if x == 0.0);
        if zero {
            continue;
        }
        match (out.last_mut(), f) {
            (Some(Factor::A(p)), Factor::A(q)) | (Some(Factor::B(p)), Factor::B(q)) => *p += q,
            _ => out.push(f),
        }
    }
    out
}

fn stages_from(factors: &[Factor]) -> Vec<(f64, f64)> {
    let mut stages = Vec::new();
    let mut pending_a = 0.0;
    for f in factors {
        match *f {
            Factor::A(x) => pending_a += x,
            Factor::B(x) => {
                stages.push((pending_a, x));
                pending_a = 0.0;
            }
        }
    }
    if pending_a != 0.0 || stages.is_empty() {
        stages.push((pending_a, 0.0));
    }
    stages
}

/// `e^{λA/2} e^{λB} e^{λA/2}`.
pub fn strang() -> SplittingScheme {
    SplittingScheme::new("strang", 2, vec![(0.5, 1.0), (0.5, 0.0)]).expect("valid table")
}

/// Fourth order with `s = 1/(2 - 2^{1/3})`.
pub fn forest_ruth() -> SplittingScheme {
    let s = forest_ruth_s();
    SplittingScheme::new(
        "forest-ruth",
        4,
        vec![
            (s / 2.0, s),
            ((1.0 - s) / 2.0, 1.0 - 2.0 * s),
            ((1.0 - s) / 2.0, s),
            (s / 2.0, 0.0),
        ],
    )
    .expect("valid table")
}

pub fn forest_ruth_s() -> f64 {
    1.0 / (2.0 - 2f64.powf(1.0 / 3.0))
}

/// Triple-jump weights `(z₁, z₀)` that lift a symmetric scheme of order `n`
/// to order `n + 2`.
pub fn triple_jump_weights(order: usize) -> (f64, f64) {
    let z1 = 1.0 / (2.0 - 2f64.powf(1.0 / (order as f64 + 1.0)));
    (z1, 1.0 - 2.0 * z1)
}

/// `S(z₁λ) S(z₀λ) S(z₁λ)` with adjacent factors of the same kind merged.
pub fn compose_higher_order(base: &SplittingScheme) -> Result<SplittingScheme> {
    if base.order % 2 != 0 {
        return Err(Error::Scheme(format!("base order {} is odd", base.order)));
    }
    if !base.is_palindromic(1e-13) {
        return Err(Error::Scheme(format!("base scheme '{}' is not palindromic", base.name)));
    }
    let order = base.order + 2;
    if order > MAX_ORDER {
        return Err(Error::Scheme(format!(
            "order {order} requested; composed schemes are supported up to order {MAX_ORDER}"
        )));
    }
    let (z1, z0) = triple_jump_weights(base.order);
    let merged = merge(base.scaled(z1).chain(base.scaled(z0)).chain(base.scaled(z1)));
    SplittingScheme::new(format!("order{order}"), order, stages_from(&merged))
}

/// Sixth order: composed Forest-Ruth.
pub fn order6() -> SplittingScheme {
    compose_higher_order(&forest_ruth()).expect("forest-ruth is symmetric")
}

pub fn order8() -> SplittingScheme {
    compose_higher_order(&order6()).expect("order6 is symmetric")
}

/// Coefficients of the fourth-order gradient product
/// `e^{λB/6} e^{λA/2} e^{2λB̃/3} e^{λA/2} e^{λB/6}` with
/// `B̃ = B + (λ²/48)[B,[B,A]]`. In real time `λ = -iτ`, so `λ² = -τ²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradientScheme {
    pub outer_b: f64,
    pub inner_a: f64,
    pub mid_b: f64,
    pub commutator_weight: f64,
}

impl GradientScheme {
    pub fn order(&self) -> usize {
        4
    }

    /// All five time-step coefficients in application order.
    pub fn step_coefficients(&self) -> [f64; 5] {
        [self.outer_b, self.inner_a, self.mid_b, self.inner_a, self.outer_b]
    }

    pub fn all_positive(&self) -> bool {
        self.step_coefficients().iter().all(|&c| c > 0.0) && self.commutator_weight > 0.0
    }
}

pub fn chin_gradient() -> GradientScheme {
    GradientScheme {
        outer_b: 1.0 / 6.0,
        inner_a: 0.5,
        mid_b: 2.0 / 3.0,
        commutator_weight: 1.0 / 48.0,
    }
}

/// Splitting schemes selectable by name; `chin` is handled by the propagator.
pub fn splitting_by_name(name: &str) -> Result<SplittingScheme> {
    match name {
        "strang" => Ok(strang()),
        "forest-ruth" => Ok(forest_ruth()),
        "order6" => Ok(order6()),
        "order8" => Ok(order8()),
        other => Err(Error::Scheme(format!(
            "unknown scheme '{other}'; valid names: {}",
            SCHEME_NAMES.join(", ")
        ))),
    }
}

pub const SCHEME_NAMES: [&str; 5] = ["strang", "forest-ruth", "order6", "order8", "chin"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strang_table() {
        let s = strang();
        assert_eq!(s.flattened(), vec![0.5, 1.0, 0.5]);
        assert_eq!((s.sum_a(), s.sum_b()), (1.0, 1.0));
        assert!(s.is_palindromic(0.0));
    }

    #[test]
    fn forest_ruth_constants() {
        let s = forest_ruth_s();
        assert!((s - 1.351207191959658).abs() < 1e-15);
        assert!((1.0 - 2.0 * s + 1.702414383919316).abs() < 1e-14);
        let fr = forest_ruth();
        assert!(fr.is_consistent(1e-15));
        assert!(fr.is_palindromic(1e-15));
        assert!(fr.has_negative_coefficient());
        assert_eq!(fr.flattened().len(), 7);
    }

    #[test]
    fn composed_strang_is_forest_ruth() {
        let c = compose_higher_order(&strang()).unwrap();
        assert_eq!(c.order, 4);
        let (x, y) = (c.flattened(), forest_ruth().flattened());
        assert_eq!(x.len(), y.len());
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-14, "{p} vs {q}");
        }
        assert!((triple_jump_weights(2).0 - forest_ruth_s()).abs() < 1e-15);
    }

    #[test]
    fn higher_orders_are_consistent_and_symmetric() {
        for s in [order6(), order8()] {
            assert!(s.is_consistent(1e-14), "{s}");
            assert!(s.is_palindromic(1e-13), "{s}");
        }
        assert_eq!(order6().order, 6);
        assert_eq!(order6().potential_evaluations(), 9);
        assert_eq!(order8().potential_evaluations(), 27);
    }

    #[test]
    fn composition_refusals() {
        let err = compose_higher_order(&order8()).unwrap_err().to_string();
        assert!(err.contains("up to order 8"), "{err}");
        let lopsided = SplittingScheme::new("lie", 2, vec![(1.0, 1.0)]).unwrap();
        assert!(compose_higher_order(&lopsided).is_err());
        let odd = SplittingScheme::new("odd", 1, vec![(1.0, 1.0)]).unwrap();
        assert!(compose_higher_order(&odd).is_err());
        assert!(SplittingScheme::new("bad", 2, vec![(0.5, 1.0)]).is_err());
    }

    #[test]
    fn chin_coefficients() {
        let c = chin_gradient();
        assert!(c.all_positive());
        assert!((c.outer_b * 2.0 + c.mid_b - 1.0).abs() < 1e-15);
        assert_eq!(c.inner_a * 2.0, 1.0);
        assert_eq!(c.commutator_weight, 1.0 / 48.0);
    }

    #[test]
    fn names_resolve() {
        for name in ["strang", "forest-ruth", "order6", "order8"] {
            assert_eq!(splitting_by_name(name).unwrap().name, name);
        }
        let msg = splitting_by_name("rk4").unwrap_err().to_string();
        assert!(msg.contains("forest-ruth") && msg.contains("chin"));
    }
}
