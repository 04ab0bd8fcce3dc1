//! Closed-form convergence bounds for SFL and PFL.
//!
//! Displays with explicit constants (the SFL theorem's 9/2, 12, 18, …) are
//! evaluated verbatim and tagged [`ConstantsMode::Explicit`]. Every `O(·)`,
//! `Õ(·)` and `Ω(·)` display is evaluated with unit proportionality constants,
//! polylog factors suppressed, and tagged [`ConstantsMode::UnitConstant`].

mod lower;
mod table;
mod upper;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use lower::{sfl_lower_bound, LowerVariant};
pub use table::{crossover_threshold, render_csv, render_markdown, table2, Table2Row};
pub use upper::{
    partial_participation_bound, pfl_upper_bound, sfl_rate_row, sfl_upper_bound, tuned_rate_sfl,
    two_lr_bound,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("precondition violated: {constraint} ({detail})")]
    Precondition {
        constraint: &'static str,
        detail: String,
    },
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

pub(crate) fn precondition(constraint: &'static str, detail: String) -> BoundError {
    BoundError::Precondition { constraint, detail }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvexityCase {
    StronglyConvex,
    Convex,
    NonConvex,
}

/// How client disagreement is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heterogeneity {
    /// `ζ*`: gradient spread at the optimum.
    Optimum,
    /// `(β, ζ)`: spread everywhere, relative to `‖∇F‖`.
    Average,
    /// `ζ̂`: worst-case spread everywhere.
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantsMode {
    Explicit,
    UnitConstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Optimization,
    Stochasticity1,
    Stochasticity2,
    Heterogeneity,
    Participation,
}

impl TermKind {
    pub const ALL: [TermKind; 5] = [
        TermKind::Optimization,
        TermKind::Stochasticity1,
        TermKind::Stochasticity2,
        TermKind::Heterogeneity,
        TermKind::Participation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TermKind::Optimization => "optimization",
            TermKind::Stochasticity1 => "stochasticity-1",
            TermKind::Stochasticity2 => "stochasticity-2",
            TermKind::Heterogeneity => "heterogeneity",
            TermKind::Participation => "participation",
        }
    }
}

macro_rules! name_parsing {
    ($ty:ty { $($variant:path => $($name:literal)|+),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = BoundError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($($name)|+ => Ok($variant),)+
                    _ => Err(BoundError::Invalid(format!("unknown {} {s:?}", stringify!($ty)))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let names: &[&str] = match self { $($variant => &[$($name),+],)+ };
                f.write_str(names[0])
            }
        }
    };
}

name_parsing!(ConvexityCase {
    ConvexityCase::StronglyConvex => "strongly-convex" | "sc",
    ConvexityCase::Convex => "convex" | "gc",
    ConvexityCase::NonConvex => "non-convex" | "nc",
});

name_parsing!(Heterogeneity {
    Heterogeneity::Optimum => "opt-heterogeneity" | "opt",
    Heterogeneity::Average => "avg-heterogeneity" | "avg",
    Heterogeneity::Max => "max-heterogeneity" | "max",
});

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs shared by every bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub mu: f64,
    pub l: f64,
    pub sigma: f64,
    pub zeta_star: f64,
    pub zeta: f64,
    pub beta: f64,
    pub zeta_hat: f64,
    /// `‖x⁽⁰⁾ − x*‖`.
    pub d: f64,
    /// `F(x⁽⁰⁾) − F*`.
    pub a: f64,
    pub m: usize,
    pub k: usize,
    pub r: usize,
    pub s: usize,
    /// Effective learning rate `η̃`, required by the SFL theorem evaluator.
    pub eff_lr: Option<f64>,
    pub gamma: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            mu: 1.0,
            l: 1.0,
            sigma: 0.0,
            zeta_star: 0.0,
            zeta: 0.0,
            beta: 0.0,
            zeta_hat: 0.0,
            d: 1.0,
            a: 1.0,
            m: 1,
            k: 1,
            r: 1,
            s: 1,
            eff_lr: None,
            gamma: 1.0,
        }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), BoundError> {
        let scalars = [
            ("μ", self.mu),
            ("L", self.l),
            ("σ", self.sigma),
            ("ζ*", self.zeta_star),
            ("ζ", self.zeta),
            ("β", self.beta),
            ("ζ̂", self.zeta_hat),
            ("D", self.d),
            ("A", self.a),
            ("γ", self.gamma),
        ];
        for (name, v) in scalars {
            if !(v.is_finite() && v >= 0.0) {
                return Err(BoundError::Invalid(format!(
                    "{name} must be finite and ≥ 0, got {v}"
                )));
            }
        }
        for (name, v) in [("M", self.m), ("K", self.k), ("R", self.r), ("S", self.s)] {
            if v == 0 {
                return Err(BoundError::Invalid(format!("{name} must be at least 1")));
            }
        }
        if let Some(e) = self.eff_lr {
            if !(e.is_finite() && e > 0.0) {
                return Err(BoundError::Invalid(format!("η̃ must be positive, got {e}")));
            }
        }
        Ok(())
    }

    pub(crate) fn mf(&self) -> f64 {
        self.m as f64
    }
    pub(crate) fn kf(&self) -> f64 {
        self.k as f64
    }
    pub(crate) fn rf(&self) -> f64 {
        self.r as f64
    }
    pub(crate) fn sf(&self) -> f64 {
        self.s as f64
    }
}

/// Numeric value of one bound, itemised.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub total: f64,
    /// Terms in display order.
    pub terms: Vec<(TermKind, f64)>,
    pub formula_id: &'static str,
    pub constants_mode: ConstantsMode,
    pub notes: Vec<String>,
}

impl BoundResult {
    pub(crate) fn new(
        formula_id: &'static str,
        constants_mode: ConstantsMode,
        terms: Vec<(TermKind, f64)>,
    ) -> Self {
        let total = terms.iter().map(|(_, v)| v).sum();
        Self {
            total,
            terms,
            formula_id,
            constants_mode,
            notes: Vec::new(),
        }
    }

    pub(crate) fn note(mut self, note: &str) -> Self {
        self.notes.push(note.to_string());
        self
    }

    /// Value of `kind`, zero when the display has no such term.
    pub fn term(&self, kind: TermKind) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| *k == kind)
            .map(|(_, v)| v)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for c in [
            ConvexityCase::StronglyConvex,
            ConvexityCase::Convex,
            ConvexityCase::NonConvex,
        ] {
            assert_eq!(c.to_string().parse::<ConvexityCase>().unwrap(), c);
        }
        assert_eq!("max".parse::<Heterogeneity>().unwrap(), Heterogeneity::Max);
        assert!("tight".parse::<Heterogeneity>().is_err());
    }

    #[test]
    fn validation() {
        assert!(BoundParams::default().validate().is_ok());
        assert!(BoundParams {
            sigma: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(BoundParams {
            r: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(BoundParams {
            eff_lr: Some(0.0),
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
