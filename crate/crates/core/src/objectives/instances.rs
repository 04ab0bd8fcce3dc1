use std::fmt;
use std::str::FromStr;

use super::{ClientObjective, MultiDimInstance, ObjectiveError, QuadraticClient};

/// The two clients of quadratic group `id ∈ 1..=10`, as `(a⁻, a⁺, b)`.
///
/// Groups 6–10 repeat groups 1–5 with linear terms `±10` instead of `±1`.
pub fn build_quadratic_group(id: u32) -> Result<Vec<ClientObjective>, ObjectiveError> {
    let b = match id {
        1..=5 => 1.0,
        6..=10 => 10.0,
        _ => return Err(ObjectiveError::UnknownGroup(id)),
    };
    let (first, second) = match (id - 1) % 5 {
        0 => ((1.0, 1.0), (1.0, 1.0)),
        1 => ((1.5, 1.5), (0.5, 0.5)),
        2 => ((2.0, 2.0), (0.0, 0.0)),
        3 => ((1.5, 1.0), (1.5, 1.0)),
        _ => ((2.0, 1.0), (2.0, 1.0)),
    };
    Ok(vec![
        QuadraticClient::piecewise(first.0, first.1, b).into(),
        QuadraticClient::piecewise(second.0, second.1, -b).into(),
    ])
}

/// Family of lower-bound construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardKind {
    /// Identical clients with Rademacher noise (pure SGD lower bound).
    Stochastic,
    /// Noise-free clients split into `+ζ` and `−ζ` halves.
    Heterogeneity,
    /// 4 stochastic + 5 heterogeneity coordinates with curvatures tied to `μ`.
    CompositeSc,
}

/// Learning-rate regime selecting one row of the construction tables.
///
/// With `N = MK`: `TinyLr` is `η ≤ 1/(102010λNR)`, `TwoSlope` is
/// `1/(102010λ₁NR) ≤ η ≤ 1/(101λ₀N)`, `MidLr` is `1/(101λN) ≤ η ≤ 1/(λK)`
/// (up to `1/λ` for the stochastic family), `HighLr` is `1/(λK) ≤ η ≤ 1/λ`
/// (heterogeneity only) and `LargeLr` is `η ≥ 1/λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    TinyLr,
    TwoSlope,
    MidLr,
    HighLr,
    LargeLr,
}

impl FromStr for Regime {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "tiny-lr" | "1" => Regime::TinyLr,
            "two-slope" | "2" => Regime::TwoSlope,
            "mid-lr" | "3" => Regime::MidLr,
            "high-lr" | "4" => Regime::HighLr,
            "large-lr" | "5" => Regime::LargeLr,
            _ => {
                return Err(ObjectiveError::UnknownRegime {
                    kind: "any",
                    regime: s.to_string(),
                })
            }
        })
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::TinyLr => "tiny-lr",
            Regime::TwoSlope => "two-slope",
            Regime::MidLr => "mid-lr",
            Regime::HighLr => "high-lr",
            Regime::LargeLr => "large-lr",
        })
    }
}

impl FromStr for HardKind {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stochastic" => Ok(HardKind::Stochastic),
            "heterogeneity" => Ok(HardKind::Heterogeneity),
            "composite-sc" | "composite" => Ok(HardKind::CompositeSc),
            _ => Err(ObjectiveError::InvalidParams(format!(
                "unknown hard-instance kind {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardParams {
    pub lambda: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub sigma: f64,
    pub zeta: f64,
    pub mu: f64,
    pub m: usize,
    pub k: usize,
    pub r: usize,
}

impl HardParams {
    /// Unit curvatures with `λ₀ = 1010·λ₁`, and `σ = ζ = 1`.
    pub fn new(m: usize, k: usize, r: usize) -> Self {
        Self {
            lambda: 1.0,
            lambda0: 1010.0,
            lambda1: 1.0,
            sigma: 1.0,
            zeta: 1.0,
            mu: 1.0,
            m,
            k,
            r,
        }
    }
}

/// Initial point of the two-slope stochastic row.
pub(crate) fn two_slope_stochastic_init(sigma: f64, lambda1: f64, n: usize, r: usize) -> f64 {
    sigma / (8_160_800.0 * lambda1 * (n as f64).sqrt() * r as f64)
}

/// Initial point of the two-slope heterogeneity row.
pub(crate) fn two_slope_heterogeneity_init(zeta: f64, lambda1: f64, m: usize, r: usize) -> f64 {
    zeta / (81_608_000.0 * lambda1 * (m as f64).sqrt() * r as f64)
}

/// Builds a lower-bound construction together with its prescribed start.
///
/// The composite kind ignores `regime` and its own `λ` fields: every
/// coordinate's curvature is derived from `μ`.
pub fn build_hard_instance(
    kind: HardKind,
    regime: Regime,
    p: &HardParams,
) -> Result<MultiDimInstance, ObjectiveError> {
    if p.m == 0 || p.r == 0 {
        return Err(ObjectiveError::InvalidParams(
            "M and R must be at least 1".into(),
        ));
    }
    for (name, v) in [
        ("λ", p.lambda),
        ("λ0", p.lambda0),
        ("λ1", p.lambda1),
        ("σ", p.sigma),
        ("ζ", p.zeta),
        ("μ", p.mu),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(ObjectiveError::InvalidParams(format!(
                "{name} must be finite and ≥ 0, got {v}"
            )));
        }
    }
    match kind {
        HardKind::Stochastic => {
            let (coord, init) = stochastic_row(regime, p.lambda, p.lambda0, p.lambda1, p)?;
            MultiDimInstance::new(vec![vec![coord; p.m]], vec![init])
        }
        HardKind::Heterogeneity => {
            let (coords, init) = heterogeneity_row(regime, p.lambda, p.lambda0, p.lambda1, p)?;
            MultiDimInstance::new(vec![coords], vec![init])
        }
        HardKind::CompositeSc => composite(p),
    }
}

fn stochastic_row(
    regime: Regime,
    lambda: f64,
    lambda0: f64,
    lambda1: f64,
    p: &HardParams,
) -> Result<(QuadraticClient, f64), ObjectiveError> {
    let no_lambda = || ObjectiveError::InvalidParams("λ must be positive".into());
    Ok(match regime {
        Regime::TinyLr | Regime::LargeLr => {
            if lambda <= 0.0 {
                return Err(no_lambda());
            }
            (QuadraticClient::new(2.0 * lambda, 0.0), p.sigma / lambda)
        }
        Regime::TwoSlope => (
            QuadraticClient::piecewise(lambda0, lambda, 0.0).with_noise(p.sigma),
            two_slope_stochastic_init(p.sigma, lambda1, p.m * p.k, p.r),
        ),
        Regime::MidLr => (QuadraticClient::new(lambda, 0.0).with_noise(p.sigma), 0.0),
        Regime::HighLr => {
            return Err(ObjectiveError::UnknownRegime {
                kind: "stochastic",
                regime: regime.to_string(),
            })
        }
    })
}

fn heterogeneity_row(
    regime: Regime,
    lambda: f64,
    lambda0: f64,
    lambda1: f64,
    p: &HardParams,
) -> Result<(Vec<QuadraticClient>, f64), ObjectiveError> {
    let split = |a_neg: f64, a_pos: f64| -> Result<Vec<QuadraticClient>, ObjectiveError> {
        if !p.m.is_multiple_of(2) {
            return Err(ObjectiveError::OddClients(p.m));
        }
        Ok((0..p.m)
            .map(|m| {
                let b = if m < p.m / 2 { p.zeta } else { -p.zeta };
                QuadraticClient::piecewise(a_neg, a_pos, b)
            })
            .collect())
    };
    Ok(match regime {
        Regime::TinyLr | Regime::LargeLr => {
            if lambda <= 0.0 {
                return Err(ObjectiveError::InvalidParams("λ must be positive".into()));
            }
            (
                vec![QuadraticClient::new(2.0 * lambda, 0.0); p.m],
                p.zeta / lambda,
            )
        }
        Regime::TwoSlope => (
            split(lambda0, lambda)?,
            two_slope_heterogeneity_init(p.zeta, lambda1, p.m, p.r),
        ),
        Regime::MidLr | Regime::HighLr => (split(lambda, lambda)?, 0.0),
    })
}

fn composite(p: &HardParams) -> Result<MultiDimInstance, ObjectiveError> {
    if p.m < 4 {
        return Err(ObjectiveError::InvalidParams(format!(
            "the composite instance needs M ≥ 4, got {}",
            p.m
        )));
    }
    if p.mu <= 0.0 {
        return Err(ObjectiveError::InvalidParams("μ must be positive".into()));
    }
    let mu = p.mu;
    let big = 1010.0 * mu;
    let mut per_dim = Vec::with_capacity(9);
    let mut init = Vec::with_capacity(9);

    for (regime, lambda) in [
        (Regime::TinyLr, mu),
        (Regime::TwoSlope, mu),
        (Regime::MidLr, big),
        (Regime::LargeLr, big),
    ] {
        let (c, _) = stochastic_row(regime, lambda, big, mu, p)?;
        per_dim.push(vec![c; p.m]);
    }
    init.extend([
        p.sigma / mu,
        two_slope_stochastic_init(p.sigma, mu, p.m * p.k, p.r),
        0.0,
        p.sigma / mu,
    ]);

    for (regime, lambda) in [
        (Regime::TinyLr, mu),
        (Regime::TwoSlope, mu),
        (Regime::MidLr, big),
        (Regime::HighLr, big),
        (Regime::LargeLr, big),
    ] {
        let (cs, _) = heterogeneity_row(regime, lambda, big, mu, p)?;
        per_dim.push(cs);
    }
    init.extend([
        p.zeta / mu,
        two_slope_heterogeneity_init(p.zeta, mu, p.m, p.r),
        0.0,
        0.0,
        p.zeta / mu,
    ]);

    MultiDimInstance::new(per_dim, init)
}
