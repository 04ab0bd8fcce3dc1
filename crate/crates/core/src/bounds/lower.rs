use std::fmt;
use std::str::FromStr;

use super::{precondition, BoundError, BoundParams, BoundResult, ConstantsMode, TermKind};
use TermKind::*;

/// Which SFL lower bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerVariant {
    /// Last iterate, any constant learning rate.
    AnyLr,
    /// Weighted averages, small learning rates, strongly convex.
    SmallLrSc,
    /// Weighted averages, small learning rates, general convex.
    SmallLrGc,
}

impl FromStr for LowerVariant {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "any-lr" => Ok(LowerVariant::AnyLr),
            "small-lr-sc" => Ok(LowerVariant::SmallLrSc),
            "small-lr-gc" => Ok(LowerVariant::SmallLrGc),
            _ => Err(BoundError::Invalid(format!(
                "unknown lower-bound variant {s:?}"
            ))),
        }
    }
}

impl fmt::Display for LowerVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LowerVariant::AnyLr => "any-lr",
            LowerVariant::SmallLrSc => "small-lr-sc",
            LowerVariant::SmallLrGc => "small-lr-gc",
        })
    }
}

/// `Ω(·)` lower bounds for SFL with unit constants.
///
/// In the general-convex round requirement
/// `R ≥ 51³·max{σ/(L√(MK)D), L²MKD²/σ², ζ/(L√M·D), L²MD²/ζ²}` the entries of
/// a vanishing `σ` or `ζ` are skipped: that part of the construction is absent.
pub fn sfl_lower_bound(variant: LowerVariant, p: &BoundParams) -> Result<BoundResult, BoundError> {
    p.validate()?;
    let (m, k, r, l, d) = (p.mf(), p.kf(), p.rf(), p.l, p.d);
    let sigma2 = p.sigma * p.sigma;
    let zeta2 = p.zeta * p.zeta;
    let need_mu = || {
        if p.mu > 0.0 {
            Ok(p.mu)
        } else {
            Err(precondition("μ > 0", format!("μ = {}", p.mu)))
        }
    };
    match variant {
        LowerVariant::AnyLr => {
            if p.m < 4 {
                return Err(precondition("M ≥ 4", format!("M = {}", p.m)));
            }
            let mu = need_mu()?;
            Ok(BoundResult::new(
                "sfl-lower/any-lr",
                ConstantsMode::UnitConstant,
                vec![
                    (Stochasticity1, sigma2 / (mu * m * k * r)),
                    (Heterogeneity, zeta2 / (mu * m * r * r)),
                ],
            )
            .note("matches the upper bound only up to a factor of κ"))
        }
        LowerVariant::SmallLrSc => {
            let mu = need_mu()?;
            let kappa = l / mu;
            if kappa < 1010.0 {
                return Err(precondition("κ ≥ 1010", format!("κ = {kappa}")));
            }
            if r < kappa / 1010.0 {
                return Err(precondition(
                    "R ≥ κ/1010",
                    format!("R = {r}, κ/1010 = {}", kappa / 1010.0),
                ));
            }
            Ok(BoundResult::new(
                "sfl-lower/small-lr-sc",
                ConstantsMode::UnitConstant,
                vec![
                    (Stochasticity1, sigma2 / (mu * m * k * r)),
                    (Heterogeneity, zeta2 / (mu * m * r * r)),
                    (Stochasticity2, l * sigma2 / (mu * mu * m * k * r * r)),
                    (Heterogeneity, l * zeta2 / (mu * mu * m * r * r)),
                ],
            ))
        }
        LowerVariant::SmallLrGc => {
            if l <= 0.0 || d <= 0.0 {
                return Err(precondition("L > 0 and D > 0", format!("L = {l}, D = {d}")));
            }
            let mut req: f64 = 0.0;
            if p.sigma > 0.0 {
                req = req
                    .max(p.sigma / (l * (m * k).sqrt() * d))
                    .max(l * l * m * k * d * d / sigma2);
            }
            if p.zeta > 0.0 {
                req = req
                    .max(p.zeta / (l * m.sqrt() * d))
                    .max(l * l * m * d * d / zeta2);
            }
            let need = 51f64.powi(3) * req;
            if r < need {
                return Err(precondition(
                    "R ≥ 51³·max{…}",
                    format!("R = {r}, required {need}"),
                ));
            }
            let r23 = r.powf(2.0 / 3.0);
            Ok(BoundResult::new(
                "sfl-lower/small-lr-gc",
                ConstantsMode::UnitConstant,
                vec![
                    (Stochasticity1, p.sigma * d / (m * k * r).sqrt()),
                    (
                        Stochasticity2,
                        (l * sigma2 * d.powi(4)).cbrt() / ((m * k).cbrt() * r23),
                    ),
                    (
                        Heterogeneity,
                        (l * zeta2 * d.powi(4)).cbrt() / (m.cbrt() * r23),
                    ),
                ],
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn any_lr_without_noise() {
        let p = BoundParams {
            zeta: 2.0,
            m: 4,
            r: 5,
            mu: 0.5,
            ..Default::default()
        };
        let b = sfl_lower_bound(LowerVariant::AnyLr, &p).unwrap();
        assert_eq!(b.term(Stochasticity1), 0.0);
        assert!((b.total - 4.0 / (0.5 * 4.0 * 25.0)).abs() < 1e-15);
        let doubled = sfl_lower_bound(LowerVariant::AnyLr, &BoundParams { r: 10, ..p }).unwrap();
        assert!((b.total / doubled.total - 4.0).abs() < 1e-12);
        assert!(!b.notes.is_empty());
        assert!(sfl_lower_bound(LowerVariant::AnyLr, &BoundParams { m: 3, ..p }).is_err());
    }

    #[test]
    fn small_lr_sc_needs_large_kappa() {
        let p = BoundParams {
            l: 500.0,
            mu: 1.0,
            r: 10,
            m: 4,
            ..Default::default()
        };
        match sfl_lower_bound(LowerVariant::SmallLrSc, &p) {
            Err(BoundError::Precondition { constraint, .. }) => assert_eq!(constraint, "κ ≥ 1010"),
            other => panic!("{other:?}"),
        }
        let ok = BoundParams {
            l: 2020.0,
            r: 2,
            sigma: 1.0,
            zeta: 1.0,
            ..p
        };
        let b = sfl_lower_bound(LowerVariant::SmallLrSc, &ok).unwrap();
        assert!((b.term(Heterogeneity) - (1.0 / (4.0 * 4.0) + 2020.0 / (4.0 * 4.0))).abs() < 1e-9);
        assert!(sfl_lower_bound(
            LowerVariant::SmallLrSc,
            &BoundParams {
                r: 1,
                l: 3030.0,
                ..ok
            }
        )
        .is_err());
    }

    #[test]
    fn small_lr_gc_round_requirement() {
        let p = BoundParams {
            zeta: 1.0,
            l: 1.0,
            d: 1.0,
            m: 4,
            r: 1000,
            ..Default::default()
        };
        assert!(sfl_lower_bound(LowerVariant::SmallLrGc, &p).is_err());
        // L²MD²/ζ² = 4 dominates: R ≥ 4·51³
        let ok = sfl_lower_bound(
            LowerVariant::SmallLrGc,
            &BoundParams {
                r: 4 * 51usize.pow(3),
                ..p
            },
        )
        .unwrap();
        assert_eq!(ok.term(Stochasticity1), 0.0);
        assert!(ok.term(Heterogeneity) > 0.0);
    }
}
