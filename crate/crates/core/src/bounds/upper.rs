use super::{
    precondition, BoundError, BoundParams, BoundResult, ConstantsMode, ConvexityCase,
    Heterogeneity, TermKind,
};
use crate::trainers::Method;
use TermKind::*;

/// Relative slack when checking `η̃ ≤ …` so that the boundary value itself passes.
const SLACK: f64 = 1e-12;

fn cbrt(x: f64) -> f64 {
    x.cbrt()
}

fn need_mu(p: &BoundParams) -> Result<(), BoundError> {
    if p.mu > 0.0 {
        Ok(())
    } else {
        Err(precondition("μ > 0", format!("μ = {}", p.mu)))
    }
}

/// The SFL theorem with its displayed constants, at the supplied `η̃`.
///
/// * strongly convex: `9/2·μD²e^{−μη̃R/2} + 12η̃σ²/(MK) + 18Lη̃²σ²/(MK) + 18Lη̃²ζ*²/M`
///   for `η̃ ≤ 1/(6L)` and `R ≥ 6κ`;
/// * convex: first term replaced by `3D²/(η̃R)`;
/// * non-convex: `10A/(η̃R) + 20Lη̃σ²/(MK) + 75L²η̃²σ²/(4MK) + 75L²η̃²ζ²/(4M)`
///   for `η̃ ≤ 1/(6L(1+β²/M))`.
pub fn sfl_upper_bound(case: ConvexityCase, p: &BoundParams) -> Result<BoundResult, BoundError> {
    p.validate()?;
    let eta = p
        .eff_lr
        .ok_or_else(|| BoundError::Invalid("η̃ is required".into()))?;
    let (m, k, r, l) = (p.mf(), p.kf(), p.rf(), p.l);
    let sigma2 = p.sigma * p.sigma;
    match case {
        ConvexityCase::StronglyConvex | ConvexityCase::Convex => {
            let cap = 1.0 / (6.0 * l);
            if eta > cap * (1.0 + SLACK) {
                return Err(precondition(
                    "η̃ ≤ 1/(6L)",
                    format!("η̃ = {eta}, 1/(6L) = {cap}"),
                ));
            }
            let optimization = if case == ConvexityCase::StronglyConvex {
                need_mu(p)?;
                let kappa = l / p.mu;
                if r < 6.0 * kappa * (1.0 - SLACK) {
                    return Err(precondition(
                        "R ≥ 6κ",
                        format!("R = {r}, 6κ = {}", 6.0 * kappa),
                    ));
                }
                4.5 * p.mu * p.d * p.d * (-p.mu * eta * r / 2.0).exp()
            } else {
                3.0 * p.d * p.d / (eta * r)
            };
            let id = if case == ConvexityCase::StronglyConvex {
                "sfl-theorem/strongly-convex"
            } else {
                "sfl-theorem/convex"
            };
            Ok(BoundResult::new(
                id,
                ConstantsMode::Explicit,
                vec![
                    (Optimization, optimization),
                    (Stochasticity1, 12.0 * eta * sigma2 / (m * k)),
                    (Stochasticity2, 18.0 * l * eta * eta * sigma2 / (m * k)),
                    (
                        Heterogeneity,
                        18.0 * l * eta * eta * p.zeta_star * p.zeta_star / m,
                    ),
                ],
            ))
        }
        ConvexityCase::NonConvex => {
            let cap = 1.0 / (6.0 * l * (1.0 + p.beta * p.beta / m));
            if eta > cap * (1.0 + SLACK) {
                return Err(precondition(
                    "η̃ ≤ 1/(6L(1+β²/M))",
                    format!("η̃ = {eta}, bound = {cap}"),
                ));
            }
            Ok(BoundResult::new(
                "sfl-theorem/non-convex",
                ConstantsMode::Explicit,
                vec![
                    (Optimization, 10.0 * p.a / (eta * r)),
                    (Stochasticity1, 20.0 * l * eta * sigma2 / (m * k)),
                    (
                        Stochasticity2,
                        75.0 * l * l * eta * eta * sigma2 / (4.0 * m * k),
                    ),
                    (
                        Heterogeneity,
                        75.0 * l * l * eta * eta * p.zeta * p.zeta / (4.0 * m),
                    ),
                ],
            ))
        }
    }
}

/// The tuned SFL rates with unit constants (the SFL rows of the comparison table).
///
/// Does not depend on `η̃`; see [`tuned_rate_sfl`] for the rate itself.
pub fn sfl_rate_row(case: ConvexityCase, p: &BoundParams) -> Result<BoundResult, BoundError> {
    p.validate()?;
    let (m, k, r, l, d, a) = (p.mf(), p.kf(), p.rf(), p.l, p.d, p.a);
    let sigma2 = p.sigma * p.sigma;
    let res = match case {
        ConvexityCase::StronglyConvex => {
            need_mu(p)?;
            let mu = p.mu;
            BoundResult::new(
                "sfl-tuned/strongly-convex",
                ConstantsMode::UnitConstant,
                vec![
                    (Stochasticity1, sigma2 / (mu * m * k * r)),
                    (Stochasticity2, l * sigma2 / (mu * mu * m * k * r * r)),
                    (
                        Heterogeneity,
                        l * p.zeta_star * p.zeta_star / (mu * mu * m * r * r),
                    ),
                    (Optimization, mu * d * d * (-mu * r / l).exp()),
                ],
            )
            .note("polylog factors suppressed")
        }
        ConvexityCase::Convex => BoundResult::new(
            "sfl-tuned/convex",
            ConstantsMode::UnitConstant,
            vec![
                (Stochasticity1, p.sigma * d / (m * k * r).sqrt()),
                (
                    Stochasticity2,
                    cbrt(l * sigma2 * d.powi(4)) / (cbrt(m * k) * r.powf(2.0 / 3.0)),
                ),
                (
                    Heterogeneity,
                    cbrt(l * p.zeta_star * p.zeta_star * d.powi(4)) / (cbrt(m) * r.powf(2.0 / 3.0)),
                ),
                (Optimization, l * d * d / r),
            ],
        ),
        ConvexityCase::NonConvex => BoundResult::new(
            "sfl-tuned/non-convex",
            ConstantsMode::UnitConstant,
            vec![
                (Stochasticity1, (l * sigma2 * a).sqrt() / (m * k * r).sqrt()),
                (
                    Stochasticity2,
                    cbrt(l * l * sigma2 * a * a) / (cbrt(m * k) * r.powf(2.0 / 3.0)),
                ),
                (
                    Heterogeneity,
                    cbrt(l * l * p.zeta * p.zeta * a * a) / (cbrt(m) * r.powf(2.0 / 3.0)),
                ),
                (Optimization, l * a * (1.0 + p.beta * p.beta / m) / r),
            ],
        ),
    };
    Ok(res)
}

/// Tuned effective learning rate (minimum of the candidate expressions, unit
/// constants) together with the tuned rate it achieves.
///
/// Candidates whose coefficient vanishes (e.g. `c₁ = 0` when `σ = 0`) are
/// dropped. In the convex case `c₂ = Lσ²/(MK) + Lζ*²/M`.
pub fn tuned_rate_sfl(
    case: ConvexityCase,
    p: &BoundParams,
) -> Result<(f64, BoundResult), BoundError> {
    p.validate()?;
    let (m, k, r, l) = (p.mf(), p.kf(), p.rf(), p.l);
    if l <= 0.0 {
        return Err(precondition("L > 0", format!("L = {l}")));
    }
    let sigma2 = p.sigma * p.sigma;
    let min_pos = |cands: &[f64]| {
        cands
            .iter()
            .copied()
            .filter(|c| c.is_finite() && *c > 0.0)
            .fold(f64::INFINITY, f64::min)
    };
    let eta = match case {
        ConvexityCase::StronglyConvex => {
            need_mu(p)?;
            min_pos(&[1.0 / l, 1.0 / (p.mu * r)])
        }
        ConvexityCase::Convex => {
            let c1 = sigma2 / (m * k);
            let c2 = l * sigma2 / (m * k) + l * p.zeta_star * p.zeta_star / m;
            min_pos(&[
                1.0 / l,
                p.d / (c1 * r).sqrt(),
                p.d.powf(2.0 / 3.0) / (cbrt(c2) * r.powf(2.0 / 3.0)),
            ])
        }
        ConvexityCase::NonConvex => {
            let c1 = l * sigma2 / (m * k);
            let c2 = l * l * sigma2 / (m * k) + l * l * p.zeta * p.zeta / m;
            min_pos(&[
                1.0 / (l * (1.0 + p.beta * p.beta / m)),
                p.a.sqrt() / (c1 * r).sqrt(),
                cbrt(p.a) / (cbrt(c2) * r.powf(2.0 / 3.0)),
            ])
        }
    };
    Ok((eta, sfl_rate_row(case, p)?))
}

/// PFL rows of the comparison table, unit constants.
///
/// Supported pairs: strongly convex with `Optimum` or `Max`; convex with
/// `Optimum`, `Average` or `Max`; non-convex with `Average` (or `Optimum`,
/// which names the same row). The non-convex optimisation term is
/// `LA(1+β²)/R`, matching the server-step theorem at `γ = 1`.
pub fn pfl_upper_bound(
    case: ConvexityCase,
    assumption: Heterogeneity,
    p: &BoundParams,
) -> Result<BoundResult, BoundError> {
    p.validate()?;
    let (m, k, r, l, d, a) = (p.mf(), p.kf(), p.rf(), p.l, p.d, p.a);
    let sigma2 = p.sigma * p.sigma;
    let r23 = r.powf(2.0 / 3.0);
    let res = match (case, assumption) {
        (ConvexityCase::StronglyConvex, Heterogeneity::Optimum | Heterogeneity::Max) => {
            need_mu(p)?;
            let mu = p.mu;
            let (z, rounds, id) = if assumption == Heterogeneity::Optimum {
                (p.zeta_star, r, "pfl/strongly-convex/opt")
            } else {
                (p.zeta_hat, k * r, "pfl/strongly-convex/max")
            };
            BoundResult::new(
                id,
                ConstantsMode::UnitConstant,
                vec![
                    (Stochasticity1, sigma2 / (mu * m * k * r)),
                    (Stochasticity2, l * sigma2 / (mu * mu * k * r * r)),
                    (Heterogeneity, l * z * z / (mu * mu * r * r)),
                    (Optimization, mu * d * d * (-mu * rounds / l).exp()),
                ],
            )
            .note("polylog factors suppressed")
        }
        (ConvexityCase::Convex, _) => {
            let (z, opt_rounds, id) = match assumption {
                Heterogeneity::Optimum => (p.zeta_star, r, "pfl/convex/opt"),
                Heterogeneity::Average => (p.zeta, r, "pfl/convex/avg"),
                Heterogeneity::Max => (p.zeta_hat, k * r, "pfl/convex/max"),
            };
            BoundResult::new(
                id,
                ConstantsMode::UnitConstant,
                vec![
                    (Stochasticity1, p.sigma * d / (m * k * r).sqrt()),
                    (
                        Stochasticity2,
                        cbrt(l * sigma2 * d.powi(4)) / (cbrt(k) * r23),
                    ),
                    (Heterogeneity, cbrt(l * z * z * d.powi(4)) / r23),
                    (Optimization, l * d * d / opt_rounds),
                ],
            )
        }
        (ConvexityCase::NonConvex, Heterogeneity::Average | Heterogeneity::Optimum) => {
            BoundResult::new(
                "pfl/non-convex/avg",
                ConstantsMode::UnitConstant,
                vec![
                    (Stochasticity1, (l * sigma2 * a).sqrt() / (m * k * r).sqrt()),
                    (
                        Stochasticity2,
                        cbrt(l * l * sigma2 * a * a) / (cbrt(k) * r23),
                    ),
                    (Heterogeneity, cbrt(l * l * p.zeta * p.zeta * a * a) / r23),
                    (Optimization, l * a * (1.0 + p.beta * p.beta) / r),
                ],
            )
        }
        _ => {
            return Err(BoundError::Unsupported(format!(
                "no PFL row for {case} under {assumption}"
            )))
        }
    };
    Ok(res)
}

/// Strongly convex rates with `S` of `M` clients sampled per round.
pub fn partial_participation_bound(
    method: Method,
    p: &BoundParams,
) -> Result<BoundResult, BoundError> {
    p.validate()?;
    if p.s > p.m {
        return Err(precondition(
            "1 ≤ S ≤ M",
            format!("S = {}, M = {}", p.s, p.m),
        ));
    }
    need_mu(p)?;
    let (m, s, k, r, l, mu) = (p.mf(), p.sf(), p.kf(), p.rf(), p.l, p.mu);
    let sigma2 = p.sigma * p.sigma;
    let z2 = p.zeta_star * p.zeta_star;
    let sampling = if p.s == p.m {
        0.0
    } else {
        (m - s) / (s * (m - 1.0))
    };
    let second_order = match method {
        Method::Pfl => 1.0,
        Method::Sfl => s,
    };
    let id = match method {
        Method::Pfl => "pfl/partial-participation",
        Method::Sfl => "sfl/partial-participation",
    };
    Ok(BoundResult::new(
        id,
        ConstantsMode::UnitConstant,
        vec![
            (Stochasticity1, sigma2 / (mu * s * k * r)),
            (Participation, z2 / (mu * r) * sampling),
            (
                Stochasticity2,
                l * sigma2 / (mu * mu * second_order * k * r * r),
            ),
            (Heterogeneity, l * z2 / (mu * mu * second_order * r * r)),
            (Optimization, mu * p.d * p.d * (-mu * r / l).exp()),
        ],
    )
    .note("polylog factors suppressed")
    .note("hidden constants relative to full participation are unstated"))
}

/// Non-convex tuned rates with a server learning rate `γ ≥ 1`.
pub fn two_lr_bound(method: Method, p: &BoundParams) -> Result<BoundResult, BoundError> {
    p.validate()?;
    if p.gamma < 1.0 {
        return Err(precondition("γ ≥ 1", format!("γ = {}", p.gamma)));
    }
    let (m, k, r, l, a) = (p.mf(), p.kf(), p.rf(), p.l, p.a);
    let sigma2 = p.sigma * p.sigma;
    let g23 = p.gamma.powf(2.0 / 3.0);
    let r23 = r.powf(2.0 / 3.0);
    let (opt, drift_m, id) = match method {
        Method::Sfl => (
            l * a * (1.0 + p.beta * p.beta / m) / r,
            m,
            "sfl/two-lr/non-convex",
        ),
        Method::Pfl => (
            l * a * (1.0 + p.beta * p.beta) / r,
            1.0,
            "pfl/two-lr/non-convex",
        ),
    };
    Ok(BoundResult::new(
        id,
        ConstantsMode::UnitConstant,
        vec![
            (Optimization, opt),
            (Stochasticity1, (l * sigma2 * a).sqrt() / (m * k * r).sqrt()),
            (
                Stochasticity2,
                cbrt(l * l * sigma2 * a * a) / (g23 * cbrt(drift_m) * cbrt(k) * r23),
            ),
            (
                Heterogeneity,
                cbrt(l * l * p.zeta * p.zeta * a * a) / (g23 * cbrt(drift_m) * r23),
            ),
        ],
    ))
}
