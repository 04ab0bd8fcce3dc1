use super::{global_gradient, ClientObjective, ObjectiveError};

/// Smoothness and strong-convexity constants shared by all clients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessProfile {
    pub l: f64,
    pub mu: f64,
    /// `L/μ`, present only when `μ > 0`.
    pub kappa: Option<f64>,
}

impl SmoothnessProfile {
    pub fn new(l: f64, mu: f64) -> Self {
        let kappa = (mu > 0.0).then(|| l / mu);
        Self { l, mu, kappa }
    }

    /// Tightest constants valid for every client.
    ///
    /// Exact for quadratics (largest/smallest branch curvature). For logistic
    /// clients `L` is the trace bound `¼·mean‖a‖² + ω` and `μ = ω`.
    pub fn of(clients: &[ClientObjective]) -> Self {
        let (mut l, mut mu) = (0.0f64, f64::INFINITY);
        for c in clients {
            match c {
                ClientObjective::Logistic(lc) => {
                    l = l.max(lc.smoothness_upper());
                    mu = mu.min(lc.reg);
                }
                _ => {
                    for q in c.quadratic_coords().unwrap_or_default() {
                        l = l.max(q.max_curvature());
                        mu = mu.min(q.min_curvature());
                    }
                }
            }
        }
        if mu.is_infinite() {
            mu = 0.0;
        }
        Self::new(l, mu)
    }
}

/// Heterogeneity and noise measurements at the global minimiser.
///
/// Fields are `None` when the family has no closed form for them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeterogeneityProfile {
    pub sigma: Option<f64>,
    pub sigma_star: Option<f64>,
    pub zeta_star: f64,
    pub zeta: Option<f64>,
    pub beta: Option<f64>,
    pub zeta_hat: Option<f64>,
    /// Largest deviation of a client's Hessian from the global Hessian.
    pub delta: Option<f64>,
    /// Largest jump of the global Hessian across `x = 0`.
    pub hessian_lip: Option<f64>,
}

/// Measures the profile of `clients` at `x_star`, which must be a global minimiser.
pub fn heterogeneity_stats(
    clients: &[ClientObjective],
    x_star: &[f64],
) -> Result<HeterogeneityProfile, ObjectiveError> {
    let g = global_gradient(clients, x_star)?;
    let residual = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if residual.is_nan() || residual > 1e-9 {
        return Err(ObjectiveError::NotAMinimizer(residual));
    }
    let m = clients.len() as f64;
    let zeta_star_sq = clients
        .iter()
        .map(|c| {
            c.gradient(x_star)
                .map(|g| g.iter().map(|v| v * v).sum::<f64>())
        })
        .sum::<Result<f64, _>>()?
        / m;
    let mut profile = HeterogeneityProfile {
        zeta_star: zeta_star_sq.sqrt(),
        ..Default::default()
    };

    let coords: Option<Vec<_>> = clients
        .iter()
        .map(ClientObjective::quadratic_coords)
        .collect();
    if let Some(coords) = coords {
        quadratic_profile(&coords, &mut profile);
    } else if clients
        .iter()
        .all(|c| matches!(c, ClientObjective::Logistic(_)))
    {
        profile.sigma_star = Some(logistic_sigma_star(clients, x_star));
    }
    Ok(profile)
}

fn quadratic_profile(coords: &[&[crate::QuadraticClient]], profile: &mut HeterogeneityProfile) {
    let m = coords.len() as f64;
    let dims = coords[0].len();
    let (mut delta, mut jump) = (0.0f64, 0.0f64);
    for d in 0..dims {
        let mean_neg = coords.iter().map(|c| c[d].curv_neg).sum::<f64>() / m;
        let mean_pos = coords.iter().map(|c| c[d].curv_pos).sum::<f64>() / m;
        for c in coords {
            delta = delta
                .max((c[d].curv_neg - mean_neg).abs())
                .max((c[d].curv_pos - mean_pos).abs());
        }
        jump = jump.max((mean_neg - mean_pos).abs());
    }
    profile.delta = Some(delta);
    profile.hessian_lip = Some(jump);

    // Rademacher noise has E‖g − ∇F_m‖² = Σ_d σ_d² at every point.
    let sigma = coords
        .iter()
        .map(|c| {
            c.iter()
                .map(|q| q.noise_sigma * q.noise_sigma)
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    profile.sigma = Some(sigma);
    profile.sigma_star = Some(sigma);

    // With shared curvatures, ∇F_m − ∇F = b_m − b̄ is constant in x.
    if delta == 0.0 {
        let mut dev_sq = vec![0.0; coords.len()];
        for d in 0..dims {
            let mean_b = coords.iter().map(|c| c[d].linear).sum::<f64>() / m;
            for (acc, c) in dev_sq.iter_mut().zip(coords) {
                *acc += (c[d].linear - mean_b).powi(2);
            }
        }
        profile.zeta = Some((dev_sq.iter().sum::<f64>() / m).sqrt());
        profile.beta = Some(0.0);
        profile.zeta_hat = Some(dev_sq.iter().fold(0.0, |a: f64, &b| a.max(b)).sqrt());
    }
}

/// Largest client variance of the mini-batch gradient at `x*`.
fn logistic_sigma_star(clients: &[ClientObjective], x_star: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for c in clients {
        let ClientObjective::Logistic(lc) = c else {
            continue;
        };
        let mut full = vec![0.0; x_star.len()];
        lc.gradient_into(x_star, &mut full);
        let mut var = 0.0;
        for &i in lc.shard.iter() {
            let s = &lc.data.samples[i];
            let r = super::sigmoid(s.dot(x_star)) - f64::from(s.label);
            // per-sample gradient r·a + ωx differs from the mean by r·a − (full − ωx)
            let mut diff: Vec<f64> = full
                .iter()
                .zip(x_star)
                .map(|(f, &xi)| -(f - lc.reg * xi))
                .collect();
            for &(j, v) in &s.features {
                diff[j as usize - 1] += r * v;
            }
            var += diff.iter().map(|v| v * v).sum::<f64>();
        }
        let per_sample = var / lc.shard.len() as f64;
        let batch_var = if lc.replacement {
            per_sample / lc.batch as f64
        } else {
            per_sample
        };
        worst = worst.max(batch_var);
    }
    worst.sqrt()
}
