use super::HarnessError;
use crate::objectives::{global_gradient, global_value, ClientObjective, QuadraticClient};

pub const LOGISTIC_GRAD_TOL: f64 = 1e-10;
pub const LOGISTIC_MAX_ITERS: usize = 1_000_000;

/// Minimum of the global objective.
#[derive(Debug, Clone, PartialEq)]
pub struct FStar {
    pub value: f64,
    /// Minimiser, exact or as reached by the solver.
    pub point: Vec<f64>,
    /// `false` when `value` comes from an iterative solver.
    pub exact: bool,
}

impl FStar {
    /// The minimiser when it is known exactly.
    pub fn x_star(&self) -> Option<&[f64]> {
        self.exact.then_some(self.point.as_slice())
    }

    /// Slack allowed below `value` when checking `F(x) ≥ F*`.
    pub fn gap_tolerance(&self) -> f64 {
        if self.exact {
            1e-10
        } else {
            1e-8
        }
    }
}

/// Global minimum of `(1/M)·Σ F_m` over the given clients.
///
/// Quadratic and separable clients are solved per coordinate in closed form.
/// Anything else (logistic) is minimised by full-batch gradient descent with
/// Barzilai–Borwein initial steps and Armijo backtracking until
/// `‖∇F‖ ≤ 1e−10`.
pub fn fstar_oracle(clients: &[ClientObjective]) -> Result<FStar, HarnessError> {
    if clients.is_empty() {
        return Err(HarnessError::Invalid("no clients".into()));
    }
    let coords: Option<Vec<&[QuadraticClient]>> =
        clients.iter().map(|c| c.quadratic_coords()).collect();
    match coords {
        Some(coords) => quadratic_optimum(clients, &coords),
        None => logistic_optimum(clients),
    }
}

fn quadratic_optimum(
    clients: &[ClientObjective],
    coords: &[&[QuadraticClient]],
) -> Result<FStar, HarnessError> {
    let dims = coords[0].len();
    let m = coords.len() as f64;
    let mut x = Vec::with_capacity(dims);
    for d in 0..dims {
        let (mut a_neg, mut a_pos, mut b) = (0.0, 0.0, 0.0);
        for c in coords {
            a_neg += c[d].curv_neg / m;
            a_pos += c[d].curv_pos / m;
            b += c[d].linear / m;
        }
        // F' = a(x)·x + b is nondecreasing; its root sits on the side opposite to b.
        let root = if b == 0.0 {
            0.0
        } else {
            let a = if b < 0.0 { a_pos } else { a_neg };
            if a <= 0.0 {
                return Err(HarnessError::Invalid(format!(
                    "global objective is unbounded below in coordinate {d}"
                )));
            }
            -b / a
        };
        x.push(root);
    }
    let value = global_value(clients, &x)?;
    Ok(FStar {
        value,
        point: x,
        exact: true,
    })
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|g| g * g).sum()
}

fn logistic_optimum(clients: &[ClientObjective]) -> Result<FStar, HarnessError> {
    let dim = clients[0].dim();
    let mut x = vec![0.0; dim];
    let mut f = global_value(clients, &x)?;
    let mut g = global_gradient(clients, &x)?;
    let mut step = 1.0;
    for _ in 0..LOGISTIC_MAX_ITERS {
        let gn2 = norm_sq(&g);
        if gn2.sqrt() <= LOGISTIC_GRAD_TOL {
            return Ok(FStar {
                value: f,
                point: x,
                exact: false,
            });
        }
        let mut t = step;
        let (x_new, f_new, g_new) = loop {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            let f_cand = global_value(clients, &cand)?;
            let armijo = f_cand <= f - 1e-4 * t * gn2;
            // Near the optimum the decrease drops below the rounding of F;
            // accept any non-increasing step that reduces the gradient.
            let g_cand = global_gradient(clients, &cand)?;
            let flat = f_cand <= f + 4.0 * f64::EPSILON * f.abs() && norm_sq(&g_cand) < gn2;
            if armijo || flat {
                break (cand, f_cand, g_cand);
            }
            t *= 0.5;
            if t < 1e-30 {
                return Err(HarnessError::OracleStalled {
                    grad_norm: gn2.sqrt(),
                });
            }
        };
        // Barzilai–Borwein: t = ⟨s,s⟩ / ⟨s,y⟩
        let (mut ss, mut sy) = (0.0, 0.0);
        for i in 0..dim {
            let s = x_new[i] - x[i];
            let y = g_new[i] - g[i];
            ss += s * s;
            sy += s * y;
        }
        step = if sy > 0.0 { ss / sy } else { 2.0 * t };
        x = x_new;
        f = f_new;
        g = g_new;
    }
    Err(HarnessError::OracleStalled {
        grad_norm: norm_sq(&g).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synthetic;
    use crate::objectives::{build_quadratic_group, LogisticClient};
    use std::sync::Arc;

    #[test]
    fn quadratic_groups() {
        for id in [1, 2] {
            let f = fstar_oracle(&build_quadratic_group(id).unwrap()).unwrap();
            assert_eq!(f.x_star(), Some(&[0.0][..]));
            assert_eq!(f.value, 0.0);
            assert!(f.exact);
        }
        let single = vec![QuadraticClient::new(1.0, -1.0).into()];
        let f = fstar_oracle(&single).unwrap();
        assert_eq!(f.x_star(), Some(&[1.0][..]));
        assert_eq!(f.value, -0.5);
    }

    #[test]
    fn piecewise_picks_feasible_branch() {
        // mean: a⁻ = 2, a⁺ = 1, b = 1 → root on the negative side, x* = −½
        let clients = vec![QuadraticClient::piecewise(2.0, 1.0, 1.0).into()];
        let f = fstar_oracle(&clients).unwrap();
        assert_eq!(f.x_star(), Some(&[-0.5][..]));
        assert_eq!(f.value, -0.25);
    }

    #[test]
    fn unbounded_is_an_error() {
        let clients = vec![QuadraticClient::piecewise(0.0, 1.0, 1.0).into()];
        assert!(fstar_oracle(&clients).is_err());
    }

    #[test]
    fn logistic_reaches_tolerance() {
        let data = Arc::new(generate_synthetic(200, 5, 1));
        let clients: Vec<ClientObjective> = vec![
            LogisticClient::new(Arc::clone(&data), (0..100).collect(), 1e-3, 8).into(),
            LogisticClient::new(Arc::clone(&data), (100..200).collect(), 1e-3, 8).into(),
        ];
        let f = fstar_oracle(&clients).unwrap();
        assert!(!f.exact);
        assert!(f.x_star().is_none());
        let g = global_gradient(&clients, &f.point).unwrap();
        assert!(norm_sq(&g).sqrt() <= LOGISTIC_GRAD_TOL);
        assert_eq!(global_value(&clients, &f.point).unwrap(), f.value);
        for i in 0..5 {
            let mut y = f.point.clone();
            y[i] += 1e-3;
            assert!(global_value(&clients, &y).unwrap() > f.value);
        }
    }
}
