use rand_chacha::ChaCha8Rng;

use super::local::{diverged, local_steps_in_place};
use super::schedule::{check_schedule, sample_round_schedule};
use super::{Divergence, Method, RunRecord, TrainError, TrainingConfig};
use crate::objectives::{global_gradient, global_value, ClientObjective};
use crate::rng::{noise_stream, schedule_stream};

/// Algorithm 1: clients train one after another, each starting from the
/// previous client's output.
pub fn run_sfl(
    cfg: &TrainingConfig,
    clients: &[ClientObjective],
    x0: &[f64],
) -> Result<RunRecord, TrainError> {
    run(Method::Sfl, cfg, clients, x0)
}

/// Algorithm 2: clients train from the round's model and the server averages.
pub fn run_pfl(
    cfg: &TrainingConfig,
    clients: &[ClientObjective],
    x0: &[f64],
) -> Result<RunRecord, TrainError> {
    run(Method::Pfl, cfg, clients, x0)
}

/// Replays explicit per-round schedules instead of sampling them.
pub fn run_sfl_with_schedules(
    cfg: &TrainingConfig,
    clients: &[ClientObjective],
    x0: &[f64],
    schedules: &[Vec<usize>],
) -> Result<RunRecord, TrainError> {
    run_with_schedules(Method::Sfl, cfg, clients, x0, schedules)
}

pub fn run_pfl_with_schedules(
    cfg: &TrainingConfig,
    clients: &[ClientObjective],
    x0: &[f64],
    schedules: &[Vec<usize>],
) -> Result<RunRecord, TrainError> {
    run_with_schedules(Method::Pfl, cfg, clients, x0, schedules)
}

pub fn run(
    method: Method,
    cfg: &TrainingConfig,
    clients: &[ClientObjective],
    x0: &[f64],
) -> Result<RunRecord, TrainError> {
    let mut rng = schedule_stream(cfg.seed);
    drive(method, cfg, clients, x0, |_| {
        sample_round_schedule(cfg.clients, cfg.participants, &mut rng)
    })
}

pub fn run_with_schedules(
    method: Method,
    cfg: &TrainingConfig,
    clients: &[ClientObjective],
    x0: &[f64],
    schedules: &[Vec<usize>],
) -> Result<RunRecord, TrainError> {
    if schedules.len() < cfg.rounds {
        return Err(TrainError::BadSchedule {
            round: schedules.len(),
            reason: format!(
                "only {} schedules for {} rounds",
                schedules.len(),
                cfg.rounds
            ),
        });
    }
    drive(method, cfg, clients, x0, |r| {
        check_schedule(&schedules[r], cfg.clients, cfg.participants, r)?;
        Ok(schedules[r].clone())
    })
}

fn drive(
    method: Method,
    cfg: &TrainingConfig,
    clients: &[ClientObjective],
    x0: &[f64],
    mut next_schedule: impl FnMut(usize) -> Result<Vec<usize>, TrainError>,
) -> Result<RunRecord, TrainError> {
    cfg.validate()?;
    if clients.len() != cfg.clients {
        return Err(TrainError::ClientCount {
            expected: cfg.clients,
            got: clients.len(),
        });
    }
    for c in clients {
        c.check_dim(x0)?;
    }
    let mut noise: Vec<ChaCha8Rng> = (0..cfg.clients)
        .map(|m| noise_stream(cfg.seed, m))
        .collect();

    let mut record = RunRecord {
        method,
        iterates: Vec::with_capacity(cfg.rounds + 1),
        values: Vec::with_capacity(cfg.rounds + 1),
        grad_norms_sq: Vec::with_capacity(cfg.rounds + 1),
        schedules: Vec::with_capacity(cfg.rounds),
        divergence: None,
        outside_theory: cfg.outside_theory(),
    };
    push_metrics(&mut record, clients, x0.to_vec())?;

    let d = x0.len();
    let mut grad = vec![0.0; d];
    let mut work = vec![0.0; d];
    let mut acc = vec![0.0; d];
    for round in 0..cfg.rounds {
        let schedule = next_schedule(round)?;
        let x = record.last().to_vec();
        let outcome = match method {
            Method::Sfl => {
                work.copy_from_slice(&x);
                schedule.iter().try_for_each(|&m| {
                    local_steps_in_place(
                        &clients[m],
                        &mut work,
                        cfg.local_steps,
                        cfg.client_lr,
                        cfg.clip,
                        &mut noise[m],
                        &mut grad,
                    )
                    .map_err(|step| (m, step))
                })
            }
            Method::Pfl => schedule.iter().enumerate().try_for_each(|(i, &m)| {
                work.copy_from_slice(&x);
                local_steps_in_place(
                    &clients[m],
                    &mut work,
                    cfg.local_steps,
                    cfg.client_lr,
                    cfg.clip,
                    &mut noise[m],
                    &mut grad,
                )
                .map_err(|step| (m, step))?;
                if i == 0 {
                    acc.copy_from_slice(&work);
                } else {
                    acc.iter_mut().zip(&work).for_each(|(a, w)| *a += w);
                }
                Ok(())
            }),
        };
        record.schedules.push(schedule);
        if let Err((client, step)) = outcome {
            record.divergence = Some(Divergence {
                round,
                client,
                step,
            });
            break;
        }
        if method == Method::Pfl {
            let inv = cfg.participants as f64;
            work.iter_mut().zip(&acc).for_each(|(w, a)| *w = a / inv);
        }
        let next = server_step(&x, &work, cfg.server_lr);
        if diverged(&next) {
            record.divergence = Some(Divergence {
                round,
                client: usize::MAX,
                step: cfg.local_steps,
            });
            break;
        }
        push_metrics(&mut record, clients, next)?;
    }
    Ok(record)
}

/// `x − γ(x − y)`, returning `y` itself for `γ = 1`.
fn server_step(x: &[f64], y: &[f64], gamma: f64) -> Vec<f64> {
    if gamma == 1.0 {
        y.to_vec()
    } else {
        x.iter()
            .zip(y)
            .map(|(xi, yi)| xi - gamma * (xi - yi))
            .collect()
    }
}

fn push_metrics(
    record: &mut RunRecord,
    clients: &[ClientObjective],
    x: Vec<f64>,
) -> Result<(), TrainError> {
    let value = global_value(clients, &x)?;
    let g = global_gradient(clients, &x)?;
    record.values.push(value);
    record.grad_norms_sq.push(g.iter().map(|v| v * v).sum());
    record.iterates.push(x);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{build_quadratic_group, QuadraticClient};

    #[test]
    fn group_one_two_hand_steps() {
        let g = build_quadratic_group(1).unwrap();
        let cfg = TrainingConfig::new(1, 2, 1, 0.1);
        let r = run_sfl_with_schedules(&cfg, &g, &[0.0], &[vec![0, 1]]).unwrap();
        // client 1: 0 − 0.1·(0 + 1) = −0.1; client 2: −0.1 − 0.1·(−0.1 − 1) = 0.01
        assert!((r.last()[0] - 0.01).abs() < 1e-16);
        let half = run_sfl_with_schedules(
            &TrainingConfig {
                clients: 1,
                participants: 1,
                ..cfg.clone()
            },
            &g[..1],
            &[0.0],
            &[vec![0]],
        )
        .unwrap();
        assert!((half.last()[0] + 0.1).abs() < 1e-16);
    }

    #[test]
    fn homogeneous_closed_form() {
        // F = x² (a = 2): x⁽ᴿ⁾ = (1 − 2λη)^{MKR} x⁽⁰⁾ = 0.8² = 0.64
        let c: Vec<ClientObjective> = vec![QuadraticClient::new(2.0, 0.0).into(); 2];
        let r = run_sfl(&TrainingConfig::new(1, 2, 1, 0.1), &c, &[1.0]).unwrap();
        assert!((r.last()[0] - 0.64).abs() < 1e-15);
        assert_eq!(r.iterates.len(), 2);
    }

    #[test]
    fn pfl_group_one_stays_at_optimum() {
        let g = build_quadratic_group(1).unwrap();
        for k in [1, 3, 10] {
            let r = run_pfl(&TrainingConfig::new(20, 2, k, 0.1).with_seed(3), &g, &[0.0]).unwrap();
            assert!(r.iterates.iter().all(|x| x[0] == 0.0));
        }
    }

    #[test]
    fn server_lr_one_matches_default() {
        let g = build_quadratic_group(5).unwrap();
        let cfg = TrainingConfig::new(5, 2, 3, 0.05).with_seed(2);
        let a = run_sfl(&cfg, &g, &[1.0]).unwrap();
        let b = run_sfl(&cfg.clone().with_server_lr(1.0), &g, &[1.0]).unwrap();
        assert_eq!(a, b);
        let c = run_sfl(&cfg.with_server_lr(0.5), &g, &[1.0]).unwrap();
        assert_ne!(a.iterates, c.iterates);
    }

    #[test]
    fn divergence_truncates() {
        let g = build_quadratic_group(3).unwrap();
        let r = run_pfl(&TrainingConfig::new(500, 2, 10, 1.5), &g, &[1.0]).unwrap();
        let d = r.divergence.expect("lr 1.5 on curvature 2 must diverge");
        assert_eq!(r.iterates.len(), d.round + 1);
        assert_eq!(d.client, 0);
        assert!(r.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn client_count_is_checked() {
        let g = build_quadratic_group(1).unwrap();
        let e = run_sfl(&TrainingConfig::new(1, 3, 1, 0.1), &g, &[0.0]).unwrap_err();
        assert_eq!(
            e,
            TrainError::ClientCount {
                expected: 3,
                got: 2
            }
        );
        assert!(run_sfl(&TrainingConfig::new(1, 2, 1, 0.1), &g, &[0.0, 1.0]).is_err());
    }
}
