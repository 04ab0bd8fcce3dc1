use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::metrics::{mean_min_max, CellSummary, MetricRow};
use super::oracle::{fstar_oracle, FStar};
use super::problem::{build_problem, BuiltProblem};
use super::HarnessError;
use crate::trainers::{run, Method, RunRecord};

/// Schedule fingerprint of one run, for paired-randomness checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleHash {
    pub method: Method,
    pub grid_index: usize,
    pub seed: u64,
    pub hash: u64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub task: String,
    pub fstar: FStar,
    /// Ordered by method (config order), grid index, seed (config order), round.
    pub rows: Vec<MetricRow>,
    /// One per (method, grid lr), in the same order.
    pub cells: Vec<CellSummary>,
    pub schedule_hashes: Vec<ScheduleHash>,
    pub is_logistic: bool,
}

impl ExperimentResult {
    pub fn cell(&self, method: Method, grid_lr: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.grid_lr == grid_lr)
    }

    /// Per-round across-seed mean of the gap, truncated to the shortest run.
    pub fn mean_gap_curve(&self, method: Method, grid_lr: f64) -> Vec<f64> {
        let Some(cell) = self.cell(method, grid_lr) else {
            return Vec::new();
        };
        let mut per_seed: Vec<Vec<f64>> = Vec::new();
        let mut last_seed = None;
        for r in self
            .rows
            .iter()
            .filter(|r| r.method == method && r.lr == cell.lr)
        {
            if last_seed != Some(r.seed) || r.round == 0 {
                per_seed.push(Vec::new());
                last_seed = Some(r.seed);
            }
            per_seed.last_mut().expect("pushed above").push(r.gap);
        }
        let len = per_seed.iter().map(Vec::len).min().unwrap_or(0);
        (0..len)
            .map(|i| per_seed.iter().map(|s| s[i]).sum::<f64>() / per_seed.len() as f64)
            .collect()
    }
}

struct Cell {
    method: Method,
    grid_index: usize,
    grid_lr: f64,
    lr: f64,
    seed: u64,
}

fn rows_of(cell: &Cell, rec: &RunRecord, task: &str, fstar: &FStar) -> Vec<MetricRow> {
    let distances = fstar.x_star().map(|x| rec.distances(x));
    let mins = rec.min_grad_norms_sq();
    (0..rec.values.len())
        .map(|r| MetricRow {
            method: cell.method,
            task: task.to_string(),
            seed: cell.seed,
            round: r,
            lr: cell.lr,
            loss: rec.values[r],
            gap: rec.values[r] - fstar.value,
            grad_norm_sq: rec.grad_norms_sq[r],
            min_grad_norm_sq: mins[r],
            distance: distances.as_ref().map(|d| d[r]),
            diverged: rec.diverged(),
            gap_tol: fstar.gap_tolerance(),
        })
        .collect()
}

/// Runs every (method × lr × seed) cell. Cells execute in parallel; the
/// output order depends only on the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    let problem = build_problem(&cfg.problem, &cfg.training)?;
    let fstar = fstar_oracle(&problem.clients)?;
    run_built(cfg, &problem, fstar)
}

pub(crate) fn run_built(
    cfg: &ExperimentConfig,
    problem: &BuiltProblem,
    fstar: FStar,
) -> Result<ExperimentResult, HarnessError> {
    let x0 = problem.resolve_init(&cfg.init)?;
    let mut cells = Vec::new();
    for &method in &cfg.methods {
        for (grid_index, &grid_lr) in cfg.lr_grid.iter().enumerate() {
            let lr = if method == Method::Sfl {
                grid_lr * cfg.sfl_lr_scale
            } else {
                grid_lr
            };
            for &seed in &cfg.seeds {
                cells.push(Cell {
                    method,
                    grid_index,
                    grid_lr,
                    lr,
                    seed,
                });
            }
        }
    }

    let records: Vec<RunRecord> = cells
        .par_iter()
        .map(|c| {
            let tc = cfg.training.clone().with_lr(c.lr).with_seed(c.seed);
            run(c.method, &tc, &problem.clients, &x0)
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    let mut hashes = Vec::with_capacity(cells.len());
    for (c, rec) in cells.iter().zip(&records) {
        rows.extend(rows_of(c, rec, &problem.task, &fstar));
        hashes.push(ScheduleHash {
            method: c.method,
            grid_index: c.grid_index,
            seed: c.seed,
            hash: rec.schedule_hash(),
        });
    }

    let summaries = cells
        .chunks(cfg.seeds.len())
        .zip(records.chunks(cfg.seeds.len()))
        .map(|(cs, rs)| {
            let gaps: Vec<f64> = rs.iter().map(|r| r.final_value() - fstar.value).collect();
            let losses: Vec<f64> = rs.iter().map(RunRecord::final_value).collect();
            let grads: Vec<f64> = rs
                .iter()
                .map(|r| *r.grad_norms_sq.last().expect("nonempty"))
                .collect();
            let (final_gap_mean, final_gap_min, final_gap_max) = mean_min_max(&gaps);
            CellSummary {
                method: cs[0].method,
                grid_lr: cs[0].grid_lr,
                lr: cs[0].lr,
                seeds: rs.len(),
                diverged_seeds: rs.iter().filter(|r| r.diverged()).count(),
                final_gap_mean,
                final_gap_min,
                final_gap_max,
                final_loss_mean: mean_min_max(&losses).0,
                final_grad_norm_sq_mean: mean_min_max(&grads).0,
            }
        })
        .collect();

    Ok(ExperimentResult {
        task: problem.task.clone(),
        fstar,
        rows,
        cells: summaries,
        schedule_hashes: hashes,
        is_logistic: problem.is_logistic,
    })
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    /// Selected client learning rate per method, in config order.
    pub best: Vec<(Method, f64)>,
    pub result: ExperimentResult,
}

impl GridOutcome {
    pub fn best_lr(&self, method: Method) -> Option<f64> {
        self.best
            .iter()
            .find(|(m, _)| *m == method)
            .map(|(_, l)| *l)
    }
}

/// Picks, per method, the lr with the smallest seed-mean final gap (final
/// training loss for logistic problems). Cells where any seed diverged are
/// excluded; ties go to the smaller lr. SFL is searched on the grid itself,
/// without `sfl_lr_scale`.
pub fn grid_search(cfg: &ExperimentConfig) -> Result<GridOutcome, HarnessError> {
    let mut cfg = cfg.clone();
    cfg.sfl_lr_scale = 1.0;
    let result = run_experiment(&cfg)?;
    let best = cfg
        .methods
        .iter()
        .map(|&method| {
            let score = |c: &CellSummary| {
                if result.is_logistic {
                    c.final_loss_mean
                } else {
                    c.final_gap_mean
                }
            };
            result
                .cells
                .iter()
                .filter(|c| c.method == method && c.diverged_seeds == 0 && score(c).is_finite())
                .min_by(|a, b| score(a).total_cmp(&score(b)).then(a.lr.total_cmp(&b.lr)))
                .map(|c| (method, c.lr))
                .ok_or(HarnessError::AllDiverged { method })
        })
        .collect::<Result<_, _>>()?;
    Ok(GridOutcome { best, result })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::metrics::csv_string;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn row_count_contract() {
        let res = run_experiment(&cfg("problem = group 1\nrounds = 10\nlr_grid = 0.01\n")).unwrap();
        assert_eq!(res.rows.len(), 22);
        assert_eq!(res.rows[0].method, Method::Sfl);
        assert_eq!(res.rows[0].lr, 0.005);
        assert_eq!(res.rows[11].method, Method::Pfl);
        assert_eq!(res.rows[21].round, 10);
        assert_eq!(res.cells.len(), 2);
    }

    #[test]
    fn deterministic_csv() {
        let c = cfg("problem = group 4\nrounds = 20\nlocal_steps = 3\nlr_grid = 0.05, 0.1\nseeds = 0..4\ninit = 1\n");
        let a = csv_string(&run_experiment(&c).unwrap().rows);
        let b = csv_string(&run_experiment(&c).unwrap().rows);
        assert_eq!(a, b);
    }

    #[test]
    fn single_lr_grid_is_selected() {
        let out = grid_search(&cfg("problem = group 2\nrounds = 5\nlr_grid = 0.03\n")).unwrap();
        assert_eq!(out.best, vec![(Method::Sfl, 0.03), (Method::Pfl, 0.03)]);
    }

    #[test]
    fn divergent_lr_is_never_selected() {
        // η = 3 on curvature up to 2 diverges; its gap would otherwise be compared
        let out = grid_search(&cfg(
            "problem = group 3\nrounds = 200\nlocal_steps = 10\nlr_grid = 0.001, 3\ninit = 1\n",
        ))
        .unwrap();
        assert_eq!(out.best_lr(Method::Sfl), Some(0.001));
        assert_eq!(out.best_lr(Method::Pfl), Some(0.001));
        assert!(out.result.cell(Method::Sfl, 3.0).unwrap().diverged_seeds > 0);
        let all_bad = grid_search(&cfg(
            "problem = group 3\nrounds = 200\nlocal_steps = 10\nlr_grid = 3\n",
        ));
        assert!(matches!(all_bad, Err(HarnessError::AllDiverged { .. })));
    }

    #[test]
    fn mean_curve_has_every_round() {
        let res = run_experiment(&cfg(
            "problem = group 5\nrounds = 7\nseeds = 0..3\nlr_grid = 0.1\n",
        ))
        .unwrap();
        let curve = res.mean_gap_curve(Method::Sfl, 0.1);
        assert_eq!(curve.len(), 8);
        assert!(curve.iter().all(|g| *g >= -1e-10));
    }
}
