use std::fmt::Write as _;
use std::path::Path;

use super::config::{default_lr_grid, DataSource, ExperimentConfig, Init, Problem};
use super::experiment::{grid_search, run_built, ExperimentResult};
use super::metrics::{render_summary, write_csv};
use super::oracle::fstar_oracle;
use super::plot::{render_svg, Panel, Series};
use super::problem::build_problem;
use super::HarnessError;
use crate::trainers::{Method, TrainingConfig};

pub const SFL_COLOR: &str = "#d62728";
pub const PFL_COLOR: &str = "#1f77b4";

/// The two-client quadratic comparison.
///
/// PFL's lr is grid-searched per group and SFL runs at `sfl_lr_scale` times
/// that lr, both from `x⁽⁰⁾ = init`.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure2Options {
    pub groups: Vec<u32>,
    pub rounds: usize,
    pub local_steps: usize,
    pub seeds: Vec<u64>,
    pub lr_grid: Vec<f64>,
    pub sfl_lr_scale: f64,
    pub init: f64,
}

impl Default for Figure2Options {
    fn default() -> Self {
        Self {
            groups: (1..=10).collect(),
            rounds: 100,
            local_steps: 10,
            seeds: (0..10).collect(),
            lr_grid: default_lr_grid(),
            sfl_lr_scale: 0.5,
            init: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroupOutcome {
    pub group: u32,
    pub pfl_lr: f64,
    pub sfl_lr: f64,
    pub sfl_final_gap_mean: f64,
    pub pfl_final_gap_mean: f64,
    pub result: ExperimentResult,
}

impl GroupOutcome {
    pub fn sfl_better(&self) -> bool {
        self.sfl_final_gap_mean < self.pfl_final_gap_mean
    }
}

#[derive(Debug, Clone)]
pub struct Figure2Outcome {
    pub options: Figure2Options,
    pub groups: Vec<GroupOutcome>,
}

fn group_config(
    opts: &Figure2Options,
    group: u32,
    methods: Vec<Method>,
    lr_grid: Vec<f64>,
) -> ExperimentConfig {
    ExperimentConfig {
        problem: Problem::Group {
            id: group,
            sigma: 0.0,
        },
        methods,
        training: TrainingConfig::new(opts.rounds, 2, opts.local_steps, 0.0),
        lr_grid,
        seeds: opts.seeds.clone(),
        sfl_lr_scale: opts.sfl_lr_scale,
        init: Init::Fill(opts.init),
        output: None,
    }
}

pub fn figure2(opts: &Figure2Options) -> Result<Figure2Outcome, HarnessError> {
    let groups = opts
        .groups
        .iter()
        .map(|&g| {
            let search = grid_search(&group_config(
                opts,
                g,
                vec![Method::Pfl],
                opts.lr_grid.clone(),
            ))?;
            let pfl_lr = search.best_lr(Method::Pfl).expect("PFL was searched");
            let cfg = group_config(opts, g, vec![Method::Sfl, Method::Pfl], vec![pfl_lr]);
            let problem = build_problem(&cfg.problem, &cfg.training)?;
            let fstar = fstar_oracle(&problem.clients)?;
            let result = run_built(&cfg, &problem, fstar)?;
            let sfl = result.cell(Method::Sfl, pfl_lr).expect("SFL cell");
            let pfl = result.cell(Method::Pfl, pfl_lr).expect("PFL cell");
            Ok(GroupOutcome {
                group: g,
                pfl_lr,
                sfl_lr: sfl.lr,
                sfl_final_gap_mean: sfl.final_gap_mean,
                pfl_final_gap_mean: pfl.final_gap_mean,
                result,
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(Figure2Outcome {
        options: opts.clone(),
        groups,
    })
}

impl Figure2Outcome {
    pub fn summary_markdown(&self) -> String {
        let o = &self.options;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# Quadratic groups: SFL vs PFL\n\nR = {}, K = {}, M = 2, x0 = {}, {} seeds; PFL lr grid-searched, SFL lr = {} × PFL lr.\n",
            o.rounds,
            o.local_steps,
            o.init,
            o.seeds.len(),
            o.sfl_lr_scale
        );
        s.push_str("| group | PFL lr | SFL lr | SFL final gap | PFL final gap | SFL better |\n|---|---|---|---|---|---|\n");
        for g in &self.groups {
            let _ = writeln!(
                s,
                "| {} | {:.4e} | {:.4e} | {:.4e} | {:.4e} | {} |",
                g.group,
                g.pfl_lr,
                g.sfl_lr,
                g.sfl_final_gap_mean,
                g.pfl_final_gap_mean,
                if g.sfl_better() { "yes" } else { "no" }
            );
        }
        s
    }

    pub fn svg(&self) -> String {
        let panels: Vec<Panel> = self
            .groups
            .iter()
            .map(|g| Panel {
                title: format!("Group {}", g.group),
                series: vec![
                    Series {
                        label: "SFL".into(),
                        color: SFL_COLOR.into(),
                        values: g.result.mean_gap_curve(Method::Sfl, g.pfl_lr),
                    },
                    Series {
                        label: "PFL".into(),
                        color: PFL_COLOR.into(),
                        values: g.result.mean_gap_curve(Method::Pfl, g.pfl_lr),
                    },
                ],
            })
            .collect();
        render_svg(&panels, 5)
    }

    /// The run's settings as a manifest in the config grammar.
    pub fn manifest(&self) -> String {
        let o = &self.options;
        let mut s = String::from(
            "# quadratic group comparison (one manifest per group, lr chosen by grid search)\n",
        );
        let _ = writeln!(
            s,
            "rounds = {}\nlocal_steps = {}\nclients = 2",
            o.rounds, o.local_steps
        );
        let _ = writeln!(s, "init = {}\nsfl_lr_scale = {}", o.init, o.sfl_lr_scale);
        let seeds: Vec<String> = o.seeds.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "seeds = {}", seeds.join(", "));
        let grid: Vec<String> = o.lr_grid.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "# PFL search grid: {}", grid.join(", "));
        for g in &self.groups {
            let _ = writeln!(
                s,
                "# group {}: PFL lr = {}, SFL lr = {}",
                g.group, g.pfl_lr, g.sfl_lr
            );
        }
        s
    }

    /// Writes `group<N>.csv`, `summary.md`, `figure2.svg` and `manifest.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), HarnessError> {
        let io = |p: &Path, e: std::io::Error| HarnessError::Io {
            path: p.to_path_buf(),
            message: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for g in &self.groups {
            let path = dir.join(format!("group{}.csv", g.group));
            let f = std::fs::File::create(&path).map_err(|e| io(&path, e))?;
            write_csv(&g.result.rows, std::io::BufWriter::new(f))?;
        }
        let mut summary = self.summary_markdown();
        for g in &self.groups {
            summary.push('\n');
            summary.push_str(&render_summary(
                &g.result.task,
                g.result.fstar.value,
                g.result.fstar.exact,
                &g.result.cells,
            ));
        }
        for (name, body) in [
            ("summary.md", summary),
            ("figure2.svg", self.svg()),
            ("manifest.txt", self.manifest()),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }
}

/// Logistic regression on label-restricted client shards, with both
/// methods grid-searched on final training loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticOptions {
    pub source: DataSource,
    pub clients: usize,
    pub labels_per_client: usize,
    pub participants: usize,
    pub local_steps: usize,
    pub batch: usize,
    pub rounds: usize,
    pub seeds: Vec<u64>,
    pub reg: f64,
    pub lr_grid: Vec<f64>,
    pub partition_seed: u64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        Self {
            source: DataSource::Synthetic {
                n: 2000,
                dim: 20,
                seed: 0,
            },
            clients: 50,
            labels_per_client: 1,
            participants: 10,
            local_steps: 5,
            batch: 8,
            rounds: 200,
            seeds: (0..5).collect(),
            reg: 1e-4,
            lr_grid: default_lr_grid(),
            partition_seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LogisticOutcome {
    pub sfl_lr: f64,
    pub pfl_lr: f64,
    pub sfl_final_loss: f64,
    pub pfl_final_loss: f64,
    pub result: ExperimentResult,
}

impl LogisticOutcome {
    /// `|SFL − PFL| / max(SFL, PFL)` of the final mean losses.
    pub fn relative_difference(&self) -> f64 {
        (self.sfl_final_loss - self.pfl_final_loss).abs()
            / self.sfl_final_loss.max(self.pfl_final_loss)
    }
}

impl LogisticOptions {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            problem: Problem::Logistic {
                source: self.source.clone(),
                labels_per_client: self.labels_per_client,
                reg: self.reg,
                partition_seed: self.partition_seed,
            },
            methods: vec![Method::Sfl, Method::Pfl],
            training: TrainingConfig::new(self.rounds, self.clients, self.local_steps, 0.0)
                .with_participants(self.participants)
                .with_batch(self.batch),
            lr_grid: self.lr_grid.clone(),
            seeds: self.seeds.clone(),
            sfl_lr_scale: 1.0,
            init: Init::Auto,
            output: None,
        }
    }
}

pub fn logistic_comparison(opts: &LogisticOptions) -> Result<LogisticOutcome, HarnessError> {
    let out = grid_search(&opts.config())?;
    let sfl_lr = out.best_lr(Method::Sfl).expect("SFL searched");
    let pfl_lr = out.best_lr(Method::Pfl).expect("PFL searched");
    let loss = |m: Method, lr: f64| {
        out.result
            .cell(m, lr)
            .expect("searched cell")
            .final_loss_mean
    };
    Ok(LogisticOutcome {
        sfl_lr,
        pfl_lr,
        sfl_final_loss: loss(Method::Sfl, sfl_lr),
        pfl_final_loss: loss(Method::Pfl, pfl_lr),
        result: out.result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_figure2_run() {
        let opts = Figure2Options {
            groups: vec![1, 3],
            rounds: 10,
            seeds: vec![0, 1],
            ..Default::default()
        };
        let out = figure2(&opts).unwrap();
        assert_eq!(out.groups.len(), 2);
        let g1 = &out.groups[0];
        assert_eq!(g1.sfl_lr, 0.5 * g1.pfl_lr);
        // PFL on the symmetric pair never leaves the optimum
        assert_eq!(g1.pfl_final_gap_mean, 0.0);
        assert!(out.svg().contains("Group 3"));
        assert!(out.manifest().contains("rounds = 10"));

        let dir = tempfile::tempdir().unwrap();
        out.write_to(dir.path()).unwrap();
        for f in [
            "group1.csv",
            "group3.csv",
            "summary.md",
            "figure2.svg",
            "manifest.txt",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }

    #[test]
    fn small_logistic_run() {
        let opts = LogisticOptions {
            source: DataSource::Synthetic {
                n: 200,
                dim: 4,
                seed: 0,
            },
            clients: 10,
            participants: 5,
            rounds: 10,
            seeds: vec![0, 1],
            lr_grid: vec![0.01, 0.1],
            ..Default::default()
        };
        let out = logistic_comparison(&opts).unwrap();
        assert!(out.sfl_final_loss.is_finite() && out.pfl_final_loss.is_finite());
        assert!(out.relative_difference() >= 0.0);
        assert!(out.result.rows.iter().all(|r| r.gap >= -r.gap_tol));
    }
}
