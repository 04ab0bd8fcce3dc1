use std::fmt::Write as _;
use std::io::Write;

use super::HarnessError;
use crate::trainers::Method;

/// Column order of the metrics CSV. Stable: downstream plots depend on it.
pub const CSV_HEADER: [&str; 12] = [
    "method",
    "task",
    "seed",
    "round",
    "lr",
    "loss",
    "gap",
    "grad_norm_sq",
    "min_grad_norm_sq",
    "distance",
    "diverged",
    "gap_tol",
];

/// One round of one (method, lr, seed) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub method: Method,
    pub task: String,
    pub seed: u64,
    pub round: usize,
    /// Client learning rate the cell actually ran with.
    pub lr: f64,
    /// `F(x⁽ʳ⁾)`.
    pub loss: f64,
    /// `F(x⁽ʳ⁾) − F*`.
    pub gap: f64,
    pub grad_norm_sq: f64,
    pub min_grad_norm_sq: f64,
    /// `‖x⁽ʳ⁾ − x*‖` when the minimiser is known exactly.
    pub distance: Option<f64>,
    /// Whether the cell's run was cut short by divergence.
    pub diverged: bool,
    /// Tolerance of `F*`: `gap ≥ −gap_tol` holds up to oracle accuracy.
    pub gap_tol: f64,
}

impl MetricRow {
    fn record(&self) -> [String; 12] {
        [
            self.method.to_string(),
            self.task.clone(),
            self.seed.to_string(),
            self.round.to_string(),
            self.lr.to_string(),
            self.loss.to_string(),
            self.gap.to_string(),
            self.grad_norm_sq.to_string(),
            self.min_grad_norm_sq.to_string(),
            self.distance.map(|d| d.to_string()).unwrap_or_default(),
            self.diverged.to_string(),
            self.gap_tol.to_string(),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[MetricRow], out: W) -> Result<(), HarnessError> {
    let csv_err = |e: csv::Error| HarnessError::Invalid(format!("CSV output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.record()).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| HarnessError::Invalid(format!("CSV output failed: {e}")))?;
    Ok(())
}

pub fn csv_string(rows: &[MetricRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Across-seed statistics of one (method, lr) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub method: Method,
    /// Grid value the cell was launched from.
    pub grid_lr: f64,
    /// Learning rate actually used (differs for SFL under `sfl_lr_scale`).
    pub lr: f64,
    pub seeds: usize,
    pub diverged_seeds: usize,
    pub final_gap_mean: f64,
    pub final_gap_min: f64,
    pub final_gap_max: f64,
    pub final_loss_mean: f64,
    pub final_grad_norm_sq_mean: f64,
}

/// `(mean, min, max)`.
pub fn mean_min_max(xs: &[f64]) -> (f64, f64, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, min, max)
}

pub fn render_summary(task: &str, fstar: f64, fstar_exact: bool, cells: &[CellSummary]) -> String {
    let mut s = String::new();
    let kind = if fstar_exact { "exact" } else { "numeric" };
    let _ = writeln!(s, "# {task}\n\nF* = {fstar:.6e} ({kind})\n");
    s.push_str(
        "| method | lr | seeds | diverged | final gap (mean) | min | max | final loss (mean) |\n",
    );
    s.push_str("|---|---|---|---|---|---|---|---|\n");
    for c in cells {
        let _ = writeln!(
            s,
            "| {} | {:.4e} | {} | {} | {:.4e} | {:.4e} | {:.4e} | {:.6e} |",
            c.method,
            c.lr,
            c.seeds,
            c.diverged_seeds,
            c.final_gap_mean,
            c.final_gap_min,
            c.final_gap_max,
            c.final_loss_mean
        );
    }
    s
}
