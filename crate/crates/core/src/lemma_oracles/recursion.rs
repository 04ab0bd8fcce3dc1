use super::permutations::balanced_arrangements;
use super::OracleError;
use crate::objectives::{build_hard_instance, HardKind, HardParams, Regime};
use crate::trainers::{run_sfl_with_schedules, TrainingConfig};

fn check_d(d: f64) -> Result<(), OracleError> {
    if d > 0.0 && d < 1.0 {
        Ok(())
    } else {
        Err(OracleError::DOutOfRange(d))
    }
}

/// `1 − (1−d)^n`, without cancellation for small `d`.
fn one_minus_pow(d: f64, n: f64) -> f64 {
    -(n * (-d).ln_1p()).exp_m1()
}

/// `T(d) = 1 + u^M − (1/M)·((1+u)/(1−u))·(1−u^M)` with `u = (1−d)^K`.
///
/// Expanding the geometric series gives the equivalent
/// `T = (1/M)·Σ_{j=1}^{M−1} (1−u^j)(1−u^{M−j})`, a sum of positive terms that
/// is accurate as `d → 0`, where the defining expression cancels to nothing.
pub fn t_function(d: f64, m: usize, k: usize) -> Result<f64, OracleError> {
    check_d(d)?;
    if m < 2 || k == 0 {
        return Err(OracleError::Range(format!(
            "need M ≥ 2 and K ≥ 1, got M = {m}, K = {k}"
        )));
    }
    let w = |j: usize| one_minus_pow(d, (j * k) as f64);
    Ok((1..m).map(|j| w(j) * w(m - j)).sum::<f64>() / m as f64)
}

/// `T(d) − (1 − 1/M)`, which is `−(1/M)·[2·Σ_{j=1}^{M−1} u^j − (M−1)·u^M]`.
///
/// Near `d → 1` the value of `T` is within rounding of its limit, so strict
/// growth there is only visible through this difference.
pub fn t_function_excess(d: f64, m: usize, k: usize) -> Result<f64, OracleError> {
    check_d(d)?;
    if m < 2 || k == 0 {
        return Err(OracleError::Range(format!(
            "need M ≥ 2 and K ≥ 1, got M = {m}, K = {k}"
        )));
    }
    let u = (k as f64 * (-d).ln_1p()).exp();
    let geo: f64 = (1..m).map(|j| u.powi(j as i32)).sum();
    Ok(-(2.0 * geo - (m - 1) as f64 * u.powi(m as i32)) / m as f64)
}

/// Parameters of the second-moment recursion on the `±ζ` quadratic instance
/// (curvature `λ`, half the clients with linear term `+ζ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionInput {
    pub lam: f64,
    pub eta: f64,
    pub m: usize,
    pub k: usize,
    pub zeta: f64,
    pub x0_sq: f64,
    pub r: usize,
}

impl RecursionInput {
    pub fn d(&self) -> f64 {
        self.lam * self.eta
    }

    pub fn t(&self) -> f64 {
        one_minus_pow(self.d(), self.k as f64)
    }

    fn validate(&self) -> Result<(), OracleError> {
        check_d(self.d())?;
        if self.m < 2 || self.m % 2 == 1 {
            return Err(OracleError::OddM(self.m));
        }
        if self.k == 0 {
            return Err(OracleError::Range("K must be at least 1".into()));
        }
        if !(self.x0_sq >= 0.0 && self.x0_sq.is_finite()) {
            return Err(OracleError::Range(format!(
                "x0² must be finite and ≥ 0, got {}",
                self.x0_sq
            )));
        }
        Ok(())
    }
}

/// `E[(x⁽ᴿ⁾)²]` of SFL with uniformly random orderings.
///
/// Per round: `E x_r² = (1−d)^{2MK}·E x_{r−1}² + η²ζ²·(M/(M−1))·(1/d²)
/// ·((1−(1−d)^K)/(1+(1−d)^K))·(1−(1−d)^{MK})·T(d)`.
pub fn second_moment_recursion(inp: &RecursionInput) -> Result<f64, OracleError> {
    inp.validate()?;
    let d = inp.d();
    let (m, k) = (inp.m as f64, inp.k as f64);
    let contraction = (2.0 * m * k * (-d).ln_1p()).exp();
    let t = inp.t();
    let fresh = (inp.eta * inp.zeta / d).powi(2)
        * (m / (m - 1.0))
        * (t / (2.0 - t))
        * one_minus_pow(d, m * k)
        * t_function(d, inp.m, inp.k)?;
    let mut e = inp.x0_sq;
    for _ in 0..inp.r {
        e = contraction * e + fresh;
    }
    Ok(e)
}

/// Same quantity by running SFL over every sequence of balanced orderings
/// (`C(M, M/2)^R` paths) and averaging `(x⁽ᴿ⁾)²`.
///
/// Exact up to floating-point rounding; practical for `C(M, M/2)^R ≲ 10⁶`.
pub fn exhaustive_second_moment(inp: &RecursionInput) -> Result<f64, OracleError> {
    inp.validate()?;
    let sim = |e: String| OracleError::Simulation(e);
    let mut p = HardParams::new(inp.m, inp.k, inp.r);
    p.lambda = inp.lam;
    p.zeta = inp.zeta;
    let inst = build_hard_instance(HardKind::Heterogeneity, Regime::MidLr, &p)
        .map_err(|e| sim(e.to_string()))?;
    let clients = inst.clients();
    let x0 = [inp.x0_sq.sqrt()];
    let cfg = TrainingConfig::new(inp.r, inp.m, inp.k, inp.eta);

    // clients 0..M/2 carry +ζ; a mask's set bits say where they go
    let orders: Vec<Vec<usize>> = balanced_arrangements(inp.m)
        .into_iter()
        .map(|mask| {
            let (mut plus, mut minus) = (0..inp.m / 2, inp.m / 2..inp.m);
            (0..inp.m)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        plus.next()
                    } else {
                        minus.next()
                    }
                    .expect("balanced mask")
                })
                .collect()
        })
        .collect();
    let paths = orders
        .len()
        .checked_pow(inp.r as u32)
        .filter(|&n| n <= 1 << 22)
        .ok_or_else(|| {
            OracleError::Range(format!(
                "{}^{} paths is too many to enumerate",
                orders.len(),
                inp.r
            ))
        })?;

    let mut acc = 0.0;
    let mut schedules = vec![Vec::new(); inp.r];
    for path in 0..paths {
        let mut idx = path;
        for s in schedules.iter_mut() {
            *s = orders[idx % orders.len()].clone();
            idx /= orders.len();
        }
        let rec = run_sfl_with_schedules(&cfg, &clients, &x0, &schedules)
            .map_err(|e| sim(e.to_string()))?;
        if rec.diverged() {
            return Err(sim(format!("path {path} diverged")));
        }
        acc += rec.last()[0].powi(2);
    }
    Ok(acc / paths as f64)
}
