use std::fmt;

use super::{
    exact_abs_partial_sum_iid_ratio, exact_perm_stats, exhaustive_second_moment,
    second_moment_recursion, t_function_excess, RecursionInput, MAX_EXACT_M, MAX_EXACT_N,
};

/// One row of the oracle report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// First failing case, if any.
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<28} {:>6} cases, {} failures",
            self.name, self.cases, self.failures
        )?;
        if let Some(c) = &self.first_failure {
            write!(f, " (first: {c})")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, case: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(case());
            }
        }
    }

    fn finish(self, name: &'static str) -> CheckOutcome {
        CheckOutcome {
            name,
            cases: self.cases,
            failures: self.failures,
            first_failure: self.first,
        }
    }
}

/// `√n/5 ≤ E|E_n| ≤ √n` for `1 ≤ n ≤ 24`, compared exactly after squaring.
pub fn check_iid_sandwich() -> CheckOutcome {
    let mut t = Tally::default();
    for n in 1..=MAX_EXACT_N {
        let r = exact_abs_partial_sum_iid_ratio(n).expect("n in range");
        let (p, q) = (*r.numer() as u128, *r.denom() as u128);
        let n = n as u128;
        t.record(25 * p * p >= n * q * q && p * p <= n * q * q, || {
            format!("n={n}")
        });
    }
    t.finish("iid-sign-sandwich")
}

fn perm_configs() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (2..=MAX_EXACT_M).step_by(2).flat_map(|mm| {
        (1..=4).flat_map(move |kk| (1..=mm).flat_map(move |m| (0..kk).map(move |k| (mm, kk, m, k))))
    })
}

/// Lower bound for `M ≥ 4`, `m ≤ M/2+1`; upper bound everywhere.
pub fn check_perm_sandwich() -> CheckOutcome {
    let mut t = Tally::default();
    for (mm, kk, m, k) in perm_configs() {
        let s = exact_perm_stats(mm, kk, m, k).expect("enumerable");
        let lower_applies = mm >= 4 && m <= mm / 2 + 1;
        let ok = s.satisfies_upper() && (!lower_applies || s.satisfies_lower());
        t.record(ok, || {
            format!("M={mm} K={kk} m={m} k={k} E|A|={}", s.exp_abs)
        });
    }
    t.finish("perm-partial-sum-sandwich")
}

/// `Pr(A>0) = Pr(A<0) ∈ [1/6, 1/2]` except at `(m, k) = (1, 0)`.
pub fn check_perm_signs() -> CheckOutcome {
    let mut t = Tally::default();
    for (mm, kk, m, k) in perm_configs().filter(|&(_, _, m, k)| (m, k) != (1, 0)) {
        let s = exact_perm_stats(mm, kk, m, k).expect("enumerable");
        t.record(s.symmetric() && s.in_sign_window(), || {
            format!(
                "M={mm} K={kk} m={m} k={k} P+={} P-={}",
                s.prob_pos, s.prob_neg
            )
        });
    }
    t.finish("perm-sign-window")
}

/// `A_{M+1,0}` is identically zero.
pub fn check_full_sum_zero() -> CheckOutcome {
    let mut t = Tally::default();
    for mm in (2..=MAX_EXACT_M).step_by(2) {
        let s = exact_perm_stats(mm, 1, mm + 1, 0).expect("enumerable");
        t.record(s.abs_sum_scaled == 0 && s.count_zero == s.total, || {
            format!("M={mm}")
        });
    }
    t.finish("perm-full-sum-zero")
}

/// Strict increase of `T` on `d = i/1001`, `i = 1..=1000`.
pub fn check_t_monotone() -> CheckOutcome {
    let mut t = Tally::default();
    for m in [2usize, 4, 8] {
        for k in [1usize, 3, 10] {
            let xs: Vec<f64> = (1..=1000)
                .map(|i| t_function_excess(i as f64 / 1001.0, m, k).expect("d in (0,1)"))
                .collect();
            let bad = xs.windows(2).position(|w| w[0] >= w[1]);
            t.record(bad.is_none(), || {
                format!("M={m} K={k} at grid index {}", bad.unwrap_or(0) + 1)
            });
        }
    }
    t.finish("t-function-monotone")
}

/// Recursion against exhaustive SFL paths for `(M, K, R) ∈ {2,4}×{1,2,3}×{1,2}`.
pub fn check_recursion() -> CheckOutcome {
    let mut t = Tally::default();
    for m in [2usize, 4] {
        for k in [1usize, 2, 3] {
            for r in [1usize, 2] {
                let inp = RecursionInput {
                    lam: 1.0,
                    eta: 0.1,
                    m,
                    k,
                    zeta: 1.0,
                    x0_sq: 0.0,
                    r,
                };
                let (rec, sim) = (
                    second_moment_recursion(&inp),
                    exhaustive_second_moment(&inp),
                );
                let ok = matches!((&rec, &sim), (Ok(a), Ok(b)) if (a - b).abs() <= 1e-10 * a.abs());
                t.record(ok, || format!("M={m} K={k} R={r}: {rec:?} vs {sim:?}"));
            }
        }
    }
    t.finish("second-moment-recursion")
}

/// Every oracle check, in a fixed order.
pub fn run_suite() -> Vec<CheckOutcome> {
    vec![
        check_iid_sandwich(),
        check_perm_sandwich(),
        check_perm_signs(),
        check_full_sum_zero(),
        check_t_monotone(),
        check_recursion(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for c in run_suite() {
            assert!(c.passed(), "{c}");
        }
    }

    #[test]
    fn display_row() {
        let c = CheckOutcome {
            name: "x",
            cases: 3,
            failures: 1,
            first_failure: Some("n=2".into()),
        };
        let s = c.to_string();
        assert!(s.starts_with("FAIL x"));
        assert!(s.ends_with("(first: n=2)"));
    }
}
