use super::{
    pfl_upper_bound, sfl_rate_row, BoundError, BoundParams, BoundResult, ConvexityCase,
    Heterogeneity, TermKind,
};

/// One row of the PFL-vs-SFL comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table2Row {
    pub case: ConvexityCase,
    pub method: &'static str,
    pub assumption: Heterogeneity,
    pub result: Result<BoundResult, BoundError>,
}

/// Evaluates every row of the comparison table for `p`.
///
/// Rows whose preconditions fail (e.g. strongly convex rows with `μ = 0`)
/// carry the error instead of a value.
pub fn table2(p: &BoundParams) -> Vec<Table2Row> {
    use ConvexityCase::*;
    use Heterogeneity::*;
    let pfl = |case, h, label| Table2Row {
        case,
        method: label,
        assumption: h,
        result: pfl_upper_bound(case, h, p),
    };
    let sfl = |case, h| Table2Row {
        case,
        method: "SFL",
        assumption: h,
        result: sfl_rate_row(case, p),
    };
    vec![
        pfl(StronglyConvex, Optimum, "PFL"),
        pfl(StronglyConvex, Max, "PFL (max-heterogeneity)"),
        sfl(StronglyConvex, Optimum),
        pfl(Convex, Average, "PFL (avg-heterogeneity)"),
        pfl(Convex, Optimum, "PFL"),
        pfl(Convex, Max, "PFL (max-heterogeneity)"),
        sfl(Convex, Optimum),
        pfl(NonConvex, Average, "PFL"),
        sfl(NonConvex, Average),
    ]
}

const COLUMNS: [TermKind; 4] = [
    TermKind::Stochasticity1,
    TermKind::Stochasticity2,
    TermKind::Heterogeneity,
    TermKind::Optimization,
];

impl Table2Row {
    fn cells(&self) -> Vec<String> {
        let mut cells = vec![
            self.case.to_string(),
            self.method.to_string(),
            self.assumption.to_string(),
        ];
        match &self.result {
            Ok(b) => {
                cells.extend(COLUMNS.iter().map(|&t| format!("{:.6e}", b.term(t))));
                cells.push(format!("{:.6e}", b.total));
            }
            Err(e) => {
                cells.extend(std::iter::repeat_n("n/a".to_string(), COLUMNS.len()));
                cells.push(format!("n/a: {e}"));
            }
        }
        cells
    }
}

fn header() -> Vec<String> {
    let mut h = vec!["case".to_string(), "method".into(), "assumption".into()];
    h.extend(COLUMNS.iter().map(|t| t.name().to_string()));
    h.push("total".into());
    h
}

pub fn render_markdown(rows: &[Table2Row]) -> String {
    let h = header();
    let mut out = format!("| {} |\n|{}\n", h.join(" | "), "---|".repeat(h.len()));
    for r in rows {
        out.push_str(&format!("| {} |\n", r.cells().join(" | ")));
    }
    out
}

pub fn render_csv(rows: &[Table2Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header()).expect("in-memory write");
    for r in rows {
        w.write_record(r.cells()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

/// Heterogeneity level at which PFL's max-heterogeneity rate and SFL's rate
/// coincide (strongly convex, `σ = 0`, `μ = L = D = 1`, `ζ̂ = ζ* = ζ`).
///
/// Below the threshold PFL's bound is smaller; above it SFL's is. Found by
/// bisection on `log ζ`.
pub fn crossover_threshold(m: usize, k: usize, r: usize) -> Result<f64, BoundError> {
    let gap = |z: f64| -> Result<f64, BoundError> {
        let p = BoundParams {
            zeta_star: z,
            zeta_hat: z,
            zeta: z,
            m,
            k,
            r,
            s: m,
            ..Default::default()
        };
        let pfl = pfl_upper_bound(ConvexityCase::StronglyConvex, Heterogeneity::Max, &p)?.total;
        let sfl = sfl_rate_row(ConvexityCase::StronglyConvex, &p)?.total;
        Ok(pfl - sfl)
    };
    let (mut lo, mut hi) = (1e-30f64, 1e30f64);
    if !(gap(lo)? < 0.0 && gap(hi)? > 0.0) {
        return Err(BoundError::Unsupported(format!(
            "no crossover for M = {m}, K = {k}, R = {r}"
        )));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if gap(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}
