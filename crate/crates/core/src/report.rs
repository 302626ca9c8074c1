//! Text renderings of a campaign: CSV rows, JSON, plot tables and a summary.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::verify::campaign::CampaignReport;
use crate::verify::lemmas::LemmaSweep;
use crate::verify::BoundCertificate;

pub const CSV_HEADER: &str =
    "t,x,regime,beta,clamped,alpha,v_star,u,C,delta_min,k_lower,k_numeric,satisfied,envelope_valid,tags";

/// Shortest decimal that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn csv_row(r: &BoundCertificate) -> String {
    let tags: Vec<&str> = r.tags.iter().map(|t| t.name()).collect();
    [
        num(r.t),
        num(r.x),
        r.regime.to_string(),
        opt(r.beta),
        r.clamped.to_string(),
        opt(r.alpha),
        opt(r.v_star),
        opt(r.u),
        opt(r.c_const),
        opt(r.delta_min),
        opt(r.k_lower),
        opt(r.k_numeric),
        r.satisfied.to_string(),
        r.envelope_valid.to_string(),
        tags.join(";"),
    ]
    .join(",")
}

/// `campaign.csv`: fixed header, one row per certificate, LF endings.
pub fn render_csv(report: &CampaignReport) -> String {
    let mut out = String::with_capacity(128 * (report.certificates.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.certificates {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

pub fn render_json(report: &CampaignReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> serde_json::Result<CampaignReport> {
    serde_json::from_str(text)
}

/// `lemmas.csv` from grid sweeps.
pub fn render_lemmas_csv(sweeps: &[LemmaSweep]) -> String {
    let mut out = String::from("lemma,alpha,lambda,delta,lhs,rhs,holds\n");
    for sweep in sweeps {
        for p in &sweep.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                sweep.name,
                opt(p.alpha),
                num(p.lambda),
                num(p.delta),
                num(p.lhs),
                num(p.rhs),
                p.holds
            );
        }
    }
    out
}

fn plot_value(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "NaN".into())
}

/// Plot tables keyed by file name: `kernel_x{i}.dat` holds (t, k_numeric,
/// k_lower, u) at one position, `profile_t{i}.dat` holds (x, k_numeric,
/// k_lower, u) at one time.
pub fn render_plots(report: &CampaignReport) -> BTreeMap<String, String> {
    let mut by_x: BTreeMap<usize, Vec<&BoundCertificate>> = BTreeMap::new();
    let mut by_t: Vec<(f64, Vec<&BoundCertificate>)> = Vec::new();
    for r in &report.certificates {
        by_x.entry(r.node).or_default().push(r);
        match by_t.last_mut() {
            Some((t, rows)) if *t == r.t => rows.push(r),
            _ => by_t.push((r.t, vec![r])),
        }
    }
    let mut files = BTreeMap::new();
    for (i, rows) in by_x.values().enumerate() {
        let mut s = format!("# x = {}\n# t k_numeric k_lower u\n", num(rows[0].x));
        for r in rows {
            let _ = writeln!(s, "{} {} {} {}", num(r.t), plot_value(r.k_numeric), plot_value(r.k_lower), plot_value(r.u));
        }
        files.insert(format!("kernel_x{i:02}.dat"), s);
    }
    for (i, (t, rows)) in by_t.iter().enumerate() {
        let mut s = format!("# t = {}\n# x k_numeric k_lower u\n", num(*t));
        for r in rows {
            let _ = writeln!(s, "{} {} {} {}", num(r.x), plot_value(r.k_numeric), plot_value(r.k_lower), plot_value(r.u));
        }
        files.insert(format!("profile_t{i:02}.dat"), s);
    }
    files
}

/// Human-readable digest of a campaign.
pub fn render_summary(report: &CampaignReport) -> String {
    let mut s = String::new();
    let spec = &report.spec;
    let _ = writeln!(
        s,
        "operator: N = {}, m = {}, gamma = {}, potential = {}",
        spec.dim, spec.m, spec.gamma, spec.potential
    );
    let _ = writeln!(s, "grid: L = {}, n = {}, h = {:.6}", report.grid.half_width, report.grid.n, report.grid.h);
    for line in &report.preamble {
        let _ = writeln!(s, "note: {line}");
    }
    for d in &report.defaults_applied {
        let _ = writeln!(s, "default: {d}");
    }
    match &report.envelope.hypothesis {
        Some(h) => {
            let _ = writeln!(
                s,
                "envelope ({}): sigma = {:.6}, mu = {:.6}, lambda = {:.6}",
                report.envelope.source, h.sigma, h.mu, h.lambda
            );
        }
        None => {
            let _ = writeln!(s, "envelope: unavailable");
        }
    }
    if let Some(fit) = &report.envelope.fit {
        let _ = writeln!(
            s,
            "  least squares: sigma = {:.6}, mu = {:.6}, lambda = {:.6}; clipped lambda = {}, clipped mu = {}",
            fit.ls_sigma, fit.ls_mu, fit.ls_lambda, fit.lambda_clipped, fit.mu_clipped
        );
    }
    if let Some(a) = report.alpha {
        let _ = writeln!(s, "alpha = {a:.6}");
    }
    let m = &report.summary;
    let _ = writeln!(
        s,
        "certificates: {} rows, {} certified, {} with valid envelope, {} satisfied, {} failed",
        m.rows, m.certified, m.checked, m.satisfied, m.failed_rows
    );
    if let Some(l) = &report.lemmas {
        let _ = writeln!(
            s,
            "interpolation: {} checks, {} violations",
            l.interpolation.checked, l.interpolation.violations
        );
        let _ = writeln!(
            s,
            "resolvent chain: {} checked, {} skipped (envelope history), {} violations",
            l.dav2.checked, l.dav2.skipped, l.dav2.violations
        );
        let _ = writeln!(
            s,
            "variational domination: {} checks, {} violations, max excess {}",
            l.variational.checked,
            l.variational.violations,
            l.variational.worst.map_or("n/a".to_string(), |w| format!("{w:e}"))
        );
    }
    let failing = report.oracles.iter().filter(|o| !o.pass).count();
    let worst = report.oracles.iter().map(|o| o.rel_error).fold(0.0f64, f64::max);
    let _ = writeln!(s, "oracles: {} rows, {} outside tolerance, max rel. error {:e}", report.oracles.len(), failing, worst);
    if let Some(b) = &report.boundary {
        let _ = writeln!(
            s,
            "boundary check (L = {}): max rel. change {:e}, {} rows flagged",
            b.doubled_half_width, b.max_rel_change, b.flagged
        );
    }
    for r in &report.regression {
        match (r.c, r.r_squared) {
            (Some(c), Some(r2)) => {
                let _ = writeln!(s, "regression {}: c = {:.6}, R^2 = {:.4} over {} rows", r.regime, c, r2, r.rows);
            }
            _ => {
                let _ = writeln!(s, "regression {}: too few rows ({})", r.regime, r.rows);
            }
        }
    }
    for st in &report.stages {
        let _ = writeln!(
            s,
            "stage {} ({}): {}",
            st.stage,
            if st.fatal { "failed" } else { "skipped" },
            st.message
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip_numbers() {
        for v in [0.1, 1.0, 1e-7, 0.28209479177387814, 1.0 / 3.0, 123456.789] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(2.0), "2.0");
        assert_eq!(opt(None), "");
    }

    #[test]
    fn header_has_fifteen_columns() {
        assert_eq!(CSV_HEADER.split(',').count(), 15);
    }
}
