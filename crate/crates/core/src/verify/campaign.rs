use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::theorem_exponent;
use crate::config::{Config, ParsedConfig};
use crate::lab::Grid1D;
use crate::problem::{Hypothesis, Potential, ProblemSpec, Regime};
use crate::special::gamma;

use super::certify::{certify_point, resolve_alpha, BoundCertificate, Lab, Tag, DOMINATION_SLACK};
use super::checks::{check_dav2_chain, check_interpolation, greens_by_laplace};
use super::envelope::{fit_envelope, EnvelopeFit, EnvelopeSample, FitOptions};
use super::lemmas::{exponent_below_alpha_s, interpolation_grid, CheckSummary};

pub const FORMAT_VERSION: u32 = 1;

/// Relative tolerance of the resolvent-versus-Laplace comparison.
pub const LAPLACE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    /// "config" or "fitted".
    pub source: String,
    pub hypothesis: Option<Hypothesis>,
    pub fit: Option<EnvelopeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dav2Summary {
    pub checked: usize,
    /// Points skipped because the envelope fails somewhere on (0, t].
    pub skipped: usize,
    pub violations: usize,
    /// max ln(lhs/rhs) over checked points.
    pub worst: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaChecks {
    pub interpolation: CheckSummary,
    pub dav2: Dav2Summary,
    /// V* ≤ G_t(x,x) for every test function built by the campaign.
    pub variational: CheckSummary,
    /// (α, s) points on the interpolation grid with p(s) ≤ αs.
    pub exponent_below_alpha_s: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub name: String,
    pub t: f64,
    pub x: f64,
    pub numeric: f64,
    pub reference: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    #[serde(rename = "L")]
    pub doubled_half_width: f64,
    pub doubled_nodes: usize,
    pub max_rel_change: f64,
    pub flagged: usize,
}

/// Least-squares c in ln(u/k_lower) ≈ c·P, P the theorem's exponent shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRegression {
    pub regime: Regime,
    pub rows: usize,
    pub c: Option<f64>,
    pub r_squared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageIssue {
    pub stage: String,
    pub message: String,
    /// Non-fatal issues (a skipped optional stage) do not fail the run.
    pub fatal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub certified: usize,
    /// Rows with the envelope valid at t and a certificate produced.
    pub checked: usize,
    pub satisfied: usize,
    pub failed_rows: usize,
    pub failed_checks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub format_version: u32,
    pub preamble: Vec<String>,
    pub config: Config,
    pub defaults_applied: Vec<String>,
    pub spec: ProblemSpec,
    pub grid: GridMeta,
    pub envelope: EnvelopeReport,
    pub alpha: Option<f64>,
    pub certificates: Vec<BoundCertificate>,
    pub lemmas: Option<LemmaChecks>,
    pub oracles: Vec<OracleRow>,
    pub boundary: Option<BoundaryReport>,
    pub regression: Vec<RegimeRegression>,
    pub stages: Vec<StageIssue>,
    pub summary: Summary,
}

impl CampaignReport {
    pub fn has_stage_failures(&self) -> bool {
        self.stages.iter().any(|s| s.fatal)
    }

    pub fn regression_for(&self, regime: Regime) -> Option<&RegimeRegression> {
        self.regression.iter().find(|r| r.regime == regime)
    }
}

fn preamble() -> Vec<String> {
    vec![
        "Kernel values come from a dense eigendecomposition of the grid operator on a Dirichlet box.".into(),
        "Continuity and square integrability of the kernel hold trivially for the finite grid, so those hypotheses are not tested.".into(),
        "Envelope validity is checked at t and on 32 log-spaced points of [1e-4 t, t], not proven.".into(),
        "Rows tagged support, unresolved, degenerate-test-function, numerical or no-envelope carry no certificate.".into(),
    ]
}

/// (t, node) pairs in (t, x) lexicographic order.
pub fn sample_points(config: &Config, grid: &Grid1D) -> Vec<(f64, usize)> {
    let mut ts = config.campaign.t.clone();
    ts.sort_by(f64::total_cmp);
    let mut nodes: Vec<usize> = config.campaign.x.iter().map(|&x| grid.nearest_node(x)).collect();
    nodes.sort_unstable();
    let mut out = Vec::with_capacity(ts.len() * nodes.len());
    for &t in &ts {
        for &node in &nodes {
            out.push((t, node));
        }
    }
    out
}

/// Kernel samples at the campaign points, the input of the envelope fit.
pub fn kernel_samples(lab: &Lab, points: &[(f64, usize)]) -> Vec<EnvelopeSample> {
    points
        .iter()
        .map(|&(t, node)| EnvelopeSample {
            t,
            x: lab.grid().node(node),
            k: lab.kernel(t, node),
        })
        .collect()
}

pub fn fit_options(config: &Config) -> FitOptions {
    FitOptions {
        lambda_max: config.campaign.lambda_max,
        ..FitOptions::default()
    }
}

/// Closed-form diagonal for the potentials that have one.
pub fn closed_form_kernel(spec: &ProblemSpec, t: f64, x: f64) -> Option<(&'static str, f64, f64)> {
    use std::f64::consts::PI;
    match (spec.potential, spec.m) {
        (Potential::Zero, 1) => Some(("free-heat", (4.0 * PI * t).powf(-0.5), 1e-3)),
        (Potential::Zero, 2) => Some(("free-biharmonic", gamma(1.25) / PI * t.powf(-0.25), 1e-2)),
        (Potential::Harmonic, 1) => Some((
            "mehler",
            (2.0 * PI * (2.0 * t).sinh()).powf(-0.5) * (-x * x * t.tanh()).exp(),
            1e-3,
        )),
        _ => None,
    }
}

fn oracle(name: &str, t: f64, x: f64, numeric: f64, reference: f64, tolerance: f64) -> OracleRow {
    let rel_error = ((numeric - reference) / reference).abs();
    OracleRow {
        name: name.to_string(),
        t,
        x,
        numeric,
        reference,
        rel_error,
        tolerance,
        pass: rel_error <= tolerance,
    }
}

/// ln(u/k_lower) against the theorem's exponent shape, per regime.
pub fn regress(rows: &[BoundCertificate], hyp: &Hypothesis, spec: &ProblemSpec) -> Vec<RegimeRegression> {
    [Regime::Late, Regime::Early]
        .into_iter()
        .map(|regime| {
            let pairs: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.regime == regime && !r.has_failure())
                .filter_map(|r| {
                    let y = r.exponent_arg?;
                    let (_, shape) = theorem_exponent(r.t, r.x, hyp, spec).ok()?;
                    (y.is_finite() && shape.is_finite()).then_some((shape, y))
                })
                .collect();
            let n = pairs.len();
            if n < 3 {
                return RegimeRegression {
                    regime,
                    rows: n,
                    c: None,
                    r_squared: None,
                };
            }
            let spp: f64 = pairs.iter().map(|(p, _)| p * p).sum();
            let spy: f64 = pairs.iter().map(|(p, y)| p * y).sum();
            let c = spy / spp;
            let mean = pairs.iter().map(|(_, y)| y).sum::<f64>() / n as f64;
            let ss_res: f64 = pairs.iter().map(|(p, y)| (y - c * p).powi(2)).sum();
            let ss_tot: f64 = pairs.iter().map(|(_, y)| (y - mean).powi(2)).sum();
            RegimeRegression {
                regime,
                rows: n,
                c: Some(c),
                r_squared: (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot),
            }
        })
        .collect()
}

struct PointResult {
    row: BoundCertificate,
    dav2: Option<super::checks::Dav2Check>,
    interpolation: (usize, usize, Option<f64>),
}

/// Runs the whole pipeline. Stage failures are recorded in the report;
/// every (t, x) point gets a row.
pub fn run_campaign(parsed: &ParsedConfig) -> CampaignReport {
    let config = &parsed.config;
    let mut stages = Vec::new();
    let spec = config.spec().expect("validated config");
    let grid = config.grid().expect("validated config");
    let points = sample_points(config, &grid);
    let grid_meta = GridMeta {
        half_width: grid.half_width(),
        n: grid.len(),
        h: grid.spacing(),
    };

    let finish = |certificates: Vec<BoundCertificate>,
                  envelope: EnvelopeReport,
                  alpha: Option<f64>,
                  lemmas: Option<LemmaChecks>,
                  oracles: Vec<OracleRow>,
                  boundary: Option<BoundaryReport>,
                  regression: Vec<RegimeRegression>,
                  stages: Vec<StageIssue>| {
        let lemma_failures = lemmas
            .as_ref()
            .map(|l| l.interpolation.violations + l.dav2.violations + l.variational.violations)
            .unwrap_or(0);
        let failed_rows = certificates.iter().filter(|r| r.is_failed()).count();
        let summary = Summary {
            rows: certificates.len(),
            certified: certificates.iter().filter(|r| r.k_lower.is_some()).count(),
            checked: certificates.iter().filter(|r| r.is_checked()).count(),
            satisfied: certificates.iter().filter(|r| r.satisfied).count(),
            failed_rows,
            failed_checks: lemma_failures + oracles.iter().filter(|o| !o.pass).count(),
        };
        CampaignReport {
            format_version: FORMAT_VERSION,
            preamble: preamble(),
            config: config.clone(),
            defaults_applied: parsed.defaults_applied.clone(),
            spec,
            grid: grid_meta.clone(),
            envelope,
            alpha,
            certificates,
            lemmas,
            oracles,
            boundary,
            regression,
            stages,
            summary,
        }
    };
    let all_failed = |tag: Tag| -> Vec<BoundCertificate> {
        points
            .iter()
            .map(|&(t, node)| BoundCertificate::failed(t, grid.node(node), node, &spec, tag))
            .collect()
    };
    let no_envelope = EnvelopeReport {
        source: if config.hypothesis.is_some() { "config" } else { "fitted" }.into(),
        hypothesis: config.hypothesis,
        fit: None,
    };

    let lab = match Lab::build(&spec, &grid) {
        Ok(lab) => lab,
        Err(e) => {
            stages.push(StageIssue {
                stage: "assemble".into(),
                message: e.to_string(),
                fatal: true,
            });
            return finish(all_failed(Tag::Numerical), no_envelope, None, None, vec![], None, vec![], stages);
        }
    };

    let (hyp, envelope) = match config.hypothesis {
        Some(h) => (h, no_envelope.clone()),
        None => match fit_envelope(&kernel_samples(&lab, &points), lab.rho(), &fit_options(config)) {
            Ok(fit) => (
                fit.hypothesis,
                EnvelopeReport {
                    source: "fitted".into(),
                    hypothesis: Some(fit.hypothesis),
                    fit: Some(fit),
                },
            ),
            Err(e) => {
                stages.push(StageIssue {
                    stage: "fit".into(),
                    message: e.to_string(),
                    fatal: true,
                });
                let mut rows = all_failed(Tag::NoEnvelope);
                for row in &mut rows {
                    row.k_numeric = Some(lab.kernel(row.t, row.node));
                }
                return finish(rows, no_envelope, None, None, vec![], None, vec![], stages);
            }
        },
    };

    let alpha = match resolve_alpha(config.campaign.alpha.fixed(), hyp.lambda) {
        Ok(a) => a,
        Err(e) => {
            stages.push(StageIssue {
                stage: "alpha".into(),
                message: e.to_string(),
                fatal: true,
            });
            let rows = all_failed(Tag::Numerical);
            return finish(rows, envelope, None, None, vec![], None, vec![], stages);
        }
    };

    let ab_grid = interpolation_grid(config.campaign.interpolation_grid);
    let results: Vec<PointResult> = points
        .par_iter()
        .map(|&(t, node)| {
            let row = certify_point(&lab, &hyp, alpha, t, node);
            let dav2 = check_dav2_chain(lab.spectral(), node, row.x, t, &hyp, alpha, lab.rho()).ok();
            let mut checked = 0;
            let mut violations = 0;
            let mut worst: Option<f64> = None;
            for &(a, s) in &ab_grid {
                if let Ok(c) = check_interpolation(lab.spectral(), node, t, a, s) {
                    checked += 1;
                    if !c.holds {
                        violations += 1;
                    }
                    worst = Some(worst.map_or(-c.slack, |w: f64| w.max(-c.slack)));
                }
            }
            PointResult {
                row,
                dav2,
                interpolation: (checked, violations, worst),
            }
        })
        .collect();

    let mut interpolation = CheckSummary {
        name: "interpolation-campaign".into(),
        checked: 0,
        violations: 0,
        worst: None,
    };
    let mut dav2 = Dav2Summary {
        checked: 0,
        skipped: 0,
        violations: 0,
        worst: None,
    };
    let mut variational = CheckSummary {
        name: "variational-domination".into(),
        checked: 0,
        violations: 0,
        worst: None,
    };
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        interpolation.checked += r.interpolation.0;
        interpolation.violations += r.interpolation.1;
        interpolation.worst = match (interpolation.worst, r.interpolation.2) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        match r.dav2 {
            Some(d) if d.skipped => dav2.skipped += 1,
            Some(d) => {
                dav2.checked += 1;
                if d.holds == Some(false) {
                    dav2.violations += 1;
                }
                if let (Some(l), Some(h)) = (d.lhs, d.rhs) {
                    let v = (l / h).ln();
                    dav2.worst = Some(dav2.worst.map_or(v, |w: f64| w.max(v)));
                }
            }
            None => dav2.skipped += 1,
        }
        if let (Some(v), Some(g)) = (r.row.v_star, r.row.greens) {
            variational.checked += 1;
            let excess = v - g;
            if excess > DOMINATION_SLACK {
                variational.violations += 1;
            }
            variational.worst = Some(variational.worst.map_or(excess, |w: f64| w.max(excess)));
        }
        rows.push(r.row);
    }
    let lemmas = LemmaChecks {
        interpolation,
        dav2,
        variational,
        exponent_below_alpha_s: exponent_below_alpha_s(config.campaign.interpolation_grid).len(),
    };

    // Oracles: resolvent against its Laplace form at the extreme times, and
    // closed forms where the potential has one.
    let mut oracles = Vec::new();
    let (t_lo, t_hi) = (points.first().map(|p| p.0), points.last().map(|p| p.0));
    let laplace_points: Vec<(f64, usize)> = points
        .iter()
        .copied()
        .filter(|&(t, _)| Some(t) == t_lo || Some(t) == t_hi)
        .collect();
    let laplace: Vec<Result<OracleRow, String>> = laplace_points
        .par_iter()
        .map(|&(t, node)| {
            let reference = greens_by_laplace(lab.spectral(), node, t, 1e-11).map_err(|e| e.to_string())?;
            Ok(oracle(
                "resolvent-laplace",
                t,
                lab.grid().node(node),
                lab.spectral().greens_diag(t, node),
                reference,
                LAPLACE_TOLERANCE,
            ))
        })
        .collect();
    for r in laplace {
        match r {
            Ok(row) => oracles.push(row),
            Err(message) => stages.push(StageIssue {
                stage: "laplace-oracle".into(),
                message,
                fatal: true,
            }),
        }
    }
    for &(t, node) in &points {
        let x = grid.node(node);
        if let Some((name, reference, tol)) = closed_form_kernel(&spec, t, x) {
            oracles.push(oracle(name, t, x, lab.kernel(t, node), reference, tol));
        }
    }

    let mut boundary = None;
    if config.campaign.boundary_check {
        match grid.doubled() {
            None => stages.push(StageIssue {
                stage: "boundary-check".into(),
                message: format!("doubled grid would exceed the node cap; {} nodes in use", grid.len()),
                fatal: false,
            }),
            Some((big_grid, offset)) => match Lab::build(&spec, &big_grid) {
                Err(e) => stages.push(StageIssue {
                    stage: "boundary-check".into(),
                    message: e.to_string(),
                    fatal: true,
                }),
                Ok(big) => {
                    let mut report = BoundaryReport {
                        doubled_half_width: big_grid.half_width(),
                        doubled_nodes: big_grid.len(),
                        max_rel_change: 0.0,
                        flagged: 0,
                    };
                    for row in &mut rows {
                        let Some(k) = row.k_numeric else { continue };
                        let k_big = big.kernel(row.t, row.node + offset);
                        let change = ((k_big - k) / k_big).abs();
                        report.max_rel_change = report.max_rel_change.max(change);
                        if change > config.campaign.boundary_tolerance {
                            report.flagged += 1;
                            row.add_tag(Tag::BoundarySuspect);
                        }
                    }
                    boundary = Some(report);
                }
            },
        }
    }

    let regression = regress(&rows, &hyp, &spec);
    finish(rows, envelope, Some(alpha), Some(lemmas), oracles, boundary, regression, stages)
}
