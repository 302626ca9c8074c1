use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heatbound::config::{parse_config, Format, ParsedConfig};
use heatbound::report;
use heatbound::verify::campaign::{closed_form_kernel, fit_options, kernel_samples, run_campaign, sample_points};
use heatbound::verify::lemmas::exponent_below_alpha_s;
use heatbound::verify::{fit_envelope, random_interpolation_trials, sweep_about_lemma, sweep_gamma_lemma, Lab};

/// Exit statuses.
const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_CHECKS: u8 = 3;

#[derive(Parser)]
#[command(name = "heatbound", version, about = "Certified lower bounds for diagonal heat kernels")]
struct Cli {
    /// TOML configuration (defaults are used when omitted)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, overriding `output.directory`
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for the randomized interpolation trials
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (defaults to the number of CPUs)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grid checks of the closed-form lemmas (no operator is assembled)
    Lemmas,
    /// Kernel diagonal table at the campaign points
    Kernel,
    /// Fit the power-law envelope to the kernel samples
    Fit,
    /// Run the full certification campaign
    Certify,
    /// Render an existing campaign.json to a summary and plot tables
    Report,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn load_config(path: Option<&Path>) -> Result<ParsedConfig, Failure> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| fail(EXIT_CONFIG, format!("cannot read config {}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_config(&text).map_err(|e| fail(EXIT_CONFIG, e.to_string()))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| fail(EXIT_CONFIG, format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(&path, contents).map_err(|e| fail(EXIT_CONFIG, format!("cannot write {}: {e}", path.display())))
}

fn build_lab(parsed: &ParsedConfig) -> Result<Lab, Failure> {
    let config = &parsed.config;
    let spec = config.spec().map_err(|e| fail(EXIT_CONFIG, e.to_string()))?;
    let grid = config.grid().map_err(|e| fail(EXIT_CONFIG, e.to_string()))?;
    Lab::build(&spec, &grid).map_err(|e| fail(EXIT_NUMERICAL, format!("operator stage failed: {e}")))
}

fn lemmas(out: &Path, seed: u64, grid: usize) -> Result<u8, Failure> {
    let numerical = |e: heatbound::Error| fail(EXIT_NUMERICAL, e.to_string());
    let gamma = sweep_gamma_lemma().map_err(numerical)?;
    let about = sweep_about_lemma().map_err(numerical)?;
    let random = random_interpolation_trials(seed, 200, 50, grid).map_err(numerical)?;
    let below = exponent_below_alpha_s(grid);
    write(out, "lemmas.csv", &report::render_lemmas_csv(&[gamma.clone(), about.clone()]))?;

    let summaries = [gamma.summary(false), about.summary(true), random];
    let mut violations = 0;
    for s in &summaries {
        println!(
            "{}: {} points, {} violations, worst {}",
            s.name,
            s.checked,
            s.violations,
            s.worst.map_or("n/a".to_string(), |w| format!("{w:e}"))
        );
        violations += s.violations;
    }
    println!("interpolation grid points with p <= alpha*s: {}", below.len());
    Ok(if violations == 0 { 0 } else { EXIT_CHECKS })
}

fn kernel(parsed: &ParsedConfig, out: &Path) -> Result<u8, Failure> {
    let lab = build_lab(parsed)?;
    let points = sample_points(&parsed.config, lab.grid());
    let mut csv = String::from("t,x,k_numeric,reference\n");
    for s in kernel_samples(&lab, &points) {
        let reference = closed_form_kernel(lab.spec(), s.t, s.x).map(|(_, v, _)| report::num(v));
        csv.push_str(&format!(
            "{},{},{},{}\n",
            report::num(s.t),
            report::num(s.x),
            report::num(s.k),
            reference.unwrap_or_default()
        ));
    }
    write(out, "kernel.csv", &csv)?;
    println!("wrote {} kernel values to {}", points.len(), out.join("kernel.csv").display());
    Ok(0)
}

fn fit(parsed: &ParsedConfig, out: &Path) -> Result<u8, Failure> {
    let lab = build_lab(parsed)?;
    let points = sample_points(&parsed.config, lab.grid());
    let samples = kernel_samples(&lab, &points);
    let fit = fit_envelope(&samples, lab.rho(), &fit_options(&parsed.config))
        .map_err(|e| fail(EXIT_NUMERICAL, format!("envelope fit failed: {e}")))?;
    let h = fit.hypothesis;
    println!("sigma = {}\nmu = {}\nlambda = {}", h.sigma, h.mu, h.lambda);
    if fit.lambda_clipped {
        println!("lambda clipped from {}", fit.ls_lambda);
    }
    if fit.mu_clipped {
        println!("mu clipped from {}", fit.ls_mu);
    }
    let mut json = serde_json::to_string_pretty(&fit).expect("fit serializes");
    json.push('\n');
    write(out, "envelope.json", &json)?;
    Ok(0)
}

fn report_status(report: &heatbound::verify::CampaignReport) -> u8 {
    if report.has_stage_failures() {
        EXIT_NUMERICAL
    } else if report.summary.failed_rows + report.summary.failed_checks > 0 {
        EXIT_CHECKS
    } else {
        0
    }
}

fn write_plots(out: &Path, report: &heatbound::verify::CampaignReport) -> Result<(), Failure> {
    for (name, body) in report::render_plots(report) {
        write(out, &format!("plots/{name}"), &body)?;
    }
    Ok(())
}

fn certify(parsed: &ParsedConfig, out: &Path) -> Result<u8, Failure> {
    let campaign = run_campaign(parsed);
    let formats = &parsed.config.output.formats;
    if formats.contains(&Format::Csv) {
        write(out, "campaign.csv", &report::render_csv(&campaign))?;
    }
    if formats.contains(&Format::Json) {
        write(out, "campaign.json", &report::render_json(&campaign))?;
    }
    if formats.contains(&Format::Plots) {
        write_plots(out, &campaign)?;
    }
    print!("{}", report::render_summary(&campaign));
    Ok(report_status(&campaign))
}

fn render(out: &Path) -> Result<u8, Failure> {
    let path = out.join("campaign.json");
    let text = fs::read_to_string(&path)
        .map_err(|e| fail(EXIT_CONFIG, format!("cannot read campaign file {}: {e}", path.display())))?;
    let campaign = report::parse_json(&text)
        .map_err(|e| fail(EXIT_CONFIG, format!("{} is not a campaign report: {e}", path.display())))?;
    let summary = report::render_summary(&campaign);
    write(out, "summary.txt", &summary)?;
    write_plots(out, &campaign)?;
    print!("{summary}");
    Ok(report_status(&campaign))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let parsed = load_config(cli.config.as_deref())?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&parsed.config.output.directory));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(fail(EXIT_CONFIG, "--threads must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| fail(EXIT_CONFIG, format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Lemmas => lemmas(&out, cli.seed, parsed.config.campaign.interpolation_grid),
        Command::Kernel => kernel(&parsed, &out),
        Command::Fit => fit(&parsed, &out),
        Command::Certify => certify(&parsed, &out),
        Command::Report => render(&out),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
