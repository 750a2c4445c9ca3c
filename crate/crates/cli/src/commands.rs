use std::io::Write;

use anyhow::{anyhow, Context};
use gaussian_hellinger::discord::{self, CorrelationReport, ProductStateParams};
use gaussian_hellinger::oracle::OptimizerConfig;
use gaussian_hellinger::sweep::{Measure, SweepRow, SweepSpec};
use gaussian_hellinger::symplectic::StandardForm;
use gaussian_hellinger::tolerance::Tolerances;
use gaussian_hellinger::verify::{self, SuiteResult, VerifyConfig, VerifySummary};
use gaussian_hellinger::{Error, Execution};
use serde::Serialize;

use crate::args::{Cli, Command, OutFormat, ReportArgs, SweepArgs, VerifyArgs};
use crate::format;
use crate::input::{self, InputEcho};

pub const SCHEMA: u32 = 1;
pub const PROFILE_ENV: &str = "GHK_TOLERANCE_PROFILE";

#[derive(Debug)]
pub enum Failure {
    /// Unparseable, inconsistent or unphysical input.
    Invalid(anyhow::Error),
    /// A verification suite exceeded its tolerance.
    Breach,
    Io(std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Breach => 1,
            Failure::Invalid(_) | Failure::Io(_) => 2,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPhysical(_) => Failure::Invalid(anyhow!("not physical: {e}")),
            other => Failure::Invalid(other.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

#[derive(Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
}

const PROVENANCE: Provenance = Provenance {
    tool: "ghk",
    version: env!("CARGO_PKG_VERSION"),
    library_version: gaussian_hellinger::VERSION,
};

#[derive(Serialize)]
struct ProductDoc {
    cm: Vec<Vec<f64>>,
    mean: Vec<f64>,
    /// Parameters of the square-root state in the standard-form frame.
    sqrt_params: ProductStateParams,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    schema: u32,
    provenance: Provenance,
    input: &'a InputEcho,
    cm: Vec<Vec<f64>>,
    mean: [f64; 4],
    standard_form: StandardForm,
    report: &'a CorrelationReport,
    closest_product: ProductDoc,
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

const REPORT_FORM_COLUMNS: [&str; 8] = ["kappa1", "kappa2", "b1", "b2", "c", "d", "s1", "s2"];

fn report(args: &ReportArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let input = input::resolve(args)?;
    let report = discord::correlation_report(&input.cm, &input.mean)?;
    let closest = discord::closest_product_state(&input.cm, &input.mean)?;
    match args.out {
        OutFormat::Json => write_json(
            out,
            &ReportDoc {
                schema: SCHEMA,
                provenance: PROVENANCE,
                input: &input.echo,
                cm: input.cm.to_rows(),
                mean: input.mean,
                standard_form: report.standard_form,
                report: &report,
                closest_product: ProductDoc {
                    cm: closest.state.cm().to_rows(),
                    mean: closest.state.mean().iter().copied().collect(),
                    sqrt_params: closest.params,
                },
            },
        ),
        OutFormat::Csv => {
            let header: Vec<&str> = Measure::ALL
                .iter()
                .map(|m| m.name())
                .chain(REPORT_FORM_COLUMNS)
                .collect();
            let sf = report.standard_form;
            let (k1, k2) = report.symplectic_spectrum;
            let cells: Vec<String> = Measure::ALL
                .iter()
                .map(|m| format::cell(m.value(&report)))
                .chain([k1, k2, sf.b1, sf.b2, sf.c, sf.d, sf.s1, sf.s2].map(format::number))
                .collect();
            writeln!(out, "{}", header.join(","))?;
            writeln!(out, "{}", cells.join(","))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SweepRowDoc<'a> {
    value: f64,
    physical: bool,
    error: Option<&'a str>,
    values: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    schema: u32,
    provenance: Provenance,
    spec: &'a SweepSpec,
    columns: Vec<&'static str>,
    rows: Vec<SweepRowDoc<'a>>,
}

fn sweep_spec(args: &SweepArgs) -> anyhow::Result<SweepSpec> {
    let spec = SweepSpec {
        family: args.family,
        fixed: input::parse_assignments(&args.fixed)?,
        sweep_param: args.sweep_param.clone(),
        range: args.range,
        outputs: if args.columns.is_empty() {
            Measure::ALL.to_vec()
        } else {
            args.columns.clone()
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = sweep_spec(args)?;
    let rows: Vec<SweepRow> = spec.run(Execution::default())?;
    let flagged = rows.iter().filter(|r| !r.physical()).count();
    if flagged > 0 {
        eprintln!(
            "note: {flagged} of {} points are not physical states; flagged with physical=false",
            rows.len()
        );
    }
    match args.out {
        OutFormat::Csv => {
            let mut header = vec![spec.sweep_param.as_str(), "physical"];
            header.extend(spec.outputs.iter().map(|m| m.name()));
            writeln!(out, "{}", header.join(","))?;
            for row in &rows {
                let mut cells = vec![format::number(row.value), row.physical().to_string()];
                cells.extend(spec.outputs.iter().map(|&m| format::cell(row.measure(m))));
                writeln!(out, "{}", cells.join(","))?;
            }
            Ok(())
        }
        OutFormat::Json => write_json(
            out,
            &SweepDoc {
                schema: SCHEMA,
                provenance: PROVENANCE,
                spec: &spec,
                columns: spec.outputs.iter().map(|m| m.name()).collect(),
                rows: rows
                    .iter()
                    .map(|row| SweepRowDoc {
                        value: row.value,
                        physical: row.physical(),
                        error: row.error.as_deref(),
                        values: spec.outputs.iter().map(|&m| row.measure(m)).collect(),
                    })
                    .collect(),
            },
        ),
    }
}

fn tolerances(profile: Option<&str>) -> anyhow::Result<(String, Tolerances)> {
    let name = profile.unwrap_or("default").trim().to_ascii_lowercase();
    let name = if name.is_empty() { "default".to_string() } else { name };
    let tol = Tolerances::profile(&name)
        .ok_or_else(|| anyhow!("{PROFILE_ENV} must be 'default' or 'strict', got '{name}'"))?;
    Ok((name, tol))
}

fn describe_form(sf: &StandardForm) -> String {
    format!(
        "b1={} b2={} c={} d={} s1={} s2={}",
        sf.b1, sf.b2, sf.c, sf.d, sf.s1, sf.s2
    )
}

fn print_table(out: &mut dyn Write, profile: &str, summary: &VerifySummary) -> std::io::Result<()> {
    writeln!(
        out,
        "seed {}, trials {}, tolerance profile {profile}",
        summary.seed, summary.trials
    )?;
    writeln!(
        out,
        "{:<26} {:>7} {:>14} {:>10}  status",
        "suite", "checks", "max deviation", "tolerance"
    )?;
    for s in &summary.suites {
        writeln!(
            out,
            "{:<26} {:>7} {:>14.3e} {:>10.0e}  {}",
            s.name,
            s.checks,
            s.max_deviation,
            s.tolerance,
            if s.passed { "ok" } else { "BREACH" }
        )?;
    }
    Ok(())
}

fn print_breach(out: &mut dyn Write, s: &SuiteResult) -> std::io::Result<()> {
    write!(
        out,
        "breach in {}: max deviation {:e} > tolerance {:e}",
        s.name, s.max_deviation, s.tolerance
    )?;
    if let Some(sf) = &s.worst {
        write!(out, " at standard form {}", describe_form(sf))?;
    }
    if let Some(note) = &s.note {
        write!(out, " ({note})")?;
    }
    writeln!(out)
}

fn verify_cmd(args: &VerifyArgs, profile: Option<&str>, out: &mut dyn Write) -> Result<(), Failure> {
    let (profile, tolerances) = tolerances(profile)?;
    let cfg = VerifyConfig {
        seed: args.seed,
        trials: usize::try_from(args.trials).context("--trials too large")?,
        tolerances,
        optimizer: OptimizerConfig {
            starts: usize::try_from(args.starts).context("--starts too large")?,
            ..OptimizerConfig::default()
        },
        breach: args.inject_breach,
        ..VerifyConfig::default()
    };
    let summary = verify::run_verification(&cfg)?;
    if args.json {
        #[derive(Serialize)]
        struct VerifyDoc<'a> {
            schema: u32,
            provenance: Provenance,
            profile: &'a str,
            passed: bool,
            summary: &'a VerifySummary,
        }
        write_json(
            out,
            &VerifyDoc {
                schema: SCHEMA,
                provenance: PROVENANCE,
                profile: &profile,
                passed: summary.passed(),
                summary: &summary,
            },
        )?;
    } else {
        print_table(out, &profile, &summary)?;
        for s in summary.suites.iter().filter(|s| !s.passed) {
            print_breach(out, s)?;
        }
    }
    if summary.passed() {
        Ok(())
    } else {
        Err(Failure::Breach)
    }
}

/// Runs a parsed command. `profile` is the value of the tolerance-profile environment variable.
pub fn run(cli: &Cli, profile: Option<&str>, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Report(a) => report(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Verify(a) => verify_cmd(a, profile, out),
    }
}
