//! Command-line front end: `period`, `bound`, `verify`, `table` and
//! `sequence`, each printing text, CSV or JSON.

use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pisano::{
    analyze, bound_for_prime, sequence_slice, tightness_survey, verify_range, BoundResult, Error,
    PeriodReport, RecurrenceSpec, TightnessRow,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pisano",
    version,
    about = "Periods of E(n+1) = A*E(n) + B*E(n-1) modulo m"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Period of the recurrence modulo m, by every applicable method.
    Period {
        #[arg(long)]
        modulus: u64,
        #[command(flatten)]
        coeffs: Coeffs,
        #[command(flatten)]
        output: Output,
    },
    /// Divisibility bound on the period modulo a prime.
    Bound {
        #[arg(long)]
        prime: u64,
        #[command(flatten)]
        coeffs: Coeffs,
        #[command(flatten)]
        output: Output,
    },
    /// Checks the period against its bound for every odd prime up to a limit.
    Verify {
        #[arg(long)]
        max_prime: u64,
        #[command(flatten)]
        coeffs: Coeffs,
        #[command(flatten)]
        output: Output,
    },
    /// Period versus bound, with tightness, for every bounded prime up to a limit.
    Table {
        #[arg(long)]
        max_prime: u64,
        #[command(flatten)]
        coeffs: Coeffs,
        #[command(flatten)]
        output: Output,
    },
    /// The first terms E(0), E(1), ... modulo m.
    Sequence {
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        coeffs: Coeffs,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Coeffs {
    /// Coefficient A of E(n).
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub a: i64,
    /// Coefficient B of E(n-1).
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub b: i64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Internal(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidModulus { .. }
            | Error::NotPurelyPeriodic { .. }
            | Error::WrongModulus { .. }
            | Error::NotPrimePower { .. }
            | Error::NotInvertible { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            EXIT_USAGE
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_VIOLATION
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_VIOLATION
        }
    }
}

fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match *cmd {
        Command::Period {
            modulus,
            coeffs,
            output,
        } => {
            let spec = RecurrenceSpec::new(coeffs.a, coeffs.b, modulus)?;
            let report = analyze(&spec)?;
            write_period(out, &report, output.format)?;
            Ok(EXIT_OK)
        }
        Command::Bound {
            prime,
            coeffs,
            output,
        } => {
            let result = bound_for_prime(coeffs.a, coeffs.b, prime)?;
            write_bound(out, &result, output.format)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            max_prime,
            coeffs,
            output,
        } => {
            let reports = verify_range(coeffs.a, coeffs.b, max_prime)?;
            write_verify(out, &reports, output.format)?;
            let violations: Vec<u64> = reports
                .iter()
                .filter(|r| r.violates_bound())
                .map(|r| r.spec.modulus())
                .collect();
            writeln!(
                err,
                "verified {} primes, {} violations",
                reports.len(),
                violations.len()
            )?;
            if violations.is_empty() {
                Ok(EXIT_OK)
            } else {
                writeln!(err, "violations at p = {violations:?}")?;
                Ok(EXIT_VIOLATION)
            }
        }
        Command::Table {
            max_prime,
            coeffs,
            output,
        } => {
            let survey = tightness_survey(coeffs.a, coeffs.b, max_prime)?;
            write_rows(
                out,
                &survey.rows,
                output.format,
                table_text_row,
                TABLE_HEADER,
            )?;
            if output.format == Format::Text {
                writeln!(
                    out,
                    "tight {}/{}, non-tight {:?}",
                    survey.tight,
                    survey.rows.len(),
                    survey.non_tight_primes()
                )?;
            }
            writeln!(
                err,
                "{} tight, {} non-tight ({:.1}% tight)",
                survey.tight,
                survey.non_tight,
                100.0 * survey.tight_fraction()
            )?;
            Ok(EXIT_OK)
        }
        Command::Sequence {
            modulus,
            count,
            coeffs,
            output,
        } => {
            if count == 0 {
                return Err(Failure::Usage("--count must be at least 1".into()));
            }
            let spec = RecurrenceSpec::new(coeffs.a, coeffs.b, modulus)?;
            let values = sequence_slice(&spec, count);
            write_sequence(out, &spec, &values, output.format)?;
            Ok(EXIT_OK)
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn methods_field(r: &PeriodReport) -> String {
    r.method_agreement
        .iter()
        .map(|m| format!("{}={}", m.method, m.period))
        .collect::<Vec<_>>()
        .join(";")
}

/// Flat CSV form of a [`PeriodReport`].
#[derive(Serialize)]
struct PeriodRow {
    a: i64,
    b: i64,
    m: u64,
    delta: u64,
    period: u128,
    classification: String,
    bound: Option<u128>,
    theorem: String,
    divides_bound: bool,
    tight: bool,
    methods: String,
}

impl From<&PeriodReport> for PeriodRow {
    fn from(r: &PeriodReport) -> Self {
        PeriodRow {
            a: r.spec.a(),
            b: r.spec.b(),
            m: r.spec.modulus(),
            delta: r.spec.delta_mod(),
            period: r.period,
            classification: r.classification.to_string(),
            bound: r.bound,
            theorem: r.theorem.to_string(),
            divides_bound: r.divides_bound,
            tight: r.tight,
            methods: methods_field(r),
        }
    }
}

fn write_csv<S: Serialize>(
    out: &mut dyn Write,
    rows: impl IntoIterator<Item = S>,
) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<S: Serialize + ?Sized>(out: &mut dyn Write, value: &S) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Left-aligned columns separated by two spaces.
fn write_table(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

fn write_key_values(out: &mut dyn Write, pairs: &[(&str, String)]) -> io::Result<()> {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in pairs {
        writeln!(out, "{k:<width$}  {v}")?;
    }
    Ok(())
}

fn write_period(out: &mut dyn Write, r: &PeriodReport, format: Format) -> Result<(), Failure> {
    match format {
        Format::Json => write_json(out, r),
        Format::Csv => write_csv(out, [PeriodRow::from(r)]),
        Format::Text => {
            let s = &r.spec;
            write_key_values(
                out,
                &[
                    ("recurrence", s.to_string()),
                    ("delta", s.delta_mod().to_string()),
                    ("period", r.period.to_string()),
                    ("classification", r.classification.to_string()),
                    ("bound", opt(r.bound)),
                    ("theorem", r.theorem.to_string()),
                    ("divides_bound", r.divides_bound.to_string()),
                    ("tight", r.tight.to_string()),
                    ("methods", methods_field(r).replace(';', " ")),
                ],
            )?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct BoundRow {
    p: u64,
    a: i64,
    b: i64,
    classification: String,
    bound: Option<u128>,
    theorem: String,
}

fn write_bound(out: &mut dyn Write, r: &BoundResult, format: Format) -> Result<(), Failure> {
    match format {
        Format::Json => write_json(out, r),
        Format::Csv => write_csv(
            out,
            [BoundRow {
                p: r.p,
                a: r.a,
                b: r.b,
                classification: r.classification.to_string(),
                bound: r.bound,
                theorem: r.theorem.to_string(),
            }],
        ),
        Format::Text => {
            write_key_values(
                out,
                &[
                    ("p", r.p.to_string()),
                    ("a", r.a.to_string()),
                    ("b", r.b.to_string()),
                    ("classification", r.classification.to_string()),
                    ("bound", opt(r.bound)),
                    ("theorem", r.theorem.to_string()),
                ],
            )?;
            Ok(())
        }
    }
}

const VERIFY_HEADER: &[&str] = &[
    "p",
    "classification",
    "period",
    "bound",
    "theorem",
    "divides_bound",
    "tight",
];

fn write_verify(
    out: &mut dyn Write,
    reports: &[PeriodReport],
    format: Format,
) -> Result<(), Failure> {
    match format {
        Format::Json => write_json(out, reports),
        Format::Csv => write_csv(out, reports.iter().map(PeriodRow::from)),
        Format::Text => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.spec.modulus().to_string(),
                        r.classification.to_string(),
                        r.period.to_string(),
                        opt(r.bound),
                        r.theorem.to_string(),
                        r.divides_bound.to_string(),
                        r.tight.to_string(),
                    ]
                })
                .collect();
            write_table(out, VERIFY_HEADER, &rows)?;
            Ok(())
        }
    }
}

const TABLE_HEADER: &[&str] = &["p", "period", "bound", "tight"];

fn table_text_row(r: &TightnessRow) -> Vec<String> {
    vec![
        r.p.to_string(),
        r.period.to_string(),
        r.bound.to_string(),
        r.tight.to_string(),
    ]
}

fn write_rows<R: Serialize>(
    out: &mut dyn Write,
    rows: &[R],
    format: Format,
    text_row: fn(&R) -> Vec<String>,
    header: &[&str],
) -> Result<(), Failure> {
    match format {
        Format::Json => write_json(out, rows),
        Format::Csv => write_csv(out, rows),
        Format::Text => {
            let cells: Vec<Vec<String>> = rows.iter().map(text_row).collect();
            write_table(out, header, &cells)?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SequenceOut<'a> {
    a: i64,
    b: i64,
    m: u64,
    count: usize,
    values: &'a [u64],
}

#[derive(Serialize)]
struct SequenceRow {
    n: usize,
    value: u64,
}

fn write_sequence(
    out: &mut dyn Write,
    spec: &RecurrenceSpec,
    values: &[u64],
    format: Format,
) -> Result<(), Failure> {
    match format {
        Format::Json => write_json(
            out,
            &SequenceOut {
                a: spec.a(),
                b: spec.b(),
                m: spec.modulus(),
                count: values.len(),
                values,
            },
        ),
        Format::Csv => write_csv(
            out,
            values
                .iter()
                .enumerate()
                .map(|(n, &value)| SequenceRow { n, value }),
        ),
        Format::Text => {
            let joined: Vec<String> = values.iter().map(u64::to_string).collect();
            writeln!(out, "{}", joined.join(", "))?;
            Ok(())
        }
    }
}
