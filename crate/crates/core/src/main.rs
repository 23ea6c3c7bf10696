use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use infpot::export::{self, Format};
use infpot::fd::{self, GridSpec};
use infpot::field::{DiagonalValue, Matrix2};
use infpot::verify::{self, Suite};
use infpot::{Error, Form, PlanePoint, Potential, SeriesPolicy, SolverPolicy};

#[derive(Parser)]
#[command(name = "infpot", version, about = "Infinity-potential of the punctured square (0, 2)^2")]
struct Cli {
    /// Absolute truncation tolerance of every series
    #[arg(long, global = true, default_value = "1e-15")]
    abs_tol: f64,

    /// Residual tolerance of the nested root solves
    #[arg(long, global = true, default_value = "1e-13")]
    root_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Series,
    Minimax,
    Field,
    Analysis,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Series => Suite::Series,
            SuiteArg::Minimax => Suite::Minimax,
            SuiteArg::Field => Suite::Field,
            SuiteArg::Analysis => Suite::Analysis,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Value, gradient, Hessian and region tag at one point of [0, 2]^2
    Eval {
        #[arg(allow_negative_numbers = true)]
        x: f64,
        #[arg(allow_negative_numbers = true)]
        y: f64,
    },
    /// Sample the field on an nx x ny grid of [0, 2]^2 (rows y outer, x inner)
    Grid {
        #[arg(long, default_value_t = 101)]
        nx: usize,
        #[arg(long, default_value_t = 101)]
        ny: usize,
        /// Output file; standard output if omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// u and |grad u| at n points s (1, 1)/sqrt2 of the diagonal, s in [0, sqrt2]
    Diagonal {
        #[arg(long, default_value_t = 101)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Run invariant suites and print a JSON report; exit code 1 on failure
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Finite-difference solve on an n x n grid compared with the analytic field
    Oracle {
        /// Nodes per side (odd, at least 17)
        #[arg(long, default_value_t = 101)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        stencil_radius: usize,
        /// Discrete grid (csv, same layout as `grid`) or full comparison with per-node gaps (json)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Jacobi theta2(z, q) in every applicable form
    Theta {
        #[arg(allow_negative_numbers = true)]
        z: f64,
        q: f64,
    },
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Serialize)]
struct EvalReport {
    x: f64,
    y: f64,
    u: f64,
    grad: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grad_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hessian: Option<Matrix2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hessian_reason: Option<String>,
    region: String,
}

#[derive(Serialize)]
struct ThetaReport {
    z: f64,
    q: f64,
    series: Option<f64>,
    product: Option<f64>,
    modular: Option<f64>,
    preferred: Form,
}

#[derive(Serialize)]
struct OracleSummary {
    n: usize,
    stencil_radius: usize,
    sup_gap: f64,
    l2_gap: f64,
    sweeps: usize,
    residual: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn potential(cli: &Cli) -> Result<Potential, Failure> {
    let series = SeriesPolicy { abs_tol: cli.abs_tol, ..SeriesPolicy::default() };
    let solver = SolverPolicy { root_tol: cli.root_tol, ..SolverPolicy::default() };
    Ok(Potential::new(series, solver)?)
}

/// Runs `write` against the file at `out`, or standard output.
fn emit(out: &Option<PathBuf>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let result = match out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            write(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w).and_then(|_| w.flush())
        }
    };
    result.map_err(|e| match out {
        Some(path) => Failure::Usage(format!("cannot write {}: {e}", path.display())),
        None => Failure::Usage(format!("cannot write to standard output: {e}")),
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    emit(&None, |w| export::write_json(value, w))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let pot = potential(&cli)?;
    match cli.command {
        Command::Eval { x, y } => {
            let p = PlanePoint::new(x, y)?;
            let sample = pot.sample(p)?;
            let grad_reason = sample.grad.is_none().then(|| "gradient undefined at the centre and at the corners".into());
            let hessian_reason = match sample.hessian {
                Some(_) => None,
                None => Some(match pot.eval_hessian(p) {
                    Err(e) => e.to_string(),
                    Ok(_) => "within the conditioning band of a diagonal or median".into(),
                }),
            };
            print_json(&EvalReport {
                x,
                y,
                u: sample.u,
                grad: sample.grad,
                grad_reason,
                hessian: sample.hessian,
                hessian_reason,
                region: sample.region.to_string(),
            })
        }
        Command::Grid { nx, ny, out, format } => {
            let samples = export::sample_grid(&pot, nx, ny)?;
            emit(&out, |w| export::write_samples(&samples, format.into(), w))
        }
        Command::Diagonal { n, out, format } => {
            if n < 2 {
                return Err(Failure::Usage(format!("diagonal needs n >= 2, got {n}")));
            }
            let rows = (0..n)
                .map(|k| pot.diagonal_value(std::f64::consts::SQRT_2 * k as f64 / (n - 1) as f64))
                .collect::<Result<Vec<DiagonalValue>, Error>>()?;
            emit(&out, |w| match Format::from(format) {
                Format::Json => export::write_json(&rows, w),
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(w);
                    c.write_record(["s", "u", "g"])?;
                    for r in &rows {
                        c.write_record([format!("{:?}", r.s), format!("{:?}", r.u), format!("{:?}", r.g)])?;
                    }
                    c.flush()
                }
            })
        }
        Command::Verify { suite } => {
            let report = verify::run(suite.into(), &pot);
            print_json(&report)?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Oracle { n, stencil_radius, out, format } => {
            let spec = GridSpec { stencil_radius, ..GridSpec::new(n) };
            let sol = fd::solve_discrete(spec)?;
            let cmp = fd::compare_solution(&sol, &pot)?;
            if out.is_some() {
                match Format::from(format) {
                    Format::Csv => {
                        let rows = export::discrete_samples(&sol)?;
                        emit(&out, |w| export::write_csv(&rows, w))?;
                    }
                    Format::Json => emit(&out, |w| export::write_json(&cmp, w))?,
                }
            }
            print_json(&OracleSummary {
                n,
                stencil_radius,
                sup_gap: cmp.sup_gap,
                l2_gap: cmp.l2_gap,
                sweeps: cmp.sweeps,
                residual: cmp.residual,
            })
        }
        Command::Theta { z, q } => {
            let policy = &pot.series;
            let series = infpot::series::theta2(z, q, Form::Series, policy);
            if let Err(e @ Error::Domain(_)) = &series {
                return Err(Failure::Usage(e.to_string()));
            }
            print_json(&ThetaReport {
                z,
                q,
                series: series.ok(),
                product: infpot::series::theta2(z, q, Form::Product, policy).ok(),
                modular: infpot::series::theta2(z, q, Form::Modular, policy).ok(),
                preferred: Form::preferred(q),
            })
        }
    }
}
