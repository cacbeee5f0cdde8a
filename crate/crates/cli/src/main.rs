use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasinv::channels::{random_channel, validate_cptp, CptpReport, MAX_RANDOM_KRAUS};
use quasinv::inverter::quasi_inverse_unchecked;
use quasinv::metrics::{mstd_analytic, mstd_monte_carlo_with_workers, mstd_surface_analytic, MstdReport, Region};
use quasinv::numerics::{RngStream, Vec3, Vec4};
use quasinv::oracle::{verify, VerificationReport};
use quasinv::zoo::{self, FamilySpec};
use serde::Serialize;
use serde_json::json;

mod document;
mod output;

use document::{from_complex, ChannelDocument, ComplexMatrix, Parsed};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Numeric(#[from] quasinv::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Numeric(_) => "numeric",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

const EXIT_CPTP: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "quasinv", version, about = "Unitary quasi-inverses of single-qubit channels")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a channel and compute its quasi-inverse.
    Analyze(Input),
    /// Mean square trace distance of a channel.
    Mstd {
        #[command(flatten)]
        input: Input,
        /// Estimate by Monte Carlo with this many samples.
        #[arg(long, value_name = "N")]
        monte_carlo: Option<usize>,
        /// Average over the Bloch sphere surface instead of the ball.
        #[arg(long)]
        surface: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a Kraus document for a named channel family.
    Zoo {
        #[arg(value_enum)]
        family: Family,
        /// Family parameters, e.g. `pauli p0 p1 p2 p3`, `gad gamma p`,
        /// `mixed-unitary p theta`, `tetrahedron p p'`, `unitary theta [nx ny nz]`.
        #[arg(allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Stream seeded random channels, one document per line.
    Random {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=MAX_RANDOM_KRAUS as u64))]
        kraus: u64,
    },
    /// Check the quasi-inverse against a brute-force search over unitaries.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scale the reported solver delta before checking (fault injection).
        #[arg(long, hide = true)]
        corrupt_delta: Option<f64>,
    },
}

#[derive(Args)]
struct Input {
    /// Channel document path, or `-` for standard input.
    path: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Pauli,
    Gad,
    #[value(alias = "mixed_unitary")]
    MixedUnitary,
    Tetrahedron,
    Unitary,
}

#[derive(Serialize)]
struct AffineDoc {
    m: [[f64; 3]; 3],
    c: Vec3,
}

#[derive(Serialize)]
struct UnitaryDoc {
    x0: f64,
    x: Vec3,
    matrix: ComplexMatrix,
}

#[derive(Serialize)]
struct Inversion {
    mstd_before: f64,
    q_matrix: [[f64; 4]; 4],
    lambda_max: f64,
    quasi_inverse: UnitaryDoc,
    delta_mstd: f64,
    mstd_after: f64,
    degenerate: bool,
    trivial: bool,
}

#[derive(Serialize)]
struct ResultDocument {
    input: ChannelDocument,
    affine: AffineDoc,
    cptp: CptpReport,
    #[serde(flatten)]
    inversion: Option<Inversion>,
}

#[derive(Serialize)]
struct MstdDocument {
    channel_id: String,
    region: &'static str,
    #[serde(flatten)]
    report: MstdReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

struct Printer(Format);

impl Printer {
    fn emit<T: Serialize>(&self, value: &T) {
        match self.0 {
            Format::Json => println!("{}", output::to_json_line(value)),
            Format::Table => print!("{}", output::to_table(value)),
        }
    }
}

fn read_document(path: &str) -> Result<ChannelDocument, CliError> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Parse(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {path}: {e}")))?
    };
    ChannelDocument::parse(&text)
}

struct Loaded {
    doc: ChannelDocument,
    affine: quasinv::AffineChannel,
    cptp: CptpReport,
}

fn load(path: &str) -> Result<Loaded, CliError> {
    let doc = read_document(path)?;
    let parsed = doc.build()?;
    let cptp = match &parsed {
        Parsed::Kraus(k) => validate_cptp(k)?,
        Parsed::Affine(a) => validate_cptp(a)?,
    };
    Ok(Loaded {
        affine: parsed.affine(),
        doc,
        cptp,
    })
}

fn cptp_failure(out: &Printer, l: Loaded) -> u8 {
    eprintln!(
        "channel is not CPTP (min Choi eigenvalue {:e})",
        l.cptp.min_choi_eigenvalue
    );
    out.emit(&ResultDocument {
        input: l.doc,
        affine: AffineDoc {
            m: l.affine.m().0,
            c: *l.affine.c(),
        },
        cptp: l.cptp,
        inversion: None,
    });
    EXIT_CPTP
}

fn analyze(out: &Printer, input: &Input) -> Result<u8, CliError> {
    let l = load(&input.path)?;
    if !l.cptp.passed {
        return Ok(cptp_failure(out, l));
    }
    let r = quasi_inverse_unchecked(&l.affine)?;
    let doc = ResultDocument {
        affine: AffineDoc {
            m: l.affine.m().0,
            c: *l.affine.c(),
        },
        cptp: l.cptp,
        inversion: Some(Inversion {
            mstd_before: r.mstd_before,
            q_matrix: r.q.matrix().to_full(),
            lambda_max: r.lambda_max,
            quasi_inverse: UnitaryDoc {
                x0: r.params.x0(),
                x: r.params.x(),
                matrix: from_complex(&r.unitary),
            },
            delta_mstd: r.delta_mstd,
            mstd_after: r.mstd_after,
            degenerate: r.degenerate,
            trivial: r.trivial,
        }),
        input: l.doc,
    };
    out.emit(&doc);
    Ok(0)
}

fn mstd(out: &Printer, input: &Input, monte_carlo: Option<usize>, surface: bool, seed: u64) -> Result<u8, CliError> {
    let l = load(&input.path)?;
    if !l.cptp.passed {
        return Ok(cptp_failure(out, l));
    }
    let region = if surface { Region::Surface } else { Region::Ball };
    let report = match monte_carlo {
        Some(n) => {
            let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
            mstd_monte_carlo_with_workers(&l.affine, n, &mut RngStream::new(seed), region, workers)
                .map_err(|e| match e {
                    quasinv::Error::InvalidParameter(m) => CliError::Parse(m),
                    other => other.into(),
                })?
        }
        None if surface => mstd_surface_analytic(&l.affine),
        None => mstd_analytic(&l.affine),
    };
    out.emit(&MstdDocument {
        channel_id: l.doc.id(),
        region: if surface { "surface" } else { "ball" },
        report,
        seed: monte_carlo.map(|_| seed),
    });
    Ok(0)
}

fn family_spec(family: Family, params: &[f64]) -> Result<FamilySpec, CliError> {
    let want = |n: &[usize], usage: &str| {
        if n.contains(&params.len()) {
            Ok(())
        } else {
            Err(CliError::Parse(format!("expected parameters {usage}, got {}", params.len())))
        }
    };
    Ok(match family {
        Family::Pauli => {
            want(&[4], "p0 p1 p2 p3")?;
            FamilySpec::Pauli {
                p: [params[0], params[1], params[2], params[3]],
            }
        }
        Family::Gad => {
            want(&[2], "gamma p")?;
            FamilySpec::Gad {
                gamma: params[0],
                p: params[1],
            }
        }
        Family::MixedUnitary => {
            want(&[2], "p theta")?;
            FamilySpec::MixedUnitary {
                p: params[0],
                theta: params[1],
            }
        }
        Family::Tetrahedron => {
            want(&[2], "p p'")?;
            FamilySpec::Tetrahedron {
                p: params[0],
                p_prime: params[1],
            }
        }
        Family::Unitary => {
            want(&[1, 4], "theta [nx ny nz]")?;
            let axis = if params.len() == 4 { [params[1], params[2], params[3]] } else { [0.0, 0.0, 1.0] };
            FamilySpec::Rotation { theta: params[0], axis }
        }
    })
}

fn family_label(spec: &FamilySpec) -> String {
    let args = match *spec {
        FamilySpec::Pauli { p } => format!("p={p:?}"),
        FamilySpec::Gad { gamma, p } => format!("gamma={gamma}, p={p}"),
        FamilySpec::MixedUnitary { p, theta } => format!("p={p}, theta={theta}"),
        FamilySpec::Tetrahedron { p, p_prime } => format!("p={p}, p'={p_prime}"),
        FamilySpec::Rotation { theta, axis } => format!("theta={theta}, axis={axis:?}"),
    };
    format!("{}({args})", spec.name())
}

fn zoo_cmd(out: &Printer, family: Family, params: &[f64]) -> Result<u8, CliError> {
    let spec = family_spec(family, params)?;
    let (k, _) = zoo::make(&spec).map_err(|e| CliError::Parse(e.to_string()))?;
    out.emit(&ChannelDocument::from_kraus(&k, Some(family_label(&spec))));
    Ok(0)
}

fn random_cmd(out: &Printer, count: u64, seed: u64, kraus: u64) -> Result<u8, CliError> {
    let mut rng = RngStream::new(seed);
    for i in 0..count {
        let k = random_channel(&mut rng, kraus as usize)?;
        out.emit(&ChannelDocument::from_kraus(&k, Some(format!("random(seed={seed}, index={i})"))));
    }
    Ok(0)
}

fn verify_cmd(out: &Printer, input: &Input, samples: usize, seed: u64, corrupt: Option<f64>) -> Result<u8, CliError> {
    let l = load(&input.path)?;
    if !l.cptp.passed {
        return Ok(cptp_failure(out, l));
    }
    let mut r = quasi_inverse_unchecked(&l.affine)?;
    if let Some(f) = corrupt {
        r.delta_mstd *= f;
    }
    let mut report: VerificationReport =
        verify(&l.affine, &r, samples, &mut RngStream::new(seed)).map_err(|e| match e {
            quasinv::Error::InvalidParameter(m) => CliError::Parse(m),
            other => other.into(),
        })?;
    report.channel_id = Some(l.doc.id());
    out.emit(&report);
    if report.passed {
        Ok(0)
    } else {
        let x: Vec4 = report.best_sampled_x;
        eprintln!(
            "verification failed: sampled delta {} at {x:?} vs solver delta {}",
            report.best_sampled_delta, report.solver_delta
        );
        Ok(EXIT_VERIFY)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Printer(cli.format);
    let result = match &cli.command {
        Command::Analyze(input) => analyze(&out, input),
        Command::Mstd {
            input,
            monte_carlo,
            surface,
            seed,
        } => mstd(&out, input, *monte_carlo, *surface, *seed),
        Command::Zoo { family, params } => zoo_cmd(&out, *family, params),
        Command::Random { count, seed, kraus } => random_cmd(&out, *count, *seed, *kraus),
        Command::Verify {
            input,
            samples,
            seed,
            corrupt_delta,
        } => verify_cmd(&out, input, *samples, *seed, *corrupt_delta),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            println!(
                "{}",
                output::to_json_line(&json!({"error": {"kind": e.kind(), "message": e.to_string()}}))
            );
            ExitCode::from(e.exit_code())
        }
    }
}
