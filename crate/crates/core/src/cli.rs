//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 I/O error while writing output.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::coherence::{basis_dependent_discord, c_re, qi_relative_entropy, von_neumann_entropy};
use crate::linalg::{c, ComplexMatrix};
use crate::optimize::AngularGrid;
use crate::protocols::{licc_erasing_protocol, lqicc_werner_protocol, ProtocolResult};
use crate::states::{partial_trace, werner, DensityMatrix, Subsystem};
use crate::verify::{
    figure_data, suite_lemma1, suite_theorem3, suite_theorem4, CheckOutcome, ScanRecord,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "acd",
    about = "Assisted coherence distillation toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy, C_re of Bob's marginal, QI relative entropy and discord of a state
    Measures {
        /// Werner state parameter in [0, 1]
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        werner: Option<f64>,
        /// JSON state file: {"dims": [dA, dB], "re": [[..]], "im": [[..]]}
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Run a one-round distillation protocol on a Werner state
    Protocol {
        kind: ProtocolKind,
        #[arg(long)]
        p: f64,
    },
    /// Sweep p and emit QI relative entropy, protocol rate and gap
    Scan {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProtocolKind {
    Lqicc,
    Licc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Theorem3,
    Theorem4,
    Lemma1,
    All,
}

/// On-disk density matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let n = rho.dim();
        let m = rho.matrix();
        Self {
            dims: rho.dims().to_vec(),
            re: (0..n)
                .map(|r| (0..n).map(|col| m[(r, col)].re).collect())
                .collect(),
            im: (0..n)
                .map(|r| (0..n).map(|col| m[(r, col)].im).collect())
                .collect(),
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix, String> {
        let n = self.re.len();
        if n == 0 || self.im.len() != n {
            return Err(format!("re has {} rows, im has {}", n, self.im.len()));
        }
        if self.re.iter().chain(&self.im).any(|row| row.len() != n) {
            return Err(format!("re and im must both be {n}x{n}"));
        }
        let data = (0..n)
            .flat_map(|r| (0..n).map(move |col| (r, col)))
            .map(|(r, col)| c(self.re[r][col], self.im[r][col]));
        let mat = ComplexMatrix::new(n, n, data.collect()).map_err(|e| e.to_string())?;
        DensityMatrix::new(mat, self.dims.clone()).map_err(|e| e.to_string())
    }
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Six-decimal rendering without a spurious `-0.000000`.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn fmt_complex(z: num_complex::Complex64) -> String {
    let im = fmt6(z.im);
    let sign = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sign}{im}i", fmt6(z.re))
}

pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Measures { werner, file } => cmd_measures(werner, file.as_deref(), out),
        Command::Protocol { kind, p } => cmd_protocol(kind, p, out),
        Command::Scan {
            from,
            to,
            steps,
            format,
            out: path,
        } => cmd_scan(from, to, steps, format, path.as_deref(), out),
        Command::Verify { suite, seed } => cmd_verify(suite, seed, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_IO
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn load_state(path: &Path) -> Result<DensityMatrix, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    file.to_state()
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_measures(p: Option<f64>, file: Option<&Path>, out: &mut impl Write) -> Result<u8, Failure> {
    let rho = match (p, file) {
        (Some(p), _) => werner(p)?,
        (None, Some(path)) => load_state(path)?,
        (None, None) => {
            return Err(Failure::Usage(
                "one of --werner or --file is required".into(),
            ))
        }
    };
    let entropy = von_neumann_entropy(&rho)?;
    let c_re_b = c_re(&partial_trace(&rho, Subsystem::B)?)?;
    let qi = qi_relative_entropy(&rho)?;
    let discord = basis_dependent_discord(&rho)?;
    (|| -> std::io::Result<()> {
        writeln!(out, "entropy  {} bits", fmt6(entropy))?;
        writeln!(out, "c_re_b   {} bits", fmt6(c_re_b))?;
        writeln!(out, "qi       {} bits", fmt6(qi))?;
        writeln!(out, "discord  {} bits", fmt6(discord))
    })()
    .map_err(io)?;
    Ok(EXIT_OK)
}

fn write_protocol(
    name: &str,
    p: f64,
    r: &ProtocolResult,
    out: &mut impl Write,
) -> std::io::Result<()> {
    writeln!(out, "protocol {name} p={}", fmt6(p))?;
    for (t, item) in r.transcript.iter().zip(r.ensemble.items()) {
        writeln!(
            out,
            "outcome {} probability {} correction {}",
            t.outcome,
            fmt6(t.probability),
            t.correction
        )?;
        let m = item.state.matrix();
        for row in 0..m.rows() {
            let entries: Vec<String> = (0..m.cols())
                .map(|col| fmt_complex(m[(row, col)]))
                .collect();
            writeln!(out, "  bob [{}]", entries.join(", "))?;
        }
    }
    writeln!(out, "rate {}", fmt6(r.rate))
}

fn cmd_protocol(kind: ProtocolKind, p: f64, out: &mut impl Write) -> Result<u8, Failure> {
    let (name, result) = match kind {
        ProtocolKind::Lqicc => ("lqicc", lqicc_werner_protocol(p)?),
        ProtocolKind::Licc => ("licc", licc_erasing_protocol(p)?),
    };
    write_protocol(name, p, &result, out).map_err(io)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ScanRow {
    p: f64,
    qi: f64,
    rate: f64,
    gap: f64,
}

pub fn render_csv(records: &[ScanRecord]) -> String {
    let mut s = String::from("p,qi,rate,gap\n");
    for r in records {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt6(r.p),
            fmt6(r.qi),
            fmt6(r.rate),
            fmt6(r.gap)
        ));
    }
    s
}

pub fn render_json(records: &[ScanRecord]) -> String {
    let rows: Vec<ScanRow> = records
        .iter()
        .map(|r| ScanRow {
            p: r.p,
            qi: r.qi,
            rate: r.rate,
            gap: r.gap,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("plain floats serialise");
    s.push('\n');
    s
}

fn cmd_scan(
    from: f64,
    to: f64,
    steps: usize,
    format: Format,
    path: Option<&Path>,
    out: &mut impl Write,
) -> Result<u8, Failure> {
    let records = figure_data(from, to, steps)?;
    let text = match format {
        Format::Csv => render_csv(&records),
        Format::Json => render_json(&records),
    };
    match path {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        }
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(suite: Suite, seed: u64, out: &mut impl Write) -> Result<u8, Failure> {
    let mut lines: Vec<CheckOutcome> = Vec::new();
    if matches!(suite, Suite::Theorem3 | Suite::All) {
        lines.extend(suite_theorem3()?);
    }
    if matches!(suite, Suite::Lemma1 | Suite::All) {
        lines.extend(suite_lemma1(seed)?);
    }
    if matches!(suite, Suite::Theorem4 | Suite::All) {
        lines.extend(suite_theorem4(AngularGrid::default())?);
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    (|| -> std::io::Result<()> {
        for l in &lines {
            writeln!(
                out,
                "{} {} {}",
                if l.pass { "PASS" } else { "FAIL" },
                l.name,
                l.detail
            )?;
        }
        writeln!(out, "summary {passed}/{} passed", lines.len())
    })()
    .map_err(io)?;
    Ok(if passed == lines.len() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}
