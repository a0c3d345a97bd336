//! Command-line front end. Exit codes: 0 certified success, 1 usage or
//! parameter error, 2 certification or tolerance failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::charsum::{
    check_char_value_d, check_gauss_properties, check_lifting, check_product, epsilon_b, CharSystem,
};
use crate::cyclotomy::CycParams;
use crate::design::{
    construct_sdf_with, verify_sdf, verify_sdf_with_char, ConstructOptions, Family, FamilyJson, SdfCertificate,
};
use crate::error::{Error, Result};
use crate::gf::{FieldSummary, DEFAULT_TABLE_CAP};
use crate::hadamard::{hadamard_from_family, CertifyMode, Certification, GroupOrdering, SignMatrix};
use crate::numtheory::prime_power;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

/// Matrices above this order are certified by sampling unless
/// `--full-certify` is given.
const FULL_CERTIFY_LIMIT: usize = 2048;

#[derive(Parser, Debug)]
#[command(name = "skewhad", version, about = "Cyclotomic skew Hadamard difference families and matrices")]
pub struct Cli {
    /// Tolerance for floating-point character-sum checks.
    #[arg(long, global = true, env = "SKEWHAD_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest field order for which tables are built.
    #[arg(long, global = true, env = "SKEWHAD_CAP", default_value_t = DEFAULT_TABLE_CAP)]
    pub cap: u64,
    /// Worker threads for certification loops (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build and certify a skew Hadamard difference family in F_(q^e).
    Construct(ConstructArgs),
    /// Build and certify a skew Hadamard matrix of order 2(q^e+1) or 4(q^e+1).
    Hadamard(HadamardArgs),
    /// Re-certify a family JSON file or a matrix text file.
    Verify(VerifyArgs),
    /// Gauss-sum report for the cyclotomic setting (q, u, t).
    GaussReport(GaussArgs),
    /// List matrix orders reachable with two or four blocks.
    Search(SearchArgs),
}

#[derive(Args, Debug, Clone, Copy)]
pub struct FamilyParams {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub u: u32,
    #[arg(long)]
    pub e: u32,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub params: FamilyParams,
    /// Cyclotomic order exponent; must equal u + v_2(e).
    #[arg(long)]
    pub t: Option<u32>,
    /// Also run the character-sum criterion.
    #[arg(long)]
    pub char_check: bool,
    /// Write the family JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the certificate JSON here.
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HadamardArgs {
    #[command(flatten)]
    pub params: FamilyParams,
    /// Write the matrix ('+'/'-' rows) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the metadata JSON here (default: <out>.json).
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Check every row pair even for large orders.
    #[arg(long)]
    pub full_certify: bool,
    /// Row pairs checked when sampling.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Auto,
    Family,
    Matrix,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    /// Also run the character-sum criterion (families only).
    #[arg(long)]
    pub char_check: bool,
    /// Sample row pairs instead of checking all (matrices only).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the certificate JSON here.
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GaussArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub u: u32,
    #[arg(long)]
    pub t: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub max_order: u64,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ToleranceExceeded { .. }
        | Error::EpsilonNotRootOfUnity { .. }
        | Error::NotADifferenceFamily { .. }
        | Error::NotSkew(_)
        | Error::CriteriaMismatch(_)
        | Error::AssemblyMismatch => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Writes via a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::InvalidParameter(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // A global pool can only be installed once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", cli.tol)));
    }
    let emit = |out: &mut dyn Write, s: &str| {
        out.write_all(s.as_bytes()).map_err(|e| Error::Internal(format!("stdout: {e}")))
    };
    match &cli.command {
        Command::Construct(a) => {
            let (fam, cert) = cmd_construct(a, cli.cap, cli.tol)?;
            if let Some(path) = &a.out {
                write_atomic(path, to_json(&fam.to_json()).as_bytes())?;
            }
            let text = to_json(&cert);
            if let Some(path) = &a.cert {
                write_atomic(path, text.as_bytes())?;
            }
            emit(out, &text)?;
            Ok(if cert.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Hadamard(a) => {
            let (matrix, meta) = cmd_hadamard(a, cli.cap)?;
            let text = to_json(&meta);
            if let Some(path) = &a.out {
                write_atomic(path, matrix.to_text().as_bytes())?;
                let meta_path = a.meta.clone().unwrap_or_else(|| sidecar(path));
                write_atomic(&meta_path, text.as_bytes())?;
            } else if let Some(path) = &a.meta {
                write_atomic(path, text.as_bytes())?;
            }
            emit(out, &text)?;
            Ok(if meta.certification.passed() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Verify(a) => {
            let (text, passed) = cmd_verify(a, cli.cap, cli.tol)?;
            if let Some(path) = &a.cert {
                write_atomic(path, text.as_bytes())?;
            }
            emit(out, &text)?;
            Ok(if passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::GaussReport(a) => {
            let doc = cmd_gauss_report(a, cli.cap, cli.tol)?;
            let text = to_json(&doc);
            if let Some(path) = &a.out {
                write_atomic(path, text.as_bytes())?;
            }
            emit(out, &text)?;
            Ok(if doc.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Search(a) => {
            let found = cmd_search(a.max_order)?;
            emit(out, &to_json(&found))?;
            Ok(EXIT_OK)
        }
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn cmd_construct(a: &ConstructArgs, cap: u64, tol: f64) -> Result<(Family, SdfCertificate)> {
    let p = a.params;
    let fam = construct_sdf_with(p.q, p.u, p.e, ConstructOptions { t: a.t, cap })?;
    let cert = if a.char_check { verify_sdf_with_char(&fam, tol) } else { verify_sdf(&fam) };
    Ok((fam, cert))
}

/// Sidecar metadata written next to a matrix file.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixMeta {
    pub q: u64,
    pub u: u32,
    pub e: u32,
    pub order: usize,
    pub field: FieldSummary,
    /// Rows and columns of each group block run over this element order.
    pub ordering: &'static str,
    pub ordering_sha256: String,
    /// `assignment[slot]` is the family block placed in array slot `slot`.
    pub assignment: Vec<usize>,
    pub blocks: Vec<Vec<u32>>,
    pub attempts: usize,
    pub family: SdfCertificate,
    pub certification: Certification,
}

pub fn cmd_hadamard(a: &HadamardArgs, cap: u64) -> Result<(SignMatrix, MatrixMeta)> {
    let p = a.params;
    if p.u > 3 {
        return Err(Error::UnsupportedBlockCount(1 << (p.u - 1).min(31)));
    }
    let fam = construct_sdf_with(p.q, p.u, p.e, ConstructOptions { t: None, cap })?;
    let family = verify_sdf(&fam);
    family.result()?;
    let n = 2usize.pow(p.u - 1) * (fam.field().order() as usize + 1);
    let mode = if a.full_certify || n <= FULL_CERTIFY_LIMIT {
        CertifyMode::Full
    } else {
        CertifyMode::Sampled { pairs: a.samples, seed: a.seed }
    };
    let assembled = hadamard_from_family(&fam, mode)?;
    let ord = GroupOrdering::new(fam.field().clone());
    let meta = MatrixMeta {
        q: p.q,
        u: p.u,
        e: p.e,
        order: assembled.matrix.order(),
        field: fam.field().summary(),
        ordering: "0, w^0, w^1, ..., w^(v-2) for the primitive element w",
        ordering_sha256: ord.fingerprint(),
        assignment: assembled.assignment.clone(),
        blocks: assembled.assignment.iter().map(|&i| fam.blocks()[i].exponents().to_vec()).collect(),
        attempts: assembled.attempts,
        family,
        certification: assembled.certification.clone(),
    };
    Ok((assembled.matrix, meta))
}

pub fn cmd_verify(a: &VerifyArgs, cap: u64, tol: f64) -> Result<(String, bool)> {
    let text = read(&a.path)?;
    let format = match a.format {
        Format::Auto if text.trim_start().starts_with('{') => Format::Family,
        Format::Auto => Format::Matrix,
        f => f,
    };
    match format {
        Format::Family => {
            let doc: FamilyJson = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let fam = Family::from_json(&doc, cap)?;
            let cert = if a.char_check { verify_sdf_with_char(&fam, tol) } else { verify_sdf(&fam) };
            Ok((to_json(&cert), cert.passed))
        }
        _ => {
            let m = SignMatrix::from_text(&text)?;
            let mode = match a.samples {
                Some(pairs) => CertifyMode::Sampled { pairs, seed: a.seed },
                None => CertifyMode::Full,
            };
            let cert = mode.run(&m);
            Ok((to_json(&cert), cert.passed()))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussReportDoc {
    pub q: u64,
    pub u: u32,
    pub t: u32,
    pub tol: f64,
    pub epsilon: Option<crate::charsum::GaussReport>,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

fn outcome<T: Serialize>(check: &str, r: Result<T>) -> Result<CheckOutcome> {
    match r {
        Ok(rep) => Ok(CheckOutcome {
            check: check.into(),
            passed: true,
            report: Some(serde_json::to_value(rep).map_err(|e| Error::Internal(e.to_string()))?),
            error: None,
        }),
        Err(e) if exit_code(&e) == EXIT_FAILED => {
            Ok(CheckOutcome { check: check.into(), passed: false, report: None, error: Some(e.to_string()) })
        }
        Err(e) => Err(e),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn cmd_gauss_report(a: &GaussArgs, cap: u64, tol: f64) -> Result<GaussReportDoc> {
    let params = CycParams::with_cap(a.q, a.u, a.t, cap)?;
    let n = params.n();
    let ext_sys = CharSystem::new(params.ext().clone(), n)?;
    let base_n = gcd(n as u64, a.q - 1) as u32;
    let base_sys = CharSystem::new(params.base().clone(), base_n)?;
    let eps = epsilon_b(&params, tol);
    let mut checks = vec![
        outcome("gauss properties (extension)", check_gauss_properties(&ext_sys, tol))?,
        outcome("gauss properties (base)", check_gauss_properties(&base_sys, tol))?,
        outcome("lifting", check_lifting(params.base(), params.ext(), base_n, tol))?,
        outcome("product (ell = 2)", check_product(&ext_sys, 2, tol))?,
    ];
    let eps_report = match eps {
        Ok(rep) => {
            checks.push(outcome::<()>("epsilon", Ok(()))?);
            checks.push(outcome("character values of D_h", check_char_value_d(&params, &rep, tol))?);
            Some(rep)
        }
        Err(e) => {
            checks.push(outcome::<()>("epsilon", Err(e))?);
            None
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(GaussReportDoc { q: a.q, u: a.u, t: a.t, tol, epsilon: eps_report, checks, passed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub q: u64,
    pub u: u32,
    pub e: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReachableOrder {
    pub order: u64,
    pub witnesses: Vec<Witness>,
}

/// Orders `2(q^e+1)` with `q ≡ 5 (mod 8)` and `4(q^e+1)` with
/// `q ≡ 9 (mod 16)`, `q` a prime power, up to `max_order`.
pub fn cmd_search(max_order: u64) -> Result<Vec<ReachableOrder>> {
    if max_order < 4 {
        return Err(Error::InvalidParameter(format!("max order must be at least 4, got {max_order}")));
    }
    let mut found: BTreeMap<u64, Vec<Witness>> = BTreeMap::new();
    for (u, modulus, residue, mult) in [(2u32, 8u64, 5u64, 2u64), (3, 16, 9, 4)] {
        let mut q = residue;
        while mult * (q + 1) <= max_order {
            if prime_power(q).is_some() {
                let mut qe = q;
                let mut e = 1;
                while let Some(n) = qe.checked_add(1).and_then(|x| x.checked_mul(mult)).filter(|&n| n <= max_order) {
                    found.entry(n).or_default().push(Witness { q, u, e });
                    match qe.checked_mul(q) {
                        Some(next) => qe = next,
                        None => break,
                    }
                    e += 1;
                }
            }
            q += modulus;
        }
    }
    Ok(found.into_iter().map(|(order, witnesses)| ReachableOrder { order, witnesses }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("skewhad").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn search_small() {
        let orders: Vec<u64> = cmd_search(30).unwrap().iter().map(|r| r.order).collect();
        assert_eq!(orders, vec![12, 28]);
        let big = cmd_search(200).unwrap();
        let w104 = &big.iter().find(|r| r.order == 104).unwrap().witnesses;
        assert!(w104.contains(&Witness { q: 25, u: 3, e: 1 }));
        assert!(big.iter().any(|r| r.order == 168));
        assert!(cmd_search(4).unwrap().is_empty());
        assert!(cmd_search(3).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["construct", "--q", "5", "--u", "2", "--e", "2"]).0, 0);
        let (code, _, err) = run_str(&["construct", "--q", "7", "--u", "2", "--e", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("7"), "{err}");
        assert_eq!(run_str(&["construct", "--q", "5"]).0, 1);
        assert_eq!(run_str(&["hadamard", "--q", "17", "--u", "4", "--e", "1"]).0, 1);
        assert_eq!(run_str(&["--help"]).0, 0);
        assert_eq!(run_str(&["search", "--max-order", "30", "--tol", "-1"]).0, 1);
    }

    #[test]
    fn sidecar_path() {
        assert_eq!(sidecar(Path::new("a/h.txt")), PathBuf::from("a/h.txt.json"));
    }
}
