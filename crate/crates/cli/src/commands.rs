use std::io::Write;
use std::path::{Path, PathBuf};

use locc_recovery::genpairs::{pair_with_pattern, PatternSpec};
use locc_recovery::oracle::{max_recovery_scan_with, GridSpec, KRow};
use locc_recovery::recovery::epsilon_max;
use locc_recovery::{
    entropy, majorize, recover_general, tensor_spectrum, Execution, PairClass, RecoveryError,
    RecoveryOptions, RecoveryOutcome, SchmidtVector, Tolerance,
};
use serde::Serialize;

use crate::error::{CliError, Status};
use crate::files::{load_state, write_json, CertificateRecord, State, StateFile};

pub struct Context {
    pub tol: Tolerance,
    pub bits: bool,
    pub exec: Execution,
}

impl Context {
    fn entropy(&self, nats: f64) -> String {
        if self.bits {
            format!("{:.5} bits", nats / std::f64::consts::LN_2)
        } else {
            format!("{nats:.5} nats")
        }
    }

    fn load_pair(&self, psi: &Path, phi: &Path) -> Result<(State, State), CliError> {
        let a = load_state(psi, self.tol)?;
        let b = load_state(phi, self.tol)?;
        if a.spectrum.dim() != b.spectrum.dim() {
            return Err(CliError::Input(format!(
                "dimension mismatch: {} has {} coefficients, {} has {}",
                psi.display(),
                a.spectrum.dim(),
                phi.display(),
                b.spectrum.dim()
            )));
        }
        Ok((a, b))
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).expect("serializable");
    writeln!(out)?;
    Ok(())
}

fn braces(delta: &[usize]) -> String {
    let items: Vec<String> = delta.iter().map(|m| m.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Lemma-style lower bound on the auxiliary dimension from the endpoints.
fn min_aux_dim(delta: &[usize], n: usize) -> usize {
    2 + usize::from(delta.contains(&1)) + usize::from(n >= 2 && delta.contains(&(n - 1)))
}

#[derive(Serialize)]
struct CheckReport {
    convertible: bool,
    class: &'static str,
    first_violation: Option<usize>,
    delta: Vec<usize>,
    eta: usize,
    loss_nats: f64,
    min_aux_dim: Option<usize>,
    tol: f64,
}

pub fn check(ctx: &Context, psi: &Path, phi: &Path, json: bool) -> Result<Status, CliError> {
    let (a, b) = ctx.load_pair(psi, phi)?;
    let (a, b) = (&a.spectrum, &b.spectrum);
    let report = majorize(a, b, ctx.tol).expect("dimensions checked");
    let class = PairClass::from_report(&report, a.dim());
    let loss = entropy(a) - entropy(b);
    let comparable = report.holds && !matches!(class, PairClass::Identical { .. });
    let summary = CheckReport {
        convertible: report.holds,
        class: class.name(),
        first_violation: report.first_violation,
        delta: report.equality_indices.clone(),
        eta: report.eta,
        loss_nats: loss,
        min_aux_dim: comparable.then(|| min_aux_dim(&report.equality_indices, a.dim())),
        tol: ctx.tol.eq_tol(),
    };
    if json {
        print_json(&summary)?;
    } else if let Some(m) = report.first_violation {
        println!("not convertible, first violation m={m}");
    } else {
        let mut line = format!("convertible, {}", class.name());
        if !report.equality_indices.is_empty() {
            line += &format!(", delta {}, eta {}", braces(&report.equality_indices), report.eta);
        }
        line += &format!(", loss {}", ctx.entropy(loss));
        if let Some(k) = summary.min_aux_dim {
            line += &format!(", min aux dim {k}");
        }
        println!("{line}");
        println!("tol {:e}", ctx.tol.eq_tol());
    }
    Ok(if report.holds { Status::Ok } else { Status::Infeasible })
}

#[derive(Serialize)]
struct CertCheck {
    valid: bool,
    problems: Vec<String>,
    k: usize,
    recovered_nats: f64,
    loss_nats: f64,
    tol: f64,
}

/// Re-derives everything from the four spectra in the record with nothing
/// but sorting, products, prefix sums and entropies.
pub fn check_cert(ctx: &Context, path: &Path, json: bool) -> Result<Status, CliError> {
    let record = CertificateRecord::load(path)?;
    let [psi, phi, chi, omega] = record.spectra(path)?;
    let tol = Tolerance::new(record.tol).expect("validated when parsing spectra");
    let mut problems = Vec::new();
    if psi.dim() != phi.dim() || chi.dim() != omega.dim() {
        problems.push("dimension mismatch".to_string());
    } else {
        if !majorize(&psi, &phi, tol).expect("equal dims").holds {
            problems.push("psi is not majorized by phi".into());
        }
        let lhs = tensor_spectrum(&psi, &chi);
        let rhs = tensor_spectrum(&phi, &omega);
        if !majorize(&lhs, &rhs, tol).expect("equal dims").holds {
            problems.push("psi ⊗ chi is not majorized by phi ⊗ omega".into());
        }
    }
    let recovered = entropy(&omega) - entropy(&chi);
    let loss = entropy(&psi) - entropy(&phi);
    if recovered <= tol.eq_tol() {
        problems.push("omega is not more entangled than chi".into());
    }
    if chi.dim() != record.k {
        problems.push(format!("k = {} but chi has {} coefficients", record.k, chi.dim()));
    }
    for (name, stored, fresh) in [("recovered", record.recovered_nats, recovered), ("loss", record.loss_nats, loss)] {
        if (stored - fresh).abs() > 1e-9 {
            problems.push(format!("{name} recorded as {stored} but recomputed as {fresh}"));
        }
    }
    let valid = problems.is_empty();
    if json {
        print_json(&CertCheck {
            valid,
            problems,
            k: chi.dim(),
            recovered_nats: recovered,
            loss_nats: loss,
            tol: tol.eq_tol(),
        })?;
    } else if valid {
        println!(
            "certificate valid: k = {}, recovered {} of loss {}",
            chi.dim(),
            ctx.entropy(recovered),
            ctx.entropy(loss)
        );
    } else {
        println!("certificate invalid:");
        for p in &problems {
            println!("  {p}");
        }
    }
    Ok(if valid { Status::Ok } else { Status::Infeasible })
}

pub struct RecoverArgs {
    pub epsilon_fraction: f64,
    pub heuristic: bool,
    pub seed: u64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub timestamp: bool,
}

fn now_rfc3339() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .expect("UTC time formats")
}

pub fn recover(ctx: &Context, psi_path: &Path, phi_path: &Path, args: RecoverArgs) -> Result<Status, CliError> {
    let (psi, phi) = ctx.load_pair(psi_path, phi_path)?;
    let opts = RecoveryOptions {
        seed: args.seed,
        samples: args.samples,
        ..RecoveryOptions::default()
    }
    .with_tol(ctx.tol)
    .with_epsilon_fraction(args.epsilon_fraction)
    .with_heuristic(args.heuristic)
    .with_exec(ctx.exec);
    let outcome = recover_general(&psi.spectrum, &phi.spectrum, &opts)?;
    match outcome {
        RecoveryOutcome::Found(cert) => {
            let stamp = args.timestamp.then(now_rfc3339);
            let record = CertificateRecord::new(&cert, &psi, &phi, ctx.tol, stamp);
            match &args.out {
                Some(path) => {
                    write_json(path, &record)?;
                    println!(
                        "recovered {} of loss {} with k = {}{} -> {}",
                        ctx.entropy(cert.recovered),
                        ctx.entropy(cert.loss),
                        cert.k(),
                        if cert.genuine { "" } else { " (not genuine: k = n)" },
                        path.display()
                    );
                }
                None => print_json(&record)?,
            }
            Ok(Status::Ok)
        }
        RecoveryOutcome::OpenProblem { reason } => {
            eprintln!("open problem: {reason}");
            if !args.heuristic {
                eprintln!("hint: --heuristic runs an unguaranteed random search");
            }
            Ok(Status::OpenProblem)
        }
        RecoveryOutcome::NotConvertible { first_violation } => {
            eprintln!("not convertible, first violation m={first_violation}");
            Ok(Status::Infeasible)
        }
        RecoveryOutcome::NothingLost => {
            eprintln!("psi and phi coincide; no entanglement is lost, so none can be recovered");
            Ok(Status::Infeasible)
        }
        RecoveryOutcome::ImpossibleAtDim { k, reason } => {
            eprintln!("no recovery at k = {k}: {reason}");
            Ok(Status::Infeasible)
        }
    }
}

pub fn epsmax(ctx: &Context, psi_path: &Path, phi_path: &Path, p: f64) -> Result<Status, CliError> {
    let (psi, phi) = ctx.load_pair(psi_path, phi_path)?;
    if !(0.5..=1.0).contains(&p) {
        return Err(CliError::Input(format!("--p {p} outside [1/2, 1]")));
    }
    let chi = SchmidtVector::qubit(p);
    match epsilon_max(&psi.spectrum, &phi.spectrum, &chi, 0, 1, ctx.tol) {
        Ok(eps) => {
            println!("{eps:.9}");
            Ok(Status::Ok)
        }
        Err(RecoveryError::NotFeasibleAtZero) => {
            eprintln!("majorization fails already at epsilon = 0 for p = {p}");
            Ok(Status::Infeasible)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct CsvRow {
    k: usize,
    best_recovered_nats: f64,
    feasible_count: usize,
    points_tested: usize,
}

impl From<&KRow> for CsvRow {
    fn from(r: &KRow) -> Self {
        Self {
            k: r.k,
            best_recovered_nats: r.best_recovered,
            feasible_count: r.feasible_count,
            points_tested: r.points_tested,
        }
    }
}

pub fn scan(
    ctx: &Context,
    psi_path: &Path,
    phi_path: &Path,
    kmax: usize,
    grid: &GridSpec,
    csv_path: Option<&Path>,
) -> Result<Status, CliError> {
    let (psi, phi) = ctx.load_pair(psi_path, phi_path)?;
    let result = max_recovery_scan_with(&psi.spectrum, &phi.spectrum, kmax, grid, ctx.tol, ctx.exec)?;
    if result.not_convertible {
        eprintln!("not convertible; nothing to scan");
        return Ok(Status::Infeasible);
    }
    let sink: Box<dyn Write> = match csv_path {
        Some(path) => Box::new(std::fs::File::create(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    for row in &result.per_k {
        writer.serialize(CsvRow::from(row))?;
    }
    writer.flush()?;
    Ok(Status::Ok)
}

fn parse_pattern(pattern: &str) -> Result<Vec<usize>, CliError> {
    if pattern == "strict" {
        return Ok(Vec::new());
    }
    let list = pattern
        .strip_prefix("delta:")
        .ok_or_else(|| CliError::Input(format!("pattern {pattern:?} is neither strict nor delta:<list>")))?;
    let mut delta = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad index {s:?} in pattern")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    delta.sort_unstable();
    delta.dedup();
    Ok(delta)
}

pub fn gen(n: usize, pattern: &str, seed: u64, margin: f64, prefix: &str) -> Result<Status, CliError> {
    let delta = parse_pattern(pattern)?;
    let spec = PatternSpec::new(n, delta.clone(), seed).with_margin(margin);
    let (psi, phi) = pair_with_pattern(&spec)?;
    let describe = |name: &str| format!("{name}: n={n}, delta {}, seed {seed}", braces(&delta));
    let files = [
        (format!("{prefix}psi.json"), describe("psi"), psi),
        (format!("{prefix}phi.json"), describe("phi"), phi),
    ];
    for (path, label, v) in files {
        write_json(
            Path::new(&path),
            &StateFile {
                label: Some(label),
                schmidt: v.into_values(),
            },
        )?;
        println!("{path}");
    }
    Ok(Status::Ok)
}
