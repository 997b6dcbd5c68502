//! On-disk formats: state files and certificate records.

use std::fs;
use std::path::{Path, PathBuf};

use locc_recovery::recovery::Perturbation;
use locc_recovery::{make_schmidt, MajorizationReport, RecoveryCertificate, SchmidtVector, Tolerance};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `{"label": "...", "schmidt": [...]}`; entries may be in any order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub schmidt: Vec<f64>,
}

/// A loaded state with its origin.
pub struct State {
    pub label: Option<String>,
    pub spectrum: SchmidtVector,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_state(path: &Path, tol: Tolerance) -> Result<State, CliError> {
    let file: StateFile = serde_json::from_str(&read(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let spectrum = make_schmidt(&file.schmidt, tol).map_err(|source| CliError::Spectrum {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(State {
        label: file.label,
        spectrum,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub const RECORD_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Self-contained certificate: the four spectra are enough to re-verify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub version: String,
    pub psi_label: Option<String>,
    pub phi_label: Option<String>,
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    pub chi: Vec<f64>,
    pub omega: Vec<f64>,
    pub k: usize,
    pub perturbation: Option<Perturbation>,
    pub report: MajorizationReport,
    pub recovered_nats: f64,
    pub loss_nats: f64,
    pub genuine: bool,
    pub efficient_bound: usize,
    pub tol: f64,
    /// RFC 3339, only when requested; `null` keeps records reproducible.
    pub timestamp: Option<String>,
}

impl CertificateRecord {
    pub fn new(
        cert: &RecoveryCertificate,
        psi: &State,
        phi: &State,
        tol: Tolerance,
        timestamp: Option<String>,
    ) -> Self {
        Self {
            version: RECORD_VERSION.to_string(),
            psi_label: psi.label.clone(),
            phi_label: phi.label.clone(),
            psi: psi.spectrum.values().to_vec(),
            phi: phi.spectrum.values().to_vec(),
            chi: cert.pair.chi.values().to_vec(),
            omega: cert.pair.omega.values().to_vec(),
            k: cert.k(),
            perturbation: cert.pair.perturbation,
            report: cert.report.clone(),
            recovered_nats: cert.recovered,
            loss_nats: cert.loss,
            genuine: cert.genuine,
            efficient_bound: cert.efficient_bound,
            tol: tol.eq_tol(),
            timestamp,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        serde_json::from_str(&read(path)?).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Spectra in the order psi, phi, chi, omega, validated at the record's
    /// tolerance.
    pub fn spectra(&self, path: &Path) -> Result<[SchmidtVector; 4], CliError> {
        let tol = Tolerance::new(self.tol).map_err(|source| CliError::Spectrum {
            path: path.to_path_buf(),
            source,
        })?;
        let parse = |v: &[f64]| {
            make_schmidt(v, tol).map_err(|source| CliError::Spectrum {
                path: PathBuf::from(path),
                source,
            })
        };
        Ok([parse(&self.psi)?, parse(&self.phi)?, parse(&self.chi)?, parse(&self.omega)?])
    }
}
