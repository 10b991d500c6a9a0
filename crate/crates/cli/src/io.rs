use std::fs;
use std::path::{Path, PathBuf};

use csym_core::json::MatrixJson;
use csym_core::ComplexMatrix64;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct InputFile {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_input(path: &Path) -> Result<InputFile, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(InputFile {
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
        bytes,
    })
}

impl InputFile {
    pub fn parse<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_slice(&self.bytes)
            .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", self.path.display())))
    }

    /// The file as a square matrix.
    pub fn matrix(&self) -> Result<ComplexMatrix64, CliError> {
        let j: MatrixJson = self.parse()?;
        if j.rows != j.cols {
            return Err(CliError::Input(format!("matrix is not square ({}x{})", j.rows, j.cols)));
        }
        Ok(j.to_matrix()?)
    }
}

pub fn to_json<S: Serialize>(value: &S) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn write_json<S: Serialize>(dir: &Path, name: &str, value: &S) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, to_json(value)? + "\n")
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))
}
