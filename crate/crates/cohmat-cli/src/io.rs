//! JSON encodings of the library types. Complex numbers are `[re, im]`
//! pairs throughout; matrices are row-major.

use cohmat::gii::{FeasStatus, FeasibilityVerdict, GiiWitness, Provenance};
use cohmat::matrix::{C64, CoherenceMatrix, ComplexMatrix};
use cohmat::povm::{IncoherentObservable, Observable};
use cohmat::symmetry::SymmetryGroup;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let entries = (0..m.dim())
            .map(|n| {
                (0..m.dim())
                    .map(|k| {
                        let z = m.get(n, k);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            dim: m.dim(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if self.entries.len() != self.dim {
            return Err(CliError::input(format!(
                "matrix has {} rows, expected {}",
                self.entries.len(),
                self.dim
            )));
        }
        let mut data = Vec::with_capacity(self.dim * self.dim);
        for row in &self.entries {
            if row.len() != self.dim {
                return Err(CliError::input(format!(
                    "matrix row has {} columns, expected {}",
                    row.len(),
                    self.dim
                )));
            }
            for &[re, im] in row {
                data.push(C64::new(re, im));
            }
        }
        ComplexMatrix::from_data(self.dim, data).map_err(CliError::from)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ObservableJson {
    pub dim: usize,
    pub effects: Vec<MatrixJson>,
}

impl ObservableJson {
    pub fn to_observable(&self) -> Result<Observable, CliError> {
        let effects = self
            .effects
            .iter()
            .map(|m| m.to_matrix())
            .collect::<Result<Vec<_>, _>>()?;
        Observable::new(self.dim, effects).map_err(CliError::from)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IncoherentJson {
    pub dim: usize,
    pub table: Vec<Vec<f64>>,
}

impl IncoherentJson {
    pub fn to_incoherent(&self) -> Result<IncoherentObservable, CliError> {
        let n_out = self.table.first().map(|r| r.len()).unwrap_or(0);
        let mut flat = Vec::with_capacity(self.dim * n_out);
        if self.table.len() != self.dim {
            return Err(CliError::input(format!(
                "table has {} rows, expected {}",
                self.table.len(),
                self.dim
            )));
        }
        for row in &self.table {
            if row.len() != n_out {
                return Err(CliError::input("ragged probability table".into()));
            }
            flat.extend_from_slice(row);
        }
        IncoherentObservable::new(self.dim, n_out, flat).map_err(CliError::from)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub blocks: Vec<MatrixJson>,
    pub provenance: String,
}

impl WitnessJson {
    pub fn from_witness(w: &GiiWitness) -> Self {
        Self {
            blocks: w.blocks().iter().map(MatrixJson::from_matrix).collect(),
            provenance: w.provenance().as_str().to_string(),
        }
    }

    pub fn to_witness(&self) -> Result<GiiWitness, CliError> {
        let blocks = self
            .blocks
            .iter()
            .map(|m| m.to_matrix())
            .collect::<Result<Vec<_>, _>>()?;
        let dim = blocks
            .first()
            .map(|b| b.dim())
            .ok_or_else(|| CliError::input("witness has no blocks".into()))?;
        let provenance = match self.provenance.as_str() {
            "schur" => Provenance::Schur,
            "corner" => Provenance::Corner,
            "appendixH" => Provenance::AppendixH,
            _ => Provenance::Solver,
        };
        Ok(GiiWitness::new(dim, blocks, provenance))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerdictJson {
    pub status: String,
    pub residual: f64,
    pub iterations: usize,
}

impl VerdictJson {
    pub fn from_verdict(v: &FeasibilityVerdict) -> Self {
        Self {
            status: match v.status {
                FeasStatus::Feasible => "feasible",
                FeasStatus::Infeasible => "infeasible",
                FeasStatus::Unknown => "unknown",
            }
            .to_string(),
            residual: v.residual,
            iterations: v.iterations,
        }
    }
}

/// User-supplied symmetry groups for patterns beyond the brute-force bound.
#[derive(Debug, Serialize, Deserialize)]
pub struct GroupJson {
    pub dim: usize,
    pub perms: Vec<Vec<usize>>,
    /// Optional unit phases per element and index, `[re, im]`.
    #[serde(default)]
    pub phases: Option<Vec<Vec<[f64; 2]>>>,
}

impl GroupJson {
    pub fn to_group(&self) -> Result<SymmetryGroup, CliError> {
        let g = SymmetryGroup::from_permutations(self.dim, self.perms.clone())
            .map_err(CliError::from)?;
        if let Some(phase_rows) = &self.phases {
            let mut g = g;
            if phase_rows.len() != g.perms.len() {
                return Err(CliError::input("phase table length mismatch".into()));
            }
            g.phases = phase_rows
                .iter()
                .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
                .collect();
            return Ok(g);
        }
        Ok(g)
    }
}

pub fn read_coherence(path: &std::path::Path) -> Result<CoherenceMatrix, CliError> {
    let m: MatrixJson = read_json(path)?;
    CoherenceMatrix::new(m.to_matrix()?).map_err(CliError::from)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&content)
        .map_err(|e| CliError::input(format!("cannot parse {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<(), CliError> {
    let content = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::other(format!("serialisation failed: {e}")))?;
    std::fs::write(path, content)
        .map_err(|e| CliError::other(format!("cannot write {}: {e}", path.display())))
}
