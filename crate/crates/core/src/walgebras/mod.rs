//! Named constructions: the reduced BRST complex, the Miura projection and
//! the free-field realizations of `WB_n`, `W^(2)_n` and the Wakimoto map.

pub mod brst;
pub mod miura;
pub mod w2n;
pub mod wbn;

use serde::Serialize;
use serde_json::Value;

pub use brst::{build_complex, cohomology_dims, d0_matrix, BrstComplex, CohomologyEntry};
pub use miura::miura_project;
pub use w2n::{build_w2n, verify_fs, wakimoto_pi, W2nModel};
pub use wbn::{build_wbn, verify_wbn_screening, GammaMode, WbnModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one named verification.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub witness: Option<Value>,
    pub weights_tested: Vec<i64>,
    /// Computed values behind the verdict.
    pub data: Value,
}

impl CheckReport {
    pub fn new(check: &str, ok: bool, witness: Option<Value>, weights_tested: Vec<i64>, data: Value) -> Self {
        CheckReport {
            check: check.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness,
            weights_tested,
            data,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}
