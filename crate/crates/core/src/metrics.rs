//! Scale-compensated NMSE and aggregation over channel realizations.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::Algorithm;

/// Floor for exact recoveries, in dB.
pub const NMSE_FLOOR_DB: f64 = -300.0;

fn entrywise_l1(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).sum()
}

/// `β = ‖Ĥᴴ H‖₁ / ‖Ĥᴴ Ĥ‖₁` with `‖·‖₁` the entrywise absolute sum.
pub fn beta_scale(h: &DMatrix<Complex64>, h_hat: &DMatrix<Complex64>) -> Result<f64> {
    if h.shape() != h_hat.shape() {
        return Err(Error::Dimension(format!(
            "H {:?} vs estimate {:?}",
            h.shape(),
            h_hat.shape()
        )));
    }
    let den = entrywise_l1(&(h_hat.adjoint() * h_hat));
    if !(den > 0.0) {
        return Err(Error::Degenerate("estimate is zero".into()));
    }
    Ok(entrywise_l1(&(h_hat.adjoint() * h)) / den)
}

/// `‖H − βĤ‖² / ‖H‖²` in linear units.
pub fn nmse_linear(h: &DMatrix<Complex64>, h_hat: &DMatrix<Complex64>) -> Result<f64> {
    let energy = h.norm_squared();
    if !(energy > 0.0) {
        return Err(Error::Degenerate("reference channel is zero".into()));
    }
    let beta = beta_scale(h, h_hat)?;
    Ok((h - h_hat * Complex64::new(beta, 0.0)).norm_squared() / energy)
}

pub fn linear_to_db(linear: f64) -> f64 {
    if linear > 0.0 {
        (10.0 * linear.log10()).max(NMSE_FLOOR_DB)
    } else {
        NMSE_FLOOR_DB
    }
}

/// NMSE in dB, floored at [`NMSE_FLOOR_DB`].
pub fn nmse(h: &DMatrix<Complex64>, h_hat: &DMatrix<Complex64>) -> Result<f64> {
    nmse_linear(h, h_hat).map(linear_to_db)
}

/// One scored training run; also the CSV row layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmseRecord {
    pub algorithm: Algorithm,
    pub pilot_scheme: String,
    pub snr_db: f64,
    pub n_pilots: usize,
    /// Seed of the channel realization.
    pub realization: u64,
    pub nmse_db: f64,
    pub wall_time_s: f64,
}

/// Mean and spread of one (algorithm, scheme, N_p, SNR) configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub algorithm: Algorithm,
    pub pilot_scheme: String,
    pub snr_db: f64,
    pub n_pilots: usize,
    pub count: usize,
    /// dB of the mean linear NMSE.
    pub mean_db: f64,
    pub min_db: f64,
    pub max_db: f64,
    /// Standard deviation of the per-realization dB values.
    pub std_db: f64,
}

fn key_cmp(a: &NmseRecord, b: &NmseRecord) -> Ordering {
    a.algorithm
        .cmp(&b.algorithm)
        .then_with(|| a.pilot_scheme.cmp(&b.pilot_scheme))
        .then_with(|| a.n_pilots.cmp(&b.n_pilots))
        .then_with(|| a.snr_db.total_cmp(&b.snr_db))
}

/// Groups records by configuration and averages in the linear domain.
/// Output is sorted by (algorithm, scheme, N_p, SNR) regardless of input order.
pub fn aggregate(records: &[NmseRecord]) -> Result<Vec<Aggregate>> {
    if records.is_empty() {
        return Err(Error::Empty("no records to aggregate".into()));
    }
    let mut sorted: Vec<&NmseRecord> = records.iter().collect();
    sorted.sort_by(|a, b| key_cmp(a, b).then_with(|| a.nmse_db.total_cmp(&b.nmse_db)));
    let groups = sorted.chunk_by(|a, b| key_cmp(a, b) == Ordering::Equal);
    Ok(groups
        .map(|group| {
            let first = group[0];
            let db: Vec<f64> = group.iter().map(|r| r.nmse_db).collect();
            let count = db.len() as f64;
            let mean_lin = db.iter().map(|&d| 10f64.powf(d / 10.0)).sum::<f64>() / count;
            let mean_plain = db.iter().sum::<f64>() / count;
            let var = db.iter().map(|d| (d - mean_plain).powi(2)).sum::<f64>() / count;
            Aggregate {
                algorithm: first.algorithm,
                pilot_scheme: first.pilot_scheme.clone(),
                snr_db: first.snr_db,
                n_pilots: first.n_pilots,
                count: db.len(),
                mean_db: linear_to_db(mean_lin),
                min_db: db.iter().copied().fold(f64::INFINITY, f64::min),
                max_db: db.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                std_db: var.sqrt(),
            }
        })
        .collect())
}
