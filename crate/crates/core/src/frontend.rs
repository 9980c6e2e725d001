//! Transmit chain: pilot design (DFT, Zadoff-Chu), AWGN transmission, one-bit
//! quantization and the complex-to-real conversion used by the estimators.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::serde_util::cmatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum PilotScheme {
    Dft,
    Zc { root: u32 },
}

impl PilotScheme {
    pub fn name(&self) -> &'static str {
        match self {
            PilotScheme::Dft => "dft",
            PilotScheme::Zc { .. } => "zc",
        }
    }
}

/// Training matrix `M_t × N_p`; every column has unit norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotMatrix {
    #[serde(with = "cmatrix")]
    pub x: DMatrix<Complex64>,
    pub scheme: PilotScheme,
}

impl PilotMatrix {
    pub fn generate(scheme: PilotScheme, m_t: usize, n_p: usize) -> Result<Self> {
        match scheme {
            PilotScheme::Dft => dft_pilots(m_t, n_p),
            PilotScheme::Zc { root } => zc_pilots(m_t, n_p, root),
        }
    }

    pub fn tx_antennas(&self) -> usize {
        self.x.nrows()
    }

    pub fn len(&self) -> usize {
        self.x.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.x.ncols() == 0
    }

    pub fn column(&self, n: usize) -> DVector<Complex64> {
        self.x.column(n).into_owned()
    }

    /// Checks the unit-column-norm invariant.
    pub fn validate(&self) -> Result<()> {
        if self.x.ncols() == 0 || self.x.nrows() == 0 {
            return Err(invalid("pilot matrix must be non-empty"));
        }
        for (j, col) in self.x.column_iter().enumerate() {
            if (col.norm() - 1.0).abs() > 1e-9 {
                return Err(invalid(format!("pilot column {j} has norm {}", col.norm())));
            }
        }
        Ok(())
    }
}

fn check_block(m_t: usize, n_p: usize) -> Result<()> {
    if m_t == 0 {
        return Err(invalid("at least one transmit antenna required"));
    }
    if n_p < m_t {
        return Err(invalid(format!(
            "{n_p} pilots cannot cover {m_t} transmit antennas"
        )));
    }
    Ok(())
}

/// Unit-norm DFT basis vectors of size `m_t`, cycled to fill `n_p` columns.
pub fn dft_pilots(m_t: usize, n_p: usize) -> Result<PilotMatrix> {
    check_block(m_t, n_p)?;
    let norm = 1.0 / (m_t as f64).sqrt();
    let x = DMatrix::from_fn(m_t, n_p, |i, j| {
        let k = (j % m_t) * i % m_t;
        Complex64::from_polar(norm, -2.0 * PI * k as f64 / m_t as f64)
    });
    Ok(PilotMatrix {
        x,
        scheme: PilotScheme::Dft,
    })
}

/// Zadoff-Chu base sequence of length `len` with root `u` (unit modulus entries).
pub fn zc_sequence(len: usize, root: u32) -> Result<Vec<Complex64>> {
    if len == 0 {
        return Err(invalid("ZC length must be positive"));
    }
    if gcd(root as u64, len as u64) != 1 {
        return Err(invalid(format!(
            "ZC root {root} not coprime with length {len}"
        )));
    }
    let n_len = len as u64;
    let u = root as u64 % n_len;
    Ok((0..n_len)
        .map(|n| {
            // exponent reduced modulo 2·len to keep the phase argument small
            let num = if len % 2 == 1 {
                u * n % (2 * n_len) * (n + 1)
            } else {
                u * n % (2 * n_len) * n
            };
            let num = num % (2 * n_len);
            Complex64::from_polar(1.0, -PI * num as f64 / n_len as f64)
        })
        .collect())
}

/// Cyclic shifts of a ZC sequence as columns, normalized and cycled to `n_p`.
pub fn zc_pilots(m_t: usize, n_p: usize, root: u32) -> Result<PilotMatrix> {
    check_block(m_t, n_p)?;
    let base = zc_sequence(m_t, root)?;
    let norm = 1.0 / (m_t as f64).sqrt();
    let x = DMatrix::from_fn(m_t, n_p, |i, j| {
        let shift = j % m_t;
        base[(i + m_t - shift) % m_t] * norm
    });
    Ok(PilotMatrix {
        x,
        scheme: PilotScheme::Zc { root },
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `R = H·X + Z` with Z i.i.d. CN(0, N0).
pub fn transmit<R: Rng + ?Sized>(
    h: &DMatrix<Complex64>,
    pilots: &PilotMatrix,
    n0: f64,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    if h.ncols() != pilots.tx_antennas() {
        return Err(Error::Dimension(format!(
            "H has {} columns, pilots have {} rows",
            h.ncols(),
            pilots.tx_antennas()
        )));
    }
    if !(n0 >= 0.0 && n0.is_finite()) {
        return Err(invalid(format!("noise power {n0} must be non-negative")));
    }
    let mut r = h * &pilots.x;
    let std = (n0 / 2.0).sqrt();
    // column-major fill order keeps the noise stream layout fixed
    for v in r.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex64::new(std * re, std * im);
    }
    Ok(r)
}

/// Noise power giving an average per-sample SNR of `snr_db` for `H·X`.
pub fn noise_power_for_snr(
    h: &DMatrix<Complex64>,
    pilots: &PilotMatrix,
    snr_db: f64,
) -> Result<f64> {
    let signal = h * &pilots.x;
    let energy = signal.norm_squared();
    if !(energy > 0.0) {
        return Err(Error::ZeroSignal);
    }
    let samples = (signal.nrows() * signal.ncols()) as f64;
    Ok(energy / (samples * 10f64.powf(snr_db / 10.0)))
}

fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Element-wise one-bit ADC: `Sign(Re r) + j·Sign(Im r)`, with sign(0) = +1.
pub fn quantize(r: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if let Some(bad) = r.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite(format!("quantizer input {bad}")));
    }
    Ok(r.map(|v| Complex64::new(sign(v.re), sign(v.im))))
}

/// One-bit observations of a pilot block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationBlock {
    #[serde(with = "cmatrix")]
    pub y: DMatrix<Complex64>,
    /// Noise power N0 of the complex AWGN.
    pub n0: f64,
    /// Mean |r|² ahead of the quantizer, as an AGC would report it.
    pub rx_power: f64,
    pub seed: u64,
}

impl ObservationBlock {
    pub fn new(y: DMatrix<Complex64>, n0: f64, rx_power: f64, seed: u64) -> Result<Self> {
        let block = Self {
            y,
            n0,
            rx_power,
            seed,
        };
        block.validate()?;
        Ok(block)
    }

    /// Checks the `{±1 ± j}` alphabet and the noise/power fields.
    pub fn validate(&self) -> Result<()> {
        for (idx, v) in self.y.iter().enumerate() {
            if v.re.abs() != 1.0 || v.im.abs() != 1.0 {
                return Err(Error::Dataset(format!(
                    "observation entry {idx} = {v} outside {{±1±j}}"
                )));
            }
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return Err(invalid(format!("noise power {} must be positive", self.n0)));
        }
        if !(self.rx_power > 0.0 && self.rx_power.is_finite()) {
            return Err(invalid(format!(
                "receive power {} must be positive",
                self.rx_power
            )));
        }
        Ok(())
    }

    /// Per-real-dimension noise standard deviation √(N0/2).
    pub fn noise_std(&self) -> f64 {
        (self.n0 / 2.0).sqrt()
    }

    pub fn rx_antennas(&self) -> usize {
        self.y.nrows()
    }

    pub fn len(&self) -> usize {
        self.y.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.y.ncols() == 0
    }
}

/// Transmits `pilots` through `h` with noise drawn from a ChaCha8 stream
/// seeded by `seed`, then quantizes.
pub fn observe(
    h: &DMatrix<Complex64>,
    pilots: &PilotMatrix,
    n0: f64,
    seed: u64,
) -> Result<ObservationBlock> {
    if !(n0 > 0.0) {
        return Err(invalid("observations need positive noise power"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = transmit(h, pilots, n0, &mut rng)?;
    let rx_power = r.norm_squared() / (r.nrows() * r.ncols()) as f64;
    ObservationBlock::new(quantize(&r)?, n0, rx_power, seed)
}

/// `[Re v, Im v]` as an `n × 2` matrix.
pub fn realify_vector(v: &DVector<Complex64>) -> DMatrix<f64> {
    DMatrix::from_fn(v.len(), 2, |i, c| if c == 0 { v[i].re } else { v[i].im })
}

pub fn derealify_vector(v: &DMatrix<f64>) -> Result<DVector<Complex64>> {
    if v.ncols() != 2 {
        return Err(Error::Dimension(format!(
            "expected 2 columns, got {}",
            v.ncols()
        )));
    }
    Ok(DVector::from_fn(v.nrows(), |i, _| {
        Complex64::new(v[(i, 0)], v[(i, 1)])
    }))
}

/// `[Re H, Im H]`, shape `M_r × 2M_t`.
pub fn realify_channel(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let m_t = h.ncols();
    DMatrix::from_fn(h.nrows(), 2 * m_t, |i, j| {
        if j < m_t {
            h[(i, j)].re
        } else {
            h[(i, j - m_t)].im
        }
    })
}

pub fn derealify_channel(h: &DMatrix<f64>) -> Result<DMatrix<Complex64>> {
    if h.ncols() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "realified channel has odd width {}",
            h.ncols()
        )));
    }
    let m_t = h.ncols() / 2;
    Ok(DMatrix::from_fn(h.nrows(), m_t, |i, j| {
        Complex64::new(h[(i, j)], h[(i, j + m_t)])
    }))
}

/// `[[Re x, Im x], [-Im x, Re x]]`, shape `2M_t × 2`.
pub fn realify_pilot(x: &DVector<Complex64>) -> DMatrix<f64> {
    let m = x.len();
    DMatrix::from_fn(2 * m, 2, |i, c| {
        let (v, lower) = if i < m {
            (x[i], false)
        } else {
            (x[i - m], true)
        };
        match (lower, c) {
            (false, 0) => v.re,
            (false, _) => v.im,
            (true, 0) => -v.im,
            (true, _) => v.re,
        }
    })
}

/// Real-valued training set with pilots stacked pilot-wise: columns `2n` and
/// `2n + 1` of both matrices belong to pilot `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealifiedSystem {
    /// Targets in {-1, +1}, `M_r × 2N`.
    pub y: DMatrix<f64>,
    /// Realified pilots, `2M_t × 2N`.
    pub x: DMatrix<f64>,
}

impl RealifiedSystem {
    pub fn new(obs: &DMatrix<Complex64>, pilots: &PilotMatrix) -> Result<Self> {
        if obs.ncols() != pilots.len() {
            return Err(Error::Dimension(format!(
                "{} observations for {} pilots",
                obs.ncols(),
                pilots.len()
            )));
        }
        let n = pilots.len();
        let m_t = pilots.tx_antennas();
        let mut y = DMatrix::zeros(obs.nrows(), 2 * n);
        let mut x = DMatrix::zeros(2 * m_t, 2 * n);
        for p in 0..n {
            y.columns_mut(2 * p, 2)
                .copy_from(&realify_vector(&obs.column(p).into_owned()));
            x.columns_mut(2 * p, 2)
                .copy_from(&realify_pilot(&pilots.column(p)));
        }
        Ok(Self { y, x })
    }

    pub fn pilots(&self) -> usize {
        self.y.ncols() / 2
    }
}
