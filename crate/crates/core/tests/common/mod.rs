//! Reference computations shared by the oracle and acceptance targets.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thzce::estimators::loss::{loglik, NeuronParams};
use thzce::frontend::{dft_pilots, quantize, RealifiedSystem};

pub fn cmatrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn rmatrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub const STEP: f64 = 1e-6;

pub fn rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale: f64 = numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
    diff / scale.max(1e-12)
}

/// Central differences over every entry of `h` then `z`.
pub fn numeric_neuron_gradient(f: impl Fn(&NeuronParams) -> f64, p: &NeuronParams) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..p.h.len() {
        let (mut up, mut down) = (p.clone(), p.clone());
        up.h[i] += STEP;
        down.h[i] -= STEP;
        out.push((f(&up) - f(&down)) / (2.0 * STEP));
    }
    for i in 0..p.z.len() {
        let (mut up, mut down) = (p.clone(), p.clone());
        up.z[i] += STEP;
        down.z[i] -= STEP;
        out.push((f(&up) - f(&down)) / (2.0 * STEP));
    }
    out
}

pub fn flat(g: &NeuronParams) -> Vec<f64> {
    g.h.iter().chain(g.z.iter()).copied().collect()
}

pub fn neuron_instance(
    m_r: usize,
    m_t: usize,
    n: usize,
    seed: u64,
) -> (RealifiedSystem, NeuronParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pilots = dft_pilots(m_t, m_t + n).unwrap();
    let y = quantize(&cmatrix(m_r, m_t + n, &mut rng)).unwrap();
    let sys = RealifiedSystem::new(&y, &pilots).unwrap();
    let params = NeuronParams {
        h: rmatrix(m_r, 2 * m_t, &mut rng),
        z: rmatrix(m_r, 2, &mut rng),
    };
    (sys, params)
}

pub fn brute_force_simplex(v: &[f64], budget: f64) -> Vec<f64> {
    let n = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let tau = (support.iter().map(|&i| v[i]).sum::<f64>() - budget) / support.len() as f64;
        let mut w = vec![0.0; n];
        for &i in &support {
            w[i] = v[i] - tau;
        }
        if w.iter().any(|&x| x < 0.0) {
            continue;
        }
        let dist: f64 = w.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, w));
        }
    }
    best.unwrap().1
}

/// Central differences of [`loglik`] over the real then imaginary part of
/// every entry, paired with the packed analytic gradient `g`.
pub fn loglik_differences(
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
    sigma: f64,
    g: &DMatrix<Complex64>,
) -> (Vec<f64>, Vec<f64>) {
    let mut analytic = Vec::new();
    let mut numeric = Vec::new();
    for i in 0..x.len() {
        for unit in [Complex64::new(STEP, 0.0), Complex64::new(0.0, STEP)] {
            let (mut up, mut down) = (x.clone(), x.clone());
            up[i] += unit;
            down[i] -= unit;
            numeric.push(
                (loglik(&up, y, sigma).unwrap() - loglik(&down, y, sigma).unwrap()) / (2.0 * STEP),
            );
            analytic.push(if unit.re != 0.0 { g[i].re } else { g[i].im });
        }
    }
    (analytic, numeric)
}
