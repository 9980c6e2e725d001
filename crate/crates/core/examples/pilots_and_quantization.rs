//! DFT and Zadoff-Chu training blocks, AWGN calibration, one-bit
//! quantization and the realified system the neural learners see.
//!
//! ```text
//! cargo run --example pilots_and_quantization
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use thzce::frontend::{
    noise_power_for_snr, observe, zc_sequence, PilotMatrix, PilotScheme, RealifiedSystem,
};

fn main() -> thzce::Result<()> {
    let (m_t, n_p) = (8, 16);
    for scheme in [PilotScheme::Dft, PilotScheme::Zc { root: 3 }] {
        let p = PilotMatrix::generate(scheme, m_t, n_p)?;
        let block = p.x.columns(0, m_t).into_owned();
        let gram_err = (&block * block.adjoint() - DMatrix::<Complex64>::identity(m_t, m_t)).norm();
        println!(
            "{:>3}: first {m_t} columns unitary to {gram_err:.1e}",
            scheme.name()
        );
    }

    let z = zc_sequence(m_t, 3)?;
    let autocorr: Vec<f64> = (0..m_t)
        .map(|lag| {
            (0..m_t)
                .map(|n| z[n] * z[(n + lag) % m_t].conj())
                .sum::<Complex64>()
                .norm()
        })
        .collect();
    println!("ZC cyclic autocorrelation magnitudes: {autocorr:.2?}");

    let h = DMatrix::from_fn(4, m_t, |i, j| {
        Complex64::from_polar(1e-5, 0.7 * (i * j) as f64)
    });
    let pilots = PilotMatrix::generate(PilotScheme::Zc { root: 1 }, m_t, n_p)?;
    let n0 = noise_power_for_snr(&h, &pilots, 0.0)?;
    let obs = observe(&h, &pilots, n0, 42)?;
    let first: Vec<String> = obs
        .y
        .row(0)
        .iter()
        .take(4)
        .map(|v| format!("{v}"))
        .collect();
    println!("N0 = {n0:.3e} for 0 dB; antenna 0 sees {}", first.join(" "));

    let sys = RealifiedSystem::new(&obs.y, &pilots)?;
    println!(
        "realified: targets {}x{}, inputs {}x{} ({} pilots)",
        sys.y.nrows(),
        sys.y.ncols(),
        sys.x.nrows(),
        sys.x.ncols(),
        sys.pilots()
    );
    Ok(())
}
