//! Path loss, noise and SNR of a 0.3 THz link in indoor air.
//!
//! ```text
//! cargo run --example link_budget
//! ```

use thzce::propagation::{
    absorption_loss_db, jn_noise_psd, spreading_loss_db, to_db, LinkBudget, Medium, BOLTZMANN,
};

fn main() -> thzce::Result<()> {
    let f = 0.3e12;
    let air = Medium::standard_air();
    let k = air.absorption().coefficient(f)?;
    println!("k(0.3 THz) = {k:.3e} 1/m");

    let exact = jn_noise_psd(f, air.temperature(), false);
    let approx = jn_noise_psd(f, air.temperature(), true);
    println!(
        "thermal noise psd: exact {exact:.4e} W/Hz, k_B*T {approx:.4e} W/Hz (ratio {:.4})",
        exact / approx
    );
    assert_eq!(approx, BOLTZMANN * air.temperature());

    let tx_psd = 1e-10;
    println!(
        "\n{:>8} {:>12} {:>14} {:>10}",
        "d (m)", "spread (dB)", "absorb (dB)", "SNR (dB)"
    );
    for d in [0.1, 1.0, 5.0, 10.0, 50.0] {
        let link = LinkBudget::new(tx_psd, f, d, air.clone())?;
        println!(
            "{d:>8} {:>12.2} {:>14.4} {:>10.2}",
            spreading_loss_db(f, d),
            absorption_loss_db(k, d),
            link.snr_db()?
        );
    }

    let link = LinkBudget::new(tx_psd, f, 10.0, air)?;
    println!(
        "\nat 10 m: received {:.3e} W/Hz, molecular noise {:.3e} W/Hz, noise power over 10 GHz {:.1} dBW",
        link.received_psd()?,
        link.molecular_noise_psd()?,
        to_db(link.noise_power(10e9)?)
    );
    Ok(())
}
