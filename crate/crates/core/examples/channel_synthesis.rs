//! Draws a clustered LoS + NLoS channel, inspects its rays and spectrum, and
//! round-trips it through JSON.
//!
//! ```text
//! cargo run --example channel_synthesis [-- <seed>]
//! ```

use thzce::channel::{ChannelConfig, ChannelRealization, PathContext, RayKind};
use thzce::estimators::lowrank::sorted_svd;
use thzce::propagation::Medium;

fn main() -> thzce::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map_or(7, |s| s.parse().expect("seed"));
    let frequency = 0.3e12;
    let ctx = PathContext {
        frequency,
        distance: 1.0,
        absorption: Medium::standard_air().absorption().coefficient(frequency)?,
    };
    let config = ChannelConfig::default();
    let real = ChannelRealization::generate(&config, &ctx, seed)?;

    println!(
        "{} rays, H is {}x{}",
        real.rays.len(),
        real.h.nrows(),
        real.h.ncols()
    );
    for ray in &real.rays {
        let kind = match ray.kind {
            RayKind::Los => "LoS ",
            RayKind::Nlos => "NLoS",
        };
        println!(
            "  {kind} |a|={:.3e} delay={:.3} ns AoD={:+.2} AoA={:+.2}",
            ray.gain.norm(),
            ray.delay * 1e9,
            ray.aod_azimuth,
            ray.aoa_azimuth
        );
    }

    let sv = sorted_svd(&real.h)?.singular_values;
    let shown: Vec<String> = sv
        .iter()
        .take(config.ray_count() + 1)
        .map(|s| format!("{s:.2e}"))
        .collect();
    println!("leading singular values: {}", shown.join(" "));

    let json = real.to_json()?;
    let back = ChannelRealization::from_json(&json)?;
    assert_eq!(back, real);
    println!("JSON record: {} bytes, round trip exact", json.len());
    Ok(())
}
