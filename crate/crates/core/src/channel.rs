//! Deterministic THz MIMO channel synthesis from one LoS ray plus clustered
//! NLoS reflections.
//!
//! The channel matrix is `M_r × M_t` so that `r = H x + z` type-checks for a
//! transmit vector of length `M_t`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::propagation::{absorption_loss, spreading_loss, SPEED_OF_LIGHT};
use crate::serde_util::cmatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrayLayout {
    Linear,
    Planar { rows: usize, cols: usize },
}

/// Antenna array shape and element spacing (in wavelengths).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    elements: usize,
    layout: ArrayLayout,
    spacing: f64,
}

impl ArrayGeometry {
    pub fn new(elements: usize, layout: ArrayLayout, spacing: f64) -> Result<Self> {
        if elements == 0 {
            return Err(invalid("array needs at least one element"));
        }
        if let ArrayLayout::Planar { rows, cols } = layout {
            if rows * cols != elements {
                return Err(invalid(format!(
                    "planar {rows}x{cols} != {elements} elements"
                )));
            }
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid(format!(
                "element spacing {spacing} must be positive"
            )));
        }
        Ok(Self {
            elements,
            layout,
            spacing,
        })
    }

    /// Half-wavelength uniform linear array.
    pub fn linear(elements: usize) -> Result<Self> {
        Self::new(elements, ArrayLayout::Linear, 0.5)
    }

    /// Half-wavelength uniform planar array.
    pub fn planar(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows * cols, ArrayLayout::Planar { rows, cols }, 0.5)
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn layout(&self) -> ArrayLayout {
        self.layout
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
}

/// Unit-norm steering vector. Linear arrays use the azimuth only; planar arrays
/// steer rows by azimuth and columns by elevation, element `(p, q)` stored at
/// index `p * cols + q`.
pub fn array_response(geom: &ArrayGeometry, azimuth: f64, elevation: f64) -> DVector<Complex64> {
    let m = geom.elements;
    let norm = 1.0 / (m as f64).sqrt();
    let k = 2.0 * PI * geom.spacing;
    match geom.layout {
        ArrayLayout::Linear => DVector::from_fn(m, |i, _| {
            Complex64::from_polar(norm, k * i as f64 * azimuth.sin())
        }),
        ArrayLayout::Planar { cols, .. } => DVector::from_fn(m, |i, _| {
            let (p, q) = (i / cols, i % cols);
            let phase = k * (p as f64 * azimuth.sin() + q as f64 * elevation.sin());
            Complex64::from_polar(norm, phase)
        }),
    }
}

/// Smooth-surface TE Fresnel reflection coefficient.
pub fn fresnel_coefficient(incidence: f64, refractive_index: Complex64) -> Complex64 {
    let cos = Complex64::new(incidence.cos(), 0.0);
    let sin2 = incidence.sin().powi(2);
    let root = (refractive_index * refractive_index - sin2).sqrt();
    (cos - root) / (cos + root)
}

/// LoS gain with magnitude (L_spread·L_abs)^{-1/2} and the propagation phase
/// e^{-j2πfd/c}.
pub fn los_gain(freq_hz: f64, distance_m: f64, k_per_m: f64) -> Complex64 {
    let magnitude = (spreading_loss(freq_hz, distance_m) * absorption_loss(k_per_m, distance_m))
        .sqrt()
        .recip();
    Complex64::from_polar(magnitude, delay_phase(freq_hz, distance_m / SPEED_OF_LIGHT))
}

/// Reflected-ray gain: Fresnel-weighted loss over the unfolded path `d1 + d2`,
/// carrying the reflection phase and the delay phase e^{-j2πfτ}.
pub fn nlos_gain(freq_hz: f64, d1: f64, d2: f64, k_per_m: f64, fresnel: Complex64) -> Complex64 {
    let path = d1 + d2;
    let loss = spreading_loss(freq_hz, path) * absorption_loss(k_per_m, path);
    let magnitude = fresnel.norm() / loss.sqrt();
    Complex64::from_polar(
        magnitude,
        fresnel.arg() + delay_phase(freq_hz, path / SPEED_OF_LIGHT),
    )
}

/// Narrowband pulse-shaping factor P_r(f, τ) as a phase angle.
fn delay_phase(freq_hz: f64, delay_s: f64) -> f64 {
    // reduce the cycle count before scaling; fτ is ~1e3 at 0.3 THz over 1 m
    let cycles = freq_hz * delay_s;
    -2.0 * PI * (cycles - cycles.floor())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayKind {
    Los,
    Nlos,
}

/// One propagation path. All angles in radians, delay in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub kind: RayKind,
    pub aod_azimuth: f64,
    pub aod_elevation: f64,
    pub aoa_azimuth: f64,
    pub aoa_elevation: f64,
    pub delay: f64,
    /// Transmitter to reflector, NLoS only.
    pub d1: Option<f64>,
    /// Reflector to receiver, NLoS only.
    pub d2: Option<f64>,
    pub gain: Complex64,
}

/// Cluster and hardware settings for channel generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelConfig {
    pub clusters: usize,
    pub rays_per_cluster: usize,
    pub tx: ArrayGeometry,
    pub rx: ArrayGeometry,
    pub gain_tx: f64,
    pub gain_rx: f64,
    pub reflector_index: Complex64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            clusters: 3,
            rays_per_cluster: 2,
            tx: ArrayGeometry::linear(16).unwrap(),
            rx: ArrayGeometry::linear(16).unwrap(),
            gain_tx: 1.0,
            gain_rx: 1.0,
            reflector_index: Complex64::new(2.24, 0.0),
        }
    }
}

impl ChannelConfig {
    pub fn ray_count(&self) -> usize {
        1 + self.clusters * self.rays_per_cluster
    }

    pub fn validate(&self) -> Result<()> {
        if self.rays_per_cluster == 0 {
            return Err(invalid("rays per cluster must be at least 1"));
        }
        if !(self.gain_tx > 0.0 && self.gain_rx > 0.0) {
            return Err(invalid("antenna gains must be positive"));
        }
        if !(self.reflector_index.norm() > 1.0) {
            return Err(invalid(
                "reflector refractive index must exceed 1 in magnitude",
            ));
        }
        Ok(())
    }
}

/// Carrier, link distance and the absorption coefficient at the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathContext {
    pub frequency: f64,
    pub distance: f64,
    pub absorption: f64,
}

fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-FRAC_PI_2..=FRAC_PI_2)
}

/// Draws one LoS ray followed by `clusters × rays_per_cluster` NLoS rays.
/// Angles are i.i.d. uniform on [-π/2, π/2]; each reflected path length
/// `d1 + d2` is uniform on [d, 3d] with a random split between the two legs.
pub fn draw_rays<R: Rng + ?Sized>(
    rng: &mut R,
    config: &ChannelConfig,
    ctx: &PathContext,
) -> Vec<Ray> {
    let d = ctx.distance;
    let mut rays = Vec::with_capacity(config.ray_count());
    rays.push(Ray {
        kind: RayKind::Los,
        aod_azimuth: uniform_angle(rng),
        aod_elevation: uniform_angle(rng),
        aoa_azimuth: uniform_angle(rng),
        aoa_elevation: uniform_angle(rng),
        delay: d / SPEED_OF_LIGHT,
        d1: None,
        d2: None,
        gain: los_gain(ctx.frequency, d, ctx.absorption),
    });
    for _ in 0..config.clusters * config.rays_per_cluster {
        let aod_azimuth = uniform_angle(rng);
        let aod_elevation = uniform_angle(rng);
        let aoa_azimuth = uniform_angle(rng);
        let aoa_elevation = uniform_angle(rng);
        let path = rng.random_range(d..=3.0 * d);
        let split: f64 = rng.random_range(0.1..0.9);
        let (d1, d2) = (split * path, (1.0 - split) * path);
        // specular bounce off a wall parallel to the LoS: sin θ_i = d / path
        let incidence = (d / path).min(1.0).asin().min(FRAC_PI_2 - 1e-9);
        let fresnel = fresnel_coefficient(incidence, config.reflector_index);
        rays.push(Ray {
            kind: RayKind::Nlos,
            aod_azimuth,
            aod_elevation,
            aoa_azimuth,
            aoa_elevation,
            delay: path / SPEED_OF_LIGHT,
            d1: Some(d1),
            d2: Some(d2),
            gain: nlos_gain(ctx.frequency, d1, d2, ctx.absorption, fresnel),
        });
    }
    rays
}

/// Sums `α·G_t·G_r·a_r·a_tᵀ` over the rays. The delay phase is already part of
/// each ray gain.
pub fn synthesize_channel(
    rays: &[Ray],
    tx: &ArrayGeometry,
    rx: &ArrayGeometry,
    gain_tx: f64,
    gain_rx: f64,
) -> DMatrix<Complex64> {
    let mut h = DMatrix::zeros(rx.elements, tx.elements);
    for ray in rays {
        let a_r = array_response(rx, ray.aoa_azimuth, ray.aoa_elevation);
        let a_t = array_response(tx, ray.aod_azimuth, ray.aod_elevation);
        let scale = ray.gain * gain_tx * gain_rx;
        h += (a_r * a_t.transpose()) * scale;
    }
    h
}

/// A channel matrix together with everything needed to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    #[serde(with = "cmatrix")]
    pub h: DMatrix<Complex64>,
    pub rays: Vec<Ray>,
    pub seed: u64,
    pub frequency: f64,
    pub distance: f64,
    pub absorption: f64,
    pub config: ChannelConfig,
}

impl ChannelRealization {
    /// Draws rays from a ChaCha8 stream seeded with `seed` and synthesizes H.
    pub fn generate(config: &ChannelConfig, ctx: &PathContext, seed: u64) -> Result<Self> {
        config.validate()?;
        if !(ctx.frequency > 0.0 && ctx.distance > 0.0 && ctx.absorption >= 0.0) {
            return Err(invalid(
                "frequency and distance must be positive, absorption non-negative",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rays = draw_rays(&mut rng, config, ctx);
        let h = synthesize_channel(
            &rays,
            &config.tx,
            &config.rx,
            config.gain_tx,
            config.gain_rx,
        );
        if h.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("channel matrix".into()));
        }
        Ok(Self {
            h,
            rays,
            seed,
            frequency: ctx.frequency,
            distance: ctx.distance,
            absorption: ctx.absorption,
            config: config.clone(),
        })
    }

    /// Rebuilds H from the stored rays.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        synthesize_channel(
            &self.rays,
            &self.config.tx,
            &self.config.rx,
            self.config.gain_tx,
            self.config.gain_rx,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks that the stored H matches its rays.
    pub fn verify(&self) -> Result<()> {
        let rebuilt = self.reconstruct();
        let err = (&rebuilt - &self.h).norm() / self.h.norm().max(f64::MIN_POSITIVE);
        if !(err <= 1e-10) {
            return Err(Error::Dataset(format!(
                "stored H differs from ray sum (rel. error {err:e})"
            )));
        }
        Ok(())
    }

    /// Parses a realization and [verifies](Self::verify) it.
    pub fn from_json(text: &str) -> Result<Self> {
        let real: Self = serde_json::from_str(text)?;
        real.verify()?;
        Ok(real)
    }
}
