//! THz link budget: molecular absorption and spreading losses, molecular and
//! Johnson-Nyquist noise, and the resulting receiver SNR.
//!
//! All quantities are linear (W/Hz, dimensionless factors) unless a function
//! name ends in `_db`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;

use serde::Deserialize;

use crate::error::{invalid, Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

const BUNDLED_TABLE: &str = include_str!("../data/air_296k_1atm.csv");

/// Power ratio to decibels.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Tabulated absorption coefficient k(f) of a medium, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionSpectrum {
    frequencies: Vec<f64>,
    coefficients: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct TableRow {
    frequency_hz: f64,
    k_per_m: f64,
}

impl AbsorptionSpectrum {
    pub fn new(frequencies: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        if frequencies.len() != coefficients.len() {
            return Err(Error::Dimension(format!(
                "{} frequencies vs {} coefficients",
                frequencies.len(),
                coefficients.len()
            )));
        }
        if frequencies.len() < 2 {
            return Err(Error::Table {
                row: frequencies.len(),
                reason: "at least two rows required".into(),
            });
        }
        for (i, (&f, &k)) in frequencies.iter().zip(&coefficients).enumerate() {
            check_row(i + 1, f, k, i.checked_sub(1).map(|p| frequencies[p]))?;
        }
        Ok(Self {
            frequencies,
            coefficients,
        })
    }

    /// Parses a `frequency_hz,k_per_m` CSV. Row numbers in errors count data
    /// rows from 1 (the header is not counted).
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(source);
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "frequency_hz" || &headers[1] != "k_per_m" {
            return Err(Error::Table {
                row: 0,
                reason: format!(
                    "expected header `frequency_hz,k_per_m`, found `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        let mut frequencies = Vec::new();
        let mut coefficients = Vec::new();
        for (i, rec) in reader.deserialize::<TableRow>().enumerate() {
            let row = i + 1;
            let rec = rec.map_err(|e| Error::Table {
                row,
                reason: format!("malformed row: {e}"),
            })?;
            check_row(
                row,
                rec.frequency_hz,
                rec.k_per_m,
                frequencies.last().copied(),
            )?;
            frequencies.push(rec.frequency_hz);
            coefficients.push(rec.k_per_m);
        }
        Self::new(frequencies, coefficients)
    }

    /// Approximate 0.1–1 THz table for air at 296 K and 1 atm with 0.96 % water
    /// vapour. See `data/README.md` for how it was produced.
    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_TABLE.as_bytes()).expect("bundled absorption table is valid")
    }

    /// Medium without absorption over `[f_min, f_max]`.
    pub fn transparent(f_min: f64, f_max: f64) -> Result<Self> {
        Self::new(vec![f_min, f_max], vec![0.0, 0.0])
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn range(&self) -> (f64, f64) {
        (self.frequencies[0], *self.frequencies.last().unwrap())
    }

    /// k(f) in m⁻¹. Fails outside the tabulated range.
    pub fn coefficient(&self, freq_hz: f64) -> Result<f64> {
        let (min_hz, max_hz) = self.range();
        if !(min_hz..=max_hz).contains(&freq_hz) {
            return Err(Error::OutOfRange {
                freq_hz,
                min_hz,
                max_hz,
            });
        }
        let hi = self.frequencies.partition_point(|&f| f < freq_hz).max(1);
        let lo = hi - 1;
        let (f0, f1) = (self.frequencies[lo], self.frequencies[hi]);
        let (k0, k1) = (self.coefficients[lo], self.coefficients[hi]);
        let t = (freq_hz - f0) / (f1 - f0);
        Ok(k0 + t * (k1 - k0))
    }
}

fn check_row(row: usize, f: f64, k: f64, prev: Option<f64>) -> Result<()> {
    let fail = |reason: String| Err(Error::Table { row, reason });
    if !f.is_finite() || f <= 0.0 {
        return fail(format!("frequency {f} must be finite and positive"));
    }
    if !k.is_finite() || k < 0.0 {
        return fail(format!("coefficient {k} must be finite and non-negative"));
    }
    if let Some(p) = prev {
        if f <= p {
            return fail(format!("frequency {f} not above previous {p}"));
        }
    }
    Ok(())
}

/// Propagation medium. Mixing ratios are carried as metadata only; the
/// absorption table already reflects the composition.
#[derive(Debug, Clone)]
pub struct Medium {
    temperature_k: f64,
    pressure_atm: f64,
    mixing_ratios: BTreeMap<String, f64>,
    absorption: AbsorptionSpectrum,
}

impl Medium {
    pub fn new(
        temperature_k: f64,
        pressure_atm: f64,
        mixing_ratios: BTreeMap<String, f64>,
        absorption: AbsorptionSpectrum,
    ) -> Result<Self> {
        if !(temperature_k > 0.0) {
            return Err(invalid(format!(
                "temperature {temperature_k} K must be positive"
            )));
        }
        if !(pressure_atm > 0.0) {
            return Err(invalid(format!(
                "pressure {pressure_atm} atm must be positive"
            )));
        }
        if let Some((gas, r)) = mixing_ratios
            .iter()
            .find(|(_, r)| !(0.0..=1.0).contains(*r))
        {
            return Err(invalid(format!(
                "mixing ratio of {gas} = {r} outside [0, 1]"
            )));
        }
        Ok(Self {
            temperature_k,
            pressure_atm,
            mixing_ratios,
            absorption,
        })
    }

    /// Indoor air at 296 K, 1 atm with the bundled absorption table.
    pub fn standard_air() -> Self {
        let ratios = [
            ("N2", 0.78),
            ("O2", 0.21),
            ("CO2", 365e-6),
            ("O3", 10e-6),
            ("CH4", 1.7e-6),
            ("H2", 500e-9),
            ("N2O", 320e-9),
            ("H2O", 0.0096),
        ]
        .into_iter()
        .map(|(g, r)| (g.to_string(), r))
        .collect();
        Self::new(296.0, 1.0, ratios, AbsorptionSpectrum::bundled()).expect("standard air is valid")
    }

    pub fn with_absorption(temperature_k: f64, absorption: AbsorptionSpectrum) -> Result<Self> {
        Self::new(temperature_k, 1.0, BTreeMap::new(), absorption)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature_k
    }

    pub fn pressure(&self) -> f64 {
        self.pressure_atm
    }

    pub fn mixing_ratios(&self) -> &BTreeMap<String, f64> {
        &self.mixing_ratios
    }

    pub fn absorption(&self) -> &AbsorptionSpectrum {
        &self.absorption
    }
}

/// Linear absorption loss e^{k·d}.
pub fn absorption_loss(k_per_m: f64, distance_m: f64) -> f64 {
    (k_per_m * distance_m).exp()
}

pub fn absorption_loss_db(k_per_m: f64, distance_m: f64) -> f64 {
    // 10·log10(e^{kd}) without forming the exponential
    10.0 * std::f64::consts::LOG10_E * k_per_m * distance_m
}

/// Free-space spreading loss (4π f d / c)².
pub fn spreading_loss(freq_hz: f64, distance_m: f64) -> f64 {
    (4.0 * PI * freq_hz * distance_m / SPEED_OF_LIGHT).powi(2)
}

pub fn spreading_loss_db(freq_hz: f64, distance_m: f64) -> f64 {
    to_db(spreading_loss(freq_hz, distance_m))
}

/// Johnson-Nyquist noise psd. `approximate` keeps only the first-order term k_B·T.
pub fn jn_noise_psd(freq_hz: f64, temperature_k: f64, approximate: bool) -> f64 {
    let kt = BOLTZMANN * temperature_k;
    if approximate {
        return kt;
    }
    let x = PLANCK * freq_hz / kt;
    // x/(e^x - 1) via exp_m1 stays accurate as x -> 0
    kt * x / x.exp_m1()
}

/// Point-to-point THz link: transmit psd, carrier, distance and medium.
#[derive(Debug, Clone)]
pub struct LinkBudget {
    tx_psd: f64,
    frequency_hz: f64,
    distance_m: f64,
    medium: Medium,
}

impl LinkBudget {
    pub fn new(tx_psd: f64, frequency_hz: f64, distance_m: f64, medium: Medium) -> Result<Self> {
        if !(tx_psd > 0.0 && tx_psd.is_finite()) {
            return Err(invalid(format!("tx psd {tx_psd} must be positive")));
        }
        if !(frequency_hz > 0.0 && frequency_hz.is_finite()) {
            return Err(invalid(format!(
                "frequency {frequency_hz} must be positive"
            )));
        }
        if !(distance_m > 0.0 && distance_m.is_finite()) {
            return Err(invalid(format!("distance {distance_m} must be positive")));
        }
        Ok(Self {
            tx_psd,
            frequency_hz,
            distance_m,
            medium,
        })
    }

    pub fn tx_psd(&self) -> f64 {
        self.tx_psd
    }

    pub fn frequency(&self) -> f64 {
        self.frequency_hz
    }

    pub fn distance(&self) -> f64 {
        self.distance_m
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    /// k(f) at the carrier.
    pub fn absorption_coefficient(&self) -> Result<f64> {
        self.medium.absorption.coefficient(self.frequency_hz)
    }

    /// P_Tx / L_spread = P_Tx·C·f⁻²·d⁻² with C = c²/(16π²).
    fn spread_psd(&self) -> f64 {
        let c = SPEED_OF_LIGHT * SPEED_OF_LIGHT / (16.0 * PI * PI);
        self.tx_psd * c
            / (self.frequency_hz * self.frequency_hz * self.distance_m * self.distance_m)
    }

    pub fn received_psd(&self) -> Result<f64> {
        let k = self.absorption_coefficient()?;
        Ok(self.spread_psd() * (-k * self.distance_m).exp())
    }

    pub fn molecular_noise_psd(&self) -> Result<f64> {
        let k = self.absorption_coefficient()?;
        Ok(self.spread_psd() * -(-k * self.distance_m).exp_m1())
    }

    /// k_B·T plus molecular noise.
    pub fn total_noise_psd(&self) -> Result<f64> {
        Ok(
            jn_noise_psd(self.frequency_hz, self.medium.temperature_k, true)
                + self.molecular_noise_psd()?,
        )
    }

    pub fn snr(&self) -> Result<f64> {
        Ok(self.received_psd()? / self.total_noise_psd()?)
    }

    pub fn snr_db(&self) -> Result<f64> {
        self.snr().map(to_db)
    }

    /// Noise power over a flat band of `bandwidth_hz`.
    pub fn noise_power(&self, bandwidth_hz: f64) -> Result<f64> {
        if !(bandwidth_hz > 0.0) {
            return Err(invalid("bandwidth must be positive"));
        }
        Ok(self.total_noise_psd()? * bandwidth_hz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flat(k: f64) -> Medium {
        let spec = AbsorptionSpectrum::new(vec![1e11, 1e12], vec![k, k]).unwrap();
        Medium::with_absorption(296.0, spec).unwrap()
    }

    #[test]
    fn zero_absorption_table() {
        let csv = "frequency_hz,k_per_m\n1e11,0.0\n1e12,0.0\n";
        let spec = AbsorptionSpectrum::from_csv(csv.as_bytes()).unwrap();
        for f in [1e11, 3e11, 7.7e11, 1e12] {
            assert_eq!(spec.coefficient(f).unwrap(), 0.0);
        }
    }

    #[test]
    fn interpolates_linearly() {
        let csv = "frequency_hz,k_per_m\n2e11,0.1\n4e11,0.3\n";
        let spec = AbsorptionSpectrum::from_csv(csv.as_bytes()).unwrap();
        assert_relative_eq!(spec.coefficient(3e11).unwrap(), 0.2, max_relative = 1e-12);
        assert_eq!(spec.coefficient(2e11).unwrap(), 0.1);
        assert_eq!(spec.coefficient(4e11).unwrap(), 0.3);
    }

    #[test]
    fn rejects_bad_tables() {
        let descending = "frequency_hz,k_per_m\n4e11,0.1\n2e11,0.3\n";
        match AbsorptionSpectrum::from_csv(descending.as_bytes()) {
            Err(Error::Table { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected row error, got {other:?}"),
        }
        let negative = "frequency_hz,k_per_m\n1e11,0.1\n2e11,-0.3\n3e11,0.1\n";
        assert!(matches!(
            AbsorptionSpectrum::from_csv(negative.as_bytes()),
            Err(Error::Table { row: 2, .. })
        ));
        let malformed = "frequency_hz,k_per_m\n1e11,0.1\n2e11,abc\n";
        assert!(matches!(
            AbsorptionSpectrum::from_csv(malformed.as_bytes()),
            Err(Error::Table { row: 2, .. })
        ));
        let header = "freq,k\n1e11,0.1\n2e11,0.1\n";
        assert!(AbsorptionSpectrum::from_csv(header.as_bytes()).is_err());
        let single = "frequency_hz,k_per_m\n1e11,0.1\n";
        assert!(AbsorptionSpectrum::from_csv(single.as_bytes()).is_err());
    }

    #[test]
    fn no_extrapolation() {
        let spec = AbsorptionSpectrum::bundled();
        assert!(matches!(
            spec.coefficient(5e10),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            spec.coefficient(1.1e12),
            Err(Error::OutOfRange { .. })
        ));
        let (lo, hi) = spec.range();
        assert_eq!((lo, hi), (1e11, 1e12));
        assert!(spec.coefficient(3e11).unwrap() > 0.0);
    }

    #[test]
    fn absorption_loss_values() {
        assert_eq!(absorption_loss(0.0, 5.0), 1.0);
        assert_eq!(absorption_loss_db(0.0, 5.0), 0.0);
        assert_relative_eq!(
            absorption_loss(0.1, 1.0),
            1.105_170_918_075_647_7,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            absorption_loss_db(0.1, 1.0),
            0.434_294_481_903_251_8,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            to_db(absorption_loss(0.1, 1.0)),
            absorption_loss_db(0.1, 1.0),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            absorption_loss(0.1, 10.0),
            absorption_loss(0.1, 1.0).powi(10),
            max_relative = 1e-12
        );
    }

    #[test]
    fn spreading_loss_values() {
        // 20·log10(4π·3e11/c) with the exact SI speed of light
        assert!((spreading_loss_db(0.3e12, 1.0) - 81.990_208).abs() < 1e-6);
        assert_relative_eq!(
            spreading_loss(0.3e12, 2.0),
            4.0 * spreading_loss(0.3e12, 1.0),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            spreading_loss(SPEED_OF_LIGHT / (4.0 * PI), 1.0),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn received_psd_values() {
        let lb = LinkBudget::new(1.0, 0.3e12, 1.0, flat(0.0)).unwrap();
        let rx = lb.received_psd().unwrap();
        assert_relative_eq!(rx, 1.0 / spreading_loss(0.3e12, 1.0), max_relative = 1e-12);
        assert!((to_db(rx) + 81.990_208).abs() < 1e-6);
        let far = LinkBudget::new(1.0, 0.3e12, 2.0, flat(0.0)).unwrap();
        assert_relative_eq!(far.received_psd().unwrap(), rx / 4.0, max_relative = 1e-12);
        assert_eq!(lb.molecular_noise_psd().unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_carrier() {
        let lb = LinkBudget::new(1.0, 2e12, 1.0, flat(0.1)).unwrap();
        assert!(matches!(lb.received_psd(), Err(Error::OutOfRange { .. })));
        assert!(lb.snr().is_err());
    }

    #[test]
    fn molecular_noise_saturates() {
        let lb = LinkBudget::new(1.0, 0.3e12, 1.0, flat(1e3)).unwrap();
        let spread = 1.0 / spreading_loss(0.3e12, 1.0);
        assert_relative_eq!(
            lb.molecular_noise_psd().unwrap(),
            spread,
            max_relative = 1e-12
        );
    }

    #[test]
    fn jn_noise_values() {
        let exact = jn_noise_psd(0.3e12, 296.0, false);
        let approx = jn_noise_psd(0.3e12, 296.0, true);
        assert!((exact - 3.988e-21).abs() < 0.001e-21, "{exact}");
        assert!((approx - 4.087e-21).abs() < 0.001e-21, "{approx}");
        assert!((exact / approx - 0.976).abs() < 0.001);
        let tiny = jn_noise_psd(1.0, 296.0, false);
        assert_relative_eq!(tiny, BOLTZMANN * 296.0, max_relative = 1e-9);
    }

    #[test]
    fn thermal_only_snr() {
        let lb = LinkBudget::new(1e-3, 0.3e12, 1.0, flat(0.0)).unwrap();
        let expected = 1e-3 / spreading_loss(0.3e12, 1.0) / (BOLTZMANN * 296.0);
        assert_relative_eq!(lb.snr().unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn molecular_limited_ceiling() {
        let k = 0.5;
        let lb = LinkBudget::new(1e30, 0.3e12, 1.0, flat(k)).unwrap();
        let ceiling = (-k).exp() / (1.0 - (-k).exp());
        assert_relative_eq!(lb.snr().unwrap(), ceiling, max_relative = 1e-9);
    }

    #[test]
    fn medium_validation() {
        let spec = AbsorptionSpectrum::transparent(1e11, 1e12).unwrap();
        assert!(Medium::new(0.0, 1.0, BTreeMap::new(), spec.clone()).is_err());
        assert!(Medium::new(296.0, -1.0, BTreeMap::new(), spec.clone()).is_err());
        let bad: BTreeMap<_, _> = [("H2O".to_string(), 1.5)].into_iter().collect();
        assert!(Medium::new(296.0, 1.0, bad, spec).is_err());
        assert_eq!(Medium::standard_air().mixing_ratios().len(), 8);
        assert!(LinkBudget::new(0.0, 1e11, 1.0, Medium::standard_air()).is_err());
    }
}
