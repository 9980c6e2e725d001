use std::collections::BTreeSet;
use std::path::Path;

use plotters::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{aggregate, Aggregate, NmseRecord};

pub const CSV_HEADER: &str =
    "algorithm,pilot_scheme,snr_db,n_pilots,realization,nmse_db,wall_time_s";

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => Ok(std::fs::create_dir_all(dir)?),
        _ => Ok(()),
    }
}

/// Writes one row per record under [`CSV_HEADER`]. Floats use the shortest
/// representation that parses back to the same value.
pub fn emit_csv(records: &[NmseRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Empty("no records to write".into()));
    }
    ensure_parent(path)?;
    let mut writer = csv::Writer::from_path(path)?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<NmseRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Dataset(format!("unexpected CSV header `{header}`")));
    }
    let records = reader
        .deserialize()
        .collect::<std::result::Result<Vec<NmseRecord>, _>>()?;
    Ok(records)
}

#[derive(Clone, Copy, PartialEq)]
enum Axis {
    Pilots,
    Snr,
}

fn distinct<T: Ord>(values: impl Iterator<Item = T>) -> usize {
    values.collect::<BTreeSet<_>>().len()
}

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Plot(e.to_string())
}

/// Renders mean NMSE (dB) per algorithm×scheme as an SVG line chart. The x
/// axis is whichever of N_p and SNR takes more distinct values.
pub fn emit_plot(records: &[NmseRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Empty("no records to plot".into()));
    }
    let groups = aggregate(records)?;
    let n_pilot_values = distinct(groups.iter().map(|g| g.n_pilots));
    let snr_values = distinct(groups.iter().map(|g| g.snr_db.to_bits()));
    let axis = if n_pilot_values >= snr_values {
        Axis::Pilots
    } else {
        Axis::Snr
    };
    let x_of = |g: &Aggregate| match axis {
        Axis::Pilots => g.n_pilots as f64,
        Axis::Snr => g.snr_db,
    };

    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for g in &groups {
        let mut label = format!("{}/{}", g.algorithm.name(), g.pilot_scheme);
        match axis {
            Axis::Pilots if snr_values > 1 => label.push_str(&format!(" @{} dB", g.snr_db)),
            Axis::Snr if n_pilot_values > 1 => label.push_str(&format!(" @N_p={}", g.n_pilots)),
            _ => {}
        }
        match series.iter_mut().find(|(l, _)| *l == label) {
            Some((_, pts)) => pts.push((x_of(g), g.mean_db)),
            None => series.push((label, vec![(x_of(g), g.mean_db)])),
        }
    }
    for (_, pts) in &mut series {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series.iter().flat_map(|(_, p)| p) {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if x_max == x_min {
        x_min -= 1.0;
        x_max += 1.0;
    }
    let pad = ((y_max - y_min) * 0.1).max(0.5);

    ensure_parent(path)?;
    let root = SVGBackend::new(path, (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let x_label = match axis {
        Axis::Pilots => "number of pilots N_p",
        Axis::Snr => "SNR (dB)",
    };
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(56)
        .build_cartesian_2d(x_min..x_max, (y_min - pad)..(y_max + pad))
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc(x_label)
        .y_desc("NMSE (dB)")
        .draw()
        .map_err(plot_err)?;
    for (idx, (label, pts)) in series.iter().enumerate() {
        let color = Palette99::pick(idx).to_rgba();
        chart
            .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(label.as_str())
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
            });
        chart
            .draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))
            .map_err(plot_err)?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Algorithm;

    fn record(alg: Algorithm, n_pilots: usize, nmse_db: f64) -> NmseRecord {
        NmseRecord {
            algorithm: alg,
            pilot_scheme: "zc".into(),
            snr_db: 0.0,
            n_pilots,
            realization: 17,
            nmse_db,
            wall_time_s: 0.0,
        }
    }

    #[test]
    fn empty_records_create_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("out.csv");
        let svg = dir.path().join("out.svg");
        assert!(emit_csv(&[], &csv).is_err());
        assert!(emit_plot(&[], &svg).is_err());
        assert!(!csv.exists() && !svg.exists());
    }

    #[test]
    fn single_record_csv_has_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.csv");
        emit_csv(&[record(Algorithm::Fw, 16, -9.25)], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "fw,zc,0.0,16,17,-9.25,0.0");
    }

    #[test]
    fn plot_is_svg_with_one_curve_per_series() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/plot.svg");
        let records = [
            record(Algorithm::Pga, 16, -8.0),
            record(Algorithm::Pga, 32, -10.0),
            record(Algorithm::Lr, 16, -5.0),
            record(Algorithm::Lr, 32, -6.0),
        ];
        emit_plot(&records, &path).unwrap();
        let svg = std::fs::read_to_string(&path).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("pga/zc") && svg.contains("lr/zc"));
        assert!(svg.contains("NMSE (dB)"));
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        assert!(emit_csv(&[record(Algorithm::Lr, 16, -1.0)], &blocker.join("a.csv")).is_err());
    }
}
