//! Run outputs: the JSON report, per-slice profile CSV and rasters.
//!
//! Reports carry no timestamps, so identical configs produce byte-identical
//! JSON.

use std::fs;
use std::path::Path;

use serde::Serialize;

use slowlight::beams::{rms_radius, vortex_charge};
use slowlight::grid::ComplexField2D;
use slowlight::io::{write_field_raster, write_slice_manifest, SliceManifestEntry};
use slowlight::propagator::SliceRecord;
use slowlight::scenario::PipelineOutcome;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub name: String,
    pub degraded: bool,
    pub warnings: Vec<String>,
    pub linearity: LinearityReport,
    pub decoupling: DecouplingSummary,
    pub adiabaticity: AdiabaticitySummary,
    /// v_g1/c at the storing plateau.
    pub group_velocity_store: f64,
    pub regenerated: FieldSummary,
    pub slices: Vec<SliceSummary>,
}

#[derive(Debug, Serialize)]
pub struct LinearityReport {
    /// max |Ω_p|/Ω_c over the probe support.
    pub probe_to_control: f64,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct DecouplingSummary {
    pub shared_envelope: bool,
    pub recoil_time_product: f64,
    pub spatial_offdiag_ratio: f64,
    pub decoupled: bool,
}

#[derive(Debug, Serialize)]
pub struct AdiabaticitySummary {
    pub loss_ratio: f64,
    pub polariton_lifetime: f64,
}

#[derive(Debug, Serialize)]
pub struct FieldSummary {
    pub vortex_charge: Option<i32>,
    pub rms_radius: Option<f64>,
    /// Peak |E|² normalized to the input probe peak.
    pub peak_intensity: f64,
    pub norm: f64,
}

#[derive(Debug, Serialize)]
pub struct SliceSummary {
    pub index: usize,
    pub z: f64,
    pub vortex_charge: Option<i32>,
    pub rms_radius: Option<f64>,
    pub peak_intensity: f64,
}

/// Diagnostics of one field, intensities normalized to `peak_ref`².
pub fn field_summary(field: &ComplexField2D, peak_ref: f64) -> FieldSummary {
    FieldSummary {
        vortex_charge: charge_of(field),
        rms_radius: rms_radius(field).ok(),
        peak_intensity: normalized_peak(field, peak_ref),
        norm: field.norm_sq(),
    }
}

pub fn slice_summary(rec: &SliceRecord, peak_ref: f64) -> SliceSummary {
    SliceSummary {
        index: rec.index,
        z: rec.z,
        vortex_charge: charge_of(&rec.field),
        rms_radius: rms_radius(&rec.field).ok(),
        peak_intensity: normalized_peak(&rec.field, peak_ref),
    }
}

fn normalized_peak(field: &ComplexField2D, peak_ref: f64) -> f64 {
    let p = field.max_abs();
    if peak_ref > 0.0 {
        (p / peak_ref).powi(2)
    } else {
        p * p
    }
}

/// Winding number on a loop at half the rms radius (at least 4 grid steps).
fn charge_of(field: &ComplexField2D) -> Option<i32> {
    let rms = rms_radius(field).ok()?;
    let radius = (0.5 * rms).max(4.0 * field.grid().dx());
    vortex_charge(field, radius).ok()
}

/// CSV with one block per recorded slice: z, x, |E|² (relative to the input
/// probe peak) and phase along the y = 0 midline.
pub fn emit_profile_csv(slices: &[SliceRecord], peak_ref: f64, path: &Path) -> anyhow::Result<()> {
    use std::io::Write;
    if slices.is_empty() {
        anyhow::bail!("no recorded slices to export");
    }
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(w, "z_lambda,x_lambda,intensity_rel,phase_rad")?;
    let norm = if peak_ref > 0.0 {
        peak_ref * peak_ref
    } else {
        1.0
    };
    for rec in slices {
        let grid = rec.field.grid();
        let iy = grid.n() / 2;
        for ix in 0..grid.n() {
            let v = rec.field.at(ix, iy);
            writeln!(
                w,
                "{},{},{},{}",
                rec.z,
                grid.coord(ix),
                v.norm_sqr() / norm,
                v.arg()
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write rasters for each slice plus the manifest of z positions.
pub fn emit_rasters(slices: &[SliceRecord], dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for rec in slices {
        let base = dir.join(format!("slice_{:05}", rec.index));
        write_field_raster(&rec.field, &base)?;
        entries.push(SliceManifestEntry {
            index: rec.index,
            z: rec.z,
            raster: format!("slice_{:05}.bin", rec.index),
        });
    }
    write_slice_manifest(&dir.join("manifest.json"), &entries)?;
    Ok(())
}

pub fn build_report(
    name: &str,
    outcome: &PipelineOutcome,
    slices: &[SliceRecord],
    warnings: &[String],
) -> RunReport {
    let peak_ref = outcome.probe_in.max_abs();
    RunReport {
        name: name.to_string(),
        degraded: !outcome.linearity_ok,
        warnings: warnings.to_vec(),
        linearity: LinearityReport {
            probe_to_control: outcome.probe_to_control,
            ok: outcome.linearity_ok,
        },
        decoupling: DecouplingSummary {
            shared_envelope: outcome.decoupling.shared_envelope,
            recoil_time_product: outcome.decoupling.recoil_time_product,
            spatial_offdiag_ratio: outcome.decoupling.spatial_offdiag_ratio,
            decoupled: outcome.decoupling.decoupled,
        },
        adiabaticity: AdiabaticitySummary {
            loss_ratio: outcome.adiabaticity.loss_ratio,
            polariton_lifetime: outcome.adiabaticity.polariton_lifetime,
        },
        group_velocity_store: outcome.group_velocity_store,
        regenerated: field_summary(&outcome.regenerated, peak_ref),
        slices: slices.iter().map(|r| slice_summary(r, peak_ref)).collect(),
    }
}
