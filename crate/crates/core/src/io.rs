//! File formats: curve CSV, TOML family manifests, energy traces, raw field
//! snapshots with JSON sidecars, and JSON reports.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::causality::CurveFamily;
use crate::curve::{Interpolation, SampledCurve};
use crate::wave::{EnergySample, Grid2D};
use crate::{Error, Result};

/// Writes `s,t,x,y,z` and, for Hermite curves, `dt,dx,dy,dz`.
pub fn write_curve_csv(path: impl AsRef<Path>, curve: &SampledCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let hermite = curve.interpolation() == Interpolation::Hermite;
    let mut header = vec!["s", "t", "x", "y", "z"];
    if hermite {
        header.extend(["dt", "dx", "dy", "dz"]);
    }
    w.write_record(&header)?;
    for k in 0..curve.len() {
        let mut row = vec![curve.params()[k]];
        row.extend(curve.points()[k]);
        if hermite {
            row.extend(curve.tangents()[k]);
        }
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a curve; files without tangent columns load as polylines.
pub fn read_curve_csv(path: impl AsRef<Path>) -> Result<SampledCurve> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let col = |name: &str| header.iter().position(|h| h == name);
    let need = |name: &str| {
        col(name)
            .ok_or_else(|| Error::Invalid(format!("{}: missing column '{name}'", path.display())))
    };
    let pos = [need("s")?, need("t")?, need("x")?, need("y")?, need("z")?];
    let tan = match (col("dt"), col("dx"), col("dy"), col("dz")) {
        (Some(a), Some(b), Some(c), Some(d)) => Some([a, b, c, d]),
        (None, None, None, None) => None,
        _ => {
            return Err(Error::Invalid(format!(
                "{}: incomplete tangent columns",
                path.display()
            )))
        }
    };
    let (mut params, mut points, mut tangents) = (Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |c: usize| -> Result<f64> {
            rec.get(c)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::Invalid(format!(
                        "{}: bad number on row {}",
                        path.display(),
                        line + 2
                    ))
                })
        };
        params.push(num(pos[0])?);
        points.push([num(pos[1])?, num(pos[2])?, num(pos[3])?, num(pos[4])?]);
        if let Some(tc) = tan {
            tangents.push([num(tc[0])?, num(tc[1])?, num(tc[2])?, num(tc[3])?]);
        }
    }
    match tan {
        Some(_) => SampledCurve::new(params, points, tangents),
        None => SampledCurve::polyline(params, points),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMemberEntry {
    pub eps: f64,
    /// Curve CSV, relative to the manifest directory.
    pub file: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compact_radius: Option<f64>,
    pub members: Vec<FamilyMemberEntry>,
}

/// Writes `family.toml` and one curve CSV per member into `dir`.
pub fn write_family(dir: impl AsRef<Path>, family: &CurveFamily) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut members = Vec::new();
    for (k, (eps, curve)) in family.members().iter().enumerate() {
        let file = PathBuf::from(format!("member_{k:03}.csv"));
        write_curve_csv(dir.join(&file), curve)?;
        members.push(FamilyMemberEntry { eps: *eps, file });
    }
    let manifest = FamilyManifest {
        compact_radius: family.compact_radius(),
        members,
    };
    let path = dir.join("family.toml");
    fs::write(&path, toml::to_string(&manifest)?)?;
    Ok(path)
}

pub fn read_family(manifest: impl AsRef<Path>) -> Result<CurveFamily> {
    let manifest = manifest.as_ref();
    let m: FamilyManifest = toml::from_str(&fs::read_to_string(manifest)?)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let members = m
        .members
        .iter()
        .map(|e| Ok((e.eps, read_curve_csv(base.join(&e.file))?)))
        .collect::<Result<Vec<_>>>()?;
    CurveFamily::new(members, m.compact_radius)
}

/// Columns `t,E,E_leapfrog`.
pub fn write_energy_csv(path: impl AsRef<Path>, trace: &[EnergySample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "E", "E_leapfrog"])?;
    for s in trace {
        w.write_record([s.t, s.energy, s.leapfrog_energy].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub t: f64,
}

/// Writes `<stem>.bin` (row-major little-endian f64) and `<stem>.json`.
pub fn write_snapshot(stem: impl AsRef<Path>, grid: &Grid2D, t: f64, u: &[f64]) -> Result<()> {
    if u.len() != grid.len() {
        return Err(Error::Invalid(format!(
            "snapshot of length {} on a {}x{} grid",
            u.len(),
            grid.n,
            grid.n
        )));
    }
    let stem = stem.as_ref();
    let bytes: Vec<u8> = u.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(stem.with_extension("bin"), bytes)?;
    let header = SnapshotHeader {
        nx: grid.n,
        ny: grid.n,
        half_width: grid.half_width,
        t,
    };
    fs::write(
        stem.with_extension("json"),
        serde_json::to_string_pretty(&header)?,
    )?;
    Ok(())
}

pub fn read_snapshot(stem: impl AsRef<Path>) -> Result<(SnapshotHeader, Vec<f64>)> {
    let stem = stem.as_ref();
    let header: SnapshotHeader =
        serde_json::from_str(&fs::read_to_string(stem.with_extension("json"))?)?;
    let bytes = fs::read(stem.with_extension("bin"))?;
    if bytes.len() != 8 * header.nx * header.ny {
        return Err(Error::Invalid(format!(
            "{}: expected {} values, found {} bytes",
            stem.display(),
            header.nx * header.ny,
            bytes.len()
        )));
    }
    let u = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((header, u))
}

pub fn write_json(path: impl AsRef<Path>, value: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}
