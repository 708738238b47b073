//! On-disk layout of a run directory.
//!
//! ```text
//! out/
//!   points.csv
//!   summary.json
//!   heading_000/
//!     damage.csv  point_stress.csv  mean_stress.csv  reliability.csv
//!     pdf_damage_<spot>_<years>y.csv  pdf_stress_<spot>.csv
//!     mcs_reliability.csv  mcs_damage.csv  consistency.csv   (Monte Carlo runs)
//!     loads/q00001_r0.csv ...                                (when loads are kept)
//! ```

use anyhow::{bail, ensure, Context, Result};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use fowt_dpim::analysis::PointDamage;
use fowt_dpim::dpim::{mcs_reliability, ReliabilityCurve};
use fowt_dpim::fatigue::{years_to_seconds, DamageResult};
use fowt_dpim::io::{self, DamageRecord, Location};
use fowt_dpim::pointset::{EnvironmentalPoint, RepresentativePointSet};
use fowt_dpim::stress::TOWER_NODES;

use crate::pipeline::{rates, Consistency, DpimProducts, Hotspot};

pub const POINTS: &str = "points.csv";
pub const SUMMARY: &str = "summary.json";
pub const DAMAGE: &str = "damage.csv";
pub const POINT_STRESS: &str = "point_stress.csv";
pub const MEAN_STRESS: &str = "mean_stress.csv";
pub const RELIABILITY: &str = "reliability.csv";
pub const MCS_RELIABILITY: &str = "mcs_reliability.csv";
pub const MCS_DAMAGE: &str = "mcs_damage.csv";
pub const CONSISTENCY: &str = "consistency.csv";
pub const LOADS: &str = "loads";

pub fn damage_pdf_name(spot: Hotspot, years: f64) -> String {
    format!("pdf_damage_{}_{years}y.csv", spot.name())
}

pub fn stress_pdf_name(spot: Hotspot) -> String {
    format!("pdf_stress_{}.csv", spot.name())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

pub fn write_points(dir: &Path, set: &RepresentativePointSet) -> Result<()> {
    let path = dir.join(POINTS);
    io::write_points(create(&path)?, set).with_context(|| format!("writing {}", path.display()))
}

pub fn read_points(dir: &Path) -> Result<RepresentativePointSet> {
    let path = dir.join(POINTS);
    io::read_points(open(&path)?).with_context(|| format!("reading {}", path.display()))
}

/// Rows ordered by point, replicate, then tower nodes 1..7 and the blade root.
pub fn damage_records(damage: &[PointDamage], replicates: usize) -> Vec<DamageRecord> {
    let mut out = Vec::with_capacity(damage.len() * (TOWER_NODES + 1));
    for (idx, d) in damage.iter().enumerate() {
        let q = idx / replicates + 1;
        for (k, t) in d.tower.iter().enumerate() {
            out.push(DamageRecord {
                q,
                location: Location::Tower,
                node: Some(k + 1),
                d_st: t.d_st,
                dr_st: t.dr_st,
            });
        }
        out.push(DamageRecord {
            q,
            location: Location::BladeRoot,
            node: None,
            d_st: d.blade.d_st,
            dr_st: d.blade.dr_st,
        });
    }
    out
}

pub fn write_damage(dir: &Path, damage: &[PointDamage], replicates: usize) -> Result<()> {
    let path = dir.join(DAMAGE);
    io::write_damage(create(&path)?, &damage_records(damage, replicates))
        .with_context(|| format!("writing {}", path.display()))?;
    let mut w = csv_writer(&dir.join(POINT_STRESS))?;
    let mut header = vec!["q".to_string(), "replicate".to_string()];
    header.extend((1..=TOWER_NODES).map(|k| format!("sigma_node{k}")));
    header.push("sigma_eq_blade".into());
    w.write_record(&header)?;
    for (idx, d) in damage.iter().enumerate() {
        let mut row = vec![(idx / replicates + 1).to_string(), (idx % replicates).to_string()];
        row.extend(d.tower_mean_stress.iter().map(f64::to_string));
        row.push(d.blade_mean_stress.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Rebuilds per-realization results from `damage.csv` and `point_stress.csv`.
pub fn read_damage(dir: &Path, points: usize, replicates: usize, window: f64) -> Result<Vec<PointDamage>> {
    let path = dir.join(DAMAGE);
    let records = io::read_damage(open(&path)?).with_context(|| format!("reading {}", path.display()))?;
    let per = TOWER_NODES + 1;
    let expected = points * replicates;
    ensure!(
        records.len() == expected * per,
        "{} has {} rows, expected {} for {points} points x {replicates} replicates",
        path.display(),
        records.len(),
        expected * per
    );
    let stress_path = dir.join(POINT_STRESS);
    let mut rdr = csv::Reader::from_reader(open(&stress_path)?);
    let stresses: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| -> Result<Vec<f64>> {
            let r = r?;
            ensure!(r.len() == TOWER_NODES + 3, "{} has a short row", stress_path.display());
            r.iter().skip(2).map(|f| Ok(f.parse::<f64>()?)).collect()
        })
        .collect::<Result<_>>()
        .with_context(|| format!("reading {}", stress_path.display()))?;
    ensure!(stresses.len() == expected, "{} has {} rows, expected {expected}", stress_path.display(), stresses.len());

    let result = |r: &DamageRecord| DamageResult {
        d_st: r.d_st,
        dr_st: r.dr_st,
        t_j: window,
    };
    let mut out = Vec::with_capacity(expected);
    for (idx, (chunk, s)) in records.chunks(per).zip(&stresses).enumerate() {
        let q = idx / replicates + 1;
        for (k, r) in chunk.iter().enumerate() {
            let (loc, node) = if k < TOWER_NODES {
                (Location::Tower, Some(k + 1))
            } else {
                (Location::BladeRoot, None)
            };
            if r.q != q || r.location != loc || r.node != node {
                bail!("{} is out of order near point {q}", path.display());
            }
        }
        let mut tower = [result(&chunk[0]); TOWER_NODES];
        for (t, r) in tower.iter_mut().zip(chunk) {
            *t = result(r);
        }
        let mut tower_mean_stress = [0.0; TOWER_NODES];
        tower_mean_stress.copy_from_slice(&s[..TOWER_NODES]);
        out.push(PointDamage {
            tower,
            blade: result(&chunk[TOWER_NODES]),
            tower_mean_stress,
            blade_mean_stress: s[TOWER_NODES],
        });
    }
    Ok(out)
}

pub fn write_dpim(dir: &Path, products: &DpimProducts) -> Result<()> {
    let path = dir.join(RELIABILITY);
    io::write_reliability(create(&path)?, &products.tower, &products.blade)
        .with_context(|| format!("writing {}", path.display()))?;
    for (spot, y, pdf) in &products.damage_pdfs {
        let path = dir.join(damage_pdf_name(*spot, *y));
        io::write_pdf(create(&path)?, pdf).with_context(|| format!("writing {}", path.display()))?;
    }
    for (spot, pdf) in &products.stress_pdfs {
        let path = dir.join(stress_pdf_name(*spot));
        io::write_pdf(create(&path)?, pdf).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut w = csv_writer(&dir.join(MEAN_STRESS))?;
    w.write_record(["location", "node", "mean_stress_pa"])?;
    for (k, s) in products.mean_stress.iter().enumerate() {
        if k < TOWER_NODES {
            w.write_record(["tower".to_string(), (k + 1).to_string(), s.to_string()])?;
        } else {
            w.write_record(["blade_root".to_string(), String::new(), s.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `(location, node, mean_stress_pa)` rows.
pub fn read_mean_stress(dir: &Path) -> Result<Vec<(String, Option<usize>, f64)>> {
    let path = dir.join(MEAN_STRESS);
    let mut rdr = csv::Reader::from_reader(open(&path)?);
    rdr.deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

pub fn read_reliability(dir: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let path = dir.join(RELIABILITY);
    io::read_reliability(open(&path)?).with_context(|| format!("reading {}", path.display()))
}

pub fn write_mcs(dir: &Path, samples: &[EnvironmentalPoint], damage: &[PointDamage], years: &[f64], threshold: f64) -> Result<()> {
    let mut w = csv_writer(&dir.join(MCS_DAMAGE))?;
    w.write_record(["i", "v_w", "h_s", "t_p", "dr_tower_node7", "dr_blade_root"])?;
    for (i, (p, d)) in samples.iter().zip(damage).enumerate() {
        w.write_record([
            (i + 1).to_string(),
            p.v_w.to_string(),
            p.h_s.to_string(),
            p.t_p.to_string(),
            d.tower_node7().dr_st.to_string(),
            d.blade.dr_st.to_string(),
        ])?;
    }
    w.flush()?;
    let tower = rates(damage, Hotspot::TowerNode7);
    let blade = rates(damage, Hotspot::BladeRoot);
    let mut w = csv_writer(&dir.join(MCS_RELIABILITY))?;
    w.write_record(["years", "r_tower_node7", "se_tower_node7", "r_blade_root", "se_blade_root"])?;
    for &y in years {
        let t = years_to_seconds(y);
        let a = mcs_reliability(&tower, t, threshold)?;
        let b = mcs_reliability(&blade, t, threshold)?;
        w.write_record([
            y.to_string(),
            a.reliability.to_string(),
            a.std_error.to_string(),
            b.reliability.to_string(),
            b.std_error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_consistency(dir: &Path, rows: &[Consistency]) -> Result<()> {
    let mut w = csv_writer(&dir.join(CONSISTENCY))?;
    w.write_record(["hotspot", "years", "r_dpim", "r_mcs", "se_mcs", "tolerance", "pdf_ks"])?;
    for c in rows {
        w.write_record([
            c.hotspot.to_string(),
            c.years.to_string(),
            c.r_dpim.to_string(),
            c.r_mcs.to_string(),
            c.se_mcs.to_string(),
            c.tolerance.to_string(),
            c.pdf_ks.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn curve_values(c: &ReliabilityCurve) -> Vec<(f64, f64)> {
    c.years.iter().copied().zip(c.reliability.iter().copied()).collect()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Every regular file under `root` except the summary itself, sorted by path.
pub fn checksums(root: &Path) -> Result<Vec<FileEntry>> {
    let mut files = Vec::new();
    collect_files(root, &mut files)?;
    files.sort();
    let mut out = Vec::with_capacity(files.len());
    for path in files {
        let rel = path.strip_prefix(root).unwrap_or(&path);
        let rel = rel.to_string_lossy().replace('\\', "/");
        if rel == SUMMARY {
            continue;
        }
        let bytes = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        let digest = Sha256::digest(&bytes);
        out.push(FileEntry {
            path: rel,
            bytes: bytes.len() as u64,
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
    }
    Ok(out)
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let entry = entry?;
        let path = entry.path();
        if entry.file_type()?.is_dir() {
            collect_files(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}
