//! CSV persistence for every pipeline stage.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! write/read cycle reproduces values bit for bit. Readers check the header
//! row exactly.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::dpim::{PdfEstimate, ReliabilityCurve};
use crate::error::{Error, Result};
use crate::fatigue::StressCycle;
use crate::pointset::{EnvironmentalPoint, RepresentativePointSet};
use crate::simulator::LoadTimeSeries;
use crate::stress::{StressTimeSeries, TOWER_NODES};

pub const POINT_HEADER: [&str; 5] = ["q", "v_w", "h_s", "t_p", "p_q"];
pub const CYCLE_HEADER: [&str; 3] = ["range_pa", "mean_pa", "count"];
pub const DAMAGE_HEADER: [&str; 5] = ["q", "location", "node", "d_st", "dr_st_per_s"];
pub const PDF_HEADER: [&str; 2] = ["y", "density"];
pub const RELIABILITY_HEADER: [&str; 3] = ["years", "r_tower_node7", "r_blade_root"];

fn parse_err(what: &'static str, reason: impl Into<String>) -> Error {
    Error::Parse {
        what,
        reason: reason.into(),
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, what: &'static str, expected: &[&str]) -> Result<()> {
    let found = rdr.headers()?;
    if found.iter().ne(expected.iter().copied()) {
        return Err(parse_err(
            what,
            format!("expected header {:?}, found {:?}", expected, found.iter().collect::<Vec<_>>()),
        ));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PointRow {
    q: usize,
    v_w: f64,
    h_s: f64,
    t_p: f64,
    p_q: f64,
}

/// Writes a point set with 1-based point indices.
pub fn write_points<W: Write>(w: W, set: &RepresentativePointSet) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for (i, (p, prob)) in set.points.iter().zip(&set.probabilities).enumerate() {
        wtr.serialize(PointRow {
            q: i + 1,
            v_w: p.v_w,
            h_s: p.h_s,
            t_p: p.t_p,
            p_q: *prob,
        })?;
    }
    if set.is_empty() {
        wtr.write_record(POINT_HEADER)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_points<R: Read>(r: R) -> Result<RepresentativePointSet> {
    let mut rdr = reader(r);
    check_header(&mut rdr, "point set", &POINT_HEADER)?;
    let mut points = Vec::new();
    let mut probs = Vec::new();
    for (i, row) in rdr.deserialize::<PointRow>().enumerate() {
        let row = row?;
        if row.q != i + 1 {
            return Err(parse_err("point set", format!("row {} has q = {}", i + 1, row.q)));
        }
        points.push(EnvironmentalPoint::new(row.v_w, row.h_s, row.t_p));
        probs.push(row.p_q);
    }
    RepresentativePointSet::new(points, probs)
}

/// Provenance written on the first line of a load file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadMetadata {
    pub point: EnvironmentalPoint,
    pub heading_deg: f64,
    pub seed: u64,
    pub dt: f64,
}

impl LoadMetadata {
    fn line(&self) -> String {
        format!(
            "# v_w={} h_s={} t_p={} heading_deg={} seed={} dt={}",
            self.point.v_w, self.point.h_s, self.point.t_p, self.heading_deg, self.seed, self.dt
        )
    }

    fn parse(line: &str) -> Result<Self> {
        const WHAT: &str = "load metadata";
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| parse_err(WHAT, "first line must start with '#'"))?;
        let mut fields: [Option<&str>; 6] = [None; 6];
        const KEYS: [&str; 6] = ["v_w", "h_s", "t_p", "heading_deg", "seed", "dt"];
        for token in body.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| parse_err(WHAT, format!("token {token:?} is not key=value")))?;
            let slot = KEYS
                .iter()
                .position(|key| *key == k)
                .ok_or_else(|| parse_err(WHAT, format!("unknown key {k:?}")))?;
            if fields[slot].replace(v).is_some() {
                return Err(parse_err(WHAT, format!("duplicate key {k:?}")));
            }
        }
        let get = |i: usize| fields[i].ok_or_else(|| parse_err(WHAT, format!("missing key {:?}", KEYS[i])));
        let float = |i: usize| -> Result<f64> {
            let v = get(i)?;
            v.parse::<f64>()
                .map_err(|e| parse_err(WHAT, format!("{}={v}: {e}", KEYS[i])))
        };
        let seed = get(4)?
            .parse::<u64>()
            .map_err(|e| parse_err(WHAT, format!("seed: {e}")))?;
        Ok(Self {
            point: EnvironmentalPoint::new(float(0)?, float(1)?, float(2)?),
            heading_deg: float(3)?,
            seed,
            dt: float(5)?,
        })
    }
}

fn load_header() -> Vec<&'static str> {
    let mut h = vec!["t"];
    h.extend(LoadTimeSeries::CHANNELS);
    h
}

pub fn write_loads<W: Write>(mut w: W, meta: &LoadMetadata, loads: &LoadTimeSeries) -> Result<()> {
    writeln!(w, "{}", meta.line())?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(load_header())?;
    let channels = loads.channels();
    let mut record = Vec::with_capacity(10);
    for i in 0..loads.len() {
        record.clear();
        record.push((i as f64 * loads.dt).to_string());
        record.extend(channels.iter().map(|c| c[i].to_string()));
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_loads<R: Read>(mut r: R) -> Result<(LoadMetadata, LoadTimeSeries)> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let (first, rest) = text.split_once('\n').unwrap_or((text.as_str(), ""));
    let meta = LoadMetadata::parse(first.trim_end_matches('\r'))?;
    let mut rdr = reader(rest.as_bytes());
    check_header(&mut rdr, "load series", &load_header())?;
    let mut channels: [Vec<f64>; 9] = Default::default();
    for record in rdr.records() {
        let record = record?;
        if record.len() != 10 {
            return Err(parse_err("load series", format!("expected 10 fields, found {}", record.len())));
        }
        for (ch, field) in channels.iter_mut().zip(record.iter().skip(1)) {
            ch.push(
                field
                    .parse::<f64>()
                    .map_err(|e| parse_err("load series", format!("{field:?}: {e}")))?,
            );
        }
    }
    let loads = LoadTimeSeries::from_channels(meta.dt, channels)?;
    Ok((meta, loads))
}

/// `t, sigma_node1 .. sigma_node7`.
pub fn write_tower_stress<W: Write>(w: W, nodes: &[StressTimeSeries]) -> Result<()> {
    if nodes.len() != TOWER_NODES {
        return Err(Error::LengthMismatch {
            what: "tower stress nodes",
            left: nodes.len(),
            right: TOWER_NODES,
        });
    }
    let mut header = vec!["t".to_string()];
    header.extend((1..=TOWER_NODES).map(|k| format!("sigma_node{k}")));
    write_columns(w, &header, nodes[0].dt, &nodes.iter().map(|s| s.samples.as_slice()).collect::<Vec<_>>())
}

/// `t, sigma0, tau0, sigma_eq`.
pub fn write_blade_stress<W: Write>(
    w: W,
    sigma0: &StressTimeSeries,
    tau0: &StressTimeSeries,
    sigma_eq: &StressTimeSeries,
) -> Result<()> {
    let header = ["t", "sigma0", "tau0", "sigma_eq"].map(String::from);
    write_columns(w, &header, sigma0.dt, &[&sigma0.samples, &tau0.samples, &sigma_eq.samples])
}

fn write_columns<W: Write>(w: W, header: &[String], dt: f64, columns: &[&[f64]]) -> Result<()> {
    let n = columns[0].len();
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            what: "stress columns",
            left: n,
            right: c.len(),
        });
    }
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    let mut record = Vec::with_capacity(columns.len() + 1);
    for i in 0..n {
        record.clear();
        record.push((i as f64 * dt).to_string());
        record.extend(columns.iter().map(|c| c[i].to_string()));
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CycleRow {
    range_pa: f64,
    mean_pa: f64,
    count: f64,
}

pub fn write_cycles<W: Write>(w: W, cycles: &[StressCycle]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CYCLE_HEADER)?;
    for c in cycles {
        wtr.write_record(&[c.range.to_string(), c.mean.to_string(), c.count.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_cycles<R: Read>(r: R) -> Result<Vec<StressCycle>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, "cycle table", &CYCLE_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<CycleRow>() {
        let row = row?;
        let c = StressCycle {
            range: row.range_pa,
            mean: row.mean_pa,
            count: row.count,
        };
        if !c.is_valid() {
            return Err(parse_err("cycle table", format!("invalid cycle {c:?}")));
        }
        out.push(c);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Tower,
    BladeRoot,
}

/// One row of the damage table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamageRecord {
    /// 1-based point index.
    pub q: usize,
    pub location: Location,
    /// Tower node, absent for the blade root.
    pub node: Option<usize>,
    pub d_st: f64,
    #[serde(rename = "dr_st_per_s")]
    pub dr_st: f64,
}

pub fn write_damage<W: Write>(w: W, records: &[DamageRecord]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(DAMAGE_HEADER)?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_damage<R: Read>(r: R) -> Result<Vec<DamageRecord>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, "damage table", &DAMAGE_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<DamageRecord>() {
        let row = row?;
        let node_ok = match (row.location, row.node) {
            (Location::Tower, Some(k)) => (1..=TOWER_NODES).contains(&k),
            (Location::BladeRoot, None) => true,
            _ => false,
        };
        if !node_ok || row.q == 0 || !(row.d_st >= 0.0 && row.dr_st >= 0.0) || !row.d_st.is_finite() || !row.dr_st.is_finite() {
            return Err(parse_err("damage table", format!("invalid row {row:?}")));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn write_pdf<W: Write>(w: W, pdf: &PdfEstimate) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(PDF_HEADER)?;
    for (y, d) in pdf.grid.iter().zip(&pdf.density) {
        wtr.write_record(&[y.to_string(), d.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `(y, density)` pairs.
pub fn read_pdf<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, "density table", &PDF_HEADER)?;
    rdr.deserialize::<(f64, f64)>()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Reliability of the tower lee node and the blade root on a shared time axis.
pub fn write_reliability<W: Write>(w: W, tower: &ReliabilityCurve, blade: &ReliabilityCurve) -> Result<()> {
    if tower.years != blade.years {
        return Err(crate::error::domain("tower and blade curves must share operating times"));
    }
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(RELIABILITY_HEADER)?;
    for ((y, rt), rb) in tower.years.iter().zip(&tower.reliability).zip(&blade.reliability) {
        wtr.write_record(&[y.to_string(), rt.to_string(), rb.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `(years, r_tower_node7, r_blade_root)` rows.
pub fn read_reliability<R: Read>(r: R) -> Result<Vec<(f64, f64, f64)>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, "reliability table", &RELIABILITY_HEADER)?;
    let rows: Vec<(f64, f64, f64)> = rdr
        .deserialize()
        .collect::<std::result::Result<_, _>>()?;
    if rows.iter().any(|(_, a, b)| !((0.0..=1.0).contains(a) && (0.0..=1.0).contains(b))) {
        return Err(parse_err("reliability table", "reliability outside [0, 1]"));
    }
    Ok(rows)
}
