//! Orchestration of the fatigue reliability workflow.

pub mod config;
pub mod pipeline;
pub mod store;
pub mod svg;

use anyhow::{bail, Context, Result};
use log::info;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fowt_dpim::analysis::damage_from_loads;
use fowt_dpim::io::read_loads;
use fowt_dpim::pointset::RepresentativePointSet;
use fowt_dpim::stress::TOWER_NODES;

pub use config::{ConfigError, RunConfig};
use pipeline::{Batch, Consistency, Hotspot};

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub headings: Option<Vec<f64>>,
}

pub fn load_config(o: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &o.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(h) = &o.headings {
        cfg.headings = h.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn points_or_build(cfg: &RunConfig) -> Result<RepresentativePointSet> {
    if cfg.out.join(store::POINTS).exists() {
        let set = store::read_points(&cfg.out)?;
        if set.len() != cfg.points {
            bail!(
                "{} holds {} points but the configuration asks for {}; rerun `points`",
                cfg.out.join(store::POINTS).display(),
                set.len(),
                cfg.points
            );
        }
        Ok(set)
    } else {
        let set = pipeline::build_points(cfg)?;
        store::write_points(&cfg.out, &set)?;
        Ok(set)
    }
}

/// `points`: build and persist the representative point set.
pub fn cmd_points(cfg: &RunConfig) -> Result<RepresentativePointSet> {
    let set = pipeline::build_points(cfg)?;
    store::write_points(&cfg.out, &set)?;
    info!("wrote {} points to {}", set.len(), cfg.out.join(store::POINTS).display());
    Ok(set)
}

/// `simulate`: load histories for every point and heading.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<()> {
    let set = points_or_build(cfg)?;
    for &h in &cfg.headings {
        let dir = cfg.heading_dir(h).join(store::LOADS);
        pipeline::evaluate(cfg, &set.points, h, Batch::Representative, cfg.seeds_per_point, Some(&dir))?;
        info!("heading {h} deg: loads in {}", dir.display());
    }
    Ok(())
}

/// `fatigue`: stresses and damage from persisted loads, without re-simulating.
pub fn cmd_fatigue(cfg: &RunConfig) -> Result<()> {
    let set = store::read_points(&cfg.out).context("the fatigue stage needs the output of `points`")?;
    for &h in &cfg.headings {
        let dir = cfg.heading_dir(h);
        let loads_dir = dir.join(store::LOADS);
        let k = cfg.seeds_per_point;
        let damage = (0..set.len() * k)
            .map(|idx| {
                let path = loads_dir.join(pipeline::loads_file_name(idx / k + 1, idx % k));
                let file = store::open(&path).context("the fatigue stage needs the output of `simulate`")?;
                let (_, loads) = read_loads(file).with_context(|| format!("reading {}", path.display()))?;
                damage_from_loads(&loads, &cfg.turbine, &cfg.fatigue)
                    .with_context(|| format!("fatigue evaluation of {}", path.display()))
            })
            .collect::<Result<Vec<_>>>()?;
        store::write_damage(&dir, &damage, k)?;
        info!("heading {h} deg: damage for {} realizations", damage.len());
    }
    Ok(())
}

/// `dpim`: densities and reliability curves from persisted damage.
pub fn cmd_dpim(cfg: &RunConfig) -> Result<()> {
    let set = store::read_points(&cfg.out).context("the DPIM stage needs the output of `points`")?;
    let probs = pipeline::replicate_probabilities(&set.probabilities, cfg.seeds_per_point);
    for &h in &cfg.headings {
        let dir = cfg.heading_dir(h);
        let damage = store::read_damage(&dir, set.len(), cfg.seeds_per_point, cfg.simulation.duration)
            .context("the DPIM stage needs the output of `fatigue`")?;
        let products = pipeline::dpim_products(cfg, &damage, &probs)?;
        store::write_dpim(&dir, &products)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct HeadingTiming {
    pub heading: f64,
    pub dpim_seconds: f64,
    pub dpim_calls: usize,
    pub mcs_seconds: Option<f64>,
    pub mcs_calls: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeadingReliability {
    pub heading: f64,
    pub years: Vec<f64>,
    pub tower_node7: Vec<f64>,
    pub blade_root: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeadingConsistency {
    pub heading: f64,
    pub rows: Vec<Consistency>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub points: usize,
    pub mcs_samples: usize,
    pub seeds_per_point: usize,
    pub headings: Vec<f64>,
    pub point_set_seconds: f64,
    pub timings: Vec<HeadingTiming>,
    pub total_seconds: f64,
    pub reliability: Vec<HeadingReliability>,
    pub consistency: Vec<HeadingConsistency>,
    pub files: Vec<store::FileEntry>,
}

/// `mcs`: Monte Carlo benchmark per heading, compared with DPIM results when present.
pub fn cmd_mcs(cfg: &RunConfig) -> Result<Vec<HeadingConsistency>> {
    if cfg.mcs_samples == 0 {
        bail!(ConfigError("mcs_samples is 0; nothing to do".into()));
    }
    let samples = pipeline::mcs_samples(cfg)?;
    let mut out = Vec::new();
    for &h in &cfg.headings {
        let dir = cfg.heading_dir(h);
        let damage = pipeline::evaluate(cfg, &samples, h, Batch::MonteCarlo, 1, None)?;
        store::write_mcs(&dir, &samples, &damage, &cfg.years, cfg.threshold)?;
        if dir.join(store::DAMAGE).exists() && cfg.out.join(store::POINTS).exists() {
            let set = store::read_points(&cfg.out)?;
            let dpim = store::read_damage(&dir, set.len(), cfg.seeds_per_point, cfg.simulation.duration)?;
            let probs = pipeline::replicate_probabilities(&set.probabilities, cfg.seeds_per_point);
            let rows = pipeline::consistency(cfg, &dpim, &probs, &damage)?;
            store::write_consistency(&dir, &rows)?;
            out.push(HeadingConsistency { heading: h, rows });
        }
    }
    Ok(out)
}

/// `run`: every stage in memory, then the summary (and figures when enabled).
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let start = Instant::now();
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let t = Instant::now();
    let set = pipeline::build_points(cfg)?;
    store::write_points(&cfg.out, &set)?;
    let point_set_seconds = t.elapsed().as_secs_f64();
    let probs = pipeline::replicate_probabilities(&set.probabilities, cfg.seeds_per_point);
    let samples = if cfg.mcs_samples > 0 {
        pipeline::mcs_samples(cfg)?
    } else {
        Vec::new()
    };

    let mut timings = Vec::new();
    let mut reliability = Vec::new();
    let mut consistency = Vec::new();
    for &h in &cfg.headings {
        let dir = cfg.heading_dir(h);
        let t = Instant::now();
        let loads_dir = cfg.save_loads.then(|| dir.join(store::LOADS));
        let damage = pipeline::evaluate(cfg, &set.points, h, Batch::Representative, cfg.seeds_per_point, loads_dir.as_deref())?;
        let products = pipeline::dpim_products(cfg, &damage, &probs)?;
        let dpim_seconds = t.elapsed().as_secs_f64();
        store::write_damage(&dir, &damage, cfg.seeds_per_point)?;
        store::write_dpim(&dir, &products)?;
        reliability.push(HeadingReliability {
            heading: h,
            years: cfg.years.clone(),
            tower_node7: products.tower.reliability.clone(),
            blade_root: products.blade.reliability.clone(),
        });
        info!(
            "heading {h} deg: R(tower node 7) = {:?}, R(blade root) = {:?}",
            products.tower.reliability, products.blade.reliability
        );

        let mut mcs_seconds = None;
        if !samples.is_empty() {
            let t = Instant::now();
            let mcs = pipeline::evaluate(cfg, &samples, h, Batch::MonteCarlo, 1, None)?;
            mcs_seconds = Some(t.elapsed().as_secs_f64());
            store::write_mcs(&dir, &samples, &mcs, &cfg.years, cfg.threshold)?;
            let rows = pipeline::consistency(cfg, &damage, &probs, &mcs)?;
            store::write_consistency(&dir, &rows)?;
            consistency.push(HeadingConsistency { heading: h, rows });
        }
        timings.push(HeadingTiming {
            heading: h,
            dpim_seconds,
            dpim_calls: damage.len(),
            mcs_seconds,
            mcs_calls: samples.len(),
        });
    }
    if cfg.plots {
        report(&cfg.out)?;
    }
    let mut summary = RunSummary {
        seed: cfg.seed,
        points: cfg.points,
        mcs_samples: cfg.mcs_samples,
        seeds_per_point: cfg.seeds_per_point,
        headings: cfg.headings.clone(),
        point_set_seconds,
        timings,
        total_seconds: 0.0,
        reliability,
        consistency,
        files: Vec::new(),
    };
    summary.files = store::checksums(&cfg.out)?;
    summary.total_seconds = start.elapsed().as_secs_f64();
    let path = cfg.out.join(store::SUMMARY);
    serde_json::to_writer_pretty(store::create(&path)?, &summary)?;
    Ok(summary)
}

fn heading_dirs(root: &Path) -> Result<Vec<(f64, PathBuf)>> {
    let mut out = Vec::new();
    if root.is_dir() {
        for entry in std::fs::read_dir(root)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().to_string();
            if let Some(h) = name.strip_prefix("heading_").and_then(|s| s.parse::<f64>().ok()) {
                if entry.file_type()?.is_dir() {
                    out.push((h, entry.path()));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

fn read_pdf_file(path: &Path) -> Result<Vec<(f64, f64)>> {
    fowt_dpim::io::read_pdf(store::open(path)?).with_context(|| format!("reading {}", path.display()))
}

/// Files emitted by `report`, relative to the run directory.
#[derive(Debug, Clone, Serialize)]
pub struct ReportOutput {
    pub text: PathBuf,
    pub figures: Vec<PathBuf>,
}

/// `report`: text summary and SVG figures from a run directory.
pub fn report(root: &Path) -> Result<ReportOutput> {
    let headings = heading_dirs(root)?;
    let mut missing = Vec::new();
    if !root.join(store::POINTS).exists() {
        missing.push(format!("{} (from `points` or `run`)", store::POINTS));
    }
    if headings.is_empty() {
        missing.push("heading_*/ directories (from `run` or `simulate`)".into());
    }
    for (_, dir) in &headings {
        for (file, stage) in [(store::MEAN_STRESS, "dpim"), (store::RELIABILITY, "dpim")] {
            if !dir.join(file).exists() {
                missing.push(format!("{} (from `{stage}` or `run`)", dir.join(file).display()));
            }
        }
    }
    if !missing.is_empty() {
        bail!("{} is not a complete run; missing:\n  {}", root.display(), missing.join("\n  "));
    }

    let plots = root.join("plots");
    std::fs::create_dir_all(&plots)?;
    let mut figures = Vec::new();
    let mut text = String::new();
    let set = store::read_points(root)?;
    text.push_str(&format!("Representative points: {}\n\n", set.len()));

    for (h, dir) in &headings {
        let tag = config::heading_dir_name(*h);
        text.push_str(&format!("== Wave heading {h} deg ==\n\nMean stress (probability weighted), MPa\n"));
        let means = store::read_mean_stress(dir)?;
        let mut bars = Vec::new();
        for (loc, node, s) in &means {
            let label = match node {
                Some(k) => format!("node {k}"),
                None => loc.clone(),
            };
            text.push_str(&format!("  {label:<12} {:>10.3}\n", s / 1e6));
            if node.is_some() {
                bars.push((node.unwrap().to_string(), *s));
            }
        }
        let fig = plots.join(format!("mean_stress_{tag}.svg"));
        std::fs::write(&fig, svg::bar_chart(&format!("Tower-base mean stress, {h} deg"), "node", "mean stress (Pa)", &bars))?;
        figures.push(fig);

        let rel = store::read_reliability(dir)?;
        text.push_str("\nReliability\n  years   tower node 7   blade root\n");
        for (y, a, b) in &rel {
            text.push_str(&format!("  {y:>5}   {a:>12.4}   {b:>10.4}\n"));
        }
        let series = vec![
            svg::Series {
                name: "tower node 7".into(),
                points: rel.iter().map(|r| (r.0, r.1)).collect(),
                markers: true,
            },
            svg::Series {
                name: "blade root".into(),
                points: rel.iter().map(|r| (r.0, r.2)).collect(),
                markers: true,
            },
        ];
        let fig = plots.join(format!("reliability_{tag}.svg"));
        std::fs::write(&fig, svg::line_chart(&format!("Fatigue reliability, {h} deg"), "operating time (years)", "reliability", &series, Some((0.0, 1.0))))?;
        figures.push(fig);

        let cons = dir.join(store::CONSISTENCY);
        if cons.exists() {
            text.push_str("\nDPIM vs Monte Carlo\n  hotspot        years   R_dpim   R_mcs    tol      KS\n");
            let mut rdr = csv::Reader::from_reader(store::open(&cons)?);
            for row in rdr.records() {
                let row = row?;
                text.push_str(&format!(
                    "  {:<13} {:>6} {:>8.4} {:>8.4} {:>7.4} {:>7.4}\n",
                    &row[0],
                    &row[1],
                    row[2].parse::<f64>()?,
                    row[3].parse::<f64>()?,
                    row[5].parse::<f64>()?,
                    row[6].parse::<f64>()?
                ));
            }
        }
        text.push('\n');

        for spot in Hotspot::ALL {
            let mut series = Vec::new();
            for (y, ..) in &rel {
                let path = dir.join(store::damage_pdf_name(spot, *y));
                if path.exists() {
                    series.push(svg::Series {
                        name: format!("T = {y} years"),
                        points: read_pdf_file(&path)?,
                        markers: false,
                    });
                }
            }
            if !series.is_empty() {
                let fig = plots.join(format!("pdf_damage_{}_{tag}.svg", spot.name()));
                std::fs::write(&fig, svg::line_chart(&format!("Cumulative damage density, {}", spot.name()), "damage", "density", &series, None))?;
                figures.push(fig);
            }
            let path = dir.join(store::stress_pdf_name(spot));
            if path.exists() {
                let series = [svg::Series {
                    name: spot.name().into(),
                    points: read_pdf_file(&path)?,
                    markers: false,
                }];
                let fig = plots.join(format!("pdf_stress_{}_{tag}.svg", spot.name()));
                std::fs::write(&fig, svg::line_chart(&format!("Mean stress density, {}", spot.name()), "stress (Pa)", "density", &series, None))?;
                figures.push(fig);
            }
        }
    }
    let text_path = root.join("report.txt");
    std::fs::write(&text_path, text)?;
    Ok(ReportOutput {
        text: text_path,
        figures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkHeading {
    pub heading: f64,
    pub dpim_seconds: f64,
    pub mcs_seconds: f64,
    pub dpim_calls: usize,
    pub mcs_calls: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRecord {
    pub threads: usize,
    pub duration: f64,
    pub dt: f64,
    pub headings: Vec<BenchmarkHeading>,
    pub dpim_seconds: f64,
    pub mcs_seconds: f64,
    pub dpim_calls: usize,
    pub mcs_calls: usize,
    pub call_ratio: f64,
    pub wall_clock_ratio: f64,
}

/// `benchmark`: wall-clock and simulator calls of the DPIM and Monte Carlo stages.
pub fn benchmark(cfg: &RunConfig) -> Result<BenchmarkRecord> {
    if cfg.mcs_samples == 0 {
        bail!(ConfigError("benchmark needs mcs_samples > 0".into()));
    }
    let mut rows = Vec::new();
    for &h in &cfg.headings {
        let t = Instant::now();
        let set = pipeline::build_points(cfg)?;
        let probs = pipeline::replicate_probabilities(&set.probabilities, cfg.seeds_per_point);
        let damage = pipeline::evaluate(cfg, &set.points, h, Batch::Representative, cfg.seeds_per_point, None)?;
        for spot in Hotspot::ALL {
            fowt_dpim::dpim::reliability_curve(&pipeline::rates(&damage, spot), &probs, &cfg.years, cfg.threshold)?;
        }
        let dpim_seconds = t.elapsed().as_secs_f64();

        let t = Instant::now();
        let samples = pipeline::mcs_samples(cfg)?;
        let mcs = pipeline::evaluate(cfg, &samples, h, Batch::MonteCarlo, 1, None)?;
        for spot in Hotspot::ALL {
            let r = pipeline::rates(&mcs, spot);
            for &y in &cfg.years {
                fowt_dpim::dpim::mcs_reliability(&r, fowt_dpim::fatigue::years_to_seconds(y), cfg.threshold)?;
            }
        }
        let mcs_seconds = t.elapsed().as_secs_f64();
        info!("heading {h} deg: DPIM {dpim_seconds:.2} s ({} calls), MCS {mcs_seconds:.2} s ({} calls)", damage.len(), mcs.len());
        rows.push(BenchmarkHeading {
            heading: h,
            dpim_seconds,
            mcs_seconds,
            dpim_calls: damage.len(),
            mcs_calls: mcs.len(),
        });
    }
    let dpim_seconds: f64 = rows.iter().map(|r| r.dpim_seconds).sum();
    let mcs_seconds: f64 = rows.iter().map(|r| r.mcs_seconds).sum();
    let dpim_calls: usize = rows.iter().map(|r| r.dpim_calls).sum();
    let mcs_calls: usize = rows.iter().map(|r| r.mcs_calls).sum();
    let record = BenchmarkRecord {
        threads: rayon::current_num_threads(),
        duration: cfg.simulation.duration,
        dt: cfg.simulation.dt,
        headings: rows,
        dpim_seconds,
        mcs_seconds,
        dpim_calls,
        mcs_calls,
        call_ratio: mcs_calls as f64 / dpim_calls as f64,
        wall_clock_ratio: mcs_seconds / dpim_seconds,
    };
    let path = cfg.out.join("benchmark.json");
    serde_json::to_writer_pretty(store::create(&path)?, &record)?;
    Ok(record)
}

/// Probability-weighted mean stress per tower node, read back from a run.
pub fn node_mean_stress(dir: &Path) -> Result<[f64; TOWER_NODES]> {
    let rows = store::read_mean_stress(dir)?;
    let mut out = [0.0; TOWER_NODES];
    for (_, node, s) in rows {
        if let Some(k) = node {
            out[k - 1] = s;
        }
    }
    Ok(out)
}
