//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.
//!
//! Run with `cargo test -p fowt-dpim-cli --test acceptance`.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::time::Instant;

use anyhow::Result;
use rand::Rng;

use fowt_dpim::analysis::tower_section;
use fowt_dpim::dpim::PdfEstimate;
use fowt_dpim::fatigue::{count_reversals, stress_damage, Goodman, SnCurve, StressCycle};
use fowt_dpim::pointset::generate_gf_points;
use fowt_dpim::stress::{tower_axial_stress, StressTimeSeries, TOWER_NODES};
use fowt_dpim::{simulate, EnvironmentalPoint};
use fowt_dpim_cli::pipeline::{self, Batch};
use fowt_dpim_cli::RunConfig;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, title: &str, o: &Outcome) {
    println!("criterion {n} [{}] {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

// ---------------------------------------------------------------- criterion 1

/// Independent brute-force reading of the counting rules.
fn brute_force(reversals: &[f64]) -> Vec<StressCycle> {
    let mut input: VecDeque<f64> = reversals.iter().copied().collect();
    let mut held: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    let cycle = |a: f64, b: f64, count: f64| StressCycle {
        range: (a - b).abs(),
        mean: 0.5 * (a + b),
        count,
    };
    loop {
        let k = held.len();
        if k >= 3 {
            let x = (held[k - 1] - held[k - 2]).abs();
            let y = (held[k - 2] - held[k - 3]).abs();
            if x >= y {
                if k == 3 {
                    out.push(cycle(held[0], held[1], 0.5));
                    held.remove(0);
                } else {
                    out.push(cycle(held[k - 3], held[k - 2], 1.0));
                    held.drain(k - 3..k - 1);
                }
                continue;
            }
        }
        match input.pop_front() {
            Some(p) => held.push(p),
            None => break,
        }
    }
    out.extend(held.windows(2).map(|w| cycle(w[0], w[1], 0.5)));
    out
}

fn multiset(c: &[StressCycle]) -> Vec<(f64, f64, f64)> {
    let mut v: Vec<_> = c.iter().map(|c| (c.range, c.mean, c.count)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    v
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let fixture = [-2.0, 1.0, -3.0, 5.0, -1.0, 3.0, -4.0, 4.0, -2.0];
    // Hand trace of the fixture, frozen.
    let frozen = vec![
        (3.0, -0.5, 0.5),
        (4.0, -1.0, 0.5),
        (4.0, 1.0, 1.0),
        (6.0, 1.0, 0.5),
        (8.0, 0.0, 0.5),
        (8.0, 1.0, 0.5),
        (9.0, 0.5, 0.5),
    ];
    let mut mismatches = 0;
    if multiset(&count_reversals(&fixture)) != frozen || multiset(&brute_force(&fixture)) != frozen {
        mismatches += 1;
    }
    let mut rng = fowt_dpim::seed::rng(20);
    for _ in 0..200 {
        let n = rng.random_range(2..=20);
        let mut x = rng.random_range(-10..=10) as f64;
        let mut up = rng.random_bool(0.5);
        let mut seq = vec![x];
        for _ in 1..n {
            let step = rng.random_range(1..=12) as f64;
            x += if up { step } else { -step };
            up = !up;
            seq.push(x);
        }
        if multiset(&count_reversals(&seq)) != multiset(&brute_force(&seq)) {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: mismatches == 0 && secs < 5.0,
        detail: format!("fixture + 200 random sequences, {mismatches} mismatches, {secs:.3} s (limit 5 s)"),
    }
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (curve, a) in [(SnCurve::steel_tower(), 50.0e6), (SnCurve::composite_blade(), 20.0e6)] {
        // 600 s at dt 0.05 with a 10 s period: 60 periods, last sample on a peak.
        let samples: Vec<f64> = (0..=12_000).map(|k| a * (2.0 * PI * k as f64 * 0.05 / 10.0).cos()).collect();
        let series = StressTimeSeries::new(0.05, samples);
        let got = stress_damage(&series, &curve, &Goodman::default()).expect("damage");
        let n_fail = 10f64.powf(curve.log_a - curve.slope * (2.0 * a / curve.stress_unit).log10());
        let want = 60.0 / n_fail;
        let rel = ((got.d_st - want) / want).abs();
        worst = worst.max(rel);
        lines.push(format!("m={} rel err {rel:.1e}", curve.slope));
    }
    Outcome {
        pass: worst < 1e-9,
        detail: format!("{} (limit 1e-9)", lines.join(", ")),
    }
}

// ------------------------------------------------------- shared large runs

struct HeadingRun {
    heading: f64,
    products: pipeline::DpimProducts,
    consistency: Option<Vec<pipeline::Consistency>>,
}

fn pdf_mass_error(pdfs: &[&PdfEstimate]) -> f64 {
    pdfs.iter().map(|p| (p.integral() - 1.0).abs()).fold(0.0, f64::max)
}

fn desk_config(points: usize, mcs: usize, headings: &[f64]) -> RunConfig {
    let mut cfg = RunConfig {
        points,
        mcs_samples: mcs,
        headings: headings.to_vec(),
        plots: false,
        ..Default::default()
    };
    cfg.simulation.duration = 300.0;
    cfg.simulation.dt = 0.1;
    cfg
}

fn run_headings(cfg: &RunConfig, with_mcs: bool) -> Result<(fowt_dpim::RepresentativePointSet, Vec<HeadingRun>)> {
    let set = pipeline::build_points(cfg)?;
    let samples = if with_mcs { pipeline::mcs_samples(cfg)? } else { Vec::new() };
    let mut out = Vec::new();
    for &h in &cfg.headings {
        let damage = pipeline::evaluate(cfg, &set.points, h, Batch::Representative, 1, None)?;
        let products = pipeline::dpim_products(cfg, &damage, &set.probabilities)?;
        let consistency = if with_mcs {
            let mcs = pipeline::evaluate(cfg, &samples, h, Batch::MonteCarlo, 1, None)?;
            Some(pipeline::consistency(cfg, &damage, &set.probabilities, &mcs)?)
        } else {
            None
        };
        out.push(HeadingRun {
            heading: h,
            products,
            consistency,
        });
    }
    Ok((set, out))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3(runs: &[&[HeadingRun]]) -> Outcome {
    let mut worst_sum: f64 = 0.0;
    let mut sets = 0;
    for (n, seed) in [(1, 1), (17, 2), (512, 2024), (1000, 2024), (4096, 7)] {
        let set = generate_gf_points(&fowt_dpim::EnvironmentModel::default(), n, seed).expect("point set");
        worst_sum = worst_sum.max((set.probabilities.iter().sum::<f64>() - 1.0).abs());
        sets += 1;
    }
    let pdfs: Vec<&PdfEstimate> = runs
        .iter()
        .flat_map(|r| r.iter())
        .flat_map(|r| {
            r.products
                .damage_pdfs
                .iter()
                .map(|p| &p.2)
                .chain(r.products.stress_pdfs.iter().map(|p| &p.1))
        })
        .collect();
    let worst_pdf = pdf_mass_error(&pdfs);
    Outcome {
        pass: worst_sum <= 1e-12 && worst_pdf <= 1e-3,
        detail: format!(
            "max |sum P - 1| = {worst_sum:.1e} over {sets} point sets (limit 1e-12); max |integral - 1| = {worst_pdf:.1e} over {} densities (limit 1e-3)",
            pdfs.len()
        ),
    }
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4(runs: &[HeadingRun]) -> Outcome {
    let mut pass = true;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_ks: f64 = 0.0;
    for r in runs {
        for c in r.consistency.as_ref().expect("consistency computed") {
            let gap = (c.r_dpim - c.r_mcs).abs();
            let ok = c.reliability_ok() && c.pdf_ok();
            pass &= ok;
            worst_gap = worst_gap.max(gap - c.tolerance);
            worst_ks = worst_ks.max(c.pdf_ks);
            println!(
                "    heading {:>2} {:<12} {:>2} y  R_dpim {:.4}  R_mcs {:.4}  |diff| {:.4}  tol {:.4}  KS {:.4}{}",
                r.heading,
                c.hotspot,
                c.years,
                c.r_dpim,
                c.r_mcs,
                gap,
                c.tolerance,
                c.pdf_ks,
                if ok { "" } else { "  <- out of tolerance" }
            );
        }
    }
    Outcome {
        pass,
        detail: format!(
            "N=512 vs n=20000, 300 s / dt 0.1 s; worst (|diff| - tol) = {worst_gap:+.4}, worst KS = {worst_ks:.4} (limit 0.05)"
        ),
    }
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5(runs: &[&[HeadingRun]]) -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    for r in runs.iter().flat_map(|r| r.iter()) {
        for curve in [&r.products.tower, &r.products.blade] {
            checked += 1;
            if curve.reliability.windows(2).any(|w| w[1] > w[0]) {
                violations += 1;
            }
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("{checked} curves over years 5..25, {violations} increases"),
    }
}

// ---------------------------------------------------------------- criterion 6

fn at_20(curve: &fowt_dpim::dpim::ReliabilityCurve) -> f64 {
    let i = curve.years.iter().position(|&y| y == 20.0).expect("20-year horizon");
    curve.reliability[i]
}

fn criterion_6(runs: &[HeadingRun]) -> Outcome {
    let r0 = runs.iter().find(|r| r.heading == 0.0).expect("0 deg");
    let r90 = runs.iter().find(|r| r.heading == 90.0).expect("90 deg");
    let (t0, t90) = (at_20(&r0.products.tower), at_20(&r90.products.tower));
    let (b0, b90) = (at_20(&r0.products.blade), at_20(&r90.products.blade));
    Outcome {
        pass: t90 >= t0 && b90 >= b0,
        detail: format!(
            "default configuration, R(20 y): tower node 7 {t0:.4} (0 deg) -> {t90:.4} (90 deg), blade root {b0:.4} -> {b90:.4}"
        ),
    }
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7(runs: &[HeadingRun], cfg: &RunConfig) -> Outcome {
    let aligned = runs.iter().find(|r| r.heading == 0.0).expect("0 deg");
    let tower = &aligned.products.mean_stress[..TOWER_NODES];
    let argmax = (0..TOWER_NODES).max_by(|&a, &b| tower[a].abs().total_cmp(&tower[b].abs())).unwrap() + 1;

    // Sinusoid fit of sigma(alpha) - N_z / A for the mean loads of one aligned case.
    let sim = cfg.simulation.config(0.0, 1);
    let loads = simulate(&EnvironmentalPoint::new(11.4, 2.0, 8.0), &sim, &cfg.turbine).expect("simulation");
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (nz, mx, my) = (mean(&loads.nz), mean(&loads.mx_tower), mean(&loads.my_tower));
    let geom = tower_section(&cfg.turbine).expect("tower section");
    let mean_loads = fowt_dpim::LoadTimeSeries::from_channels(
        loads.dt,
        [vec![nz], vec![mx], vec![my], vec![0.0], vec![0.0], vec![0.0], vec![0.0], vec![0.0], vec![0.0]],
    )
    .expect("loads");
    let alphas: Vec<f64> = (0..360).map(|i| i as f64 * PI / 180.0).collect();
    let s: Vec<f64> = alphas
        .iter()
        .map(|&a| tower_axial_stress(&mean_loads, &geom, a).samples[0] - nz / geom.area)
        .collect();
    // Least squares in (cos, sin); the grid is a full period so the normal
    // equations are diagonal.
    let n = alphas.len() as f64;
    let a_c = 2.0 / n * alphas.iter().zip(&s).map(|(a, y)| y * a.cos()).sum::<f64>();
    let a_s = 2.0 / n * alphas.iter().zip(&s).map(|(a, y)| y * a.sin()).sum::<f64>();
    let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = alphas
        .iter()
        .zip(&s)
        .map(|(a, y)| (y - a_c * a.cos() - a_s * a.sin()).abs() / scale)
        .fold(0.0, f64::max);
    let stresses: Vec<String> = tower.iter().map(|v| format!("{:.1}", v / 1e6)).collect();
    Outcome {
        pass: argmax == 7 && nz < 0.0 && residual < 1e-9,
        detail: format!(
            "mean stress by node [{}] MPa, argmax |mean| = node {argmax}; N_z = {:.2} MN; relative sinusoid residual {residual:.1e} (limit 1e-9)",
            stresses.join(", "),
            nz / 1e6
        ),
    }
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8(tmp: &std::path::Path) -> Result<Outcome> {
    let mut cfg = desk_config(1000, 10_000, &[0.0]);
    cfg.out = tmp.join("benchmark");
    let b = fowt_dpim_cli::benchmark(&cfg)?;
    Ok(Outcome {
        pass: b.mcs_calls == 10 * b.dpim_calls && b.wall_clock_ratio >= 5.0,
        detail: format!(
            "calls {} : {} (ratio {}), wall clock {:.1} s : {:.1} s (ratio {:.2}, limit 5) on {} thread(s)",
            b.mcs_calls, b.dpim_calls, b.call_ratio, b.mcs_seconds, b.dpim_seconds, b.wall_clock_ratio, b.threads
        ),
    })
}

// -------------------------------------------------------------------- main

fn main() -> Result<()> {
    let tmp = tempfile::tempdir()?;
    let total = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();

    results.push((1, "rainflow oracle equivalence", criterion_1()));
    report(1, results[0].1, &results[0].2);
    results.push((2, "closed-form sinusoid damage", criterion_2()));
    report(2, results[1].1, &results[1].2);

    // DPIM (N=512) against Monte Carlo (n=20,000) at 0 and 90 deg, plus DPIM
    // alone at the intermediate headings.
    let t = Instant::now();
    let desk = desk_config(512, 20_000, &[0.0, 90.0]);
    let (_, compared) = run_headings(&desk, true)?;
    let (_, intermediate) = run_headings(&desk_config(512, 0, &[30.0, 60.0]), false)?;
    println!("    (desk-scale runs: {:.1} s)", t.elapsed().as_secs_f64());

    // Default configuration (N=1000, 600 s at 0.05 s) for the heading trend
    // and the mean-stress profile.
    let t = Instant::now();
    let default_cfg = RunConfig {
        headings: vec![0.0, 90.0],
        plots: false,
        ..Default::default()
    };
    let (_, default_runs) = run_headings(&default_cfg, false)?;
    println!("    (default-configuration runs: {:.1} s)", t.elapsed().as_secs_f64());

    let c3 = criterion_3(&[&compared, &intermediate, &default_runs]);
    report(3, "probability conservation", &c3);
    results.push((3, "probability conservation", c3));
    let c4 = criterion_4(&compared);
    report(4, "DPIM-MCS consistency", &c4);
    results.push((4, "DPIM-MCS consistency", c4));
    let c5 = criterion_5(&[&compared, &intermediate, &default_runs]);
    report(5, "monotone reliability", &c5);
    results.push((5, "monotone reliability", c5));
    let c6 = criterion_6(&default_runs);
    report(6, "heading trend at 20 years", &c6);
    results.push((6, "heading trend at 20 years", c6));
    let c7 = criterion_7(&default_runs, &default_cfg);
    report(7, "node-7 dominance and sinusoid", &c7);
    results.push((7, "node-7 dominance and sinusoid", c7));
    let c8 = criterion_8(tmp.path())?;
    report(8, "efficiency", &c8);
    results.push((8, "efficiency", c8));

    println!(
        "criterion 9 [EXCLUDED] absolute reliabilities and stress bands of the full aero-hydro-servo-elastic model are not numeric targets; substituted by criteria 1-8 above plus the invariant suites in crates/core/tests (distributions, stress, fatigue, dpim)"
    );
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("acceptance: {} of 8 criteria passed in {:.1} s", 8 - failed.len(), total.elapsed().as_secs_f64());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    Ok(())
}
