use fowt_dpim::simulator::spectral::periodogram;
use fowt_dpim::simulator::{synthesize_waves, WaveModel, WindModel};
use fowt_dpim::{simulate, EnvironmentalPoint, LoadTimeSeries, SimulationConfig, TurbineParams};

fn config(heading: f64, seed: u64) -> SimulationConfig {
    SimulationConfig {
        duration: 300.0,
        dt: 0.1,
        transient: 60.0,
        wave_heading: heading,
        seed,
        ..Default::default()
    }
}

fn run(p: EnvironmentalPoint, cfg: &SimulationConfig) -> LoadTimeSeries {
    simulate(&p, cfg, &TurbineParams::default()).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

#[test]
fn calm_conditions_hold_tower_loads_constant() {
    let mut cfg = config(0.0, 3);
    cfg.wind = WindModel {
        reference_intensity: 0.0,
        ..Default::default()
    };
    let l = run(EnvironmentalPoint::new(9.0, 0.0, 8.0), &cfg);
    assert!(l.mx_tower.iter().all(|&v| v == 0.0));
    for ch in [&l.nz, &l.my_tower] {
        let spread = ch.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - ch.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        assert!(spread <= 1e-9 * max_abs(ch), "spread {spread}");
    }
    // Blade channels keep the deterministic rotor-speed (1P) gravity cycle.
    assert!(std(&l.fz_blade) > 0.0);
}

#[test]
fn heading_rotates_wave_moment_into_roll() {
    let p = EnvironmentalPoint::new(12.0, 3.0, 9.0);
    let at0 = run(p, &config(0.0, 11));
    let at90 = run(p, &config(90.0, 11));
    let scale = max_abs(&at90.mx_tower);
    assert!(scale > 0.0);
    for j in 0..at0.len() {
        let wave_pitch = at0.my_tower[j] - at90.my_tower[j];
        assert!((wave_pitch + at90.mx_tower[j]).abs() <= 1e-9 * scale, "step {j}");
    }
    // Fore-aft moment at 90 deg is the wind-only moment.
    let calm = run(EnvironmentalPoint::new(12.0, 0.0, 9.0), &config(0.0, 11));
    assert_eq!(at90.my_tower, calm.my_tower);
    assert!(at0.mx_tower.iter().all(|&v| v == 0.0));
}

#[test]
fn wave_loads_are_linear_in_amplitude() {
    let cfg = config(90.0, 5);
    let one = run(EnvironmentalPoint::new(8.0, 1.5, 7.0), &cfg);
    let two = run(EnvironmentalPoint::new(8.0, 3.0, 7.0), &cfg);
    let scale = max_abs(&two.mx_tower);
    for j in 0..one.len() {
        assert!((two.mx_tower[j] - 2.0 * one.mx_tower[j]).abs() <= 1e-9 * scale);
    }
    let weight = cfg.rotor.topside_mass * cfg.waves.gravity;
    let heave = |l: &LoadTimeSeries| l.nz.iter().map(|v| v + weight).collect::<Vec<_>>();
    let (h1, h2) = (heave(&one), heave(&two));
    let scale = max_abs(&h2);
    for j in 0..one.len() {
        assert!((h2[j] - 2.0 * h1[j]).abs() <= 1e-9 * weight.max(scale));
    }
}

#[test]
fn thrust_pitches_the_tower_forward_at_rated() {
    let l = run(EnvironmentalPoint::new(11.4, 1.5, 8.0), &config(0.0, 1));
    assert!(mean(&l.my_tower) > 0.0);
    assert!(mean(&l.nz) < 0.0);
}

#[test]
fn simulation_is_deterministic() {
    let p = EnvironmentalPoint::new(15.0, 2.5, 8.5);
    let cfg = config(30.0, 99);
    assert_eq!(run(p, &cfg), run(p, &cfg));
    let other = run(p, &config(30.0, 100));
    assert_ne!(run(p, &cfg).my_tower, other.my_tower);
}

/// Start-up transients or drift would shift one half of the window against
/// the other. Wind-driven channels carry turbulence with an integral time of
/// tens of seconds, so a single 300 s half-mean scatters by about half a
/// standard deviation; the bound is therefore checked on the mean over seeds.
#[test]
fn halves_of_the_window_are_stationary() {
    use rayon::prelude::*;
    let seeds = 200u64;
    for p in [EnvironmentalPoint::new(7.0, 1.2, 7.5), EnvironmentalPoint::new(16.0, 3.5, 10.0)] {
        let runs: Vec<LoadTimeSeries> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let cfg = SimulationConfig {
                    duration: 600.0,
                    dt: 0.1,
                    wave_heading: 30.0,
                    seed,
                    ..Default::default()
                };
                run(p, &cfg)
            })
            .collect();
        let half = runs[0].len() / 2;
        for (c, name) in LoadTimeSeries::CHANNELS.iter().enumerate() {
            let mut diff = 0.0;
            let mut var = 0.0;
            for l in &runs {
                let ch = l.channels()[c];
                diff += mean(&ch[..half]) - mean(&ch[half..]);
                var += std(ch).powi(2);
            }
            let diff = (diff / seeds as f64).abs();
            let s = (var / seeds as f64).sqrt();
            assert!(diff < 0.1 * s, "{name} at {p:?}: {diff} vs std {s}");
        }
    }
}

#[test]
fn wave_elevation_matches_significant_height_and_peak() {
    let model = WaveModel::default();
    for (h_s, t_p) in [(1.0, 6.0), (2.5, 9.0), (4.0, 12.0)] {
        let sea = synthesize_waves(h_s, t_p, 0.0, 600.0, 0.05, 42, &model).unwrap();
        let sd = std(&sea.elevation);
        assert!((4.0 * sd / h_s - 1.0).abs() < 0.05, "h_s {h_s}: 4 std = {}", 4.0 * sd);
        let (f_peak, _) = periodogram(&sea.elevation, 0.05)
            .into_iter()
            .fold((0.0, f64::NEG_INFINITY), |best, (f, p)| if p > best.1 { (f, p) } else { best });
        assert!((f_peak * t_p - 1.0).abs() < 0.1, "t_p {t_p}: peak at {f_peak} Hz");
    }
    let flat = synthesize_waves(0.0, 8.0, 45.0, 100.0, 0.1, 1, &model).unwrap();
    assert!(flat.elevation.iter().all(|&v| v == 0.0));
}
