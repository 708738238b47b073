use fowt_dpim::dpim::{
    cdf_distance, estimate_pdf, mcs_reliability, performance_values, reliability, reliability_curve, Bandwidth,
    GridSpec, ResponseEnsemble,
};
use fowt_dpim::fatigue::years_to_seconds;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn normalized(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut p: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let head: f64 = p[..p.len() - 1].iter().sum();
    *p.last_mut().unwrap() = 1.0 - head;
    p
}

#[test]
fn performance_hand_values() {
    let t = years_to_seconds(20.0);
    let z = performance_values(&[1e-9, 3e-9], &[0.5, 0.5], t, 1.0).unwrap();
    // 1 - 1e-9 * 631152000 and 1 - 3e-9 * 631152000
    assert!((z.values[0] - 0.368_848).abs() < 1e-12);
    assert!((z.values[1] + 0.893_456).abs() < 1e-12);
    let z0 = performance_values(&[1e-9, 3e-9], &[0.5, 0.5], 0.0, 1.0).unwrap();
    assert_eq!(z0.values, vec![1.0, 1.0]);
    let boundary = performance_values(&[1.0 / t], &[1.0], t, 1.0).unwrap();
    assert!(boundary.values[0].abs() < 1e-15);
}

#[test]
fn heaviside_hand_sums() {
    let z = ResponseEnsemble::new(vec![1.0, -1.0, 2.0, -0.5], vec![0.1, 0.2, 0.3, 0.4], "z").unwrap();
    assert!((reliability(&z) - 0.4).abs() < 1e-15);
    let z = ResponseEnsemble::equally_weighted(vec![1.0, -1.0, 2.0, -3.0], "z").unwrap();
    assert_eq!(reliability(&z), 0.5);
    // The limit state itself counts as failure.
    let z = ResponseEnsemble::new(vec![0.0, 1.0], vec![0.5, 0.5], "z").unwrap();
    assert_eq!(reliability(&z), 0.5);
}

#[test]
fn reporting_horizons_are_monotone() {
    let rates = [2e-10, 1.2e-9, 4e-9, 0.0];
    let probs = [0.4, 0.3, 0.2, 0.1];
    let c = reliability_curve(&rates, &probs, &[5.0, 10.0, 15.0, 20.0, 25.0], 1.0).unwrap();
    assert!(c.reliability.windows(2).all(|w| w[1] <= w[0]));
    assert!(reliability_curve(&rates, &probs, &[20.0, 5.0], 1.0).is_err());
}

#[test]
fn synthetic_failure_law_recovered_by_monte_carlo() {
    let t = years_to_seconds(20.0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // dr = u / (0.8 t) with u uniform fails exactly when u >= 0.8.
    let rates: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>() / (0.8 * t)).collect();
    let est = mcs_reliability(&rates, t, 1.0).unwrap();
    assert!((est.reliability - 0.8).abs() < 3.0 * est.std_error, "{est:?}");
    assert!((est.std_error - (est.reliability * (1.0 - est.reliability) / 1e4).sqrt()).abs() < 1e-15);
    let safe = mcs_reliability(&vec![0.0; 100], t, 1.0).unwrap();
    assert_eq!((safe.reliability, safe.std_error), (1.0, 0.0));
}

#[test]
fn mixture_integrates_to_one() {
    let ens = ResponseEnsemble::new(vec![0.0, 0.3, 1.0, 5.0], vec![0.1, 0.2, 0.3, 0.4], "y").unwrap();
    for bw in [Bandwidth::Silverman, Bandwidth::Fixed(0.05), Bandwidth::Fixed(2.0)] {
        let pdf = estimate_pdf(&ens, &GridSpec::default(), bw).unwrap();
        assert!((pdf.integral() - 1.0).abs() < 1e-3, "{bw:?}: {}", pdf.integral());
    }
}

#[test]
fn kernel_limit_approaches_weighted_ecdf() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let values: Vec<f64> = (0..12).map(|_| rng.random::<f64>()).collect();
    let weights: Vec<f64> = (0..12).map(|_| rng.random::<f64>() + 0.1).collect();
    let ens = ResponseEnsemble::new(values.clone(), normalized(&weights), "y").unwrap();
    let grid = GridSpec {
        span: Some((-0.5, 1.5)),
        ..Default::default()
    };
    // Away from the atoms the ECDF is flat, so the kernel CDF must converge there.
    let delta = 0.05 * values.windows(2).fold(1.0f64, |m, w| m.min((w[0] - w[1]).abs())).max(1e-4);
    let mut errors = Vec::new();
    for h in [1e-2, 1e-3, 1e-4] {
        let pdf = estimate_pdf(&ens, &grid, Bandwidth::Fixed(h)).unwrap();
        let cdf = pdf.cdf();
        let err = pdf
            .grid
            .iter()
            .zip(&cdf)
            .filter(|(y, _)| values.iter().all(|v| (v - **y).abs() >= delta))
            .map(|(y, c)| (c - ens.ecdf(*y)).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    assert!(errors[1] < errors[0] && errors[2] < errors[1], "{errors:?}");
    assert!(errors[2] < 1e-3, "{errors:?}");
}

#[test]
fn cdf_distance_needs_common_grid() {
    let a = ResponseEnsemble::equally_weighted(vec![0.0, 1.0], "a").unwrap();
    let b = ResponseEnsemble::equally_weighted(vec![0.0, 2.0], "b").unwrap();
    let grid = GridSpec {
        span: Some((-2.0, 4.0)),
        ..Default::default()
    };
    let pa = estimate_pdf(&a, &grid, Bandwidth::Fixed(0.1)).unwrap();
    let pb = estimate_pdf(&b, &grid, Bandwidth::Fixed(0.1)).unwrap();
    let d = cdf_distance(&pa, &pb).unwrap();
    assert!((d - 0.5).abs() < 1e-3, "{d}");
    assert_eq!(cdf_distance(&pa, &pa).unwrap(), 0.0);
    let other = estimate_pdf(&b, &GridSpec::default(), Bandwidth::Fixed(0.1)).unwrap();
    assert!(cdf_distance(&pa, &other).is_err());
}

fn ensemble() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0e3f64..1.0e3, n),
            prop::collection::vec(0.01f64..1.0, n),
        )
    })
}

proptest! {
    #[test]
    fn pdf_conserves_probability((values, weights) in ensemble()) {
        let ens = ResponseEnsemble::new(values, normalized(&weights), "y").unwrap();
        let pdf = estimate_pdf(&ens, &GridSpec::default(), Bandwidth::Silverman).unwrap();
        prop_assert!((pdf.integral() - 1.0).abs() < 1e-3, "{}", pdf.integral());
        prop_assert!(pdf.density.iter().all(|d| *d >= 0.0));
    }

    #[test]
    fn reliability_bounded_and_monotone(
        (rates, weights) in (1usize..30).prop_flat_map(|n| (
            prop::collection::vec(0.0f64..1e-8, n),
            prop::collection::vec(0.01f64..1.0, n),
        )),
        b1 in 0.5f64..2.0,
        b2 in 0.5f64..2.0,
    ) {
        let probs = normalized(&weights);
        let years = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 40.0];
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let low = reliability_curve(&rates, &probs, &years, lo).unwrap();
        let high = reliability_curve(&rates, &probs, &years, hi).unwrap();
        for c in [&low, &high] {
            prop_assert!(c.reliability.iter().all(|r| (0.0..=1.0).contains(r)));
            prop_assert!(c.reliability.windows(2).all(|w| w[1] <= w[0]));
        }
        for (a, b) in low.reliability.iter().zip(&high.reliability) {
            prop_assert!(a <= b);
        }
        prop_assert_eq!(low.reliability[0], 1.0);
    }
}
