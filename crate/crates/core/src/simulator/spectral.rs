use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Frequencies of the harmonics resolvable in an `n`-sample record at step
/// `dt`: multiples of `1 / (n dt)` strictly between zero and Nyquist.
pub fn harmonic_bins(n: usize, dt: f64) -> impl Iterator<Item = (usize, f64)> {
    let df = 1.0 / (n as f64 * dt);
    (1..n.div_ceil(2)).map(move |k| (k, k as f64 * df))
}

/// Evaluates `x_j = sum_k Re(c_k exp(2 pi i k j / n))` for `j = 0..n`.
/// `coeffs[k - 1]` is the complex amplitude of bin `k`.
pub fn synthesize(n: usize, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in coeffs.iter().enumerate() {
        let k = i + 1;
        debug_assert!(2 * k < n);
        buf[k] += 0.5 * c;
        buf[n - k] += 0.5 * c.conj();
    }
    let fft = FftPlanner::new().plan_fft_inverse(n);
    fft.process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// One-sided periodogram `(frequency, psd)` of a real series, no window.
pub fn periodogram(series: &[f64], dt: f64) -> Vec<(f64, f64)> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = series.iter().map(|&x| Complex64::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 2.0 * dt / n as f64;
    harmonic_bins(n, dt)
        .map(|(k, f)| (f, buf[k].norm_sqr() * scale))
        .collect()
}
