//! Uniform sampling grids and the continuous Fourier transform convention
//! `F(omega) = integral f(x) exp(-2 pi i omega x) dx`, realized through the
//! DFT with explicit phase and scaling corrections.
//!
//! Frequencies are stored centered (negative to positive) so that the two
//! sides of the origin are first-class objects.

use std::sync::Mutex;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::FftPlanner;

use crate::error::{CwtError, Result};

/// Relative tolerance used when checking grid/spectrum compatibility.
const GRID_MATCH_RTOL: f64 = 1e-9;

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

pub(crate) fn fft_in_place(values: &mut [Complex64], inverse: bool) {
    let fft = {
        let mut planner = PLANNER.lock().unwrap();
        if inverse {
            planner.plan_fft_inverse(values.len())
        } else {
            planner.plan_fft_forward(values.len())
        }
    };
    fft.process(values);
}

/// A uniform grid `x_k = x0 + k*dx`, `k = 0..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    x0: f64,
    dx: f64,
    n: usize,
}

impl UniformGrid {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !x0.is_finite() || !dx.is_finite() {
            return Err(CwtError::validation("grid parameters must be finite"));
        }
        if dx <= 0.0 {
            return Err(CwtError::validation(format!("grid spacing must be positive, got {dx}")));
        }
        if n < 2 {
            return Err(CwtError::validation(format!("grid needs at least 2 samples, got {n}")));
        }
        Ok(UniformGrid { x0, dx, n })
    }

    /// Grid of `n` points covering `[-half_width, half_width)` symmetrically.
    pub fn centered(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(CwtError::validation("half_width must be positive"));
        }
        let dx = 2.0 * half_width / n as f64;
        UniformGrid::new(-half_width, dx, n)
    }

    /// Grid reconstructed from its first and last points.
    pub fn from_endpoints(x_first: f64, x_last: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(CwtError::validation("need at least 2 samples"));
        }
        if !(x_last > x_first) {
            return Err(CwtError::validation("x_last must exceed x_first"));
        }
        let dx = (x_last - x_first) / (n - 1) as f64;
        UniformGrid::new(x_first, dx, n)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn point(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.point(k))
    }

    /// Highest representable frequency `1/(2 dx)`.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.dx
    }

    /// The spectral grid this grid transforms onto: `d_omega = 1/(n dx)`.
    pub fn spectral_grid(&self) -> SpectralGrid {
        SpectralGrid { d_omega: 1.0 / (self.n as f64 * self.dx), n: self.n }
    }
}

/// A uniformly sampled signal; values may be complex (real signals simply
/// carry zero imaginary parts).
#[derive(Debug, Clone)]
pub struct SampledSignal {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(CwtError::validation(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.n()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CwtError::validation("signal contains non-finite values"));
        }
        Ok(SampledSignal { grid, values })
    }

    pub fn from_real(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        SampledSignal::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Sample a pointwise function on a grid.
    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(|x| Complex64::new(f(x), 0.0)).collect();
        SampledSignal::new(grid, values)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary magnitude, for realness checks.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// `sum |f|^2 dx`, the discrete squared L2 norm.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }
}

/// Centered frequency grid `omega_k = k * d_omega`, `k in [-n/2, n/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    d_omega: f64,
    n: usize,
}

impl SpectralGrid {
    pub fn d_omega(&self) -> f64 {
        self.d_omega
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Signed frequency index of storage slot `i`.
    pub fn k(&self, i: usize) -> i64 {
        i as i64 - (self.n / 2) as i64
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.k(i) as f64 * self.d_omega
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.frequency(i))
    }

    fn matches(&self, grid: &UniformGrid) -> bool {
        if self.n != grid.n() {
            return false;
        }
        let expected = 1.0 / (grid.n() as f64 * grid.dx());
        (self.d_omega - expected).abs() <= GRID_MATCH_RTOL * expected
    }
}

/// Complex samples of the continuous Fourier transform on a centered grid.
#[derive(Debug, Clone)]
pub struct SpectralSignal {
    grid: SpectralGrid,
    values: Vec<Complex64>,
    hermitian: bool,
}

impl SpectralSignal {
    pub fn new(grid: SpectralGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(CwtError::validation("spectral value count does not match grid"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CwtError::validation("spectrum contains non-finite values"));
        }
        Ok(SpectralSignal { grid, values, hermitian: false })
    }

    /// Flag the spectrum as Hermitian-symmetric, verifying
    /// `values[-k] = conj(values[k])` to 1e-12 relative.
    pub fn flag_hermitian(mut self) -> Result<Self> {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let h = self.grid.n() / 2;
        for i in 0..self.grid.n() {
            let j = 2 * h as i64 - i as i64;
            if j < 0 || j >= self.grid.n() as i64 {
                continue; // unpaired Nyquist slot for even n
            }
            let dev = (self.values[j as usize] - self.values[i].conj()).norm();
            if dev > 1e-12 * scale {
                return Err(CwtError::validation(format!(
                    "spectrum is not Hermitian-symmetric: deviation {dev:e} at slot {i}"
                )));
            }
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `sum |F|^2 d_omega`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.d_omega()
    }
}

/// Forward continuous Fourier transform of a sampled signal:
/// `F(omega_k) = dx * exp(-2 pi i omega_k x0) * DFT_k(values)`,
/// with frequencies centered in `[-n/2, n/2) * d_omega`.
pub fn forward_ft(f: &SampledSignal) -> SpectralSignal {
    let grid = f.grid();
    let n = grid.n();
    let h = n / 2;
    let mut buf = f.values().to_vec();
    fft_in_place(&mut buf, false);

    let sgrid = grid.spectral_grid();
    let dx = grid.dx();
    let x0 = grid.x0();
    let values = (0..n)
        .map(|i| {
            let k = i as i64 - h as i64;
            let slot = k.rem_euclid(n as i64) as usize;
            let omega = k as f64 * sgrid.d_omega();
            let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * omega * x0);
            buf[slot] * dx * phase
        })
        .collect();
    SpectralSignal { grid: sgrid, values, hermitian: false }
}

/// Inverse of [`forward_ft`] onto `target`:
/// `f(x_k) = d_omega * sum_m F(omega_m) exp(+2 pi i omega_m x_k)`.
pub fn inverse_ft(spectrum: &SpectralSignal, target: &UniformGrid) -> Result<SampledSignal> {
    if !spectrum.grid().matches(target) {
        return Err(CwtError::validation(format!(
            "spectral grid (n={}, d_omega={}) is inconsistent with target grid (n={}, dx={})",
            spectrum.grid().n(),
            spectrum.grid().d_omega(),
            target.n(),
            target.dx()
        )));
    }
    let n = target.n();
    let h = n / 2;
    let dx = target.dx();
    let x0 = target.x0();

    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let k = i as i64 - h as i64;
        let slot = k.rem_euclid(n as i64) as usize;
        let omega = spectrum.grid().frequency(i);
        let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * omega * x0);
        buf[slot] = spectrum.values()[i] * phase / dx;
    }
    fft_in_place(&mut buf, true);
    let scale = 1.0 / n as f64;
    let values = buf.into_iter().map(|v| v * scale).collect();
    SampledSignal::new(target.clone(), values)
}

/// The standard smooth compactly supported profile
/// `exp(-1/((q-a)(c-q)))` on `(a, c)`, zero outside, normalized to peak 1.
///
/// The single-exponent form avoids underflow of the unnormalized profile.
pub(crate) fn bump_profile(q: f64, a: f64, c: f64) -> f64 {
    if q <= a || q >= c {
        return 0.0;
    }
    let w = c - a;
    (4.0 / (w * w) - 1.0 / ((q - a) * (c - q))).exp()
}

/// Build a signal whose spectrum is a smooth bump supported in
/// `(band.0, band.1)`, mirrored with conjugate symmetry onto the negative
/// axis when `symmetric` is set (making the signal real).
pub fn make_test_function(band: (f64, f64), symmetric: bool, grid: &UniformGrid) -> Result<SampledSignal> {
    let (w1, w2) = band;
    if !(w1 > 0.0) || !(w2 > w1) {
        return Err(CwtError::validation(format!(
            "band must satisfy 0 < omega1 < omega2, got [{w1}, {w2}]"
        )));
    }
    if w2 >= grid.nyquist() {
        return Err(CwtError::validation(format!(
            "band upper edge {w2} reaches the Nyquist frequency {}",
            grid.nyquist()
        )));
    }
    let sgrid = grid.spectral_grid();
    let values: Vec<Complex64> = (0..sgrid.n())
        .map(|i| {
            let omega = sgrid.frequency(i);
            let mut v = bump_profile(omega, w1, w2);
            if symmetric {
                v += bump_profile(-omega, w1, w2);
            }
            Complex64::new(v, 0.0)
        })
        .collect();
    let spectrum = SpectralSignal { grid: sgrid, values, hermitian: symmetric };
    inverse_ft(&spectrum, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian_signal(half_width: f64, n: usize) -> SampledSignal {
        let grid = UniformGrid::centered(half_width, n).unwrap();
        SampledSignal::from_fn(grid, |x| (-std::f64::consts::PI * x * x).exp()).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(UniformGrid::new(0.0, 0.0, 8).is_err());
        assert!(UniformGrid::new(0.0, -1.0, 8).is_err());
        assert!(UniformGrid::new(0.0, 1.0, 1).is_err());
        assert!(UniformGrid::new(f64::NAN, 1.0, 8).is_err());
    }

    #[test]
    fn signal_rejects_non_finite() {
        let grid = UniformGrid::centered(1.0, 4).unwrap();
        let r = SampledSignal::from_real(grid, vec![0.0, 1.0, f64::INFINITY, 0.0]);
        assert!(r.is_err());
    }

    #[test]
    fn gaussian_is_self_dual() {
        let f = gaussian_signal(8.0, 1024);
        let spec = forward_ft(&f);
        let mut sup = 0.0f64;
        for (i, v) in spec.values().iter().enumerate() {
            let omega = spec.grid().frequency(i);
            let expected = (-std::f64::consts::PI * omega * omega).exp();
            sup = sup.max((v - Complex64::new(expected, 0.0)).norm());
        }
        assert!(sup <= 1e-10, "sup error {sup:e}");
    }

    #[test]
    fn poisson_kernel_spectrum() {
        let grid = UniformGrid::centered(100.0, 1 << 15).unwrap();
        let f = SampledSignal::from_fn(grid, |x| 1.0 / (std::f64::consts::PI * (1.0 + x * x))).unwrap();
        let spec = forward_ft(&f);
        let mut sup = 0.0f64;
        for (i, v) in spec.values().iter().enumerate() {
            let omega = spec.grid().frequency(i);
            if omega.abs() <= 4.0 {
                let expected = (-2.0 * std::f64::consts::PI * omega.abs()).exp();
                sup = sup.max((v - Complex64::new(expected, 0.0)).norm());
            }
        }
        assert!(sup <= 1e-2, "sup error {sup:e}");
    }

    #[test]
    fn zero_signal_zero_spectrum() {
        let grid = UniformGrid::centered(4.0, 64).unwrap();
        let f = SampledSignal::from_real(grid, vec![0.0; 64]).unwrap();
        assert_eq!(forward_ft(&f).max_abs(), 0.0);
    }

    #[test]
    fn round_trip_identity() {
        let f = gaussian_signal(6.0, 512);
        let back = inverse_ft(&forward_ft(&f), f.grid()).unwrap();
        let num: f64 = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
        assert!((num / den).sqrt() <= 1e-12);
    }

    #[test]
    fn inverse_grid_mismatch_rejected() {
        let f = gaussian_signal(6.0, 512);
        let other = UniformGrid::centered(5.0, 512).unwrap();
        assert!(inverse_ft(&forward_ft(&f), &other).is_err());
    }

    #[test]
    fn hermitian_spectrum_gives_real_output() {
        let grid = UniformGrid::centered(8.0, 256).unwrap();
        let g = make_test_function((1.0, 2.0), true, &grid).unwrap();
        assert!(g.max_imag() <= 1e-12 * g.max_abs());
    }

    #[test]
    fn self_dual_gaussian_inverse() {
        let grid = UniformGrid::centered(8.0, 1024).unwrap();
        let sgrid = grid.spectral_grid();
        let values = (0..sgrid.n())
            .map(|i| {
                let w = sgrid.frequency(i);
                Complex64::new((-std::f64::consts::PI * w * w).exp(), 0.0)
            })
            .collect();
        let spec = SpectralSignal::new(sgrid, values).unwrap();
        let f = inverse_ft(&spec, &grid).unwrap();
        let mut sup = 0.0f64;
        for (k, v) in f.values().iter().enumerate() {
            let x = grid.point(k);
            sup = sup.max((v - Complex64::new((-std::f64::consts::PI * x * x).exp(), 0.0)).norm());
        }
        assert!(sup <= 1e-10, "sup error {sup:e}");
    }

    #[test]
    fn test_function_support_and_parseval() {
        let grid = UniformGrid::centered(16.0, 2048).unwrap();
        let g = make_test_function((1.0, 2.0), true, &grid).unwrap();
        let spec = forward_ft(&g);
        for (i, v) in spec.values().iter().enumerate() {
            let w = spec.grid().frequency(i);
            if !(1.0..=2.0).contains(&w.abs()) {
                assert!(v.norm() <= 1e-12, "leakage {:e} at omega {}", v.norm(), w);
            }
        }
        assert_relative_eq!(g.energy(), spec.energy(), max_relative = 1e-10);
    }

    #[test]
    fn test_function_band_validation() {
        let grid = UniformGrid::centered(8.0, 256).unwrap();
        assert!(make_test_function((0.0, 2.0), true, &grid).is_err());
        assert!(make_test_function((1.0, 100.0), true, &grid).is_err());
        assert!(make_test_function((2.0, 1.0), true, &grid).is_err());
    }

    #[test]
    fn bump_profile_midpoint_value() {
        let (a, c) = (1.0, 2.0);
        let m = 0.5 * (a + c);
        // peak-normalized profile equals 1 at the midpoint; the raw profile
        // value there is exp(-4/(c-a)^2)
        assert_relative_eq!(bump_profile(m, a, c), 1.0, max_relative = 1e-15);
        assert_eq!(bump_profile(a, a, c), 0.0);
        assert_eq!(bump_profile(c, a, c), 0.0);
    }

    #[test]
    fn phase_shift_property() {
        let grid = UniformGrid::centered(4.0, 128).unwrap();
        let f = SampledSignal::from_fn(grid.clone(), |x| (-x * x).exp() * (3.0 * x).cos()).unwrap();
        let m = 5usize;
        let shifted: Vec<Complex64> =
            (0..128).map(|k| f.values()[(k + 128 - m) % 128]).collect();
        let fs = SampledSignal::new(grid.clone(), shifted).unwrap();
        let a = forward_ft(&f);
        let b = forward_ft(&fs);
        for (i, (va, vb)) in a.values().iter().zip(b.values()).enumerate() {
            let w = a.grid().frequency(i);
            let phase = Complex64::from_polar(
                1.0,
                -2.0 * std::f64::consts::PI * w * m as f64 * grid.dx(),
            );
            assert!((va * phase - vb).norm() <= 1e-10, "slot {i}");
        }
    }
}
