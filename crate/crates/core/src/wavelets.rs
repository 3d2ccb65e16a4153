//! The wavelet zoo: closed-form time/spectrum evaluators for the analytic
//! kinds, cached-and-interpolated spectra for the sampled kinds, and the
//! scale/translation action `psi_{s,t}(x) = s^{-1/2} psi((x-t)/s)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{CwtError, Result};
use crate::spectral::{forward_ft, SampledSignal, SpectralSignal, UniformGrid};

/// Polynomial decay exponent of the time envelope: `|psi(x)| <~ (1+|x|)^-p`.
/// `Rapid` covers Gaussian-type decay and compact support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    Rapid,
    Polynomial(u32),
}

impl Decay {
    /// Whether the moment integrand `x^ell psi(x)` is absolutely integrable
    /// with margin, i.e. `decay >= ell + 2`.
    pub fn covers_order(&self, ell: u32) -> bool {
        match self {
            Decay::Rapid => true,
            Decay::Polynomial(p) => *p >= ell + 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WaveletKind {
    /// `exp(-pi x^2)`, self-dual under the 2-pi Fourier convention.
    Gaussian,
    /// m-th derivative of `exp(-x^2/2)`, m >= 1.
    GaussianDerivative(u32),
    /// `(1 - x^2) exp(-x^2/2)`: the negated second Gaussian derivative.
    MexicanHat,
    /// `1/(pi (1 + x^2))`.
    Poisson,
    /// `-2x / (pi (1 + x^2)^2)`.
    PoissonDerivative,
    /// `1` on `[0, 1/2)`, `-1` on `[1/2, 1)`, `0` elsewhere.
    Haar,
    /// Arbitrary sampled waveform; spectrum cached from its FFT.
    Sampled,
}

#[derive(Debug)]
struct Inner {
    kind: WaveletKind,
    amplitude: f64,
    sample: Option<SampledSignal>,
    cached_spectrum: Option<SpectralSignal>,
    decay: Decay,
}

/// A zoo wavelet: pointwise time evaluator plus a spectrum evaluator that is
/// closed-form where known and interpolated from a cached FFT otherwise.
///
/// Cheap to clone; immutable after construction.
#[derive(Debug, Clone)]
pub struct WaveletSpec {
    inner: Arc<Inner>,
}

/// Grid used to cache the Haar spectrum: `[-32, 32)`, 2^18 samples, so the
/// jumps at 0, 1/2 and 1 fall exactly on grid points. The rectangle rule is
/// first-order on a discontinuous waveform, so the sampling is kept fine.
fn haar_cache_grid() -> UniformGrid {
    UniformGrid::centered(32.0, 1 << 18).expect("static grid")
}

fn hermite_prob(m: u32, x: f64) -> f64 {
    // probabilists' Hermite: He_0 = 1, He_1 = x, He_{k+1} = x He_k - k He_{k-1}
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..m {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

impl WaveletSpec {
    fn from_inner(inner: Inner) -> Self {
        WaveletSpec { inner: Arc::new(inner) }
    }

    pub fn gaussian() -> Self {
        Self::from_inner(Inner {
            kind: WaveletKind::Gaussian,
            amplitude: 1.0,
            sample: None,
            cached_spectrum: None,
            decay: Decay::Rapid,
        })
    }

    pub fn gaussian_derivative(order: u32) -> Result<Self> {
        if order < 1 {
            return Err(CwtError::validation("gaussian_derivative order must be >= 1"));
        }
        Ok(Self::from_inner(Inner {
            kind: WaveletKind::GaussianDerivative(order),
            amplitude: 1.0,
            sample: None,
            cached_spectrum: None,
            decay: Decay::Rapid,
        }))
    }

    pub fn mexican_hat() -> Self {
        Self::from_inner(Inner {
            kind: WaveletKind::MexicanHat,
            amplitude: 1.0,
            sample: None,
            cached_spectrum: None,
            decay: Decay::Rapid,
        })
    }

    pub fn poisson() -> Self {
        Self::from_inner(Inner {
            kind: WaveletKind::Poisson,
            amplitude: 1.0,
            sample: None,
            cached_spectrum: None,
            decay: Decay::Polynomial(2),
        })
    }

    pub fn poisson_derivative() -> Self {
        Self::from_inner(Inner {
            kind: WaveletKind::PoissonDerivative,
            amplitude: 1.0,
            sample: None,
            cached_spectrum: None,
            decay: Decay::Polynomial(3),
        })
    }

    pub fn haar() -> Self {
        let sample = SampledSignal::from_fn(haar_cache_grid(), haar_time).expect("static sample");
        let cached = forward_ft(&sample);
        Self::from_inner(Inner {
            kind: WaveletKind::Haar,
            amplitude: 1.0,
            sample: None,
            cached_spectrum: Some(cached),
            decay: Decay::Rapid,
        })
    }

    /// Wavelet given by samples; treated as supported on its grid window.
    /// The spectrum is the FFT of the samples, cubically interpolated.
    pub fn from_samples(sample: SampledSignal) -> Result<Self> {
        let cached = forward_ft(&sample);
        Ok(Self::from_inner(Inner {
            kind: WaveletKind::Sampled,
            amplitude: 1.0,
            sample: Some(sample),
            cached_spectrum: Some(cached),
            decay: Decay::Rapid,
        }))
    }

    /// Same wavelet multiplied by a constant factor (e.g. Calderón
    /// normalization).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() {
            return Err(CwtError::validation("scale factor must be finite"));
        }
        Ok(Self::from_inner(Inner {
            kind: self.inner.kind.clone(),
            amplitude: self.inner.amplitude * factor,
            sample: self.inner.sample.clone(),
            cached_spectrum: self.inner.cached_spectrum.clone(),
            decay: self.inner.decay,
        }))
    }

    pub fn kind(&self) -> &WaveletKind {
        &self.inner.kind
    }

    pub fn decay(&self) -> Decay {
        self.inner.decay
    }

    pub fn sample(&self) -> Option<&SampledSignal> {
        self.inner.sample.as_ref()
    }

    pub fn has_closed_spectrum(&self) -> bool {
        !matches!(self.inner.kind, WaveletKind::Haar | WaveletKind::Sampled)
    }

    /// Time-domain evaluation `psi(x)`.
    pub fn eval_time(&self, x: f64) -> Complex64 {
        let amp = self.inner.amplitude;
        let v = match &self.inner.kind {
            WaveletKind::Gaussian => Complex64::new((-PI * x * x).exp(), 0.0),
            WaveletKind::GaussianDerivative(m) => {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * hermite_prob(*m, x) * (-0.5 * x * x).exp(), 0.0)
            }
            WaveletKind::MexicanHat => Complex64::new((1.0 - x * x) * (-0.5 * x * x).exp(), 0.0),
            WaveletKind::Poisson => Complex64::new(1.0 / (PI * (1.0 + x * x)), 0.0),
            WaveletKind::PoissonDerivative => {
                let d = 1.0 + x * x;
                Complex64::new(-2.0 * x / (PI * d * d), 0.0)
            }
            WaveletKind::Haar => Complex64::new(haar_time(x), 0.0),
            WaveletKind::Sampled => {
                let sample = self.inner.sample.as_ref().expect("sampled kind has sample");
                interp_sample(sample, x)
            }
        };
        v * amp
    }

    /// Spectrum evaluation `psi_hat(omega)`: closed form where available,
    /// cubic interpolation of the cached FFT otherwise (zero outside the
    /// cached range).
    pub fn eval_spectrum(&self, omega: f64) -> Complex64 {
        let amp = self.inner.amplitude;
        let v = match &self.inner.kind {
            WaveletKind::Gaussian => Complex64::new((-PI * omega * omega).exp(), 0.0),
            WaveletKind::GaussianDerivative(m) => {
                let base = (2.0 * PI).sqrt() * (-2.0 * PI * PI * omega * omega).exp();
                Complex64::new(0.0, 2.0 * PI * omega).powi(*m as i32) * base
            }
            WaveletKind::MexicanHat => {
                let w2 = omega * omega;
                Complex64::new(
                    4.0 * PI * PI * w2 * (2.0 * PI).sqrt() * (-2.0 * PI * PI * w2).exp(),
                    0.0,
                )
            }
            WaveletKind::Poisson => Complex64::new((-2.0 * PI * omega.abs()).exp(), 0.0),
            WaveletKind::PoissonDerivative => {
                // 2 pi i omega e^{-2 pi |omega|}; the i comes from the stated
                // FT convention
                Complex64::new(0.0, 2.0 * PI * omega) * (-2.0 * PI * omega.abs()).exp()
            }
            WaveletKind::Haar | WaveletKind::Sampled => {
                let cached = self.inner.cached_spectrum.as_ref().expect("cached spectrum");
                interp_spectrum(cached, omega)
            }
        };
        v * amp
    }

    /// Largest `|psi_hat|` over a log grid spanning `[2^-20, 2^20]` on both
    /// sides, used to set relative thresholds.
    pub fn spectrum_sup(&self) -> f64 {
        let mut sup = 0.0f64;
        for k in 0..=(40 * 64) {
            let r = (2.0f64).powf(-20.0 + k as f64 / 64.0);
            sup = sup.max(self.eval_spectrum(r).norm());
            sup = sup.max(self.eval_spectrum(-r).norm());
        }
        sup
    }

    /// Truncation radius beyond which the time envelope is below 1e-12 of
    /// its peak; `None` for polynomial-decay kinds.
    pub fn envelope_radius(&self) -> Option<f64> {
        match &self.inner.kind {
            WaveletKind::Gaussian => Some(4.0),
            WaveletKind::GaussianDerivative(m) => Some(12.0 + 0.5 * *m as f64),
            WaveletKind::MexicanHat => Some(12.0),
            WaveletKind::Haar => Some(1.0),
            WaveletKind::Sampled => {
                let s = self.inner.sample.as_ref().expect("sample");
                let g = s.grid();
                Some(g.x0().abs().max((g.x0() + (g.n() - 1) as f64 * g.dx()).abs()))
            }
            WaveletKind::Poisson | WaveletKind::PoissonDerivative => None,
        }
    }

    /// Exact support interval when the wavelet is compactly supported.
    pub fn time_support(&self) -> Option<(f64, f64)> {
        match &self.inner.kind {
            WaveletKind::Haar => Some((0.0, 1.0)),
            WaveletKind::Sampled => {
                let s = self.inner.sample.as_ref().expect("sample");
                let g = s.grid();
                Some((g.x0(), g.x0() + (g.n() - 1) as f64 * g.dx()))
            }
            _ => None,
        }
    }

    /// Canonical fine sampling grid per kind, wide enough to resolve the
    /// spectrum features and capture the time tails.
    pub fn canonical_grid(&self) -> UniformGrid {
        match &self.inner.kind {
            WaveletKind::Gaussian | WaveletKind::MexicanHat | WaveletKind::GaussianDerivative(_) => {
                UniformGrid::centered(16.0, 4096).expect("static grid")
            }
            WaveletKind::Poisson | WaveletKind::PoissonDerivative => {
                UniformGrid::centered(100.0, 1 << 15).expect("static grid")
            }
            WaveletKind::Haar => haar_cache_grid(),
            WaveletKind::Sampled => self.inner.sample.as_ref().expect("sample").grid().clone(),
        }
    }

    /// The wavelet sampled on its canonical grid.
    pub fn canonical_sample(&self) -> SampledSignal {
        if let Some(s) = &self.inner.sample {
            return s.clone();
        }
        let grid = self.canonical_grid();
        let values = grid.points().map(|x| self.eval_time(x)).collect();
        SampledSignal::new(grid, values).expect("finite evaluations")
    }
}

fn haar_time(x: f64) -> f64 {
    if (0.0..0.5).contains(&x) {
        1.0
    } else if (0.5..1.0).contains(&x) {
        -1.0
    } else {
        0.0
    }
}

fn catmull_rom(p0: Complex64, p1: Complex64, p2: Complex64, p3: Complex64, u: f64) -> Complex64 {
    let a = (p2 - p0) * 0.5;
    let b = p0 - p1 * 2.5 + p2 * 2.0 - p3 * 0.5;
    let c = (p1 - p2) * 1.5 + (p3 - p0) * 0.5;
    p1 + (a + (b + c * u) * u) * u
}

fn interp_uniform(values: &[Complex64], pos: f64) -> Complex64 {
    let n = values.len();
    if pos < 0.0 || pos > (n - 1) as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let i1 = (pos.floor() as usize).min(n - 2);
    let u = pos - i1 as f64;
    let at = |i: i64| values[i.clamp(0, n as i64 - 1) as usize];
    catmull_rom(at(i1 as i64 - 1), at(i1 as i64), at(i1 as i64 + 1), at(i1 as i64 + 2), u)
}

fn interp_spectrum(spec: &SpectralSignal, omega: f64) -> Complex64 {
    let g = spec.grid();
    let pos = omega / g.d_omega() + (g.n() / 2) as f64;
    interp_uniform(spec.values(), pos)
}

fn interp_sample(sample: &SampledSignal, x: f64) -> Complex64 {
    let g = sample.grid();
    let pos = (x - g.x0()) / g.dx();
    interp_uniform(sample.values(), pos)
}

/// `psi_{s,t}` with evaluator `x -> s^{-1/2} psi((x-t)/s)` and spectrum
/// `omega -> psi_hat(s omega) e^{-2 pi i omega t} s^{1/2}`.
#[derive(Debug, Clone)]
pub struct DilatedWavelet {
    base: WaveletSpec,
    scale: f64,
    translation: f64,
}

impl DilatedWavelet {
    pub fn new(base: WaveletSpec, scale: f64, translation: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(CwtError::validation(format!("scale must be positive, got {scale}")));
        }
        if !translation.is_finite() {
            return Err(CwtError::validation("translation must be finite"));
        }
        Ok(DilatedWavelet { base, scale, translation })
    }

    pub fn base(&self) -> &WaveletSpec {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn translation(&self) -> f64 {
        self.translation
    }

    pub fn eval_time(&self, x: f64) -> Complex64 {
        self.base.eval_time((x - self.translation) / self.scale) / self.scale.sqrt()
    }

    pub fn eval_spectrum(&self, omega: f64) -> Complex64 {
        let phase = Complex64::from_polar(1.0, -2.0 * PI * omega * self.translation);
        self.base.eval_spectrum(self.scale * omega) * phase * self.scale.sqrt()
    }
}

/// Convenience wrapper matching the `(psi, s, t)` call shape.
pub fn dilate_translate(psi: &WaveletSpec, scale: f64, translation: f64) -> Result<DilatedWavelet> {
    DilatedWavelet::new(psi.clone(), scale, translation)
}
