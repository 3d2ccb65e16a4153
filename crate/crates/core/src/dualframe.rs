//! The discrete Calderón construction: cover search on the scan grid, the
//! annular bump, the dual wavelet
//! `mu_hat(omega) = conj(psi_hat(omega)) lambda(omega) / sum_j |psi_hat(b^j omega)|^2 lambda(b^j omega)`,
//! the partition-of-unity check `sum_j psi_hat(b^j omega) mu_hat(b^j omega) = 1`,
//! and the convolution reproducing formula in spectral and temporal form.

use num_complex::Complex64;

use crate::admissibility::{ScanConfig, Side};
use crate::error::{CwtError, Result};
use crate::spectral::{bump_profile, fft_in_place, forward_ft, inverse_ft, SampledSignal, SpectralSignal};
use crate::wavelets::WaveletSpec;

/// Probes per side used to certify denominator positivity over one
/// log-period at construction time.
const BUILD_PROBES_PER_SIDE: usize = 1024;
/// Synthetic-period multiplier for temporal-mode kernel synthesis.
const TEMPORAL_PAD: usize = 8;
/// Kernels are truncated below this fraction of their peak.
const KERNEL_TRIM_REL: f64 = 1e-12;
/// Grid frequencies carrying at least this fraction of the peak spectral
/// mass must be reproduced by the j-range.
const COVERAGE_MASS_REL: f64 = 1e-8;
/// Tolerated deviation of the partition sum from 1 on covered frequencies.
const COVERAGE_SUM_TOL: f64 = 1e-6;

/// One side of a cover: `|psi_hat| >= floor >= tau` holds on `[r, b*r]`.
#[derive(Debug, Clone, Copy)]
pub struct CoverSide {
    pub r: f64,
    pub b: f64,
    pub floor: f64,
}

#[derive(Debug, Clone, Default)]
pub struct CoverResult {
    pub positive: Option<CoverSide>,
    pub negative: Option<CoverSide>,
}

impl CoverResult {
    pub fn side(&self, side: Side) -> Option<&CoverSide> {
        match side {
            Side::Positive => self.positive.as_ref(),
            Side::Negative => self.negative.as_ref(),
        }
    }

    /// The single common base: the minimum of the found `b` over the
    /// available sides.
    pub fn common_base(&self) -> Option<f64> {
        match (&self.positive, &self.negative) {
            (Some(p), Some(n)) => Some(p.b.min(n.b)),
            (Some(p), None) => Some(p.b),
            (None, Some(n)) => Some(n.b),
            (None, None) => None,
        }
    }
}

/// Sliding-window search on the log scan grid for the interval `[r, b*r]`
/// maximizing `b` subject to `|psi_hat| >= tau` throughout and `b >= b_min`.
pub fn find_cover(
    psi: &WaveletSpec,
    side: Side,
    tau: f64,
    b_min: f64,
    scan: &ScanConfig,
) -> Result<CoverSide> {
    if !(tau > 0.0) {
        return Err(CwtError::validation("tau must be positive"));
    }
    if !(b_min > 1.0) {
        return Err(CwtError::validation("b_min must exceed 1"));
    }
    let n = scan.n_points();
    let mut best: Option<(usize, usize, f64)> = None; // (start, end, floor)
    let mut run: Option<(usize, f64)> = None; // (start, floor)
    for i in 0..=n {
        let value = if i < n {
            Some(psi.eval_spectrum(side.sign() * scan.radius(i)).norm())
        } else {
            None
        };
        match value {
            Some(v) if v >= tau => {
                run = Some(match run {
                    Some((s, floor)) => (s, floor.min(v)),
                    None => (i, v),
                });
            }
            _ => {
                if let Some((s, floor)) = run.take() {
                    let e = i - 1;
                    if best.is_none_or(|(bs, be, _)| e - s > be - bs) {
                        best = Some((s, e, floor));
                    }
                }
            }
        }
    }
    match best {
        Some((s, e, floor)) => {
            let r = scan.radius(s);
            let b = scan.radius(e) / r;
            if b >= b_min {
                Ok(CoverSide { r, b, floor })
            } else {
                Err(CwtError::TauberianFail(format!(
                    "widest interval with |psi_hat| >= {tau:e} on the {} side has ratio {b:.6} < b_min {b_min:.6}",
                    side.name()
                )))
            }
        }
        None => Err(CwtError::TauberianFail(format!(
            "|psi_hat| never reaches {tau:e} on the {} side of the scan grid",
            side.name()
        ))),
    }
}

/// Cover on both sides, as the `dual` pipeline requires.
pub fn find_cover_both(psi: &WaveletSpec, tau: f64, b_min: f64, scan: &ScanConfig) -> Result<CoverResult> {
    Ok(CoverResult {
        positive: Some(find_cover(psi, Side::Positive, tau, b_min, scan)?),
        negative: Some(find_cover(psi, Side::Negative, tau, b_min, scan)?),
    })
}

/// Smooth bump, positive exactly on `(a, c)` per covered side of the origin
/// (in `|omega|`), identically zero near 0, peak-normalized to 1.
#[derive(Debug, Clone)]
pub struct AnnularBump {
    positive: Option<(f64, f64)>,
    negative: Option<(f64, f64)>,
}

impl AnnularBump {
    pub fn interval(&self, side: Side) -> Option<(f64, f64)> {
        match side {
            Side::Positive => self.positive,
            Side::Negative => self.negative,
        }
    }

    pub fn eval(&self, omega: f64) -> f64 {
        let (interval, q) = if omega > 0.0 {
            (self.positive, omega)
        } else if omega < 0.0 {
            (self.negative, -omega)
        } else {
            return 0.0;
        };
        match interval {
            Some((a, c)) => bump_profile(q, a, c),
            None => 0.0,
        }
    }
}

/// Bump from a cover: per side, `(a, c) = (r (1 - margin), b r (1 + margin))`,
/// so the bump is strictly positive on the closed cover interval.
pub fn make_bump(cover: &CoverResult, margin: f64) -> Result<AnnularBump> {
    if !(margin > 0.0 && margin < 0.5) {
        return Err(CwtError::validation(format!("margin must lie in (0, 1/2), got {margin}")));
    }
    if cover.positive.is_none() && cover.negative.is_none() {
        return Err(CwtError::validation("cover has no side"));
    }
    let expand = |side: &Option<CoverSide>| {
        side.as_ref().map(|cs| (cs.r * (1.0 - margin), cs.b * cs.r * (1.0 + margin)))
    };
    Ok(AnnularBump { positive: expand(&cover.positive), negative: expand(&cover.negative) })
}

/// The constructed dual wavelet, defined through its spectrum. Evaluation is
/// lazy: probes at `b^j omega` rarely hit any fixed grid, and the formula
/// involves only the finitely many `j` with `b^j omega` inside the bump.
#[derive(Debug, Clone)]
pub struct DualWavelet {
    base_b: f64,
    bump: AnnularBump,
    source: WaveletSpec,
    delta: f64,
}

impl DualWavelet {
    pub fn base_b(&self) -> f64 {
        self.base_b
    }

    pub fn bump(&self) -> &AnnularBump {
        &self.bump
    }

    pub fn source(&self) -> &WaveletSpec {
        &self.source
    }

    /// Observed denominator floor over the construction probes.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Indices `j` (with a one-step guard) for which `b^j omega` can lie in
    /// the bump support on `omega`'s side.
    fn j_window(&self, omega: f64) -> Option<std::ops::RangeInclusive<i32>> {
        let side = if omega > 0.0 { Side::Positive } else { Side::Negative };
        let (a, c) = self.bump.interval(side)?;
        let q = omega.abs();
        if q == 0.0 || !q.is_finite() {
            return None;
        }
        let ln_b = self.base_b.ln();
        let lo = ((a / q).ln() / ln_b).ceil() as i32 - 1;
        let hi = ((c / q).ln() / ln_b).floor() as i32 + 1;
        Some(lo..=hi)
    }

    /// The `j` whose dilate actually falls inside the bump support.
    pub fn active_j(&self, omega: f64) -> Vec<i32> {
        match self.j_window(omega) {
            Some(window) => window
                .filter(|&j| self.bump.eval(self.base_b.powi(j) * omega) > 0.0)
                .collect(),
            None => Vec::new(),
        }
    }

    fn denominator(&self, omega: f64) -> f64 {
        match self.j_window(omega) {
            Some(window) => window
                .map(|j| {
                    let u = self.base_b.powi(j) * omega;
                    self.source.eval_spectrum(u).norm_sqr() * self.bump.eval(u)
                })
                .sum(),
            None => 0.0,
        }
    }

    /// `mu_hat(omega)`; zero wherever the bump vanishes.
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let lam = self.bump.eval(omega);
        if lam == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.source.eval_spectrum(omega).conj() * lam / self.denominator(omega)
    }

    /// Range of `j` needed to reproduce frequencies with `|omega|` in `band`.
    pub fn auto_j_range(&self, band: (f64, f64)) -> Result<(i32, i32)> {
        let (w_lo, w_hi) = band;
        if !(w_lo > 0.0 && w_hi >= w_lo) {
            return Err(CwtError::validation("band must satisfy 0 < lo <= hi"));
        }
        let ln_b = self.base_b.ln();
        let mut j_min = i32::MAX;
        let mut j_max = i32::MIN;
        for side in Side::BOTH {
            if let Some((a, c)) = self.bump.interval(side) {
                // b^j w_hi > a and b^j w_lo < c
                let lo = ((a / w_hi).ln() / ln_b).floor() as i32 + 1;
                let hi = ((c / w_lo).ln() / ln_b).ceil() as i32 - 1;
                j_min = j_min.min(lo);
                j_max = j_max.max(hi);
            }
        }
        if j_min > j_max {
            return Err(CwtError::validation("dual wavelet has no side covering the band"));
        }
        Ok((j_min, j_max))
    }
}

/// Construct the dual wavelet, certifying that the Calderón-sum denominator
/// is strictly positive over the working band.
///
/// Positivity requires the bump support to out-span one base step
/// (`c/a > b` per side); the denominator is then probed over one full
/// log-period per side and the observed floor is recorded. A zero, negative
/// or non-finite denominator reports the offending frequency.
pub fn build_dual(psi: &WaveletSpec, bump: &AnnularBump, b: f64) -> Result<DualWavelet> {
    if !(b > 1.0) || !b.is_finite() {
        return Err(CwtError::validation(format!("base must exceed 1, got {b}")));
    }
    for side in Side::BOTH {
        if let Some((a, c)) = bump.interval(side) {
            if !(c / a > b) {
                // the dilates of (a, c) leave gaps; the geometric midpoint of
                // the first gap witnesses a vanishing denominator
                let omega = side.sign() * (c * a * b).sqrt();
                return Err(CwtError::DegenerateDenominator { omega, value: 0.0 });
            }
        }
    }
    let dual = DualWavelet { base_b: b, bump: bump.clone(), source: psi.clone(), delta: f64::INFINITY };
    let mut delta = f64::INFINITY;
    let mut any_side = false;
    for side in Side::BOTH {
        if let Some((a, _)) = bump.interval(side) {
            any_side = true;
            // the denominator is invariant under omega -> b*omega, so one
            // log-period characterizes it
            for p in 0..BUILD_PROBES_PER_SIDE {
                let q = a * b.powf((p as f64 + 0.5) / BUILD_PROBES_PER_SIDE as f64);
                let omega = side.sign() * q;
                let d = dual.denominator(omega);
                if !(d > 0.0) || !d.is_finite() {
                    return Err(CwtError::DegenerateDenominator { omega, value: d });
                }
                delta = delta.min(d);
            }
        }
    }
    if !any_side {
        return Err(CwtError::validation("bump has no side"));
    }
    Ok(DualWavelet { delta, ..dual })
}

/// Max of `|sum_j psi_hat(b^j omega) mu_hat(b^j omega) - 1|` over `n_probe`
/// log-spaced probes per sign in `band`.
pub fn partition_check(
    psi: &WaveletSpec,
    mu: &DualWavelet,
    band: (f64, f64),
    n_probe: usize,
) -> Result<f64> {
    let (lo, hi) = band;
    if !(lo > 0.0 && hi > lo) {
        return Err(CwtError::validation("band must satisfy 0 < lo < hi"));
    }
    if n_probe < 2 {
        return Err(CwtError::validation("need at least 2 probes"));
    }
    let ratio = hi / lo;
    let mut max_dev = 0.0f64;
    for side in Side::BOTH {
        for p in 0..n_probe {
            let q = lo * ratio.powf(p as f64 / (n_probe - 1) as f64);
            let omega = side.sign() * q;
            let sum = partition_sum(psi, mu, omega);
            max_dev = max_dev.max((sum - Complex64::new(1.0, 0.0)).norm());
        }
    }
    Ok(max_dev)
}

fn partition_sum(psi: &WaveletSpec, mu: &DualWavelet, omega: f64) -> Complex64 {
    match mu.j_window(omega) {
        Some(window) => window
            .map(|j| {
                let u = mu.base_b().powi(j) * omega;
                psi.eval_spectrum(u) * mu.spectrum(u)
            })
            .sum(),
        None => Complex64::new(0.0, 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconstructMode {
    Spectral,
    Temporal,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub signal: SampledSignal,
    pub j_min: i32,
    pub j_max: i32,
}

/// Reproduce `g` through the convolution formula
/// `sum_j phi_{b^j} * mu_{b^j} * g` with `phi = conj(psi)` and the L1
/// dilation `phi_a(t) = phi(t/a)/a`.
///
/// The signal spectrum must be supported away from 0 inside the band the
/// dilated bump family covers; frequencies carrying mass that the `j`-range
/// fails to reproduce raise [`CwtError::BandCoverage`].
pub fn reconstruct(
    g: &SampledSignal,
    psi: &WaveletSpec,
    mu: &DualWavelet,
    j_range: Option<(i32, i32)>,
    mode: ReconstructMode,
) -> Result<Reconstruction> {
    let spectrum = forward_ft(g);
    let mass_tol = COVERAGE_MASS_REL * spectrum.max_abs();
    if mass_tol == 0.0 {
        // zero signal reproduces trivially
        let (j_min, j_max) = j_range.unwrap_or((0, 0));
        return Ok(Reconstruction { signal: g.clone(), j_min, j_max });
    }

    let (j_min, j_max) = match j_range {
        Some(r) => {
            if r.0 > r.1 {
                return Err(CwtError::validation("j_min must not exceed j_max"));
            }
            r
        }
        None => {
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for (i, v) in spectrum.values().iter().enumerate() {
                if v.norm() > mass_tol {
                    let w = spectrum.grid().frequency(i).abs();
                    if w == 0.0 {
                        return Err(CwtError::BandCoverage { uncovered: vec![0.0] });
                    }
                    lo = lo.min(w);
                    hi = hi.max(w);
                }
            }
            mu.auto_j_range((lo, hi))?
        }
    };

    // phi_hat(omega) = conj(psi_hat(-omega)); for real wavelets this equals
    // psi_hat(omega)
    let phi_hat = |omega: f64| psi.eval_spectrum(-omega).conj();
    let coverage: Vec<Complex64> = (0..spectrum.grid().n())
        .map(|i| {
            let omega = spectrum.grid().frequency(i);
            (j_min..=j_max)
                .map(|j| {
                    let u = mu.base_b().powi(j) * omega;
                    phi_hat(u) * mu.spectrum(u)
                })
                .sum()
        })
        .collect();

    let mut uncovered = Vec::new();
    for (i, v) in spectrum.values().iter().enumerate() {
        if v.norm() > mass_tol && (coverage[i] - Complex64::new(1.0, 0.0)).norm() > COVERAGE_SUM_TOL {
            uncovered.push(spectrum.grid().frequency(i));
        }
    }
    if !uncovered.is_empty() {
        return Err(CwtError::BandCoverage { uncovered });
    }

    let signal = match mode {
        ReconstructMode::Spectral => {
            let values: Vec<Complex64> = spectrum
                .values()
                .iter()
                .zip(&coverage)
                .map(|(v, s)| v * s)
                .collect();
            let spec = SpectralSignal::new(spectrum.grid().clone(), values)?;
            inverse_ft(&spec, g.grid())?
        }
        ReconstructMode::Temporal => reconstruct_temporal(g, psi, mu, j_min, j_max)?,
    };
    Ok(Reconstruction { signal, j_min, j_max })
}

/// A convolution kernel sampled at signal-grid lags.
struct Kernel {
    first_lag: i64,
    values: Vec<Complex64>,
}

impl Kernel {
    fn trim(first_lag: i64, mut values: Vec<Complex64>) -> Kernel {
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let thresh = KERNEL_TRIM_REL * peak;
        let start = values.iter().position(|v| v.norm() >= thresh).unwrap_or(0);
        let end = values.iter().rposition(|v| v.norm() >= thresh).map_or(0, |e| e + 1);
        let mut vals: Vec<Complex64> = values.drain(start..end).collect();
        for v in &mut vals {
            if v.norm() < thresh {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        Kernel { first_lag: first_lag + start as i64, values: vals }
    }

    /// `out[i] = dx * sum_l ker(l) sig[i - l]`, the rectangle-rule
    /// approximation of the continuous convolution on the signal window.
    fn convolve(&self, sig: &[Complex64], dx: f64) -> Vec<Complex64> {
        let n = sig.len() as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); sig.len()];
        for (idx, &kv) in self.values.iter().enumerate() {
            if kv.norm() == 0.0 {
                continue;
            }
            let lag = self.first_lag + idx as i64;
            if lag >= n || lag <= -n {
                continue;
            }
            let lo = lag.max(0);
            let hi = (n + lag).min(n);
            for i in lo..hi {
                out[i as usize] += kv * sig[(i - lag) as usize];
            }
        }
        for v in &mut out {
            *v *= dx;
        }
        out
    }
}

fn reconstruct_temporal(
    g: &SampledSignal,
    psi: &WaveletSpec,
    mu: &DualWavelet,
    j_min: i32,
    j_max: i32,
) -> Result<SampledSignal> {
    let grid = g.grid();
    let n = grid.n();
    let dx = grid.dx();
    let big_n = TEMPORAL_PAD * n;
    let d_omega = 1.0 / (big_n as f64 * dx);
    let max_lag = (big_n / 2 - 1) as i64;

    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    for j in j_min..=j_max {
        let bj = mu.base_b().powi(j);

        // mu_{b^j}: FT is mu_hat(b^j omega); synthesized on a period
        // TEMPORAL_PAD times the signal window to keep wrap-around small
        let mut buf = vec![Complex64::new(0.0, 0.0); big_n];
        let half = (big_n / 2) as i64;
        let mut any = false;
        for m in 0..big_n {
            let k = m as i64 - half;
            let omega = k as f64 * d_omega;
            let v = mu.spectrum(bj * omega);
            if v.norm() > 0.0 {
                any = true;
            }
            buf[k.rem_euclid(big_n as i64) as usize] = v;
        }
        if !any {
            continue; // this dilate has no support against the grid
        }
        fft_in_place(&mut buf, true);
        let scale = d_omega;
        let mu_vals: Vec<Complex64> = (-max_lag..=max_lag)
            .map(|l| buf[l.rem_euclid(big_n as i64) as usize] * scale)
            .collect();
        let mu_kernel = Kernel::trim(-max_lag, mu_vals);

        // phi_{b^j}(t) = conj(psi(t/b^j))/b^j, truncated at the envelope
        let (lo_t, hi_t) = match psi.time_support() {
            Some((a, b)) => (a * bj, b * bj),
            None => {
                let r = psi.envelope_radius().ok_or_else(|| {
                    CwtError::validation(
                        "temporal mode needs a truncatable wavelet envelope (polynomial-decay kinds are spectral-only)",
                    )
                })?;
                (-r * bj, r * bj)
            }
        };
        let lo_l = ((lo_t / dx).floor() as i64).max(-max_lag);
        let hi_l = ((hi_t / dx).ceil() as i64).min(max_lag);
        let phi_vals: Vec<Complex64> = (lo_l..=hi_l)
            .map(|l| psi.eval_time(l as f64 * dx / bj).conj() / bj)
            .collect();
        let phi_kernel = Kernel::trim(lo_l, phi_vals);

        let step = mu_kernel.convolve(g.values(), dx);
        let step = phi_kernel.convolve(&step, dx);
        for (a, v) in acc.iter_mut().zip(step) {
            *a += v;
        }
    }
    SampledSignal::new(grid.clone(), acc)
}
