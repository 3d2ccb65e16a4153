//! The continuous wavelet transform `W(s, t) = <f, psi_{s,t}>` on a scale
//! grid, computed per scale through the spectral identity
//! `row(s) = inverse_ft( f_hat(omega) * conj(psi_hat(s omega)) * sqrt(s) )`,
//! together with the Plancherel energy functional and the direct-quadrature
//! oracle `cwt_single`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CwtError, Result};
use crate::quadrature::{gl32_complex, integrate_geometric, trapezoid_complex};
use crate::spectral::{forward_ft, inverse_ft, SampledSignal, UniformGrid};
use crate::wavelets::{Decay, WaveletKind, WaveletSpec};

/// Base of a geometric scale grid. The power-of-two form keeps `b^j`
/// reproducible across platforms by deferring to `exp2` on exact rationals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeomBase {
    Literal(f64),
    /// `b = 2^(num/den)`.
    Pow2 { num: i32, den: u32 },
}

impl GeomBase {
    pub fn value(&self) -> f64 {
        match self {
            GeomBase::Literal(b) => *b,
            GeomBase::Pow2 { num, den } => (2.0f64).powf(*num as f64 / *den as f64),
        }
    }

    fn scale(&self, j: i32) -> f64 {
        match self {
            GeomBase::Literal(b) => b.powi(j),
            GeomBase::Pow2 { num, den } => {
                (2.0f64).powf(j as f64 * *num as f64 / *den as f64)
            }
        }
    }
}

/// Scale axis: geometric `s_j = b^j` (stored as base + j-range, never as
/// expanded floats) or an explicit sorted list of positive scales.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleGrid {
    Geometric { base: GeomBase, j_min: i32, j_max: i32 },
    Explicit(Vec<f64>),
}

impl ScaleGrid {
    pub fn geometric(base: f64, j_min: i32, j_max: i32) -> Result<Self> {
        if !(base > 1.0) || !base.is_finite() {
            return Err(CwtError::validation(format!("geometric base must exceed 1, got {base}")));
        }
        if j_min > j_max {
            return Err(CwtError::validation("j_min must not exceed j_max"));
        }
        Ok(ScaleGrid::Geometric { base: GeomBase::Literal(base), j_min, j_max })
    }

    pub fn geometric_pow2(num: i32, den: u32, j_min: i32, j_max: i32) -> Result<Self> {
        if num <= 0 || den == 0 {
            return Err(CwtError::validation("power-of-two base requires num > 0 and den > 0"));
        }
        if j_min > j_max {
            return Err(CwtError::validation("j_min must not exceed j_max"));
        }
        Ok(ScaleGrid::Geometric { base: GeomBase::Pow2 { num, den }, j_min, j_max })
    }

    pub fn explicit(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(CwtError::validation("explicit scale list is empty"));
        }
        if scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(CwtError::validation("scales must be positive and finite"));
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CwtError::validation("explicit scales must be strictly increasing"));
        }
        Ok(ScaleGrid::Explicit(scales))
    }

    /// Default sweep used by the CLI: `b = 2^(1/8)`, `j` in `[-32, 32]`.
    pub fn default_sweep() -> Self {
        ScaleGrid::Geometric { base: GeomBase::Pow2 { num: 1, den: 8 }, j_min: -32, j_max: 32 }
    }

    pub fn len(&self) -> usize {
        match self {
            ScaleGrid::Geometric { j_min, j_max, .. } => (j_max - j_min + 1) as usize,
            ScaleGrid::Explicit(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scale(&self, i: usize) -> f64 {
        match self {
            ScaleGrid::Geometric { base, j_min, .. } => base.scale(j_min + i as i32),
            ScaleGrid::Explicit(v) => v[i],
        }
    }

    pub fn scales(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.scale(i)).collect()
    }
}

/// CWT coefficients on a scale x translation grid. Row `i` holds scale
/// `scales.scale(i)`; column `k` holds translation `translations.point(k)`.
#[derive(Debug, Clone)]
pub struct Scalogram {
    scales: ScaleGrid,
    translations: UniformGrid,
    coeffs: Vec<Complex64>,
    underflow_rows: Vec<bool>,
}

impl Scalogram {
    pub fn scales(&self) -> &ScaleGrid {
        &self.scales
    }

    pub fn translations(&self) -> &UniformGrid {
        &self.translations
    }

    pub fn n_scales(&self) -> usize {
        self.scales.len()
    }

    pub fn n_translations(&self) -> usize {
        self.translations.n()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let n = self.n_translations();
        &self.coeffs[i * n..(i + 1) * n]
    }

    pub fn at(&self, i: usize, k: usize) -> Complex64 {
        self.coeffs[i * self.n_translations() + k]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Rows whose spectral filter underflowed to exact zero everywhere.
    pub fn underflow_rows(&self) -> &[bool] {
        &self.underflow_rows
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn from_parts(
        scales: ScaleGrid,
        translations: UniformGrid,
        coeffs: Vec<Complex64>,
        underflow_rows: Vec<bool>,
    ) -> Result<Self> {
        if coeffs.len() != scales.len() * translations.n() {
            return Err(CwtError::validation("coefficient count does not match grid"));
        }
        if underflow_rows.len() != scales.len() {
            return Err(CwtError::validation("flag count does not match scale count"));
        }
        Ok(Scalogram { scales, translations, coeffs, underflow_rows })
    }
}

/// Full scalogram with translations pinned to the signal grid.
///
/// Scale rows are computed independently (in parallel) and assembled in
/// order, so identical inputs give bit-identical output.
pub fn cwt(f: &SampledSignal, psi: &WaveletSpec, scales: &ScaleGrid) -> Result<Scalogram> {
    let spectrum = forward_ft(f);
    let grid = f.grid().clone();
    let n = grid.n();
    let scale_values = scales.scales();

    let rows: Vec<(Vec<Complex64>, bool)> = scale_values
        .par_iter()
        .map(|&s| {
            let sqrt_s = s.sqrt();
            let mut filtered = Vec::with_capacity(n);
            let mut max_filter = 0.0f64;
            for (i, v) in spectrum.values().iter().enumerate() {
                let omega = spectrum.grid().frequency(i);
                let h = psi.eval_spectrum(s * omega).conj() * sqrt_s;
                max_filter = max_filter.max(h.norm());
                filtered.push(v * h);
            }
            if max_filter == 0.0 {
                // benign underflow at extreme scales: flagged zero row
                return Ok((vec![Complex64::new(0.0, 0.0); n], true));
            }
            let spec = crate::spectral::SpectralSignal::new(spectrum.grid().clone(), filtered)?;
            let row = inverse_ft(&spec, &grid)?;
            Ok((row.values().to_vec(), false))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut coeffs = Vec::with_capacity(scale_values.len() * n);
    let mut flags = Vec::with_capacity(scale_values.len());
    for (row, flag) in rows {
        coeffs.extend_from_slice(&row);
        flags.push(flag);
    }
    Scalogram::from_parts(scales.clone(), grid, coeffs, flags)
}

/// `<f, psi_{s,t}>` for a sampled signal, by rectangle-rule summation on the
/// signal grid (the same quadrature convention as `forward_ft`).
pub fn cwt_single(f: &SampledSignal, psi: &WaveletSpec, s: f64, t: f64) -> Result<Complex64> {
    if !(s > 0.0) {
        return Err(CwtError::validation("scale must be positive"));
    }
    let grid = f.grid();
    let inv_sqrt_s = 1.0 / s.sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, v) in f.values().iter().enumerate() {
        let x = grid.point(k);
        acc += v * psi.eval_time((x - t) / s).conj() * inv_sqrt_s;
    }
    Ok(acc * grid.dx())
}

/// `<f, psi_{s,t}>` for a pointwise real signal evaluator, by quadrature on a
/// truncated domain. This is the reference oracle for [`cwt`].
///
/// `growth_order` declares the polynomial growth of `f`; the pairing is valid
/// only when the wavelet decay covers it (`decay >= growth_order + 2`).
pub fn cwt_single_fn(
    f: impl Fn(f64) -> f64,
    growth_order: u32,
    psi: &WaveletSpec,
    s: f64,
    t: f64,
) -> Result<Complex64> {
    if !(s > 0.0) {
        return Err(CwtError::validation("scale must be positive"));
    }
    match psi.decay() {
        Decay::Rapid => {}
        Decay::Polynomial(p) => {
            if p < growth_order + 2 {
                return Err(CwtError::validation(format!(
                    "signal growth order {growth_order} exceeds what wavelet decay {p} integrates"
                )));
            }
        }
    }
    let sqrt_s = s.sqrt();
    match psi.kind() {
        WaveletKind::Haar => {
            // exact piecewise integration over the two support halves
            let pos = gl32_complex(t, t + 0.5 * s, |x| Complex64::new(f(x), 0.0));
            let neg = gl32_complex(t + 0.5 * s, t + s, |x| Complex64::new(f(x), 0.0));
            Ok((pos - neg) / sqrt_s)
        }
        _ => match psi.envelope_radius() {
            Some(radius) => {
                let (lo, hi) = match psi.time_support() {
                    Some((a, b)) => (t + a * s, t + b * s),
                    None => (t - radius * s, t + radius * s),
                };
                // resolve both the wavelet (scale s) and O(1) signal features
                let h_target = (s.min(1.0)) / 64.0;
                let n = (((hi - lo) / h_target).ceil() as usize).clamp(64, 1 << 20);
                Ok(trapezoid_complex(lo, hi, n, |x| {
                    Complex64::new(f(x), 0.0) * psi.eval_time((x - t) / s).conj()
                }) / sqrt_s)
            }
            None => {
                // polynomial tails: geometric panels in u = (x-t)/s out to
                // 2^20, with the truncation bound documented by the decay
                let val = integrate_geometric(1.0, (1u64 << 20) as f64, |u| {
                    // real wavelets only reach this branch
                    f(t + s * u) * psi.eval_time(u).re
                });
                Ok(Complex64::new(val * sqrt_s, 0.0))
            }
        },
    }
}

/// Discrete Plancherel functional `sum_{i,k} |W(s_i, t_k)|^2 dt w_i` with the
/// log-scale weights `w_i = ln(b)/s_i` for the measure `ds/s^2`, trapezoid
/// corrected at the sweep ends. Geometric grids only.
pub fn plancherel_energy(w: &Scalogram) -> Result<f64> {
    let base = match w.scales() {
        ScaleGrid::Geometric { base, .. } => base.value(),
        ScaleGrid::Explicit(_) => {
            return Err(CwtError::validation(
                "plancherel_energy requires a geometric scale grid (log-uniform quadrature weights)",
            ))
        }
    };
    let ln_b = base.ln();
    let dt = w.translations().dx();
    let n_scales = w.n_scales();
    let mut total = 0.0;
    for i in 0..n_scales {
        let s = w.scales().scale(i);
        let mut weight = ln_b / s;
        if i == 0 || i == n_scales - 1 {
            weight *= 0.5;
        }
        let row_energy: f64 = w.row(i).iter().map(|c| c.norm_sqr()).sum();
        total += row_energy * dt * weight;
    }
    Ok(total)
}

/// `sum |f|^2 dx`.
pub fn signal_energy(f: &SampledSignal) -> f64 {
    f.energy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_test_function;
    use approx::assert_relative_eq;

    fn gaussian_signal() -> SampledSignal {
        let grid = UniformGrid::centered(8.0, 1024).unwrap();
        SampledSignal::from_fn(grid, |x| (-std::f64::consts::PI * x * x).exp()).unwrap()
    }

    #[test]
    fn scale_grid_validation() {
        assert!(ScaleGrid::geometric(1.0, 0, 4).is_err());
        assert!(ScaleGrid::geometric(2.0, 4, 0).is_err());
        assert!(ScaleGrid::explicit(vec![]).is_err());
        assert!(ScaleGrid::explicit(vec![1.0, 1.0]).is_err());
        assert!(ScaleGrid::explicit(vec![-1.0, 1.0]).is_err());
        let g = ScaleGrid::geometric_pow2(1, 8, -8, 8).unwrap();
        assert_eq!(g.len(), 17);
        assert_relative_eq!(g.scale(8), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cwt_of_zero_is_zero() {
        let grid = UniformGrid::centered(8.0, 256).unwrap();
        let f = SampledSignal::from_real(grid, vec![0.0; 256]).unwrap();
        let w = cwt(&f, &WaveletSpec::mexican_hat(), &ScaleGrid::geometric(2.0, -3, 3).unwrap()).unwrap();
        assert_eq!(w.max_abs(), 0.0);
    }

    #[test]
    fn disjoint_spectral_supports_annihilate() {
        // f_hat on [1,2], psi_hat on [-2,-1]: the computational heart of the
        // uniqueness proposition
        let grid = UniformGrid::centered(32.0, 4096).unwrap();
        let f = make_test_function((1.0, 2.0), false, &grid).unwrap();
        let psi_pos = make_test_function((1.0, 2.0), false, &grid).unwrap();
        let conj_vals: Vec<Complex64> = psi_pos.values().iter().map(|v| v.conj()).collect();
        let psi = WaveletSpec::from_samples(SampledSignal::new(grid, conj_vals).unwrap()).unwrap();

        let scales = ScaleGrid::geometric_pow2(1, 8, -32, 32).unwrap();
        let w = cwt(&f, &psi, &scales).unwrap();
        let psi_norm = psi.sample().unwrap().energy().sqrt();
        let f_norm = f.energy().sqrt();
        assert!(w.max_abs() <= 1e-10 * f_norm * psi_norm, "max {:e}", w.max_abs());
    }

    #[test]
    fn cwt_agrees_with_quadrature_oracle_across_zoo() {
        // windows sized so wavelet tails (and their periodization) fall
        // below the probe tolerance; haar goes through the cached-FFT
        // spectrum whose rectangle-rule error on a discontinuous waveform
        // is O(omega dx), hence its looser tolerance
        let wide = WaveletSpec::from_samples(
            SampledSignal::from_fn(UniformGrid::centered(256.0, 1 << 15).unwrap(), |x| {
                (1.0 - x * x) * (-0.5 * x * x).exp()
            })
            .unwrap(),
        )
        .unwrap();
        let cases: Vec<(WaveletSpec, f64, usize, f64)> = vec![
            (WaveletSpec::gaussian(), 32.0, 4096, 1e-6),
            (WaveletSpec::gaussian_derivative(1).unwrap(), 32.0, 4096, 1e-6),
            (WaveletSpec::mexican_hat(), 32.0, 4096, 1e-6),
            (wide, 32.0, 4096, 1e-6),
            (WaveletSpec::poisson(), 2048.0, 1 << 17, 1e-6),
            (WaveletSpec::poisson_derivative(), 2048.0, 1 << 17, 1e-6),
        ];
        let scale_values = [0.5, 1.0, 2.0, 4.0];
        for (psi, half_width, n, tol) in cases {
            let grid = UniformGrid::centered(half_width, n).unwrap();
            let f = make_test_function((0.5, 1.5), true, &grid).unwrap();
            let scales = ScaleGrid::explicit(scale_values.to_vec()).unwrap();
            let w = cwt(&f, &psi, &scales).unwrap();
            for (i, &s) in scale_values.iter().enumerate() {
                for q in 0..4 {
                    let k = n / 2 + (q * n) / 23;
                    let t = w.translations().point(k);
                    let oracle = cwt_single(&f, &psi, s, t).unwrap();
                    let dev = (w.at(i, k) - oracle).norm();
                    assert!(dev <= tol, "{:?} s={s} t={t}: {dev:e} > {tol:e}", psi.kind());
                }
            }
        }

        // haar goes through the cached-FFT spectrum, which is first-order in
        // the cache spacing on a discontinuous waveform; the exact piecewise
        // Gauss-Legendre pairing of an analytic signal is the oracle here
        let haar = WaveletSpec::haar();
        let f_analytic = |x: f64| (-x * x / 8.0).exp() * (2.0 * std::f64::consts::PI * x).cos();
        let grid = UniformGrid::centered(32.0, 8192).unwrap();
        let f = SampledSignal::from_fn(grid, f_analytic).unwrap();
        let scales = ScaleGrid::explicit(scale_values.to_vec()).unwrap();
        let w = cwt(&f, &haar, &scales).unwrap();
        for (i, &s) in scale_values.iter().enumerate() {
            for q in 0..4 {
                let k = 8192 / 2 + (q * 8192) / 23;
                let t = w.translations().point(k);
                let oracle = cwt_single_fn(f_analytic, 0, &haar, s, t).unwrap();
                let dev = (w.at(i, k) - oracle).norm();
                assert!(dev <= 5e-3, "Haar s={s} t={t}: {dev:e}");
            }
        }
    }

    #[test]
    fn gaussian_self_pairing() {
        // <psi, psi_{1,0}> = int e^{-2 pi x^2} dx = 1/sqrt(2)
        let psi = WaveletSpec::gaussian();
        let v = cwt_single_fn(|x| (-std::f64::consts::PI * x * x).exp(), 0, &psi, 1.0, 0.0).unwrap();
        assert_relative_eq!(v.re, 0.5f64.sqrt(), max_relative = 1e-10);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn linear_signal_against_haar() {
        // int_0^{1/2} x dx - int_{1/2}^1 x dx = -1/4
        let v = cwt_single_fn(|x| x, 0, &WaveletSpec::haar(), 1.0, 0.0).unwrap();
        assert_relative_eq!(v.re, -0.25, epsilon = 1e-14);
    }

    #[test]
    fn growth_decay_mismatch_rejected() {
        let psi = WaveletSpec::poisson();
        assert!(cwt_single_fn(|x| x, 1, &psi, 1.0, 0.0).is_err());
    }

    #[test]
    fn interchangeability_identity() {
        // <f, psi_{s,t}> = <f_{1/s, -t/s}, psi>
        let psi = WaveletSpec::gaussian();
        let f = |x: f64| (-std::f64::consts::PI * x * x).exp();
        for (s, t) in [(2.0, 0.3), (0.7, -1.1), (1.5, 0.0), (3.0, 2.0)] {
            let lhs = cwt_single_fn(f, 0, &psi, s, t).unwrap();
            let g = move |x: f64| s.sqrt() * f(s * x + t);
            let rhs = cwt_single_fn(g, 0, &psi, 1.0, 0.0).unwrap();
            assert!((lhs - rhs).norm() <= 1e-8, "(s,t)=({s},{t})");
        }
    }

    #[test]
    fn cwt_rows_match_spectral_identity() {
        let f = gaussian_signal();
        let psi = WaveletSpec::mexican_hat();
        let scales = ScaleGrid::geometric(2.0, -2, 2).unwrap();
        let w = cwt(&f, &psi, &scales).unwrap();
        let spec = forward_ft(&f);
        for (i, &s) in scales.scales().iter().enumerate() {
            let filtered: Vec<Complex64> = (0..spec.grid().n())
                .map(|m| {
                    let omega = spec.grid().frequency(m);
                    spec.values()[m] * psi.eval_spectrum(s * omega).conj() * s.sqrt()
                })
                .collect();
            let row = inverse_ft(
                &crate::spectral::SpectralSignal::new(spec.grid().clone(), filtered).unwrap(),
                f.grid(),
            )
            .unwrap();
            for (k, v) in row.values().iter().enumerate() {
                assert!((v - w.at(i, k)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn underflowed_scale_rows_are_flagged_zeros() {
        // mexican hat has psi_hat(0) = 0 exactly, so at an extreme scale the
        // filter underflows at every grid frequency
        let f = gaussian_signal();
        let psi = WaveletSpec::mexican_hat();
        let scales = ScaleGrid::explicit(vec![1.0, (2.0f64).powi(40)]).unwrap();
        let w = cwt(&f, &psi, &scales).unwrap();
        assert_eq!(w.underflow_rows(), &[false, true]);
        assert!(w.row(1).iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn plancherel_energy_basics() {
        let f = gaussian_signal();
        let psi = WaveletSpec::mexican_hat();
        let scales = ScaleGrid::geometric_pow2(1, 8, -8, 8).unwrap();
        let w = cwt(&f, &psi, &scales).unwrap();
        let e = plancherel_energy(&w).unwrap();
        assert!(e > 0.0);

        // homogeneity: scaling the signal by alpha scales the energy by alpha^2
        let f2 = SampledSignal::new(
            f.grid().clone(),
            f.values().iter().map(|v| v * 3.0).collect(),
        )
        .unwrap();
        let w2 = cwt(&f2, &psi, &scales).unwrap();
        let e2 = plancherel_energy(&w2).unwrap();
        assert_relative_eq!(e2, 9.0 * e, max_relative = 1e-12);

        // zero scalogram
        let z = SampledSignal::from_real(f.grid().clone(), vec![0.0; f.grid().n()]).unwrap();
        let wz = cwt(&z, &psi, &scales).unwrap();
        assert_eq!(plancherel_energy(&wz).unwrap(), 0.0);

        // explicit grids have no ds/s^2 quadrature weights
        let we = cwt(&f, &psi, &ScaleGrid::explicit(vec![1.0, 2.0]).unwrap()).unwrap();
        assert!(plancherel_energy(&we).is_err());
    }

    #[test]
    fn signal_energy_examples() {
        let f = gaussian_signal();
        assert_relative_eq!(signal_energy(&f), 0.5f64.sqrt(), max_relative = 1e-10);
        let spec = forward_ft(&f);
        assert_relative_eq!(signal_energy(&f), spec.energy(), max_relative = 1e-10);
        let z = SampledSignal::from_real(f.grid().clone(), vec![0.0; 1024]).unwrap();
        assert_eq!(signal_energy(&z), 0.0);
    }

    #[test]
    fn cwt_is_deterministic() {
        let f = gaussian_signal();
        let psi = WaveletSpec::mexican_hat();
        let scales = ScaleGrid::geometric_pow2(1, 4, -8, 8).unwrap();
        let a = cwt(&f, &psi, &scales).unwrap();
        let b = cwt(&f, &psi, &scales).unwrap();
        assert_eq!(a.coeffs().len(), b.coeffs().len());
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!(x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
        }
    }
}
