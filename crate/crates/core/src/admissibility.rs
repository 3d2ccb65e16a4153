//! Directional nontriviality (Tauberian) checks, the Calderón admissibility
//! constant, and the per-side uniqueness certificate, specialized to one
//! dimension where the unit sphere is the two sides of the origin.

use crate::error::Result;
use crate::spectral::{forward_ft, SampledSignal, SpectralSignal};
use crate::wavelets::WaveletSpec;

/// One of the two directions on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Positive, Side::Negative];

    pub fn sign(&self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Side::Positive => "positive",
            Side::Negative => "negative",
        }
    }
}

/// Log-spaced radial scan grid used by the threshold checks and the Calderón
/// quadrature. Defaults: `[2^-20, 2^20]` at 64 points per octave.
#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub log2_min: i32,
    pub log2_max: i32,
    pub points_per_octave: u32,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { log2_min: -20, log2_max: 20, points_per_octave: 64 }
    }
}

impl ScanConfig {
    pub fn n_points(&self) -> usize {
        ((self.log2_max - self.log2_min) as usize) * self.points_per_octave as usize + 1
    }

    pub fn radius(&self, i: usize) -> f64 {
        (2.0f64).powf(self.log2_min as f64 + i as f64 / self.points_per_octave as f64)
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points()).map(move |i| self.radius(i))
    }

    /// Default relative Tauberian threshold: `1e-9 * sup |psi_hat|`.
    pub fn default_tau(&self, psi: &WaveletSpec) -> f64 {
        1e-9 * psi.spectrum_sup()
    }
}

/// Scan `|psi_hat(sign * r)|` and report whether it exceeds `tau` anywhere,
/// together with a Lebesgue-measure estimate of `{r > 0 : |psi_hat| > tau}`
/// (sum of the widths of the scan cells that exceed the threshold).
pub fn tauberian_check(psi: &WaveletSpec, side: Side, tau: f64, scan: &ScanConfig) -> (bool, f64) {
    assert!(tau > 0.0, "tauberian threshold must be positive");
    let n = scan.n_points();
    let mut measure = 0.0;
    for i in 0..n.saturating_sub(1) {
        let r = scan.radius(i);
        if psi.eval_spectrum(side.sign() * r).norm() > tau {
            measure += scan.radius(i + 1) - r;
        }
    }
    (measure > 0.0, measure)
}

/// Result of the Calderón admissibility integral on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Calderon {
    Finite(f64),
    Divergent,
}

impl Calderon {
    pub fn value(&self) -> Option<f64> {
        match self {
            Calderon::Finite(v) => Some(*v),
            Calderon::Divergent => None,
        }
    }
}

/// Fraction of the running total below which the boundary-decade
/// contribution must fall for the integral to count as convergent.
const CAUCHY_DECADE_FRACTION: f64 = 1e-8;

/// Log-grid quadrature of `int_0^inf |psi_hat(sign * s)|^2 ds/s`.
///
/// Divergence is detected by per-decade Cauchy monitoring: if the decade at
/// either end of the scan still contributes more than `1e-8` of the running
/// total, the tail has not died out (e.g. `psi_hat(0) != 0` forces a `1/s`
/// integrand near the origin) and `Divergent` is returned.
pub fn calderon_constant(psi: &WaveletSpec, side: Side, scan: &ScanConfig) -> Calderon {
    let n = scan.n_points();
    let h = std::f64::consts::LN_2 / scan.points_per_octave as f64;
    let mut total = 0.0;
    let mut decade_sums: Vec<(i32, f64)> = Vec::new();
    for i in 0..n {
        let r = scan.radius(i);
        let mut term = psi.eval_spectrum(side.sign() * r).norm_sqr() * h;
        if i == 0 || i == n - 1 {
            term *= 0.5;
        }
        total += term;
        let decade = r.log10().floor() as i32;
        match decade_sums.last_mut() {
            Some((d, sum)) if *d == decade => *sum += term,
            _ => decade_sums.push((decade, term)),
        }
    }
    if total == 0.0 {
        return Calderon::Finite(0.0);
    }
    let first = decade_sums.first().map(|(_, s)| *s).unwrap_or(0.0);
    let last = decade_sums.last().map(|(_, s)| *s).unwrap_or(0.0);
    if first > CAUCHY_DECADE_FRACTION * total || last > CAUCHY_DECADE_FRACTION * total {
        return Calderon::Divergent;
    }
    Calderon::Finite(total)
}

/// `sum |g_hat(omega)|^2 d_omega` over the grid frequencies of the given sign
/// (the `d = 1` specialization of the radial energy factor).
pub fn directional_energy(spectrum: &SpectralSignal, side: Side) -> f64 {
    let g = spectrum.grid();
    let mut acc = 0.0;
    for (i, v) in spectrum.values().iter().enumerate() {
        let omega = g.frequency(i);
        if omega != 0.0 && omega.signum() == side.sign() {
            acc += v.norm_sqr();
        }
    }
    acc * g.d_omega()
}

/// One side of the uniqueness certificate: the two energy factors and their
/// product.
#[derive(Debug, Clone, Copy)]
pub struct SideCertificate {
    pub side: Side,
    pub signal_energy: f64,
    pub wavelet_energy: f64,
    pub product: f64,
}

/// The per-side energy products of the uniqueness identity.
///
/// When the transform of `f` against `psi` vanishes, both products must
/// vanish; when the wavelet factors are positive on both sides, vanishing
/// products force the signal factors (and hence `f`) to vanish.
#[derive(Debug, Clone)]
pub struct UniquenessCertificate {
    pub sides: [SideCertificate; 2],
}

pub fn uniqueness_certificate(f: &SampledSignal, psi: &WaveletSpec) -> UniquenessCertificate {
    let f_spec = forward_ft(f);
    let psi_spec = forward_ft(&psi.canonical_sample());
    let make = |side: Side| {
        let se = directional_energy(&f_spec, side);
        let we = directional_energy(&psi_spec, side);
        SideCertificate { side, signal_energy: se, wavelet_energy: we, product: se * we }
    };
    UniquenessCertificate { sides: [make(Side::Positive), make(Side::Negative)] }
}

/// Per-side admissibility summary of a wavelet.
#[derive(Debug, Clone)]
pub struct SideReport {
    pub side: Side,
    pub tauberian: bool,
    pub tauberian_measure: f64,
    pub calderon: Calderon,
    pub directional_energy: f64,
}

#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub tau: f64,
    pub sides: [SideReport; 2],
}

pub fn admissibility_report(
    psi: &WaveletSpec,
    tau: Option<f64>,
    scan: &ScanConfig,
) -> Result<AdmissibilityReport> {
    let tau = match tau {
        Some(t) if t > 0.0 => t,
        Some(t) => {
            return Err(crate::error::CwtError::validation(format!(
                "tau must be positive, got {t}"
            )))
        }
        None => {
            let t = scan.default_tau(psi);
            if t <= 0.0 {
                return Err(crate::error::CwtError::validation(
                    "wavelet spectrum is identically zero; no meaningful threshold exists",
                ));
            }
            t
        }
    };
    let psi_spec = forward_ft(&psi.canonical_sample());
    let make = |side: Side| {
        let (tb, measure) = tauberian_check(psi, side, tau, scan);
        SideReport {
            side,
            tauberian: tb,
            tauberian_measure: measure,
            calderon: calderon_constant(psi, side, scan),
            directional_energy: directional_energy(&psi_spec, side),
        }
    };
    Ok(AdmissibilityReport { tau, sides: [make(Side::Positive), make(Side::Negative)] })
}
