//! Wavelet moments `M_ell = int x^ell psi(x) dx`, vanishing-moment order,
//! exact polynomial pairings through the binomial expansion
//! `<f, psi_{s,t}> = sqrt(s) sum_ell c_ell sum_i C(ell,i) t^(ell-i) s^i conj(M_i)`,
//! and recovery of the moments from pairing samples.

use num_complex::Complex64;

use crate::error::{CwtError, Result};
use crate::quadrature::integrate_symmetric;
use crate::wavelets::{Decay, WaveletKind, WaveletSpec};

/// `f(x) = sum c_ell x^ell`, stored with trailing zeros trimmed so the
/// leading coefficient is nonzero unless the polynomial is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSignal {
    coeffs: Vec<f64>,
}

impl PolynomialSignal {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(CwtError::validation("polynomial coefficients must be finite"));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Ok(PolynomialSignal { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Moments `M_0..M_L` with per-entry quadrature error bounds.
#[derive(Debug, Clone)]
pub struct MomentVector {
    values: Vec<Complex64>,
    tolerances: Vec<f64>,
}

impl MomentVector {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, ell: usize) -> Complex64 {
        self.values[ell]
    }

    pub fn tolerance(&self, ell: usize) -> f64 {
        self.tolerances[ell]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn check_decay(psi: &WaveletSpec, ell: u32) -> Result<()> {
    if !psi.decay().covers_order(ell) {
        let p = match psi.decay() {
            Decay::Polynomial(p) => p,
            Decay::Rapid => unreachable!(),
        };
        return Err(CwtError::validation(format!(
            "moment of order {ell} needs decay >= {}, wavelet only has (1+|x|)^-{p}",
            ell + 2
        )));
    }
    Ok(())
}

/// `int x^ell psi(x) dx` with a documented tail bound, returned as
/// `(value, tolerance)`.
///
/// Haar integrates exactly (piecewise polynomial); rapid-decay kinds use
/// unit Gauss-Legendre panels on a truncated domain; polynomial-decay kinds
/// use geometric panels out to `2^20` with the analytic tail estimate.
pub fn moment(psi: &WaveletSpec, ell: u32) -> Result<(Complex64, f64)> {
    check_decay(psi, ell)?;
    let e = ell as i32;
    match psi.kind() {
        WaveletKind::Haar => {
            // int_0^(1/2) x^l - int_(1/2)^1 x^l = ((1/2)^l - 1)/(l + 1)
            let v = ((0.5f64).powi(e) - 1.0) / (ell as f64 + 1.0);
            Ok((Complex64::new(v, 0.0), 1e-15))
        }
        WaveletKind::Sampled => {
            let sample = psi.sample().expect("sampled kind");
            let grid = sample.grid();
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in sample.values().iter().enumerate() {
                acc += v * grid.point(k).powi(e);
            }
            let v = acc * grid.dx();
            // rectangle rule on the sample grid; O(dx^2) heuristic bound
            let tol = grid.dx() * grid.dx() * v.norm().max(1.0);
            Ok((v, tol))
        }
        WaveletKind::Poisson | WaveletKind::PoissonDerivative => {
            let r_max = (1u64 << 20) as f64;
            let v = crate::quadrature::integrate_geometric(1.0, r_max, |x| {
                x.powi(e) * psi.eval_time(x).re
            });
            // |psi| <= C (1+|x|)^-p with p >= ell + 2, so the tail beyond
            // r_max is at most 2 C r_max^(ell - p + 1) / (p - ell - 1)
            let (c_tail, p) = match psi.kind() {
                WaveletKind::Poisson => (1.0 / std::f64::consts::PI, 2.0),
                _ => (2.0 / std::f64::consts::PI, 3.0),
            };
            let tol = 2.0 * c_tail * r_max.powf(ell as f64 - p + 1.0) / (p - ell as f64 - 1.0)
                + 1e-14 * v.abs().max(1.0);
            Ok((Complex64::new(v, 0.0), tol))
        }
        _ => {
            let radius = psi.envelope_radius().unwrap_or(16.0) + ell as f64;
            let v = integrate_symmetric(radius, |x| x.powi(e) * psi.eval_time(x).re);
            Ok((Complex64::new(v, 0.0), 1e-12 * v.abs().max(1.0)))
        }
    }
}

pub fn moment_vector(psi: &WaveletSpec, order: u32) -> Result<MomentVector> {
    let mut values = Vec::with_capacity(order as usize + 1);
    let mut tolerances = Vec::with_capacity(order as usize + 1);
    for ell in 0..=order {
        let (v, tol) = moment(psi, ell)?;
        values.push(v);
        tolerances.push(tol);
    }
    Ok(MomentVector { values, tolerances })
}

/// Smallest `ell <= l_max` with `|M_ell| > tol`, or `l_max + 1` when all
/// computed moments vanish.
pub fn vanishing_moment_order(psi: &WaveletSpec, tol: f64, l_max: u32) -> Result<u32> {
    if !(tol > 0.0) {
        return Err(CwtError::validation("tolerance must be positive"));
    }
    for ell in 0..=l_max {
        let (v, _) = moment(psi, ell)?;
        if v.norm() > tol {
            return Ok(ell);
        }
    }
    Ok(l_max + 1)
}

/// Exact pairing of a polynomial signal against `psi_{s,t}` through the
/// binomial expansion of `f(s y + t)`.
pub fn polynomial_pairing(f: &PolynomialSignal, psi: &WaveletSpec, s: f64, t: f64) -> Result<Complex64> {
    if !(s > 0.0) {
        return Err(CwtError::validation("scale must be positive"));
    }
    let m = match f.degree() {
        Some(m) => m,
        None => return Ok(Complex64::new(0.0, 0.0)),
    };
    let moments = moment_vector(psi, m as u32)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (ell, &c) in f.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for i in 0..=ell {
            inner += moments.value(i).conj()
                * (binomial(ell, i) * t.powi((ell - i) as i32) * s.powi(i as i32));
        }
        acc += inner * c;
    }
    Ok(acc * s.sqrt())
}

#[derive(Debug, Clone)]
pub struct MomentRecovery {
    pub moments: MomentVector,
    /// Largest fit residual over the supplied samples.
    pub max_residual: f64,
    /// Set when the sample placement left the polynomial fit ill-conditioned.
    pub condition_warning: bool,
}

/// Recover `M_0..M_m` from samples of `t -> <f, psi_{s,t}>` at fixed `s`.
///
/// A degree-`m` polynomial in `t` is fitted through the samples; its leading
/// coefficient involves only `conj(M_0) c_m`, the next brings in `M_1`, and so
/// on, so the triangular system solves for the moments top-down. Zero
/// pairings therefore recover identically zero moments.
pub fn moment_recovery(
    samples: &[(f64, Complex64)],
    f: &PolynomialSignal,
    s: f64,
) -> Result<MomentRecovery> {
    if !(s > 0.0) {
        return Err(CwtError::validation("scale must be positive"));
    }
    let m = f.degree().ok_or(CwtError::DegenerateLeadingCoefficient)?;
    let c = f.coeffs();
    if samples.len() < m + 1 {
        return Err(CwtError::validation(format!(
            "need at least {} samples for degree {m}, got {}",
            m + 1,
            samples.len()
        )));
    }
    for (i, (ti, _)) in samples.iter().enumerate() {
        if !ti.is_finite() {
            return Err(CwtError::validation("sample abscissae must be finite"));
        }
        for (tj, _) in &samples[..i] {
            if ti == tj {
                return Err(CwtError::validation(format!("duplicate sample abscissa t = {ti}")));
            }
        }
    }

    // least-squares Vandermonde fit (normal equations; degrees here are small)
    let cols = m + 1;
    let mut ata = vec![0.0f64; cols * cols];
    let mut aty = vec![Complex64::new(0.0, 0.0); cols];
    for &(t, y) in samples {
        let mut pow = vec![0.0f64; cols];
        let mut p = 1.0;
        for entry in pow.iter_mut() {
            *entry = p;
            p *= t;
        }
        for i in 0..cols {
            for j in 0..cols {
                ata[i * cols + j] += pow[i] * pow[j];
            }
            aty[i] += y * pow[i];
        }
    }
    let (poly, condition_warning) = solve_normal(&mut ata, &mut aty, cols)?;

    let max_residual = samples
        .iter()
        .map(|&(t, y)| {
            let mut fit = Complex64::new(0.0, 0.0);
            let mut p = 1.0;
            for coeff in &poly {
                fit += coeff * p;
                p *= t;
            }
            (fit - y).norm()
        })
        .fold(0.0, f64::max);

    // pairing(t) = sqrt(s) sum_p A_p t^p with
    // A_p = sum_{ell >= p} c_ell C(ell, p) s^(ell - p) conj(M_(ell - p))
    let sqrt_s = s.sqrt();
    let a: Vec<Complex64> = poly.iter().map(|v| v / sqrt_s).collect();
    let c_m = c[m];
    let mut conj_m = vec![Complex64::new(0.0, 0.0); m + 1];
    let mut tol = vec![0.0f64; m + 1];
    let res_a = max_residual / sqrt_s;
    for k in 0..=m {
        // coefficient A_(m-k) = sum_{i=0}^{k} c_(m-k+i) C(m-k+i, i) s^i conj(M_i)
        let mut rhs = a[m - k];
        let mut err = res_a;
        for i in 0..k {
            let coef = c[m - k + i] * binomial(m - k + i, i) * s.powi(i as i32);
            rhs -= conj_m[i] * coef;
            err += tol[i] * coef.abs();
        }
        let lead = c_m * binomial(m, k) * s.powi(k as i32);
        conj_m[k] = rhs / lead;
        tol[k] = err / lead.abs();
    }
    let values: Vec<Complex64> = conj_m.iter().map(|v| v.conj()).collect();
    Ok(MomentRecovery {
        moments: MomentVector { values, tolerances: tol },
        max_residual,
        condition_warning,
    })
}

/// Gaussian elimination with partial pivoting on the (real, symmetric
/// positive semi-definite) normal matrix with a complex right-hand side.
/// Returns the solution and an ill-conditioning flag from the pivot spread.
fn solve_normal(ata: &mut [f64], aty: &mut [Complex64], n: usize) -> Result<(Vec<Complex64>, bool)> {
    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, ata[r * n + col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot == 0.0 {
            return Err(CwtError::validation("polynomial fit is singular"));
        }
        max_pivot = max_pivot.max(pivot);
        min_pivot = min_pivot.min(pivot);
        if pivot_row != col {
            for j in 0..n {
                ata.swap(col * n + j, pivot_row * n + j);
            }
            aty.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let factor = ata[r * n + col] / ata[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                ata[r * n + j] -= factor * ata[col * n + j];
            }
            let sub = aty[col] * factor;
            aty[r] -= sub;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for col in (0..n).rev() {
        let mut acc = aty[col];
        for j in (col + 1)..n {
            acc -= x[j] * ata[col * n + j];
        }
        x[col] = acc / ata[col * n + col];
    }
    Ok((x, min_pivot < 1e-12 * max_pivot))
}

/// Quadrature oracle for the haar moment, kept independent of [`moment`]'s
/// closed form: Gauss-Legendre on each support half.
#[cfg(test)]
fn haar_moment_oracle(ell: u32) -> f64 {
    use crate::quadrature::gl32;
    let e = ell as i32;
    gl32(0.0, 0.5, |x| x.powi(e)) - gl32(0.5, 1.0, |x| x.powi(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::cwt_single_fn;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_normalization() {
        let p = PolynomialSignal::new(vec![1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 2.0]);
        assert_eq!(p.degree(), Some(1));
        let z = PolynomialSignal::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn mexican_hat_moments() {
        let psi = WaveletSpec::mexican_hat();
        let (m0, _) = moment(&psi, 0).unwrap();
        let (m1, _) = moment(&psi, 1).unwrap();
        let (m2, _) = moment(&psi, 2).unwrap();
        assert!(m0.norm() <= 1e-10, "M0 = {m0}");
        assert!(m1.norm() <= 1e-10, "M1 = {m1}");
        let expected = -2.0 * (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(m2.re, expected, epsilon = 1e-6);
    }

    #[test]
    fn haar_moments_match_oracle() {
        let psi = WaveletSpec::haar();
        for ell in 0..6 {
            let (v, _) = moment(&psi, ell).unwrap();
            assert_relative_eq!(v.re, haar_moment_oracle(ell), epsilon = 1e-15);
        }
        let (m1, _) = moment(&psi, 1).unwrap();
        assert_relative_eq!(m1.re, -0.25, epsilon = 1e-15);
    }

    #[test]
    fn poisson_decay_preconditions() {
        // (1+|x|)^-2 envelope integrates only the zeroth moment
        let poisson = WaveletSpec::poisson();
        let (m0, tol) = moment(&poisson, 0).unwrap();
        assert!((m0.re - 1.0).abs() <= tol + 1e-6);
        assert!(moment(&poisson, 1).is_err());
        // first derivative decays one order faster
        let pd = WaveletSpec::poisson_derivative();
        let (m0d, _) = moment(&pd, 0).unwrap();
        assert!(m0d.norm() <= 1e-10);
        let (m1d, told) = moment(&pd, 1).unwrap();
        assert!((m1d.re + 1.0).abs() <= told + 1e-4, "M1 = {m1d}, tol {told:e}");
        assert!(moment(&pd, 2).is_err());
    }

    #[test]
    fn vanishing_orders_across_zoo() {
        assert_eq!(vanishing_moment_order(&WaveletSpec::mexican_hat(), 1e-8, 4).unwrap(), 2);
        assert_eq!(vanishing_moment_order(&WaveletSpec::haar(), 1e-8, 4).unwrap(), 1);
        assert_eq!(vanishing_moment_order(&WaveletSpec::gaussian(), 1e-8, 4).unwrap(), 0);
    }

    #[test]
    fn pairing_annihilated_by_vanishing_moments() {
        // f(x) = x against the mexican hat: sqrt(s) (s M_1 + t M_0) = 0
        let f = PolynomialSignal::new(vec![0.0, 1.0]).unwrap();
        let psi = WaveletSpec::mexican_hat();
        for (s, t) in [(0.5, -1.0), (1.0, 0.0), (2.0, 1.0), (4.0, 0.3)] {
            let v = polynomial_pairing(&f, &psi, s, t).unwrap();
            assert!(v.norm() <= 1e-9, "pairing {v} at ({s},{t})");
        }
    }

    #[test]
    fn constant_against_zero_mean_wavelets() {
        let f = PolynomialSignal::new(vec![3.0]).unwrap();
        for psi in [WaveletSpec::mexican_hat(), WaveletSpec::haar()] {
            let v = polynomial_pairing(&f, &psi, 1.3, -0.4).unwrap();
            assert!(v.norm() <= 1e-9);
        }
    }

    #[test]
    fn pairing_matches_quadrature() {
        let haar = WaveletSpec::haar();
        let mh = WaveletSpec::mexican_hat();
        for degree in 0..=3usize {
            let mut coeffs = vec![0.0; degree + 1];
            coeffs[degree] = 1.0;
            if degree >= 1 {
                coeffs[0] = 0.5;
            }
            let f = PolynomialSignal::new(coeffs).unwrap();
            for &s in &[0.5, 1.0, 2.0] {
                for &t in &[-1.0, 0.0, 1.0] {
                    for psi in [&haar, &mh] {
                        let exact = polynomial_pairing(&f, psi, s, t).unwrap();
                        let quad =
                            cwt_single_fn(|x| f.eval(x), degree as u32, psi, s, t).unwrap();
                        assert!(
                            (exact - quad).norm() <= 1e-6,
                            "{:?} deg {degree} (s,t)=({s},{t}): {:e}",
                            psi.kind(),
                            (exact - quad).norm()
                        );
                    }
                }
            }
        }
        // closed-form check: f(x) = x against haar at (1, 0)
        let f = PolynomialSignal::new(vec![0.0, 1.0]).unwrap();
        let v = polynomial_pairing(&f, &haar, 1.0, 0.0).unwrap();
        assert_relative_eq!(v.re, -0.25, epsilon = 1e-8);
    }

    #[test]
    fn pairing_homogeneity_in_scale() {
        // monomial x^ell with all lower moments zero scales as s^(ell + 1/2)
        let f = PolynomialSignal::new(vec![0.0, 1.0]).unwrap(); // x, haar has M_0 = 0
        let psi = WaveletSpec::haar();
        let v1 = polynomial_pairing(&f, &psi, 1.0, 0.0).unwrap();
        let v2 = polynomial_pairing(&f, &psi, 2.0, 0.0).unwrap();
        let ratio = v2.norm() / v1.norm();
        assert_relative_eq!(ratio, (2.0f64).powf(1.5), max_relative = 1e-10);
    }

    #[test]
    fn zero_pairing_recovers_zero_moments() {
        let f = PolynomialSignal::new(vec![0.0, 0.0, 1.0]).unwrap();
        let samples: Vec<(f64, Complex64)> =
            [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&t| (t, Complex64::new(0.0, 0.0))).collect();
        let rec = moment_recovery(&samples, &f, 1.0).unwrap();
        for ell in 0..=2 {
            assert_eq!(rec.moments.value(ell).norm(), 0.0);
        }
        assert!(!rec.condition_warning);
    }

    #[test]
    fn recovery_round_trip_haar() {
        let f = PolynomialSignal::new(vec![0.0, 1.0]).unwrap();
        let psi = WaveletSpec::haar();
        let ts = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let samples: Vec<(f64, Complex64)> = ts
            .iter()
            .map(|&t| (t, polynomial_pairing(&f, &psi, 1.0, t).unwrap()))
            .collect();
        let rec = moment_recovery(&samples, &f, 1.0).unwrap();
        assert!(rec.moments.value(0).norm() <= 1e-8);
        assert_relative_eq!(rec.moments.value(1).re, -0.25, epsilon = 1e-8);
        assert!(rec.max_residual <= 1e-10);
    }

    #[test]
    fn recovery_rejects_zero_polynomial() {
        let f = PolynomialSignal::new(vec![0.0]).unwrap();
        let samples = [(0.0, Complex64::new(0.0, 0.0)), (1.0, Complex64::new(0.0, 0.0))];
        match moment_recovery(&samples, &f, 1.0) {
            Err(CwtError::DegenerateLeadingCoefficient) => {}
            other => panic!("expected DegenerateLeadingCoefficient, got {other:?}"),
        }
    }

    #[test]
    fn recovery_rejects_bad_samples() {
        let f = PolynomialSignal::new(vec![0.0, 1.0]).unwrap();
        let dup = [(1.0, Complex64::new(0.0, 0.0)), (1.0, Complex64::new(0.0, 0.0))];
        assert!(moment_recovery(&dup, &f, 1.0).is_err());
        let few = [(1.0, Complex64::new(0.0, 0.0))];
        assert!(moment_recovery(&few, &f, 1.0).is_err());
    }

    #[test]
    fn forward_backward_consistency_zoo() {
        // recovery composed with the forward pairing reproduces the moment
        // vector for degrees up to 4
        for psi in [WaveletSpec::mexican_hat(), WaveletSpec::haar(), WaveletSpec::gaussian()] {
            for m in 1..=4usize {
                let mut coeffs = vec![0.1; m + 1];
                coeffs[m] = 1.0;
                let f = PolynomialSignal::new(coeffs).unwrap();
                let s = 1.5;
                let samples: Vec<(f64, Complex64)> = (0..=m + 2)
                    .map(|q| {
                        let t = -1.5 + q as f64 * 0.75;
                        (t, polynomial_pairing(&f, &psi, s, t).unwrap())
                    })
                    .collect();
                let rec = moment_recovery(&samples, &f, s).unwrap();
                let reference = moment_vector(&psi, m as u32).unwrap();
                for ell in 0..=m {
                    let dev = (rec.moments.value(ell) - reference.value(ell)).norm();
                    let scale = reference.value(ell).norm().max(1.0);
                    assert!(
                        dev <= 1e-8 * scale,
                        "{:?} m={m} ell={ell}: dev {dev:e}",
                        psi.kind()
                    );
                }
            }
        }
    }

    #[test]
    fn annihilation_equivalence() {
        // pairing vanishes on a (s,t) grid iff all moments up to the degree
        // vanish; haar (M_1 != 0) must produce a nonzero pairing for f = x
        let f = PolynomialSignal::new(vec![0.0, 1.0]).unwrap();
        let ss = [0.5, 1.0, 1.5, 2.0, 3.0];
        let ts = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let max_haar = ss
            .iter()
            .flat_map(|&s| ts.iter().map(move |&t| (s, t)))
            .map(|(s, t)| polynomial_pairing(&f, &WaveletSpec::haar(), s, t).unwrap().norm())
            .fold(0.0, f64::max);
        assert!(max_haar > 1e-3);
        let max_mh = ss
            .iter()
            .flat_map(|&s| ts.iter().map(move |&t| (s, t)))
            .map(|(s, t)| polynomial_pairing(&f, &WaveletSpec::mexican_hat(), s, t).unwrap().norm())
            .fold(0.0, f64::max);
        assert!(max_mh <= 1e-8);
    }
}
