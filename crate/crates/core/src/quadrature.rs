//! Internal quadrature building blocks: Gauss-Legendre panels for smooth
//! integrands and composite rules over linear / geometric panel layouts.

use num_complex::Complex64;

const GL32_NODES: [f64; 32] = [
    -0.9972638618494816,
    -0.9856115115452684,
    -0.9647622555875064,
    -0.9349060759377397,
    -0.8963211557660522,
    -0.84936761373257,
    -0.7944837959679424,
    -0.7321821187402897,
    -0.6630442669302152,
    -0.5877157572407623,
    -0.5068999089322294,
    -0.42135127613063533,
    -0.33186860228212767,
    -0.23928736225213706,
    -0.1444719615827965,
    -0.04830766568773831,
    0.04830766568773831,
    0.1444719615827965,
    0.23928736225213706,
    0.33186860228212767,
    0.42135127613063533,
    0.5068999089322294,
    0.5877157572407623,
    0.6630442669302152,
    0.7321821187402897,
    0.7944837959679424,
    0.84936761373257,
    0.8963211557660522,
    0.9349060759377397,
    0.9647622555875064,
    0.9856115115452684,
    0.9972638618494816,
];

const GL32_WEIGHTS: [f64; 32] = [
    0.007018610009469298,
    0.016274394730905965,
    0.025392065309262427,
    0.034273862913021626,
    0.042835898022226426,
    0.050998059262376244,
    0.058684093478535704,
    0.06582222277636175,
    0.07234579410884845,
    0.07819389578707031,
    0.08331192422694685,
    0.08765209300440391,
    0.09117387869576386,
    0.09384439908080457,
    0.09563872007927483,
    0.09654008851472781,
    0.09654008851472781,
    0.09563872007927483,
    0.09384439908080457,
    0.09117387869576386,
    0.08765209300440391,
    0.08331192422694685,
    0.07819389578707031,
    0.07234579410884845,
    0.06582222277636175,
    0.058684093478535704,
    0.050998059262376244,
    0.042835898022226426,
    0.034273862913021626,
    0.025392065309262427,
    0.016274394730905965,
    0.007018610009469298,
];

/// 32-point Gauss-Legendre rule on `[a, b]`.
pub(crate) fn gl32<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL32_NODES.iter().zip(GL32_WEIGHTS.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

pub(crate) fn gl32_complex<F: Fn(f64) -> Complex64>(a: f64, b: f64, f: F) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in GL32_NODES.iter().zip(GL32_WEIGHTS.iter()) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Composite GL over `[-radius, radius]` with unit-width panels.
///
/// Spectrally accurate for smooth rapidly decaying integrands; the caller is
/// responsible for choosing `radius` beyond which the integrand is negligible.
pub(crate) fn integrate_symmetric<F: Fn(f64) -> f64>(radius: f64, f: F) -> f64 {
    let panels = radius.ceil() as i64;
    let mut acc = 0.0;
    for p in -panels..panels {
        let a = (p as f64).max(-radius);
        let b = ((p + 1) as f64).min(radius);
        if b > a {
            acc += gl32(a, b, &f);
        }
    }
    acc
}

/// Composite GL over `[-r_max, -r_min] u [r_min, r_max]` with geometric
/// panels (factor 2), plus the central panel `[-r_min, r_min]`.
///
/// Suited to integrands with slow polynomial tail decay.
pub(crate) fn integrate_geometric<F: Fn(f64) -> f64>(r_min: f64, r_max: f64, f: F) -> f64 {
    let mut acc = gl32(-r_min, r_min, &f);
    let mut lo = r_min;
    while lo < r_max {
        let hi = (2.0 * lo).min(r_max);
        acc += gl32(lo, hi, &f);
        acc += gl32(-hi, -lo, &f);
        lo = hi;
    }
    acc
}

/// Uniform trapezoid rule on `[a, b]` with `n` intervals, complex values.
pub(crate) fn trapezoid_complex<F: Fn(f64) -> Complex64>(a: f64, b: f64, n: usize, f: F) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut acc = (f(a) + f(b)) * 0.5;
    for k in 1..n {
        acc += f(a + k as f64 * h);
    }
    acc * h
}
