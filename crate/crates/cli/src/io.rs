//! File formats: the `x,value` signal CSV, the binary scalogram layout, the
//! long-form scalogram CSV, and the flag grammars for wavelets, scale grids
//! and bases.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use cwt_core::{SampledSignal, ScaleGrid, Scalogram, UniformGrid, WaveletSpec};

use crate::CliError;

/// Relative spacing jitter tolerated when reconstructing a uniform grid.
const SPACING_RTOL: f64 = 1e-9;

pub const SCALOGRAM_MAGIC: &[u8; 4] = b"CWTS";
pub const SCALOGRAM_VERSION: u32 = 1;

fn parse_float(field: &str, line: usize) -> Result<f64, CliError> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::parse(format!("line {line}: cannot parse '{}' as a number", field.trim())))
}

/// Read a real signal from a two-column `x,value` CSV, validating uniform
/// spacing against the grid implied by the first/last abscissae.
pub fn read_signal_csv(path: &Path) -> Result<SampledSignal, CliError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "x,value" => {}
        Some((_, header)) => {
            return Err(CliError::parse(format!("expected header 'x,value', found '{}'", header.trim())))
        }
        None => return Err(CliError::parse("empty file")),
    }
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (x, v) = match (fields.next(), fields.next(), fields.next()) {
            (Some(x), Some(v), None) => (x, v),
            _ => return Err(CliError::parse(format!("line {}: expected two comma-separated fields", idx + 1))),
        };
        xs.push(parse_float(x, idx + 1)?);
        values.push(parse_float(v, idx + 1)?);
    }
    if xs.len() < 2 {
        return Err(CliError::parse("need at least 2 rows"));
    }
    let n = xs.len();
    let grid = UniformGrid::from_endpoints(xs[0], xs[n - 1], n).map_err(CliError::Core)?;
    for (k, &x) in xs.iter().enumerate() {
        let expected = grid.point(k);
        if (x - expected).abs() > SPACING_RTOL * grid.dx() {
            return Err(CliError::parse(format!(
                "nonuniform spacing at row {}: x = {x}, expected {expected}",
                k + 1
            )));
        }
    }
    SampledSignal::from_real(grid, values).map_err(CliError::Core)
}

/// Wavelet sample CSV: `x,value` for real samples or `x,re,im` for complex.
pub fn read_wavelet_csv(path: &Path) -> Result<SampledSignal, CliError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let complex = match lines.next() {
        Some((_, h)) if h.trim() == "x,value" => false,
        Some((_, h)) if h.trim() == "x,re,im" => true,
        Some((_, h)) => {
            return Err(CliError::parse(format!(
                "expected header 'x,value' or 'x,re,im', found '{}'",
                h.trim()
            )))
        }
        None => return Err(CliError::parse("empty file")),
    };
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected_cols = if complex { 3 } else { 2 };
        if fields.len() != expected_cols {
            return Err(CliError::parse(format!("line {}: expected {expected_cols} fields", idx + 1)));
        }
        xs.push(parse_float(fields[0], idx + 1)?);
        let re = parse_float(fields[1], idx + 1)?;
        let im = if complex { parse_float(fields[2], idx + 1)? } else { 0.0 };
        values.push(Complex64::new(re, im));
    }
    if xs.len() < 2 {
        return Err(CliError::parse("need at least 2 rows"));
    }
    let n = xs.len();
    let grid = UniformGrid::from_endpoints(xs[0], xs[n - 1], n).map_err(CliError::Core)?;
    for (k, &x) in xs.iter().enumerate() {
        if (x - grid.point(k)).abs() > SPACING_RTOL * grid.dx() {
            return Err(CliError::parse(format!("nonuniform spacing at row {}", k + 1)));
        }
    }
    SampledSignal::new(grid, values).map_err(CliError::Core)
}

pub fn write_signal_csv(path: &Path, signal: &SampledSignal) -> Result<(), CliError> {
    let mut out = String::from("x,value\n");
    for (k, v) in signal.values().iter().enumerate() {
        out.push_str(&format!("{:.16e},{:.16e}\n", signal.grid().point(k), v.re));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Raw contents of a binary scalogram file.
pub struct ScalogramFileData {
    pub base_b: f64,
    pub scales: Vec<f64>,
    pub x0: f64,
    pub dx: f64,
    pub n_translations: usize,
    pub coeffs: Vec<Complex64>,
}

/// Binary layout: magic "CWTS", version u32, n_scales u64,
/// n_translations u64, x0 f64, dx f64, base_b f64 (0 when explicit), the
/// scales, then the coefficients row-major as (re, im) pairs. All
/// little-endian; total size 48 + 8 n_s + 16 n_s n_t bytes.
pub fn write_scalogram_file(
    path: &Path,
    base_b: f64,
    scales: &[f64],
    x0: f64,
    dx: f64,
    n_translations: usize,
    coeffs: &[Complex64],
) -> Result<(), CliError> {
    if coeffs.len() != scales.len() * n_translations {
        return Err(CliError::parse("coefficient count does not match dimensions"));
    }
    let mut buf =
        Vec::with_capacity(48 + 8 * scales.len() + 16 * coeffs.len());
    buf.extend_from_slice(SCALOGRAM_MAGIC);
    buf.extend_from_slice(&SCALOGRAM_VERSION.to_le_bytes());
    buf.extend_from_slice(&(scales.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(n_translations as u64).to_le_bytes());
    buf.extend_from_slice(&x0.to_le_bytes());
    buf.extend_from_slice(&dx.to_le_bytes());
    buf.extend_from_slice(&base_b.to_le_bytes());
    for s in scales {
        buf.extend_from_slice(&s.to_le_bytes());
    }
    for c in coeffs {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

pub fn read_scalogram_file(path: &Path) -> Result<ScalogramFileData, CliError> {
    let buf = fs::read(path)?;
    if buf.len() < 48 {
        return Err(CliError::parse("file too short for a scalogram"));
    }
    if &buf[0..4] != SCALOGRAM_MAGIC {
        return Err(CliError::parse("bad magic"));
    }
    let take_u32 = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().unwrap());
    let take_u64 = |o: usize| u64::from_le_bytes(buf[o..o + 8].try_into().unwrap());
    let take_f64 = |o: usize| f64::from_le_bytes(buf[o..o + 8].try_into().unwrap());
    if take_u32(4) != SCALOGRAM_VERSION {
        return Err(CliError::parse(format!("unsupported version {}", take_u32(4))));
    }
    let n_scales = take_u64(8) as usize;
    let n_translations = take_u64(16) as usize;
    let x0 = take_f64(24);
    let dx = take_f64(32);
    let base_b = take_f64(40);
    let expected = 48 + 8 * n_scales + 16 * n_scales * n_translations;
    if buf.len() != expected {
        return Err(CliError::parse(format!("size {} does not match expected {expected}", buf.len())));
    }
    let scales = (0..n_scales).map(|i| take_f64(48 + 8 * i)).collect();
    let base = 48 + 8 * n_scales;
    let coeffs = (0..n_scales * n_translations)
        .map(|i| Complex64::new(take_f64(base + 16 * i), take_f64(base + 16 * i + 8)))
        .collect();
    Ok(ScalogramFileData { base_b, scales, x0, dx, n_translations, coeffs })
}

/// Long-form CSV: one row per coefficient with 17 significant digits, under
/// a `scale_index,scale,t_index,t,re,im` header.
pub fn write_scalogram_csv(path: &Path, w: &Scalogram) -> Result<(), CliError> {
    let mut out = String::from("scale_index,scale,t_index,t,re,im\n");
    for i in 0..w.n_scales() {
        let s = w.scales().scale(i);
        for k in 0..w.n_translations() {
            let c = w.at(i, k);
            out.push_str(&format!(
                "{i},{:.16e},{k},{:.16e},{:.16e},{:.16e}\n",
                s,
                w.translations().point(k),
                c.re,
                c.im
            ));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// One row of the long-form scalogram CSV.
pub struct ScalogramCsvRow {
    pub scale_index: usize,
    pub scale: f64,
    pub t_index: usize,
    pub t: f64,
    pub coeff: Complex64,
}

pub fn read_scalogram_csv(path: &Path) -> Result<Vec<ScalogramCsvRow>, CliError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "scale_index,scale,t_index,t,re,im" => {}
        _ => return Err(CliError::parse("bad scalogram CSV header")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(CliError::parse(format!("line {}: expected 6 fields", idx + 1)));
        }
        rows.push(ScalogramCsvRow {
            scale_index: f[0].trim().parse().map_err(|_| CliError::parse("bad index"))?,
            scale: parse_float(f[1], idx + 1)?,
            t_index: f[2].trim().parse().map_err(|_| CliError::parse("bad index"))?,
            t: parse_float(f[3], idx + 1)?,
            coeff: Complex64::new(parse_float(f[4], idx + 1)?, parse_float(f[5], idx + 1)?),
        });
    }
    Ok(rows)
}

/// Parse a base given either as a float literal or in the exact exponent
/// form `2^p/q` (e.g. `2^1/8`).
pub fn parse_base(text: &str) -> Result<(f64, Option<(i32, u32)>), CliError> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("2^") {
        let (p, q) = match rest.split_once('/') {
            Some((p, q)) => (
                p.parse::<i32>().map_err(|_| CliError::parse(format!("bad exponent in '{t}'")))?,
                q.parse::<u32>().map_err(|_| CliError::parse(format!("bad exponent in '{t}'")))?,
            ),
            None => (rest.parse::<i32>().map_err(|_| CliError::parse(format!("bad exponent in '{t}'")))?, 1),
        };
        if p <= 0 || q == 0 {
            return Err(CliError::parse("base exponent must be positive"));
        }
        Ok(((2.0f64).powf(p as f64 / q as f64), Some((p, q))))
    } else {
        let b = t.parse::<f64>().map_err(|_| CliError::parse(format!("cannot parse base '{t}'")))?;
        if !(b > 1.0) {
            return Err(CliError::parse(format!("base must exceed 1, got {b}")));
        }
        Ok((b, None))
    }
}

/// Scale-grid grammar: `geom:b=<base>,jmin=<int>,jmax=<int>` or
/// `explicit:<s1>,<s2>,...`.
pub fn parse_scale_grid(text: &str) -> Result<ScaleGrid, CliError> {
    let t = text.trim();
    if let Some(body) = t.strip_prefix("geom:") {
        let mut base: Option<&str> = None;
        let mut j_min: Option<i32> = None;
        let mut j_max: Option<i32> = None;
        for part in body.split(',') {
            match part.split_once('=') {
                Some(("b", v)) => base = Some(v),
                Some(("jmin", v)) => {
                    j_min = Some(v.parse().map_err(|_| CliError::parse(format!("bad jmin '{v}'")))?)
                }
                Some(("jmax", v)) => {
                    j_max = Some(v.parse().map_err(|_| CliError::parse(format!("bad jmax '{v}'")))?)
                }
                _ => return Err(CliError::parse(format!("unknown scale-grid field '{part}'"))),
            }
        }
        let (base, j_min, j_max) = match (base, j_min, j_max) {
            (Some(b), Some(lo), Some(hi)) => (b, lo, hi),
            _ => return Err(CliError::parse("geom grid needs b=, jmin=, jmax=")),
        };
        let (value, pow2) = parse_base(base)?;
        match pow2 {
            Some((p, q)) => ScaleGrid::geometric_pow2(p, q, j_min, j_max).map_err(CliError::Core),
            None => ScaleGrid::geometric(value, j_min, j_max).map_err(CliError::Core),
        }
    } else if let Some(body) = t.strip_prefix("explicit:") {
        let scales = body
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::parse(format!("bad scale '{s}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        ScaleGrid::explicit(scales).map_err(CliError::Core)
    } else {
        Err(CliError::parse(format!("scale grid must start with 'geom:' or 'explicit:', got '{t}'")))
    }
}

/// Wavelet grammar: `gaussian`, `gaussian_derivative:<m>`, `mexican` /
/// `mexican_hat`, `poisson`, `poisson_derivative`, `haar`,
/// `sampled:<csv path>`.
pub fn parse_wavelet(text: &str) -> Result<WaveletSpec, CliError> {
    let t = text.trim();
    match t {
        "gaussian" => Ok(WaveletSpec::gaussian()),
        "mexican" | "mexican_hat" => Ok(WaveletSpec::mexican_hat()),
        "poisson" => Ok(WaveletSpec::poisson()),
        "poisson_derivative" => Ok(WaveletSpec::poisson_derivative()),
        "haar" => Ok(WaveletSpec::haar()),
        _ => {
            if let Some(m) = t.strip_prefix("gaussian_derivative:") {
                let order =
                    m.parse::<u32>().map_err(|_| CliError::parse(format!("bad derivative order '{m}'")))?;
                WaveletSpec::gaussian_derivative(order).map_err(CliError::Core)
            } else if let Some(path) = t.strip_prefix("sampled:") {
                let sample = read_wavelet_csv(Path::new(path))?;
                WaveletSpec::from_samples(sample).map_err(CliError::Core)
            } else {
                Err(CliError::parse(format!(
                    "unknown wavelet '{t}' (try 'cwt wavelets list' for the zoo)"
                )))
            }
        }
    }
}
