//! `cwt`: continuous wavelet transforms, admissibility certificates, dual
//! frames and moment analysis from the command line.
//!
//! Exit codes: 0 success, 2 validation/parse, 3 construction failure
//! (TauberianFail, DegenerateDenominator, BandCoverage), 4 I/O.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use cwt_cli::{io, CliError};
use cwt_core::{
    admissibility_report, build_dual, cwt, find_cover_both, make_bump, moment, partition_check,
    reconstruct, uniqueness_certificate, Calderon, CwtError, ReconstructMode, ScaleGrid,
    ScanConfig, WaveletSpec,
};

#[derive(Parser)]
#[command(name = "cwt", version, about = "Continuous wavelet transform toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform a signal CSV into a scalogram (binary or CSV).
    Cwt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        wavelet: String,
        /// geom:b=<base>,jmin=<int>,jmax=<int> or explicit:<s1>,<s2>,...
        #[arg(long, default_value = "geom:b=2^1/8,jmin=-32,jmax=32")]
        scales: String,
        #[arg(long)]
        output: PathBuf,
        /// binary | csv
        #[arg(long, default_value = "binary")]
        format: String,
    },
    /// Per-side Tauberian check, Calderon constant and directional energy.
    Admissibility {
        #[arg(long)]
        wavelet: String,
        /// Absolute threshold; defaults to 1e-9 * sup |psi_hat|.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the dual wavelet and report the partition-of-unity deviation.
    Dual {
        #[arg(long)]
        wavelet: String,
        /// Cover threshold as a fraction of sup |psi_hat|.
        #[arg(long, default_value_t = 0.1)]
        tau_fraction: f64,
        /// Minimal acceptable cover ratio (float or 2^p/q).
        #[arg(long, default_value = "2^1/8")]
        b_min: String,
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
        /// Probe band lo:hi for the partition check.
        #[arg(long, default_value = "1e-3:1e3")]
        band: String,
        #[arg(long, default_value_t = 512)]
        probes: usize,
        /// Where to write sampled mu_hat values (CSV omega,re,im).
        #[arg(long)]
        mu_output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Reproduce a band-limited signal through the dual-frame formula.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        wavelet: String,
        /// spectral | temporal
        #[arg(long, default_value = "spectral")]
        mode: String,
        #[arg(long)]
        j_min: Option<i32>,
        #[arg(long)]
        j_max: Option<i32>,
        #[arg(long, default_value_t = 0.1)]
        tau_fraction: f64,
        #[arg(long, default_value = "2^1/8")]
        b_min: String,
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Wavelet moments M_0..M_L with quadrature error bounds.
    Moments {
        #[arg(long)]
        wavelet: String,
        #[arg(long)]
        max_order: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Per-side energy products of the uniqueness identity.
    Uniqueness {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        wavelet: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Wavelet zoo utilities.
    Wavelets {
        #[command(subcommand)]
        action: WaveletsAction,
    },
}

#[derive(Subcommand)]
enum WaveletsAction {
    /// List the built-in wavelets.
    List,
}

#[derive(Serialize)]
#[serde(untagged)]
enum CalderonJson {
    Value(f64),
    Divergent(&'static str),
}

impl From<Calderon> for CalderonJson {
    fn from(c: Calderon) -> Self {
        match c {
            Calderon::Finite(v) => CalderonJson::Value(v),
            Calderon::Divergent => CalderonJson::Divergent("divergent"),
        }
    }
}

#[derive(Serialize)]
struct SideReportJson {
    side: &'static str,
    tauberian: bool,
    tauberian_measure: f64,
    calderon: CalderonJson,
    directional_energy: f64,
}

#[derive(Serialize)]
struct AdmissibilityJson {
    tau: f64,
    sides: Vec<SideReportJson>,
}

#[derive(Serialize)]
struct PartitionJson {
    base_b: f64,
    max_deviation: f64,
    probes: usize,
}

#[derive(Serialize)]
struct ReconstructJson {
    rel_l2_error: f64,
    j_min: i32,
    j_max: i32,
    mode: String,
}

#[derive(Serialize)]
struct MomentJson {
    order: u32,
    value: f64,
    error_bound: f64,
}

#[derive(Serialize)]
struct CertificateSideJson {
    side: &'static str,
    signal_energy: f64,
    wavelet_energy: f64,
    product: f64,
}

fn emit_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable report");
    match output {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn parse_band(text: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::parse(format!("band must be lo:hi, got '{text}'")))?;
    let lo = lo.parse::<f64>().map_err(|_| CliError::parse(format!("bad band edge '{lo}'")))?;
    let hi = hi.parse::<f64>().map_err(|_| CliError::parse(format!("bad band edge '{hi}'")))?;
    Ok((lo, hi))
}

fn build_dual_pipeline(
    psi: &WaveletSpec,
    tau_fraction: f64,
    b_min: &str,
    margin: f64,
) -> Result<(cwt_core::DualWavelet, f64), CliError> {
    if !(tau_fraction > 0.0 && tau_fraction < 1.0) {
        return Err(CliError::parse(format!("tau-fraction must be in (0, 1), got {tau_fraction}")));
    }
    let (b_min, _) = io::parse_base(b_min)?;
    let sup = psi.spectrum_sup();
    if sup <= 0.0 {
        return Err(CliError::Core(CwtError::TauberianFail(
            "wavelet spectrum is identically zero".into(),
        )));
    }
    let tau = tau_fraction * sup;
    let scan = ScanConfig::default();
    let cover = find_cover_both(psi, tau, b_min, &scan)?;
    let bump = make_bump(&cover, margin)?;
    let b = cover.common_base().expect("both sides present");
    let mu = build_dual(psi, &bump, b)?;
    Ok((mu, b))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Cwt { input, wavelet, scales, output, format } => {
            let signal = io::read_signal_csv(&input)?;
            let psi = io::parse_wavelet(&wavelet)?;
            let grid = io::parse_scale_grid(&scales)?;
            let w = cwt(&signal, &psi, &grid)?;
            match format.as_str() {
                "binary" => {
                    let base_b = match w.scales() {
                        ScaleGrid::Geometric { base, .. } => base.value(),
                        ScaleGrid::Explicit(_) => 0.0,
                    };
                    io::write_scalogram_file(
                        &output,
                        base_b,
                        &w.scales().scales(),
                        w.translations().x0(),
                        w.translations().dx(),
                        w.n_translations(),
                        w.coeffs(),
                    )?;
                }
                "csv" => io::write_scalogram_csv(&output, &w)?,
                other => return Err(CliError::parse(format!("unknown format '{other}'"))),
            }
            Ok(())
        }
        Command::Admissibility { wavelet, tau, output } => {
            let psi = io::parse_wavelet(&wavelet)?;
            let report = admissibility_report(&psi, tau, &ScanConfig::default())?;
            let json = AdmissibilityJson {
                tau: report.tau,
                sides: report
                    .sides
                    .iter()
                    .map(|s| SideReportJson {
                        side: s.side.name(),
                        tauberian: s.tauberian,
                        tauberian_measure: s.tauberian_measure,
                        calderon: s.calderon.into(),
                        directional_energy: s.directional_energy,
                    })
                    .collect(),
            };
            emit_json(&json, output.as_deref())
        }
        Command::Dual { wavelet, tau_fraction, b_min, margin, band, probes, mu_output, report } => {
            let psi = io::parse_wavelet(&wavelet)?;
            let (mu, base_b) = build_dual_pipeline(&psi, tau_fraction, &b_min, margin)?;
            let band = parse_band(&band)?;
            let max_deviation = partition_check(&psi, &mu, band, probes)?;
            if let Some(path) = mu_output {
                let mut out = String::from("omega,re,im\n");
                let c_max = [cwt_core::Side::Positive, cwt_core::Side::Negative]
                    .iter()
                    .filter_map(|s| mu.bump().interval(*s))
                    .map(|(_, c)| c)
                    .fold(0.0f64, f64::max);
                let n = 2048;
                let hi = 1.05 * c_max;
                for i in 0..=n {
                    let omega = -hi + 2.0 * hi * i as f64 / n as f64;
                    let v = mu.spectrum(omega);
                    out.push_str(&format!("{omega:.16e},{:.16e},{:.16e}\n", v.re, v.im));
                }
                std::fs::write(path, out)?;
            }
            emit_json(&PartitionJson { base_b, max_deviation, probes }, report.as_deref())
        }
        Command::Reconstruct {
            input,
            wavelet,
            mode,
            j_min,
            j_max,
            tau_fraction,
            b_min,
            margin,
            output,
            report,
        } => {
            let signal = io::read_signal_csv(&input)?;
            let psi = io::parse_wavelet(&wavelet)?;
            let mode_enum = match mode.as_str() {
                "spectral" => ReconstructMode::Spectral,
                "temporal" => ReconstructMode::Temporal,
                other => return Err(CliError::parse(format!("unknown mode '{other}'"))),
            };
            let (mu, _) = build_dual_pipeline(&psi, tau_fraction, &b_min, margin)?;
            let j_range = match (j_min, j_max) {
                (Some(lo), Some(hi)) => Some((lo, hi)),
                (None, None) => None,
                _ => return Err(CliError::parse("give both --j-min and --j-max or neither")),
            };
            let rec = reconstruct(&signal, &psi, &mu, j_range, mode_enum)?;
            let num: f64 = rec
                .signal
                .values()
                .iter()
                .zip(signal.values())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            let den: f64 = signal.values().iter().map(|v| v.norm_sqr()).sum();
            let rel = (num / den).sqrt();
            io::write_signal_csv(&output, &rec.signal)?;
            emit_json(
                &ReconstructJson { rel_l2_error: rel, j_min: rec.j_min, j_max: rec.j_max, mode },
                report.as_deref(),
            )
        }
        Command::Moments { wavelet, max_order, output } => {
            let psi = io::parse_wavelet(&wavelet)?;
            let mut list = Vec::with_capacity(max_order as usize + 1);
            for ell in 0..=max_order {
                let (value, error_bound) = moment(&psi, ell)?;
                list.push(MomentJson { order: ell, value: value.re, error_bound });
            }
            emit_json(&list, output.as_deref())
        }
        Command::Uniqueness { input, wavelet, output } => {
            let signal = io::read_signal_csv(&input)?;
            let psi = io::parse_wavelet(&wavelet)?;
            let cert = uniqueness_certificate(&signal, &psi);
            let json: Vec<CertificateSideJson> = cert
                .sides
                .iter()
                .map(|s| CertificateSideJson {
                    side: s.side.name(),
                    signal_energy: s.signal_energy,
                    wavelet_energy: s.wavelet_energy,
                    product: s.product,
                })
                .collect();
            emit_json(&json, output.as_deref())
        }
        Command::Wavelets { action: WaveletsAction::List } => {
            println!("gaussian                 exp(-pi x^2); self-dual spectrum, nonzero mean");
            println!("gaussian_derivative:<m>  m-th derivative of exp(-x^2/2), m >= 1");
            println!("mexican | mexican_hat    (1 - x^2) exp(-x^2/2); negated 2nd Gaussian derivative");
            println!("poisson                  1/(pi (1 + x^2)); spectrum exp(-2 pi |omega|)");
            println!("poisson_derivative       -2x/(pi (1 + x^2)^2); zero mean, slow decay");
            println!("haar                     +1 on [0, 1/2), -1 on [1/2, 1); sampled spectrum");
            println!("sampled:<path>           samples from a CSV (x,value or x,re,im)");
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
