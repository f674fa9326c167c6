use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::{Command, Failure, HomModeArg, Output, Preset, TolProfile, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE};
use crate::error::Error;
use crate::fock::{purity, DensityOperator, StateFile};
use crate::moments::{
    check_bounds, invariance, moment_tensors, sphere_field, uncertainty_product, unpolarized_order,
    PolarizationClass, Sampling, ToleranceProfile,
};
use crate::prep::{
    calibrate_phase, named_pure_state, named_state, pair_noise_report, run_chain, CalibrationConfig, ChainSpec,
    OpticalElement, SpatialMode, DEFAULT_REPETITION_HZ,
};
use crate::spectral::{
    apply_filters, build_jsa, hom_curve, noise_subtracted_visibility, schmidt, FilterSpec, HomMode, PhaseMatching,
    PumpParams, WavelengthGrid,
};
use crate::tomo::{default_settings, evaluate, mle_from_counts, simulate_counts, CountRecord, MleConfig, SimulationConfig};

type CmdResult = std::result::Result<u8, Failure>;

const HOM_DELAY_POINTS: usize = 201;
const REPORTED_SCHMIDT_WEIGHTS: usize = 10;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

pub(super) fn execute(command: Command, stdout: &mut dyn Write) -> CmdResult {
    match command {
        Command::State { state, output } => cmd_state(&state, &output, stdout),
        Command::Moments {
            state,
            order,
            resolution,
            grid,
            csv,
            output,
        } => cmd_moments(&state, order, resolution, grid.as_deref(), csv.as_deref(), &output, stdout),
        Command::Classify {
            state,
            tol_profile,
            tol,
            output,
        } => cmd_classify(&state, tol_profile, tol, &output, stdout),
        Command::Bounds { state, output } => cmd_bounds(&state, &output, stdout),
        Command::Prep {
            chain,
            preset,
            phi,
            output,
        } => cmd_prep(chain.as_deref(), preset, phi, &output, stdout),
        Command::Calibrate {
            phi,
            step,
            shots,
            seed,
            output,
        } => {
            let config = CalibrationConfig::uniform(step, shots, seed)?;
            let report = calibrate_phase(phi, &config)?;
            let doc = json!({
                "true_phi": phi,
                "error": report.phi_hat - phi,
                "step": step,
                "peak_counts": shots,
                "seed": seed,
                "calibration": report,
            });
            emit(&doc, &output, stdout)
        }
        Command::TomoSim {
            state,
            shots,
            seed,
            poisson,
            output,
        } => {
            let rho = load_state(&state)?;
            let mut config = SimulationConfig::new(shots, seed);
            config.poisson_totals = poisson;
            let records = simulate_counts(&rho, &default_settings(), config)?;
            emit(&records, &output, stdout)
        }
        Command::TomoFit {
            counts,
            target,
            max_iter,
            tol_profile,
            tol,
            resolution,
            output,
        } => cmd_tomo_fit(&counts, target.as_deref(), max_iter, tol_profile, tol, resolution, &output, stdout),
        Command::Spectral {
            filter_fwhm,
            filter_center,
            points,
            hom_mode,
            delay_range,
            v_raw,
            p1,
            p2,
            p3,
            jsa_csv,
            hom_csv,
            output,
        } => {
            let opts = SpectralOpts {
                filter_fwhm,
                filter_center,
                points,
                hom_mode,
                delay_range,
                v_raw,
                p: [p1, p2, p3],
                jsa_csv,
                hom_csv,
            };
            cmd_spectral(&opts, &output, stdout)
        }
    }
}

/// A named state, or else a state file (prep and tomo-fit reports included).
pub(super) fn load_state(spec: &str) -> std::result::Result<DensityOperator, Failure> {
    match named_state(spec) {
        Ok(rho) => Ok(rho),
        Err(Error::UnknownState(name)) => {
            let path = Path::new(spec);
            if path.is_file() {
                Ok(StateFile::read(path)?.to_density()?)
            } else {
                Err(Error::UnknownState(name).into())
            }
        }
        Err(e) => Err(e.into()),
    }
}

fn emit<T: Serialize + ?Sized>(value: &T, output: &Output, stdout: &mut dyn Write) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    match &output.out {
        Some(path) => std::fs::write(path, text + "\n").map_err(Error::from)?,
        None => writeln!(stdout, "{text}").map_err(Error::from)?,
    }
    Ok(EXIT_OK)
}

fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> crate::Result<()>) -> std::result::Result<(), Failure> {
    let mut out = BufWriter::new(File::create(path).map_err(Error::from)?);
    write(&mut out)?;
    out.flush().map_err(Error::from)?;
    Ok(())
}

fn tolerance(profile: TolProfile, tol: Option<f64>) -> std::result::Result<ToleranceProfile, Failure> {
    match (profile, tol) {
        (TolProfile::Exact, None) => Ok(ToleranceProfile::Exact),
        (TolProfile::Exact, Some(_)) => Err(usage("--tol applies only to --tol-profile experimental")),
        (TolProfile::Experimental, None) => Ok(ToleranceProfile::experimental()),
        (TolProfile::Experimental, Some(t)) if t > 0.0 => Ok(ToleranceProfile::Experimental(t)),
        (TolProfile::Experimental, Some(t)) => Err(usage(format!("--tol must be positive (got {t})"))),
    }
}

fn sampling(resolution: usize, grid: Option<&str>) -> std::result::Result<Sampling, Failure> {
    match grid {
        None => Ok(Sampling::Fibonacci { points: resolution }),
        Some(text) => {
            let parsed = text
                .split_once(['x', 'X'])
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            match parsed {
                Some((n_theta, n_phi)) => Ok(Sampling::Grid { n_theta, n_phi }),
                None => Err(usage(format!("--grid expects THETAxPHI, e.g. 32x64 (got {text:?})"))),
            }
        }
    }
}

/// Invariance report; the class is `None` unless `N = 3`.
fn classification(rho: &DensityOperator, profile: ToleranceProfile) -> std::result::Result<Value, Failure> {
    let tol = profile.tol();
    let triple = invariance(rho, tol)?;
    let class = if rho.photons() == 3 {
        Some(PolarizationClass::from_triple(&triple)?)
    } else {
        None
    };
    Ok(json!({
        "N": rho.photons(),
        "profile": profile,
        "class": class,
        "pattern": triple.pattern(),
        "triple": triple,
        "unpolarized_order": unpolarized_order(rho, tol)?,
    }))
}

fn cmd_state(spec: &str, output: &Output, stdout: &mut dyn Write) -> CmdResult {
    let file = match named_pure_state(spec) {
        Ok(Some(psi)) => StateFile::from_pure(&psi),
        Ok(None) => StateFile::from_density(&named_state(spec)?),
        Err(Error::UnknownState(_)) => {
            let path = Path::new(spec);
            if !path.is_file() {
                return Err(Error::UnknownState(spec.to_string()).into());
            }
            let file = StateFile::read(path)?;
            match file.to_pure()? {
                Some(psi) => StateFile::from_pure(&psi),
                None => StateFile::from_density(&file.to_density()?),
            }
        }
        Err(e) => return Err(e.into()),
    };
    emit(&file, output, stdout)
}

fn cmd_moments(
    spec: &str,
    order: Option<u32>,
    resolution: usize,
    grid: Option<&str>,
    csv: Option<&Path>,
    output: &Output,
    stdout: &mut dyn Write,
) -> CmdResult {
    let rho = load_state(spec)?;
    let tensors = moment_tensors(&rho);
    let mut doc = json!({
        "N": rho.photons(),
        "tensors": tensors,
        "variance_sum": tensors.variance_sum(),
    });
    match order {
        Some(order) => {
            let field = sphere_field(&rho, order, sampling(resolution, grid)?)?;
            doc["field"] = json!({
                "order": order,
                "sampling": field.sampling,
                "points": field.samples.len(),
                "max": field.max(),
                "min": field.min(),
                "max_abs": field.max_abs(),
                "antipodal_residual": field.antipodal_residual(),
            });
            if let Some(path) = csv {
                write_file(path, |w| field.write_csv(w))?;
            }
        }
        None if csv.is_some() => return Err(usage("--csv needs --order")),
        None => {}
    }
    emit(&doc, output, stdout)
}

fn cmd_classify(
    spec: &str,
    profile: TolProfile,
    tol: Option<f64>,
    output: &Output,
    stdout: &mut dyn Write,
) -> CmdResult {
    let rho = load_state(spec)?;
    let doc = classification(&rho, tolerance(profile, tol)?)?;
    emit(&doc, output, stdout)
}

fn cmd_bounds(spec: &str, output: &Output, stdout: &mut dyn Write) -> CmdResult {
    let rho = load_state(spec)?;
    let bounds = check_bounds(&rho);
    let uncertainty = [(1, 2), (2, 3), (3, 1)]
        .iter()
        .map(|&(j, k)| uncertainty_product(&rho, j, k))
        .collect::<crate::Result<Vec<_>>>()?;
    let doc = json!({
        "N": rho.photons(),
        "bounds": bounds,
        "uncertainty": uncertainty,
    });
    emit(&doc, output, stdout)
}

/// Chains that end in the named states; waveplates act on mode `b`.
pub(super) fn preset_chain(preset: Preset, phi: f64) -> ChainSpec {
    let b = SpatialMode::B;
    let hwp = |angle| OpticalElement::Hwp { angle, mode: b };
    let qwp = |angle| OpticalElement::Qwp { angle, mode: b };
    let ppbs = OpticalElement::Ppbs { phi };
    let noon = vec![hwp(22.5), ppbs, qwp(45.0), hwp(phi / 4.0)];
    let (elements, target) = match preset {
        Preset::OneTwo => (vec![hwp(0.0), ppbs, qwp(0.0), hwp(0.0)], "one_two"),
        Preset::TwoOne => (vec![hwp(0.0), ppbs, qwp(0.0), hwp(45.0)], "two_one"),
        Preset::Noon => (noon, "noon3"),
        Preset::H3 => {
            let mut e = noon;
            e.push(OpticalElement::Lp { angle: 0.0, mode: b });
            (e, "h3")
        }
        Preset::V3 => {
            let mut e = noon;
            e.push(OpticalElement::Lp { angle: 90.0, mode: b });
            (e, "v3")
        }
    };
    ChainSpec {
        input: None,
        elements,
        target: Some(target.to_string()),
    }
}

fn cmd_prep(
    chain: Option<&Path>,
    preset: Option<Preset>,
    phi: f64,
    output: &Output,
    stdout: &mut dyn Write,
) -> CmdResult {
    let spec = match (chain, preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(Error::from)?;
            serde_json::from_str::<ChainSpec>(&text).map_err(Error::from)?
        }
        (None, Some(p)) => preset_chain(p, phi),
        (None, None) => return Err(usage("give --chain or --preset")),
    };
    let (_, report) = run_chain(&spec)?;
    emit(&report, output, stdout)
}

#[allow(clippy::too_many_arguments)]
fn cmd_tomo_fit(
    counts: &Path,
    target: Option<&str>,
    max_iter: usize,
    profile: TolProfile,
    tol: Option<f64>,
    resolution: usize,
    output: &Output,
    stdout: &mut dyn Write,
) -> CmdResult {
    let text = std::fs::read_to_string(counts).map_err(Error::from)?;
    let records: Vec<CountRecord> = serde_json::from_str(&text).map_err(Error::from)?;
    let profile = tolerance(profile, tol)?;
    let config = MleConfig {
        max_iterations: max_iter,
        ..MleConfig::default()
    };
    let result = mle_from_counts(&records, &config)?;
    let evaluation = target
        .map(|t| -> std::result::Result<Value, Failure> {
            let e = evaluate(&result.rho_hat, &load_state(t)?, Sampling::Fibonacci { points: resolution })?;
            Ok(json!({ "target": t, "fidelity": e.fidelity, "moment_deviation": e.moment_deviation }))
        })
        .transpose()?;
    let mut doc = serde_json::to_value(StateFile::from_density(&result.rho_hat)).map_err(Error::from)?;
    doc["purity"] = json!(purity(&result.rho_hat));
    doc["log_likelihood"] = json!(result.log_likelihood);
    doc["iterations"] = json!(result.iterations);
    doc["converged"] = json!(result.converged);
    doc["warnings"] = json!(result.warnings);
    doc["classification"] = classification(&result.rho_hat, profile)?;
    if let Some(e) = evaluation {
        doc["evaluation"] = e;
    }
    emit(&doc, output, stdout)?;
    Ok(if result.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

struct SpectralOpts {
    filter_fwhm: f64,
    filter_center: f64,
    points: usize,
    hom_mode: HomModeArg,
    delay_range: f64,
    v_raw: f64,
    p: [f64; 3],
    jsa_csv: Option<PathBuf>,
    hom_csv: Option<PathBuf>,
}

fn cmd_spectral(opts: &SpectralOpts, output: &Output, stdout: &mut dyn Write) -> CmdResult {
    if !(opts.delay_range > 0.0) {
        return Err(usage(format!("--delay-range must be positive (got {})", opts.delay_range)));
    }
    let grid = WavelengthGrid::uniform(760.0, 800.0, opts.points)?;
    let jsa = build_jsa(PumpParams::default(), PhaseMatching::default(), grid)?;
    let filter = FilterSpec::new(opts.filter_center, opts.filter_fwhm)?;
    let (filtered, transmission) = apply_filters(&jsa, filter, filter)?;
    let raw = schmidt(&jsa);
    let pure = schmidt(&filtered);

    let mode = match opts.hom_mode {
        HomModeArg::SamePair => HomMode::SamePair,
        HomModeArg::Independent => HomMode::IndependentSources,
    };
    let step = 2.0 * opts.delay_range / (HOM_DELAY_POINTS - 1) as f64;
    let delays: Vec<f64> = (0..HOM_DELAY_POINTS).map(|k| -opts.delay_range + step * k as f64).collect();
    let curve = hom_curve(&filtered, &delays, mode)?;
    let independent = hom_curve(&filtered, &[0.0], HomMode::IndependentSources)?;

    let [p1, p2, p3] = opts.p;
    let noise = pair_noise_report(p1, p2, p3, DEFAULT_REPETITION_HZ)?;
    let v_sub = noise_subtracted_visibility(opts.v_raw, p1, p2, p3)?;

    if let Some(path) = &opts.jsa_csv {
        write_file(path, |w| filtered.write_csv(w))?;
    }
    if let Some(path) = &opts.hom_csv {
        write_file(path, |w| curve.write_csv(w))?;
    }

    let top = |l: &[f64]| l.iter().take(REPORTED_SCHMIDT_WEIGHTS).copied().collect::<Vec<_>>();
    let doc = json!({
        "grid": { "start_nm": 760.0, "stop_nm": 800.0, "points": opts.points },
        "pump": jsa.pump,
        "phase_matching": jsa.phase_matching,
        "filter": filter,
        "unfiltered": { "k": raw.k, "purity": raw.purity, "lambdas": top(&raw.lambdas) },
        "filtered": {
            "k": pure.k,
            "purity": pure.purity,
            "lambdas": top(&pure.lambdas),
            "pair_transmission": transmission,
        },
        "hom": {
            "mode": curve.mode,
            "visibility": curve.visibility,
            "fitted_visibility": curve.fitted_visibility,
            "fit_center_fs": curve.fit_center_fs,
            "fit_sigma_fs": curve.fit_sigma_fs,
            "independent_sources_visibility": independent.visibility,
        },
        "noise": {
            "pairs": noise,
            "v_raw": opts.v_raw,
            "v_subtracted": v_sub,
        },
    });
    emit(&doc, output, stdout)
}
