use std::path::Path;
use std::time::Instant;

use oped::oped::{max_lebesgue, reconstructor, Filter, ReconstructionConfig};
use oped::phantom::{ImageGrid, TestObject};
use oped::radon::{sample_sinogram, ScanGeometry, ScanType, Sinogram};
use oped::sum::SummationMode;
use oped::svd::{verify, TruncatedSvd};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::manifest::{GeometrySummary, RunManifest};
use crate::{
    AlgorithmArg, CommonReconstructArgs, DiagnoseArgs, FilterArg, ObjectArgs, ReferenceArgs,
    ScanArg, ScanArgs, SimulateArgs, SummationArg, SvdVerifyArgs,
};

/// Largest grid used for the Lebesgue maximum in `--diagnostics`.
const LEBESGUE_RESOLUTION: usize = 64;

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Io(format!("{}: no such file", path.display())))
    }
}

fn read_sinogram(path: &Path) -> CliResult<Sinogram> {
    require_file(path)?;
    Ok(Sinogram::read(path)?)
}

fn read_grid(path: &Path) -> CliResult<ImageGrid> {
    require_file(path)?;
    require_file(&oped::phantom::sidecar_path(path))?;
    Ok(ImageGrid::read(path)?)
}

fn load_object(file: Option<&Path>, preset: Option<&str>, d: Option<usize>) -> CliResult<Option<TestObject>> {
    match (file, preset) {
        (Some(path), _) => {
            let object = TestObject::from_json(&read_text(path)?)
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
            if let Some(d) = d {
                if d != object.dimension() {
                    return Err(CliError::invalid(format!(
                        "--d {d} given for a {}-dimensional object",
                        object.dimension()
                    )));
                }
            }
            Ok(Some(object))
        }
        (None, Some(name)) => Ok(Some(TestObject::preset(name, d.unwrap_or(2))?)),
        (None, None) => Ok(None),
    }
}

fn scan_type(arg: ScanArg) -> ScanType {
    match arg {
        ScanArg::I => ScanType::TypeI,
        ScanArg::II => ScanType::TypeII,
        ScanArg::Gg | ScanArg::ThreeD => ScanType::GegenbauerGauss,
    }
}

fn implied_dimension(scan: Option<ScanArg>) -> Option<usize> {
    match scan {
        Some(ScanArg::I | ScanArg::II) => Some(2),
        Some(ScanArg::ThreeD) => Some(3),
        _ => None,
    }
}

/// Dimension and scan type from the flags, with `d_hint` from an input.
fn resolve_scan(args: &ScanArgs, d_hint: Option<usize>) -> CliResult<(usize, ScanType)> {
    let implied = implied_dimension(args.scan);
    let d = args.d.or(d_hint).or(implied).unwrap_or(2);
    for other in [args.d, d_hint, implied].into_iter().flatten() {
        if other != d {
            return Err(CliError::invalid(format!("conflicting dimensions {d} and {other}")));
        }
    }
    let scan = match args.scan {
        Some(s) => scan_type(s),
        None if d == 3 => ScanType::GegenbauerGauss,
        None => ScanType::TypeII,
    };
    Ok((d, scan))
}

fn summation(arg: SummationArg) -> SummationMode {
    match arg {
        SummationArg::Pairwise => SummationMode::Pairwise,
        SummationArg::Sequential => SummationMode::Sequential,
    }
}

fn filter(arg: FilterArg) -> Filter {
    match arg {
        FilterArg::None => Filter::None,
        FilterArg::Eta => Filter::Eta,
    }
}

fn print_json(value: &impl serde::Serialize) -> CliResult<String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::invalid(e.to_string()))?;
    println!("{text}");
    Ok(text)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path.display(), e))
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let start = Instant::now();
    let ObjectArgs { phantom, preset } = &args.object;
    let d = args.scan.d.or(implied_dimension(args.scan.scan));
    let object = load_object(phantom.as_deref(), preset.as_deref(), d)?
        .ok_or_else(|| CliError::invalid("simulate needs --phantom or --preset"))?;
    let (d, scan) = resolve_scan(&args.scan, Some(object.dimension()))?;
    let order = args.scan.order.ok_or_else(|| CliError::invalid("simulate needs --order"))?;
    let geometry = ScanGeometry::new(d, scan, order)?;
    let mut sinogram = sample_sinogram(&object, &geometry)?;
    let noise = args.noise.unwrap_or(0.0);
    if args.noise.is_some() && args.seed.is_none() {
        return Err(CliError::invalid("--noise requires an explicit --seed"));
    }
    if noise != 0.0 {
        sinogram.add_noise(noise, args.seed.unwrap_or_default())?;
    }
    sinogram.write(&args.output)?;

    let inputs: Vec<&Path> = phantom.as_deref().into_iter().collect();
    let mut manifest = RunManifest::new(&inputs)?;
    manifest.geometry = Some(GeometrySummary::of(&sinogram.geometry));
    manifest.details = json!({
        "object": preset.clone().unwrap_or_else(|| "file".into()),
        "noise_sigma": noise,
        "seed": args.seed,
    });
    manifest.write(&[&args.output], start.elapsed().as_secs_f64())
}

fn check_expected(sinogram: &Sinogram, args: &CommonReconstructArgs) -> CliResult<()> {
    let g = &sinogram.geometry;
    if let Some(s) = args.scan {
        if scan_type(s) != g.scan || implied_dimension(Some(s)).is_some_and(|d| d != g.dimension) {
            return Err(CliError::invalid(format!(
                "sinogram is a {}-dimensional {} scan, --type asks for {s:?}",
                g.dimension, g.scan
            )));
        }
    }
    if let Some(order) = args.order {
        if order != g.m_or_n {
            return Err(oped::Error::OrderMismatch {
                expected: order,
                found: g.m_or_n,
            }
            .into());
        }
    }
    Ok(())
}

fn oped_grid(sinogram: &Sinogram, filter: Filter, resolution: usize, mode: SummationMode) -> CliResult<ImageGrid> {
    let g = &sinogram.geometry;
    let config = ReconstructionConfig::new(g.scan, g.m_or_n, resolution)
        .with_filter(filter)
        .with_summation(mode);
    Ok(reconstructor(sinogram, &config)?.grid(resolution)?)
}

fn svd_grid(sinogram: &Sinogram, truncation: usize, resolution: usize) -> CliResult<(ImageGrid, Vec<String>)> {
    let svd = TruncatedSvd::from_sinogram(sinogram, truncation)?;
    Ok((svd.grid(resolution)?, svd.warnings))
}

pub fn reconstruct(
    args: &CommonReconstructArgs,
    algorithm: AlgorithmArg,
    filter_arg: FilterArg,
    truncation: Option<usize>,
) -> CliResult<()> {
    let start = Instant::now();
    let sinogram = read_sinogram(&args.input)?;
    check_expected(&sinogram, args)?;
    let g = &sinogram.geometry;
    let mode = summation(args.summation);
    let filt = filter(filter_arg);
    if algorithm == AlgorithmArg::Svd && filt != Filter::None {
        return Err(CliError::invalid("the truncated SVD takes no filter"));
    }
    if algorithm == AlgorithmArg::Oped && truncation.is_some() {
        return Err(CliError::invalid("--truncation applies to --algorithm svd"));
    }
    let reference = load_object(
        args.reference.reference.as_deref(),
        args.reference.reference_preset.as_deref(),
        Some(g.dimension),
    )?;
    let truncation = truncation.unwrap_or(g.reconstruction_order());

    let (grid, warnings) = match algorithm {
        AlgorithmArg::Oped => (oped_grid(&sinogram, filt, args.resolution, mode)?, Vec::new()),
        AlgorithmArg::Svd => svd_grid(&sinogram, truncation, args.resolution)?,
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let compute_seconds = start.elapsed().as_secs_f64();
    let delta = if args.compare {
        let other = match algorithm {
            AlgorithmArg::Oped => svd_grid(&sinogram, g.reconstruction_order(), args.resolution)?.0,
            AlgorithmArg::Svd => oped_grid(&sinogram, Filter::None, args.resolution, mode)?,
        };
        Some(grid.max_abs_diff(&other)?)
    } else {
        None
    };

    grid.write(&args.output)?;
    let sidecar = oped::phantom::sidecar_path(&args.output);
    let mut outputs: Vec<&Path> = vec![&args.output, &sidecar];
    if let Some(pgm) = &args.pgm {
        grid.write_pgm(pgm)?;
        outputs.push(pgm);
    }

    let mut inputs: Vec<&Path> = vec![&args.input];
    inputs.extend(args.reference.reference.as_deref());
    let mut manifest = RunManifest::new(&inputs)?;
    manifest.geometry = Some(GeometrySummary::of(g));
    let mut components = serde_json::Value::Null;
    if let Some(object) = &reference {
        let truth = ImageGrid::from_fn(g.dimension, args.resolution, |x| object.eval(x))?;
        manifest.metrics = Some(grid.metrics(&truth)?);
        if let TestObject::Phantom(p) = object {
            components = json!(p.component_mean_errors(&grid)?);
        }
    }
    manifest.details = json!({
        "algorithm": match algorithm { AlgorithmArg::Oped => "oped", AlgorithmArg::Svd => "svd" },
        "filter": filt,
        "resolution": args.resolution,
        "truncation": (algorithm == AlgorithmArg::Svd).then_some(truncation),
        "summation": mode,
        "warnings": warnings,
        "algorithm_delta": delta,
        "component_mean_errors": components,
    });

    if args.diagnostics {
        let lebesgue = match algorithm {
            AlgorithmArg::Oped => Some(max_lebesgue(g, filt, args.resolution.min(LEBESGUE_RESOLUTION))?),
            AlgorithmArg::Svd => None,
        };
        print_json(&json!({
            "max_lebesgue": lebesgue,
            "lebesgue_resolution": args.resolution.min(LEBESGUE_RESOLUTION),
            "runtime_seconds": compute_seconds,
            "metrics": manifest.metrics,
            "algorithm_delta": delta,
        }))?;
    }
    manifest.write(&outputs, start.elapsed().as_secs_f64())
}

pub fn svd_verify(args: &SvdVerifyArgs) -> CliResult<()> {
    let start = Instant::now();
    if !(args.d == 2 || args.d == 3) {
        return Err(CliError::invalid("--d must be 2 or 3"));
    }
    let report = verify(args.d, args.n_max, args.lattice, args.gamma_samples)?;
    let text = print_json(&report)?;
    if let Some(out) = &args.output {
        write_text(out, &text)?;
        RunManifest::new(&[])?.write(&[out], start.elapsed().as_secs_f64())?;
    }
    Ok(())
}

pub fn report(args: &crate::ReportArgs) -> CliResult<()> {
    let start = Instant::now();
    let grid = read_grid(&args.grid)?;
    let ReferenceArgs {
        reference,
        reference_preset,
    } = &args.reference;
    let mut inputs: Vec<&Path> = vec![&args.grid];
    let (truth, object) = if let Some(path) = &args.reference_grid {
        inputs.push(path);
        (read_grid(path)?, None)
    } else {
        let object = load_object(reference.as_deref(), reference_preset.as_deref(), Some(grid.dimension))?
            .ok_or_else(|| CliError::invalid("report needs --reference, --reference-preset or --reference-grid"))?;
        inputs.extend(reference.as_deref());
        (ImageGrid::from_fn(grid.dimension, grid.resolution, |x| object.eval(x))?, Some(object))
    };
    let metrics = grid.metrics(&truth)?;
    let components = match &object {
        Some(TestObject::Phantom(p)) => p.component_mean_errors(&grid)?,
        _ => Vec::new(),
    };
    let text = print_json(&json!({
        "d": grid.dimension,
        "resolution": grid.resolution,
        "l2": metrics.l2,
        "relative_l2": metrics.relative_l2,
        "linf": metrics.linf,
        "component_mean_errors": components,
    }))?;
    if let Some(out) = &args.output {
        write_text(out, &text)?;
        let mut manifest = RunManifest::new(&inputs)?;
        manifest.metrics = Some(metrics);
        manifest.write(&[out], start.elapsed().as_secs_f64())?;
    }
    Ok(())
}

pub fn diagnose(args: &DiagnoseArgs) -> CliResult<()> {
    let start = Instant::now();
    let geometry = match &args.input {
        Some(path) => read_sinogram(path)?.geometry,
        None => {
            let (d, scan) = resolve_scan(&args.scan, None)?;
            let order = args
                .scan
                .order
                .ok_or_else(|| CliError::invalid("diagnose needs --input or --order"))?;
            ScanGeometry::new(d, scan, order)?
        }
    };
    let filt = filter(args.filter);
    let lebesgue = max_lebesgue(&geometry, filt, args.resolution)?;
    print_json(&json!({
        "geometry": GeometrySummary::of(&geometry),
        "reconstruction_order": geometry.reconstruction_order(),
        "filter": filt,
        "lebesgue_resolution": args.resolution,
        "max_lebesgue": lebesgue,
        "runtime_seconds": start.elapsed().as_secs_f64(),
    }))?;
    Ok(())
}
