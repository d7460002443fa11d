//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use rnlm::oracle::{hist_experiment_binned, p1_nonpos_pure_noise, p2_nonpos_pure_noise_normal, HistogramBins};
use rnlm::{
    add_rician_noise, denoise as run_denoise, evaluate as run_evaluate, generate_phantom, Domain,
    FilterSettings, Image, MeasureKind, PhantomKind, PhantomSpec, Pipeline, SimilarityMeasure,
    SsimParams,
};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::format::{csv9, sig9};
use crate::io::{read_image, write_image, write_image_scaled};
use crate::manifest::RunManifest;
use crate::{DenoiseArgs, EvaluateArgs, HistArgs, SimulateArgs, SmTableArgs};

pub fn parse_phantom(s: &str) -> Result<PhantomKind> {
    Ok(match s {
        "shepp-logan" => PhantomKind::SheppLogan,
        "modified-shepp-logan" => PhantomKind::ModifiedSheppLogan,
        "disks" => PhantomKind::Disks,
        "ramp" => PhantomKind::Ramp,
        _ => match s.strip_prefix("flat:").map(str::parse::<f64>) {
            Some(Ok(v)) => PhantomKind::Flat(v),
            _ => {
                return Err(CliError::usage(format!(
                    "unknown phantom `{s}` (shepp-logan, modified-shepp-logan, disks, ramp, flat:VALUE)"
                )))
            }
        },
    })
}

/// Odd full width to radius.
pub fn width_to_radius(name: &str, width: usize) -> Result<usize> {
    if width % 2 == 0 {
        return Err(CliError::usage(format!("--{name} must be an odd width, got {width}")));
    }
    Ok(width / 2)
}

/// Parses `x0,y0,w,h`.
pub fn parse_rect(s: &str) -> Result<[usize; 4]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::usage(format!("expected X0,Y0,W,H with non-negative integers, got `{s}`"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let mut rect = [0; 4];
    for (r, p) in rect.iter_mut().zip(&parts) {
        *r = p.parse().map_err(|_| bad())?;
    }
    Ok(rect)
}

/// `σ̂ = mean(M) / √(π/2)` over a signal-free rectangle.
pub fn sigma_from_background(img: &Image, rect: [usize; 4]) -> Result<f64> {
    let [x0, y0, w, h] = rect;
    if w == 0 || h == 0 || x0 + w > img.width() || y0 + h > img.height() {
        return Err(CliError::usage(format!(
            "background rectangle {x0},{y0},{w},{h} is empty or outside the {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let mut sum = 0.0;
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            sum += img.get(x, y);
        }
    }
    let sigma = sum / (w * h) as f64 / std::f64::consts::FRAC_PI_2.sqrt();
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(CliError::Numeric(format!(
            "background rectangle gives sigma estimate {sigma}; pick a region containing noise"
        )));
    }
    Ok(sigma)
}

pub fn simulate(a: &SimulateArgs, argv: &[String]) -> Result<()> {
    let kind = parse_phantom(&a.phantom)?;
    let spec = PhantomSpec {
        kind,
        size: a.size,
        intensity_max: a.intensity_max,
    };
    let truth = generate_phantom(&spec)?;
    let (noisy, sigma) = add_rician_noise(&truth, a.sigma_frac, a.seed)?;
    write_image(&a.output, &noisy)?;
    let mut manifest = RunManifest::new(argv, "simulate")
        .param("phantom", a.phantom.as_str())
        .param("size", a.size)
        .param("intensity_max", a.intensity_max)
        .param("sigma_frac", a.sigma_frac)
        .output(&a.output);
    if let Some(t) = &a.truth {
        write_image(t, &truth)?;
        manifest = manifest.output(t);
    }
    manifest.sigma = Some(sigma);
    manifest.seed = Some(a.seed);
    manifest.write_next_to(&a.output)?;
    Ok(())
}

pub fn denoise(a: &DenoiseArgs, argv: &[String]) -> Result<()> {
    let pipeline: Pipeline = a.method.parse().map_err(|_| {
        CliError::usage(format!("unknown method `{}` (gnlm, nlms, nlmr)", a.method))
    })?;
    let settings = FilterSettings::new(
        width_to_radius("patch", a.patch)?,
        width_to_radius("search", a.search)?,
        a.h,
    )?;
    let img = read_image(&a.input, Domain::Magnitude)?;
    let (sigma, source) = match (a.sigma, &a.sigma_from_background) {
        (Some(s), _) => (s, "flag".to_string()),
        (None, Some(rect)) => (
            sigma_from_background(&img, parse_rect(rect)?)?,
            format!("background {rect}"),
        ),
        (None, None) => return Err(CliError::usage("one of --sigma or --sigma-from-background is required")),
    };
    let out = run_denoise(&img, pipeline, sigma, &settings)?;
    write_image(&a.output, &out)?;
    let mut manifest = RunManifest::new(argv, "denoise")
        .param("input", a.input.display().to_string())
        .param("method", pipeline.name())
        .param("patch", a.patch)
        .param("search", a.search)
        .param("h", a.h)
        .param("sigma_source", source)
        .output(&a.output);
    manifest.sigma = Some(sigma);
    manifest.write_next_to(&a.output)?;
    Ok(())
}

pub fn evaluate(a: &EvaluateArgs, argv: &[String], out: &mut Vec<u8>) -> Result<()> {
    let truth = read_image(&a.truth, Domain::Amplitude)?;
    let est = read_image(&a.est, Domain::Amplitude)?;
    let params = SsimParams {
        dynamic_range: a.dynamic_range,
        ..SsimParams::default()
    };
    let report = run_evaluate(&truth, &est, &params)?;
    let value = json!({
        "rmse_db": sig9(report.rmse_db),
        "crmse_db": sig9(report.crmse_db),
        "ssim": sig9(report.ssim_mean),
        "flags": report.flags,
    });
    let text = serde_json::to_string_pretty(&value).expect("report serializes");
    let emit = |w: &mut Vec<u8>, s: &str| {
        writeln!(w, "{s}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
    };
    if a.json {
        emit(out, &text)?;
    } else {
        let mut s = format!(
            "rmse_db  {}\ncrmse_db {}\nssim     {}",
            sig9(report.rmse_db),
            sig9(report.crmse_db),
            sig9(report.ssim_mean)
        );
        if !report.flags.is_empty() {
            let _ = write!(s, "\nflags    {}", report.flags.join(","));
        }
        emit(out, &s)?;
    }
    let mut manifest = RunManifest::new(argv, "evaluate")
        .param("truth", a.truth.display().to_string())
        .param("est", a.est.display().to_string());
    if let Some(l) = a.dynamic_range {
        manifest = manifest.param("dynamic_range", l);
    }
    if let Some(path) = &a.ssim_map {
        let map = report.ssim_map.as_ref().expect("evaluate always computes the map");
        let clamped: Vec<f64> = map.values.iter().map(|v| v.max(0.0)).collect();
        let img = Image::new(map.width, map.height, clamped, Domain::Amplitude)?;
        write_image_scaled(path, &img, Some(1.0))?;
        manifest = manifest.output(path);
    }
    if let Some(path) = &a.output {
        fs::write(path, format!("{text}\n")).map_err(|e| CliError::io(path, e))?;
        manifest.output(path).write_next_to(path)?;
    } else if let Some(path) = &a.ssim_map {
        manifest.write_next_to(path)?;
    }
    Ok(())
}

pub fn sm_table(a: &SmTableArgs, argv: &[String], out: &mut Vec<u8>) -> Result<()> {
    let kinds = a
        .measures
        .split(',')
        .map(|s| s.trim().parse::<MeasureKind>().map_err(|e| CliError::usage(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if a.steps < 2 {
        return Err(CliError::usage("--steps must be at least 2"));
    }
    if !(a.from.is_finite() && a.to.is_finite() && a.from >= 0.0 && a.to > a.from) {
        return Err(CliError::usage(format!(
            "need 0 <= --from < --to, got {} and {}",
            a.from, a.to
        )));
    }
    let measures = kinds
        .iter()
        .map(|&k| SimilarityMeasure::new(k, a.sigma))
        .collect::<rnlm::Result<Vec<_>>>()?;
    let mut csv = String::from("y_s,y_t");
    for k in &kinds {
        csv.push(',');
        csv.push_str(k.name());
    }
    csv.push('\n');
    for i in 0..a.steps {
        let t = a.from + (a.to - a.from) * i as f64 / (a.steps - 1) as f64;
        let _ = write!(csv, "{},{}", csv9(a.fixed), csv9(t));
        for m in &measures {
            let v = m.try_value(a.fixed, t)?;
            let _ = write!(csv, ",{}", csv9(v));
        }
        csv.push('\n');
    }
    match &a.output {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| CliError::io(path, e))?;
            let mut manifest = RunManifest::new(argv, "sm-table")
                .param("measures", a.measures.as_str())
                .param("fixed", a.fixed)
                .param("from", a.from)
                .param("to", a.to)
                .param("steps", a.steps)
                .output(path);
            manifest.sigma = Some(a.sigma);
            manifest.write_next_to(path)?;
        }
        None => out
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
    }
    Ok(())
}

pub fn hist_experiment(a: &HistArgs, argv: &[String], out: &mut Vec<u8>) -> Result<()> {
    let default = HistogramBins::default_for(a.avg.max(1), a.a.max(0.0), 1.0);
    let bins = HistogramBins::new(default.lo, default.hi, a.bins)?;
    let r = hist_experiment_binned(a.trials, a.avg, a.a, a.sigma, a.seed, bins)?;
    let mut summary = json!({
        "trials": r.trials,
        "avg": r.n_avg,
        "a": sig9(r.a),
        "sigma": sig9(r.sigma),
        "seed": r.seed,
        "p1_nonpos": sig9(r.p1_nonpos),
        "p2_nonpos": sig9(r.p2_nonpos),
    });
    if r.a == 0.0 {
        summary["p1_analytic"] = sig9(p1_nonpos_pure_noise(r.n_avg));
        summary["p2_normal_approx"] = sig9(p2_nonpos_pure_noise_normal(r.n_avg));
    }
    summary["generator"] = Value::from(rnlm::GENERATOR_ID);
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";

    let mut manifest = RunManifest::new(argv, "hist-experiment")
        .param("trials", a.trials)
        .param("avg", a.avg)
        .param("a", a.a)
        .param("bins", a.bins);
    manifest.sigma = Some(a.sigma);
    manifest.seed = Some(a.seed);
    if let Some(path) = &a.csv {
        let mut csv = String::from("bin_left,bin_right,count1,count2\n");
        for i in 0..r.bins.count {
            let (lo, hi) = r.bins.edges(i);
            let _ = writeln!(csv, "{},{},{},{}", csv9(lo), csv9(hi), r.histogram1[i], r.histogram2[i]);
        }
        fs::write(path, csv).map_err(|e| CliError::io(path, e))?;
        manifest = manifest.output(path);
    }
    match &a.json {
        Some(path) => {
            fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
            manifest = manifest.output(path);
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
    }
    if let Some(primary) = a.json.as_ref().or(a.csv.as_ref()) {
        manifest.write_next_to(primary)?;
    }
    Ok(())
}
