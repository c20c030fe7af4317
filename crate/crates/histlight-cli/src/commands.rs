use crate::args::{BenchArgs, DecomposeArgs, EnhanceArgs, MetricsArgs, ReportFormat};
use crate::config::{self, Resolved};
use crate::report::{self, Sink};
use anyhow::{bail, Context, Result};
use histlight::{
    apply_value_histogram, brighten_value_histogram, capped_psnr, decompose as decompose_histograms,
    enhance_with, image_histograms, load_rgb, loe, psnr, resize_nearest, save_rgb, ssim,
    GradientKind, RgbImage, UpdateForm,
};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn update_form_name(form: UpdateForm) -> &'static str {
    match form {
        UpdateForm::GradientConsistent => "gradient",
        UpdateForm::PaperLiteral => "paper",
    }
}

fn gradient_name(kind: GradientKind) -> &'static str {
    match kind {
        GradientKind::ForwardDiff => "forward",
        GradientKind::Sobel => "sobel",
    }
}

fn load_input(path: &Path) -> Result<RgbImage> {
    load_rgb(path).with_context(|| format!("cannot read image {}", path.display()))
}

#[derive(Serialize)]
struct EnhanceSidecar<'a> {
    schema: &'static str,
    input: String,
    output: String,
    width: u32,
    height: u32,
    levels: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    epsilon: f64,
    max_iter: usize,
    update_form: &'static str,
    gradient: &'static str,
    iterations: usize,
    objective_trace: &'a [f64],
}

pub fn enhance(a: EnhanceArgs) -> Result<()> {
    let tuning = config::resolve(&a.tuning)?;
    let img = load_input(&a.input)?;
    let n = (img.width() * img.height()) as f64;
    let params = tuning.opt_params(n);
    let outcome = enhance_with(&img, &params, tuning.gamma, tuning.gradient)?;
    save_rgb(&a.output, &outcome.image)
        .with_context(|| format!("cannot write {}", a.output.display()))?;

    if let Some(sidecar) = &a.sidecar {
        let doc = EnhanceSidecar {
            schema: "histlight/enhance/v1",
            input: a.input.display().to_string(),
            output: a.output.display().to_string(),
            width: img.width(),
            height: img.height(),
            levels: params.levels,
            alpha: params.alpha,
            beta: params.beta,
            gamma: tuning.gamma.gamma(),
            epsilon: params.epsilon,
            max_iter: params.max_iter,
            update_form: update_form_name(params.update_form),
            gradient: gradient_name(tuning.gradient),
            iterations: outcome.iterations,
            objective_trace: &outcome.objective_trace,
        };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        report::write_file(sidecar, &text)?;
    }
    Ok(())
}

pub fn decompose(a: DecomposeArgs) -> Result<()> {
    let tuning = config::resolve(&a.tuning)?;
    let img = load_input(&a.input)?;
    let n = (img.width() * img.height()) as f64;
    let params = tuning.opt_params(n);
    let stats = image_histograms(&img, params.levels, tuning.gradient)?;
    let result = decompose_histograms(&stats.source, &stats.gradient, &params)?;

    let rows: Vec<Vec<String>> = (0..params.levels)
        .map(|k| {
            vec![
                k.to_string(),
                report::float(result.illumination.bins()[k]),
                report::float(result.reflectance.bins()[k]),
            ]
        })
        .collect();
    report::write_file(
        &a.output,
        &report::csv(&["bin", "illumination", "reflectance"], &rows),
    )?;

    let trace_path = match &a.trace {
        Some(p) => p.clone(),
        None => default_trace_path(&a.output),
    };
    let trace_rows: Vec<Vec<String>> = result
        .objective_trace
        .iter()
        .enumerate()
        .map(|(step, j)| vec![step.to_string(), report::float(*j)])
        .collect();
    report::write_file(&trace_path, &report::csv(&["step", "objective"], &trace_rows))?;
    Ok(())
}

fn default_trace_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "decompose".to_string());
    output.with_file_name(format!("{stem}-trace.csv"))
}

struct BenchRecord {
    width: u32,
    height: u32,
    histogram_ms: f64,
    decompose_ms: f64,
    reprocess_ms: f64,
    matching_ms: f64,
    total_ms: f64,
    metrics: Option<(f64, f64, f64)>,
}

#[derive(Serialize)]
struct BenchRecordJson {
    width: u32,
    height: u32,
    histogram_ms: f64,
    decompose_ms: f64,
    reprocess_ms: f64,
    matching_ms: f64,
    total_ms: f64,
    psnr: Option<f64>,
    ssim: Option<f64>,
    loe: Option<f64>,
}

#[derive(Serialize)]
struct BenchReport {
    schema: &'static str,
    source: String,
    levels: usize,
    records: Vec<BenchRecordJson>,
}

fn parse_resolution(spec: &str) -> Result<(u32, u32)> {
    let parts: Vec<&str> = spec.split('x').collect();
    if parts.len() != 2 {
        bail!("bad resolution {spec:?} (expected WxH, e.g. 640x480)");
    }
    let w: u32 = parts[0]
        .parse()
        .with_context(|| format!("bad width in resolution {spec:?}"))?;
    let h: u32 = parts[1]
        .parse()
        .with_context(|| format!("bad height in resolution {spec:?}"))?;
    if w == 0 || h == 0 {
        bail!("resolution {spec:?} must be at least 1x1");
    }
    Ok((w, h))
}

fn bench_one(
    img: &RgbImage,
    reference: Option<&RgbImage>,
    tuning: &Resolved,
) -> Result<BenchRecord> {
    let n = (img.width() * img.height()) as f64;
    let params = tuning.opt_params(n);

    let whole = Instant::now();
    let t = Instant::now();
    let stats = image_histograms(img, params.levels, tuning.gradient)?;
    let histogram_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let result = decompose_histograms(&stats.source, &stats.gradient, &params)?;
    let decompose_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let enhanced = brighten_value_histogram(&result.reflectance, &result.illumination, tuning.gamma)?;
    let reprocess_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let out = apply_value_histogram(&stats.hsv, &stats.value, &enhanced)?;
    let matching_ms = t.elapsed().as_secs_f64() * 1e3;
    let total_ms = whole.elapsed().as_secs_f64() * 1e3;

    let metrics = match reference {
        Some(r) => Some((capped_psnr(psnr(r, &out)?), ssim(r, &out)?, loe(r, &out)?)),
        None => None,
    };
    Ok(BenchRecord {
        width: img.width(),
        height: img.height(),
        histogram_ms,
        decompose_ms,
        reprocess_ms,
        matching_ms,
        total_ms,
        metrics,
    })
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let tuning = config::resolve(&a.tuning)?;
    let master = load_input(&a.input)?;
    let reference_master = match &a.reference {
        Some(p) => Some(load_input(p)?),
        None => None,
    };
    let resolutions: Vec<(u32, u32)> = a
        .resolutions
        .iter()
        .map(|s| parse_resolution(s))
        .collect::<Result<_>>()?;
    if resolutions.is_empty() {
        bail!("no resolutions requested");
    }

    let mut records = Vec::new();
    for &(w, h) in &resolutions {
        let img = resize_nearest(&master, w, h);
        let reference = reference_master.as_ref().map(|m| resize_nearest(m, w, h));
        records.push(bench_one(&img, reference.as_ref(), &tuning)?);
    }

    let largest = records
        .iter()
        .max_by_key(|r| r.width as u64 * r.height as u64)
        .expect("at least one record");
    if largest.total_ms > a.budget_ms as f64 {
        eprintln!(
            "warning: {}x{} took {:.0} ms, over the {} ms budget",
            largest.width, largest.height, largest.total_ms, a.budget_ms
        );
    }

    let sink = Sink::from_option(&a.output);
    match a.report {
        ReportFormat::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    let (p, s, l) = match r.metrics {
                        Some((p, s, l)) => {
                            (report::float(p), report::float(s), report::float(l))
                        }
                        None => (String::new(), String::new(), String::new()),
                    };
                    vec![
                        r.width.to_string(),
                        r.height.to_string(),
                        report::millis(r.histogram_ms),
                        report::millis(r.decompose_ms),
                        report::millis(r.reprocess_ms),
                        report::millis(r.matching_ms),
                        report::millis(r.total_ms),
                        p,
                        s,
                        l,
                    ]
                })
                .collect();
            sink.write(&report::csv(
                &[
                    "width",
                    "height",
                    "histogram_ms",
                    "decompose_ms",
                    "reprocess_ms",
                    "matching_ms",
                    "total_ms",
                    "psnr",
                    "ssim",
                    "loe",
                ],
                &rows,
            ))?;
        }
        ReportFormat::Json => {
            let doc = BenchReport {
                schema: "histlight/bench/v1",
                source: a.input.display().to_string(),
                levels: tuning.levels,
                records: records
                    .iter()
                    .map(|r| BenchRecordJson {
                        width: r.width,
                        height: r.height,
                        histogram_ms: r.histogram_ms,
                        decompose_ms: r.decompose_ms,
                        reprocess_ms: r.reprocess_ms,
                        matching_ms: r.matching_ms,
                        total_ms: r.total_ms,
                        psnr: r.metrics.map(|m| m.0),
                        ssim: r.metrics.map(|m| m.1),
                        loe: r.metrics.map(|m| m.2),
                    })
                    .collect(),
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            sink.write(&text)?;
        }
    }
    Ok(())
}

struct MetricRow {
    name: String,
    psnr: f64,
    ssim: f64,
    loe: f64,
}

#[derive(Serialize)]
struct MetricPairJson {
    name: String,
    psnr: f64,
    ssim: f64,
    loe: f64,
}

#[derive(Serialize)]
struct MetricAverageJson {
    psnr: f64,
    ssim: f64,
    loe: f64,
}

#[derive(Serialize)]
struct MetricsReportJson {
    schema: &'static str,
    pairs: Vec<MetricPairJson>,
    average: MetricAverageJson,
}

fn is_image_file(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| {
            e.eq_ignore_ascii_case("png")
                || e.eq_ignore_ascii_case("jpg")
                || e.eq_ignore_ascii_case("jpeg")
        })
        .unwrap_or(false)
}

fn collect_pairs(reference: &Path, candidate: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    if reference.is_dir() != candidate.is_dir() {
        bail!("reference and candidate must both be files or both be folders");
    }
    if !reference.is_dir() {
        let name = candidate
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "pair".to_string());
        return Ok(vec![(name, reference.to_path_buf(), candidate.to_path_buf())]);
    }

    let mut names: Vec<String> = std::fs::read_dir(reference)
        .with_context(|| format!("cannot list {}", reference.display()))?
        .filter_map(|entry| entry.ok())
        .map(|entry| entry.path())
        .filter(|p| p.is_file() && is_image_file(p))
        .filter_map(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    names.sort();
    if names.is_empty() {
        bail!("no images found in {}", reference.display());
    }

    names
        .into_iter()
        .map(|name| {
            let other = candidate.join(&name);
            if !other.is_file() {
                bail!("no candidate image for {name} in {}", candidate.display());
            }
            Ok((name.clone(), reference.join(&name), other))
        })
        .collect()
}

/// Batch parallelism cap from the environment: unset means the default
/// rayon pool, anything else must be a positive integer.
fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("HISTLIGHT_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => bail!("HISTLIGHT_THREADS must be a positive integer (got {raw:?})"),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("cannot read HISTLIGHT_THREADS: {e}"),
    }
}

fn metric_rows(pairs: &[(String, PathBuf, PathBuf)]) -> Result<Vec<MetricRow>> {
    pairs
        .par_iter()
        .map(|(name, reference, candidate)| {
            let a = load_input(reference)?;
            let b = load_input(candidate)?;
            Ok(MetricRow {
                name: name.clone(),
                psnr: capped_psnr(psnr(&a, &b)?),
                ssim: ssim(&a, &b)?,
                loe: loe(&a, &b)?,
            })
        })
        .collect()
}

pub fn metrics(a: MetricsArgs) -> Result<()> {
    let pairs = collect_pairs(&a.reference, &a.candidate)?;
    let rows = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot build thread pool")?
            .install(|| metric_rows(&pairs)),
        None => metric_rows(&pairs),
    }?;

    let count = rows.len() as f64;
    let avg_psnr = rows.iter().map(|r| r.psnr).sum::<f64>() / count;
    let avg_ssim = rows.iter().map(|r| r.ssim).sum::<f64>() / count;
    let avg_loe = rows.iter().map(|r| r.loe).sum::<f64>() / count;

    let sink = Sink::from_option(&a.output);
    match a.report {
        ReportFormat::Csv => {
            let mut csv_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        report::float(r.psnr),
                        report::float(r.ssim),
                        report::float(r.loe),
                    ]
                })
                .collect();
            csv_rows.push(vec![
                "average".to_string(),
                report::float(avg_psnr),
                report::float(avg_ssim),
                report::float(avg_loe),
            ]);
            sink.write(&report::csv(&["name", "psnr", "ssim", "loe"], &csv_rows))?;
        }
        ReportFormat::Json => {
            let doc = MetricsReportJson {
                schema: "histlight/metrics/v1",
                pairs: rows
                    .iter()
                    .map(|r| MetricPairJson {
                        name: r.name.clone(),
                        psnr: r.psnr,
                        ssim: r.ssim,
                        loe: r.loe,
                    })
                    .collect(),
                average: MetricAverageJson {
                    psnr: avg_psnr,
                    ssim: avg_ssim,
                    loe: avg_loe,
                },
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            sink.write(&text)?;
        }
    }
    Ok(())
}
