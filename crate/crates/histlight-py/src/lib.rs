//! Python bindings for the histogram-domain enhancement pipeline.
//!
//! The module mirrors the library's main operations on plain Python
//! types: histograms as lists of floats, images as raw RGB byte buffers
//! or file paths.

use histlight::{
    brighten_value_histogram, capped_psnr, decompose, enhance_with, loe, psnr, ssim,
    CountHistogram, GammaParam, GradientKind, OptParams, RgbImage, UpdateForm,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};
use std::path::Path;

fn value_err(e: histlight::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_update_form(s: &str) -> PyResult<UpdateForm> {
    match s {
        "gradient" => Ok(UpdateForm::GradientConsistent),
        "paper" => Ok(UpdateForm::PaperLiteral),
        other => Err(PyValueError::new_err(format!(
            "unknown update_form {other:?} (expected \"gradient\" or \"paper\")"
        ))),
    }
}

fn parse_gradient(s: &str) -> PyResult<GradientKind> {
    match s {
        "forward" => Ok(GradientKind::ForwardDiff),
        "sobel" => Ok(GradientKind::Sobel),
        other => Err(PyValueError::new_err(format!(
            "unknown gradient {other:?} (expected \"forward\" or \"sobel\")"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn build_params(
    n: f64,
    levels: usize,
    alpha: f64,
    beta: f64,
    epsilon: Option<f64>,
    max_iter: usize,
    update_form: &str,
) -> PyResult<OptParams> {
    let mut p = OptParams::defaults(n);
    p.levels = levels;
    p.alpha = alpha;
    p.beta = beta;
    p.max_iter = max_iter;
    p.update_form = parse_update_form(update_form)?;
    if let Some(e) = epsilon {
        p.epsilon = e;
    }
    Ok(p)
}

/// Split a source-value histogram into illumination and reflectance
/// histograms. Both inputs are bin-mass lists of the same length; the
/// result dict holds the two histograms, the objective trace (three
/// entries per iteration), and the iteration count.
#[pyfunction]
#[pyo3(signature = (source, gradient, *, alpha=0.1, beta=0.1, epsilon=None, max_iter=10, update_form="gradient"))]
#[allow(clippy::too_many_arguments)]
fn decompose_histograms<'py>(
    py: Python<'py>,
    source: Vec<f64>,
    gradient: Vec<f64>,
    alpha: f64,
    beta: f64,
    epsilon: Option<f64>,
    max_iter: usize,
    update_form: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let n: f64 = source.iter().sum();
    if !(n > 0.0) {
        return Err(PyValueError::new_err("source histogram holds no mass"));
    }
    let levels = source.len();
    let hs = CountHistogram::new(source, n).map_err(value_err)?;
    let hg = CountHistogram::new(gradient, n).map_err(value_err)?;
    let params = build_params(n, levels, alpha, beta, epsilon, max_iter, update_form)?;
    let result = decompose(&hs, &hg, &params).map_err(value_err)?;

    let out = PyDict::new(py);
    out.set_item("illumination", result.illumination.bins().to_vec())?;
    out.set_item("reflectance", result.reflectance.bins().to_vec())?;
    out.set_item("objective_trace", result.objective_trace)?;
    out.set_item("iterations", result.iterations)?;
    Ok(out)
}

/// Recompose an enhanced value histogram from a decomposition, lifting
/// the illumination locations by 1/gamma before recombining.
#[pyfunction]
#[pyo3(signature = (reflectance, illumination, *, gamma=2.2))]
fn brighten_histogram(
    reflectance: Vec<f64>,
    illumination: Vec<f64>,
    gamma: f64,
) -> PyResult<Vec<f64>> {
    let n: f64 = illumination.iter().sum();
    if !(n > 0.0) {
        return Err(PyValueError::new_err("illumination histogram holds no mass"));
    }
    let mass: f64 = reflectance.iter().sum();
    if (mass - n).abs() > 1e-6 * n {
        return Err(PyValueError::new_err(format!(
            "reflectance mass {mass} does not match illumination mass {n}"
        )));
    }
    let refl = CountHistogram::new(reflectance, n).map_err(value_err)?;
    let illum = CountHistogram::new(illumination, n).map_err(value_err)?;
    let gamma = GammaParam::new(gamma).map_err(value_err)?;
    let enhanced = brighten_value_histogram(&refl, &illum, gamma).map_err(value_err)?;
    Ok(enhanced.bins().to_vec())
}

fn image_from_raw(data: &[u8], width: u32, height: u32) -> PyResult<RgbImage> {
    let expected = width as usize * height as usize * 3;
    if data.len() != expected {
        return Err(PyValueError::new_err(format!(
            "buffer holds {} bytes, expected {expected} for {width}x{height} RGB",
            data.len()
        )));
    }
    RgbImage::from_raw(width, height, data.to_vec())
        .ok_or_else(|| PyValueError::new_err("buffer does not fit the given dimensions"))
}

/// Enhance a raw 8-bit RGB buffer (row-major, 3 bytes per pixel) and
/// return the enhanced buffer with the same layout.
#[pyfunction]
#[pyo3(signature = (data, width, height, *, alpha=0.1, beta=0.1, gamma=2.2, levels=256, epsilon=None, max_iter=10, update_form="gradient", gradient="forward"))]
#[allow(clippy::too_many_arguments)]
fn enhance_rgb<'py>(
    py: Python<'py>,
    data: &[u8],
    width: u32,
    height: u32,
    alpha: f64,
    beta: f64,
    gamma: f64,
    levels: usize,
    epsilon: Option<f64>,
    max_iter: usize,
    update_form: &str,
    gradient: &str,
) -> PyResult<Bound<'py, PyBytes>> {
    let img = image_from_raw(data, width, height)?;
    let n = (width * height) as f64;
    let params = build_params(n, levels, alpha, beta, epsilon, max_iter, update_form)?;
    let gamma = GammaParam::new(gamma).map_err(value_err)?;
    let kind = parse_gradient(gradient)?;
    let outcome = enhance_with(&img, &params, gamma, kind).map_err(value_err)?;
    Ok(PyBytes::new(py, outcome.image.as_raw()))
}

/// Enhance an image file (PNG or JPEG) and write the result as PNG.
/// Returns the number of optimizer iterations that ran.
#[pyfunction]
#[pyo3(signature = (input, output, *, alpha=0.1, beta=0.1, gamma=2.2, levels=256, epsilon=None, max_iter=10, update_form="gradient", gradient="forward"))]
#[allow(clippy::too_many_arguments)]
fn enhance_file(
    input: &str,
    output: &str,
    alpha: f64,
    beta: f64,
    gamma: f64,
    levels: usize,
    epsilon: Option<f64>,
    max_iter: usize,
    update_form: &str,
    gradient: &str,
) -> PyResult<usize> {
    let img = histlight::load_rgb(Path::new(input)).map_err(value_err)?;
    let n = (img.width() * img.height()) as f64;
    let params = build_params(n, levels, alpha, beta, epsilon, max_iter, update_form)?;
    let gamma = GammaParam::new(gamma).map_err(value_err)?;
    let kind = parse_gradient(gradient)?;
    let outcome = enhance_with(&img, &params, gamma, kind).map_err(value_err)?;
    histlight::save_rgb(Path::new(output), &outcome.image).map_err(value_err)?;
    Ok(outcome.iterations)
}

/// PSNR (capped at the 99 dB reporting ceiling), SSIM, and LOE for two
/// image files of equal dimensions.
#[pyfunction]
fn image_metrics<'py>(py: Python<'py>, reference: &str, candidate: &str) -> PyResult<Bound<'py, PyDict>> {
    let a = histlight::load_rgb(Path::new(reference)).map_err(value_err)?;
    let b = histlight::load_rgb(Path::new(candidate)).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("psnr", capped_psnr(psnr(&a, &b).map_err(value_err)?))?;
    out.set_item("ssim", ssim(&a, &b).map_err(value_err)?)?;
    out.set_item("loe", loe(&a, &b).map_err(value_err)?)?;
    Ok(out)
}

#[pymodule]
fn histlight_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(decompose_histograms, m)?)?;
    m.add_function(wrap_pyfunction!(brighten_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(enhance_rgb, m)?)?;
    m.add_function(wrap_pyfunction!(enhance_file, m)?)?;
    m.add_function(wrap_pyfunction!(image_metrics, m)?)?;
    Ok(())
}
