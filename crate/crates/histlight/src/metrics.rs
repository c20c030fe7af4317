//! Image quality metrics: PSNR, single-scale SSIM on luma, and the
//! lightness-order error.

use crate::error::{Error, Result};
use image::RgbImage;

/// Value written to reports when PSNR is infinite (identical images).
pub const PSNR_REPORT_CAP_DB: f64 = 99.0;

/// SSIM window side length.
const SSIM_WINDOW: usize = 11;
/// SSIM Gaussian standard deviation.
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// The three metrics for one image pair. `psnr` may be infinite; use
/// [`capped_psnr`] when writing it out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub psnr: f64,
    pub ssim: f64,
    pub loe: f64,
}

/// PSNR clamped to [`PSNR_REPORT_CAP_DB`] for report output.
pub fn capped_psnr(psnr: f64) -> f64 {
    if psnr.is_finite() {
        psnr.min(PSNR_REPORT_CAP_DB)
    } else {
        PSNR_REPORT_CAP_DB
    }
}

fn check_dims(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} vs {}×{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB over all three channels; infinite for
/// identical images.
pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_dims(a, b)?;
    if a.as_raw().is_empty() {
        return Err(Error::EmptyInput("image"));
    }
    let sse: u64 = a
        .as_raw()
        .iter()
        .zip(b.as_raw())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.as_raw().len() as f64;
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

fn luma_plane(img: &RgbImage) -> Vec<f64> {
    img.pixels()
        .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
        .collect()
}

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let mid = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - mid;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Valid-region separable convolution with the SSIM Gaussian: horizontal
/// pass then vertical pass, output (w−10)×(h−10).
fn convolve_valid(plane: &[f64], w: usize, h: usize, kernel: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut horizontal = vec![0.0f64; ow * h];
    for y in 0..h {
        for x in 0..ow {
            let mut acc = 0.0;
            for (t, &kv) in kernel.iter().enumerate() {
                acc += kv * plane[y * w + x + t];
            }
            horizontal[y * ow + x] = acc;
        }
    }
    let mut out = vec![0.0f64; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (t, &kv) in kernel.iter().enumerate() {
                acc += kv * horizontal[(y + t) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    out
}

/// Mean single-scale SSIM over all valid 11×11 windows of the luma
/// channels.
pub fn ssim(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_dims(a, b)?;
    let (w, h) = (a.width() as usize, a.height() as usize);
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::InvalidParameter(format!(
            "image too small for SSIM: need at least {SSIM_WINDOW}×{SSIM_WINDOW}, got {w}×{h}"
        )));
    }
    let la = luma_plane(a);
    let lb = luma_plane(b);
    let aa: Vec<f64> = la.iter().map(|x| x * x).collect();
    let bb: Vec<f64> = lb.iter().map(|x| x * x).collect();
    let ab: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| x * y).collect();

    let kernel = gaussian_kernel();
    let mu_a = convolve_valid(&la, w, h, &kernel);
    let mu_b = convolve_valid(&lb, w, h, &kernel);
    let m_aa = convolve_valid(&aa, w, h, &kernel);
    let m_bb = convolve_valid(&bb, w, h, &kernel);
    let m_ab = convolve_valid(&ab, w, h, &kernel);

    let mut sum = 0.0;
    for i in 0..mu_a.len() {
        let va = m_aa[i] - mu_a[i] * mu_a[i];
        let vb = m_bb[i] - mu_b[i] * mu_b[i];
        let cov = m_ab[i] - mu_a[i] * mu_b[i];
        let num = (2.0 * mu_a[i] * mu_b[i] + SSIM_C1) * (2.0 * cov + SSIM_C2);
        let den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + SSIM_C1) * (va + vb + SSIM_C2);
        sum += num / den;
    }
    Ok(sum / mu_a.len() as f64)
}

/// Per-pixel lightness: the maximum RGB channel.
fn lightness(img: &RgbImage) -> Vec<u8> {
    img.pixels().map(|p| p[0].max(p[1]).max(p[2])).collect()
}

/// Nearest-neighbor downsample of a lightness plane to at most 100×100.
fn downsample(plane: &[u8], w: usize, h: usize) -> (Vec<u8>, usize, usize) {
    let ow = w.min(100);
    let oh = h.min(100);
    if ow == w && oh == h {
        return (plane.to_vec(), w, h);
    }
    let mut out = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        let sy = y * h / oh;
        for x in 0..ow {
            let sx = x * w / ow;
            out.push(plane[sy * w + sx]);
        }
    }
    (out, ow, oh)
}

/// Lightness-order error: the average number of pixel pairs whose
/// relative lightness order differs between the two images, computed on a
/// grid downsampled to at most 100×100.
pub fn loe(original: &RgbImage, enhanced: &RgbImage) -> Result<f64> {
    check_dims(original, enhanced)?;
    if original.as_raw().is_empty() {
        return Err(Error::EmptyInput("image"));
    }
    let (w, h) = (original.width() as usize, original.height() as usize);
    let (lo, ow, oh) = downsample(&lightness(original), w, h);
    let (le, _, _) = downsample(&lightness(enhanced), w, h);
    let m = ow * oh;
    let mut flips: u64 = 0;
    for x in 0..m {
        let ox = lo[x];
        let ex = le[x];
        for y in 0..m {
            if (ox >= lo[y]) != (ex >= le[y]) {
                flips += 1;
            }
        }
    }
    Ok(flips as f64 / m as f64)
}

/// All three metrics for one pair.
pub fn report(a: &RgbImage, b: &RgbImage) -> Result<MetricReport> {
    Ok(MetricReport {
        psnr: psnr(a, b)?,
        ssim: ssim(a, b)?,
        loe: loe(a, b)?,
    })
}
