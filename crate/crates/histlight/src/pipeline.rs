//! The full enhancement pipeline and image file I/O.
//!
//! An image is converted to HSV, its value channel quantized and
//! histogrammed together with its gradient image, decomposed into
//! illumination and reflectance histograms, brightened in the histogram
//! domain, and finally realized as pixels again by matching the value
//! channel to the enhanced histogram. Hue and saturation pass through
//! untouched.

use crate::channel::{gradient_channel_with, quantize_value_channel, GradientKind, ValueChannel};
use crate::color::{hsv_to_rgb, rgb_to_hsv, HsvImage};
use crate::error::Result;
use crate::hist::{compute_count_histogram, CountHistogram};
use crate::opt::{decompose, OptParams};
use crate::remap::histogram_match;
use crate::reprocess::{brighten_value_histogram, GammaParam};
use image::RgbImage;
use std::path::Path;

/// Everything the histogram stages need from an image: its HSV planes,
/// quantized value channel, and the histograms of the channel and of its
/// gradient image.
#[derive(Debug, Clone)]
pub struct ImageHistograms {
    pub hsv: HsvImage,
    pub value: ValueChannel,
    pub source: CountHistogram,
    pub gradient: CountHistogram,
}

/// Pixel-domain analysis stage: HSV conversion, quantization to `levels`
/// gray levels, gradient image, and both histograms.
pub fn image_histograms(
    img: &RgbImage,
    levels: usize,
    kind: GradientKind,
) -> Result<ImageHistograms> {
    let hsv = rgb_to_hsv(img);
    let value = quantize_value_channel(&hsv, levels)?;
    let gradient_image = gradient_channel_with(&value, kind);
    let source = compute_count_histogram(&value, levels)?;
    let gradient = compute_count_histogram(&gradient_image, levels)?;
    Ok(ImageHistograms {
        hsv,
        value,
        source,
        gradient,
    })
}

/// Pixel-domain realization stage: match the value channel to the target
/// histogram, splice the remapped channel back into HSV, convert to RGB.
pub fn apply_value_histogram(
    hsv: &HsvImage,
    value: &ValueChannel,
    target: &CountHistogram,
) -> Result<RgbImage> {
    let matched = histogram_match(value, target)?;
    let replaced = hsv.with_value_channel(&matched)?;
    Ok(hsv_to_rgb(&replaced))
}

/// Enhanced image plus details of the optimization run.
#[derive(Debug, Clone)]
pub struct EnhanceOutcome {
    pub image: RgbImage,
    /// Iterations the decomposition performed.
    pub iterations: usize,
    /// Objective trace from the decomposition.
    pub objective_trace: Vec<f64>,
}

/// Full pipeline with an explicit gradient operator, returning run
/// details alongside the image.
pub fn enhance_with(
    img: &RgbImage,
    params: &OptParams,
    gamma: GammaParam,
    kind: GradientKind,
) -> Result<EnhanceOutcome> {
    let stats = image_histograms(img, params.levels, kind)?;
    let decomposition = decompose(&stats.source, &stats.gradient, params)?;
    let enhanced = brighten_value_histogram(
        &decomposition.reflectance,
        &decomposition.illumination,
        gamma,
    )?;
    let image = apply_value_histogram(&stats.hsv, &stats.value, &enhanced)?;
    Ok(EnhanceOutcome {
        image,
        iterations: decomposition.iterations,
        objective_trace: decomposition.objective_trace,
    })
}

/// Full pipeline with the default forward-difference gradient.
pub fn enhance(img: &RgbImage, params: &OptParams, gamma: GammaParam) -> Result<RgbImage> {
    Ok(enhance_with(img, params, gamma, GradientKind::ForwardDiff)?.image)
}

/// Nearest-neighbor resize, used by the benchmark sweep so resizing never
/// smooths the histogram.
pub fn resize_nearest(img: &RgbImage, width: u32, height: u32) -> RgbImage {
    RgbImage::from_fn(width.max(1), height.max(1), |x, y| {
        let sx = ((x as u64 * img.width() as u64) / width.max(1) as u64) as u32;
        let sy = ((y as u64 * img.height() as u64) / height.max(1) as u64) as u32;
        *img.get_pixel(sx.min(img.width() - 1), sy.min(img.height() - 1))
    })
}

/// Loads an image file as 8-bit RGB; grayscale and alpha inputs are
/// converted.
pub fn load_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    Ok(image::open(path)?.to_rgb8())
}

/// Writes an image; the format follows the file extension (PNG, JPEG).
pub fn save_rgb(path: impl AsRef<Path>, img: &RgbImage) -> Result<()> {
    img.save(path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn mean_value(img: &RgbImage) -> f64 {
        let hsv = rgb_to_hsv(img);
        hsv.v_plane().iter().sum::<f64>() / hsv.v_plane().len() as f64
    }

    #[test]
    fn enhance_preserves_dimensions_and_hue_saturation() {
        let img = synth::dark_gradient(24, 18);
        let n = (24 * 18) as f64;
        let params = OptParams {
            levels: 32,
            ..OptParams::defaults(n)
        };
        let out = enhance(&img, &params, GammaParam::default()).unwrap();
        assert_eq!(out.dimensions(), img.dimensions());

        // Re-render each output pixel from the input's hue and saturation
        // with the output's value; if enhance only replaced V, this
        // reproduces the output up to the two 8-bit quantizations.
        let before = rgb_to_hsv(&img);
        let after = rgb_to_hsv(&out);
        for (i, px) in out.pixels().enumerate() {
            let (r, g, b) = crate::color::pixel_to_rgb(
                before.h_plane()[i],
                before.s_plane()[i],
                after.v_plane()[i],
            );
            assert!(
                (px[0] as i32 - r as i32).abs() <= 2
                    && (px[1] as i32 - g as i32).abs() <= 2
                    && (px[2] as i32 - b as i32).abs() <= 2,
                "pixel {i}: hue/saturation drifted beyond quantization"
            );
        }
    }

    #[test]
    fn enhance_brightens_low_light_fixture() {
        let img = synth::dark_gradient(32, 32);
        let params = OptParams {
            levels: 64,
            ..OptParams::defaults((32 * 32) as f64)
        };
        let out = enhance(&img, &params, GammaParam::new(2.2).unwrap()).unwrap();
        assert!(
            mean_value(&out) > mean_value(&img),
            "gamma 2.2 should raise mean V: {} vs {}",
            mean_value(&out),
            mean_value(&img)
        );
    }

    #[test]
    fn enhance_deterministic() {
        let img = synth::dark_blocks(20, 16);
        let params = OptParams {
            levels: 32,
            ..OptParams::defaults((20 * 16) as f64)
        };
        let a = enhance(&img, &params, GammaParam::default()).unwrap();
        let b = enhance(&img, &params, GammaParam::default()).unwrap();
        assert_eq!(a.as_raw(), b.as_raw());
    }

    #[test]
    fn resize_nearest_preserves_corner_pixels() {
        let img = synth::dark_blocks(40, 30);
        let small = resize_nearest(&img, 10, 10);
        assert_eq!(small.dimensions(), (10, 10));
        assert_eq!(small.get_pixel(0, 0), img.get_pixel(0, 0));
        let big = resize_nearest(&img, 80, 60);
        assert_eq!(big.get_pixel(0, 0), img.get_pixel(0, 0));
        assert_eq!(big.get_pixel(79, 59), img.get_pixel(39, 29));
    }

    #[test]
    fn save_and_load_round_trip() {
        let img = synth::tiny_pattern();
        let dir = std::env::temp_dir().join("histlight-pipeline-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.png");
        save_rgb(&path, &img).unwrap();
        let back = load_rgb(&path).unwrap();
        assert_eq!(back.as_raw(), img.as_raw());
        std::fs::remove_file(&path).ok();
    }
}
