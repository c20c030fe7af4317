//! Deterministic synthetic low-light images for tests, benchmarks, and
//! examples.
//!
//! All generators are pure functions of their arguments (the seeded ones
//! use a fixed-algorithm RNG), so fixtures are identical across platforms
//! and runs. Channel values stay at or below 200, which keeps strictly
//! increasing point transforms like `v + v/4` free of clamping.
//!
//! The standard fixture set models night scenes that contain actual
//! light sources and hard shadow boundaries. Those scenes put real mass
//! in the upper bins of the gradient histogram, which the reflectance
//! estimate needs: its support can never leave the gradient histogram's
//! support, so a scene made only of smooth ramps or low-amplitude noise
//! caps the recomposed histogram far below the brightest source levels.

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smooth dark diagonal gradient with a warm tint and one bright window
/// patch in the upper-right corner.
pub fn dark_gradient(width: u32, height: u32) -> RgbImage {
    RgbImage::from_fn(width, height, |x, y| {
        let fx = x as f64 / width.max(1) as f64;
        let fy = y as f64 / height.max(1) as f64;
        let base = 6.0 + 38.0 * fx + 22.0 * fy;
        let in_window = fx > 0.72 && fx < 0.92 && fy > 0.08 && fy < 0.28;
        if in_window {
            let glow = 150.0 + 40.0 * fx;
            Rgb([(glow + 10.0) as u8, glow as u8, (glow - 15.0) as u8])
        } else {
            let r = (base * 1.12).min(200.0) as u8;
            let g = base.min(200.0) as u8;
            let b = (base * 0.82) as u8;
            Rgb([r, g, b])
        }
    })
}

/// Blocky scene: an 8-step checkerboard of dark patches with one bright
/// block, giving the histogram several separated modes.
pub fn dark_blocks(width: u32, height: u32) -> RgbImage {
    const STEPS: [u8; 8] = [6, 14, 22, 30, 38, 46, 60, 90];
    RgbImage::from_fn(width, height, |x, y| {
        let bx = x / 4;
        let by = y / 4;
        if bx % 7 == 3 && by % 5 == 2 {
            return Rgb([185, 180, 170]);
        }
        let v = STEPS[((bx + 3 * by) % STEPS.len() as u32) as usize];
        Rgb([v, v.saturating_add(4).min(200), v.saturating_sub(2)])
    })
}

/// Seeded per-pixel noise in the deep shadows (levels 2..=60).
pub fn dark_noise(width: u32, height: u32, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = RgbImage::new(width, height);
    for p in img.pixels_mut() {
        let base: u8 = rng.random_range(2..=52);
        let jitter = |rng: &mut ChaCha8Rng, v: u8| -> u8 {
            (v as i16 + rng.random_range(-2..=8)).clamp(2, 60) as u8
        };
        let r = jitter(&mut rng, base);
        let g = jitter(&mut rng, base);
        let b = jitter(&mut rng, base);
        *p = Rgb([r, g, b]);
    }
    img
}

/// Night scene of scattered point lights over deep shadow, the structure
/// of a city seen from the air: 30% of pixels are bright speckle.
pub fn night_speckle(width: u32, height: u32, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = RgbImage::new(width, height);
    for p in img.pixels_mut() {
        *p = if rng.random_range(0.0..1.0) < 0.3 {
            Rgb([200, 192, 176])
        } else {
            Rgb([8, 8, 11])
        };
    }
    img
}

/// Starfield-like scene: bright points at three distinct magnitudes over
/// a two-level shadow floor.
pub fn night_stars(width: u32, height: u32, seed: u64) -> RgbImage {
    const BRIGHT: [u8; 3] = [150, 175, 200];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = RgbImage::new(width, height);
    for p in img.pixels_mut() {
        *p = if rng.random_range(0.0..1.0) < 0.35 {
            let v = BRIGHT[rng.random_range(0..BRIGHT.len())];
            Rgb([v, v.saturating_sub(8), v.saturating_sub(22)])
        } else {
            let v = if rng.random_range(0.0..1.0) < 0.5 { 6 } else { 12 };
            Rgb([v, v, v.saturating_add(4)])
        };
    }
    img
}

/// Deterministic scene: a pixel checkerboard of lit and unlit cells (a
/// lit window grid at night) inside a deep shadow frame.
pub fn night_grid(width: u32, height: u32) -> RgbImage {
    let frame = 6;
    RgbImage::from_fn(width, height, |x, y| {
        let in_frame =
            x < frame || y < frame || x >= width.saturating_sub(frame) || y >= height.saturating_sub(frame);
        if in_frame {
            return Rgb([3, 3, 5]);
        }
        if (x + y) % 2 == 0 {
            Rgb([150, 144, 132])
        } else {
            Rgb([6, 6, 9])
        }
    })
}

/// Fixed 4×4 pattern used by golden-file tests.
pub fn tiny_pattern() -> RgbImage {
    let pixels: [[u8; 3]; 16] = [
        [12, 8, 6],
        [30, 22, 18],
        [8, 10, 14],
        [60, 50, 40],
        [22, 18, 30],
        [5, 6, 7],
        [90, 80, 70],
        [16, 20, 24],
        [40, 36, 30],
        [11, 13, 15],
        [25, 30, 35],
        [70, 65, 55],
        [9, 7, 5],
        [50, 45, 48],
        [14, 16, 12],
        [33, 29, 26],
    ];
    let mut img = RgbImage::new(4, 4);
    for (i, px) in img.pixels_mut().enumerate() {
        *px = Rgb(pixels[i]);
    }
    img
}

/// The fixture set used by the acceptance checks: three distinct night
/// scenes at a size large enough for stable histograms.
pub fn standard_fixtures() -> Vec<(&'static str, RgbImage)> {
    vec![
        ("night_speckle", night_speckle(96, 72, 7)),
        ("night_stars", night_stars(96, 72, 23)),
        ("night_grid", night_grid(96, 72)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            dark_gradient(20, 10).as_raw(),
            dark_gradient(20, 10).as_raw()
        );
        assert_eq!(
            dark_noise(20, 10, 5).as_raw(),
            dark_noise(20, 10, 5).as_raw()
        );
        assert_ne!(
            dark_noise(20, 10, 5).as_raw(),
            dark_noise(20, 10, 6).as_raw()
        );
        assert_eq!(
            night_speckle(20, 10, 5).as_raw(),
            night_speckle(20, 10, 5).as_raw()
        );
        assert_ne!(
            night_stars(20, 10, 5).as_raw(),
            night_stars(20, 10, 6).as_raw()
        );
    }

    #[test]
    fn fixtures_saturate_the_gradient_clamp() {
        use crate::channel::{gradient_channel, quantize_value_channel};
        use crate::color::rgb_to_hsv;
        use crate::hist::compute_count_histogram;

        for (name, img) in standard_fixtures() {
            let value = quantize_value_channel(&rgb_to_hsv(&img), 256).unwrap();
            let grad = gradient_channel(&value);
            let hist = compute_count_histogram(&grad, 256).unwrap();
            let top = hist.bins()[255];
            let n = hist.total();
            assert!(
                top >= 0.05 * n,
                "{name}: only {top} of {n} gradient pixels reach the clamp level"
            );
        }
    }

    #[test]
    fn fixtures_stay_below_the_transform_headroom() {
        for (name, img) in standard_fixtures() {
            let max = img.as_raw().iter().copied().max().unwrap();
            assert!(max <= 200, "{name} has channel value {max}");
        }
    }

    #[test]
    fn fixtures_are_dark_overall() {
        for (name, img) in standard_fixtures() {
            let mean: f64 = img.as_raw().iter().map(|&v| v as f64).sum::<f64>()
                / img.as_raw().len() as f64;
            assert!(mean < 80.0, "{name} mean {mean} is not a low-light scene");
        }
    }
}
