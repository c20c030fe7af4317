//! RGB ↔ HSV conversion on 8-bit images.

use crate::channel::ValueChannel;
use crate::error::{Error, Result};
use image::RgbImage;

/// An image in HSV form: hue in `[0, 360)` degrees, saturation and value
/// in `[0, 1]`, each stored as a row-major plane.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    width: u32,
    height: u32,
    h: Vec<f64>,
    s: Vec<f64>,
    v: Vec<f64>,
}

impl HsvImage {
    /// Builds an HSV image from explicit planes.
    pub fn from_planes(
        width: u32,
        height: u32,
        h: Vec<f64>,
        s: Vec<f64>,
        v: Vec<f64>,
    ) -> Result<Self> {
        let n = (width as usize) * (height as usize);
        if h.len() != n || s.len() != n || v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{width}×{height} image needs {n} samples per plane"
            )));
        }
        if h.iter().any(|&x| !(0.0..360.0).contains(&x))
            || s.iter().any(|&x| !(0.0..=1.0).contains(&x))
            || v.iter().any(|&x| !(0.0..=1.0).contains(&x))
        {
            return Err(Error::InvalidParameter(
                "HSV planes out of range: need h in [0,360), s and v in [0,1]".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            h,
            s,
            v,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn h_plane(&self) -> &[f64] {
        &self.h
    }

    pub fn s_plane(&self) -> &[f64] {
        &self.s
    }

    pub fn v_plane(&self) -> &[f64] {
        &self.v
    }

    /// Copy of this image with the V plane replaced by a level channel's
    /// normalized values (`level / (l−1)`); hue and saturation pass
    /// through untouched.
    pub fn with_value_channel(&self, channel: &ValueChannel) -> Result<Self> {
        if channel.width() != self.width || channel.height() != self.height {
            return Err(Error::DimensionMismatch(format!(
                "channel is {}×{} but image is {}×{}",
                channel.width(),
                channel.height(),
                self.width,
                self.height
            )));
        }
        let scale = (channel.levels() - 1).max(1) as f64;
        let v = channel
            .values()
            .iter()
            .map(|&lvl| (lvl as f64 / scale).min(1.0))
            .collect();
        Ok(Self {
            width: self.width,
            height: self.height,
            h: self.h.clone(),
            s: self.s.clone(),
            v,
        })
    }
}

/// Converts one 8-bit RGB pixel to (hue, saturation, value).
pub fn pixel_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let rf = r as f64 / 255.0;
    let gf = g as f64 / 255.0;
    let bf = b as f64 / 255.0;
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == rf {
        let mut h = 60.0 * (gf - bf) / delta;
        if h < 0.0 {
            h += 360.0;
        }
        h
    } else if max == gf {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    (h, s, v)
}

/// Converts (hue, saturation, value) back to an 8-bit RGB pixel.
pub fn pixel_to_rgb(h: f64, s: f64, v: f64) -> (u8, u8, u8) {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to_u8 = |f: f64| ((f + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    (to_u8(r1), to_u8(g1), to_u8(b1))
}

/// Standard hexcone conversion of a whole image; `v = max(r,g,b)/255`.
pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    let n = (img.width() as usize) * (img.height() as usize);
    let mut h = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for px in img.pixels() {
        let (ph, ps, pv) = pixel_to_hsv(px[0], px[1], px[2]);
        h.push(ph);
        s.push(ps);
        v.push(pv);
    }
    HsvImage {
        width: img.width(),
        height: img.height(),
        h,
        s,
        v,
    }
}

/// Inverse of [`rgb_to_hsv`] up to 8-bit quantization.
pub fn hsv_to_rgb(img: &HsvImage) -> RgbImage {
    let mut out = RgbImage::new(img.width, img.height);
    for (i, px) in out.pixels_mut().enumerate() {
        let (r, g, b) = pixel_to_rgb(img.h[i], img.s[i], img.v[i]);
        *px = image::Rgb([r, g, b]);
    }
    out
}
