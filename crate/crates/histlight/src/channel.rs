//! Quantized value channels and gradient images.

use crate::color::HsvImage;
use crate::error::{Error, Result};

/// Largest supported gray-level count; levels are stored as `u16`.
pub const MAX_LEVELS: usize = 1 << 16;

/// A single image channel quantized to `levels` gray levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueChannel {
    width: u32,
    height: u32,
    levels: usize,
    values: Vec<u16>,
}

impl ValueChannel {
    /// Builds a channel from row-major level values.
    pub fn new(width: u32, height: u32, levels: usize, values: Vec<u16>) -> Result<Self> {
        if values.len() != (width as usize) * (height as usize) {
            return Err(Error::DimensionMismatch(format!(
                "{width}×{height} channel needs {} values, got {}",
                (width as usize) * (height as usize),
                values.len()
            )));
        }
        if levels == 0 || levels > MAX_LEVELS {
            return Err(Error::InvalidParameter(format!(
                "level count must be in [1, {MAX_LEVELS}] (got {levels})"
            )));
        }
        if values.iter().any(|&v| (v as usize) >= levels) {
            return Err(Error::InvalidParameter(format!(
                "channel contains a level outside [0, {})",
                levels
            )));
        }
        Ok(Self {
            width,
            height,
            levels,
            values,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of gray levels `l`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Row-major level values.
    pub fn values(&self) -> &[u16] {
        &self.values
    }

    /// Level at `(x, y)`.
    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.values[(y * self.width + x) as usize]
    }
}

/// Quantizes the V plane of an HSV image to `levels` gray levels, rounding
/// half away from zero.
pub fn quantize_value_channel(img: &HsvImage, levels: usize) -> Result<ValueChannel> {
    if levels < 2 || levels > MAX_LEVELS {
        return Err(Error::InvalidParameter(format!(
            "level count must be in [2, {MAX_LEVELS}] (got {levels})"
        )));
    }
    let scale = (levels - 1) as f64;
    let values = img
        .v_plane()
        .iter()
        .map(|&v| ((v * scale).round() as usize).min(levels - 1) as u16)
        .collect();
    ValueChannel::new(img.width(), img.height(), levels, values)
}

/// Gradient operator selection for [`gradient_channel_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientKind {
    /// Forward differences, L1 magnitude (the default).
    #[default]
    ForwardDiff,
    /// 3×3 Sobel kernels with replicated borders, L1 magnitude scaled by
    /// the kernel weight sum.
    Sobel,
}

/// Per-pixel gradient magnitude of a level channel.
///
/// Forward differences `dx = s(x+1,y) − s(x,y)` and `dy = s(x,y+1) − s(x,y)`
/// (zero on the last column/row) are combined as `|dx| + |dy|` and clamped
/// to the channel's level range.
pub fn gradient_channel(s: &ValueChannel) -> ValueChannel {
    gradient_channel_with(s, GradientKind::ForwardDiff)
}

/// [`gradient_channel`] with an explicit gradient operator.
pub fn gradient_channel_with(s: &ValueChannel, kind: GradientKind) -> ValueChannel {
    let (w, h) = (s.width, s.height);
    let max = (s.levels - 1) as i32;
    let mut values = Vec::with_capacity(s.values.len());
    match kind {
        GradientKind::ForwardDiff => {
            for y in 0..h {
                for x in 0..w {
                    let here = s.get(x, y) as i32;
                    let dx = if x + 1 < w {
                        s.get(x + 1, y) as i32 - here
                    } else {
                        0
                    };
                    let dy = if y + 1 < h {
                        s.get(x, y + 1) as i32 - here
                    } else {
                        0
                    };
                    values.push((dx.abs() + dy.abs()).min(max) as u16);
                }
            }
        }
        GradientKind::Sobel => {
            let at = |x: i64, y: i64| -> i32 {
                let x = x.clamp(0, w as i64 - 1) as u32;
                let y = y.clamp(0, h as i64 - 1) as u32;
                s.get(x, y) as i32
            };
            for y in 0..h as i64 {
                for x in 0..w as i64 {
                    let gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1))
                        - (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
                    let gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1))
                        - (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
                    let mag = ((gx.abs() + gy.abs()) as f64 / 4.0).round() as i32;
                    values.push(mag.min(max) as u16);
                }
            }
        }
    }
    ValueChannel {
        width: w,
        height: h,
        levels: s.levels,
        values,
    }
}
