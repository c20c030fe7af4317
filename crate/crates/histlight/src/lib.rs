//! Low-light image enhancement by Retinex decomposition carried out
//! entirely in the histogram domain.
//!
//! The pipeline converts an image to HSV, histograms its value channel
//! and the channel's gradient image, and splits the value histogram into
//! illumination and reflectance histograms by alternating closed-form
//! updates ([`opt::decompose`]). Brightening then happens on histograms,
//! not pixels: illumination bin locations are gamma-lifted and the pair
//! counts re-aggregated ([`reprocess`]), and the enhanced histogram is
//! realized by classic histogram matching ([`remap`]). The optimization
//! cost depends on the number of gray levels, never on the pixel count,
//! so enhancement cost is nearly resolution-independent.
//!
//! ```
//! use histlight::{enhance, GammaParam, OptParams, synth};
//!
//! let img = synth::dark_gradient(64, 48);
//! let params = OptParams { levels: 64, ..OptParams::defaults((64 * 48) as f64) };
//! let bright = enhance(&img, &params, GammaParam::default()).unwrap();
//! assert_eq!(bright.dimensions(), img.dimensions());
//! ```

pub mod channel;
pub mod color;
pub mod error;
pub mod hist;
pub mod metrics;
pub mod opt;
pub mod pipeline;
pub mod remap;
pub mod reprocess;
pub mod synth;

pub use channel::{gradient_channel, gradient_channel_with, quantize_value_channel, GradientKind,
    ValueChannel};
pub use color::{hsv_to_rgb, rgb_to_hsv, HsvImage};
pub use error::{Error, Result};
pub use hist::{
    build_index_map, compute_count_histogram, compute_weights, estimate_histogram,
    normalize_to_probability, pair_count_matrix, pair_location_matrix, uniform_locations,
    CountHistogram, IndexMap, LocationVector, PairKind, PairMatrix, WeightMatrix,
};
pub use metrics::{capped_psnr, loe, psnr, report, ssim, MetricReport, PSNR_REPORT_CAP_DB};
pub use opt::{
    decompose, objective, renormalize, update_illumination, update_reflectance,
    DecompositionResult, OptParams, UpdateForm, TRACE_ENTRIES_PER_ITERATION,
};
pub use pipeline::{
    apply_value_histogram, enhance, enhance_with, image_histograms, load_rgb, resize_nearest,
    save_rgb, EnhanceOutcome, ImageHistograms,
};
pub use remap::{equalize_mapping, histogram_equalize, histogram_match, match_mapping};
pub use reprocess::{
    adjusted_pair_location_matrix, brighten_value_histogram, build_enhanced_index_map,
    enhanced_histogram, gamma_locations, GammaParam,
};

pub use image::RgbImage;
