//! Illumination brightening carried out entirely in the histogram domain.
//!
//! Instead of touching pixels, the illumination bin locations are lifted
//! by a gamma curve, the pair location matrix and index map are rebuilt
//! against the lifted locations, and the converged pair counts are
//! re-aggregated into the enhanced-image histogram.

use crate::error::{Error, Result};
use crate::hist::{
    build_index_map, estimate_histogram, uniform_locations, CountHistogram, IndexMap,
    LocationVector, PairMatrix,
};

/// Brightening exponent; values below 1 would darken and are rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParam {
    gamma: f64,
}

impl GammaParam {
    /// Accepts any finite `gamma ≥ 1`.
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 1 (got {gamma})"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Whether this gamma leaves locations unchanged.
    pub fn is_identity(&self) -> bool {
        self.gamma == 1.0
    }
}

impl Default for GammaParam {
    /// The conventional display gamma, 2.2.
    fn default() -> Self {
        Self { gamma: 2.2 }
    }
}

/// Lifts every bin location to `loc^(1/γ)`, brightening the illumination
/// axis while preserving order. `γ = 1` returns the input unchanged.
pub fn gamma_locations(locations: &LocationVector, gamma: GammaParam) -> LocationVector {
    if gamma.is_identity() {
        return locations.clone();
    }
    let exponent = 1.0 / gamma.gamma;
    let locs = locations
        .locs()
        .iter()
        .map(|&x| x.powf(exponent).clamp(0.0, 1.0))
        .collect();
    LocationVector { locs }
}

/// Location pair matrix against the lifted illumination locations:
/// `cells[i][j] = bR_i · bLAdj_j`, rows indexing reflectance.
pub fn adjusted_pair_location_matrix(
    adjusted_illumination_locs: &LocationVector,
    reflectance_locs: &LocationVector,
) -> Result<PairMatrix> {
    crate::hist::pair_location_matrix(reflectance_locs, adjusted_illumination_locs)
}

/// Maps each adjusted pair cell to the nearest source bin; same contract
/// as the unadjusted index map.
pub fn build_enhanced_index_map(
    adjusted_location_matrix: &PairMatrix,
    source_locs: &LocationVector,
) -> Result<IndexMap> {
    build_index_map(adjusted_location_matrix, source_locs)
}

/// Aggregates converged pair counts through the adjusted index map into
/// the enhanced-image histogram. Mass is conserved.
pub fn enhanced_histogram(
    count_matrix: &PairMatrix,
    adjusted_index: &IndexMap,
) -> Result<CountHistogram> {
    estimate_histogram(count_matrix, adjusted_index)
}

/// Full reprocessing stage: from converged reflectance and illumination
/// histograms to the enhanced-image histogram for the given gamma.
pub fn brighten_value_histogram(
    reflectance: &CountHistogram,
    illumination: &CountHistogram,
    gamma: GammaParam,
) -> Result<CountHistogram> {
    let levels = reflectance.levels();
    let locs = uniform_locations(levels)?;
    let adjusted = gamma_locations(&locs, gamma);
    let matrix = adjusted_pair_location_matrix(&adjusted, &locs)?;
    let index = build_enhanced_index_map(&matrix, &locs)?;
    let counts = crate::hist::pair_count_matrix(reflectance, illumination)?;
    enhanced_histogram(&counts, &index)
}
