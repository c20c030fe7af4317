//! Level remapping: histogram matching and histogram equalization.

use crate::channel::ValueChannel;
use crate::error::{Error, Result};
use crate::hist::{compute_count_histogram, nearest_index, CountHistogram};

fn cdf(bins: &[f64], total: f64) -> Vec<f64> {
    let mut acc = 0.0;
    bins.iter()
        .map(|b| {
            acc += b;
            acc / total
        })
        .collect()
}

/// Level-to-level mapping that matches a source histogram to a target
/// histogram: each source level maps to the target bin whose cumulative
/// mass is nearest the source level's cumulative mass, ties going to the
/// smaller bin. The mapping is non-decreasing.
pub fn match_mapping(source: &CountHistogram, target: &CountHistogram) -> Result<Vec<u16>> {
    if source.levels() != target.levels() {
        return Err(Error::DimensionMismatch(format!(
            "source has {} levels, target has {}",
            source.levels(),
            target.levels()
        )));
    }
    let target_mass = target.sum();
    if !(target_mass > 0.0) {
        return Err(Error::DegenerateHistogram(
            "matching target has no mass",
        ));
    }
    let source_mass = source.sum();
    if !(source_mass > 0.0) {
        return Err(Error::DegenerateHistogram(
            "matching source has no mass",
        ));
    }
    if (target_mass - source_mass).abs() > 1e-6 * source_mass {
        return Err(Error::DimensionMismatch(format!(
            "target mass {target_mass} does not match source mass {source_mass}"
        )));
    }
    let source_cdf = cdf(source.bins(), source_mass);
    let target_cdf = cdf(target.bins(), target_mass);
    Ok(source_cdf
        .iter()
        .map(|&c| nearest_index(&target_cdf, c) as u16)
        .collect())
}

/// Remaps a channel so its histogram approximates `target`.
pub fn histogram_match(s: &ValueChannel, target: &CountHistogram) -> Result<ValueChannel> {
    let source = compute_count_histogram(s, s.levels())?;
    let mapping = match_mapping(&source, target)?;
    let values = s.values().iter().map(|&v| mapping[v as usize]).collect();
    ValueChannel::new(s.width(), s.height(), s.levels(), values)
}

/// Classic equalization transform per level: `t_v = round((l−1)·CDF(v))`.
pub fn equalize_mapping(hist: &CountHistogram) -> Result<Vec<u16>> {
    let mass = hist.sum();
    if !(mass > 0.0) {
        return Err(Error::DegenerateHistogram("equalization needs mass"));
    }
    let l = hist.levels();
    let scale = (l - 1) as f64;
    Ok(cdf(hist.bins(), mass)
        .iter()
        .map(|&c| ((c * scale).round() as usize).min(l - 1) as u16)
        .collect())
}

/// Spreads a channel's levels toward a uniform histogram.
pub fn histogram_equalize(s: &ValueChannel) -> Result<ValueChannel> {
    let hist = compute_count_histogram(s, s.levels())?;
    let mapping = equalize_mapping(&hist)?;
    let values = s.values().iter().map(|&v| mapping[v as usize]).collect();
    ValueChannel::new(s.width(), s.height(), s.levels(), values)
}
