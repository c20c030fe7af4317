//! Alternating optimization that splits a source-value histogram into
//! illumination and reflectance histograms.
//!
//! The objective scores a candidate pair by how well the recomposed pair
//! counts reproduce the source histogram, plus quadratic priors tying
//! illumination to the source histogram and reflectance to the gradient
//! histogram. Each coordinate update is the exact minimizer of that
//! objective in its own block, so the objective cannot increase across an
//! update; renormalization afterwards rescales both histograms back to
//! total mass `N`.

use crate::error::{Error, Result};
use crate::hist::{
    build_index_map, compute_weights, pair_count_matrix, pair_location_matrix, uniform_locations,
    CountHistogram, IndexMap, WeightMatrix,
};

/// Which printed form of the coordinate updates to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateForm {
    /// Stationary point of the objective: the per-cell weight multiplies
    /// the source-bin mass in the numerator. Guarantees per-coordinate
    /// descent. The default.
    #[default]
    GradientConsistent,
    /// Same update with the weight dividing instead of multiplying;
    /// zero-weight cells are skipped. Kept for comparison runs.
    PaperLiteral,
}

/// Tuning for [`decompose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptParams {
    /// Illumination prior weight; must be positive.
    pub alpha: f64,
    /// Reflectance prior weight; must be positive.
    pub beta: f64,
    /// Convergence threshold on the squared change of each histogram
    /// between iterations; must be positive.
    pub epsilon: f64,
    /// Maximum number of iterations; at least 1.
    pub max_iter: usize,
    /// Number of gray levels `l`.
    pub levels: usize,
    /// Update formula variant.
    pub update_form: UpdateForm,
}

impl OptParams {
    /// Default parameters for an image of `total` pixels:
    /// `α = β = 0.1`, `ε = 1e−3·N²`, 10 iterations, 256 levels.
    pub fn defaults(total: f64) -> Self {
        Self {
            alpha: 0.1,
            beta: 0.1,
            epsilon: 1e-3 * total * total,
            max_iter: 10,
            levels: 256,
            update_form: UpdateForm::GradientConsistent,
        }
    }

    /// Checks the parameter domain.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive (got {})",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive (got {})",
                self.beta
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive (got {})",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if self.levels < 2 {
            return Err(Error::InvalidParameter(format!(
                "levels must be at least 2 (got {})",
                self.levels
            )));
        }
        Ok(())
    }
}

/// Entries appended to the objective trace per iteration: the objective at
/// the iteration start (under that iteration's weights), after the
/// reflectance update, and after the illumination update.
pub const TRACE_ENTRIES_PER_ITERATION: usize = 3;

/// Output of [`decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    /// Illumination histogram, renormalized to total mass `N`.
    pub illumination: CountHistogram,
    /// Reflectance histogram, renormalized to total mass `N`.
    pub reflectance: CountHistogram,
    /// Objective values, [`TRACE_ENTRIES_PER_ITERATION`] per iteration.
    pub objective_trace: Vec<f64>,
    /// Iterations actually performed.
    pub iterations: usize,
}

fn check_same_shape(a: &CountHistogram, b: &CountHistogram, what: &str) -> Result<()> {
    if a.levels() != b.levels() {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {} vs {} levels",
            a.levels(),
            b.levels()
        )));
    }
    if a.total() != b.total() {
        return Err(Error::DimensionMismatch(format!(
            "{what}: totals {} vs {}",
            a.total(),
            b.total()
        )));
    }
    Ok(())
}

fn check_grid(levels: usize, index: &IndexMap, weights: &WeightMatrix) -> Result<()> {
    if index.levels() != levels || weights.levels() != levels {
        return Err(Error::DimensionMismatch(format!(
            "index map {}×{} and weights {}×{} must match {levels} levels",
            index.levels(),
            index.levels(),
            weights.levels(),
            weights.levels()
        )));
    }
    Ok(())
}

/// Objective value for a candidate (reflectance, illumination) pair:
/// recomposition fidelity per cell plus the two quadratic priors.
pub fn objective(
    reflectance: &CountHistogram,
    illumination: &CountHistogram,
    source: &CountHistogram,
    gradient: &CountHistogram,
    weights: &WeightMatrix,
    index: &IndexMap,
    params: &OptParams,
) -> Result<f64> {
    check_same_shape(reflectance, illumination, "reflectance vs illumination")?;
    check_same_shape(reflectance, source, "reflectance vs source")?;
    check_same_shape(reflectance, gradient, "reflectance vs gradient")?;
    let l = reflectance.levels();
    check_grid(l, index, weights)?;
    let n = source.total();

    let mut fidelity = 0.0;
    for i in 0..l {
        let r = reflectance.bins[i];
        let row = i * l;
        for j in 0..l {
            let k = index.indices()[row + j];
            let d = r * illumination.bins[j] / n - weights.weights()[row + j] * source.bins[k];
            fidelity += d * d;
        }
    }
    let mut illum_prior = 0.0;
    for j in 0..l {
        let d = illumination.bins[j] - source.bins[j];
        illum_prior += d * d;
    }
    let mut refl_prior = 0.0;
    for i in 0..l {
        let d = reflectance.bins[i] - gradient.bins[i];
        refl_prior += d * d;
    }
    Ok(fidelity + params.alpha * illum_prior + params.beta * refl_prior)
}

/// One illumination update: for each level `j`, the exact minimizer of the
/// objective over that coordinate with reflectance and weights held fixed.
pub fn update_illumination(
    reflectance: &CountHistogram,
    source: &CountHistogram,
    weights: &WeightMatrix,
    index: &IndexMap,
    params: &OptParams,
) -> Result<CountHistogram> {
    params.validate()?;
    check_same_shape(reflectance, source, "reflectance vs source")?;
    let l = reflectance.levels();
    check_grid(l, index, weights)?;
    let n = source.total();
    if n <= 0.0 {
        return Err(Error::DegenerateHistogram("update needs a positive pixel count"));
    }

    let denom = reflectance.bins.iter().map(|r| r * r).sum::<f64>() / (n * n) + params.alpha;
    let mut fidelity = vec![0.0f64; l];
    for i in 0..l {
        let r = reflectance.bins[i];
        let row = i * l;
        for j in 0..l {
            let k = index.indices()[row + j];
            let w = weights.weights()[row + j];
            match params.update_form {
                UpdateForm::GradientConsistent => {
                    fidelity[j] += r * w * source.bins[k] / n;
                }
                UpdateForm::PaperLiteral => {
                    if w > 0.0 {
                        fidelity[j] += r * source.bins[k] / (n * w);
                    }
                }
            }
        }
    }
    let bins = (0..l)
        .map(|j| ((fidelity[j] + params.alpha * source.bins[j]) / denom).max(0.0))
        .collect();
    Ok(CountHistogram { bins, total: n })
}

/// One reflectance update: for each level `i`, the exact minimizer of the
/// objective over that coordinate with illumination and weights held
/// fixed. The fidelity term reads the source histogram through the index
/// map; the prior pulls toward the gradient histogram.
pub fn update_reflectance(
    illumination: &CountHistogram,
    source: &CountHistogram,
    gradient: &CountHistogram,
    weights: &WeightMatrix,
    index: &IndexMap,
    params: &OptParams,
) -> Result<CountHistogram> {
    params.validate()?;
    check_same_shape(illumination, source, "illumination vs source")?;
    check_same_shape(illumination, gradient, "illumination vs gradient")?;
    let l = illumination.levels();
    check_grid(l, index, weights)?;
    let n = source.total();
    if n <= 0.0 {
        return Err(Error::DegenerateHistogram("update needs a positive pixel count"));
    }

    let denom = illumination.bins.iter().map(|c| c * c).sum::<f64>() / (n * n) + params.beta;
    let mut bins = Vec::with_capacity(l);
    for i in 0..l {
        let row = i * l;
        let mut fidelity = 0.0;
        for j in 0..l {
            let k = index.indices()[row + j];
            let w = weights.weights()[row + j];
            match params.update_form {
                UpdateForm::GradientConsistent => {
                    fidelity += illumination.bins[j] * w * source.bins[k] / n;
                }
                UpdateForm::PaperLiteral => {
                    if w > 0.0 {
                        fidelity += illumination.bins[j] * source.bins[k] / (n * w);
                    }
                }
            }
        }
        bins.push(((fidelity + params.beta * gradient.bins[i]) / denom).max(0.0));
    }
    Ok(CountHistogram { bins, total: n })
}

/// Rescales bins so they sum to the declared total `N`.
pub fn renormalize(h: &CountHistogram) -> Result<CountHistogram> {
    let sum = h.sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateHistogram(
            "cannot renormalize a histogram with no mass",
        ));
    }
    let scale = h.total() / sum;
    Ok(CountHistogram {
        bins: h.bins.iter().map(|b| b * scale).collect(),
        total: h.total,
    })
}

fn squared_change(a: &CountHistogram, b: &CountHistogram) -> f64 {
    a.bins
        .iter()
        .zip(&b.bins)
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Splits a source-value histogram into illumination and reflectance
/// histograms by alternating exact coordinate updates.
///
/// Reflectance starts from the renormalized gradient histogram and
/// illumination from the source histogram. Each iteration recomputes the
/// pair-count weights from the current pair, updates reflectance, then
/// illumination, renormalizes both, and stops once both squared changes
/// fall within `epsilon` or `max_iter` is reached.
pub fn decompose(
    source: &CountHistogram,
    gradient: &CountHistogram,
    params: &OptParams,
) -> Result<DecompositionResult> {
    params.validate()?;
    check_same_shape(source, gradient, "source vs gradient")?;
    if source.levels() != params.levels {
        return Err(Error::DimensionMismatch(format!(
            "histograms have {} levels but params expect {}",
            source.levels(),
            params.levels
        )));
    }

    let locs = uniform_locations(params.levels)?;
    let location_matrix = pair_location_matrix(&locs, &locs)?;
    let index = build_index_map(&location_matrix, &locs)?;

    let mut reflectance = renormalize(gradient)?;
    let mut illumination = source.clone();
    let mut trace = Vec::with_capacity(TRACE_ENTRIES_PER_ITERATION * params.max_iter);
    let mut iterations = 0;

    for _ in 0..params.max_iter {
        let counts = pair_count_matrix(&reflectance, &illumination)?;
        let weights = compute_weights(&counts, &index)?;

        trace.push(objective(
            &reflectance,
            &illumination,
            source,
            gradient,
            &weights,
            &index,
            params,
        )?);
        let new_reflectance =
            update_reflectance(&illumination, source, gradient, &weights, &index, params)?;
        trace.push(objective(
            &new_reflectance,
            &illumination,
            source,
            gradient,
            &weights,
            &index,
            params,
        )?);
        let new_illumination =
            update_illumination(&new_reflectance, source, &weights, &index, params)?;
        trace.push(objective(
            &new_reflectance,
            &new_illumination,
            source,
            gradient,
            &weights,
            &index,
            params,
        )?);

        let next_reflectance = renormalize(&new_reflectance)?;
        let next_illumination = renormalize(&new_illumination)?;
        let refl_change = squared_change(&next_reflectance, &reflectance);
        let illum_change = squared_change(&next_illumination, &illumination);
        reflectance = next_reflectance;
        illumination = next_illumination;
        iterations += 1;

        if refl_change <= params.epsilon && illum_change <= params.epsilon {
            break;
        }
    }

    Ok(DecompositionResult {
        illumination,
        reflectance,
        objective_trace: trace,
        iterations,
    })
}
