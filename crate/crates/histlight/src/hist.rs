//! Histogram-domain primitives.
//!
//! A gray channel with `l` levels is summarized by a [`CountHistogram`]
//! (pixels per level) and a [`LocationVector`] (the normalized intensity of
//! each bin). Given histograms for reflectance and illumination, the
//! functions here build the expected pair-count matrix, the matrix of
//! composed bin locations, the map from each pair cell to its nearest
//! source bin, and the per-cell weights; accumulating pair counts through
//! the index map recomposes an estimate of the source histogram without
//! ever touching pixels.

use crate::channel::ValueChannel;
use crate::error::{Error, Result};

/// Per-level pixel counts for a gray channel, together with the declared
/// pixel count `N`.
///
/// Bin masses are reals: the optimizer produces fractional masses, and
/// renormalization rescales them so they still sum to `N`. A histogram is
/// called normalized when `|Σ bins − N| ≤ 1e−6 · N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountHistogram {
    pub(crate) bins: Vec<f64>,
    pub(crate) total: f64,
}

impl CountHistogram {
    /// Builds a histogram from explicit bin masses and a declared pixel
    /// count.
    pub fn new(bins: Vec<f64>, total: f64) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::EmptyInput("histogram bins"));
        }
        if bins.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidParameter(
                "histogram bins must be finite and non-negative".into(),
            ));
        }
        if !total.is_finite() || total < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "histogram total must be finite and non-negative (got {total})"
            )));
        }
        Ok(Self { bins, total })
    }

    /// The bin masses.
    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    /// The declared pixel count `N`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Number of gray levels `l`.
    pub fn levels(&self) -> usize {
        self.bins.len()
    }

    /// Actual mass `Σ bins`, which can drift from [`total`](Self::total)
    /// between renormalizations.
    pub fn sum(&self) -> f64 {
        self.bins.iter().sum()
    }

    /// Whether the actual mass matches the declared total within
    /// `1e−6 · N`.
    pub fn is_normalized(&self) -> bool {
        (self.sum() - self.total).abs() <= 1e-6 * self.total
    }
}

/// Normalized intensity of each histogram bin, strictly increasing within
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationVector {
    pub(crate) locs: Vec<f64>,
}

impl LocationVector {
    /// Builds a location vector, rejecting values outside `[0, 1]` or any
    /// non-increasing step.
    pub fn new(locs: Vec<f64>) -> Result<Self> {
        if locs.is_empty() {
            return Err(Error::EmptyInput("location vector"));
        }
        if locs.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::InvalidParameter(
                "bin locations must lie in [0, 1]".into(),
            ));
        }
        if locs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "bin locations must be strictly increasing".into(),
            ));
        }
        Ok(Self { locs })
    }

    /// The bin locations.
    pub fn locs(&self) -> &[f64] {
        &self.locs
    }

    /// Number of bins.
    pub fn levels(&self) -> usize {
        self.locs.len()
    }
}

/// What an `l×l` pair matrix holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairKind {
    /// Expected pair counts `hR_i · hL_j / N`; carries the shared pixel
    /// count `N` of the histograms it was built from.
    Count { total: f64 },
    /// Products of bin locations, each in `[0, 1]`.
    Location,
}

/// Dense `l×l` matrix over (reflectance level `i`, illumination level `j`)
/// pairs. Rows index reflectance, columns index illumination.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    pub(crate) cells: Vec<f64>,
    pub(crate) levels: usize,
    pub(crate) kind: PairKind,
}

impl PairMatrix {
    /// Cell at reflectance row `i`, illumination column `j`.
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.levels + j]
    }

    /// Row-major cell storage.
    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// Matrix side length `l`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// What the cells hold.
    pub fn kind(&self) -> PairKind {
        self.kind
    }

    /// Sum of all cells.
    pub fn mass(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub(crate) fn expect_count(&self) -> Result<f64> {
        match self.kind {
            PairKind::Count { total } => Ok(total),
            PairKind::Location => Err(Error::KindMismatch { expected: "count" }),
        }
    }

    pub(crate) fn expect_location(&self) -> Result<()> {
        match self.kind {
            PairKind::Location => Ok(()),
            PairKind::Count { .. } => Err(Error::KindMismatch {
                expected: "location",
            }),
        }
    }
}

/// For each pair cell, the source bin whose location is nearest the cell's
/// composed location.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexMap {
    pub(crate) idx: Vec<usize>,
    pub(crate) levels: usize,
}

impl IndexMap {
    /// Target bin for cell `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.idx[i * self.levels + j]
    }

    /// Row-major index storage.
    pub fn indices(&self) -> &[usize] {
        &self.idx
    }

    /// Matrix side length `l`.
    pub fn levels(&self) -> usize {
        self.levels
    }
}

/// Per-cell share of its target bin's total pair mass; each bin's shares
/// sum to 1, and cells feeding an empty bin carry weight 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub(crate) w: Vec<f64>,
    pub(crate) levels: usize,
}

impl WeightMatrix {
    /// Weight of cell `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.levels + j]
    }

    /// Row-major weight storage.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Matrix side length `l`.
    pub fn levels(&self) -> usize {
        self.levels
    }
}

/// Counts how many pixels fall in each of `levels` bins.
///
/// Every channel value must already be a level in `[0, levels)`.
pub fn compute_count_histogram(channel: &ValueChannel, levels: usize) -> Result<CountHistogram> {
    if channel.values().is_empty() {
        return Err(Error::EmptyInput("value channel"));
    }
    if levels == 0 {
        return Err(Error::InvalidParameter("level count must be positive".into()));
    }
    let mut bins = vec![0.0f64; levels];
    for &v in channel.values() {
        let v = v as usize;
        if v >= levels {
            return Err(Error::InvalidParameter(format!(
                "channel level {v} out of range for {levels} bins"
            )));
        }
        bins[v] += 1.0;
    }
    let total = channel.values().len() as f64;
    Ok(CountHistogram { bins, total })
}

/// Divides each bin by the declared total, yielding the probability of
/// each gray level.
pub fn normalize_to_probability(h: &CountHistogram) -> Result<Vec<f64>> {
    if h.total <= 0.0 {
        return Err(Error::DegenerateHistogram(
            "cannot normalize a histogram with zero total",
        ));
    }
    Ok(h.bins.iter().map(|b| b / h.total).collect())
}

/// Evenly spaced bin locations `k/(l−1)`, spanning `[0, 1]`.
pub fn uniform_locations(levels: usize) -> Result<LocationVector> {
    if levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 levels for bin locations (got {levels})"
        )));
    }
    let scale = (levels - 1) as f64;
    let locs = (0..levels).map(|k| k as f64 / scale).collect();
    Ok(LocationVector { locs })
}

/// Expected number of pixels taking each (reflectance, illumination) level
/// pair: `cells[i][j] = hR_i · hL_j / N`.
///
/// Both histograms must share the same level count and declared total.
pub fn pair_count_matrix(
    reflectance: &CountHistogram,
    illumination: &CountHistogram,
) -> Result<PairMatrix> {
    let l = reflectance.levels();
    if illumination.levels() != l {
        return Err(Error::DimensionMismatch(format!(
            "reflectance has {l} levels, illumination has {}",
            illumination.levels()
        )));
    }
    if reflectance.total != illumination.total {
        return Err(Error::DimensionMismatch(format!(
            "histogram totals differ: {} vs {}",
            reflectance.total, illumination.total
        )));
    }
    let n = reflectance.total;
    if n <= 0.0 {
        return Err(Error::DegenerateHistogram(
            "pair counts need a positive pixel count",
        ));
    }
    let mut cells = Vec::with_capacity(l * l);
    for &r in &reflectance.bins {
        for &c in &illumination.bins {
            cells.push(r * c / n);
        }
    }
    Ok(PairMatrix {
        cells,
        levels: l,
        kind: PairKind::Count { total: n },
    })
}

/// Composed intensity of each level pair: `cells[i][j] = bR_i · bL_j`,
/// the normalized intensity a pixel would take if reflectance level `i`
/// met illumination level `j`.
pub fn pair_location_matrix(
    reflectance_locs: &LocationVector,
    illumination_locs: &LocationVector,
) -> Result<PairMatrix> {
    let l = reflectance_locs.levels();
    if illumination_locs.levels() != l {
        return Err(Error::DimensionMismatch(format!(
            "location vectors differ in length: {l} vs {}",
            illumination_locs.levels()
        )));
    }
    let mut cells = Vec::with_capacity(l * l);
    for &r in &reflectance_locs.locs {
        for &c in &illumination_locs.locs {
            cells.push(r * c);
        }
    }
    Ok(PairMatrix {
        cells,
        levels: l,
        kind: PairKind::Location,
    })
}

/// Index of the value in a non-decreasing slice nearest to `target`,
/// breaking distance ties toward the smaller index and returning the first
/// occurrence when equal values repeat.
pub(crate) fn nearest_index(values: &[f64], target: f64) -> usize {
    debug_assert!(!values.is_empty());
    let p = values.partition_point(|v| *v < target);
    let best = if p == values.len() {
        p - 1
    } else if p == 0 {
        0
    } else {
        let below = target - values[p - 1];
        let above = values[p] - target;
        if above < below {
            p
        } else {
            p - 1
        }
    };
    // Rewind duplicate runs so ties land on the smallest index.
    values.partition_point(|v| *v < values[best])
}

/// Maps every pair cell to the source bin whose location is nearest the
/// cell's composed location, ties going to the smaller bin.
pub fn build_index_map(
    location_matrix: &PairMatrix,
    source_locs: &LocationVector,
) -> Result<IndexMap> {
    location_matrix.expect_location()?;
    let l = location_matrix.levels;
    if source_locs.levels() != l {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {l}×{l} but source has {} bins",
            source_locs.levels()
        )));
    }
    let idx = location_matrix
        .cells
        .iter()
        .map(|&v| nearest_index(&source_locs.locs, v))
        .collect();
    Ok(IndexMap { idx, levels: l })
}

/// Total pair mass landing in each source bin.
fn bin_masses(count_matrix: &PairMatrix, index: &IndexMap) -> Vec<f64> {
    let mut mass = vec![0.0f64; count_matrix.levels];
    for (cell, &k) in count_matrix.cells.iter().zip(&index.idx) {
        mass[k] += cell;
    }
    mass
}

/// Each cell's share of the total pair mass mapped to its bin.
///
/// Cells whose target bin carries no mass get weight 0, which keeps the
/// division defined; all other bins' weights partition to 1.
pub fn compute_weights(count_matrix: &PairMatrix, index: &IndexMap) -> Result<WeightMatrix> {
    count_matrix.expect_count()?;
    let l = count_matrix.levels;
    if index.levels != l {
        return Err(Error::DimensionMismatch(format!(
            "count matrix is {l}×{l} but index map is {}×{}",
            index.levels, index.levels
        )));
    }
    let mass = bin_masses(count_matrix, index);
    let w = count_matrix
        .cells
        .iter()
        .zip(&index.idx)
        .map(|(&cell, &k)| if mass[k] > 0.0 { cell / mass[k] } else { 0.0 })
        .collect();
    Ok(WeightMatrix { w, levels: l })
}

/// Recomposes a source-histogram estimate by accumulating every pair
/// cell's expected count into its target bin.
///
/// Mass is conserved: the output sums to the count matrix's total mass.
pub fn estimate_histogram(count_matrix: &PairMatrix, index: &IndexMap) -> Result<CountHistogram> {
    let n = count_matrix.expect_count()?;
    let l = count_matrix.levels;
    if index.levels != l {
        return Err(Error::DimensionMismatch(format!(
            "count matrix is {l}×{l} but index map is {}×{}",
            index.levels, index.levels
        )));
    }
    let bins = bin_masses(count_matrix, index);
    Ok(CountHistogram { bins, total: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn channel(values: Vec<u16>, levels: usize) -> ValueChannel {
        ValueChannel::new(values.len() as u32, 1, levels, values).unwrap()
    }

    #[test]
    fn count_histogram_single_level() {
        let h = compute_count_histogram(&channel(vec![0, 0, 0, 0], 4), 4).unwrap();
        assert_eq!(h.bins(), &[4.0, 0.0, 0.0, 0.0]);
        assert_eq!(h.total(), 4.0);
    }

    #[test]
    fn count_histogram_permutation() {
        let h = compute_count_histogram(&channel(vec![2, 0, 3, 1], 4), 4).unwrap();
        assert_eq!(h.bins(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn count_histogram_matches_counting_oracle() {
        let values: Vec<u16> = vec![3, 7, 1, 0, 3, 3, 5, 2, 7, 7, 7, 4, 0, 1, 6, 5];
        let h = compute_count_histogram(&channel(values.clone(), 8), 8).unwrap();
        for level in 0..8u16 {
            let expected = values.iter().filter(|v| **v == level).count() as f64;
            assert_eq!(h.bins()[level as usize], expected);
        }
        assert_eq!(h.sum(), 16.0);
    }

    #[test]
    fn count_histogram_rejects_empty_and_out_of_range() {
        let empty = ValueChannel::new(0, 0, 4, vec![]).unwrap();
        assert!(matches!(
            compute_count_histogram(&empty, 4),
            Err(Error::EmptyInput(_))
        ));
        assert!(compute_count_histogram(&channel(vec![5], 8), 4).is_err());
    }

    #[test]
    fn normalize_divides_by_total() {
        let h = CountHistogram::new(vec![4.0, 0.0, 0.0, 0.0], 4.0).unwrap();
        assert_eq!(normalize_to_probability(&h).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let h = CountHistogram::new(vec![3.0, 1.0], 4.0).unwrap();
        assert_eq!(normalize_to_probability(&h).unwrap(), vec![0.75, 0.25]);
    }

    #[test]
    fn normalize_rejects_zero_total() {
        let h = CountHistogram::new(vec![0.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            normalize_to_probability(&h),
            Err(Error::DegenerateHistogram(_))
        ));
    }

    #[test]
    fn uniform_locations_span_unit_interval() {
        assert_eq!(uniform_locations(2).unwrap().locs(), &[0.0, 1.0]);
        assert_eq!(uniform_locations(3).unwrap().locs(), &[0.0, 0.5, 1.0]);
        let b = uniform_locations(256).unwrap();
        assert_eq!(b.locs()[128], 128.0 / 255.0);
        assert!(uniform_locations(1).is_err());
    }

    #[test]
    fn location_vector_rejects_non_increasing() {
        assert!(LocationVector::new(vec![1.0, 1.0, 1.0]).is_err());
        assert!(LocationVector::new(vec![0.0, 0.5, 0.4]).is_err());
        assert!(LocationVector::new(vec![0.0, 1.5]).is_err());
    }

    #[test]
    fn pair_count_outer_product() {
        let hr = CountHistogram::new(vec![3.0, 1.0], 4.0).unwrap();
        let hl = CountHistogram::new(vec![2.0, 2.0], 4.0).unwrap();
        let m = pair_count_matrix(&hr, &hl).unwrap();
        assert_eq!(m.cells(), &[1.5, 1.5, 0.5, 0.5]);
        assert_eq!(m.mass(), 4.0);
    }

    #[test]
    fn pair_count_spike_times_spike() {
        let l = 5;
        let mut r = vec![0.0; l];
        r[0] = 10.0;
        let mut c = vec![0.0; l];
        c[l - 1] = 10.0;
        let hr = CountHistogram::new(r, 10.0).unwrap();
        let hl = CountHistogram::new(c, 10.0).unwrap();
        let m = pair_count_matrix(&hr, &hl).unwrap();
        for i in 0..l {
            for j in 0..l {
                let expected = if i == 0 && j == l - 1 { 10.0 } else { 0.0 };
                assert_eq!(m.cell(i, j), expected);
            }
        }
    }

    #[test]
    fn pair_count_rejects_mismatches() {
        let a = CountHistogram::new(vec![1.0, 1.0], 2.0).unwrap();
        let b = CountHistogram::new(vec![1.0, 1.0, 1.0], 3.0).unwrap();
        assert!(pair_count_matrix(&a, &b).is_err());
        let c = CountHistogram::new(vec![2.0, 2.0], 4.0).unwrap();
        assert!(pair_count_matrix(&a, &c).is_err());
    }

    #[test]
    fn pair_location_products() {
        let b = uniform_locations(3).unwrap();
        let m = pair_location_matrix(&b, &b).unwrap();
        assert_eq!(
            m.cells(),
            &[0.0, 0.0, 0.0, 0.0, 0.25, 0.5, 0.0, 0.5, 1.0]
        );
        // Top reflectance row multiplies illumination locations by 1.
        for j in 0..3 {
            assert_eq!(m.cell(2, j), b.locs()[j]);
        }
    }

    #[test]
    fn nearest_index_prefers_smaller_on_ties() {
        let locs = uniform_locations(3).unwrap();
        assert_eq!(nearest_index(locs.locs(), 0.25), 0);
        assert_eq!(nearest_index(locs.locs(), 0.26), 1);
        assert_eq!(nearest_index(locs.locs(), 0.74), 1);
        assert_eq!(nearest_index(locs.locs(), 0.76), 2);
        assert_eq!(nearest_index(locs.locs(), 1.0), 2);
        assert_eq!(nearest_index(locs.locs(), -0.5), 0);
        assert_eq!(nearest_index(locs.locs(), 2.0), 2);
    }

    #[test]
    fn nearest_index_lands_on_first_of_duplicate_run() {
        let values = [0.0, 0.25, 0.25, 0.25, 1.0];
        assert_eq!(nearest_index(&values, 0.25), 1);
        assert_eq!(nearest_index(&values, 0.26), 1);
        assert_eq!(nearest_index(&values, 0.24), 1);
        // 0.625 is exactly equidistant from 0.25 and 1.0; the tie must
        // fall to the smaller index, which rewinds to the run's start.
        assert_eq!(nearest_index(&values, 0.625), 1);
    }

    #[test]
    fn index_map_examples() {
        let b = uniform_locations(3).unwrap();
        let m = pair_location_matrix(&b, &b).unwrap();
        let idx = build_index_map(&m, &b).unwrap();
        assert_eq!(idx.get(2, 2), 2);
        // Cell (1,1) = 0.25 is equidistant from bins 0 and 1; low index wins.
        assert_eq!(idx.get(1, 1), 0);
        assert_eq!(idx.get(2, 1), 1);

        let b = uniform_locations(256).unwrap();
        let m = pair_location_matrix(&b, &b).unwrap();
        let idx = build_index_map(&m, &b).unwrap();
        // Cell (255, 128) composes to exactly the bin-128 location.
        assert_eq!(idx.get(255, 128), 128);
    }

    #[test]
    fn index_map_requires_location_kind() {
        let h = CountHistogram::new(vec![1.0, 1.0], 2.0).unwrap();
        let counts = pair_count_matrix(&h, &h).unwrap();
        let b = uniform_locations(2).unwrap();
        assert!(matches!(
            build_index_map(&counts, &b),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn weights_partition_each_bin() {
        let hr = CountHistogram::new(vec![1.0, 1.0], 2.0).unwrap();
        let hl = CountHistogram::new(vec![1.0, 1.0], 2.0).unwrap();
        let counts = pair_count_matrix(&hr, &hl).unwrap();
        let b = uniform_locations(2).unwrap();
        let idx = build_index_map(&pair_location_matrix(&b, &b).unwrap(), &b).unwrap();
        // Cells (0,0), (0,1), (1,0) compose to 0; cell (1,1) composes to 1.
        let w = compute_weights(&counts, &idx).unwrap();
        assert!((w.get(0, 0) - 1.0 / 3.0).abs() < 1e-12);
        assert!((w.get(0, 1) - 1.0 / 3.0).abs() < 1e-12);
        assert!((w.get(1, 0) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(w.get(1, 1), 1.0);
    }

    #[test]
    fn weights_zero_for_empty_cells() {
        let hr = CountHistogram::new(vec![4.0, 0.0], 4.0).unwrap();
        let hl = CountHistogram::new(vec![0.0, 4.0], 4.0).unwrap();
        let counts = pair_count_matrix(&hr, &hl).unwrap();
        let b = uniform_locations(2).unwrap();
        let idx = build_index_map(&pair_location_matrix(&b, &b).unwrap(), &b).unwrap();
        let w = compute_weights(&counts, &idx).unwrap();
        // Only cell (0,1) has mass; it fully owns bin 0.
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(1, 1), 0.0);
        assert_eq!(w.get(0, 0), 0.0);
        assert_eq!(w.get(1, 0), 0.0);
    }

    #[test]
    fn estimate_spike_identity_reflectance() {
        let l = 8;
        let n = 64.0;
        let mut r = vec![0.0; l];
        r[l - 1] = n;
        for v in 0..l {
            let mut c = vec![0.0; l];
            c[v] = n;
            let hr = CountHistogram::new(r.clone(), n).unwrap();
            let hl = CountHistogram::new(c, n).unwrap();
            let counts = pair_count_matrix(&hr, &hl).unwrap();
            let b = uniform_locations(l).unwrap();
            let idx = build_index_map(&pair_location_matrix(&b, &b).unwrap(), &b).unwrap();
            let est = estimate_histogram(&counts, &idx).unwrap();
            let mut expected = vec![0.0; l];
            expected[v] = n;
            assert_eq!(est.bins(), &expected[..]);
        }
    }

    /// Brute-force recomposition: enumerate every pair, compose its
    /// location, scan all bins for the nearest (low tie), and accumulate.
    fn estimate_oracle(hr: &[f64], hl: &[f64], n: f64) -> Vec<f64> {
        let l = hr.len();
        let loc = |k: usize| k as f64 / (l - 1) as f64;
        let mut out = vec![0.0; l];
        for i in 0..l {
            for j in 0..l {
                let composed = loc(i) * loc(j);
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for k in 0..l {
                    let d = (composed - loc(k)).abs();
                    if d < best_d {
                        best_d = d;
                        best = k;
                    }
                }
                out[best] += hr[i] * hl[j] / n;
            }
        }
        out
    }

    #[test]
    fn estimate_matches_enumeration_oracle() {
        let hr = vec![1.0, 0.0, 2.0, 1.0];
        let hl = vec![2.0, 1.0, 1.0, 0.0];
        let n = 4.0;
        let a = CountHistogram::new(hr.clone(), n).unwrap();
        let b = CountHistogram::new(hl.clone(), n).unwrap();
        let counts = pair_count_matrix(&a, &b).unwrap();
        let locs = uniform_locations(4).unwrap();
        let idx = build_index_map(&pair_location_matrix(&locs, &locs).unwrap(), &locs).unwrap();
        let est = estimate_histogram(&counts, &idx).unwrap();
        let expected = estimate_oracle(&hr, &hl, n);
        for (got, want) in est.bins().iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
    }

    proptest! {
        #[test]
        fn prop_nearest_index_matches_linear_scan(
            mut values in proptest::collection::vec(0.0f64..=1.0, 1..40),
            target in -0.5f64..1.5,
        ) {
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let fast = nearest_index(&values, target);
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (k, v) in values.iter().enumerate() {
                let d = (v - target).abs();
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            prop_assert_eq!(fast, best);
        }

        #[test]
        fn prop_pair_count_mass_and_estimate_conservation(
            bins_r in proptest::collection::vec(0.0f64..50.0, 8),
            bins_l in proptest::collection::vec(0.0f64..50.0, 8),
        ) {
            let n = 100.0;
            // Rescale both to mass N so the matrix mass equals N too.
            let scale = |v: &[f64]| -> Option<Vec<f64>> {
                let s: f64 = v.iter().sum();
                if s <= 0.0 { return None; }
                Some(v.iter().map(|x| x * n / s).collect())
            };
            let (Some(r), Some(c)) = (scale(&bins_r), scale(&bins_l)) else {
                return Ok(());
            };
            let hr = CountHistogram::new(r, n).unwrap();
            let hl = CountHistogram::new(c, n).unwrap();
            let counts = pair_count_matrix(&hr, &hl).unwrap();
            prop_assert!((counts.mass() - n).abs() <= 1e-6 * n);

            let locs = uniform_locations(8).unwrap();
            let idx = build_index_map(&pair_location_matrix(&locs, &locs).unwrap(), &locs).unwrap();
            let est = estimate_histogram(&counts, &idx).unwrap();
            prop_assert!((est.sum() - counts.mass()).abs() <= 1e-9 * n);
            prop_assert!(est.is_normalized());
        }

        #[test]
        fn prop_weights_sum_to_one_per_fed_bin(
            bins_r in proptest::collection::vec(0.0f64..9.0, 6),
            bins_l in proptest::collection::vec(0.0f64..9.0, 6),
        ) {
            let n: f64 = bins_r.iter().sum();
            prop_assume!(n > 0.0 && bins_l.iter().sum::<f64>() > 0.0);
            let scale: f64 = n / bins_l.iter().sum::<f64>();
            let hl_bins: Vec<f64> = bins_l.iter().map(|x| x * scale).collect();
            let hr = CountHistogram::new(bins_r, n).unwrap();
            let hl = CountHistogram::new(hl_bins, n).unwrap();
            let counts = pair_count_matrix(&hr, &hl).unwrap();
            let locs = uniform_locations(6).unwrap();
            let idx = build_index_map(&pair_location_matrix(&locs, &locs).unwrap(), &locs).unwrap();
            let w = compute_weights(&counts, &idx).unwrap();

            let mut sums = vec![0.0f64; 6];
            let mut fed = vec![false; 6];
            for i in 0..6 {
                for j in 0..6 {
                    sums[idx.get(i, j)] += w.get(i, j);
                    if counts.cell(i, j) > 0.0 {
                        fed[idx.get(i, j)] = true;
                    }
                }
            }
            for k in 0..6 {
                if fed[k] {
                    prop_assert!((sums[k] - 1.0).abs() <= 1e-9);
                }
            }
        }

        #[test]
        fn prop_index_map_monotone_for_uniform_locations(l in 2usize..40) {
            let locs = uniform_locations(l).unwrap();
            let idx = build_index_map(&pair_location_matrix(&locs, &locs).unwrap(), &locs).unwrap();
            for i in 0..l {
                for j in 1..l {
                    prop_assert!(idx.get(i, j) >= idx.get(i, j - 1));
                    prop_assert!(idx.get(j, i) >= idx.get(j - 1, i));
                }
            }
        }
    }

    #[test]
    fn deterministic_rebuild() {
        let hr = CountHistogram::new(vec![5.0, 2.0, 0.0, 9.0], 16.0).unwrap();
        let hl = CountHistogram::new(vec![1.0, 7.0, 3.0, 5.0], 16.0).unwrap();
        let locs = uniform_locations(4).unwrap();
        let run = || {
            let counts = pair_count_matrix(&hr, &hl).unwrap();
            let idx =
                build_index_map(&pair_location_matrix(&locs, &locs).unwrap(), &locs).unwrap();
            let w = compute_weights(&counts, &idx).unwrap();
            let est = estimate_histogram(&counts, &idx).unwrap();
            (counts, idx, w, est)
        };
        assert_eq!(run(), run());
    }
}
