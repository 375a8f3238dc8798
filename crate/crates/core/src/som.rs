//! Rectangular Kohonen map with online training and quantization-error
//! scoring.
//!
//! One ChaCha8 stream, seeded from [`SomConfig::seed`], drives the whole run:
//! [`init_grid`] draws the initial weights from it and [`train`] keeps drawing
//! sample indices from where initialization stopped. A grid therefore carries
//! its generator state along with its weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate system in which lattice distances, and hence the neighborhood
/// radius, are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeUnits {
    /// Unit coordinates are `(row, col) / (max(rows, cols) - 1)`, so the map
    /// spans `[0, 1]` along its longer side and the radius is a fraction of
    /// the map extent.
    #[default]
    Normalized,
    /// Integer `(row, col)` coordinates; adjacent units are 1 apart.
    Unit,
}

/// Map geometry and training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SomConfig {
    pub rows: usize,
    pub cols: usize,
    /// Dimensionality of weight and input vectors.
    pub dim: usize,
    /// Neighborhood radius at step 0, measured in `lattice` coordinates.
    pub initial_radius: f64,
    /// Learning rate at step 0.
    pub initial_learning_rate: f64,
    pub iterations: u64,
    pub seed: u64,
    #[serde(default)]
    pub lattice: LatticeUnits,
}

impl SomConfig {
    pub const DEFAULT_ROWS: usize = 4;
    pub const DEFAULT_COLS: usize = 4;
    pub const DEFAULT_RADIUS: f64 = 1.2;
    pub const DEFAULT_LEARNING_RATE: f64 = 0.2;
    pub const DEFAULT_ITERATIONS: u64 = 10_000;
    pub const DEFAULT_SEED: u64 = 1;

    /// A 4x4 map with radius 1.2, learning rate 0.2 and 10,000 iterations.
    pub fn with_dim(dim: usize) -> Self {
        SomConfig {
            rows: Self::DEFAULT_ROWS,
            cols: Self::DEFAULT_COLS,
            dim,
            initial_radius: Self::DEFAULT_RADIUS,
            initial_learning_rate: Self::DEFAULT_LEARNING_RATE,
            iterations: Self::DEFAULT_ITERATIONS,
            seed: Self::DEFAULT_SEED,
            lattice: LatticeUnits::Normalized,
        }
    }

    /// Euclidean distance between units `a` and `b` (row-major indices) in
    /// the configured lattice coordinates.
    pub fn lattice_distance(&self, a: usize, b: usize) -> f64 {
        let scale = match self.lattice {
            LatticeUnits::Unit => 1.0,
            LatticeUnits::Normalized => 1.0 / (self.rows.max(self.cols).max(2) - 1) as f64,
        };
        let dr = (a / self.cols) as f64 - (b / self.cols) as f64;
        let dc = (a % self.cols) as f64 - (b % self.cols) as f64;
        (dr * dr + dc * dc).sqrt() * scale
    }

    pub fn units(&self) -> usize {
        self.rows * self.cols
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config(format!(
                "map must have at least one unit, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.dim == 0 {
            return Err(Error::Config("vector dimension must be positive".into()));
        }
        if !(self.initial_radius.is_finite() && self.initial_radius > 0.0) {
            return Err(Error::Config(format!(
                "initial radius must be positive, got {}",
                self.initial_radius
            )));
        }
        let lr = self.initial_learning_rate;
        if !(lr.is_finite() && lr > 0.0 && lr <= 1.0) {
            return Err(Error::Config(format!(
                "initial learning rate must lie in (0, 1], got {lr}"
            )));
        }
        Ok(())
    }
}

impl Default for SomConfig {
    fn default() -> Self {
        SomConfig::with_dim(16)
    }
}

/// A set of equal-length vectors with components in `[0, 1]`, stored flat in
/// row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDataset {
    dim: usize,
    data: Vec<f64>,
}

impl FeatureDataset {
    /// Builds a dataset from a flat buffer holding `data.len() / dim` vectors.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dataset dimension must be positive".into()));
        }
        if data.is_empty() {
            return Err(Error::Input("dataset is empty".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Input(format!(
                "buffer of {} values is not a whole number of {dim}-vectors",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Input(format!(
                "dataset component {bad} lies outside [0, 1]"
            )));
        }
        Ok(FeatureDataset { dim, data })
    }

    pub fn from_vectors(vectors: &[Vec<f64>]) -> Result<Self> {
        let dim = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Input("dataset is empty".into()))?;
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::Input(format!(
                "vector of length {} in a dataset of dimension {dim}",
                v.len()
            )));
        }
        FeatureDataset::new(dim, vectors.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn vector(&self, index: usize) -> &[f64] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }
}

/// Best-matching unit for one input vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmuResult {
    pub row: usize,
    pub col: usize,
    /// Euclidean distance between the input and the unit's weight.
    pub distance: f64,
}

/// The map: `rows * cols` weight vectors in row-major order, plus the state
/// of the generator that produced them.
#[derive(Debug, Clone)]
pub struct SomGrid {
    config: SomConfig,
    weights: Vec<f64>,
    rng: ChaCha8Rng,
}

impl PartialEq for SomGrid {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.weights == other.weights
    }
}

impl SomGrid {
    /// Wraps explicit weights. The generator starts fresh from `config.seed`,
    /// so training such a grid is deterministic but does not replay
    /// [`init_grid`]'s stream.
    pub fn from_weights(config: SomConfig, weights: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if weights.len() != config.units() * config.dim {
            return Err(Error::Input(format!(
                "expected {} weight components for a {}x{}x{} map, got {}",
                config.units() * config.dim,
                config.rows,
                config.cols,
                config.dim,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Input("weights must be finite".into()));
        }
        Ok(SomGrid {
            config,
            weights,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        })
    }

    pub fn config(&self) -> &SomConfig {
        &self.config
    }

    /// All weight components, unit after unit in row-major order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, row: usize, col: usize) -> &[f64] {
        self.unit(row * self.config.cols + col)
    }

    fn unit(&self, index: usize) -> &[f64] {
        let dim = self.config.dim;
        &self.weights[index * dim..(index + 1) * dim]
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.config.dim {
            return Err(Error::Input(format!(
                "vector dimension {dim} does not match map dimension {}",
                self.config.dim
            )));
        }
        Ok(())
    }

    /// Row-major index and squared distance of the nearest unit. Ties go to
    /// the lowest index.
    fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, w) in self.weights.chunks_exact(self.config.dim).enumerate() {
            let d2 = squared_distance(w, x);
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        best
    }
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Draws every weight component uniformly from `[0, 1)`.
pub fn init_grid(config: SomConfig) -> Result<SomGrid> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights = (0..config.units() * config.dim)
        .map(|_| rng.random::<f64>())
        .collect();
    Ok(SomGrid {
        config,
        weights,
        rng,
    })
}

pub fn find_bmu(grid: &SomGrid, x: &[f64]) -> Result<BmuResult> {
    grid.check_dim(x.len())?;
    let (index, d2) = grid.nearest(x);
    Ok(BmuResult {
        row: index / grid.config.cols,
        col: index % grid.config.cols,
        distance: d2.sqrt(),
    })
}

/// Gaussian neighborhood weight `exp(-d^2 / (2 r^2))`.
pub fn neighborhood_factor(grid_distance: f64, radius: f64) -> f64 {
    (-(grid_distance * grid_distance) / (2.0 * radius * radius)).exp()
}

/// Exponential decay `v * exp(-t / total)`, used for both learning rate and
/// radius.
pub fn decay_at(initial_value: f64, t: u64, total_iterations: u64) -> Result<f64> {
    if total_iterations == 0 {
        return Err(Error::Config(
            "decay needs a positive iteration count".into(),
        ));
    }
    if t > total_iterations {
        return Err(Error::Input(format!(
            "step {t} exceeds the {total_iterations}-step schedule"
        )));
    }
    Ok(initial_value * (-(t as f64) / total_iterations as f64).exp())
}

/// Runs `config.iterations` online updates and returns the trained grid.
pub fn train(grid: SomGrid, data: &FeatureDataset) -> Result<SomGrid> {
    train_with(grid, data, |_, _| {})
}

/// Like [`train`], calling `observe(t, &grid)` after every completed step
/// `t` (zero-based).
pub fn train_with<F>(mut grid: SomGrid, data: &FeatureDataset, mut observe: F) -> Result<SomGrid>
where
    F: FnMut(u64, &SomGrid),
{
    grid.check_dim(data.dim())?;
    if data.is_empty() {
        return Err(Error::Input("cannot train on an empty dataset".into()));
    }
    let cfg = grid.config;
    if cfg.iterations == 0 {
        return Ok(grid);
    }

    let units = cfg.units();
    let lattice: Vec<f64> = (0..units * units)
        .map(|k| cfg.lattice_distance(k / units, k % units))
        .collect();

    let n = data.len();
    let dim = cfg.dim;
    for t in 0..cfg.iterations {
        let alpha = decay_at(cfg.initial_learning_rate, t, cfg.iterations)?;
        let radius = decay_at(cfg.initial_radius, t, cfg.iterations)?;
        let x = data.vector(grid.rng.random_range(0..n));
        let (bmu, _) = grid.nearest(x);
        let from_bmu = &lattice[bmu * units..(bmu + 1) * units];
        for (j, w) in grid.weights.chunks_exact_mut(dim).enumerate() {
            let rate = alpha * neighborhood_factor(from_bmu[j], radius);
            for (wk, xk) in w.iter_mut().zip(x) {
                *wk += rate * (xk - *wk);
            }
        }
        observe(t, &grid);
    }
    Ok(grid)
}

/// Mean BMU distance over the dataset, accumulated in dataset order.
pub fn quantization_error(grid: &SomGrid, data: &FeatureDataset) -> Result<f64> {
    quantization_error_flat(grid, data.as_flat(), data.dim())
}

/// [`quantization_error`] over a raw row-major buffer of `dim`-vectors. Unlike
/// [`FeatureDataset`], the components are not restricted to `[0, 1]`.
pub fn quantization_error_flat(grid: &SomGrid, vectors: &[f64], dim: usize) -> Result<f64> {
    grid.check_dim(dim)?;
    if vectors.is_empty() || !vectors.len().is_multiple_of(dim) {
        return Err(Error::Input(format!(
            "need a non-empty whole number of {dim}-vectors, got {} values",
            vectors.len()
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for x in vectors.chunks_exact(dim) {
        sum += grid.nearest(x).1.sqrt();
        count += 1;
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_grid(weights: &[f64]) -> SomGrid {
        let config = SomConfig {
            rows: 1,
            cols: weights.len(),
            dim: 1,
            ..SomConfig::with_dim(1)
        };
        SomGrid::from_weights(config, weights.to_vec()).unwrap()
    }

    #[test]
    fn init_is_deterministic() {
        let cfg = SomConfig {
            seed: 7,
            ..SomConfig::default()
        };
        let a = init_grid(cfg).unwrap();
        let b = init_grid(cfg).unwrap();
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn init_shape_and_range() {
        let g = init_grid(SomConfig::with_dim(16)).unwrap();
        assert_eq!(g.weights().len(), 16 * 16);
        assert!(g.weights().iter().all(|w| (0.0..=1.0).contains(w)));

        let single = SomConfig {
            rows: 1,
            cols: 1,
            ..SomConfig::with_dim(1)
        };
        let g = init_grid(single).unwrap();
        assert_eq!(g.weights().len(), 1);
        assert!((0.0..=1.0).contains(&g.weights()[0]));
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = SomConfig::default();
        for bad in [
            SomConfig { rows: 0, ..base },
            SomConfig { cols: 0, ..base },
            SomConfig { dim: 0, ..base },
            SomConfig {
                initial_radius: 0.0,
                ..base
            },
            SomConfig {
                initial_learning_rate: 0.0,
                ..base
            },
            SomConfig {
                initial_learning_rate: 1.5,
                ..base
            },
        ] {
            assert!(matches!(init_grid(bad), Err(Error::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn bmu_hand_example() {
        let g = line_grid(&[0.0, 1.0]);
        let bmu = find_bmu(&g, &[0.9]).unwrap();
        assert_eq!((bmu.row, bmu.col), (0, 1));
        assert!((bmu.distance - 0.1).abs() < 1e-15);

        let exact = find_bmu(&g, &[0.0]).unwrap();
        assert_eq!((exact.col, exact.distance), (0, 0.0));
    }

    #[test]
    fn bmu_tie_goes_to_lowest_index() {
        let g = line_grid(&[0.25, 0.75, 0.25]);
        let bmu = find_bmu(&g, &[0.5]).unwrap();
        assert_eq!(bmu.col, 0);
    }

    #[test]
    fn bmu_dimension_mismatch() {
        let g = init_grid(SomConfig::default()).unwrap();
        assert!(matches!(find_bmu(&g, &[0.5; 3]), Err(Error::Input(_))));
    }

    #[test]
    fn neighborhood_values() {
        assert_eq!(neighborhood_factor(0.0, 1.2), 1.0);
        assert!((neighborhood_factor(1.2, 1.2) - (-0.5f64).exp()).abs() < 1e-15);
        // exp(-9 / 2.88)
        assert!((neighborhood_factor(3.0, 1.2) - 0.043_936_933_623_407_42).abs() < 1e-12);
    }

    #[test]
    fn decay_values() {
        assert_eq!(decay_at(0.2, 0, 10_000).unwrap(), 0.2);
        assert!((decay_at(0.2, 10_000, 10_000).unwrap() - 0.073_575_888_234_288_47).abs() < 1e-12);
        assert!((decay_at(1.2, 5_000, 10_000).unwrap() - 0.727_836_791_655_160_1).abs() < 1e-12);
        assert!(matches!(decay_at(0.2, 0, 0), Err(Error::Config(_))));
        assert!(matches!(decay_at(0.2, 11, 10), Err(Error::Input(_))));
    }

    #[test]
    fn lattice_distances() {
        let unit = SomConfig {
            lattice: LatticeUnits::Unit,
            ..SomConfig::default()
        };
        let norm = SomConfig::default();
        // (0,0) to (3,3) on a 4x4 map.
        assert!((unit.lattice_distance(0, 15) - 18f64.sqrt()).abs() < 1e-15);
        assert!((norm.lattice_distance(0, 15) - 2f64.sqrt()).abs() < 1e-12);
        assert!((norm.lattice_distance(0, 1) - 1.0 / 3.0).abs() < 1e-15);
        let single = SomConfig {
            rows: 1,
            cols: 1,
            ..norm
        };
        assert_eq!(single.lattice_distance(0, 0), 0.0);
    }

    #[test]
    fn zero_iterations_is_noop() {
        let cfg = SomConfig {
            iterations: 0,
            ..SomConfig::with_dim(2)
        };
        let g = init_grid(cfg).unwrap();
        let data = FeatureDataset::from_vectors(&[vec![0.1, 0.2]]).unwrap();
        let trained = train(g.clone(), &data).unwrap();
        assert_eq!(trained, g);
    }

    #[test]
    fn training_is_reproducible() {
        let cfg = SomConfig {
            iterations: 2_000,
            seed: 11,
            ..SomConfig::with_dim(3)
        };
        let data =
            FeatureDataset::from_vectors(&[vec![0.0, 0.5, 1.0], vec![1.0, 0.2, 0.3], vec![0.4; 3]])
                .unwrap();
        let a = train(init_grid(cfg).unwrap(), &data).unwrap();
        let b = train(init_grid(cfg).unwrap(), &data).unwrap();
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn training_converges_on_repeated_vector() {
        let v = vec![0.3, 0.9, 0.1, 0.6];
        let data = FeatureDataset::from_vectors(&vec![v.clone(); 8]).unwrap();
        let cfg = SomConfig::with_dim(4);
        let mut checkpoints = Vec::new();
        let trained = train_with(init_grid(cfg).unwrap(), &data, |t, g| {
            if (t + 1) % 100 == 0 {
                checkpoints.push(find_bmu(g, &v).unwrap().distance);
            }
        })
        .unwrap();
        assert!(find_bmu(&trained, &v).unwrap().distance < 0.01);
        assert!(checkpoints.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn training_errors() {
        let g = init_grid(SomConfig::with_dim(2)).unwrap();
        let wrong = FeatureDataset::from_vectors(&[vec![0.5; 3]]).unwrap();
        assert!(matches!(train(g, &wrong), Err(Error::Input(_))));
        assert!(FeatureDataset::new(2, vec![]).is_err());
    }

    #[test]
    fn qe_hand_examples() {
        let g = line_grid(&[0.0, 1.0]);
        let data = FeatureDataset::from_vectors(&[vec![0.1], vec![0.9]]).unwrap();
        assert!((quantization_error(&g, &data).unwrap() - 0.1).abs() < 1e-15);

        let on_weights = FeatureDataset::from_vectors(&[vec![1.0], vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(quantization_error(&g, &on_weights).unwrap(), 0.0);
    }

    #[test]
    fn dataset_rejects_out_of_range() {
        assert!(FeatureDataset::new(1, vec![1.5]).is_err());
        assert!(FeatureDataset::new(2, vec![0.5; 3]).is_err());
        assert!(FeatureDataset::from_vectors(&[vec![0.1], vec![0.1, 0.2]]).is_err());
    }

    proptest! {
        #[test]
        fn neighborhood_decreasing(a in 0.0f64..10.0, b in 0.0f64..10.0, r in 0.1f64..5.0) {
            prop_assume!(a < b);
            prop_assume!(neighborhood_factor(b, r) > 0.0);
            prop_assert!(neighborhood_factor(a, r) > neighborhood_factor(b, r));
        }

        #[test]
        fn decay_decreasing(v in 0.01f64..10.0, total in 1u64..100_000, s in 0u64..100_000) {
            let t = s % total;
            prop_assert!(decay_at(v, t, total).unwrap() > decay_at(v, t + 1, total).unwrap());
            prop_assert_eq!(decay_at(v, 0, total).unwrap(), v);
        }

        #[test]
        fn qe_nonnegative_and_order_invariant(
            seed in any::<u64>(),
            raw in proptest::collection::vec(proptest::collection::vec(0.0f64..=1.0, 3), 1..40),
        ) {
            let cfg = SomConfig { rows: 2, cols: 3, seed, ..SomConfig::with_dim(3) };
            let grid = init_grid(cfg).unwrap();
            let data = FeatureDataset::from_vectors(&raw).unwrap();
            let qe = quantization_error(&grid, &data).unwrap();
            prop_assert!(qe >= 0.0);
            let mut reversed = raw.clone();
            reversed.reverse();
            let qe_rev = quantization_error(&grid, &FeatureDataset::from_vectors(&reversed).unwrap()).unwrap();
            prop_assert!((qe - qe_rev).abs() <= 1e-12 * qe.max(f64::MIN_POSITIVE));
        }
    }
}
