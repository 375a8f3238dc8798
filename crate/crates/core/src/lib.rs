//! Change detection in image time series from the quantization error of a
//! self-organizing map.
//!
//! A small Kohonen map is trained on the first (reference) image of a series.
//! Every image of the series is then scored against the frozen map, and the
//! mean distance of its feature vectors to their best-matching units (the
//! quantization error, QE) is used as a change indicator. A least-squares
//! line of QE against the percentage of changed content summarizes a series.
//!
//! Modules:
//!
//! - [`som`]: map initialization, online training, BMU search and QE.
//! - [`features`]: image to feature-vector extraction.
//! - [`imaging`]: PGM/PNG I/O and the five synthetic contrast series.
//! - [`analysis`]: series runs, linear fits and reports.
//! - [`cli`]: the `somqe` command-line driver.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod features;
pub mod imaging;
pub mod som;

pub use analysis::{linear_fit, run_series, RegressionFit, SeriesResult, TrainingMode};
pub use error::{Error, Result};
pub use features::{extract_vectors, ExtractionStrategy, FeatureDataset};
pub use imaging::{GrayImage, SeriesKind, SeriesSpec};
pub use som::{BmuResult, LatticeUnits, SomConfig, SomGrid};
