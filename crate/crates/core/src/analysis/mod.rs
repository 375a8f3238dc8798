//! Series runs: train, score every image, fit QE against percent change.

mod fit;
mod report;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use fit::{linear_fit, RegressionFit};
pub use report::{
    emit_report, load_report_json, render_csv, render_json, render_svg, ReportFormat,
    REPORT_SCHEMA_VERSION,
};

use crate::error::{Error, Result};
use crate::features::{extract_vectors, ExtractionStrategy};
use crate::imaging::{GrayImage, SeriesSpec};
use crate::som::{init_grid, quantization_error, train, SomConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingMode {
    /// Train once on the first image, score every image with the frozen map.
    #[default]
    ReferenceTrained,
    /// Train a fresh map on each image (seed + image position) and report the
    /// QE of that image against its own map.
    PerImage,
}

impl TrainingMode {
    pub fn name(self) -> &'static str {
        match self {
            TrainingMode::ReferenceTrained => "reference-trained",
            TrainingMode::PerImage => "per-image",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    /// 1-based position in the series.
    pub index: usize,
    pub delta_pct: f64,
    pub qe: f64,
    /// Wall time spent on this image; `None` once stripped for reproducible
    /// output.
    pub ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub series_id: String,
    /// Generator description, when the images came from one.
    pub spec: Option<SeriesSpec>,
    pub mode: TrainingMode,
    pub strategy: ExtractionStrategy,
    pub som: SomConfig,
    pub records: Vec<ImageRecord>,
    pub fit: RegressionFit,
    pub total_ms: Option<f64>,
}

impl SeriesResult {
    pub fn with_spec(mut self, spec: &SeriesSpec) -> Self {
        self.series_id = spec.kind.name().to_string();
        self.spec = Some(spec.clone());
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.series_id = id.into();
        self
    }

    /// Drops all wall-time fields so reports depend only on the inputs.
    pub fn without_timings(mut self) -> Self {
        self.total_ms = None;
        for r in &mut self.records {
            r.ms = None;
        }
        self
    }

    pub fn qe_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.qe).collect()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.records.windows(2).all(|w| w[1].qe > w[0].qe)
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Scores a series of images.
///
/// `som.dim` is replaced by the strategy's vector dimension. A single-image
/// series cannot be fitted and is reported as a degenerate fit with `n = 1`.
pub fn run_series(
    images: &[GrayImage],
    deltas: &[f64],
    som: SomConfig,
    strategy: ExtractionStrategy,
    mode: TrainingMode,
) -> Result<SeriesResult> {
    let first = images
        .first()
        .ok_or_else(|| Error::Input("series has no images".into()))?;
    if deltas.len() != images.len() {
        return Err(Error::Input(format!(
            "{} deltas for {} images",
            deltas.len(),
            images.len()
        )));
    }
    if let Some((i, img)) = images
        .iter()
        .enumerate()
        .find(|(_, img)| (img.width(), img.height()) != (first.width(), first.height()))
    {
        return Err(Error::Input(format!(
            "image {} is {}x{}, expected {}x{}",
            i + 1,
            img.width(),
            img.height(),
            first.width(),
            first.height()
        )));
    }
    let som = SomConfig {
        dim: strategy.dim(),
        ..som
    };
    som.validate()?;

    let total = Instant::now();
    let mut records = Vec::with_capacity(images.len());
    match mode {
        TrainingMode::ReferenceTrained => {
            let mut map = None;
            for (i, (img, &delta)) in images.iter().zip(deltas).enumerate() {
                let start = Instant::now();
                let data = extract_vectors(img, strategy)?;
                if map.is_none() {
                    map = Some(train(init_grid(som)?, &data)?);
                }
                let qe = quantization_error(map.as_ref().expect("trained above"), &data)?;
                records.push(ImageRecord {
                    index: i + 1,
                    delta_pct: delta,
                    qe,
                    ms: Some(elapsed_ms(start)),
                });
            }
        }
        TrainingMode::PerImage => {
            for (i, (img, &delta)) in images.iter().zip(deltas).enumerate() {
                let start = Instant::now();
                let data = extract_vectors(img, strategy)?;
                let cfg = SomConfig {
                    seed: som.seed.wrapping_add(i as u64),
                    ..som
                };
                let map = train(init_grid(cfg)?, &data)?;
                records.push(ImageRecord {
                    index: i + 1,
                    delta_pct: delta,
                    qe: quantization_error(&map, &data)?,
                    ms: Some(elapsed_ms(start)),
                });
            }
        }
    }

    let points: Vec<(f64, f64)> = records.iter().map(|r| (r.delta_pct, r.qe)).collect();
    let fit = if points.len() >= 2 {
        linear_fit(&points)?
    } else {
        RegressionFit {
            slope: 0.0,
            intercept: points[0].1,
            r2: 0.0,
            n: 1,
            degenerate: true,
        }
    };
    Ok(SeriesResult {
        series_id: "series".into(),
        spec: None,
        mode,
        strategy,
        som,
        records,
        fit,
        total_ms: Some(elapsed_ms(total)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{generate_series, SeriesKind};

    fn quick_som() -> SomConfig {
        SomConfig {
            iterations: 2_000,
            ..SomConfig::default()
        }
    }

    #[test]
    fn identical_images_give_degenerate_fit() {
        let img = GrayImage::new(16, 16, (0..256).map(|v| (v % 2 * 255) as u8).collect()).unwrap();
        let images = vec![img; 4];
        let res = run_series(
            &images,
            &[0.0, 1.0, 2.0, 3.0],
            quick_som(),
            ExtractionStrategy::default(),
            TrainingMode::ReferenceTrained,
        )
        .unwrap();
        let qe = res.qe_values();
        assert!(qe.iter().all(|q| *q == qe[0]));
        assert!(res.fit.degenerate);
    }

    #[test]
    fn input_errors() {
        let a = GrayImage::filled(8, 8, 0).unwrap();
        let b = GrayImage::filled(8, 9, 0).unwrap();
        let strategy = ExtractionStrategy::default();
        let mode = TrainingMode::ReferenceTrained;
        assert!(matches!(
            run_series(&[a.clone(), b], &[0.0, 1.0], quick_som(), strategy, mode),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            run_series(
                std::slice::from_ref(&a),
                &[0.0, 1.0],
                quick_som(),
                strategy,
                mode
            ),
            Err(Error::Input(_))
        ));
        assert!(run_series(&[], &[], quick_som(), strategy, mode).is_err());
    }

    #[test]
    fn single_image_is_reported() {
        let img = GrayImage::filled(8, 8, 255).unwrap();
        let res = run_series(
            &[img],
            &[0.0],
            quick_som(),
            ExtractionStrategy::default(),
            TrainingMode::PerImage,
        )
        .unwrap();
        assert_eq!(res.records.len(), 1);
        assert!(res.fit.degenerate);
    }

    #[test]
    fn deterministic_and_mode_specific() {
        let spec = SeriesSpec {
            width: 64,
            height: 64,
            ..SeriesSpec::new(SeriesKind::RandomBlack)
        };
        let series = generate_series(&spec).unwrap();
        for mode in [TrainingMode::ReferenceTrained, TrainingMode::PerImage] {
            let run = || {
                run_series(
                    &series.images,
                    series.deltas(),
                    quick_som(),
                    Default::default(),
                    mode,
                )
                .unwrap()
                .without_timings()
            };
            let a = run();
            assert_eq!(a, run());
            assert_eq!(a.mode, mode);
            assert_eq!(a.som.dim, 16);
            assert!(a.records.iter().all(|r| r.qe >= 0.0));
        }
    }
}
