//! Image to [`FeatureDataset`] conversion.
//!
//! Intensities are divided by 255 so bilevel images map to exactly 0.0 and
//! 1.0. Vectors are emitted in row-major scan order for every strategy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::GrayImage;
pub use crate::som::FeatureDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ExtractionStrategy {
    /// One 1-D vector per pixel.
    PixelScalar,
    /// Non-overlapping `k x k` blocks flattened row-major; partial blocks at
    /// the right and bottom edges are dropped.
    Patch { k: usize },
    /// `(x, y, intensity)` per pixel, coordinates scaled to `[0, 1]`.
    PixelPosition,
}

impl ExtractionStrategy {
    pub const DEFAULT_PATCH: usize = 4;

    pub fn dim(&self) -> usize {
        match self {
            ExtractionStrategy::PixelScalar => 1,
            ExtractionStrategy::Patch { k } => k * k,
            ExtractionStrategy::PixelPosition => 3,
        }
    }

    /// Short label used in reports, e.g. `patch4`.
    pub fn label(&self) -> String {
        match self {
            ExtractionStrategy::PixelScalar => "pixel-scalar".into(),
            ExtractionStrategy::Patch { k } => format!("patch{k}"),
            ExtractionStrategy::PixelPosition => "pixel-position".into(),
        }
    }
}

impl Default for ExtractionStrategy {
    fn default() -> Self {
        ExtractionStrategy::Patch {
            k: Self::DEFAULT_PATCH,
        }
    }
}

pub fn extract_vectors(image: &GrayImage, strategy: ExtractionStrategy) -> Result<FeatureDataset> {
    let (w, h) = (image.width(), image.height());
    let px = image.pixels();
    let norm = |v: u8| f64::from(v) / 255.0;
    match strategy {
        ExtractionStrategy::PixelScalar => {
            FeatureDataset::new(1, px.iter().copied().map(norm).collect())
        }
        ExtractionStrategy::Patch { k } => {
            if k == 0 || k > w.min(h) {
                return Err(Error::Input(format!(
                    "patch size {k} does not fit a {w}x{h} image"
                )));
            }
            let (bw, bh) = (w / k, h / k);
            let mut data = Vec::with_capacity(bw * bh * k * k);
            for by in 0..bh {
                for bx in 0..bw {
                    for y in by * k..(by + 1) * k {
                        let row = &px[y * w + bx * k..y * w + (bx + 1) * k];
                        data.extend(row.iter().copied().map(norm));
                    }
                }
            }
            FeatureDataset::new(k * k, data)
        }
        ExtractionStrategy::PixelPosition => {
            let scale = |v: usize, extent: usize| {
                if extent > 1 {
                    v as f64 / (extent - 1) as f64
                } else {
                    0.0
                }
            };
            let mut data = Vec::with_capacity(w * h * 3);
            for y in 0..h {
                for x in 0..w {
                    data.extend([scale(x, w), scale(y, h), norm(px[y * w + x])]);
                }
            }
            FeatureDataset::new(3, data)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn image(w: usize, h: usize, pixels: Vec<u8>) -> GrayImage {
        GrayImage::new(w, h, pixels).unwrap()
    }

    #[test]
    fn patch4_on_default_geometry() {
        let img = GrayImage::filled(792, 777, 0).unwrap();
        let ds = extract_vectors(&img, ExtractionStrategy::Patch { k: 4 }).unwrap();
        assert_eq!(ds.len(), 198 * 194);
        assert_eq!(ds.len(), 38_412);
        assert_eq!(ds.dim(), 16);
    }

    #[test]
    fn black_pixels_are_zero() {
        let ds = extract_vectors(
            &GrayImage::filled(3, 2, 0).unwrap(),
            ExtractionStrategy::PixelScalar,
        )
        .unwrap();
        assert!(ds.iter().all(|v| v == [0.0]));
    }

    #[test]
    fn single_white_patch() {
        let ds = extract_vectors(
            &GrayImage::filled(4, 4, 255).unwrap(),
            ExtractionStrategy::default(),
        )
        .unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.vector(0), &[1.0; 16]);
    }

    #[test]
    fn patch_layout_is_row_major() {
        // 4x2 image, two 2x2 patches.
        let img = image(4, 2, vec![0, 51, 102, 153, 204, 255, 0, 51]);
        let ds = extract_vectors(&img, ExtractionStrategy::Patch { k: 2 }).unwrap();
        assert_eq!(ds.vector(0), &[0.0, 0.2, 0.8, 1.0]);
        assert_eq!(ds.vector(1), &[0.4, 0.6, 0.0, 0.2]);
    }

    #[test]
    fn position_features() {
        let img = image(3, 1, vec![0, 255, 0]);
        let ds = extract_vectors(&img, ExtractionStrategy::PixelPosition).unwrap();
        assert_eq!(ds.vector(1), &[0.5, 0.0, 1.0]);
        assert_eq!(ds.vector(2), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn oversized_patch_rejected() {
        let img = GrayImage::filled(3, 5, 0).unwrap();
        assert!(matches!(
            extract_vectors(&img, ExtractionStrategy::Patch { k: 4 }),
            Err(Error::Input(_))
        ));
        assert!(extract_vectors(&img, ExtractionStrategy::Patch { k: 0 }).is_err());
    }

    fn arb_image() -> impl Strategy<Value = GrayImage> {
        (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), w * h)
                .prop_map(move |px| GrayImage::new(w, h, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn vector_counts(img in arb_image(), k in 1usize..5) {
            let n = img.width() * img.height();
            prop_assert_eq!(extract_vectors(&img, ExtractionStrategy::PixelScalar).unwrap().len(), n);
            prop_assert_eq!(extract_vectors(&img, ExtractionStrategy::PixelPosition).unwrap().len(), n);
            if k <= img.width().min(img.height()) {
                let ds = extract_vectors(&img, ExtractionStrategy::Patch { k }).unwrap();
                prop_assert_eq!(ds.len(), (img.width() / k) * (img.height() / k));
                prop_assert!(ds.as_flat().iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }

        #[test]
        fn patch1_equals_scalar(img in arb_image()) {
            let a = extract_vectors(&img, ExtractionStrategy::Patch { k: 1 }).unwrap();
            let b = extract_vectors(&img, ExtractionStrategy::PixelScalar).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
