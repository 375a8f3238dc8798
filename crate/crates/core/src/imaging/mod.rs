//! Grayscale images, file I/O and the synthetic contrast series.

mod io;
mod series;

pub use io::{load_image, save_image, ImageFormat};
pub use series::{
    checker_cell_order, gen_central_square_series, gen_checker_count_series,
    gen_checker_size_series, gen_random_contrast_series, generate_series, GeneratedSeries,
    ImageEntry, SeriesKind, SeriesManifest, SeriesSpec, MANIFEST_FILE,
};

use crate::error::{Error, Result};

pub const BLACK: u8 = 0;
pub const WHITE: u8 = 255;

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Input(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::Input(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        GrayImage::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Sets every pixel of the half-open rectangle `[x0, x1) x [y0, y1)`.
    pub(crate) fn fill_rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, value: u8) {
        for y in y0..y1 {
            let row = y * self.width;
            self.data[row + x0..row + x1].fill(value);
        }
    }

    pub fn is_bilevel(&self) -> bool {
        self.data.iter().all(|&p| p == BLACK || p == WHITE)
    }

    pub fn count_value(&self, value: u8) -> usize {
        self.data.iter().filter(|&&p| p == value).count()
    }
}

/// Percentage of pixels at full white (255).
pub fn measure_white_fraction(image: &GrayImage) -> f64 {
    100.0 * image.count_value(WHITE) as f64 / image.pixels().len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_fraction_extremes() {
        assert_eq!(
            measure_white_fraction(&GrayImage::filled(7, 3, BLACK).unwrap()),
            0.0
        );
        assert_eq!(
            measure_white_fraction(&GrayImage::filled(7, 3, WHITE).unwrap()),
            100.0
        );
    }

    #[test]
    fn rejects_bad_buffers() {
        assert!(GrayImage::new(0, 3, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
    }

    #[test]
    fn gray_levels_are_not_bilevel() {
        let img = GrayImage::new(2, 1, vec![0, 128]).unwrap();
        assert!(!img.is_bilevel());
    }
}
