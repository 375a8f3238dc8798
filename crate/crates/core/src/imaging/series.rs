//! The five bilevel contrast series.
//!
//! Every series is described by a [`SeriesSpec`]; deltas are percentage
//! points of total image area. Random placements come from a ChaCha8
//! generator on its own stream ([`PLACEMENT_STREAM`]), so image content never
//! shares random draws with map training even when both use the same seed.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{load_image, measure_white_fraction, save_image, GrayImage, ImageFormat, BLACK, WHITE};
use crate::error::{Error, Result};

/// ChaCha stream id used for pixel placement.
pub const PLACEMENT_STREAM: u64 = 0x5EED_1A6E;

/// File name of the series manifest written next to the images.
pub const MANIFEST_FILE: &str = "series.json";

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    /// Random white pixels added to a black ground.
    RandomWhite,
    /// Random black pixels added to a white ground.
    RandomBlack,
    /// Growing number of white cells in a checker layout.
    CheckerCount,
    /// Growing side of one white square per cell.
    CheckerSize,
    /// Growing central white square.
    CentralSquare,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 5] = [
        SeriesKind::RandomWhite,
        SeriesKind::RandomBlack,
        SeriesKind::CheckerCount,
        SeriesKind::CheckerSize,
        SeriesKind::CentralSquare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::RandomWhite => "random-white",
            SeriesKind::RandomBlack => "random-black",
            SeriesKind::CheckerCount => "checker-count",
            SeriesKind::CheckerSize => "checker-size",
            SeriesKind::CentralSquare => "central-square",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, SeriesKind::RandomWhite | SeriesKind::RandomBlack)
    }

    pub fn default_deltas(self) -> Vec<f64> {
        match self {
            SeriesKind::RandomWhite => vec![0.0, 10.0, 22.5, 35.0, 47.5, 60.0],
            SeriesKind::RandomBlack => vec![0.0, 20.0, 30.0],
            SeriesKind::CheckerCount => (1..=9).map(|i| 8.0 * i as f64).collect(),
            SeriesKind::CheckerSize => (1..=9).map(|i| 2.0 * i as f64).collect(),
            SeriesKind::CentralSquare => vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
        }
    }

    pub fn default_cells(self) -> usize {
        match self {
            SeriesKind::CheckerSize => 3,
            _ => 5,
        }
    }
}

impl std::fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Declarative description of one synthetic series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub kind: SeriesKind,
    pub width: usize,
    pub height: usize,
    /// One entry per image, in percentage points of image area.
    pub deltas: Vec<f64>,
    /// Foreground percentage of the reference image (random kinds only).
    pub baseline_density: f64,
    /// Cells per side (checker kinds only).
    pub cells: usize,
    pub seed: u64,
}

impl SeriesSpec {
    pub const DEFAULT_WIDTH: usize = 792;
    pub const DEFAULT_HEIGHT: usize = 777;
    pub const DEFAULT_BASELINE: f64 = 20.0;
    pub const DEFAULT_SEED: u64 = 1;

    pub fn new(kind: SeriesKind) -> Self {
        SeriesSpec {
            kind,
            width: Self::DEFAULT_WIDTH,
            height: Self::DEFAULT_HEIGHT,
            deltas: kind.default_deltas(),
            baseline_density: Self::DEFAULT_BASELINE,
            cells: kind.default_cells(),
            seed: Self::DEFAULT_SEED,
        }
    }

    pub fn count(&self) -> usize {
        self.deltas.len()
    }

    fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.width == 0 || self.height == 0 {
            return cfg(format!(
                "image size must be positive, got {}x{}",
                self.width, self.height
            ));
        }
        if self.deltas.is_empty() {
            return cfg("a series needs at least one delta".into());
        }
        if self.deltas.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return cfg(format!(
                "deltas must be finite and non-negative: {:?}",
                self.deltas
            ));
        }
        if self.deltas.windows(2).any(|w| w[1] < w[0]) {
            return cfg(format!("deltas must be non-decreasing: {:?}", self.deltas));
        }
        if self.kind.is_random() {
            if self.deltas[0] != 0.0 {
                return cfg("the first delta of a random series must be 0".into());
            }
            if !(0.0..=100.0).contains(&self.baseline_density) {
                return cfg(format!(
                    "baseline density {} is not a percentage",
                    self.baseline_density
                ));
            }
            let last = self.baseline_density + self.deltas[self.deltas.len() - 1];
            if last > 100.0 {
                return cfg(format!("target foreground {last}% exceeds 100%"));
            }
        } else if let Some(d) = self.deltas.iter().find(|d| **d > 100.0) {
            return cfg(format!("delta {d}% exceeds 100%"));
        }
        if matches!(
            self.kind,
            SeriesKind::CheckerCount | SeriesKind::CheckerSize
        ) && (self.cells == 0 || self.cells > self.width || self.cells > self.height)
        {
            return cfg(format!(
                "{} cells per side do not fit a {}x{} image",
                self.cells, self.width, self.height
            ));
        }
        Ok(())
    }
}

/// Per-image bookkeeping recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEntry {
    /// 1-based position in the series.
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub delta_pct: f64,
    /// White percentage the generator aimed for, after rounding to whole
    /// pixels, cells or square sides.
    pub target_white_pct: f64,
    pub measured_white_pct: f64,
    /// Number of white cells (checker-count only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub white_cells: Option<usize>,
    /// Square side in pixels (checker-size and central-square only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_px: Option<usize>,
    /// Set when the requested delta had to be rounded to a representable
    /// value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GeneratedSeries {
    pub spec: SeriesSpec,
    pub images: Vec<GrayImage>,
    pub entries: Vec<ImageEntry>,
}

/// JSON description of a series written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesManifest {
    pub schema_version: u32,
    pub kind: SeriesKind,
    pub seed: u64,
    pub count: usize,
    pub spec: SeriesSpec,
    pub images: Vec<ImageEntry>,
}

impl GeneratedSeries {
    pub fn deltas(&self) -> &[f64] {
        &self.spec.deltas
    }

    pub fn manifest(&self) -> SeriesManifest {
        SeriesManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            kind: self.spec.kind,
            seed: self.spec.seed,
            count: self.images.len(),
            spec: self.spec.clone(),
            images: self.entries.clone(),
        }
    }

    /// Writes every image plus [`MANIFEST_FILE`] into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, format: ImageFormat) -> Result<SeriesManifest> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut manifest = self.manifest();
        for (image, entry) in self.images.iter().zip(&mut manifest.images) {
            let name = format!(
                "{}_{:02}.{}",
                self.spec.kind,
                entry.index,
                format.extension()
            );
            save_image(image, dir.join(&name))?;
            entry.file = Some(name);
        }
        manifest.save(dir.join(MANIFEST_FILE))?;
        Ok(manifest)
    }
}

impl SeriesManifest {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: SeriesManifest = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        if manifest.images.len() != manifest.count {
            return Err(Error::Input(format!(
                "manifest lists {} images but declares count {}",
                manifest.images.len(),
                manifest.count
            )));
        }
        Ok(manifest)
    }

    /// Resolves a manifest path or a directory containing [`MANIFEST_FILE`].
    pub fn locate(path: impl AsRef<Path>) -> PathBuf {
        let path = path.as_ref();
        if path.is_dir() {
            path.join(MANIFEST_FILE)
        } else {
            path.to_path_buf()
        }
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.images.iter().map(|e| e.delta_pct).collect()
    }

    /// Loads the listed images, resolving file names against `dir`.
    pub fn load_images(&self, dir: impl AsRef<Path>) -> Result<Vec<GrayImage>> {
        let dir = dir.as_ref();
        self.images
            .iter()
            .map(|entry| {
                let file = entry.file.as_ref().ok_or_else(|| {
                    Error::Input(format!("manifest entry {} has no file name", entry.index))
                })?;
                load_image(dir.join(file))
            })
            .collect()
    }
}

/// Dispatches on `spec.kind`.
pub fn generate_series(spec: &SeriesSpec) -> Result<GeneratedSeries> {
    match spec.kind {
        SeriesKind::RandomWhite | SeriesKind::RandomBlack => gen_random_contrast_series(spec),
        SeriesKind::CheckerCount => gen_checker_count_series(spec),
        SeriesKind::CheckerSize => gen_checker_size_series(spec),
        SeriesKind::CentralSquare => gen_central_square_series(spec),
    }
}

fn expect_kind(spec: &SeriesSpec, ok: bool) -> Result<()> {
    if !ok {
        return Err(Error::Config(format!(
            "generator does not produce {} series",
            spec.kind
        )));
    }
    spec.validate()
}

fn finish(
    spec: &SeriesSpec,
    images: Vec<GrayImage>,
    mut entries: Vec<ImageEntry>,
) -> GeneratedSeries {
    for (image, entry) in images.iter().zip(&mut entries) {
        entry.measured_white_pct = measure_white_fraction(image);
    }
    GeneratedSeries {
        spec: spec.clone(),
        images,
        entries,
    }
}

fn pct(count: usize, area: usize) -> f64 {
    100.0 * count as f64 / area as f64
}

/// Reference plus cumulative random additions. Foreground is white on black
/// for [`SeriesKind::RandomWhite`] and black on white for
/// [`SeriesKind::RandomBlack`].
pub fn gen_random_contrast_series(spec: &SeriesSpec) -> Result<GeneratedSeries> {
    expect_kind(spec, spec.kind.is_random())?;
    let (ground, fg) = match spec.kind {
        SeriesKind::RandomWhite => (BLACK, WHITE),
        _ => (WHITE, BLACK),
    };
    let area = spec.area();
    let counts: Vec<usize> = spec
        .deltas
        .iter()
        .map(|d| (((spec.baseline_density + d) / 100.0) * area as f64).round() as usize)
        .map(|c| c.min(area))
        .collect();
    let max = counts.iter().copied().max().unwrap_or(0);

    // A shared prefix of one random permutation makes every image a
    // superset of the one before it.
    let mut rng = placement_rng(spec.seed);
    let mut positions: Vec<u32> = (0..area as u32).collect();
    let (chosen, _) = positions.partial_shuffle(&mut rng, max);

    let mut images = Vec::with_capacity(counts.len());
    let mut entries = Vec::with_capacity(counts.len());
    let mut image = GrayImage::filled(spec.width, spec.height, ground)?;
    let mut painted = 0;
    for (i, (&count, &delta)) in counts.iter().zip(&spec.deltas).enumerate() {
        for &p in &chosen[painted..count] {
            image.pixels_mut()[p as usize] = fg;
        }
        painted = count;
        images.push(image.clone());
        let white = if fg == WHITE { count } else { area - count };
        entries.push(ImageEntry {
            index: i + 1,
            file: None,
            delta_pct: delta,
            target_white_pct: pct(white, area),
            measured_white_pct: 0.0,
            white_cells: None,
            side_px: None,
            note: None,
        });
    }
    Ok(finish(spec, images, entries))
}

/// Order in which checker cells turn white: cells with even `row + col` in
/// row-major order, then the odd ones.
pub fn checker_cell_order(cells: usize) -> Vec<(usize, usize)> {
    let all = (0..cells).flat_map(|r| (0..cells).map(move |c| (r, c)));
    let even = all.clone().filter(|(r, c)| (r + c) % 2 == 0);
    let odd = all.filter(|(r, c)| (r + c) % 2 == 1);
    even.chain(odd).collect()
}

/// Pixel span `[start, end)` of cell `index` when `extent` pixels are split
/// into `cells` parts; the last part absorbs the remainder.
fn cell_span(extent: usize, cells: usize, index: usize) -> (usize, usize) {
    let base = extent / cells;
    let start = index * base;
    let end = if index + 1 == cells {
        extent
    } else {
        start + base
    };
    (start, end)
}

pub fn gen_checker_count_series(spec: &SeriesSpec) -> Result<GeneratedSeries> {
    expect_kind(spec, spec.kind == SeriesKind::CheckerCount)?;
    let total_cells = spec.cells * spec.cells;
    let order = checker_cell_order(spec.cells);
    let area = spec.area();

    let mut images = Vec::new();
    let mut entries = Vec::new();
    for (i, &delta) in spec.deltas.iter().enumerate() {
        let exact = delta / 100.0 * total_cells as f64;
        let n = (exact.round() as usize).min(total_cells);
        let mut image = GrayImage::filled(spec.width, spec.height, BLACK)?;
        let mut white = 0;
        for &(r, c) in &order[..n] {
            let (x0, x1) = cell_span(spec.width, spec.cells, c);
            let (y0, y1) = cell_span(spec.height, spec.cells, r);
            image.fill_rect(x0, y0, x1, y1, WHITE);
            white += (x1 - x0) * (y1 - y0);
        }
        let note = ((exact - n as f64).abs() > 1e-9)
            .then(|| format!("{delta}% is {exact:.3} cells of {total_cells}; rounded to {n}"));
        images.push(image);
        entries.push(ImageEntry {
            index: i + 1,
            file: None,
            delta_pct: delta,
            target_white_pct: pct(white, area),
            measured_white_pct: 0.0,
            white_cells: Some(n),
            side_px: None,
            note,
        });
    }
    Ok(finish(spec, images, entries))
}

pub fn gen_checker_size_series(spec: &SeriesSpec) -> Result<GeneratedSeries> {
    expect_kind(spec, spec.kind == SeriesKind::CheckerSize)?;
    let cells = spec.cells;
    let cell_w = spec.width / cells;
    let cell_h = spec.height / cells;
    let area = spec.area();

    let mut images = Vec::new();
    let mut entries = Vec::new();
    for (i, &delta) in spec.deltas.iter().enumerate() {
        let side = (delta / 100.0 * area as f64 / (cells * cells) as f64)
            .sqrt()
            .round() as usize;
        if side > cell_w.min(cell_h) {
            return Err(Error::Config(format!(
                "{delta}% needs squares of side {side}, larger than the {cell_w}x{cell_h} cells"
            )));
        }
        let mut image = GrayImage::filled(spec.width, spec.height, BLACK)?;
        for r in 0..cells {
            for c in 0..cells {
                let (x0, x1) = cell_span(spec.width, cells, c);
                let (y0, y1) = cell_span(spec.height, cells, r);
                let left = x0 + (x1 - x0 - side) / 2;
                let top = y0 + (y1 - y0 - side) / 2;
                image.fill_rect(left, top, left + side, top + side, WHITE);
            }
        }
        images.push(image);
        entries.push(ImageEntry {
            index: i + 1,
            file: None,
            delta_pct: delta,
            target_white_pct: pct(cells * cells * side * side, area),
            measured_white_pct: 0.0,
            white_cells: None,
            side_px: Some(side),
            note: None,
        });
    }
    Ok(finish(spec, images, entries))
}

pub fn gen_central_square_series(spec: &SeriesSpec) -> Result<GeneratedSeries> {
    expect_kind(spec, spec.kind == SeriesKind::CentralSquare)?;
    let area = spec.area();
    let (cx, cy) = (spec.width / 2, spec.height / 2);

    let mut images = Vec::new();
    let mut entries = Vec::new();
    for (i, &delta) in spec.deltas.iter().enumerate() {
        let side = (delta / 100.0 * area as f64).sqrt().round() as usize;
        if side > spec.width.min(spec.height) {
            return Err(Error::Config(format!(
                "{delta}% needs a square of side {side}, larger than the {}x{} image",
                spec.width, spec.height
            )));
        }
        let left = cx - side / 2;
        let top = cy - side / 2;
        let mut image = GrayImage::filled(spec.width, spec.height, BLACK)?;
        image.fill_rect(left, top, left + side, top + side, WHITE);
        images.push(image);
        entries.push(ImageEntry {
            index: i + 1,
            file: None,
            delta_pct: delta,
            target_white_pct: pct(side * side, area),
            measured_white_pct: 0.0,
            white_cells: None,
            side_px: Some(side),
            note: None,
        });
    }
    Ok(finish(spec, images, entries))
}

fn placement_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PLACEMENT_STREAM);
    rng
}
