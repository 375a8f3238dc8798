// The three ways of turning an image into training vectors.
//
// Run with `cargo run -p somqe --example feature_extraction`.

use somqe::features::{extract_vectors, ExtractionStrategy};
use somqe::imaging::GrayImage;

pub fn run_example() -> somqe::Result<()> {
    // 10x9 gradient; the partial 4x4 blocks on the right and bottom are dropped.
    let pixels = (0..90).map(|i| (i * 255 / 89) as u8).collect();
    let image = GrayImage::new(10, 9, pixels)?;

    for strategy in [
        ExtractionStrategy::PixelScalar,
        ExtractionStrategy::PixelPosition,
        ExtractionStrategy::Patch { k: 4 },
    ] {
        let data = extract_vectors(&image, strategy)?;
        let first: Vec<String> = data.vector(0).iter().map(|v| format!("{v:.3}")).collect();
        println!(
            "{:<15} {:>3} vectors of dim {:>2}, first [{}]",
            strategy.label(),
            data.len(),
            data.dim(),
            first.join(", ")
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> somqe::Result<()> {
    run_example()
}
