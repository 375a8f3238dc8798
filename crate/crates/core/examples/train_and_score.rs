// Train a 4x4 map on one image's patches, then score a changed image with it.
//
// Run with `cargo run -p somqe --example train_and_score`.

use somqe::features::{extract_vectors, ExtractionStrategy};
use somqe::imaging::{generate_series, SeriesKind, SeriesSpec};
use somqe::som::{find_bmu, init_grid, quantization_error, train, SomConfig};

pub fn run_example() -> somqe::Result<()> {
    let spec = SeriesSpec {
        width: 200,
        height: 200,
        deltas: vec![0.0, 30.0],
        ..SeriesSpec::new(SeriesKind::RandomWhite)
    };
    let series = generate_series(&spec)?;
    let strategy = ExtractionStrategy::default();
    let reference = extract_vectors(&series.images[0], strategy)?;
    let changed = extract_vectors(&series.images[1], strategy)?;

    let config = SomConfig::with_dim(strategy.dim());
    let map = train(init_grid(config)?, &reference)?;

    let bmu = find_bmu(&map, reference.vector(0))?;
    println!(
        "first patch maps to unit ({}, {}) at distance {:.4}",
        bmu.row, bmu.col, bmu.distance
    );
    let qe_ref = quantization_error(&map, &reference)?;
    let qe_changed = quantization_error(&map, &changed)?;
    println!("qe reference {qe_ref:.6}, qe after +30% white {qe_changed:.6}");
    assert!(qe_changed > qe_ref);
    Ok(())
}

#[allow(dead_code)]
fn main() -> somqe::Result<()> {
    run_example()
}
