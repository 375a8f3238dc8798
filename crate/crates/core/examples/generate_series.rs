// Build the five default synthetic series and check their white fractions.
//
// Run with `cargo run -p somqe --example generate_series`.

use somqe::imaging::{generate_series, measure_white_fraction, SeriesKind, SeriesSpec};

pub fn run_example() -> somqe::Result<()> {
    for kind in SeriesKind::ALL {
        let series = generate_series(&SeriesSpec::new(kind))?;
        println!("{kind} ({} images)", series.images.len());
        for (entry, image) in series.entries.iter().zip(&series.images) {
            println!(
                "  {:>2}  delta {:>5}%  white {:>8.4}%",
                entry.index,
                entry.delta_pct,
                measure_white_fraction(image)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> somqe::Result<()> {
    run_example()
}
