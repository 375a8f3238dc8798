// Time training plus scoring on a small random-contrast series.
//
// Run with `cargo run --release -p somqe --example bench`.

use somqe::analysis::TrainingMode;
use somqe::cli::bench;
use somqe::features::ExtractionStrategy;
use somqe::som::SomConfig;

pub fn run_example() -> somqe::Result<()> {
    let report = bench(
        8,
        256,
        256,
        SomConfig::default(),
        ExtractionStrategy::default(),
        TrainingMode::ReferenceTrained,
    )?;
    println!(
        "{} images at {}x{}: {:.1} ms (budget {:.0} ms, pass {})",
        report.count, report.width, report.height, report.total_ms, report.budget_ms, report.pass
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> somqe::Result<()> {
    run_example()
}
