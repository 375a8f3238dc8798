// Run all five series end to end and print the r² summary.
//
// Run with `cargo run --release -p somqe --example replicate`.

use somqe::analysis::{ReportFormat, TrainingMode};
use somqe::cli::{replicate, ReplicateOptions, SummaryRow};
use somqe::features::ExtractionStrategy;
use somqe::som::SomConfig;

pub fn run_example() -> somqe::Result<()> {
    let out = std::env::temp_dir().join(format!("somqe-replicate-{}", std::process::id()));
    let opts = ReplicateOptions {
        series: Default::default(),
        som: SomConfig::default(),
        strategy: ExtractionStrategy::default(),
        mode: TrainingMode::ReferenceTrained,
        formats: ReportFormat::ALL.to_vec(),
        image_format: None,
        timings: false,
    };
    let results = replicate(&out, &opts)?;
    for row in results.iter().map(SummaryRow::from_result) {
        println!(
            "{:<16} {:>2} images  r2 {:.4}  rising {}",
            row.series_id, row.images, row.r2, row.strictly_increasing
        );
    }
    std::fs::remove_dir_all(&out).map_err(|e| somqe::Error::Input(e.to_string()))?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> somqe::Result<()> {
    run_example()
}
