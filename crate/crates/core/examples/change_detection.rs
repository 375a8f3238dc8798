// Score one series in both training modes and write CSV/JSON/SVG reports.
//
// Run with `cargo run -p somqe --example change_detection`.

use somqe::analysis::{emit_report, run_series, ReportFormat, TrainingMode};
use somqe::features::ExtractionStrategy;
use somqe::imaging::{generate_series, SeriesKind, SeriesSpec};
use somqe::som::SomConfig;

pub fn run_example() -> somqe::Result<()> {
    let spec = SeriesSpec::new(SeriesKind::CentralSquare);
    let series = generate_series(&spec)?;
    let out = std::env::temp_dir().join(format!("somqe-change-{}", std::process::id()));

    for mode in [TrainingMode::ReferenceTrained, TrainingMode::PerImage] {
        let result = run_series(
            &series.images,
            series.deltas(),
            SomConfig::default(),
            ExtractionStrategy::default(),
            mode,
        )?
        .with_spec(&spec)
        .with_id(format!("central-square-{}", mode.name()));
        let qe: Vec<String> = result
            .qe_values()
            .iter()
            .map(|q| format!("{q:.4}"))
            .collect();
        println!(
            "{:<18} qe [{}] r2 {:.4}",
            mode.name(),
            qe.join(" "),
            result.fit.r2
        );
        emit_report(&result, &out, &ReportFormat::ALL)?;
    }
    println!("reports in {}", out.display());
    std::fs::remove_dir_all(&out).map_err(|e| somqe::Error::Input(e.to_string()))?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> somqe::Result<()> {
    run_example()
}
