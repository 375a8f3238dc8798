// Write a series to disk as PGM and PNG and read it back.
//
// Run with `cargo run -p somqe --example image_io`.

use somqe::imaging::{
    generate_series, load_image, save_image, ImageFormat, SeriesKind, SeriesManifest, SeriesSpec,
};

pub fn run_example() -> somqe::Result<()> {
    let dir = std::env::temp_dir().join(format!("somqe-image-io-{}", std::process::id()));
    let spec = SeriesSpec {
        width: 120,
        height: 80,
        ..SeriesSpec::new(SeriesKind::CentralSquare)
    };
    let series = generate_series(&spec)?;

    for format in [ImageFormat::Pgm, ImageFormat::Png] {
        let out = dir.join(format.extension());
        series.write(&out, format)?;
        let manifest = SeriesManifest::load(SeriesManifest::locate(&out))?;
        let loaded = manifest.load_images(&out)?;
        assert_eq!(loaded, series.images);
        println!(
            "{}: {} images round-tripped in {}",
            format.extension(),
            loaded.len(),
            out.display()
        );
    }

    let single = dir.join("single.pgm");
    save_image(&series.images[5], &single)?;
    assert_eq!(load_image(&single)?, series.images[5]);

    std::fs::remove_dir_all(&dir).map_err(|e| somqe::Error::Input(e.to_string()))?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> somqe::Result<()> {
    run_example()
}
