macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(train_and_score, "train_and_score.rs");
example!(feature_extraction, "feature_extraction.rs");
example!(generate_series, "generate_series.rs");
example!(image_io, "image_io.rs");
example!(linear_fit, "linear_fit.rs");
example!(change_detection, "change_detection.rs");
example!(replicate, "replicate.rs");
example!(bench, "bench.rs");
