// Least-squares fit with r², including the degenerate case.
//
// Run with `cargo run -p somqe --example linear_fit`.

use somqe::analysis::linear_fit;

pub fn run_example() -> somqe::Result<()> {
    let points = [
        (0.0, 0.101),
        (10.0, 0.118),
        (20.0, 0.139),
        (30.0, 0.155),
        (40.0, 0.178),
    ];
    let fit = linear_fit(&points)?;
    println!(
        "qe = {:.5} + {:.6} * delta, r2 = {:.4} (n = {})",
        fit.intercept, fit.slope, fit.r2, fit.n
    );

    let flat = linear_fit(&[(0.0, 0.2), (10.0, 0.2), (20.0, 0.2)])?;
    println!(
        "constant qe: slope {}, r2 {}, degenerate {}",
        flat.slope, flat.r2, flat.degenerate
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> somqe::Result<()> {
    run_example()
}
