//! Samples random angles and inputs for every architecture and measurement
//! basis and checks the claimed logit and feature symmetries.
//!
//! cargo run --release --example symmetry_tables -- [trials]
use negsym::qnn::Backend;
use negsym::symmetry::{full_verification, render_table, DEFAULT_TOLERANCE};

fn main() -> negsym::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let reports = full_verification(&Backend::StateVector, &[2, 4, 8], trials, 0, DEFAULT_TOLERANCE)?;
    print!("{}", render_table(&reports));
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} records, {failed} failing", reports.len());
    Ok(())
}
