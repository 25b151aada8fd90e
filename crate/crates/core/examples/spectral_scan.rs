//! Scans σ_min of the stacked matrix along Re s = 1/2 and confirms the dips
//! at a finer discretization.
//!
//! The window is kept narrow so the example finishes in seconds; the `htl
//! scan` subcommand runs the full range.

use htl::spectral::{candidates_json, confirm, scan_csv, scan_line, ScanConfig};

fn main() -> htl::Result<()> {
    let cfg = ScanConfig::new(3, 40, 3, 0.5, 4.2, 4.6, 40);
    let mut res = scan_line(&cfg)?;
    confirm(&cfg, &mut res.candidates, 48, 0.02)?;

    let csv = scan_csv(&res);
    for line in csv.lines().take(6) {
        println!("{line}");
    }
    println!("...\n");
    println!("{}", serde_json::to_string_pretty(&candidates_json(&res))?);
    Ok(())
}
