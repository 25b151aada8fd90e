//! The boundary map on the sheets `I_0, …, I_p` and a symbolic orbit.

use htl::build_system;

fn main() -> htl::Result<()> {
    let p = 5;
    let sys = build_system(p)?;

    for (k, iv) in sys.intervals.iter().enumerate() {
        println!("I_{k} = {iv}");
    }
    println!();
    for b in &sys.branches {
        println!("{:>14} on I_{} --{}--> I_{}", b.domain.to_string(), b.source, b.map, b.target);
    }

    // every branch maps onto its target interval exactly
    assert!(sys.verify().is_empty());

    println!("\norbit of sqrt(2) + 1/3 on sheet 0:");
    for (x, k) in sys.orbit(2f64.sqrt() + 1.0 / 3.0, 0, 12) {
        println!("  {x:>12.8}  (sheet {k})");
    }
    Ok(())
}
