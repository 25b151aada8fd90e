//! Extracts a period function at a dip and checks it against the cocycle
//! relations of Γ₀(3).

use htl::cohomology::{verify_period_function, Acceptance};
use htl::spectral::{extract_period_function, refine};
use num_complex::Complex64;

fn main() -> htl::Result<()> {
    let (p, n, m) = (3, 64, 3);
    let (t, sigma) = refine(p, n, m, 0.5, 4.38, 4.40, 1e-10)?;
    println!("dip at t = {t:.10}, σ_min = {sigma:.2e}");

    let pf = extract_period_function(p, Complex64::new(0.5, t), n, m, 1e-5)?;
    println!("σ_min = {:.2e}, next = {:.2e}", pf.sigma_min, pf.sigma_next);
    println!("residuals: eigen {:.2e}, matching {:.2e}", pf.residuals.eigen, pf.residuals.constraints);

    for x in [0.1, 1.0, 10.0] {
        println!("f_0({x}) = {:.8}", pf.vector.eval(x.into(), 0)?);
    }

    let report = verify_period_function(&pf.vector, Acceptance { m, ..Acceptance::default() })?;
    println!("relators      {:.2e}", report.max_relator());
    println!("antisymmetry  {:.2e}", report.max_antisymmetry());
    println!("parabolicity  {:.2e}", report.parabolic);
    println!("roundtrip     {:.2e}", report.roundtrip);
    Ok(())
}
