//! For p = 3 a second set of coset representatives gives a second transfer
//! operator with the same eigenfunctions, up to an explicit isomorphism.

use htl::spectral::{extract_period_function, refine};
use htl::transfer::{alt_residual, build_transfer_alt_p3, p3_isomorphism, p3_isomorphism_terms};
use num_complex::Complex64;

fn main() -> htl::Result<()> {
    let alt = build_transfer_alt_p3();
    for row in 0..alt.size() {
        let terms: Vec<String> = alt.row_terms(row).map(|(col, t)| format!("τ({}) g_{col}", t.element)).collect();
        println!("(L̃ g)_{row} on {:>12} = {}", alt.domains[row].to_string(), terms.join(" + "));
    }
    println!();
    for (k, (g, src)) in p3_isomorphism_terms().iter().enumerate() {
        println!("G_{k} = τ({g}) f_{src}");
    }

    let (t, _) = refine(3, 64, 3, 0.5, 6.11, 6.13, 1e-10)?;
    let pf = extract_period_function(3, Complex64::new(0.5, t), 64, 3, 1e-5)?;
    let g = p3_isomorphism(&pf.vector)?;
    println!("\nt = {t:.8}");
    println!("residual of f for L  : {:.2e}", pf.residuals.eigen);
    println!("residual of G for L̃  : {:.2e}", alt_residual(&g)?);
    Ok(())
}
