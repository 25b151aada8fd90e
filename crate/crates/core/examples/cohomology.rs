//! From a period function to a parabolic cocycle and back.

use htl::cohomology::{
    cocycle_from_period, extend_cocycle, period_from_cocycle, projective_grid, psi_from_period, verify_parabolic, Acceptance,
};
use htl::group::Letter;
use htl::spectral::{extract_period_function, refine};
use num_complex::Complex64;

fn main() -> htl::Result<()> {
    let (p, n, m) = (3, 64, 3);
    let (t, _) = refine(p, n, m, 0.5, 5.09, 5.11, 1e-10)?;
    let f = extract_period_function(p, Complex64::new(0.5, t), n, m, 1e-5)?.vector;

    let c = cocycle_from_period(&f, Acceptance { m, ..Acceptance::default() })?;
    println!("s = {:.8}", c.s());

    // every relator of the presentation, evaluated on the cocycle, vanishes
    let gens = htl::GeneratorSet::new(p)?;
    for r in gens.relators() {
        let sup = extend_cocycle(&c, &r.word).sup_on_grid()?;
        println!("{:?} {}: sup |c_word| = {sup:.2e}", r.kind, r.index);
    }
    let c_t2 = extend_cocycle(&c, &[Letter::T, Letter::T]);
    println!("c_(T²) = 0 up to {:.1e}", c_t2.sup_on_grid()?);

    let psi = psi_from_period(&f);
    println!("parabolicity residual {:.2e}", verify_parabolic(&c, &psi)?);

    let back = period_from_cocycle(&c, &psi, n)?;
    let diff = back.flat().iter().zip(f.flat()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("period -> cocycle -> period: {diff:.2e}");

    let grid = projective_grid(8);
    println!("\nc_(h_1) on a coarse projective grid:");
    for (x, z) in grid {
        println!("  ({x:>7.4}, {z:>7.4})  {:.6}", c.c(1).eval_projective(x, z)?);
    }
    Ok(())
}
