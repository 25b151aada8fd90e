//! The symbolic transfer operator of level 3, applied pointwise and as a matrix.

use htl::function_space::{apply_matrix, assemble_matrix, sample};
use htl::transfer::apply_transfer;
use htl::{build_transfer, BoundaryPoint, FunctionEvaluator, SampledFunctionVector};
use num_complex::Complex64;

fn main() -> htl::Result<()> {
    let p = 3;
    let op = build_transfer(p)?;
    for row in 0..op.size() {
        let terms: Vec<String> = op.row_terms(row).map(|(col, t)| format!("τ({}) f_{col}", t.element)).collect();
        println!("(L f)_{row} on {:>12} = {}", op.domains[row].to_string(), terms.join(" + "));
    }

    // f_k = (1 + x²)^(-s): smooth, decaying like |x|^(-2s) with limit one
    let s = Complex64::new(0.5, 4.0);
    let phi: Vec<_> = op
        .domains
        .iter()
        .map(|&d| FunctionEvaluator::new(d, move |x| (-s * (1.0 + x * x).ln()).exp()).with_decay(2.0 * s, Complex64::new(1.0, 0.0)))
        .collect();

    let n = 40;
    let v = sample(p, s, SampledFunctionVector::sheet_domains(p), &phi, n)?;
    let lv = apply_matrix(&assemble_matrix(&op, s, n)?, &v)?;

    println!("\n  x      pointwise                matrix");
    for x in [0.5, 1.0, 2.0, 7.0] {
        let a = apply_transfer(&op, s, &phi, x, 0)?;
        let b = lv.eval(BoundaryPoint::Finite(x), 0)?;
        println!("{x:>4}  {a:.10}  {b:.10}");
    }
    Ok(())
}
