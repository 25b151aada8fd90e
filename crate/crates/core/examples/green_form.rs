//! The Green form `[u, R(t,·)^s]` of an eigenfunction of the Laplacian and
//! the cocycle integrals `c_g(t) = ∫_{g⁻¹∞}^{∞} [u, R(t,·)^s]`.

use htl::green::{
    bessel_k, cocycle_integral, fd_laplacian, path_integral, poisson_kernel, BesselMode, BoundaryPath, EigenfunctionModel,
    PathPiece, RayRule,
};
use htl::GroupElement;
use num_complex::Complex64;

fn main() -> htl::Result<()> {
    let s = Complex64::new(0.5, 3.0);
    let u = BesselMode { s, n: 1 };
    let z = Complex64::new(0.2, 0.7);

    println!("R(0, i) = {}", poisson_kernel(0.0, Complex64::new(0.0, 1.0))?);
    println!("K_(s-1/2)(2π·0.7) = {:.12}", bessel_k(s - 0.5, 2.0 * std::f64::consts::PI * 0.7));
    println!("Δu / (s(1-s)u) = {:.10}", fd_laplacian(&u, z, 0.01) / (s * (1.0 - s) * u.u(z)));

    // closed: a triangle integrates to zero
    let tri = BoundaryPath::polygon(&[z, Complex64::new(1.0, 0.4), Complex64::new(-0.3, 1.6)]);
    println!("∮ over a triangle: {:.2e}", path_integral(&u, s, 0.3, &tri, 1e-12)?.value.norm());

    // a vertical ray into the cusp at ∞
    let ray = BoundaryPath { pieces: vec![PathPiece::Vertical { x: 0.0, from: 0.5, to: f64::INFINITY }] };
    println!("∫_(i/2)^∞ at t = 0.3: {:.10}", path_integral(&u, s, 0.3, &ray, 1e-12)?.value);

    let g = GroupElement::new(1, 0, 2, 1)?;
    let cg = cocycle_integral(&u, &g, RayRule::default())?;
    println!("\nc_g for g = {g}:");
    for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        println!("  t = {t:>4}: {:.10}", cg.eval(t));
    }
    Ok(())
}
