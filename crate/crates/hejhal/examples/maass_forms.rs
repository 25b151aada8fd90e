//! Locates Maass cusp forms of level 5 by collocation and exports one as
//! Fourier coefficients.
//!
//! ```text
//! cargo run --release -p hejhal --example maass_forms -- 3 5 form.json
//! ```

use hejhal::{Config, Solver};

fn main() {
    let mut args = std::env::args().skip(1);
    let lo: f64 = args.next().map_or(3.0, |a| a.parse().unwrap());
    let hi: f64 = args.next().map_or(5.0, |a| a.parse().unwrap());
    let out = args.next();

    let solver = Solver::new(Config::desk(5));
    let roots = solver.scan_all(lo, hi, 0.02);
    for root in &roots {
        println!(
            "r = {:.6}  {} Fricke {:+}  defect {:.1e}",
            root.r,
            if root.symmetry.odd { "odd " } else { "even" },
            root.symmetry.fricke,
            root.defect[1]
        );
    }
    if let (Some(path), Some(root)) = (out, roots.first()) {
        let form = solver.cusp_form(root, 30).expect("solvable at a root");
        form.write(path.as_ref()).expect("writable");
        println!("wrote {path}");
    }
}
