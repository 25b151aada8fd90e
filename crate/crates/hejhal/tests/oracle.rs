use hejhal::{eval_form, reduce, Config, Solver, Symmetry};

fn apply(m: [f64; 4], (x, y): (f64, f64)) -> (f64, f64) {
    let [a, b, c, d] = m;
    let den = (c * x + d).powi(2) + (c * y).powi(2);
    (((a * x + b) * (c * x + d) + a * c * y * y) / den, y / den)
}

fn located(lo: f64, hi: f64, sym: Symmetry) -> (Solver, f64, Vec<f64>) {
    let solver = Solver::new(Config::desk(5));
    let roots = solver.scan(sym, lo, hi, 0.02);
    assert_eq!(roots.len(), 1, "{roots:?}");
    let c = solver.coefficients(roots[0].r, sym).unwrap();
    (solver, roots[0].r, c)
}

#[test]
fn first_roots_of_level_five() {
    let solver = Solver::new(Config::desk(5));
    let roots: Vec<(f64, Symmetry)> = solver.scan_all(3.0, 4.2, 0.02).iter().map(|r| (r.r, r.symmetry)).collect();
    let want = [
        (3.028376, Symmetry { odd: true, fricke: -1 }),
        (4.103222, Symmetry { odd: true, fricke: -1 }),
        (4.132404, Symmetry { odd: false, fricke: 1 }),
    ];
    assert_eq!(roots.len(), want.len(), "{roots:?}");
    for ((r, sym), (r0, sym0)) in roots.iter().zip(want) {
        assert!((r - r0).abs() < 1e-5, "{r} vs {r0}");
        assert_eq!(*sym, sym0);
    }
}

/// The expansion is automorphic, u(γz) = u(z) for γ ∈ Γ₀(5) and
/// u(-1/5z) = ε u(z), at points where both z and γz stay above the
/// collocation heights (lower down the truncated series is not accurate).
#[test]
fn located_form_is_automorphic() {
    for (lo, hi, sym) in [(3.0, 3.06, Symmetry { odd: true, fricke: -1 }), (4.12, 4.14, Symmetry { odd: false, fricke: 1 })] {
        let (_, r, c) = located(lo, hi, sym);
        let u = |z| eval_form(r, sym, &c, z);
        let zs = [(-0.21, 0.2), (-0.18, 0.21), (0.38, 0.2), (0.1, 0.44), (-0.25, 0.38)];
        let scale = zs.iter().map(|&z| u(z).abs()).fold(0.0, f64::max);
        for z in zs {
            for g in [[1.0, 0.0, 5.0, 1.0], [2.0, -1.0, 5.0, -2.0], [1.0, 1.0, 0.0, 1.0]] {
                let gz = apply(g, z);
                if gz.1 < 0.19 {
                    continue;
                }
                assert!((u(gz) - u(z)).abs() < 1e-6 * scale, "r = {r}, g = {g:?}: {} vs {}", u(gz), u(z));
            }
            let n = 5.0 * (z.0 * z.0 + z.1 * z.1);
            let wz = (-z.0 / n, z.1 / n);
            if wz.1 < 0.19 {
                continue;
            }
            let eps = sym.fricke as f64;
            assert!((u(wz) - eps * u(z)).abs() < 1e-6 * scale, "Fricke, r = {r}");
        }
    }
}

#[test]
fn collocation_heights_lie_below_the_domain() {
    let h = Solver::fundamental_height(5);
    let cfg = Config::desk(5);
    assert!(cfg.y1 < h && cfg.y2 < h, "{h}");
    let ((_, y), _) = reduce((0.3, cfg.y2), 5);
    assert!(y >= h - 1e-12);
}

#[test]
fn cusp_form_file_matches_expansion() {
    let sym = Symmetry { odd: true, fricke: -1 };
    let (solver, r, c) = located(3.0, 3.06, sym);
    let root = solver.scan(sym, 3.0, 3.06, 0.02)[0];
    let file = solver.cusp_form(&root, 10).unwrap();
    assert_eq!(file.coefficients.len(), 20);
    assert_eq!(file.s.im, r);
    // a_n e^{2πinx} + a_{-n} e^{-2πinx} = c_n e^{πr/2} sin(2πnx)
    let x = 0.17;
    let th = 2.0 * std::f64::consts::PI * x;
    let (a1, am1) = (file.coefficients[0].a, file.coefficients[1].a);
    let re = a1.re * th.cos() - a1.im * th.sin() + am1.re * th.cos() + am1.im * th.sin();
    let want = c[0] * (0.5 * std::f64::consts::PI * r).exp() * th.sin();
    assert!((re - want).abs() < 1e-12 * want.abs().max(1.0));
}
