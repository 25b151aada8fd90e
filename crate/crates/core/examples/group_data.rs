//! The generators of Γ₀(p), the pairing k ↦ k', and the relators they satisfy.
//!
//! ```text
//! cargo run --example group_data -- 7
//! ```

use htl::group::{verify_group, Letter};
use htl::GeneratorSet;

fn main() -> htl::Result<()> {
    let p: u64 = std::env::args().nth(1).map_or(Ok(7), |a| a.parse()).expect("p must be an integer");
    let gens = GeneratorSet::new(p)?;

    println!("T = {}", gens.t());
    for k in 1..p {
        println!("h_{k:<2} = {:<24} k' = {}", gens.h(k).to_string(), gens.kprime(k));
    }

    for r in gens.relators() {
        let word: Vec<String> = r.word.iter().map(|l| match l {
            Letter::T => "T".into(),
            Letter::TInv => "T⁻¹".into(),
            Letter::H(k) => format!("h{k}"),
            Letter::HInv(k) => format!("h{k}⁻¹"),
        }).collect();
        println!("{:?} {:>3}: {} = {}", r.kind, r.index, word.join(" "), gens.evaluate(&r.word));
    }

    let report = verify_group(p)?;
    println!(
        "{} involution and {} triple relators, {} failures",
        report.involution_relators,
        report.triple_relators,
        report.failures.len()
    );
    Ok(())
}
