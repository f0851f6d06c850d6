//! The two expressions for the pair kernel α agree, vanish across branches and
//! give α(p,p) = 1/2.

use kgcur::covariance::{alpha_invariant, alpha_equivalence, diagonal_kernel_and_gamma, OnShell};
use kgcur::state::Branch;

fn main() {
    let modes: Vec<OnShell> = (-20..=20)
        .flat_map(|i| [OnShell::new(i as f64 * 0.75, Branch::Positive), OnShell::new(i as f64 * 0.75, Branch::Negative)])
        .collect();
    let rep = alpha_equivalence(&modes);
    println!("{} pairs compared, {} lightlike pairs left out", rep.pairs, rep.excluded);
    println!("max |alpha_8 - alpha_lc| = {:.2e}", rep.max_discrepancy);
    println!("max difference between the two light-cone forms = {:.2e}", rep.max_form_discrepancy);

    let p = OnShell::new(3.0, Branch::Positive);
    let k = OnShell::new(-1.0, Branch::Negative);
    println!("alpha(p,p) = {:.15}", alpha_invariant(p, p).unwrap());
    println!("alpha across branches = {}", alpha_invariant(p, k).unwrap());
    for q in [0.0, 1.0, 10.0] {
        let (u0, gamma) = diagonal_kernel_and_gamma(q);
        println!("q = {q:>4}: u0(p,p) = {u0:.12}, gamma = {gamma:.12}");
    }
}
