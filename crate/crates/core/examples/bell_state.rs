//! Prepares (|00> + |11>)/sqrt(2) and prints joint outcome probabilities in
//! the computational and Fourier bases.
use negsym::symmetry::{bell_probabilities, bell_report, BellBasis};

fn main() {
    for basis in [BellBasis::Computational, BellBasis::Fourier] {
        let p = bell_probabilities(basis);
        println!("{basis:?}: P(00)={:.6} P(01)={:.6} P(10)={:.6} P(11)={:.6}", p[0], p[1], p[2], p[3]);
        let r = bell_report(basis);
        println!("  max deviation from [1/2, 0, 0, 1/2]: {:.2e} (pass: {})", r.max_deviation, r.pass);
    }
}
