//! A fidelity witness as a mixture of relevant witnesses plus a positive
//! remainder, and the ordering test between witnesses.

use faithful::linalg::{schmidt_form_state, Dims};
use faithful::solver::witness_weaker_than;
use faithful::states::max_entangled;
use faithful::witness::{fidelity_witness, rfw_set, verify_rfw_decomposition};

fn main() -> faithful::Result<()> {
    let d = 3;
    let psi = schmidt_form_state(&[0.8, 0.5, 0.33], d);
    let dec = verify_rfw_decomposition(&psi, Dims::square(d))?;
    println!("Schmidt coefficients {:?}", dec.coefficients);
    println!("alphas {:?}", dec.weights.alphas);
    for (a, p) in dec.weights.signs.iter().zip(&dec.weights.probabilities) {
        println!("  signs {a:?}  weight {p:.6}");
    }
    println!(
        "remainder: off-diagonal mass {:.2e}, min eigenvalue {:.2e}, psd {}",
        dec.off_diagonal_mass, dec.min_eigenvalue, dec.psd
    );

    let rfws = rfw_set(2)?;
    let phi = fidelity_witness(&max_entangled(2)?, Dims::square(2), 1)?;
    let v = witness_weaker_than(&phi, &rfws)?;
    println!("phi+ witness weaker than the d=2 relevant witnesses: {} (worst value {:.2e})", v.weaker, v.worst_value);
    let v = witness_weaker_than(&rfws[1], &rfws[..1])?;
    println!("one relevant witness weaker than another: {} (worst value {:.4})", v.weaker, v.worst_value);
    Ok(())
}
