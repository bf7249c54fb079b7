//! Bracketing min over unitaries U of sum_j |Tr(A_j^dag U)|^2.

use faithful::linalg::ComplexMatrix;
use faithful::seesaw::{uqm_minimize, SeesawOptions, UqmInstance};
use faithful::states::{ginibre, SampleRng};

fn main() -> faithful::Result<()> {
    let n = 3;
    let mut rng = SampleRng::stream(31, 0);
    for k in [2, 5, 9] {
        let matrices: Vec<ComplexMatrix> = (0..k)
            .map(|_| {
                let g = ginibre(n, &mut rng);
                let norm = g.frobenius_norm();
                g.scale_real(1.0 / norm)
            })
            .collect();
        let inst = UqmInstance::new(n, matrices)?;
        let r = uqm_minimize(&inst, &SeesawOptions::default())?;
        println!("k={k}: {:.6} <= min <= {:.6}", r.lower_bound, r.upper_bound);
    }
    Ok(())
}
