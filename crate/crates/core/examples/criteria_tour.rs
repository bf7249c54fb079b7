//! Closed-form tests on textbook states: PPT, CCNR, the X_d bound and the
//! exact two-qubit criterion.

use faithful::criteria::{ccnr_check, obs2_qubit_faithful, obs3a_bound, ppt_check, x_operator_max_eigenvalue};
use faithful::states::{isotropic, werner_qubit};

fn main() -> faithful::Result<()> {
    println!("two-qubit Werner states");
    for p in [0.2, 1.0 / 3.0, 0.5, 0.8] {
        let st = werner_qubit(p)?;
        let obs2 = obs2_qubit_faithful(&st)?;
        println!(
            "  p={p:.3}  ppt_min={:+.4}  ccnr={:.4}  lambda_max(X2)={:.4}  faithful={}",
            ppt_check(&st)?.value,
            ccnr_check(&st)?.value,
            obs2.value,
            obs2.is_violated()
        );
    }

    println!("isotropic states, d=3 (entangled above p=1/4)");
    for p in [0.2, 0.25, 0.3, 0.6] {
        let st = isotropic(3, p)?;
        let bound = obs3a_bound(&st)?;
        println!(
            "  p={p:.2}  ppt_min={:+.4}  lambda_max(X3)={:.4}  bound says unfaithful={}",
            ppt_check(&st)?.value,
            x_operator_max_eigenvalue(&st)?,
            bound.is_satisfied()
        );
    }
    Ok(())
}
