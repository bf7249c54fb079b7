//! Schmidt-number witnesses with maximally entangled targets: when they
//! suffice, and an explicit state they all miss.

use faithful::witness::{obs4_detectable, obs5_counterexample};

fn main() -> faithful::Result<()> {
    let cases: [(&[f64], usize); 3] = [(&[0.9, 0.3, 0.316], 2), (&[0.98, 0.141, 0.141], 2), (&[0.6, 0.6, 0.5, 0.17], 3)];
    for (s, l) in cases {
        let o = obs4_detectable(s, l)?;
        println!(
            "s={s:?} l={l}: detectable by a maximally entangled witness {} (margin {:+.4})",
            o.detectable, o.margin
        );
        match obs5_counterexample(s, l) {
            Ok(c) => println!(
                "  counterexample x={:?}  overlap {:.6} >= beta {:.6} + eps^2, missed by all maximally entangled: {}",
                c.x, c.overlap, c.beta, c.undetected_by_max_entangled
            ),
            Err(e) => println!("  {e}"),
        }
    }
    Ok(())
}
