//! Fully entangled fraction by see-saw over local unitaries.

use faithful::linalg::{schmidt_decompose, Dims};
use faithful::seesaw::{faithful_via_seesaw, max_singlet_fraction, SeesawOptions};
use faithful::states::{haar_pure_state, BipartiteState, Measure, SampleRng, SamplerConfig};

fn main() -> faithful::Result<()> {
    let opts = SeesawOptions {
        restarts: 10,
        ..SeesawOptions::default()
    };

    // Pure states: the optimum is (sum of Schmidt coefficients)^2 / d.
    for d in 2..=4 {
        let mut rng = SampleRng::stream(7, d as u64);
        let psi = haar_pure_state(d * d, &mut rng);
        let s = schmidt_decompose(&psi, Dims::square(d))?.padded_coefficients();
        let exact = s.iter().sum::<f64>().powi(2) / d as f64;
        let found = max_singlet_fraction(&BipartiteState::pure(&psi, Dims::square(d))?, &opts)?;
        println!("pure d={d}: see-saw {:.12}  exact {exact:.12}", found.best_value);
    }

    // Mixed states: a value above 1/d certifies faithfulness.
    let sampler = SamplerConfig::new(Measure::Bures, 3, 5)?;
    for i in 0..3 {
        let st = sampler.sample(i)?;
        let r = max_singlet_fraction(&st, &opts)?;
        let c = faithful_via_seesaw(&st, &r)?;
        println!(
            "Bures d=3 sample {i}: best {:.6} (restart {} of {})  faithful {}",
            r.best_value, r.best_restart, r.restarts, c.faithful
        );
    }
    Ok(())
}
