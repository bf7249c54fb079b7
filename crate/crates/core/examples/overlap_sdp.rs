//! Maximal overlap of a state with operators whose marginals are maximally
//! mixed, with certified bounds and the resulting verdict.

use faithful::solver::{obs3_verdict, sdp_max_overlap, SdpOptions};
use faithful::states::{isotropic, Measure, SamplerConfig};

fn main() -> faithful::Result<()> {
    let d = 3;
    let sampler = SamplerConfig::new(Measure::Bures, d, 2024)?;
    let opts = SdpOptions::default();

    let mut states = vec![("isotropic p=0.5".to_string(), isotropic(d, 0.5)?)];
    for i in 0..4 {
        states.push((format!("Bures sample {i}"), sampler.sample(i)?));
    }

    println!("threshold 1/d = {:.6}", 1.0 / d as f64);
    for (name, st) in &states {
        let sol = sdp_max_overlap(st, &opts)?;
        let c = obs3_verdict(st, &sol)?;
        println!(
            "{name:>16}: optimum {:.6} in [{:.6}, {:.6}]  purity {:.6}  {} iterations  -> {:?}",
            sol.optimum, sol.lower_bound, sol.upper_bound, sol.purity, sol.iterations, c.verdict
        );
    }
    Ok(())
}
