//! The full cascade on one state, printed as the JSON report.

use faithful::harness::{classify, ClassifyConfig};
use faithful::states::{load_state, Measure, SamplerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let state = match std::env::args().nth(1) {
        Some(path) => load_state(&std::fs::read(path)?)?,
        None => SamplerConfig::new(Measure::Bures, 3, 1)?.sample(3)?,
    };
    let report = classify(&state, &ClassifyConfig::default())?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
