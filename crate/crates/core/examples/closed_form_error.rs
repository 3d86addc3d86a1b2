//! Prints the relative error of the computed sin-Θ norms over the default grid.
use orthoalign::experiments::{verify_closed_form_with, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig { seed: 7, ..ExperimentConfig::default() };
    for &d in &cfg.deltas {
        let rep = verify_closed_form_with(&cfg, d, f64::INFINITY).unwrap();
        println!(
            "{d:.3e}  {:.2e}  {:.2e}  {:.2e}",
            rep.error.spectral, rep.error.frobenius, rep.error.trace
        );
    }
}
