//! Simulated annealing over `(log2 C, log2 gamma)` with cross-validated F1.

use svmspectra::analysis::evaluate;
use svmspectra::backbone::{generate, BackboneSpec};
use svmspectra::select::{anneal_select_traced, AnnealConfig};
use svmspectra::svm::train;

fn main() -> svmspectra::Result<()> {
    let (mu, alpha) = (0.2, 0.65);
    let data = generate(&BackboneSpec::new(mu, alpha, 300, 11)?)?;
    let test = generate(&BackboneSpec::new(mu, alpha, 1000, 12)?)?;
    let cfg = AnnealConfig { steps: 40, seed: 3, ..AnnealConfig::default() };

    let trace = anneal_select_traced(&data, &cfg)?;
    let probes = 1 + cfg.probe_grid * cfg.probe_grid;
    for (k, e) in trace.evaluations.iter().enumerate() {
        let label = match k {
            0 => "start".to_string(),
            k if k < probes => format!("probe {k}"),
            k if (k + 1 - probes) % 5 == 0 => format!("step {}", k + 1 - probes),
            _ => continue,
        };
        println!(
            "{label:>9}: log2C {:>6.2} log2gamma {:>6.2} cv F1 {:.3}{}",
            e.point.log2_c,
            e.point.log2_gamma,
            e.value,
            if e.accepted { "" } else { " (rejected)" }
        );
    }
    let best = trace.best;
    println!("best: log2C {:.2}, log2gamma {:.2}, cv F1 {:.3}", best.log2_c, best.log2_gamma, trace.best_value);
    let model = train(&data, &best.train_config(), best.kernel())?;
    println!("held-out F1 {:.3}", evaluate(&model, &test).f1);
    Ok(())
}
