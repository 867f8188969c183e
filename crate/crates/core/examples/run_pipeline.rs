//! Run a pipeline from a config, as the command-line tool does, and list
//! the files it wrote.

use svmspectra::experiment::{run, ExperimentConfig, Pipeline};

fn main() -> svmspectra::Result<()> {
    let out = std::env::temp_dir().join("svmspectra-example");
    let cfg = ExperimentConfig {
        pipeline: Pipeline::SweepImbalance,
        seed: 1,
        sizes: vec![50, 100],
        trials: 2,
        grid_points: 3,
        output_dir: out.clone(),
        ..ExperimentConfig::from_json(r#"{"selection": {"mode": "fixed", "log2_c": 3, "log2_gamma": 2}}"#)?
    };
    let manifest = run(&cfg, 2)?;
    println!("config hash {}", manifest.config_hash);
    for f in &manifest.outputs {
        println!("{} ({} bytes, sha256 {})", out.join(&f.name).display(), f.bytes, &f.sha256[..12]);
    }
    Ok(())
}
