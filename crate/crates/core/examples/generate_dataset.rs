//! Draw a backbone dataset and compare its class supports with the analytic
//! ground truth.
//!
//! ```text
//! cargo run --example generate_dataset -- 0.4 0.6 out.csv
//! ```

use std::path::PathBuf;

use svmspectra::backbone::{
    ambiguous_mass, ambiguous_region, bayes_f1, class_support, generate, BackboneSpec, ClassId,
};
use svmspectra::experiment::write_dataset;

fn main() -> svmspectra::Result<()> {
    let mut args = std::env::args().skip(1);
    let mu: f64 = args.next().map_or(0.4, |s| s.parse().expect("mu"));
    let alpha: f64 = args.next().map_or(0.6, |s| s.parse().expect("alpha"));
    let out = args.next().map(PathBuf::from);

    let data = generate(&BackboneSpec::new(mu, alpha, 1000, 7)?)?;
    println!(
        "{} points: {} minority, {} majority",
        data.len(),
        data.count(ClassId::Minority),
        data.count(ClassId::Majority)
    );
    for class in [ClassId::Minority, ClassId::Majority] {
        let support = class_support(class, mu)?;
        let spans: Vec<String> = support
            .intervals()
            .iter()
            .map(|iv| format!("[{:.3}, {:.3}]", iv.lo, iv.hi))
            .collect();
        println!("{class:?} support on x1: {}", spans.join(" "));
    }
    println!(
        "ambiguous region length {:.3}, test mass {:.3}, Bayes F1 {:.3}",
        ambiguous_region(mu)?.total_length(),
        ambiguous_mass(mu)?,
        bayes_f1(mu, alpha)?
    );
    if let Some(path) = out {
        write_dataset(&data, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
