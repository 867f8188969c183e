//! Label changes across a reduction series, the sufficiency point and how
//! strongly late changes concentrate in the ambiguous region.

use svmspectra::analysis::covert::{label_changes, localization, sufficiency, DEFAULT_DELTA};
use svmspectra::analysis::Selection;
use svmspectra::experiment::run::covert_setup;
use svmspectra::experiment::ExperimentConfig;
use svmspectra::select::ParamPoint;
use svmspectra::spectral::SpectralReducer;

fn main() -> svmspectra::Result<()> {
    let mu = 0.4;
    let cfg = ExperimentConfig {
        mu,
        alpha: 0.6,
        n: 400,
        seed: 9,
        selection: Selection::Fixed(ParamPoint::new(6.0, 3.0)?),
        ..ExperimentConfig::default()
    };
    let setup = covert_setup(&cfg)?;
    let series = SpectralReducer::new(&setup.model)?.series()?;
    let report = sufficiency(&series, &setup.test, DEFAULT_DELTA)?;
    let matrix = label_changes(&series, &setup.test)?;
    let loc = localization(&matrix, &report, &setup.test, mu)?;

    println!(
        "base F1 {:.4}; sufficiency point {} of {} essential (overlap score {:.3})",
        report.p, report.sufficiency_point, report.essential_rank, report.overlap_score
    );
    println!(
        "{} label changes, {} at ranks >= the sufficiency point",
        matrix.total_changes(),
        matrix.changes_from(report.sufficiency_point)
    );
    println!("ambiguous test mass {:.3}", loc.ambiguous_mass);
    let step = (loc.proportion_curve.len() / 8).max(1);
    for (rank, frac) in loc.proportion_curve.iter().step_by(step) {
        match frac {
            Some(f) => println!("  changes at ranks >= {rank:>3}: {:.3} inside the ambiguous region", f),
            None => println!("  changes at ranks >= {rank:>3}: none"),
        }
    }
    let width = *loc.histogram.iter().max().unwrap_or(&1).max(&1);
    println!("points changing label after the sufficiency point, by x1:");
    if width == 1 && loc.histogram.iter().all(|&c| c == 0) {
        println!("  none");
    }
    for (b, &count) in loc.histogram.iter().enumerate().filter(|(_, &c)| c > 0) {
        println!("  x1 {:.2} {count:>4} {}", b as f64 / 50.0, "#".repeat(40 * count / width));
    }
    Ok(())
}
