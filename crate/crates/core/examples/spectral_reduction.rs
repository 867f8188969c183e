//! Rank reduction of a trained model: the essential support vectors and the
//! per-rank approximations with their hyperplane angles.

use svmspectra::analysis::evaluate;
use svmspectra::backbone::{generate, BackboneSpec};
use svmspectra::spectral::{hyperplane_cosine, SpectralReducer};
use svmspectra::svm::{train, RbfKernel, TrainConfig};

fn main() -> svmspectra::Result<()> {
    let train_set = generate(&BackboneSpec::new(0.4, 0.6, 400, 5)?)?;
    let test = generate(&BackboneSpec::new(0.4, 0.6, 1000, 6)?)?;
    let model = train(&train_set, &TrainConfig::with_c(8.0), RbfKernel::new(4.0)?)?;

    let reducer = SpectralReducer::new(&model)?;
    let r = reducer.essential_rank();
    let ess = reducer.essential_set()?;
    let mut dev: f64 = 0.0;
    for i in 0..=20 {
        for j in 0..=20 {
            let x = [i as f64 / 20.0, j as f64 / 20.0];
            dev = dev.max((model.decision_value(&x) - ess.model.decision_value(&x)).abs());
        }
    }
    println!(
        "{} support vectors, {r} essential; largest decision change on a 21x21 grid {dev:.2e}",
        model.n_support()
    );

    let base_f1 = evaluate(&model, &test).f1;
    println!("base F1 {base_f1:.4}");
    for rank in [1, 2, 5, 10, 20, r / 2, r] {
        let red = reducer.reduce(rank.max(1))?;
        println!(
            "rank {:>3}: F1 {:.4}, cosine to the original {:.6}",
            red.rank(),
            evaluate(&red.model, &test).f1,
            hyperplane_cosine(&red, &model)?
        );
    }
    Ok(())
}
