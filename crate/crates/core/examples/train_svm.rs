//! Train an RBF SVM, evaluate it on a fresh test set and round-trip it
//! through the model file format.

use svmspectra::analysis::evaluate;
use svmspectra::backbone::{bayes_f1, generate, BackboneSpec};
use svmspectra::svm::{load_model, save_model, train_with_status, RbfKernel, TrainConfig};

fn main() -> svmspectra::Result<()> {
    let (mu, alpha) = (0.2, 0.7);
    let train = generate(&BackboneSpec::new(mu, alpha, 600, 1)?)?;
    let test = generate(&BackboneSpec::new(mu, alpha, 600, 2)?)?;

    let (model, status) = train_with_status(&train, &TrainConfig::with_c(16.0), RbfKernel::new(8.0)?)?;
    let r = evaluate(&model, &test);
    println!("{status:?}");
    println!(
        "{} support vectors ({:.1}% of the training set), dual objective {:.4}",
        model.n_support(),
        100.0 * r.complexity,
        model.dual_objective()
    );
    println!(
        "test: tp {} fp {} fn {} tn {}; precision {:.3} recall {:.3} F1 {:.3} (Bayes {:.3})",
        r.tp,
        r.fp,
        r.fn_,
        r.tn,
        r.precision,
        r.recall,
        r.f1,
        bayes_f1(mu, alpha)?
    );

    let bytes = save_model(&model);
    let back = load_model(&bytes)?;
    assert_eq!(save_model(&back), bytes);
    println!("model file: {} bytes, reload is exact", bytes.len());
    Ok(())
}
