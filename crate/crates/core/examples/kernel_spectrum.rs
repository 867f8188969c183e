//! Eigen-spectrum and pivoted rank of an RBF Gram matrix, and the
//! Eckart-Young residual of its low-rank truncations.

use svmspectra::backbone::{generate, BackboneSpec};
use svmspectra::linalg::{eigh, lup, EIGEN_RANK_TOL};
use svmspectra::svm::RbfKernel;

fn main() -> svmspectra::Result<()> {
    let data = generate(&BackboneSpec::new(0.3, 0.5, 150, 3)?)?;
    for gamma in [0.5, 4.0, 32.0] {
        let q = RbfKernel::new(gamma)?.gram(&data.points);
        let e = eigh(&q)?;
        let pivots = lup(q.as_matrix())?;
        println!(
            "gamma {gamma:>5}: eigen rank {:>3} (tol {EIGEN_RANK_TOL:e}), LUP rank {:>3}, largest eigenvalue {:.2}",
            e.numeric_rank(),
            pivots.numeric_rank,
            e.values[0]
        );
        for r in [1, 5, 20, 50] {
            let err = e.low_rank(r)?.as_matrix().sub(q.as_matrix()).frobenius_norm();
            let tail = e.values[r..].iter().map(|l| l * l).sum::<f64>().sqrt();
            println!("    rank {r:>2}: residual {err:.3e}, tail of spectrum {tail:.3e}");
        }
    }
    Ok(())
}
