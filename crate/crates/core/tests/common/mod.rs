//! Independent reference implementations used as test oracles. Nothing here
//! calls into the solver or decomposition code it is used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rbf(gamma: f64, a: [f64; 2], b: [f64; 2]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    (-gamma * (d0 * d0 + d1 * d1)).exp()
}

/// Dense Gaussian elimination with partial pivoting. `None` if singular.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Maximum of the C-SVC dual
/// `sum a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij`, `0 <= a <= C`, `sum a_i y_i = 0`,
/// by enumerating which multipliers sit at 0, at C, or strictly between,
/// solving the KKT system of each face and keeping the best feasible point.
/// Exact for a concave objective; exponential in `n`, so keep `n <= 8`.
pub fn exhaustive_dual(points: &[[f64; 2]], y: &[f64], c: f64, gamma: f64) -> f64 {
    let n = points.len();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * rbf(gamma, points[i], points[j])).collect())
        .collect();
    let objective = |a: &[f64]| {
        let lin: f64 = a.iter().sum();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += a[i] * a[j] * q[i][j];
            }
        }
        lin - 0.5 * quad
    };
    let mut best = 0.0; // a = 0 is always feasible
    let faces = 3usize.pow(n as u32);
    for code in 0..faces {
        let mut state = vec![0u8; n];
        let mut k = code;
        for s in state.iter_mut() {
            *s = (k % 3) as u8;
            k /= 3;
        }
        let mut a = vec![0.0; n];
        for i in 0..n {
            if state[i] == 1 {
                a[i] = c;
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        if free.is_empty() {
            let eq: f64 = (0..n).map(|i| a[i] * y[i]).sum();
            if eq.abs() < 1e-9 {
                best = f64::max(best, objective(&a));
            }
            continue;
        }
        // [Q_FF  y_F][a_F]   [1 - Q_FB a_B]
        // [y_F^T  0 ][ nu] = [ -y_B^T a_B  ]
        let m = free.len();
        let mut sys = vec![vec![0.0; m + 1]; m + 1];
        let mut rhs = vec![0.0; m + 1];
        for (r, &i) in free.iter().enumerate() {
            for (cix, &j) in free.iter().enumerate() {
                sys[r][cix] = q[i][j];
            }
            sys[r][m] = y[i];
            sys[m][r] = y[i];
            rhs[r] = 1.0 - (0..n).filter(|j| state[*j] == 1).map(|j| q[i][j] * c).sum::<f64>();
        }
        rhs[m] = -(0..n).filter(|j| state[*j] == 1).map(|j| y[j] * c).sum::<f64>();
        let Some(sol) = gauss_solve(sys, rhs) else { continue };
        if sol[..m].iter().any(|&v| v < -1e-12 || v > c + 1e-12) {
            continue;
        }
        for (r, &i) in free.iter().enumerate() {
            a[i] = sol[r].clamp(0.0, c);
        }
        best = f64::max(best, objective(&a));
    }
    best
}

/// Largest distance between the empirical CDF of `xs` and `cdf`.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            f64::max(f - i as f64 / n, (i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// One-sample KS critical value at the 1% level (asymptotic).
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Supports of the two classes written out directly from the expansion
/// rule: each base region widened by `0.25 mu` on both sides, clipped.
pub fn support_intervals(minority: bool, mu: f64) -> Vec<(f64, f64)> {
    let base: [(f64, f64); 2] = if minority {
        [(0.0, 0.25), (0.5, 0.75)]
    } else {
        [(0.25, 0.5), (0.75, 1.0)]
    };
    let e = 0.25 * mu;
    let mut v: Vec<(f64, f64)> = base
        .iter()
        .map(|&(a, b)| ((a - e).max(0.0), (b + e).min(1.0)))
        .collect();
    if v[0].1 >= v[1].0 {
        v = vec![(v[0].0, v[1].1)];
    }
    v
}

pub fn inside(iv: &[(f64, f64)], x: f64) -> bool {
    iv.iter().any(|&(a, b)| x >= a && x <= b)
}

fn length(iv: &[(f64, f64)]) -> f64 {
    iv.iter().map(|(a, b)| b - a).sum()
}

fn sample(iv: &[(f64, f64)], rng: &mut impl Rng) -> f64 {
    let mut u = rng.random::<f64>() * length(iv);
    for &(a, b) in iv {
        if u < b - a {
            return a + u;
        }
        u -= b - a;
    }
    iv[iv.len() - 1].1
}

/// F1 of the Bayes rule estimated by sampling. In the overlap, points go
/// to the larger `prior * density`; an exact tie is resolved by whichever
/// constant choice scores higher, so both choices are simulated.
pub fn monte_carlo_bayes_f1(mu: f64, alpha: f64, samples: usize, seed: u64) -> f64 {
    let smin = support_intervals(true, mu);
    let smaj = support_intervals(false, mu);
    let dmin = (1.0 - alpha) / length(&smin);
    let dmaj = alpha / length(&smaj);
    let mut r = rng(seed);
    // (tp, fp, fn) for ties -> minority and ties -> majority
    let mut counts = [[0usize; 3]; 2];
    for _ in 0..samples {
        let is_min = r.random::<f64>() < 1.0 - alpha;
        let x = if is_min { sample(&smin, &mut r) } else { sample(&smaj, &mut r) };
        let pmin = if inside(&smin, x) { dmin } else { 0.0 };
        let pmaj = if inside(&smaj, x) { dmaj } else { 0.0 };
        for (k, tie_min) in [true, false].into_iter().enumerate() {
            let pred_min = pmin > pmaj || (pmin == pmaj && pmin > 0.0 && tie_min);
            match (is_min, pred_min) {
                (true, true) => counts[k][0] += 1,
                (false, true) => counts[k][1] += 1,
                (true, false) => counts[k][2] += 1,
                _ => {}
            }
        }
    }
    counts
        .iter()
        .map(|&[tp, fp, fn_]| {
            if tp == 0 {
                0.0
            } else {
                2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
            }
        })
        .fold(0.0, f64::max)
}

/// Spearman rank correlation (no tie correction needed for distinct values).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = pos as f64;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - mean) * (y - mean)).sum();
    let var: f64 = ra.iter().map(|x| (x - mean).powi(2)).sum();
    cov / var
}

/// Random symmetric PSD matrix `B B^T` with `B` of shape `n x k`.
pub fn random_psd(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let b: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| r.random::<f64>() * 2.0 - 1.0).collect())
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| (0..k).map(|t| b[i][t] * b[j][t]).sum()).collect())
        .collect()
}
