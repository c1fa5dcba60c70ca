//! Brute-force solve of the joint (samples in system, arrival phase) chain
//! under threshold sampling, truncated at a maximum queue length.

use nalgebra::{DMatrix, DVector};

/// Mean number of samples found in the system by a newly generated sample.
///
/// State `(k, b)`: `k` samples queued or in service, `b` source events since
/// the last sample. Phases advance at rate λ; from phase `β-1` the next event
/// generates a sample, so arrivals see the law of `k` conditioned on
/// `b = β-1`.
pub fn observed_mean_queue(beta: usize, lambda: f64, mu: f64, k_max: usize) -> f64 {
    let n = (k_max + 1) * beta;
    let idx = |k: usize, b: usize| k * beta + b;
    let mut q = DMatrix::<f64>::zeros(n, n);
    for k in 0..=k_max {
        for b in 0..beta {
            let from = idx(k, b);
            if b + 1 < beta {
                q[(from, idx(k, b + 1))] += lambda;
            } else if k < k_max {
                q[(from, idx(k + 1, 0))] += lambda;
            }
            if k > 0 {
                q[(from, idx(k - 1, b))] += mu;
            }
        }
    }
    for i in 0..n {
        let out: f64 = q.row(i).sum();
        q[(i, i)] = -out;
    }
    // πQ = 0 with Σπ = 1: transpose and replace one balance row
    let mut a = q.transpose();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = a.lu().solve(&rhs).expect("chain generator is irreducible");
    let (mut mass, mut mean) = (0.0, 0.0);
    for k in 0..=k_max {
        let p = pi[idx(k, beta - 1)];
        mass += p;
        mean += k as f64 * p;
    }
    mean / mass
}
