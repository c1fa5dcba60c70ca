mod common;

use common::ctmc::observed_mean_queue;
use qrecon_core::analytic::erlang_chain;

#[test]
fn mean_queue_matches_truncated_chain() {
    for beta in [1u32, 2, 3, 5] {
        for load in [0.3, 0.6, 0.9] {
            let mu = 1.0;
            let lambda = load * f64::from(beta) * mu;
            let closed = erlang_chain(beta, lambda, mu).unwrap();
            let brute = observed_mean_queue(beta as usize, lambda, mu, 200);
            assert!(
                (closed.mean_queue - brute).abs() < 1e-6,
                "beta={beta} load={load}: {} vs {brute}",
                closed.mean_queue
            );
            assert!((closed.mean_wait - closed.mean_queue / mu).abs() < 1e-15);
        }
    }
}

#[test]
fn threshold_three_at_one_and_a_half() {
    let closed = erlang_chain(3, 1.5, 1.0).unwrap();
    let brute = observed_mean_queue(3, 1.5, 1.0, 200);
    assert!((closed.mean_queue - brute).abs() < 1e-6);
}
