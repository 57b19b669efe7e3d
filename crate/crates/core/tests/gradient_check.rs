mod oracles;

use epochcast_core::trainers::{loss_and_grad, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn backprop_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..10 {
        let net = Network {
            dim: rng.random_range(1..5),
            hidden: if case % 3 == 0 { 0 } else { rng.random_range(1..7) },
            classes: rng.random_range(2..5),
        };
        let n = rng.random_range(1..9);
        let x: Vec<f64> = (0..n * net.dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..net.classes)).collect();
        let batch: Vec<usize> = (0..n).collect();
        let params = net.init(&mut rng);
        let (_, grad) = loss_and_grad(&net, &params, &x, &y, &batch);
        let fd = oracles::central_difference(|p| loss_and_grad(&net, p, &x, &y, &batch).0, &params, 1e-5);
        let err = oracles::relative_error(&grad, &fd);
        assert!(err < 1e-4, "case {case}: relative error {err}");
    }
}
