use std::time::Instant;
use ndarray::Array2;
use drugqml::nn::matmul;

#[test]
#[ignore]
fn gemm_throughput() {
    for (m, k, n) in [(32usize, 5344usize, 512usize), (32, 512, 5344), (200, 5344, 512)] {
        let a = Array2::<f64>::from_elem((m, k), 1.0);
        let b = Array2::<f64>::from_elem((k, n), 1.0);
        for _ in 0..2 { let _ = matmul(a.view(), b.view()); }
        let reps = 30;
        let t = Instant::now();
        for _ in 0..reps { let _ = matmul(a.view(), b.view()); }
        let dt = t.elapsed().as_secs_f64();
        let flops = 2.0 * (m * k * n) as f64 * reps as f64;
        println!("{m}x{k}x{n}: {:.2} GFLOP/s ({:.3} ms/op)", flops / dt / 1e9, dt * 1000.0 / reps as f64);
    }
}

#[test]
#[ignore]
fn qsim_throughput() {
    use drugqml::qsim::{GateKind, StateVector};
    let mut state = StateVector::zero_state(8).unwrap();
    let t = Instant::now();
    let reps = 200_000;
    for i in 0..reps {
        state.apply_resolved(GateKind::RY, i % 8, None, 0.3);
    }
    let dt = t.elapsed().as_secs_f64();
    println!("8-qubit RY: {:.0} ns/gate, {:.1} M gates/s", dt / reps as f64 * 1e9, reps as f64 / dt / 1e6);
    assert!(state.norm_sq().is_finite());
}
