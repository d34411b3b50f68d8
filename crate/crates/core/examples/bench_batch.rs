use std::time::Instant;

use fourier_learn::dataset::gen_windmill;
use fourier_learn::fourier::potential_batch;
use ndarray::{Array1, Array2};

fn main() {
    let data = gen_windmill(2000, 4, 1.0, 0.0, 0).unwrap();
    let alpha = Array1::from_elem(2000, 0.5);
    let omegas = Array2::from_shape_fn((100, 2), |(i, j)| (i as f64 * 0.37 + j as f64) % 12.0 - 6.0);
    let _ = potential_batch(&data, &alpha, &omegas, true).unwrap();
    let reps = 500;
    let t0 = Instant::now();
    for _ in 0..reps {
        let (v, g) = potential_batch(&data, &alpha, &omegas, true).unwrap();
        std::hint::black_box((v, g));
    }
    let dt = t0.elapsed().as_secs_f64();
    let evals = reps as f64 * 100.0 * 2000.0;
    println!("with grad: {:.2} ns/point-eval ({:.3}s total)", dt / evals * 1e9, dt);
    let t0 = Instant::now();
    for _ in 0..reps {
        let (v, g) = potential_batch(&data, &alpha, &omegas, false).unwrap();
        std::hint::black_box((v, g));
    }
    let dt = t0.elapsed().as_secs_f64();
    println!("no grad:   {:.2} ns/point-eval ({:.3}s total)", dt / evals * 1e9, dt);
}
