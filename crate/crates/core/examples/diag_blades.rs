use fourier_learn::cli::rbf_baseline_accuracy;
use fourier_learn::dataset::gen_windmill;

fn main() {
    for blades in [2u32, 3] {
        let train = gen_windmill(2000, blades, 1.0, 0.0, 0).unwrap();
        let test = gen_windmill(10000, blades, 1.0, 0.0, 1).unwrap();
        // 1-NN reference
        let tp = train.points();
        let mut err = 0usize;
        for i in 0..test.n() {
            let q = test.points().row(i);
            let mut best = (f64::INFINITY, 0.0);
            for j in 0..train.n() {
                let diff = &tp.row(j) - &q;
                let d2 = diff.dot(&diff);
                if d2 < best.0 {
                    best = (d2, train.labels()[j]);
                }
            }
            if best.1 != test.labels()[i] {
                err += 1;
            }
        }
        let knn = 1.0 - err as f64 / test.n() as f64;
        let (_, rbf) = rbf_baseline_accuracy(&train, &test, 600, 1.0, 1e-3, 0).unwrap();
        println!("blades={blades}: 1-NN {knn:.4}  rbf-rf(600 pairs) {rbf:.4}");
    }
}
