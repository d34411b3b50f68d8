use fourier_learn::dataset::gen_windmill;
use fourier_learn::model::load_model;
use fourier_learn::svm::predict;

fn main() {
    let model = load_model(std::path::Path::new("/tmp/runs/wm_full/model.txt")).unwrap();
    let test = gen_windmill(10000, 4, 1.0, 0.0, 1).unwrap();
    let features = model.featurize(&test).unwrap();
    let pred = predict(&model.svm, &features).unwrap();
    let mut buckets = vec![(0usize, 0usize); 10];
    for i in 0..test.n() {
        let p = test.points().row(i);
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let b = ((r * 10.0) as usize).min(9);
        buckets[b].1 += 1;
        if pred[i] != test.labels()[i] {
            buckets[b].0 += 1;
        }
    }
    for (b, (err, tot)) in buckets.iter().enumerate() {
        println!(
            "r in [{:.1},{:.1}): err {:>5.2}% ({err}/{tot})",
            b as f64 / 10.0,
            (b + 1) as f64 / 10.0,
            100.0 * *err as f64 / (*tot).max(1) as f64
        );
    }
}
