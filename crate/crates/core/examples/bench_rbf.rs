use fourier_learn::cli::rbf_baseline_accuracy;
use fourier_learn::dataset::gen_windmill;

fn main() {
    let train = gen_windmill(2000, 4, 1.0, 0.0, 0).unwrap();
    let test = gen_windmill(10000, 4, 1.0, 0.0, 1).unwrap();
    for pairs in [150usize, 300, 600, 1000] {
        let (tr, te) = rbf_baseline_accuracy(&train, &test, pairs, 1.0, 1e-3, 0).unwrap();
        println!("pairs={pairs:>5}: train {tr:.4} test {te:.4}");
    }
}
