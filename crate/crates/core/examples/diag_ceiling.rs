use fourier_learn::baselines::{rbf_random_features, RbfParams};
use fourier_learn::dataset::gen_windmill;
use fourier_learn::svm::{accuracy, predict, train_linear_svm};

fn main() {
    let train = gen_windmill(2000, 4, 1.0, 0.0, 0).unwrap();
    let test = gen_windmill(10000, 4, 1.0, 0.0, 1).unwrap();
    for sigma in [0.05, 0.1, 0.15, 0.2, 0.3, 0.5] {
        let params = RbfParams { pairs: 4000, sigma, seed: 1 };
        let ftr = rbf_random_features(&train, &params).unwrap().values;
        let fte = rbf_random_features(&test, &params).unwrap().values;
        let svm = train_linear_svm(&ftr, train.labels(), 1.0, 1e-3).unwrap();
        let tr = accuracy(&predict(&svm, &ftr).unwrap(), train.labels());
        let te = accuracy(&predict(&svm, &fte).unwrap(), test.labels());
        println!("sigma={sigma:>5}: train {tr:.4} test {te:.4}");
    }
}
