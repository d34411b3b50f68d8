use fourier_learn::dataset::gen_windmill;
use fourier_learn::model::load_model;
use fourier_learn::svm::{accuracy, predict, train_linear_svm};

fn main() {
    let model = load_model(std::path::Path::new("/tmp/runs/wm_full/model.txt")).unwrap();
    let train = gen_windmill(2000, 4, 1.0, 0.0, 0).unwrap();
    let test = gen_windmill(10000, 4, 1.0, 0.0, 1).unwrap();
    let f_train = model.featurize(&train).unwrap();
    let f_test = model.featurize(&test).unwrap();
    let t = model.rounds as f64;
    for (name, scale) in [("unscaled", 1.0), ("1/sqrt(T)", 1.0 / t.sqrt())] {
        let ftr = f_train.mapv(|v| v * scale);
        let fte = f_test.mapv(|v| v * scale);
        let svm = train_linear_svm(&ftr, train.labels(), 1.0, 1e-4).unwrap();
        let tr = accuracy(&predict(&svm, &ftr).unwrap(), train.labels());
        let te = accuracy(&predict(&svm, &fte).unwrap(), test.labels());
        println!("{name:>10}: train {tr:.4} test {te:.4}");
    }
    // also a small C sweep on unscaled features
    for c in [0.03, 0.1, 0.3, 3.0] {
        let svm = train_linear_svm(&f_train, train.labels(), c, 1e-4).unwrap();
        let tr = accuracy(&predict(&svm, &f_train).unwrap(), train.labels());
        let te = accuracy(&predict(&svm, &f_test).unwrap(), test.labels());
        println!("  C={c:>5}: train {tr:.4} test {te:.4}");
    }
}
