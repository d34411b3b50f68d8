use fourier_learn::dataset::gen_windmill;
use fourier_learn::fourier::{Atom, DualMeasure, Mode};
use fourier_learn::game::measure_features;
use fourier_learn::svm::{accuracy, predict, train_linear_svm};
use ndarray::array;

fn main() {
    let text = std::fs::read_to_string("/tmp/runs/wm_full/trace.csv").unwrap();
    let modes: Vec<(f64, f64)> = text
        .lines()
        .skip(2)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[4].parse().unwrap(), c[5].parse().unwrap())
        })
        .collect();
    let train = gen_windmill(2000, 4, 1.0, 0.0, 0).unwrap();
    let test = gen_windmill(10000, 4, 1.0, 0.0, 1).unwrap();
    for t in [100usize, 200, 300, 400, 500, 600] {
        let atoms: Vec<Atom> = modes[..t]
            .iter()
            .map(|&(a, b)| Atom {
                mode: Mode::Frequency(array![a, b]),
                weight: 1.0 / t as f64,
            })
            .collect();
        let measure = DualMeasure::new(atoms).unwrap();
        let counts = vec![1u32; t];
        let ftr = measure_features(&train, &measure, &counts).unwrap();
        let fte = measure_features(&test, &measure, &counts).unwrap();
        let svm = train_linear_svm(&ftr, train.labels(), 1.0, 1e-3).unwrap();
        let te = accuracy(&predict(&svm, &fte).unwrap(), test.labels());
        let tr = accuracy(&predict(&svm, &ftr).unwrap(), train.labels());
        println!("T={t:>4}: train {tr:.4} test {te:.4}");
    }
}
