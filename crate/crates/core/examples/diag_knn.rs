use fourier_learn::dataset::gen_windmill;

fn main() {
    let train = gen_windmill(2000, 4, 1.0, 0.0, 0).unwrap();
    let test = gen_windmill(10000, 4, 1.0, 0.0, 1).unwrap();
    let tp = train.points();
    let mut errs = vec![0usize; 4];
    let ks = [1usize, 5, 15, 31];
    for i in 0..test.n() {
        let q = test.points().row(i);
        let mut dists: Vec<(f64, f64)> = (0..train.n())
            .map(|j| {
                let diff = &tp.row(j) - &q;
                (diff.dot(&diff), train.labels()[j])
            })
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (ki, &k) in ks.iter().enumerate() {
            let vote: f64 = dists[..k].iter().map(|d| d.1).sum();
            let pred = if vote >= 0.0 { 1.0 } else { -1.0 };
            if pred != test.labels()[i] {
                errs[ki] += 1;
            }
        }
    }
    for (ki, &k) in ks.iter().enumerate() {
        println!("{k}-NN test acc: {:.4}", 1.0 - errs[ki] as f64 / test.n() as f64);
    }
}
