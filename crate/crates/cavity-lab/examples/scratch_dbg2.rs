use ndarray::array;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

fn main() {
    let a = array![
        [C64::new(2.0, 0.0), C64::new(0.3, 0.7), C64::new(0.0, -0.2)],
        [C64::new(0.3, -0.7), C64::new(1.0, 0.0), C64::new(0.5, 0.1)],
        [C64::new(0.0, 0.2), C64::new(0.5, -0.1), C64::new(3.0, 0.0)]
    ];
    let (vals, vecs) = a.eigh(UPLO::Lower).unwrap();
    for j in 0..3 {
        let col = vecs.column(j).mapv(|z| z.conj());
        let av = a.dot(&col);
        let resid: f64 = av.iter().zip(col.iter()).map(|(x, y)| (x - y * vals[j]).norm()).sum();
        println!("conj-col residual j={j}: {resid:.3e}");
    }
    for j in 0..3 {
        let row = vecs.row(j).mapv(|z| z.conj());
        let av = a.dot(&row);
        let resid: f64 = av.iter().zip(row.iter()).map(|(x, y)| (x - y * vals[j]).norm()).sum();
        println!("conj-row residual j={j}: {resid:.3e}");
    }
    // real symmetric check with vectors
    let b = array![[2.0_f64, 0.5, 0.1], [0.5, 1.0, -0.3], [0.1, -0.3, 3.0]];
    let (bv, bw) = b.eigh(UPLO::Lower).unwrap();
    for j in 0..3 {
        let col = bw.column(j).to_owned();
        let av = b.dot(&col);
        let resid: f64 = av.iter().zip(col.iter()).map(|(x, y)| (x - y * bv[j]).abs()).sum();
        println!("real col residual j={j}: {resid:.3e}");
    }
}
