use lnrician::channel::{sample, ShapingParams};
use lnrician::llf::{llf_mean, LlfConfig};

fn main() {
    let truth = ShapingParams::new(5.0, 0.25).unwrap();
    let observed = sample(truth, 1000, 901).unwrap();
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for r in [4.0, 4.6, 5.0, 5.4, 6.0, 7.0, 9.0, 13.0] {
        for s2 in [0.22, 0.25, 0.28, 0.32, 0.45] {
            let cfg = LlfConfig { generated: 1_000_000, k: 15, n_llf: 10, seed: 5, literal_c: false };
            let v = llf_mean(&observed, ShapingParams::new(r, s2).unwrap(), &cfg).unwrap().value;
            if v > best.2 { best = (r, s2, v); }
            print!("{v:8.4}");
        }
        println!("   <- r={r}");
    }
    println!("kNN-LLF argmax: ({}, {}) = {:.4}", best.0, best.1, best.2);
}
