//! Print the combined error surface of the rule base on a coarse grid.

use fuzzwrap::fuzzy::{infer_error_tot, Partition, Term};

fn main() {
    let p = Partition::default();
    let steps: Vec<f64> = (-4..=4).map(|k| f64::from(k) * 0.25).collect();
    print!("  eL\\eR");
    for r in &steps {
        print!("{r:>7.2}");
    }
    println!();
    for l in &steps {
        print!("{l:>7.2}");
        for r in &steps {
            print!("{:>7.3}", infer_error_tot(*l, *r, &p));
        }
        println!();
    }

    let e = -0.3;
    let m = p.fuzzify(e);
    let degrees: Vec<String> = Term::ALL.iter().map(|&t| format!("{t:?}={:.2}", m.get(t))).collect();
    println!("\nfuzzify({e}): {}", degrees.join(" "));
}
