//! Three-row instance where LAD splits the error over two rows and the detector
//! finds the single large error.

use sitl1::harness::run_example_3_1;

fn main() {
    let rep = run_example_3_1().expect("worked example runs");
    for c in &rep.checks {
        println!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{:?} elapsed", rep.elapsed);
}
