use std::time::Instant;
use germcalc::accept::run_one;
fn main() {
    for id in [2u32, 3] {
        let t = Instant::now();
        let r = run_one(id, 0xACCE97);
        println!("{} [{} ms wall]", r.line(), t.elapsed().as_millis());
    }
}
