//! Prints the coherence threshold for a given patch size and false-alarm rate.
//!
//! `cargo run --release -p qomega-core --example calibrate -- 8 0.001 100000 7`

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let get = |i: usize, d: &str| args.get(i).cloned().unwrap_or_else(|| d.to_string());
    let k: usize = get(0, "8").parse().expect("patch size");
    let delta: f64 = get(1, "0.001").parse().expect("delta");
    let trials: usize = get(2, "100000").parse().expect("trials");
    let seed: u64 = get(3, "7").parse().expect("seed");
    let tau = qomega_core::calibrate_threshold(k, delta, trials, seed).expect("calibration");
    println!("{tau:.17}");
}
