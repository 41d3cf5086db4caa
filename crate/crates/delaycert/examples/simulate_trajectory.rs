//! Simulates a published trajectory scenario and writes the state CSV plus
//! its JSON metadata sidecar.
//!
//! Usage: `simulate_trajectory [SCENARIO] [OUT_DIR] [T_END] [DT]`
//! Defaults: SCENARIO = `example2`, OUT_DIR = `.`, T_END = 30, DT = 1e-3.

use delaycert::presets::trajectory_scenarios;
use delaycert::sim::{
    estimate_decay_rate, simulate, write_trajectory_csv, write_trajectory_meta, DelayFunction,
    DEFAULT_DT, DEFAULT_T_END,
};
use nalgebra::DVector;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("example2", String::as_str);
    let out_dir = args.get(1).map_or(".", String::as_str);
    let t_end: f64 = args
        .get(2)
        .map_or(DEFAULT_T_END, |s| s.parse().expect("T_END must be a number"));
    let dt: f64 = args
        .get(3)
        .map_or(DEFAULT_DT, |s| s.parse().expect("DT must be a number"));

    let Some(scenario) = trajectory_scenarios().into_iter().find(|s| s.name == name) else {
        eprintln!("unknown scenario {name:?}; known: example2 example3");
        std::process::exit(64);
    };

    let delay = DelayFunction::new(
        scenario.delay_center,
        scenario.delay_amplitude,
        scenario.delay_frequency,
    )
    .expect("preset delay is valid");
    let z0 = DVector::from_vec(scenario.initial_state.clone());
    println!(
        "{name}: h(t) = {} + {}*sin({}*t), z(0) = {:?}, t_end = {t_end}, dt = {dt}",
        scenario.delay_center, scenario.delay_amplitude, scenario.delay_frequency, scenario.initial_state
    );

    let traj = match simulate(&scenario.model, delay, &z0, t_end, dt) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("simulation failed: {e}");
            std::process::exit(2);
        }
    };

    let dir = std::path::Path::new(out_dir);
    std::fs::create_dir_all(dir).expect("create output directory");
    let csv = dir.join(format!("{name}_trajectory.csv"));
    let meta = dir.join(format!("{name}_trajectory.json"));
    write_trajectory_csv(&traj, &csv).expect("write CSV");
    write_trajectory_meta(&traj, &meta).expect("write sidecar");

    println!("final state norm {:.3e}", traj.final_state().norm());
    match estimate_decay_rate(&traj, (5.0, t_end)) {
        Ok(k_est) => println!("empirical decay rate over [5, {t_end}]: {k_est:.4}"),
        Err(e) => println!("decay rate not estimable: {e}"),
    }
    println!("wrote {} and {}", csv.display(), meta.display());
}
