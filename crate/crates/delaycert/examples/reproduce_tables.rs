//! Reproduces the published admissible-rate/delay tables.
//!
//! For every benchmark cell this bisects the feasibility boundary, grades
//! the result against the published value (within ±1%, bracketed by probes
//! at 0.97×/1.05×, or documented discrepancy), post-scans above the bound,
//! and emits `table.csv`, `manifest.json`, and `report.md`.
//!
//! Usage: `reproduce_tables [OUT_DIR] [EXAMPLE...]`
//! Defaults: OUT_DIR = `reproduction`, all examples.

use delaycert::presets::benchmarks;
use delaycert::search::{reproduce_all, write_csv, write_manifest, write_report, CellGrade, ReproduceOptions};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out_dir = args
        .first()
        .map_or_else(|| "reproduction".to_string(), Clone::clone);
    let filter: Vec<&str> = args.iter().skip(1).map(String::as_str).collect();

    let benches: Vec<_> = benchmarks()
        .into_iter()
        .filter(|b| filter.is_empty() || filter.contains(&b.name))
        .collect();
    if benches.is_empty() {
        eprintln!("no benchmark matches {filter:?}; known: example1 example2 example3");
        std::process::exit(64);
    }

    let opts = ReproduceOptions::default();
    eprintln!(
        "reproducing {} table(s), tolerance {:.0e}:",
        benches.len(),
        opts.tolerance
    );
    let started = std::time::Instant::now();
    let report = reproduce_all(&benches, &opts);
    eprintln!("total wall time {:.1}s", started.elapsed().as_secs_f64());

    let dir = std::path::Path::new(&out_dir);
    std::fs::create_dir_all(dir).expect("create output directory");
    write_csv(&report, &dir.join("table.csv")).expect("write CSV");
    write_manifest(&report, &dir.join("manifest.json")).expect("write manifest");
    write_report(&report, &dir.join("report.md")).expect("write report");

    let mut failed = false;
    for table in &report.tables {
        println!("{}:", table.name);
        for c in &table.cells {
            println!(
                "  mu={:<5} bound={} published={} deviation={} grade={:?} confidence={}",
                c.mu,
                c.bound.map_or_else(|| "-".into(), |b| format!("{b:.4}")),
                c.published,
                c.deviation
                    .map_or_else(|| "-".into(), |d| format!("{:+.2}%", 100.0 * d)),
                c.grade,
                c.confidence()
            );
            failed |= c.grade == CellGrade::Error;
        }
    }
    println!("outputs in {}", dir.display());
    std::process::exit(if failed { 2 } else { 0 });
}
