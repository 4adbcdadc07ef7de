use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use ktopo::constraints::{check_active_link, check_inactive_link, check_no_unclassified};
use ktopo::engine::run_tc_with;
use ktopo::snapshot::{parse_snapshot, write_snapshot};
use ktopo::{classify_consistency, AlgorithmSpec, ConsistencyLevel, LinkState, TcOptions, Topology};
use ktopo_sim::metrics::RelativeRow;
use ktopo_sim::{compare_runs, compare_to_unrestricted, RunMetrics, RunSummary, SweepSpec};
use log::{info, warn};

use crate::output::{aligned, slug, write_atomic};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_sweep(path: &Path) -> Result<SweepSpec> {
    SweepSpec::from_toml(&read(path)?).with_context(|| format!("invalid config {}", path.display()))
}

pub fn run(config: &Path, out: &Path, seed: Option<u64>, algorithm: Option<String>) -> Result<ExitCode> {
    let mut spec = load_sweep(config)?;
    if spec.axes != Default::default() {
        warn!("ignoring the [sweep] table of {}; use `ktopo sweep` to run it", config.display());
        spec.axes = Default::default();
    }
    if let Some(a) = algorithm {
        spec.base.algorithm = a;
    }
    if let Some(s) = seed {
        spec.base.seeds = vec![s];
    }
    spec.validate().with_context(|| format!("invalid config {}", config.display()))?;
    execute(&spec, out)
}

pub fn sweep(config: &Path, out: &Path) -> Result<ExitCode> {
    execute(&load_sweep(config)?, out)
}

fn execute(spec: &SweepSpec, out: &Path) -> Result<ExitCode> {
    let cells = spec.cells();
    info!("running {} cells", cells.len());
    let mut failed = 0;
    for (cell, result) in cells.iter().zip(spec.run()) {
        match result {
            Ok(m) => {
                let stem = write_run(&m, out)?;
                let s = m.summary();
                println!("{stem}: {} rows, L1 {}, mean size {:.1}, mean LSM {:.1}", s.tc_runs, opt(s.l1), s.mean_topology_size, s.mean_lsm);
            }
            Err(e) => {
                failed += 1;
                eprintln!("{} seed {}: {e}", cell.config.algorithm, cell.seed);
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} runs failed", cells.len());
    }
    Ok(ExitCode::SUCCESS)
}

/// Writes `<slug>_seed<N>.csv` and `.json`; returns the stem.
fn write_run(m: &RunMetrics, out: &Path) -> Result<String> {
    let stem = format!("{}_seed{}", slug(&m.algorithm), m.seed);
    write_atomic(&out.join(format!("{stem}.csv")), |w| m.write_csv(w).map_err(std::io::Error::other))?;
    write_atomic(&out.join(format!("{stem}.json")), |w| m.write_summary_json(w).map_err(std::io::Error::other))?;
    Ok(stem)
}

fn algorithm_spec(algorithm: Option<String>, config: Option<&Path>) -> Result<AlgorithmSpec> {
    match config {
        Some(path) => {
            let mut cfg = load_sweep(path)?.base;
            if let Some(a) = algorithm {
                cfg.algorithm = a;
            }
            Ok(cfg.algorithm_spec()?)
        }
        None => Ok(algorithm.as_deref().unwrap_or("ektc").parse()?),
    }
}

fn load_snapshot(path: &Path) -> Result<Topology> {
    parse_snapshot(&read(path)?).with_context(|| format!("invalid snapshot {}", path.display()))
}

pub fn check(snapshot: &Path, algorithm: Option<String>, config: Option<&Path>) -> Result<ExitCode> {
    let spec = algorithm_spec(algorithm, config)?;
    let t = load_snapshot(snapshot)?;
    let mut violations = check_no_unclassified(&t);
    violations.extend(check_inactive_link(&t, &spec));
    violations.extend(check_active_link(&t, &spec));
    for v in &violations {
        println!("{v}");
    }
    Ok(if violations.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

pub fn tc(snapshot: &Path, algorithm: Option<String>, config: Option<&Path>, out: Option<&Path>) -> Result<ExitCode> {
    let spec = algorithm_spec(algorithm, config)?;
    let mut t = load_snapshot(snapshot)?;
    let opts = TcOptions { check_precondition: true, ..TcOptions::default() };
    let r = run_tc_with(&mut t, &spec, &opts)?;
    let consistency = classify_consistency(&t, &spec);
    let report = [
        ("algorithm", spec.to_string()),
        ("nodes", t.node_count().to_string()),
        ("links", t.link_count().to_string()),
        ("active", t.count_state(LinkState::Active).to_string()),
        ("inactive", t.count_state(LinkState::Inactive).to_string()),
        ("links_processed", r.links_processed.to_string()),
        ("nac_unclassifications", r.nac_unclassifications.to_string()),
        ("nac_inactivations", r.nac_inactivations.to_string()),
        ("loop_count", r.loop_count.to_string()),
        ("lsm_count", r.lsm_count.to_string()),
        ("wall_ms", format!("{:.3}", r.wall_time.as_secs_f64() * 1e3)),
        ("consistency", format!("{consistency:?}")),
    ];
    for (k, v) in report {
        println!("{k}={v}");
    }
    if let Some(path) = out {
        let text = write_snapshot(&t);
        write_atomic(path, |w| w.write_all(text.as_bytes()))?;
    }
    Ok(if consistency == ConsistencyLevel::StronglyConsistent { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |x| format!("{x:.1}"))
}

fn ratio(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |x| format!("{x:.3}"))
}

fn table(rows: &[RelativeRow]) -> String {
    let mut cells = vec![
        ["algorithm", "runs", "L1", "L50", "L100", "size", "LSM", "wall_ms", "rho_L1", "rho_L50", "rho_L100", "rho_size", "rho_LSM", "rho_wall"]
            .map(String::from)
            .to_vec(),
    ];
    for r in rows {
        cells.push(vec![
            r.algorithm.clone(),
            r.runs.to_string(),
            opt(r.l1),
            opt(r.l50),
            opt(r.l100),
            format!("{:.1}", r.mean_topology_size),
            format!("{:.1}", r.mean_lsm),
            format!("{:.3}", r.mean_wall_ms),
            ratio(r.rho_l1),
            ratio(r.rho_l50),
            ratio(r.rho_l100),
            ratio(r.rho_topology_size),
            ratio(r.rho_lsm),
            ratio(r.rho_wall_time),
        ]);
    }
    aligned(&cells)
}

fn write_rows(path: &Path, rows: &[RelativeRow]) -> Result<()> {
    write_atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        for r in rows {
            out.serialize(r).map_err(std::io::Error::other)?;
        }
        out.flush()
    })
}

pub fn report(out: &Path, baseline: &str) -> Result<ExitCode> {
    let mut summaries: Vec<RunSummary> = Vec::new();
    let mut paths: Vec<_> = fs::read_dir(out)
        .with_context(|| format!("reading {}", out.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for p in paths {
        let s = serde_json::from_str(&read(&p)?).with_context(|| format!("invalid summary {}", p.display()))?;
        summaries.push(s);
    }
    if summaries.is_empty() {
        bail!("no run summaries in {}", out.display());
    }
    let baseline = baseline.parse::<AlgorithmSpec>().map(|s| s.to_string()).unwrap_or_else(|_| baseline.to_string());
    let rows = compare_runs(&summaries, &baseline)?;
    write_rows(&out.join("report.csv"), &rows)?;
    print!("{}", table(&rows));
    let by_weight = compare_to_unrestricted(&summaries);
    if !by_weight.is_empty() {
        write_rows(&out.join("report_minweight.csv"), &by_weight)?;
        println!("\nrelative to the same algorithm without min-weight:");
        print!("{}", table(&by_weight));
    }
    Ok(ExitCode::SUCCESS)
}
