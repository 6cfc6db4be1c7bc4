use crate::{verify, Cli, Command, Common, GridArgs, Outcome};
use anyhow::{bail, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use tdcrp::customization::{Accelerations, CustomizationConfig};
use tdcrp::live_update::read_updates;
use tdcrp::network::RoadNetwork;
use tdcrp::network::{generate_synthetic, load_network, save_network, td_dijkstra_ea, SyntheticParams};
use tdcrp::partition::{build_partition, load_partition, save_partition, MultiLevelPartition};
use tdcrp::plf::{ApproxError, PERIOD};
use tdcrp::query::{read_queries, write_results_csv, QueryConfig, QueryResult, QuerySpec};
use tdcrp::Engine;

pub fn dispatch(cli: &Cli) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::Generate(grid) => generate(c, grid),
        Command::Partition => partition(c),
        Command::Customize => customize(c),
        Command::Query { count, oracle } => query(c, *count, *oracle),
        Command::Update => update(c),
        Command::Verify {
            grid,
            count,
            update_batches,
        } => verify::run(c, grid, *count, *update_batches),
    }
}

fn need<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref().with_context(|| format!("--{flag} is required"))
}

/// Write `csv` to stdout and, with `--out`, to `<out>/<name>`.
fn emit(c: &Common, name: &str, csv: &str) -> Result<()> {
    print!("{csv}");
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn level_sizes(c: &Common) -> Result<Vec<usize>> {
    ensure!(!c.levels.is_empty(), "--levels must name at least one level");
    c.levels
        .iter()
        .map(|&e| {
            ensure!((1..=31).contains(&e), "level exponent {e} out of range 1..=31");
            Ok(1usize << e)
        })
        .collect()
}

pub fn customization_config(c: &Common, levels: usize) -> Result<CustomizationConfig> {
    let eps = match c.eps.len() {
        1 => vec![c.eps[0]; levels],
        n if n == levels => c.eps.clone(),
        n => bail!("--eps has {n} values for {levels} levels"),
    };
    let epsilon = eps
        .iter()
        .map(|&e| ApproxError::new(e).with_context(|| format!("bad epsilon {e}")))
        .collect::<Result<Vec<_>>>()?;
    ensure!(c.workers >= 1, "--workers must be at least 1");
    Ok(CustomizationConfig {
        epsilon,
        accelerations: Accelerations::ALL,
        workers: c.workers,
    })
}

pub fn grid_network(grid: &GridArgs, seed: u64) -> Result<RoadNetwork> {
    ensure!(grid.width >= 1 && grid.height >= 1, "grid must have at least one vertex");
    ensure!((0.0..=1.0).contains(&grid.td_fraction), "--td-fraction must lie in [0, 1]");
    Ok(generate_synthetic(&SyntheticParams::new(
        grid.width,
        grid.height,
        grid.td_fraction,
        grid.breakpoints,
        seed,
    )))
}

fn generate(c: &Common, grid: &GridArgs) -> Outcome {
    let path = need(&c.network, "network")?;
    let net = grid_network(grid, c.seed)?;
    save_network(&net, path).with_context(|| format!("writing {}", path.display()))?;
    let (bps, td) = net.breakpoint_stats();
    eprintln!(
        "{} vertices, {} arcs, {td} time-dependent, {bps} breakpoints",
        net.vertex_count(),
        net.arc_count()
    );
    Ok(true)
}

fn read_network(c: &Common) -> Result<RoadNetwork> {
    let path = need(&c.network, "network")?;
    load_network(path).with_context(|| format!("reading {}", path.display()))
}

fn partition(c: &Common) -> Outcome {
    let out = need(&c.partition, "partition")?;
    let net = read_network(c)?;
    let p = build_partition(&net, &level_sizes(c)?)?;
    save_partition(&p, out).with_context(|| format!("writing {}", out.display()))?;
    let cells: Vec<String> = (1..=p.level_count()).map(|l| p.cell_count(l).to_string()).collect();
    eprintln!("cells per level: {}", cells.join(","));
    Ok(true)
}

fn read_partition(c: &Common, net: &RoadNetwork) -> Result<MultiLevelPartition> {
    let path = c
        .partition
        .as_deref()
        .context("no partition: run `tdcrp partition` first and pass --partition")?;
    ensure!(
        path.exists(),
        "partition {} does not exist: run `tdcrp partition` first",
        path.display()
    );
    load_partition(path, net).with_context(|| format!("reading {}", path.display()))
}

fn customize(c: &Common) -> Outcome {
    let net = read_network(c)?;
    let p = read_partition(c, &net)?;
    let mut engine = Engine::new(&net, &p)?;
    let cfg = customization_config(c, engine.level_count())?;
    let mut stats = engine.customize(&cfg);
    if c.no_timings {
        stats.levels.iter_mut().for_each(|l| l.time_s = 0.0);
    }
    if let Some(path) = &c.snapshot {
        engine
            .save_snapshot(path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    emit(c, "customization.csv", &stats.to_csv())?;
    Ok(true)
}

fn read_engine(c: &Common) -> Result<Engine> {
    let path = need(&c.snapshot, "snapshot")?;
    let engine = Engine::load_snapshot(path).with_context(|| format!("reading {}", path.display()))?;
    ensure!(
        engine.is_customized(),
        "snapshot {} is not customized: run `tdcrp customize` first",
        path.display()
    );
    Ok(engine)
}

pub fn random_queries(n: usize, count: usize, seed: u64) -> Vec<QuerySpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| QuerySpec {
            source: rng.gen_range(0..n as u32),
            target: rng.gen_range(0..n as u32),
            departure_ms: rng.gen_range(0..PERIOD as u64),
        })
        .collect()
}

/// Travel-time error of `got` relative to the optimum, in percent.
pub fn relative_error_pct(got: &QueryResult, opt: Option<i64>) -> Option<f64> {
    let (a, b) = (got.arrival_ms()?, opt?);
    let travel = b - got.departure.round() as i64;
    Some(if travel == 0 {
        0.0
    } else {
        100.0 * (a - b).abs() as f64 / travel as f64
    })
}

fn query(c: &Common, count: usize, oracle: bool) -> Outcome {
    let engine = read_engine(c)?;
    let specs = match &c.queries {
        Some(path) => read_queries(path).with_context(|| format!("reading {}", path.display()))?,
        None => random_queries(engine.vertex_count(), count, c.seed),
    };
    let n = engine.vertex_count() as u32;
    if let Some(q) = specs.iter().find(|q| q.source >= n || q.target >= n) {
        bail!("query {} -> {} names a vertex outside 0..{n}", q.source, q.target);
    }
    let original = oracle.then(|| engine.original_network());
    let mut querier = engine.querier(QueryConfig::default());
    let mut rows = Vec::with_capacity(specs.len());
    let mut errors = Vec::new();
    for q in &specs {
        let start = Instant::now();
        let r = querier.run(q.source, q.target, q.departure_ms as f64);
        let ns = if c.no_timings { 0 } else { start.elapsed().as_nanos() as u64 };
        if let Some(net) = &original {
            let opt = td_dijkstra_ea(net, q.source, q.target, q.departure_ms as f64).arrival_ms();
            ensure!(
                opt.is_some() == r.arrival.is_some(),
                "reachability of {} -> {} differs from Dijkstra",
                q.source,
                q.target
            );
            errors.extend(relative_error_pct(&r, opt));
        }
        rows.push((r, ns));
    }

    let mut csv = write_results_csv(rows.iter().map(|(r, ns)| (r, *ns)));
    let k = rows.len().max(1) as f64;
    let avg = |f: &dyn Fn(&(QueryResult, u64)) -> f64| rows.iter().map(f).sum::<f64>() / k;
    let reached: Vec<i64> = rows.iter().filter_map(|(r, _)| r.travel_ms()).collect();
    let avg_travel = reached.iter().sum::<i64>() as f64 / reached.len().max(1) as f64;
    let (scanned, relaxed) = (avg(&|(r, _)| r.scanned_vertices as f64), avg(&|(r, _)| r.relaxed_arcs as f64));
    let (bps, ns) = (avg(&|(r, _)| r.evaluated_breakpoints as f64), avg(&|(_, ns)| *ns as f64));
    let _ = writeln!(csv, "avg,,,,{avg_travel:.1},{scanned:.1},{relaxed:.1},{bps:.1},{ns:.0}");
    emit(c, "queries.csv", &csv)?;

    let mut summary = String::from("queries,unreachable,avg_scanned,avg_relaxed,avg_bps,avg_time_ms,avg_err_pct,max_err_pct\n");
    let (avg_err, max_err) = if oracle {
        let m = errors.iter().copied().fold(0.0, f64::max);
        (
            format!("{:.4}", errors.iter().sum::<f64>() / errors.len().max(1) as f64),
            format!("{m:.4}"),
        )
    } else {
        Default::default()
    };
    let _ = writeln!(
        summary,
        "{},{},{scanned:.1},{relaxed:.1},{bps:.1},{:.4},{avg_err},{max_err}",
        rows.len(),
        rows.len() - reached.len(),
        ns / 1e6
    );
    emit(c, "query_summary.csv", &summary)?;
    Ok(true)
}

fn update(c: &Common) -> Outcome {
    let path = need(&c.snapshot, "snapshot")?;
    let mut engine = read_engine(c)?;
    let upath = need(&c.updates, "updates")?;
    let batch = read_updates(upath).with_context(|| format!("reading {}", upath.display()))?;
    let changes = engine.apply_updates(&batch)?;
    engine
        .save_snapshot(path)
        .with_context(|| format!("writing {}", path.display()))?;
    eprintln!("{} arcs changed", changes.arcs.len());
    emit(c, "changes.csv", &changes.to_csv(engine.level_count()))?;
    Ok(true)
}
