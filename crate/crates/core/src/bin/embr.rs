use clap::{Parser, Subcommand};
use embr::geometry::parse_vec3;
use embr::planner::{benchmark_instance, Algorithm, PlanMode, PlanningGrid};
use embr::sim::{compute_report, run_scenario, Scenario};
use embr::world_model::{read_map_file, VoxelGrid};
use embr::Vec3;
use std::error::Error;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "embr", version, about = "Firefighting robot team simulator and planning tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario and write logs plus report.json.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Stop after this many ticks instead of the scenario duration.
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long, default_value = "info")]
        log_level: String,
    },
    /// Plan one path on a map file and print its waypoints as CSV.
    Plan {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_parser = vec3)]
        start: Vec3,
        #[arg(long, value_parser = vec3)]
        goal: Vec3,
        #[arg(long, default_value = "lazytheta", value_parser = algo)]
        algo: Algorithm,
        #[arg(long, default_value_t = 0.0)]
        inflation: f64,
    },
    /// Run all three planners on every map in a directory.
    BenchPlanner {
        #[arg(long)]
        maps: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute the run report from a log directory.
    Report {
        #[arg(long)]
        logs: PathBuf,
    },
}

fn vec3(s: &str) -> Result<Vec3, String> {
    parse_vec3(s).ok_or_else(|| format!("expected x,y,z, got `{s}`"))
}

fn algo(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).ok_or_else(|| format!("unknown algorithm `{s}` (astar, theta, lazytheta)"))
}

fn grid_for(map: &VoxelGrid, inflation: f64) -> Result<PlanningGrid, Box<dyn Error>> {
    let mode = if map.dims()[2] == 1 { PlanMode::TwoD } else { PlanMode::ThreeD };
    Ok(PlanningGrid::new(map, inflation, mode, map.origin().z + 0.5 * map.resolution())?)
}

/// Start and goal for a benchmark map: from `<stem>.query` (two x,y,z
/// lines) when present, else the first and last free cells.
fn query_for(path: &Path, grid: &PlanningGrid) -> Option<(Vec3, Vec3)> {
    if let Ok(text) = std::fs::read_to_string(path.with_extension("query")) {
        let pts: Vec<Vec3> = text.lines().filter(|l| !l.trim().is_empty()).filter_map(parse_vec3).collect();
        return (pts.len() == 2).then(|| (pts[0], pts[1]));
    }
    let g = grid.geometry();
    let free: Vec<usize> = (0..g.len()).filter(|&i| !grid.map().occupancy()[i]).collect();
    Some((g.cell_center(g.unlinear(*free.first()?)), g.cell_center(g.unlinear(*free.last()?))))
}

fn main() -> Result<(), Box<dyn Error>> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { scenario, seed, out, ticks, log_level } => {
            env_logger::Builder::new().parse_filters(&log_level).init();
            let mut scn = Scenario::load(&scenario)?;
            if let Some(s) = seed {
                scn.seed = s;
            }
            let report = run_scenario(&scn, &out, ticks)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.all_fires_out() || report.coordination_violations > 0 {
                std::process::exit(2);
            }
        }
        Cmd::Plan { map, start, goal, algo, inflation } => {
            env_logger::init();
            let grid = grid_for(&read_map_file(&map)?, inflation)?;
            let path = grid.plan(&start, &goal, algo)?;
            path.write_csv(std::io::stdout().lock())?;
            eprintln!(
                "{}: length {:.4}, expansions {}, los checks {}",
                algo.name(),
                path.total_length,
                path.expansions,
                path.los_checks
            );
        }
        Cmd::BenchPlanner { maps, out } => {
            env_logger::init();
            let mut files: Vec<PathBuf> = std::fs::read_dir(&maps)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "map"))
                .collect();
            files.sort();
            let mut w = std::io::BufWriter::new(std::fs::File::create(&out)?);
            writeln!(w, "instance,algorithm,length,expansions,los_checks,runtime_ms")?;
            for f in &files {
                let grid = grid_for(&read_map_file(f)?, 0.0)?;
                let name = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let Some((s, g)) = query_for(f, &grid) else {
                    log::warn!("{name}: no free cells");
                    continue;
                };
                match benchmark_instance(&name, &grid, &s, &g) {
                    Ok(rows) => {
                        for r in rows {
                            writeln!(
                                w,
                                "{},{},{},{},{},{:.3}",
                                r.instance, r.algorithm, r.length, r.expansions, r.los_checks, r.runtime_ms
                            )?;
                        }
                    }
                    Err(e) => log::warn!("{name}: {e}"),
                }
            }
            w.flush()?;
            println!("{} maps, report in {}", files.len(), out.display());
        }
        Cmd::Report { logs } => {
            let report = compute_report(&logs)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}
