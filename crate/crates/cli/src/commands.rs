use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use geomlaw::boolean_model::{
    build_scene, clump_counts, euler_curvature_2d, offline_packing, volume, write_scene_csv, VolumeMethod,
};
use geomlaw::functionals::{
    cell_area_ecdf, component_count, edge_length_ecdf, h_xi, sample_variance_xi, vertex_pattern_count, Scene, Xi,
};
use geomlaw::graphs::{Built, GraphKind};
use geomlaw::limits::{
    convergence_experiment, coupling_curve, estimate_e_xi_infinity, rhs_integral, EstimateResult, ExperimentConfig,
    LimitSource, Task,
};
use geomlaw::packing_online::{rsa_fraction_experiment, write_rsa_csv};
use geomlaw::point_process::{attach_marks, sample_binomial, DensitySpec, MarkedPointSet};
use geomlaw::spatial::{format_num, PointSet};
use geomlaw::{Error, Result, Seed};
use serde_json::{json, Value};

use crate::{Command, Common, KindArg, OutFormat};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Sample { common, n, dim } => sample(&common, n, dim),
        Command::Graph {
            common,
            kind,
            k,
            directed,
            input,
        } => graph(&common, kind, k, directed, input),
        Command::Functional { common, input } => functional(&common, input),
        Command::Limit { common } => limit(&common),
        Command::Converge { common } => converge(&common),
        Command::Couple { common } => couple(&common),
        Command::Boolean { common } => boolean(&common),
        Command::Pack { common } => pack(&common),
        Command::Validate { path, config, schema } => validate(path.or(config), schema),
    }
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    ExperimentConfig::load(&text)
}

/// The config file (or an empty one), with the seed override applied and the
/// worker pool sized.
fn setup(common: &Common) -> Result<ExperimentConfig> {
    if common.threads > 0 {
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(common.threads).build_global();
    }
    let mut config = match &common.config {
        Some(p) => read_config(p)?,
        None => ExperimentConfig::load("{}")?,
    };
    if let Some(s) = common.seed {
        config.seed = s;
    }
    Ok(config)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

/// Writes `main` to `DIR/name` (or stdout) and, with an output directory,
/// the JSON summary next to it.
fn emit_dir(common: &Common, name: &str, main: &[u8], summary: Option<Value>) -> Result<()> {
    match &common.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), main)?;
            if let Some(s) = summary {
                fs::write(dir.join("summary.json"), pretty(&s))?;
            }
            Ok(())
        }
        None => emit(None, main),
    }
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s.into_bytes()
}

fn ext(common: &Common) -> &'static str {
    match common.format {
        OutFormat::Csv => "csv",
        OutFormat::Json => "json",
    }
}

fn marked_sample(config: &ExperimentConfig, density: &DensitySpec, n: usize, xi: Option<&dyn Xi>) -> Result<MarkedPointSet> {
    let seed = Seed(config.seed);
    let pts = sample_binomial(density, n, seed.child("points", 0))?;
    let mut marked = MarkedPointSet::unmarked(pts);
    let kinds = config.marks.iter().cloned().chain(xi.and_then(|x| x.mark_kind()));
    for kind in kinds {
        marked = attach_marks(marked, &kind, seed.child("marks", 0))?;
    }
    Ok(marked)
}

fn sample(common: &Common, n: Option<usize>, dim: Option<usize>) -> Result<()> {
    let config = setup(common)?;
    let density = match (dim, &config.density) {
        (Some(d), _) => DensitySpec::uniform_unit_cube(d),
        (None, Some(f)) => f.clone(),
        (None, None) => return Err(Error::Config {
            location: "density".into(),
            message: "give --dim or a config with a density".into(),
        }),
    };
    let n = match n {
        Some(n) => n,
        None => config.n_for(Task::Sample)?,
    };
    let marked = marked_sample(&config, &density, n, None)?;
    let mut buf = Vec::new();
    match common.format {
        OutFormat::Json => buf = pretty(&serde_json::to_value(&marked)?),
        OutFormat::Csv => {
            let d = marked.points.dim();
            if common.header {
                let mut names: Vec<String> = (0..d).map(|k| format!("x{k}")).collect();
                if marked.arrival.is_some() {
                    names.push("arrival".into());
                }
                if marked.radius.is_some() {
                    names.push("radius".into());
                }
                writeln!(buf, "{}", names.join(","))?;
            }
            for i in 0..marked.len() {
                let mut row: Vec<String> = marked.points.point(i).iter().map(|&x| format_num(x)).collect();
                for m in [&marked.arrival, &marked.radius].into_iter().flatten() {
                    row.push(format_num(m[i]));
                }
                writeln!(buf, "{}", row.join(","))?;
            }
        }
    }
    emit(common.out.as_deref(), &buf)
}

fn read_points(path: &Path) -> Result<PointSet> {
    let f = fs::File::open(path).map_err(|e| Error::Config {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    PointSet::read_csv(f)
}

fn points_for(config: &ExperimentConfig, input: &Option<PathBuf>, task: Task, xi: Option<&dyn Xi>) -> Result<MarkedPointSet> {
    match input {
        Some(p) => {
            let mut marked = MarkedPointSet::unmarked(read_points(p)?);
            if let Some(kind) = xi.and_then(|x| x.mark_kind()) {
                marked = attach_marks(marked, &kind, Seed(config.seed).child("marks", 0))?;
            }
            Ok(marked)
        }
        None => marked_sample(config, config.density_for(task)?, config.n_for(task)?, xi),
    }
}

fn graph(common: &Common, kind: Option<KindArg>, k: usize, directed: bool, input: Option<PathBuf>) -> Result<()> {
    let config = setup(common)?;
    let kind = match kind {
        Some(KindArg::Mst) => GraphKind::Mst,
        Some(KindArg::Knn) => GraphKind::Knn { k, directed },
        Some(KindArg::Delaunay) => GraphKind::Delaunay,
        Some(KindArg::Voronoi) => GraphKind::Voronoi { clip: None },
        Some(KindArg::Sig) => GraphKind::Sig,
        Some(KindArg::Gabriel) => GraphKind::Gabriel,
        Some(KindArg::Rng) => GraphKind::Rng,
        None => config.graph_for(Task::Graph)?.clone(),
    };
    let points = points_for(&config, &input, Task::Graph, None)?.points;
    let built = kind.build(&points)?;
    let mut buf = Vec::new();
    match (&built, common.format) {
        (Built::Graph(g), OutFormat::Csv) => g.write_csv(&mut buf)?,
        (Built::Graph(g), OutFormat::Json) => buf = pretty(&g.to_json(&kind)),
        (Built::Voronoi(d), OutFormat::Csv) => d.write_csv(&mut buf)?,
        (Built::Voronoi(d), OutFormat::Json) => buf = pretty(&d.to_json()),
    }
    emit(common.out.as_deref(), &buf)
}

fn table(common: &Common, rows: &[(&str, Value)]) -> Vec<u8> {
    match common.format {
        OutFormat::Json => pretty(&Value::Object(rows.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())),
        OutFormat::Csv => {
            let mut s = String::from("quantity,value\n");
            for (k, v) in rows {
                let v = match v {
                    Value::Number(x) => format_num(x.as_f64().unwrap_or(f64::NAN)),
                    Value::Null => String::new(),
                    other => other.to_string(),
                };
                s.push_str(&format!("{k},{v}\n"));
            }
            s.into_bytes()
        }
    }
}

fn functional(common: &Common, input: Option<PathBuf>) -> Result<()> {
    let config = setup(common)?;
    config.validate_for(Task::Functional)?;
    let xi = config.functional_for(Task::Functional)?;
    let marked = points_for(&config, &input, Task::Functional, Some(xi))?;
    let n = marked.len();
    let d = marked.points.dim();
    xi.validate(d)?;
    let scale = (n as f64).powf(1.0 / d as f64);
    let mut scene = Scene::new(marked);
    if let Some(f) = &config.density {
        scene = scene.with_support(f.bounding_box());
    }
    let h = h_xi(&scene, xi, scale)?;
    let mut rows: Vec<(&str, Value)> = vec![
        ("n", json!(n)),
        ("scale", json!(scale)),
        ("h", json!(h)),
        ("h_over_n", json!(h / n as f64)),
        (
            "variance",
            if n >= 2 { json!(sample_variance_xi(&scene, xi, scale)?) } else { Value::Null },
        ),
    ];
    let mut ecdf = None;
    if let Some(kind) = &config.graph {
        let built = kind.build(&scene.points.points)?;
        rows.push(("edges", json!(geomlaw::functionals::EdgeLengths::edge_lengths(&built).len())));
        if let Built::Graph(g) = &built {
            rows.push(("components", json!(component_count(g))));
            if let Some(p) = &config.pattern {
                rows.push(("pattern_count", json!(vertex_pattern_count(g, p)?)));
            }
        }
        if let Some(grid) = &config.ecdf_grid {
            ecdf = Some(match &built {
                Built::Graph(g) => edge_length_ecdf(g, scale, grid)?,
                Built::Voronoi(v) => cell_area_ecdf(v, n as f64, grid)?,
            });
        }
    }
    let main = table(common, &rows);
    emit_dir(common, &format!("functional.{}", ext(common)), &main, None)?;
    if let (Some(e), Some(dir)) = (ecdf, &common.out) {
        let mut buf = Vec::new();
        e.write_csv(&mut buf)?;
        fs::write(dir.join("ecdf.csv"), buf)?;
    }
    Ok(())
}

fn estimate_row(name: &str, e: &EstimateResult) -> String {
    format!(
        "{name},{},{},{},{},{},{},{}\n",
        format_num(e.mean),
        format_num(e.stderr),
        e.replicates,
        e.total,
        format_num(e.unstabilized_fraction),
        format_num(e.interval.0),
        format_num(e.interval.1)
    )
}

fn limit(common: &Common) -> Result<()> {
    let started = Instant::now();
    let config = setup(common)?;
    config.validate_for(Task::Limit)?;
    let xi = config.functional_for(Task::Limit)?;
    let density = config.density_for(Task::Limit)?;
    let seed = Seed(config.seed);
    let e = estimate_e_xi_infinity(xi, config.tau, density.dim(), &config.probe, config.replicates, seed.child("limit", 0))?;
    let rhs = match config.limit {
        LimitSource::Rhs {
            outer_samples,
            inner_replicates,
            method,
        } => Some(rhs_integral(density, xi, &config.probe, outer_samples, inner_replicates, method, seed.child("rhs", 0))?),
        _ => None,
    };
    let main = match common.format {
        OutFormat::Csv => {
            let mut s = String::from("quantity,mean,stderr,replicates,total,unstabilized_fraction,ci_lo,ci_hi\n");
            s.push_str(&estimate_row("e_xi_infinity", &e));
            if let Some(r) = &rhs {
                s.push_str(&estimate_row("rhs_integral", r));
            }
            s.into_bytes()
        }
        OutFormat::Json => pretty(&json!({"e_xi_infinity": e, "rhs_integral": rhs})),
    };
    let summary = json!({
        "config": config,
        "e_xi_infinity": e,
        "rhs_integral": rhs,
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    emit_dir(common, &format!("limit.{}", ext(common)), &main, Some(summary))
}

fn converge(common: &Common) -> Result<()> {
    let started = Instant::now();
    let config = setup(common)?;
    let report = convergence_experiment(&config)?;
    let main = match common.format {
        OutFormat::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
        OutFormat::Json => pretty(&serde_json::to_value(&report.rows)?),
    };
    let summary = json!({
        "config": report.config,
        "limit": report.limit,
        "rows": report.rows,
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    emit_dir(common, &format!("converge.{}", ext(common)), &main, Some(summary))
}

fn couple(common: &Common) -> Result<()> {
    let started = Instant::now();
    let config = setup(common)?;
    config.validate_for(Task::Couple)?;
    let density = config.density_for(Task::Couple)?;
    let k = config.coupling_radius.expect("validated");
    let rows = coupling_curve(density, k, &config.n_grid, config.replicates, Seed(config.seed))?;
    let main = match common.format {
        OutFormat::Csv => {
            let mut s = String::from("n,probability,stderr,replicates\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{}\n", r.n, format_num(r.probability), format_num(r.stderr), r.replicates));
            }
            s.into_bytes()
        }
        OutFormat::Json => pretty(&serde_json::to_value(&rows)?),
    };
    let summary = json!({"config": config, "rows": rows, "wall_time_seconds": started.elapsed().as_secs_f64()});
    emit_dir(common, &format!("couple.{}", ext(common)), &main, Some(summary))
}

fn boolean(common: &Common) -> Result<()> {
    let started = Instant::now();
    let mut config = setup(common)?;
    config.validate_for(Task::Boolean)?;
    let density = config.density_for(Task::Boolean)?.clone();
    let n = config.n_for(Task::Boolean)?;
    config.marks = Some(geomlaw::point_process::MarkKind::Radius(config.radius_for(Task::Boolean)?.clone()));
    let marked = marked_sample(&config, &density, n, None)?;
    let scene = build_scene(&marked, n as f64)?;
    let d = density.dim();
    let counts = clump_counts(&scene);
    let method = config.volume.unwrap_or(if d <= 2 {
        VolumeMethod::Exact
    } else {
        VolumeMethod::MonteCarlo {
            samples: 100_000,
            seed: config.seed,
        }
    });
    let vol = volume(&scene, method)?;
    let curvature = if d == 2 { Some(euler_curvature_2d(&scene)?) } else { None };
    let packing = offline_packing(&scene);
    let summary = json!({
        "config": config,
        "n": n,
        "clumps": counts.total,
        "clumps_by_order": counts.by_order,
        "volume": vol,
        "curvature": curvature,
        "packing_count": packing.count,
        "packing_exact": packing.exact,
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    let main = match common.format {
        OutFormat::Csv => {
            let mut buf = Vec::new();
            write_scene_csv(&scene, Some(&packing), &mut buf)?;
            buf
        }
        OutFormat::Json => {
            let mut s = summary.clone();
            s.as_object_mut().expect("object").remove("wall_time_seconds");
            pretty(&s)
        }
    };
    emit_dir(common, &format!("boolean.{}", ext(common)), &main, Some(summary))
}

fn pack(common: &Common) -> Result<()> {
    let started = Instant::now();
    let config = setup(common)?;
    config.validate_for(Task::Pack)?;
    let rows = rsa_fraction_experiment(config.density_for(Task::Pack)?, &config.n_grid, config.replicates, Seed(config.seed))?;
    let main = match common.format {
        OutFormat::Csv => {
            let mut buf = Vec::new();
            write_rsa_csv(&rows, &mut buf)?;
            buf
        }
        OutFormat::Json => pretty(&serde_json::to_value(&rows)?),
    };
    let summary = json!({"config": config, "rows": rows, "wall_time_seconds": started.elapsed().as_secs_f64()});
    emit_dir(common, &format!("pack.{}", ext(common)), &main, Some(summary))
}

fn validate(path: Option<PathBuf>, schema: bool) -> Result<()> {
    if schema {
        return emit(None, &pretty(&ExperimentConfig::json_schema()));
    }
    let path = path.ok_or_else(|| Error::Config {
        location: "validate".into(),
        message: "give the experiment file to check".into(),
    })?;
    let config = read_config(&path)?;
    emit(None, format!("ok\n{}\n", config.to_json_pretty()).as_bytes())
}
