use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use esph::delaunay::{check_generic, TriangulationKind};
use esph::exactnum::format_rational;
use esph::harness::{gen_polytope, search_min_bm_ears, TrialConfig};
use esph::pointfile::{format_points, parse_points};
use esph::polygon2d::{census2d, curvature_radii};
use esph::report::{analyze, Analysis};
use esph::shelling::{line_shelling, validate_shelling};
use esph::{GeomError, Point, Scalar};

mod svg;

#[derive(Parser)]
#[command(
    name = "esph",
    version,
    about = "Ears, shellings and extremal spheres of convex polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report whether the points form a generic convex polytope.
    Check { file: PathBuf },
    /// Run the full pipeline and print the JSON report.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        repro: Repro,
    },
    /// Circle census of a convex polygon given in boundary order.
    Census2d {
        file: PathBuf,
        #[command(flatten)]
        repro: Repro,
    },
    /// Line shelling of the lower or upper triangulation ending at a simplex.
    Shelling {
        file: PathBuf,
        /// Vertex ids of the last simplex, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<usize>,
        #[arg(long, value_enum)]
        group: Group,
        #[command(flatten)]
        repro: Repro,
    },
    /// Print a random generic convex polytope as a point file.
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        verts: usize,
        #[arg(long, env = "ESPH_SEED", default_value_t = 0)]
        seed: u64,
        /// Trial index within the seed's stream.
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Search random polytopes for few Delaunay BM-ears.
    Search {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, env = "ESPH_SEED", default_value_t = 0)]
        seed: u64,
        /// Smallest vertex count drawn (default: dim + 2).
        #[arg(long)]
        n_min: Option<usize>,
        /// Largest vertex count drawn (default: dim + 7).
        #[arg(long)]
        n_max: Option<usize>,
        /// Stop once the best instance has two Delaunay BM-ears and at least
        /// this many other Delaunay ears.
        #[arg(long)]
        stop_at_gap: Option<usize>,
    },
    /// Draw a polygon, its Delaunay edges and its extremal neighboring circles.
    Svg {
        file: PathBuf,
        /// Output path; standard output if absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct Repro {
    /// Where to write the input when a proved statement fails.
    #[arg(long, default_value = "esph-repro.txt")]
    repro: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Lower,
    Upper,
}

impl Group {
    fn kind(self) -> TriangulationKind {
        match self {
            Group::Lower => TriangulationKind::Delaunay,
            Group::Upper => TriangulationKind::UpperDelaunay,
        }
    }
}

/// A failed run and its exit code.
#[derive(Debug)]
enum Failure {
    Other(String),
    NotGeneric(String),
    Parse(String),
    Defect(String),
    NotABMEar(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::NotGeneric(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Defect(_) => 4,
            Failure::NotABMEar(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Other(m)
            | Failure::NotGeneric(m)
            | Failure::Parse(m)
            | Failure::Defect(m)
            | Failure::NotABMEar(m) => m,
        }
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::NotABMEar { .. } => Failure::NotABMEar(e.to_string()),
            GeomError::GenerationFailed(_) => Failure::Other(e.to_string()),
            e if e.is_input_rejection() => Failure::NotGeneric(e.to_string()),
            e => Failure::Defect(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("esph: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Check { file } => check(&file),
        Command::Analyze { file, repro } => analyze_cmd(&file, &repro.repro),
        Command::Census2d { file, repro } => census_cmd(&file, &repro.repro),
        Command::Shelling {
            file,
            target,
            group,
            repro,
        } => shelling_cmd(&file, target, group, &repro.repro),
        Command::Gen {
            dim,
            verts,
            seed,
            trial,
        } => {
            let cfg = TrialConfig::new(dim, verts, seed, trial + 1);
            let points = gen_polytope(&cfg, trial)?;
            emit(&format_points(dim, &points));
            Ok(())
        }
        Command::Search {
            dim,
            trials,
            seed,
            n_min,
            n_max,
            stop_at_gap,
        } => {
            let n_min = n_min.unwrap_or(dim + 2);
            let n_max = n_max.unwrap_or(dim + 7).max(n_min);
            let mut cfg = TrialConfig::with_range(dim, n_min, n_max, seed, trials);
            cfg.stop_at_gap = stop_at_gap;
            let report = search_min_bm_ears(&cfg)?;
            emit(&format!("{}\n", report.to_json()));
            if report.defect_trials.is_empty() {
                Ok(())
            } else {
                Err(Failure::Defect(format!(
                    "proved statements failed in trials {:?}",
                    report.defect_trials
                )))
            }
        }
        Command::Svg { file, out } => {
            let (d, points) = read_points(&file)?;
            require_plane(d)?;
            let analysis = analyze_generic(&points, d)?;
            let text = svg::render(&points, &analysis)?;
            match out {
                Some(path) => fs::write(&path, text).map_err(|e| io_failure(&path, e)),
                None => {
                    emit(&text);
                    Ok(())
                }
            }
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Other(format!("{}: {e}", path.display()))
}

fn read_points(path: &Path) -> Result<(usize, Vec<Point>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let file = parse_points(&text).map_err(|e| Failure::Parse(e.to_string()))?;
    Ok((file.d, file.points))
}

fn require_plane(d: usize) -> Outcome {
    if d == 2 {
        Ok(())
    } else {
        Err(Failure::NotGeneric(format!(
            "this command needs a polygon, got dimension {d}"
        )))
    }
}

/// Writes to standard output. A closed pipe is not an error: the exit code
/// still reports the outcome of the checks.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("esph: cannot write output: {e}");
        }
    }
}

fn print_json<S: Serialize>(value: &S) {
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(value).expect("serializable")
    ));
}

fn check(path: &Path) -> Outcome {
    let (d, points) = read_points(path)?;
    let report = check_generic(&points, d);
    print_json(&report);
    if report.is_generic {
        Ok(())
    } else {
        Err(Failure::NotGeneric(
            "input is not a generic convex polytope".into(),
        ))
    }
}

fn analyze_generic(points: &[Point], d: usize) -> Result<Analysis<Scalar>, Failure> {
    let report = check_generic(points, d);
    if !report.is_generic {
        return Err(Failure::NotGeneric(format!(
            "input is not a generic convex polytope: {}",
            report.notes.join("; ")
        )));
    }
    Ok(analyze(points, d)?)
}

/// Saves the input as a point file with the findings as comments.
fn dump_repro(path: &Path, d: usize, points: &[Point], defects: &[String]) -> Failure {
    let mut text = String::new();
    for line in defects {
        text.push_str(&format!("# {line}\n"));
    }
    text.push_str(&format_points(d, points));
    let saved = match fs::write(path, text) {
        Ok(()) => format!("input saved to {}", path.display()),
        Err(e) => format!("could not save input to {}: {e}", path.display()),
    };
    Failure::Defect(format!("{} ({saved})", defects.join("; ")))
}

fn analyze_cmd(path: &Path, repro: &Path) -> Outcome {
    let (d, points) = read_points(path)?;
    let analysis = match analyze_generic(&points, d) {
        Err(Failure::Defect(m)) => return Err(dump_repro(repro, d, &points, &[m])),
        other => other?,
    };
    emit(&format!("{}\n", analysis.report_json().to_json()));
    let mut defects = analysis.defects()?;
    defects.extend(analysis.shelling_defects());
    if defects.is_empty() {
        Ok(())
    } else {
        Err(dump_repro(repro, d, &points, &defects))
    }
}

#[derive(Serialize)]
struct CensusOutput {
    n: usize,
    s_minus: usize,
    t_minus: usize,
    u_minus: usize,
    s_plus: usize,
    t_plus: usize,
    u_plus: usize,
    identities_pass: bool,
    radius_condition_holds: bool,
    local_min_count: usize,
    local_max_count: usize,
}

fn census_cmd(path: &Path, repro: &Path) -> Outcome {
    let (d, points) = read_points(path)?;
    require_plane(d)?;
    let report = check_generic(&points, d);
    if !report.is_generic {
        return Err(Failure::NotGeneric(format!(
            "input is not a generic convex polygon: {}",
            report.notes.join("; ")
        )));
    }
    let census = census2d(&points)?;
    let radii = curvature_radii(&points)?;
    print_json(&CensusOutput {
        n: census.n,
        s_minus: census.s_minus,
        t_minus: census.t_minus,
        u_minus: census.u_minus,
        s_plus: census.s_plus,
        t_plus: census.t_plus,
        u_plus: census.u_plus,
        identities_pass: census.identities_hold(),
        radius_condition_holds: radii.condition_holds,
        local_min_count: radii.local_min_count,
        local_max_count: radii.local_max_count,
    });
    let mut defects = census.identity_failures();
    if radii.condition_holds && (radii.local_min_count < 2 || radii.local_max_count < 2) {
        defects.push("fewer than two local minima or maxima of the circumradius".into());
    }
    if defects.is_empty() {
        Ok(())
    } else {
        Err(dump_repro(repro, d, &points, &defects))
    }
}

#[derive(Serialize)]
struct ShellingOutput {
    group: &'static str,
    target: Vec<usize>,
    facet_order: Vec<Vec<usize>>,
    line_base: Vec<String>,
    line_direction: Vec<String>,
}

fn shelling_cmd(path: &Path, mut target: Vec<usize>, group: Group, repro: &Path) -> Outcome {
    let (d, points) = read_points(path)?;
    let analysis = analyze_generic(&points, d)?;
    target.sort_unstable();
    let kind = group.kind();
    let lifted = &analysis.lifted;
    let facet = lifted
        .groups
        .group(kind)
        .iter()
        .copied()
        .find(|&f| lifted.lifted.facets[f].vertex_ids == target)
        .ok_or_else(|| {
            Failure::NotGeneric(format!(
                "{target:?} is not a simplex of the {} triangulation",
                group_name(group)
            ))
        })?;
    let order = line_shelling(&lifted.lifted, &lifted.groups, facet)?;
    let coords = |v: &esph::VectorD<Scalar>| v.coords().iter().map(format_rational).collect();
    print_json(&ShellingOutput {
        group: group_name(group),
        target,
        facet_order: order.simplices.clone(),
        line_base: coords(&order.line_base),
        line_direction: coords(&order.line_direction),
    });
    validate_shelling(&order, analysis.triangulation(kind))
        .map_err(|e| dump_repro(repro, d, &points, &[format!("invalid shelling at {e}")]))
}

fn group_name(group: Group) -> &'static str {
    match group {
        Group::Lower => "lower",
        Group::Upper => "upper",
    }
}
