//! Seeded generation of generic convex polytopes, batch verification of the
//! counting theorems, and the search for polytopes with few BMD-ears.
//!
//! Trial `i` of a configuration draws from ChaCha8 seeded with `cfg.seed` on
//! stream `i`, so every trial is reproducible on its own and results do not
//! depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::delaunay::check_generic;
use crate::error::{GeomError, Result};
use crate::exactnum::{format_rational, rational_from_f64, Sign, VectorD};
use crate::hull::{convex_hull, HullComplex};
use crate::polygon2d::boundary_cycle;
use crate::report::{analyze, Analysis};
use crate::{Point, Scalar};

/// Radii are drawn from `[1, 1 + RADIAL_JITTER]`.
pub const RADIAL_JITTER: f64 = 1.0 / 16.0;
/// Trials evaluated in parallel before results are merged in order.
const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    pub d: usize,
    /// Vertex counts are drawn uniformly from `n_min..=n_max`.
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    pub trials: usize,
    pub coordinate_denominator_bound: u64,
    /// Rejected candidate points allowed per trial.
    pub rejection_limit: usize,
    /// Stop a search early once the best instance has two BMD-ears and at
    /// least this many more D-ears. The trial count remains an upper bound.
    pub stop_at_gap: Option<usize>,
}

impl TrialConfig {
    pub fn new(d: usize, n: usize, seed: u64, trials: usize) -> Self {
        Self::with_range(d, n, n, seed, trials)
    }

    pub fn with_range(d: usize, n_min: usize, n_max: usize, seed: u64, trials: usize) -> Self {
        TrialConfig {
            d,
            n_min,
            n_max,
            seed,
            trials,
            coordinate_denominator_bound: 1_000_000,
            rejection_limit: 1000,
            stop_at_gap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GeomError::InvalidInput(m));
        if self.d < 2 {
            return bad(format!("dimension {} is below 2", self.d));
        }
        if self.n_min < self.d + 2 || self.n_min > self.n_max {
            return bad(format!(
                "vertex range {}..={} must start at d + 2 = {} or above",
                self.n_min,
                self.n_max,
                self.d + 2
            ));
        }
        if self.trials == 0 {
            return bad("at least one trial is required".into());
        }
        if self.coordinate_denominator_bound == 0 {
            return bad("coordinate denominator bound must be positive".into());
        }
        Ok(())
    }

    fn rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

fn sample_point(rng: &mut ChaCha8Rng, d: usize, denominator: u64) -> Point {
    let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dir
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let radius = 1.0 + RADIAL_JITTER * rng.random::<f64>();
    VectorD::new(
        dir.iter()
            .map(|x| rational_from_f64(x / norm * radius, denominator))
            .collect(),
    )
}

/// Adds `candidate` if it is a hull vertex, dropping any points it swallows.
/// `hull` caches the hull of `points` once there are enough of them.
fn try_extend(
    points: &mut Vec<Point>,
    hull: &mut Option<HullComplex<Scalar>>,
    candidate: Point,
    d: usize,
) -> bool {
    if let Some(h) = hull {
        if h.facets
            .iter()
            .all(|f| f.side(&candidate) != Sign::Positive)
        {
            return false;
        }
    }
    points.push(candidate);
    if points.len() <= d + 1 {
        if crate::exactnum::affine_rank(points) == Some(points.len() - 1) {
            return true;
        }
        points.pop();
        return false;
    }
    loop {
        match convex_hull(points, d) {
            Ok(h) => {
                *hull = Some(h);
                return true;
            }
            Err(GeomError::NotInConvexPosition { point }) if point + 1 < points.len() => {
                points.remove(point);
            }
            Err(_) => {
                points.pop();
                return false;
            }
        }
    }
}

/// Vertices of a random generic convex polytope for one trial. Points are
/// drawn near the unit sphere; a draw inside the current hull is rejected,
/// and earlier points that a draw pushes inside are dropped. A finished set
/// that fails the genericity check is redrawn.
/// Polygons come back in counterclockwise boundary order.
pub fn gen_polytope(cfg: &TrialConfig, trial: usize) -> Result<Vec<Point>> {
    cfg.validate()?;
    let mut rng = cfg.rng(trial);
    let d = cfg.d;
    let n = rng.random_range(cfg.n_min..=cfg.n_max);
    let mut rejections = 0;
    let mut points: Vec<Point> = Vec::with_capacity(n);
    let mut hull = None;
    loop {
        while points.len() < n {
            let candidate = sample_point(&mut rng, d, cfg.coordinate_denominator_bound);
            if !try_extend(&mut points, &mut hull, candidate, d) {
                rejections += 1;
                if rejections > cfg.rejection_limit {
                    return Err(GeomError::GenerationFailed(format!(
                        "trial {trial}: {rejections} rejected candidates with {} of {n} points placed (d = {d}, seed = {})",
                        points.len(),
                        cfg.seed
                    )));
                }
            }
        }
        if check_generic(&points, d).is_generic {
            break;
        }
        rejections += 1;
        points.clear();
        hull = None;
    }
    if d == 2 {
        let order = boundary_cycle(&points)?;
        points = order.into_iter().map(|i| points[i].clone()).collect();
    }
    Ok(points)
}

/// Counts and pass flags for one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremRecord {
    pub d: usize,
    pub n: usize,
    pub is_generic: bool,
    pub dt_simplices: usize,
    pub udt_simplices: usize,
    pub d_ears: usize,
    pub ud_ears: usize,
    pub bmd_ears: usize,
    pub bmud_ears: usize,
    pub empty_spheres: usize,
    pub full_spheres: usize,
    pub census_identities_pass: Option<bool>,
    pub thm2_pass: bool,
    pub thm5_pass: bool,
    pub thm6_pass: bool,
    pub thm3_observed: bool,
    /// Violations of proved statements; nonempty only if something is broken.
    pub defects: Vec<String>,
}

impl TheoremRecord {
    pub fn from_analysis(a: &Analysis<Scalar>) -> Result<Self> {
        let flags = a.theorems();
        Ok(TheoremRecord {
            d: a.d,
            n: a.n(),
            is_generic: true,
            dt_simplices: a.lifted.dt.simplices.len(),
            udt_simplices: a.lifted.udt.simplices.len(),
            d_ears: a.d_ears.len(),
            ud_ears: a.ud_ears.len(),
            bmd_ears: a.bm.bmd_facet_ids.len(),
            bmud_ears: a.bm.bmud_facet_ids.len(),
            empty_spheres: a.spheres.empty_count,
            full_spheres: a.spheres.full_count,
            census_identities_pass: flags.census_identities_pass,
            thm2_pass: flags.thm2_pass,
            thm5_pass: flags.thm5_pass,
            thm6_pass: flags.thm6_pass,
            thm3_observed: flags.thm3_observed,
            defects: a.defects()?,
        })
    }

    /// D-ears that are not BMD-ears.
    pub fn gap(&self) -> usize {
        self.d_ears - self.bmd_ears
    }
}

/// Checks genericity, runs the full pipeline and fills a record.
pub fn verify_theorems(points: &[Point], d: usize) -> Result<TheoremRecord> {
    let g = check_generic(points, d);
    if !g.is_generic {
        let ids = g.violations.first().cloned().unwrap_or_default();
        return Err(GeomError::generic(ids, g.notes.join("; ")));
    }
    TheoremRecord::from_analysis(&analyze(points, d)?)
}

/// Coordinates as `p/q` strings, for archiving an instance.
pub fn echo_coordinates(points: &[Point]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| p.coords().iter().map(format_rational).collect())
        .collect()
}

/// One trial: where it came from and what it produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub record: TheoremRecord,
}

/// A generated instance with its analysis.
pub struct Trial {
    pub index: usize,
    pub points: Vec<Point>,
    pub analysis: Analysis<Scalar>,
    pub record: TheoremRecord,
}

/// Generates and analyzes one trial. Generation output is generic, so it
/// is not checked a second time.
pub fn run_trial(cfg: &TrialConfig, trial: usize) -> Result<Trial> {
    let points = gen_polytope(cfg, trial)?;
    let analysis = analyze(&points, cfg.d)?;
    let record = TheoremRecord::from_analysis(&analysis)?;
    Ok(Trial {
        index: trial,
        points,
        analysis,
        record,
    })
}

/// Trials `range` evaluated in parallel, returned in trial order.
pub fn run_trials(cfg: &TrialConfig, range: std::ops::Range<usize>) -> Vec<Result<Trial>> {
    range.into_par_iter().map(|i| run_trial(cfg, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BestInstance {
    pub trial: usize,
    pub record: TheoremRecord,
    pub coordinates: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub config: TrialConfig,
    pub trials_run: usize,
    pub generation_failures: Vec<String>,
    pub thm5_passes: usize,
    pub thm6_passes: usize,
    pub thm3_observed: usize,
    pub defect_trials: Vec<usize>,
    pub min_bmd: Option<usize>,
    pub best: Option<BestInstance>,
    pub records: Vec<TrialRecord>,
}

impl SearchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Better means fewer BMD-ears, then more D-ears left uncertified; earlier
/// trials win remaining ties.
fn improves(candidate: &TheoremRecord, best: &TheoremRecord) -> bool {
    (candidate.bmd_ears, std::cmp::Reverse(candidate.gap()))
        < (best.bmd_ears, std::cmp::Reverse(best.gap()))
}

/// Randomized search for the instance with the fewest BMD-ears.
pub fn search_min_bm_ears(cfg: &TrialConfig) -> Result<SearchReport> {
    cfg.validate()?;
    if cfg.d < 3 {
        return Err(GeomError::InvalidInput(
            "the search needs dimension 3 or more".into(),
        ));
    }
    let mut report = SearchReport {
        config: cfg.clone(),
        trials_run: 0,
        generation_failures: Vec::new(),
        thm5_passes: 0,
        thm6_passes: 0,
        thm3_observed: 0,
        defect_trials: Vec::new(),
        min_bmd: None,
        best: None,
        records: Vec::new(),
    };
    let mut start = 0;
    'chunks: while start < cfg.trials {
        let end = (start + CHUNK).min(cfg.trials);
        for (i, outcome) in (start..end).zip(run_trials(cfg, start..end)) {
            report.trials_run = i + 1;
            let trial = match outcome {
                Ok(t) => t,
                Err(e) => {
                    report.generation_failures.push(format!("trial {i}: {e}"));
                    continue;
                }
            };
            let r = trial.record;
            report.thm5_passes += usize::from(r.thm5_pass);
            report.thm6_passes += usize::from(r.thm6_pass);
            report.thm3_observed += usize::from(r.thm3_observed);
            if !r.defects.is_empty() {
                report.defect_trials.push(i);
            }
            report.min_bmd = Some(report.min_bmd.map_or(r.bmd_ears, |m| m.min(r.bmd_ears)));
            if report.best.as_ref().is_none_or(|b| improves(&r, &b.record)) {
                report.best = Some(BestInstance {
                    trial: i,
                    record: r.clone(),
                    coordinates: echo_coordinates(&trial.points),
                });
            }
            report.records.push(TrialRecord {
                trial: i,
                seed: cfg.seed,
                record: r,
            });
            if let (Some(gap), Some(best)) = (cfg.stop_at_gap, &report.best) {
                if best.record.bmd_ears == 2 && best.record.gap() >= gap {
                    break 'chunks;
                }
            }
        }
        start = end;
    }
    Ok(report)
}
