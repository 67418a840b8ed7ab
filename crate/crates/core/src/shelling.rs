//! Bruggesser-Mani line shellings of the lower and upper facet complexes of a
//! lifted hull, shelling validation, and BM-ear certification.
//!
//! Every facet hyperplane of the lifted hull is the graph of an affine
//! function `h_j` over the first `d` coordinates. A lower facet is a BM-ear
//! when its function is the strict minimum of all `h_j` somewhere, i.e. it
//! carries a facet of the lower envelope; upper facets mirror this with the
//! maximum.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use rayon::prelude::*;

use crate::delaunay::{FacetGroups, Triangulation, TriangulationKind};
use crate::error::{GeomError, Result};
use crate::exactnum::{centroid, Field, Ring, VectorD};
use crate::hull::{ridges_of, HullComplex};
use crate::lp::{pivot_simplex, Scaled};

/// Retries allowed when the shelling ray crosses two hyperplanes at once.
pub const MAX_TIE_RETRIES: usize = 16;

/// `h(x) = slope · x + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFn<T> {
    pub slope: VectorD<T>,
    pub intercept: T,
}

impl<T: Field> AffineFn<T> {
    pub fn eval(&self, x: &VectorD<T>) -> T {
        self.slope.dot(x) + &self.intercept
    }
}

/// Facet hyperplanes of a lifted hull as functions of the first `d`
/// coordinates, indexed by facet id.
pub fn facet_functions<T: Field>(h: &HullComplex<T>) -> Result<Vec<AffineFn<T>>> {
    let last = h.ambient_dim - 1;
    h.facets
        .iter()
        .map(|f| {
            let c = f.normal[last].clone();
            if c.is_zero() {
                return Err(GeomError::generic(
                    f.vertex_ids.clone(),
                    "lifted facet is vertical",
                ));
            }
            let slope = f.normal.truncated().scale(&(-T::one() / &c));
            Ok(AffineFn {
                slope,
                intercept: f.offset.clone() / c,
            })
        })
        .collect()
}

fn kind_sign(kind: TriangulationKind) -> i64 {
    match kind {
        TriangulationKind::Delaunay => 1,
        TriangulationKind::UpperDelaunay => -1,
    }
}

/// Facet hyperplanes `(normal, offset)` of a lifted hull, each cleared to
/// a positive multiple over the ring.
fn ring_planes<T: Field>(h: &HullComplex<T>) -> Result<Vec<Vec<T::Ring>>> {
    let last = h.ambient_dim - 1;
    h.facets
        .iter()
        .map(|f| {
            if f.normal[last].is_zero() {
                return Err(GeomError::generic(
                    f.vertex_ids.clone(),
                    "lifted facet is vertical",
                ));
            }
            let mut c = f.normal.coords().to_vec();
            c.push(f.offset.clone());
            Ok(T::clear_denominators(&c))
        })
        .collect()
}

/// `x` as ring coordinates `(X, w)` with `w > 0` and `x = X / w`.
fn homogenize<T: Field>(x: &VectorD<T>) -> Vec<T::Ring> {
    let mut c = x.coords().to_vec();
    c.push(T::one());
    T::clear_denominators(&c)
}

fn dehomogenize<T: Field>(x: &[T::Ring]) -> VectorD<T> {
    let (coords, w) = x.split_at(x.len() - 1);
    let w = T::from_ring(w[0].clone());
    VectorD::new(
        coords
            .iter()
            .map(|c| T::from_ring(c.clone()) / &w)
            .collect(),
    )
}

/// The gaps `h_j - h_F` against one facet `F`, negated for the upper
/// envelope so that `F` is strictly extreme at `x` iff every gap is positive
/// there. Each gap is kept as ring coefficients `(slope, offset)` of
/// `slope · x + offset`, up to a positive factor.
struct Gaps<R> {
    facet: usize,
    d: usize,
    terms: Vec<Vec<R>>,
}

impl<R: Ring> Gaps<R> {
    /// With `c_j` the last normal coordinate of facet `j`, the gap times
    /// `c_j c_F` is `c_F (b_j - a_j · x) - c_j (b_F - a_F · x)`, which only
    /// needs products of hyperplane coefficients.
    fn new<T: Field<Ring = R>>(planes: &[Vec<R>], facet: usize, kind: TriangulationKind) -> Self {
        let d = planes[facet].len() - 2;
        let f = &planes[facet];
        let cf = &f[d];
        let terms = planes
            .iter()
            .map(|g| {
                let cg = &g[d];
                let flip = (cf.is_positive() == cg.is_positive()) != (kind_sign(kind) > 0);
                let mut c: Vec<R> = (0..d)
                    .map(|i| cg.clone() * &f[i] - cf.clone() * &g[i])
                    .collect();
                c.push(cf.clone() * &g[d + 1] - cg.clone() * &f[d + 1]);
                if flip {
                    c.iter_mut().for_each(|v| *v = -v.clone());
                }
                T::reduce_ring_row(&mut c);
                c
            })
            .collect();
        Gaps { facet, d, terms }
    }

    /// Gap `j` at the homogeneous point `x`.
    fn positive_at(&self, j: usize, x: &[R]) -> bool {
        let t = &self.terms[j];
        let mut acc = t[self.d].clone() * &x[self.d];
        for i in 0..self.d {
            acc += t[i].clone() * &x[i];
        }
        acc.is_positive()
    }

    fn violated_at(&self, x: &[R]) -> Vec<usize> {
        (0..self.terms.len())
            .filter(|&j| j != self.facet && !self.positive_at(j, x))
            .collect()
    }

    /// Row of the homogenized program over `(u, v, tau, s)` with
    /// `x = u - v`: `s - (slope · x + offset · tau) <= 0`, right-hand side 0.
    fn row(&self, j: usize) -> Vec<R> {
        let t = &self.terms[j];
        let d = self.d;
        let mut row = vec![R::zero(); 2 * d + 3];
        for i in 0..d {
            row[i] = -t[i].clone();
            row[d + i] = t[i].clone();
        }
        row[2 * d] = -t[d].clone();
        row[2 * d + 1] = R::one();
        row
    }
}

/// Maximizes `s` subject to the gap rows, `tau >= s` and `|x_i|, tau <= 1`.
/// Returns the homogeneous point `(u - v, tau)` when the optimum is positive.
fn solve_active<R: Ring>(mut rows: Vec<Vec<R>>, d: usize) -> Option<Vec<R>> {
    let width = 2 * d + 2;
    let (tau, s) = (2 * d, 2 * d + 1);
    let mut row = vec![R::zero(); width + 1];
    row[s] = R::one();
    row[tau] = -R::one();
    rows.push(row);
    for i in 0..=2 * d {
        let mut row = vec![R::zero(); width + 1];
        row[i] = R::one();
        row[width] = R::one();
        rows.push(row);
    }
    let mut c = vec![R::zero(); width];
    c[s] = R::one();
    match pivot_simplex(rows, c) {
        Scaled::Solved { value, z, .. } if value.is_positive() => {
            let mut x: Vec<R> = (0..d).map(|i| z[i].clone() - &z[d + i]).collect();
            x.push(z[tau].clone());
            Some(x)
        }
        _ => None,
    }
}

/// A point `x` where `facet` is the strict minimum (lower) or maximum
/// (upper) of all facet functions, or `None` if there is none.
///
/// The condition is homogenized as `max s` over `(x, tau, s)` with every
/// gap `g_j(x, tau) >= s`, `tau >= s` and `|x_i|, tau <= 1`; a positive
/// optimum gives the witness `x / tau`. Constraints are generated lazily,
/// starting from the facet's neighbors: an optimum of zero on a subset
/// already proves there is no witness, and a witness for a subset is checked
/// against every gap before it is accepted.
pub fn envelope_point<T: Field>(
    h: &HullComplex<T>,
    facet: usize,
    kind: TriangulationKind,
) -> Result<Option<VectorD<T>>> {
    let gaps = Gaps::new::<T>(&ring_planes(h)?, facet, kind);
    Ok(envelope_point_with(&gaps, &h.neighbors(facet)).map(|x| dehomogenize(&x)))
}

fn envelope_point_with<R: Ring>(gaps: &Gaps<R>, seed_rows: &[usize]) -> Option<Vec<R>> {
    let mut active: Vec<usize> = seed_rows
        .iter()
        .copied()
        .filter(|&j| j != gaps.facet)
        .collect();
    active.sort_unstable();
    active.dedup();
    loop {
        let rows: Vec<Vec<R>> = active.iter().map(|&j| gaps.row(j)).collect();
        let x = solve_active(rows, gaps.d)?;
        let violated = gaps.violated_at(&x);
        if violated.is_empty() {
            return Some(x);
        }
        active.extend(violated);
        active.sort_unstable();
        active.dedup();
    }
}

/// `(x, h_F(x))`: on the facet hyperplane of `facet`.
fn lift_onto<T: Field>(h: &HullComplex<T>, facet: usize, x: VectorD<T>) -> VectorD<T> {
    let f = &h.facets[facet];
    let last = h.ambient_dim - 1;
    let y = (f.offset.clone() - f.normal.truncated().dot(&x)) / &f.normal[last];
    x.extended(y)
}

/// Lifted envelope witness: `(x, h_F(x))`, on the facet hyperplane and
/// strictly beyond every other one.
pub fn envelope_witness<T: Field>(
    h: &HullComplex<T>,
    facet: usize,
    kind: TriangulationKind,
) -> Result<Option<VectorD<T>>> {
    Ok(envelope_point(h, facet, kind)?.map(|x| lift_onto(h, facet, x)))
}

/// BM-ears of both groups, with one witness per member.
#[derive(Debug, Clone, PartialEq)]
pub struct BMEarReport<T> {
    pub bmd_facet_ids: BTreeSet<usize>,
    pub bmud_facet_ids: BTreeSet<usize>,
    /// Lifted witness per member facet.
    pub witnesses: BTreeMap<usize, VectorD<T>>,
}

impl<T> BMEarReport<T> {
    pub fn total(&self) -> usize {
        self.bmd_facet_ids.len() + self.bmud_facet_ids.len()
    }

    pub fn ids(&self, kind: TriangulationKind) -> &BTreeSet<usize> {
        match kind {
            TriangulationKind::Delaunay => &self.bmd_facet_ids,
            TriangulationKind::UpperDelaunay => &self.bmud_facet_ids,
        }
    }
}

pub fn bm_ear_set<T: Field>(h: &HullComplex<T>, groups: &FacetGroups) -> Result<BMEarReport<T>> {
    let jobs: Vec<(usize, TriangulationKind)> = groups
        .lower
        .iter()
        .map(|&f| (f, TriangulationKind::Delaunay))
        .chain(
            groups
                .upper
                .iter()
                .map(|&f| (f, TriangulationKind::UpperDelaunay)),
        )
        .collect();
    let planes = ring_planes(h)?;
    let found: Vec<Option<VectorD<T>>> = jobs
        .par_iter()
        .map(|&(f, kind)| {
            let gaps = Gaps::new::<T>(&planes, f, kind);
            envelope_point_with(&gaps, &h.neighbors(f)).map(|x| lift_onto(h, f, dehomogenize(&x)))
        })
        .collect();

    let mut report = BMEarReport {
        bmd_facet_ids: BTreeSet::new(),
        bmud_facet_ids: BTreeSet::new(),
        witnesses: BTreeMap::new(),
    };
    for ((f, kind), w) in jobs.into_iter().zip(found) {
        if let Some(w) = w {
            match kind {
                TriangulationKind::Delaunay => report.bmd_facet_ids.insert(f),
                TriangulationKind::UpperDelaunay => report.bmud_facet_ids.insert(f),
            };
            report.witnesses.insert(f, w);
        }
    }
    if report.bmd_facet_ids.is_empty() || report.bmud_facet_ids.is_empty() {
        return Err(GeomError::Internal(
            "a lifted hull always has a facet on each envelope".into(),
        ));
    }
    Ok(report)
}

fn envelope_extreme<T: Field>(
    fns: &[AffineFn<T>],
    x: &VectorD<T>,
    kind: TriangulationKind,
) -> Result<usize> {
    let values: Vec<T> = fns.iter().map(|f| f.eval(x)).collect();
    let mut best = 0;
    for j in 1..values.len() {
        let better = match kind {
            TriangulationKind::Delaunay => values[j] < values[best],
            TriangulationKind::UpperDelaunay => values[j] > values[best],
        };
        if better {
            best = j;
        }
    }
    if (0..values.len()).any(|j| j != best && values[j] == values[best]) {
        return Err(GeomError::generic(
            vec![best],
            "two facet hyperplanes meet over the query point",
        ));
    }
    Ok(best)
}

/// Facet whose function is smallest at `x`.
pub fn lower_envelope_argmin<T: Field>(h: &HullComplex<T>, x: &VectorD<T>) -> Result<usize> {
    envelope_extreme(&facet_functions(h)?, x, TriangulationKind::Delaunay)
}

/// Facet whose function is largest at `x`.
pub fn upper_envelope_argmax<T: Field>(h: &HullComplex<T>, x: &VectorD<T>) -> Result<usize> {
    envelope_extreme(&facet_functions(h)?, x, TriangulationKind::UpperDelaunay)
}

/// A shelling of one facet group, read off a line through the lifted hull.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellingOrder<T> {
    pub kind: TriangulationKind,
    /// Lifted facet ids in shelling order.
    pub facet_order: Vec<usize>,
    /// The corresponding simplices (vertex ids), in the same order.
    pub simplices: Vec<Vec<usize>>,
    pub line_base: VectorD<T>,
    pub line_direction: VectorD<T>,
}

/// Crossing parameter of `base + t * dir` with a hyperplane, as an
/// unreduced fraction with positive denominator. `base` is homogeneous.
fn crossing<R: Ring>(plane: &[R], base: &[R], dir: &[R]) -> Option<(R, R)> {
    let d = dir.len();
    let mut den = R::zero();
    let mut num = plane[d].clone() * &base[d];
    for i in 0..d {
        den += plane[i].clone() * &dir[i];
        num -= plane[i].clone() * &base[i];
    }
    if den.is_zero() {
        return None;
    }
    if den.is_negative() {
        den = -den;
        num = -num;
    }
    Some((num, den))
}

fn cross_cmp<R: Ring>(a: &(R, R), b: &(R, R)) -> std::cmp::Ordering {
    (a.0.clone() * &b.1)
        .partial_cmp(&(b.0.clone() * &a.1))
        .expect("exact comparison")
}

/// Orders the target's group by the ray from the centroid through `w`.
/// `Ok(None)` means two crossings tied.
fn order_along_ray<T: Field>(
    planes: &[Vec<T::Ring>],
    groups: &FacetGroups,
    kind: TriangulationKind,
    target: usize,
    base: &VectorD<T>,
    w: &VectorD<T>,
) -> Result<Option<Vec<usize>>> {
    // Only the order of crossings matters, so the direction may be rescaled.
    let hbase = homogenize(base);
    let dir = T::clear_denominators(w.sub(base).coords());
    let end = crossing(&planes[target], &hbase, &dir)
        .filter(|t| t.0.is_positive())
        .ok_or_else(|| GeomError::Internal("witness is not beyond the centroid".into()))?;
    let within = |t: &(T::Ring, T::Ring)| t.0.is_positive() && cross_cmp(t, &end).is_le();
    let mut crossings = Vec::new();
    for &f in groups.group(kind) {
        let t = crossing(&planes[f], &hbase, &dir)
            .filter(within)
            .ok_or_else(|| GeomError::Internal(format!("ray misses facet {f} of its own group")))?;
        if f != target && cross_cmp(&t, &end).is_eq() {
            return Err(GeomError::Internal(
                "witness is not extreme for its facet".into(),
            ));
        }
        crossings.push((t, f));
    }
    for &f in groups.group(other(kind)) {
        if crossing(&planes[f], &hbase, &dir).is_some_and(|t| within(&t)) {
            return Err(GeomError::Internal(format!(
                "ray crosses facet {f} of the opposite group"
            )));
        }
    }
    crossings.sort_by(|a, b| cross_cmp(&a.0, &b.0));
    if crossings
        .windows(2)
        .any(|w| cross_cmp(&w[0].0, &w[1].0).is_eq())
    {
        return Ok(None);
    }
    Ok(Some(crossings.into_iter().map(|(_, f)| f).collect()))
}

fn other(kind: TriangulationKind) -> TriangulationKind {
    match kind {
        TriangulationKind::Delaunay => TriangulationKind::UpperDelaunay,
        TriangulationKind::UpperDelaunay => TriangulationKind::Delaunay,
    }
}

/// Bruggesser-Mani shelling of the target's group that ends at `target`.
pub fn line_shelling<T: Field>(
    h: &HullComplex<T>,
    groups: &FacetGroups,
    target: usize,
) -> Result<ShellingOrder<T>> {
    line_shelling_from(h, groups, target, None)
}

/// [`line_shelling`] starting from a known lifted envelope witness.
pub(crate) fn line_shelling_from<T: Field>(
    h: &HullComplex<T>,
    groups: &FacetGroups,
    target: usize,
    witness: Option<&VectorD<T>>,
) -> Result<ShellingOrder<T>> {
    let kind = groups.kind_of(target).ok_or_else(|| {
        GeomError::InvalidInput(format!("facet {target} is not in the lifted hull"))
    })?;
    let planes = ring_planes(h)?;
    let gaps = Gaps::new::<T>(&planes, target, kind);
    let not_an_ear = || GeomError::NotABMEar {
        facet: h.facets[target].vertex_ids.clone(),
    };
    let mut x = match witness {
        Some(w) => w.truncated(),
        None => {
            dehomogenize(&envelope_point_with(&gaps, &h.neighbors(target)).ok_or_else(not_an_ear)?)
        }
    };
    if !gaps.violated_at(&homogenize(&x)).is_empty() {
        return Err(not_an_ear());
    }
    let base = centroid(&h.points);
    let base_x = base.truncated();
    let d = x.dim();

    for attempt in 0..=MAX_TIE_RETRIES {
        let w = lift_onto(h, target, x.clone());
        if let Some(order) = order_along_ray(&planes, groups, kind, target, &base, &w)? {
            let simplices = order
                .iter()
                .map(|&f| h.facets[f].vertex_ids.clone())
                .collect();
            return Ok(ShellingOrder {
                kind,
                facet_order: order,
                simplices,
                line_direction: w.sub(&base),
                line_base: base,
            });
        }
        // Slide the witness along the envelope facet, toward the centroid
        // and off-axis, with a step that halves until it stays strict.
        let mut toward = base_x.sub(&x);
        let axis = attempt % d;
        toward = toward.add(&VectorD::new(
            (0..d)
                .map(|i| if i == axis { T::one() } else { T::zero() })
                .collect(),
        ));
        let mut eps = T::one() / T::from_i64(2);
        loop {
            let candidate = x.add(&toward.scale(&eps));
            if gaps.violated_at(&homogenize(&candidate)).is_empty() {
                x = candidate;
                break;
            }
            eps /= T::from_i64(2);
            if eps.is_zero() {
                return Err(GeomError::Internal("perturbation underflow".into()));
            }
        }
    }
    Err(GeomError::generic(
        h.facets[target].vertex_ids.clone(),
        "shelling ray ties persisted after perturbation",
    ))
}

/// First position at which an order stops being a shelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellingDefect {
    /// Zero-based index into the order.
    pub position: usize,
    pub reason: String,
}

impl fmt::Display for ShellingDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "position {}: {}", self.position, self.reason)
    }
}

impl std::error::Error for ShellingDefect {}

/// Checks that each simplex meets the union of its predecessors in a
/// nonempty union of its facets, proper except possibly for the last one.
pub fn validate_shelling<T, S>(
    order: &ShellingOrder<S>,
    t: &Triangulation<T>,
) -> std::result::Result<(), ShellingDefect> {
    let mut seen: Vec<&Vec<usize>> = order.simplices.iter().collect();
    seen.sort();
    let mut expected: Vec<&Vec<usize>> = t.simplices.iter().collect();
    expected.sort();
    if seen != expected || order.facet_order.len() != order.simplices.len() {
        return Err(ShellingDefect {
            position: 0,
            reason: "order is not a permutation of the triangulation's simplices".into(),
        });
    }
    let m = order.simplices.len();
    let mut earlier_faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (s, simplex) in order.simplices.iter().enumerate() {
        if s > 0 {
            let shared: Vec<Vec<usize>> = ridges_of(simplex)
                .filter(|f| earlier_faces.contains(f))
                .collect();
            if shared.is_empty() {
                return Err(ShellingDefect {
                    position: s,
                    reason: "shares no facet with earlier simplices".into(),
                });
            }
            if shared.len() == simplex.len() && s + 1 < m {
                return Err(ShellingDefect {
                    position: s,
                    reason: "boundary already fully covered before the last step".into(),
                });
            }
            for prev in &order.simplices[..s] {
                let common: Vec<usize> = simplex
                    .iter()
                    .filter(|v| prev.contains(v))
                    .copied()
                    .collect();
                if common.is_empty() {
                    continue;
                }
                let covered = shared.iter().any(|f| common.iter().all(|v| f.contains(v)));
                if !covered {
                    return Err(ShellingDefect {
                        position: s,
                        reason: format!(
                            "meets an earlier simplex in {common:?}, outside every shared facet"
                        ),
                    });
                }
            }
        }
        earlier_faces.extend(ridges_of(simplex));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::lifted_delaunay;
    use crate::ears::detect_ears;
    use crate::exactnum::Sign;
    use crate::Scalar;

    fn pts(raw: &[&[i64]]) -> Vec<VectorD<Scalar>> {
        raw.iter().map(|c| VectorD::from_i64s(c)).collect()
    }

    fn decagon() -> Vec<VectorD<Scalar>> {
        pts(&[
            &[100, 3],
            &[80, 59],
            &[31, 95],
            &[-30, 96],
            &[-82, 57],
            &[-99, -2],
            &[-81, -60],
            &[-29, -94],
            &[32, -97],
            &[79, -58],
        ])
    }

    #[test]
    fn quadrilateral_either_lower_facet_can_be_last() {
        let l = lifted_delaunay(&pts(&[&[0, 0], &[3, 0], &[3, 3], &[0, 4]]), 2).unwrap();
        let report = bm_ear_set(&l.lifted, &l.groups).unwrap();
        assert_eq!(report.bmd_facet_ids.len(), 2);
        assert_eq!(report.bmud_facet_ids.len(), 2);
        for &target in &l.groups.lower {
            let order = line_shelling(&l.lifted, &l.groups, target).unwrap();
            assert_eq!(order.facet_order.len(), 2);
            assert_eq!(*order.facet_order.last().unwrap(), target);
            validate_shelling(&order, &l.dt).unwrap();
        }
    }

    #[test]
    fn witnesses_are_strict() {
        let l = lifted_delaunay(&decagon(), 2).unwrap();
        let report = bm_ear_set(&l.lifted, &l.groups).unwrap();
        for (&f, w) in &report.witnesses {
            let facet = &l.lifted.facets[f];
            assert_eq!(facet.side(w), Sign::Zero);
            // A lower witness is beneath every lower hyperplane's interior
            // side, i.e. beyond it, and inside every upper one; mirrored for
            // upper witnesses.
            let lower_witness = report.bmd_facet_ids.contains(&f);
            for (j, g) in l.lifted.facets.iter().enumerate() {
                if j == f {
                    continue;
                }
                let g_lower = Sign::of(&g.normal[2]) == Sign::Negative;
                let want = if g_lower == lower_witness {
                    Sign::Positive
                } else {
                    Sign::Negative
                };
                assert_eq!(g.side(w), want, "facet {f} witness vs {j}");
            }
        }
    }

    #[test]
    fn decagon_shellings_end_at_every_bm_ear() {
        let l = lifted_delaunay(&decagon(), 2).unwrap();
        let report = bm_ear_set(&l.lifted, &l.groups).unwrap();
        assert!(report.bmd_facet_ids.len() >= 2 && report.bmud_facet_ids.len() >= 2);
        let d_ears = detect_ears(&l.dt).unwrap();
        for &f in &report.bmd_facet_ids {
            let order = line_shelling(&l.lifted, &l.groups, f).unwrap();
            assert_eq!(*order.facet_order.last().unwrap(), f);
            validate_shelling(&order, &l.dt).unwrap();
            let pos = l.groups.lower.binary_search(&f).unwrap();
            assert!(d_ears.ear_simplex_ids.contains(&pos));
        }
        for &f in &report.bmud_facet_ids {
            let order = line_shelling(&l.lifted, &l.groups, f).unwrap();
            assert_eq!(*order.facet_order.last().unwrap(), f);
            validate_shelling(&order, &l.udt).unwrap();
        }
    }

    #[test]
    fn non_ear_target_is_rejected() {
        let l = lifted_delaunay(&decagon(), 2).unwrap();
        let report = bm_ear_set(&l.lifted, &l.groups).unwrap();
        let outsider = l
            .groups
            .lower
            .iter()
            .find(|f| !report.bmd_facet_ids.contains(f))
            .copied()
            .expect("a decagon has interior Delaunay triangles");
        assert!(matches!(
            line_shelling(&l.lifted, &l.groups, outsider),
            Err(GeomError::NotABMEar { .. })
        ));
    }

    #[test]
    fn envelope_argmin_at_interior_points_is_lower() {
        let l = lifted_delaunay(&decagon(), 2).unwrap();
        for x in [[0, 0], [50, 10], [-20, -70], [5, 80]] {
            let f = lower_envelope_argmin(&l.lifted, &VectorD::from_i64s(&x)).unwrap();
            assert_eq!(l.groups.kind_of(f), Some(TriangulationKind::Delaunay));
            let f = upper_envelope_argmax(&l.lifted, &VectorD::from_i64s(&x)).unwrap();
            assert_eq!(l.groups.kind_of(f), Some(TriangulationKind::UpperDelaunay));
        }
    }

    fn order_of(simplices: &[&[usize]]) -> ShellingOrder<Scalar> {
        ShellingOrder {
            kind: TriangulationKind::Delaunay,
            facet_order: (0..simplices.len()).collect(),
            simplices: simplices.iter().map(|s| s.to_vec()).collect(),
            line_base: VectorD::zeros(3),
            line_direction: VectorD::zeros(3),
        }
    }

    fn path_triangulation() -> Triangulation<Scalar> {
        Triangulation {
            kind: TriangulationKind::Delaunay,
            dim: 2,
            points: pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1], &[2, 1]]),
            simplices: vec![vec![0, 1, 2], vec![1, 2, 3], vec![1, 3, 4]],
        }
    }

    #[test]
    fn validator_examples() {
        let t = path_triangulation();
        validate_shelling(&order_of(&[&[0, 1, 2], &[1, 2, 3], &[1, 3, 4]]), &t).unwrap();
        let bad =
            validate_shelling(&order_of(&[&[0, 1, 2], &[1, 3, 4], &[1, 2, 3]]), &t).unwrap_err();
        assert_eq!(bad.position, 1);
        let single = Triangulation {
            simplices: vec![vec![0, 1, 2]],
            ..t.clone()
        };
        validate_shelling(&order_of(&[&[0, 1, 2]]), &single).unwrap();
        let missing = validate_shelling(&order_of(&[&[0, 1, 2]]), &t).unwrap_err();
        assert_eq!(missing.position, 0);
    }
}
