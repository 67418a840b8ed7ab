//! Exact convex hulls in arbitrary dimension.
//!
//! Randomized incremental beneath-beyond construction with conflict lists.
//! Only simplicial hulls of points in convex position are produced: an
//! interior point or a point lying exactly on a facet hyperplane is an error,
//! never something to be perturbed away.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::exactnum::{affine_rank, centroid, simplex_volume, Field, Sign, VectorD};

/// Seed used by [`convex_hull`] for the insertion order.
pub const DEFAULT_HULL_SEED: u64 = 0x005e_ed0f_4a11;

/// A simplicial facet `normal · x = offset` with `normal` pointing outward.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet<T> {
    /// Sorted point indices; exactly `ambient_dim` of them.
    pub vertex_ids: Vec<usize>,
    pub normal: VectorD<T>,
    pub offset: T,
}

impl<T: Field> Facet<T> {
    /// `normal · p - offset`: positive beyond the facet, negative beneath it.
    pub fn height(&self, p: &VectorD<T>) -> T {
        self.normal.dot(p) - &self.offset
    }

    pub fn side(&self, p: &VectorD<T>) -> Sign {
        T::affine_sign(self.normal.coords(), p.coords(), &self.offset)
    }

    /// The `ambient_dim` ridges of this facet, each a sorted id list.
    pub fn ridges(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        ridges_of(&self.vertex_ids)
    }
}

/// Boundary complex of a full-dimensional simplicial polytope.
#[derive(Debug, Clone)]
pub struct HullComplex<T> {
    pub ambient_dim: usize,
    pub points: Vec<VectorD<T>>,
    /// Sorted by `vertex_ids`, so facet ids do not depend on insertion order.
    pub facets: Vec<Facet<T>>,
    /// Each ridge maps to the two facets sharing it (smaller id first).
    pub ridge_adjacency: BTreeMap<Vec<usize>, (usize, usize)>,
}

impl<T: Field> HullComplex<T> {
    pub fn facet_points(&self, facet: usize) -> Vec<VectorD<T>> {
        self.facets[facet]
            .vertex_ids
            .iter()
            .map(|&i| self.points[i].clone())
            .collect()
    }

    /// Exact volume of the hull, summed over cones from the centroid.
    pub fn volume(&self) -> T {
        let c = centroid(&self.points);
        let mut total = T::zero();
        for f in 0..self.facets.len() {
            let mut simplex = self.facet_points(f);
            simplex.push(c.clone());
            total += simplex_volume(&simplex);
        }
        total
    }

    /// Facet ids adjacent to `facet` across each of its ridges.
    pub fn neighbors(&self, facet: usize) -> Vec<usize> {
        self.facets[facet]
            .ridges()
            .filter_map(|r| self.ridge_adjacency.get(&r))
            .map(|&(a, b)| if a == facet { b } else { a })
            .collect()
    }

    /// Vertex ids that appear in at least one facet.
    pub fn vertex_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .facets
            .iter()
            .flat_map(|f| f.vertex_ids.iter().copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

pub(crate) fn ridges_of(vertices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..vertices.len()).map(move |skip| {
        vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// Hyperplane through `dim` points of `R^dim`, unoriented. `None` when the
/// points are affinely dependent.
pub(crate) fn hyperplane_through<T: Field>(points: &[VectorD<T>]) -> Option<(VectorD<T>, T)> {
    let dim = points[0].dim();
    debug_assert_eq!(points.len(), dim);
    let edges: Vec<VectorD<T>> = points[1..].iter().map(|p| p.sub(&points[0])).collect();
    let normal: Vec<T> = (0..dim)
        .map(|col| {
            let minor: Vec<Vec<T>> = edges
                .iter()
                .map(|e| {
                    e.coords()
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != col)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let det = T::determinant(minor);
            if col % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect();
    if normal.iter().all(|x| x.is_zero()) {
        return None;
    }
    let offset = VectorD::new(normal.clone()).dot(&points[0]);
    let mut coeffs = normal;
    coeffs.push(offset);
    T::primitive_scale(&mut coeffs);
    let offset = coeffs.pop().expect("offset");
    Some((VectorD::new(coeffs), offset))
}

/// Convex hull with the default insertion seed.
pub fn convex_hull<T: Field>(points: &[VectorD<T>], ambient_dim: usize) -> Result<HullComplex<T>> {
    convex_hull_seeded(points, ambient_dim, DEFAULT_HULL_SEED)
}

struct WorkFacet<T> {
    facet: Facet<T>,
    alive: bool,
    outside: Vec<usize>,
}

struct Builder<'a, T> {
    points: &'a [VectorD<T>],
    interior: VectorD<T>,
    facets: Vec<WorkFacet<T>>,
    ridges: HashMap<Vec<usize>, Vec<usize>>,
    conflicts: Vec<Vec<usize>>,
    inserted: Vec<bool>,
}

impl<T: Field> Builder<'_, T> {
    fn oriented(&self, vertex_ids: Vec<usize>) -> Result<Facet<T>> {
        let pts: Vec<VectorD<T>> = vertex_ids.iter().map(|&i| self.points[i].clone()).collect();
        let (mut normal, mut offset) = hyperplane_through(&pts).ok_or_else(|| {
            GeomError::generic(vertex_ids.clone(), "facet vertices are affinely dependent")
        })?;
        match T::affine_sign(normal.coords(), self.interior.coords(), &offset) {
            Sign::Negative => {}
            Sign::Positive => {
                normal = normal.scale(&-T::one());
                offset = -offset;
            }
            Sign::Zero => {
                return Err(GeomError::Internal(format!(
                    "interior reference point lies on facet {vertex_ids:?}"
                )))
            }
        }
        Ok(Facet {
            vertex_ids,
            normal,
            offset,
        })
    }

    fn push(&mut self, facet: Facet<T>, outside: Vec<usize>) -> usize {
        let id = self.facets.len();
        for &q in &outside {
            self.conflicts[q].push(id);
        }
        for r in facet.ridges() {
            self.ridges.entry(r).or_default().push(id);
        }
        self.facets.push(WorkFacet {
            facet,
            alive: true,
            outside,
        });
        id
    }

    fn inside_error(&self, p: usize) -> GeomError {
        for w in self.facets.iter().filter(|w| w.alive) {
            if w.facet.side(&self.points[p]) == Sign::Zero {
                let mut ids = w.facet.vertex_ids.clone();
                ids.push(p);
                return GeomError::generic(ids, "point lies on a facet hyperplane");
            }
        }
        GeomError::NotInConvexPosition { point: p }
    }

    fn insert(&mut self, p: usize) -> Result<()> {
        self.inserted[p] = true;
        let visible: Vec<usize> = self.conflicts[p]
            .iter()
            .copied()
            .filter(|&f| self.facets[f].alive)
            .collect();
        if visible.is_empty() {
            return Err(self.inside_error(p));
        }
        let visible_set: HashSet<usize> = visible.iter().copied().collect();

        let mut horizon = Vec::new();
        for &f in &visible {
            for r in self.facets[f].facet.ridges() {
                let owners = &self.ridges[&r];
                let other = owners
                    .iter()
                    .copied()
                    .find(|&g| g != f)
                    .ok_or_else(|| GeomError::Internal(format!("ridge {r:?} has one facet")))?;
                if !visible_set.contains(&other) {
                    horizon.push((r, f, other));
                }
            }
        }

        for &f in &visible {
            self.facets[f].alive = false;
            let ridges: Vec<Vec<usize>> = self.facets[f].facet.ridges().collect();
            for r in ridges {
                if let Some(owners) = self.ridges.get_mut(&r) {
                    owners.retain(|&g| g != f);
                    if owners.is_empty() {
                        self.ridges.remove(&r);
                    }
                }
            }
        }

        let mut stamp: Vec<usize> = Vec::new();
        for (r, f, g) in horizon {
            let mut ids = r.clone();
            ids.push(p);
            ids.sort_unstable();
            let facet = self.oriented(ids)?;

            let opposite = self.facets[g]
                .facet
                .vertex_ids
                .iter()
                .copied()
                .find(|v| !r.contains(v))
                .expect("a facet has one vertex off each of its ridges");
            if facet.side(&self.points[opposite]) != Sign::Negative {
                let mut ids = facet.vertex_ids.clone();
                ids.push(opposite);
                return Err(GeomError::generic(ids, "adjacent facets are coplanar"));
            }

            stamp.clear();
            let mut outside = Vec::new();
            for &q in self.facets[f].outside.iter().chain(&self.facets[g].outside) {
                if self.inserted[q] || stamp.contains(&q) {
                    continue;
                }
                stamp.push(q);
                if facet.side(&self.points[q]) == Sign::Positive {
                    outside.push(q);
                }
            }
            self.push(facet, outside);
        }
        Ok(())
    }
}

/// Convex hull of points in convex position in `R^ambient_dim`. The seed
/// fixes the randomized insertion order; for generic input the facet set
/// does not depend on it.
pub fn convex_hull_seeded<T: Field>(
    points: &[VectorD<T>],
    ambient_dim: usize,
    seed: u64,
) -> Result<HullComplex<T>> {
    if ambient_dim < 2 {
        return Err(GeomError::InvalidInput(
            "hull dimension must be at least 2".into(),
        ));
    }
    for p in points {
        if p.dim() != ambient_dim {
            return Err(GeomError::DimensionMismatch {
                expected: ambient_dim,
                found: p.dim(),
            });
        }
    }
    if points.len() < ambient_dim + 1 {
        return Err(GeomError::InvalidInput(format!(
            "{} points cannot span R^{ambient_dim}",
            points.len()
        )));
    }

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    match build(points, ambient_dim, &order) {
        Err(GeomError::GenericityViolation { ids, reason }) => {
            // A temporary coplanarity can come from an interior point that was
            // inserted early. Inserting each offender last tells the two apart.
            for &last in &ids {
                let mut retry: Vec<usize> =
                    order.iter().copied().filter(|i| !ids.contains(i)).collect();
                retry.extend(ids.iter().copied().filter(|&i| i != last));
                retry.push(last);
                if let Err(e @ GeomError::NotInConvexPosition { .. }) =
                    build(points, ambient_dim, &retry)
                {
                    return Err(e);
                }
            }
            Err(GeomError::GenericityViolation { ids, reason })
        }
        other => other,
    }
}

fn build<T: Field>(
    points: &[VectorD<T>],
    ambient_dim: usize,
    order: &[usize],
) -> Result<HullComplex<T>> {
    let mut simplex: Vec<usize> = Vec::with_capacity(ambient_dim + 1);
    for &i in order {
        simplex.push(i);
        let pts: Vec<VectorD<T>> = simplex.iter().map(|&j| points[j].clone()).collect();
        if affine_rank(&pts) != Some(simplex.len() - 1) {
            simplex.pop();
        }
        if simplex.len() == ambient_dim + 1 {
            break;
        }
    }
    if simplex.len() < ambient_dim + 1 {
        return Err(GeomError::InvalidInput(format!(
            "points do not affinely span R^{ambient_dim}"
        )));
    }

    let simplex_pts: Vec<VectorD<T>> = simplex.iter().map(|&j| points[j].clone()).collect();
    let mut b = Builder {
        points,
        interior: centroid(&simplex_pts),
        facets: Vec::new(),
        ridges: HashMap::new(),
        conflicts: vec![Vec::new(); points.len()],
        inserted: vec![false; points.len()],
    };
    for &i in &simplex {
        b.inserted[i] = true;
    }
    let rest: Vec<usize> = order
        .iter()
        .copied()
        .filter(|i| !simplex.contains(i))
        .collect();
    for skip in 0..simplex.len() {
        let mut ids: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .map(|(_, &v)| v)
            .collect();
        ids.sort_unstable();
        let facet = b.oriented(ids)?;
        let outside = rest
            .iter()
            .copied()
            .filter(|&q| facet.side(&points[q]) == Sign::Positive)
            .collect();
        b.push(facet, outside);
    }

    for &p in &rest {
        b.insert(p)?;
    }

    let mut facets: Vec<Facet<T>> = b
        .facets
        .into_iter()
        .filter(|w| w.alive)
        .map(|w| w.facet)
        .collect();
    facets.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));

    let mut is_vertex = vec![false; points.len()];
    for f in &facets {
        for &v in &f.vertex_ids {
            is_vertex[v] = true;
        }
    }
    if let Some(p) = is_vertex.iter().position(|&v| !v) {
        return Err(GeomError::NotInConvexPosition { point: p });
    }

    let hull = HullComplex {
        ambient_dim,
        points: points.to_vec(),
        ridge_adjacency: build_adjacency(&facets)?,
        facets,
    };
    let check = validate_complex(&hull);
    if let Some(issue) = check.issues.first() {
        return Err(match issue {
            ComplexIssue::PointOnHyperplane { point, facet } => {
                let mut ids = hull.facets[*facet].vertex_ids.clone();
                ids.push(*point);
                GeomError::generic(ids, "point lies on a facet hyperplane")
            }
            other => GeomError::Internal(format!("hull self-check failed: {other:?}")),
        });
    }
    Ok(hull)
}

fn build_adjacency<T: Field>(facets: &[Facet<T>]) -> Result<BTreeMap<Vec<usize>, (usize, usize)>> {
    let mut owners: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (id, f) in facets.iter().enumerate() {
        for r in f.ridges() {
            owners.entry(r).or_default().push(id);
        }
    }
    owners
        .into_iter()
        .map(|(r, ids)| match ids.as_slice() {
            &[a, b] => Ok((r, (a.min(b), a.max(b)))),
            _ => Err(GeomError::Internal(format!(
                "ridge {r:?} lies in {} facets",
                ids.len()
            ))),
        })
        .collect()
}

/// One failed invariant found by [`validate_complex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexIssue {
    WrongVertexCount { facet: usize },
    WrongDimension { point: usize },
    PointAbove { point: usize, facet: usize },
    PointOnHyperplane { point: usize, facet: usize },
    VertexOffHyperplane { point: usize, facet: usize },
    NotOutward { facet: usize },
    RidgeNotShared { ridge: Vec<usize>, count: usize },
    AdjacencyMismatch { ridge: Vec<usize> },
    NotAVertex { point: usize },
}

/// Outcome of [`validate_complex`]; empty `issues` means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComplexValidation {
    pub issues: Vec<ComplexIssue>,
}

impl ComplexValidation {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Re-derives every [`HullComplex`] invariant from scratch.
pub fn validate_complex<T: Field>(h: &HullComplex<T>) -> ComplexValidation {
    let mut issues = Vec::new();
    for (i, p) in h.points.iter().enumerate() {
        if p.dim() != h.ambient_dim {
            issues.push(ComplexIssue::WrongDimension { point: i });
        }
    }
    if !issues.is_empty() {
        return ComplexValidation { issues };
    }

    let c = centroid(&h.points);
    let mut is_vertex = vec![false; h.points.len()];
    let mut owners: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (fid, f) in h.facets.iter().enumerate() {
        if f.vertex_ids.len() != h.ambient_dim || f.vertex_ids.windows(2).any(|w| w[0] >= w[1]) {
            issues.push(ComplexIssue::WrongVertexCount { facet: fid });
            continue;
        }
        if f.side(&c) != Sign::Negative {
            issues.push(ComplexIssue::NotOutward { facet: fid });
        }
        for (pid, p) in h.points.iter().enumerate() {
            let on_facet = f.vertex_ids.binary_search(&pid).is_ok();
            match (f.side(p), on_facet) {
                (Sign::Zero, true) | (Sign::Negative, false) => {}
                (_, true) => issues.push(ComplexIssue::VertexOffHyperplane {
                    point: pid,
                    facet: fid,
                }),
                (Sign::Zero, false) => issues.push(ComplexIssue::PointOnHyperplane {
                    point: pid,
                    facet: fid,
                }),
                (Sign::Positive, false) => issues.push(ComplexIssue::PointAbove {
                    point: pid,
                    facet: fid,
                }),
            }
        }
        for &v in &f.vertex_ids {
            is_vertex[v] = true;
        }
        for r in f.ridges() {
            owners.entry(r).or_default().push(fid);
        }
    }
    for (r, ids) in &owners {
        if ids.len() != 2 {
            issues.push(ComplexIssue::RidgeNotShared {
                ridge: r.clone(),
                count: ids.len(),
            });
            continue;
        }
        let expected = (ids[0].min(ids[1]), ids[0].max(ids[1]));
        if h.ridge_adjacency.get(r) != Some(&expected) {
            issues.push(ComplexIssue::AdjacencyMismatch { ridge: r.clone() });
        }
    }
    for r in h.ridge_adjacency.keys() {
        if !owners.contains_key(r) {
            issues.push(ComplexIssue::AdjacencyMismatch { ridge: r.clone() });
        }
    }
    for (pid, v) in is_vertex.iter().enumerate() {
        if !v {
            issues.push(ComplexIssue::NotAVertex { point: pid });
        }
    }
    ComplexValidation { issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    fn pts(raw: &[&[i64]]) -> Vec<VectorD<Scalar>> {
        raw.iter().map(|c| VectorD::from_i64s(c)).collect()
    }

    #[test]
    fn square_has_four_edges() {
        let h = convex_hull(&pts(&[&[0, 0], &[2, 0], &[2, 2], &[0, 2]]), 2).unwrap();
        assert_eq!(h.facets.len(), 4);
        assert_eq!(h.ridge_adjacency.len(), 4);
        assert!(validate_complex(&h).is_valid());
        assert_eq!(h.volume(), Scalar::from_i64(4));
    }

    #[test]
    fn tetrahedron_has_four_triangles() {
        let h = convex_hull(&pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), 3).unwrap();
        assert_eq!(h.facets.len(), 4);
        assert_eq!(h.ridge_adjacency.len(), 6);
        assert_eq!(h.volume(), Scalar::new(1.into(), 6.into()));
    }

    #[test]
    fn interior_point_rejected() {
        let err = convex_hull(&pts(&[&[0, 0], &[2, 0], &[2, 2], &[0, 2], &[1, 1]]), 2).unwrap_err();
        assert_eq!(err, GeomError::NotInConvexPosition { point: 4 });
    }

    #[test]
    fn point_on_edge_is_genericity_violation() {
        let err = convex_hull(&pts(&[&[0, 0], &[2, 0], &[2, 2], &[0, 2], &[1, 0]]), 2).unwrap_err();
        assert!(
            matches!(err, GeomError::GenericityViolation { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn affinely_degenerate_input_rejected() {
        let err = convex_hull(
            &pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[2, 3, 0]]),
            3,
        )
        .unwrap_err();
        assert!(matches!(err, GeomError::InvalidInput(_)));
        assert!(convex_hull(&pts(&[&[0, 0], &[1, 0]]), 2).is_err());
        assert!(matches!(
            convex_hull(&pts(&[&[0, 0], &[1, 0, 0], &[0, 1]]), 2),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn octahedron_like_polytope() {
        // Slightly skewed octahedron so no four vertices are coplanar.
        let p = pts(&[
            &[10, 1, 0],
            &[-10, 0, 2],
            &[0, 10, 1],
            &[1, -10, 0],
            &[0, 2, 10],
            &[2, 0, -10],
        ]);
        let h = convex_hull(&p, 3).unwrap();
        assert_eq!(h.facets.len(), 8);
        assert!(validate_complex(&h).is_valid());
        for f in 0..h.facets.len() {
            assert_eq!(h.neighbors(f).len(), 3);
        }
    }

    #[test]
    fn flipped_normal_is_detected() {
        let mut h = convex_hull(&pts(&[&[0, 0], &[3, 0], &[3, 3], &[0, 4]]), 2).unwrap();
        let f = &mut h.facets[0];
        f.normal = f.normal.scale(&-Scalar::from_i64(1));
        f.offset = -f.offset.clone();
        let v = validate_complex(&h);
        assert!(!v.is_valid());
        assert!(v.issues.contains(&ComplexIssue::NotOutward { facet: 0 }));
    }

    #[test]
    fn deleted_ridge_is_detected() {
        let mut h = convex_hull(&pts(&[&[0, 0], &[3, 0], &[3, 3], &[0, 4]]), 2).unwrap();
        let key = h.ridge_adjacency.keys().next().unwrap().clone();
        h.ridge_adjacency.remove(&key);
        let v = validate_complex(&h);
        assert_eq!(
            v.issues,
            vec![ComplexIssue::AdjacencyMismatch { ridge: key }]
        );
    }
}
