//! Paraboloid lifting and the Delaunay / upper Delaunay triangulations of the
//! vertex set of a convex polytope.
//!
//! The lifted points all lie on a strictly convex surface, so each of them is
//! a vertex of the lifted hull. Facets whose outward normal points down
//! project to Delaunay simplices; facets whose normal points up project to
//! upper Delaunay simplices. Simplices keep the original point indices.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::exactnum::{affine_rank, simplex_volume, Field, Sign, VectorD};
use crate::hull::{convex_hull, HullComplex};
use crate::subsets::for_each_subset;

/// Above this many points [`check_generic`] stops enumerating every
/// `(d + 2)`-subset and relies on incidences found while building hulls.
pub const EXHAUSTIVE_GENERICITY_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TriangulationKind {
    Delaunay,
    UpperDelaunay,
}

impl TriangulationKind {
    /// Sign of the last normal coordinate of the lifted facets of this kind.
    pub fn normal_sign(self) -> Sign {
        match self {
            TriangulationKind::Delaunay => Sign::Negative,
            TriangulationKind::UpperDelaunay => Sign::Positive,
        }
    }
}

/// A triangulation of the convex hull of `points` by `dim`-simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation<T> {
    pub kind: TriangulationKind,
    pub dim: usize,
    pub points: Vec<VectorD<T>>,
    /// Sorted `(dim + 1)`-tuples of point indices, in ascending order.
    pub simplices: Vec<Vec<usize>>,
}

impl<T: Field> Triangulation<T> {
    pub fn simplex_points(&self, simplex: usize) -> Vec<VectorD<T>> {
        self.simplices[simplex]
            .iter()
            .map(|&i| self.points[i].clone())
            .collect()
    }

    /// Sum of the exact volumes of all simplices.
    pub fn volume(&self) -> T {
        let mut total = T::zero();
        for s in 0..self.simplices.len() {
            total += simplex_volume(&self.simplex_points(s));
        }
        total
    }

    pub fn position(&self, simplex: &[usize]) -> Option<usize> {
        self.simplices
            .binary_search_by(|s| s.as_slice().cmp(simplex))
            .ok()
    }
}

/// `(x_1, ..., x_d) -> (x_1, ..., x_d, x_1^2 + ... + x_d^2)`.
pub fn lift<T: Field>(p: &VectorD<T>) -> VectorD<T> {
    p.extended(p.norm_sq())
}

/// Lifted hull facets split by the direction of their outward normal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FacetGroups {
    /// Normal points down; these project to the Delaunay triangulation.
    pub lower: Vec<usize>,
    /// Normal points up; these project to the upper Delaunay triangulation.
    pub upper: Vec<usize>,
}

impl FacetGroups {
    pub fn group(&self, kind: TriangulationKind) -> &[usize] {
        match kind {
            TriangulationKind::Delaunay => &self.lower,
            TriangulationKind::UpperDelaunay => &self.upper,
        }
    }

    pub fn kind_of(&self, facet: usize) -> Option<TriangulationKind> {
        if self.lower.binary_search(&facet).is_ok() {
            Some(TriangulationKind::Delaunay)
        } else if self.upper.binary_search(&facet).is_ok() {
            Some(TriangulationKind::UpperDelaunay)
        } else {
            None
        }
    }
}

/// Partitions the facets of a lifted hull by the sign of the last coordinate
/// of their outward normal. A vertical facet means the input was degenerate.
pub fn split_facets<T: Field>(h: &HullComplex<T>) -> Result<FacetGroups> {
    let last = h.ambient_dim - 1;
    let mut groups = FacetGroups::default();
    for (id, f) in h.facets.iter().enumerate() {
        match f.normal[last].sign() {
            Sign::Negative => groups.lower.push(id),
            Sign::Positive => groups.upper.push(id),
            Sign::Zero => {
                return Err(GeomError::generic(
                    f.vertex_ids.clone(),
                    "lifted facet is vertical",
                ))
            }
        }
    }
    Ok(groups)
}

/// Everything the lifting construction produces for one polytope.
#[derive(Debug, Clone)]
pub struct LiftedDelaunay<T> {
    /// Boundary complex of the polytope itself, in `R^d`.
    pub polytope: HullComplex<T>,
    /// Hull of the lifted vertices, in `R^(d+1)`.
    pub lifted: HullComplex<T>,
    pub groups: FacetGroups,
    /// Simplex `i` is the projection of lifted facet `groups.lower[i]`.
    pub dt: Triangulation<T>,
    /// Simplex `i` is the projection of lifted facet `groups.upper[i]`.
    pub udt: Triangulation<T>,
}

fn check_input<T: Field>(points: &[VectorD<T>], d: usize) -> Result<()> {
    if d < 2 {
        return Err(GeomError::InvalidInput(
            "dimension must be at least 2".into(),
        ));
    }
    for p in points {
        if p.dim() != d {
            return Err(GeomError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
    }
    if points.len() < d + 2 {
        return Err(GeomError::generic(
            (0..points.len()).collect(),
            format!(
                "{} points do not form a non-simplex polytope in R^{d}",
                points.len()
            ),
        ));
    }
    Ok(())
}

/// Runs the lifting construction and keeps every intermediate object.
pub fn lifted_delaunay<T: Field>(points: &[VectorD<T>], d: usize) -> Result<LiftedDelaunay<T>> {
    check_input(points, d)?;
    let polytope = convex_hull(points, d)?;
    let lifted_points: Vec<VectorD<T>> = points.iter().map(lift).collect();
    let lifted = convex_hull(&lifted_points, d + 1).map_err(|e| match e {
        // The polytope spans R^d, so a flat lift means every point is on one sphere.
        GeomError::InvalidInput(_) => {
            GeomError::generic((0..points.len()).collect(), "all points are cospherical")
        }
        other => other,
    })?;
    let groups = split_facets(&lifted)?;
    let project = |ids: &[usize], kind| Triangulation {
        kind,
        dim: d,
        points: points.to_vec(),
        simplices: ids
            .iter()
            .map(|&f| lifted.facets[f].vertex_ids.clone())
            .collect(),
    };
    let dt = project(&groups.lower, TriangulationKind::Delaunay);
    let udt = project(&groups.upper, TriangulationKind::UpperDelaunay);
    Ok(LiftedDelaunay {
        polytope,
        lifted,
        groups,
        dt,
        udt,
    })
}

/// `(DT, UDT)` of the vertex set of a generic convex polytope.
pub fn delaunay_triangulations<T: Field>(
    points: &[VectorD<T>],
    d: usize,
) -> Result<(Triangulation<T>, Triangulation<T>)> {
    let l = lifted_delaunay(points, d)?;
    Ok((l.dt, l.udt))
}

/// Findings of [`check_generic`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericityReport {
    pub is_generic: bool,
    /// Offending index tuples: cospherical `(d + 2)`-subsets, or the
    /// incidences reported by hull construction.
    pub violations: Vec<Vec<usize>>,
    pub n: usize,
    pub d: usize,
    pub is_simplex: bool,
    pub full_dimensional: bool,
    pub in_convex_position: bool,
    /// Human-readable reasons, one per failed condition.
    pub notes: Vec<String>,
}

/// True when the lifted images of `points` lie on one hyperplane, i.e. the
/// points are cospherical or lie on a common affine hyperplane.
pub fn lifted_coplanar<T: Field>(points: &[VectorD<T>]) -> bool {
    let lifted: Vec<VectorD<T>> = points.iter().map(lift).collect();
    homogeneous_det_zero(lifted.iter())
}

/// `det [q_i, 1] == 0` for `k + 1` points `q_i` of `R^k`.
fn homogeneous_det_zero<'a, T: Field>(points: impl Iterator<Item = &'a VectorD<T>>) -> bool {
    let rows = points
        .map(|p| {
            let mut row = p.coords().to_vec();
            row.push(T::one());
            row
        })
        .collect();
    T::determinant_sign(rows) == Sign::Zero
}

/// Checks every condition the lifting construction relies on.
pub fn check_generic<T: Field>(points: &[VectorD<T>], d: usize) -> GenericityReport {
    let n = points.len();
    let mut report = GenericityReport {
        is_generic: false,
        violations: Vec::new(),
        n,
        d,
        is_simplex: n == d + 1,
        full_dimensional: false,
        in_convex_position: false,
        notes: Vec::new(),
    };
    if d < 2 {
        report.notes.push("dimension must be at least 2".into());
        return report;
    }
    if let Some(bad) = points.iter().position(|p| p.dim() != d) {
        report
            .notes
            .push(format!("point {bad} does not have {d} coordinates"));
        return report;
    }
    report.full_dimensional = n > d && affine_rank(points) == Some(d);
    if !report.full_dimensional {
        report
            .notes
            .push(format!("points do not affinely span R^{d}"));
    }
    if report.is_simplex {
        report.notes.push("the polytope is a simplex".into());
    } else if n < d + 1 {
        report.notes.push(format!("fewer than {} points", d + 2));
    }

    if report.full_dimensional {
        match convex_hull(points, d) {
            Ok(_) => report.in_convex_position = true,
            Err(GeomError::NotInConvexPosition { point }) => {
                report
                    .notes
                    .push(format!("point {point} is not a vertex of the hull"));
            }
            Err(GeomError::GenericityViolation { ids, reason }) => {
                // Convex position may still hold; the boundary is just not simplicial.
                report.in_convex_position = true;
                report
                    .notes
                    .push(format!("boundary incidence {ids:?}: {reason}"));
                report.violations.push(ids);
            }
            Err(e) => report.notes.push(e.to_string()),
        }
    }

    if n >= d + 2 {
        if n <= EXHAUSTIVE_GENERICITY_LIMIT {
            let lifted: Vec<VectorD<T>> = points.iter().map(lift).collect();
            for_each_subset(n, d + 2, |ids| {
                if homogeneous_det_zero(ids.iter().map(|&i| &lifted[i])) {
                    report.violations.push(ids.to_vec());
                }
            });
        } else if report.full_dimensional {
            let lifted: Vec<VectorD<T>> = points.iter().map(lift).collect();
            if let Err(GeomError::GenericityViolation { ids, .. }) = convex_hull(&lifted, d + 1) {
                report.violations.push(ids);
            }
        }
    }
    report.violations.sort();
    report.violations.dedup();
    if !report.violations.is_empty() {
        report.notes.push(format!(
            "{} cospherical or coplanar subsets",
            report.violations.len()
        ));
    }

    report.is_generic = report.violations.is_empty()
        && !report.is_simplex
        && n >= d + 2
        && report.full_dimensional
        && report.in_convex_position;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::in_sphere;
    use crate::Scalar;

    fn pts(raw: &[&[i64]]) -> Vec<VectorD<Scalar>> {
        raw.iter().map(|c| VectorD::from_i64s(c)).collect()
    }

    #[test]
    fn lift_examples() {
        assert_eq!(
            lift::<Scalar>(&VectorD::from_i64s(&[1, 2])),
            VectorD::from_i64s(&[1, 2, 5])
        );
        assert_eq!(
            lift::<Scalar>(&VectorD::from_i64s(&[0, 0])),
            VectorD::from_i64s(&[0, 0, 0])
        );
        assert_eq!(
            lift::<Scalar>(&VectorD::from_i64s(&[-2, 1, 3])),
            VectorD::from_i64s(&[-2, 1, 3, 14])
        );
    }

    #[test]
    fn split_perturbed_square() {
        let p = pts(&[&[0, 0], &[3, 0], &[3, 3], &[0, 4]]);
        let lifted: Vec<_> = p.iter().map(lift).collect();
        let h = convex_hull(&lifted, 3).unwrap();
        let g = split_facets(&h).unwrap();
        assert_eq!((g.lower.len(), g.upper.len()), (2, 2));
    }

    #[test]
    fn split_triangle_with_point_inside_circumcircle() {
        // (1,1) is inside the circumcircle of the other three.
        let p = pts(&[&[0, 0], &[4, 0], &[0, 4], &[3, 3]]);
        assert_eq!(in_sphere(&p[..3], &p[3]).unwrap(), Sign::Positive);
        let lifted: Vec<_> = p.iter().map(lift).collect();
        let h = convex_hull(&lifted, 3).unwrap();
        let g = split_facets(&h).unwrap();
        assert_eq!(g.lower.len() + g.upper.len(), h.facets.len());
        assert_eq!((g.lower.len(), g.upper.len()), (2, 2));
    }

    #[test]
    fn cocircular_square_is_rejected() {
        let p = pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]);
        assert!(matches!(
            delaunay_triangulations(&p, 2),
            Err(GeomError::GenericityViolation { .. })
        ));
    }

    #[test]
    fn quadrilateral_uses_opposite_diagonals() {
        let p = pts(&[&[0, 0], &[3, 0], &[3, 3], &[0, 4]]);
        let (dt, udt) = delaunay_triangulations(&p, 2).unwrap();
        assert_eq!(dt.simplices.len(), 2);
        assert_eq!(udt.simplices.len(), 2);
        let diagonal = |t: &Triangulation<Scalar>| {
            let a = &t.simplices[0];
            let b = &t.simplices[1];
            let mut shared: Vec<usize> = a.iter().copied().filter(|v| b.contains(v)).collect();
            shared.sort_unstable();
            shared
        };
        let dd = diagonal(&dt);
        let ud = diagonal(&udt);
        assert_eq!(dd.len(), 2);
        assert_eq!(ud.len(), 2);
        assert_ne!(dd, ud);
        // (0,4) is outside the circle through (0,0),(3,0),(3,3), so that
        // triangle is Delaunay and the DT diagonal is 0-2.
        assert_eq!(dd, vec![0, 2]);
    }

    #[test]
    fn genericity_examples() {
        let square = check_generic(&pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]), 2);
        assert!(!square.is_generic);
        assert_eq!(square.violations, vec![vec![0, 1, 2, 3]]);

        let tri = check_generic(&pts(&[&[0, 0], &[1, 0], &[0, 1]]), 2);
        assert!(!tri.is_generic);
        assert!(tri.is_simplex);

        let quad = check_generic(&pts(&[&[0, 0], &[3, 0], &[3, 3], &[0, 4]]), 2);
        assert!(quad.is_generic, "{quad:?}");
        assert!(quad.violations.is_empty());
    }

    #[test]
    fn genericity_flags_interior_point() {
        let r = check_generic(&pts(&[&[0, 0], &[4, 0], &[5, 3], &[0, 5], &[1, 1]]), 2);
        assert!(!r.in_convex_position);
        assert!(!r.is_generic);
    }

    #[test]
    fn simplex_input_is_rejected_by_triangulation() {
        let err = delaunay_triangulations(&pts(&[&[0, 0], &[1, 0], &[0, 1]]), 2).unwrap_err();
        assert!(matches!(err, GeomError::GenericityViolation { .. }));
    }
}
