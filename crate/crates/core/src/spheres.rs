//! Circumspheres, the strict empty / full classification, and the census of
//! neighboring spheres over the ridges of the polytope boundary.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::delaunay::Triangulation;
use crate::ears::boundary_facets;
use crate::error::{GeomError, Result};
use crate::exactnum::{solve_linear, Field, Sign, VectorD};
use crate::hull::ridges_of;

#[derive(Debug, Clone, PartialEq)]
pub struct Sphere<T> {
    pub center: VectorD<T>,
    pub radius_sq: T,
}

impl<T: Field> Sphere<T> {
    /// Positive inside, Negative outside, Zero on the sphere.
    pub fn side(&self, p: &VectorD<T>) -> Sign {
        (self.radius_sq.clone() - p.sub(&self.center).norm_sq()).sign()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SphereClass {
    /// No other point inside.
    Empty,
    /// Every other point inside.
    Full,
    Neither,
}

impl SphereClass {
    pub fn is_extremal(self) -> bool {
        self != SphereClass::Neither
    }
}

/// The sphere through `d + 1` affinely independent points of `R^d`.
pub fn circumsphere<T: Field>(vertices: &[VectorD<T>]) -> Result<Sphere<T>> {
    let Some(first) = vertices.first() else {
        return Err(GeomError::InvalidInput("circumsphere of no points".into()));
    };
    let d = first.dim();
    if vertices.len() != d + 1 {
        return Err(GeomError::InvalidInput(format!(
            "a circumsphere in R^{d} needs {} points, got {}",
            d + 1,
            vertices.len()
        )));
    }
    if let Some(p) = vertices.iter().find(|p| p.dim() != d) {
        return Err(GeomError::DimensionMismatch {
            expected: d,
            found: p.dim(),
        });
    }
    // 2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2
    let two = T::from_i64(2);
    let base_sq = first.norm_sq();
    let rows = vertices[1..]
        .iter()
        .map(|p| p.sub(first).scale(&two).into_coords())
        .collect();
    let rhs = vertices[1..]
        .iter()
        .map(|p| p.norm_sq() - &base_sq)
        .collect();
    let center = VectorD::new(solve_linear(rows, rhs).ok_or(GeomError::DegenerateSimplex)?);
    let radius_sq = first.sub(&center).norm_sq();
    Ok(Sphere { center, radius_sq })
}

/// Classifies `sphere` against every point not in `defining_ids`. A point
/// exactly on the sphere is a genericity violation, never a tie to break.
pub fn classify_sphere<T: Field>(
    sphere: &Sphere<T>,
    defining_ids: &[usize],
    points: &[VectorD<T>],
) -> Result<SphereClass> {
    let mut inside = 0usize;
    let mut outside = 0usize;
    for (i, p) in points.iter().enumerate() {
        if defining_ids.contains(&i) {
            continue;
        }
        match sphere.side(p) {
            Sign::Positive => inside += 1,
            Sign::Negative => outside += 1,
            Sign::Zero => {
                let mut ids = defining_ids.to_vec();
                ids.push(i);
                return Err(GeomError::generic(ids, "point lies on a classified sphere"));
            }
        }
    }
    Ok(match (inside, outside) {
        (0, _) => SphereClass::Empty,
        (_, 0) => SphereClass::Full,
        _ => SphereClass::Neither,
    })
}

/// The neighboring sphere of one boundary ridge.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSphere<T> {
    pub ridge: Vec<usize>,
    /// The two boundary facets sharing the ridge.
    pub facets: (Vec<usize>, Vec<usize>),
    /// Sorted union of the two facets' vertices (`d + 1` ids).
    pub vertex_ids: Vec<usize>,
    pub sphere: Sphere<T>,
    pub class: SphereClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSphereCensus<T> {
    /// One record per boundary ridge, ordered by ridge.
    pub records: Vec<RidgeSphere<T>>,
    pub empty_count: usize,
    pub full_count: usize,
    pub neither_count: usize,
}

impl<T> RidgeSphereCensus<T> {
    pub fn extremal_count(&self) -> usize {
        self.empty_count + self.full_count
    }
}

/// Enumerates the `(d-2)`-faces of the polytope boundary (read off the
/// boundary of `dt`), and classifies the sphere through the vertices of the
/// two boundary facets around each.
pub fn neighboring_sphere_census<T: Field>(
    points: &[VectorD<T>],
    d: usize,
    dt: &Triangulation<T>,
    udt: &Triangulation<T>,
) -> Result<RidgeSphereCensus<T>> {
    let boundary = boundary_facets(dt)?;
    if boundary != boundary_facets(udt)? {
        return Err(GeomError::MalformedTriangulation(
            "DT and UDT disagree on the polytope boundary".into(),
        ));
    }
    let mut around: BTreeMap<Vec<usize>, Vec<&Vec<usize>>> = BTreeMap::new();
    for facet in &boundary {
        if facet.len() != d {
            return Err(GeomError::MalformedTriangulation(format!(
                "boundary facet {facet:?} does not have {d} vertices"
            )));
        }
        for ridge in ridges_of(facet) {
            around.entry(ridge).or_default().push(facet);
        }
    }

    let mut census = RidgeSphereCensus {
        records: Vec::with_capacity(around.len()),
        empty_count: 0,
        full_count: 0,
        neither_count: 0,
    };
    for (ridge, facets) in around {
        let &[a, b] = facets.as_slice() else {
            return Err(GeomError::MalformedTriangulation(format!(
                "boundary ridge {ridge:?} lies in {} facets",
                facets.len()
            )));
        };
        let mut vertex_ids: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
        vertex_ids.sort_unstable();
        vertex_ids.dedup();
        if vertex_ids.len() != d + 1 {
            return Err(GeomError::generic(
                vertex_ids,
                "neighboring facets do not span a simplex",
            ));
        }
        let verts: Vec<VectorD<T>> = vertex_ids.iter().map(|&i| points[i].clone()).collect();
        let sphere = circumsphere(&verts).map_err(|_| {
            GeomError::generic(vertex_ids.clone(), "neighboring facets are coplanar")
        })?;
        let class = classify_sphere(&sphere, &vertex_ids, points)?;
        match class {
            SphereClass::Empty => census.empty_count += 1,
            SphereClass::Full => census.full_count += 1,
            SphereClass::Neither => census.neither_count += 1,
        }
        census.records.push(RidgeSphere {
            ridge,
            facets: (a.clone(), b.clone()),
            vertex_ids,
            sphere,
            class,
        });
    }
    Ok(census)
}
