//! D-ears and UD-ears: simplices of a triangulation with at least two of their
//! facets on the boundary of the polytope.

use std::collections::{BTreeMap, BTreeSet};

use crate::delaunay::{Triangulation, TriangulationKind};
use crate::error::{GeomError, Result};
use crate::exactnum::Field;
use crate::hull::ridges_of;

/// Ears of one triangulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EarSet {
    pub kind: TriangulationKind,
    /// Indices into `Triangulation::simplices`.
    pub ear_simplex_ids: BTreeSet<usize>,
    /// Number of boundary facets of each simplex, indexed by simplex id.
    pub boundary_facet_count: Vec<usize>,
}

impl EarSet {
    pub fn len(&self) -> usize {
        self.ear_simplex_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ear_simplex_ids.is_empty()
    }

    /// The ear simplices as vertex tuples.
    pub fn simplices<T>(&self, t: &Triangulation<T>) -> Vec<Vec<usize>> {
        self.ear_simplex_ids
            .iter()
            .map(|&i| t.simplices[i].clone())
            .collect()
    }
}

fn face_incidence<T>(t: &Triangulation<T>) -> BTreeMap<Vec<usize>, usize> {
    let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for s in &t.simplices {
        for face in ridges_of(s) {
            *count.entry(face).or_default() += 1;
        }
    }
    count
}

/// `(d-1)`-faces that belong to exactly one simplex.
pub fn boundary_facets<T>(t: &Triangulation<T>) -> Result<BTreeSet<Vec<usize>>> {
    let mut boundary = BTreeSet::new();
    for (face, n) in face_incidence(t) {
        match n {
            1 => {
                boundary.insert(face);
            }
            2 => {}
            _ => {
                return Err(GeomError::MalformedTriangulation(format!(
                    "face {face:?} is shared by {n} simplices"
                )))
            }
        }
    }
    Ok(boundary)
}

pub fn detect_ears<T: Field>(t: &Triangulation<T>) -> Result<EarSet> {
    let boundary = boundary_facets(t)?;
    let boundary_facet_count: Vec<usize> = t
        .simplices
        .iter()
        .map(|s| ridges_of(s).filter(|f| boundary.contains(f)).count())
        .collect();
    let ear_simplex_ids = boundary_facet_count
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c >= 2)
        .map(|(i, _)| i)
        .collect();
    Ok(EarSet {
        kind: t.kind,
        ear_simplex_ids,
        boundary_facet_count,
    })
}
