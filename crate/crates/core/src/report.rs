//! The full analysis pipeline for one polytope, the checks of the counting
//! theorems on its result, and the JSON report.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::delaunay::{lifted_delaunay, LiftedDelaunay, Triangulation, TriangulationKind};
use crate::ears::{detect_ears, EarSet};
use crate::error::Result;
use crate::exactnum::{Field, VectorD};
use crate::polygon2d::{census_from_triangulations, Census2D};
use crate::shelling::{bm_ear_set, line_shelling_from, validate_shelling, BMEarReport};
use crate::spheres::{
    circumsphere, classify_sphere, neighboring_sphere_census, RidgeSphereCensus, SphereClass,
};

/// Everything computed for one generic convex polytope.
#[derive(Debug, Clone)]
pub struct Analysis<T> {
    pub d: usize,
    pub lifted: LiftedDelaunay<T>,
    pub d_ears: EarSet,
    pub ud_ears: EarSet,
    pub bm: BMEarReport<T>,
    pub spheres: RidgeSphereCensus<T>,
    /// Present for polygons only.
    pub census2d: Option<Census2D>,
}

/// Runs lifting, ear detection, BM-ear certification and the neighboring
/// sphere census. Assumes a generic input; degeneracies met on the way are
/// reported as errors.
pub fn analyze<T: Field>(points: &[VectorD<T>], d: usize) -> Result<Analysis<T>> {
    let lifted = lifted_delaunay(points, d)?;
    let d_ears = detect_ears(&lifted.dt)?;
    let ud_ears = detect_ears(&lifted.udt)?;
    let bm = bm_ear_set(&lifted.lifted, &lifted.groups)?;
    let spheres = neighboring_sphere_census(points, d, &lifted.dt, &lifted.udt)?;
    let census2d = if d == 2 {
        Some(census_from_triangulations(&lifted.dt, &lifted.udt)?)
    } else {
        None
    };
    Ok(Analysis {
        d,
        lifted,
        d_ears,
        ud_ears,
        bm,
        spheres,
        census2d,
    })
}

/// Pass flags of the counting theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremFlags {
    /// At least two BM-ears of each kind.
    pub thm5_pass: bool,
    /// At least `d + 1` BM-ears in total.
    pub thm6_pass: bool,
    /// At least two empty and two full neighboring spheres.
    pub thm2_pass: bool,
    /// Polygon census identities; `None` above dimension 2.
    pub census_identities_pass: Option<bool>,
    /// At least `d` empty and `d` full neighboring spheres. An open question,
    /// so a `false` here is an observation, never a defect.
    pub thm3_observed: bool,
}

impl<T: Field> Analysis<T> {
    pub fn n(&self) -> usize {
        self.lifted.dt.points.len()
    }

    pub fn ears(&self, kind: TriangulationKind) -> &EarSet {
        match kind {
            TriangulationKind::Delaunay => &self.d_ears,
            TriangulationKind::UpperDelaunay => &self.ud_ears,
        }
    }

    pub fn triangulation(&self, kind: TriangulationKind) -> &Triangulation<T> {
        match kind {
            TriangulationKind::Delaunay => &self.lifted.dt,
            TriangulationKind::UpperDelaunay => &self.lifted.udt,
        }
    }

    /// Vertex tuples of the BM-ears of one kind, sorted.
    pub fn bm_ear_simplices(&self, kind: TriangulationKind) -> Vec<Vec<usize>> {
        self.bm
            .ids(kind)
            .iter()
            .map(|&f| self.lifted.lifted.facets[f].vertex_ids.clone())
            .collect()
    }

    /// Positions in the triangulation of the BM-ears of one kind.
    fn bm_positions(&self, kind: TriangulationKind) -> BTreeSet<usize> {
        let group = self.lifted.groups.group(kind);
        self.bm
            .ids(kind)
            .iter()
            .filter_map(|f| group.binary_search(f).ok())
            .collect()
    }

    pub fn theorems(&self) -> TheoremFlags {
        let bmd = self.bm.bmd_facet_ids.len();
        let bmud = self.bm.bmud_facet_ids.len();
        let (empty, full) = (self.spheres.empty_count, self.spheres.full_count);
        TheoremFlags {
            thm5_pass: bmd >= 2 && bmud >= 2,
            thm6_pass: bmd + bmud > self.d,
            thm2_pass: empty >= 2 && full >= 2,
            census_identities_pass: self.census2d.map(|c| c.identities_hold()),
            thm3_observed: empty >= self.d && full >= self.d,
        }
    }

    /// Violations of proved statements. Any entry means a bug in this crate.
    pub fn defects(&self) -> Result<Vec<String>> {
        let mut defects = Vec::new();
        let flags = self.theorems();
        if !flags.thm5_pass {
            defects.push(format!(
                "fewer than two BM-ears of some kind: {} lower, {} upper",
                self.bm.bmd_facet_ids.len(),
                self.bm.bmud_facet_ids.len()
            ));
        }
        if !flags.thm6_pass {
            defects.push(format!(
                "only {} BM-ears in dimension {}",
                self.bm.total(),
                self.d
            ));
        }
        if !flags.thm2_pass {
            defects.push(format!(
                "{} empty and {} full neighboring spheres",
                self.spheres.empty_count, self.spheres.full_count
            ));
        }
        if let Some(c) = &self.census2d {
            for f in c.identity_failures() {
                defects.push(format!("census identity: {f}"));
            }
            if c.s_minus != self.d_ears.len() || c.s_plus != self.ud_ears.len() {
                defects.push("neighboring census counts differ from ear counts".into());
            }
        }
        let points = &self.lifted.dt.points;
        for kind in [
            TriangulationKind::Delaunay,
            TriangulationKind::UpperDelaunay,
        ] {
            let ears = self.ears(kind);
            let stray: Vec<usize> = self
                .bm_positions(kind)
                .difference(&ears.ear_simplex_ids)
                .copied()
                .collect();
            if !stray.is_empty() {
                defects.push(format!("{kind:?} BM-ears {stray:?} are not ears"));
            }
            let want = match kind {
                TriangulationKind::Delaunay => SphereClass::Empty,
                TriangulationKind::UpperDelaunay => SphereClass::Full,
            };
            let t = self.triangulation(kind);
            for &i in &ears.ear_simplex_ids {
                let sphere = circumsphere(&t.simplex_points(i))?;
                let class = classify_sphere(&sphere, &t.simplices[i], points)?;
                if class != want {
                    defects.push(format!(
                        "ear {:?} has a {class:?} circumsphere",
                        t.simplices[i]
                    ));
                }
            }
        }
        for r in &self.spheres.records {
            let kind = match r.class {
                SphereClass::Empty => TriangulationKind::Delaunay,
                SphereClass::Full => TriangulationKind::UpperDelaunay,
                SphereClass::Neither => continue,
            };
            let t = self.triangulation(kind);
            let is_ear = t
                .position(&r.vertex_ids)
                .is_some_and(|i| self.ears(kind).ear_simplex_ids.contains(&i));
            if !is_ear {
                defects.push(format!(
                    "{:?} neighboring sphere of ridge {:?} is not an ear",
                    r.class, r.ridge
                ));
            }
        }
        Ok(defects)
    }

    /// Builds a line shelling ending at every BM-ear and reports each one
    /// that fails validation, ends elsewhere, or ends at a non-ear.
    pub fn shelling_defects(&self) -> Vec<String> {
        let mut defects = Vec::new();
        let h = &self.lifted.lifted;
        for kind in [
            TriangulationKind::Delaunay,
            TriangulationKind::UpperDelaunay,
        ] {
            let group = self.lifted.groups.group(kind);
            for &f in self.bm.ids(kind) {
                let order = match line_shelling_from(
                    h,
                    &self.lifted.groups,
                    f,
                    self.bm.witnesses.get(&f),
                ) {
                    Ok(o) => o,
                    Err(e) => {
                        defects.push(format!("no shelling ending at facet {f}: {e}"));
                        continue;
                    }
                };
                if order.facet_order.last() != Some(&f) {
                    defects.push(format!("shelling for facet {f} ends elsewhere"));
                }
                if let Err(e) = validate_shelling(&order, self.triangulation(kind)) {
                    defects.push(format!("shelling for facet {f} is invalid at {e}"));
                }
                let last_is_ear = order
                    .facet_order
                    .last()
                    .and_then(|l| group.binary_search(l).ok())
                    .is_some_and(|i| self.ears(kind).ear_simplex_ids.contains(&i));
                if !last_is_ear {
                    defects.push(format!("shelling for facet {f} does not end at an ear"));
                }
            }
        }
        defects
    }

    pub fn report_json(&self) -> ReportJson {
        ReportJson {
            dim: self.d,
            n: self.n(),
            generic: true,
            counts: Counts {
                dt_simplices: self.lifted.dt.simplices.len(),
                udt_simplices: self.lifted.udt.simplices.len(),
                d_ears: self.d_ears.len(),
                ud_ears: self.ud_ears.len(),
                bmd_ears: self.bm.bmd_facet_ids.len(),
                bmud_ears: self.bm.bmud_facet_ids.len(),
                empty_neighboring_spheres: self.spheres.empty_count,
                full_neighboring_spheres: self.spheres.full_count,
            },
            census2d: self.census2d.map(|c| CensusJson {
                s_minus: c.s_minus,
                t_minus: c.t_minus,
                u_minus: c.u_minus,
                s_plus: c.s_plus,
                t_plus: c.t_plus,
                u_plus: c.u_plus,
            }),
            theorems: self.theorems(),
            ears: EarLists {
                d_ears: self.d_ears.simplices(&self.lifted.dt),
                ud_ears: self.ud_ears.simplices(&self.lifted.udt),
            },
            bm_ears: BmEarLists {
                bmd_ears: self.bm_ear_simplices(TriangulationKind::Delaunay),
                bmud_ears: self.bm_ear_simplices(TriangulationKind::UpperDelaunay),
            },
        }
    }
}

/// Machine-readable summary of one analysis. Field order is the output key
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportJson {
    pub dim: usize,
    pub n: usize,
    pub generic: bool,
    pub counts: Counts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census2d: Option<CensusJson>,
    pub theorems: TheoremFlags,
    pub ears: EarLists,
    pub bm_ears: BmEarLists,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub dt_simplices: usize,
    pub udt_simplices: usize,
    pub d_ears: usize,
    pub ud_ears: usize,
    pub bmd_ears: usize,
    pub bmud_ears: usize,
    pub empty_neighboring_spheres: usize,
    pub full_neighboring_spheres: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusJson {
    pub s_minus: usize,
    pub t_minus: usize,
    pub u_minus: usize,
    pub s_plus: usize,
    pub t_plus: usize,
    pub u_plus: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EarLists {
    pub d_ears: Vec<Vec<usize>>,
    pub ud_ears: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BmEarLists {
    pub bmd_ears: Vec<Vec<usize>>,
    pub bmud_ears: Vec<Vec<usize>>,
}

impl ReportJson {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
