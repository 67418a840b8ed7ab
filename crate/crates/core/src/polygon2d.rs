//! Convex polygons: the census of empty and full circles by how many polygon
//! edges their triangles use, and the cyclic sequence of curvature radii.

use std::collections::BTreeSet;

use crate::delaunay::{delaunay_triangulations, Triangulation};
use crate::ears::boundary_facets;
use crate::error::{GeomError, Result};
use crate::exactnum::{orient, Field, Sign, VectorD};
use crate::hull::convex_hull;
use crate::spheres::circumsphere;

/// Triangle counts of DT (`minus`) and UDT (`plus`) by number of polygon
/// edges: `s` two (neighboring), `u` one (intermediate), `t` none (disjoint).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Census2D {
    pub n: usize,
    pub s_minus: usize,
    pub t_minus: usize,
    pub u_minus: usize,
    pub s_plus: usize,
    pub t_plus: usize,
    pub u_plus: usize,
}

impl Census2D {
    /// Descriptions of every identity that fails; empty when all hold.
    pub fn identity_failures(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let n = self.n as i64;
        for (side, s, t, u) in [
            ("-", self.s_minus, self.t_minus, self.u_minus),
            ("+", self.s_plus, self.t_plus, self.u_plus),
        ] {
            let (s, t, u) = (s as i64, t as i64, u as i64);
            if s - t != 2 {
                failures.push(format!("s{side} - t{side} = {} (expected 2)", s - t));
            }
            if s + t + u != n - 2 {
                failures.push(format!(
                    "s{side} + t{side} + u{side} = {} (expected {})",
                    s + t + u,
                    n - 2
                ));
            }
            if 2 * s + u != n {
                failures.push(format!(
                    "2 s{side} + u{side} = {} (expected {n})",
                    2 * s + u
                ));
            }
        }
        failures
    }

    pub fn identities_hold(&self) -> bool {
        self.identity_failures().is_empty()
    }
}

/// Checks that `polygon` lists the vertices of a strictly convex polygon in
/// boundary order, and returns its orientation.
pub fn check_boundary_order<T: Field>(polygon: &[VectorD<T>]) -> Result<Sign> {
    let n = polygon.len();
    if n < 3 {
        return Err(GeomError::InvalidInput(format!(
            "a polygon needs 3 vertices, got {n}"
        )));
    }
    if let Some(p) = polygon.iter().find(|p| p.dim() != 2) {
        return Err(GeomError::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        });
    }
    let turn = orient(&[polygon[0].clone(), polygon[1].clone(), polygon[2].clone()])?;
    if turn == Sign::Zero {
        return Err(GeomError::generic(
            vec![0, 1, 2],
            "three vertices are collinear",
        ));
    }
    for i in 0..n {
        let (a, b) = (&polygon[i], &polygon[(i + 1) % n]);
        for (j, p) in polygon.iter().enumerate() {
            if j == i || j == (i + 1) % n {
                continue;
            }
            match orient(&[a.clone(), b.clone(), p.clone()])? {
                s if s == turn => {}
                Sign::Zero => {
                    return Err(GeomError::generic(
                        vec![i, (i + 1) % n, j],
                        "three vertices are collinear",
                    ))
                }
                _ => {
                    return Err(GeomError::InvalidInput(format!(
                    "vertices are not in convex boundary order (vertex {j} against edge {i}-{})",
                    (i + 1) % n
                )))
                }
            }
        }
    }
    Ok(turn)
}

/// Vertex ids of a convex polygon in counterclockwise boundary order,
/// starting from vertex 0, whatever order the input lists them in.
pub fn boundary_cycle<T: Field>(points: &[VectorD<T>]) -> Result<Vec<usize>> {
    let hull = convex_hull(points, 2)?;
    let n = points.len();
    let mut next = vec![usize::MAX; n];
    for f in &hull.facets {
        // The outward normal is to the right of a counterclockwise edge.
        let (a, b) = (f.vertex_ids[0], f.vertex_ids[1]);
        let e = points[b].sub(&points[a]);
        let right = e[1].clone() * &f.normal[0] - e[0].clone() * &f.normal[1];
        if right.is_positive() {
            next[a] = b;
        } else {
            next[b] = a;
        }
    }
    let mut order = vec![0];
    while order.len() < n {
        let v = next[*order.last().expect("nonempty")];
        if v == usize::MAX || v == 0 {
            return Err(GeomError::Internal(
                "hull edges do not form one cycle".into(),
            ));
        }
        order.push(v);
    }
    Ok(order)
}

fn classify<T>(t: &Triangulation<T>, edges: &BTreeSet<Vec<usize>>) -> (usize, usize, usize) {
    let (mut s, mut tt, mut u) = (0, 0, 0);
    for tri in &t.simplices {
        let on_boundary = [[tri[0], tri[1]], [tri[0], tri[2]], [tri[1], tri[2]]]
            .iter()
            .filter(|e| edges.contains(&e[..]))
            .count();
        match on_boundary {
            2 => s += 1,
            1 => u += 1,
            _ => tt += 1,
        }
    }
    (s, tt, u)
}

/// Census of a polygon from its two triangulations; the polygon edges are
/// read off the boundary of `dt`, so no vertex order is assumed.
pub fn census_from_triangulations<T>(
    dt: &Triangulation<T>,
    udt: &Triangulation<T>,
) -> Result<Census2D> {
    if dt.dim != 2 {
        return Err(GeomError::DimensionMismatch {
            expected: 2,
            found: dt.dim,
        });
    }
    let edges = boundary_facets(dt)?;
    let (s_minus, t_minus, u_minus) = classify(dt, &edges);
    let (s_plus, t_plus, u_plus) = classify(udt, &edges);
    Ok(Census2D {
        n: dt.points.len(),
        s_minus,
        t_minus,
        u_minus,
        s_plus,
        t_plus,
        u_plus,
    })
}

/// Census of a polygon given in boundary order.
pub fn census2d<T: Field>(polygon: &[VectorD<T>]) -> Result<Census2D> {
    check_boundary_order(polygon)?;
    let (dt, udt) = delaunay_triangulations(polygon, 2)?;
    census_from_triangulations(&dt, &udt)
}

/// Squared circumradii of consecutive vertex triples.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiReport<T> {
    /// `radii_sq[i]` belongs to the triangle `A_{i-1} A_i A_{i+1}`.
    pub radii_sq: Vec<T>,
    /// Every circumcenter lies strictly inside the angle at its middle vertex.
    pub condition_holds: bool,
    /// Entries not larger than either cyclic neighbor.
    pub local_min_count: usize,
    /// Entries not smaller than either cyclic neighbor.
    pub local_max_count: usize,
}

pub fn curvature_radii<T: Field>(polygon: &[VectorD<T>]) -> Result<RadiiReport<T>> {
    check_boundary_order(polygon)?;
    let n = polygon.len();
    let mut radii_sq = Vec::with_capacity(n);
    let mut condition_holds = true;
    for i in 0..n {
        let prev = &polygon[(i + n - 1) % n];
        let cur = &polygon[i];
        let next = &polygon[(i + 1) % n];
        let sphere = circumsphere(&[prev.clone(), cur.clone(), next.clone()])?;
        let c = &sphere.center;
        // Same side of each arm as the opposite arm's endpoint.
        let by_next = orient(&[cur.clone(), next.clone(), c.clone()])?;
        let by_prev = orient(&[cur.clone(), prev.clone(), c.clone()])?;
        let inside = by_next == orient(&[cur.clone(), next.clone(), prev.clone()])?
            && by_prev == orient(&[cur.clone(), prev.clone(), next.clone()])?;
        condition_holds &= inside;
        radii_sq.push(sphere.radius_sq);
    }
    let mut local_min_count = 0;
    let mut local_max_count = 0;
    for i in 0..n {
        let (l, r) = (&radii_sq[(i + n - 1) % n], &radii_sq[(i + 1) % n]);
        if radii_sq[i] <= *l && radii_sq[i] <= *r {
            local_min_count += 1;
        }
        if radii_sq[i] >= *l && radii_sq[i] >= *r {
            local_max_count += 1;
        }
    }
    Ok(RadiiReport {
        radii_sq,
        condition_holds,
        local_min_count,
        local_max_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::in_sphere;
    use crate::subsets::for_each_subset;
    use crate::Scalar;

    fn pts(raw: &[&[i64]]) -> Vec<VectorD<Scalar>> {
        raw.iter().map(|c| VectorD::from_i64s(c)).collect()
    }

    fn is_polygon_edge(n: usize, a: usize, b: usize) -> bool {
        let (lo, hi) = (a.min(b), a.max(b));
        hi - lo == 1 || (lo == 0 && hi == n - 1)
    }

    fn hexagon() -> Vec<VectorD<Scalar>> {
        pts(&[&[10, 0], &[5, 9], &[-5, 8], &[-11, 1], &[-4, -9], &[6, -8]])
    }

    #[test]
    fn quadrilateral_census() {
        let c = census2d(&pts(&[&[0, 0], &[3, 0], &[3, 3], &[0, 4]])).unwrap();
        assert_eq!((c.s_minus, c.t_minus, c.u_minus), (2, 0, 0));
        assert_eq!((c.s_plus, c.t_plus, c.u_plus), (2, 0, 0));
        assert!(c.identities_hold());
    }

    #[test]
    fn hexagon_matches_brute_force() {
        let p = hexagon();
        let n = p.len();
        // Empty circles of triples counted by kind; full likewise.
        let mut empty = [0usize; 3];
        let mut full = [0usize; 3];
        for_each_subset(n, 3, |t| {
            let tri: Vec<_> = t.iter().map(|&i| p[i].clone()).collect();
            let sides: Vec<Sign> = (0..n)
                .filter(|i| !t.contains(i))
                .map(|i| in_sphere(&tri, &p[i]).unwrap())
                .collect();
            let edges = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
                .iter()
                .filter(|&&(a, b)| is_polygon_edge(n, a, b))
                .count();
            let kind = match edges {
                2 => 0,
                0 => 1,
                _ => 2,
            };
            if sides.iter().all(|&s| s == Sign::Negative) {
                empty[kind] += 1;
            }
            if sides.iter().all(|&s| s == Sign::Positive) {
                full[kind] += 1;
            }
        });
        let c = census2d(&p).unwrap();
        assert_eq!([c.s_minus, c.t_minus, c.u_minus], empty);
        assert_eq!([c.s_plus, c.t_plus, c.u_plus], full);
        assert!(c.identities_hold(), "{:?}", c.identity_failures());
    }

    #[test]
    fn failed_identity_is_described() {
        let c = Census2D {
            n: 6,
            s_minus: 3,
            t_minus: 0,
            u_minus: 1,
            s_plus: 2,
            t_plus: 0,
            u_plus: 2,
        };
        let failures = c.identity_failures();
        assert_eq!(failures.len(), 2, "{failures:?}");
        assert!(failures.iter().all(|f| f.contains('-')));
    }

    #[test]
    fn rejects_out_of_order_and_non_convex() {
        let p = pts(&[&[0, 0], &[3, 3], &[3, 0], &[0, 4]]);
        assert!(matches!(census2d(&p), Err(GeomError::InvalidInput(_))));
        let p = pts(&[&[0, 0], &[4, 0], &[1, 1], &[0, 4]]);
        assert!(matches!(census2d(&p), Err(GeomError::InvalidInput(_))));
        // A pentagram turns consistently but is not convex.
        let star = pts(&[&[10, 0], &[-8, 6], &[3, -10], &[3, 10], &[-8, -6]]);
        assert!(census2d(&star).is_err());
        let p = pts(&[&[0, 0], &[2, 0], &[4, 0], &[0, 4]]);
        assert!(matches!(
            census2d(&p),
            Err(GeomError::GenericityViolation { .. })
        ));
    }

    #[test]
    fn clockwise_input_is_accepted() {
        let mut p = hexagon();
        p.reverse();
        assert_eq!(check_boundary_order(&p).unwrap(), Sign::Negative);
        assert!(census2d(&p).unwrap().identities_hold());
    }

    #[test]
    fn boundary_cycle_recovers_order() {
        let p = hexagon();
        let shuffled: Vec<_> = [0, 3, 5, 1, 4, 2].iter().map(|&i| p[i].clone()).collect();
        assert_eq!(boundary_cycle(&shuffled).unwrap(), vec![0, 3, 5, 1, 4, 2]);
        let mut reversed = p.clone();
        reversed.reverse();
        assert_eq!(boundary_cycle(&reversed).unwrap(), vec![0, 5, 4, 3, 2, 1]);
    }

    #[test]
    fn near_regular_pentagon_radii() {
        let p = pts(&[&[100, 0], &[31, 95], &[-81, 59], &[-80, -58], &[30, -96]]);
        let r = curvature_radii(&p).unwrap();
        assert!(r.condition_holds);
        assert!(r.local_min_count >= 2 && r.local_max_count >= 2, "{r:?}");
        // A circumradius: triangle (p4, p0, p1).
        let s = circumsphere(&[p[4].clone(), p[0].clone(), p[1].clone()]).unwrap();
        assert_eq!(r.radii_sq[0], s.radius_sq);
    }

    #[test]
    fn obtuse_corner_fails_condition() {
        // Triangle (1, 2, 3) is obtuse at vertex 1, so its circumcenter is
        // outside the angle at vertex 2.
        let p = pts(&[&[0, 0], &[10, 0], &[12, 1], &[0, 10]]);
        assert!(!curvature_radii(&p).unwrap().condition_holds);
    }

    #[test]
    fn distinct_radii_alternate() {
        let r = curvature_radii(&hexagon()).unwrap();
        assert!(r.radii_sq.windows(2).all(|w| w[0] != w[1]));
        assert_eq!(r.local_min_count, r.local_max_count);
    }
}
