//! Exact dictionary simplex for `max c·z` subject to `A z <= b`, `z >= 0`
//! with `b >= 0`, so the origin is a feasible starting vertex.
//!
//! Pivoting is fraction-free: the dictionary is kept as integer-like entries
//! over one common denominator, which is the previous pivot, and every update
//! divides exactly by it. Bland's rule keeps degenerate problems from
//! cycling.

use crate::exactnum::{Field, Ring};

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus<T> {
    Solved { value: T, z: Vec<T> },
    Unbounded,
}

/// Solution of [`pivot_simplex`] over a common positive denominator.
pub(crate) enum Scaled<R> {
    Solved { value: R, z: Vec<R>, denom: R },
    Unbounded,
}

/// `rows[i] = (a_i1 .. a_ik, b_i)`, `cost = (c_1 .. c_k)`.
pub(crate) fn pivot_simplex<R: Ring>(mut rows: Vec<Vec<R>>, cost: Vec<R>) -> Scaled<R> {
    let k = cost.len();
    let m = rows.len();
    // Objective row in the same layout: (c_1 .. c_k, -value).
    let mut obj = cost;
    obj.push(R::zero());
    let mut denom = R::one();
    let mut basis: Vec<usize> = (k..k + m).collect();
    let mut nonbasis: Vec<usize> = (0..k).collect();

    loop {
        let Some(e) = (0..k)
            .filter(|&j| obj[j].is_positive())
            .min_by_key(|&j| nonbasis[j])
        else {
            let mut z = vec![R::zero(); k];
            for (i, &v) in basis.iter().enumerate() {
                if v < k {
                    z[v] = rows[i][k].clone();
                }
            }
            return Scaled::Solved {
                value: -obj[k].clone(),
                z,
                denom,
            };
        };
        // Ratio test on rhs / a_ie; the common denominator cancels, so
        // compare cross products.
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !rows[i][e].is_positive() {
                continue;
            }
            leave = Some(match leave {
                None => i,
                Some(r) => {
                    let lhs = rows[i][k].clone() * &rows[r][e];
                    let rhs = rows[r][k].clone() * &rows[i][e];
                    if lhs < rhs || (lhs == rhs && basis[i] < basis[r]) {
                        i
                    } else {
                        r
                    }
                }
            });
        }
        let Some(r) = leave else {
            return Scaled::Unbounded;
        };

        let p = rows[r][e].clone();
        let pivot_row = rows[r].clone();
        let update = |row: &mut Vec<R>| {
            let f = row[e].clone();
            for (l, x) in row.iter_mut().enumerate() {
                if l == e {
                    *x = -f.clone();
                } else {
                    let mut v = x.clone() * &p;
                    v -= f.clone() * &pivot_row[l];
                    *x = v / &denom;
                }
            }
        };
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                update(row);
            }
        }
        update(&mut obj);
        rows[r][e] = denom.clone();
        denom = p;
        std::mem::swap(&mut basis[r], &mut nonbasis[e]);
    }
}

/// Solves the program after clearing denominators row by row.
pub fn maximize<T: Field>(a: Vec<Vec<T>>, b: Vec<T>, c: Vec<T>) -> LpStatus<T> {
    debug_assert!(b.iter().all(|x| !x.is_negative()));
    let rows = a
        .into_iter()
        .zip(b)
        .map(|(mut row, bi)| {
            row.push(bi);
            T::clear_denominators(&row)
        })
        .collect();
    match pivot_simplex(rows, T::clear_denominators(&c)) {
        Scaled::Unbounded => LpStatus::Unbounded,
        Scaled::Solved { z, denom, .. } => {
            let denom = T::from_ring(denom);
            let z: Vec<T> = z.into_iter().map(|x| T::from_ring(x) / &denom).collect();
            let value = c
                .iter()
                .zip(&z)
                .fold(T::zero(), |acc, (ci, zi)| acc + ci.clone() * zi);
            LpStatus::Solved { value, z }
        }
    }
}
