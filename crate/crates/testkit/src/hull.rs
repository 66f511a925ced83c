//! Exact convex-hull questions by Carathéodory enumeration: a point lies in
//! the hull of a set iff it is a convex combination of some affinely
//! independent subset of at most `d + 1` points.

use num_traits::{Signed, Zero};

use crate::Q;

/// Solves `Σ λ_i s_i = p, Σ λ_i = 1` when the `s_i` are affinely independent;
/// `None` if they are dependent or `p` is off their affine hull.
#[allow(clippy::needless_range_loop)]
pub fn barycentric(p: &[u32], simplex: &[&[u32]]) -> Option<Vec<Q>> {
    let d = p.len();
    let k = simplex.len();
    // rows: coordinates plus the affine row; columns: λ and the right side
    let mut m: Vec<Vec<Q>> = (0..=d)
        .map(|r| {
            let mut row: Vec<Q> = simplex
                .iter()
                .map(|s| if r < d { Q::from_integer(i128::from(s[r])) } else { Q::from_integer(1) })
                .collect();
            row.push(if r < d { Q::from_integer(i128::from(p[r])) } else { Q::from_integer(1) });
            row
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..k {
        let found = (pivot_row..=d).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot_row, found);
        let piv = m[pivot_row][col];
        for c in col..=k {
            m[pivot_row][c] /= piv;
        }
        for r in 0..=d {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in col..=k {
                    let delta = f * m[pivot_row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| m[i][k]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

pub fn in_hull(p: &[u32], points: &[Vec<u32>]) -> bool {
    let d = p.len();
    (1..=(d + 1).min(points.len())).any(|k| {
        subsets(points.len(), k).into_iter().any(|idx| {
            let s: Vec<&[u32]> = idx.iter().map(|&i| points[i].as_slice()).collect();
            barycentric(p, &s).is_some_and(|l| l.iter().all(|x| !x.is_negative()))
        })
    })
}

/// Vertices of the hull of distinct points, in input order.
pub fn vertices(points: &[Vec<u32>]) -> Vec<Vec<u32>> {
    points
        .iter()
        .enumerate()
        .filter(|(i, p)| {
            let others: Vec<Vec<u32>> = points
                .iter()
                .enumerate()
                .filter(|(j, _)| j != i)
                .map(|(_, q)| q.clone())
                .collect();
            !in_hull(p, &others)
        })
        .map(|(_, p)| p.clone())
        .collect()
}

/// Affine independence of the points.
pub fn affinely_independent(points: &[&[u32]]) -> bool {
    match points {
        [] => true,
        [first, ..] => barycentric(first, points).is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn square_with_center() {
        let pts = vec![vec![0, 0], vec![2, 0], vec![0, 2], vec![2, 2], vec![1, 1], vec![1, 0]];
        assert_eq!(vertices(&pts), &pts[..4]);
        assert!(in_hull(&[1, 1], &pts[..4]));
        assert!(!in_hull(&[3, 0], &pts[..4]));
    }

    #[test]
    fn barycentric_weights() {
        let s: [&[u32]; 3] = [&[4, 0], &[0, 2], &[0, 0]];
        assert_eq!(barycentric(&[2, 1], &s).unwrap(), vec![q(1, 2), q(1, 2), q(0, 1)]);
        let collinear: [&[u32]; 3] = [&[0, 0], &[1, 1], &[2, 2]];
        assert!(!affinely_independent(&collinear));
    }
}
