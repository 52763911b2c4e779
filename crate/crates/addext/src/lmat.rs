//! Minimal matrix helpers over `L` itself: rank checks for L-bases and
//! enumeration of canonical (RREF) generator matrices of L-linear codes.

use crate::field::{FieldTower, LElem};
use crate::linalg::gaussian_binomial;

/// Guard for L-subspace enumeration.
pub(crate) const MAX_L_ENUMERATION: u128 = 1 << 20;

/// Rank of a set of rows over `L` (destructive Gaussian elimination on a copy).
pub(crate) fn l_rank(tower: &FieldTower, rows: &[Vec<LElem>]) -> usize {
    let mut mat: Vec<Vec<LElem>> = rows.to_vec();
    let cols = mat.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(pr, rank);
        let inv = tower.inv(mat[rank][col]).expect("nonzero pivot");
        for c in 0..cols {
            mat[rank][c] = tower.mul(mat[rank][c], inv);
        }
        for r in 0..mat.len() {
            if r != rank && !mat[r][col].is_zero() {
                let factor = tower.neg(mat[r][col]);
                for c in 0..cols {
                    let t = tower.mul(factor, mat[rank][c]);
                    mat[r][c] = tower.add(mat[r][c], t);
                }
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    rank
}

/// All `d × n` reduced-row-echelon generator matrices over `L`, i.e. one
/// canonical basis per `d`-dimensional L-linear code in `L^n`. Deterministic
/// order (pivot sets then free entries, lexicographic).
pub(crate) fn enumerate_l_rref(
    tower: &FieldTower,
    n: usize,
    d: usize,
) -> Result<Vec<Vec<Vec<LElem>>>, String> {
    let q_l = u64::from(tower.order());
    let count = gaussian_binomial(q_l, n as u64, d as u64);
    if count > MAX_L_ENUMERATION {
        return Err(format!(
            "{count} L-subspaces exceed the enumeration guard {MAX_L_ENUMERATION}"
        ));
    }
    if d > n {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut pivots = (0..d).collect::<Vec<usize>>();
    loop {
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; n];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for j in p + 1..n {
                if !is_pivot[j] {
                    free.push((i, j));
                }
            }
        }
        let assignments = q_l.pow(free.len() as u32);
        for a in 0..assignments {
            let mut mat = vec![vec![LElem::ZERO; n]; d];
            for (i, &p) in pivots.iter().enumerate() {
                mat[i][p] = LElem::ONE;
            }
            let mut rem = a;
            for &(i, j) in &free {
                mat[i][j] = LElem((rem % q_l) as u32);
                rem /= q_l;
            }
            out.push(mat);
        }
        // next pivot combination in lexicographic order
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if pivots[i] < n - (d - i) {
                pivots[i] += 1;
                for j in i + 1..d {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldTower;

    #[test]
    fn rank_over_l() {
        let t = FieldTower::with_defaults(2, 1, 2).unwrap();
        let w = LElem(2);
        let rows = vec![vec![LElem::ONE, LElem::ONE], vec![w, w]];
        assert_eq!(l_rank(&t, &rows), 1);
        let rows = vec![vec![LElem::ONE, LElem::ZERO], vec![w, w]];
        assert_eq!(l_rank(&t, &rows), 2);
    }

    #[test]
    fn rref_enumeration_counts() {
        let t = FieldTower::with_defaults(2, 1, 2).unwrap();
        assert_eq!(enumerate_l_rref(&t, 2, 1).unwrap().len(), 5); // (16-1)/3
        assert_eq!(enumerate_l_rref(&t, 3, 2).unwrap().len(), 21);
        for mat in enumerate_l_rref(&t, 3, 2).unwrap() {
            assert_eq!(l_rank(&t, &mat), 2);
        }
    }
}
