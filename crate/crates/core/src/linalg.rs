use crate::scalars::FieldScalar;

/// Result of an exact linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<FieldScalar>),
    /// Consistent but with free variables.
    Underdetermined { rank: usize, unknowns: usize },
    Inconsistent,
}

/// Solves `rows · x = rhs` by Gaussian elimination over the working field.
pub fn solve(mut rows: Vec<Vec<FieldScalar>>, mut rhs: Vec<FieldScalar>) -> Solution {
    let unknowns = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for v in rows[r][c..].iter_mut() {
            *v = &*v * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            for j in c..unknowns {
                if !rows[r][j].is_zero() {
                    let t = &factor * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &t;
                }
            }
            let t = &factor * &rhs[r];
            rhs[i] = &rhs[i] - &t;
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rhs[r..].iter().any(|v| !v.is_zero()) {
        return Solution::Inconsistent;
    }
    if r < unknowns {
        return Solution::Underdetermined { rank: r, unknowns };
    }
    let mut x = vec![FieldScalar::zero(); unknowns];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Solution::Unique(x)
}
