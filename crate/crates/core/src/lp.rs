//! Exact rational feasibility LPs (phase-one simplex, Bland's rule).

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Finds `x >= 0` with `a x = b`, or `None` when the system is infeasible.
pub fn nonnegative_solution(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.len();
    assert_eq!(m, b.len());
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;

    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![BigRational::zero(); width];
        for j in 0..n {
            row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = BigRational::from_integer(1.into());
        row[width - 1] = b[i].abs();
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width - 1] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((pr, _)) = leave else {
            // Unbounded direction cannot occur for a bounded-below objective.
            break;
        };
        pivot(&mut t, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<BigRational>], cost: &mut [BigRational], pr: usize, pc: usize) {
    let inv = t[pr][pc].recip();
    for v in t[pr].iter_mut() {
        *v *= &inv;
    }
    let prow = t[pr].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (v, p) in row.iter_mut().zip(&prow) {
            *v -= &f * p;
        }
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for (v, p) in cost.iter_mut().zip(&prow) {
            *v -= &f * p;
        }
    }
}

/// Finds a free vector `y` with `a y >= b` componentwise.
pub fn free_solution_geq(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    // y = p - q, a p - a q - s = b with p, q, s >= 0.
    let rows: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(2 * n + m);
            row.extend(a[i].iter().cloned());
            row.extend(a[i].iter().map(|x| -x.clone()));
            for k in 0..m {
                row.push(if k == i {
                    BigRational::from_integer((-1).into())
                } else {
                    BigRational::zero()
                });
            }
            row
        })
        .collect();
    let x = nonnegative_solution(&rows, b)?;
    Some((0..n).map(|j| &x[j] - &x[n + j]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|x| BigRational::from_integer((*x).into())).collect()
    }

    #[test]
    fn cone_membership() {
        // (1,1) = (1,0) + (0,1)
        let a = vec![q(&[1, 0]), q(&[0, 1])];
        let x = nonnegative_solution(&a, &q(&[1, 1])).unwrap();
        assert_eq!(x, q(&[1, 1]));
        // (-1, 0) is not a nonnegative combination
        assert!(nonnegative_solution(&a, &q(&[-1, 0])).is_none());
    }

    #[test]
    fn free_inequalities() {
        // y1 >= 1, -y1 >= -3, y1 - y2 >= 1
        let a = vec![q(&[1, 0]), q(&[-1, 0]), q(&[1, -1])];
        let y = free_solution_geq(&a, &q(&[1, -3, 1])).unwrap();
        assert!(y[0] >= q(&[1])[0] && y[0] <= q(&[3])[0]);
        assert!(&y[0] - &y[1] >= q(&[1])[0]);
        // y >= 1 and -y >= 0 is infeasible
        let a = vec![q(&[1]), q(&[-1])];
        assert!(free_solution_geq(&a, &q(&[1, 0])).is_none());
    }
}
