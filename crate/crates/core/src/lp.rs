//! Exact feasibility of small linear systems `A x ≤ b, x ≥ 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Grid onto which floating-point coefficients are rounded before the solve.
pub const GRID: f64 = 1e-12;

/// Rounds `x` to the nearest multiple of [`GRID`] and converts it exactly.
pub fn to_rational(x: f64) -> BigRational {
    let scaled = (x / GRID).round() as i128;
    BigRational::new(BigInt::from(scaled), BigInt::from(1_000_000_000_000i64))
}

pub fn to_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Phase one of the two-phase simplex method with Bland's rule, over the
/// rationals. Returns a feasible point, or `None` if the system is empty.
pub fn feasible_point(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    assert_eq!(b.len(), m, "one right-hand side per row");
    if m == 0 {
        return Some(vec![BigRational::zero(); n]);
    }
    // Columns: n structural, m slack, m artificial, then the right-hand side.
    let width = n + 2 * m + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        assert_eq!(a[i].len(), n, "ragged constraint matrix");
        let sign = if b[i].is_negative() {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        let mut row = vec![BigRational::zero(); width];
        for j in 0..n {
            row[j] = &a[i][j] * &sign;
        }
        row[n + i] = sign.clone();
        row[n + m + i] = BigRational::one();
        row[rhs] = &b[i] * &sign;
        t.push(row);
    }
    // Reduced costs of the phase-one objective (sum of artificials).
    let mut obj = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..n + m {
            obj[j] -= &row[j];
        }
        obj[rhs] -= &row[rhs];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n + m..n + 2 * m).collect();

    loop {
        let Some(enter) = (0..n + 2 * m).find(|&j| t[m][j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // The phase-one objective is bounded below by zero.
        let (r, _) = leave.expect("phase one is bounded");
        pivot(&mut t, r, enter);
        basis[r] = enter;
    }

    if !t[m][rhs].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][rhs].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<BigRational>], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        *v /= &p;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}
