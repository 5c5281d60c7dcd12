//! Matrix permanents via Ryser's inclusion-exclusion formula, iterating column
//! subsets in Gray-code order so each step updates the row sums with a single
//! column add or subtract. Cost is `O(2^k k)` for a `k x k` matrix.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_PERMANENT_CAP: usize = 30;

pub fn permanent(a: &Array2<Complex64>) -> Result<Complex64> {
    permanent_with_cap(a, DEFAULT_PERMANENT_CAP)
}

pub fn permanent_with_cap(a: &Array2<Complex64>, cap: usize) -> Result<Complex64> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows > cap {
        return Err(Error::Capacity { what: "permanent dimension", size: rows as u128, cap: cap as u128 });
    }
    Ok(ryser(a))
}

fn ryser(a: &Array2<Complex64>) -> Complex64 {
    let k = a.nrows();
    match k {
        0 => return Complex64::new(1.0, 0.0),
        1 => return a[[0, 0]],
        2 => return a[[0, 0]] * a[[1, 1]] + a[[0, 1]] * a[[1, 0]],
        _ => {}
    }

    // Column-major copy so the column toggled at each step is contiguous.
    let columns: Vec<Complex64> = a.t().iter().copied().collect();
    let mut row_sums = vec![Complex64::new(0.0, 0.0); k];
    let mut total = Complex64::new(0.0, 0.0);
    let mut subset: u64 = 0;

    for step in 1u64..(1u64 << k) {
        let col = step.trailing_zeros() as usize;
        let bit = 1u64 << col;
        subset ^= bit;
        let column = &columns[col * k..(col + 1) * k];
        if subset & bit != 0 {
            row_sums.iter_mut().zip(column).for_each(|(s, &x)| *s += x);
        } else {
            row_sums.iter_mut().zip(column).for_each(|(s, &x)| *s -= x);
        }
        let prod = row_sums.iter().fold(Complex64::new(1.0, 0.0), |acc, &s| acc * s);
        // Sign (-1)^(k - |S|).
        if (k as u32 - subset.count_ones()).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}
