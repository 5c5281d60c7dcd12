//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's permanent, submatrix or distribution code.

#![allow(dead_code)]

use std::collections::HashMap;

use bsfill_core::math::{OccupationList, UnitaryMatrix};
use ndarray::Array2;
use num_complex::Complex64;

/// Permanent as a sum over all `k!` permutations (Heap's algorithm).
pub fn naive_permanent(a: &Array2<Complex64>) -> Complex64 {
    let k = a.nrows();
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let term = |p: &[usize]| (0..k).map(|i| a[[i, p[i]]]).product::<Complex64>();
    let mut total = term(&perm);
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += term(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    total
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Rows repeated per output photon, columns per input photon.
fn transfer_submatrix(lambda: &UnitaryMatrix, input: &OccupationList, output: &OccupationList) -> Array2<Complex64> {
    let rows = output.photon_modes();
    let cols = input.photon_modes();
    Array2::from_shape_fn((rows.len(), cols.len()), |(r, c)| lambda.get(rows[r], cols[c]))
}

fn occupation_factor(s: &OccupationList) -> f64 {
    s.counts().iter().map(|&c| factorial(c)).product()
}

pub fn boson_probability(lambda: &UnitaryMatrix, input: &OccupationList, output: &OccupationList) -> f64 {
    let sub = transfer_submatrix(lambda, input, output);
    naive_permanent(&sub).norm_sqr() / (occupation_factor(input) * occupation_factor(output))
}

/// Independent routing of each photon: `perm(|Lambda_S|^2) / prod s!`
/// for an input with single occupations.
pub fn distinguishable_probability(lambda: &UnitaryMatrix, input: &OccupationList, output: &OccupationList) -> f64 {
    let sub = transfer_submatrix(lambda, input, output).mapv(|z| Complex64::new(z.norm_sqr(), 0.0));
    naive_permanent(&sub).re / occupation_factor(output)
}

/// All occupation lists of `n` photons in `m` modes (order irrelevant).
pub fn all_outcomes(m: usize, n: u32) -> Vec<OccupationList> {
    fn rec(m: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<OccupationList>) {
        if prefix.len() == m - 1 {
            prefix.push(left);
            out.push(OccupationList::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(m, left - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, n, &mut Vec::new(), &mut out);
    out
}

pub fn histogram<'a>(draws: impl IntoIterator<Item = &'a OccupationList>) -> HashMap<Vec<u32>, usize> {
    let mut h = HashMap::new();
    for d in draws {
        *h.entry(d.counts().to_vec()).or_insert(0) += 1;
    }
    h
}

/// Total variation distance between an empirical histogram and a law.
pub fn tvd(hist: &HashMap<Vec<u32>, usize>, total: usize, law: &[(OccupationList, f64)]) -> f64 {
    let mut seen = 0usize;
    let mut sum = 0.0;
    for (s, p) in law {
        let count = hist.get(s.counts()).copied().unwrap_or(0);
        seen += count;
        sum += (count as f64 / total as f64 - p).abs();
    }
    // Mass observed outside the law's support.
    sum += (total - seen) as f64 / total as f64;
    sum / 2.0
}
