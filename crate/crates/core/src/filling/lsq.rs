use crate::error::{Error, Result};

/// Unweighted least squares for `y ~ sum_p c_p x^p` with no intercept.
///
/// `x` is rescaled to `[-1, 1]` before factorizing the design matrix with
/// modified Gram-Schmidt, so `N` up to ~1e5 with powers 1 and 2 stays well
/// conditioned. Returns the coefficients in the order of `powers`.
pub fn fit_monomials(xs: &[f64], ys: &[f64], powers: &[i32]) -> Result<Vec<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    let k = powers.len();
    if xs.len() < k || k == 0 {
        return Err(Error::Underdetermined { points: xs.len(), coefficients: k });
    }
    let scale = xs.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::Underdetermined { points: 0, coefficients: k });
    }

    let mut q: Vec<Vec<f64>> = powers.iter().map(|&p| xs.iter().map(|x| (x / scale).powi(p)).collect()).collect();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        for i in 0..j {
            let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = dot;
            let (head, tail) = q.split_at_mut(j);
            tail[0].iter_mut().zip(&head[i]).for_each(|(v, qi)| *v -= dot * qi);
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= f64::EPSILON * xs.len() as f64 {
            return Err(Error::Underdetermined { points: xs.len(), coefficients: k });
        }
        r[j][j] = norm;
        q[j].iter_mut().for_each(|v| *v /= norm);
    }

    let qty: Vec<f64> = q.iter().map(|col| col.iter().zip(ys).map(|(a, b)| a * b).sum()).collect();
    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let tail: f64 = (i + 1..k).map(|j| r[i][j] * coef[j]).sum();
        coef[i] = (qty[i] - tail) / r[i][i];
    }
    Ok(coef.iter().zip(powers).map(|(c, &p)| c / scale.powi(p)).collect())
}
