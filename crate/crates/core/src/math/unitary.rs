use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::math::OccupationList;

/// Maximum entrywise deviation of `U U^dagger` from the identity.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// `m x m` interferometer matrix. Entry `(k, j)` is the amplitude for a photon
/// entering mode `j` to leave in mode `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(Array2<Complex64>);

impl UnitaryMatrix {
    pub fn new(entries: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::InvalidArgument("unitary dimension must be at least 1".into()));
        }
        let deviation = unitarity_deviation(&entries);
        if deviation >= UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryMatrix(entries))
    }

    pub fn identity(m: usize) -> Self {
        UnitaryMatrix(Array2::from_shape_fn((m, m), |(i, j)| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[[row, col]]
    }

    pub fn transpose(&self) -> UnitaryMatrix {
        UnitaryMatrix(self.0.t().to_owned())
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.0)
    }

    /// Short content hash over the raw bit patterns of all entries.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.dim() as u64).to_le_bytes());
        for z in self.0.iter() {
            hasher.update(z.re.to_bits().to_le_bytes());
            hasher.update(z.im.to_bits().to_le_bytes());
        }
        hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn unitarity_deviation(u: &Array2<Complex64>) -> f64 {
    let m = u.nrows();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                acc += u[[i, k]] * u[[j, k]].conj();
            }
            if i == j {
                acc -= 1.0;
            }
            worst = worst.max(acc.re.abs()).max(acc.im.abs());
        }
    }
    worst
}

/// Haar-distributed unitary from a complex Ginibre matrix.
///
/// Columns are orthonormalized by Gram-Schmidt with one re-orthogonalization
/// pass. Gram-Schmidt yields the QR factorization whose triangular factor has
/// a positive real diagonal, which is the phase convention under which `Q` is
/// Haar distributed.
pub fn haar_random_unitary(m: usize, seed: u64) -> Result<UnitaryMatrix> {
    if m == 0 {
        return Err(Error::InvalidArgument("unitary dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    // cols[j] is column j of the Ginibre matrix.
    let mut cols: Vec<Vec<Complex64>> = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    for j in 0..m {
        for _pass in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[i];
                let v = &mut rest[0];
                let r: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, &qi)| *x -= r * qi);
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }

    let entries = Array2::from_shape_fn((m, m), |(row, col)| cols[col][row]);
    UnitaryMatrix::new(entries)
}

/// The `n x n` matrix whose permanent gives the transition amplitude from
/// `input` to `output`: column `j` of `lambda` repeated `input[j]` times and
/// row `i` repeated `output[i]` times, both in ascending mode order.
pub fn build_submatrix(
    lambda: &UnitaryMatrix,
    input: &OccupationList,
    output: &OccupationList,
) -> Result<Array2<Complex64>> {
    let m = lambda.dim();
    if input.modes() != m {
        return Err(Error::LengthMismatch { left: input.modes(), right: m });
    }
    if output.modes() != m {
        return Err(Error::LengthMismatch { left: output.modes(), right: m });
    }
    let (n_in, n_out) = (input.total(), output.total());
    if n_in != n_out {
        return Err(Error::TotalMismatch { left: n_in, right: n_out });
    }
    let cols = input.photon_modes();
    let rows = output.photon_modes();
    Ok(Array2::from_shape_fn((rows.len(), cols.len()), |(r, c)| lambda.get(rows[r], cols[c])))
}
