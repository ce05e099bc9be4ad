use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::{Error, Result, Scalar};

/// Every seeded stream in the crate starts here so that one integer seed
/// reproduces a run on every platform.
pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` distinct rows of `x`, drawn without replacement from the seeded stream.
pub(crate) fn distinct_rows<T: Scalar>(x: &Matrix<T>, k: usize, seed: u64) -> Result<Matrix<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("cluster count must be at least 1".into()));
    }
    if x.rows() < k {
        return Err(Error::TooFewPoints { n: x.rows(), k });
    }
    let mut rng = rng(seed);
    let picked = rand::seq::index::sample(&mut rng, x.rows(), k);
    Ok(x.select_rows(&picked.into_vec()))
}
