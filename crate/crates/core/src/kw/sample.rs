use nalgebra::DVector;
use rand::Rng;

use super::KWDist;
use crate::error::{Error, Result};
use crate::kotz::{KotzModel, KotzVectorDist};
use crate::matops::SpdMatrix;

/// Draws `A = X H X'` with `H = I_n - e e'/n` from the Kotz model. The
/// location drops out under centering, so `X` is generated with `mu = 0`.
#[derive(Debug, Clone)]
pub struct KwSampler {
    model: KotzModel,
}

impl KwSampler {
    pub fn new(dist: &KWDist) -> Result<Self> {
        let vector = KotzVectorDist::new(DVector::zeros(dist.p), dist.sigma.clone(), dist.params)?;
        Ok(Self {
            model: KotzModel::new(dist.n(), vector)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SpdMatrix> {
        let mut x = self.model.sample(rng);
        for mut row in x.row_iter_mut() {
            let m = row.mean();
            row.add_scalar_mut(-m);
        }
        let a = &x * x.transpose();
        SpdMatrix::new(crate::matops::symmetrize(&a))
            .map_err(|_| Error::Precondition("sampled SSP matrix is rank deficient".into()))
    }
}

pub fn sample_kw<R: Rng + ?Sized>(dist: &KWDist, rng: &mut R) -> Result<SpdMatrix> {
    KwSampler::new(dist)?.sample(rng)
}
