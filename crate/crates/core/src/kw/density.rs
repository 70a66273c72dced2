use super::{ln_c1_normalizer, require_s1, IKWDist, KWDist};
use crate::error::{Error, Result};
use crate::kotz::{KotzParams, PdfValue};
use crate::matops::SpdMatrix;
use crate::specfun::{ln_whittaker_w, WhittakerIndex};

/// `xi ln(z) - z/2 + ln W_{alpha,beta}(z)` with `z = theta * tr(...)`.
fn ln_trace_factor(z: f64, p: usize, params: &KotzParams) -> Result<f64> {
    let idx = WhittakerIndex::kotz(params.q, p);
    let xi = (2.0 * params.q + p as f64 - 4.0) / 4.0;
    Ok(xi * z.ln() - 0.5 * z + ln_whittaker_w(idx, z)?)
}

/// `C_1 |Sigma|^{-nu/2} |A|^{(nu-p-1)/2} (theta b)^xi e^{-theta b/2} W(theta b)`, `b = tr Sigma^{-1} A`.
pub fn kw_ln_pdf(a: &SpdMatrix, dist: &KWDist) -> Result<f64> {
    dist.require_s1("the Kotz-Wishart density")?;
    if a.dim() != dist.p {
        return Err(Error::DimensionMismatch {
            expected: dist.p,
            found: a.dim(),
        });
    }
    let nu = dist.nu as f64;
    let p = dist.p as f64;
    let z = dist.params.theta * (dist.sigma.inverse_matrix() * a.matrix()).trace();
    Ok(dist.ln_c1_normalizer()? - nu / 2.0 * dist.sigma.ln_det() + (nu - p - 1.0) / 2.0 * a.ln_det()
        + ln_trace_factor(z, dist.p, &dist.params)?)
}

pub fn kw_pdf(a: &SpdMatrix, dist: &KWDist) -> Result<PdfValue> {
    Ok(PdfValue::from_log(kw_ln_pdf(a, dist)?))
}

/// `C_1 |V|^{(d-p-1)/2} |B|^{-d/2} (theta c)^xi e^{-theta c/2} W(theta c)`, `c = tr V B^{-1}`.
pub fn ikw_ln_pdf(b: &SpdMatrix, dist: &IKWDist) -> Result<f64> {
    require_s1(&dist.params, "the inverted Kotz-Wishart density")?;
    let p = dist.p();
    if b.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: b.dim(),
        });
    }
    let d = dist.d as f64;
    let nu = d - p as f64 - 1.0;
    let z = dist.params.theta * (dist.v.matrix() * b.inverse_matrix()).trace();
    Ok(ln_c1_normalizer(p, nu, &dist.params)? + nu / 2.0 * dist.v.ln_det() - d / 2.0 * b.ln_det()
        + ln_trace_factor(z, p, &dist.params)?)
}

pub fn ikw_pdf(b: &SpdMatrix, dist: &IKWDist) -> Result<PdfValue> {
    Ok(PdfValue::from_log(ikw_ln_pdf(b, dist)?))
}
