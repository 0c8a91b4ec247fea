use crate::linalg::norm;
use crate::target::{DensityFactor, GaussianReference, ReferenceMeasure};
use crate::{Error, Result};

/// Rewrites a log-likelihood (density w.r.t. a Gaussian prior) as a density
/// w.r.t. a Lebesgue or polar reference.
///
/// Lebesgue adds `log N(x; 0, C)`; polar additionally adds
/// `(d - 1) log |x|`, which is `-inf` at the origin. With `prior = None` only
/// the polar term is added. Cost weight is preserved.
pub fn reference_adjust(
    factor: &DensityFactor,
    prior: Option<&GaussianReference>,
    reference: &ReferenceMeasure,
) -> Result<DensityFactor> {
    let dim = factor.dim();
    if reference.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: reference.dim(),
        });
    }
    if let Some(p) = prior {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    let polar = match reference {
        ReferenceMeasure::Lebesgue { .. } => false,
        ReferenceMeasure::PolarLebesgue { .. } => true,
        ReferenceMeasure::Gaussian(_) => {
            return Err(Error::InvalidReference(
                "density adjustment targets Lebesgue or polar references".into(),
            ))
        }
    };
    let inner = factor.clone();
    let prior = prior.cloned();
    let radial = (dim - 1) as f64;
    Ok(DensityFactor::new(dim, move |x| {
        let mut v = inner.log_value(x);
        if let Some(p) = &prior {
            v += p.log_density(x);
        }
        if polar {
            let r = norm(x);
            if r == 0.0 {
                return f64::NEG_INFINITY;
            }
            v += radial * r.ln();
        }
        v
    })
    .with_cost(factor.cost_weight()))
}
