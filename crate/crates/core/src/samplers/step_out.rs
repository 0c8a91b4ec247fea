use rand::RngCore;

use super::shrink::Bracket;
use crate::rng::uniform;
use crate::{Error, Result};

/// Stepping-out around `anchor` with a randomly placed initial window of
/// width `w`.
///
/// Without a lower bound the window is `(l, l + w)` with `l = anchor - u w`,
/// and each edge moves outward by `w` while `pred` holds there. With
/// `lower_bound = Some(b)` the window is
/// `(max(anchor - u w, b), anchor + (1 - u) w)` and the lower edge stops
/// expanding once it reaches the clamp (the radial variant). Consumes one
/// uniform.
pub fn step_out<R, P>(
    pred: P,
    anchor: f64,
    w: f64,
    lower_bound: Option<f64>,
    rng: &mut R,
    max_expand: usize,
) -> Result<Bracket>
where
    R: RngCore + ?Sized,
    P: FnMut(f64) -> Result<bool>,
{
    step_out_at(pred, anchor, w, lower_bound, uniform(rng), max_expand)
}

/// [`step_out`] with the window placement `u` in (0, 1) supplied by the caller.
pub fn step_out_at<P>(
    mut pred: P,
    anchor: f64,
    w: f64,
    lower_bound: Option<f64>,
    u: f64,
    max_expand: usize,
) -> Result<Bracket>
where
    P: FnMut(f64) -> Result<bool>,
{
    let clamp = |v: f64| lower_bound.map_or(v, |b| v.max(b));
    let mut l = clamp(anchor - u * w);
    let mut r = match lower_bound {
        None => l + w,
        Some(_) => anchor + (1.0 - u) * w,
    };

    let mut steps = 0usize;
    while lower_bound.is_none_or(|b| l > b) && pred(l)? {
        if steps == max_expand {
            return Err(Error::Exhausted {
                routine: "stepping-out (lower edge)",
                cap: max_expand,
            });
        }
        l = clamp(l - w);
        steps += 1;
    }

    let mut steps = 0usize;
    while pred(r)? {
        if steps == max_expand {
            return Err(Error::Exhausted {
                routine: "stepping-out (upper edge)",
                cap: max_expand,
            });
        }
        r += w;
        steps += 1;
    }
    Ok(Bracket { l, r, anchor })
}
