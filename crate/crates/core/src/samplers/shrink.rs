use rand::RngCore;

use crate::rng::uniform_in;
use crate::{Error, Result};

/// A live interval `(l, r)` around an anchor point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub l: f64,
    pub r: f64,
    pub anchor: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.r - self.l
    }

    pub fn contains_anchor(&self) -> bool {
        self.l < self.anchor && self.anchor < self.r
    }
}

/// Delayed-acceptance shrinkage.
///
/// Starting from `z0`, accepts the first candidate `z` with `cheap(z)` and
/// `expensive(z)`; `expensive` is only called once `cheap` has passed at the
/// same `z`. Rejected candidates below the anchor move `l`, all others move
/// `r`, and the next candidate is uniform on the shrunk interval.
pub fn da_shrink<R, C, E>(
    cheap: C,
    expensive: E,
    bracket: Bracket,
    z0: f64,
    rng: &mut R,
    max_shrink: usize,
) -> Result<f64>
where
    R: RngCore + ?Sized,
    C: FnMut(f64) -> Result<bool>,
    E: FnMut(f64) -> Result<bool>,
{
    da_shrink_observed(cheap, expensive, bracket, z0, rng, max_shrink, |_| {})
}

/// [`da_shrink`] that reports the bracket after every shrink step.
pub fn da_shrink_observed<R, C, E, O>(
    mut cheap: C,
    mut expensive: E,
    mut bracket: Bracket,
    z0: f64,
    rng: &mut R,
    max_shrink: usize,
    mut observe: O,
) -> Result<f64>
where
    R: RngCore + ?Sized,
    C: FnMut(f64) -> Result<bool>,
    E: FnMut(f64) -> Result<bool>,
    O: FnMut(&Bracket),
{
    let mut z = z0;
    let mut shrinks = 0usize;
    loop {
        if cheap(z)? && expensive(z)? {
            return Ok(z);
        }
        if shrinks == max_shrink {
            return Err(Error::Exhausted {
                routine: "shrinkage",
                cap: max_shrink,
            });
        }
        if z < bracket.anchor {
            bracket.l = z;
        } else {
            bracket.r = z;
        }
        shrinks += 1;
        observe(&bracket);
        z = uniform_in(rng, bracket.l, bracket.r);
    }
}
