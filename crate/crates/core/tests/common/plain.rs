//! Plain (non-delayed) slice samplers and random-walk Metropolis written
//! straight from their textbook descriptions, against a single log density.
//!
//! They draw random numbers in the same order as the delayed-acceptance
//! kernels do on a trivial factorization, including the second level `t`
//! (and the second MH uniform) that the plain algorithms never look at.

#![allow(dead_code)]

use std::f64::consts::TAU;

use daslice::linalg::norm;
use daslice::rng::uniform;
use daslice::samplers::{sample_orth_sphere, sample_unit_sphere};
use daslice::GaussianReference;
use rand::RngCore;

pub type LogDensity<'a> = &'a dyn Fn(&[f64]) -> f64;

/// One transition of a plain kernel from `x`.
pub type PlainStep<'a> = &'a dyn Fn(&[f64], &mut dyn RngCore) -> Vec<f64>;

fn level(lp: LogDensity, x: &[f64], rng: &mut dyn RngCore) -> f64 {
    let log_y = lp(x) + uniform(rng).ln();
    let _unused_t = uniform(rng);
    log_y
}

pub fn mh(lp: LogDensity, x: &[f64], step: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    let z = daslice::rng::standard_normal_vec(rng, x.len());
    let y: Vec<f64> = x.iter().zip(&z).map(|(x, z)| x + step * z).collect();
    if lp(&y) > lp(x) + uniform(rng).ln() {
        let _unused_u2 = uniform(rng);
        y
    } else {
        x.to_vec()
    }
}

pub fn ideal(
    lp: LogDensity,
    x: &[f64],
    direct: &dyn Fn(f64, &mut dyn RngCore) -> Vec<f64>,
    rng: &mut dyn RngCore,
) -> Vec<f64> {
    let log_y = level(lp, x, rng);
    direct(log_y, rng)
}

pub fn ess(
    lp: LogDensity,
    x: &[f64],
    prior: &GaussianReference,
    rng: &mut dyn RngCore,
) -> Vec<f64> {
    let log_y = level(lp, x, rng);
    let v = prior.sample(rng);
    let mut theta = TAU * uniform(rng);
    let (mut lo, mut hi) = (theta - TAU, theta);
    loop {
        let (s, c) = theta.sin_cos();
        let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| c * a + s * b).collect();
        if lp(&y) > log_y {
            return y;
        }
        if theta < 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        theta = lo + (hi - lo) * uniform(rng);
    }
}

pub fn hruss(lp: LogDensity, x: &[f64], w: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    let log_y = level(lp, x, rng);
    let v = sample_unit_sphere(x.len(), rng).unwrap();
    let at = |p: f64| -> Vec<f64> { x.iter().zip(&v).map(|(x, v)| x + p * v).collect() };
    let u = uniform(rng);
    let mut l = -(u * w);
    let mut r = l + w;
    while lp(&at(l)) > log_y {
        l -= w;
    }
    while lp(&at(r)) > log_y {
        r += w;
    }
    let mut p = l + (r - l) * uniform(rng);
    loop {
        let y = at(p);
        if lp(&y) > log_y {
            return y;
        }
        if p < 0.0 {
            l = p;
        } else {
            r = p;
        }
        p = l + (r - l) * uniform(rng);
    }
}

pub fn gpss(lp: LogDensity, x: &[f64], w: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    let scale = |v: &[f64], r: f64| -> Vec<f64> { v.iter().map(|c| r * c).collect() };
    let r0 = norm(x);
    let v0 = scale(x, 1.0 / r0);
    let log_y = level(lp, x, rng);
    let v_perp = sample_orth_sphere(&v0, rng).unwrap();
    let mut theta = TAU * uniform(rng);
    let u = uniform(rng);

    let circle = |th: f64| -> Vec<f64> {
        let (s, c) = th.sin_cos();
        v0.iter().zip(&v_perp).map(|(a, b)| c * a + s * b).collect()
    };
    let (mut lo, mut hi) = (theta - TAU, theta);
    while lp(&scale(&circle(theta), r0)) <= log_y {
        if theta < 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        theta = lo + (hi - lo) * uniform(rng);
    }
    let v = circle(theta);

    let mut r_min = (r0 - u * w).max(0.0);
    let mut r_max = r0 + (1.0 - u) * w;
    while r_min > 0.0 && lp(&scale(&v, r_min)) > log_y {
        r_min = (r_min - w).max(0.0);
    }
    while lp(&scale(&v, r_max)) > log_y {
        r_max += w;
    }
    let mut r = r_min + (r_max - r_min) * uniform(rng);
    while lp(&scale(&v, r)) <= log_y {
        if r < r0 {
            r_min = r;
        } else {
            r_max = r;
        }
        r = r_min + (r_max - r_min) * uniform(rng);
    }
    scale(&v, r)
}
