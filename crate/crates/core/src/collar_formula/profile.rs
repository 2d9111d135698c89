use rayon::prelude::*;

use super::CollarConfig;
use crate::degree::dist;
use crate::domains::{BoundaryLoop, Domain, LoopGeometry};
use crate::error::{Error, Result};
use crate::mapexpr::VectorMap;

#[derive(Debug, Clone)]
pub(crate) struct LoopSample {
    pub s: f64,
    pub x: Vec<f64>,
    pub fx: Vec<f64>,
    /// Collar parameter of `f(x)`: positive when `f` pushes `x` out of `M`.
    pub t: f64,
    pub displacement: f64,
}

/// Uniform samples of `f` along one boundary loop, fine enough that
/// `x != f(x)` on the whole loop and that every point where `rf` can have a
/// fixed point lies next to a sample with `t > 0`.
pub(crate) struct LoopProfile {
    pub boundary: BoundaryLoop,
    pub samples: Vec<LoopSample>,
    pub step: f64,
    /// Sampled Lipschitz bound of `s -> f(loop(s))`.
    pub lipschitz: f64,
}

fn speed(l: &BoundaryLoop) -> f64 {
    match &l.geometry {
        LoopGeometry::Circle { radius, .. } => *radius,
        LoopGeometry::Rectangle { .. } => 1.0,
    }
}

pub(crate) fn sample_at(
    f: &dyn VectorMap,
    d: &Domain,
    l: &BoundaryLoop,
    s: f64,
) -> Result<LoopSample> {
    let x = l.point(s).to_vec();
    let fx = f.apply(&x)?;
    Ok(LoopSample {
        s,
        t: d.collar_parameter(&fx),
        displacement: dist(&x, &fx),
        x,
        fx,
    })
}

pub(crate) fn loop_profile(
    f: &dyn VectorMap,
    d: &Domain,
    l: &BoundaryLoop,
    cfg: &CollarConfig,
) -> Result<LoopProfile> {
    let period = l.period();
    let mut n = cfg.loop_samples.max(16);
    loop {
        let step = period / n as f64;
        let samples: Vec<LoopSample> = (0..n)
            .into_par_iter()
            .map(|i| sample_at(f, d, l, i as f64 * step))
            .collect::<Result<_>>()?;
        let mut slope: f64 = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            slope = slope.max(dist(&samples[i].fx, &samples[j].fx) / step);
        }
        let lip = cfg.lipschitz_safety * slope;
        // between samples the displacement drops by at most (speed + lip) h/2
        // and dist(f(x), M) rises by at most lip h/2 above its sampled value
        let need = (speed(l) + 2.0 * lip) * 0.5 * step;
        let worst = samples
            .iter()
            .map(|p| p.displacement - need)
            .fold(f64::INFINITY, f64::min);
        if worst > 0.0 {
            return Ok(LoopProfile {
                boundary: l.clone(),
                samples,
                step,
                lipschitz: lip,
            });
        }
        if 2 * n > cfg.max_loop_samples {
            let p = samples
                .iter()
                .min_by(|a, b| a.displacement.partial_cmp(&b.displacement).unwrap())
                .unwrap();
            return Err(Error::Certification(format!(
                "cannot certify that f has no fixed point on the boundary near {:?} (|x - f(x)| = {:e})",
                p.x, p.displacement
            )));
        }
        n *= 2;
    }
}

impl LoopProfile {
    /// Locates the parameter in `(a, b)` where the collar parameter of `f`
    /// changes sign, returning the point on the positive side.
    pub fn bisect_exit(
        &self,
        f: &dyn VectorMap,
        d: &Domain,
        inside: f64,
        outside: f64,
    ) -> Result<LoopSample> {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if sample_at(f, d, &self.boundary, m)?.t > 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        sample_at(f, d, &self.boundary, b)
    }

    pub fn period(&self) -> f64 {
        self.boundary.period()
    }
}
