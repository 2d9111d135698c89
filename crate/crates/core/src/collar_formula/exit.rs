use serde::Serialize;

use super::profile::{loop_profile, LoopProfile, LoopSample};
use super::{check_map, sphere, CollarConfig};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::mapexpr::VectorMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExitPiece {
    /// An endpoint of a one-dimensional domain.
    Point {
        component: usize,
        at: Vec<f64>,
        collar: f64,
    },
    /// Open arc `(start, end)` of loop parameters; `end` may exceed the
    /// period when the arc wraps.
    Arc {
        component: usize,
        start: f64,
        end: f64,
        whole_loop: bool,
        /// Smallest sampled collar parameter of `f` inside the arc.
        min_collar: f64,
    },
    /// Cube-face chart rectangle of a boundary sphere on which `f` is
    /// certified to leave `M`.
    Patch {
        component: usize,
        face: usize,
        lower: [f64; 2],
        upper: [f64; 2],
        min_collar: f64,
    },
}

/// The exit set `∂₋M = {x in ∂M : f(x) not in M}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitSet {
    pub dim: usize,
    pub pieces: Vec<ExitPiece>,
    /// Certified `f(x) ∉ M` on all of `∂M`.
    pub covers_boundary: bool,
    /// Certified `f(x) ∈ int M` on all of `∂M`.
    pub empty: bool,
    /// Every piece has a positive collar margin at its samples.
    pub open: bool,
}

/// A maximal exit arc of one loop with its samples, endpoints included.
pub(crate) struct ArcSamples {
    pub component: usize,
    pub whole: bool,
    /// Parameters are unwrapped so they increase along the arc; for whole
    /// loops the last sample repeats the first one period later.
    pub samples: Vec<LoopSample>,
}

pub(crate) fn loop_arcs(f: &dyn VectorMap, d: &Domain, p: &LoopProfile) -> Result<Vec<ArcSamples>> {
    let n = p.samples.len();
    let period = p.period();
    let comp = p.boundary.component;
    let positive: Vec<bool> = p.samples.iter().map(|s| s.t > 0.0).collect();
    if positive.iter().all(|&b| b) {
        let mut samples = p.samples.clone();
        let mut last = samples[0].clone();
        last.s += period;
        samples.push(last);
        return Ok(vec![ArcSamples {
            component: comp,
            whole: true,
            samples,
        }]);
    }
    let mut arcs = Vec::new();
    for i in 0..n {
        let next = (i + 1) % n;
        if positive[i] || !positive[next] {
            continue;
        }
        // arc starts between sample i (inside) and i + 1 (outside)
        let s_in = p.samples[i].s;
        let s_out = s_in + p.step;
        let start = p.bisect_exit(f, d, s_in, s_out)?;
        let mut samples = vec![start];
        let mut k = next;
        let mut offset = if next == 0 { period } else { 0.0 };
        while positive[k] {
            let mut s = p.samples[k].clone();
            s.s += offset;
            samples.push(s);
            k = (k + 1) % n;
            if k == 0 {
                offset += period;
            }
        }
        let last = samples.last().unwrap().s;
        let end = p.bisect_exit(f, d, last + p.step, last)?;
        samples.push(end);
        arcs.push(ArcSamples {
            component: comp,
            whole: false,
            samples,
        });
    }
    Ok(arcs)
}

fn exit_of_profile(
    f: &dyn VectorMap,
    d: &Domain,
    p: &LoopProfile,
) -> Result<(Vec<ExitPiece>, bool, bool)> {
    // collar parameter varies by at most lip h / (2w) between samples
    let slack = p.lipschitz * p.step / (2.0 * d.collar_width());
    let covers = p.samples.iter().all(|s| s.t > slack);
    let empty = p.samples.iter().all(|s| s.t < -slack);
    let mut pieces = Vec::new();
    for a in loop_arcs(f, d, p)? {
        let inner = if a.whole {
            &a.samples[..]
        } else {
            &a.samples[1..a.samples.len() - 1]
        };
        let min_collar = inner.iter().map(|s| s.t).fold(f64::INFINITY, f64::min);
        pieces.push(ExitPiece::Arc {
            component: a.component,
            start: a.samples[0].s,
            end: a.samples.last().unwrap().s,
            whole_loop: a.whole,
            min_collar,
        });
    }
    Ok((pieces, covers, empty))
}

/// Computes `∂₋M` chart by chart from the sign of the collar parameter of
/// `f`. Requires `x != f(x)` on `∂M`, which is certified on the way.
pub fn boundary_exit_set(f: &dyn VectorMap, d: &Domain, cfg: &CollarConfig) -> Result<ExitSet> {
    check_map(f, d)?;
    let mut pieces = Vec::new();
    let mut covers = true;
    let mut empty = true;
    match d.dim() {
        1 => {
            for (k, p) in d.boundary_points()?.iter().enumerate() {
                let fx = f.apply(&[*p])?;
                if fx[0] == *p {
                    return Err(Error::Precondition(format!(
                        "f fixes the boundary point {p}"
                    )));
                }
                let t = d.collar_parameter(&fx);
                if t > 1.0 {
                    return Err(Error::Precondition(format!(
                        "f maps the boundary point {p} outside the collar"
                    )));
                }
                if t > 0.0 {
                    empty = false;
                    pieces.push(ExitPiece::Point {
                        component: k,
                        at: vec![*p],
                        collar: t,
                    });
                } else {
                    covers = false;
                }
            }
        }
        2 => {
            for l in d.boundary_loops()? {
                let p = loop_profile(f, d, &l, cfg)?;
                let (ps, c, e) = exit_of_profile(f, d, &p)?;
                pieces.extend(ps);
                covers &= c;
                empty &= e;
            }
        }
        3 => {
            for comp in d.sphere_components()? {
                let (ps, c, e) = sphere::exit_patches(f, d, &comp, cfg)?;
                pieces.extend(ps);
                covers &= c;
                empty &= e;
            }
        }
        n => {
            return Err(Error::Unsupported(format!(
                "exit sets of {n}-dimensional domains"
            )))
        }
    }
    let open = pieces.iter().all(|p| match p {
        ExitPiece::Point { collar, .. } => *collar > 0.0,
        ExitPiece::Arc { min_collar, .. } | ExitPiece::Patch { min_collar, .. } => {
            *min_collar > 0.0
        }
    });
    Ok(ExitSet {
        dim: d.dim(),
        pieces,
        covers_boundary: covers,
        empty,
        open,
    })
}
