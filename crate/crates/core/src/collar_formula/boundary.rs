use serde::Serialize;

use super::exit::{loop_arcs, ExitPiece, ExitSet};
use super::profile::loop_profile;
use super::{check_map, sphere, CollarConfig};
use crate::degree::dist;
use crate::domains::{BoundaryLoop, Domain, Retraction};
use crate::error::{Error, Result};
use crate::mapexpr::VectorMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFixedPoint {
    pub component: usize,
    pub location: Vec<f64>,
    pub local_index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryIndex {
    pub total: i64,
    pub fixed_points: Vec<BoundaryFixedPoint>,
}

/// Index of `rf` restricted to the exit set, computed inside `∂M`.
///
/// Every fixed point of `rf` on `∂M` lies in the exit set, because `rf = f`
/// wherever `f` stays in `M` and `f` has no fixed points on `∂M`. So the
/// index is found from all of `∂M` without tracking the exit set's edges
/// exactly: endpoints for `n = 1`, the lift of `rf` along each exit arc for
/// `n = 2`, and cube-face charts on boundary spheres for `n = 3`.
pub fn boundary_index(
    f: &dyn VectorMap,
    d: &Domain,
    e: &ExitSet,
    r: Retraction,
    cfg: &CollarConfig,
) -> Result<BoundaryIndex> {
    check_map(f, d)?;
    match d.dim() {
        1 => endpoint_index(f, d, e, r),
        2 => {
            let mut total = 0;
            let mut points = Vec::new();
            let loops = d.boundary_loops()?;
            for l in &loops {
                let (t, p) = loop_index(f, d, &loops, l, r, cfg)?;
                total += t;
                points.extend(p);
            }
            Ok(BoundaryIndex {
                total,
                fixed_points: points,
            })
        }
        3 => {
            let mut total = 0;
            let mut points = Vec::new();
            for comp in d.sphere_components()? {
                let (t, p) = sphere::sphere_boundary_index(f, d, &comp, r, cfg)?;
                total += t;
                points.extend(p);
            }
            Ok(BoundaryIndex {
                total,
                fixed_points: points,
            })
        }
        n => Err(Error::Unsupported(format!(
            "boundary indices of {n}-dimensional domains"
        ))),
    }
}

/// On `∂M = {a, b}` a fixed point of `rf` is an exit endpoint mapped back
/// to itself; each has index `1`.
fn endpoint_index(
    f: &dyn VectorMap,
    d: &Domain,
    e: &ExitSet,
    r: Retraction,
) -> Result<BoundaryIndex> {
    let tol = 1e-9 * d.diameter();
    let mut points = Vec::new();
    for piece in &e.pieces {
        let ExitPiece::Point { component, at, .. } = piece else {
            return Err(Error::Internal(
                "exit set of a 1-dimensional domain has a non-point piece".into(),
            ));
        };
        let y = d.retract_with(&f.apply(at)?, r)?;
        let gap = dist(&y, at);
        if gap <= tol {
            points.push(BoundaryFixedPoint {
                component: *component,
                location: at.clone(),
                local_index: 1,
            });
        } else if gap < 0.5 * d.diameter() {
            return Err(Error::Internal(format!(
                "rf sends the endpoint {at:?} to {y:?}, which is not an endpoint"
            )));
        }
    }
    Ok(BoundaryIndex {
        total: points.len() as i64,
        fixed_points: points,
    })
}

/// Representative of `x` modulo `p` in `(-p/2, p/2]`.
fn wrap(x: f64, p: f64) -> f64 {
    let y = x.rem_euclid(p);
    if y > 0.5 * p {
        y - p
    } else {
        y
    }
}

struct Lifted {
    s: f64,
    /// Continuous lift of the loop parameter of `rf(x(s))`.
    g: f64,
}

impl Lifted {
    fn phi(&self) -> f64 {
        self.s - self.g
    }
}

struct LoopMap<'a> {
    f: &'a dyn VectorMap,
    d: &'a Domain,
    l: &'a BoundaryLoop,
    loops: &'a [BoundaryLoop],
    r: Retraction,
}

impl LoopMap<'_> {
    /// Loop component and parameter of `rf(x(s))`.
    fn image(&self, s: f64) -> Result<(usize, f64)> {
        let x = self.l.point(s);
        let y = self.d.retract_with(&self.f.apply(&x)?, self.r)?;
        let (i, g) = self.d.locate_on_loops(self.loops, &y);
        Ok((self.loops[i].component, g))
    }

    fn lift_next(&self, prev: &Lifted, s: f64, g: f64) -> Lifted {
        let p = self.l.period();
        Lifted {
            s,
            g: prev.g + wrap(g - prev.g, p),
        }
    }

    /// Appends lifted samples on `(a.s, s_b]`, subdividing until each step of
    /// the image parameter is under an eighth of the period.
    fn extend(&self, out: &mut Vec<Lifted>, s_b: f64, g_b: f64, depth: u32) -> Result<()> {
        let p = self.l.period();
        let a = out.last().unwrap();
        if wrap(g_b - a.g, p).abs() < p / 8.0 {
            let next = self.lift_next(a, s_b, g_b);
            out.push(next);
            return Ok(());
        }
        if depth > 40 {
            return Err(Error::Budget(
                "image of the boundary loop moves too fast to lift".into(),
            ));
        }
        let m = 0.5 * (a.s + s_b);
        let (_, g_m) = self.image(m)?;
        self.extend(out, m, g_m, depth + 1)?;
        self.extend(out, s_b, g_b, depth + 1)
    }

    /// Locates the crossing of `phi` through `k p` in `(a, b)`.
    fn locate(&self, a: &Lifted, b: &Lifted, k: f64) -> Result<f64> {
        let p = self.l.period();
        let (mut lo, mut hi) = (a.s, b.s);
        let side = |x: &Lifted| x.phi() > k * p;
        let lo_side = side(a);
        let mut g_lo = a.g;
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if m == lo || m == hi {
                break;
            }
            let (_, g) = self.image(m)?;
            let lm = Lifted {
                s: m,
                g: g_lo + wrap(g - g_lo, p),
            };
            if side(&lm) == lo_side {
                lo = m;
                g_lo = lm.g;
            } else {
                hi = m;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn loop_index(
    f: &dyn VectorMap,
    d: &Domain,
    loops: &[BoundaryLoop],
    l: &BoundaryLoop,
    r: Retraction,
    cfg: &CollarConfig,
) -> Result<(i64, Vec<BoundaryFixedPoint>)> {
    let profile = loop_profile(f, d, l, cfg)?;
    let lm = LoopMap { f, d, l, loops, r };
    let p = l.period();
    let mut total = 0;
    let mut points = Vec::new();
    for arc in loop_arcs(f, d, &profile)? {
        let mut comps = Vec::with_capacity(arc.samples.len());
        let mut params = Vec::with_capacity(arc.samples.len());
        for s in &arc.samples {
            let (c, g) = lm.image(s.s)?;
            comps.push(c);
            params.push(g);
        }
        let inner = if arc.whole {
            &comps[..]
        } else {
            &comps[1..comps.len() - 1]
        };
        if inner.iter().all(|&c| c != l.component) {
            // the arc is pushed towards another boundary component
            continue;
        }
        if inner.iter().any(|&c| c != l.component) {
            return Err(Error::Internal(
                "an exit arc is retracted onto two boundary components".into(),
            ));
        }
        let mut lifted = vec![Lifted {
            s: arc.samples[0].s,
            g: params[0],
        }];
        for (s, g) in arc.samples.iter().zip(&params).skip(1) {
            lm.extend(&mut lifted, s.s, *g, 0)?;
        }
        let near_fixed = |x: &Lifted| wrap(x.phi(), p).abs() < 1e-9 * p;
        if lifted
            .windows(2)
            .any(|w| near_fixed(&w[0]) && near_fixed(&w[1]))
        {
            return Err(Error::Degenerate(format!(
                "rf fixes a whole arc of boundary component {}",
                l.component
            )));
        }
        let first = lifted.first().unwrap();
        let last = lifted.last().unwrap();
        let arc_index = if arc.whole {
            let m = (last.phi() - first.phi()) / p;
            let k = m.round();
            if (m - k).abs() > 1e-6 {
                return Err(Error::Internal(format!(
                    "lift around a closed loop is not periodic ({m})"
                )));
            }
            k as i64
        } else {
            ((last.phi() / p).floor() - (first.phi() / p).floor()) as i64
        };
        for w in lifted.windows(2) {
            let (ka, kb) = ((w[0].phi() / p).floor(), (w[1].phi() / p).floor());
            if ka == kb {
                continue;
            }
            let (k, idx) = if kb > ka { (kb, 1) } else { (ka, -1) };
            let s = lm.locate(&w[0], &w[1], k)?;
            let x = l.point(s).to_vec();
            points.push(BoundaryFixedPoint {
                component: l.component,
                location: x,
                local_index: idx * (kb - ka).abs() as i64,
            });
        }
        total += arc_index;
    }
    Ok((total, points))
}

/// Degree of `rf` on the loop `l` when `rf` maps `l` into itself, `None`
/// when it maps `l` onto another boundary component.
pub(crate) fn loop_self_degree(
    f: &dyn VectorMap,
    d: &Domain,
    loops: &[BoundaryLoop],
    l: &BoundaryLoop,
    r: Retraction,
    cfg: &CollarConfig,
) -> Result<Option<i64>> {
    let lm = LoopMap { f, d, l, loops, r };
    let p = l.period();
    let n = cfg.loop_samples.max(16);
    let mut comps = Vec::with_capacity(n);
    let mut lifted: Vec<Lifted> = Vec::new();
    for i in 0..=n {
        let s = p * i as f64 / n as f64;
        let (c, g) = lm.image(s)?;
        comps.push(c);
        if lifted.is_empty() {
            lifted.push(Lifted { s, g });
        } else {
            lm.extend(&mut lifted, s, g, 0)?;
        }
    }
    if comps.iter().all(|&c| c != l.component) {
        return Ok(None);
    }
    if comps.iter().any(|&c| c != l.component) {
        return Err(Error::Certification(format!(
            "rf does not map boundary component {} into a single component",
            l.component
        )));
    }
    let m = (lifted.last().unwrap().g - lifted[0].g) / p;
    let k = m.round();
    if (m - k).abs() > 1e-6 {
        return Err(Error::Internal(format!(
            "lift around a closed loop is not periodic ({m})"
        )));
    }
    Ok(Some(k as i64))
}
