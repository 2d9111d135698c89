//! The boundary form of the Poincaré–Hopf theorem for planar vector fields:
//! `Ind(V) + Ind(∂₋V) = χ(M)`, where `∂₋V` is the tangential part of `V` on
//! the set of boundary points where `V` points into `M`.

use serde::Serialize;

use super::{check_map, CollarConfig, Outcome};
use crate::degree::{pl_degree, DegreeCertificate, PlBudget};
use crate::domains::{BoundaryLoop, Domain, LoopGeometry};
use crate::error::{Error, Result};
use crate::homology::SimplicialComplex;
use crate::mapexpr::VectorMap;

/// A maximal boundary arc on which `V` points into `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InwardArc {
    pub component: usize,
    pub start: f64,
    pub end: f64,
    pub whole_loop: bool,
    /// Sum of the indices of the zeros of the tangential field on the arc.
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseReport {
    pub ind_v: i64,
    pub ind_boundary: i64,
    pub euler_characteristic: i64,
    pub inward_arcs: Vec<InwardArc>,
    pub certificate: DegreeCertificate,
    pub outcome: Outcome,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[derive(Clone, Copy)]
struct Split {
    s: f64,
    /// Normal component, negative where `V` points inward.
    normal: f64,
    tangential: f64,
}

fn split(v: &dyn VectorMap, l: &BoundaryLoop, s: f64) -> Result<Split> {
    let x = l.point(s);
    let y = v.apply(&x)?;
    Ok(Split {
        s,
        normal: dot(&y, &l.outward_normal(s)),
        tangential: dot(&y, &l.tangent(s)),
    })
}

/// Samples of `V` along a loop, fine enough that `V != 0` on the loop and
/// that any inward arc missed between two samples has a tangential field of
/// constant sign.
fn loop_samples(
    v: &dyn VectorMap,
    l: &BoundaryLoop,
    cfg: &CollarConfig,
) -> Result<(Vec<Split>, f64)> {
    let p = l.period();
    let mut n = cfg.loop_samples.max(16);
    loop {
        let h = p / n as f64;
        let samples: Vec<Split> = (0..n)
            .map(|i| split(v, l, i as f64 * h))
            .collect::<Result<_>>()?;
        let mut lip_n: f64 = 0.0;
        let mut lip_t: f64 = 0.0;
        let mut lip_v: f64 = 0.0;
        for i in 0..n {
            let (a, b) = (samples[i], samples[(i + 1) % n]);
            lip_n = lip_n.max((a.normal - b.normal).abs() / h);
            lip_t = lip_t.max((a.tangential - b.tangential).abs() / h);
            lip_v =
                lip_v.max((a.normal.hypot(a.tangential) - b.normal.hypot(b.tangential)).abs() / h);
        }
        let k = cfg.lipschitz_safety;
        let (lip_n, lip_t) = (k * lip_n, k * lip_t);
        let lip_v = k * lip_v.max(lip_n).max(lip_t);
        let mut ok = true;
        for i in 0..n {
            let (a, b) = (samples[i], samples[(i + 1) % n]);
            let size = |s: &Split| s.normal.hypot(s.tangential);
            if size(&a).min(size(&b)) <= lip_v * h {
                ok = false;
                break;
            }
            let same_side = (a.normal < 0.0) == (b.normal < 0.0);
            let separated = a.normal.abs() + b.normal.abs() > lip_n * h;
            let steady = a.tangential.abs().min(b.tangential.abs()) > lip_t * h;
            if same_side && !separated && !steady {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok((samples, h));
        }
        if 2 * n > cfg.max_loop_samples {
            return Err(Error::Certification(format!(
                "cannot resolve the inward set of V on boundary component {}",
                l.component
            )));
        }
        n *= 2;
    }
}

/// Parameter in `(inside, outside)` where the normal component changes sign.
fn bisect(v: &dyn VectorMap, l: &BoundaryLoop, inward: f64, outward: f64) -> Result<Split> {
    let (mut a, mut b) = (inward, outward);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if split(v, l, m)?.normal < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    split(v, l, 0.5 * (a + b))
}

fn sign(x: f64) -> i64 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

fn inward_arcs(v: &dyn VectorMap, l: &BoundaryLoop, cfg: &CollarConfig) -> Result<Vec<InwardArc>> {
    let (samples, h) = loop_samples(v, l, cfg)?;
    let n = samples.len();
    let scale = samples
        .iter()
        .map(|s| s.normal.hypot(s.tangential))
        .fold(0.0, f64::max);
    let vanishing = 1e-9 * scale;
    let inward: Vec<bool> = samples.iter().map(|s| s.normal < 0.0).collect();
    if inward.iter().all(|&b| b) {
        if samples.iter().all(|s| s.tangential.abs() <= vanishing) {
            return Err(Error::Degenerate(format!(
                "the tangential part of V vanishes on all of boundary component {}",
                l.component
            )));
        }
        // a vector field on a circle has total index 0
        return Ok(vec![InwardArc {
            component: l.component,
            start: 0.0,
            end: l.period(),
            whole_loop: true,
            index: 0,
        }]);
    }
    let mut arcs = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        if inward[i] || !inward[j] {
            continue;
        }
        let start = bisect(v, l, samples[i].s + h, samples[i].s)?;
        // parameters are unwrapped so they increase along the arc
        let mut offset = if j == 0 { l.period() } else { 0.0 };
        let mut k = j;
        let mut last = (j, offset);
        let mut interior = Vec::new();
        while inward[k] {
            interior.push(samples[k]);
            last = (k, offset);
            k = (k + 1) % n;
            if k == 0 {
                offset += l.period();
            }
        }
        let (last, last_offset) = last;
        let end = bisect(v, l, samples[last].s, samples[last].s + h)?;
        if interior.iter().all(|s| s.tangential.abs() <= vanishing) {
            return Err(Error::Degenerate(format!(
                "the tangential part of V vanishes along an inward arc of boundary component {}",
                l.component
            )));
        }
        if start.tangential.abs() <= vanishing || end.tangential.abs() <= vanishing {
            return Err(Error::Degenerate(
                "the tangential part of V vanishes at an end of an inward arc".into(),
            ));
        }
        arcs.push(InwardArc {
            component: l.component,
            start: start.s,
            end: end.s + last_offset,
            whole_loop: false,
            index: (sign(end.tangential) - sign(start.tangential)) / 2,
        });
    }
    Ok(arcs)
}

/// Checks `Ind(V) + Ind(∂₋V) = χ(M)` for a planar vector field `v` without
/// zeros on the boundary of a round planar domain.
pub fn verify_morse_formula(
    v: &dyn VectorMap,
    d: &Domain,
    cfg: &CollarConfig,
) -> Result<MorseReport> {
    check_map(v, d)?;
    if d.dim() != 2 {
        return Err(Error::Unsupported(
            "the vector field formula is checked on planar domains".into(),
        ));
    }
    let loops = d.boundary_loops()?;
    if loops
        .iter()
        .any(|l| !matches!(l.geometry, LoopGeometry::Circle { .. }))
    {
        return Err(Error::Unsupported(
            "the vector field formula needs a smooth boundary; boxes have corners".into(),
        ));
    }
    let mut arcs = Vec::new();
    for l in &loops {
        arcs.extend(inward_arcs(v, l, cfg)?);
    }
    let region = d.interior_region()?;
    let budget = PlBudget {
        margin: cfg.index.relative_margin * region.diameter(),
        ..cfg.index.degree.clone()
    };
    let cert = pl_degree(v, &region, &[0.0, 0.0], &budget)?;
    let ind_boundary = arcs.iter().map(|a| a.index).sum();
    let chi = SimplicialComplex::model_of(d).euler_characteristic();
    Ok(MorseReport {
        ind_v: cert.degree,
        ind_boundary,
        euler_characteristic: chi,
        inward_arcs: arcs,
        outcome: Outcome::from_holds(cert.degree + ind_boundary == chi),
        certificate: cert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapexpr::MapExpr;

    fn field(src: &str) -> MapExpr {
        MapExpr::parse_for_dim(src, 2).unwrap()
    }

    #[test]
    fn outward_radial_field() {
        let d = Domain::ball(vec![0.0, 0.0], 2.0, 1.0).unwrap();
        let r = verify_morse_formula(&field("x1; x2"), &d, &CollarConfig::default()).unwrap();
        assert_eq!((r.ind_v, r.ind_boundary, r.euler_characteristic), (1, 0, 1));
        assert!(r.inward_arcs.is_empty());
    }

    #[test]
    fn constant_field_has_one_tangential_zero() {
        let d = Domain::ball(vec![0.0, 0.0], 2.0, 1.0).unwrap();
        let r = verify_morse_formula(&field("1; 0"), &d, &CollarConfig::default()).unwrap();
        assert_eq!((r.ind_v, r.ind_boundary), (0, 1));
        let arc = &r.inward_arcs[0];
        assert!((arc.start - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!((arc.end - 1.5 * std::f64::consts::PI).abs() < 1e-9);
        assert_eq!(r.outcome, Outcome::Pass);
    }

    #[test]
    fn rotated_constant_field_wraps_past_zero() {
        let d = Domain::ball(vec![0.0, 0.0], 1.0, 1.0).unwrap();
        let r = verify_morse_formula(&field("-1; -0.2"), &d, &CollarConfig::default()).unwrap();
        assert_eq!((r.ind_v, r.ind_boundary), (0, 1));
        assert!(r.inward_arcs[0].end > std::f64::consts::TAU);
    }

    #[test]
    fn radial_field_on_annulus_is_degenerate() {
        let d = Domain::annulus(1.0, 2.0, 0.5).unwrap();
        let e = verify_morse_formula(&field("x1; x2"), &d, &CollarConfig::default()).unwrap_err();
        assert!(matches!(e, Error::Degenerate(_)));
        assert!(e.is_inconclusive());
    }

    #[test]
    fn boxes_are_unsupported() {
        let d = Domain::cuboid(vec![-1.0, -1.0], vec![1.0, 1.0], 0.5).unwrap();
        let e = verify_morse_formula(&field("1; 0"), &d, &CollarConfig::default()).unwrap_err();
        assert!(matches!(e, Error::Unsupported(_)));
    }
}
