//! Consequences of the collar index formula, each checked with
//! independently computed sides.

use serde::Serialize;

use super::boundary::loop_self_degree;
use super::{
    band_depth, band_index, boundary_exit_set, boundary_index, certify_image_in_collar, check_map,
    interior_index, lefschetz_of_retracted, retracted, CollarConfig, Outcome,
};
use crate::degree::{dist, norm, winding_degree, WindingBudget};
use crate::domains::{sphere_degree_about, Domain, Shape};
use crate::error::{Error, Result};
use crate::homology::SimplicialComplex;
use crate::mapexpr::VectorMap;

/// Which half of the ball statement applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallCase {
    /// `f(S^(n-1)) ⊂ D^n`: `f` has a fixed point.
    ImageInside,
    /// `f(S^(n-1))` misses `D^n`: `I(f) = (-1)^n deg(rf|S^(n-1))`.
    ImageOutside,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallBoundaryDegree {
    pub case: BallCase,
    pub i_f: i64,
    /// Degree of `rf` on the boundary sphere (outside case only).
    pub sphere_degree: Option<i64>,
    /// `(-1)^n deg(rf|S^(n-1))`.
    pub predicted: Option<i64>,
    pub fixed_points_found: usize,
    pub outcome: Outcome,
}

/// On a ball `D^n`: when `f` pushes the whole boundary sphere out, compares
/// `I(f)` with `(-1)^n deg(rf|S^(n-1))`; when `f` maps the sphere into the
/// interior, checks that a fixed point is located.
pub fn verify_ball_boundary_degree(
    f: &dyn VectorMap,
    d: &Domain,
    cfg: &CollarConfig,
) -> Result<BallBoundaryDegree> {
    check_map(f, d)?;
    if !matches!(d.shape(), Shape::Ball { .. }) {
        return Err(Error::Invalid(
            "the ball boundary check needs a ball".into(),
        ));
    }
    certify_image_in_collar(f, d, cfg)?;
    let exit = boundary_exit_set(f, d, cfg)?;
    let interior = interior_index(f, d, cfg)?;
    let found = interior.fixed_points.points.len();
    if exit.empty {
        return Ok(BallBoundaryDegree {
            case: BallCase::ImageInside,
            i_f: interior.total,
            sphere_degree: None,
            predicted: None,
            fixed_points_found: found,
            outcome: Outcome::from_holds(found > 0),
        });
    }
    if !exit.covers_boundary {
        return Err(Error::Precondition(
            "f maps part of the boundary sphere inside the ball and part outside".into(),
        ));
    }
    let deg = boundary_sphere_degree(f, d, cfg)?;
    let n = d.dim() as i32;
    let predicted = (-1i64).pow(n as u32) * deg;
    Ok(BallBoundaryDegree {
        case: BallCase::ImageOutside,
        i_f: interior.total,
        sphere_degree: Some(deg),
        predicted: Some(predicted),
        fixed_points_found: found,
        outcome: Outcome::from_holds(predicted == interior.total),
    })
}

/// Degree of `rf` on the boundary sphere of a ball that `f` pushes out
/// everywhere. On `S^0` this is the reduced degree: `1` for the identity,
/// `-1` for the swap and `0` for a constant map.
fn boundary_sphere_degree(f: &dyn VectorMap, d: &Domain, cfg: &CollarConfig) -> Result<i64> {
    let c = d.center();
    match d.dim() {
        1 => {
            let [a, b] = d.boundary_points()?;
            let rf = retracted(f, d, cfg.retraction);
            let fa = rf.apply(&[a])?[0];
            let fb = rf.apply(&[b])?[0];
            let side = |y: f64| (y - 0.5 * (a + b)).signum() as i64;
            Ok((side(fb) - side(fa)) / 2)
        }
        2 => {
            let Shape::Ball { radius, .. } = d.shape() else {
                unreachable!()
            };
            let r = *radius;
            let c = [c[0], c[1]];
            let curve = move |t: f64| {
                let a = std::f64::consts::TAU * t;
                vec![c[0] + r * a.cos(), c[1] + r * a.sin()]
            };
            Ok(winding_degree(f, &curve, c, &WindingBudget::default())?.degree)
        }
        3 => {
            let comp = &d.sphere_components()?[0];
            Ok(sphere_degree_about(f, comp)?.degree)
        }
        n => Err(Error::Unsupported(format!(
            "boundary spheres of {n}-dimensional balls"
        ))),
    }
}

/// `L` of `rf` restricted to `∂M`, for `f` pushing all of `∂M` out of `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryLefschetz {
    pub value: i64,
    /// Degree of `rf` on each boundary component it maps into itself.
    pub component_degrees: Vec<(usize, i64)>,
}

/// `L(rf|∂M)` from the homology of `∂M`: the trace on `H_0` counts the
/// components mapped into themselves and the top trace is the sum of their
/// degrees.
pub fn lefschetz_of_boundary(
    f: &dyn VectorMap,
    d: &Domain,
    cfg: &CollarConfig,
) -> Result<BoundaryLefschetz> {
    check_map(f, d)?;
    let r = cfg.retraction;
    let mut degrees = Vec::new();
    let value = match d.dim() {
        1 => {
            // S^0: the trace on H_0 counts fixed endpoints
            let rf = retracted(f, d, r);
            let tol = 1e-9 * d.diameter();
            let mut fixed = 0;
            for (k, p) in d.boundary_points()?.iter().enumerate() {
                let y = rf.apply(&[*p])?[0];
                if (y - p).abs() <= tol {
                    fixed += 1;
                    degrees.push((k, 1));
                }
            }
            fixed
        }
        2 => {
            let loops = d.boundary_loops()?;
            let mut total = 0;
            for l in &loops {
                if let Some(k) = loop_self_degree(f, d, &loops, l, r, cfg)? {
                    degrees.push((l.component, k));
                    total += 1 - k;
                }
            }
            total
        }
        3 => {
            let rf = retracted(f, d, r);
            let mut total = 0;
            for comp in d.sphere_components()? {
                let probe = comp.point(&[0.0, 0.0, 1.0]);
                if d.sphere_component_of(&rf.apply(&probe)?) != comp.component {
                    continue;
                }
                let k = sphere_degree_about(&rf, &comp)?.degree;
                degrees.push((comp.component, k));
                total += 1 + k;
            }
            total
        }
        n => {
            return Err(Error::Unsupported(format!(
                "boundary Lefschetz numbers of {n}-dimensional domains"
            )))
        }
    };
    Ok(BoundaryLefschetz {
        value,
        component_degrees: degrees,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitEverywhere {
    pub i_f: i64,
    pub l_rf: i64,
    pub l_boundary: BoundaryLefschetz,
    pub outcome: Outcome,
}

/// For `f` pushing every boundary point out of `M`, compares `I(f)` with
/// `L(rf) - L(rf|∂M)`.
pub fn verify_exit_everywhere(
    f: &dyn VectorMap,
    d: &Domain,
    cfg: &CollarConfig,
) -> Result<ExitEverywhere> {
    check_map(f, d)?;
    certify_image_in_collar(f, d, cfg)?;
    let exit = boundary_exit_set(f, d, cfg)?;
    if !exit.covers_boundary {
        return Err(Error::Precondition(
            "f does not push every boundary point out of M".into(),
        ));
    }
    let i_f = interior_index(f, d, cfg)?.total;
    let l_rf = lefschetz_of_retracted(f, d, cfg.retraction)?.value;
    let lb = lefschetz_of_boundary(f, d, cfg)?;
    let holds = i_f == l_rf - lb.value;
    Ok(ExitEverywhere {
        i_f,
        l_rf,
        l_boundary: lb,
        outcome: Outcome::from_holds(holds),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoExit {
    pub i_f: i64,
    pub l_rf: i64,
    pub outcome: Outcome,
}

/// For `f` mapping `∂M` into the interior of `M`, compares `I(f)` with
/// `L(rf)`.
pub fn verify_no_exit(f: &dyn VectorMap, d: &Domain, cfg: &CollarConfig) -> Result<NoExit> {
    check_map(f, d)?;
    certify_image_in_collar(f, d, cfg)?;
    let exit = boundary_exit_set(f, d, cfg)?;
    if !exit.empty {
        return Err(Error::Precondition(
            "f pushes part of the boundary out of M".into(),
        ));
    }
    let i_f = interior_index(f, d, cfg)?.total;
    let l_rf = lefschetz_of_retracted(f, d, cfg.retraction)?.value;
    Ok(NoExit {
        i_f,
        l_rf,
        outcome: Outcome::from_holds(i_f == l_rf),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotopicToInclusion {
    /// Smallest certified gap between the straight-line homotopy from `f`
    /// to the inclusion and the frontier of the collared domain.
    pub homotopy_gap: f64,
    pub euler_characteristic: i64,
    pub i_f: i64,
    pub i_boundary: i64,
    pub l_rf: i64,
    pub outcome: Outcome,
}

/// Certifies that `(1 - s) f + s id` stays in the collared domain, so that
/// `rf` is homotopic to the identity, then checks `I(f) + I(rf|∂₋M) = χ(M)`
/// and `L(rf) = χ(M)` with `χ` taken from a simplicial model of `M`.
pub fn verify_homotopic_to_inclusion(
    f: &dyn VectorMap,
    d: &Domain,
    cfg: &CollarConfig,
) -> Result<HomotopicToInclusion> {
    check_map(f, d)?;
    let collar_gap = certify_image_in_collar(f, d, cfg)?;
    let gap = match d.shape() {
        // the collared domain is convex
        Shape::Ball { .. } | Shape::Box { .. } => collar_gap,
        Shape::Annulus { inner, .. } | Shape::Shell { inner, .. } => {
            certify_segments_avoid_hole(f, d, inner - d.collar_width(), cfg)?
        }
    };
    let chi = SimplicialComplex::model_of(d).euler_characteristic();
    let exit = boundary_exit_set(f, d, cfg)?;
    let i_f = interior_index(f, d, cfg)?.total;
    let i_boundary = boundary_index(f, d, &exit, cfg.retraction, cfg)?.total;
    let l_rf = lefschetz_of_retracted(f, d, cfg.retraction)?.value;
    Ok(HomotopicToInclusion {
        homotopy_gap: gap,
        euler_characteristic: chi,
        i_f,
        i_boundary,
        l_rf,
        outcome: Outcome::from_holds(i_f + i_boundary == chi && l_rf == chi),
    })
}

/// Distance from the origin to the segment `[a, b]`.
fn segment_distance(a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = b.iter().zip(a).map(|(u, v)| u - v).collect();
    let l2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if l2 == 0.0 {
        0.0
    } else {
        (-a.iter().zip(&ab).map(|(u, v)| u * v).sum::<f64>() / l2).clamp(0.0, 1.0)
    };
    let p: Vec<f64> = a.iter().zip(&ab).map(|(u, v)| u + t * v).collect();
    norm(&p)
}

/// Certifies that every segment `[x, f(x)]`, `x in M`, stays outside the
/// ball of radius `hole` about the origin. The distance from the origin to
/// the segment moves by at most `max(|dx|, |df|)`.
fn certify_segments_avoid_hole(
    f: &dyn VectorMap,
    d: &Domain,
    hole: f64,
    cfg: &CollarConfig,
) -> Result<f64> {
    let region = d.interior_region()?;
    let mut res = match d.dim() {
        2 => 48,
        _ => 16,
    };
    for _ in 0..4 {
        let (n, verts) = region.grid_vertices(res);
        let mut pts = Vec::with_capacity(verts.len());
        for v in &verts {
            let y = f.apply(&v.point)?;
            pts.push((v.point.clone(), y));
        }
        let h = region.diameter() / n as f64;
        let mut slope: f64 = 1.0;
        for (i, (x, y)) in pts.iter().enumerate() {
            for (x2, y2) in pts.iter().skip(i + 1).take(2 * d.dim() + 2) {
                let dx = dist(x, x2);
                if dx > 0.0 {
                    slope = slope.max(dist(y, y2) / dx);
                }
            }
        }
        let worst = pts
            .iter()
            .map(|(x, y)| segment_distance(x, y) - hole)
            .fold(f64::INFINITY, f64::min);
        if worst <= 0.0 {
            return Err(Error::Precondition(
                "the straight-line homotopy to the inclusion crosses the hole".into(),
            ));
        }
        let bound = worst - cfg.lipschitz_safety * slope * h;
        if bound > 0.0 {
            return Ok(bound);
        }
        res *= 2;
    }
    Err(Error::Certification(
        "cannot certify that the straight-line homotopy avoids the hole".into(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryNeighborhood {
    /// Depth below `∂M` of the thin neighbourhood.
    pub depth: f64,
    /// Index of `rf` on the thin neighbourhood of `∂M`.
    pub thin_index: i64,
    /// Index of `rf` on the exit set, computed inside `∂M`.
    pub boundary_index: i64,
    pub outcome: Outcome,
}

/// Compares the `n`-dimensional index of `rf` on a thin neighbourhood of
/// `∂M` with the `(n-1)`-dimensional index of `rf` on the exit set.
pub fn verify_boundary_neighborhood(
    f: &dyn VectorMap,
    d: &Domain,
    cfg: &CollarConfig,
) -> Result<BoundaryNeighborhood> {
    check_map(f, d)?;
    certify_image_in_collar(f, d, cfg)?;
    let exit = boundary_exit_set(f, d, cfg)?;
    let b = boundary_index(f, d, &exit, cfg.retraction, cfg)?.total;
    let interior = interior_index(f, d, cfg)?;
    let depth = band_depth(d, &interior.fixed_points.points);
    if !(depth > 0.0) {
        return Err(Error::Certification(
            "fixed points of f come too close to the boundary for a thin neighbourhood".into(),
        ));
    }
    let thin = band_index(f, d, depth, cfg.retraction, cfg)?;
    Ok(BoundaryNeighborhood {
        depth,
        thin_index: thin,
        boundary_index: b,
        outcome: Outcome::from_holds(thin == b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapexpr::{FnMap, MapExpr};

    fn map(src: &str, n: usize) -> MapExpr {
        MapExpr::parse_for_dim(src, n).unwrap()
    }

    fn disk_power(d: u32) -> FnMap<'static> {
        FnMap::new(2, 2, move |x| {
            let (r, t) = (x[0].hypot(x[1]), x[1].atan2(x[0]));
            let (rr, tt) = (2.0 * r.powi(d as i32), d as f64 * t + 0.3);
            Ok(vec![rr * tt.cos(), rr * tt.sin()])
        })
    }

    #[test]
    fn ball_degree_in_each_dimension() {
        let cfg = CollarConfig::default();
        let disk = Domain::unit_ball(2, 1.25).unwrap();
        for k in 1..=5 {
            let r = verify_ball_boundary_degree(&disk_power(k), &disk, &cfg).unwrap();
            assert_eq!((r.i_f, r.predicted), (k as i64, Some(k as i64)));
            assert_eq!(r.outcome, Outcome::Pass);
        }
        let r = verify_ball_boundary_degree(
            &map("2*x1", 1),
            &Domain::unit_ball(1, 1.25).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!((r.i_f, r.sphere_degree), (-1, Some(1)));
        let r = verify_ball_boundary_degree(
            &map("-2*x1", 1),
            &Domain::unit_ball(1, 1.25).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!((r.i_f, r.sphere_degree), (1, Some(-1)));
        let r = verify_ball_boundary_degree(
            &map("2*x1; 2*x2; 2*x3", 3),
            &Domain::unit_ball(3, 1.25).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!((r.i_f, r.predicted), (-1, Some(-1)));
        let small = Domain::ball(vec![0.0, 0.0], 2.0, 1.0).unwrap();
        let r = verify_ball_boundary_degree(&map("x1/2; x2/2", 2), &small, &cfg).unwrap();
        assert_eq!(r.case, BallCase::ImageInside);
        assert_eq!(r.fixed_points_found, 1);
    }

    #[test]
    fn boundary_lefschetz_on_spheres_of_each_dimension() {
        let cfg = CollarConfig::default();
        let r = verify_exit_everywhere(&disk_power(3), &Domain::unit_ball(2, 1.25).unwrap(), &cfg)
            .unwrap();
        assert_eq!((r.i_f, r.l_rf, r.l_boundary.value), (3, 1, -2));
        let r = verify_exit_everywhere(
            &map("2*x1; 2*x2; 2*x3", 3),
            &Domain::unit_ball(3, 1.25).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!((r.i_f, r.l_rf, r.l_boundary.value), (-1, 1, 2));
        let r = verify_exit_everywhere(&map("2*x1", 1), &Domain::unit_ball(1, 1.25).unwrap(), &cfg)
            .unwrap();
        assert_eq!((r.i_f, r.l_rf, r.l_boundary.value), (-1, 1, 2));
    }

    #[test]
    fn exit_everywhere_rejects_partial_exit() {
        let cfg = CollarConfig::default();
        let d = Domain::ball(vec![0.0, 0.0], 2.0, 1.0).unwrap();
        let e = verify_exit_everywhere(&map("x1/2; x2/2", 2), &d, &cfg).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn homotopic_to_inclusion_on_disk_and_annulus() {
        let cfg = CollarConfig::default();
        let d = Domain::ball(vec![0.0, 0.0], 2.0, 1.0).unwrap();
        let r = verify_homotopic_to_inclusion(&map("x1/2; x2/2", 2), &d, &cfg).unwrap();
        assert_eq!(
            (r.euler_characteristic, r.i_f + r.i_boundary, r.l_rf),
            (1, 1, 1)
        );
        let ann = Domain::annulus(1.0, 2.0, 0.75).unwrap();
        let f = FnMap::new(2, 2, |x| {
            let (r, t) = (x[0].hypot(x[1]), x[1].atan2(x[0]) + 0.3);
            Ok(vec![(2.0 * r - 1.5) * t.cos(), (2.0 * r - 1.5) * t.sin()])
        });
        let r = verify_homotopic_to_inclusion(&f, &ann, &cfg).unwrap();
        assert_eq!(
            (r.euler_characteristic, r.i_f + r.i_boundary, r.l_rf),
            (0, 0, 0)
        );
        assert!(r.homotopy_gap > 0.0);
    }

    #[test]
    fn straight_line_homotopy_through_the_hole_is_rejected() {
        let ann = Domain::annulus(1.0, 2.0, 0.75).unwrap();
        let e = verify_homotopic_to_inclusion(&map("-x1; -x2", 2), &ann, &CollarConfig::default())
            .unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn thin_neighbourhood_matches_boundary_index() {
        let cfg = CollarConfig::default();
        let d = Domain::unit_ball(2, 1.25).unwrap();
        for (src, want) in [
            ("2*x1; -2*x2", 2),
            (
                "2*(cos(0.3)*x1 - sin(0.3)*x2); 2*(sin(0.3)*x1 + cos(0.3)*x2)",
                0,
            ),
            ("x1/2; x2/2", 0),
        ] {
            let r = verify_boundary_neighborhood(&map(src, 2), &d, &cfg).unwrap();
            assert_eq!((r.thin_index, r.boundary_index), (want, want), "{src}");
        }
    }
}
