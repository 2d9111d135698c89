//! The collar index formula `I(f) + I(rf | ∂₋M) = L(rf)` for maps
//! `f: M -> M'`, where `M'` is `M` with its collar attached, `r: M' -> M`
//! collapses the collar and `∂₋M` is the set of boundary points that `f`
//! pushes out of `M`.
//!
//! [`verify_theorem`] computes the three terms independently: `I(f)` by the
//! PL degree of `id - f` on the interior, the boundary term inside `∂M`
//! (endpoint count, loop lifts, sphere charts), and `L(rf)` from the
//! homology of `M`. It also cross-checks `L(rf)` as the index of `rfr` on a
//! neighbourhood of `M`, split into an interior part and a thin band along
//! the boundary.

mod boundary;
mod checks;
mod exit;
mod morse;
mod profile;
mod sphere;

use serde::Serialize;

pub use boundary::{boundary_index, BoundaryFixedPoint, BoundaryIndex};
pub use checks::{
    verify_ball_boundary_degree, verify_boundary_neighborhood, verify_exit_everywhere,
    verify_homotopic_to_inclusion, verify_no_exit, BallBoundaryDegree, BoundaryNeighborhood,
    ExitEverywhere, HomotopicToInclusion, NoExit,
};
pub use exit::{boundary_exit_set, ExitPiece, ExitSet};
pub use morse::{verify_morse_formula, MorseReport};

use crate::degree::{norm, DegreeCertificate, GriddedRegion};
use crate::domains::{homology_recipe, Domain, Retraction, Shape};
use crate::error::{Error, Result};
use crate::fpindex::{self, FixedPoint, IndexConfig, Region};
use crate::mapexpr::{EvalError, FnMap, VectorMap};

/// Verdict of a verification. `Fail` is only ever reported when every
/// certification succeeded and an identity is violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn from_holds(holds: bool) -> Outcome {
        if holds {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug, Clone)]
pub struct CollarConfig {
    pub index: IndexConfig,
    /// Initial number of samples per boundary loop.
    pub loop_samples: usize,
    pub max_loop_samples: usize,
    /// Seed grid per cube face on boundary spheres.
    pub sphere_resolution: usize,
    /// Subdivision depth when certifying on boundary spheres.
    pub sphere_depth: u32,
    pub lipschitz_safety: f64,
    pub retraction: Retraction,
    /// Recompute the boundary term and `L` with the built-in alternate
    /// retractions.
    pub check_alternates: bool,
    /// Cross-check `L(rf)` as an index of `rfr` and split it into an
    /// interior and a boundary-band part.
    pub decomposition: bool,
}

impl Default for CollarConfig {
    fn default() -> Self {
        CollarConfig {
            index: IndexConfig::default(),
            loop_samples: 256,
            max_loop_samples: 1 << 16,
            sphere_resolution: 24,
            sphere_depth: 9,
            lipschitz_safety: 2.0,
            retraction: Retraction::Standard,
            check_alternates: true,
            decomposition: true,
        }
    }
}

/// `x -> r(f(x))` for the given retraction.
pub fn retracted<'a>(f: &'a dyn VectorMap, d: &'a Domain, r: Retraction) -> FnMap<'a> {
    FnMap::new(f.dim_in(), d.dim(), move |x| {
        let y = f.apply(x)?;
        d.retract_with(&y, r)
            .map_err(|e| EvalError::Domain(e.to_string()))
    })
}

/// `x -> r(f(r(x)))`, a self-map of `M'` with image in `M`.
pub fn retracted_both<'a>(f: &'a dyn VectorMap, d: &'a Domain, r: Retraction) -> FnMap<'a> {
    FnMap::new(d.dim(), d.dim(), move |x| {
        let rx = d
            .retract_with(x, r)
            .map_err(|e| EvalError::Domain(e.to_string()))?;
        let y = f.apply(&rx)?;
        d.retract_with(&y, r)
            .map_err(|e| EvalError::Domain(e.to_string()))
    })
}

fn check_map(f: &dyn VectorMap, d: &Domain) -> Result<()> {
    let n = d.dim();
    if f.dim_in() != n || f.dim_out() != n {
        return Err(Error::Invalid(format!(
            "map R^{} -> R^{} does not match a domain in R^{n}",
            f.dim_in(),
            f.dim_out()
        )));
    }
    Ok(())
}

/// Certifies `f(M) ⊂ M'` on a lattice of `M` with a sampled Lipschitz
/// bound. Returns the smallest certified gap to the outer edge of the
/// collar.
pub fn certify_image_in_collar(f: &dyn VectorMap, d: &Domain, cfg: &CollarConfig) -> Result<f64> {
    check_map(f, d)?;
    let region = d.interior_region()?;
    let w = d.collar_width();
    let mut res = match d.dim() {
        1 => 256,
        2 => 48,
        3 => 16,
        _ => 6,
    };
    for _ in 0..4 {
        let (n, verts) = region.grid_vertices(res);
        let mut pts = Vec::with_capacity(verts.len());
        for v in &verts {
            let y = f.apply(&v.point)?;
            pts.push((v.point.clone(), y));
        }
        // neighbouring lattice points are at most this far apart
        let h = region.diameter() / n as f64;
        let mut slope: f64 = 0.0;
        for (i, (x, y)) in pts.iter().enumerate() {
            for (x2, y2) in pts.iter().skip(i + 1).take(2 * d.dim() + 2) {
                let dx = crate::degree::dist(x, x2);
                if dx > 0.0 {
                    slope = slope.max(crate::degree::dist(y, y2) / dx);
                }
            }
        }
        let lip = cfg.lipschitz_safety * slope;
        let worst = pts
            .iter()
            .map(|(_, y)| w - d.signed_distance(y).max(0.0))
            .fold(f64::INFINITY, f64::min);
        let bound = worst - lip * h;
        if bound > 0.0 {
            return Ok(bound);
        }
        if worst <= 0.0 {
            let (x, y) = pts
                .iter()
                .find(|(_, y)| d.signed_distance(y) >= w)
                .map(|(x, y)| (x.clone(), y.clone()))
                .unwrap_or_default();
            return Err(Error::Precondition(format!(
                "f maps {x:?} to {y:?}, outside the collar"
            )));
        }
        res *= 2;
    }
    Err(Error::Certification(
        "cannot certify that f maps M into the collared domain".into(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LefschetzTerm {
    pub value: i64,
    /// Degree of `rf` on the generator around the hole, when `M` has one.
    pub generator_degree: Option<DegreeCertificate>,
}

/// `L(rf)` from the rational homology of `M`: `1` on contractible domains,
/// `1 + (-1)^(n-1) deg` on annular ones.
pub fn lefschetz_of_retracted(
    f: &dyn VectorMap,
    d: &Domain,
    r: Retraction,
) -> Result<LefschetzTerm> {
    check_map(f, d)?;
    let rf = retracted(f, d, r);
    let v = homology_recipe(d).lefschetz(&rf)?;
    Ok(LefschetzTerm {
        value: v.value,
        generator_degree: v.generator_degree,
    })
}

/// Index of `rfr` on `M` thickened by half the collar, split at depth `eps`
/// below `∂M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub depth: f64,
    /// Index of `rfr` on `{x : dist(x, ∂M) > depth}` inside `M`.
    pub interior: i64,
    /// Index of `rfr` on the band `-depth < signed distance < w/2`.
    pub near_boundary: i64,
    /// Index of `rfr` on the whole thickened domain.
    pub enlarged: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternateRetraction {
    pub retraction: Retraction,
    pub i_boundary: i64,
    pub l_rf: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportCertificates {
    pub i_f: DegreeCertificate,
    pub l_rf: Option<DegreeCertificate>,
    /// Smallest certified gap between `f(M)` and the outer edge of the collar.
    pub collar_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub i_f: i64,
    pub i_boundary: i64,
    pub l_rf: i64,
    /// `i_f + i_boundary - l_rf`.
    pub residual: i64,
    pub fixed_points: Vec<FixedPoint>,
    pub boundary_fixed_points: Vec<BoundaryFixedPoint>,
    pub exit_set: ExitSet,
    pub certificates: ReportCertificates,
    pub decomposition: Option<Decomposition>,
    pub alternates: Vec<AlternateRetraction>,
}

impl IndexReport {
    /// Failed identities, empty when everything holds.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.residual != 0 {
            out.push(format!(
                "I(f) + I(rf|exit) - L(rf) = {} + {} - {} = {}",
                self.i_f, self.i_boundary, self.l_rf, self.residual
            ));
        }
        if let Some(dc) = &self.decomposition {
            if dc.enlarged != self.l_rf {
                out.push(format!(
                    "index of rfr on the thickened domain is {}, L(rf) is {}",
                    dc.enlarged, self.l_rf
                ));
            }
            if dc.interior + dc.near_boundary != dc.enlarged {
                out.push(format!(
                    "interior part {} plus boundary band {} differs from {}",
                    dc.interior, dc.near_boundary, dc.enlarged
                ));
            }
            if dc.interior != self.i_f {
                out.push(format!(
                    "interior part {} differs from I(f) = {}",
                    dc.interior, self.i_f
                ));
            }
            if dc.near_boundary != self.i_boundary {
                out.push(format!(
                    "boundary band index {} differs from the boundary term {}",
                    dc.near_boundary, self.i_boundary
                ));
            }
        }
        for a in &self.alternates {
            if a.i_boundary != self.i_boundary || a.l_rf != self.l_rf {
                out.push(format!(
                    "retraction {:?} gives boundary term {} and L {} instead of {} and {}",
                    a.retraction, a.i_boundary, a.l_rf, self.i_boundary, self.l_rf
                ));
            }
        }
        out
    }

    pub fn outcome(&self) -> Outcome {
        Outcome::from_holds(self.violations().is_empty())
    }
}

/// Fixed point index of `f` on the interior of `M`.
pub fn interior_index(
    f: &dyn VectorMap,
    d: &Domain,
    cfg: &CollarConfig,
) -> Result<fpindex::IndexResult> {
    check_map(f, d)?;
    fpindex::fixed_point_index(f, &Region::from(d.interior_region()?), &cfg.index)
}

/// Largest radius `rho` such that `{x in M : dist(x, ∂M) < rho}` is a
/// proper collar of `∂M` inside `M`.
fn inradius(d: &Domain) -> f64 {
    match d.shape() {
        Shape::Ball { radius, .. } => *radius,
        Shape::Box { lower, upper } => lower
            .iter()
            .zip(upper)
            .map(|(a, b)| 0.5 * (b - a))
            .fold(f64::INFINITY, f64::min),
        Shape::Annulus { inner, outer } | Shape::Shell { inner, outer } => 0.5 * (outer - inner),
    }
}

/// Pieces of the band `{-inner < signed distance < outer}`.
pub(crate) fn band_pieces(d: &Domain, inner: f64, outer: f64) -> Result<Vec<GriddedRegion>> {
    match d.shape() {
        Shape::Annulus { inner: a, outer: b } | Shape::Shell { inner: a, outer: b } => {
            let n = d.dim();
            Ok(vec![
                GriddedRegion::shell(vec![0.0; n], b - inner, b + outer)?,
                GriddedRegion::shell(vec![0.0; n], a - outer, a + inner)?,
            ])
        }
        _ => Ok(vec![d.band(inner, outer)?]),
    }
}

fn index_on_pieces(
    g: &dyn VectorMap,
    pieces: Vec<GriddedRegion>,
    cfg: &IndexConfig,
) -> Result<i64> {
    let mut total = 0;
    for p in pieces {
        total += fpindex::index_total(g, &Region::from(p), cfg)?.degree;
    }
    Ok(total)
}

/// Depth below `∂M` separating the located fixed points of `f` from the
/// boundary band.
pub(crate) fn band_depth(d: &Domain, fixed: &[FixedPoint]) -> f64 {
    let deepest_allowed = fixed
        .iter()
        .map(|p| -d.signed_distance(&p.location))
        .fold(f64::INFINITY, f64::min);
    (0.25 * deepest_allowed)
        .min(0.2 * d.collar_width())
        .min(0.25 * inradius(d))
}

/// Index of `rfr` near `∂M` on the band `-depth < signed distance < w/2`.
pub fn band_index(
    f: &dyn VectorMap,
    d: &Domain,
    depth: f64,
    r: Retraction,
    cfg: &CollarConfig,
) -> Result<i64> {
    let rfr = retracted_both(f, d, r);
    index_on_pieces(
        &rfr,
        band_pieces(d, depth, 0.5 * d.collar_width())?,
        &cfg.index,
    )
}

fn decomposition(
    f: &dyn VectorMap,
    d: &Domain,
    fixed: &[FixedPoint],
    cfg: &CollarConfig,
) -> Result<Decomposition> {
    let r = cfg.retraction;
    let rfr = retracted_both(f, d, r);
    let depth = band_depth(d, fixed);
    let w = d.collar_width();
    let interior = index_on_pieces(&rfr, vec![d.offset_region(-depth)?], &cfg.index)?;
    let near_boundary = band_index(f, d, depth, r, cfg)?;
    let enlarged = index_on_pieces(&rfr, vec![d.offset_region(0.5 * w)?], &cfg.index)?;
    Ok(Decomposition {
        depth,
        interior,
        near_boundary,
        enlarged,
    })
}

/// Computes the three terms of `I(f) + I(rf|∂₋M) = L(rf)` independently,
/// together with the cross-checks enabled in `cfg`.
pub fn verify_theorem(f: &dyn VectorMap, d: &Domain, cfg: &CollarConfig) -> Result<IndexReport> {
    check_map(f, d)?;
    let collar_gap = certify_image_in_collar(f, d, cfg)?;
    let interior = interior_index(f, d, cfg)?;
    let exit_set = boundary_exit_set(f, d, cfg)?;
    let bi = boundary_index(f, d, &exit_set, cfg.retraction, cfg)?;
    let l = lefschetz_of_retracted(f, d, cfg.retraction)?;
    let decomposition = if cfg.decomposition {
        Some(decomposition(f, d, &interior.fixed_points.points, cfg)?)
    } else {
        None
    };
    let mut alternates = Vec::new();
    if cfg.check_alternates && d.dim() > 1 {
        for r in Retraction::alternates() {
            let b = boundary_index(f, d, &exit_set, r, cfg)?;
            let l = lefschetz_of_retracted(f, d, r)?;
            alternates.push(AlternateRetraction {
                retraction: r,
                i_boundary: b.total,
                l_rf: l.value,
            });
        }
    }
    Ok(IndexReport {
        i_f: interior.total,
        i_boundary: bi.total,
        l_rf: l.value,
        residual: interior.total + bi.total - l.value,
        fixed_points: interior.fixed_points.points,
        boundary_fixed_points: bi.fixed_points,
        exit_set,
        certificates: ReportCertificates {
            i_f: interior.certificate,
            l_rf: l.generator_degree,
            collar_gap,
        },
        decomposition,
        alternates,
    })
}

pub(crate) fn unit(v: &[f64]) -> Vec<f64> {
    let l = norm(v);
    v.iter().map(|x| x / l).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapexpr::MapExpr;

    fn map(src: &str, n: usize) -> MapExpr {
        MapExpr::parse_for_dim(src, n).unwrap()
    }

    /// `2 e^{ia} z^d` in real coordinates.
    fn disk_power(d: u32, a: f64) -> FnMap<'static> {
        FnMap::new(2, 2, move |x| {
            let (r, t) = (x[0].hypot(x[1]), x[1].atan2(x[0]));
            let (rr, tt) = (2.0 * r.powi(d as i32), d as f64 * t + a);
            Ok(vec![rr * tt.cos(), rr * tt.sin()])
        })
    }

    /// `(2 rho - 1.5) e^{ia} u^k` on the annulus, `u = x / |x|`.
    fn annulus_wrap(k: i32, a: f64) -> FnMap<'static> {
        FnMap::new(2, 2, move |x| {
            let (r, t) = (x[0].hypot(x[1]), x[1].atan2(x[0]));
            let (rr, tt) = (2.0 * r - 1.5, k as f64 * t + a);
            Ok(vec![rr * tt.cos(), rr * tt.sin()])
        })
    }

    fn terms(f: &dyn VectorMap, d: &Domain) -> (i64, i64, i64) {
        let rep = verify_theorem(f, d, &CollarConfig::default()).unwrap();
        assert!(rep.violations().is_empty(), "{:?}", rep.violations());
        (rep.i_f, rep.i_boundary, rep.l_rf)
    }

    #[test]
    fn disk_power_family() {
        let d = Domain::ball(vec![0.0, 0.0], 1.0, 1.25).unwrap();
        for k in 1..=5 {
            let f = disk_power(k, 0.3);
            assert_eq!(terms(&f, &d), (k as i64, 1 - k as i64, 1), "power {k}");
        }
    }

    #[test]
    fn contraction_has_no_exit() {
        let d = Domain::ball(vec![0.0, 0.0], 2.0, 1.0).unwrap();
        let f = map("x1/2; x2/2", 2);
        let rep = verify_theorem(&f, &d, &CollarConfig::default()).unwrap();
        assert!(rep.exit_set.empty);
        assert_eq!((rep.i_f, rep.i_boundary, rep.l_rf), (1, 0, 1));
    }

    #[test]
    fn conjugation_fixes_two_boundary_points() {
        let d = Domain::ball(vec![0.0, 0.0], 1.0, 1.25).unwrap();
        let f = map("2*x1; -2*x2", 2);
        let rep = verify_theorem(&f, &d, &CollarConfig::default()).unwrap();
        assert_eq!((rep.i_f, rep.i_boundary, rep.l_rf), (-1, 2, 1));
        assert_eq!(rep.boundary_fixed_points.len(), 2);
        assert!(rep.boundary_fixed_points.iter().all(|p| p.local_index == 1));
    }

    #[test]
    fn annulus_wraps() {
        let d = Domain::annulus(1.0, 2.0, 0.75).unwrap();
        for (k, want) in [(0, (-1, 2, 1)), (1, (0, 0, 0)), (2, (1, -2, -1))] {
            let f = annulus_wrap(k, 0.3);
            assert_eq!(terms(&f, &d), want, "wrap {k}");
        }
    }

    #[test]
    fn interval_doubling() {
        let d = Domain::ball(vec![0.0], 1.0, 1.25).unwrap();
        let f = map("2*x1", 1);
        assert_eq!(terms(&f, &d), (-1, 2, 1));
    }

    #[test]
    fn three_ball_rotations() {
        let d = Domain::ball(vec![0.0; 3], 1.0, 1.25).unwrap();
        let (c, s) = (0.4f64.cos(), 0.4f64.sin());
        let plus = map(
            &format!("2*({c}*x1 - {s}*x2); 2*({s}*x1 + {c}*x2); 2*x3"),
            3,
        );
        assert_eq!(terms(&plus, &d), (-1, 2, 1));
        let minus = map(
            &format!("-2*({c}*x1 - {s}*x2); -2*({s}*x1 + {c}*x2); -2*x3"),
            3,
        );
        assert_eq!(terms(&minus, &d), (1, 0, 1));
    }

    #[test]
    fn box_affine_maps() {
        let d = Domain::cuboid(vec![-1.0, -1.0], vec![1.0, 1.0], 1.5).unwrap();
        let inside = map("0.5*x1 + 0.1; 0.5*x2 - 0.2", 2);
        assert_eq!(terms(&inside, &d), (1, 0, 1));
        let (c, s) = (0.4f64.cos(), 0.4f64.sin());
        let out = map(
            &format!("1.5*({c}*x1 - {s}*x2) + 0.1; 1.5*({s}*x1 + {c}*x2) - 0.05"),
            2,
        );
        assert_eq!(terms(&out, &d), (1, 0, 1));
    }

    #[test]
    fn exit_arc_of_a_half_pushing_map() {
        let d = Domain::unit_ball(2, 1.0).unwrap();
        // radial factor 1 + sin(theta)/2 composed with a small rotation
        let f = map(
            "(1 + 0.5*x2/sqrt(x1^2 + x2^2))*(cos(0.3)*x1 - sin(0.3)*x2); \
             (1 + 0.5*x2/sqrt(x1^2 + x2^2))*(sin(0.3)*x1 + cos(0.3)*x2)",
            2,
        );
        let e = boundary_exit_set(&f, &d, &CollarConfig::default()).unwrap();
        assert!(e.open && !e.empty && !e.covers_boundary);
        let [ExitPiece::Arc { start, end, .. }] = &e.pieces[..] else {
            panic!("{:?}", e.pieces)
        };
        assert!(start.abs() < 1e-9 && (end - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn alternate_retractions_agree() {
        let d = Domain::annulus(1.0, 2.0, 0.75).unwrap();
        let rep = verify_theorem(&annulus_wrap(2, 0.3), &d, &CollarConfig::default()).unwrap();
        assert_eq!(rep.alternates.len(), 2);
        assert!(rep
            .alternates
            .iter()
            .all(|a| a.i_boundary == -2 && a.l_rf == -1));
    }
}
