//! Catalog domains with an attached outer collar, the collapsing
//! retraction, and boundary geometry.

mod boundary;
mod recipe;

use std::cmp::Ordering;

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};

pub use boundary::{
    boundary_charts, BoundaryChart, BoundaryLoop, ChartEmbedding, LoopGeometry, SphereComponent,
    SphereGeometry,
};
pub(crate) use boundary::{gnomonic_coords, gnomonic_face_of, gnomonic_point};
pub use recipe::{homology_recipe, sphere_degree_about, Generator, HomologyRecipe, LefschetzValue};

use crate::degree::{dist, norm};
use crate::error::{Error, Result};
use crate::mapexpr::rational_of;

/// Shape of a catalog domain `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Planar annulus about the origin.
    Annulus {
        inner: f64,
        outer: f64,
    },
    /// Spherical shell in `R^3` about the origin.
    Shell {
        inner: f64,
        outer: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Interior,
    Boundary,
    Collar,
    Outside,
}

/// A retraction `M' -> M`. `Standard` sends `(b, t)` to `b`; the twisted
/// variants slide the foot point along `∂M` by `angle * t^power`, which is
/// still the identity on `M` and homotopic to the standard one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Retraction {
    Standard,
    Twisted { power: u32, angle: f64 },
}

impl Retraction {
    /// The two built-in alternates, collapsing at rates `t^2` and `t^3`.
    pub fn alternates() -> [Retraction; 2] {
        [
            Retraction::Twisted {
                power: 2,
                angle: 0.35,
            },
            Retraction::Twisted {
                power: 3,
                angle: -0.5,
            },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DomainSpec {
    #[serde(flatten)]
    shape: Shape,
    collar_width: f64,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
}

fn default_tolerance() -> f64 {
    1e-9
}

/// A compact manifold with boundary `M` together with the collar model
/// `M' = {x : dist(x, M) <= collar_width}`.
///
/// The collar parameter of a point outside `M` is `dist(x, M) / collar_width`
/// and the standard retraction is nearest-point projection onto `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub struct Domain {
    shape: Shape,
    collar_width: f64,
    /// Width of the ambiguity band, relative to the diameter.
    tolerance: f64,
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;

    fn try_from(s: DomainSpec) -> Result<Domain> {
        Domain::new(s.shape, s.collar_width)?.with_tolerance(s.tolerance)
    }
}

impl From<Domain> for DomainSpec {
    fn from(d: Domain) -> DomainSpec {
        DomainSpec {
            shape: d.shape,
            collar_width: d.collar_width,
            tolerance: d.tolerance,
        }
    }
}

impl Domain {
    pub fn new(shape: Shape, collar_width: f64) -> Result<Domain> {
        if !(collar_width > 0.0 && collar_width.is_finite()) {
            return Err(Error::Invalid(format!(
                "collar width must be positive, got {collar_width}"
            )));
        }
        let ok = match &shape {
            Shape::Ball { center, radius } => {
                !center.is_empty() && *radius > 0.0 && radius.is_finite()
            }
            Shape::Box { lower, upper } => {
                !lower.is_empty()
                    && lower.len() == upper.len()
                    && lower
                        .iter()
                        .zip(upper)
                        .all(|(a, b)| a < b && b.is_finite() && a.is_finite())
            }
            Shape::Annulus { inner, outer } | Shape::Shell { inner, outer } => {
                if !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    false
                } else if collar_width >= *inner {
                    return Err(Error::Invalid(format!(
                        "collar width {collar_width} must be below the inner radius {inner}"
                    )));
                } else {
                    true
                }
            }
        };
        if !ok {
            return Err(Error::Invalid(format!("malformed domain {shape:?}")));
        }
        Ok(Domain {
            shape,
            collar_width,
            tolerance: default_tolerance(),
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64, collar_width: f64) -> Result<Domain> {
        Domain::new(Shape::Ball { center, radius }, collar_width)
    }

    pub fn unit_ball(dim: usize, collar_width: f64) -> Result<Domain> {
        Domain::ball(vec![0.0; dim], 1.0, collar_width)
    }

    pub fn cuboid(lower: Vec<f64>, upper: Vec<f64>, collar_width: f64) -> Result<Domain> {
        Domain::new(Shape::Box { lower, upper }, collar_width)
    }

    pub fn annulus(inner: f64, outer: f64, collar_width: f64) -> Result<Domain> {
        Domain::new(Shape::Annulus { inner, outer }, collar_width)
    }

    pub fn shell(inner: f64, outer: f64, collar_width: f64) -> Result<Domain> {
        Domain::new(Shape::Shell { inner, outer }, collar_width)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Domain> {
        if !(tolerance >= 0.0 && tolerance < 1e-2) {
            return Err(Error::Invalid(format!(
                "tolerance {tolerance} out of range"
            )));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn collar_width(&self) -> f64 {
        self.collar_width
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Ball { center, .. } => center.len(),
            Shape::Box { lower, .. } => lower.len(),
            Shape::Annulus { .. } => 2,
            Shape::Shell { .. } => 3,
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Box { lower, upper } => dist(lower, upper),
            Shape::Annulus { outer, .. } | Shape::Shell { outer, .. } => 2.0 * outer,
        }
    }

    /// Whether `M` is contractible (balls and boxes).
    pub fn is_contractible(&self) -> bool {
        matches!(self.shape, Shape::Ball { .. } | Shape::Box { .. })
    }

    /// Centre used for radial constructions.
    pub fn center(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { center, .. } => center.clone(),
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
            Shape::Annulus { .. } | Shape::Shell { .. } => vec![0.0; self.dim()],
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Invalid(format!(
                "point has dimension {}, domain has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Signed Euclidean distance to `∂M`: negative in the interior, positive
    /// outside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => dist(x, center) - radius,
            Shape::Box { lower, upper } => {
                let mut outside = 0.0;
                let mut inside = f64::INFINITY;
                for ((v, a), b) in x.iter().zip(lower).zip(upper) {
                    let e = (a - v).max(v - b);
                    if e > 0.0 {
                        outside += e * e;
                    }
                    inside = inside.min(-e);
                }
                if outside > 0.0 {
                    outside.sqrt()
                } else {
                    -inside
                }
            }
            Shape::Annulus { inner, outer } | Shape::Shell { inner, outer } => {
                let r = norm(x);
                (inner - r).max(r - outer)
            }
        }
    }

    /// Collar coordinate `t`: negative inside `M`, in `(0, 1]` on the
    /// collar.
    pub fn collar_parameter(&self, x: &[f64]) -> f64 {
        self.signed_distance(x) / self.collar_width
    }

    /// Exact sign of `d^2 - rho^2` where `d` is the distance from `x` to `M`
    /// (for `rho > 0`), or of the signed distance itself (`rho == 0`).
    fn exact_compare(&self, x: &[f64], rho: f64) -> Ordering {
        let q = |v: f64| rational_of(v).expect("finite coordinates");
        let sq = |v: BigRational| &v * &v;
        match &self.shape {
            Shape::Ball { center, radius } => {
                let d2: BigRational = x
                    .iter()
                    .zip(center)
                    .map(|(a, c)| sq(q(*a) - q(*c)))
                    .fold(BigRational::zero(), |s, v| s + v);
                let r = q(*radius) + q(rho);
                d2.cmp(&sq(r))
            }
            Shape::Box { lower, upper } => {
                let mut out2 = BigRational::zero();
                let mut all_inside_strict = true;
                for ((v, a), b) in x.iter().zip(lower).zip(upper) {
                    let (v, a, b) = (q(*v), q(*a), q(*b));
                    if v < a {
                        out2 += sq(&a - &v);
                    } else if v > b {
                        out2 += sq(&v - &b);
                    }
                    if !(v > a && v < b) {
                        all_inside_strict = false;
                    }
                }
                if rho == 0.0 && out2.is_zero() {
                    return if all_inside_strict {
                        Ordering::Less
                    } else {
                        Ordering::Equal
                    };
                }
                out2.cmp(&sq(q(rho)))
            }
            Shape::Annulus { inner, outer } | Shape::Shell { inner, outer } => {
                let r2 = x
                    .iter()
                    .map(|a| sq(q(*a)))
                    .fold(BigRational::zero(), |s, v| s + v);
                let hi = sq(q(*outer) + q(rho));
                let lo_r = q(*inner) - q(rho);
                let lo = sq(lo_r);
                // distance to M exceeds rho iff r > outer + rho or r < inner - rho
                match (r2.cmp(&hi), r2.cmp(&lo)) {
                    (Ordering::Greater, _) | (_, Ordering::Less) => Ordering::Greater,
                    (Ordering::Equal, _) | (_, Ordering::Equal) => Ordering::Equal,
                    _ => Ordering::Less,
                }
            }
        }
    }

    /// Exact classification of a point (coordinates are read as the exact
    /// rationals they represent).
    pub fn classify(&self, x: &[f64]) -> Result<PointClass> {
        self.check_dim(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite point {x:?}")));
        }
        let sd = self.signed_distance(x);
        let scale = self.diameter() + norm(x) + self.collar_width;
        let slack = 1e-12 * scale;
        let boundary = if sd < -slack {
            Ordering::Less
        } else if sd > slack {
            Ordering::Greater
        } else {
            self.exact_compare(x, 0.0)
        };
        Ok(match boundary {
            Ordering::Less => PointClass::Interior,
            Ordering::Equal => PointClass::Boundary,
            Ordering::Greater => {
                let w = self.collar_width;
                let collar = if sd < w - slack {
                    Ordering::Less
                } else if sd > w + slack {
                    Ordering::Greater
                } else {
                    self.exact_compare(x, w)
                };
                if collar == Ordering::Greater {
                    PointClass::Outside
                } else {
                    PointClass::Collar
                }
            }
        })
    }

    /// Classification for computed (inexact) points: anything within the
    /// tolerance band of `∂M` or of the outer edge of the collar, other than
    /// exact boundary points, is reported as ambiguous.
    pub fn classify_banded(&self, x: &[f64]) -> Result<PointClass> {
        let class = self.classify(x)?;
        let band = self.tolerance * self.diameter();
        let sd = self.signed_distance(x);
        if class != PointClass::Boundary && sd.abs() <= band {
            return Err(Error::Ambiguous {
                point: x.to_vec(),
                distance: sd.abs(),
            });
        }
        if (sd - self.collar_width).abs() <= band {
            return Err(Error::Ambiguous {
                point: x.to_vec(),
                distance: (sd - self.collar_width).abs(),
            });
        }
        Ok(class)
    }

    /// Whether `x` lies in `M` (exactly).
    pub fn contains(&self, x: &[f64]) -> bool {
        matches!(
            self.classify(x),
            Ok(PointClass::Interior | PointClass::Boundary)
        )
    }

    /// Nearest point of `M`; the identity on `M`. Errors when `x` is not in
    /// `M'`.
    pub fn retract(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.retract_with(x, Retraction::Standard)
    }

    pub fn retract_with(&self, x: &[f64], r: Retraction) -> Result<Vec<f64>> {
        match self.classify(x)? {
            PointClass::Interior | PointClass::Boundary => Ok(x.to_vec()),
            PointClass::Outside => Err(Error::OutsideCollar { point: x.to_vec() }),
            PointClass::Collar => {
                let foot = self.foot(x);
                match r {
                    Retraction::Standard => Ok(foot),
                    Retraction::Twisted { power, angle } => {
                        let t = self.collar_parameter(x).clamp(0.0, 1.0);
                        let shift = angle * t.powi(power as i32);
                        self.slide_along_boundary(&foot, shift)
                    }
                }
            }
        }
    }

    /// Foot of a collar point, nudged inward until it lies exactly in `M`.
    fn foot(&self, x: &[f64]) -> Vec<f64> {
        let mut p = match &self.shape {
            Shape::Ball { center, radius } => radial_to(x, center, *radius),
            Shape::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (a, b))| v.clamp(*a, *b))
                .collect(),
            Shape::Annulus { inner, outer } | Shape::Shell { inner, outer } => {
                let r = norm(x);
                let target = if r > 0.5 * (inner + outer) {
                    *outer
                } else {
                    *inner
                };
                radial_to(x, &vec![0.0; x.len()], target)
            }
        };
        let mut k = 0;
        while !self.contains(&p) && k < 64 {
            let c = self.interior_anchor(&p);
            let eps = f64::EPSILON * (1u64 << k.min(40)) as f64;
            p = p.iter().zip(&c).map(|(a, b)| a + eps * (b - a)).collect();
            k += 1;
        }
        p
    }

    /// A point of `M` towards which boundary points can be nudged.
    fn interior_anchor(&self, p: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Annulus { inner, outer } | Shape::Shell { inner, outer } => {
                radial_to(p, &vec![0.0; p.len()], 0.5 * (inner + outer))
            }
            _ => self.center(),
        }
    }

    /// Moves a boundary point by `shift` along `∂M`: arclength-proportional
    /// loop shift for `n = 2`, rotation about the last axis through the
    /// centre for `n = 3`, nothing for `n = 1`.
    fn slide_along_boundary(&self, b: &[f64], shift: f64) -> Result<Vec<f64>> {
        match self.dim() {
            1 => Ok(b.to_vec()),
            2 => {
                let loops = self.boundary_loops()?;
                let (i, s) = self.locate_on_loops(&loops, b);
                let l = &loops[i];
                let p = l.point(s + shift * l.period() / std::f64::consts::TAU);
                Ok(self.foot_or_self(&p))
            }
            3 => {
                let comps = self.sphere_components()?;
                let i = self.sphere_component_of(b);
                let comp = &comps[i];
                let u = comp.direction_of(b);
                let (c, s) = (shift.cos(), shift.sin());
                let v = [c * u[0] - s * u[1], s * u[0] + c * u[1], u[2]];
                Ok(self.foot_or_self(&comp.point(&v)))
            }
            n => Err(Error::Unsupported(format!(
                "twisted retraction in dimension {n}"
            ))),
        }
    }

    fn foot_or_self(&self, p: &[f64]) -> Vec<f64> {
        if self.contains(p) {
            p.to_vec()
        } else {
            self.foot(p)
        }
    }

    /// Boundary loops of a planar domain.
    pub fn boundary_loops(&self) -> Result<Vec<BoundaryLoop>> {
        boundary::loops(self)
    }

    /// Index of the loop nearest to `p` and the loop parameter of `p`'s
    /// projection onto it.
    pub fn locate_on_loops(&self, loops: &[BoundaryLoop], p: &[f64]) -> (usize, f64) {
        let mut best = (0, 0.0, f64::INFINITY);
        for (i, l) in loops.iter().enumerate() {
            let s = l.param_of(p);
            let d = dist(&l.point(s), p);
            if d < best.2 {
                best = (i, s, d);
            }
        }
        (best.0, best.1)
    }

    /// Boundary spheres of a domain in `R^3`.
    pub fn sphere_components(&self) -> Result<Vec<SphereComponent>> {
        boundary::spheres(self)
    }

    /// Which boundary sphere a point near `∂M` belongs to.
    pub fn sphere_component_of(&self, p: &[f64]) -> usize {
        match &self.shape {
            Shape::Shell { inner, outer } => {
                if norm(p) < 0.5 * (inner + outer) {
                    1
                } else {
                    0
                }
            }
            _ => 0,
        }
    }

    /// The two boundary points of a one-dimensional domain, lower first.
    pub fn boundary_points(&self) -> Result<[f64; 2]> {
        match (&self.shape, self.dim()) {
            (Shape::Ball { center, radius }, 1) => Ok([center[0] - radius, center[0] + radius]),
            (Shape::Box { lower, upper }, 1) => Ok([lower[0], upper[0]]),
            _ => Err(Error::Unsupported(format!(
                "boundary points of a {}-dimensional domain",
                self.dim()
            ))),
        }
    }

    /// The open region `{x : -inner < signed distance < outer}` as a grid,
    /// for radial shapes; boxes get the box shell with sup-norm offsets.
    pub fn band(&self, inner: f64, outer: f64) -> Result<crate::degree::GriddedRegion> {
        use crate::degree::GriddedRegion;
        match &self.shape {
            Shape::Ball { center, radius } => {
                GriddedRegion::shell(center.clone(), radius - inner, radius + outer)
            }
            Shape::Box { lower, upper } => {
                let c = self.center();
                let n = lower.len() as f64;
                // sup-norm offset keeping corners inside the collar
                let out = outer / n.sqrt();
                let half: Vec<f64> = lower
                    .iter()
                    .zip(upper)
                    .map(|(a, b)| 0.5 * (b - a))
                    .collect();
                GriddedRegion::box_shell(
                    c,
                    half.iter().map(|h| h - inner).collect(),
                    half.iter().map(|h| h + out).collect(),
                )
            }
            Shape::Annulus { .. } | Shape::Shell { .. } => Err(Error::Unsupported(
                "bands of annular domains have two components; use component_band".into(),
            )),
        }
    }

    /// The open region `M` itself as a grid.
    pub fn interior_region(&self) -> Result<crate::degree::GriddedRegion> {
        self.offset_region(0.0)
    }

    /// `{x : signed distance < offset}` (for radial shapes and boxes; box
    /// offsets are taken in the sup norm scaled to stay within `offset`).
    pub fn offset_region(&self, offset: f64) -> Result<crate::degree::GriddedRegion> {
        use crate::degree::GriddedRegion;
        match &self.shape {
            Shape::Ball { center, radius } => GriddedRegion::ball(center.clone(), radius + offset),
            Shape::Box { lower, upper } => {
                let o = if offset > 0.0 {
                    offset / (lower.len() as f64).sqrt()
                } else {
                    offset
                };
                let lo: Vec<f64> = lower.iter().map(|a| a - o).collect();
                let hi: Vec<f64> = upper.iter().map(|b| b + o).collect();
                GriddedRegion::cuboid(&lo, &hi)
            }
            Shape::Annulus { inner, outer } | Shape::Shell { inner, outer } => {
                GriddedRegion::shell(vec![0.0; self.dim()], inner - offset, outer + offset)
            }
        }
    }
}

fn radial_to(x: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    let d = dist(x, center);
    center
        .iter()
        .zip(x)
        .map(|(c, v)| c + radius * (v - c) / d)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retraction_examples() {
        let b = Domain::unit_ball(2, 1.0).unwrap();
        assert_eq!(b.retract(&[0.5, 0.0]).unwrap(), vec![0.5, 0.0]);
        assert_eq!(b.retract(&[1.5, 0.0]).unwrap(), vec![1.0, 0.0]);
        let iv = Domain::cuboid(vec![0.0], vec![1.0], 0.5).unwrap();
        assert_eq!(iv.retract(&[1.25]).unwrap(), vec![1.0]);
        assert!(matches!(
            iv.retract(&[1.75]),
            Err(Error::OutsideCollar { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let b = Domain::unit_ball(2, 1.0).unwrap();
        assert_eq!(b.classify(&[0.0, 0.0]).unwrap(), PointClass::Interior);
        assert_eq!(b.classify(&[2.0, 0.0]).unwrap(), PointClass::Collar);
        assert_eq!(b.classify(&[1.0, 0.0]).unwrap(), PointClass::Boundary);
        // the doubles nearest 0.6 and 0.8 put the point strictly outside
        assert_eq!(b.classify(&[0.6, 0.8]).unwrap(), PointClass::Collar);
        assert_eq!(b.classify(&[2.0, 0.1]).unwrap(), PointClass::Outside);
        let a = Domain::annulus(1.0, 2.0, 0.5).unwrap();
        assert_eq!(a.classify(&[1.5, 0.0]).unwrap(), PointClass::Interior);
        assert_eq!(a.classify(&[0.5, 0.0]).unwrap(), PointClass::Collar);
        assert_eq!(a.classify(&[0.4, 0.0]).unwrap(), PointClass::Outside);
        assert_eq!(a.classify(&[0.0, -1.0]).unwrap(), PointClass::Boundary);
        let bx = Domain::cuboid(vec![0.0, 0.0], vec![1.0, 2.0], 0.5).unwrap();
        assert_eq!(bx.classify(&[1.0, 2.0]).unwrap(), PointClass::Boundary);
        assert_eq!(bx.classify(&[1.3, 2.4]).unwrap(), PointClass::Collar);
        assert_eq!(bx.classify(&[1.3, 2.41]).unwrap(), PointClass::Outside);
    }

    #[test]
    fn band_flags_near_boundary_points() {
        let b = Domain::unit_ball(2, 1.0).unwrap();
        let err = b.classify_banded(&[1.0 + 1e-12, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Ambiguous { .. }));
        assert_eq!(
            b.classify_banded(&[1.0, 0.0]).unwrap(),
            PointClass::Boundary
        );
        assert_eq!(b.classify_banded(&[1.5, 0.0]).unwrap(), PointClass::Collar);
    }

    #[test]
    fn invalid_domains_are_rejected() {
        assert!(Domain::annulus(1.0, 2.0, 1.0).is_err());
        assert!(Domain::annulus(2.0, 1.0, 0.5).is_err());
        assert!(Domain::unit_ball(2, 0.0).is_err());
        assert!(Domain::cuboid(vec![0.0, 1.0], vec![1.0, 1.0], 0.1).is_err());
    }

    #[test]
    fn twisted_retraction_is_identity_on_m() {
        let b = Domain::unit_ball(2, 1.0).unwrap();
        for r in Retraction::alternates() {
            assert_eq!(b.retract_with(&[0.3, -0.2], r).unwrap(), vec![0.3, -0.2]);
            let q = b.retract_with(&[1.5, 0.0], r).unwrap();
            assert!(b.contains(&q));
            assert!((norm(&q) - 1.0).abs() < 1e-12);
            assert!(q[1].abs() > 1e-3);
        }
    }

    #[test]
    fn serde_round_trip() {
        let d: Domain =
            serde_json::from_str(r#"{"kind":"annulus","inner":1,"outer":2,"collar_width":0.75}"#)
                .unwrap();
        assert_eq!(d, Domain::annulus(1.0, 2.0, 0.75).unwrap());
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<Domain>(&s).unwrap(), d);
        assert!(serde_json::from_str::<Domain>(
            r#"{"kind":"ball","center":[0,0],"radius":-1,"collar_width":1}"#
        )
        .is_err());
    }
}
