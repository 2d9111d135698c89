use std::f64::consts::TAU;

use serde::Serialize;

use super::{Domain, Shape};
use crate::degree::norm;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoopGeometry {
    /// Parametrised by angle.
    Circle { center: [f64; 2], radius: f64 },
    /// Parametrised by arclength, counterclockwise from the lower-left
    /// corner.
    Rectangle { lower: [f64; 2], upper: [f64; 2] },
}

/// A boundary component of a planar domain, traversed counterclockwise.
/// `orientation` is `+1` when counterclockwise agrees with the orientation
/// induced by the outward normal of `M`, `-1` for hole boundaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryLoop {
    pub component: usize,
    pub orientation: i8,
    pub geometry: LoopGeometry,
}

impl BoundaryLoop {
    pub fn period(&self) -> f64 {
        match &self.geometry {
            LoopGeometry::Circle { .. } => TAU,
            LoopGeometry::Rectangle { lower, upper } => {
                2.0 * ((upper[0] - lower[0]) + (upper[1] - lower[1]))
            }
        }
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        match &self.geometry {
            LoopGeometry::Circle { center, radius } => {
                [center[0] + radius * s.cos(), center[1] + radius * s.sin()]
            }
            LoopGeometry::Rectangle { lower, upper } => {
                let (w, h) = (upper[0] - lower[0], upper[1] - lower[1]);
                let s = s.rem_euclid(self.period());
                if s < w {
                    [lower[0] + s, lower[1]]
                } else if s < w + h {
                    [upper[0], lower[1] + (s - w)]
                } else if s < 2.0 * w + h {
                    [upper[0] - (s - w - h), upper[1]]
                } else {
                    [lower[0], upper[1] - (s - 2.0 * w - h)]
                }
            }
        }
    }

    /// Parameter in `[0, period)` of the point of the loop nearest `p`.
    pub fn param_of(&self, p: &[f64]) -> f64 {
        match &self.geometry {
            LoopGeometry::Circle { center, .. } => {
                (p[1] - center[1]).atan2(p[0] - center[0]).rem_euclid(TAU)
            }
            LoopGeometry::Rectangle { lower, upper } => {
                let (w, h) = (upper[0] - lower[0], upper[1] - lower[1]);
                let x = p[0].clamp(lower[0], upper[0]);
                let y = p[1].clamp(lower[1], upper[1]);
                // distances to the four sides
                let d = [y - lower[1], upper[0] - x, upper[1] - y, x - lower[0]];
                let side = (0..4)
                    .min_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap())
                    .unwrap();
                let s = match side {
                    0 => x - lower[0],
                    1 => w + (y - lower[1]),
                    2 => w + h + (upper[0] - x),
                    _ => 2.0 * w + h + (upper[1] - y),
                };
                s.rem_euclid(self.period())
            }
        }
    }

    /// Unit tangent in the direction of increasing parameter.
    pub fn tangent(&self, s: f64) -> [f64; 2] {
        match &self.geometry {
            LoopGeometry::Circle { .. } => [-s.sin(), s.cos()],
            LoopGeometry::Rectangle { lower, upper } => {
                let (w, h) = (upper[0] - lower[0], upper[1] - lower[1]);
                let s = s.rem_euclid(self.period());
                if s < w {
                    [1.0, 0.0]
                } else if s < w + h {
                    [0.0, 1.0]
                } else if s < 2.0 * w + h {
                    [-1.0, 0.0]
                } else {
                    [0.0, -1.0]
                }
            }
        }
    }

    /// Unit normal pointing out of `M` (undefined at rectangle corners,
    /// where the side containing `s` is used).
    pub fn outward_normal(&self, s: f64) -> [f64; 2] {
        let t = self.tangent(s);
        let o = self.orientation as f64;
        [o * t[1], -o * t[0]]
    }
}

pub(super) fn loops(d: &Domain) -> Result<Vec<BoundaryLoop>> {
    match d.shape() {
        Shape::Ball { center, radius } if center.len() == 2 => Ok(vec![BoundaryLoop {
            component: 0,
            orientation: 1,
            geometry: LoopGeometry::Circle {
                center: [center[0], center[1]],
                radius: *radius,
            },
        }]),
        Shape::Box { lower, upper } if lower.len() == 2 => Ok(vec![BoundaryLoop {
            component: 0,
            orientation: 1,
            geometry: LoopGeometry::Rectangle {
                lower: [lower[0], lower[1]],
                upper: [upper[0], upper[1]],
            },
        }]),
        Shape::Annulus { inner, outer } => Ok(vec![
            BoundaryLoop {
                component: 0,
                orientation: 1,
                geometry: LoopGeometry::Circle {
                    center: [0.0, 0.0],
                    radius: *outer,
                },
            },
            BoundaryLoop {
                component: 1,
                orientation: -1,
                geometry: LoopGeometry::Circle {
                    center: [0.0, 0.0],
                    radius: *inner,
                },
            },
        ]),
        _ => Err(Error::Unsupported(format!(
            "boundary loops need a planar domain, got dimension {}",
            d.dim()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SphereGeometry {
    Round {
        center: [f64; 3],
        radius: f64,
    },
    /// Box surface, reached by radial projection from the centre.
    Cube {
        center: [f64; 3],
        half: [f64; 3],
    },
}

/// A boundary 2-sphere of a domain in `R^3`, identified with the unit
/// sphere by radial projection from its centre.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereComponent {
    pub component: usize,
    /// `+1` when the radial direction points out of `M`.
    pub orientation: i8,
    pub geometry: SphereGeometry,
}

impl SphereComponent {
    pub fn center(&self) -> [f64; 3] {
        match &self.geometry {
            SphereGeometry::Round { center, .. } | SphereGeometry::Cube { center, .. } => *center,
        }
    }

    /// Point of the component in unit direction `u`.
    pub fn point(&self, u: &[f64]) -> Vec<f64> {
        let c = self.center();
        let t = match &self.geometry {
            SphereGeometry::Round { radius, .. } => *radius,
            SphereGeometry::Cube { half, .. } => (0..3)
                .filter(|&i| u[i] != 0.0)
                .map(|i| half[i] / u[i].abs())
                .fold(f64::INFINITY, f64::min),
        };
        (0..3).map(|i| c[i] + t * u[i]).collect()
    }

    /// Unit direction of `p` seen from the centre.
    pub fn direction_of(&self, p: &[f64]) -> [f64; 3] {
        let c = self.center();
        let v = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
        let l = norm(&v);
        [v[0] / l, v[1] / l, v[2] / l]
    }
}

/// Gnomonic cube-face charts on the unit sphere: face `k` has axis `k / 2`
/// and sign `+` for even `k`.
pub(crate) fn gnomonic_point(face: usize, a: f64, b: f64) -> [f64; 3] {
    let (axis, sign) = (face / 2, if face % 2 == 0 { 1.0 } else { -1.0 });
    let mut v = [0.0; 3];
    v[axis] = sign;
    v[(axis + 1) % 3] = a;
    v[(axis + 2) % 3] = b;
    let l = norm(&v);
    [v[0] / l, v[1] / l, v[2] / l]
}

/// Chart coordinates of a unit vector on the given face, if it lies in
/// the open hemisphere of that face.
pub(crate) fn gnomonic_coords(face: usize, u: &[f64]) -> Option<[f64; 2]> {
    let (axis, sign) = (face / 2, if face % 2 == 0 { 1.0 } else { -1.0 });
    let h = sign * u[axis];
    if h <= 0.0 {
        return None;
    }
    Some([u[(axis + 1) % 3] / h, u[(axis + 2) % 3] / h])
}

/// The face on which `u` has the largest coordinate, with its chart
/// coordinates (each in `[-1, 1]`).
pub(crate) fn gnomonic_face_of(u: &[f64]) -> (usize, [f64; 2]) {
    let axis = (0..3)
        .max_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap())
        .unwrap();
    let face = 2 * axis + usize::from(u[axis] < 0.0);
    (face, gnomonic_coords(face, u).unwrap())
}

pub(super) fn spheres(d: &Domain) -> Result<Vec<SphereComponent>> {
    match d.shape() {
        Shape::Ball { center, radius } if center.len() == 3 => Ok(vec![SphereComponent {
            component: 0,
            orientation: 1,
            geometry: SphereGeometry::Round {
                center: [center[0], center[1], center[2]],
                radius: *radius,
            },
        }]),
        Shape::Box { lower, upper } if lower.len() == 3 => {
            let c = d.center();
            Ok(vec![SphereComponent {
                component: 0,
                orientation: 1,
                geometry: SphereGeometry::Cube {
                    center: [c[0], c[1], c[2]],
                    half: [
                        0.5 * (upper[0] - lower[0]),
                        0.5 * (upper[1] - lower[1]),
                        0.5 * (upper[2] - lower[2]),
                    ],
                },
            }])
        }
        Shape::Shell { inner, outer } => Ok(vec![
            SphereComponent {
                component: 0,
                orientation: 1,
                geometry: SphereGeometry::Round {
                    center: [0.0; 3],
                    radius: *outer,
                },
            },
            SphereComponent {
                component: 1,
                orientation: -1,
                geometry: SphereGeometry::Round {
                    center: [0.0; 3],
                    radius: *inner,
                },
            },
        ]),
        _ => Err(Error::Unsupported(format!(
            "boundary spheres need a domain in R^3, got dimension {}",
            d.dim()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChartEmbedding {
    Point {
        at: Vec<f64>,
    },
    Loop {
        boundary: BoundaryLoop,
    },
    /// Straight segment `start + u * direction`.
    Segment {
        start: Vec<f64>,
        direction: Vec<f64>,
    },
    /// Box face `x[axis] = value`, free coordinates in `free` order.
    Face {
        axis: usize,
        value: f64,
        free: [usize; 2],
    },
    /// Gnomonic cube-face chart of a boundary sphere.
    Gnomonic {
        sphere: SphereComponent,
        face: usize,
    },
}

/// A chart on `∂M`: a parameter box embedded into the boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryChart {
    pub component: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: bool,
    /// `+1` when the chart orientation agrees with the one induced by the
    /// outward normal.
    pub orientation: i8,
    pub embedding: ChartEmbedding,
}

impl BoundaryChart {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn embed(&self, u: &[f64]) -> Vec<f64> {
        match &self.embedding {
            ChartEmbedding::Point { at } => at.clone(),
            ChartEmbedding::Loop { boundary } => boundary.point(u[0]).to_vec(),
            ChartEmbedding::Segment { start, direction } => start
                .iter()
                .zip(direction)
                .map(|(s, d)| s + u[0] * d)
                .collect(),
            ChartEmbedding::Face { axis, value, free } => {
                let mut p = vec![0.0; 3];
                p[*axis] = *value;
                p[free[0]] = u[0];
                p[free[1]] = u[1];
                p
            }
            ChartEmbedding::Gnomonic { sphere, face } => {
                sphere.point(&gnomonic_point(*face, u[0], u[1]))
            }
        }
    }
}

/// Charts covering `∂M`.
pub fn boundary_charts(d: &Domain) -> Result<Vec<BoundaryChart>> {
    match d.dim() {
        1 => {
            let [a, b] = d.boundary_points()?;
            Ok(vec![
                BoundaryChart {
                    component: 0,
                    lower: vec![],
                    upper: vec![],
                    periodic: false,
                    orientation: -1,
                    embedding: ChartEmbedding::Point { at: vec![a] },
                },
                BoundaryChart {
                    component: 1,
                    lower: vec![],
                    upper: vec![],
                    periodic: false,
                    orientation: 1,
                    embedding: ChartEmbedding::Point { at: vec![b] },
                },
            ])
        }
        2 => {
            let mut out = Vec::new();
            for l in d.boundary_loops()? {
                match &l.geometry {
                    LoopGeometry::Circle { .. } => out.push(BoundaryChart {
                        component: l.component,
                        lower: vec![0.0],
                        upper: vec![TAU],
                        periodic: true,
                        orientation: l.orientation,
                        embedding: ChartEmbedding::Loop {
                            boundary: l.clone(),
                        },
                    }),
                    LoopGeometry::Rectangle { lower, upper } => {
                        let corners = [
                            [lower[0], lower[1]],
                            [upper[0], lower[1]],
                            [upper[0], upper[1]],
                            [lower[0], upper[1]],
                        ];
                        for k in 0..4 {
                            let (p, q) = (corners[k], corners[(k + 1) % 4]);
                            let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
                            out.push(BoundaryChart {
                                component: 0,
                                lower: vec![0.0],
                                upper: vec![len],
                                periodic: false,
                                orientation: 1,
                                embedding: ChartEmbedding::Segment {
                                    start: p.to_vec(),
                                    direction: vec![(q[0] - p[0]) / len, (q[1] - p[1]) / len],
                                },
                            });
                        }
                    }
                }
            }
            Ok(out)
        }
        3 => {
            if let Shape::Box { lower, upper } = d.shape() {
                let mut out = Vec::new();
                for axis in 0..3 {
                    let free = [(axis + 1) % 3, (axis + 2) % 3];
                    for (value, sign) in [(lower[axis], -1i8), (upper[axis], 1)] {
                        out.push(BoundaryChart {
                            component: 0,
                            lower: vec![lower[free[0]], lower[free[1]]],
                            upper: vec![upper[free[0]], upper[free[1]]],
                            periodic: false,
                            orientation: sign,
                            embedding: ChartEmbedding::Face { axis, value, free },
                        });
                    }
                }
                return Ok(out);
            }
            let mut out = Vec::new();
            for s in d.sphere_components()? {
                for face in 0..6 {
                    let sign: i8 = if face % 2 == 0 { 1 } else { -1 };
                    out.push(BoundaryChart {
                        component: s.component,
                        lower: vec![-1.0, -1.0],
                        upper: vec![1.0, 1.0],
                        periodic: false,
                        orientation: sign * s.orientation,
                        embedding: ChartEmbedding::Gnomonic {
                            sphere: s.clone(),
                            face,
                        },
                    });
                }
            }
            Ok(out)
        }
        n => Err(Error::Unsupported(format!(
            "boundary charts in dimension {n}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::PointClass;

    fn angle_sum(points: &[[f64; 2]]) -> f64 {
        let mut total = 0.0;
        for w in points.windows(2) {
            let a = w[0][1].atan2(w[0][0]);
            let b = w[1][1].atan2(w[1][0]);
            let mut d = b - a;
            while d > std::f64::consts::PI {
                d -= TAU;
            }
            while d < -std::f64::consts::PI {
                d += TAU;
            }
            total += d;
        }
        total / TAU
    }

    #[test]
    fn chart_counts() {
        let ball = Domain::unit_ball(2, 1.0).unwrap();
        let c = boundary_charts(&ball).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].periodic);
        assert!((c[0].upper[0] - TAU).abs() < 1e-15);
        let bx = Domain::cuboid(vec![0.0, 0.0], vec![1.0, 2.0], 0.5).unwrap();
        assert_eq!(boundary_charts(&bx).unwrap().len(), 4);
        let ann = Domain::annulus(1.0, 2.0, 0.5).unwrap();
        let a = boundary_charts(&ann).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].orientation, -a[1].orientation);
        assert_eq!(
            boundary_charts(&Domain::unit_ball(3, 1.0).unwrap())
                .unwrap()
                .len(),
            6
        );
        assert_eq!(
            boundary_charts(&Domain::shell(1.0, 2.0, 0.5).unwrap())
                .unwrap()
                .len(),
            12
        );
    }

    #[test]
    fn charts_land_on_the_boundary() {
        let domains = [
            Domain::unit_ball(2, 1.0).unwrap(),
            Domain::cuboid(vec![0.0, 0.0], vec![1.0, 2.0], 0.5).unwrap(),
            Domain::annulus(1.0, 2.0, 0.5).unwrap(),
            Domain::cuboid(vec![-1.0, 0.0, 0.0], vec![1.0, 1.0, 3.0], 0.5).unwrap(),
            Domain::cuboid(vec![-1.0], vec![2.0], 0.5).unwrap(),
        ];
        for d in &domains {
            for c in boundary_charts(d).unwrap() {
                for k in 0..=8 {
                    let u: Vec<f64> = c
                        .lower
                        .iter()
                        .zip(&c.upper)
                        .map(|(a, b)| a + (b - a) * k as f64 / 8.0)
                        .collect();
                    let p = c.embed(&u);
                    if matches!(c.embedding, ChartEmbedding::Loop { .. }) {
                        assert!(d.signed_distance(&p).abs() < 1e-15);
                    } else {
                        assert_eq!(d.classify(&p).unwrap(), PointClass::Boundary, "{p:?}");
                    }
                }
            }
        }
        let s = Domain::shell(1.0, 2.0, 0.5).unwrap();
        for c in boundary_charts(&s).unwrap() {
            let p = c.embed(&[0.3, -0.7]);
            assert!(s.signed_distance(&p).abs() < 1e-12);
        }
    }

    #[test]
    fn loops_wind_once_around_the_hole() {
        let ann = Domain::annulus(1.0, 2.0, 0.5).unwrap();
        for l in ann.boundary_loops().unwrap() {
            let pts: Vec<[f64; 2]> = (0..=64)
                .map(|k| l.point(l.period() * k as f64 / 64.0))
                .collect();
            assert!((angle_sum(&pts) - 1.0).abs() < 1e-12);
            // the induced orientation winds oppositely on the hole
            assert!((angle_sum(&pts) * l.orientation as f64).abs() - 1.0 < 1e-12);
        }
        let bx = Domain::cuboid(vec![-1.0, -2.0], vec![1.0, 1.0], 0.5).unwrap();
        let l = &bx.boundary_loops().unwrap()[0];
        let pts: Vec<[f64; 2]> = (0..=400)
            .map(|k| l.point(l.period() * k as f64 / 400.0))
            .collect();
        assert!((angle_sum(&pts) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outward_normals_leave_m() {
        let ann = Domain::annulus(1.0, 2.0, 0.5).unwrap();
        for l in ann.boundary_loops().unwrap() {
            for k in 0..16 {
                let s = l.period() * (k as f64 + 0.5) / 16.0;
                let p = l.point(s);
                let n = l.outward_normal(s);
                let q = [p[0] + 0.1 * n[0], p[1] + 0.1 * n[1]];
                assert_eq!(ann.classify(&q).unwrap(), PointClass::Collar);
            }
        }
    }

    #[test]
    fn loop_parameters_invert_points() {
        let bx = Domain::cuboid(vec![-1.0, -2.0], vec![1.0, 1.0], 0.5).unwrap();
        let l = &bx.boundary_loops().unwrap()[0];
        for k in 0..40 {
            let s = l.period() * (k as f64 + 0.25) / 40.0;
            assert!((l.param_of(&l.point(s)) - s).abs() < 1e-12);
        }
    }

    #[test]
    fn gnomonic_round_trip() {
        for face in 0..6 {
            let u = gnomonic_point(face, 0.3, -0.8);
            let c = gnomonic_coords(face, &u).unwrap();
            assert!((c[0] - 0.3).abs() < 1e-14 && (c[1] + 0.8).abs() < 1e-14);
            let (f2, _) = gnomonic_face_of(&u);
            assert_eq!(f2, face);
        }
    }
}
