use serde::{Deserialize, Serialize};

use super::norm;
use crate::error::{Error, Result};

/// One factor of a gridded region, parametrised by the cube `[-1,1]^k`
/// (or the cube shell `1/2 <= |u|_inf <= 1` when the factor has a hole).
///
/// The parametrisation sends `|u|_inf` to the radial coordinate, so it is an
/// orientation-preserving homeomorphism onto the closed region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum FactorShape {
    /// `r_in < |x - center| < r_out`; a solid ball when `r_in == 0`.
    Radial {
        center: Vec<f64>,
        r_in: f64,
        r_out: f64,
    },
    /// Outer box `|x_i - c_i| < half_out_i` minus the closed inner box with
    /// half-widths `half_in` (no hole when all are zero).
    Axis {
        center: Vec<f64>,
        half_in: Vec<f64>,
        half_out: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFactor {
    pub shape: FactorShape,
}

impl GridFactor {
    pub fn dim(&self) -> usize {
        match &self.shape {
            FactorShape::Radial { center, .. } | FactorShape::Axis { center, .. } => center.len(),
        }
    }

    pub fn has_hole(&self) -> bool {
        match &self.shape {
            FactorShape::Radial { r_in, .. } => *r_in > 0.0,
            FactorShape::Axis { half_in, .. } => half_in.iter().any(|&h| h > 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match &self.shape {
            FactorShape::Radial {
                center,
                r_in,
                r_out,
            } => !center.is_empty() && *r_in >= 0.0 && r_out > r_in && r_out.is_finite(),
            FactorShape::Axis {
                center,
                half_in,
                half_out,
            } => {
                let k = center.len();
                let hole = half_in.iter().any(|&h| h > 0.0);
                k > 0
                    && half_in.len() == k
                    && half_out.len() == k
                    && half_out.iter().all(|h| *h > 0.0 && h.is_finite())
                    && (!hole || half_in.iter().zip(half_out).all(|(a, b)| *a > 0.0 && a < b))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("malformed region factor {self:?}")))
        }
    }

    /// Maps a parameter point of `[-1,1]^k` to the region.
    pub fn to_point(&self, u: &[f64]) -> Vec<f64> {
        let s = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lambda = if self.has_hole() { (s - 0.5) / 0.5 } else { s };
        match &self.shape {
            FactorShape::Radial {
                center,
                r_in,
                r_out,
            } => {
                if s == 0.0 {
                    return center.clone();
                }
                let r = r_in + lambda * (r_out - r_in);
                let l = norm(u);
                center.iter().zip(u).map(|(c, x)| c + r * x / l).collect()
            }
            FactorShape::Axis {
                center,
                half_in,
                half_out,
            } => {
                if s == 0.0 {
                    return center.clone();
                }
                center
                    .iter()
                    .zip(u)
                    .zip(half_in.iter().zip(half_out))
                    .map(|((c, x), (hi, ho))| c + (x / s) * (hi + lambda * (ho - hi)))
                    .collect()
            }
        }
    }

    /// Signed distance to the frontier, positive inside the open region.
    pub fn frontier_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            FactorShape::Radial {
                center,
                r_in,
                r_out,
            } => {
                let r = x
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                if *r_in > 0.0 {
                    (r - r_in).min(r_out - r)
                } else {
                    r_out - r
                }
            }
            FactorShape::Axis {
                center,
                half_in,
                half_out,
            } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| (a - c).abs()).collect();
                let outer = d
                    .iter()
                    .zip(half_out)
                    .map(|(di, h)| h - di)
                    .fold(f64::INFINITY, f64::min);
                if !self.has_hole() {
                    return outer;
                }
                // signed distance to the inner box, positive outside it
                let excess: Vec<f64> = d.iter().zip(half_in).map(|(di, h)| di - h).collect();
                let max_ex = excess.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let inner = if max_ex <= 0.0 {
                    max_ex
                } else {
                    excess
                        .iter()
                        .map(|e| e.max(0.0).powi(2))
                        .sum::<f64>()
                        .sqrt()
                };
                outer.min(inner)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            FactorShape::Radial { r_out, .. } => 2.0 * r_out,
            FactorShape::Axis { half_out, .. } => 2.0 * norm(half_out),
        }
    }
}

/// A closed frontier curve of a planar region, with the sign of its
/// orientation relative to the boundary orientation of the region.
#[derive(Debug, Clone, PartialEq)]
pub enum FrontierCurve {
    Circle {
        center: [f64; 2],
        radius: f64,
        sign: i64,
    },
    /// Traversed counterclockwise from the lower-left corner.
    Rectangle {
        lower: [f64; 2],
        upper: [f64; 2],
        sign: i64,
    },
}

impl FrontierCurve {
    pub fn sign(&self) -> i64 {
        match self {
            FrontierCurve::Circle { sign, .. } | FrontierCurve::Rectangle { sign, .. } => *sign,
        }
    }

    /// Point at parameter `t` in `[0, 1]`, counterclockwise.
    pub fn point(&self, t: f64) -> Vec<f64> {
        match self {
            FrontierCurve::Circle { center, radius, .. } => {
                let a = std::f64::consts::TAU * t;
                vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
            FrontierCurve::Rectangle { lower, upper, .. } => {
                let (w, h) = (upper[0] - lower[0], upper[1] - lower[1]);
                let s = t.rem_euclid(1.0) * 2.0 * (w + h);
                if s < w {
                    vec![lower[0] + s, lower[1]]
                } else if s < w + h {
                    vec![upper[0], lower[1] + (s - w)]
                } else if s < 2.0 * w + h {
                    vec![upper[0] - (s - w - h), upper[1]]
                } else {
                    vec![lower[0], upper[1] - (s - 2.0 * w - h)]
                }
            }
        }
    }
}

/// Open intervals making up a one-dimensional factor.
fn intervals(f: &GridFactor) -> Vec<(f64, f64)> {
    let (c, a, b) = match &f.shape {
        FactorShape::Radial {
            center,
            r_in,
            r_out,
        } => (center[0], *r_in, *r_out),
        FactorShape::Axis {
            center,
            half_in,
            half_out,
        } => (center[0], half_in[0], half_out[0]),
    };
    if a > 0.0 {
        vec![(c - b, c - a), (c + a, c + b)]
    } else {
        vec![(c - b, c + b)]
    }
}

/// A lattice point of a gridded region.
#[derive(Debug, Clone, PartialEq)]
pub struct GridVertex {
    pub index: Vec<usize>,
    pub point: Vec<f64>,
    pub frontier: bool,
}

/// A product of gridded factors; every catalog region, enclosure, collar
/// band and product region is one of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GriddedRegion {
    factors: Vec<GridFactor>,
}

impl GriddedRegion {
    pub fn new(factors: Vec<GridFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("region needs at least one factor".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        Ok(GriddedRegion { factors })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::new(vec![GridFactor {
            shape: FactorShape::Radial {
                center,
                r_in: 0.0,
                r_out: radius,
            },
        }])
    }

    pub fn shell(center: Vec<f64>, r_in: f64, r_out: f64) -> Result<Self> {
        if r_in <= 0.0 {
            return Err(Error::Invalid("shell needs a positive inner radius".into()));
        }
        Self::new(vec![GridFactor {
            shape: FactorShape::Radial {
                center,
                r_in,
                r_out,
            },
        }])
    }

    pub fn cuboid(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() || lower.iter().zip(upper).any(|(a, b)| a >= b) {
            return Err(Error::Invalid(
                "box needs lower < upper componentwise".into(),
            ));
        }
        let center = lower
            .iter()
            .zip(upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let half_out = lower
            .iter()
            .zip(upper)
            .map(|(a, b)| 0.5 * (b - a))
            .collect();
        Self::new(vec![GridFactor {
            shape: FactorShape::Axis {
                center,
                half_in: vec![0.0; lower.len()],
                half_out,
            },
        }])
    }

    pub fn box_shell(center: Vec<f64>, half_in: Vec<f64>, half_out: Vec<f64>) -> Result<Self> {
        Self::new(vec![GridFactor {
            shape: FactorShape::Axis {
                center,
                half_in,
                half_out,
            },
        }])
    }

    pub fn product(&self, other: &GriddedRegion) -> GriddedRegion {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        GriddedRegion { factors }
    }

    pub fn factors(&self) -> &[GridFactor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(GridFactor::dim).sum()
    }

    pub fn has_hole(&self) -> bool {
        self.factors.iter().any(GridFactor::has_hole)
    }

    pub fn to_point(&self, u: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(u.len());
        let mut off = 0;
        for f in &self.factors {
            let k = f.dim();
            out.extend(f.to_point(&u[off..off + k]));
            off += k;
        }
        out
    }

    /// Signed distance to the frontier of the product, positive inside.
    pub fn frontier_distance(&self, x: &[f64]) -> f64 {
        let mut off = 0;
        let mut d = f64::INFINITY;
        for f in &self.factors {
            let k = f.dim();
            d = d.min(f.frontier_distance(&x[off..off + k]));
            off += k;
        }
        d
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.frontier_distance(x) > 0.0
    }

    /// Frontier curves of a planar region, `None` in other dimensions.
    pub fn frontier_curves(&self) -> Option<Vec<FrontierCurve>> {
        if self.dim() != 2 {
            return None;
        }
        let mut out = Vec::new();
        match &self.factors[..] {
            [f] => match &f.shape {
                FactorShape::Radial {
                    center,
                    r_in,
                    r_out,
                } => {
                    let c = [center[0], center[1]];
                    out.push(FrontierCurve::Circle {
                        center: c,
                        radius: *r_out,
                        sign: 1,
                    });
                    if *r_in > 0.0 {
                        out.push(FrontierCurve::Circle {
                            center: c,
                            radius: *r_in,
                            sign: -1,
                        });
                    }
                }
                FactorShape::Axis {
                    center,
                    half_in,
                    half_out,
                } => {
                    let rect = |h: &[f64], sign| FrontierCurve::Rectangle {
                        lower: [center[0] - h[0], center[1] - h[1]],
                        upper: [center[0] + h[0], center[1] + h[1]],
                        sign,
                    };
                    out.push(rect(half_out, 1));
                    if f.has_hole() {
                        out.push(rect(half_in, -1));
                    }
                }
            },
            [a, b] => {
                for (x0, x1) in intervals(a) {
                    for (y0, y1) in intervals(b) {
                        out.push(FrontierCurve::Rectangle {
                            lower: [x0, y0],
                            upper: [x1, y1],
                            sign: 1,
                        });
                    }
                }
            }
            _ => return None,
        }
        Some(out)
    }

    pub fn diameter(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| f.diameter().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Smallest admissible resolution not below `n`: holes need the inner
    /// cube to be grid aligned.
    pub(crate) fn admissible_resolution(&self, n: usize) -> usize {
        let n = n.max(2);
        if self.has_hole() {
            n.div_ceil(4) * 4
        } else {
            n
        }
    }

    /// Vertices of the closed region at resolution `n` (rounded up to an
    /// admissible one), with their multi-indices and whether they lie on the
    /// frontier.
    pub fn grid_vertices(&self, n: usize) -> (usize, Vec<GridVertex>) {
        let n = self.admissible_resolution(n);
        let d = self.dim();
        let total = (n + 1).pow(d as u32);
        let mut out = Vec::new();
        for mut id in 0..total {
            let mut m = vec![0usize; d];
            for v in m.iter_mut() {
                *v = id % (n + 1);
                id /= n + 1;
            }
            if !self.vertex_in_closure(&m, n) {
                continue;
            }
            let u: Vec<f64> = m
                .iter()
                .map(|&j| -1.0 + 2.0 * j as f64 / n as f64)
                .collect();
            let frontier = self.vertex_on_frontier(&m, n);
            out.push(GridVertex {
                index: m,
                point: self.to_point(&u),
                frontier,
            });
        }
        (n, out)
    }

    fn vertex_on_frontier(&self, v: &[usize], n: usize) -> bool {
        let mut off = 0;
        for f in &self.factors {
            let k = f.dim();
            let part = &v[off..off + k];
            if part.iter().any(|&j| j == 0 || j == n) {
                return true;
            }
            if f.has_hole()
                && part
                    .iter()
                    .map(|&j| 2 * (2 * j as i64 - n as i64).abs())
                    .max()
                    == Some(n as i64)
            {
                return true;
            }
            off += k;
        }
        false
    }

    /// Whether the grid cell with lower corner `cell` (resolution `n`) is
    /// part of the region.
    pub(crate) fn cell_included(&self, cell: &[usize], n: usize) -> bool {
        let mut off = 0;
        for f in &self.factors {
            let k = f.dim();
            if f.has_hole() {
                // centre coordinate u = -1 + (2i+1)/n; need max |u| > 1/2
                let outside = cell[off..off + k]
                    .iter()
                    .any(|&i| (4 * i as i64 + 2 - 2 * n as i64).abs() > n as i64);
                if !outside {
                    return false;
                }
            }
            off += k;
        }
        true
    }

    /// Whether grid vertex `v` lies in the closed region.
    pub(crate) fn vertex_in_closure(&self, v: &[usize], n: usize) -> bool {
        let mut off = 0;
        for f in &self.factors {
            let k = f.dim();
            if f.has_hole() {
                let outside = v[off..off + k]
                    .iter()
                    .any(|&j| 2 * (2 * j as i64 - n as i64).abs() >= n as i64);
                if !outside {
                    return false;
                }
            }
            off += k;
        }
        true
    }
}
