use serde::{Deserialize, Serialize};

use crate::degree::{FactorShape, GridFactor, GriddedRegion};
use crate::error::{Error, Result};

/// Open region on which an index is computed: balls, boxes, spherical and
/// box shells, their products, and finite disjoint unions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Shell {
        center: Vec<f64>,
        inner: f64,
        outer: f64,
    },
    BoxShell {
        center: Vec<f64>,
        half_in: Vec<f64>,
        half_out: Vec<f64>,
    },
    Product {
        factors: Vec<Region>,
    },
    /// Pieces must have pairwise disjoint closures.
    Union {
        parts: Vec<Region>,
    },
}

impl Region {
    pub fn ball(center: Vec<f64>, radius: f64) -> Region {
        Region::Ball { center, radius }
    }

    pub fn product(factors: Vec<Region>) -> Region {
        Region::Product { factors }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Ball { center, .. }
            | Region::Shell { center, .. }
            | Region::BoxShell { center, .. } => center.len(),
            Region::Box { lower, .. } => lower.len(),
            Region::Product { factors } => factors.iter().map(Region::dim).sum(),
            Region::Union { parts } => parts.first().map_or(0, Region::dim),
        }
    }

    /// The connected pieces as grids.
    pub fn pieces(&self) -> Result<Vec<GriddedRegion>> {
        match self {
            Region::Ball { center, radius } => {
                Ok(vec![GriddedRegion::ball(center.clone(), *radius)?])
            }
            Region::Box { lower, upper } => Ok(vec![GriddedRegion::cuboid(lower, upper)?]),
            Region::Shell {
                center,
                inner,
                outer,
            } => Ok(vec![GriddedRegion::shell(center.clone(), *inner, *outer)?]),
            Region::BoxShell {
                center,
                half_in,
                half_out,
            } => Ok(vec![GriddedRegion::box_shell(
                center.clone(),
                half_in.clone(),
                half_out.clone(),
            )?]),
            Region::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::Invalid("empty product region".into()));
                }
                let mut acc: Option<GriddedRegion> = None;
                for f in factors {
                    let mut p = f.pieces()?;
                    if p.len() != 1 {
                        return Err(Error::Unsupported(
                            "products of unions; distribute the union instead".into(),
                        ));
                    }
                    let p = p.remove(0);
                    acc = Some(match acc {
                        None => p,
                        Some(a) => a.product(&p),
                    });
                }
                Ok(vec![acc.unwrap()])
            }
            Region::Union { parts } => {
                if parts.is_empty() {
                    return Err(Error::Invalid("empty union region".into()));
                }
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.pieces()?);
                }
                let d = out[0].dim();
                if out.iter().any(|p| p.dim() != d) {
                    return Err(Error::Invalid("union parts differ in dimension".into()));
                }
                for i in 0..out.len() {
                    for j in i + 1..out.len() {
                        if !separated(&out[i], &out[j]) {
                            return Err(Error::Invalid(format!(
                                "union parts {i} and {j} may overlap; parts must have disjoint closures"
                            )));
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Signed distance to the frontier, positive inside.
    pub fn frontier_distance(&self, x: &[f64]) -> Result<f64> {
        Ok(self
            .pieces()?
            .iter()
            .map(|p| p.frontier_distance(x))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.frontier_distance(x)? > 0.0)
    }
}

pub(crate) fn bounding_box(g: &GriddedRegion) -> (Vec<f64>, Vec<f64>) {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for f in g.factors() {
        match &f.shape {
            FactorShape::Radial { center, r_out, .. } => {
                lo.extend(center.iter().map(|c| c - r_out));
                hi.extend(center.iter().map(|c| c + r_out));
            }
            FactorShape::Axis {
                center, half_out, ..
            } => {
                lo.extend(center.iter().zip(half_out).map(|(c, h)| c - h));
                hi.extend(center.iter().zip(half_out).map(|(c, h)| c + h));
            }
        }
    }
    (lo, hi)
}

/// Conservative disjointness test on closures via bounding boxes.
fn separated(a: &GriddedRegion, b: &GriddedRegion) -> bool {
    let (alo, ahi) = bounding_box(a);
    let (blo, bhi) = bounding_box(b);
    (0..alo.len()).any(|i| ahi[i] < blo[i] || bhi[i] < alo[i])
}

impl From<GriddedRegion> for Region {
    fn from(g: GriddedRegion) -> Region {
        let mut parts: Vec<Region> = g.factors().iter().map(factor_region).collect();
        if parts.len() == 1 {
            parts.remove(0)
        } else {
            Region::Product { factors: parts }
        }
    }
}

fn factor_region(f: &GridFactor) -> Region {
    match &f.shape {
        FactorShape::Radial {
            center,
            r_in,
            r_out,
        } => {
            if *r_in > 0.0 {
                Region::Shell {
                    center: center.clone(),
                    inner: *r_in,
                    outer: *r_out,
                }
            } else {
                Region::Ball {
                    center: center.clone(),
                    radius: *r_out,
                }
            }
        }
        FactorShape::Axis {
            center,
            half_in,
            half_out,
        } => {
            if f.has_hole() {
                Region::BoxShell {
                    center: center.clone(),
                    half_in: half_in.clone(),
                    half_out: half_out.clone(),
                }
            } else {
                Region::Box {
                    lower: center.iter().zip(half_out).map(|(c, h)| c - h).collect(),
                    upper: center.iter().zip(half_out).map(|(c, h)| c + h).collect(),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_requires_separated_parts() {
        let ok = Region::Union {
            parts: vec![
                Region::ball(vec![0.0, 0.0], 1.0),
                Region::ball(vec![3.0, 0.0], 1.0),
            ],
        };
        assert_eq!(ok.pieces().unwrap().len(), 2);
        assert!(ok.contains(&[3.5, 0.0]).unwrap());
        assert!(!ok.contains(&[1.5, 0.0]).unwrap());
        let bad = Region::Union {
            parts: vec![
                Region::ball(vec![0.0, 0.0], 1.0),
                Region::ball(vec![1.5, 0.0], 1.0),
            ],
        };
        assert!(bad.pieces().is_err());
    }

    #[test]
    fn grid_round_trip() {
        let r = Region::product(vec![
            Region::ball(vec![0.0, 0.0], 1.0),
            Region::Box {
                lower: vec![-1.0],
                upper: vec![2.0],
            },
        ]);
        let g = r.pieces().unwrap().remove(0);
        assert_eq!(Region::from(g), r);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<Region>(&json).unwrap(), r);
    }
}
