//! Boundary spheres of three-dimensional domains, handled through the six
//! gnomonic cube-face charts of the unit sphere.

use rayon::prelude::*;

use super::boundary::BoundaryFixedPoint;
use super::exit::ExitPiece;
use super::{retracted, CollarConfig};
use crate::degree::{dist, norm, solve, winding_degree, WindingBudget};
use crate::domains::{
    gnomonic_coords, gnomonic_face_of, gnomonic_point, Domain, Retraction, SphereComponent,
};
use crate::error::{Error, Result};
use crate::mapexpr::{FnMap, VectorMap};

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn cross(u: &[f64], v: &[f64]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn angle(u: &[f64], v: &[f64]) -> f64 {
    norm(&cross(u, v)).atan2(dot(u, v))
}

#[derive(Debug, Clone)]
struct Cell {
    face: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    depth: u32,
}

impl Cell {
    fn center(&self) -> [f64; 3] {
        gnomonic_point(
            self.face,
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
        )
    }

    /// Largest angle from the centre direction to the cell; gnomonic cells
    /// are convex spherical quadrilaterals, so a corner attains it.
    fn radius(&self) -> f64 {
        let c = self.center();
        [
            (self.lo[0], self.lo[1]),
            (self.hi[0], self.lo[1]),
            (self.lo[0], self.hi[1]),
            (self.hi[0], self.hi[1]),
        ]
        .iter()
        .map(|&(a, b)| angle(&c, &gnomonic_point(self.face, a, b)))
        .fold(0.0, f64::max)
    }

    fn children(&self) -> [Cell; 4] {
        let m = [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
        ];
        let mk = |lo: [f64; 2], hi: [f64; 2]| Cell {
            face: self.face,
            lo,
            hi,
            depth: self.depth + 1,
        };
        [
            mk(self.lo, m),
            mk([m[0], self.lo[1]], [self.hi[0], m[1]]),
            mk([self.lo[0], m[1]], [m[0], self.hi[1]]),
            mk(m, self.hi),
        ]
    }
}

fn grid(res: usize) -> Vec<Cell> {
    let h = 2.0 / res as f64;
    let mut out = Vec::with_capacity(6 * res * res);
    for face in 0..6 {
        for j in 0..res {
            for i in 0..res {
                let lo = [-1.0 + i as f64 * h, -1.0 + j as f64 * h];
                out.push(Cell {
                    face,
                    lo,
                    hi: [lo[0] + h, lo[1] + h],
                    depth: 0,
                });
            }
        }
    }
    out
}

/// Values of `h` at the centres of a `res x res` grid per face, with the
/// largest slope per unit angle between neighbours in a face.
fn sample_grid<T: Send>(
    res: usize,
    h: &(dyn Fn(&[f64]) -> Result<T> + Sync),
    scalar: &(dyn Fn(&T) -> Vec<f64> + Sync),
) -> Result<(Vec<Cell>, Vec<T>, f64)> {
    let cells = grid(res);
    let values: Vec<T> = cells
        .par_iter()
        .map(|c| h(&c.center()))
        .collect::<Result<_>>()?;
    let mut slope: f64 = 0.0;
    for face in 0..6 {
        for j in 0..res {
            for i in 0..res {
                let k = face * res * res + j * res + i;
                let mut nbs = Vec::new();
                if i + 1 < res {
                    nbs.push(k + 1);
                }
                if j + 1 < res {
                    nbs.push(k + res);
                }
                for m in nbs {
                    let a = angle(&cells[k].center(), &cells[m].center());
                    slope = slope.max(dist(&scalar(&values[k]), &scalar(&values[m])) / a);
                }
            }
        }
    }
    Ok((cells, values, slope))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Sign {
    Positive,
    Negative,
    Undecided,
}

/// Exit patches of one boundary sphere, whether the exit set certifiably
/// covers it, and whether it is certifiably empty on it.
pub(crate) fn exit_patches(
    f: &dyn VectorMap,
    d: &Domain,
    comp: &SphereComponent,
    cfg: &CollarConfig,
) -> Result<(Vec<ExitPiece>, bool, bool)> {
    let t_of = |u: &[f64]| -> Result<f64> {
        let fx = f.apply(&comp.point(u))?;
        Ok(d.collar_parameter(&fx))
    };
    let res = 8;
    let (cells, _, slope) = sample_grid(res, &t_of, &|v: &f64| vec![*v])?;
    let lip = cfg.lipschitz_safety * slope;
    let max_depth = 4;
    let decided: Vec<Vec<(Cell, Sign, f64)>> = cells
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            let mut stack = vec![c];
            while let Some(c) = stack.pop() {
                let t = t_of(&c.center())?;
                let r = lip * c.radius();
                let sign = if t > r {
                    Sign::Positive
                } else if t < -r {
                    Sign::Negative
                } else if c.depth < max_depth {
                    stack.extend(c.children());
                    continue;
                } else {
                    Sign::Undecided
                };
                out.push((c, sign, t - r));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let decided: Vec<(Cell, Sign, f64)> = decided.into_iter().flatten().collect();
    let covers = decided.iter().all(|c| c.1 == Sign::Positive);
    let empty = decided.iter().all(|c| c.1 == Sign::Negative);
    let mut pieces = Vec::new();
    for face in 0..6 {
        let on_face: Vec<&(Cell, Sign, f64)> =
            decided.iter().filter(|c| c.0.face == face).collect();
        let positive: Vec<&&(Cell, Sign, f64)> =
            on_face.iter().filter(|c| c.1 == Sign::Positive).collect();
        if positive.is_empty() {
            continue;
        }
        if positive.len() == on_face.len() {
            let min_collar = positive.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
            pieces.push(ExitPiece::Patch {
                component: comp.component,
                face,
                lower: [-1.0, -1.0],
                upper: [1.0, 1.0],
                min_collar,
            });
        } else {
            for c in positive {
                pieces.push(ExitPiece::Patch {
                    component: comp.component,
                    face,
                    lower: c.0.lo,
                    upper: c.0.hi,
                    min_collar: c.2,
                });
            }
        }
    }
    Ok((pieces, covers, empty))
}

/// `rf` seen on one boundary sphere: ambient value and whether it lands on
/// the same component.
struct SphereMap<'a> {
    d: &'a Domain,
    comp: &'a SphereComponent,
    f: &'a dyn VectorMap,
    rf: FnMap<'a>,
}

impl SphereMap<'_> {
    fn point(&self, u: &[f64]) -> Vec<f64> {
        self.comp.point(u)
    }

    fn image(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.rf.apply(&self.point(u))?)
    }

    fn displacement(&self, u: &[f64]) -> Result<Vec<f64>> {
        let x = self.point(u);
        let y = self.rf.apply(&x)?;
        Ok(x.iter().zip(&y).map(|(a, b)| a - b).collect())
    }

    /// Chart residual `c - c(dir(rf(x(c))))` on `face`, when defined.
    fn residual(&self, face: usize, c: &[f64]) -> Result<Option<[f64; 2]>> {
        let u = gnomonic_point(face, c[0], c[1]);
        let y = self.image(&u)?;
        if self.d.sphere_component_of(&y) != self.comp.component {
            return Ok(None);
        }
        let v = self.comp.direction_of(&y);
        Ok(gnomonic_coords(face, &v).map(|w| [c[0] - w[0], c[1] - w[1]]))
    }

    fn exits(&self, u: &[f64]) -> Result<bool> {
        let fx = self.f.apply(&self.point(u))?;
        Ok(self.d.collar_parameter(&fx) > 0.0)
    }
}

fn newton(m: &SphereMap, face: usize, start: [f64; 2]) -> Result<Option<[f64; 2]>> {
    let mut c = start;
    let Some(mut r) = m.residual(face, &c)? else {
        return Ok(None);
    };
    for _ in 0..60 {
        let rn = norm(&r);
        if rn < 1e-13 {
            return Ok(Some(c));
        }
        let h = 1e-7;
        let mut jac = vec![0.0; 4];
        for k in 0..2 {
            let mut cp = c;
            let mut cm = c;
            cp[k] += h;
            cm[k] -= h;
            let (Some(rp), Some(rm)) = (m.residual(face, &cp)?, m.residual(face, &cm)?) else {
                return Ok(None);
            };
            for i in 0..2 {
                jac[i * 2 + k] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let Some(step) = solve(jac, vec![-r[0], -r[1]], 2) else {
            return Ok(None);
        };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let y = [c[0] + t * step[0], c[1] + t * step[1]];
            if y[0].abs() < 3.0 && y[1].abs() < 3.0 {
                if let Some(ry) = m.residual(face, &y)? {
                    if norm(&ry) < rn {
                        c = y;
                        r = ry;
                        moved = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !moved {
            return Ok((rn < 1e-9).then_some(c));
        }
    }
    Ok((norm(&r) < 1e-9).then_some(c))
}

/// Index of `rf` on the exit set of one boundary sphere: fixed points are
/// found by Newton in the cube-face charts, each gets the winding number of
/// its chart residual around a small cap, and the rest of the sphere is
/// certified free of fixed points.
pub(crate) fn sphere_boundary_index(
    f: &dyn VectorMap,
    d: &Domain,
    comp: &SphereComponent,
    r: Retraction,
    cfg: &CollarConfig,
) -> Result<(i64, Vec<BoundaryFixedPoint>)> {
    let m = SphereMap {
        d,
        comp,
        f,
        rf: retracted(f, d, r),
    };
    let res = cfg.sphere_resolution.max(4);
    let disp = |u: &[f64]| m.displacement(u);
    let (cells, values, slope) = sample_grid(res, &disp, &|v: &Vec<f64>| v.clone())?;
    let mags: Vec<f64> = values.iter().map(|v| norm(v)).collect();

    // seeds: local minima of |x - rf(x)| within a face, on the exit set
    let mut seeds = Vec::new();
    for face in 0..6 {
        for j in 0..res {
            for i in 0..res {
                let k = face * res * res + j * res + i;
                let mut is_min = true;
                for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= res as i64 || nj >= res as i64 {
                        continue;
                    }
                    let q = face * res * res + nj as usize * res + ni as usize;
                    if mags[q] < mags[k] {
                        is_min = false;
                    }
                }
                if is_min && m.exits(&cells[k].center())? {
                    let c = &cells[k];
                    seeds.push((face, [0.5 * (c.lo[0] + c.hi[0]), 0.5 * (c.lo[1] + c.hi[1])]));
                }
            }
        }
    }
    let roots: Vec<Option<[f64; 3]>> = seeds
        .par_iter()
        .map(|(face, c)| Ok(newton(&m, *face, *c)?.map(|c| gnomonic_point(*face, c[0], c[1]))))
        .collect::<Result<_>>()?;
    let mut found: Vec<[f64; 3]> = Vec::new();
    for u in roots.into_iter().flatten() {
        if !found.iter().any(|v| angle(v, &u) < 1e-7) {
            found.push(u);
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for u in &found {
        if !m.exits(u)? {
            return Err(Error::Precondition(format!(
                "f fixes the boundary point {:?}",
                m.point(u)
            )));
        }
    }

    let caps: Vec<f64> = found
        .iter()
        .enumerate()
        .map(|(i, u)| {
            found
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| 0.3 * angle(u, v))
                .fold(0.1, f64::min)
        })
        .collect();

    let mut points = Vec::new();
    let mut total = 0;
    for (u, &cap) in found.iter().zip(&caps) {
        let idx = cap_index(&m, u, cap)?;
        total += idx;
        points.push(BoundaryFixedPoint {
            component: comp.component,
            location: m.point(u),
            local_index: idx,
        });
    }

    certify_sphere_complement(
        &m,
        &found,
        &caps,
        cfg.lipschitz_safety * slope,
        cfg.sphere_depth,
    )?;
    Ok((total, points))
}

/// Winding number of the chart residual around the cap of angular radius
/// `cap` about `u`, in the chart of the face containing `u`.
fn cap_index(m: &SphereMap, u: &[f64; 3], cap: f64) -> Result<i64> {
    let (face, _) = gnomonic_face_of(u);
    // orthonormal tangent frame at u
    let a = if u[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = super::unit(&cross(u, &a));
    let e2 = cross(u, &e1);
    let (cc, sc) = (cap.cos(), cap.sin());
    let on_cap = |phi: f64| -> [f64; 3] {
        let (c, s) = (phi.cos(), phi.sin());
        [
            cc * u[0] + sc * (c * e1[0] + s * e2[0]),
            cc * u[1] + sc * (c * e1[1] + s * e2[1]),
            cc * u[2] + sc * (c * e1[2] + s * e2[2]),
        ]
    };
    let coords = |phi: f64| -> Vec<f64> {
        gnomonic_coords(face, &on_cap(phi))
            .map(|w| w.to_vec())
            .unwrap_or_else(|| vec![f64::NAN, f64::NAN])
    };
    // orient the loop counterclockwise in chart coordinates
    let mut area = 0.0;
    let k = 16;
    for i in 0..k {
        let p = coords(std::f64::consts::TAU * i as f64 / k as f64);
        let q = coords(std::f64::consts::TAU * (i + 1) as f64 / k as f64);
        area += p[0] * q[1] - p[1] * q[0];
    }
    if !area.is_finite() {
        return Err(Error::Internal("fixed point cap leaves its chart".into()));
    }
    let sign = if area > 0.0 { 1.0 } else { -1.0 };
    let curve = move |t: f64| coords(sign * std::f64::consts::TAU * t);
    let residual = FnMap::new(2, 2, move |c| {
        m.residual(face, c)
            .map_err(|e| crate::mapexpr::EvalError::Domain(e.to_string()))?
            .map(|r| r.to_vec())
            .ok_or_else(|| crate::mapexpr::EvalError::Domain("image leaves the chart".into()))
    });
    Ok(winding_degree(&residual, &curve, [0.0, 0.0], &WindingBudget::default())?.degree)
}

fn certify_sphere_complement(
    m: &SphereMap,
    fixed: &[[f64; 3]],
    caps: &[f64],
    lipschitz: f64,
    max_depth: u32,
) -> Result<()> {
    let cells = grid(8);
    cells
        .into_par_iter()
        .map(|c| {
            let mut stack = vec![c];
            while let Some(c) = stack.pop() {
                let u = c.center();
                let rad = c.radius();
                if fixed
                    .iter()
                    .zip(caps)
                    .any(|(p, cap)| angle(p, &u) + rad < *cap)
                {
                    continue;
                }
                let dv = norm(&m.displacement(&u)?);
                if dv > lipschitz * rad {
                    continue;
                }
                if c.depth >= max_depth {
                    return Err(Error::Certification(format!(
                        "cannot exclude a fixed point of rf near {:?} on the boundary",
                        m.point(&u)
                    )));
                }
                stack.extend(c.children());
            }
            Ok(())
        })
        .collect::<Result<Vec<()>>>()?;
    Ok(())
}
