use std::collections::HashMap;

use rayon::prelude::*;

use super::region::bounding_box;
use super::{jacobian, FixedPoint, IndexConfig, Region};
use crate::degree::{dist, norm, solve, GriddedRegion};
use crate::error::{Error, Result};
use crate::mapexpr::{FnMap, VectorMap};

fn default_seed_resolution(dim: usize) -> usize {
    match dim {
        1 => 256,
        2 => 48,
        3 => 16,
        _ => 8,
    }
}

/// Damped Newton on `g = id - f`; `None` if it stalls or leaves the region.
fn inside(pieces: &[GriddedRegion], x: &[f64]) -> f64 {
    pieces
        .iter()
        .map(|p| p.frontier_distance(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn newton(
    g: &dyn VectorMap,
    start: &[f64],
    region: &[GriddedRegion],
    iterations: usize,
) -> Option<Vec<f64>> {
    let n = start.len();
    let mut x = start.to_vec();
    let mut gx = g.apply(&x).ok()?;
    let mut r = norm(&gx);
    for _ in 0..iterations {
        let tol = 1e-13 * (1.0 + norm(&x));
        if r < tol {
            return (inside(region, &x) > 0.0).then_some(x);
        }
        let jac = jacobian(g, &x).ok()?;
        let step = solve(jac, gx.iter().map(|v| -v).collect(), n)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let y: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            if let Ok(gy) = g.apply(&y) {
                let ry = norm(&gy);
                if ry < r {
                    x = y;
                    gx = gy;
                    r = ry;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            // at machine precision the residual cannot decrease further
            return (r < 1e-9 * (1.0 + norm(&x)) && inside(region, &x) > 0.0).then_some(x);
        }
    }
    (r < 1e-9 * (1.0 + norm(&x)) && inside(region, &x) > 0.0).then_some(x)
}

struct Sample {
    index: Vec<usize>,
    point: Vec<f64>,
    value: f64,
}

fn seeds(g: &dyn VectorMap, piece: &GriddedRegion, res: usize) -> Vec<Vec<f64>> {
    let (n, verts) = piece.grid_vertices(res);
    let samples: Vec<Sample> = verts
        .into_par_iter()
        .filter_map(|v| {
            let val = g.apply(&v.point).ok().map(|y| norm(&y))?;
            Some(Sample {
                index: v.index,
                point: v.point,
                value: val,
            })
        })
        .collect();
    let lookup: HashMap<&[usize], usize> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| (s.index.as_slice(), i))
        .collect();
    let d = piece.dim();
    let mut out = Vec::new();
    for s in &samples {
        // local minimum of |g| among axis neighbours
        let mut is_min = true;
        for a in 0..d {
            for delta in [-1i64, 1] {
                let j = s.index[a] as i64 + delta;
                if j < 0 || j > n as i64 {
                    continue;
                }
                let mut nb = s.index.clone();
                nb[a] = j as usize;
                if let Some(&k) = lookup.get(nb.as_slice()) {
                    let o = &samples[k];
                    if o.value < s.value {
                        is_min = false;
                    }
                }
            }
        }
        if is_min {
            out.push(s.point.clone());
        }
    }
    out
}

/// Fixed points of `f` in `region`, found by damped Newton from lattice
/// seeds at local minima of `|x - f(x)|`, deduplicated.
pub fn locate_fixed_points(
    f: &dyn VectorMap,
    region: &Region,
    cfg: &IndexConfig,
) -> Result<Vec<Vec<f64>>> {
    let g = FnMap::displacement(f);
    let pieces = region.pieces()?;
    let mut found: Vec<Vec<f64>> = Vec::new();
    for piece in &pieces {
        let res = cfg
            .seed_resolution
            .unwrap_or_else(|| default_seed_resolution(piece.dim()));
        let starts = seeds(&g, piece, res);
        let roots: Vec<Option<Vec<f64>>> = starts
            .par_iter()
            .map(|s| newton(&g, s, &pieces, cfg.newton_iterations))
            .collect();
        let tol = 1e-7 * piece.diameter();
        for r in roots.into_iter().flatten() {
            if !found.iter().any(|q| dist(q, &r) < tol) {
                found.push(r);
            }
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(found)
}

struct Cell {
    center: Vec<f64>,
    half: Vec<f64>,
    depth: u32,
}

/// Certifies `x != f(x)` on the region outside the fixed-point enclosures
/// by adaptive subdivision with a sampled Lipschitz bound.
pub fn certify_complement(
    f: &dyn VectorMap,
    region: &Region,
    fixed: &[FixedPoint],
    cfg: &IndexConfig,
) -> Result<()> {
    let g = FnMap::displacement(f);
    let pieces = region.pieces()?;
    for piece in &pieces {
        certify_piece(&g, piece, &pieces, fixed, cfg)?;
    }
    Ok(())
}

fn certify_piece(
    g: &dyn VectorMap,
    piece: &GriddedRegion,
    region: &[GriddedRegion],
    fixed: &[FixedPoint],
    cfg: &IndexConfig,
) -> Result<()> {
    let d = piece.dim();
    let (lo, hi) = bounding_box(piece);
    // Lipschitz estimate from the seed lattice
    let (_, verts) = piece.grid_vertices(default_seed_resolution(d).min(32));
    let vals: Vec<(Vec<f64>, Vec<f64>)> = verts
        .par_iter()
        .filter_map(|v| g.apply(&v.point).ok().map(|y| (v.point.clone(), y)))
        .collect();
    let mut slope: f64 = 0.0;
    for (i, (p, gp)) in vals.iter().enumerate() {
        for (q, gq) in vals.iter().skip(i + 1).step_by(7).take(64) {
            let dpq = dist(p, q);
            if dpq > 0.0 {
                slope = slope.max(dist(gp, gq) / dpq);
            }
        }
    }
    let mut lipschitz = cfg.degree.lipschitz_safety * slope.max(1e-12);
    let per_axis = match d {
        1 => 16,
        2 => 8,
        3 => 6,
        _ => 3,
    };
    for _pass in 0..4 {
        let mut stack: Vec<Cell> = Vec::new();
        let mut idx = vec![0usize; d];
        loop {
            let half: Vec<f64> = (0..d)
                .map(|a| 0.5 * (hi[a] - lo[a]) / per_axis as f64)
                .collect();
            let center: Vec<f64> = (0..d)
                .map(|a| lo[a] + (2 * idx[a] + 1) as f64 * half[a])
                .collect();
            stack.push(Cell {
                center,
                half,
                depth: 0,
            });
            let mut a = 0;
            while a < d {
                idx[a] += 1;
                if idx[a] < per_axis {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == d {
                break;
            }
        }
        let observed = check_cells(g, region, fixed, cfg, lipschitz, stack)?;
        if cfg.degree.lipschitz_safety * observed <= lipschitz * 1.000_001 {
            return Ok(());
        }
        lipschitz = cfg.degree.lipschitz_safety * observed;
    }
    Err(Error::Budget(
        "Lipschitz estimate did not stabilise while excluding fixed points".into(),
    ))
}

/// Returns the largest slope observed between a cell centre and its
/// children.
fn check_cells(
    g: &dyn VectorMap,
    region: &[GriddedRegion],
    fixed: &[FixedPoint],
    cfg: &IndexConfig,
    lipschitz: f64,
    initial: Vec<Cell>,
) -> Result<f64> {
    let results: Vec<Result<f64>> = initial
        .into_par_iter()
        .map(|cell| {
            let mut stack = vec![(cell, None::<Vec<f64>>)];
            let mut observed: f64 = 0.0;
            while let Some((c, parent)) = stack.pop() {
                let radius = norm(&c.half);
                if inside(region, &c.center) < -radius {
                    continue;
                }
                if fixed
                    .iter()
                    .any(|p| dist(&c.center, &p.location) + radius < p.enclosure_radius)
                {
                    continue;
                }
                let gc = match g.apply(&c.center) {
                    Ok(v) => v,
                    // centre outside the domain of the map and outside the region
                    Err(_) if inside(region, &c.center) <= 0.0 => {
                        if c.depth >= cfg.complement_depth {
                            continue;
                        }
                        push_children(&mut stack, &c, None);
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                if let Some(pc) = &parent {
                    let (pp, pg) = pc.split_at(c.center.len());
                    let dd = dist(pp, &c.center);
                    if dd > 0.0 {
                        observed = observed.max(dist(pg, &gc) / dd);
                    }
                }
                if norm(&gc) > lipschitz * radius {
                    continue;
                }
                if c.depth >= cfg.complement_depth {
                    return Err(Error::Certification(format!(
                        "cannot exclude an unlocated fixed point near {:?}",
                        c.center
                    )));
                }
                let mut packed = c.center.clone();
                packed.extend(gc);
                push_children(&mut stack, &c, Some(packed));
            }
            Ok(observed)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for r in results {
        worst = worst.max(r?);
    }
    Ok(worst)
}

fn push_children(stack: &mut Vec<(Cell, Option<Vec<f64>>)>, c: &Cell, parent: Option<Vec<f64>>) {
    let d = c.center.len();
    let half: Vec<f64> = c.half.iter().map(|h| 0.5 * h).collect();
    for mask in 0..(1usize << d) {
        let center = (0..d)
            .map(|a| {
                if mask >> a & 1 == 1 {
                    c.center[a] + half[a]
                } else {
                    c.center[a] - half[a]
                }
            })
            .collect();
        stack.push((
            Cell {
                center,
                half: half.clone(),
                depth: c.depth + 1,
            },
            parent.clone(),
        ));
    }
}
