use rayon::prelude::*;

use super::{det, dist, norm, solve, DegreeCertificate, DegreeMethod, GriddedRegion};
use crate::error::{Error, Result};
use crate::mapexpr::VectorMap;

/// Resolution schedule and certification knobs for [`pl_degree`].
#[derive(Debug, Clone)]
pub struct PlBudget {
    /// Cells per axis on the first pass; a dimension-dependent default when
    /// `None`.
    pub initial_resolution: Option<usize>,
    pub max_resolution: Option<usize>,
    pub lipschitz_safety: f64,
    /// Absolute slack the frontier bound must exceed.
    pub margin: f64,
}

impl Default for PlBudget {
    fn default() -> Self {
        PlBudget {
            initial_resolution: None,
            max_resolution: None,
            lipschitz_safety: 2.0,
            margin: 0.0,
        }
    }
}

impl PlBudget {
    fn initial(&self, dim: usize) -> usize {
        self.initial_resolution.unwrap_or(match dim {
            1 => 32,
            2 => 16,
            3 => 8,
            _ => 4,
        })
    }

    fn max(&self, dim: usize) -> usize {
        self.max_resolution.unwrap_or(match dim {
            1 => 1 << 14,
            2 => 512,
            3 => 64,
            4 => 16,
            _ => 8,
        })
    }
}

/// Result of certifying that `g != target` on the frontier of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierBound {
    /// Lower bound on `|g - target|` over the frontier.
    pub min_displacement: f64,
    /// Lipschitz estimate in grid parameter units.
    pub lipschitz: f64,
    pub resolution: usize,
}

struct Lattice<'a> {
    region: &'a GriddedRegion,
    n: usize,
    dim: usize,
    stride: Vec<usize>,
}

impl<'a> Lattice<'a> {
    fn new(region: &'a GriddedRegion, n: usize) -> Self {
        let dim = region.dim();
        let mut stride = vec![1usize; dim];
        for a in 1..dim {
            stride[a] = stride[a - 1] * (n + 1);
        }
        Lattice {
            region,
            n,
            dim,
            stride,
        }
    }

    fn vertex_count(&self) -> usize {
        self.stride[self.dim - 1] * (self.n + 1)
    }

    fn vertex_multi(&self, mut id: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim];
        for v in m.iter_mut() {
            *v = id % (self.n + 1);
            id /= self.n + 1;
        }
        m
    }

    fn vertex_id(&self, m: &[usize]) -> usize {
        m.iter().zip(&self.stride).map(|(a, s)| a * s).sum()
    }

    fn param(&self, m: &[f64]) -> Vec<f64> {
        m.iter().map(|&j| -1.0 + 2.0 * j / self.n as f64).collect()
    }

    fn cell_multi(&self, mut id: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim];
        for v in m.iter_mut() {
            *v = id % self.n;
            id /= self.n;
        }
        m
    }

    fn cell_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    fn included_cells(&self) -> Vec<Vec<usize>> {
        (0..self.cell_count())
            .map(|id| self.cell_multi(id))
            .filter(|c| self.region.cell_included(c, self.n))
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Face {
    cell: Vec<usize>,
    axis: usize,
    side: usize,
}

fn boundary_faces(lat: &Lattice, cells: &[Vec<usize>]) -> Vec<Face> {
    let mut faces = Vec::new();
    for cell in cells {
        for axis in 0..lat.dim {
            for side in 0..2 {
                let exterior = if side == 0 {
                    cell[axis] == 0 || {
                        let mut nb = cell.clone();
                        nb[axis] -= 1;
                        !lat.region.cell_included(&nb, lat.n)
                    }
                } else {
                    cell[axis] + 1 == lat.n || {
                        let mut nb = cell.clone();
                        nb[axis] += 1;
                        !lat.region.cell_included(&nb, lat.n)
                    }
                };
                if exterior {
                    faces.push(Face {
                        cell: cell.clone(),
                        axis,
                        side,
                    });
                }
            }
        }
    }
    faces
}

fn face_vertices(lat: &Lattice, f: &Face) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..lat.dim).filter(|&a| a != f.axis).collect();
    (0..1usize << others.len())
        .map(|bits| {
            let mut v = f.cell.clone();
            v[f.axis] += f.side;
            for (k, &a) in others.iter().enumerate() {
                v[a] += (bits >> k) & 1;
            }
            v
        })
        .collect()
}

fn face_center(lat: &Lattice, f: &Face) -> Vec<f64> {
    let m: Vec<f64> = (0..lat.dim)
        .map(|a| {
            if a == f.axis {
                (f.cell[a] + f.side) as f64
            } else {
                f.cell[a] as f64 + 0.5
            }
        })
        .collect();
    lat.param(&m)
}

/// Vertex values `g(x) - target`, NaN where not evaluated.
struct Samples {
    values: Vec<f64>,
    m: usize,
}

impl Samples {
    fn get(&self, id: usize) -> &[f64] {
        &self.values[id * self.m..(id + 1) * self.m]
    }
}

fn eval_offset(g: &dyn VectorMap, x: &[f64], target: &[f64]) -> Result<Vec<f64>> {
    let v = g.apply(x)?;
    Ok(v.iter().zip(target).map(|(a, b)| a - b).collect())
}

fn sample_vertices(
    g: &dyn VectorMap,
    lat: &Lattice,
    target: &[f64],
    ids: &[usize],
) -> Result<Samples> {
    let m = target.len();
    let evaluated: Vec<(usize, Vec<f64>)> = ids
        .par_iter()
        .map(|&id| {
            let multi: Vec<f64> = lat.vertex_multi(id).iter().map(|&j| j as f64).collect();
            let x = lat.region.to_point(&lat.param(&multi));
            eval_offset(g, &x, target).map(|v| (id, v))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![f64::NAN; lat.vertex_count() * m];
    for (id, v) in evaluated {
        values[id * m..(id + 1) * m].copy_from_slice(&v);
    }
    Ok(Samples { values, m })
}

fn frontier_bound(
    g: &dyn VectorMap,
    lat: &Lattice,
    faces: &[Face],
    samples: &Samples,
    target: &[f64],
    budget: &PlBudget,
) -> Result<FrontierBound> {
    let rho = (lat.dim as f64 - 1.0).max(0.0).sqrt() / lat.n as f64;
    let per_face: Vec<(f64, f64, Vec<f64>)> = faces
        .par_iter()
        .map(|f| {
            let c = face_center(lat, f);
            let x = lat.region.to_point(&c);
            let vc = eval_offset(g, &x, target)?;
            let mut slope: f64 = 0.0;
            if rho > 0.0 {
                for v in face_vertices(lat, f) {
                    let gv = samples.get(lat.vertex_id(&v));
                    slope = slope.max(dist(gv, &vc) / rho);
                }
            }
            Ok((norm(&vc), slope, x))
        })
        .collect::<Result<_>>()?;
    let max_slope = per_face.iter().map(|t| t.1).fold(0.0, f64::max);
    let lipschitz = budget.lipschitz_safety * max_slope;
    let mut worst = f64::INFINITY;
    let mut worst_at = Vec::new();
    for (m, slope, x) in &per_face {
        // local slope, floored so a single flat-looking face cannot hide a
        // steep neighbour; factor 2 also covers the PL interpolation gap
        let local = budget.lipschitz_safety * slope.max(0.25 * max_slope);
        let b = m - 2.0 * local * rho;
        if b < worst {
            worst = b;
            worst_at = x.clone();
        }
    }
    if worst > budget.margin {
        Ok(FrontierBound {
            min_displacement: worst,
            lipschitz,
            resolution: lat.n,
        })
    } else {
        Err(Error::Certification(format!(
            "cannot certify nonvanishing on the frontier near {worst_at:?} at resolution {} (bound {worst:e})",
            lat.n
        )))
    }
}

/// Certifies `g(x) != target` on the frontier of `region` at one resolution.
pub fn certify_frontier(
    g: &dyn VectorMap,
    region: &GriddedRegion,
    target: &[f64],
    resolution: usize,
    budget: &PlBudget,
) -> Result<FrontierBound> {
    check_dims(g, region, target)?;
    let n = region.admissible_resolution(resolution);
    let lat = Lattice::new(region, n);
    let cells = lat.included_cells();
    let faces = boundary_faces(&lat, &cells);
    let mut ids: Vec<usize> = faces
        .iter()
        .flat_map(|f| face_vertices(&lat, f))
        .map(|v| lat.vertex_id(&v))
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let samples = sample_vertices(g, &lat, target, &ids)?;
    frontier_bound(g, &lat, &faces, &samples, target, budget)
}

fn check_dims(g: &dyn VectorMap, region: &GriddedRegion, target: &[f64]) -> Result<()> {
    let d = region.dim();
    if g.dim_in() != d || g.dim_out() != d || target.len() != d {
        return Err(Error::Invalid(format!(
            "degree needs a map R^{d} -> R^{d}; got R^{} -> R^{} with target in R^{}",
            g.dim_in(),
            g.dim_out(),
            target.len()
        )));
    }
    Ok(())
}

fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    if k == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(k - 1) {
        // insert k-1 at every position; moving it left past j elements flips sign j times
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            let swaps = (p.len() - pos) as i64;
            out.push((q, if swaps % 2 == 0 { s } else { -s }));
        }
    }
    out
}

const DIRECTIONS: [[f64; 6]; 2] = [
    [
        1.0,
        0.618_033_988_7,
        0.381_966_011_3,
        0.236_067_977_5,
        0.145_898_033_8,
        0.090_169_943_7,
    ],
    [
        -0.414_213_562_4,
        1.0,
        -0.732_050_807_6,
        0.267_949_192_4,
        -0.577_350_269_2,
        0.316_227_766,
    ],
];

/// Signed count of Kuhn simplices whose image covers the (perturbed)
/// origin. Returns `(count, tie_seen)`.
fn signed_count(
    lat: &Lattice,
    cells: &[Vec<usize>],
    samples: &Samples,
    shift: &[f64],
) -> (i64, bool) {
    let d = lat.dim;
    let perms = permutations(d);
    cells
        .par_iter()
        .map(|cell| {
            let base = lat.vertex_id(cell);
            let mut total = 0i64;
            let mut tie = false;
            for (perm, sign) in &perms {
                let mut ids = Vec::with_capacity(d + 1);
                let mut id = base;
                ids.push(id);
                for &a in perm {
                    id += lat.stride[a];
                    ids.push(id);
                }
                let w: Vec<Vec<f64>> = ids
                    .iter()
                    .map(|&i| {
                        samples
                            .get(i)
                            .iter()
                            .zip(shift)
                            .map(|(v, s)| v - s)
                            .collect()
                    })
                    .collect();
                // the origin must lie in the bounding box of the image
                let outside =
                    (0..d).any(|r| w.iter().all(|p| p[r] > 0.0) || w.iter().all(|p| p[r] < 0.0));
                if outside {
                    continue;
                }
                let mut a = vec![0.0; d * d];
                for r in 0..d {
                    for c in 0..d {
                        a[r * d + c] = w[c + 1][r] - w[0][r];
                    }
                }
                let orient = det(a.clone(), d);
                if orient == 0.0 {
                    continue;
                }
                let rhs: Vec<f64> = w[0].iter().map(|v| -v).collect();
                let Some(mu) = solve(a, rhs, d) else { continue };
                let l0 = 1.0 - mu.iter().sum::<f64>();
                let lam_min = mu.iter().cloned().fold(l0, f64::min);
                if lam_min.abs() < 1e-11 {
                    tie = true;
                }
                if lam_min > 0.0 {
                    total += sign * orient.signum() as i64;
                }
            }
            (total, tie)
        })
        .reduce(|| (0, false), |a, b| (a.0 + b.0, a.1 || b.1))
}

fn degree_at(
    g: &dyn VectorMap,
    region: &GriddedRegion,
    target: &[f64],
    n: usize,
    budget: &PlBudget,
) -> Result<(i64, FrontierBound)> {
    let lat = Lattice::new(region, n);
    let cells = lat.included_cells();
    let faces = boundary_faces(&lat, &cells);
    let ids: Vec<usize> = (0..lat.vertex_count())
        .filter(|&id| region.vertex_in_closure(&lat.vertex_multi(id), n))
        .collect();
    let samples = sample_vertices(g, &lat, target, &ids)?;
    let bound = frontier_bound(g, &lat, &faces, &samples, target, budget)?;
    let d = lat.dim;
    let scale = 1e-3 * bound.min_displacement;
    let shift = |k: usize| -> Vec<f64> {
        let dir = &DIRECTIONS[k][..d];
        let l = norm(dir);
        dir.iter().map(|x| scale * x / l).collect()
    };
    let (count, tie) = signed_count(&lat, &cells, &samples, &shift(0));
    if tie {
        let (again, tie2) = signed_count(&lat, &cells, &samples, &shift(1));
        if again != count || tie2 {
            return Err(Error::Certification(format!(
                "degenerate simplex configuration at resolution {n}: perturbed counts {count} and {again}"
            )));
        }
    }
    Ok((count, bound))
}

/// Brouwer degree `deg(g, region, target)` by PL sign counting.
///
/// The region's parameter cube is split into `n^d` cells, each cut into the
/// `d!` Kuhn simplices; the signed number of simplices whose PL image covers
/// a slightly shifted target is the degree of the PL interpolant, which
/// equals the degree of `g` once the frontier bound exceeds the
/// interpolation error. Resolution doubles until two successive counts agree.
pub fn pl_degree(
    g: &dyn VectorMap,
    region: &GriddedRegion,
    target: &[f64],
    budget: &PlBudget,
) -> Result<DegreeCertificate> {
    check_dims(g, region, target)?;
    let dim = region.dim();
    let max = budget.max(dim);
    let mut n = region.admissible_resolution(budget.initial(dim));
    let mut prev: Option<(i64, f64)> = None;
    let mut last_err: Option<Error> = None;
    let mut depth = 0u32;
    // set when the latest pass certified right after an uncertified one
    let mut lone: Option<(i64, f64)>;
    loop {
        match degree_at(g, region, target, n, budget) {
            Ok((deg, bound)) => {
                lone = prev.is_none().then_some((deg, bound.min_displacement));
                if let Some((pd, pm)) = prev {
                    if pd == deg {
                        return Ok(DegreeCertificate {
                            degree: deg,
                            method: DegreeMethod::PlSign,
                            refinement_depth: depth,
                            min_displacement: pm.min(bound.min_displacement),
                        });
                    }
                }
                prev = Some((deg, bound.min_displacement));
            }
            Err(e @ Error::Certification(_)) => {
                prev = None;
                lone = None;
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
        let next = region.admissible_resolution(n * 2);
        if next > max {
            // at the finest resolution a single certified pass stands alone
            if let (Some((deg, m)), Some(_)) = (lone, &last_err) {
                return Ok(DegreeCertificate {
                    degree: deg,
                    method: DegreeMethod::PlSign,
                    refinement_depth: depth,
                    min_displacement: m,
                });
            }
            return Err(match (last_err, prev) {
                (Some(e), None) => e,
                _ => Error::Budget(format!("PL degree did not stabilise up to resolution {n}")),
            });
        }
        n = next;
        depth += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapexpr::{FnMap, MapExpr};

    fn ball3() -> GriddedRegion {
        GriddedRegion::ball(vec![0.0; 3], 1.0).unwrap()
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        for (perm, s) in p {
            let mut inv = 0;
            for i in 0..3 {
                for j in i + 1..3 {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            assert_eq!(s, if inv % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn identity_and_antipodal_in_three_dimensions() {
        let id = MapExpr::parse("x1; x2; x3").unwrap();
        let neg = MapExpr::parse("-x1; -x2; -x3").unwrap();
        let b = PlBudget::default();
        assert_eq!(pl_degree(&id, &ball3(), &[0.0; 3], &b).unwrap().degree, 1);
        assert_eq!(pl_degree(&neg, &ball3(), &[0.0; 3], &b).unwrap().degree, -1);
    }

    #[test]
    fn complex_square_times_line() {
        // preimages of (0.1, 0.1, 0) are two orientation-preserving points
        let g = MapExpr::parse("x1^2 - x2^2; 2*x1*x2; x3").unwrap();
        let c = pl_degree(&g, &ball3(), &[0.1, 0.1, 0.0], &PlBudget::default()).unwrap();
        assert_eq!(c.degree, 2);
        assert_eq!(c.method, DegreeMethod::PlSign);
        assert!(c.min_displacement > 0.0);
    }

    #[test]
    fn one_dimensional_sign_change() {
        let iv = GriddedRegion::cuboid(&[-1.0], &[2.0]).unwrap();
        let up = MapExpr::parse("x1^3 - x1").unwrap();
        let down = MapExpr::parse("0.5 - x1").unwrap();
        let b = PlBudget::default();
        // roots -1 (frontier!), so shift the target instead
        assert_eq!(pl_degree(&up, &iv, &[0.5], &b).unwrap().degree, 1);
        assert_eq!(pl_degree(&down, &iv, &[0.0], &b).unwrap().degree, -1);
        assert_eq!(pl_degree(&down, &iv, &[5.0], &b).unwrap().degree, 0);
    }

    #[test]
    fn annulus_region_excludes_the_hole() {
        let ann = GriddedRegion::shell(vec![0.0, 0.0], 1.0, 2.0).unwrap();
        let id = MapExpr::parse("x1; x2").unwrap();
        let b = PlBudget::default();
        assert_eq!(pl_degree(&id, &ann, &[0.0, 0.0], &b).unwrap().degree, 0);
        assert_eq!(pl_degree(&id, &ann, &[1.5, 0.1], &b).unwrap().degree, 1);
        // singular at the origin, which the shell grid never samples
        let inv = MapExpr::parse("x1/(x1^2+x2^2); -x2/(x1^2+x2^2)").unwrap();
        assert_eq!(pl_degree(&inv, &ann, &[0.0, 0.0], &b).unwrap().degree, 0);
    }

    #[test]
    fn frontier_zero_is_reported() {
        let g = MapExpr::parse("x1 - 1; x2").unwrap();
        let ball2 = GriddedRegion::ball(vec![0.0, 0.0], 1.0).unwrap();
        let err = pl_degree(&g, &ball2, &[0.0, 0.0], &PlBudget::default()).unwrap_err();
        assert!(matches!(err, Error::Certification(_)), "{err:?}");
    }

    #[test]
    fn product_region_degree_multiplies() {
        let a = GriddedRegion::ball(vec![0.0, 0.0], 1.0).unwrap();
        let b = GriddedRegion::cuboid(&[-1.0], &[1.0]).unwrap();
        let g = FnMap::new(3, 3, |p| {
            Ok(vec![
                p[0] * p[0] - p[1] * p[1] - 0.1,
                2.0 * p[0] * p[1],
                -p[2],
            ])
        });
        let c = pl_degree(&g, &a.product(&b), &[0.0; 3], &PlBudget::default()).unwrap();
        assert_eq!(c.degree, -2);
    }

    #[test]
    fn dimension_mismatch_is_invalid() {
        let g = MapExpr::parse("x1; x2").unwrap();
        assert!(matches!(
            pl_degree(&g, &ball3(), &[0.0; 3], &PlBudget::default()),
            Err(Error::Invalid(_))
        ));
    }
}
