//! Fixed point index `I(f) = deg(id - f)` on regions, located fixed points
//! with local indices, and executable forms of the index axioms.

pub mod axioms;
mod locate;
mod region;

use serde::Serialize;

pub use locate::{certify_complement, locate_fixed_points};
pub use region::Region;

use crate::degree::{
    certify_frontier, det, pl_degree, sphere_degree, winding_degree, DegreeCertificate,
    DegreeMethod, FactorShape, FrontierCurve, GriddedRegion, PlBudget, WindingBudget,
};
use crate::error::{Error, Result};
use crate::mapexpr::{EvalError, FnMap, VectorMap};

/// Knobs for index computations.
#[derive(Debug, Clone)]
pub struct IndexConfig {
    pub degree: PlBudget,
    /// Frontier margin relative to the region diameter.
    pub relative_margin: f64,
    /// Lattice resolution for Newton seeds; dimension default when `None`.
    pub seed_resolution: Option<usize>,
    pub newton_iterations: usize,
    /// Subdivision depth when certifying that no fixed point was missed.
    pub complement_depth: u32,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            degree: PlBudget::default(),
            relative_margin: 1e-7,
            seed_resolution: None,
            newton_iterations: 60,
            complement_depth: 12,
        }
    }
}

impl IndexConfig {
    fn budget_for(&self, piece: &GriddedRegion) -> PlBudget {
        PlBudget {
            margin: self.relative_margin * piece.diameter(),
            ..self.degree.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub location: Vec<f64>,
    pub enclosure_radius: f64,
    pub local_index: i64,
    /// `sign det(I - Df)` from a finite-difference Jacobian, when it is
    /// clearly nonzero.
    pub jacobian_sign: Option<i64>,
    pub certificate: DegreeCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointSet {
    pub points: Vec<FixedPoint>,
    /// True when no fixed point exists in the region (certified).
    pub certified_empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexResult {
    pub total: i64,
    pub certificate: DegreeCertificate,
    pub fixed_points: FixedPointSet,
}

fn check_self_map(f: &dyn VectorMap, dim: usize) -> Result<()> {
    if f.dim_in() != dim || f.dim_out() != dim {
        return Err(Error::Invalid(format!(
            "index needs a map R^{dim} -> R^{dim}, got R^{} -> R^{}",
            f.dim_in(),
            f.dim_out()
        )));
    }
    Ok(())
}

fn merge(certs: &[DegreeCertificate], degree: i64) -> DegreeCertificate {
    DegreeCertificate {
        degree,
        method: certs.first().map_or(DegreeMethod::PlSign, |c| c.method),
        refinement_depth: certs.iter().map(|c| c.refinement_depth).max().unwrap_or(0),
        min_displacement: certs
            .iter()
            .map(|c| c.min_displacement)
            .fold(f64::INFINITY, f64::min),
    }
}

/// `deg(id - f, region, 0)` summed over the region's pieces, without
/// locating fixed points. Planar pieces use the winding number of `id - f`
/// along their frontier curves, other pieces the PL degree.
pub fn index_total(
    f: &dyn VectorMap,
    region: &Region,
    cfg: &IndexConfig,
) -> Result<DegreeCertificate> {
    check_self_map(f, region.dim())?;
    let g = FnMap::displacement(f);
    let mut certs = Vec::new();
    for piece in region.pieces()? {
        if let Some(curves) = piece.frontier_curves() {
            certs.push(frontier_winding(&g, &curves)?);
            continue;
        }
        if let Some(cert) = spherical_shell_degree(&g, &piece, cfg)? {
            certs.push(cert);
            continue;
        }
        let zero = vec![0.0; piece.dim()];
        certs.push(pl_degree(&g, &piece, &zero, &cfg.budget_for(&piece))?);
    }
    let total = certs.iter().map(|c| c.degree).sum();
    Ok(merge(&certs, total))
}

/// On a spherical shell in `R^3` the degree is the difference of the
/// degrees on its two frontier spheres, which avoids triangulating across
/// the shell.
fn spherical_shell_degree(
    g: &dyn VectorMap,
    piece: &GriddedRegion,
    cfg: &IndexConfig,
) -> Result<Option<DegreeCertificate>> {
    let [factor] = piece.factors() else {
        return Ok(None);
    };
    let FactorShape::Radial {
        center,
        r_in,
        r_out,
    } = &factor.shape
    else {
        return Ok(None);
    };
    if center.len() != 3 || *r_in <= 0.0 {
        return Ok(None);
    }
    let zero = [0.0; 3];
    let outer = sphere_degree(g, center, *r_out, &zero, &cfg.budget_for(piece))?;
    let inner = sphere_degree(g, center, *r_in, &zero, &cfg.budget_for(piece))?;
    let degree = outer.degree - inner.degree;
    Ok(Some(merge(&[outer, inner], degree)))
}

fn frontier_winding(g: &dyn VectorMap, curves: &[FrontierCurve]) -> Result<DegreeCertificate> {
    let mut certs = Vec::with_capacity(curves.len());
    let mut total = 0;
    for c in curves {
        let curve = |t: f64| c.point(t);
        let cert = winding_degree(g, &curve, [0.0, 0.0], &WindingBudget::default())?;
        total += c.sign() * cert.degree;
        certs.push(cert);
    }
    Ok(merge(&certs, total))
}

/// Fixed point index of `f` on `region`, with every fixed point located,
/// enclosed, and given its local index. The total must equal the sum of the
/// local indices.
pub fn fixed_point_index(
    f: &dyn VectorMap,
    region: &Region,
    cfg: &IndexConfig,
) -> Result<IndexResult> {
    let total = index_total(f, region, cfg)?;
    let points = locate_fixed_points(f, region, cfg)?;
    let radii = enclosure_radii(&points, region)?;
    let mut fixed = Vec::with_capacity(points.len());
    for (p, r) in points.iter().zip(&radii) {
        fixed.push(local_index_shrinking(f, p, *r, cfg)?);
    }
    certify_complement(f, region, &fixed, cfg)?;
    let sum: i64 = fixed.iter().map(|p| p.local_index).sum();
    if sum != total.degree {
        return Err(Error::Internal(format!(
            "total index {} differs from the sum {sum} of {} local indices",
            total.degree,
            fixed.len()
        )));
    }
    Ok(IndexResult {
        total: total.degree,
        certificate: total,
        fixed_points: FixedPointSet {
            certified_empty: fixed.is_empty(),
            points: fixed,
        },
    })
}

fn enclosure_radii(points: &[Vec<f64>], region: &Region) -> Result<Vec<f64>> {
    let pieces = region.pieces()?;
    let diam = pieces
        .iter()
        .map(GriddedRegion::diameter)
        .fold(0.0, f64::max);
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut r = 0.05 * diam;
            for (j, q) in points.iter().enumerate() {
                if i != j {
                    r = r.min(0.3 * crate::degree::dist(p, q));
                }
            }
            r = r.min(0.5 * region.frontier_distance(p)?);
            Ok(r)
        })
        .collect()
}

fn local_index_shrinking(
    f: &dyn VectorMap,
    p: &[f64],
    radius: f64,
    cfg: &IndexConfig,
) -> Result<FixedPoint> {
    let mut r = radius;
    let mut last = None;
    for _ in 0..5 {
        match local_index(f, p, r, cfg) {
            Ok(fp) => return Ok(fp),
            Err(e) if e.is_inconclusive() => last = Some(e),
            Err(e) => return Err(e),
        }
        r *= 0.25;
    }
    Err(Error::Degenerate(format!(
        "fixed point near {p:?} could not be isolated ({})",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// Central-difference Jacobian of `f` at `p`, row-major.
pub(crate) fn jacobian(f: &dyn VectorMap, p: &[f64]) -> Result<Vec<f64>, EvalError> {
    let n = p.len();
    let m = f.dim_out();
    let mut jac = vec![0.0; m * n];
    for j in 0..n {
        let h = 1e-6 * (1.0 + p[j].abs());
        let mut a = p.to_vec();
        let mut b = p.to_vec();
        a[j] += h;
        b[j] -= h;
        let fa = f.apply(&a)?;
        let fb = f.apply(&b)?;
        for i in 0..m {
            jac[i * n + j] = (fa[i] - fb[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Local index of `f` at a fixed point `p`: the degree of `id - f` on the
/// ball of the given radius, cross-checked against `sign det(I - Df(p))`.
pub fn local_index(
    f: &dyn VectorMap,
    p: &[f64],
    radius: f64,
    cfg: &IndexConfig,
) -> Result<FixedPoint> {
    let n = p.len();
    check_self_map(f, n)?;
    let g = FnMap::displacement(f);
    let cert = if n == 2 {
        let c = [p[0], p[1]];
        let curve = move |t: f64| {
            let a = std::f64::consts::TAU * t;
            vec![c[0] + radius * a.cos(), c[1] + radius * a.sin()]
        };
        winding_degree(&g, &curve, [0.0, 0.0], &WindingBudget::default())?
    } else {
        let ball = GriddedRegion::ball(p.to_vec(), radius)?;
        let budget = PlBudget {
            margin: 0.0,
            ..cfg.degree.clone()
        };
        pl_degree(&g, &ball, &vec![0.0; n], &budget)?
    };
    let jac = jacobian(&g, p)?;
    let scale = jac.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let d = det(jac, n);
    let jacobian_sign = if d.abs() > 1e-6 * scale.powi(n as i32) {
        Some(d.signum() as i64)
    } else {
        None
    };
    if let Some(s) = jacobian_sign {
        if s != cert.degree {
            return Err(Error::Internal(format!(
                "local index {} at {p:?} disagrees with sign det(I - Df) = {s}",
                cert.degree
            )));
        }
    }
    Ok(FixedPoint {
        location: p.to_vec(),
        enclosure_radius: radius,
        local_index: cert.degree,
        jacobian_sign,
        certificate: cert,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductCheck {
    pub direct: i64,
    pub left: i64,
    pub right: i64,
}

/// Index of `f x g` on the product region, computed directly and as the
/// product of the factor indices; they must agree.
pub fn product_index(
    f: &dyn VectorMap,
    f_region: &Region,
    g: &dyn VectorMap,
    g_region: &Region,
    cfg: &IndexConfig,
) -> Result<ProductCheck> {
    let left = index_total(f, f_region, cfg)?.degree;
    let right = index_total(g, g_region, cfg)?.degree;
    let fg = FnMap::product(f, g);
    let region = Region::product(vec![f_region.clone(), g_region.clone()]);
    let direct = index_total(&fg, &region, cfg)?.degree;
    if direct != left * right {
        return Err(Error::Internal(format!(
            "product index {direct} differs from {left} * {right}"
        )));
    }
    Ok(ProductCheck {
        direct,
        left,
        right,
    })
}

/// How `f0` is deformed into `f1`.
pub enum Homotopy<'a> {
    /// `(1 - s) f0 + s f1`.
    Linear,
    /// `H(x, s)` with `H(., 0) = f0` and `H(., 1) = f1`.
    Custom(&'a (dyn Fn(&[f64], f64) -> Result<Vec<f64>, EvalError> + Sync)),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotopyCheck {
    pub index0: i64,
    pub index1: i64,
    pub holds: bool,
    /// Number of homotopy parameters at which the frontier was certified.
    pub parameter_samples: usize,
}

/// Certifies `H(x, s) != x` on the frontier for all `s` and compares the
/// indices at both ends. A failed certification is a precondition error,
/// never a violation.
pub fn homotopy_invariance_check(
    f0: &dyn VectorMap,
    f1: &dyn VectorMap,
    region: &Region,
    homotopy: Homotopy,
    cfg: &IndexConfig,
) -> Result<HomotopyCheck> {
    let n = region.dim();
    check_self_map(f0, n)?;
    check_self_map(f1, n)?;
    let h = |x: &[f64], s: f64| -> Result<Vec<f64>, EvalError> {
        match &homotopy {
            Homotopy::Linear => {
                let a = f0.apply(x)?;
                let b = f1.apply(x)?;
                Ok(a.iter()
                    .zip(&b)
                    .map(|(u, v)| (1.0 - s) * u + s * v)
                    .collect())
            }
            Homotopy::Custom(hf) => hf(x, s),
        }
    };
    let mut samples = 0;
    for piece in region.pieces()? {
        samples += certify_homotopy_frontier(&h, &piece, cfg)?;
    }
    let index0 = index_total(f0, region, cfg)?.degree;
    let index1 = index_total(f1, region, cfg)?.degree;
    Ok(HomotopyCheck {
        index0,
        index1,
        holds: index0 == index1,
        parameter_samples: samples,
    })
}

fn certify_homotopy_frontier(
    h: &(dyn Fn(&[f64], f64) -> Result<Vec<f64>, EvalError> + Sync),
    piece: &GriddedRegion,
    cfg: &IndexConfig,
) -> Result<usize> {
    let dim = piece.dim();
    let budget = cfg.budget_for(piece);
    let (_, verts) = piece.grid_vertices(budget.initial_resolution.unwrap_or(8).max(8));
    let frontier: Vec<&Vec<f64>> = verts
        .iter()
        .filter(|v| v.frontier)
        .map(|v| &v.point)
        .collect();
    // speed of the homotopy in s along the frontier
    let mut speed: f64 = 0.0;
    for x in &frontier {
        for k in 0..=16 {
            let s = k as f64 / 16.0;
            let (a, b) = ((s - 1e-4).max(0.0), (s + 1e-4).min(1.0));
            let ha = h(x, a)?;
            let hb = h(x, b)?;
            speed = speed.max(crate::degree::dist(&ha, &hb) / (b - a));
        }
    }
    let speed = budget.lipschitz_safety * speed;
    let start = budget.initial_resolution.unwrap_or(match dim {
        1 => 32,
        2 => 16,
        3 => 8,
        _ => 4,
    });
    let mut k = 8usize;
    while k <= 1024 {
        let mut ok = true;
        for j in 0..=k {
            let s = j as f64 / k as f64;
            let hs = FnMap::new(dim, dim, move |x| {
                let y = h(x, s)?;
                Ok(x.iter().zip(&y).map(|(a, b)| a - b).collect())
            });
            let mut res = start;
            let bound = loop {
                match certify_frontier(&hs, piece, &vec![0.0; dim], res, &budget) {
                    Ok(b) => break Some(b),
                    Err(Error::Certification(_)) if res < 4 * start => res *= 2,
                    Err(Error::Certification(_)) => break None,
                    Err(e) => return Err(e),
                }
            };
            let Some(bound) = bound else {
                return Err(Error::Precondition(format!(
                    "homotopy may have a fixed point on the frontier near s = {s}"
                )));
            };
            if bound.min_displacement <= speed * 0.5 / k as f64 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(k + 1);
        }
        k *= 2;
    }
    Err(Error::Precondition(
        "homotopy frontier margin too small to certify between parameter samples".into(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutativityCheck {
    pub gf: i64,
    pub fg: i64,
    pub holds: bool,
}

/// Compares `I(g o f)` on `u` with `I(f o g)` on `v`, where `f: R^n -> R^m`
/// and `g: R^m -> R^n`. The caller supplies regions matching the preimage
/// restrictions `u = f^{-1}(V') ∩ U`, `v = g^{-1}(U) ∩ V'`.
pub fn commutativity_check(
    f: &dyn VectorMap,
    u: &Region,
    g: &dyn VectorMap,
    v: &Region,
    cfg: &IndexConfig,
) -> Result<CommutativityCheck> {
    if f.dim_out() != g.dim_in() || g.dim_out() != f.dim_in() {
        return Err(Error::Invalid("maps do not compose both ways".into()));
    }
    let gf_map = FnMap::compose(g, f);
    let fg_map = FnMap::compose(f, g);
    let gf = index_total(&gf_map, u, cfg)?.degree;
    let fg = index_total(&fg_map, v, cfg)?.degree;
    Ok(CommutativityCheck {
        gf,
        fg,
        holds: gf == fg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapexpr::{complex_power_source, MapExpr};

    fn cfg() -> IndexConfig {
        IndexConfig::default()
    }

    #[test]
    fn units() {
        let inside = MapExpr::parse_for_dim("0.2; -0.3", 2).unwrap();
        let outside = MapExpr::parse_for_dim("3; 0", 2).unwrap();
        let ball = Region::ball(vec![0.0, 0.0], 1.0);
        let r = fixed_point_index(&inside, &ball, &cfg()).unwrap();
        assert_eq!(r.total, 1);
        assert_eq!(r.fixed_points.points.len(), 1);
        let r = fixed_point_index(&outside, &ball, &cfg()).unwrap();
        assert_eq!(r.total, 0);
        assert!(r.fixed_points.certified_empty);
    }

    #[test]
    fn contraction_and_powers() {
        let half = MapExpr::parse("x1/2; x2/2").unwrap();
        let ball = Region::ball(vec![0.0, 0.0], 1.0);
        assert_eq!(fixed_point_index(&half, &ball, &cfg()).unwrap().total, 1);
        for d in 2..=4u32 {
            let (re, im) = complex_power_source(d);
            let f = MapExpr::parse(&format!("2*({re}); 2*({im})")).unwrap();
            let r = fixed_point_index(&f, &ball, &cfg()).unwrap();
            assert_eq!(r.total, d as i64);
            assert_eq!(r.fixed_points.points.len(), d as usize);
            assert!(r.fixed_points.points.iter().all(|p| p.local_index == 1));
        }
    }

    #[test]
    fn local_index_examples() {
        let neg = MapExpr::parse("-x1; -x2").unwrap();
        let dbl = MapExpr::parse("2*x1; 2*x2").unwrap();
        let dbl3 = MapExpr::parse("2*x1; 2*x2; 2*x3").unwrap();
        assert_eq!(
            local_index(&neg, &[0.0, 0.0], 0.5, &cfg())
                .unwrap()
                .local_index,
            1
        );
        assert_eq!(
            local_index(&dbl, &[0.0, 0.0], 0.5, &cfg())
                .unwrap()
                .local_index,
            1
        );
        let p = local_index(&dbl3, &[0.0; 3], 0.5, &cfg()).unwrap();
        assert_eq!((p.local_index, p.jacobian_sign), (-1, Some(-1)));
    }

    #[test]
    fn products() {
        let half1 = MapExpr::parse("x1/2").unwrap();
        let b1 = Region::ball(vec![0.0], 1.0);
        let c = product_index(&half1, &b1, &half1, &b1, &cfg()).unwrap();
        assert_eq!(c.direct, 1);
        let inside = MapExpr::parse_for_dim("0.5", 1).unwrap();
        let outside = MapExpr::parse_for_dim("4", 1).unwrap();
        assert_eq!(
            product_index(&inside, &b1, &outside, &b1, &cfg())
                .unwrap()
                .direct,
            0
        );
        let (re, im) = complex_power_source(2);
        let sq = MapExpr::parse(&format!("2*({re}); 2*({im})")).unwrap();
        let b2 = Region::ball(vec![0.0, 0.0], 1.0);
        assert_eq!(
            product_index(&sq, &b2, &half1, &b1, &cfg()).unwrap().direct,
            2
        );
    }

    #[test]
    fn homotopies() {
        let ball = Region::ball(vec![0.0, 0.0], 1.0);
        let a = MapExpr::parse("x1/2; x2/2").unwrap();
        let b = MapExpr::parse("x1/3; x2/3").unwrap();
        let c = homotopy_invariance_check(&a, &b, &ball, Homotopy::Linear, &cfg()).unwrap();
        assert!(c.holds && c.index0 == 1);
        let p = MapExpr::parse_for_dim("0.2; 0", 2).unwrap();
        let q = MapExpr::parse_for_dim("3; 0", 2).unwrap();
        let err = homotopy_invariance_check(&p, &q, &ball, Homotopy::Linear, &cfg()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{err:?}");
        assert!(err.is_inconclusive());
    }

    #[test]
    fn commutativity_with_inclusion() {
        let f = MapExpr::parse_for_dim("x1; 0", 1).unwrap();
        let g = MapExpr::parse_for_dim("x1/2", 2).unwrap();
        let c = commutativity_check(
            &f,
            &Region::ball(vec![0.0], 1.0),
            &g,
            &Region::ball(vec![0.0, 0.0], 1.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!((c.gf, c.fg, c.holds), (1, 1, true));
    }

    #[test]
    fn cancelling_pair_is_found() {
        // fixed points at x = -0.5 (index -1 in 1-d) and x = 0.5 (index +1)
        let f = MapExpr::parse("x1 + x1^2 - 0.25").unwrap();
        let r = fixed_point_index(&f, &Region::ball(vec![0.0], 1.0), &cfg()).unwrap();
        assert_eq!(r.total, 0);
        let mut idx: Vec<i64> = r
            .fixed_points
            .points
            .iter()
            .map(|p| p.local_index)
            .collect();
        idx.sort();
        assert_eq!(idx, vec![-1, 1]);
    }
}
