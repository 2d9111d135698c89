//! Brouwer degree by two independent routes: angle summation along a closed
//! plane curve, and signed counting of simplices of a piecewise-linear
//! interpolant on a triangulated grid.

mod grid;
mod pl;
mod winding;

use serde::Serialize;

pub use grid::{FactorShape, FrontierCurve, GridFactor, GridVertex, GriddedRegion};
pub use pl::{certify_frontier, pl_degree, FrontierBound, PlBudget};
pub use winding::{winding_degree, winding_of_loop, WindingBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMethod {
    Winding,
    PlSign,
    Oracle,
}

/// An integer degree together with the evidence that it is valid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeCertificate {
    pub degree: i64,
    pub method: DegreeMethod,
    pub refinement_depth: u32,
    /// Positive lower bound on `|g - target|` over the certification set.
    pub min_displacement: f64,
}

/// Sign of the determinant of a small dense matrix (row-major, `n x n`),
/// together with its magnitude. Partial pivoting.
pub(crate) fn det(mut a: Vec<f64>, n: usize) -> f64 {
    let mut d = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            d = -d;
        }
        let p = a[col * n + col];
        d *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor != 0.0 {
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    d
}

/// Solves `a x = b` for small dense systems; `None` when singular.
pub(crate) fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor != 0.0 {
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for k in r + 1..n {
            s -= a[r * n + k] * x[k];
        }
        x[r] = s / a[r * n + r];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Degree about `target` of `g` restricted to the sphere `|x - center| = r`,
/// via the PL degree of the cone extension `x -> target + (|x|/r)(g(c + r x/|x|) - target)`
/// on the ball. Only the values of `g` on the sphere matter.
pub fn sphere_degree(
    g: &dyn crate::mapexpr::VectorMap,
    center: &[f64],
    r: f64,
    target: &[f64],
    budget: &PlBudget,
) -> crate::error::Result<DegreeCertificate> {
    use crate::mapexpr::{EvalError, FnMap};
    let n = center.len();
    if g.dim_in() != n || g.dim_out() != n || target.len() != n {
        return Err(crate::error::Error::Invalid(format!(
            "sphere degree needs a map R^{n} -> R^{n}"
        )));
    }
    let cone = FnMap::new(n, n, move |x| {
        let l = norm(x);
        if l == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let y: Vec<f64> = center.iter().zip(x).map(|(c, v)| c + r * v / l).collect();
        let gy = g.apply(&y)?;
        let out: Vec<f64> = gy
            .iter()
            .zip(target)
            .map(|(v, t)| (v - t) * l / r)
            .collect();
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(EvalError::NonFinite)
        }
    });
    let ball = GriddedRegion::ball(vec![0.0; n], r)?;
    pl_degree(&cone, &ball, &vec![0.0; n], budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_dense_kernels() {
        assert_eq!(det(vec![2.0, 0.0, 0.0, 3.0], 2), 6.0);
        assert_eq!(det(vec![0.0, 1.0, 1.0, 0.0], 2), -1.0);
        assert_eq!(det(vec![1.0, 2.0, 2.0, 4.0], 2), 0.0);
        let x = solve(vec![2.0, 1.0, 1.0, 3.0], vec![3.0, 5.0], 2).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert!(solve(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 1.0], 2).is_none());
    }
}
