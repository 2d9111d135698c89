use std::f64::consts::PI;

use super::{norm, DegreeCertificate, DegreeMethod};
use crate::error::{Error, Result};
use crate::mapexpr::VectorMap;

/// Budget for adaptive angle summation.
#[derive(Debug, Clone)]
pub struct WindingBudget {
    pub initial_segments: usize,
    pub max_segments: usize,
    /// Multiplier applied to the sampled Lipschitz estimate.
    pub lipschitz_safety: f64,
    /// Required slack in the nonvanishing bound.
    pub margin: f64,
}

impl Default for WindingBudget {
    fn default() -> Self {
        WindingBudget {
            initial_segments: 64,
            max_segments: 1 << 20,
            lipschitz_safety: 2.0,
            margin: 0.0,
        }
    }
}

/// Degree of `g - target` along the closed curve `curve: [0,1] -> R^2`
/// (`curve(0) == curve(1)`), i.e. the winding number of `g(curve(t))`
/// around `target`.
pub fn winding_degree(
    g: &dyn VectorMap,
    curve: &dyn Fn(f64) -> Vec<f64>,
    target: [f64; 2],
    budget: &WindingBudget,
) -> Result<DegreeCertificate> {
    if g.dim_out() != 2 {
        return Err(Error::Invalid(format!(
            "winding degree needs a map into R^2, got R^{}",
            g.dim_out()
        )));
    }
    let eval = |t: f64| -> Result<[f64; 2]> {
        let v = g.apply(&curve(t))?;
        Ok([v[0] - target[0], v[1] - target[1]])
    };
    winding_of_loop(&eval, budget)
}

struct Pass {
    lipschitz: f64,
    angle: f64,
    segments: usize,
    depth: u32,
    min_bound: f64,
    observed_slope: f64,
}

fn principal_angle(a: [f64; 2], b: [f64; 2]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.atan2(dot)
}

fn segment(
    loop_fn: &dyn Fn(f64) -> Result<[f64; 2]>,
    budget: &WindingBudget,
    st: &mut Pass,
    (a, b): (f64, f64),
    (va, vb): ([f64; 2], [f64; 2]),
    depth: u32,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let vm = loop_fn(m)?;
    let h = 0.5 * (b - a);
    let slope =
        norm(&[vm[0] - va[0], vm[1] - va[1]]).max(norm(&[vb[0] - vm[0], vb[1] - vm[1]])) / h;
    st.observed_slope = st.observed_slope.max(slope);
    // image of [a, b] lies in the disk of radius L*h around g(m)
    let bound = norm(&vm) - st.lipschitz * h;
    if bound > budget.margin {
        st.angle += principal_angle(va, vb);
        st.segments += 1;
        st.depth = st.depth.max(depth);
        st.min_bound = st.min_bound.min(bound);
        return Ok(());
    }
    if st.segments > budget.max_segments || depth > 60 {
        return Err(Error::Budget(format!(
            "winding subdivision exceeded {} segments",
            budget.max_segments
        )));
    }
    if h < 1e-13 {
        return Err(Error::Certification(format!(
            "map is not certifiably nonvanishing near curve parameter {m:.15}"
        )));
    }
    segment(loop_fn, budget, st, (a, m), (va, vm), depth + 1)?;
    segment(loop_fn, budget, st, (m, b), (vm, vb), depth + 1)
}

/// Winding number around the origin of the closed loop `loop_fn: [0,1] -> R^2`.
///
/// The loop is subdivided until every segment `[a, b]` satisfies
/// `|v(m)| > L (b - a) / 2` at its midpoint, so the image of the segment sits
/// in a disk missing the origin and the principal angle between endpoint
/// values is the true angle increment.
pub fn winding_of_loop(
    loop_fn: &dyn Fn(f64) -> Result<[f64; 2]>,
    budget: &WindingBudget,
) -> Result<DegreeCertificate> {
    let k = budget.initial_segments.max(4);
    let mut samples = Vec::with_capacity(k + 1);
    for i in 0..k {
        samples.push(loop_fn(i as f64 / k as f64)?);
    }
    samples.push(samples[0]);
    let mut slope: f64 = 0.0;
    for w in samples.windows(2) {
        slope = slope.max(norm(&[w[1][0] - w[0][0], w[1][1] - w[0][1]]) * k as f64);
    }
    let mut lipschitz = budget.lipschitz_safety * slope;

    for _pass in 0..6 {
        let mut st = Pass {
            lipschitz,
            angle: 0.0,
            segments: 0,
            depth: 0,
            min_bound: f64::INFINITY,
            observed_slope: 0.0,
        };
        for i in 0..k {
            let a = i as f64 / k as f64;
            let b = (i + 1) as f64 / k as f64;
            segment(
                loop_fn,
                budget,
                &mut st,
                (a, b),
                (samples[i], samples[i + 1]),
                0,
            )?;
        }
        let needed = budget.lipschitz_safety * st.observed_slope;
        if needed > lipschitz * 1.000_001 {
            lipschitz = needed;
            continue;
        }
        let turns = st.angle / (2.0 * PI);
        let degree = turns.round();
        if (turns - degree).abs() > 1e-6 {
            return Err(Error::Internal(format!(
                "accumulated angle {turns} turns is not an integer"
            )));
        }
        return Ok(DegreeCertificate {
            degree: degree as i64,
            method: DegreeMethod::Winding,
            refinement_depth: st.depth,
            min_displacement: st.min_bound,
        });
    }
    Err(Error::Budget(
        "Lipschitz estimate did not stabilise during winding subdivision".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapexpr::{complex_power_source, FnMap, MapExpr};

    fn unit_circle(t: f64) -> Vec<f64> {
        let a = 2.0 * PI * t;
        vec![a.cos(), a.sin()]
    }

    /// Dense angle summation without any certification; test oracle only.
    fn oracle_angle_sum(g: &dyn VectorMap, samples: usize) -> f64 {
        let mut total = 0.0;
        let mut prev = g.apply(&unit_circle(0.0)).unwrap();
        for i in 1..=samples {
            let cur = g.apply(&unit_circle(i as f64 / samples as f64)).unwrap();
            total += principal_angle([prev[0], prev[1]], [cur[0], cur[1]]);
            prev = cur;
        }
        total / (2.0 * PI)
    }

    #[test]
    fn identity_on_unit_circle() {
        let id = MapExpr::parse("x1; x2").unwrap();
        let c = winding_degree(&id, &unit_circle, [0.0, 0.0], &WindingBudget::default()).unwrap();
        assert_eq!(c.degree, 1);
        assert!(c.min_displacement > 0.0);
    }

    #[test]
    fn cube_on_unit_circle() {
        let g = MapExpr::parse("x1^3 - 3*x1*x2^2; 3*x1^2*x2 - x2^3").unwrap();
        let oracle = oracle_angle_sum(&g, 100_000);
        assert!((oracle - 3.0).abs() < 1e-9);
        let c = winding_degree(&g, &unit_circle, [0.0, 0.0], &WindingBudget::default()).unwrap();
        assert_eq!(c.degree, 3);
    }

    #[test]
    fn constant_does_not_wind() {
        let g = MapExpr::parse_for_dim("1; 0", 2).unwrap();
        let c = winding_degree(&g, &unit_circle, [0.0, 0.0], &WindingBudget::default()).unwrap();
        assert_eq!(c.degree, 0);
    }

    #[test]
    fn negative_and_high_degrees() {
        for d in 1..8u32 {
            let (re, im) = complex_power_source(d);
            let g = MapExpr::parse(&format!("{re}; -({im})")).unwrap();
            let c =
                winding_degree(&g, &unit_circle, [0.0, 0.0], &WindingBudget::default()).unwrap();
            assert_eq!(c.degree, -(d as i64));
        }
    }

    #[test]
    fn zero_on_curve_is_a_certification_error() {
        // g(x) = x - (1, 0) vanishes at curve(0)
        let g = MapExpr::parse("x1 - 1; x2").unwrap();
        let err =
            winding_degree(&g, &unit_circle, [0.0, 0.0], &WindingBudget::default()).unwrap_err();
        assert!(
            matches!(err, Error::Certification(_) | Error::Budget(_)),
            "{err:?}"
        );
    }

    #[test]
    fn off_center_target() {
        let id = FnMap::new(2, 2, |p| Ok(p.to_vec()));
        let inside =
            winding_degree(&id, &unit_circle, [0.5, 0.3], &WindingBudget::default()).unwrap();
        let outside =
            winding_degree(&id, &unit_circle, [1.5, 0.3], &WindingBudget::default()).unwrap();
        assert_eq!((inside.degree, outside.degree), (1, 0));
    }

    #[test]
    fn tight_budget_reports_budget_error() {
        // near-zero at t = 1/2, after the first half has used the budget
        let g = MapExpr::parse("x1 + 0.999999; x2").unwrap();
        let budget = WindingBudget {
            max_segments: 5,
            ..WindingBudget::default()
        };
        let err = winding_degree(&g, &unit_circle, [0.0, 0.0], &budget).unwrap_err();
        assert!(matches!(err, Error::Budget(_)), "{err:?}");
    }
}
