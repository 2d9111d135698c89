use serde::Serialize;

use super::{Domain, Shape, SphereComponent};
use crate::degree::{self, norm, winding_degree, DegreeCertificate, PlBudget, WindingBudget};
use crate::error::{Error, Result};
use crate::mapexpr::{FnMap, VectorMap};

/// Generator of the top reduced homology of an annular domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    CoreCircle { radius: f64 },
    CoreSphere { radius: f64 },
}

/// Rational homology of a catalog domain and how a self-map acts on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomologyRecipe {
    pub betti: Vec<usize>,
    pub euler: i64,
    /// `None` for contractible domains.
    pub generator: Option<Generator>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LefschetzValue {
    pub value: i64,
    /// Degree of the self-map on the generator, when there is one.
    pub generator_degree: Option<DegreeCertificate>,
}

pub fn homology_recipe(d: &Domain) -> HomologyRecipe {
    let n = d.dim();
    match d.shape() {
        Shape::Ball { .. } | Shape::Box { .. } => {
            let mut betti = vec![0; n + 1];
            betti[0] = 1;
            HomologyRecipe {
                betti,
                euler: 1,
                generator: None,
            }
        }
        Shape::Annulus { inner, outer } => HomologyRecipe {
            betti: vec![1, 1, 0],
            euler: 0,
            generator: Some(Generator::CoreCircle {
                radius: 0.5 * (inner + outer),
            }),
        },
        Shape::Shell { inner, outer } => HomologyRecipe {
            betti: vec![1, 0, 1, 0],
            euler: 2,
            generator: Some(Generator::CoreSphere {
                radius: 0.5 * (inner + outer),
            }),
        },
    }
}

impl HomologyRecipe {
    /// Lefschetz number of a self-map `g: M -> M` given in ambient
    /// coordinates: `1 + (-1)^(n-1) deg` where `deg` is the degree of `g`
    /// on the generator about the hole.
    pub fn lefschetz(&self, g: &dyn VectorMap) -> Result<LefschetzValue> {
        match &self.generator {
            None => Ok(LefschetzValue {
                value: 1,
                generator_degree: None,
            }),
            Some(Generator::CoreCircle { radius }) => {
                let r = *radius;
                let curve = move |t: f64| {
                    let a = std::f64::consts::TAU * t;
                    vec![r * a.cos(), r * a.sin()]
                };
                let cert = winding_degree(g, &curve, [0.0, 0.0], &WindingBudget::default())?;
                Ok(LefschetzValue {
                    value: 1 - cert.degree,
                    generator_degree: Some(cert),
                })
            }
            Some(Generator::CoreSphere { radius }) => {
                let cert = sphere_degree(g, *radius)?;
                Ok(LefschetzValue {
                    value: 1 + cert.degree,
                    generator_degree: Some(cert),
                })
            }
        }
    }
}

/// Degree about the origin of `g` restricted to the sphere of radius `r`
/// about the origin in `R^3`.
pub(crate) fn sphere_degree(g: &dyn VectorMap, r: f64) -> Result<DegreeCertificate> {
    if g.dim_in() != 3 || g.dim_out() != 3 {
        return Err(Error::Invalid(
            "sphere degree needs a map R^3 -> R^3".into(),
        ));
    }
    degree::sphere_degree(g, &[0.0; 3], r, &[0.0; 3], &PlBudget::default())
}

/// Degree of `g` restricted to a boundary sphere, about the sphere's
/// centre, with the sphere identified with the unit sphere by radial
/// projection.
pub fn sphere_degree_about(g: &dyn VectorMap, comp: &SphereComponent) -> Result<DegreeCertificate> {
    if g.dim_in() != 3 || g.dim_out() != 3 {
        return Err(Error::Invalid(
            "sphere degree needs a map R^3 -> R^3".into(),
        ));
    }
    let c = comp.center();
    let on_sphere = FnMap::new(3, 3, move |y| {
        let l = norm(y);
        let u: Vec<f64> = y.iter().map(|v| v / l).collect();
        let gy = g.apply(&comp.point(&u))?;
        Ok((0..3).map(|i| gy[i] - c[i]).collect())
    });
    sphere_degree(&on_sphere, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapexpr::MapExpr;

    #[test]
    fn contractible_domains_have_lefschetz_one() {
        let b = Domain::unit_ball(2, 1.0).unwrap();
        let g = MapExpr::parse("x2^2 - 0.3; x1*x2").unwrap();
        assert_eq!(homology_recipe(&b).lefschetz(&g).unwrap().value, 1);
        assert_eq!(homology_recipe(&b).betti, vec![1, 0, 0]);
    }

    #[test]
    fn annulus_recipe() {
        let a = Domain::annulus(1.0, 2.0, 0.5).unwrap();
        let r = homology_recipe(&a);
        assert_eq!(r.betti, vec![1, 1, 0]);
        let id = MapExpr::parse("x1; x2").unwrap();
        assert_eq!(r.lefschetz(&id).unwrap().value, 0);
        // mid radius times z^2/|z|^2
        let wrap =
            MapExpr::parse("1.5*(x1^2 - x2^2)/(x1^2 + x2^2); 1.5*2*x1*x2/(x1^2 + x2^2)").unwrap();
        let v = r.lefschetz(&wrap).unwrap();
        assert_eq!(v.value, -1);
        assert_eq!(v.generator_degree.unwrap().degree, 2);
    }

    #[test]
    fn shell_recipe() {
        let s = Domain::shell(1.0, 2.0, 0.5).unwrap();
        let r = homology_recipe(&s);
        assert_eq!(r.euler, 2);
        let id = MapExpr::parse("x1; x2; x3").unwrap();
        assert_eq!(r.lefschetz(&id).unwrap().value, 2);
        let anti = MapExpr::parse("-x1; -x2; -x3").unwrap();
        assert_eq!(r.lefschetz(&anti).unwrap().value, 0);
    }
}
