//! Finite simplicial complexes over the rationals: boundary matrices, Betti
//! numbers, Euler characteristics, and Lefschetz numbers of simplicial
//! self-maps computed both on chains and on homology.

mod matrix;

use std::collections::{BTreeSet, HashMap};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::Serialize;

pub use matrix::QMatrix;

use crate::domains::{Domain, Shape};
use crate::error::{Error, Result};

/// A simplicial complex given by its simplices, each a sorted vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    /// `simplices[k]` lists the `k`-simplices in lexicographic order.
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplicialComplex {
    /// Closes a list of simplices under taking faces.
    pub fn from_maximal(maximal: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for s in maximal {
            let mut s = s.clone();
            s.sort_unstable();
            let len = s.len();
            s.dedup();
            if s.is_empty() || s.len() != len {
                return Err(Error::Invalid(format!(
                    "simplex {s:?} is empty or repeats a vertex"
                )));
            }
            // every nonempty subset is a face
            let k = s.len();
            if k > 20 {
                return Err(Error::Invalid("simplex dimension too large".into()));
            }
            for mask in 1u32..(1 << k) {
                let face: Vec<usize> = (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| s[i])
                    .collect();
                let d = face.len() - 1;
                if by_dim.len() <= d {
                    by_dim.resize_with(d + 1, BTreeSet::new);
                }
                by_dim[d].insert(face);
            }
        }
        if by_dim.is_empty() {
            return Err(Error::Invalid("complex has no simplices".into()));
        }
        let vertex_count = by_dim[0].iter().map(|v| v[0] + 1).max().unwrap_or(0);
        if by_dim[0].len() != vertex_count {
            return Err(Error::Invalid(
                "vertex labels must be 0..n with every label used".into(),
            ));
        }
        let simplices: Vec<Vec<Vec<usize>>> = by_dim
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let index = simplices
            .iter()
            .map(|list| {
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();
        Ok(SimplicialComplex {
            vertex_count,
            simplices,
            index,
        })
    }

    /// Parses maximal simplices, one per line as whitespace-separated vertex
    /// indices. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut maximal = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let s = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| {
                        Error::Invalid(format!("line {}: bad vertex index {t:?}", n + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            maximal.push(s);
        }
        Self::from_maximal(&maximal)
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        s.len()
            .checked_sub(1)
            .and_then(|k| self.index.get(k))
            .is_some_and(|m| m.contains_key(s))
    }

    /// `∂_k`: rows indexed by `(k-1)`-simplices, columns by `k`-simplices.
    /// `∂_0` is the zero map to the zero space.
    pub fn boundary_matrix(&self, k: usize) -> QMatrix {
        let cols = self.simplices(k).len();
        if k == 0 {
            return QMatrix::zeros(0, cols);
        }
        let mut m = QMatrix::zeros(self.simplices(k - 1).len(), cols);
        for (j, s) in self.simplices(k).iter().enumerate() {
            for i in 0..s.len() {
                let mut face = s.clone();
                face.remove(i);
                let row = self.index[k - 1][&face];
                m[(row, j)] = if i % 2 == 0 {
                    BigRational::one()
                } else {
                    -BigRational::one()
                };
            }
        }
        m
    }

    /// Checks `∂_{k} ∂_{k+1} = 0` in every degree.
    pub fn validate(&self) -> Result<()> {
        for k in 1..self.dim() {
            if !self
                .boundary_matrix(k)
                .mul(&self.boundary_matrix(k + 1))
                .is_zero()
            {
                return Err(Error::Internal(format!(
                    "boundary of boundary nonzero in degree {k}"
                )));
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, s)| {
                if k % 2 == 0 {
                    s.len() as i64
                } else {
                    -(s.len() as i64)
                }
            })
            .sum()
    }

    /// Rational Betti numbers `b_0 .. b_dim`.
    pub fn betti_numbers(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.dim() + 1)
            .map(|k| {
                if k > self.dim() {
                    0
                } else {
                    self.boundary_matrix(k).rank()
                }
            })
            .collect();
        (0..=self.dim())
            .map(|k| self.simplices(k).len() - ranks[k] - ranks[k + 1])
            .collect()
    }

    /// Cartesian product with an interval, triangulated as a staircase over
    /// each simplex; vertex `v` at height `1` becomes `v + vertex_count`.
    pub fn prism(&self) -> SimplicialComplex {
        let n = self.vertex_count;
        let mut maximal = Vec::new();
        for s in self.simplices.iter().flatten() {
            for j in 0..s.len() {
                let mut p: Vec<usize> = s[..=j].to_vec();
                p.extend(s[j..].iter().map(|v| v + n));
                maximal.push(p);
            }
        }
        SimplicialComplex::from_maximal(&maximal).expect("prism of a valid complex")
    }

    /// Boundary of a hexagon: a circle on six vertices.
    pub fn hexagon() -> SimplicialComplex {
        let edges: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        SimplicialComplex::from_maximal(&edges).unwrap()
    }

    /// Cone over the hexagon: a disk with 7 vertices, 12 edges, 6 triangles.
    pub fn hexagon_disk() -> SimplicialComplex {
        let tris: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6, 6]).collect();
        SimplicialComplex::from_maximal(&tris).unwrap()
    }

    /// Prism over the hexagon: an annulus with 12 vertices, 24 edges and 12
    /// triangles.
    pub fn hexagon_annulus() -> SimplicialComplex {
        Self::hexagon().prism()
    }

    pub fn simplex(dim: usize) -> SimplicialComplex {
        SimplicialComplex::from_maximal(&[(0..=dim).collect()]).unwrap()
    }

    /// Boundary of the tetrahedron, a 2-sphere.
    pub fn tetrahedron_boundary() -> SimplicialComplex {
        let faces: Vec<Vec<usize>> = (0..4)
            .map(|skip| (0..4).filter(|&v| v != skip).collect())
            .collect();
        SimplicialComplex::from_maximal(&faces).unwrap()
    }

    /// A complex with the homotopy type of a catalog domain.
    pub fn model_of(domain: &Domain) -> SimplicialComplex {
        match (domain.shape(), domain.dim()) {
            (Shape::Annulus { .. }, _) => Self::hexagon_annulus(),
            (Shape::Shell { .. }, _) => Self::tetrahedron_boundary().prism(),
            (_, 2) => Self::hexagon_disk(),
            (_, n) => Self::simplex(n),
        }
    }
}

/// A vertex map that sends simplices to simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialSelfMap {
    vertex_map: Vec<usize>,
}

impl SimplicialSelfMap {
    pub fn new(c: &SimplicialComplex, vertex_map: Vec<usize>) -> Result<Self> {
        if vertex_map.len() != c.vertex_count() || vertex_map.iter().any(|&v| v >= c.vertex_count())
        {
            return Err(Error::Invalid(
                "vertex map does not act on the complex".into(),
            ));
        }
        for s in c.simplices.iter().flatten() {
            let image: BTreeSet<usize> = s.iter().map(|&v| vertex_map[v]).collect();
            let image: Vec<usize> = image.into_iter().collect();
            if !c.contains(&image) {
                return Err(Error::Invalid(format!(
                    "simplex {s:?} maps to {image:?}, which is not a simplex"
                )));
            }
        }
        Ok(SimplicialSelfMap { vertex_map })
    }

    pub fn identity(c: &SimplicialComplex) -> Self {
        SimplicialSelfMap {
            vertex_map: (0..c.vertex_count()).collect(),
        }
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Induced map on `k`-chains; simplices with collapsed images go to 0.
    pub fn chain_matrix(&self, c: &SimplicialComplex, k: usize) -> QMatrix {
        let list = c.simplices(k);
        let mut m = QMatrix::zeros(list.len(), list.len());
        for (j, s) in list.iter().enumerate() {
            let image: Vec<usize> = s.iter().map(|&v| self.vertex_map[v]).collect();
            let mut sorted = image.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != image.len() {
                continue;
            }
            let mut inversions = 0;
            for a in 0..image.len() {
                for b in a + 1..image.len() {
                    if image[a] > image[b] {
                        inversions += 1;
                    }
                }
            }
            let row = c.index[k][&sorted];
            m[(row, j)] = if inversions % 2 == 0 {
                BigRational::one()
            } else {
                -BigRational::one()
            };
        }
        m
    }

    /// Checks that the chain maps commute with the boundary.
    pub fn check_chain_map(&self, c: &SimplicialComplex) -> Result<()> {
        for k in 1..=c.dim() {
            let lhs = c.boundary_matrix(k).mul(&self.chain_matrix(c, k));
            let rhs = self.chain_matrix(c, k - 1).mul(&c.boundary_matrix(k));
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "chain map does not commute with ∂ in degree {k}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LefschetzReport {
    pub value: i64,
    /// Traces on chains, degree by degree.
    pub chain_traces: Vec<i64>,
    /// Traces on rational homology, degree by degree.
    pub homology_traces: Vec<i64>,
}

fn to_integer(q: &BigRational) -> Result<i64> {
    if !q.is_integer() {
        return Err(Error::Internal(format!("trace {q} is not an integer")));
    }
    q.to_integer()
        .to_i64()
        .ok_or_else(|| Error::Internal("trace out of range".into()))
}

/// Trace of the map induced on `H_k`.
fn homology_trace(c: &SimplicialComplex, m: &SimplicialSelfMap, k: usize) -> Result<BigRational> {
    let cycles = c.boundary_matrix(k).kernel();
    let n = c.simplices(k).len();
    let next = c.boundary_matrix(k + 1);
    let (_, pivots) = next.rref();
    let mut basis: Vec<Vec<BigRational>> = pivots.iter().map(|&j| next.column(j)).collect();
    let boundary_rank = basis.len();
    for z in cycles {
        let mut trial = basis.clone();
        trial.push(z.clone());
        if QMatrix::from_columns(n, &trial).rank() == trial.len() {
            basis = trial;
        }
    }
    let full = QMatrix::from_columns(n, &basis);
    let f = m.chain_matrix(c, k);
    let mut trace = BigRational::zero();
    for (i, z) in basis.iter().enumerate().skip(boundary_rank) {
        let image = f.mul_vec(z);
        let coords = full
            .solve_exact(&image)
            .ok_or_else(|| Error::Internal(format!("image of a {k}-cycle is not a cycle")))?;
        trace += &coords[i];
    }
    Ok(trace)
}

/// Lefschetz number by the Hopf trace formula. The alternating sum of chain
/// traces and of homology traces are both computed and must agree.
pub fn lefschetz_hopf(c: &SimplicialComplex, m: &SimplicialSelfMap) -> Result<LefschetzReport> {
    m.check_chain_map(c)?;
    let mut chain_traces = Vec::new();
    let mut homology_traces = Vec::new();
    for k in 0..=c.dim() {
        chain_traces.push(to_integer(&m.chain_matrix(c, k).trace())?);
        homology_traces.push(to_integer(&homology_trace(c, m, k)?)?);
    }
    let alt = |t: &[i64]| -> i64 {
        t.iter()
            .enumerate()
            .map(|(k, v)| if k % 2 == 0 { *v } else { -v })
            .sum()
    };
    let (chain, homology) = (alt(&chain_traces), alt(&homology_traces));
    if chain != homology {
        return Err(Error::Internal(format!(
            "chain-level Lefschetz {chain} differs from homology-level {homology}"
        )));
    }
    Ok(LefschetzReport {
        value: chain,
        chain_traces,
        homology_traces,
    })
}

/// Integer rational helper for callers building vectors by hand.
pub fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_counts_and_euler() {
        let disk = SimplicialComplex::hexagon_disk();
        assert_eq!(disk.counts(), vec![7, 12, 6]);
        assert_eq!(disk.euler_characteristic(), 1);
        let ann = SimplicialComplex::hexagon_annulus();
        assert_eq!(ann.counts(), vec![12, 24, 12]);
        assert_eq!(ann.euler_characteristic(), 0);
        let sphere = SimplicialComplex::tetrahedron_boundary();
        assert_eq!(sphere.euler_characteristic(), 2);
    }

    #[test]
    fn betti_examples() {
        assert_eq!(
            SimplicialComplex::hexagon_disk().betti_numbers(),
            vec![1, 0, 0]
        );
        assert_eq!(
            SimplicialComplex::hexagon_annulus().betti_numbers(),
            vec![1, 1, 0]
        );
        assert_eq!(
            SimplicialComplex::tetrahedron_boundary().betti_numbers(),
            vec![1, 0, 1]
        );
        assert_eq!(
            SimplicialComplex::tetrahedron_boundary()
                .prism()
                .betti_numbers(),
            vec![1, 0, 1, 0]
        );
    }

    #[test]
    fn boundary_squares_to_zero() {
        for c in [
            SimplicialComplex::hexagon_disk(),
            SimplicialComplex::hexagon_annulus(),
            SimplicialComplex::tetrahedron_boundary().prism(),
            SimplicialComplex::simplex(4),
        ] {
            c.validate().unwrap();
        }
    }

    #[test]
    fn hexagon_reflection_and_rotation() {
        let h = SimplicialComplex::hexagon();
        let refl = SimplicialSelfMap::new(&h, (0..6).map(|i| (6 - i) % 6).collect()).unwrap();
        assert_eq!(lefschetz_hopf(&h, &refl).unwrap().value, 2);
        let rot = SimplicialSelfMap::new(&h, (0..6).map(|i| (i + 1) % 6).collect()).unwrap();
        let r = lefschetz_hopf(&h, &rot).unwrap();
        assert_eq!(r.value, 0);
        assert_eq!(r.homology_traces, vec![1, 1]);
    }

    #[test]
    fn identity_gives_euler_characteristic() {
        for c in [
            SimplicialComplex::hexagon_disk(),
            SimplicialComplex::hexagon_annulus(),
            SimplicialComplex::tetrahedron_boundary(),
            SimplicialComplex::tetrahedron_boundary().prism(),
        ] {
            let id = SimplicialSelfMap::identity(&c);
            assert_eq!(
                lefschetz_hopf(&c, &id).unwrap().value,
                c.euler_characteristic()
            );
        }
    }

    #[test]
    fn non_simplicial_vertex_map_is_rejected() {
        let h = SimplicialComplex::hexagon();
        assert!(SimplicialSelfMap::new(&h, vec![0, 2, 4, 0, 2, 4]).is_err());
    }

    #[test]
    fn parse_closes_under_faces() {
        let c = SimplicialComplex::parse("# two triangles\n0 1 2\n1 2 3\n").unwrap();
        assert_eq!(c.counts(), vec![4, 5, 2]);
        assert!(SimplicialComplex::parse("0 x").is_err());
        assert!(SimplicialComplex::parse("0 2").is_err());
    }
}
