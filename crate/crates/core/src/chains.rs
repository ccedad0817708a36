//! Chain complexes from normalized simplicial data, homology, and the
//! classical Moore complex used as an independent check.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{linearize_set_functor, opposite_diagram, ChainComplexData, DiagramError, MatDiagram, SetFunctor};
use crate::dkequiv::{normalize, DkError};
use crate::exactla::{Matrix, Ring};
use crate::generators::{monotone_maps, DeltaTruncation, DeltaVariant};
use crate::fincat::ObjId;
use crate::dktriple::N0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("normalized diagram is not on a truncated chain shape: {0}")]
    WrongShape(String),
    #[error("unknown simplicial preset {0:?}")]
    UnknownPreset(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Dk(#[from] DkError),
}

/// Reads a chain complex off a diagram on `N₀` of a simplex triple. The
/// diagram is covariant on the generator `[n-1] -> [n]`; its transpose is
/// the differential `∂_n`.
pub fn to_chain_complex(n0: &N0, xbar: &MatDiagram) -> Result<ChainComplexData, ChainError> {
    let shape = n0.category.base();
    if n0.category.zero() + 1 != shape.num_objects() {
        return Err(ChainError::WrongShape("zero object is not last".into()));
    }
    let k = shape.num_objects() - 2;
    let mut dims = Vec::new();
    let mut diffs = Vec::new();
    for n in 0..=k {
        dims.push(xbar.dim(n));
        if n == 0 {
            continue;
        }
        let gens: Vec<_> = shape
            .hom(n - 1, n)
            .iter()
            .copied()
            .filter(|&a| !n0.category.is_zero_arrow(a))
            .collect();
        let [g] = gens[..] else {
            return Err(ChainError::WrongShape(format!(
                "{} nonzero arrows between degrees {} and {n}",
                gens.len(),
                n - 1
            )));
        };
        diffs.push(xbar.mat(g).transpose());
    }
    Ok(ChainComplexData::new(dims, diffs)?)
}

/// `β_n = dim C_n − rank ∂_n − rank ∂_{n+1}`, with the top degree unbounded above.
pub fn homology(c: &ChainComplexData) -> Vec<usize> {
    let ranks: Vec<usize> = c.differentials.iter().map(Matrix::rank).collect();
    (0..c.dims.len())
        .map(|n| {
            let out = if n == 0 { 0 } else { ranks[n - 1] };
            let inc = ranks.get(n).copied().unwrap_or(0);
            c.dims[n] - out - inc
        })
        .collect()
}

/// `N_n = ∩_{i≥1} ker d_i` with differential induced by `d_0`, for a
/// simplicial vector space given as a diagram on `(Δ≤k)^op`.
pub fn moore_oracle(delta: &DeltaTruncation, x: &MatDiagram) -> Result<ChainComplexData, ChainError> {
    if x.shape() != &delta.cat.opposite() {
        return Err(ChainError::WrongShape("expected a diagram on the opposite simplex category".into()));
    }
    let ring = x.ring();
    let k = delta.k;
    let bases: Vec<Matrix> = (0..=k)
        .map(|n| {
            if n == 0 {
                return Matrix::identity(ring, x.dim(0));
            }
            let faces: Vec<&Matrix> = (1..=n).map(|i| x.mat(delta.coface(n, i))).collect();
            Matrix::vconcat(ring, x.dim(n), &faces).expect("faces share a source").kernel_basis()
        })
        .collect();
    let mut diffs = Vec::new();
    for n in 1..=k {
        let image = x.mat(delta.coface(n, 0)) * &bases[n];
        diffs.push(bases[n - 1].solve(&image).map_err(DkError::from)?);
    }
    let dims = bases.iter().map(Matrix::cols).collect();
    Ok(ChainComplexData::new(dims, diffs)?)
}

/// Simplicial sets by name: `delta:m`, `boundary:m`, `s1`.
pub fn simplicial_preset(name: &str, k: usize, ring: Ring) -> Result<(DeltaTruncation, MatDiagram), ChainError> {
    let unknown = || ChainError::UnknownPreset(name.to_string());
    let (simplices, keep): (usize, Box<dyn Fn(&[usize]) -> bool>) = match name.split_once(':') {
        Some(("delta", m)) => (m.parse().map_err(|_| unknown())?, Box::new(|_: &[usize]| true)),
        Some(("boundary", m)) => {
            let m: usize = m.parse().map_err(|_| unknown())?;
            (m, Box::new(move |s: &[usize]| !(0..=m).all(|v| s.contains(&v))))
        }
        None if name == "s1" => (1, Box::new(|_: &[usize]| true)),
        _ => return Err(unknown()),
    };
    let quotient_boundary = name == "s1";
    let delta = DeltaTruncation::new(k);
    let shape = Arc::new(delta.cat.opposite());
    // simplices of degree j: kept maps [j] -> [m], with S¹ collapsing its constant maps
    let class_of = |j: usize| -> Vec<Vec<usize>> {
        let maps: Vec<Vec<usize>> = monotone_maps(j, simplices).into_iter().filter(|s| keep(s)).collect();
        if quotient_boundary {
            let mut out = vec![vec![0; j + 1]];
            out.extend(maps.into_iter().filter(|s| s.first() != s.last()));
            out
        } else {
            maps
        }
    };
    let level: Vec<Vec<Vec<usize>>> = (0..=k).map(class_of).collect();
    let locate = |j: usize, s: &[usize]| -> usize {
        if quotient_boundary && s.first() == s.last() {
            return 0;
        }
        level[j].iter().position(|t| t == s).expect("simplices are closed under faces")
    };
    let sizes: Vec<usize> = level.iter().map(Vec::len).collect();
    // the Δ arrow f: [a] -> [b] acts K_b -> K_a by precomposition
    let maps: Vec<Vec<usize>> = shape
        .arrow_ids()
        .map(|f| {
            let values = delta.values(f);
            let b: ObjId = shape.src(f);
            let a: ObjId = shape.tgt(f);
            level[b]
                .iter()
                .map(|s| {
                    let composite: Vec<usize> = values.iter().map(|&v| s[v]).collect();
                    locate(a, &composite)
                })
                .collect()
        })
        .collect();
    let functor = SetFunctor::total(sizes, maps);
    let x = linearize_set_functor(shape, None, &functor, ring, None)?;
    Ok((delta, x))
}

pub const SIMPLICIAL_PRESETS: [&str; 6] = ["delta:0", "delta:1", "delta:2", "boundary:2", "s1", "boundary:1"];

/// Both sides of the classical comparison for one simplicial vector space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainComparison {
    pub normalized: ChainComplexData,
    pub normalized_homology: Vec<usize>,
    pub moore: ChainComplexData,
    pub moore_homology: Vec<usize>,
}

impl ChainComparison {
    pub fn agrees(&self) -> bool {
        self.normalized.dims == self.moore.dims && self.normalized_homology == self.moore_homology
    }
}

/// Normalizes a simplicial vector space along the min or max simplex
/// triple (after transposing to a diagram on `Δ`) and compares with the
/// Moore complex.
pub fn compare_with_moore(
    delta: &DeltaTruncation,
    variant: DeltaVariant,
    x: &MatDiagram,
) -> Result<ChainComparison, ChainError> {
    let triple = delta.triple(variant).map_err(|e| ChainError::WrongShape(e.to_string()))?;
    let cov = opposite_diagram(x);
    let norm = normalize(&triple, &cov)?;
    let normalized = to_chain_complex(&norm.n0, &norm.normalized)?;
    let moore = moore_oracle(delta, x)?;
    Ok(ChainComparison {
        normalized_homology: homology(&normalized),
        moore_homology: homology(&moore),
        normalized,
        moore,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Ring = Ring::Rational;

    #[test]
    fn preset_dimensions() {
        assert_eq!(simplicial_preset("delta:0", 2, Q).unwrap().1.dims(), &[1, 1, 1]);
        assert_eq!(simplicial_preset("s1", 2, Q).unwrap().1.dims(), &[1, 2, 3]);
        assert_eq!(simplicial_preset("boundary:2", 2, Q).unwrap().1.dims(), &[3, 6, 9]);
        assert_eq!(simplicial_preset("delta:1", 3, Q).unwrap().1.dims(), &[2, 3, 4, 5]);
        assert!(simplicial_preset("torus", 2, Q).is_err());
    }

    #[test]
    fn moore_complexes_of_simplices() {
        let (d, x) = simplicial_preset("delta:1", 3, Q).unwrap();
        assert_eq!(moore_oracle(&d, &x).unwrap().dims, vec![2, 1, 0, 0]);
        let (d, x) = simplicial_preset("delta:2", 3, Q).unwrap();
        assert_eq!(moore_oracle(&d, &x).unwrap().dims, vec![3, 3, 1, 0]);
        let (d, x) = simplicial_preset("delta:0", 2, Q).unwrap();
        assert_eq!(moore_oracle(&d, &x).unwrap().dims, vec![1, 0, 0]);
    }

    #[test]
    fn homology_of_small_complexes() {
        let zero = ChainComplexData::new(vec![0, 0], vec![Matrix::zeros(Q, 0, 0)]).unwrap();
        assert_eq!(homology(&zero), vec![0, 0]);
        let (d, x) = simplicial_preset("delta:1", 3, Q).unwrap();
        assert_eq!(homology(&moore_oracle(&d, &x).unwrap()), vec![1, 0, 0, 0]);
    }

    #[test]
    fn circle_through_both_routes() {
        let (d, x) = simplicial_preset("s1", 2, Q).unwrap();
        let cmp = compare_with_moore(&d, DeltaVariant::Min, &x).unwrap();
        assert_eq!(cmp.normalized.dims, vec![1, 1, 0]);
        assert_eq!(cmp.normalized_homology, vec![1, 1, 0]);
        assert!(cmp.normalized.differentials[0].is_zero());
        assert!(cmp.agrees());
    }

    #[test]
    fn interval_at_three() {
        let (d, x) = simplicial_preset("delta:1", 3, Q).unwrap();
        for variant in [DeltaVariant::Min, DeltaVariant::Max] {
            let cmp = compare_with_moore(&d, variant, &x).unwrap();
            assert_eq!(cmp.normalized.dims, vec![2, 1, 0, 0]);
            assert_eq!(cmp.normalized_homology, vec![1, 0, 0, 0]);
        }
    }
}
