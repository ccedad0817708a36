//! Normalization `Fun(B, A) -> Fun⁰(N₀, A)` by induction along the object
//! order, its inverse by product cones over Epi classes, and the checks
//! that tie the two together.

use thiserror::Error;

use crate::diagram::{finite_colimit, finite_limit, DiagramError, MatDiagram};
use crate::dktriple::{DKTriple, N0};
use crate::exactla::{complement_of_split_pair, invert_unitriangular_block, LinAlgError, Matrix};
use crate::fincat::{ArrowId, ObjId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DkError {
    #[error("diagram is not defined on the triple's category")]
    WrongShape,
    #[error("Φ at object {object} is not block unitriangular: {source}")]
    PhiNotInvertible { object: ObjId, source: LinAlgError },
    #[error("split pair at object {object} has no complement: {source}")]
    NotSplit { object: ObjId, source: LinAlgError },
    #[error("object {object} needs {needed}, which is not yet normalized")]
    OrderViolation { object: ObjId, needed: ObjId },
    #[error("dimension of object {object} is {found}, summands give {expected}")]
    DimensionConservation {
        object: ObjId,
        found: usize,
        expected: usize,
    },
    #[error("regular arrow {0} has no factorization through an Epi representative")]
    FactorizationAmbiguity(ArrowId),
    #[error("triple is not partially monotone")]
    NotPartiallyMonotone,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// The split pair at one object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectWitness {
    pub object: ObjId,
    /// Representatives of the non-invertible Epi classes, in block order.
    pub rows: Vec<ArrowId>,
    /// Matched non-invertible dual Epi representatives, in block order.
    pub cols: Vec<ArrowId>,
    pub blocks: Vec<usize>,
    /// `⊕ X̄ -> X_b` over non-invertible dual Epis.
    pub s: Matrix,
    /// `X_b -> ⊕ X̄` over non-invertible Epis.
    pub r: Matrix,
    pub phi: Matrix,
    pub phi_inv: Matrix,
    /// Basis of `ker r`, realizing `X̄_b -> X_b`.
    pub incl: Matrix,
    /// Retraction `X_b -> X̄_b` with `proj·s = 0`.
    pub proj: Matrix,
}

impl ObjectWitness {
    pub fn dim(&self) -> usize {
        self.incl.cols()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub objects: Vec<ObjectWitness>,
}

#[derive(Debug, Clone)]
pub struct NormalizationResult {
    pub n0: N0,
    pub normalized: MatDiagram,
    pub witness: EquivalenceWitness,
}

fn check_shape(triple: &DKTriple, x: &MatDiagram) -> Result<(), DkError> {
    if x.zero_object().is_some() || x.shape() != triple.category() {
        return Err(DkError::WrongShape);
    }
    Ok(())
}

pub fn normalize(triple: &DKTriple, x: &MatDiagram) -> Result<NormalizationResult, DkError> {
    check_shape(triple, x)?;
    let c = triple.category();
    let ring = x.ring();
    let mut done: Vec<Option<ObjectWitness>> = vec![None; c.num_objects()];

    for &b in &triple.object_order().linear {
        let p = triple.pairing(b);
        let row_idx = p.non_invertible_rows(c);
        let rows: Vec<ArrowId> = row_idx.iter().map(|&i| p.rows.representative(i)).collect();
        let cols: Vec<ArrowId> = row_idx
            .iter()
            .map(|&i| p.cols.representative(p.matching[i]))
            .collect();
        let ready = |o: ObjId| -> Result<&ObjectWitness, DkError> {
            done[o]
                .as_ref()
                .ok_or(DkError::OrderViolation { object: b, needed: o })
        };
        let s_blocks = cols
            .iter()
            .map(|&d| Ok(x.mat(d) * &ready(c.src(d))?.incl))
            .collect::<Result<Vec<_>, DkError>>()?;
        let r_blocks = rows
            .iter()
            .map(|&e| Ok(&ready(c.tgt(e))?.proj * x.mat(e)))
            .collect::<Result<Vec<_>, DkError>>()?;
        let blocks: Vec<usize> = r_blocks.iter().map(Matrix::rows).collect();
        let s = Matrix::hconcat(ring, x.dim(b), &s_blocks.iter().collect::<Vec<_>>())?;
        let r = Matrix::vconcat(ring, x.dim(b), &r_blocks.iter().collect::<Vec<_>>())?;
        let phi = r.checked_mul(&s)?;
        let phi_inv = invert_unitriangular_block(&phi, &blocks)
            .map_err(|source| DkError::PhiNotInvertible { object: b, source })?;
        let (incl, proj) = complement_of_split_pair(&s.checked_mul(&phi_inv)?, &r)
            .map_err(|source| DkError::NotSplit { object: b, source })?;
        done[b] = Some(ObjectWitness {
            object: b,
            rows,
            cols,
            blocks,
            s,
            r,
            phi,
            phi_inv,
            incl,
            proj,
        });
    }
    let objects: Vec<ObjectWitness> = done.into_iter().map(|w| w.expect("every object visited")).collect();

    for b in c.objects() {
        let p = triple.pairing(b);
        let expected: usize = p
            .rows
            .representatives()
            .iter()
            .map(|&e| objects[c.tgt(e)].dim())
            .sum();
        if expected != x.dim(b) {
            return Err(DkError::DimensionConservation {
                object: b,
                found: x.dim(b),
                expected,
            });
        }
    }

    let n0 = triple.build_n0();
    let shape = n0.category.base_arc();
    let zero = n0.category.zero();
    let dim_of = |o: ObjId| if o == zero { 0 } else { objects[o].dim() };
    let dims: Vec<usize> = shape.objects().map(dim_of).collect();
    let normalized = MatDiagram::from_fn(shape.clone(), Some(zero), ring, dims, |a| {
        let (s, t) = (shape.src(a), shape.tgt(a));
        match n0.back[a] {
            Some(m) => &(&objects[t].proj * x.mat(m)) * &objects[s].incl,
            None => Matrix::zeros(ring, dim_of(t), dim_of(s)),
        }
    })?;
    Ok(NormalizationResult {
        n0,
        normalized,
        witness: EquivalenceWitness { objects },
    })
}

/// Offsets of the Epi-class summands of `Y_b = ⊕_e Ȳ_{tgt e}`.
fn summands(triple: &DKTriple, bar_dim: impl Fn(ObjId) -> usize, b: ObjId) -> (Vec<usize>, usize) {
    let c = triple.category();
    let mut offs = Vec::new();
    let mut acc = 0;
    for e in triple.pairing(b).rows.representatives() {
        offs.push(acc);
        acc += bar_dim(c.tgt(e));
    }
    (offs, acc)
}

/// `Y_b := ⊕` over Epi classes `b ↠ n` of `Ȳ_n`, with arrows acting
/// through regular factorizations.
pub fn denormalize(triple: &DKTriple, n0: &N0, ybar: &MatDiagram) -> Result<MatDiagram, DkError> {
    if ybar.shape() != n0.category.base() || ybar.zero_object() != Some(n0.category.zero()) {
        return Err(DkError::WrongShape);
    }
    let c = triple.category();
    let ring = ybar.ring();
    let bar = |n: ObjId| ybar.dim(n0.object(n));
    let layout: Vec<(Vec<usize>, usize)> = c.objects().map(|b| summands(triple, bar, b)).collect();
    let dims: Vec<usize> = layout.iter().map(|l| l.1).collect();
    let mut mats = Vec::with_capacity(c.num_arrows());
    for f in c.arrow_ids() {
        let (bs, bt) = (c.src(f), c.tgt(f));
        let mut m = Matrix::zeros(ring, dims[bt], dims[bs]);
        let rows = triple.pairing(bt).rows.representatives();
        for (ri, &e) in rows.iter().enumerate() {
            let u = c.compose(e, f);
            if !triple.classes().reg[u] {
                continue;
            }
            let (ci, reg) = triple
                .regular_factor(u)
                .ok_or(DkError::FactorizationAmbiguity(u))?;
            let block = ybar.mat(n0.arrow_map[reg].expect("regular Monos lie in N₀"));
            m.set_block(layout[bt].0[ri], layout[bs].0[ci], block);
        }
        mats.push(m);
    }
    Ok(MatDiagram::new(triple.category_arc(), None, ring, dims, mats)?)
}

/// Components of the natural isomorphism `X ≅ denormalize(normalize(X))`.
#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub theta: Vec<Matrix>,
    pub psi: Vec<Matrix>,
}

fn theta_component(triple: &DKTriple, x: &MatDiagram, w: &EquivalenceWitness, b: ObjId) -> Matrix {
    let c = triple.category();
    let reps = triple.pairing(b).rows.representatives();
    let parts: Vec<Matrix> = reps
        .iter()
        .map(|&e| &w.objects[c.tgt(e)].proj * x.mat(e))
        .collect();
    Matrix::vconcat(x.ring(), x.dim(b), &parts.iter().collect::<Vec<_>>()).expect("blocks share width")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundTripError {
    #[error("component at object {0} is not invertible")]
    NotInvertible(ObjId),
    #[error("naturality fails at arrow {0}")]
    NotNatural(ArrowId),
    #[error(transparent)]
    Dk(#[from] DkError),
}

/// `θ_b: X_b -> Y_b` for `Y = denormalize(normalize(X))`, checked
/// invertible and natural on every arrow.
pub fn roundtrip_check(triple: &DKTriple, x: &MatDiagram) -> Result<Vec<Matrix>, RoundTripError> {
    let norm = normalize(triple, x)?;
    let y = denormalize(triple, &norm.n0, &norm.normalized)?;
    let c = triple.category();
    let theta: Vec<Matrix> = c
        .objects()
        .map(|b| theta_component(triple, x, &norm.witness, b))
        .collect();
    for b in c.objects() {
        if !theta[b].is_invertible() {
            return Err(RoundTripError::NotInvertible(b));
        }
    }
    for f in c.arrow_ids() {
        if &theta[c.tgt(f)] * x.mat(f) != y.mat(f) * &theta[c.src(f)] {
            return Err(RoundTripError::NotNatural(f));
        }
    }
    Ok(theta)
}

/// `ψ_n: Ȳ_n -> normalize(denormalize(Ȳ))_n`, the identity summand
/// followed by the new retraction, checked invertible and natural on `N₀`.
pub fn reverse_roundtrip_check(
    triple: &DKTriple,
    n0: &N0,
    ybar: &MatDiagram,
) -> Result<Vec<Matrix>, RoundTripError> {
    let y = denormalize(triple, n0, ybar)?;
    let back = normalize(triple, &y)?;
    let c = triple.category();
    let shape = n0.category.base();
    let zero = n0.category.zero();
    let ring = ybar.ring();
    let bar = |n: ObjId| ybar.dim(n);
    let psi: Vec<Matrix> = shape
        .objects()
        .map(|n| {
            if n == zero {
                return Matrix::zeros(ring, 0, 0);
            }
            let p = triple.pairing(n);
            let id_row = p.identity_row(c);
            let (offs, total) = summands(triple, bar, n);
            let mut incl = Matrix::zeros(ring, total, bar(n));
            incl.set_block(offs[id_row], 0, &Matrix::identity(ring, bar(n)));
            &back.witness.objects[n].proj * &incl
        })
        .collect();
    for n in shape.objects() {
        if !psi[n].is_invertible() {
            return Err(RoundTripError::NotInvertible(n));
        }
    }
    for a in shape.arrow_ids() {
        if &psi[shape.tgt(a)] * ybar.mat(a) != back.normalized.mat(a) * &psi[shape.src(a)] {
            return Err(RoundTripError::NotNatural(a));
        }
    }
    Ok(psi)
}

pub fn roundtrip_both(triple: &DKTriple, x: &MatDiagram) -> Result<RoundTrip, RoundTripError> {
    let theta = roundtrip_check(triple, x)?;
    let norm = normalize(triple, x)?;
    let psi = reverse_roundtrip_check(triple, &norm.n0, &norm.normalized)?;
    Ok(RoundTrip { theta, psi })
}

/// Dimensions observed by the direct total fiber and cofiber computation at one object.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AuditReport {
    pub object: ObjId,
    pub dim_x: usize,
    pub dim_colim: usize,
    pub dim_lim: usize,
    pub dim_ker_lim_map: usize,
    pub dim_coker_colim_map: usize,
    pub dim_normalized: usize,
    /// `colim -> X -> lim` is invertible.
    pub composite_invertible: bool,
    /// `ker(X -> lim) -> X -> coker(colim -> X)` is invertible.
    pub complement_iso: bool,
    /// Dimensions agree with the witness path.
    pub agrees: bool,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.composite_invertible && self.complement_iso && self.agrees
    }
}

/// `X_b -> lim_{E_≠(b)} X` as the unique factorization of the Epi legs.
fn limit_map(triple: &DKTriple, x: &MatDiagram, b: ObjId) -> Result<(Matrix, usize), DkError> {
    let c = triple.category();
    let ring = x.ring();
    let (shape, objs, under) = triple.epi_slice(b);
    let dims: Vec<usize> = objs.iter().map(|&e| c.tgt(e)).collect();
    let restricted = x.restrict(std::sync::Arc::new(shape), None, &dims, &under)?;
    let lim = finite_limit(&restricted);
    let legs = Matrix::vconcat(ring, lim.apex, &lim.legs.iter().collect::<Vec<_>>())?;
    let maps: Vec<&Matrix> = objs.iter().map(|&e| x.mat(e)).collect();
    let target = Matrix::vconcat(ring, x.dim(b), &maps)?;
    Ok((legs.solve(&target)?, lim.apex))
}

/// `colim_{E∨_≠(b)} X -> X_b` as the unique factorization of the dual Epi legs.
fn colimit_map(triple: &DKTriple, x: &MatDiagram, b: ObjId) -> Result<(Matrix, usize), DkError> {
    let c = triple.category();
    let ring = x.ring();
    let (shape, objs, under) = triple.dual_slice(b);
    let dims: Vec<usize> = objs.iter().map(|&d| c.src(d)).collect();
    let restricted = x.restrict(std::sync::Arc::new(shape), None, &dims, &under)?;
    let colim = finite_colimit(&restricted);
    let legs = Matrix::hconcat(ring, colim.apex, &colim.legs.iter().collect::<Vec<_>>())?;
    let maps: Vec<&Matrix> = objs.iter().map(|&d| x.mat(d)).collect();
    let target = Matrix::hconcat(ring, x.dim(b), &maps)?;
    // c·legs = target, solved on transposes
    let ct = legs.transpose().solve(&target.transpose())?;
    Ok((ct.transpose(), colim.apex))
}

/// Compares the direct (co)limit computation at `b` against the witness.
pub fn section_retraction_audit(
    triple: &DKTriple,
    x: &MatDiagram,
    b: ObjId,
) -> Result<AuditReport, DkError> {
    let norm = normalize(triple, x)?;
    audit_with(triple, x, &norm, b)
}

fn audit_with(
    triple: &DKTriple,
    x: &MatDiagram,
    norm: &NormalizationResult,
    b: ObjId,
) -> Result<AuditReport, DkError> {
    let (l, dim_lim) = limit_map(triple, x, b)?;
    let (cmap, dim_colim) = colimit_map(triple, x, b)?;
    let composite = l.checked_mul(&cmap)?;
    let k = l.kernel_basis();
    let q = cmap.transpose().kernel_basis().transpose();
    let kq = q.checked_mul(&k)?;
    let w = &norm.witness.objects[b];
    let dim_normalized = w.dim();
    let agrees = dim_colim == w.s.cols()
        && dim_lim == w.r.rows()
        && k.cols() == dim_normalized
        && q.rows() == dim_normalized
        && x.dim(b) == dim_colim + dim_normalized
        && cmap.rank() == dim_colim;
    Ok(AuditReport {
        object: b,
        dim_x: x.dim(b),
        dim_colim,
        dim_lim,
        dim_ker_lim_map: k.cols(),
        dim_coker_colim_map: q.rows(),
        dim_normalized,
        composite_invertible: composite.is_invertible(),
        complement_iso: kq.is_invertible(),
        agrees,
    })
}

/// Audits every object in the linear order.
pub fn audit_all(triple: &DKTriple, x: &MatDiagram) -> Result<Vec<AuditReport>, DkError> {
    let norm = normalize(triple, x)?;
    triple
        .object_order()
        .linear
        .iter()
        .map(|&b| audit_with(triple, x, &norm, b))
        .collect()
}

/// The two vanishing criteria at one object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct KanVerdict {
    pub object: ObjId,
    pub normalized_vanishes: bool,
    pub limit_cone: bool,
}

impl KanVerdict {
    pub fn agree(&self) -> bool {
        self.normalized_vanishes == self.limit_cone
    }
}

fn kan_verdict(triple: &DKTriple, x: &MatDiagram, norm: &NormalizationResult, b: ObjId) -> Result<KanVerdict, DkError> {
    let (l, _) = limit_map(triple, x, b)?;
    Ok(KanVerdict {
        object: b,
        normalized_vanishes: norm.witness.objects[b].dim() == 0,
        limit_cone: l.is_square() && l.is_invertible(),
    })
}

/// Whether `X̄_b = 0`, together with the limit cone criterion.
pub fn kan_detector(triple: &DKTriple, x: &MatDiagram, b: ObjId) -> Result<KanVerdict, DkError> {
    if !triple.is_partially_monotone() {
        return Err(DkError::NotPartiallyMonotone);
    }
    let norm = normalize(triple, x)?;
    kan_verdict(triple, x, &norm, b)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TruncationReport {
    pub level: usize,
    pub truncated: bool,
    pub verdicts: Vec<KanVerdict>,
}

impl TruncationReport {
    pub fn criteria_agree(&self) -> bool {
        self.verdicts.iter().all(KanVerdict::agree)
    }
}

/// `X` is `k`-truncated when `X̄` vanishes at every object of level above `k`.
pub fn truncation_detector(triple: &DKTriple, x: &MatDiagram, k: usize) -> Result<TruncationReport, DkError> {
    if !triple.is_partially_monotone() {
        return Err(DkError::NotPartiallyMonotone);
    }
    let norm = normalize(triple, x)?;
    let order = triple.object_order();
    let verdicts = order
        .linear
        .iter()
        .map(|&b| kan_verdict(triple, x, &norm, b))
        .collect::<Result<Vec<_>, _>>()?;
    let truncated = verdicts
        .iter()
        .filter(|v| order.level(v.object) > k)
        .all(|v| v.normalized_vanishes);
    Ok(TruncationReport {
        level: k,
        truncated,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{constant, representable};
    use crate::exactla::Ring;
    use crate::generators::{delta_min, gamma, DeltaTruncation, DeltaVariant};

    const Q: Ring = Ring::Rational;

    #[test]
    fn zero_diagram_normalizes_to_zero() {
        let t = delta_min(2);
        let x = MatDiagram::zero(t.category_arc(), None, Q);
        let n = normalize(&t, &x).unwrap();
        assert!(n.normalized.is_zero());
        assert!(n.witness.objects.iter().all(|w| w.incl.cols() == 0));
        assert!(denormalize(&t, &n.n0, &n.normalized).unwrap().is_zero());
    }

    #[test]
    fn witness_identities_hold() {
        let t = delta_min(2);
        for c in 0..3 {
            let x = representable(t.category_arc(), None, c, Q).unwrap();
            let n = normalize(&t, &x).unwrap();
            for w in &n.witness.objects {
                assert!((&w.proj * &w.incl).is_identity());
                assert!((&w.proj * &w.s).is_zero());
                assert!((&w.r * &w.incl).is_zero());
                assert_eq!(&w.phi * &w.phi_inv, Matrix::identity(Q, w.phi.rows()));
            }
        }
    }

    #[test]
    fn phi_at_two_has_three_blocks() {
        let t = delta_min(2);
        let x = representable(t.category_arc(), None, 2, Q).unwrap();
        let n = normalize(&t, &x).unwrap();
        let w = &n.witness.objects[2];
        assert_eq!(w.blocks.len(), 3);
        assert!((&w.phi * &w.phi_inv).is_identity());
    }

    #[test]
    fn representable_at_zero_normalizes_to_point_and_line() {
        let d = DeltaTruncation::new(2);
        let t = d.triple(DeltaVariant::Min).unwrap();
        let x = representable(t.category_arc(), None, 0, Q).unwrap();
        let n = normalize(&t, &x).unwrap();
        assert_eq!(&n.normalized.dims()[..3], &[1, 1, 0]);
    }

    #[test]
    fn denormalize_counts_surjection_classes() {
        let t = delta_min(2);
        let n0 = t.build_n0();
        // pointed representable at [0] on N₀ has dims (1, 1, 0)
        let ybar = representable(n0.category.base_arc(), Some(n0.category.zero()), 0, Q).unwrap();
        let y = denormalize(&t, &n0, &ybar).unwrap();
        assert_eq!(y.dims(), &[1, 2, 3]);
    }

    #[test]
    fn gamma_denormalized_singleton_counts_subsets() {
        let g = gamma(2);
        let n0 = g.triple.build_n0();
        let ybar = representable(n0.category.base_arc(), Some(n0.category.zero()), 1, Q).unwrap();
        // one surjection onto the singleton from each nonempty set
        assert_eq!(&ybar.dims()[..3], &[0, 1, 1]);
        let y = denormalize(&g.triple, &n0, &ybar).unwrap();
        // subsets weighted by the value on their cardinality: 0; 1; 1+1+1
        assert_eq!(y.dims(), &[0, 1, 3]);
    }

    #[test]
    fn round_trips_on_representables() {
        let t = delta_min(2);
        for c in 0..3 {
            let x = representable(t.category_arc(), None, c, Q).unwrap();
            roundtrip_both(&t, &x).unwrap();
        }
    }

    #[test]
    fn audit_passes_on_representable() {
        let t = delta_min(2);
        let x = representable(t.category_arc(), None, 1, Q).unwrap();
        for r in audit_all(&t, &x).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn constant_diagram_is_zero_truncated() {
        let t = delta_min(2);
        let x = constant(t.category_arc(), Q, 2);
        let r = truncation_detector(&t, &x, 0).unwrap();
        assert!(r.truncated);
        assert!(r.criteria_agree());
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let t = delta_min(1);
        let other = delta_min(2);
        let x = MatDiagram::zero(other.category_arc(), None, Q);
        assert!(matches!(normalize(&t, &x), Err(DkError::WrongShape)));
    }
}
