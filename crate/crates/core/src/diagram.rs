//! Matrix-valued functors on finite categories, test diagram generators,
//! and finite limits and colimits.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{LinAlgError, Matrix, Ring};
use crate::fincat::{ArrowId, FinCategory, ObjId, PointedFinCategory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("functoriality fails at {g} ∘ {f}")]
    FunctorialityViolation { g: ArrowId, f: ArrowId },
    #[error("identity of object {0} is not sent to an identity matrix")]
    IdentityViolation(ObjId),
    #[error("zero object has dimension {0}, expected 0")]
    PointednessViolation(usize),
    #[error("matrix for arrow {arrow} has shape {found:?}, expected {expected:?}")]
    BadShape {
        arrow: ArrowId,
        found: (usize, usize),
        expected: (usize, usize),
    },
    #[error("diagram data malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// A functor from a finite category to finite-dimensional vector spaces.
/// When `zero` is set the shape is pointed and the zero object has dimension 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatDiagram {
    shape: Arc<FinCategory>,
    zero: Option<ObjId>,
    ring: Ring,
    dims: Vec<usize>,
    mats: Vec<Matrix>,
}

impl MatDiagram {
    pub fn new(
        shape: Arc<FinCategory>,
        zero: Option<ObjId>,
        ring: Ring,
        dims: Vec<usize>,
        mats: Vec<Matrix>,
    ) -> Result<MatDiagram, DiagramError> {
        let c = &*shape;
        if dims.len() != c.num_objects() || mats.len() != c.num_arrows() {
            return Err(DiagramError::Malformed(format!(
                "expected {} dims and {} matrices, got {} and {}",
                c.num_objects(),
                c.num_arrows(),
                dims.len(),
                mats.len()
            )));
        }
        if let Some(z) = zero {
            if dims[z] != 0 {
                return Err(DiagramError::PointednessViolation(dims[z]));
            }
        }
        for a in c.arrow_ids() {
            let expected = (dims[c.tgt(a)], dims[c.src(a)]);
            if mats[a].shape() != expected {
                return Err(DiagramError::BadShape {
                    arrow: a,
                    found: mats[a].shape(),
                    expected,
                });
            }
            if mats[a].ring() != ring {
                return Err(LinAlgError::RingMismatch(ring, mats[a].ring()).into());
            }
        }
        for x in c.objects() {
            if !mats[c.identity(x)].is_identity() {
                return Err(DiagramError::IdentityViolation(x));
            }
        }
        for f in c.arrow_ids() {
            for &g in c.arrows_from(c.tgt(f)) {
                if mats[c.compose(g, f)] != &mats[g] * &mats[f] {
                    return Err(DiagramError::FunctorialityViolation { g, f });
                }
            }
        }
        Ok(MatDiagram {
            shape,
            zero,
            ring,
            dims,
            mats,
        })
    }

    pub fn pointed(
        shape: &PointedFinCategory,
        ring: Ring,
        dims: Vec<usize>,
        mats: Vec<Matrix>,
    ) -> Result<MatDiagram, DiagramError> {
        MatDiagram::new(shape.base_arc(), Some(shape.zero()), ring, dims, mats)
    }

    /// Builds a diagram from per-arrow matrices computed by `mat`.
    pub fn from_fn(
        shape: Arc<FinCategory>,
        zero: Option<ObjId>,
        ring: Ring,
        dims: Vec<usize>,
        mat: impl Fn(ArrowId) -> Matrix,
    ) -> Result<MatDiagram, DiagramError> {
        let mats = shape.arrow_ids().map(mat).collect();
        MatDiagram::new(shape, zero, ring, dims, mats)
    }

    pub fn zero(shape: Arc<FinCategory>, zero: Option<ObjId>, ring: Ring) -> MatDiagram {
        let dims = vec![0; shape.num_objects()];
        MatDiagram::from_fn(shape, zero, ring, dims, |_| Matrix::zeros(ring, 0, 0))
            .expect("zero diagram is functorial")
    }

    pub fn shape(&self) -> &FinCategory {
        &self.shape
    }

    pub fn shape_arc(&self) -> Arc<FinCategory> {
        self.shape.clone()
    }

    pub fn zero_object(&self) -> Option<ObjId> {
        self.zero
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn dim(&self, x: ObjId) -> usize {
        self.dims[x]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn mat(&self, a: ArrowId) -> &Matrix {
        &self.mats[a]
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Restriction along a functor given by object and arrow maps from `shape`.
    pub fn restrict(
        &self,
        shape: Arc<FinCategory>,
        zero: Option<ObjId>,
        objects: &[ObjId],
        arrows: &[ArrowId],
    ) -> Result<MatDiagram, DiagramError> {
        let dims = objects.iter().map(|&o| self.dims[o]).collect();
        let mats = arrows.iter().map(|&a| self.mats[a].clone()).collect();
        MatDiagram::new(shape, zero, self.ring, dims, mats)
    }
}

/// `b ↦` free module on `hom(c, b)`, acting by postcomposition. In the
/// pointed case the basis vector of the zero arrow is dropped.
pub fn representable(
    shape: Arc<FinCategory>,
    zero: Option<ObjId>,
    c: ObjId,
    ring: Ring,
) -> Result<MatDiagram, DiagramError> {
    let cat = &*shape;
    let is_zero_arrow = |a: ArrowId| {
        zero.is_some_and(|z| {
            let (p, q) = (cat.hom(cat.src(a), z)[0], cat.hom(z, cat.tgt(a))[0]);
            cat.compose(q, p) == a
        })
    };
    let basis: Vec<Vec<ArrowId>> = cat
        .objects()
        .map(|b| cat.hom(c, b).iter().copied().filter(|&a| !is_zero_arrow(a)).collect())
        .collect();
    let dims: Vec<usize> = basis.iter().map(Vec::len).collect();
    let mats = cat
        .arrow_ids()
        .map(|f| {
            let (s, t) = (cat.src(f), cat.tgt(f));
            let mut m = Matrix::zeros(ring, dims[t], dims[s]);
            for (j, &a) in basis[s].iter().enumerate() {
                if let Some(i) = basis[t].iter().position(|&x| x == cat.compose(f, a)) {
                    m[(i, j)] = ring.one();
                }
            }
            m
        })
        .collect();
    MatDiagram::new(shape, zero, ring, dims, mats)
}

/// Every object sent to `k^d`, every arrow to the identity.
pub fn constant(shape: Arc<FinCategory>, ring: Ring, d: usize) -> MatDiagram {
    let dims = vec![d; shape.num_objects()];
    MatDiagram::from_fn(shape, None, ring, dims, |_| Matrix::identity(ring, d))
        .expect("constant diagram is functorial")
}

/// A functor to finite sets and partial maps. `maps[a][x]` is the image
/// of element `x` under arrow `a`, or `None` where undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunctor {
    pub sizes: Vec<usize>,
    pub maps: Vec<Vec<Option<usize>>>,
}

impl SetFunctor {
    /// A total functor given by element maps.
    pub fn total(sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> SetFunctor {
        SetFunctor {
            sizes,
            maps: maps.into_iter().map(|m| m.into_iter().map(Some).collect()).collect(),
        }
    }

    pub fn validate(&self, shape: &FinCategory) -> Result<(), DiagramError> {
        if self.sizes.len() != shape.num_objects() || self.maps.len() != shape.num_arrows() {
            return Err(DiagramError::Malformed("set functor size mismatch".into()));
        }
        for a in shape.arrow_ids() {
            let (s, t) = (shape.src(a), shape.tgt(a));
            if self.maps[a].len() != self.sizes[s] || self.maps[a].iter().flatten().any(|&y| y >= self.sizes[t]) {
                return Err(DiagramError::Malformed(format!("element map of arrow {a} out of range")));
            }
        }
        for x in shape.objects() {
            let id = &self.maps[shape.identity(x)];
            if id.iter().enumerate().any(|(i, &v)| v != Some(i)) {
                return Err(DiagramError::IdentityViolation(x));
            }
        }
        for f in shape.arrow_ids() {
            for &g in shape.arrows_from(shape.tgt(f)) {
                let composite: Vec<Option<usize>> = self.maps[f]
                    .iter()
                    .map(|v| v.and_then(|y| self.maps[g][y]))
                    .collect();
                if composite != self.maps[shape.compose(g, f)] {
                    return Err(DiagramError::FunctorialityViolation { g, f });
                }
            }
        }
        Ok(())
    }
}

/// Free linearization of a set functor; with `basepoints` given, the
/// reduced linearization where each basepoint spans the zero vector.
pub fn linearize_set_functor(
    shape: Arc<FinCategory>,
    zero: Option<ObjId>,
    functor: &SetFunctor,
    ring: Ring,
    basepoints: Option<&[usize]>,
) -> Result<MatDiagram, DiagramError> {
    functor.validate(&shape)?;
    // basis index of element x at object b
    let coord = |b: ObjId, x: usize| -> Option<usize> {
        match basepoints {
            None => Some(x),
            Some(bp) if x == bp[b] => None,
            Some(bp) => Some(if x < bp[b] { x } else { x - 1 }),
        }
    };
    let dims: Vec<usize> = shape
        .objects()
        .map(|b| functor.sizes[b] - usize::from(basepoints.is_some()))
        .collect();
    let mats = shape
        .arrow_ids()
        .map(|a| {
            let (s, t) = (shape.src(a), shape.tgt(a));
            let mut m = Matrix::zeros(ring, dims[t], dims[s]);
            for (x, y) in functor.maps[a].iter().enumerate() {
                if let (Some(j), Some(i)) = (coord(s, x), y.and_then(|y| coord(t, y))) {
                    m[(i, j)] = ring.one();
                }
            }
            m
        })
        .collect();
    MatDiagram::new(shape, zero, ring, dims, mats)
}

/// The linear action of `Par^op` over finite sets on functions: a span
/// `X <-f- S -r-> Y` sends `δ_x` to the sum of `δ_{r(s)}` over `f(s) = x`.
/// On `Γ` this is reduced `k[S]`; on `FI♯` it is the permutation module.
pub fn span_action(
    par: &crate::generators::ParOp,
    fin: &crate::generators::FinTruncation,
    ring: Ring,
) -> MatDiagram {
    let c = par.triple.category_arc();
    let dims: Vec<usize> = c.objects().map(|x| fin.values(fin.cat.identity(x)).len()).collect();
    let mats = c
        .arrow_ids()
        .map(|a| {
            let span = par.spans[a];
            let mut m = Matrix::zeros(ring, dims[c.tgt(a)], dims[c.src(a)]);
            for (s, &y) in fin.values(span.right).iter().enumerate() {
                let x = fin.values(span.left)[s];
                m[(y, x)] = &m[(y, x)] + &ring.one();
            }
            m
        })
        .collect();
    MatDiagram::new(c, None, ring, dims, mats).expect("span action is functorial")
}

/// A limit or colimit: apex dimension and one leg per object of the shape.
/// Limit legs have shape `dim(j) × apex`, colimit legs `apex × dim(j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub apex: usize,
    pub legs: Vec<Matrix>,
}

fn offsets(dims: impl Iterator<Item = usize>) -> (Vec<usize>, usize) {
    let mut out = Vec::new();
    let mut acc = 0;
    for d in dims {
        out.push(acc);
        acc += d;
    }
    (out, acc)
}

/// The map `⊕_j X_j -> ⊕_{a: j→k} X_k`, `x ↦ X(a) x_j − x_k`.
fn difference_map(d: &MatDiagram) -> (Matrix, Vec<usize>) {
    let c = d.shape();
    let ring = d.ring();
    let (obj_off, total) = offsets(c.objects().map(|j| d.dim(j)));
    let (arr_off, arr_total) = offsets(c.arrow_ids().map(|a| d.dim(c.tgt(a))));
    let mut m = Matrix::zeros(ring, arr_total, total);
    for a in c.arrow_ids() {
        let (s, t) = (c.src(a), c.tgt(a));
        let mut block = d.mat(a).clone();
        if s == t {
            block = block.checked_add(&Matrix::identity(ring, d.dim(t)).neg()).expect("square");
            m.set_block(arr_off[a], obj_off[s], &block);
        } else {
            m.set_block(arr_off[a], obj_off[s], &block);
            m.set_block(arr_off[a], obj_off[t], &Matrix::identity(ring, d.dim(t)).neg());
        }
    }
    (m, obj_off)
}

/// Limit as the kernel of the difference map.
pub fn finite_limit(d: &MatDiagram) -> Cone {
    let (diff, obj_off) = difference_map(d);
    let k = diff.kernel_basis();
    let legs = d
        .shape()
        .objects()
        .map(|j| k.block(obj_off[j], 0, d.dim(j), k.cols()))
        .collect();
    Cone { apex: k.cols(), legs }
}

/// The map `⊕_{a: j→k} X_j -> ⊕_j X_j`, `y ↦ ι_k X(a) y − ι_j y`.
fn codifference_map(d: &MatDiagram) -> (Matrix, Vec<usize>) {
    let c = d.shape();
    let ring = d.ring();
    let (obj_off, total) = offsets(c.objects().map(|j| d.dim(j)));
    let (arr_off, arr_total) = offsets(c.arrow_ids().map(|a| d.dim(c.src(a))));
    let mut m = Matrix::zeros(ring, total, arr_total);
    for a in c.arrow_ids() {
        let (s, t) = (c.src(a), c.tgt(a));
        let id = Matrix::identity(ring, d.dim(s));
        let block = if s == t {
            d.mat(a).checked_add(&id.neg()).expect("square")
        } else {
            m.set_block(obj_off[s], arr_off[a], &id.neg());
            d.mat(a).clone()
        };
        m.set_block(obj_off[t], arr_off[a], &block);
    }
    (m, obj_off)
}

/// Colimit as the cokernel of the codifference map, cut out by its left kernel.
pub fn finite_colimit(d: &MatDiagram) -> Cone {
    let (codiff, obj_off) = codifference_map(d);
    let proj = codiff.transpose().kernel_basis().transpose();
    let legs = d
        .shape()
        .objects()
        .map(|j| proj.block(0, obj_off[j], proj.rows(), d.dim(j)))
        .collect();
    Cone {
        apex: proj.rows(),
        legs,
    }
}

/// The transposed diagram on the opposite shape.
pub fn opposite_diagram(d: &MatDiagram) -> MatDiagram {
    let shape = Arc::new(d.shape().opposite());
    let mats = d.mats.iter().map(Matrix::transpose).collect();
    MatDiagram::new(shape, d.zero, d.ring, d.dims.clone(), mats)
        .expect("transposition preserves functoriality")
}

/// A chain complex `d_0 ← d_1 ← … ← d_k`; `differentials[n-1]` is `∂_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainComplexData {
    pub dims: Vec<usize>,
    #[serde(serialize_with = "serialize_matrices")]
    pub differentials: Vec<Matrix>,
}

fn serialize_matrices<S: serde::Serializer>(mats: &[Matrix], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(mats.len()))?;
    for m in mats {
        seq.serialize_element(&matrix_rows(m))?;
    }
    seq.end()
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect())
        .collect()
}

impl ChainComplexData {
    pub fn new(dims: Vec<usize>, differentials: Vec<Matrix>) -> Result<ChainComplexData, DiagramError> {
        if differentials.len() + 1 != dims.len().max(1) {
            return Err(DiagramError::Malformed("need one differential per positive degree".into()));
        }
        for (n, dn) in differentials.iter().enumerate() {
            if dn.shape() != (dims[n], dims[n + 1]) {
                return Err(DiagramError::Malformed(format!("differential {} has wrong shape", n + 1)));
            }
        }
        for pair in differentials.windows(2) {
            if !(&pair[0] * &pair[1]).is_zero() {
                return Err(DiagramError::Malformed("differentials do not square to zero".into()));
            }
        }
        Ok(ChainComplexData { dims, differentials })
    }
}

/// On-disk diagram: a shape reference, the ring, dims by object name and
/// a row-major matrix for every arrow id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramFile {
    pub shape: String,
    pub ring: String,
    pub dims: BTreeMap<String, usize>,
    pub matrices: BTreeMap<usize, Vec<String>>,
}

impl DiagramFile {
    pub fn from_diagram(d: &MatDiagram, shape: &str) -> DiagramFile {
        let c = d.shape();
        DiagramFile {
            shape: shape.to_string(),
            ring: d.ring().to_string(),
            dims: c.objects().map(|x| (c.object_name(x).to_string(), d.dim(x))).collect(),
            matrices: c
                .arrow_ids()
                .map(|a| (a, d.mat(a).entries().iter().map(ToString::to_string).collect()))
                .collect(),
        }
    }

    pub fn to_diagram(
        &self,
        shape: Arc<FinCategory>,
        zero: Option<ObjId>,
    ) -> Result<MatDiagram, DiagramError> {
        let ring: Ring = self.ring.parse()?;
        let c = &*shape;
        let mut dims = Vec::with_capacity(c.num_objects());
        for x in c.objects() {
            let d = self.dims.get(c.object_name(x)).copied().or(if Some(x) == zero { Some(0) } else { None });
            dims.push(d.ok_or_else(|| DiagramError::Malformed(format!("missing dim for {}", c.object_name(x))))?);
        }
        if self.dims.keys().any(|k| c.object_by_name(k).is_none()) {
            return Err(DiagramError::Malformed("dims name an unknown object".into()));
        }
        if self.matrices.len() != c.num_arrows() || self.matrices.keys().any(|&a| a >= c.num_arrows()) {
            return Err(DiagramError::Malformed("matrices must be given for every arrow".into()));
        }
        let mut mats = Vec::with_capacity(c.num_arrows());
        for (&a, entries) in &self.matrices {
            let data = entries
                .iter()
                .map(|s| ring.parse_scalar(s))
                .collect::<Result<Vec<_>, _>>()?;
            mats.push(Matrix::from_entries(ring, dims[c.tgt(a)], dims[c.src(a)], data)?);
        }
        MatDiagram::new(shape, zero, ring, dims, mats)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram files serialize")
    }

    pub fn from_json(text: &str) -> Result<DiagramFile, DiagramError> {
        serde_json::from_str(text).map_err(|e| DiagramError::Malformed(e.to_string()))
    }
}
