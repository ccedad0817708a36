//! DK-triples `(B, E, E∨)`: derived arrow classes, the axiom checks
//! (T1)–(T5), pairing matrices, the object order, and the pointed
//! categories `N₀` and `V`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fincat::{
    Arrow, ArrowClassSet, ArrowId, CategoryError, FinCategory, ObjId, PointedFinCategory,
    RawCategory, Side,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    T1,
    T2,
    T3,
    T4,
    T5,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub pass: bool,
    /// Arrows witnessing a failure, lowest ids first.
    pub counterexample: Vec<ArrowId>,
    pub detail: Option<String>,
}

impl AxiomVerdict {
    fn pass(axiom: Axiom) -> AxiomVerdict {
        AxiomVerdict {
            axiom,
            pass: true,
            counterexample: Vec::new(),
            detail: None,
        }
    }

    fn fail(axiom: Axiom, counterexample: Vec<ArrowId>, detail: String) -> AxiomVerdict {
        AxiomVerdict {
            axiom,
            pass: false,
            counterexample,
            detail: Some(detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("not a wide subcategory: {0}")]
    NotWideSubcategory(String),
    #[error("axiom {} fails: {}", .0.axiom, .0.detail.as_deref().unwrap_or(""))]
    AxiomFailure(Box<AxiomVerdict>),
    #[error("object order is not antisymmetric: {0}")]
    NotAntisymmetric(String),
    #[error("triple is not partially monotone")]
    NotPartiallyMonotone,
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// Membership vectors of the classes derived from `E` and `E∨`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedClasses {
    /// `E∨_≠ ∘ B`: arrows ending in a non-invertible dual Epi.
    pub sing: Vec<bool>,
    pub reg: Vec<bool>,
    /// Complement of `B ∘ E_≠`.
    pub mono: Vec<bool>,
    pub mreg: Vec<bool>,
}

impl DerivedClasses {
    pub fn compute(cat: &FinCategory, epi: &[bool], dual: &[bool]) -> DerivedClasses {
        let n = cat.num_arrows();
        let mut sing = vec![false; n];
        let mut cosing = vec![false; n];
        for a in cat.arrow_ids() {
            if dual[a] && !cat.is_iso(a) {
                for f in cat.arrows_to(cat.src(a)) {
                    sing[cat.compose(a, f)] = true;
                }
            }
            if epi[a] && !cat.is_iso(a) {
                for &g in cat.arrows_from(cat.tgt(a)) {
                    cosing[cat.compose(g, a)] = true;
                }
            }
        }
        let reg: Vec<bool> = sing.iter().map(|s| !s).collect();
        let mono: Vec<bool> = cosing.iter().map(|s| !s).collect();
        let mreg = reg.iter().zip(&mono).map(|(r, m)| *r && *m).collect();
        DerivedClasses {
            sing,
            reg,
            mono,
            mreg,
        }
    }

    pub fn list(set: &[bool]) -> Vec<ArrowId> {
        (0..set.len()).filter(|&a| set[a]).collect()
    }
}

/// The pairing matrix at one object together with the matching and
/// admissible order certifying (T2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingData {
    pub object: ObjId,
    /// Classes of Epis out of the object.
    pub rows: ArrowClassSet,
    /// Classes of dual Epis into the object.
    pub cols: ArrowClassSet,
    /// `iso[i][j]`: the composite of row `i` after column `j` is invertible.
    pub iso: Vec<Vec<bool>>,
    /// Column matched to each row.
    pub matching: Vec<usize>,
    /// Rows in admissible order.
    pub order: Vec<usize>,
    /// Whether the iso relation admits exactly one perfect matching.
    pub unique_matching: bool,
}

impl PairingData {
    /// True when the iso entries are exactly the matched pairs.
    pub fn is_diagonal(&self) -> bool {
        self.iso
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == (self.matching[i] == j)))
    }

    /// Iso pattern with rows in admissible order and columns matched to them.
    pub fn ordered_grid(&self) -> Vec<Vec<bool>> {
        self.order
            .iter()
            .map(|&i| self.order.iter().map(|&j| self.iso[i][self.matching[j]]).collect())
            .collect()
    }

    /// Row index of the identity class.
    pub fn identity_row(&self, cat: &FinCategory) -> usize {
        (0..self.rows.len())
            .find(|&i| cat.is_iso(self.rows.representative(i)))
            .expect("identity is an Epi")
    }

    /// Rows in admissible order with the identity class removed.
    pub fn non_invertible_rows(&self, cat: &FinCategory) -> Vec<usize> {
        let id = self.identity_row(cat);
        self.order.iter().copied().filter(|&i| i != id).collect()
    }

    pub fn render(&self, cat: &FinCategory) -> String {
        let names: Vec<String> = self
            .order
            .iter()
            .map(|&i| cat.arrow_name(self.rows.representative(i)))
            .collect();
        let cols: Vec<String> = self
            .order
            .iter()
            .map(|&i| cat.arrow_name(self.cols.representative(self.matching[i])))
            .collect();
        let width = names.iter().map(String::len).max().unwrap_or(0);
        let cw = cols.iter().map(String::len).max().unwrap_or(0).max(1);
        let mut out = format!("{:width$} |", "", width = width);
        for c in &cols {
            out.push_str(&format!(" {c:>cw$}"));
        }
        out.push('\n');
        for (r, row) in self.ordered_grid().iter().enumerate() {
            out.push_str(&format!("{:width$} |", names[r], width = width));
            for &v in row {
                out.push_str(&format!(" {:>cw$}", if v { "~" } else { "." }));
            }
            out.push('\n');
        }
        out
    }
}

/// The relation `b' <= b` (a dual Epi `b' -> b` exists) with a linear
/// extension sorted by predecessor count, then object id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectOrder {
    leq: Vec<Vec<bool>>,
    iso: Vec<Vec<bool>>,
    pub linear: Vec<ObjId>,
    pub position: Vec<usize>,
}

impl ObjectOrder {
    fn compute(cat: &FinCategory, dual: &[bool]) -> ObjectOrder {
        let m = cat.num_objects();
        let mut leq = vec![vec![false; m]; m];
        let mut iso = vec![vec![false; m]; m];
        for a in cat.arrow_ids() {
            if dual[a] {
                leq[cat.src(a)][cat.tgt(a)] = true;
            }
            if cat.is_iso(a) {
                iso[cat.src(a)][cat.tgt(a)] = true;
            }
        }
        let preds: Vec<usize> = (0..m).map(|b| (0..m).filter(|&x| leq[x][b]).count()).collect();
        let mut linear: Vec<ObjId> = (0..m).collect();
        linear.sort_by_key(|&b| (preds[b], b));
        let mut position = vec![0; m];
        for (p, &b) in linear.iter().enumerate() {
            position[b] = p;
        }
        ObjectOrder {
            leq,
            iso,
            linear,
            position,
        }
    }

    fn check_antisymmetric(&self, cat: &FinCategory) -> Result<(), TripleError> {
        let m = self.leq.len();
        for x in 0..m {
            for y in 0..m {
                if self.leq[x][y] && self.leq[y][x] && !self.iso[x][y] {
                    return Err(TripleError::NotAntisymmetric(format!(
                        "{} and {} are comparable both ways but not isomorphic",
                        cat.object_name(x),
                        cat.object_name(y)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn leq(&self, x: ObjId, y: ObjId) -> bool {
        self.leq[x][y]
    }

    pub fn less(&self, x: ObjId, y: ObjId) -> bool {
        self.leq[x][y] && !self.iso[x][y]
    }

    /// Number of isomorphism classes strictly below `b`.
    pub fn level(&self, b: ObjId) -> usize {
        let below: Vec<ObjId> = (0..self.leq.len()).filter(|&x| self.less(x, b)).collect();
        let mut reps = 0;
        for (i, &x) in below.iter().enumerate() {
            if !below[..i].iter().any(|&y| self.iso[x][y]) {
                reps += 1;
            }
        }
        reps
    }
}

/// Full report of [`check_triple`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub wide: Result<(), String>,
    pub verdicts: Vec<AxiomVerdict>,
    pub pairings: Vec<PairingData>,
    pub order: Option<ObjectOrder>,
    pub order_error: Option<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.wide.is_ok() && self.order_error.is_none() && self.verdicts.iter().all(|v| v.pass)
    }
}

/// A validated DK-triple. Only [`validate_triple`] produces values.
#[derive(Debug, Clone)]
pub struct DKTriple {
    cat: Arc<FinCategory>,
    epi: Vec<bool>,
    dual: Vec<bool>,
    classes: DerivedClasses,
    pairings: Vec<PairingData>,
    order: ObjectOrder,
}

fn membership(cat: &FinCategory, ids: &[ArrowId], what: &str) -> Result<Vec<bool>, TripleError> {
    let mut v = vec![false; cat.num_arrows()];
    for &a in ids {
        if a >= cat.num_arrows() {
            return Err(TripleError::NotWideSubcategory(format!("{what} names unknown arrow {a}")));
        }
        v[a] = true;
    }
    Ok(v)
}

fn check_wide(cat: &FinCategory, set: &[bool], what: &str) -> Result<(), String> {
    for a in cat.arrow_ids() {
        if cat.is_iso(a) && !set[a] {
            return Err(format!("{what} misses the isomorphism {}", cat.arrow_name(a)));
        }
    }
    for f in cat.arrow_ids().filter(|&f| set[f]) {
        for &g in cat.arrows_from(cat.tgt(f)) {
            if set[g] && !set[cat.compose(g, f)] {
                return Err(format!(
                    "{what} is not closed under composition: {} after {}",
                    cat.arrow_name(g),
                    cat.arrow_name(f)
                ));
            }
        }
    }
    Ok(())
}

/// A factorization `f = e∨ ∘ m ∘ e'` with `e' ∈ E`, `m ∈ M ∩ Reg`, `e∨ ∈ E∨`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factorization {
    pub epi: ArrowId,
    pub mono: ArrowId,
    pub dual: ArrowId,
}

struct Tables<'a> {
    cat: &'a FinCategory,
    epi: &'a [bool],
    dual: &'a [bool],
    classes: &'a DerivedClasses,
    epi_out: Vec<Vec<ArrowId>>,
    dual_in: Vec<Vec<ArrowId>>,
}

impl<'a> Tables<'a> {
    fn new(
        cat: &'a FinCategory,
        epi: &'a [bool],
        dual: &'a [bool],
        classes: &'a DerivedClasses,
    ) -> Tables<'a> {
        let m = cat.num_objects();
        let mut epi_out = vec![Vec::new(); m];
        let mut dual_in = vec![Vec::new(); m];
        for a in cat.arrow_ids() {
            if epi[a] {
                epi_out[cat.src(a)].push(a);
            }
            if dual[a] {
                dual_in[cat.tgt(a)].push(a);
            }
        }
        Tables {
            cat,
            epi,
            dual,
            classes,
            epi_out,
            dual_in,
        }
    }

    fn factorizations(&self, f: ArrowId) -> Vec<Factorization> {
        let c = self.cat;
        let mut out = Vec::new();
        for &e in &self.epi_out[c.src(f)] {
            for &d in &self.dual_in[c.tgt(f)] {
                for &m in c.hom(c.tgt(e), c.src(d)) {
                    if self.classes.mreg[m] && c.compose(d, c.compose(m, e)) == f {
                        out.push(Factorization {
                            epi: e,
                            mono: m,
                            dual: d,
                        });
                    }
                }
            }
        }
        out
    }

    /// Number of isomorphisms `(h, k)` from factorization `a` to `b`.
    fn count_isos(&self, a: &Factorization, b: &Factorization) -> usize {
        let c = self.cat;
        let mut count = 0;
        for &h in c.hom(c.tgt(a.epi), c.tgt(b.epi)) {
            if !c.is_iso(h) || c.compose(h, a.epi) != b.epi {
                continue;
            }
            for &k in c.hom(c.tgt(a.mono), c.tgt(b.mono)) {
                if c.is_iso(k)
                    && c.compose(k, a.mono) == c.compose(b.mono, h)
                    && c.compose(b.dual, k) == a.dual
                {
                    count += 1;
                }
            }
        }
        count
    }

    fn check_t1(&self) -> AxiomVerdict {
        let c = self.cat;
        for f in c.arrow_ids() {
            let facts = self.factorizations(f);
            let Some(first) = facts.first() else {
                return AxiomVerdict::fail(
                    Axiom::T1,
                    vec![f],
                    format!("arrow {} has no factorization", c.arrow_name(f)),
                );
            };
            for other in &facts {
                let n = self.count_isos(first, other);
                if n != 1 {
                    let describe = |x: &Factorization| {
                        format!(
                            "({}, {}, {})",
                            c.arrow_name(x.epi),
                            c.arrow_name(x.mono),
                            c.arrow_name(x.dual)
                        )
                    };
                    return AxiomVerdict::fail(
                        Axiom::T1,
                        vec![f],
                        format!(
                            "arrow {}: factorizations {} and {} are related by {n} isomorphisms; all factorizations: [{}]",
                            c.arrow_name(f),
                            describe(first),
                            describe(other),
                            facts.iter().map(describe).collect::<Vec<_>>().join(", ")
                        ),
                    );
                }
            }
        }
        AxiomVerdict::pass(Axiom::T1)
    }

    fn pairing(&self, b: ObjId, rank: &[(usize, ObjId)]) -> Result<PairingData, AxiomVerdict> {
        let c = self.cat;
        let rows = c.arrow_classes(&self.epi_out[b], Side::Source);
        let cols = c.arrow_classes(&self.dual_in[b], Side::Target);
        let iso: Vec<Vec<bool>> = (0..rows.len())
            .map(|i| {
                (0..cols.len())
                    .map(|j| c.is_iso(c.compose(rows.representative(i), cols.representative(j))))
                    .collect()
            })
            .collect();
        let fail = |why: String| {
            AxiomVerdict::fail(
                Axiom::T2,
                vec![c.identity(b)],
                format!("object {}: {why}", c.object_name(b)),
            )
        };
        if rows.len() != cols.len() {
            return Err(fail(format!(
                "{} Epi classes but {} dual Epi classes",
                rows.len(),
                cols.len()
            )));
        }
        let matchings = perfect_matchings(&iso);
        let key = |i: usize| {
            let r = rows.representative(i);
            (rank[c.tgt(r)], r)
        };
        let admissible = matchings
            .iter()
            .find_map(|m| topological_order(&iso, m, key).map(|o| (m.clone(), o)));
        let Some((matching, order)) = admissible else {
            return Err(fail(if matchings.is_empty() {
                "no perfect matching by invertible composites".to_string()
            } else {
                "no matching admits a triangular order".to_string()
            }));
        };
        Ok(PairingData {
            object: b,
            rows,
            cols,
            iso,
            matching,
            order,
            unique_matching: matchings.len() == 1,
        })
    }

    fn check_t3(&self) -> AxiomVerdict {
        let c = self.cat;
        let mut comp = vec![false; c.num_arrows()];
        for e in c.arrow_ids().filter(|&e| self.epi[e]) {
            for &d in c.arrows_from(c.tgt(e)) {
                if self.dual[d] {
                    comp[c.compose(d, e)] = true;
                }
            }
        }
        for f in c.arrow_ids().filter(|&f| comp[f]) {
            for &g in c.arrows_from(c.tgt(f)) {
                if comp[g] && !comp[c.compose(g, f)] {
                    return AxiomVerdict::fail(
                        Axiom::T3,
                        vec![g, f],
                        format!(
                            "{} after {} leaves E∨∘E",
                            c.arrow_name(g),
                            c.arrow_name(f)
                        ),
                    );
                }
            }
        }
        AxiomVerdict::pass(Axiom::T3)
    }

    fn check_t4(&self) -> AxiomVerdict {
        let c = self.cat;
        let cl = self.classes;
        for f in c.arrow_ids().filter(|&f| cl.mreg[f]) {
            for &g in c.arrows_from(c.tgt(f)) {
                if cl.mreg[g] && !cl.mono[c.compose(g, f)] {
                    return AxiomVerdict::fail(
                        Axiom::T4,
                        vec![g, f],
                        format!(
                            "regular Monos {} after {} compose to a non-Mono",
                            c.arrow_name(g),
                            c.arrow_name(f)
                        ),
                    );
                }
            }
        }
        AxiomVerdict::pass(Axiom::T4)
    }

    fn check_t5(&self) -> AxiomVerdict {
        let c = self.cat;
        let cl = self.classes;
        for s in c.arrow_ids().filter(|&s| cl.sing[s]) {
            for &m in c.arrows_from(c.tgt(s)) {
                if cl.mono[m] && !cl.sing[c.compose(m, s)] {
                    return AxiomVerdict::fail(
                        Axiom::T5,
                        vec![m, s],
                        format!(
                            "Mono {} after singular {} is regular",
                            c.arrow_name(m),
                            c.arrow_name(s)
                        ),
                    );
                }
            }
        }
        AxiomVerdict::pass(Axiom::T5)
    }
}

/// All perfect matchings of the bipartite relation, rows matched in order
/// and columns tried by index.
fn perfect_matchings(rel: &[Vec<bool>]) -> Vec<Vec<usize>> {
    fn go(rel: &[Vec<bool>], row: usize, used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if row == rel.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..rel[row].len() {
            if rel[row][j] && !used[j] {
                used[j] = true;
                cur.push(j);
                go(rel, row + 1, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    let cols = rel.first().map_or(0, Vec::len);
    go(rel, 0, &mut vec![false; cols], &mut Vec::new(), &mut out);
    out
}

/// Orders rows so that every invertible off-diagonal entry lies above the
/// diagonal. Kahn's algorithm, ready rows taken by smallest key.
fn topological_order<K: Ord>(
    iso: &[Vec<bool>],
    matching: &[usize],
    key: impl Fn(usize) -> K,
) -> Option<Vec<usize>> {
    let n = iso.len();
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && iso[i][matching[j]] {
                indeg[j] += 1;
            }
        }
    }
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&i| !done[i] && indeg[i] == 0)
            .min_by_key(|&i| key(i))?;
        done[next] = true;
        order.push(next);
        for j in 0..n {
            if j != next && iso[next][matching[j]] {
                indeg[j] -= 1;
            }
        }
    }
    Some(order)
}

/// Runs every check and collects the verdicts.
pub fn check_triple(cat: &FinCategory, epis: &[ArrowId], duals: &[ArrowId]) -> ValidationReport {
    let n = cat.num_arrows();
    let (epi, dual) = match (membership(cat, epis, "E"), membership(cat, duals, "E∨")) {
        (Ok(e), Ok(d)) => (e, d),
        (Err(e), _) | (_, Err(e)) => {
            return ValidationReport {
                wide: Err(e.to_string()),
                verdicts: Vec::new(),
                pairings: Vec::new(),
                order: None,
                order_error: None,
            }
        }
    };
    let wide = check_wide(cat, &epi, "E").and_then(|_| check_wide(cat, &dual, "E∨"));
    if wide.is_err() {
        return ValidationReport {
            wide,
            verdicts: Vec::new(),
            pairings: Vec::new(),
            order: None,
            order_error: None,
        };
    }
    debug_assert_eq!(epi.len(), n);
    let classes = DerivedClasses::compute(cat, &epi, &dual);
    let tables = Tables::new(cat, &epi, &dual, &classes);
    let order = ObjectOrder::compute(cat, &dual);
    let rank: Vec<(usize, ObjId)> = cat.objects().map(|b| (order.position[b], b)).collect();

    let t1 = tables.check_t1();
    let mut pairings = Vec::new();
    let mut t2 = AxiomVerdict::pass(Axiom::T2);
    for b in cat.objects() {
        match tables.pairing(b, &rank) {
            Ok(p) => pairings.push(p),
            Err(v) => {
                if t2.pass {
                    t2 = v;
                }
            }
        }
    }
    let order_error = order.check_antisymmetric(cat).err().map(|e| e.to_string());
    ValidationReport {
        wide,
        verdicts: vec![t1, t2, tables.check_t3(), tables.check_t4(), tables.check_t5()],
        pairings,
        order: Some(order),
        order_error,
    }
}

/// Certifies `(B, E, E∨)` as a DK-triple or returns the first failure.
pub fn validate_triple(
    cat: Arc<FinCategory>,
    epis: &[ArrowId],
    duals: &[ArrowId],
) -> Result<DKTriple, TripleError> {
    let report = check_triple(&cat, epis, duals);
    report.wide.clone().map_err(TripleError::NotWideSubcategory)?;
    if let Some(v) = report.verdicts.iter().find(|v| !v.pass) {
        return Err(TripleError::AxiomFailure(Box::new(v.clone())));
    }
    if let Some(e) = report.order_error {
        return Err(TripleError::NotAntisymmetric(e));
    }
    let epi = membership(&cat, epis, "E")?;
    let dual = membership(&cat, duals, "E∨")?;
    let classes = DerivedClasses::compute(&cat, &epi, &dual);
    Ok(DKTriple {
        cat,
        epi,
        dual,
        classes,
        pairings: report.pairings,
        order: report.order.expect("order computed"),
    })
}

/// Result of [`DKTriple::build_n0`].
#[derive(Debug, Clone)]
pub struct N0 {
    pub category: PointedFinCategory,
    /// `N₀` arrow of each regular Mono of `B`.
    pub arrow_map: Vec<Option<ArrowId>>,
    /// `B` arrow behind each nonzero `N₀` arrow.
    pub back: Vec<Option<ArrowId>>,
}

impl N0 {
    /// Object `n` of `N₀` corresponding to `b`; ids agree.
    pub fn object(&self, b: ObjId) -> ObjId {
        b
    }
}

/// Result of [`DKTriple::build_v`].
#[derive(Debug, Clone)]
pub struct VCategory {
    pub category: PointedFinCategory,
    /// Object of `V` for each object of `B`.
    pub b_objects: Vec<ObjId>,
    /// Object of `V` for each object `n` of `N`, indexed by `[n]`.
    pub n_objects: Vec<ObjId>,
    /// Arrow of `V` for each arrow of `B`.
    pub b_arrows: Vec<ArrowId>,
    /// Arrow of `V` for each regular Mono of `B`.
    pub n_arrows: Vec<Option<ArrowId>>,
    /// Arrow `b -> n` of `V` for each regular arrow `b -> [n]` of `B`.
    pub r_arrows: Vec<Option<ArrowId>>,
}

#[derive(Clone, Copy)]
enum VKind {
    B(ArrowId),
    N(ArrowId),
    R(ArrowId),
    ZeroId,
    Zero,
}

impl DKTriple {
    pub fn category(&self) -> &FinCategory {
        &self.cat
    }

    pub fn category_arc(&self) -> Arc<FinCategory> {
        Arc::clone(&self.cat)
    }

    pub fn is_epi(&self, a: ArrowId) -> bool {
        self.epi[a]
    }

    pub fn is_dual_epi(&self, a: ArrowId) -> bool {
        self.dual[a]
    }

    pub fn epis(&self) -> Vec<ArrowId> {
        DerivedClasses::list(&self.epi)
    }

    pub fn dual_epis(&self) -> Vec<ArrowId> {
        DerivedClasses::list(&self.dual)
    }

    pub fn classes(&self) -> &DerivedClasses {
        &self.classes
    }

    pub fn pairing(&self, b: ObjId) -> &PairingData {
        &self.pairings[b]
    }

    pub fn pairings(&self) -> &[PairingData] {
        &self.pairings
    }

    pub fn object_order(&self) -> &ObjectOrder {
        &self.order
    }

    /// Matching of Epi classes to dual Epi classes at `b`, as pairs of
    /// representatives, plus whether it is the only possible one.
    pub fn dual_bijection(&self, b: ObjId) -> (Vec<(ArrowId, ArrowId)>, bool) {
        let p = &self.pairings[b];
        let pairs = (0..p.rows.len())
            .map(|i| (p.rows.representative(i), p.cols.representative(p.matching[i])))
            .collect();
        (pairs, p.unique_matching)
    }

    /// The (T1) factorizations of `f`.
    pub fn factorizations(&self, f: ArrowId) -> Vec<Factorization> {
        Tables::new(&self.cat, &self.epi, &self.dual, &self.classes).factorizations(f)
    }

    /// Writes a regular arrow `u` as `m ∘ e` where `e` is the chosen
    /// representative of its Epi class and `m` is a regular Mono.
    pub fn regular_factor(&self, u: ArrowId) -> Option<(usize, ArrowId)> {
        let c = &*self.cat;
        if !self.classes.reg[u] {
            return None;
        }
        let p = &self.pairings[c.src(u)];
        let mut found = None;
        for i in 0..p.rows.len() {
            let e = p.rows.representative(i);
            for &m in c.hom(c.tgt(e), c.tgt(u)) {
                if self.classes.mreg[m] && c.compose(m, e) == u {
                    assert!(found.is_none(), "regular arrow {u} factors twice");
                    found = Some((i, m));
                }
            }
        }
        found
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.pairings.iter().all(PairingData::is_diagonal)
    }

    /// `B = E∨ ∘ E`.
    pub fn is_reduced(&self) -> bool {
        self.reduced_arrows().iter().all(|&b| b)
    }

    fn reduced_arrows(&self) -> Vec<bool> {
        let c = &*self.cat;
        let mut comp = vec![false; c.num_arrows()];
        for e in c.arrow_ids().filter(|&e| self.epi[e]) {
            for &d in c.arrows_from(c.tgt(e)) {
                if self.dual[d] {
                    comp[c.compose(d, e)] = true;
                }
            }
        }
        comp
    }

    /// The triple on the wide subcategory `E∨ ∘ E`, revalidated.
    pub fn reduce(&self) -> Result<(DKTriple, Vec<Option<ArrowId>>), TripleError> {
        let keep = self.reduced_arrows();
        let (sub, map) = self.cat.subcategory(&keep)?;
        let epis: Vec<ArrowId> = self.epis().iter().map(|&a| map[a].expect("Epis are kept")).collect();
        let duals: Vec<ArrowId> = self
            .dual_epis()
            .iter()
            .map(|&a| map[a].expect("dual Epis are kept"))
            .collect();
        Ok((validate_triple(Arc::new(sub), &epis, &duals)?, map))
    }

    /// `(B^op, (E∨)^op, E^op)`, revalidated.
    pub fn dual_triple(&self) -> Result<DKTriple, TripleError> {
        validate_triple(Arc::new(self.cat.opposite()), &self.dual_epis(), &self.epis())
    }

    /// Every Mono `b' -> b` has `b' <= b`.
    pub fn is_monotone(&self) -> bool {
        let c = &*self.cat;
        c.arrow_ids()
            .filter(|&m| self.classes.mono[m])
            .all(|m| self.order.leq(c.src(m), c.tgt(m)))
    }

    /// No Mono `b' -> b` has `b' > b`.
    pub fn is_partially_monotone(&self) -> bool {
        let c = &*self.cat;
        c.arrow_ids()
            .filter(|&m| self.classes.mono[m])
            .all(|m| !self.order.less(c.tgt(m), c.src(m)))
    }

    /// `N₀ = M / (M ∩ Sing)`: regular Monos plus zero arrows, composed in `B`.
    pub fn build_n0(&self) -> N0 {
        let (category, arrow_map) = self
            .cat
            .pointed_restriction(&self.classes.mreg)
            .expect("regular Monos give a category by (T4) and (T5)");
        let mut back = vec![None; category.base().num_arrows()];
        for (a, m) in arrow_map.iter().enumerate() {
            if let Some(m) = m {
                back[*m] = Some(a);
            }
        }
        N0 {
            category,
            arrow_map,
            back,
        }
    }

    /// The upper triangular category gluing `B₊` and `N₀` along the regular arrows.
    pub fn build_v(&self) -> Result<VCategory, CategoryError> {
        let c = &*self.cat;
        let m = c.num_objects();
        let mut objects: Vec<String> = c.object_names().to_vec();
        for b in c.objects() {
            let mut name = format!("N({})", c.object_name(b));
            while objects.contains(&name) {
                name.push('\'');
            }
            objects.push(name);
        }
        let mut zero_name = String::from("0");
        while objects.contains(&zero_name) {
            zero_name.push('\'');
        }
        objects.push(zero_name);
        let z = 2 * m;
        let nobj = |b: ObjId| m + b;

        let mut arrows: Vec<Arrow> = Vec::new();
        let mut kinds: Vec<VKind> = Vec::new();
        let mut b_arrows = Vec::new();
        for a in c.arrow_ids() {
            b_arrows.push(arrows.len());
            arrows.push(c.arrow(a).clone());
            kinds.push(VKind::B(a));
        }
        let mut n_arrows = vec![None; c.num_arrows()];
        for a in c.arrow_ids().filter(|&a| self.classes.mreg[a]) {
            n_arrows[a] = Some(arrows.len());
            let mut arrow = Arrow::new(nobj(c.src(a)), nobj(c.tgt(a)));
            arrow.label = c.arrow(a).label.clone();
            arrows.push(arrow);
            kinds.push(VKind::N(a));
        }
        let mut r_arrows = vec![None; c.num_arrows()];
        for a in c.arrow_ids().filter(|&a| self.classes.reg[a]) {
            r_arrows[a] = Some(arrows.len());
            arrows.push(Arrow::labelled(c.src(a), nobj(c.tgt(a)), format!("!{}", c.arrow_name(a))));
            kinds.push(VKind::R(a));
        }
        let zero_id = arrows.len();
        arrows.push(Arrow::labelled(z, z, "id"));
        kinds.push(VKind::ZeroId);
        let total = 2 * m + 1;
        let mut zero = vec![zero_id; total * total];
        for x in 0..total {
            for y in 0..total {
                if (x, y) != (z, z) {
                    zero[x * total + y] = arrows.len();
                    arrows.push(Arrow::labelled(x, y, "zero"));
                    kinds.push(VKind::Zero);
                }
            }
        }
        let mut identity: Vec<ArrowId> = c.objects().map(|b| b_arrows[c.identity(b)]).collect();
        identity.extend(c.objects().map(|b| n_arrows[c.identity(b)].expect("identities are regular Monos")));
        identity.push(zero_id);
        let is_id: BTreeSet<ArrowId> = identity.iter().copied().collect();
        let ends: Vec<(ObjId, ObjId)> = arrows.iter().map(|a| (a.src, a.tgt)).collect();
        let cl = &self.classes;
        let cat = FinCategory::from_parts(objects, arrows, identity, |g, f| {
            if is_id.contains(&g) {
                return Some(f);
            }
            if is_id.contains(&f) {
                return Some(g);
            }
            let zero_of = zero[ends[f].0 * total + ends[g].1];
            Some(match (kinds[g], kinds[f]) {
                (VKind::B(g0), VKind::B(f0)) => b_arrows[c.compose(g0, f0)],
                (VKind::N(g0), VKind::N(f0)) => {
                    let h = c.compose(g0, f0);
                    if cl.mreg[h] {
                        n_arrows[h].expect("regular Mono")
                    } else {
                        zero_of
                    }
                }
                (VKind::R(g0), VKind::B(f0)) | (VKind::N(g0), VKind::R(f0)) => {
                    let h = c.compose(g0, f0);
                    if cl.reg[h] {
                        r_arrows[h].expect("regular")
                    } else {
                        zero_of
                    }
                }
                _ => zero_of,
            })
        })?;
        let category = PointedFinCategory::new(Arc::new(cat), z)?;
        Ok(VCategory {
            category,
            b_objects: (0..m).collect(),
            n_objects: (0..m).map(nobj).collect(),
            b_arrows,
            n_arrows,
            r_arrows,
        })
    }

    /// The category `E_≠(b)` of non-invertible Epis out of `b`. Returns the
    /// shape, the Epi behind each object, and the `B` arrow behind each arrow.
    pub fn epi_slice(&self, b: ObjId) -> (FinCategory, Vec<ArrowId>, Vec<ArrowId>) {
        let c = &*self.cat;
        let objs: Vec<ArrowId> = c
            .arrows_from(b)
            .iter()
            .copied()
            .filter(|&e| self.epi[e] && !c.is_iso(e))
            .collect();
        self.slice(objs, |e| c.tgt(e), |e1, e2| {
            c.hom(c.tgt(e1), c.tgt(e2))
                .iter()
                .copied()
                .filter(|&h| self.epi[h] && c.compose(h, e1) == e2)
                .collect()
        }, |h2, h1| c.compose(h2, h1))
    }

    /// The category `E∨_≠(b)` of non-invertible dual Epis into `b`, with
    /// arrows `d1 -> d2` the dual Epis `h` satisfying `d2 ∘ h = d1`.
    pub fn dual_slice(&self, b: ObjId) -> (FinCategory, Vec<ArrowId>, Vec<ArrowId>) {
        let c = &*self.cat;
        let objs: Vec<ArrowId> = c
            .arrows_to(b)
            .into_iter()
            .filter(|&d| self.dual[d] && !c.is_iso(d))
            .collect();
        self.slice(objs, |d| c.src(d), |d1, d2| {
            c.hom(c.src(d1), c.src(d2))
                .iter()
                .copied()
                .filter(|&h| self.dual[h] && c.compose(d2, h) == d1)
                .collect()
        }, |h2, h1| c.compose(h2, h1))
    }

    fn slice(
        &self,
        objs: Vec<ArrowId>,
        anchor: impl Fn(ArrowId) -> ObjId,
        between: impl Fn(ArrowId, ArrowId) -> Vec<ArrowId>,
        compose: impl Fn(ArrowId, ArrowId) -> ArrowId,
    ) -> (FinCategory, Vec<ArrowId>, Vec<ArrowId>) {
        let c = &*self.cat;
        let names: Vec<String> = objs.iter().map(|&o| format!("{}#{o}", c.arrow_name(o))).collect();
        let mut arrows = Vec::new();
        let mut under = Vec::new();
        let mut index = HashMap::new();
        for (i, &x) in objs.iter().enumerate() {
            for (j, &y) in objs.iter().enumerate() {
                for h in between(x, y) {
                    index.insert((i, j, h), arrows.len());
                    arrows.push(Arrow::labelled(i, j, c.arrow_name(h)));
                    under.push(h);
                }
            }
        }
        let identity: Vec<ArrowId> = objs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                index[&(i, i, c.identity(anchor(x)))]
            })
            .collect();
        let ends: Vec<(usize, usize)> = arrows.iter().map(|a| (a.src, a.tgt)).collect();
        let shape = FinCategory::from_parts(names, arrows, identity, |g, f| {
            index.get(&(ends[f].0, ends[g].1, compose(under[g], under[f]))).copied()
        })
        .expect("slice of a category is a category");
        (shape, objs, under)
    }
}

/// How a triple file refers to its category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategorySource {
    Path(String),
    Inline(RawCategory),
}

/// On-disk form of a triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleFile {
    pub category: CategorySource,
    pub epis: Vec<ArrowId>,
    pub dual_epis: Vec<ArrowId>,
}

impl TripleFile {
    pub fn from_triple(t: &DKTriple) -> TripleFile {
        TripleFile {
            category: CategorySource::Inline(t.category().to_raw(None)),
            epis: t.epis(),
            dual_epis: t.dual_epis(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut canon = self.clone();
        if let CategorySource::Inline(raw) = &mut canon.category {
            raw.arrows.sort_by_key(|a| a.id);
            raw.compose.sort_unstable();
        }
        canon.epis.sort_unstable();
        canon.dual_epis.sort_unstable();
        let mut s = serde_json::to_string_pretty(&canon).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groupoid_triple() -> DKTriple {
        let c = Arc::new(FinCategory::discrete(2));
        let all: Vec<ArrowId> = c.arrow_ids().collect();
        validate_triple(c, &all, &all).unwrap()
    }

    #[test]
    fn groupoid_classes() {
        let t = groupoid_triple();
        assert!(t.classes().sing.iter().all(|s| !s));
        assert!(t.classes().mreg.iter().all(|m| *m));
        assert!(t.is_reduced());
        assert!(t.is_diagonalizable());
        assert!(t.is_monotone());
        let n0 = t.build_n0();
        assert_eq!(n0.category, t.category().free_pointed());
    }

    #[test]
    fn groupoid_v_homs() {
        let t = groupoid_triple();
        let v = t.build_v().unwrap();
        let b = v.category.base();
        assert_eq!(b.hom(v.b_objects[0], v.n_objects[0]).len(), 2);
        assert_eq!(b.hom(v.n_objects[0], v.b_objects[0]).len(), 1);
    }

    #[test]
    fn poset_with_all_epis_is_not_wide_for_duals() {
        // E must contain the isos; the empty set does not
        let c = Arc::new(FinCategory::linear_order(2));
        assert!(matches!(
            validate_triple(c, &[], &[]),
            Err(TripleError::NotWideSubcategory(_))
        ));
    }

    #[test]
    fn matchings_and_orders() {
        let rel = vec![vec![true, true], vec![false, true]];
        assert_eq!(perfect_matchings(&rel), vec![vec![0, 1]]);
        let order = topological_order(&rel, &[0, 1], |i| i).unwrap();
        assert_eq!(order, vec![0, 1]);
        let cyc = vec![vec![true, true], vec![true, true]];
        assert_eq!(perfect_matchings(&cyc).len(), 2);
        assert!(topological_order(&cyc, &[0, 1], |i| i).is_none());
    }

    #[test]
    fn single_object_order() {
        let t = validate_triple(Arc::new(FinCategory::terminal()), &[0], &[0]).unwrap();
        assert_eq!(t.object_order().linear, vec![0]);
        assert_eq!(t.object_order().level(0), 0);
    }

    #[test]
    fn reduce_is_idempotent_on_reduced_input() {
        let t = groupoid_triple();
        let (r, map) = t.reduce().unwrap();
        assert!(r.is_reduced());
        assert!(map.iter().all(Option::is_some));
    }
}
