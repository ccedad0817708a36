//! Builders for the standard DK-triples at finite truncation: `Δ≤k` with
//! min- or max-preserving dual Epis, `Par^op` of a factorization system,
//! Segal's `Γ≤k` and `FI♯≤k`.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::dktriple::{validate_triple, DKTriple, TripleError};
use crate::fincat::{Arrow, ArrowId, CategoryError, FinCategory, ObjId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("factorization system violation: {0}")]
    FactorizationSystemViolation(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// Weakly monotone maps `[m] -> [n]` for `m, n <= k`, stored as value lists.
#[derive(Debug, Clone)]
pub struct DeltaTruncation {
    pub k: usize,
    pub cat: Arc<FinCategory>,
    maps: Vec<Vec<usize>>,
    index: HashMap<(usize, Vec<usize>), ArrowId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaVariant {
    Min,
    Max,
}

pub(crate) fn monotone_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, lo: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in lo..=n {
            cur.push(v);
            go(len, v, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m + 1, 0, n, &mut Vec::new(), &mut out);
    out
}

fn is_injective(values: &[usize]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

fn is_surjective_onto(values: &[usize], n: usize) -> bool {
    values.first() == Some(&0)
        && values.last() == Some(&n)
        && values.windows(2).all(|w| w[1] <= w[0] + 1)
}

/// Surjections are written by grouping, as in `(01)2`; injections by
/// listing the image, as in `02`; other maps as `values:[n]`.
fn delta_label(values: &[usize], n: usize) -> String {
    if is_surjective_onto(values, n) {
        let mut out = String::new();
        let mut i = 0;
        while i < values.len() {
            let mut j = i;
            while j + 1 < values.len() && values[j + 1] == values[i] {
                j += 1;
            }
            let group: String = (i..=j).map(|x| x.to_string()).collect();
            if j > i {
                out.push_str(&format!("({group})"));
            } else {
                out.push_str(&group);
            }
            i = j + 1;
        }
        out
    } else if is_injective(values) {
        values.iter().map(|v| v.to_string()).collect()
    } else {
        let vals: String = values.iter().map(|v| v.to_string()).collect();
        format!("{vals}:[{n}]")
    }
}

impl DeltaTruncation {
    pub fn new(k: usize) -> DeltaTruncation {
        let objects: Vec<String> = (0..=k).map(|n| format!("[{n}]")).collect();
        let mut arrows = Vec::new();
        let mut maps = Vec::new();
        let mut index = HashMap::new();
        for m in 0..=k {
            for n in 0..=k {
                for values in monotone_maps(m, n) {
                    index.insert((n, values.clone()), arrows.len());
                    arrows.push(Arrow::labelled(m, n, delta_label(&values, n)));
                    maps.push(values);
                }
            }
        }
        let identity: Vec<ArrowId> = (0..=k).map(|n| index[&(n, (0..=n).collect::<Vec<_>>())]).collect();
        let tgts: Vec<usize> = arrows.iter().map(|a| a.tgt).collect();
        let cat = FinCategory::from_parts(objects, arrows, identity, |g, f| {
            let composite: Vec<usize> = maps[f].iter().map(|&x| maps[g][x]).collect();
            index.get(&(tgts[g], composite)).copied()
        })
        .expect("simplex category truncation is a category");
        DeltaTruncation {
            k,
            cat: Arc::new(cat),
            maps,
            index,
        }
    }

    pub fn values(&self, a: ArrowId) -> &[usize] {
        &self.maps[a]
    }

    pub fn arrow(&self, tgt: usize, values: &[usize]) -> Option<ArrowId> {
        self.index.get(&(tgt, values.to_vec())).copied()
    }

    /// `d^i: [n-1] -> [n]`, skipping `i`.
    pub fn coface(&self, n: usize, i: usize) -> ArrowId {
        let values: Vec<usize> = (0..n).map(|x| if x < i { x } else { x + 1 }).collect();
        self.arrow(n, &values).expect("coface in range")
    }

    /// `s^i: [n+1] -> [n]`, hitting `i` twice.
    pub fn codegeneracy(&self, n: usize, i: usize) -> ArrowId {
        let values: Vec<usize> = (0..n + 2).map(|x| if x <= i { x } else { x - 1 }).collect();
        self.arrow(n, &values).expect("codegeneracy in range")
    }

    pub fn is_surjection(&self, a: ArrowId) -> bool {
        is_surjective_onto(&self.maps[a], self.cat.tgt(a))
    }

    pub fn is_injection(&self, a: ArrowId) -> bool {
        is_injective(&self.maps[a])
    }

    /// The order-reversing involution `f ↦ (i ↦ n − f(m − i))`.
    pub fn reversal(&self, a: ArrowId) -> ArrowId {
        let n = self.cat.tgt(a);
        let v = &self.maps[a];
        let m = v.len() - 1;
        let rev: Vec<usize> = (0..=m).map(|i| n - v[m - i]).collect();
        self.arrow(n, &rev).expect("reversal stays in range")
    }

    pub fn epis(&self) -> Vec<ArrowId> {
        self.cat.arrow_ids().filter(|&a| self.is_surjection(a)).collect()
    }

    pub fn dual_epis(&self, variant: DeltaVariant) -> Vec<ArrowId> {
        self.cat
            .arrow_ids()
            .filter(|&a| {
                let v = &self.maps[a];
                is_injective(v)
                    && match variant {
                        DeltaVariant::Min => v[0] == 0,
                        DeltaVariant::Max => *v.last().expect("nonempty") == self.cat.tgt(a),
                    }
            })
            .collect()
    }

    pub fn triple(&self, variant: DeltaVariant) -> Result<DKTriple, TripleError> {
        validate_triple(self.cat.clone(), &self.epis(), &self.dual_epis(variant))
    }
}

pub fn delta_min(k: usize) -> DKTriple {
    DeltaTruncation::new(k)
        .triple(DeltaVariant::Min)
        .expect("Δ with min-preserving dual Epis is a DK-triple")
}

pub fn delta_max(k: usize) -> DKTriple {
    DeltaTruncation::new(k)
        .triple(DeltaVariant::Max)
        .expect("Δ with max-preserving dual Epis is a DK-triple")
}

/// Which maps of finite sets to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapClass {
    All,
    Inj,
    Surj,
    Bij,
}

impl MapClass {
    fn admits(self, values: &[usize], n: usize) -> bool {
        let mut hit = vec![false; n];
        let mut injective = true;
        for &v in values {
            if hit[v] {
                injective = false;
            }
            hit[v] = true;
        }
        let surjective = hit.iter().all(|&h| h);
        match self {
            MapClass::All => true,
            MapClass::Inj => injective,
            MapClass::Surj => surjective,
            MapClass::Bij => injective && surjective,
        }
    }
}

/// Maps between the sets `{0..a}` for `a <= k`.
#[derive(Debug, Clone)]
pub struct FinTruncation {
    pub k: usize,
    pub cat: Arc<FinCategory>,
    maps: Vec<Vec<usize>>,
    index: HashMap<(usize, Vec<usize>), ArrowId>,
}

fn all_maps(a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..a {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn fin_label(values: &[usize], b: usize) -> String {
    let vals: String = values.iter().map(|v| v.to_string()).collect();
    format!("{vals}>{b}")
}

impl FinTruncation {
    pub fn new(k: usize, class: MapClass) -> FinTruncation {
        let objects: Vec<String> = (0..=k).map(|n| n.to_string()).collect();
        let mut arrows = Vec::new();
        let mut maps = Vec::new();
        let mut index = HashMap::new();
        for a in 0..=k {
            for b in 0..=k {
                for values in all_maps(a, b) {
                    if class.admits(&values, b) {
                        index.insert((b, values.clone()), arrows.len());
                        arrows.push(Arrow::labelled(a, b, fin_label(&values, b)));
                        maps.push(values);
                    }
                }
            }
        }
        let identity: Vec<ArrowId> = (0..=k).map(|n| index[&(n, (0..n).collect::<Vec<_>>())]).collect();
        let tgts: Vec<usize> = arrows.iter().map(|a| a.tgt).collect();
        let cat = FinCategory::from_parts(objects, arrows, identity, |g, f| {
            let composite: Vec<usize> = maps[f].iter().map(|&x| maps[g][x]).collect();
            index.get(&(tgts[g], composite)).copied()
        })
        .expect("finite sets form a category");
        FinTruncation {
            k,
            cat: Arc::new(cat),
            maps,
            index,
        }
    }

    pub fn values(&self, a: ArrowId) -> &[usize] {
        &self.maps[a]
    }

    pub fn arrow(&self, tgt: usize, values: &[usize]) -> Option<ArrowId> {
        self.index.get(&(tgt, values.to_vec())).copied()
    }

    pub fn members(&self, class: MapClass) -> Vec<ArrowId> {
        self.cat
            .arrow_ids()
            .filter(|&a| class.admits(&self.maps[a], self.cat.tgt(a)))
            .collect()
    }
}

/// `Fin≤k` restricted to one class of maps.
pub fn fin_category(k: usize, class: MapClass) -> FinTruncation {
    FinTruncation::new(k, class)
}

/// A category with a factorization system `(E_A, M_A)` whose right class
/// consists of monomorphisms admitting pullbacks.
#[derive(Debug, Clone)]
pub struct FactorizationInput {
    cat: Arc<FinCategory>,
    left: Vec<bool>,
    right: Vec<bool>,
    /// Lowest-id representative of each `M_A`-subobject, per object.
    subobjects: Vec<Vec<ArrowId>>,
    /// Pullback of a subobject representative `r` along `f`, as `(m', q)`
    /// with `r ∘ q = f ∘ m'`.
    pullbacks: HashMap<(ArrowId, ArrowId), (ArrowId, ArrowId)>,
}

fn violation(msg: String) -> GeneratorError {
    GeneratorError::FactorizationSystemViolation(msg)
}

impl FactorizationInput {
    pub fn new(
        cat: Arc<FinCategory>,
        left: &[ArrowId],
        right: &[ArrowId],
    ) -> Result<FactorizationInput, GeneratorError> {
        let c = &*cat;
        let mut l = vec![false; c.num_arrows()];
        let mut r = vec![false; c.num_arrows()];
        for &a in left {
            l[a] = true;
        }
        for &a in right {
            r[a] = true;
        }
        for (set, name) in [(&l, "E_A"), (&r, "M_A")] {
            for a in c.arrow_ids() {
                if c.is_iso(a) && !set[a] {
                    return Err(violation(format!("{name} misses isomorphism {}", c.arrow_name(a))));
                }
                if set[a] {
                    for &g in c.arrows_from(c.tgt(a)) {
                        if set[g] && !set[c.compose(g, a)] {
                            return Err(violation(format!("{name} is not closed under composition")));
                        }
                    }
                }
            }
        }
        for m in c.arrow_ids().filter(|&m| r[m]) {
            for w in c.objects() {
                let mut seen = HashMap::new();
                for &g in c.hom(w, c.src(m)) {
                    if let Some(prev) = seen.insert(c.compose(m, g), g) {
                        return Err(violation(format!(
                            "{} is not a monomorphism: it equalizes {} and {}",
                            c.arrow_name(m),
                            c.arrow_name(prev),
                            c.arrow_name(g)
                        )));
                    }
                }
            }
        }
        let (l_ref, r_ref) = (&l, &r);
        for f in c.arrow_ids() {
            let facts: Vec<(ArrowId, ArrowId)> = c
                .arrows_from(c.src(f))
                .iter()
                .filter(|&&e| l_ref[e])
                .flat_map(|&e| {
                    c.hom(c.tgt(e), c.tgt(f))
                        .iter()
                        .filter(move |&&m| r_ref[m] && c.compose(m, e) == f)
                        .map(move |&m| (e, m))
                })
                .collect();
            let Some(&(e0, m0)) = facts.first() else {
                return Err(violation(format!("{} has no factorization", c.arrow_name(f))));
            };
            for &(e1, m1) in &facts {
                let isos = c
                    .hom(c.tgt(e0), c.tgt(e1))
                    .iter()
                    .filter(|&&h| c.is_iso(h) && c.compose(h, e0) == e1 && c.compose(m1, h) == m0)
                    .count();
                if isos != 1 {
                    return Err(violation(format!(
                        "factorizations of {} are not unique up to unique isomorphism",
                        c.arrow_name(f)
                    )));
                }
            }
        }
        let subobjects: Vec<Vec<ArrowId>> = c
            .objects()
            .map(|y| {
                let into: Vec<ArrowId> = c.arrows_to(y).into_iter().filter(|&m| r[m]).collect();
                c.arrow_classes(&into, crate::fincat::Side::Target).representatives()
            })
            .collect();
        let mut input = FactorizationInput {
            cat,
            left: l,
            right: r,
            subobjects,
            pullbacks: HashMap::new(),
        };
        input.pullbacks = input.compute_pullbacks()?;
        Ok(input)
    }

    fn compute_pullbacks(&self) -> Result<HashMap<(ArrowId, ArrowId), (ArrowId, ArrowId)>, GeneratorError> {
        let c = &*self.cat;
        let mut out = HashMap::new();
        for y in c.objects() {
            for &rep in &self.subobjects[y] {
                for f in c.arrows_to(y) {
                    let pb = self.find_pullback(rep, f).ok_or_else(|| {
                        violation(format!(
                            "no pullback in M_A of {} along {}",
                            c.arrow_name(rep),
                            c.arrow_name(f)
                        ))
                    })?;
                    out.insert((rep, f), pb);
                }
            }
        }
        Ok(out)
    }

    /// Searches `M_A`-subobject representatives `m'` of `src f` and arrows
    /// `q` completing the square, keeping the first universal one.
    fn find_pullback(&self, rep: ArrowId, f: ArrowId) -> Option<(ArrowId, ArrowId)> {
        let c = &*self.cat;
        let s2 = c.src(f);
        let s1 = c.src(rep);
        for &mp in &self.subobjects[s2] {
            let p = c.src(mp);
            for &q in c.hom(p, s1) {
                if c.compose(rep, q) != c.compose(f, mp) {
                    continue;
                }
                if self.is_universal(rep, f, mp, q) {
                    return Some((mp, q));
                }
            }
        }
        None
    }

    fn is_universal(&self, rep: ArrowId, f: ArrowId, mp: ArrowId, q: ArrowId) -> bool {
        let c = &*self.cat;
        let p = c.src(mp);
        c.objects().all(|w| {
            c.hom(w, c.src(f)).iter().all(|&a| {
                c.hom(w, c.src(rep)).iter().all(|&b| {
                    if c.compose(f, a) != c.compose(rep, b) {
                        return true;
                    }
                    let factors = c
                        .hom(w, p)
                        .iter()
                        .filter(|&&u| c.compose(mp, u) == a && c.compose(q, u) == b)
                        .count();
                    factors == 1
                })
            })
        })
    }

    pub fn category(&self) -> &FinCategory {
        &self.cat
    }

    pub fn is_left(&self, a: ArrowId) -> bool {
        self.left[a]
    }

    pub fn is_right(&self, a: ArrowId) -> bool {
        self.right[a]
    }

    /// The chosen representative of the subobject `m` of its target, and
    /// the iso `h` with `rep ∘ h = m`.
    fn canonical(&self, m: ArrowId) -> (ArrowId, ArrowId) {
        let c = &*self.cat;
        for &rep in &self.subobjects[c.tgt(m)] {
            for &h in c.hom(c.src(m), c.src(rep)) {
                if c.is_iso(h) && c.compose(rep, h) == m {
                    return (rep, h);
                }
            }
        }
        unreachable!("every M_A arrow has a representative")
    }
}

/// A morphism `X -> Y` of `Par^op A`: the span `X <-f- S -r-> Y` with `r` a
/// subobject representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub right: ArrowId,
    pub left: ArrowId,
}

/// `Par^op A` together with its spans.
#[derive(Debug, Clone)]
pub struct ParOp {
    pub triple: DKTriple,
    pub spans: Vec<Span>,
    index: HashMap<Span, ArrowId>,
}

impl ParOp {
    pub fn arrow(&self, span: Span) -> Option<ArrowId> {
        self.index.get(&span).copied()
    }
}

/// Spans composed by pullback. `E` consists of spans whose right leg is
/// invertible and whose left leg lies in `M_A`; `E∨` of spans whose left
/// leg is invertible.
pub fn par_op(input: &FactorizationInput) -> Result<ParOp, GeneratorError> {
    par_op_labelled(input, |a| input.cat.arrow_name(a))
}

fn par_op_labelled(
    input: &FactorizationInput,
    name: impl Fn(ArrowId) -> String,
) -> Result<ParOp, GeneratorError> {
    let a = &*input.cat;
    let objects: Vec<String> = a.object_names().to_vec();
    let mut spans = Vec::new();
    let mut arrows = Vec::new();
    let mut index = HashMap::new();
    for x in a.objects() {
        for y in a.objects() {
            for &r in &input.subobjects[y] {
                for &f in a.hom(a.src(r), x) {
                    let span = Span { right: r, left: f };
                    index.insert(span, arrows.len());
                    arrows.push(Arrow::labelled(x, y, format!("[{}|{}]", name(f), name(r))));
                    spans.push(span);
                }
            }
        }
    }
    let identity: Vec<ArrowId> = a
        .objects()
        .map(|x| {
            let (rep, h) = input.canonical(a.identity(x));
            // rep ∘ h = id, so the left leg is h
            index[&Span { right: rep, left: h }]
        })
        .collect();
    let cat = FinCategory::from_parts(objects, arrows, identity, |g, f| {
        let Span { right: r2, left: f2 } = spans[g];
        let Span { right: r1, left: f1 } = spans[f];
        let (mp, q) = input.pullbacks[&(r1, f2)];
        let (rep, h) = input.canonical(a.compose(r2, mp));
        let h_inv = a.inverse(h).expect("canonical iso");
        let left = a.compose(a.compose(f1, q), h_inv);
        index.get(&Span { right: rep, left }).copied()
    })?;
    let epis: Vec<ArrowId> = (0..spans.len())
        .filter(|&i| a.is_iso(spans[i].right) && input.right[spans[i].left])
        .collect();
    let duals: Vec<ArrowId> = (0..spans.len())
        .filter(|&i| a.is_iso(spans[i].left))
        .collect();
    let triple = validate_triple(Arc::new(cat), &epis, &duals)?;
    Ok(ParOp {
        triple,
        spans,
        index,
    })
}

/// Segal's `Γ≤k`: `Par^op` over finite sets with (surjections, injections).
pub fn gamma(k: usize) -> ParOp {
    let fin = FinTruncation::new(k, MapClass::All);
    let input = FactorizationInput::new(
        fin.cat.clone(),
        &fin.members(MapClass::Surj),
        &fin.members(MapClass::Inj),
    )
    .expect("(Surj, Inj) is a factorization system on finite sets");
    par_op(&input).expect("Γ is a DK-triple")
}

/// `FI♯≤k`: `Par^op` over finite sets and injections with (bijections, injections).
pub fn fi_sharp(k: usize) -> ParOp {
    let fin = FinTruncation::new(k, MapClass::Inj);
    let input = FactorizationInput::new(
        fin.cat.clone(),
        &fin.members(MapClass::Bij),
        &fin.members(MapClass::Inj),
    )
    .expect("(Bij, Inj) is a factorization system on finite sets and injections");
    par_op(&input).expect("FI♯ is a DK-triple")
}

/// Parses a preset such as `delta-min:2`, `delta-max:3`, `gamma:2`, `fi-sharp:2`.
pub fn preset(name: &str) -> Result<DKTriple, GeneratorError> {
    let unknown = || GeneratorError::UnknownPreset(name.to_string());
    let (family, k) = name.split_once(':').ok_or_else(unknown)?;
    let k: usize = k.parse().map_err(|_| unknown())?;
    if k > 4 {
        return Err(unknown());
    }
    Ok(match family {
        "delta-min" => delta_min(k),
        "delta-max" => delta_max(k),
        "gamma" => gamma(k).triple,
        "fi-sharp" => fi_sharp(k).triple,
        _ => return Err(unknown()),
    })
}

pub const PRESET_FAMILIES: [&str; 4] = ["delta-min", "delta-max", "gamma", "fi-sharp"];

/// Object of a preset triple for a set or simplex of the given size index.
pub fn preset_object(triple: &DKTriple, index: usize) -> Option<ObjId> {
    (index < triple.category().num_objects()).then_some(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn delta_hom_counts_are_binomial() {
        let d = DeltaTruncation::new(2);
        assert_eq!(d.cat.hom(2, 2).len(), 10);
        assert_eq!(d.cat.num_arrows(), 31);
        for m in 0..=2 {
            for n in 0..=2 {
                assert_eq!(d.cat.hom(m, n).len(), binomial(m + n + 1, m + 1));
            }
        }
    }

    #[test]
    fn delta_zero_is_terminal() {
        let t = delta_min(0);
        assert_eq!(t.category().num_arrows(), 1);
        assert!(t.is_reduced());
    }

    #[test]
    fn codegeneracies_are_distinct_classes() {
        let d = DeltaTruncation::new(2);
        let s0 = d.codegeneracy(1, 0);
        let s1 = d.codegeneracy(1, 1);
        let classes = d.cat.arrow_classes(&[s0, s1], crate::fincat::Side::Source);
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn opposite_transposes_hom_sizes() {
        let d = DeltaTruncation::new(1);
        let op = d.cat.opposite();
        for m in 0..=1 {
            for n in 0..=1 {
                assert_eq!(op.hom(n, m).len(), d.cat.hom(m, n).len());
            }
        }
    }

    #[test]
    fn reversal_swaps_min_and_max() {
        let d = DeltaTruncation::new(3);
        let mut min: Vec<ArrowId> = d.dual_epis(DeltaVariant::Min).iter().map(|&a| d.reversal(a)).collect();
        min.sort_unstable();
        assert_eq!(min, d.dual_epis(DeltaVariant::Max));
        for a in d.cat.arrow_ids() {
            assert_eq!(d.reversal(d.reversal(a)), a);
            for &g in d.cat.arrows_from(d.cat.tgt(a)) {
                assert_eq!(d.reversal(d.cat.compose(g, a)), d.cat.compose(d.reversal(g), d.reversal(a)));
            }
        }
        let mut epis: Vec<ArrowId> = d.epis().iter().map(|&a| d.reversal(a)).collect();
        epis.sort_unstable();
        assert_eq!(epis, d.epis());
    }

    #[test]
    fn fin_hom_counts() {
        let all = fin_category(3, MapClass::All);
        assert_eq!(all.cat.hom(2, 2).len(), 4);
        let surj = fin_category(3, MapClass::Surj);
        assert_eq!(surj.cat.hom(3, 2).len(), 6);
        let inj = fin_category(3, MapClass::Inj);
        assert_eq!(inj.cat.hom(2, 3).len(), 6);
    }

    #[test]
    fn terminal_par_op_is_trivial() {
        let t = Arc::new(FinCategory::terminal());
        let input = FactorizationInput::new(t, &[0], &[0]).unwrap();
        let p = par_op(&input).unwrap();
        assert_eq!(p.triple.category().num_arrows(), 1);
    }

    #[test]
    fn gamma_hom_counts_are_partial_maps() {
        let g = gamma(2);
        // partial maps from a 2-set to a 2-set: (2+1)^2
        assert_eq!(g.triple.category().hom(2, 2).len(), 9);
        for x in 0..=2usize {
            for y in 0..=2u32 {
                assert_eq!(g.triple.category().hom(x, y as usize).len(), (x + 1).pow(y));
            }
        }
        assert_eq!(gamma(3).triple.category().num_arrows(), 144);
    }

    #[test]
    fn gamma_composition_is_partial_map_composition() {
        let fin = FinTruncation::new(2, MapClass::All);
        let g = gamma(2);
        let c = g.triple.category();
        // a span X <-f- S -r-> Y is the partial map Y ⇀ X defined on image(r)
        let as_partial = |a: ArrowId| -> Vec<Option<usize>> {
            let Span { right, left } = g.spans[a];
            let mut pm = vec![None; c.tgt(a)];
            for (s, &y) in fin.values(right).iter().enumerate() {
                pm[y] = Some(fin.values(left)[s]);
            }
            pm
        };
        for f in c.arrow_ids() {
            for &h in c.arrows_from(c.tgt(f)) {
                let pf = as_partial(f);
                let ph = as_partial(h);
                let expected: Vec<Option<usize>> =
                    ph.iter().map(|v| v.and_then(|y| pf[y])).collect();
                assert_eq!(as_partial(c.compose(h, f)), expected);
            }
        }
    }

    #[test]
    fn fi_sharp_small_homs() {
        let f = fi_sharp(1);
        assert_eq!(f.triple.category().hom(1, 1).len(), 2);
        let f2 = fi_sharp(2);
        let n0 = f2.triple.build_n0();
        assert_eq!(n0.category.base().hom(2, 2).len(), 3);
    }

    #[test]
    fn gamma_regular_arrows_are_total_maps() {
        let fin = FinTruncation::new(2, MapClass::All);
        let g = gamma(2);
        let c = g.triple.category();
        let cl = g.triple.classes();
        for a in c.arrow_ids() {
            let total = fin.cat.is_iso(g.spans[a].right);
            assert_eq!(cl.reg[a], total);
        }
    }

    #[test]
    fn delta_min_pairing_at_two_is_triangular_not_diagonal() {
        let t = delta_min(2);
        let c = t.category();
        let p = t.pairing(2);
        let rows: Vec<String> = p.order.iter().map(|&i| c.arrow_name(p.rows.representative(i))).collect();
        let cols: Vec<String> = p
            .order
            .iter()
            .map(|&i| c.arrow_name(p.cols.representative(p.matching[i])))
            .collect();
        assert_eq!(rows, ["(012)", "0(12)", "(01)2", "012"]);
        assert_eq!(cols, ["0", "01", "02", "012"]);
        let mut isos = Vec::new();
        for (i, row) in p.ordered_grid().iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v {
                    isos.push((rows[i].as_str(), cols[j].as_str()));
                }
            }
        }
        assert_eq!(
            isos,
            [("(012)", "0"), ("0(12)", "01"), ("0(12)", "02"), ("(01)2", "02"), ("012", "012")]
        );
        assert!(!t.is_diagonalizable());
    }

    #[test]
    fn delta_min_regular_monos_are_identities_and_first_cofaces() {
        let d = DeltaTruncation::new(2);
        let t = d.triple(DeltaVariant::Min).unwrap();
        let mut expected = vec![d.coface(1, 0), d.coface(2, 0)];
        expected.extend((0..=2).map(|n| d.cat.identity(n)));
        expected.sort_unstable();
        assert_eq!(crate::dktriple::DerivedClasses::list(&t.classes().mreg), expected);
    }

    #[test]
    fn all_injections_break_the_pairing_axiom() {
        use crate::dktriple::{check_triple, Axiom};
        let d = DeltaTruncation::new(2);
        let inj: Vec<ArrowId> = d.cat.arrow_ids().filter(|&a| d.is_injection(a)).collect();
        let report = check_triple(&d.cat, &d.epis(), &inj);
        let verdict = |ax: Axiom| report.verdicts.iter().find(|v| v.axiom == ax).unwrap().pass;
        assert!(verdict(Axiom::T1));
        assert!(!verdict(Axiom::T2));
        assert!(!report.passed());
    }

    #[test]
    fn diagonalizability_of_presets() {
        assert!(gamma(2).triple.is_diagonalizable());
        assert!(fi_sharp(2).triple.is_diagonalizable());
        assert!(!delta_max(2).is_diagonalizable());
    }

    #[test]
    fn presets_are_monotone() {
        assert!(delta_min(2).is_monotone());
        assert!(delta_max(2).is_monotone());
        assert!(gamma(2).triple.is_monotone());
    }

    #[test]
    fn fi_sharp_orders_by_cardinality() {
        let t = fi_sharp(2).triple;
        let o = t.object_order();
        assert_eq!(o.linear, vec![0, 1, 2]);
        assert!(o.less(0, 1) && o.less(1, 2));
    }

    #[test]
    fn gamma_regular_monos_are_surjections() {
        let fin = FinTruncation::new(2, MapClass::All);
        let g = gamma(2);
        let cl = g.triple.classes();
        for a in g.triple.category().arrow_ids() {
            let Span { right, left } = g.spans[a];
            let expected = fin.cat.is_iso(right)
                && MapClass::Surj.admits(fin.values(left), fin.cat.tgt(left));
            assert_eq!(cl.mreg[a], expected);
        }
        assert_eq!(g.triple.pairing(2).rows.len(), 4);
    }

    #[test]
    fn presets_parse() {
        assert!(preset("delta-min:1").is_ok());
        assert!(preset("gamma:1").is_ok());
        assert!(matches!(preset("delta"), Err(GeneratorError::UnknownPreset(_))));
        assert!(matches!(preset("nope:2"), Err(GeneratorError::UnknownPreset(_))));
    }

    #[test]
    fn non_factorization_system_is_rejected() {
        let fin = FinTruncation::new(2, MapClass::All);
        // injections on both sides cannot factor a non-injective map
        let inj = fin.members(MapClass::Inj);
        assert!(matches!(
            FactorizationInput::new(fin.cat.clone(), &inj, &inj),
            Err(GeneratorError::FactorizationSystemViolation(_))
        ));
    }
}
