//! Finite categories stored as total composition tables.
//!
//! Objects and arrows are addressed by dense integer ids; every enumeration
//! runs in id order so that derived data is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type ObjId = usize;
pub type ArrowId = usize;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("malformed category: {0}")]
    Malformed(String),
    #[error("composite of g={g} after f={f} is missing or has wrong endpoints")]
    MissingComposite { g: ArrowId, f: ArrowId },
    #[error("identity {arrow} of object {object:?} is not a two-sided unit")]
    BadIdentity { object: String, arrow: ArrowId },
    #[error("associativity fails for h={h}, g={g}, f={f}")]
    AssociativityViolation { h: ArrowId, g: ArrowId, f: ArrowId },
    #[error("arrow set is not an ideal: composite {composite} of {outer} and {inner} escapes it")]
    NotAnIdeal {
        outer: ArrowId,
        inner: ArrowId,
        composite: ArrowId,
    },
    #[error("not a pointed category: {0}")]
    NotPointed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub src: ObjId,
    pub tgt: ObjId,
    pub label: Option<String>,
}

impl Arrow {
    pub fn new(src: ObjId, tgt: ObjId) -> Arrow {
        Arrow {
            src,
            tgt,
            label: None,
        }
    }

    pub fn labelled(src: ObjId, tgt: ObjId, label: impl Into<String>) -> Arrow {
        Arrow {
            src,
            tgt,
            label: Some(label.into()),
        }
    }
}

/// A validated finite category. Values of this type always satisfy the unit
/// and associativity laws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identity: Vec<ArrowId>,
    table: Vec<u32>,
    inverse: Vec<Option<ArrowId>>,
    homs: Vec<Vec<ArrowId>>,
    outs: Vec<Vec<ArrowId>>,
}

impl FinCategory {
    /// Builds and validates a category. `compose(g, f)` is queried for every
    /// composable pair and must return `g∘f`.
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identity: Vec<ArrowId>,
        mut compose: impl FnMut(ArrowId, ArrowId) -> Option<ArrowId>,
    ) -> Result<FinCategory, CategoryError> {
        let n = arrows.len();
        let mut table = vec![NONE; n * n];
        let homs = hom_lists(objects.len(), &arrows)?;
        for f in 0..n {
            for g in out_of(&homs, objects.len(), arrows[f].tgt) {
                let gf = compose(g, f).ok_or(CategoryError::MissingComposite { g, f })?;
                table[g * n + f] = gf as u32;
            }
        }
        FinCategory::from_table(objects, arrows, identity, table, homs)
    }

    fn from_table(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identity: Vec<ArrowId>,
        table: Vec<u32>,
        homs: Vec<Vec<ArrowId>>,
    ) -> Result<FinCategory, CategoryError> {
        let outs = (0..objects.len())
            .map(|x| out_of(&homs, objects.len(), x))
            .collect();
        let mut cat = FinCategory {
            objects,
            arrows,
            identity,
            table,
            inverse: Vec::new(),
            homs,
            outs,
        };
        cat.check()?;
        cat.inverse = (0..cat.arrows.len()).map(|f| cat.find_inverse(f)).collect();
        Ok(cat)
    }

    fn check(&self) -> Result<(), CategoryError> {
        let n = self.arrows.len();
        let mut names = BTreeSet::new();
        for name in &self.objects {
            if !names.insert(name) {
                return Err(CategoryError::Malformed(format!("duplicate object {name:?}")));
            }
        }
        if self.identity.len() != self.objects.len() {
            return Err(CategoryError::Malformed("identity map is not total".into()));
        }
        for (o, &id) in self.identity.iter().enumerate() {
            if id >= n || self.arrows[id].src != o || self.arrows[id].tgt != o {
                return Err(self.bad_identity(o));
            }
        }
        for f in 0..n {
            for &g in self.arrows_from(self.arrows[f].tgt) {
                let gf = self.table[g * n + f];
                if gf == NONE {
                    return Err(CategoryError::MissingComposite { g, f });
                }
                let gf = gf as usize;
                if gf >= n
                    || self.arrows[gf].src != self.arrows[f].src
                    || self.arrows[gf].tgt != self.arrows[g].tgt
                {
                    return Err(CategoryError::MissingComposite { g, f });
                }
            }
        }
        for o in 0..self.objects.len() {
            let id = self.identity[o];
            let left = self.arrows_from(o).iter().all(|&g| self.compose(g, id) == g);
            let right = self.arrows_to(o).iter().all(|&f| self.compose(id, f) == f);
            if !left || !right {
                return Err(self.bad_identity(o));
            }
        }
        for f in 0..n {
            for &g in self.arrows_from(self.arrows[f].tgt) {
                let gf = self.compose(g, f);
                for &h in self.arrows_from(self.arrows[g].tgt) {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        return Err(CategoryError::AssociativityViolation { h, g, f });
                    }
                }
            }
        }
        Ok(())
    }

    fn bad_identity(&self, o: ObjId) -> CategoryError {
        CategoryError::BadIdentity {
            object: self.objects[o].clone(),
            arrow: self.identity.get(o).copied().unwrap_or(usize::MAX),
        }
    }

    fn find_inverse(&self, f: ArrowId) -> Option<ArrowId> {
        let Arrow { src, tgt, .. } = self.arrows[f];
        self.hom(tgt, src).iter().copied().find(|&g| {
            self.compose(g, f) == self.identity[src] && self.compose(f, g) == self.identity[tgt]
        })
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.objects.len()
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> {
        0..self.arrows.len()
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|n| n == name)
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a]
    }

    pub fn src(&self, a: ArrowId) -> ObjId {
        self.arrows[a].src
    }

    pub fn tgt(&self, a: ArrowId) -> ObjId {
        self.arrows[a].tgt
    }

    /// The label if present, otherwise the numeric id.
    pub fn arrow_name(&self, a: ArrowId) -> String {
        match &self.arrows[a].label {
            Some(l) => l.clone(),
            None => format!("#{a}"),
        }
    }

    pub fn identity(&self, o: ObjId) -> ArrowId {
        self.identity[o]
    }

    pub fn is_identity(&self, a: ArrowId) -> bool {
        self.identity[self.arrows[a].src] == a
    }

    /// `g∘f`. Panics when `f` and `g` are not composable.
    pub fn compose(&self, g: ArrowId, f: ArrowId) -> ArrowId {
        self.try_compose(g, f)
            .unwrap_or_else(|| panic!("arrows {g} and {f} are not composable"))
    }

    pub fn try_compose(&self, g: ArrowId, f: ArrowId) -> Option<ArrowId> {
        if self.arrows[f].tgt != self.arrows[g].src {
            return None;
        }
        let v = self.table[g * self.arrows.len() + f];
        (v != NONE).then_some(v as usize)
    }

    /// Composes a path given in diagrammatic order reversed: `[h, g, f]` is `h∘g∘f`.
    pub fn compose_all(&self, path: &[ArrowId]) -> ArrowId {
        let (&last, rest) = path.split_last().expect("empty path");
        rest.iter().rev().fold(last, |acc, &g| self.compose(g, acc))
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[ArrowId] {
        &self.homs[x * self.objects.len() + y]
    }

    pub fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        &self.outs[x]
    }

    pub fn arrows_to(&self, y: ObjId) -> Vec<ArrowId> {
        (0..self.objects.len())
            .flat_map(|x| self.hom(x, y).iter().copied())
            .collect()
    }

    pub fn is_iso(&self, f: ArrowId) -> bool {
        self.inverse[f].is_some()
    }

    pub fn inverse(&self, f: ArrowId) -> Option<ArrowId> {
        self.inverse[f]
    }

    pub fn are_isomorphic(&self, x: ObjId, y: ObjId) -> bool {
        self.hom(x, y).iter().any(|&f| self.is_iso(f))
    }

    /// Sources and targets swapped, composition reversed; arrow and object ids kept.
    pub fn opposite(&self) -> FinCategory {
        let n = self.arrows.len();
        let arrows: Vec<Arrow> = self
            .arrows
            .iter()
            .map(|a| Arrow {
                src: a.tgt,
                tgt: a.src,
                label: a.label.clone(),
            })
            .collect();
        let mut table = vec![NONE; n * n];
        for g in 0..n {
            for f in 0..n {
                table[f * n + g] = self.table[g * n + f];
            }
        }
        let homs = hom_lists(self.objects.len(), &arrows).expect("arrows already checked");
        let outs = (0..self.objects.len())
            .map(|x| out_of(&homs, self.objects.len(), x))
            .collect();
        FinCategory {
            objects: self.objects.clone(),
            arrows,
            identity: self.identity.clone(),
            table,
            inverse: self.inverse.clone(),
            homs,
            outs,
        }
    }

    /// Partition of arrows sharing a source (or a target) into classes under
    /// post- (or pre-) composition with isomorphisms. Classes are listed by
    /// their representative, which is the lowest arrow id in the class.
    pub fn arrow_classes(&self, arrows: &[ArrowId], side: Side) -> ArrowClassSet {
        let mut sorted: Vec<ArrowId> = arrows.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut class_of = HashMap::new();
        let mut classes: Vec<Vec<ArrowId>> = Vec::new();
        for &f in &sorted {
            if class_of.contains_key(&f) {
                continue;
            }
            let idx = classes.len();
            let members: Vec<ArrowId> = sorted
                .iter()
                .copied()
                .filter(|&g| !class_of.contains_key(&g) && self.iso_related(f, g, side))
                .collect();
            for &g in &members {
                class_of.insert(g, idx);
            }
            classes.push(members);
        }
        ArrowClassSet { side, classes }
    }

    fn iso_related(&self, f: ArrowId, g: ArrowId, side: Side) -> bool {
        match side {
            Side::Source => self
                .hom(self.tgt(f), self.tgt(g))
                .iter()
                .any(|&h| self.is_iso(h) && self.compose(h, f) == g),
            Side::Target => self
                .hom(self.src(g), self.src(f))
                .iter()
                .any(|&h| self.is_iso(h) && self.compose(f, h) == g),
        }
    }

    /// Restricts to the arrows in `keep`, sending composites that leave
    /// `keep` to zero. `keep` must contain every identity. The result is
    /// revalidated; `arrow_map[a]` is the new id of each kept arrow `a`.
    pub fn pointed_restriction(
        &self,
        keep: &[bool],
    ) -> Result<(PointedFinCategory, Vec<Option<ArrowId>>), CategoryError> {
        let m = self.objects.len();
        let zero_name = fresh_zero_name(&self.objects);
        let mut objects = self.objects.clone();
        objects.push(zero_name);
        let z = m;

        let mut arrows = Vec::new();
        let mut arrow_map = vec![None; self.arrows.len()];
        for a in 0..self.arrows.len() {
            if keep[a] {
                arrow_map[a] = Some(arrows.len());
                arrows.push(self.arrows[a].clone());
            }
        }
        let zero_id = arrows.len();
        arrows.push(Arrow::labelled(z, z, "id"));
        let mut zero_arrow = vec![usize::MAX; (m + 1) * (m + 1)];
        zero_arrow[z * (m + 1) + z] = zero_id;
        for x in 0..=m {
            for y in 0..=m {
                if x == z && y == z {
                    continue;
                }
                zero_arrow[x * (m + 1) + y] = arrows.len();
                arrows.push(Arrow::labelled(x, y, "zero"));
            }
        }
        let mut identity: Vec<ArrowId> = Vec::with_capacity(m + 1);
        for o in 0..m {
            identity.push(match arrow_map[self.identity[o]] {
                Some(id) => id,
                None => zero_arrow[o * (m + 1) + o],
            });
        }
        identity.push(zero_id);

        let mut back = vec![None; arrows.len()];
        for (a, new) in arrow_map.iter().enumerate() {
            if let Some(new) = new {
                back[*new] = Some(a);
            }
        }
        let zero_of = |x: ObjId, y: ObjId| zero_arrow[x * (m + 1) + y];
        let src_tgt: Vec<(ObjId, ObjId)> = arrows.iter().map(|a| (a.src, a.tgt)).collect();
        let cat = FinCategory::from_parts(objects, arrows, identity.clone(), |g, f| {
            let (fs, _) = src_tgt[f];
            let (_, gt) = src_tgt[g];
            match (back[g], back[f]) {
                (Some(g0), Some(f0)) => {
                    let gf = self.compose(g0, f0);
                    Some(arrow_map[gf].unwrap_or_else(|| zero_of(fs, gt)))
                }
                _ if identity[gt] == g => Some(f),
                _ if identity[fs] == f => Some(g),
                _ => Some(zero_of(fs, gt)),
            }
        })?;
        let pointed = PointedFinCategory::new(Arc::new(cat), z)?;
        Ok((pointed, arrow_map))
    }

    /// The wide subcategory on the arrows in `keep`, which must contain all
    /// identities and be closed under composition. Returns the new category
    /// and the id of each kept arrow in it.
    pub fn subcategory(
        &self,
        keep: &[bool],
    ) -> Result<(FinCategory, Vec<Option<ArrowId>>), CategoryError> {
        let mut arrow_map = vec![None; self.arrows.len()];
        let mut back = Vec::new();
        for a in 0..self.arrows.len() {
            if keep[a] {
                arrow_map[a] = Some(back.len());
                back.push(a);
            }
        }
        let arrows = back.iter().map(|&a| self.arrows[a].clone()).collect();
        let identity = self
            .identity
            .iter()
            .map(|&id| {
                arrow_map[id].ok_or_else(|| {
                    CategoryError::Malformed(format!("identity {id} is not kept"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cat = FinCategory::from_parts(self.objects.clone(), arrows, identity, |g, f| {
            arrow_map[self.compose(back[g], back[f])]
        })?;
        Ok((cat, arrow_map))
    }

    /// Quotient by a two-sided ideal: arrows of `ideal` become zero arrows.
    pub fn quotient_by_ideal(&self, ideal: &[ArrowId]) -> Result<Quotient, CategoryError> {
        let mut in_ideal = vec![false; self.arrows.len()];
        for &s in ideal {
            if s >= self.arrows.len() {
                return Err(CategoryError::Malformed(format!("unknown arrow {s}")));
            }
            in_ideal[s] = true;
        }
        for s in (0..self.arrows.len()).filter(|&s| in_ideal[s]) {
            for &g in self.arrows_from(self.tgt(s)) {
                let c = self.compose(g, s);
                if !in_ideal[c] {
                    return Err(CategoryError::NotAnIdeal {
                        outer: g,
                        inner: s,
                        composite: c,
                    });
                }
            }
            for f in self.arrows_to(self.src(s)) {
                let c = self.compose(s, f);
                if !in_ideal[c] {
                    return Err(CategoryError::NotAnIdeal {
                        outer: s,
                        inner: f,
                        composite: c,
                    });
                }
            }
        }
        let keep: Vec<bool> = in_ideal.iter().map(|&b| !b).collect();
        let (category, arrow_map) = self.pointed_restriction(&keep)?;
        let zeroed_objects = self
            .objects()
            .filter(|&o| in_ideal[self.identity[o]])
            .collect();
        Ok(Quotient {
            category,
            arrow_map,
            zeroed_objects,
        })
    }

    /// Adjoins a zero object freely: each hom-set gains exactly one zero arrow.
    pub fn free_pointed(&self) -> PointedFinCategory {
        let m = self.objects.len();
        let n = self.arrows.len();
        let mut objects = self.objects.clone();
        objects.push(fresh_zero_name(&self.objects));
        let z = m;
        let mut arrows = self.arrows.clone();
        arrows.push(Arrow::labelled(z, z, "id"));
        for x in 0..=m {
            for y in 0..=m {
                if (x, y) != (z, z) {
                    arrows.push(Arrow::labelled(x, y, "zero"));
                }
            }
        }
        // zero arrow x -> y sits at n + 1 + (x*(m+1) + y) minus one if past (z,z)
        let zero = |x: ObjId, y: ObjId| {
            if (x, y) == (z, z) {
                n
            } else {
                n + 1 + x * (m + 1) + y
            }
        };
        let mut identity = self.identity.clone();
        identity.push(n);
        let ends: Vec<(ObjId, ObjId)> = arrows.iter().map(|a| (a.src, a.tgt)).collect();
        let cat = FinCategory::from_parts(objects, arrows, identity, |g, f| {
            if g < n && f < n {
                return Some(self.compose(g, f));
            }
            if g == n {
                return Some(f);
            }
            if f == n {
                return Some(g);
            }
            Some(zero(ends[f].0, ends[g].1))
        })
        .expect("free pointed category is a category");
        PointedFinCategory::new(Arc::new(cat), z).expect("adjoined object is a zero object")
    }

    pub fn to_raw(&self, zero: Option<ObjId>) -> RawCategory {
        let n = self.arrows.len();
        let mut compose = Vec::new();
        for g in 0..n {
            for f in 0..n {
                let v = self.table[g * n + f];
                if v != NONE {
                    compose.push([g, f, v as usize]);
                }
            }
        }
        RawCategory {
            objects: self.objects.clone(),
            arrows: self
                .arrows
                .iter()
                .enumerate()
                .map(|(id, a)| RawArrow {
                    id,
                    src: self.objects[a.src].clone(),
                    tgt: self.objects[a.tgt].clone(),
                    label: a.label.clone(),
                })
                .collect(),
            identity: self
                .identity
                .iter()
                .enumerate()
                .map(|(o, &a)| (self.objects[o].clone(), a))
                .collect(),
            compose,
            zero: zero.map(|z| self.objects[z].clone()),
        }
    }

    /// Validates raw tables.
    pub fn from_raw(raw: &RawCategory) -> Result<FinCategory, CategoryError> {
        let index: HashMap<&str, ObjId> = raw
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| CategoryError::Malformed(format!("unknown object {name:?}")))
        };
        let mut arrows = vec![None; raw.arrows.len()];
        for a in &raw.arrows {
            let slot = arrows
                .get_mut(a.id)
                .ok_or_else(|| CategoryError::Malformed(format!("arrow ids are not dense: {}", a.id)))?;
            if slot.is_some() {
                return Err(CategoryError::Malformed(format!("duplicate arrow id {}", a.id)));
            }
            *slot = Some(Arrow {
                src: lookup(&a.src)?,
                tgt: lookup(&a.tgt)?,
                label: a.label.clone(),
            });
        }
        let arrows: Vec<Arrow> = arrows.into_iter().map(|a| a.expect("dense")).collect();
        let mut identity = vec![usize::MAX; raw.objects.len()];
        for (name, &a) in &raw.identity {
            identity[lookup(name)?] = a;
        }
        if let Some(o) = identity.iter().position(|&a| a == usize::MAX) {
            return Err(CategoryError::Malformed(format!(
                "object {:?} has no identity",
                raw.objects[o]
            )));
        }
        let n = arrows.len();
        let mut table = vec![NONE; n * n];
        for &[g, f, gf] in &raw.compose {
            if g >= n || f >= n || gf >= n {
                return Err(CategoryError::Malformed(format!(
                    "compose entry [{g},{f},{gf}] names an unknown arrow"
                )));
            }
            if arrows[f].tgt != arrows[g].src {
                return Err(CategoryError::Malformed(format!(
                    "compose entry [{g},{f},{gf}] is not a composable pair"
                )));
            }
            let slot = &mut table[g * n + f];
            if *slot != NONE && *slot != gf as u32 {
                return Err(CategoryError::Malformed(format!(
                    "compose entry for ({g},{f}) is given twice"
                )));
            }
            *slot = gf as u32;
        }
        let homs = hom_lists(raw.objects.len(), &arrows)?;
        FinCategory::from_table(raw.objects.clone(), arrows, identity, table, homs)
    }

    pub fn to_json(&self) -> String {
        self.to_raw(None).to_json()
    }

    pub fn from_json(text: &str) -> Result<FinCategory, CategoryError> {
        let raw: RawCategory =
            serde_json::from_str(text).map_err(|e| CategoryError::Malformed(e.to_string()))?;
        FinCategory::from_raw(&raw)
    }

    /// Poset on `0..n` with an arrow `i -> j` whenever `leq(i, j)`.
    pub fn poset(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<FinCategory, CategoryError> {
        let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut arrows = Vec::new();
        let mut id_of = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                if leq(i, j) {
                    id_of.insert((i, j), arrows.len());
                    arrows.push(Arrow::labelled(i, j, format!("{i}<={j}")));
                }
            }
        }
        let mut identity = Vec::with_capacity(n);
        for i in 0..n {
            identity.push(*id_of.get(&(i, i)).ok_or_else(|| {
                CategoryError::Malformed(format!("relation is not reflexive at {i}"))
            })?);
        }
        let ends: Vec<(usize, usize)> = arrows.iter().map(|a| (a.src, a.tgt)).collect();
        FinCategory::from_parts(objects, arrows, identity, |g, f| {
            id_of.get(&(ends[f].0, ends[g].1)).copied()
        })
    }

    /// Linear order `0 < 1 < ... < n-1`.
    pub fn linear_order(n: usize) -> FinCategory {
        FinCategory::poset(n, |i, j| i <= j).expect("linear order is a poset")
    }

    pub fn terminal() -> FinCategory {
        FinCategory::discrete(1)
    }

    pub fn empty() -> FinCategory {
        FinCategory::discrete(0)
    }

    pub fn discrete(n: usize) -> FinCategory {
        FinCategory::poset(n, |i, j| i == j).expect("discrete category")
    }
}

fn hom_lists(num_objects: usize, arrows: &[Arrow]) -> Result<Vec<Vec<ArrowId>>, CategoryError> {
    let mut homs = vec![Vec::new(); num_objects * num_objects];
    for (a, arrow) in arrows.iter().enumerate() {
        if arrow.src >= num_objects || arrow.tgt >= num_objects {
            return Err(CategoryError::Malformed(format!("arrow {a} has an unknown endpoint")));
        }
        homs[arrow.src * num_objects + arrow.tgt].push(a);
    }
    Ok(homs)
}

fn out_of(homs: &[Vec<ArrowId>], num_objects: usize, x: ObjId) -> Vec<ArrowId> {
    let mut out: Vec<ArrowId> = (0..num_objects)
        .flat_map(|y| homs[x * num_objects + y].iter().copied())
        .collect();
    out.sort_unstable();
    out
}

fn fresh_zero_name(objects: &[String]) -> String {
    let mut name = String::from("0");
    while objects.contains(&name) {
        name.push('\'');
    }
    name
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Arrows share a source; classes are orbits under postcomposition with isos.
    Source,
    /// Arrows share a target; classes are orbits under precomposition with isos.
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowClassSet {
    pub side: Side,
    /// Each class sorted by id; the first member is the representative.
    pub classes: Vec<Vec<ArrowId>>,
}

impl ArrowClassSet {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn representative(&self, class: usize) -> ArrowId {
        self.classes[class][0]
    }

    pub fn representatives(&self) -> Vec<ArrowId> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    pub fn class_of(&self, a: ArrowId) -> Option<usize> {
        self.classes.iter().position(|c| c.binary_search(&a).is_ok())
    }
}

/// A category with a designated zero object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedFinCategory {
    base: Arc<FinCategory>,
    zero: ObjId,
}

impl PointedFinCategory {
    /// Checks that `zero` is both initial and terminal.
    pub fn new(base: Arc<FinCategory>, zero: ObjId) -> Result<PointedFinCategory, CategoryError> {
        if zero >= base.num_objects() {
            return Err(CategoryError::NotPointed(format!("no object {zero}")));
        }
        for x in base.objects() {
            if base.hom(x, zero).len() != 1 || base.hom(zero, x).len() != 1 {
                return Err(CategoryError::NotPointed(format!(
                    "object {:?} does not have exactly one arrow to and from {:?}",
                    base.object_name(x),
                    base.object_name(zero)
                )));
            }
        }
        Ok(PointedFinCategory { base, zero })
    }

    pub fn base(&self) -> &FinCategory {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<FinCategory> {
        Arc::clone(&self.base)
    }

    pub fn zero(&self) -> ObjId {
        self.zero
    }

    /// The composite `x -> 0 -> y`.
    pub fn zero_arrow(&self, x: ObjId, y: ObjId) -> ArrowId {
        let c = &self.base;
        c.compose(c.hom(self.zero, y)[0], c.hom(x, self.zero)[0])
    }

    pub fn is_zero_arrow(&self, a: ArrowId) -> bool {
        let c = &self.base;
        a == self.zero_arrow(c.src(a), c.tgt(a))
    }

    pub fn to_json(&self) -> String {
        self.base.to_raw(Some(self.zero)).to_json()
    }

    pub fn from_json(text: &str) -> Result<PointedFinCategory, CategoryError> {
        let raw: RawCategory =
            serde_json::from_str(text).map_err(|e| CategoryError::Malformed(e.to_string()))?;
        let cat = FinCategory::from_raw(&raw)?;
        let name = raw
            .zero
            .ok_or_else(|| CategoryError::NotPointed("no \"zero\" key".into()))?;
        let zero = cat
            .object_by_name(&name)
            .ok_or_else(|| CategoryError::Malformed(format!("unknown zero object {name:?}")))?;
        PointedFinCategory::new(Arc::new(cat), zero)
    }
}

/// Result of [`FinCategory::quotient_by_ideal`].
#[derive(Debug, Clone)]
pub struct Quotient {
    pub category: PointedFinCategory,
    /// New id of each arrow outside the ideal.
    pub arrow_map: Vec<Option<ArrowId>>,
    /// Objects whose identity lies in the ideal; these become zero objects.
    pub zeroed_objects: Vec<ObjId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArrow {
    pub id: usize,
    pub src: String,
    pub tgt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// On-disk form of a category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<RawArrow>,
    pub identity: BTreeMap<String, usize>,
    pub compose: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<String>,
}

impl RawCategory {
    /// Canonical serialization: arrows by id, compose entries sorted.
    pub fn to_json(&self) -> String {
        let mut canon = self.clone();
        canon.arrows.sort_by_key(|a| a.id);
        canon.compose.sort_unstable();
        let mut s = serde_json::to_string_pretty(&canon).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso_pair() -> FinCategory {
        // two objects a, b with mutually inverse u: a -> b, v: b -> a
        let objects = vec!["a".to_string(), "b".to_string()];
        let arrows = vec![
            Arrow::labelled(0, 0, "ida"),
            Arrow::labelled(1, 1, "idb"),
            Arrow::labelled(0, 1, "u"),
            Arrow::labelled(1, 0, "v"),
        ];
        FinCategory::from_parts(objects, arrows, vec![0, 1], |g, f| {
            Some(match (g, f) {
                (0 | 1, f) => f,
                (g, 0 | 1) => g,
                (3, 2) => 0,
                (2, 3) => 1,
                _ => unreachable!(),
            })
        })
        .unwrap()
    }

    #[test]
    fn terminal_and_poset_sizes() {
        assert_eq!(FinCategory::terminal().num_arrows(), 1);
        assert_eq!(FinCategory::linear_order(3).num_arrows(), 6);
    }

    #[test]
    fn isos() {
        let p = FinCategory::linear_order(2);
        assert!(p.is_iso(p.identity(0)));
        assert!(!p.is_iso(p.hom(0, 1)[0]));
        let c = iso_pair();
        assert!(c.is_iso(2));
        assert_eq!(c.inverse(2), Some(3));
    }

    #[test]
    fn wrong_composite_endpoint_is_missing_composite() {
        let mut raw = FinCategory::linear_order(2).to_raw(None);
        // id_1 ∘ (0<=1) must be 0<=1, declare it to be id_0 instead
        let up = 1;
        for e in raw.compose.iter_mut() {
            if e[0] == 2 && e[1] == up {
                e[2] = 0;
            }
        }
        assert!(matches!(
            FinCategory::from_raw(&raw),
            Err(CategoryError::MissingComposite { .. })
        ));
        raw.compose.retain(|e| !(e[0] == 2 && e[1] == up));
        assert!(matches!(
            FinCategory::from_raw(&raw),
            Err(CategoryError::MissingComposite { g: 2, f: 1 })
        ));
    }

    #[test]
    fn associativity_violation_is_reported() {
        // monoid {1, a} with a∘a = 1 is fine; a∘a = a is fine; a table that is
        // unital but not associative needs three elements
        let objects = vec!["x".to_string()];
        let arrows = (0..3).map(|_| Arrow::new(0, 0)).collect();
        // 1∘? = ?, a∘a = b, a∘b = a, b∘a = b, b∘b = b
        let res = FinCategory::from_parts(objects, arrows, vec![0], |g, f| {
            Some(match (g, f) {
                (0, f) => f,
                (g, 0) => g,
                (1, 1) => 2,
                (1, 2) => 1,
                (2, 1) => 2,
                (2, 2) => 2,
                _ => unreachable!(),
            })
        });
        assert!(matches!(res, Err(CategoryError::AssociativityViolation { .. })));
    }

    #[test]
    fn bad_identity() {
        let objects = vec!["x".to_string()];
        let arrows = vec![Arrow::new(0, 0), Arrow::new(0, 0)];
        let res = FinCategory::from_parts(objects, arrows, vec![0], |_, _| Some(1));
        assert!(matches!(res, Err(CategoryError::BadIdentity { .. })));
    }

    #[test]
    fn opposite_is_an_involution() {
        let p = FinCategory::linear_order(3);
        let op = p.opposite();
        assert_eq!(op.hom(1, 0).len(), 1);
        assert!(op.hom(0, 1).is_empty());
        assert_eq!(op.opposite(), p);
        assert_eq!(FinCategory::terminal().opposite(), FinCategory::terminal());
    }

    #[test]
    fn free_pointed_small_cases() {
        let t = FinCategory::terminal().free_pointed();
        assert_eq!(t.base().num_objects(), 2);
        assert_eq!(t.base().hom(0, 0).len(), 2);
        let e = FinCategory::empty().free_pointed();
        assert_eq!(e.base().num_objects(), 1);
        assert_eq!(e.base().num_arrows(), 1);
        let p = FinCategory::linear_order(2).free_pointed();
        assert_eq!(p.base().hom(0, 1).len(), 2);
        assert_eq!(p.base().hom(1, 0).len(), 1);
    }

    #[test]
    fn empty_ideal_quotient_matches_free_pointed() {
        for c in [FinCategory::linear_order(3), iso_pair(), FinCategory::discrete(2)] {
            let q = c.quotient_by_ideal(&[]).unwrap();
            assert_eq!(q.category, c.free_pointed());
            assert!(q.zeroed_objects.is_empty());
        }
    }

    #[test]
    fn truncated_chain_category() {
        let c = FinCategory::linear_order(4);
        let ideal: Vec<ArrowId> = c
            .arrow_ids()
            .filter(|&a| c.tgt(a) >= c.src(a) + 2)
            .collect();
        let q = c.quotient_by_ideal(&ideal).unwrap();
        let p = &q.category;
        let b = p.base();
        let mut nonzero: Vec<(ObjId, ObjId)> = b
            .arrow_ids()
            .filter(|&a| !p.is_zero_arrow(a) && !b.is_identity(a))
            .map(|a| (b.src(a), b.tgt(a)))
            .collect();
        nonzero.sort();
        assert_eq!(nonzero, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn non_isos_quotient_is_free_on_core() {
        let c = FinCategory::linear_order(3);
        let ideal: Vec<ArrowId> = c.arrow_ids().filter(|&a| !c.is_iso(a)).collect();
        let q = c.quotient_by_ideal(&ideal).unwrap();
        let core = FinCategory::discrete(3).free_pointed();
        assert_eq!(q.category.base().num_arrows(), core.base().num_arrows());
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(q.category.base().hom(x, y).len(), core.base().hom(x, y).len());
            }
        }
    }

    #[test]
    fn not_an_ideal() {
        let c = FinCategory::linear_order(3);
        let only = c.hom(0, 1)[0];
        assert!(matches!(
            c.quotient_by_ideal(&[only]),
            Err(CategoryError::NotAnIdeal { .. })
        ));
    }

    #[test]
    fn zeroing_an_identity_is_reported() {
        let c = FinCategory::linear_order(2);
        let ideal: Vec<ArrowId> = c.arrows_to(1);
        let q = c.quotient_by_ideal(&ideal).unwrap();
        assert_eq!(q.zeroed_objects, vec![1]);
        assert_eq!(q.category.base().hom(1, 1).len(), 1);
    }

    #[test]
    fn zero_absorbs() {
        let p = iso_pair().free_pointed();
        let b = p.base();
        for a in b.arrow_ids().filter(|&a| p.is_zero_arrow(a)) {
            for &g in b.arrows_from(b.tgt(a)) {
                assert!(p.is_zero_arrow(b.compose(g, a)));
            }
            for f in b.arrows_to(b.src(a)) {
                assert!(p.is_zero_arrow(b.compose(a, f)));
            }
        }
    }

    #[test]
    fn classes_under_isos() {
        let c = iso_pair();
        let s = c.arrow_classes(&[0, 2], Side::Source);
        assert_eq!(s.len(), 1);
        assert_eq!(s.representative(0), 0);
        let single = c.arrow_classes(&[3], Side::Target);
        assert_eq!(single.classes, vec![vec![3]]);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let p = iso_pair().free_pointed();
        let text = p.to_json();
        let back = PointedFinCategory::from_json(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json(), text);
        let plain = FinCategory::linear_order(3).to_json();
        assert_eq!(FinCategory::from_json(&plain).unwrap().to_json(), plain);
    }
}
