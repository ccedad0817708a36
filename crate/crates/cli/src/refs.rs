//! Resolution of triple, shape and diagram references given on the command line.
//!
//! A triple reference is a preset name such as `delta-min:2` or a path to a
//! triple file. A shape reference is a triple reference (its underlying
//! category), `n0:REF`, `op:REF`, or a path to a category file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use dk_core::chains::simplicial_preset;
use dk_core::diagram::{constant, opposite_diagram, representable, span_action, DiagramFile, MatDiagram};
use dk_core::dktriple::{validate_triple, CategorySource, DKTriple, N0, TripleFile};
use dk_core::exactla::Ring;
use dk_core::fincat::{ArrowId, FinCategory, ObjId, PointedFinCategory};
use dk_core::generators::{self, fi_sharp, gamma, FinTruncation, MapClass, PRESET_FAMILIES};

use crate::CliError;

/// Family and truncation level of a preset reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresetName {
    pub family: String,
    pub k: usize,
}

pub fn parse_preset(name: &str) -> Option<PresetName> {
    let (family, k) = name.split_once(':')?;
    let k = k.parse().ok()?;
    PRESET_FAMILIES.contains(&family).then(|| PresetName {
        family: family.to_string(),
        k,
    })
}

/// A triple before validation.
pub struct TripleParts {
    pub category: Arc<FinCategory>,
    pub epis: Vec<ArrowId>,
    pub dual_epis: Vec<ArrowId>,
    pub preset: Option<PresetName>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn is_preset_ref(r: &str) -> bool {
    parse_preset(r).is_some() && !Path::new(r).exists()
}

pub fn triple_parts(r: &str) -> Result<TripleParts, CliError> {
    if is_preset_ref(r) {
        let t = generators::preset(r).map_err(|e| CliError::Input(e.to_string()))?;
        return Ok(TripleParts {
            category: t.category_arc(),
            epis: t.epis(),
            dual_epis: t.dual_epis(),
            preset: parse_preset(r),
        });
    }
    let path = PathBuf::from(r);
    let file: TripleFile =
        serde_json::from_str(&read(&path)?).map_err(|e| CliError::Input(format!("{r}: {e}")))?;
    let category = match &file.category {
        CategorySource::Inline(raw) => FinCategory::from_raw(raw),
        CategorySource::Path(p) => {
            let dir = path.parent().unwrap_or(Path::new("."));
            FinCategory::from_json(&read(&dir.join(p))?)
        }
    }
    .map_err(|e| CliError::Input(format!("{r}: {e}")))?;
    Ok(TripleParts {
        category: Arc::new(category),
        epis: file.epis,
        dual_epis: file.dual_epis,
        preset: None,
    })
}

pub struct LoadedTriple {
    pub name: String,
    pub triple: DKTriple,
    pub preset: Option<PresetName>,
}

/// Loads and validates; an invalid triple is a validation failure.
pub fn load_triple(r: &str) -> Result<LoadedTriple, CliError> {
    let parts = triple_parts(r)?;
    let triple = validate_triple(parts.category, &parts.epis, &parts.dual_epis)
        .map_err(|e| CliError::Failed(format!("{r}: {e}")))?;
    Ok(LoadedTriple {
        name: r.to_string(),
        triple,
        preset: parts.preset,
    })
}

/// Category and zero object named by a shape reference.
pub fn load_shape(r: &str) -> Result<(Arc<FinCategory>, Option<ObjId>), CliError> {
    if let Some(rest) = r.strip_prefix("n0:") {
        let n0 = load_triple(rest)?.triple.build_n0();
        return Ok((n0.category.base_arc(), Some(n0.category.zero())));
    }
    if let Some(rest) = r.strip_prefix("op:") {
        let t = load_triple(rest)?.triple;
        return Ok((Arc::new(t.category().opposite()), None));
    }
    if is_preset_ref(r) {
        return Ok((load_triple(r)?.triple.category_arc(), None));
    }
    let text = read(Path::new(r))?;
    if serde_json::from_str::<TripleFile>(&text).is_ok() {
        return Ok((load_triple(r)?.triple.category_arc(), None));
    }
    match PointedFinCategory::from_json(&text) {
        Ok(p) => Ok((p.base_arc(), Some(p.zero()))),
        Err(_) => FinCategory::from_json(&text)
            .map(|c| (Arc::new(c), None))
            .map_err(|e| CliError::Input(format!("{r}: {e}"))),
    }
}

fn object(cat: &FinCategory, name: &str) -> Result<ObjId, CliError> {
    cat.object_by_name(name)
        .or_else(|| name.parse().ok().filter(|&i| i < cat.num_objects()))
        .ok_or_else(|| CliError::Input(format!("unknown object {name:?}")))
}

fn load_diagram_file(path: &str) -> Result<MatDiagram, CliError> {
    let file = DiagramFile::from_json(&read(Path::new(path))?).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let (shape, zero) = load_shape(&file.shape)?;
    file.to_diagram(shape, zero).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

/// A diagram on the triple's category: `zero`, `const:D`, `rep:OBJ`,
/// `simplicial:NAME` (Δ triples, transposed to Δ), `span-action` (Γ and
/// FI♯ presets), or a diagram file.
pub fn load_diagram(spec: &str, t: &LoadedTriple, ring: Ring) -> Result<MatDiagram, CliError> {
    let c = t.triple.category_arc();
    let x = if spec == "zero" {
        MatDiagram::zero(c, None, ring)
    } else if let Some(d) = spec.strip_prefix("const:") {
        let d = d.parse().map_err(|_| CliError::Input(format!("bad dimension in {spec:?}")))?;
        constant(c, ring, d)
    } else if let Some(name) = spec.strip_prefix("rep:") {
        let b = object(&c, name)?;
        representable(c, None, b, ring).map_err(|e| CliError::Input(e.to_string()))?
    } else if let Some(name) = spec.strip_prefix("simplicial:") {
        let k = c.num_objects() - 1;
        let (_, x) = simplicial_preset(name, k, ring).map_err(|e| CliError::Input(e.to_string()))?;
        opposite_diagram(&x)
    } else if spec == "span-action" {
        let p = t
            .preset
            .as_ref()
            .ok_or_else(|| CliError::Input("span-action needs a gamma or fi-sharp preset".into()))?;
        match p.family.as_str() {
            "gamma" => span_action(&gamma(p.k), &FinTruncation::new(p.k, MapClass::All), ring),
            "fi-sharp" => span_action(&fi_sharp(p.k), &FinTruncation::new(p.k, MapClass::Inj), ring),
            _ => return Err(CliError::Input("span-action needs a gamma or fi-sharp preset".into())),
        }
    } else {
        load_diagram_file(spec)?
    };
    if x.shape() != t.triple.category() || x.zero_object().is_some() {
        return Err(CliError::Input(format!("{spec}: diagram is not defined on {}", t.name)));
    }
    Ok(x)
}

/// A pointed diagram on `N₀`: `zero`, `rep:OBJ`, or a diagram file.
pub fn load_n0_diagram(spec: &str, n0: &N0, ring: Ring) -> Result<MatDiagram, CliError> {
    let shape = n0.category.base_arc();
    let zero = Some(n0.category.zero());
    let y = if spec == "zero" {
        MatDiagram::zero(shape, zero, ring)
    } else if let Some(name) = spec.strip_prefix("rep:") {
        let b = object(&shape, name)?;
        representable(shape, zero, b, ring).map_err(|e| CliError::Input(e.to_string()))?
    } else {
        load_diagram_file(spec)?
    };
    if y.shape() != n0.category.base() || y.zero_object() != zero {
        return Err(CliError::Input(format!("{spec}: diagram is not defined on N0")));
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_parse() {
        assert_eq!(
            parse_preset("gamma:3"),
            Some(PresetName {
                family: "gamma".into(),
                k: 3
            })
        );
        assert_eq!(parse_preset("gamma"), None);
        assert_eq!(parse_preset("simplex:2"), None);
        assert_eq!(parse_preset("delta-min:x"), None);
    }

    #[test]
    fn shapes_resolve() {
        let (c, z) = load_shape("delta-min:2").unwrap();
        assert_eq!((c.num_objects(), z), (3, None));
        let (c, z) = load_shape("n0:delta-min:2").unwrap();
        assert_eq!(z, Some(3));
        assert_eq!(c.num_objects(), 4);
        let (c, _) = load_shape("op:delta-min:1").unwrap();
        // the two cofaces [0] -> [1], reversed
        assert_eq!(c.hom(1, 0).len(), 2);
        assert!(matches!(load_shape("no/such/file.json"), Err(CliError::Input(_))));
    }

    #[test]
    fn generator_specs() {
        let t = load_triple("gamma:2").unwrap();
        let x = load_diagram("span-action", &t, Ring::Rational).unwrap();
        assert_eq!(x.dims(), &[0, 1, 2]);
        // |hom(x, y)| = (x + 1)^y for partial maps
        assert_eq!(load_diagram("rep:1", &t, Ring::Rational).unwrap().dims(), &[1, 2, 4]);
        assert!(load_diagram("rep:7", &t, Ring::Rational).is_err());
        let d = load_triple("delta-min:2").unwrap();
        assert!(load_diagram("span-action", &d, Ring::Rational).is_err());
        assert_eq!(load_diagram("simplicial:s1", &d, Ring::Rational).unwrap().dims(), &[1, 2, 3]);
        let n0 = d.triple.build_n0();
        assert_eq!(load_n0_diagram("rep:[0]", &n0, Ring::Rational).unwrap().dims(), &[1, 1, 0, 0]);
    }
}
