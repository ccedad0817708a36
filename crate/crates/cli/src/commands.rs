use std::path::{Path, PathBuf};

use dk_core::chains::{compare_with_moore, simplicial_preset, ChainComparison};
use dk_core::diagram::{matrix_rows, DiagramFile, MatDiagram};
use dk_core::dkequiv::{
    audit_all, denormalize as denorm, normalize as norm, roundtrip_both, truncation_detector, NormalizationResult,
};
use dk_core::dktriple::{check_triple, validate_triple, DKTriple, TripleFile};
use dk_core::exactla::Ring;
use dk_core::fincat::{FinCategory, PointedFinCategory};
use dk_core::generators::{self, DeltaVariant, PRESET_FAMILIES};
use serde_json::{json, Value};

use crate::refs::{load_diagram, load_n0_diagram, load_triple, parse_preset, triple_parts};
use crate::report::Report;
use crate::CliError;

fn write(path: &Path, text: &str, report: &mut Report) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    report.artifact(&path.display().to_string());
    Ok(())
}

fn names(cat: &FinCategory) -> Vec<String> {
    cat.object_names().to_vec()
}

/// `dim X_b` against the sum over Epis out of `b`, counted up to
/// automorphisms of their targets, of `dim X̄`.
fn conserved(t: &DKTriple, x: &[usize], xbar: &[usize]) -> bool {
    let c = t.category();
    c.objects().all(|b| {
        let total: usize = c
            .objects()
            .map(|y| {
                let epis = c.hom(b, y).iter().filter(|&&e| t.is_epi(e)).count();
                let auts = c.hom(y, y).iter().filter(|&&a| c.is_iso(a)).count();
                epis / auts * xbar[y]
            })
            .sum();
        total == x[b]
    })
}

fn witness_identities(n: &NormalizationResult) -> bool {
    n.witness.objects.iter().all(|w| {
        (&w.proj * &w.incl).is_identity()
            && (&w.proj * &w.s).is_zero()
            && (&w.r * &w.incl).is_zero()
            && (&w.phi * &w.phi_inv).is_identity()
    })
}

fn base_dims(t: &DKTriple, d: &MatDiagram) -> Vec<usize> {
    d.dims()[..t.category().num_objects()].to_vec()
}

/// Normalizes and records conservation and witness checks under `tag`.
fn normalize_checked(
    t: &DKTriple,
    x: &MatDiagram,
    tag: &str,
    report: &mut Report,
) -> Result<NormalizationResult, CliError> {
    let n = norm(t, x).map_err(|e| CliError::Failed(format!("{tag}: {e}")))?;
    report.check(format!("dimension conservation {tag}"), conserved(t, x.dims(), n.normalized.dims()));
    report.check(format!("witness identities {tag}"), witness_identities(&n));
    Ok(n)
}

fn witness_json(t: &DKTriple, n: &NormalizationResult) -> Value {
    let c = t.category();
    let arrows = |ids: &[usize]| ids.iter().map(|&a| c.arrow_name(a)).collect::<Vec<_>>();
    let objects: Vec<Value> = n
        .witness
        .objects
        .iter()
        .map(|w| {
            json!({
                "object": c.object_name(w.object),
                "epis": arrows(&w.rows),
                "dual_epis": arrows(&w.cols),
                "blocks": w.blocks,
                "phi": matrix_rows(&w.phi),
                "phi_inv": matrix_rows(&w.phi_inv),
                "incl": matrix_rows(&w.incl),
                "proj": matrix_rows(&w.proj),
            })
        })
        .collect();
    let order: Vec<&str> = t.object_order().linear.iter().map(|&b| c.object_name(b)).collect();
    json!({"order": order, "objects": objects})
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn validate(r: &str) -> Result<Report, CliError> {
    let parts = triple_parts(r)?;
    let c = &*parts.category;
    let v = check_triple(c, &parts.epis, &parts.dual_epis);
    let mut report = Report::new("validate");
    report.input("triple", r);
    report.check("wide subcategories", v.wide.is_ok());
    if let Err(e) = &v.wide {
        report.say(format!("not wide: {e}"));
    }
    for verdict in &v.verdicts {
        report.check(verdict.axiom.to_string(), verdict.pass);
        if !verdict.pass {
            let arrows: Vec<String> = verdict.counterexample.iter().map(|&a| c.arrow_name(a)).collect();
            report.say(format!(
                "{} fails at [{}]: {}",
                verdict.axiom,
                arrows.join(", "),
                verdict.detail.as_deref().unwrap_or("")
            ));
        }
    }
    if v.wide.is_ok() {
        report.check("antisymmetric order", v.order_error.is_none());
    }
    let verdicts: Vec<Value> = v
        .verdicts
        .iter()
        .map(|x| {
            json!({
                "axiom": x.axiom.to_string(),
                "pass": x.pass,
                "counterexample": x.counterexample.iter().map(|&a| c.arrow_name(a)).collect::<Vec<_>>(),
                "detail": x.detail,
            })
        })
        .collect();
    report.data("verdicts", Value::Array(verdicts));
    let mut grids = Vec::new();
    for p in &v.pairings {
        let rows: Vec<String> = p.order.iter().map(|&i| c.arrow_name(p.rows.representative(i))).collect();
        let cols: Vec<String> = p
            .order
            .iter()
            .map(|&i| c.arrow_name(p.cols.representative(p.matching[i])))
            .collect();
        let grid = p.ordered_grid();
        let mut iso_pairs = Vec::new();
        for (i, row) in grid.iter().enumerate() {
            for (j, &iso) in row.iter().enumerate() {
                if iso {
                    iso_pairs.push(json!([rows[i], cols[j]]));
                }
            }
        }
        report.say(format!("pairing at {}:\n{}", c.object_name(p.object), p.render(c)));
        grids.push(json!({
            "object": c.object_name(p.object),
            "rows": rows,
            "cols": cols,
            "iso": grid,
            "iso_pairs": iso_pairs,
            "diagonal": p.is_diagonal(),
        }));
    }
    report.data("pairings", Value::Array(grids));
    if v.passed() {
        let t = validate_triple(parts.category.clone(), &parts.epis, &parts.dual_epis)
            .map_err(|e| CliError::Failed(e.to_string()))?;
        report.say(format!("diagonalizable={}", t.is_diagonalizable()));
        report.data("diagonalizable", json!(t.is_diagonalizable()));
        report.data("reduced", json!(t.is_reduced()));
        report.data("monotone", json!(t.is_monotone()));
        report.data("partially_monotone", json!(t.is_partially_monotone()));
    }
    Ok(report)
}

pub fn build(r: &str, v: bool, out: Option<&Path>) -> Result<Report, CliError> {
    let t = load_triple(r)?;
    let mut report = Report::new("build");
    report.input("triple", r);
    report.input("target", if v { "v" } else { "n0" });
    let category: PointedFinCategory = if v {
        t.triple.build_v().map_err(|e| CliError::Failed(e.to_string()))?.category
    } else {
        t.triple.build_n0().category
    };
    let text = category.to_json();
    let reloaded = PointedFinCategory::from_json(&text).map(|p| p.to_json() == text).unwrap_or(false);
    report.check("reloads bit-exactly", reloaded);
    let b = category.base();
    let homs: Vec<Vec<usize>> = b.objects().map(|x| b.objects().map(|y| b.hom(x, y).len()).collect()).collect();
    report.data("objects", json!(names(b)));
    report.data("zero", json!(b.object_name(category.zero())));
    report.data("arrows", json!(b.num_arrows()));
    report.data("hom_counts", json!(homs));
    report.say(format!("{} objects, {} arrows", b.num_objects(), b.num_arrows()));
    if let Some(path) = out {
        write(path, &text, &mut report)?;
    }
    Ok(report)
}

pub fn preset(name: Option<&str>, out: Option<&Path>) -> Result<Report, CliError> {
    let mut report = Report::new("preset");
    let Some(name) = name else {
        report.data("families", json!(PRESET_FAMILIES));
        for f in PRESET_FAMILIES {
            report.say(format!("{f}:k"));
        }
        return Ok(report);
    };
    report.input("name", name);
    let t = generators::preset(name).map_err(|e| CliError::Input(e.to_string()))?;
    let text = TripleFile::from_triple(&t).to_json();
    let reloaded: TripleFile = serde_json::from_str(&text).map_err(|e| CliError::Failed(e.to_string()))?;
    report.check("emitted file reloads", reloaded.to_json() == text);
    let p = parse_preset(name).expect("preset parsed");
    report.data("family", json!(p.family));
    report.data("k", json!(p.k));
    report.data("objects", json!(names(t.category())));
    report.data("arrows", json!(t.category().num_arrows()));
    if let Some(path) = out {
        write(path, &text, &mut report)?;
    }
    Ok(report)
}

pub fn normalize(
    r: &str,
    spec: &str,
    ring: Ring,
    out: Option<&Path>,
    witness: Option<&Path>,
) -> Result<Report, CliError> {
    let t = load_triple(r)?;
    let x = load_diagram(spec, &t, ring)?;
    let mut report = Report::new("normalize");
    report.input("triple", r);
    report.input("diagram", spec);
    report.input("ring", ring);
    let n = normalize_checked(&t.triple, &x, spec, &mut report)?;
    let dims = base_dims(&t.triple, &n.normalized);
    report.data("objects", json!(names(t.triple.category())));
    report.data("input_dims", json!(x.dims()));
    report.data("normalized_dims", json!(dims));
    report.say(format!("input dims {:?}", x.dims()));
    report.say(format!("normalized dims {dims:?}"));
    if let Some(path) = out {
        let file = DiagramFile::from_diagram(&n.normalized, &format!("n0:{r}"));
        write(path, &file.to_json(), &mut report)?;
        let wpath = witness.map(Path::to_path_buf).unwrap_or_else(|| witness_path(path));
        write(&wpath, &pretty(&witness_json(&t.triple, &n)), &mut report)?;
    } else if let Some(path) = witness {
        write(path, &pretty(&witness_json(&t.triple, &n)), &mut report)?;
    }
    Ok(report)
}

fn witness_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.witness.json"))
}

pub fn denormalize(r: &str, spec: &str, ring: Ring, out: Option<&Path>) -> Result<Report, CliError> {
    let t = load_triple(r)?;
    let n0 = t.triple.build_n0();
    let ybar = load_n0_diagram(spec, &n0, ring)?;
    let y = denorm(&t.triple, &n0, &ybar).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut report = Report::new("denormalize");
    report.input("triple", r);
    report.input("diagram", spec);
    report.input("ring", ring);
    report.check("dimension conservation", conserved(&t.triple, y.dims(), ybar.dims()));
    report.data("objects", json!(names(t.triple.category())));
    report.data("input_dims", json!(base_dims(&t.triple, &ybar)));
    report.data("denormalized_dims", json!(y.dims()));
    report.say(format!("denormalized dims {:?}", y.dims()));
    if let Some(path) = out {
        write(path, &DiagramFile::from_diagram(&y, r).to_json(), &mut report)?;
    }
    Ok(report)
}

pub fn roundtrip(r: &str, specs: &[String], ring: Ring) -> Result<Report, CliError> {
    let t = load_triple(r)?;
    let c = t.triple.category();
    let specs: Vec<String> = if specs.is_empty() {
        c.objects().map(|b| format!("rep:{}", c.object_name(b))).collect()
    } else {
        specs.to_vec()
    };
    let mut report = Report::new("roundtrip");
    report.input("triple", r);
    report.input("diagrams", specs.join(" "));
    report.input("ring", ring);
    let mut runs = Vec::new();
    for spec in &specs {
        let x = load_diagram(spec, &t, ring)?;
        let n = normalize_checked(&t.triple, &x, spec, &mut report)?;
        let result = roundtrip_both(&t.triple, &x);
        let detail = result.as_ref().err().map(ToString::to_string);
        report.check(format!("round trips {spec}"), result.is_ok());
        if let Some(d) = &detail {
            report.say(format!("{spec}: {d}"));
        }
        runs.push(json!({
            "diagram": spec,
            "dims": x.dims(),
            "normalized_dims": base_dims(&t.triple, &n.normalized),
            "iso_natural": result.is_ok(),
            "error": detail,
        }));
    }
    report.data("runs", Value::Array(runs));
    Ok(report)
}

pub fn audit(r: &str, spec: &str, ring: Ring) -> Result<Report, CliError> {
    let t = load_triple(r)?;
    let x = load_diagram(spec, &t, ring)?;
    let mut report = Report::new("audit");
    report.input("triple", r);
    report.input("diagram", spec);
    report.input("ring", ring);
    normalize_checked(&t.triple, &x, spec, &mut report)?;
    let audits = audit_all(&t.triple, &x).map_err(|e| CliError::Failed(e.to_string()))?;
    let c = t.triple.category();
    for a in &audits {
        report.check(format!("audit at {}", c.object_name(a.object)), a.passed());
        report.say(format!(
            "{}: dim X {} colim {} lim {} ker {} coker {} normalized {}",
            c.object_name(a.object),
            a.dim_x,
            a.dim_colim,
            a.dim_lim,
            a.dim_ker_lim_map,
            a.dim_coker_colim_map,
            a.dim_normalized
        ));
    }
    report.data("objects", json!(names(c)));
    report.data("audits", serde_json::to_value(&audits).expect("serializable"));
    Ok(report)
}

pub fn kan_check(r: &str, spec: &str, level: usize, ring: Ring) -> Result<Report, CliError> {
    let t = load_triple(r)?;
    let x = load_diagram(spec, &t, ring)?;
    let mut report = Report::new("kan-check");
    report.input("triple", r);
    report.input("diagram", spec);
    report.input("level", level);
    report.input("ring", ring);
    normalize_checked(&t.triple, &x, spec, &mut report)?;
    let tr = truncation_detector(&t.triple, &x, level).map_err(|e| CliError::Failed(e.to_string()))?;
    report.check("criteria agree", tr.criteria_agree());
    report.say(format!("{level}-truncated: {}", tr.truncated));
    report.data("objects", json!(names(t.triple.category())));
    report.data("truncation", serde_json::to_value(&tr).expect("serializable"));
    Ok(report)
}

fn comparison_data(cmp: &ChainComparison, report: &mut Report) {
    report.check("moore complex agreement", cmp.agrees());
    report.data("normalized", serde_json::to_value(&cmp.normalized).expect("serializable"));
    report.data("homology", json!(cmp.normalized_homology));
    report.data("moore", serde_json::to_value(&cmp.moore).expect("serializable"));
    report.data("moore_homology", json!(cmp.moore_homology));
    report.say(format!("normalized dims {:?}", cmp.normalized.dims));
    for (i, d) in cmp.normalized.differentials.iter().enumerate() {
        report.say(format!("d{} = {:?}", i + 1, matrix_rows(d)));
    }
    report.say(format!("homology {:?}", cmp.normalized_homology));
    report.say(format!("moore dims {:?} homology {:?}", cmp.moore.dims, cmp.moore_homology));
}

pub fn homology(name: &str, k: usize, max: bool, ring: Ring) -> Result<Report, CliError> {
    let (delta, x) = simplicial_preset(name, k, ring).map_err(|e| CliError::Input(e.to_string()))?;
    let variant = if max { DeltaVariant::Max } else { DeltaVariant::Min };
    let cmp = compare_with_moore(&delta, variant, &x).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut report = Report::new("homology");
    report.input("preset", name);
    report.input("k", k);
    report.input("variant", if max { "max" } else { "min" });
    report.input("ring", ring);
    comparison_data(&cmp, &mut report);
    Ok(report)
}

pub fn dk(triple: &str, name: &str, ring: Ring) -> Result<Report, CliError> {
    let p = parse_preset(triple)
        .filter(|p| p.family.starts_with("delta-"))
        .ok_or_else(|| CliError::Input(format!("{triple}: not a delta-min or delta-max preset")))?;
    let variant = if p.family == "delta-max" { DeltaVariant::Max } else { DeltaVariant::Min };
    let (delta, x) = simplicial_preset(name, p.k, ring).map_err(|e| CliError::Input(e.to_string()))?;
    let cmp = compare_with_moore(&delta, variant, &x).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut report = Report::new("dk");
    report.input("preset", triple);
    report.input("simplicial", name);
    report.input("ring", ring);
    comparison_data(&cmp, &mut report);
    Ok(report)
}
