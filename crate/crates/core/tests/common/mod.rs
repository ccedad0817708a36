//! Helpers shared by the integration tests.
#![allow(dead_code)]

use dk_core::diagram::MatDiagram;
use dk_core::dkequiv::{normalize, NormalizationResult};
use dk_core::dktriple::DKTriple;
use dk_core::exactla::Ring;
use dk_core::generators::{delta_max, delta_min, fi_sharp, gamma};

pub const Q: Ring = Ring::Rational;

pub fn rings() -> [Ring; 3] {
    [Q, Ring::prime(2).unwrap(), Ring::prime(5).unwrap()]
}

pub fn presets() -> Vec<(&'static str, DKTriple)> {
    vec![
        ("delta-min:2", delta_min(2)),
        ("delta-max:2", delta_max(2)),
        ("gamma:2", gamma(2).triple),
        ("fi-sharp:2", fi_sharp(2).triple),
    ]
}

pub fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Inverse binomial transform: the unique `d` with `x_n = Σ_j C(n,j)·d_j`.
pub fn binomial_solve(x: &[usize]) -> Vec<i64> {
    (0..x.len())
        .map(|n| {
            (0..=n)
                .map(|j| {
                    let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
                    sign * binomial(n, j) * x[j] as i64
                })
                .sum()
        })
        .collect()
}

/// Epis out of `b` into `y`, counted up to automorphisms of `y`.
pub fn epi_classes(t: &DKTriple, b: usize, y: usize) -> usize {
    let c = t.category();
    let epis = c.hom(b, y).iter().filter(|&&e| t.is_epi(e)).count();
    let auts = c.hom(y, y).iter().filter(|&&a| c.is_iso(a)).count();
    assert_eq!(epis % auts, 0);
    epis / auts
}

/// `dim X_b = Σ_y epi_classes(b, y)·dim X̄_y` at every object of the base.
pub fn conserved(t: &DKTriple, x: &[usize], xbar: &[usize]) -> bool {
    let c = t.category();
    c.objects()
        .all(|b| c.objects().map(|y| epi_classes(t, b, y) * xbar[y]).sum::<usize>() == x[b])
}

pub fn witness_identities(n: &NormalizationResult) {
    for w in &n.witness.objects {
        assert!((&w.proj * &w.incl).is_identity());
        assert!((&w.proj * &w.s).is_zero());
        assert!((&w.r * &w.incl).is_zero());
        assert!((&w.phi * &w.phi_inv).is_identity());
    }
}

pub fn normalize_checked(t: &DKTriple, x: &MatDiagram) -> NormalizationResult {
    let n = normalize(t, x).unwrap();
    assert!(conserved(t, x.dims(), n.normalized.dims()));
    witness_identities(&n);
    n
}
