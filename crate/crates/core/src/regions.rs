//! Region membership predicates and their half-space descriptions.
//!
//! Every boundary is closed except the strict `λ1λ2λ3 > 0` in CP-divisibility.
//! Comparisons are exact floating-point comparisons with no epsilon.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{weights_from_lambda, EigenvalueTriple};
use crate::error::{Error, Result};
use crate::exact::HalfSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionId {
    /// Positive trace-preserving maps, `|λα| ≤ 1`.
    #[serde(rename = "PT")]
    Pt,
    /// Pauli channels (Fujiwara–Algoet conditions).
    #[serde(rename = "CPT")]
    Cpt,
    /// Entanglement breaking, `Σ|λα| ≤ 1`.
    #[serde(rename = "EBC")]
    Ebc,
    /// Reachable by a time-local generator, `λα ≥ 0`.
    #[serde(rename = "TLG")]
    Tlg,
    /// P-divisible, `λ1λ2λ3 ≥ 0`.
    #[serde(rename = "PDIV")]
    Pdiv,
    /// CP-divisible, `0 < λ1λ2λ3 ≤ min|λα|²`.
    #[serde(rename = "CPDIV")]
    Cpdiv,
}

impl RegionId {
    pub const ALL: [RegionId; 6] = [
        RegionId::Pt,
        RegionId::Cpt,
        RegionId::Ebc,
        RegionId::Tlg,
        RegionId::Pdiv,
        RegionId::Cpdiv,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            RegionId::Pt => "PT",
            RegionId::Cpt => "CPT",
            RegionId::Ebc => "EBC",
            RegionId::Tlg => "TLG",
            RegionId::Pdiv => "PDIV",
            RegionId::Cpdiv => "CPDIV",
        }
    }

    pub fn contains(self, l: EigenvalueTriple) -> bool {
        match self {
            RegionId::Pt => is_positive(l),
            RegionId::Cpt => is_cp(l),
            RegionId::Ebc => is_ebc(l),
            RegionId::Tlg => is_tlg(l),
            RegionId::Pdiv => is_p_divisible(l),
            RegionId::Cpdiv => is_cp_divisible(l),
        }
    }

    /// Whether the region alone is a bounded set.
    pub fn is_bounded(self) -> bool {
        matches!(self, RegionId::Pt | RegionId::Cpt | RegionId::Ebc)
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RegionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tag = s.trim().to_ascii_uppercase();
        RegionId::ALL
            .into_iter()
            .find(|r| r.tag() == tag)
            .ok_or_else(|| Error::UnknownRegion(s.trim().to_string()))
    }
}

/// Conjunction of regions. Duplicates collapse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionExpr {
    conjuncts: BTreeSet<RegionId>,
}

impl RegionExpr {
    pub fn new<I: IntoIterator<Item = RegionId>>(ids: I) -> Result<Self> {
        let conjuncts: BTreeSet<_> = ids.into_iter().collect();
        if conjuncts.is_empty() {
            return Err(Error::EmptyExpression);
        }
        Ok(Self { conjuncts })
    }

    pub fn single(id: RegionId) -> Self {
        Self {
            conjuncts: BTreeSet::from([id]),
        }
    }

    pub fn conjuncts(&self) -> impl Iterator<Item = RegionId> + '_ {
        self.conjuncts.iter().copied()
    }

    pub fn has(&self, id: RegionId) -> bool {
        self.conjuncts.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.conjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }

    /// `self ∧ other`.
    pub fn and(&self, other: &RegionExpr) -> RegionExpr {
        RegionExpr {
            conjuncts: self.conjuncts.union(&other.conjuncts).copied().collect(),
        }
    }

    /// The conjuncts other than `id`, or `None` if nothing remains.
    pub fn without(&self, id: RegionId) -> Option<RegionExpr> {
        let mut rest = self.conjuncts.clone();
        rest.remove(&id);
        (!rest.is_empty()).then_some(RegionExpr { conjuncts: rest })
    }

    pub fn contains(&self, l: EigenvalueTriple) -> bool {
        contains(self, l)
    }

    pub fn is_polytopal(&self) -> bool {
        !self.has(RegionId::Cpdiv)
    }

    pub fn is_bounded(&self) -> bool {
        self.conjuncts.iter().any(|r| r.is_bounded())
    }
}

impl From<RegionId> for RegionExpr {
    fn from(id: RegionId) -> Self {
        RegionExpr::single(id)
    }
}

impl fmt::Display for RegionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for r in &self.conjuncts {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            f.write_str(r.tag())?;
        }
        Ok(())
    }
}

impl FromStr for RegionExpr {
    type Err = Error;

    /// Comma-separated tags, e.g. `CPT,TLG`.
    fn from_str(s: &str) -> Result<Self> {
        let ids = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(RegionId::from_str)
            .collect::<Result<Vec<_>>>()?;
        RegionExpr::new(ids)
    }
}

impl Serialize for RegionExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RegionExpr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn is_positive(l: EigenvalueTriple) -> bool {
    l.l1.abs() <= 1.0 && l.l2.abs() <= 1.0 && l.l3.abs() <= 1.0
}

/// Fujiwara–Algoet conditions `|1 ± λ3| ≥ |λ1 ± λ2|`, written as
/// `1 ± λ3 ≥ |λ1 ± λ2|`. The two forms coincide on the PT cube; the unsigned
/// left side keeps the predicate equal to `pα ≥ 0` when `|λ3| > 1`.
pub fn is_cp(l: EigenvalueTriple) -> bool {
    1.0 + l.l3 >= (l.l1 + l.l2).abs() && 1.0 - l.l3 >= (l.l1 - l.l2).abs()
}

pub fn is_ebc(l: EigenvalueTriple) -> bool {
    l.l1.abs() + l.l2.abs() + l.l3.abs() <= 1.0
}

pub fn is_tlg(l: EigenvalueTriple) -> bool {
    l.l1 >= 0.0 && l.l2 >= 0.0 && l.l3 >= 0.0
}

pub fn is_p_divisible(l: EigenvalueTriple) -> bool {
    l.product() >= 0.0
}

/// `0 < λ1λ2λ3 ≤ m²` with `m` the smallest eigenvalue modulus (the smallest
/// singular value of the map).
pub fn is_cp_divisible(l: EigenvalueTriple) -> bool {
    let product = l.product();
    let smallest = l.l1.abs().min(l.l2.abs()).min(l.l3.abs());
    product > 0.0 && product <= smallest * smallest
}

/// Conjunction of the member predicates.
pub fn contains(expr: &RegionExpr, l: EigenvalueTriple) -> bool {
    expr.conjuncts().all(|r| r.contains(l))
}

/// Spectral form of complete positivity: every Kraus weight is nonnegative.
pub fn has_nonnegative_weights(l: EigenvalueTriple) -> bool {
    weights_from_lambda(l.to_array()).iter().all(|&p| p >= 0.0)
}

/// Outcome of all six predicates for one triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct Membership {
    pub pt: bool,
    pub cpt: bool,
    pub ebc: bool,
    pub tlg: bool,
    pub pdiv: bool,
    pub cpdiv: bool,
}

impl Membership {
    pub fn of(l: EigenvalueTriple) -> Self {
        Self {
            pt: is_positive(l),
            cpt: is_cp(l),
            ebc: is_ebc(l),
            tlg: is_tlg(l),
            pdiv: is_p_divisible(l),
            cpdiv: is_cp_divisible(l),
        }
    }

    pub fn get(&self, id: RegionId) -> bool {
        match id {
            RegionId::Pt => self.pt,
            RegionId::Cpt => self.cpt,
            RegionId::Ebc => self.ebc,
            RegionId::Tlg => self.tlg,
            RegionId::Pdiv => self.pdiv,
            RegionId::Cpdiv => self.cpdiv,
        }
    }
}

/// Sign patterns with `λ1λ2λ3 ≥ 0`: an even number of negative coordinates.
pub const EVEN_ORTHANTS: [[i64; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

fn region_halfspaces(id: RegionId) -> Vec<HalfSpace> {
    let hs = |a: [i64; 3], b: i64| HalfSpace::integer(a, b);
    match id {
        RegionId::Pt => (0..3)
            .flat_map(|k| {
                let mut e = [0; 3];
                e[k] = 1;
                let neg = e.map(|x| -x);
                [hs(e, 1), hs(neg, 1)]
            })
            .collect(),
        // pα ≥ 0 rewritten as a·λ ≤ 1.
        RegionId::Cpt => vec![
            hs([-1, -1, -1], 1),
            hs([-1, 1, 1], 1),
            hs([1, -1, 1], 1),
            hs([1, 1, -1], 1),
        ],
        RegionId::Ebc => {
            let mut out = Vec::with_capacity(8);
            for s1 in [1, -1] {
                for s2 in [1, -1] {
                    for s3 in [1, -1] {
                        out.push(hs([s1, s2, s3], 1));
                    }
                }
            }
            out
        }
        RegionId::Tlg => vec![hs([-1, 0, 0], 0), hs([0, -1, 0], 0), hs([0, 0, -1], 0)],
        RegionId::Pdiv | RegionId::Cpdiv => unreachable!("not a single convex system"),
    }
}

/// Half-spaces `−sα λα ≤ 0` selecting the closed orthant with signs `s`.
pub fn orthant_halfspaces(signs: [i64; 3]) -> Vec<HalfSpace> {
    (0..3)
        .map(|k| {
            let mut a = [0; 3];
            a[k] = -signs[k];
            HalfSpace::integer(a, 0)
        })
        .collect()
}

/// Finite union of convex systems whose union equals the region (up to
/// measure zero). Without PDIV the union has one piece; with PDIV it has one
/// piece per even-sign orthant.
pub fn halfspace_description(expr: &RegionExpr) -> Result<Vec<Vec<HalfSpace>>> {
    if expr.has(RegionId::Cpdiv) {
        return Err(Error::NonPolytopal(expr.to_string()));
    }
    let base: Vec<HalfSpace> = expr
        .conjuncts()
        .filter(|r| *r != RegionId::Pdiv)
        .flat_map(region_halfspaces)
        .collect();
    if !expr.has(RegionId::Pdiv) {
        return Ok(vec![base]);
    }
    Ok(EVEN_ORTHANTS
        .iter()
        .map(|&signs| {
            let mut piece = base.clone();
            piece.extend(orthant_halfspaces(signs));
            piece
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(l1: f64, l2: f64, l3: f64) -> EigenvalueTriple {
        EigenvalueTriple::new(l1, l2, l3).unwrap()
    }

    fn expr(s: &str) -> RegionExpr {
        s.parse().unwrap()
    }

    #[test]
    fn positivity() {
        assert!(is_positive(t(1.0, 1.0, 1.0)));
        assert!(!is_positive(t(1.01, 0.0, 0.0)));
        assert!(is_positive(t(-1.0, 1.0, -1.0)));
    }

    #[test]
    fn complete_positivity() {
        // |1 + λ3| ≥ |λ1 + λ2| holds here but p3 < 0.
        assert!(!is_cp(t(-0.19, 0.18, -1.1)));
        assert!(is_cp(t(1.0, 1.0, 1.0)));
        assert!(!is_cp(t(1.0, 1.0, -1.0)));
        assert!(is_cp(t(0.5, 0.5, 0.5)));
    }

    #[test]
    fn entanglement_breaking() {
        assert!(is_ebc(t(0.0, 0.0, 0.0)));
        assert!(is_ebc(t(1.0, 0.0, 0.0)));
        assert!(!is_ebc(t(0.5, 0.5, 0.5)));
    }

    #[test]
    fn time_local() {
        assert!(is_tlg(t(0.0, 0.0, 0.0)));
        assert!(is_tlg(t(1.0, 1.0, 1.0)));
        assert!(!is_tlg(t(-1e-9, 0.5, 0.5)));
    }

    #[test]
    fn p_divisibility() {
        assert!(is_p_divisible(t(1.0, 1.0, 1.0)));
        assert!(is_p_divisible(t(-0.5, -0.5, 0.5)));
        assert!(!is_p_divisible(t(-0.5, 0.5, 0.5)));
    }

    #[test]
    fn cp_divisibility() {
        assert!(is_cp_divisible(t(1.0, 1.0, 1.0)));
        assert!(!is_cp_divisible(t(0.0, 0.5, 0.5)));
        // 0.405 > 0.25
        assert!(!is_cp_divisible(t(0.9, 0.9, 0.5)));
        // two negative eigenvalues: product 0.125 ≤ 0.25
        assert!(is_cp_divisible(t(-0.5, -0.5, 0.5)));
        // product 0.18 exceeds min|λ|² = 0.09; the signed minimum would give 1.0
        assert!(!is_cp_divisible(t(-0.6, -1.0, 0.3)));
    }

    #[test]
    fn contains_examples() {
        assert!(contains(&expr("CPT,TLG"), t(1.0, 1.0, 1.0)));
        assert!(!contains(&expr("CPT,EBC"), t(0.5, 0.5, 0.5)));
        assert!(contains(&expr("PT"), t(1.0, 1.0, -1.0)));
    }

    #[test]
    fn expression_parsing() {
        let e = expr("tlg, CPT,CPT");
        assert_eq!(e.len(), 2);
        assert_eq!(e.to_string(), "CPT,TLG");
        assert!(matches!("CPT,FOO".parse::<RegionExpr>(), Err(Error::UnknownRegion(_))));
        assert!(matches!("".parse::<RegionExpr>(), Err(Error::EmptyExpression)));
        assert!(matches!(RegionExpr::new([]), Err(Error::EmptyExpression)));
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, "\"CPT,TLG\"");
        assert_eq!(serde_json::from_str::<RegionExpr>(&json).unwrap(), e);
    }

    #[test]
    fn descriptions() {
        let cpt = halfspace_description(&expr("CPT")).unwrap();
        assert_eq!(cpt.len(), 1);
        assert_eq!(cpt[0].len(), 4);
        let pt = halfspace_description(&expr("PT")).unwrap();
        assert_eq!(pt[0].len(), 6);
        let pdiv = halfspace_description(&expr("PDIV,CPT")).unwrap();
        assert_eq!(pdiv.len(), 4);
        assert!(pdiv.iter().all(|p| p.len() == 7));
        assert!(matches!(
            halfspace_description(&expr("CPT,CPDIV")),
            Err(Error::NonPolytopal(_))
        ));
    }

    #[test]
    fn cp_planes_are_weight_constraints() {
        // Each CPT plane a·λ ≤ 1 is 4pα ≥ 0.
        let planes = halfspace_description(&expr("CPT")).unwrap().remove(0);
        for l in [t(0.3, -0.1, 0.9), t(-0.7, 0.2, 0.4), t(1.0, 1.0, 1.0)] {
            let p = crate::lambda_to_p(l).p;
            for (plane, weight) in planes.iter().zip(p) {
                let lhs: f64 = plane.normal_f64().iter().zip(l.to_array()).map(|(a, x)| a * x).sum();
                assert!((1.0 - lhs - 4.0 * weight).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn membership_record() {
        let m = Membership::of(EigenvalueTriple::IDENTITY);
        assert!(m.pt && m.cpt && !m.ebc && m.tlg && m.pdiv && m.cpdiv);
        for id in RegionId::ALL {
            assert_eq!(m.get(id), id.contains(EigenvalueTriple::IDENTITY));
        }
    }
}
