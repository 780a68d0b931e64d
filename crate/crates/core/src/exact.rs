//! Exact rational volumes of the polytopal regions.
//!
//! Pipeline: half-spaces → brute-force vertex enumeration over plane triples
//! → facets (tight vertices per plane, ordered angularly with exact cross
//! products) → signed tetrahedra against the vertex centroid. The Euclidean
//! volume is scaled by the Hilbert–Schmidt weight `1/8`, so the PT cube has
//! volume 1.
//!
//! No floating point is used for geometry.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regions::{halfspace_description, RegionExpr, RegionId};

pub type Rational = BigRational;
pub type Point = [Rational; 3];

fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn sub(a: &Point, b: &Point) -> Point {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn dot(a: &Point, b: &Point) -> Rational {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn cross(a: &Point, b: &Point) -> Point {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn det3(a: &Point, b: &Point, c: &Point) -> Rational {
    dot(a, &cross(b, c))
}

fn is_zero(p: &Point) -> bool {
    p.iter().all(Zero::is_zero)
}

fn centroid<'a, I: Iterator<Item = &'a Point>>(points: I) -> Point {
    let mut sum = [Rational::zero(), Rational::zero(), Rational::zero()];
    let mut n = 0i64;
    for p in points {
        for k in 0..3 {
            sum[k] += &p[k];
        }
        n += 1;
    }
    let n = int(n.max(1));
    sum.map(|s| s / &n)
}

/// Closed half-space `normal · λ ≤ offset`.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub normal: [Rational; 3],
    pub offset: Rational,
    /// `[a1, a2, a3, b]` when all are integers exactly representable as `f64`.
    small: Option<[f64; 4]>,
}

impl PartialEq for HalfSpace {
    fn eq(&self, other: &Self) -> bool {
        self.normal == other.normal && self.offset == other.offset
    }
}

impl Eq for HalfSpace {}

/// Integers below 2^53 convert to `f64` exactly.
fn small_integer(r: &Rational) -> Option<f64> {
    if !r.is_integer() {
        return None;
    }
    let v = r.to_integer().to_i64()?;
    (v.unsigned_abs() < 1 << 53).then_some(v as f64)
}

impl HalfSpace {
    pub fn new(normal: [Rational; 3], offset: Rational) -> Result<Self> {
        if is_zero(&normal) {
            return Err(Error::ZeroNormal);
        }
        let small = (|| {
            Some([
                small_integer(&normal[0])?,
                small_integer(&normal[1])?,
                small_integer(&normal[2])?,
                small_integer(&offset)?,
            ])
        })();
        Ok(Self { normal, offset, small })
    }

    /// Integer coefficients; panics on a zero normal.
    pub fn integer(a: [i64; 3], b: i64) -> Self {
        Self::new(a.map(int), int(b)).expect("integer half-space with zero normal")
    }

    pub fn slack(&self, x: &Point) -> Rational {
        &self.offset - dot(&self.normal, x)
    }

    pub fn contains(&self, x: &Point) -> bool {
        !self.slack(x).is_negative()
    }

    pub fn is_tight(&self, x: &Point) -> bool {
        self.slack(x).is_zero()
    }

    /// Exact membership test for a floating-point point (every finite `f64`
    /// is a dyadic rational).
    pub fn contains_f64(&self, x: [f64; 3]) -> bool {
        // Floating-point filter: with integer coefficients the computed slack
        // is within 4ε of the true value relative to the summed magnitudes.
        if let Some([a1, a2, a3, b]) = self.small {
            let terms = [a1 * x[0], a2 * x[1], a3 * x[2]];
            let slack = b - terms[0] - terms[1] - terms[2];
            let magnitude = b.abs() + terms.iter().map(|t| t.abs()).sum::<f64>();
            if slack.abs() > 4.0 * f64::EPSILON * magnitude {
                return slack > 0.0;
            }
        }
        let point = x.map(|v| Rational::from_float(v).expect("finite coordinate"));
        self.contains(&point)
    }

    pub fn normal_f64(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| self.normal[k].to_f64().unwrap_or(f64::NAN))
    }

    /// Same half-space scaled to coprime integer coefficients.
    pub fn integer_form(&self) -> ([BigInt; 3], BigInt) {
        let lcm = self
            .normal
            .iter()
            .chain(std::iter::once(&self.offset))
            .fold(BigInt::one(), |acc, r| num_integer::Integer::lcm(&acc, r.denom()));
        let scaled: Vec<BigInt> = self
            .normal
            .iter()
            .chain(std::iter::once(&self.offset))
            .map(|r| (r * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let gcd = scaled
            .iter()
            .fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
        let g = if gcd.is_zero() { BigInt::one() } else { gcd };
        let mut it = scaled.into_iter().map(|x| x / &g);
        let a = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
        (a, it.next().unwrap())
    }

    /// Canonical key of the bounding plane together with its side.
    fn plane_key(&self) -> ([BigInt; 3], BigInt) {
        self.integer_form()
    }
}

/// Solves the three boundary planes of `a`, `b`, `c` for their common point.
fn intersect(a: &HalfSpace, b: &HalfSpace, c: &HalfSpace) -> Option<Point> {
    let det = det3(&a.normal, &b.normal, &c.normal);
    if det.is_zero() {
        return None;
    }
    // Cramer: x = (b_a (n_b × n_c) + b_b (n_c × n_a) + b_c (n_a × n_b)) / det
    let bc = cross(&b.normal, &c.normal);
    let ca = cross(&c.normal, &a.normal);
    let ab = cross(&a.normal, &b.normal);
    Some([0, 1, 2].map(|k| (&a.offset * &bc[k] + &b.offset * &ca[k] + &c.offset * &ab[k]) / &det))
}

fn raw_vertices(hs: &[HalfSpace]) -> Vec<Point> {
    let mut found = BTreeSet::new();
    let n = hs.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let Some(x) = intersect(&hs[i], &hs[j], &hs[k]) {
                    if hs.iter().all(|h| h.contains(&x)) {
                        found.insert(x);
                    }
                }
            }
        }
    }
    found.into_iter().collect()
}

/// The recession cone `{d : normal · d ≤ 0}` is trivial iff the system is bounded.
/// Intersected with the box `|dk| ≤ 1` it is a polytope, which is `{0}` iff all of
/// its vertices are zero.
fn is_bounded(hs: &[HalfSpace]) -> bool {
    let mut cone: Vec<HalfSpace> = hs
        .iter()
        .map(|h| HalfSpace::new(h.normal.clone(), Rational::zero()).expect("nonzero normal"))
        .collect();
    for k in 0..3 {
        let mut e = [0; 3];
        e[k] = 1;
        cone.push(HalfSpace::integer(e, 1));
        cone.push(HalfSpace::integer(e.map(|x| -x), 1));
    }
    raw_vertices(&cone).iter().all(is_zero)
}

/// All vertices of the bounded polytope `∩ hs`, sorted and deduplicated.
/// An infeasible system yields an empty list.
pub fn enumerate_vertices(hs: &[HalfSpace]) -> Result<Vec<Point>> {
    if !is_bounded(hs) {
        return Err(Error::UnboundedPolytope);
    }
    Ok(raw_vertices(hs))
}

/// Number of affinely independent points among `points`, capped at 4.
fn affine_rank(points: &[Point]) -> usize {
    let Some(origin) = points.first() else {
        return 0;
    };
    let diffs: Vec<Point> = points[1..].iter().map(|p| sub(p, origin)).collect();
    let Some(u) = diffs.iter().find(|d| !is_zero(d)) else {
        return 1;
    };
    let Some(n) = diffs.iter().map(|d| cross(u, d)).find(|c| !is_zero(c)) else {
        return 2;
    };
    if diffs.iter().any(|d| !dot(&n, d).is_zero()) {
        4
    } else {
        3
    }
}

/// Orders coplanar points counterclockwise around `normal`.
fn order_cycle(points: &[Point], indices: &mut [usize], normal: &Point) {
    let c = centroid(indices.iter().map(|&i| &points[i]));
    let reference = sub(&points[indices[0]], &c);
    let half = |w: &Point| -> u8 {
        let side = dot(&cross(&reference, w), normal);
        if side.is_positive() || (side.is_zero() && dot(&reference, w).is_positive()) {
            0
        } else {
            1
        }
    };
    indices.sort_by(|&i, &j| {
        let wi = sub(&points[i], &c);
        let wj = sub(&points[j], &c);
        half(&wi).cmp(&half(&wj)).then_with(|| {
            let s = dot(&cross(&wi, &wj), normal);
            if s.is_positive() {
                Ordering::Less
            } else if s.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Index into [`Polytope::halfspaces`] of the supporting half-space.
    pub halfspace: usize,
    /// Vertex indices, counterclockwise seen from outside.
    pub cycle: Vec<usize>,
}

/// Convex polytope with enumerated vertices and outward-oriented facets.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub halfspaces: Vec<HalfSpace>,
    pub vertices: Vec<Point>,
    pub facets: Vec<Facet>,
}

impl Polytope {
    pub fn from_halfspaces(halfspaces: Vec<HalfSpace>) -> Result<Self> {
        let vertices = enumerate_vertices(&halfspaces)?;
        let mut facets = Vec::new();
        if affine_rank(&vertices) == 4 {
            let mut seen = BTreeSet::new();
            for (h_idx, h) in halfspaces.iter().enumerate() {
                if !seen.insert(h.plane_key()) {
                    continue;
                }
                let mut tight: Vec<usize> = (0..vertices.len()).filter(|&v| h.is_tight(&vertices[v])).collect();
                let on_plane: Vec<Point> = tight.iter().map(|&v| vertices[v].clone()).collect();
                if affine_rank(&on_plane) < 3 {
                    continue;
                }
                order_cycle(&vertices, &mut tight, &h.normal);
                facets.push(Facet {
                    halfspace: h_idx,
                    cycle: tight,
                });
            }
        }
        Ok(Self {
            halfspaces,
            vertices,
            facets,
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.facets.is_empty()
    }

    /// Euclidean volume of the convex hull.
    pub fn euclidean_volume(&self) -> Rational {
        if self.is_degenerate() {
            return Rational::zero();
        }
        let r = centroid(self.vertices.iter());
        let mut six_v = Rational::zero();
        for facet in &self.facets {
            let base = sub(&self.vertices[facet.cycle[0]], &r);
            for w in facet.cycle[1..].windows(2) {
                let b = sub(&self.vertices[w[0]], &r);
                let c = sub(&self.vertices[w[1]], &r);
                six_v += det3(&base, &b, &c);
            }
        }
        debug_assert!(!six_v.is_negative(), "facets must be outward oriented");
        six_v / int(6)
    }
}

/// Hilbert–Schmidt volume as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactVolume {
    pub value: Rational,
}

impl ExactVolume {
    pub fn new(value: Rational) -> Self {
        debug_assert!(!value.is_negative());
        Self { value }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// `self / other`; `None` when `other` is zero.
    pub fn ratio(&self, other: &ExactVolume) -> Option<Rational> {
        (!other.value.is_zero()).then(|| &self.value / &other.value)
    }

    /// `[numerator, denominator]` in lowest terms.
    pub fn as_pair(&self) -> Result<[i64; 2]> {
        rational_pair(&self.value)
    }
}

impl fmt::Display for ExactVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn rational_pair(r: &Rational) -> Result<[i64; 2]> {
    let conv = |x: &BigInt| x.to_i64().ok_or_else(|| Error::IntegerOverflow(r.to_string()));
    Ok([conv(r.numer())?, conv(r.denom())?])
}

/// `dV = dλ1 dλ2 dλ3 / 8`.
pub fn volume(p: &Polytope) -> ExactVolume {
    ExactVolume::new(p.euclidean_volume() / int(8))
}

/// Convex pieces of a polytopal expression. Expressions with no bounded
/// conjunct (only TLG / PDIV) are intersected with the PT cube, the set of all
/// positive Pauli maps.
pub fn region_polytopes(expr: &RegionExpr) -> Result<Vec<Polytope>> {
    let mut pieces = halfspace_description(expr)?;
    if !expr.is_bounded() {
        let cube = halfspace_description(&RegionExpr::single(RegionId::Pt))?.remove(0);
        for piece in &mut pieces {
            piece.extend(cube.iter().cloned());
        }
    }
    pieces.into_iter().map(Polytope::from_halfspaces).collect()
}

/// Sum of piece volumes; pieces overlap only on measure-zero sets.
pub fn region_volume(expr: &RegionExpr) -> Result<ExactVolume> {
    let total = region_polytopes(expr)?
        .iter()
        .map(|p| volume(p).value)
        .fold(Rational::zero(), |acc, v| acc + v);
    Ok(ExactVolume::new(total))
}

/// Exact `V(num ∧ den) / V(den)`.
pub fn region_ratio(num: &RegionExpr, den: &RegionExpr) -> Result<Option<Rational>> {
    let joint = region_volume(&num.and(den))?;
    Ok(joint.ratio(&region_volume(den)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshHalfSpace {
    pub a: [i64; 3],
    pub b: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshPiece {
    /// Each coordinate as `[numerator, denominator]` in lowest terms.
    pub vertices: Vec<[[i64; 2]; 3]>,
    pub facets: Vec<Vec<usize>>,
    pub halfspaces: Vec<MeshHalfSpace>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mesh {
    pub region: String,
    pub pieces: Vec<MeshPiece>,
}

impl MeshPiece {
    /// Vertex as exact rationals.
    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i].map(|[n, d]| Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn halfspace(&self, i: usize) -> HalfSpace {
        let h = &self.halfspaces[i];
        HalfSpace::integer(h.a, h.b)
    }
}

pub fn mesh_export(expr: &RegionExpr) -> Result<Mesh> {
    let pieces = region_polytopes(expr)?
        .into_iter()
        .map(|p| {
            let vertices = p
                .vertices
                .iter()
                .map(|v| Ok([rational_pair(&v[0])?, rational_pair(&v[1])?, rational_pair(&v[2])?]))
                .collect::<Result<Vec<_>>>()?;
            let halfspaces = p
                .halfspaces
                .iter()
                .map(|h| {
                    let (a, b) = h.integer_form();
                    let conv = |x: &BigInt| x.to_i64().ok_or_else(|| Error::IntegerOverflow(x.to_string()));
                    Ok(MeshHalfSpace {
                        a: [conv(&a[0])?, conv(&a[1])?, conv(&a[2])?],
                        b: conv(&b)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MeshPiece {
                vertices,
                facets: p.facets.into_iter().map(|f| f.cycle).collect(),
                halfspaces,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mesh {
        region: expr.to_string(),
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> RegionExpr {
        s.parse().unwrap()
    }

    fn pt(x: [i64; 3]) -> Point {
        x.map(int)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn vertex_set(e: &str) -> BTreeSet<Point> {
        let pieces = region_polytopes(&expr(e)).unwrap();
        assert_eq!(pieces.len(), 1);
        pieces[0].vertices.iter().cloned().collect()
    }

    #[test]
    fn cpt_vertices() {
        let expected: BTreeSet<_> = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
            .map(pt)
            .into_iter()
            .collect();
        assert_eq!(vertex_set("CPT"), expected);
    }

    #[test]
    fn cube_vertices() {
        let v = vertex_set("PT");
        assert_eq!(v.len(), 8);
        assert!(v.iter().all(|p| p.iter().all(|c| c.abs() == Rational::one())));
    }

    #[test]
    fn bipyramid_vertices() {
        let expected: BTreeSet<_> = [[0, 0, 0], [1, 1, 1], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .map(pt)
            .into_iter()
            .collect();
        assert_eq!(vertex_set("CPT,TLG"), expected);
    }

    #[test]
    fn known_volumes() {
        let cases = [("CPT", q(1, 3)), ("PT", q(1, 1)), ("CPT,EBC", q(1, 6))];
        for (e, v) in cases {
            assert_eq!(region_volume(&expr(e)).unwrap().value, v, "{e}");
        }
    }

    #[test]
    fn derived_volumes() {
        let cases = [
            ("PT,TLG", q(1, 8)),
            ("CPT,TLG", q(1, 16)),
            ("CPT,PDIV", q(1, 4)),
            ("CPT,TLG,EBC", q(1, 48)),
            ("CPT,TLG,PDIV", q(1, 16)),
            ("TLG", q(1, 8)),
            ("PDIV", q(1, 2)),
            ("EBC", q(1, 6)),
        ];
        for (e, v) in cases {
            assert_eq!(region_volume(&expr(e)).unwrap().value, v, "{e}");
        }
    }

    #[test]
    fn cpdiv_is_rejected() {
        assert!(matches!(region_volume(&expr("CPT,CPDIV")), Err(Error::NonPolytopal(_))));
        assert!(matches!(mesh_export(&expr("CPDIV")), Err(Error::NonPolytopal(_))));
    }

    #[test]
    fn unbounded_system() {
        let hs = vec![
            HalfSpace::integer([-1, 0, 0], 0),
            HalfSpace::integer([0, -1, 0], 0),
            HalfSpace::integer([0, 0, -1], 0),
        ];
        assert_eq!(enumerate_vertices(&hs), Err(Error::UnboundedPolytope));
        assert_eq!(enumerate_vertices(&[]), Err(Error::UnboundedPolytope));
    }

    #[test]
    fn empty_system() {
        let mut hs = halfspace_description(&expr("PT")).unwrap().remove(0);
        hs.push(HalfSpace::integer([1, 1, 1], -4));
        assert!(enumerate_vertices(&hs).unwrap().is_empty());
        let p = Polytope::from_halfspaces(hs).unwrap();
        assert!(volume(&p).value.is_zero());
    }

    #[test]
    fn flat_polytope_has_zero_volume() {
        let mut hs = halfspace_description(&expr("PT")).unwrap().remove(0);
        hs.push(HalfSpace::integer([0, 0, 1], 0));
        hs.push(HalfSpace::integer([0, 0, -1], 0));
        let p = Polytope::from_halfspaces(hs).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert!(p.is_degenerate());
        assert!(volume(&p).value.is_zero());
    }

    #[test]
    fn zero_normal_rejected() {
        assert_eq!(HalfSpace::new(pt([0, 0, 0]), int(1)), Err(Error::ZeroNormal));
    }

    #[test]
    fn rational_vertices() {
        // Tetrahedron x,y,z ≥ 0, 2x + 2y + 2z ≤ 1 has vertices at 1/2.
        let hs = vec![
            HalfSpace::integer([-1, 0, 0], 0),
            HalfSpace::integer([0, -1, 0], 0),
            HalfSpace::integer([0, 0, -1], 0),
            HalfSpace::integer([2, 2, 2], 1),
        ];
        let p = Polytope::from_halfspaces(hs).unwrap();
        assert!(p.vertices.contains(&[q(1, 2), q(0, 1), q(0, 1)]));
        assert_eq!(p.euclidean_volume(), q(1, 48));
        assert_eq!(p.halfspaces[3].integer_form().1, BigInt::from(1));
    }

    #[test]
    fn duplicate_planes_give_one_facet() {
        let p = &region_polytopes(&expr("CPT,TLG,PDIV")).unwrap()[0];
        assert_eq!(p.facets.len(), 6);
        assert_eq!(volume(p).value, q(1, 16));
    }

    #[test]
    fn facets_lie_on_their_planes() {
        for e in ["PT", "CPT", "CPT,EBC", "CPT,TLG", "CPT,TLG,EBC", "CPT,PDIV", "EBC,TLG"] {
            for p in region_polytopes(&expr(e)).unwrap() {
                for f in &p.facets {
                    let h = &p.halfspaces[f.halfspace];
                    assert!(f.cycle.iter().all(|&v| h.is_tight(&p.vertices[v])), "{e}");
                }
            }
        }
    }

    #[test]
    fn mesh_examples() {
        let oct = mesh_export(&expr("CPT,EBC")).unwrap();
        assert_eq!(oct.pieces.len(), 1);
        let piece = &oct.pieces[0];
        assert_eq!(piece.vertices.len(), 6);
        assert_eq!(piece.facets.len(), 8);
        for v in 0..6 {
            let p = piece.vertex(v);
            let nonzero = p.iter().filter(|c| !c.is_zero()).count();
            assert_eq!(nonzero, 1);
            assert!(p.iter().all(|c| c.is_zero() || c.abs() == Rational::one()));
        }

        let tet = mesh_export(&expr("CPT")).unwrap();
        assert_eq!(tet.pieces[0].vertices.len(), 4);
        assert_eq!(tet.pieces[0].facets.len(), 4);
        assert!(tet.pieces[0].facets.iter().all(|f| f.len() == 3));

        let small = mesh_export(&expr("CPT,TLG,EBC")).unwrap();
        let got: BTreeSet<Point> = (0..small.pieces[0].vertices.len())
            .map(|i| small.pieces[0].vertex(i))
            .collect();
        let expected: BTreeSet<Point> = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .map(pt)
            .into_iter()
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn mesh_json_shape() {
        let json = serde_json::to_value(mesh_export(&expr("CPT")).unwrap()).unwrap();
        assert_eq!(json["region"], "CPT");
        assert_eq!(
            json["pieces"][0]["vertices"][0],
            serde_json::json!([[-1, 1], [-1, 1], [1, 1]])
        );
        assert_eq!(
            json["pieces"][0]["halfspaces"][0],
            serde_json::json!({"a": [-1, -1, -1], "b": 1})
        );
    }
}
