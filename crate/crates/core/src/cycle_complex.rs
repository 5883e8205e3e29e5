//! Basic 1-cycles supported in a multicurve, the membership conditions for
//! cells, and the cell `P_M` as a polytope with its face poset.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homalg::chain::{chain_homology, ChainComplex};
use crate::homalg::matrix::IntMatrix;
use crate::homalg::rational::{self, to_q, Q};
use crate::multicurve::{build_standard, check_conditions, DecompGraph, FamilyTag, Role};
use crate::report::Report;
use crate::symplectic::{transvection_matrix, Family, HVec, Splitting};

/// Curve-count limit for support enumeration.
pub const MAX_CURVES: usize = 24;
/// Curve-count limit for face enumeration, which walks all curve subsets.
pub const MAX_FACE_CURVES: usize = 20;

/// A nonnegative combination of curves representing `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneCycle {
    pub support: Vec<String>,
    #[serde(with = "crate::json::rat_vec")]
    pub coefficients: Vec<Q>,
    pub integral: bool,
    /// Positions of the support curves in the ambient multicurve.
    #[serde(skip)]
    pub indices: Vec<usize>,
}

impl OneCycle {
    /// Coefficient vector indexed by the ambient curves.
    pub fn coordinates(&self, n: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); n];
        for (i, c) in self.indices.iter().zip(&self.coefficients) {
            v[*i] = c.clone();
        }
        v
    }

    pub fn integer_coefficients(&self) -> Option<Vec<BigInt>> {
        self.coefficients
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

impl std::fmt::Display for OneCycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .support
            .iter()
            .zip(&self.coefficients)
            .map(|(id, c)| if c.is_one() { id.clone() } else { format!("{c}*{id}") })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn check_inputs(m: &DecompGraph, x: &[BigInt]) -> Result<()> {
    let r = m.validate();
    if !r.is_pass() {
        return Err(Error::Invalid(format!("invalid multicurve graph ({})", r.summary())));
    }
    if x.len() != m.dim() {
        return Err(Error::Dimension(format!("x has length {}, expected {}", x.len(), m.dim())));
    }
    if m.curves.len() > MAX_CURVES {
        return Err(Error::SizeLimit(format!("{} curves exceeds {MAX_CURVES}", m.curves.len())));
    }
    Ok(())
}

/// All basic 1-cycles for `x` supported in `m`, sorted by support position.
pub fn enumerate_basic_cycles(m: &DecompGraph, x: &[BigInt]) -> Result<Vec<OneCycle>> {
    check_inputs(m, x)?;
    let classes: Vec<Vec<Q>> = m.curves.iter().map(|c| to_q(&c.class)).collect();
    let target = to_q(x);
    let top = m.homology_rank();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    extend(&classes, &target, top, 0, &mut chosen, &mut out);
    out.sort_by(|a: &(Vec<usize>, Vec<Q>), b| a.0.cmp(&b.0));
    Ok(out
        .into_iter()
        .map(|(idx, coeffs)| OneCycle {
            support: idx.iter().map(|&i| m.curves[i].id.clone()).collect(),
            integral: coeffs.iter().all(|c| c.is_integer()),
            coefficients: coeffs,
            indices: idx,
        })
        .collect())
}

/// Depth-first walk over independent supports; dependent sets are never extended.
fn extend(
    classes: &[Vec<Q>],
    target: &[Q],
    top: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, Vec<Q>)>,
) {
    for j in start..classes.len() {
        chosen.push(j);
        let cols: Vec<Vec<Q>> = chosen.iter().map(|&i| classes[i].clone()).collect();
        if rational::rank(&cols) == chosen.len() {
            if let Some(l) = rational::solve_unique(&cols, target) {
                if l.iter().all(Signed::is_positive) {
                    out.push((chosen.clone(), l));
                }
            }
            if chosen.len() < top {
                extend(classes, target, top, j + 1, chosen, out);
            }
        }
        chosen.pop();
    }
}

/// Verdicts on the two conditions defining cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub basic_cycles: Vec<OneCycle>,
    /// Every curve lies in the support of a basic cycle.
    pub covered: bool,
    pub uncovered: Vec<String>,
    /// No nonnegative, nonzero combination of the curve classes vanishes.
    pub no_null_combination: bool,
    /// Primitive integer coefficients of a vanishing combination, when one exists.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_vec")]
    pub witness: Option<Vec<BigInt>>,
}

mod opt_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|w| w.iter().map(crate::json::Int).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        Ok(Option::<Vec<crate::json::OwnedInt>>::deserialize(d)?
            .map(|w| w.into_iter().map(|x| x.0).collect()))
    }
}

impl MembershipReport {
    pub fn passes(&self) -> bool {
        self.covered && self.no_null_combination
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.push(
            "every curve in a basic cycle",
            self.covered,
            format!("{} basic cycles; uncovered curves {:?}", self.basic_cycles.len(), self.uncovered),
        );
        r.push(
            "no nonnegative null combination",
            self.no_null_combination,
            match &self.witness {
                Some(w) => format!("vanishing combination {}", fmt_ints(w)),
                None => "infeasible over the rationals".to_string(),
            },
        );
        r
    }
}

fn fmt_ints(v: &[BigInt]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(","))
}

/// A nonzero `c ≥ 0` with `Σ cᵢ[γᵢ] = 0`, scaled to primitive integers.
pub fn null_combination(classes: &[HVec], dim: usize) -> Option<Vec<BigInt>> {
    if classes.is_empty() {
        return None;
    }
    let mut a: Vec<Vec<Q>> = (0..dim)
        .map(|i| classes.iter().map(|c| Q::from_integer(c[i].clone())).collect())
        .collect();
    a.push(vec![Q::one(); classes.len()]);
    let mut b = vec![Q::zero(); dim];
    b.push(Q::one());
    rational::feasible_nonneg(&a, &b).map(|c| rational::primitive_integer(&c))
}

pub fn check_membership(m: &DecompGraph, x: &[BigInt]) -> Result<MembershipReport> {
    let basic_cycles = enumerate_basic_cycles(m, x)?;
    let mut hit = vec![false; m.curves.len()];
    for c in &basic_cycles {
        for &i in &c.indices {
            hit[i] = true;
        }
    }
    let uncovered: Vec<String> = m
        .curves
        .iter()
        .zip(&hit)
        .filter(|(_, h)| !**h)
        .map(|(c, _)| c.id.clone())
        .collect();
    let classes: Vec<HVec> = m.curves.iter().map(|c| c.class.clone()).collect();
    let witness = null_combination(&classes, m.dim());
    Ok(MembershipReport {
        basic_cycles,
        covered: uncovered.is_empty(),
        uncovered,
        no_null_combination: witness.is_none(),
        witness,
    })
}

/// Rank of the affine span of the points.
pub fn affine_rank(points: &[Vec<Q>]) -> usize {
    affine_basis(points).len()
}

fn affine_basis(points: &[Vec<Q>]) -> Vec<Vec<Q>> {
    affine_frame(points).0
}

/// A basis of the affine span's direction space together with coordinates on
/// which that basis restricts to an invertible matrix.
fn affine_frame(points: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut basis: Vec<Vec<Q>> = Vec::new();
    let mut pivots = Vec::new();
    let Some(p0) = points.first() else {
        return (basis, pivots);
    };
    // Echelon rows of the span so far, each with its pivot column normalized to 1.
    let mut echelon: Vec<Vec<Q>> = Vec::new();
    for p in &points[1..] {
        let d: Vec<Q> = p.iter().zip(p0).map(|(a, b)| a - b).collect();
        let mut r = d.clone();
        for (c, row) in pivots.iter().zip(&echelon) {
            if !r[*c].is_zero() {
                let f = r[*c].clone();
                for (x, y) in r.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(c) = r.iter().position(|x| !x.is_zero()) {
            let inv = r[c].recip();
            for x in r.iter_mut() {
                *x *= &inv;
            }
            echelon.push(r);
            pivots.push(c);
            basis.push(d);
        }
    }
    (basis, pivots)
}

/// Determinant of the vectors restricted to the given coordinates.
fn restricted_det(vectors: &[&Vec<Q>], coords: &[usize]) -> Q {
    rational::det(vectors.iter().map(|v| coords.iter().map(|&c| v[c].clone()).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub curves: Vec<String>,
    /// Indices into the cell's vertex list.
    pub vertices: Vec<usize>,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPolytope {
    pub curves: Vec<String>,
    pub vertices: Vec<OneCycle>,
    pub dimension: usize,
    /// Every face, sorted by dimension and then by curve ids; the cell itself is last.
    pub faces: Vec<Face>,
    /// Number of faces in each dimension.
    pub chain_ranks: Vec<usize>,
}

/// Builds `P_M` with its faces and checks the dimension formula and contractibility.
pub fn build_cell(m: &DecompGraph, x: &[BigInt]) -> Result<CellPolytope> {
    let mem = check_membership(m, x)?;
    if !mem.passes() {
        return Err(Error::Refused(format!("multicurve fails membership: {}", mem.report().summary())));
    }
    if mem.basic_cycles.is_empty() {
        return Err(Error::Refused("no nonnegative cycle for x is supported here".into()));
    }
    let n = m.curves.len();
    if n > MAX_FACE_CURVES {
        return Err(Error::SizeLimit(format!("{n} curves exceeds {MAX_FACE_CURVES} for face enumeration")));
    }
    let points: Vec<Vec<Q>> = mem.basic_cycles.iter().map(|c| c.coordinates(n)).collect();
    let dimension = affine_rank(&points);
    let by_rank = n - m.homology_rank();
    let by_components = m.components.len() - 1;
    if dimension != by_rank || dimension != by_components {
        return Err(Error::Inconsistent(format!(
            "affine rank {dimension}, |M| - D(M) = {by_rank}, c(M) - 1 = {by_components}"
        )));
    }
    // A curve set is a face exactly when it is the union of the supports of the
    // vertices it contains.
    let masks: Vec<u64> = mem
        .basic_cycles
        .iter()
        .map(|c| c.indices.iter().fold(0u64, |acc, &i| acc | 1 << i))
        .collect();
    let mut faces = Vec::new();
    for set in 1u64..(1u64 << n) {
        let inside: Vec<usize> = (0..masks.len()).filter(|&v| masks[v] & !set == 0).collect();
        let union = inside.iter().fold(0u64, |acc, &v| acc | masks[v]);
        if union != set {
            continue;
        }
        let pts: Vec<Vec<Q>> = inside.iter().map(|&v| points[v].clone()).collect();
        faces.push(Face {
            curves: (0..n).filter(|i| set >> i & 1 == 1).map(|i| m.curves[i].id.clone()).collect(),
            vertices: inside,
            dimension: affine_rank(&pts),
        });
    }
    faces.sort_by(|a, b| (a.dimension, &a.curves).cmp(&(b.dimension, &b.curves)));
    let mut chain_ranks = vec![0; dimension + 1];
    for f in &faces {
        chain_ranks[f.dimension] += 1;
    }
    let cell = CellPolytope {
        curves: m.curves.iter().map(|c| c.id.clone()).collect(),
        vertices: mem.basic_cycles,
        dimension,
        faces,
        chain_ranks,
    };
    let h = chain_homology(&cell.chain_complex()?)?;
    let point = h.iter().enumerate().all(|(k, g)| {
        if k == 0 {
            g.free == 1 && g.torsion.is_empty()
        } else {
            g.is_zero()
        }
    });
    if !point {
        return Err(Error::Inconsistent(format!("closed cell has homology {h:?}")));
    }
    Ok(cell)
}

impl CellPolytope {
    fn points(&self) -> Vec<Vec<Q>> {
        let n = self.curves.len();
        self.vertices.iter().map(|c| c.coordinates(n)).collect()
    }

    /// Faces of dimension `d`, as indices into `faces`.
    pub fn faces_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.faces[i].dimension == d).collect()
    }

    pub fn face_by_curves(&self, curves: &[&str]) -> Option<&Face> {
        let mut want: Vec<String> = curves.iter().map(|s| s.to_string()).collect();
        want.sort();
        self.faces.iter().find(|f| {
            let mut have = f.curves.clone();
            have.sort();
            have == want
        })
    }

    /// Cellular chains of the closed cell.
    ///
    /// Each face is oriented by an ordered basis of its affine span; a facet's
    /// incidence is the sign of (outward vector, facet basis) in the face's basis.
    pub fn chain_complex(&self) -> Result<ChainComplex> {
        let points = self.points();
        let frames: Vec<(Vec<Vec<Q>>, Vec<usize>)> = self
            .faces
            .iter()
            .map(|f| affine_frame(&f.vertices.iter().map(|&v| points[v].clone()).collect::<Vec<_>>()))
            .collect();
        // Coordinates in a face's basis are its pivot coordinates times a fixed
        // invertible matrix, whose determinant sign is recorded here.
        let frame_signs: Vec<bool> = frames
            .iter()
            .map(|(b, piv)| restricted_det(&b.iter().collect::<Vec<_>>(), piv).is_positive())
            .collect();
        let pos: Vec<usize> = {
            let mut seen = BTreeMap::new();
            self.faces
                .iter()
                .map(|f| {
                    let e = seen.entry(f.dimension).or_insert(0usize);
                    *e += 1;
                    *e - 1
                })
                .collect()
        };
        let index: BTreeMap<&str, usize> = self.curves.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let masks: Vec<u64> = self
            .faces
            .iter()
            .map(|f| f.curves.iter().fold(0u64, |acc, c| acc | 1 << index[c.as_str()]))
            .collect();
        let mut maps = Vec::new();
        for d in 1..self.chain_ranks.len() {
            let mut mat = IntMatrix::zeros(self.chain_ranks[d - 1], self.chain_ranks[d]);
            let lower = self.faces_of_dim(d - 1);
            for fi in self.faces_of_dim(d) {
                let f = &self.faces[fi];
                for &gi in &lower {
                    let g = &self.faces[gi];
                    // Faces are determined by their curve sets, and inclusion of faces is inclusion of curves.
                    if masks[gi] & !masks[fi] != 0 {
                        continue;
                    }
                    let p = &points[g.vertices[0]];
                    let w = f
                        .vertices
                        .iter()
                        .find(|v| !g.vertices.contains(v))
                        .map(|&v| &points[v])
                        .ok_or_else(|| Error::Inconsistent("facet with all vertices of its face".into()))?;
                    let outward: Vec<Q> = p.iter().zip(w).map(|(a, b)| a - b).collect();
                    let mut cols = vec![&outward];
                    cols.extend(frames[gi].0.iter());
                    let det = restricted_det(&cols, &frames[fi].1);
                    if det.is_zero() {
                        return Err(Error::Inconsistent("facet leaves the span of its face".into()));
                    }
                    let sign = if det.is_positive() == frame_signs[fi] { 1 } else { -1 };
                    mat.set(pos[gi], pos[fi], BigInt::from(sign));
                }
            }
            maps.push(mat);
        }
        ChainComplex::new(self.chain_ranks.clone(), maps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeFacet {
    /// Coordinate index `i` (1-based) and the value of `tᵢ` on the facet.
    pub coordinate: usize,
    pub t: u8,
    pub curves: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeVertex {
    pub t: Vec<u8>,
    pub support: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeChart {
    pub dimension: usize,
    pub facets: Vec<CubeFacet>,
    pub vertices: Vec<CubeVertex>,
    pub checks: Report,
}

/// Cube coordinates on the cell of a standard chain: `tᵢ` moves weight from `αᵢ` to `α'ᵢ`.
pub fn cube_structure(n_graph: &DecompGraph, s: &Splitting) -> Result<CubeChart> {
    let tag = match s.family {
        Family::Full => FamilyTag::N,
        Family::Truncated(n) => FamilyTag::Nn(n),
    };
    let cond = check_conditions(n_graph, tag, s);
    if !cond.is_pass() {
        return Err(Error::Invalid(format!("not a standard chain for this splitting ({})", cond.summary())));
    }
    let d = match tag {
        FamilyTag::N => s.genus - 2,
        FamilyTag::Nn(n) => n,
        _ => unreachable!(),
    };
    let id = |r: Role| n_graph.by_role(r).map(|c| c.id.clone()).expect("conditions checked");
    let all: Vec<String> = n_graph.curves.iter().map(|c| c.id.clone()).collect();
    let without = |drop: &str| -> Vec<String> { all.iter().filter(|c| *c != drop).cloned().collect() };
    let mut facets = Vec::new();
    for i in 1..=d {
        facets.push(CubeFacet {
            coordinate: i,
            t: 0,
            curves: without(&id(Role::AlphaPrime(i))),
        });
        facets.push(CubeFacet {
            coordinate: i,
            t: 1,
            curves: without(&id(Role::Alpha(i))),
        });
    }
    let fixed: Vec<String> = match tag {
        FamilyTag::N => vec![id(Role::Alpha(0)), id(Role::Alpha(s.genus - 1))],
        _ => vec![id(Role::Alpha(0))],
    };
    let mut vertices = Vec::new();
    for bits in 0u64..(1u64 << d) {
        let t: Vec<u8> = (0..d).map(|i| (bits >> i & 1) as u8).collect();
        let mut support = fixed.clone();
        for (i, ti) in t.iter().enumerate() {
            support.push(id(if *ti == 0 { Role::Alpha(i + 1) } else { Role::AlphaPrime(i + 1) }));
        }
        support.sort();
        vertices.push(CubeVertex { t, support });
    }

    let mut checks = Report::new();
    let cell = build_cell(n_graph, &s.x)?;
    checks.push("cell dimension", cell.dimension == d, format!("cell {} vs cube {d}", cell.dimension));
    let mut cell_vertices: Vec<Vec<String>> = cell
        .vertices
        .iter()
        .map(|v| {
            let mut s = v.support.clone();
            s.sort();
            s
        })
        .collect();
    cell_vertices.sort();
    let mut cube_vertices: Vec<Vec<String>> = vertices.iter().map(|v| v.support.clone()).collect();
    cube_vertices.sort();
    checks.push(
        "vertex sets agree",
        cell_vertices == cube_vertices,
        format!("{} cell vertices, {} cube vertices", cell_vertices.len(), cube_vertices.len()),
    );
    let missing: Vec<String> = facets
        .iter()
        .filter(|f| {
            let ids: Vec<&str> = f.curves.iter().map(String::as_str).collect();
            cell.face_by_curves(&ids).map_or(true, |face| face.dimension + 1 != d)
        })
        .map(|f| format!("t{}={}", f.coordinate, f.t))
        .collect();
    checks.push(
        "facets are codimension-one faces",
        missing.is_empty(),
        format!("facets not found among the cell's faces {missing:?}"),
    );
    let facet_count = cell.faces_of_dim(d.saturating_sub(1)).len();
    checks.push(
        "no other facets",
        d == 0 || facet_count == 2 * d,
        format!("{facet_count} faces of dimension {}", d.saturating_sub(1)),
    );
    // The twist pair along βᵢ, βᵢ' acts on homology by T_b T_b^{-1}.
    let b = s.partners()?;
    let mut moved = Vec::new();
    let one = BigInt::one();
    for i in 1..=d {
        let pair = transvection_matrix(&b[i], &one)?.mul(&transvection_matrix(&b[i], &-&one)?)?;
        for c in &n_graph.curves {
            if pair.apply(&c.class) != c.class {
                moved.push(format!("pair {i} moves {}", c.id));
            }
        }
    }
    checks.push(
        "twist pairs fix curve classes",
        moved.is_empty(),
        if moved.is_empty() { "all classes fixed".to_string() } else { moved.join(", ") },
    );
    Ok(CubeChart {
        dimension: d,
        facets,
        vertices,
        checks,
    })
}

/// The standard chain together with its cube chart.
pub fn standard_cube(s: &Splitting) -> Result<(DecompGraph, CubeChart)> {
    let tag = match s.family {
        Family::Full => FamilyTag::N,
        Family::Truncated(n) => FamilyTag::Nn(n),
    };
    let gr = build_standard(tag, s, None)?;
    let chart = cube_structure(&gr, s)?;
    Ok((gr, chart))
}

/// Fixtures used by tests, the acceptance harness and the CLI examples.
pub mod fixtures {
    use super::*;
    use crate::homalg::lattice::vec_from_i64;
    use crate::multicurve::{Component, Curve};

    /// A genus-3 multicurve with three independent classes in five curves where a
    /// nonnegative combination of classes vanishes; `x = a₁ + a₂ + 2a₃`.
    pub fn dependent_five_curves() -> (DecompGraph, HVec) {
        let a1 = vec_from_i64(&[1, 0, 0, 0, 0, 0]);
        let a2 = vec_from_i64(&[0, 0, 1, 0, 0, 0]);
        let a3 = vec_from_i64(&[0, 0, 0, 0, 1, 0]);
        let s = |v: &[&HVec], c: &[i64]| -> HVec {
            (0..6)
                .map(|i| v.iter().zip(c).map(|(u, k)| &u[i] * BigInt::from(*k)).sum())
                .collect()
        };
        let g4 = s(&[&a1, &a2], &[-1, -1]);
        let g5 = s(&[&a1, &a2, &a3], &[1, 1, 1]);
        let x = s(&[&a1, &a2, &a3], &[1, 1, 2]);
        let other = Role::Other;
        let gr = DecompGraph::new(
            3,
            vec![Component::new("A", 0, 3), Component::new("B", 0, 4), Component::new("C", 0, 3)],
            vec![
                Curve::new("g1", a1, "A", "B", other),
                Curve::new("g2", a2, "A", "B", other),
                Curve::new("g3", a3, "C", "B", other),
                Curve::new("g4", g4, "A", "C", other),
                Curve::new("g5", g5, "B", "C", other),
            ],
        );
        (gr, x)
    }

    /// One nonseparating curve of class `x` on a genus-`g` surface.
    pub fn single_curve(g: usize, x: HVec) -> DecompGraph {
        DecompGraph::new(
            g,
            vec![Component::new("S", g - 1, 2)],
            vec![Curve::new("c", x, "S", "S", Role::Other)],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::lattice::vec_from_i64;

    fn std_full(g: usize, l: &[i64]) -> Splitting {
        let mut x = vec![BigInt::zero(); 2 * g];
        for (i, li) in l.iter().enumerate() {
            x[2 * i] = BigInt::from(*li);
        }
        Splitting::standard(g, Family::Full, x).unwrap()
    }

    fn supports(cs: &[OneCycle]) -> Vec<String> {
        cs.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn dependent_five_curve_example() {
        let (m, x) = fixtures::dependent_five_curves();
        assert!(m.is_valid(), "{:?}", m.validate());
        let cs = enumerate_basic_cycles(&m, &x).unwrap();
        assert_eq!(supports(&cs), vec!["g1 + g2 + 2*g3", "g3 + g5", "g4 + 2*g5"]);
        let mem = check_membership(&m, &x).unwrap();
        assert!(mem.covered);
        assert!(!mem.no_null_combination);
        let w: Vec<i64> = mem.witness.unwrap().iter().map(|v| v.try_into().unwrap()).collect();
        assert_eq!(w, vec![1, 1, 0, 1, 0]);
        assert!(matches!(build_cell(&m, &x), Err(Error::Refused(_))));
        let n = m.curves.len();
        let pts: Vec<Vec<Q>> = cs.iter().map(|c| c.coordinates(n)).collect();
        assert_eq!(affine_rank(&pts), 2);
    }

    #[test]
    fn standard_chain_genus_three() {
        let s = std_full(3, &[1, 1, 1]);
        let gr = build_standard(FamilyTag::N, &s, None).unwrap();
        let cs = enumerate_basic_cycles(&gr, &s.x).unwrap();
        assert_eq!(supports(&cs), vec!["alpha0 + alpha1 + alpha2", "alpha0 + alpha1' + alpha2"]);
        let mem = check_membership(&gr, &s.x).unwrap();
        assert!(mem.passes());
        let cell = build_cell(&gr, &s.x).unwrap();
        assert_eq!((cell.vertices.len(), cell.dimension), (2, 1));
        assert_eq!(cell.chain_ranks, vec![2, 1]);
        assert!(cell.face_by_curves(&["alpha0", "alpha1", "alpha2"]).is_some());
        assert!(cell.face_by_curves(&["alpha0", "alpha1'", "alpha2"]).is_some());
        let chart = cube_structure(&gr, &s).unwrap();
        assert!(chart.checks.is_pass(), "{}", chart.checks.summary());
        assert_eq!(chart.facets[0].curves, vec!["alpha0", "alpha1", "alpha2"]);
        assert_eq!(chart.facets[1].curves, vec!["alpha0", "alpha1'", "alpha2"]);
    }

    #[test]
    fn cells_of_standard_chains_are_cubes() {
        for g in 3..=6 {
            let l: Vec<i64> = (0..g as i64).map(|i| 1 + i % 3).collect();
            let s = std_full(g, &l);
            let (gr, chart) = standard_cube(&s).unwrap();
            assert!(chart.checks.is_pass(), "g={g}: {}", chart.checks.summary());
            let cell = build_cell(&gr, &s.x).unwrap();
            let d = g - 2;
            assert_eq!(cell.vertices.len(), 1 << d);
            // Faces of a d-cube: 3^d in total, C(d,k) 2^(d-k) in dimension k.
            assert_eq!(cell.faces.len(), 3usize.pow(d as u32));
            let chi: i64 = cell.chain_ranks.iter().enumerate().map(|(k, r)| if k % 2 == 0 { *r as i64 } else { -(*r as i64) }).sum();
            assert_eq!(chi, 1);
        }
        for (g, n) in [(4, 1), (5, 1), (5, 2), (6, 3)] {
            let mut x = vec![BigInt::zero(); 2 * g];
            for i in 0..=n {
                x[2 * i] = BigInt::from(1 + i as i64);
            }
            let s = Splitting::standard(g, Family::Truncated(n), x).unwrap();
            let (_, chart) = standard_cube(&s).unwrap();
            assert!(chart.checks.is_pass(), "g={g} n={n}: {}", chart.checks.summary());
            assert_eq!(chart.vertices.len(), 1 << n);
        }
    }

    #[test]
    fn trivial_cases() {
        let x = vec_from_i64(&[1, 0, 0, 0, 0, 0]);
        let m = fixtures::single_curve(3, x.clone());
        let mem = check_membership(&m, &x).unwrap();
        assert!(mem.passes());
        let cell = build_cell(&m, &x).unwrap();
        assert_eq!((cell.dimension, cell.vertices.len()), (0, 1));
        // Negative coordinate: the only solution has a negative coefficient.
        let neg = vec_from_i64(&[-1, 0, 0, 0, 0, 0]);
        assert!(enumerate_basic_cycles(&m, &neg).unwrap().is_empty());
    }

    #[test]
    fn json_shape() {
        let s = std_full(3, &[1, 1, 1]);
        let gr = build_standard(FamilyTag::N, &s, None).unwrap();
        let cell = build_cell(&gr, &s.x).unwrap();
        let v: serde_json::Value = serde_json::to_value(&cell).unwrap();
        assert_eq!(v["dimension"], 1);
        assert_eq!(v["vertices"][0]["coefficients"], serde_json::json!([1, 1, 1]));
        assert_eq!(v["faces"].as_array().unwrap().len(), 3);
    }
}
