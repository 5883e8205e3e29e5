//! Cartan–Leray E¹ pages assembled from orbit data with symbolic stabilizers,
//! orbit quotients of local cell data, stability certificates for vanishing
//! regions, stabilizers of supercells, and a chain-level check of how a
//! product class sits in the column filtration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cycle_complex::{build_cell, check_membership};
use crate::error::{Error, Result};
use crate::homalg::chain::ChainComplex;
use crate::homalg::double::{
    cubical_space, tensor_over_group, FixedFactor, PermCell, PermComplex, PermFace,
};
use crate::homalg::lattice::Lattice;
use crate::homalg::matrix::IntMatrix;
use crate::homalg::ring::{binomial, subsets, CubeModel};
use crate::homalg::sseq::{run_spectral_sequence, Limits};
use crate::multicurve::{perfectness_scan, DecompGraph, FamilyTag, Role, Side};
use crate::report::Report;
use crate::symplectic::{Family, HVec, Splitting};

/// Polynomial in the truncation parameter `t`; index `k` holds the coefficient of `tᵏ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly(pub Vec<u64>);

impl Poly {
    pub fn constant(c: u64) -> Poly {
        Poly(vec![c]).trimmed()
    }

    pub fn t() -> Poly {
        Poly(vec![0, 1])
    }

    fn trimmed(mut self) -> Poly {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n)
            .map(|i| self.0.get(i).unwrap_or(&0) + o.0.get(i).unwrap_or(&0))
            .collect())
        .trimmed()
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut out = vec![0u64; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    pub fn eval(&self, t: u64) -> u64 {
        self.0.iter().rev().fold(0, |acc, &c| acc * t + c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".into(),
                (1, c) => format!("{c}t"),
                (k, 1) => format!("t^{k}"),
                (k, c) => format!("{c}t^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StabilizerClass {
    Trivial,
    FreeAbelian { rank: usize },
    /// Product of free groups; `None` is a free group of infinite rank, read
    /// through its rank-`t` truncation.
    ProductOfFree { ranks: Vec<Option<usize>> },
    /// Only a bound on the cohomological dimension is known.
    Opaque { cd: usize },
}

/// `H_q` of a stabilizer: a rank polynomial, or only known to vanish above the cd bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contribution {
    Known(Poly),
    Bounded,
}

impl StabilizerClass {
    pub fn infinite_product(factors: usize) -> StabilizerClass {
        StabilizerClass::ProductOfFree {
            ranks: vec![None; factors],
        }
    }

    pub fn cd(&self) -> usize {
        match self {
            StabilizerClass::Trivial => 0,
            StabilizerClass::FreeAbelian { rank } => *rank,
            StabilizerClass::ProductOfFree { ranks } => ranks.iter().filter(|r| **r != Some(0)).count(),
            StabilizerClass::Opaque { cd } => *cd,
        }
    }

    pub fn is_opaque(&self) -> bool {
        matches!(self, StabilizerClass::Opaque { .. })
    }

    /// Coefficients in `z` of `Π (1 + mᵢ z)`, each a polynomial in `t`.
    fn product_series(ranks: &[Option<usize>]) -> Vec<Poly> {
        let mut acc = vec![Poly::constant(1)];
        for r in ranks {
            let m = match r {
                Some(m) => Poly::constant(*m as u64),
                None => Poly::t(),
            };
            let mut next = acc.clone();
            next.push(Poly::default());
            for k in 0..acc.len() {
                next[k + 1] = next[k + 1].add(&acc[k].mul(&m));
            }
            acc = next;
        }
        acc
    }

    pub fn homology(&self, q: usize) -> Contribution {
        match self {
            StabilizerClass::Trivial => Contribution::Known(Poly::constant((q == 0) as u64)),
            StabilizerClass::FreeAbelian { rank } => Contribution::Known(Poly::constant(binomial(*rank, q) as u64)),
            StabilizerClass::ProductOfFree { ranks } => Contribution::Known(
                StabilizerClass::product_series(ranks).get(q).cloned().unwrap_or_default(),
            ),
            StabilizerClass::Opaque { cd } => {
                if q > *cd {
                    Contribution::Known(Poly::default())
                } else {
                    Contribution::Bounded
                }
            }
        }
    }

    /// The finite group obtained by truncating every infinite-rank factor to rank `t`.
    pub fn truncated(&self, t: usize) -> Result<FixedFactor> {
        match self {
            StabilizerClass::Trivial => Ok(FixedFactor::Trivial),
            StabilizerClass::FreeAbelian { rank } => Ok(FixedFactor::FreeAbelian(*rank)),
            StabilizerClass::ProductOfFree { ranks } => {
                Ok(FixedFactor::ProductOfFree(ranks.iter().map(|r| r.unwrap_or(t)).collect()))
            }
            StabilizerClass::Opaque { cd } => {
                Err(Error::Unsupported(format!("opaque stabilizer (cd <= {cd}) has no finite model")))
            }
        }
    }
}

impl fmt::Display for StabilizerClass {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            StabilizerClass::Trivial => write!(f, "1"),
            StabilizerClass::FreeAbelian { rank } => write!(f, "Z^{rank}"),
            StabilizerClass::ProductOfFree { ranks } => {
                if ranks.is_empty() {
                    return write!(f, "1");
                }
                let parts: Vec<String> = ranks
                    .iter()
                    .map(|r| match r {
                        Some(m) => format!("F_{m}"),
                        None => "F_inf".into(),
                    })
                    .collect();
                write!(f, "{}", parts.join(" x "))
            }
            StabilizerClass::Opaque { cd } => write!(f, "opaque(cd <= {cd})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDescriptor {
    /// ℤⁿ permuting cells, times a factor acting trivially.
    Lattice { rank: usize, fixed: FixedFactor },
    Symbolic { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryTerm {
    pub orbit: usize,
    pub coef: i64,
    #[serde(default)]
    pub elt: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub p: usize,
    pub orbit: usize,
    pub stab: StabilizerClass,
    #[serde(default)]
    pub boundary: Vec<BoundaryTerm>,
    /// Stabilizer generators, for lattice groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stab_gens: Option<Vec<Vec<i64>>>,
    /// Curve ids of the cell's multicurve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multicurve: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantCellData {
    pub group: GroupDescriptor,
    pub cells: Vec<OrbitRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn lattice_of(n: usize, gens: &[Vec<i64>]) -> Lattice {
    let v: Vec<Vec<BigInt>> = gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect();
    Lattice::new(n, &v)
}

impl EquivariantCellData {
    pub fn dim(&self) -> usize {
        self.cells.iter().map(|c| c.p + 1).max().unwrap_or(0)
    }

    /// Records of degree `p`, ordered by orbit id.
    pub fn layer(&self, p: usize) -> Vec<&OrbitRecord> {
        let mut v: Vec<&OrbitRecord> = self.cells.iter().filter(|c| c.p == p).collect();
        v.sort_by_key(|c| c.orbit);
        v
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        (0..self.dim()).map(|p| self.layer(p).len()).collect()
    }

    /// The chain complex of the orbit space: boundary coefficients summed over group elements.
    pub fn orbit_complex(&self) -> Result<ChainComplex> {
        let sizes = self.layer_sizes();
        let mut maps = Vec::new();
        for p in 1..sizes.len() {
            let mut m = IntMatrix::zeros(sizes[p - 1], sizes[p]);
            for c in self.layer(p) {
                for t in &c.boundary {
                    m.add_to(t.orbit, c.orbit, &BigInt::from(t.coef));
                }
            }
            maps.push(m);
        }
        ChainComplex::new(sizes, maps)
    }

    pub fn validate(&self) -> Result<()> {
        let sizes = self.layer_sizes();
        for (p, &k) in sizes.iter().enumerate() {
            let ids: Vec<usize> = self.layer(p).iter().map(|c| c.orbit).collect();
            if ids != (0..k).collect::<Vec<_>>() {
                return Err(Error::Invalid(format!("orbit ids in degree {p} are not 0..{k}")));
            }
        }
        for c in &self.cells {
            if c.p == 0 && !c.boundary.is_empty() {
                return Err(Error::Invalid(format!("vertex orbit {} has a boundary", c.orbit)));
            }
            for t in &c.boundary {
                if c.p > 0 && t.orbit >= sizes[c.p - 1] {
                    return Err(Error::Invalid(format!(
                        "cell ({},{}) names missing face orbit {}",
                        c.p, c.orbit, t.orbit
                    )));
                }
            }
        }
        self.orbit_complex()?;
        if let GroupDescriptor::Lattice { rank, .. } = &self.group {
            let n = *rank;
            for c in &self.cells {
                let gens = c
                    .stab_gens
                    .as_ref()
                    .ok_or_else(|| Error::Invalid(format!("cell ({},{}) has no stabilizer generators", c.p, c.orbit)))?;
                if gens.iter().any(|g| g.len() != n) || c.boundary.iter().any(|t| t.elt.len() != n) {
                    return Err(Error::Dimension(format!("cell ({},{}): element length", c.p, c.orbit)));
                }
            }
            // The group is abelian, so conjugation does not move stabilizers.
            for c in &self.cells {
                let own = lattice_of(n, c.stab_gens.as_ref().expect("checked"));
                for t in &c.boundary {
                    let face = self.layer(c.p - 1)[t.orbit];
                    let fl = lattice_of(n, face.stab_gens.as_ref().expect("checked"));
                    if !fl.contains_lattice(&own) {
                        return Err(Error::Inconsistent(format!(
                            "stabilizer of cell ({},{}) is not inside that of its face {}",
                            c.p, c.orbit, t.orbit
                        )));
                    }
                }
            }
            self.to_perm_complex()?.validate()?;
        }
        Ok(())
    }

    pub fn from_perm_complex(c: &PermComplex) -> EquivariantCellData {
        let n = c.acting_rank;
        let mut cells = Vec::new();
        for (p, layer) in c.cells.iter().enumerate() {
            for (i, cell) in layer.iter().enumerate() {
                let r = lattice_of(n, &cell.stabilizer).rank();
                let stab = match &c.fixed {
                    FixedFactor::Trivial if r == 0 => StabilizerClass::Trivial,
                    FixedFactor::Trivial => StabilizerClass::FreeAbelian { rank: r },
                    FixedFactor::FreeAbelian(j) if r + j == 0 => StabilizerClass::Trivial,
                    FixedFactor::FreeAbelian(j) => StabilizerClass::FreeAbelian { rank: r + j },
                    FixedFactor::ProductOfFree(ms) => {
                        let mut ranks = vec![Some(1); r];
                        ranks.extend(ms.iter().map(|&m| Some(m)));
                        StabilizerClass::ProductOfFree { ranks }
                    }
                };
                cells.push(OrbitRecord {
                    p,
                    orbit: i,
                    stab,
                    boundary: cell
                        .boundary
                        .iter()
                        .map(|f| BoundaryTerm {
                            orbit: f.orbit,
                            coef: f.coef,
                            elt: f.elt.clone(),
                        })
                        .collect(),
                    stab_gens: Some(cell.stabilizer.clone()),
                    multicurve: None,
                });
            }
        }
        EquivariantCellData {
            group: GroupDescriptor::Lattice {
                rank: n,
                fixed: c.fixed.clone(),
            },
            cells,
            notes: Vec::new(),
        }
    }

    pub fn to_perm_complex(&self) -> Result<PermComplex> {
        let GroupDescriptor::Lattice { rank, fixed } = &self.group else {
            return Err(Error::Unsupported("only lattice groups expand to a permutation complex".into()));
        };
        let cells = (0..self.dim())
            .map(|p| {
                self.layer(p)
                    .into_iter()
                    .map(|c| {
                        Ok(PermCell {
                            stabilizer: c
                                .stab_gens
                                .clone()
                                .ok_or_else(|| Error::Invalid("missing stabilizer generators".into()))?,
                            boundary: c
                                .boundary
                                .iter()
                                .map(|t| PermFace {
                                    orbit: t.orbit,
                                    coef: t.coef,
                                    elt: if t.elt.is_empty() { vec![0; *rank] } else { t.elt.clone() },
                                })
                                .collect(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PermComplex {
            acting_rank: *rank,
            fixed: fixed.clone(),
            cells,
        })
    }

    pub fn from_json(text: &str) -> Result<EquivariantCellData> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("cell data: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// The orbit-space chain complex `C_*(Y/G)` of a permutation complex.
pub fn orbit_chain_complex(c: &PermComplex) -> Result<ChainComplex> {
    EquivariantCellData::from_perm_complex(c).orbit_complex()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Entry {
    pub p: usize,
    pub q: usize,
    pub poly: Poly,
    /// `poly` evaluated at the grid's truncation.
    pub rank: u64,
    /// Number of opaque stabilizers contributing an unknown group.
    pub bounded: usize,
}

impl E1Entry {
    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.bounded == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Grid {
    pub t: u64,
    pub p_len: usize,
    pub q_len: usize,
    pub entries: Vec<E1Entry>,
}

impl E1Grid {
    pub fn entry(&self, p: usize, q: usize) -> Option<&E1Entry> {
        if p < self.p_len && q < self.q_len {
            Some(&self.entries[p * self.q_len + q])
        } else {
            None
        }
    }

    pub fn poly(&self, p: usize, q: usize) -> Result<Poly> {
        match self.entry(p, q) {
            None => Ok(Poly::default()),
            Some(e) if e.bounded > 0 => Err(Error::Unsupported(format!(
                "E1({p},{q}) has an opaque stabilizer and is only bounded"
            ))),
            Some(e) => Ok(e.poly.clone()),
        }
    }

    pub fn rank(&self, p: usize, q: usize) -> Result<u64> {
        Ok(self.poly(p, q)?.eval(self.t))
    }

    /// Positions that are nonzero or only bounded.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.entries.iter().filter(|e| !e.is_zero()).map(|e| (e.p, e.q)).collect()
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for q in (0..self.q_len).rev() {
            let row: Vec<String> = (0..self.p_len)
                .map(|p| {
                    let e = self.entry(p, q).expect("in range");
                    match (e.bounded, e.poly.is_zero()) {
                        (0, true) => ".".into(),
                        (0, false) => e.poly.to_string(),
                        (_, true) => "?".into(),
                        (_, false) => format!("{}+?", e.poly),
                    }
                })
                .collect();
            out.push_str(&format!("q={q:<2} | {}\n", row.join("\t")));
        }
        out
    }
}

/// `E¹_{p,q} = ⊕ H_q(Stab σ)` over degree-`p` orbit representatives σ, with
/// infinite free factors read at truncation `t`.
pub fn assemble_e1(data: &EquivariantCellData, t: u64) -> E1Grid {
    let p_len = data.dim();
    let q_len = data.cells.iter().map(|c| c.stab.cd() + 1).max().unwrap_or(1);
    let mut entries = Vec::with_capacity(p_len * q_len);
    for p in 0..p_len {
        let layer = data.layer(p);
        for q in 0..q_len {
            let mut poly = Poly::default();
            let mut bounded = 0;
            for c in &layer {
                match c.stab.homology(q) {
                    Contribution::Known(h) => poly = poly.add(&h),
                    Contribution::Bounded => bounded += 1,
                }
            }
            entries.push(E1Entry {
                p,
                q,
                rank: poly.eval(t),
                poly,
                bounded,
            });
        }
    }
    E1Grid {
        t,
        p_len,
        q_len,
        entries,
    }
}

/// Compares the closed-form E¹ page with the spectral sequence of the expanded double complex.
pub fn check_against_sseq(data: &EquivariantCellData, model: CubeModel) -> Result<Report> {
    let c = data.to_perm_complex()?;
    let b = tensor_over_group(&c, model)?;
    let run = run_spectral_sequence(&b, &Limits::default())?;
    let grid = assemble_e1(data, 0);
    let mut bad = Vec::new();
    let p_len = grid.p_len.max(b.p_len());
    let q_len = grid.q_len.max(b.q_len());
    for p in 0..p_len {
        for q in 0..q_len {
            let want = grid.rank(p, q)?;
            let got = if p < b.p_len() && q < b.q_len() {
                run.e(1, p, q)
            } else {
                crate::homalg::chain::AbGroup::zero()
            };
            if got.free as u64 != want || !got.torsion.is_empty() {
                bad.push(format!("({p},{q}): closed form {want}, computed {got}"));
            }
        }
    }
    let mut r = Report::new();
    r.push(
        "closed form matches computed E1",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{p_len}x{q_len} entries agree")
        } else {
            bad.join("; ")
        },
    );
    Ok(r)
}

/// A one-orbit complex whose only cell has the truncated stabilizer, for Künneth comparisons.
pub fn expanded_point(stab: &StabilizerClass, t: usize) -> Result<PermComplex> {
    Ok(PermComplex {
        acting_rank: 0,
        fixed: stab.truncated(t)?,
        cells: vec![vec![PermCell {
            stabilizer: Vec::new(),
            boundary: Vec::new(),
        }]],
    })
}

/// The orbit of chains containing a chosen multicurve N.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPattern {
    pub tag: FamilyTag,
    #[serde(with = "crate::json::vec")]
    pub x: HVec,
    pub n_curves: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupercellStabilizer {
    pub class: StabilizerClass,
    /// Cell dimension of M.
    pub m: usize,
    /// For the chain family: the pieces Yᵢ holding no extra curve, one free factor each.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_pieces: Option<Vec<usize>>,
    /// Extra curves of M with the piece of N they lie in.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<(String, usize)>,
}

/// Indices in `m` of the curves of `n`, after checking that `n` is a submulticurve of `m`
/// with the same cut-surface shape.
fn containment(n: &DecompGraph, m: &DecompGraph) -> Result<Vec<usize>> {
    if n.genus != m.genus {
        return Err(Error::Invalid("genus mismatch".into()));
    }
    let idx: Vec<usize> = n
        .curves
        .iter()
        .map(|c| {
            let k = m
                .curve_index(&c.id)
                .ok_or_else(|| Error::Invalid(format!("curve {} of N is not in M", c.id)))?;
            if m.curves[k].class != c.class {
                return Err(Error::Invalid(format!("curve {} has a different class in M", c.id)));
            }
            Ok(k)
        })
        .collect::<Result<_>>()?;
    let sub = m.submulticurve(&idx);
    let mut fwd: BTreeMap<&str, &str> = BTreeMap::new();
    let mut back: BTreeMap<&str, &str> = BTreeMap::new();
    for (c, s) in n.curves.iter().zip(&sub.curves) {
        for (a, b) in [(c.left.as_str(), s.left.as_str()), (c.right.as_str(), s.right.as_str())] {
            let ok = fwd.insert(a, b).map_or(true, |old| old == b) && back.insert(b, a).map_or(true, |old| old == a);
            if !ok {
                return Err(Error::Invalid(format!(
                    "curve {} bounds different pieces in N and in M",
                    c.id
                )));
            }
        }
    }
    for comp in &n.components {
        let Some(&img) = fwd.get(comp.id.as_str()) else {
            continue;
        };
        let other = sub.component(img).expect("image exists");
        if other.genus != comp.genus || other.punctures != comp.punctures {
            return Err(Error::Invalid(format!("piece {} of N has a different shape in M", comp.id)));
        }
    }
    if fwd.len() != n.components.len() || sub.components.len() != n.components.len() {
        return Err(Error::Invalid("N and M cut the surface into different pieces".into()));
    }
    Ok(idx)
}

/// The general bound `cd ≤ 3g − 5 − m − bp(M)` for a cell P_M.
pub fn stabilizer_bound(m: &DecompGraph) -> Result<StabilizerClass> {
    let inv = m.invariants()?;
    let top = 3 * m.genus as i64 - 5;
    let cd = top - inv.dimension as i64 - inv.bp as i64;
    if cd < 0 {
        return Err(Error::Inconsistent(format!(
            "dimension {} and bp {} exceed 3g-5 = {top}",
            inv.dimension, inv.bp
        )));
    }
    Ok(StabilizerClass::Opaque { cd: cd as usize })
}

/// The stabilizer in `H_N` of a cell `P_M` with `N ⊆ M`.
///
/// In the chain family every extra curve of M sits in its own piece Yᵢ of N,
/// and the free factor generated by twists in each remaining piece survives.
pub fn stabilizer_of_supercell(
    tag: FamilyTag,
    n: &DecompGraph,
    m: &DecompGraph,
    x: &[BigInt],
) -> Result<SupercellStabilizer> {
    m.require_valid()?;
    let idx = containment(n, m)?;
    let mem = check_membership(m, x)?;
    if !mem.passes() || mem.basic_cycles.is_empty() {
        return Err(Error::Refused(format!("M does not give a cell: {}", mem.report().summary())));
    }
    let g = m.genus;
    let dim = m.components.len() - 1;
    if dim + m.homology_rank() != m.curves.len() {
        return Err(Error::Inconsistent("|M| - D(M) differs from c(M) - 1".into()));
    }
    match tag {
        FamilyTag::N => {
            let piece_of: Vec<(usize, String)> = (1..g)
                .map(|i| {
                    let c = n
                        .by_role(Role::Alpha(i))
                        .ok_or_else(|| Error::Invalid(format!("N has no curve alpha{i}")))?;
                    Ok((i, c.left.clone()))
                })
                .collect::<Result<_>>()?;
            if m.curves.len() != dim + g {
                return Err(Error::Inconsistent(format!(
                    "|M| = {} but m + g = {}",
                    m.curves.len(),
                    dim + g
                )));
            }
            let comp_map = m.component_map(&idx);
            let n_sub = m.submulticurve(&idx);
            let keep: BTreeSet<usize> = idx.iter().copied().collect();
            let mut extra = Vec::new();
            let mut used = BTreeSet::new();
            for (k, c) in m.curves.iter().enumerate() {
                if keep.contains(&k) {
                    continue;
                }
                let merged = &comp_map[m.comp_index(&c.left).expect("valid")];
                // Translate the merged piece back to N's naming through a shared curve side.
                let n_piece = n_sub
                    .curves
                    .iter()
                    .zip(&n.curves)
                    .find_map(|(s, orig)| {
                        if &s.left == merged {
                            Some(orig.left.clone())
                        } else if &s.right == merged {
                            Some(orig.right.clone())
                        } else {
                            None
                        }
                    })
                    .ok_or_else(|| Error::Inconsistent(format!("curve {} lies in no piece of N", c.id)))?;
                let i = piece_of
                    .iter()
                    .find(|(_, y)| *y == n_piece)
                    .map(|(i, _)| *i)
                    .ok_or_else(|| Error::Inconsistent(format!("piece {n_piece} is not a Y piece")))?;
                if !used.insert(i) {
                    return Err(Error::Inconsistent(format!("two extra curves in piece Y{i}")));
                }
                extra.push((c.id.clone(), i));
            }
            let free: Vec<usize> = (1..g).filter(|i| !used.contains(i)).collect();
            if free.len() + dim != 2 * g - 3 {
                return Err(Error::Inconsistent(format!(
                    "{} surviving factors with m = {dim}, expected 2g-3-m",
                    free.len()
                )));
            }
            Ok(SupercellStabilizer {
                class: StabilizerClass::infinite_product(free.len()),
                m: dim,
                free_pieces: Some(free),
                extra,
            })
        }
        FamilyTag::Nn(k) => {
            let cd = (3 * g) as i64 - 5 - dim as i64 - k as i64;
            if cd < 0 {
                return Err(Error::Inconsistent(format!("m = {dim} exceeds 3g-5-n")));
            }
            Ok(SupercellStabilizer {
                class: StabilizerClass::Opaque { cd: cd as usize },
                m: dim,
                free_pieces: None,
                extra: Vec::new(),
            })
        }
        _ => Ok(SupercellStabilizer {
            class: stabilizer_bound(m)?,
            m: dim,
            free_pieces: None,
            extra: Vec::new(),
        }),
    }
}

/// Members of the pattern's orbit inside the multicurve `sub`.
fn orbit_members(sub: &DecompGraph, pattern: &OrbitPattern, a_seq: &[HVec]) -> Result<Vec<Vec<String>>> {
    let mut rev = a_seq.to_vec();
    rev.reverse();
    Ok(perfectness_scan(sub, pattern.tag, &pattern.x)?
        .into_iter()
        .filter(|s| s.a_sequence == a_seq || s.a_sequence == rev)
        .map(|s| s.curves)
        .collect())
}

/// Passes from local cell data to the complex of cells containing the chosen N.
///
/// Cells with no member of the orbit are killed, cells not containing N are
/// dropped, and stabilizers become stabilizers in `H_N`.
pub fn quotient_by_orbit(
    data: &EquivariantCellData,
    ambient: &DecompGraph,
    pattern: &OrbitPattern,
) -> Result<EquivariantCellData> {
    let ids: Vec<&str> = pattern.n_curves.iter().map(String::as_str).collect();
    let n_plain = ambient.submulticurve_by_ids(&ids)?;
    let sel = perfectness_scan(&n_plain, pattern.tag, &pattern.x)?;
    let [chosen] = sel.as_slice() else {
        return Err(Error::Invalid(format!(
            "chosen curves match the chain pattern {} times, expected once",
            sel.len()
        )));
    };
    let mut n_graph = n_plain.clone();
    for (role, id) in &chosen.labels {
        let k = n_graph.curve_index(id).expect("selected from this graph");
        n_graph.curves[k].role = role.parse()?;
    }
    let n_set: BTreeSet<&str> = ids.iter().copied().collect();
    let mut kept: Vec<(usize, usize, StabilizerClass)> = Vec::new();
    for c in &data.cells {
        let curves = c
            .multicurve
            .as_ref()
            .ok_or_else(|| Error::Invalid(format!("cell ({},{}) has no multicurve", c.p, c.orbit)))?;
        let cur: Vec<&str> = curves.iter().map(String::as_str).collect();
        let sub = ambient.submulticurve_by_ids(&cur)?;
        let members = orbit_members(&sub, pattern, &chosen.a_sequence)?;
        if members.len() > 1 {
            return Err(Error::Refused(format!(
                "pattern is not perfect: cell ({},{}) contains {} members",
                c.p,
                c.orbit,
                members.len()
            )));
        }
        if members.is_empty() || !n_set.iter().all(|id| cur.contains(id)) {
            continue;
        }
        let st = stabilizer_of_supercell(pattern.tag, &n_graph, &sub, &pattern.x)?;
        kept.push((c.p, c.orbit, st.class));
    }
    let mut renum: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut sorted = kept.clone();
    sorted.sort_by_key(|k| (k.0, k.1));
    for (p, o, _) in &sorted {
        let next = renum.keys().filter(|(q, _)| q == p).count();
        renum.insert((*p, *o), next);
    }
    let cells = sorted
        .into_iter()
        .map(|(p, o, stab)| {
            let src = data.cells.iter().find(|c| c.p == p && c.orbit == o).expect("kept from data");
            OrbitRecord {
                p,
                orbit: renum[&(p, o)],
                stab,
                boundary: src
                    .boundary
                    .iter()
                    .filter_map(|t| {
                        renum.get(&(p - 1, t.orbit)).map(|&k| BoundaryTerm {
                            orbit: k,
                            coef: t.coef,
                            elt: t.elt.clone(),
                        })
                    })
                    .collect(),
                stab_gens: None,
                multicurve: src.multicurve.clone(),
            }
        })
        .collect::<Vec<_>>();
    // Degrees below the lowest kept cell become empty; shift nothing, keep p as is.
    let mut out = EquivariantCellData {
        group: GroupDescriptor::Symbolic {
            name: format!("H_N for N = {{{}}}", pattern.n_curves.join(", ")),
        },
        cells,
        notes: data.notes.clone(),
    };
    out.notes.push(
        "stabilizers are taken in H_N = Stab(N)/BP(N); BP(N) acts trivially on the quotient complex".into(),
    );
    out.notes.push(format!(
        "pattern perfect on all {} input cells; {} cells contain N",
        data.cells.len(),
        out.cells.len()
    ));
    out.validate_sparse()?;
    Ok(out)
}

impl EquivariantCellData {
    /// Like `validate`, but degrees may be empty below the lowest cell.
    fn validate_sparse(&self) -> Result<()> {
        for p in 0..self.dim() {
            let ids: Vec<usize> = self.layer(p).iter().map(|c| c.orbit).collect();
            if ids != (0..ids.len()).collect::<Vec<_>>() {
                return Err(Error::Invalid(format!("orbit ids in degree {p} are not contiguous")));
            }
        }
        self.orbit_complex().map(|_| ())
    }
}

/// Local cell data around `P_N` for a standard chain: the faces of `P_M`,
/// where M adds one curve of class `a_{i-1} + a_i` inside each listed piece Yᵢ.
pub fn family_star(tag: FamilyTag, s: &Splitting, extra: &[usize]) -> Result<(DecompGraph, EquivariantCellData)> {
    let top = match tag {
        FamilyTag::N => s.genus - 1,
        FamilyTag::Nn(n) => n,
        _ => return Err(Error::Unsupported("stars are built for the chain families".into())),
    };
    let mut m = crate::multicurve::build_standard(tag, s, None)?;
    for &i in extra {
        if i == 0 || i > top {
            return Err(Error::Invalid(format!("no four-holed piece Y{i}")));
        }
        let prev = if i == 1 {
            "alpha0".to_string()
        } else {
            Role::AlphaPrime(i - 1).to_string()
        };
        let to_a = vec![(Role::Alpha(i).to_string(), Side::Left), (prev, Side::Left)];
        let y = format!("Y{i}");
        m = m.split_component(&y, &to_a, 0, &format!("eps{i}"), (&format!("{y}a"), &format!("{y}b")))?;
    }
    let cell = build_cell(&m, &s.x)?;
    let cx = cell.chain_complex()?;
    let mut pos = vec![0usize; cell.faces.len()];
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, f) in cell.faces.iter().enumerate() {
        let e = seen.entry(f.dimension).or_insert(0);
        pos[i] = *e;
        *e += 1;
    }
    let mut cells = Vec::new();
    for (i, f) in cell.faces.iter().enumerate() {
        let ids: Vec<&str> = f.curves.iter().map(String::as_str).collect();
        let sub = m.submulticurve_by_ids(&ids)?;
        let boundary = if f.dimension == 0 {
            Vec::new()
        } else {
            let d = cx.d(f.dimension);
            (0..d.rows())
                .filter_map(|r| {
                    let v = d.get(r, pos[i]);
                    (!v.is_zero()).then(|| BoundaryTerm {
                        orbit: r,
                        coef: if v.is_positive() { 1 } else { -1 },
                        elt: Vec::new(),
                    })
                })
                .collect()
        };
        cells.push(OrbitRecord {
            p: f.dimension,
            orbit: pos[i],
            stab: stabilizer_bound(&sub)?,
            boundary,
            stab_gens: None,
            multicurve: Some(f.curves.clone()),
        });
    }
    let data = EquivariantCellData {
        group: GroupDescriptor::Symbolic { name: "Torelli".into() },
        cells,
        notes: Vec::new(),
    };
    data.validate()?;
    Ok((m, data))
}

/// A closed half-plane `a·p + b·q ≥ c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl HalfPlane {
    /// Normalized so that `gcd(a, b) = 1`; the bound rounds up since `p, q` are integers.
    pub fn new(a: i64, b: i64, c: i64) -> Result<HalfPlane> {
        let g = a.gcd(&b);
        if g == 0 {
            return Err(Error::Invalid("half-plane with no p or q term".into()));
        }
        Ok(HalfPlane {
            a: a / g,
            b: b / g,
            c: Integer::div_ceil(&c, &g),
        })
    }

    pub fn contains(&self, p: i64, q: i64) -> bool {
        self.a * p + self.b * q >= self.c
    }
}

fn linear_form(a: i64, b: i64) -> String {
    let mut out = String::new();
    for (k, v) in [(a, "p"), (b, "q")] {
        if k == 0 {
            continue;
        }
        let mag = if k.abs() == 1 { v.to_string() } else { format!("{}{v}", k.abs()) };
        if out.is_empty() {
            out = if k < 0 { format!("-{mag}") } else { mag };
        } else {
            out.push_str(if k < 0 { " - " } else { " + " });
            out.push_str(&mag);
        }
    }
    out
}

impl fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.a <= 0 && self.b <= 0 {
            write!(f, "{} <= {}", linear_form(-self.a, -self.b), -self.c)
        } else {
            write!(f, "{} >= {}", linear_form(self.a, self.b), self.c)
        }
    }
}

/// Union of half-planes where E¹ is known to vanish.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingRegion {
    pub clauses: Vec<HalfPlane>,
}

impl VanishingRegion {
    pub fn new(mut clauses: Vec<HalfPlane>) -> VanishingRegion {
        clauses.sort();
        clauses.dedup();
        VanishingRegion { clauses }
    }

    /// `p < g−2` or `p + q > 2g−3`.
    pub fn full_family(g: usize) -> VanishingRegion {
        let g = g as i64;
        VanishingRegion::new(vec![
            HalfPlane::new(-1, 0, 3 - g).expect("nonzero"),
            HalfPlane::new(1, 1, 2 * g - 2).expect("nonzero"),
        ])
    }

    /// `p < n` or `p + q > 3g−5−n`.
    pub fn truncated_family(g: usize, n: usize) -> VanishingRegion {
        let (g, n) = (g as i64, n as i64);
        VanishingRegion::new(vec![
            HalfPlane::new(-1, 0, 1 - n).expect("nonzero"),
            HalfPlane::new(1, 1, 3 * g - 4 - n).expect("nonzero"),
        ])
    }

    /// The index of the first clause containing `(p, q)`.
    pub fn covering(&self, p: i64, q: i64) -> Option<usize> {
        self.clauses.iter().position(|h| h.contains(p, q))
    }

    pub fn contains(&self, p: i64, q: i64) -> bool {
        self.covering(p, q).is_some()
    }
}

impl fmt::Display for VanishingRegion {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let parts: Vec<String> = self.clauses.iter().map(|h| h.to_string()).collect();
        write!(f, "{}", if parts.is_empty() { "(empty)".into() } else { parts.join(" | ") })
    }
}

/// Parses a linear expression in `p` and `q` into `(coef p, coef q, constant)`.
fn parse_linear(s: &str) -> Result<(i64, i64, i64)> {
    let bad = || Error::Parse(format!("bad linear expression {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in t.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let (mut a, mut b, mut c) = (0i64, 0i64, 0i64);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, term.strip_prefix('+').unwrap_or(&term)),
        };
        let (num, var) = match body.chars().last() {
            Some(v @ ('p' | 'q')) => (body[..body.len() - 1].trim_end_matches('*'), Some(v)),
            _ => (body, None),
        };
        let k: i64 = if num.is_empty() {
            if var.is_none() {
                return Err(bad());
            }
            1
        } else {
            num.parse().map_err(|_| bad())?
        };
        match var {
            Some('p') => a += sign * k,
            Some('q') => b += sign * k,
            _ => c += sign * k,
        }
    }
    Ok((a, b, c))
}

impl FromStr for HalfPlane {
    type Err = Error;
    fn from_str(s: &str) -> Result<HalfPlane> {
        let s = s.replace('≤', "<=").replace('≥', ">=");
        let ops = ["<=", ">=", "<", ">"];
        let (i, op) = ops
            .iter()
            .filter_map(|op| s.find(op).map(|i| (i, *op)))
            .min_by_key(|(i, op)| (*i, std::cmp::Reverse(op.len())))
            .ok_or_else(|| Error::Parse(format!("no comparison in {s:?}")))?;
        let (la, lb, lc) = parse_linear(&s[..i])?;
        let (ra, rb, rc) = parse_linear(&s[i + op.len()..])?;
        // (a p + b q + k) op 0 with k moved across.
        let (a, b, k) = (la - ra, lb - rb, lc - rc);
        match op {
            ">=" => HalfPlane::new(a, b, -k),
            ">" => HalfPlane::new(a, b, -k + 1),
            "<=" => HalfPlane::new(-a, -b, k),
            _ => HalfPlane::new(-a, -b, k + 1),
        }
    }
}

impl FromStr for VanishingRegion {
    type Err = Error;
    fn from_str(s: &str) -> Result<VanishingRegion> {
        if s.trim().is_empty() {
            return Ok(VanishingRegion::default());
        }
        Ok(VanishingRegion::new(
            s.split(['|', ',', ';']).map(|c| c.trim().parse()).collect::<Result<_>>()?,
        ))
    }
}

/// Why a grid position is known to be zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "by")]
pub enum Cover {
    NegativeP,
    NegativeQ,
    Region { clause: usize },
    Uncovered,
}

impl Cover {
    fn of(region: &VanishingRegion, p: i64, q: i64) -> Cover {
        if p < 0 {
            Cover::NegativeP
        } else if q < 0 {
            Cover::NegativeQ
        } else {
            region
                .covering(p, q)
                .map_or(Cover::Uncovered, |clause| Cover::Region { clause })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepVerdict {
    pub r: usize,
    pub out_target: (i64, i64),
    pub out_cover: Cover,
    pub in_source: (i64, i64),
    pub in_cover: Cover,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Uncovered {
    pub r: usize,
    pub position: (i64, i64),
    /// `"out-target"` or `"in-source"`.
    pub direction: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub entry: (usize, usize),
    pub region: Vec<String>,
    pub certified: bool,
    pub steps: Vec<StepVerdict>,
    pub r_max: usize,
    pub tail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_uncovered: Option<Uncovered>,
}

/// Checks that every `d^r` into and out of `(p₀, q₀)` has a zero source or target.
///
/// `d^r` has bidegree `(−r, r−1)`. For `r > max(p₀, q₀+1)` the out-target has
/// `p < 0` and the in-source has `q < 0`, so finitely many steps decide.
pub fn certify_stable(region: &VanishingRegion, entry: (usize, usize)) -> StabilityCertificate {
    let (p0, q0) = (entry.0 as i64, entry.1 as i64);
    let r_max = entry.0.max(entry.1 + 1);
    let mut steps = Vec::new();
    let mut first_uncovered = None;
    for r in 1..=r_max {
        let ri = r as i64;
        let out_target = (p0 - ri, q0 + ri - 1);
        let in_source = (p0 + ri, q0 - ri + 1);
        let out_cover = Cover::of(region, out_target.0, out_target.1);
        let in_cover = Cover::of(region, in_source.0, in_source.1);
        steps.push(StepVerdict {
            r,
            out_target,
            out_cover,
            in_source,
            in_cover,
        });
        let miss = if out_cover == Cover::Uncovered {
            Some((out_target, "out-target"))
        } else if in_cover == Cover::Uncovered {
            Some((in_source, "in-source"))
        } else {
            None
        };
        if let Some((position, direction)) = miss {
            first_uncovered = Some(Uncovered {
                r,
                position,
                direction: direction.into(),
            });
            break;
        }
    }
    StabilityCertificate {
        entry,
        region: region.clauses.iter().map(|h| h.to_string()).collect(),
        certified: first_uncovered.is_none(),
        steps,
        r_max,
        tail: format!("for r > {r_max}: out-targets have p < 0 and in-sources have q < 0"),
        first_uncovered,
    }
}

/// The entry whose stability the family argument needs, with its vanishing region.
pub fn stable_entry(family: Family, g: usize) -> ((usize, usize), VanishingRegion) {
    match family {
        Family::Full => ((g - 2, g - 1), VanishingRegion::full_family(g)),
        Family::Truncated(n) => ((n, 3 * g - 5 - 2 * n), VanishingRegion::truncated_family(g, n)),
    }
}

/// Every nonzero or bounded entry of `grid` lies outside `region`.
pub fn check_vanishing(grid: &E1Grid, region: &VanishingRegion) -> Report {
    let bad: Vec<String> = grid
        .support()
        .into_iter()
        .filter(|&(p, q)| region.contains(p as i64, q as i64))
        .map(|(p, q)| format!("({p},{q})"))
        .collect();
    let mut r = Report::new();
    r.push(
        "support avoids the vanishing region",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} entries checked against {region}", grid.entries.len())
        } else {
            format!("nonzero in region at {}", bad.join(", "))
        },
    );
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct CornerReport {
    pub n: usize,
    pub j: usize,
    pub q: usize,
    pub e1_rank: usize,
    pub e_infinity_rank: usize,
    pub expected_rank: usize,
    /// Filtration degree of each product cycle, one per q-subset.
    pub filtration_degrees: Vec<Option<usize>>,
    pub checks: Report,
}

impl CornerReport {
    pub fn passes(&self) -> bool {
        self.checks.is_pass()
    }
}

/// ℤⁿ × ℤʲ acting on cubical ℝⁿ with the second factor acting trivially.
///
/// Checks that `E¹_{n,q} = E^∞_{n,q} ≅ H_q(ℤʲ)`, that each product cycle
/// `[top cube] ⊗ e_S` (the Koszul generator for `[n] ∪ S`) has filtration
/// degree exactly `n`, and that these cycles give a basis of `E^∞_{n,q}`.
pub fn verify_corner_lemma(n: usize, j: usize, q: usize) -> Result<CornerReport> {
    if n + j > 5 || q > j {
        return Err(Error::SizeLimit(format!("need n + j <= 5 and q <= j, got ({n}, {j}, {q})")));
    }
    let fixed = if j == 0 { FixedFactor::Trivial } else { FixedFactor::FreeAbelian(j) };
    let c = cubical_space(n, fixed);
    let b = tensor_over_group(&c, CubeModel::Cubical)?;
    let run = run_spectral_sequence(&b, &Limits::default())?;
    let s = n + q;
    let mut checks = Report::new();
    let e1 = run.e(1, n, q);
    let einf = run.e_infinity(n, q);
    let expected = binomial(j, q);
    checks.push(
        "E1 equals E-infinity at the corner",
        e1 == einf && e1.torsion.is_empty() && e1.free == expected,
        format!("E1 = {e1}, E-inf = {einf}, expected Z^{expected}"),
    );
    let totals = run.total_free_ranks();
    let torus: Vec<usize> = (0..=n + j).map(|k| binomial(n + j, k)).collect();
    checks.push(
        "total homology is that of the torus",
        totals.len() >= torus.len()
            && totals.iter().enumerate().all(|(k, &r)| r == torus.get(k).copied().unwrap_or(0))
            && run.total.iter().all(|g| g.torsion.is_empty()),
        format!("{totals:?} vs {torus:?}"),
    );
    let (_, _, off, len) = *b
        .total_blocks(s)
        .iter()
        .find(|blk| blk.0 == n)
        .ok_or_else(|| Error::Inconsistent(format!("no block ({n},{q})")))?;
    let dim = b.total_dim(s);
    let sets = subsets(j, q);
    if len != sets.len() {
        return Err(Error::Inconsistent(format!("block ({n},{q}) has rank {len}, expected {}", sets.len())));
    }
    let last = run.pages.len() - 1;
    let mut degrees = Vec::new();
    let mut classes = Vec::new();
    let mut cycles_ok = true;
    for k in 0..sets.len() {
        let mut v = vec![BigInt::zero(); dim];
        v[off + k] = BigInt::from(1);
        let dv = if s == 0 { Vec::new() } else { run.total_differential(s).apply(&v) };
        cycles_ok &= dv.iter().all(Zero::is_zero);
        let deg = run.filtration_degree(s, &v)?;
        degrees.push(deg);
        classes.push(run.page_class(last, n, s, &v)?);
        let e1_class = run.page_class(1, n, s, &v)?;
        cycles_ok &= e1_class.iter().any(|x| !x.is_zero());
    }
    checks.push(
        "product chains are cycles with nonzero E1 class",
        cycles_ok,
        format!("{} chains", sets.len()),
    );
    checks.push(
        "filtration degree is exactly n",
        degrees.iter().all(|d| *d == Some(n)),
        format!("{degrees:?}"),
    );
    let basis_ok = if classes.is_empty() {
        einf.free == 0
    } else {
        classes.iter().all(|c| c.len() == classes.len())
            && IntMatrix::from_columns(classes.len(), &classes)
                .determinant()
                .map(|d| d.abs() == BigInt::from(1))
                .unwrap_or(false)
    };
    checks.push(
        "leading terms form a basis of E-infinity",
        basis_ok,
        format!("{} leading terms in a group of rank {}", classes.len(), einf.free),
    );
    Ok(CornerReport {
        n,
        j,
        q,
        e1_rank: e1.free,
        e_infinity_rank: einf.free,
        expected_rank: expected,
        filtration_degrees: degrees,
        checks,
    })
}

/// Random double complexes with a planted E¹ support, for testing certificates.
pub mod sample {
    use super::*;
    use crate::homalg::double::DoubleComplex;
    use rand::Rng;

    pub struct Planted {
        pub complex: DoubleComplex,
        pub region: VanishingRegion,
        /// Positions where E¹ may be nonzero.
        pub allowed: Vec<(usize, usize)>,
    }

    #[derive(Default)]
    struct Builder {
        side: usize,
        counts: BTreeMap<(usize, usize), usize>,
        /// (horizontal?, p, q, source index, target index, coefficient)
        edges: Vec<(bool, usize, usize, usize, usize, i64)>,
    }

    impl Builder {
        fn gen(&mut self, p: usize, q: usize) -> usize {
            let e = self.counts.entry((p, q)).or_insert(0);
            *e += 1;
            *e - 1
        }

        fn count(&self, p: usize, q: usize) -> usize {
            self.counts.get(&(p, q)).copied().unwrap_or(0)
        }

        fn finish(self) -> DoubleComplex {
            let ranks: Vec<Vec<usize>> = (0..self.side)
                .map(|p| (0..self.side).map(|q| self.count(p, q)).collect())
                .collect();
            let mut h: BTreeMap<(usize, usize), IntMatrix> = BTreeMap::new();
            let mut v: BTreeMap<(usize, usize), IntMatrix> = BTreeMap::new();
            for &(horiz, p, q, src, tgt, coef) in &self.edges {
                let (map, rows) = if horiz {
                    (&mut h, self.count(p - 1, q))
                } else {
                    (&mut v, self.count(p, q - 1))
                };
                map.entry((p, q))
                    .or_insert_with(|| IntMatrix::zeros(rows, self.count(p, q)))
                    .add_to(tgt, src, &BigInt::from(coef));
            }
            let mut b = DoubleComplex::new(ranks);
            for ((p, q), m) in h {
                b.set_h(p, q, m).expect("shapes from counts");
            }
            for ((p, q), m) in v {
                b.set_v(p, q, m).expect("shapes from counts");
            }
            b
        }
    }

    fn unimodular<R: Rng>(rng: &mut R, k: usize) -> (IntMatrix, IntMatrix) {
        let mut u: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect();
        let mut ui = u.clone();
        if k >= 2 {
            for _ in 0..2 * k {
                let i = rng.gen_range(0..k);
                let mut j = rng.gen_range(0..k - 1);
                if j >= i {
                    j += 1;
                }
                let c: i64 = [-2, -1, 1, 2][rng.gen_range(0..4)];
                // u ← E u with E = I + c·e_ij; u⁻¹ ← u⁻¹ E⁻¹.
                for col in 0..k {
                    u[i][col] += c * u[j][col];
                }
                for row in ui.iter_mut() {
                    row[j] -= c * row[i];
                }
            }
        }
        (IntMatrix::from_i64(&u), IntMatrix::from_i64(&ui))
    }

    /// Conjugates every bidegree by a random unimodular change of basis.
    pub fn scramble<R: Rng>(rng: &mut R, b: &DoubleComplex) -> DoubleComplex {
        let (pl, ql) = (b.p_len(), b.q_len());
        let mut bases = BTreeMap::new();
        for p in 0..pl {
            for q in 0..ql {
                bases.insert((p, q), unimodular(rng, b.rank(p, q)));
            }
        }
        let mut out = DoubleComplex::new(b.ranks().to_vec());
        for p in 0..pl {
            for q in 0..ql {
                let src_inv = &bases[&(p, q)].1;
                if p >= 1 {
                    let m = bases[&(p - 1, q)].0.mul(&b.h(p, q)).and_then(|m| m.mul(src_inv));
                    out.set_h(p, q, m.expect("shapes")).expect("shapes");
                }
                if q >= 1 {
                    let m = bases[&(p, q - 1)].0.mul(&b.v(p, q)).and_then(|m| m.mul(src_inv));
                    out.set_v(p, q, m.expect("shapes")).expect("shapes");
                }
            }
        }
        out
    }

    /// A scrambled double complex on a `side × side` grid whose E¹ support
    /// avoids the region `p < a or p + q > b`, including a generator at the
    /// corner `(a, b − a)` and staircases carrying higher differentials.
    pub fn region_complex<R: Rng>(rng: &mut R, side: usize) -> Planted {
        let a = rng.gen_range(0..=2usize);
        let b = rng.gen_range(a + 1..=a + side - 1);
        let region = VanishingRegion::new(vec![
            HalfPlane::new(-1, 0, 1 - a as i64).expect("nonzero"),
            HalfPlane::new(1, 1, b as i64 + 1).expect("nonzero"),
        ]);
        let mut allowed = Vec::new();
        for p in 0..side {
            for q in 0..side {
                if !region.contains(p as i64, q as i64) {
                    allowed.push((p, q));
                }
            }
        }
        let mut bld = Builder {
            side,
            ..Builder::default()
        };
        if b - a < side {
            bld.gen(a, b - a);
        }
        let ok = |p: usize, q: usize| allowed.contains(&(p, q));
        for _ in 0..8 {
            match rng.gen_range(0..4) {
                0 => {
                    let (p, q) = allowed[rng.gen_range(0..allowed.len())];
                    bld.gen(p, q);
                }
                1 => {
                    // Vertical pair, invisible on E¹, anywhere on the grid.
                    let (p, q) = (rng.gen_range(0..side), rng.gen_range(0..side - 1));
                    let hi = bld.gen(p, q + 1);
                    let lo = bld.gen(p, q);
                    bld.edges.push((false, p, q + 1, hi, lo, if rng.gen() { 1 } else { -1 }));
                }
                2 => {
                    // Horizontal pair: both ends show on E¹, cancelled (or torsion) on E².
                    let (p, q) = allowed[rng.gen_range(0..allowed.len())];
                    if p >= 1 && ok(p - 1, q) {
                        let x = bld.gen(p, q);
                        let y = bld.gen(p - 1, q);
                        let k: i64 = [1, -1, 2, 3][rng.gen_range(0..4)];
                        bld.edges.push((true, p, q, x, y, k));
                    }
                }
                _ => {
                    // Staircase x → y₁ ← w₁ → y₂ ← … → t carrying d^r x = k t.
                    let (p, q) = allowed[rng.gen_range(0..allowed.len())];
                    let r = rng.gen_range(1..=3usize);
                    if p < r || q + r - 1 >= side || !ok(p - r, q + r - 1) {
                        continue;
                    }
                    let k: i64 = [1, -1, 2, 3][rng.gen_range(0..4)];
                    let x = bld.gen(p, q);
                    let mut src = (p, q, x);
                    for i in 1..r {
                        let y = bld.gen(p - i, q + i - 1);
                        bld.edges.push((true, src.0, src.1, src.2, y, 1));
                        let w = bld.gen(p - i, q + i);
                        bld.edges.push((false, p - i, q + i, w, y, -1));
                        src = (p - i, q + i, w);
                    }
                    let t = bld.gen(p - r, q + r - 1);
                    bld.edges.push((true, src.0, src.1, src.2, t, k));
                }
            }
        }
        let plain = bld.finish();
        Planted {
            complex: scramble(rng, &plain),
            region,
            allowed,
        }
    }
}
