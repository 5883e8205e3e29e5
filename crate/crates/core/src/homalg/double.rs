//! First-quadrant double complexes and the equivariant tensor construction.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::chain::ChainComplex;
use super::lattice::{vec_from_i64, Lattice};
use super::matrix::IntMatrix;
use super::ring::{free_abelian_resolution, free_group_resolution, subsets, CubeModel};
use crate::error::{Error, Result};

/// Bigraded free abelian groups `B_{p,q}` with `∂′: B_{p,q} → B_{p-1,q}` and
/// `∂″: B_{p,q} → B_{p,q-1}`. The sign making the two anticommute lives in `∂″`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleComplex {
    ranks: Vec<Vec<usize>>,
    h: BTreeMap<(usize, usize), IntMatrix>,
    v: BTreeMap<(usize, usize), IntMatrix>,
    /// Orbit count times resolution rank, when built from a group action.
    pub module_ranks: Option<Vec<Vec<usize>>>,
}

impl DoubleComplex {
    /// `ranks[p][q]`; all columns must have the same height.
    pub fn new(ranks: Vec<Vec<usize>>) -> Self {
        let height = ranks.iter().map(|c| c.len()).max().unwrap_or(0);
        let ranks = ranks
            .into_iter()
            .map(|mut c| {
                c.resize(height, 0);
                c
            })
            .collect();
        DoubleComplex {
            ranks,
            h: BTreeMap::new(),
            v: BTreeMap::new(),
            module_ranks: None,
        }
    }

    pub fn p_len(&self) -> usize {
        self.ranks.len()
    }

    pub fn q_len(&self) -> usize {
        self.ranks.first().map_or(0, |c| c.len())
    }

    pub fn rank(&self, p: usize, q: usize) -> usize {
        self.ranks.get(p).and_then(|c| c.get(q)).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &[Vec<usize>] {
        &self.ranks
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().flatten().sum()
    }

    pub fn set_h(&mut self, p: usize, q: usize, m: IntMatrix) -> Result<()> {
        if p == 0 {
            return Err(Error::Dimension("no horizontal map out of column 0".into()));
        }
        let shape = (self.rank(p - 1, q), self.rank(p, q));
        if (m.rows(), m.cols()) != shape {
            return Err(Error::Dimension(format!(
                "∂′ at ({p},{q}) is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                shape.0,
                shape.1
            )));
        }
        self.h.insert((p, q), m);
        Ok(())
    }

    pub fn set_v(&mut self, p: usize, q: usize, m: IntMatrix) -> Result<()> {
        if q == 0 {
            return Err(Error::Dimension("no vertical map out of row 0".into()));
        }
        let shape = (self.rank(p, q - 1), self.rank(p, q));
        if (m.rows(), m.cols()) != shape {
            return Err(Error::Dimension(format!(
                "∂″ at ({p},{q}) is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                shape.0,
                shape.1
            )));
        }
        self.v.insert((p, q), m);
        Ok(())
    }

    /// `∂′` out of `(p,q)`; zero if unset or `p == 0`.
    pub fn h(&self, p: usize, q: usize) -> IntMatrix {
        if p == 0 {
            return IntMatrix::zeros(0, self.rank(p, q));
        }
        self.h
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.rank(p - 1, q), self.rank(p, q)))
    }

    /// `∂″` out of `(p,q)`; zero if unset or `q == 0`.
    pub fn v(&self, p: usize, q: usize) -> IntMatrix {
        if q == 0 {
            return IntMatrix::zeros(0, self.rank(p, q));
        }
        self.v
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.rank(p, q - 1), self.rank(p, q)))
    }

    /// Checks `∂′∂′ = 0`, `∂″∂″ = 0` and `∂′∂″ + ∂″∂′ = 0`.
    pub fn validate(&self) -> Result<()> {
        for p in 0..self.p_len() {
            for q in 0..self.q_len() {
                if p >= 2 && !self.h(p - 1, q).mul(&self.h(p, q))?.is_zero() {
                    return Err(Error::Inconsistent(format!("∂′∂′ != 0 at ({p},{q})")));
                }
                if q >= 2 && !self.v(p, q - 1).mul(&self.v(p, q))?.is_zero() {
                    return Err(Error::Inconsistent(format!("∂″∂″ != 0 at ({p},{q})")));
                }
                if p >= 1 && q >= 1 {
                    let a = self.h(p, q - 1).mul(&self.v(p, q))?;
                    let b = self.v(p - 1, q).mul(&self.h(p, q))?;
                    if !a.add(&b)?.is_zero() {
                        return Err(Error::Inconsistent(format!(
                            "∂′∂″ + ∂″∂′ != 0 at ({p},{q})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Total degree `s` as `(p, q, offset, rank)` blocks ordered by `p`.
    pub fn total_blocks(&self, s: usize) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for p in 0..=s.min(self.p_len().saturating_sub(1)) {
            let q = s - p;
            if q >= self.q_len() {
                continue;
            }
            let r = self.rank(p, q);
            out.push((p, q, off, r));
            off += r;
        }
        out
    }

    pub fn total_dim(&self, s: usize) -> usize {
        self.total_blocks(s).iter().map(|b| b.3).sum()
    }

    pub fn max_total_degree(&self) -> usize {
        (self.p_len() + self.q_len()).saturating_sub(2)
    }

    /// `D = ∂′ + ∂″ : Tot_s → Tot_{s-1}`.
    pub fn total_d(&self, s: usize) -> IntMatrix {
        let src = self.total_blocks(s);
        if s == 0 {
            return IntMatrix::zeros(0, self.total_dim(0));
        }
        let tgt = self.total_blocks(s - 1);
        let off_of = |p: usize| tgt.iter().find(|b| b.0 == p).map(|b| b.2);
        let mut m = IntMatrix::zeros(self.total_dim(s - 1), self.total_dim(s));
        for &(p, q, off, _) in &src {
            if p >= 1 {
                if let Some(t) = off_of(p - 1) {
                    m.place(t, off, &self.h(p, q));
                }
            }
            if q >= 1 {
                if let Some(t) = off_of(p) {
                    m.place(t, off, &self.v(p, q));
                }
            }
        }
        m
    }

    pub fn total_complex(&self) -> ChainComplex {
        let top = self.max_total_degree() + 1;
        let ranks = (0..top).map(|s| self.total_dim(s)).collect();
        let maps = (1..top).map(|s| self.total_d(s)).collect();
        ChainComplex::new(ranks, maps).expect("total complex of a valid double complex")
    }
}

/// One boundary term `coef · elt · τ` of an equivariant cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermFace {
    pub orbit: usize,
    pub coef: i64,
    pub elt: Vec<i64>,
}

/// Orbit representative of a cell under the acting lattice ℤⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermCell {
    /// Generators of the stabilizer, a sublattice of ℤⁿ.
    pub stabilizer: Vec<Vec<i64>>,
    pub boundary: Vec<PermFace>,
}

/// The factor of the group that acts trivially on cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedFactor {
    Trivial,
    FreeAbelian(usize),
    ProductOfFree(Vec<usize>),
}

impl FixedFactor {
    /// `ℤ ⊗ R` for the built-in resolution of this factor.
    pub fn coinvariant_complex(&self, model: CubeModel) -> ChainComplex {
        match self {
            FixedFactor::Trivial => ChainComplex::with_zero_maps(vec![1]),
            FixedFactor::FreeAbelian(j) => free_abelian_resolution(*j, model).augmented(),
            FixedFactor::ProductOfFree(ms) => ms.iter().fold(
                ChainComplex::with_zero_maps(vec![1]),
                |acc, &m| acc.tensor(&free_group_resolution(m).augmented()),
            ),
        }
    }
}

/// A cell complex with a ℤⁿ × P action by permutation of cells, P acting trivially.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermComplex {
    pub acting_rank: usize,
    pub fixed: FixedFactor,
    /// `cells[p]` lists the orbit representatives in dimension `p`.
    pub cells: Vec<Vec<PermCell>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    Free,
    FiniteIndex,
}

impl PermComplex {
    fn stab_lattice(&self, c: &PermCell) -> Lattice {
        let gens: Vec<_> = c.stabilizer.iter().map(|g| vec_from_i64(g)).collect();
        Lattice::new(self.acting_rank, &gens)
    }

    fn route(&self) -> Result<Route> {
        let n = self.acting_rank;
        let mut free = true;
        let mut full = true;
        for c in self.cells.iter().flatten() {
            let r = self.stab_lattice(c).rank();
            free &= r == 0;
            full &= r == n;
        }
        if free {
            Ok(Route::Free)
        } else if full {
            Ok(Route::FiniteIndex)
        } else {
            Err(Error::Unsupported(
                "stabilizers must be all trivial or all of full rank".into(),
            ))
        }
    }

    /// Structural checks: face indices, element lengths, and `∂∂ = 0` with group-element bookkeeping.
    pub fn validate(&self) -> Result<()> {
        let n = self.acting_rank;
        for (p, layer) in self.cells.iter().enumerate() {
            for (i, c) in layer.iter().enumerate() {
                if c.stabilizer.iter().any(|g| g.len() != n) {
                    return Err(Error::Invalid(format!("cell ({p},{i}): stabilizer length")));
                }
                if p == 0 && !c.boundary.is_empty() {
                    return Err(Error::Invalid(format!("vertex ({p},{i}) has a boundary")));
                }
                for f in &c.boundary {
                    if f.elt.len() != n {
                        return Err(Error::Invalid(format!("cell ({p},{i}): element length")));
                    }
                    if p == 0 || f.orbit >= self.cells[p - 1].len() {
                        return Err(Error::Invalid(format!(
                            "cell ({p},{i}): face orbit {} out of range",
                            f.orbit
                        )));
                    }
                }
            }
        }
        let route = self.route()?;
        for p in 2..self.cells.len() {
            for (i, c) in self.cells[p].iter().enumerate() {
                let mut acc: BTreeMap<(usize, Vec<i64>), i64> = BTreeMap::new();
                for f in &c.boundary {
                    for g in &self.cells[p - 1][f.orbit].boundary {
                        let mut e: Vec<i64> = f.elt.iter().zip(&g.elt).map(|(a, b)| a + b).collect();
                        if route == Route::FiniteIndex {
                            let l = self.stab_lattice(&self.cells[p - 2][g.orbit]);
                            e = l
                                .reduce_mod(&vec_from_i64(&e))
                                .iter()
                                .map(|x| i64::try_from(x).unwrap())
                                .collect();
                        }
                        *acc.entry((g.orbit, e)).or_insert(0) += f.coef * g.coef;
                    }
                }
                if acc.values().any(|&v| v != 0) {
                    return Err(Error::Inconsistent(format!("∂∂ != 0 on cell ({p},{i})")));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }
}

/// Realizes `B_{p,q} = C_p ⊗_G R_q` as finite free abelian groups.
///
/// With all stabilizers trivial the action of ℤⁿ on `C` is free and
/// `B_{p,q} = C_p(Y/ℤⁿ) ⊗ (ℤ ⊗_P R^P)_q`. With all stabilizers of full rank
/// each orbit contributes `ℤ[ℤⁿ/L] ⊗ Λ^a(ℤⁿ) ⊗ (ℤ ⊗_P R^P)_b`, `a + b = q`,
/// with the Koszul differential acting on cosets.
pub fn tensor_over_group(c: &PermComplex, model: CubeModel) -> Result<DoubleComplex> {
    c.validate()?;
    let route = c.route()?;
    let a = c.fixed.coinvariant_complex(model);
    let n = c.acting_rank;
    let pl = c.dim();
    let mut module_ranks = vec![vec![0usize; n + a.len()]; pl];
    for (p, row) in module_ranks.iter_mut().enumerate() {
        for (q, slot) in row.iter_mut().enumerate() {
            let res_rank: usize = (0..=q.min(n))
                .map(|k| super::ring::binomial(n, k) * a.rank(q - k))
                .sum();
            *slot = c.cells[p].len() * res_rank;
        }
    }
    let mut b = match route {
        Route::Free => free_route(c, &a)?,
        Route::FiniteIndex => finite_route(c, &a, model)?,
    };
    b.module_ranks = Some(module_ranks);
    b.validate()?;
    Ok(b)
}

fn sign(k: usize) -> BigInt {
    if k % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn free_route(c: &PermComplex, a: &ChainComplex) -> Result<DoubleComplex> {
    let pl = c.dim();
    let ql = a.len();
    let ranks: Vec<Vec<usize>> = (0..pl)
        .map(|p| (0..ql).map(|q| c.cells[p].len() * a.rank(q)).collect())
        .collect();
    let mut b = DoubleComplex::new(ranks);
    for p in 0..pl {
        for q in 0..ql {
            let aq = a.rank(q);
            if p >= 1 {
                let mut m = IntMatrix::zeros(c.cells[p - 1].len() * aq, c.cells[p].len() * aq);
                for (i, cell) in c.cells[p].iter().enumerate() {
                    for f in &cell.boundary {
                        for beta in 0..aq {
                            m.add_to(f.orbit * aq + beta, i * aq + beta, &BigInt::from(f.coef));
                        }
                    }
                }
                b.set_h(p, q, m)?;
            }
            if q >= 1 {
                let da = a.d(q);
                let aq1 = a.rank(q - 1);
                let cells = c.cells[p].len();
                let mut m = IntMatrix::zeros(cells * aq1, cells * aq);
                let sg = sign(p);
                for i in 0..cells {
                    for (r, col, v) in da.entries() {
                        m.add_to(i * aq1 + r, i * aq + col, &(&sg * v));
                    }
                }
                b.set_v(p, q, m)?;
            }
        }
    }
    Ok(b)
}

struct FiniteIndexing {
    /// Per cell: stabilizer lattice and coset representatives.
    stabs: Vec<Vec<(Lattice, Vec<Vec<i64>>)>>,
    /// (p, q) -> map from (cell, coset, subset-rank a, subset index, beta) to position.
    index: BTreeMap<(usize, usize), BTreeMap<(usize, usize, usize, usize, usize), usize>>,
}

fn finite_route(c: &PermComplex, a: &ChainComplex, model: CubeModel) -> Result<DoubleComplex> {
    let n = c.acting_rank;
    let pl = c.dim();
    let ql = n + a.len();
    let stabs: Vec<Vec<(Lattice, Vec<Vec<i64>>)>> = c
        .cells
        .iter()
        .map(|layer| {
            layer
                .iter()
                .map(|cell| {
                    let l = c.stab_lattice(cell);
                    let reps = l.coset_reps();
                    (l, reps)
                })
                .collect()
        })
        .collect();
    let mut ix = FiniteIndexing {
        stabs,
        index: BTreeMap::new(),
    };
    let mut ranks = vec![vec![0usize; ql]; pl];
    for p in 0..pl {
        for q in 0..ql {
            let mut map = BTreeMap::new();
            let mut pos = 0;
            for (cell, (_, reps)) in ix.stabs[p].iter().enumerate() {
                for coset in 0..reps.len() {
                    for k in 0..=q.min(n) {
                        if q - k >= a.len() {
                            continue;
                        }
                        for s in 0..super::ring::binomial(n, k) {
                            for beta in 0..a.rank(q - k) {
                                map.insert((cell, coset, k, s, beta), pos);
                                pos += 1;
                            }
                        }
                    }
                }
            }
            ranks[p][q] = pos;
            ix.index.insert((p, q), map);
        }
    }
    let mut b = DoubleComplex::new(ranks);
    let coset_of = |ix: &FiniteIndexing, p: usize, cell: usize, v: &[i64]| -> usize {
        let (l, reps) = &ix.stabs[p][cell];
        let r: Vec<i64> = l
            .reduce_mod(&vec_from_i64(v))
            .iter()
            .map(|x| i64::try_from(x).unwrap())
            .collect();
        reps.binary_search(&r).expect("reduced vector is a coset representative")
    };
    for p in 0..pl {
        for q in 0..ql {
            let src = &ix.index[&(p, q)];
            if p >= 1 {
                let tgt = &ix.index[&(p - 1, q)];
                let mut m = IntMatrix::zeros(tgt.len(), src.len());
                for (&(cell, coset, k, s, beta), &col) in src {
                    let g = &ix.stabs[p][cell].1[coset];
                    for f in &c.cells[p][cell].boundary {
                        let e: Vec<i64> = g.iter().zip(&f.elt).map(|(x, y)| x + y).collect();
                        let t = coset_of(&ix, p - 1, f.orbit, &e);
                        let row = tgt[&(f.orbit, t, k, s, beta)];
                        m.add_to(row, col, &BigInt::from(f.coef));
                    }
                }
                b.set_h(p, q, m)?;
            }
            if q >= 1 {
                let tgt = &ix.index[&(p, q - 1)];
                let mut m = IntMatrix::zeros(tgt.len(), src.len());
                let sp = sign(p);
                for (&(cell, coset, k, s, beta), &col) in src {
                    let g = &ix.stabs[p][cell].1[coset];
                    if k >= 1 {
                        let set = &subsets(n, k)[s];
                        let faces = subsets(n, k - 1);
                        for (pos, &dir) in set.iter().enumerate() {
                            let mut face = set.clone();
                            face.remove(pos);
                            let fs = faces.iter().position(|t| *t == face).unwrap();
                            let sk = &sp * sign(pos);
                            let mut shifted = g.clone();
                            let (plus, minus) = match model {
                                CubeModel::Cubical => {
                                    shifted[dir] -= 1;
                                    (coset_of(&ix, p, cell, &shifted), coset)
                                }
                                CubeModel::KoszulExterior => {
                                    shifted[dir] += 1;
                                    (coset, coset_of(&ix, p, cell, &shifted))
                                }
                            };
                            m.add_to(tgt[&(cell, plus, k - 1, fs, beta)], col, &sk);
                            m.add_to(tgt[&(cell, minus, k - 1, fs, beta)], col, &-sk);
                        }
                    }
                    let b_deg = q - k;
                    if b_deg >= 1 {
                        let da = a.d(b_deg);
                        let sk = &sp * sign(k);
                        for (r, cc, v) in da.entries() {
                            if cc == beta {
                                m.add_to(tgt[&(cell, coset, k, s, r)], col, &(&sk * v));
                            }
                        }
                    }
                }
                b.set_v(p, q, m)?;
            }
        }
    }
    Ok(b)
}

/// Cubical decomposition of ℝⁿ with vertices at ℤⁿ, as a free ℤⁿ-complex.
pub fn cubical_space(n: usize, fixed: FixedFactor) -> PermComplex {
    subdivided_space(n, 1, fixed)
}

fn cube_grid(n: usize, k: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for x in 0..k as i64 {
                let mut v: Vec<i64> = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// ℝⁿ cut into cubes of side 1/k, with ℤⁿ acting freely by unit translations.
///
/// Cells are indexed by a base point in `{0..k-1}ⁿ` (in units of 1/k) and a
/// direction subset; a group element `g` moves a cell by `k·g` grid steps.
pub fn subdivided_space(n: usize, k: usize, fixed: FixedFactor) -> PermComplex {
    assert!(k >= 1);
    let bases = cube_grid(n, k);
    let index_of = |dim: usize, base: &[i64], set: &[usize]| -> (usize, Vec<i64>) {
        let mut b = base.to_vec();
        let mut shift = vec![0i64; n];
        for i in 0..n {
            shift[i] = b[i].div_euclid(k as i64);
            b[i] = b[i].rem_euclid(k as i64);
        }
        let bi = bases.iter().position(|x| *x == b).unwrap();
        let si = subsets(n, dim).iter().position(|s| s == set).unwrap();
        (bi * super::ring::binomial(n, dim) + si, shift)
    };
    let mut cells = Vec::new();
    for dim in 0..=n {
        let mut layer = Vec::new();
        for base in &bases {
            for set in subsets(n, dim) {
                let mut boundary = Vec::new();
                for (pos, &dir) in set.iter().enumerate() {
                    let mut face = set.clone();
                    face.remove(pos);
                    let sg = if pos % 2 == 0 { 1 } else { -1 };
                    let mut far = base.clone();
                    far[dir] += 1;
                    let (fi, shift) = index_of(dim - 1, &far, &face);
                    boundary.push(PermFace { orbit: fi, coef: sg, elt: shift });
                    let (ni, shift) = index_of(dim - 1, base, &face);
                    boundary.push(PermFace { orbit: ni, coef: -sg, elt: shift });
                }
                layer.push(PermCell { stabilizer: Vec::new(), boundary });
            }
        }
        cells.push(layer);
    }
    PermComplex { acting_rank: n, fixed, cells }
}

/// The torus ℝⁿ/kℤⁿ in unit cubes with ℤⁿ acting by unit translations.
///
/// One orbit per direction subset, every stabilizer equal to kℤⁿ.
pub fn translated_torus(n: usize, k: usize, fixed: FixedFactor) -> PermComplex {
    assert!(k >= 1);
    let stab: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0i64; n];
            v[i] = k as i64;
            v
        })
        .collect();
    let mut cells = Vec::new();
    for dim in 0..=n {
        let faces = if dim > 0 { subsets(n, dim - 1) } else { Vec::new() };
        let layer = subsets(n, dim)
            .into_iter()
            .map(|set| {
                let mut boundary = Vec::new();
                for (pos, &dir) in set.iter().enumerate() {
                    let mut face = set.clone();
                    face.remove(pos);
                    let fi = faces.iter().position(|t| *t == face).unwrap();
                    let sg = if pos % 2 == 0 { 1 } else { -1 };
                    let mut e = vec![0i64; n];
                    e[dir] = 1;
                    boundary.push(PermFace { orbit: fi, coef: sg, elt: e });
                    boundary.push(PermFace { orbit: fi, coef: -sg, elt: vec![0; n] });
                }
                PermCell { stabilizer: stab.clone(), boundary }
            })
            .collect();
        cells.push(layer);
    }
    PermComplex { acting_rank: n, fixed, cells }
}

/// ℤ acting on a k-gon by rotation through ℤ/k.
pub fn rotating_polygon(k: usize) -> PermComplex {
    translated_torus(1, k, FixedFactor::Trivial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::chain::{chain_homology, free_ranks};

    #[test]
    fn line_with_free_translation() {
        let c = cubical_space(1, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        assert_eq!(b.module_ranks.as_ref().unwrap(), &vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(b.rank(0, 0), 1);
        assert_eq!(b.rank(1, 0), 1);
        let h = chain_homology(&b.total_complex()).unwrap();
        assert_eq!(free_ranks(&h), vec![1, 1]);
    }

    #[test]
    fn trivial_group_gives_row_zero() {
        let c = cubical_space(0, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        assert_eq!(b.ranks(), &[vec![1]]);
    }

    #[test]
    fn plane_module_ranks() {
        let c = cubical_space(2, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        let mr = b.module_ranks.unwrap();
        for p in 0..3 {
            for q in 0..3 {
                let expect = super::super::ring::binomial(2, p) * super::super::ring::binomial(2, q);
                assert_eq!(mr[p][q], expect);
            }
        }
    }

    #[test]
    fn finite_index_route_recovers_group_homology() {
        for model in [CubeModel::Cubical, CubeModel::KoszulExterior] {
            let c = rotating_polygon(3);
            let b = tensor_over_group(&c, model).unwrap();
            let h = chain_homology(&b.total_complex()).unwrap();
            assert_eq!(free_ranks(&h), vec![1, 2, 1]);
            assert!(h.iter().all(|g| g.torsion.is_empty()));
        }
    }

    #[test]
    fn torus_stabilizers_on_subdivided_plane() {
        // The Borel construction is a 4-torus.
        let c = translated_torus(2, 2, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        let h = chain_homology(&b.total_complex()).unwrap();
        assert_eq!(free_ranks(&h), vec![1, 4, 6, 4, 1]);
    }

    #[test]
    fn subdivision_does_not_change_equivariant_homology() {
        let c = subdivided_space(2, 2, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        let h = chain_homology(&b.total_complex()).unwrap();
        assert_eq!(free_ranks(&h), vec![1, 2, 1]);
    }

    #[test]
    fn fixed_free_factor() {
        let c = cubical_space(1, FixedFactor::FreeAbelian(1));
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        let h = chain_homology(&b.total_complex()).unwrap();
        assert_eq!(free_ranks(&h), vec![1, 2, 1]);
    }
}
