//! Integral group rings and the two built-in free resolutions of ℤ.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt::Debug;

use super::chain::ChainComplex;
use super::matrix::IntMatrix;

/// A group whose elements have canonical, totally ordered keys.
pub trait GroupKey: Ord + Clone + Debug {
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
    fn is_identity(&self) -> bool;
}

/// Element of ℤⁿ (written additively).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lattice(pub Vec<i64>);

impl GroupKey for Lattice {
    fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.0.len(), other.0.len(), "rank mismatch");
        Lattice(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
    fn inv(&self) -> Self {
        Lattice(self.0.iter().map(|a| -a).collect())
    }
    fn is_identity(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

/// Reduced word in a free group: letter `i+1` is the generator xᵢ, `-(i+1)` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn reduced(letters: &[i32]) -> Word {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            assert!(l != 0, "zero is not a letter");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn generator(i: usize) -> Word {
        Word(vec![i as i32 + 1])
    }
}

impl GroupKey for Word {
    fn mul(&self, other: &Self) -> Self {
        let mut l = self.0.clone();
        l.extend_from_slice(&other.0);
        Word::reduced(&l)
    }
    fn inv(&self) -> Self {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }
    fn is_identity(&self) -> bool {
        self.0.is_empty()
    }
}

/// Finite formal sum Σ c_g g in ℤ[G].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElem<K: GroupKey> {
    terms: BTreeMap<K, BigInt>,
}

impl<K: GroupKey> RingElem<K> {
    pub fn zero() -> Self {
        RingElem {
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(g: K, c: BigInt) -> Self {
        let mut e = RingElem::zero();
        e.add_term(g, c);
        e
    }

    pub fn add_term(&mut self, g: K, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(g.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn terms(&self) -> &BTreeMap<K, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        RingElem {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = RingElem::zero();
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(g.mul(h), a * b);
            }
        }
        out
    }

    /// The augmentation ℤ[G] → ℤ.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }
}

/// Matrix over ℤ[G]; `entries[r][c]`.
pub type RingMatrix<K> = Vec<Vec<RingElem<K>>>;

pub fn ring_matmul<K: GroupKey>(a: &RingMatrix<K>, b: &RingMatrix<K>) -> RingMatrix<K> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "ring matrix shape mismatch");
            (0..cols)
                .map(|j| {
                    (0..inner).fold(RingElem::zero(), |acc, k| acc.add(&row[k].mul(&b[k][j])))
                })
                .collect()
        })
        .collect()
}

pub fn augment<K: GroupKey>(m: &RingMatrix<K>, rows: usize, cols: usize) -> IntMatrix {
    let mut out = IntMatrix::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            out.set(i, j, e.augmentation());
        }
    }
    out
}

/// A free resolution of the trivial module ℤ over ℤ[G].
///
/// `d[q-1]` is the `rank(q-1) × rank(q)` matrix of `R_q → R_{q-1}`, acting on
/// column vectors of coefficients.
#[derive(Clone, Debug)]
pub struct Resolution<K: GroupKey> {
    pub ranks: Vec<usize>,
    pub d: Vec<RingMatrix<K>>,
}

impl<K: GroupKey> Resolution<K> {
    pub fn check_square_zero(&self) -> bool {
        self.d.windows(2).all(|w| {
            ring_matmul(&w[0], &w[1])
                .iter()
                .all(|r| r.iter().all(RingElem::is_zero))
        })
    }

    /// `ℤ ⊗_G R`: every entry replaced by its augmentation.
    pub fn augmented(&self) -> ChainComplex {
        let maps = self
            .d
            .iter()
            .enumerate()
            .map(|(k, m)| augment(m, self.ranks[k], self.ranks[k + 1]))
            .collect();
        ChainComplex::new(self.ranks.clone(), maps).expect("augmented resolution is a complex")
    }
}

/// Which differential the free-abelian resolution uses on an edge in direction i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CubeModel {
    /// Cellular chains of ℝⁿ in unit cubes: the face at `+eᵢ` minus the face at the origin, `tᵢ - 1`.
    Cubical,
    /// The Koszul complex with `1 - tᵢ⁻¹`.
    KoszulExterior,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolutionKind {
    FreeAbelian(usize, CubeModel),
    Free(usize),
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn subset_index(n: usize, s: &[usize]) -> usize {
    subsets(n, s.len())
        .iter()
        .position(|t| t == s)
        .expect("not a subset of the expected size")
}

/// Cube/Koszul resolution of ℤ over ℤ[ℤⁿ]: rank `C(n,q)` in degree `q`.
///
/// The basis of `R_q` is the `q`-subsets `S` of the coordinate directions
/// (the unit cube spanned by `S` at the origin), and
/// `d(e_S) = Σ_k (-1)^k (tₛₖ - 1) e_{S∖sₖ}` in the cubical model.
pub fn free_abelian_resolution(n: usize, model: CubeModel) -> Resolution<Lattice> {
    let ranks: Vec<usize> = (0..=n).map(|q| binomial(n, q)).collect();
    let mut d = Vec::new();
    for q in 1..=n {
        let src = subsets(n, q);
        let tgt = subsets(n, q - 1);
        let mut m: RingMatrix<Lattice> = vec![vec![RingElem::zero(); src.len()]; tgt.len()];
        for (c, s) in src.iter().enumerate() {
            for (k, &dir) in s.iter().enumerate() {
                let mut face = s.clone();
                face.remove(k);
                let r = tgt.iter().position(|t| *t == face).unwrap();
                let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                let mut t = vec![0i64; n];
                let mut e = RingElem::zero();
                match model {
                    CubeModel::Cubical => {
                        t[dir] = 1;
                        e.add_term(Lattice(t), sign.clone());
                        e.add_term(Lattice(vec![0; n]), -sign);
                    }
                    CubeModel::KoszulExterior => {
                        t[dir] = -1;
                        e.add_term(Lattice(vec![0; n]), sign.clone());
                        e.add_term(Lattice(t), -sign);
                    }
                }
                m[r][c] = e;
            }
        }
        d.push(m);
    }
    Resolution { ranks, d }
}

/// Two-term resolution of ℤ over the free group of rank m: `d(eᵢ) = xᵢ - 1`.
pub fn free_group_resolution(m: usize) -> Resolution<Word> {
    let row: Vec<RingElem<Word>> = (0..m)
        .map(|i| {
            let mut e = RingElem::monomial(Word::generator(i), BigInt::one());
            e.add_term(Word(Vec::new()), -BigInt::one());
            e
        })
        .collect();
    Resolution {
        ranks: vec![1, m],
        d: vec![vec![row]],
    }
}

/// Fox derivative ∂w/∂xᵢ of a word, as an element of ℤ[F].
pub fn fox_derivative(w: &Word, i: usize) -> RingElem<Word> {
    let gen = i as i32 + 1;
    let mut out = RingElem::zero();
    let mut prefix: Vec<i32> = Vec::new();
    for &l in &w.0 {
        if l == gen {
            out.add_term(Word::reduced(&prefix), BigInt::one());
        } else if l == -gen {
            let mut p = prefix.clone();
            p.push(l);
            out.add_term(Word::reduced(&p), -BigInt::one());
        }
        prefix.push(l);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::chain::{chain_homology, free_ranks};

    #[test]
    fn circle_resolution() {
        let r = free_abelian_resolution(1, CubeModel::Cubical);
        assert_eq!(r.ranks, vec![1, 1]);
        let e = &r.d[0][0][0];
        assert_eq!(e.terms().get(&Lattice(vec![1])), Some(&BigInt::one()));
        assert_eq!(e.terms().get(&Lattice(vec![0])), Some(&-BigInt::one()));
    }

    #[test]
    fn square_zero_and_torus_homology() {
        for model in [CubeModel::Cubical, CubeModel::KoszulExterior] {
            for n in 0..=4 {
                let r = free_abelian_resolution(n, model);
                assert!(r.check_square_zero());
                let h = chain_homology(&r.augmented()).unwrap();
                let expect: Vec<usize> = (0..=n).map(|k| binomial(n, k)).collect();
                assert_eq!(free_ranks(&h), expect);
            }
        }
    }

    #[test]
    fn free_group_resolution_shape() {
        let r = free_group_resolution(2);
        assert_eq!(r.ranks, vec![1, 2]);
        let h = chain_homology(&r.augmented()).unwrap();
        assert_eq!(free_ranks(&h), vec![1, 2]);
    }

    #[test]
    fn fox_calculus_identity() {
        // w - 1 = Σ (∂w/∂xᵢ)(xᵢ - 1)
        let w = Word::reduced(&[1, 2, -1, -2, 1]);
        let mut lhs = RingElem::monomial(w.clone(), BigInt::one());
        lhs.add_term(Word(vec![]), -BigInt::one());
        let res = free_group_resolution(2);
        let mut rhs = RingElem::zero();
        for i in 0..2 {
            rhs = rhs.add(&fox_derivative(&w, i).mul(&res.d[0][0][i]));
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn word_reduction() {
        let w = Word::reduced(&[1, 2, -2, -1, 3]);
        assert_eq!(w, Word(vec![3]));
        assert!(w.mul(&w.inv()).is_identity());
    }
}
