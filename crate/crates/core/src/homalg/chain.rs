//! Chain complexes of free abelian groups and their homology.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::matrix::IntMatrix;
use super::snf::elementary_divisors;
use crate::error::{Error, Result};

/// A finitely generated abelian group ℤ^free ⊕ ⊕ ℤ/tᵢ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbGroup {
    pub free: usize,
    /// Torsion coefficients, each > 1, each dividing the next.
    #[serde(with = "crate::json::vec")]
    pub torsion: Vec<BigInt>,
}

impl AbGroup {
    pub fn free(rank: usize) -> Self {
        AbGroup {
            free: rank,
            torsion: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        AbGroup::default()
    }

    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }

    /// Builds a group from an arbitrary list of cyclic orders (0 = ℤ), normalizing
    /// the torsion part into invariant-factor form.
    pub fn from_cyclic(orders: &[BigInt]) -> Self {
        let free = orders.iter().filter(|d| d.is_zero()).count();
        let finite: Vec<BigInt> = orders
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect();
        if finite.is_empty() {
            return AbGroup::free(free);
        }
        let k = finite.len();
        let mut m = IntMatrix::zeros(k, k);
        for (i, d) in finite.into_iter().enumerate() {
            m.set(i, i, d);
        }
        let torsion = elementary_divisors(&m)
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        AbGroup { free, torsion }
    }

    pub fn direct_sum(&self, other: &AbGroup) -> AbGroup {
        let mut orders: Vec<BigInt> = vec![BigInt::zero(); self.free + other.free];
        orders.extend(self.torsion.iter().cloned());
        orders.extend(other.torsion.iter().cloned());
        AbGroup::from_cyclic(&orders)
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Homology in degrees `0..len`.
pub type GradedGroup = Vec<AbGroup>;

pub fn free_ranks(h: &[AbGroup]) -> Vec<usize> {
    h.iter().map(|g| g.free).collect()
}

/// A bounded chain complex `C_top → … → C_0`.
///
/// `d[k]` is the map `C_k → C_{k-1}` as a `rank(k-1) × rank(k)` matrix; `d[0]`
/// is the `0 × rank(0)` zero map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    d: Vec<IntMatrix>,
}

impl ChainComplex {
    /// `maps[k-1]` is `d_k` for `k = 1..ranks.len()`.
    pub fn new(ranks: Vec<usize>, maps: Vec<IntMatrix>) -> Result<Self> {
        if maps.len() + 1 != ranks.len().max(1) {
            return Err(Error::Dimension(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                maps.len()
            )));
        }
        let mut d = Vec::with_capacity(ranks.len());
        if !ranks.is_empty() {
            d.push(IntMatrix::zeros(0, ranks[0]));
        }
        for (k, m) in maps.into_iter().enumerate() {
            let k = k + 1;
            if m.rows() != ranks[k - 1] || m.cols() != ranks[k] {
                return Err(Error::Dimension(format!(
                    "d_{k} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    ranks[k - 1],
                    ranks[k]
                )));
            }
            d.push(m);
        }
        let c = ChainComplex { ranks, d };
        c.check_square_zero()?;
        Ok(c)
    }

    pub fn with_zero_maps(ranks: Vec<usize>) -> Self {
        let maps = (1..ranks.len())
            .map(|k| IntMatrix::zeros(ranks[k - 1], ranks[k]))
            .collect();
        ChainComplex::new(ranks, maps).expect("zero maps always compose to zero")
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    /// `d_k : C_k → C_{k-1}`; zero outside the stored range.
    pub fn d(&self, k: usize) -> IntMatrix {
        if k < self.d.len() {
            self.d[k].clone()
        } else {
            IntMatrix::zeros(self.rank(k.wrapping_sub(1)), self.rank(k))
        }
    }

    pub fn d_ref(&self, k: usize) -> Option<&IntMatrix> {
        self.d.get(k)
    }

    pub fn check_square_zero(&self) -> Result<()> {
        for k in 2..self.ranks.len() {
            let dd = self.d[k - 1].mul(&self.d[k])?;
            if !dd.is_zero() {
                return Err(Error::Inconsistent(format!("d_{} d_{} != 0", k - 1, k)));
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(k, &r)| if k % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    /// Tensor product over ℤ with the Koszul sign on the second factor.
    pub fn tensor(&self, other: &ChainComplex) -> ChainComplex {
        let top = self.len() + other.len();
        if self.is_empty() || other.is_empty() {
            return ChainComplex::with_zero_maps(Vec::new());
        }
        let top = top - 1;
        let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(top);
        let mut ranks = vec![0usize; top];
        for s in 0..top {
            let mut off = vec![0usize; self.len()];
            let mut acc = 0;
            for (i, o) in off.iter_mut().enumerate() {
                *o = acc;
                if s >= i && s - i < other.len() {
                    acc += self.rank(i) * other.rank(s - i);
                }
            }
            ranks[s] = acc;
            offsets.push(off);
        }
        let mut maps = Vec::new();
        for s in 1..top {
            let mut m = IntMatrix::zeros(ranks[s - 1], ranks[s]);
            for i in 0..self.len() {
                if s < i || s - i >= other.len() {
                    continue;
                }
                let j = s - i;
                let (ri, rj) = (self.rank(i), other.rank(j));
                let src = |a: usize, b: usize| offsets[s][i] + a * rj + b;
                if i >= 1 {
                    let da = &self.d[i];
                    let rj_t = other.rank(j);
                    for (r, c, v) in da.entries() {
                        for b in 0..rj {
                            let tgt = offsets[s - 1][i - 1] + r * rj_t + b;
                            m.add_to(tgt, src(c, b), v);
                        }
                    }
                }
                if j >= 1 {
                    let db = &other.d[j];
                    let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                    let rj_t = other.rank(j - 1);
                    for a in 0..ri {
                        for (r, c, v) in db.entries() {
                            let tgt = offsets[s - 1][i] + a * rj_t + r;
                            m.add_to(tgt, src(a, c), &(&sign * v));
                        }
                    }
                }
            }
            maps.push(m);
        }
        ChainComplex::new(ranks, maps).expect("tensor product of complexes is a complex")
    }
}

/// `H_k = ker d_k / im d_{k+1}` for every stored degree.
pub fn chain_homology(c: &ChainComplex) -> Result<GradedGroup> {
    c.check_square_zero()?;
    let n = c.len();
    let divisors: Vec<Vec<BigInt>> = (0..=n)
        .map(|k| {
            if k == 0 || k >= n {
                Vec::new()
            } else {
                elementary_divisors(c.d_ref(k).unwrap())
            }
        })
        .collect();
    Ok((0..n)
        .map(|k| {
            let rk_out = divisors[k].len();
            let inc = &divisors[k + 1];
            let free = c.rank(k) - rk_out - inc.len();
            let torsion = inc.iter().filter(|d| !d.is_one()).cloned().collect();
            AbGroup { free, torsion }
        })
        .collect())
}
