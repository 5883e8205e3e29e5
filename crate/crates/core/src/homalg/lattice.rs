//! Subgroups of ℤⁿ in Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;

pub type Vector = Vec<BigInt>;

pub fn zero_vec(n: usize) -> Vector {
    vec![BigInt::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = BigInt::one();
    v
}

pub fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vec_from_i64(v: &[i64]) -> Vector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Row-style Hermite normal form of the span of `gens`.
///
/// Rows are in echelon form with strictly increasing pivot columns,
/// positive pivots, and entries above each pivot reduced into `[0, pivot)`.
pub fn hnf_rows(gens: &[Vector], dim: usize) -> Vec<Vector> {
    let mut rows: Vec<Vector> = gens
        .iter()
        .filter(|g| !is_zero_vec(g))
        .map(|g| {
            assert_eq!(g.len(), dim, "generator length mismatch");
            g.clone()
        })
        .collect();
    let mut r = 0;
    for c in 0..dim {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()).then(i.cmp(&j)));
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (lo, hi) = rows.split_at_mut(i);
                for (x, y) in hi[0].iter_mut().zip(lo[r].iter()) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        for i in 0..r {
            let q = rows[i][c].div_floor(&rows[r][c]);
            if q.is_zero() {
                continue;
            }
            let (lo, hi) = rows.split_at_mut(r);
            for (x, y) in lo[i].iter_mut().zip(hi[0].iter()) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows.retain(|v| !is_zero_vec(v));
    rows
}

/// A subgroup of ℤⁿ stored by its Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn new(dim: usize, gens: &[Vector]) -> Self {
        let basis = hnf_rows(gens, dim);
        let pivots = basis
            .iter()
            .map(|b| b.iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        Lattice { dim, basis, pivots }
    }

    pub fn zero(dim: usize) -> Self {
        Lattice::new(dim, &[])
    }

    pub fn full(dim: usize) -> Self {
        let gens: Vec<Vector> = (0..dim).map(|i| unit_vec(dim, i)).collect();
        Lattice::new(dim, &gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Integer coordinates of `v` in the Hermite basis, if `v` lies in the lattice.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vector> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let mut w: Vector = v.to_vec();
        let mut out = Vec::with_capacity(self.basis.len());
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let (q, r) = w[p].div_rem(&b[p]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, y) in w.iter_mut().zip(b.iter()) {
                    *x -= &q * y;
                }
            }
            out.push(q);
        }
        if is_zero_vec(&w) {
            Some(out)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coords(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        Lattice::new(self.dim, &gens)
    }

    pub fn combine(&self, coeffs: &[BigInt]) -> Vector {
        let mut out = zero_vec(self.dim);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in out.iter_mut().zip(b) {
                *x += c * y;
            }
        }
        out
    }

    /// Whether the lattice is a direct summand of ℤⁿ.
    pub fn is_saturated(&self) -> bool {
        if self.basis.is_empty() {
            return true;
        }
        let m = IntMatrix::from_dense(self.rank(), self.dim, &self.basis);
        smith_normal_form(&m).diag.iter().all(|d| d.is_one())
    }

    /// Reduces `v` modulo a full-rank lattice into the box `0 <= v[p] < pivot`.
    pub fn reduce_mod(&self, v: &[BigInt]) -> Vector {
        assert_eq!(self.rank(), self.dim, "reduction needs a full-rank lattice");
        let mut w: Vector = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let q = w[p].div_floor(&b[p]);
            if !q.is_zero() {
                for (x, y) in w.iter_mut().zip(b.iter()) {
                    *x -= &q * y;
                }
            }
        }
        w
    }

    /// Index of a full-rank lattice: the product of its pivots.
    pub fn index(&self) -> BigInt {
        assert_eq!(self.rank(), self.dim, "index needs a full-rank lattice");
        self.basis
            .iter()
            .zip(&self.pivots)
            .map(|(b, &p)| b[p].clone())
            .product()
    }

    /// Coset representatives of ℤⁿ / L in the reduced box, lexicographic order.
    pub fn coset_reps(&self) -> Vec<Vec<i64>> {
        assert_eq!(self.rank(), self.dim, "cosets need a full-rank lattice");
        let bounds: Vec<i64> = self
            .basis
            .iter()
            .zip(&self.pivots)
            .map(|(b, &p)| i64::try_from(&b[p]).expect("index too large"))
            .collect();
        let mut out = vec![Vec::new()];
        for &bd in &bounds {
            let mut next = Vec::new();
            for prefix in &out {
                for k in 0..bd {
                    let mut v: Vec<i64> = prefix.clone();
                    v.push(k);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }
}

/// ℤ-basis of the kernel of `a` (column vectors `v` with `a v = 0`).
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vector> {
    let n = a.cols();
    if a.is_zero() {
        return (0..n).map(|i| unit_vec(n, i)).collect();
    }
    let s = smith_normal_form(a);
    (s.rank()..n).map(|j| s.v.column(j)).collect()
}

/// The image lattice of `a` inside ℤ^rows.
pub fn image_lattice(a: &IntMatrix) -> Lattice {
    let cols: Vec<Vector> = (0..a.cols()).map(|j| a.column(j)).collect();
    Lattice::new(a.rows(), &cols)
}

/// Invariants of `outer / inner` for lattices `inner ⊆ outer`:
/// free rank and torsion coefficients greater than one.
pub fn quotient_invariants(outer: &Lattice, inner: &Lattice) -> (usize, Vec<BigInt>) {
    let k = outer.rank();
    let coords: Vec<Vector> = inner
        .basis()
        .iter()
        .map(|b| outer.coords(b).expect("inner lattice not contained in outer"))
        .collect();
    if coords.is_empty() {
        return (k, Vec::new());
    }
    let m = IntMatrix::from_dense(coords.len(), k, &coords);
    let diag = super::snf::elementary_divisors(&m);
    let torsion = diag.iter().filter(|d| !d.is_one()).cloned().collect();
    (k - diag.len(), torsion)
}

/// One integer solution of `a v = b`, or `None` if there is none.
/// When `a` has full column rank the solution is unique.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vector> {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    let n = a.cols();
    if a.is_zero() {
        return b.iter().all(Zero::is_zero).then(|| zero_vec(n));
    }
    let s = smith_normal_form(a);
    let y = s.u.apply(b);
    let mut z = zero_vec(n);
    for (i, yi) in y.iter().enumerate() {
        if i < s.rank() {
            let (q, r) = yi.div_rem(&s.diag[i]);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(s.v.apply(&z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vector {
        vec_from_i64(x)
    }

    #[test]
    fn integer_solutions() {
        let a = IntMatrix::from_i64(&[vec![1, 0], vec![0, 2], vec![1, 1]]);
        assert_eq!(solve_integer(&a, &v(&[3, 4, 5])), Some(v(&[3, 2])));
        assert_eq!(solve_integer(&a, &v(&[3, 3, 5])), None);
        assert_eq!(solve_integer(&a, &v(&[3, 4, 6])), None);
    }

    #[test]
    fn hermite_basis_is_canonical() {
        let a = Lattice::new(2, &[v(&[2, 4]), v(&[6, 8])]);
        let b = Lattice::new(2, &[v(&[2, 0]), v(&[0, 4]), v(&[4, 4])]);
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[v(&[2, 0]), v(&[0, 4])]);
    }

    #[test]
    fn coordinates_and_membership() {
        let l = Lattice::new(3, &[v(&[1, 1, 0]), v(&[0, 2, 2])]);
        assert!(l.contains(&v(&[1, 3, 2])));
        assert!(!l.contains(&v(&[0, 1, 1])));
        let c = l.coords(&v(&[2, 6, 4])).unwrap();
        assert_eq!(l.combine(&c), v(&[2, 6, 4]));
    }

    #[test]
    fn kernel_of_rank_one_map() {
        let a = IntMatrix::from_i64(&[vec![1, 2, 3]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 2);
        for x in &k {
            assert!(is_zero_vec(&a.apply(x)));
        }
        let l = Lattice::new(3, &k);
        assert!(l.is_saturated());
    }

    #[test]
    fn cosets_of_index_six() {
        let l = Lattice::new(2, &[v(&[2, 1]), v(&[0, 3])]);
        assert_eq!(l.index(), BigInt::from(6));
        let reps = l.coset_reps();
        assert_eq!(reps.len(), 6);
        let r = l.reduce_mod(&v(&[5, -7]));
        assert!(l.contains(&[&v(&[5, -7])[0] - &r[0], &v(&[5, -7])[1] - &r[1]]));
    }

    #[test]
    fn quotient_by_sublattice() {
        let outer = Lattice::full(2);
        let inner = Lattice::new(2, &[v(&[2, 0])]);
        assert_eq!(quotient_invariants(&outer, &inner), (1, vec![BigInt::from(2)]));
    }
}
