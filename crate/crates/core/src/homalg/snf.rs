//! Smith normal form with tracked unimodular transforms.
//!
//! Pivoting picks the nonzero entry of smallest absolute value in the
//! remaining block, ties broken by (row, column). Results are fully
//! deterministic.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `u * a * v == d`, with `u_inv`, `v_inv` the inverses of `u`, `v`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub diag: Vec<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

type Dense = Vec<Vec<BigInt>>;

fn ident(n: usize) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn swap_cols(m: &mut Dense, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row[dst] += c * row[src]
fn row_axpy(m: &mut Dense, dst: usize, src: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    let (s, d) = if src < dst {
        let (lo, hi) = m.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x += c * y;
        }
    }
}

/// col[dst] += c * col[src]
fn col_axpy(m: &mut Dense, dst: usize, src: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let add = c * &row[src];
            row[dst] += add;
        }
    }
}

struct Work {
    a: Dense,
    track: bool,
    u: Dense,
    u_inv: Dense,
    v: Dense,
    v_inv: Dense,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if self.track {
            self.u.swap(i, j);
            swap_cols(&mut self.u_inv, i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        swap_cols(&mut self.a, i, j);
        if self.track {
            swap_cols(&mut self.v, i, j);
            self.v_inv.swap(i, j);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        row_axpy(&mut self.a, dst, src, c);
        if self.track {
            row_axpy(&mut self.u, dst, src, c);
            col_axpy(&mut self.u_inv, src, dst, &-c);
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        col_axpy(&mut self.a, dst, src, c);
        if self.track {
            col_axpy(&mut self.v, dst, src, c);
            row_axpy(&mut self.v_inv, src, dst, &-c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        if self.track {
            for x in self.u[i].iter_mut() {
                *x = -std::mem::take(x);
            }
            for row in self.u_inv.iter_mut() {
                row[i] = -std::mem::take(&mut row[i]);
            }
        }
    }
}

fn pivot(a: &Dense, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let m = x.abs();
            match &best {
                Some((_, _, b)) if *b <= m => {}
                _ => best = Some((i, j, m)),
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn reduce(a: &IntMatrix, track: bool) -> (Work, Vec<BigInt>) {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work {
        a: a.to_dense(),
        track,
        u: if track { ident(m) } else { Vec::new() },
        u_inv: if track { ident(m) } else { Vec::new() },
        v: if track { ident(n) } else { Vec::new() },
        v_inv: if track { ident(n) } else { Vec::new() },
    };
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = pivot(&w.a, t) else {
                return (w, diag);
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.a[t][t].clone();
            let mut clean = true;
            for i in t + 1..m {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&p);
                w.add_row(i, t, &-q);
                if !w.a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&p);
                w.add_col(j, t, &-q);
                if !w.a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| {
                w.a[i][t + 1..].iter().any(|x| !x.mod_floor(&p).is_zero())
            });
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        diag.push(w.a[t][t].clone());
    }
    (w, diag)
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let (w, diag) = reduce(a, true);
    Smith {
        u: IntMatrix::from_dense(m, m, &w.u),
        u_inv: IntMatrix::from_dense(m, m, &w.u_inv),
        d: IntMatrix::from_dense(m, n, &w.a),
        v: IntMatrix::from_dense(n, n, &w.v),
        v_inv: IntMatrix::from_dense(n, n, &w.v_inv),
        diag,
    }
}

/// Nonzero invariant factors only; skips transform bookkeeping.
///
/// Unit pivots are eliminated sparsely first (each contributes a factor 1);
/// the dense reduction only sees what is left.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    if a.is_zero() {
        return Vec::new();
    }
    let (units, rest) = eliminate_units(a);
    let mut diag = vec![BigInt::one(); units];
    if !rest.is_zero() {
        diag.extend(reduce(&rest, false).1);
    }
    diag
}

/// Removes unit pivots by row operations, choosing the pivot of least
/// Markowitz cost each time. Returns their number and the remaining block.
fn eliminate_units(a: &IntMatrix) -> (usize, IntMatrix) {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = (0..a.rows()).map(|i| a.row(i).clone()).collect();
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); a.cols()];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.keys() {
            cols[j].insert(i);
        }
    }
    let mut units = 0;
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if r.is_empty() || best.is_some_and(|b| b.0 <= (r.len() - 1)) {
                continue;
            }
            for (&j, v) in r {
                if v.abs().is_one() {
                    let cost = (r.len() - 1) * (cols[j].len() - 1);
                    if best.map_or(true, |b| cost < b.0) {
                        best = Some((cost, i, j));
                    }
                }
            }
            if best.is_some_and(|b| b.0 == 0) {
                break;
            }
        }
        let Some((_, r, c)) = best else { break };
        let prow = std::mem::take(&mut rows[r]);
        let pv = prow[&c].clone();
        for &j in prow.keys() {
            cols[j].remove(&r);
        }
        let others: Vec<usize> = cols[c].iter().copied().collect();
        for i in others {
            // pv = ±1, so the multiplier is exact.
            let f = &rows[i][&c] * &pv;
            for (&j, v) in &prow {
                let e = rows[i].entry(j).or_insert_with(BigInt::zero);
                *e -= &f * v;
                if e.is_zero() {
                    rows[i].remove(&j);
                    cols[j].remove(&i);
                } else {
                    cols[j].insert(i);
                }
            }
        }
        units += 1;
    }
    let live_rows: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].is_empty()).collect();
    let live_cols: Vec<usize> = (0..cols.len()).filter(|&j| !cols[j].is_empty()).collect();
    let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let mut rest = IntMatrix::zeros(live_rows.len(), live_cols.len());
    for (k, &i) in live_rows.iter().enumerate() {
        for (j, v) in &rows[i] {
            rest.set(k, col_pos[j], v.clone());
        }
    }
    (units, rest)
}

pub fn rank(a: &IntMatrix) -> usize {
    elementary_divisors(a).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> Smith {
        let s = smith_normal_form(a);
        let uav = s.u.mul(a).unwrap().mul(&s.v).unwrap();
        assert_eq!(uav, s.d);
        let m = a.rows();
        let n = a.cols();
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(m));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(n));
        for (i, j, _) in s.d.entries() {
            assert_eq!(i, j);
        }
        for w in s.diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn sparse_path_agrees_with_dense() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (m, n) = (rng.gen_range(1..7), rng.gen_range(1..7));
            let rows: Vec<Vec<i64>> = (0..m)
                .map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-3..=3) }).collect())
                .collect();
            let a = IntMatrix::from_i64(&rows);
            assert_eq!(elementary_divisors(&a), smith_normal_form(&a).diag, "{rows:?}");
        }
    }

    #[test]
    fn two_by_two_example() {
        let s = check(&IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn identity_and_zero() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.diag, vec![BigInt::one(); 3]);
        let z = check(&IntMatrix::zeros(2, 3));
        assert!(z.diag.is_empty());
        assert!(z.d.is_zero());
    }

    #[test]
    fn divisibility_fixup() {
        // diag(2,3) is diagonal but not in Smith form.
        let s = check(&IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn rectangular() {
        let s = check(&IntMatrix::from_i64(&[
            vec![1, 2, 3],
            vec![4, 5, 6],
            vec![7, 8, 9],
            vec![2, 2, 2],
        ]));
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(1)]);
        let s = check(&IntMatrix::from_i64(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]));
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(3)]);
    }
}
