//! The spectral sequence of a first-quadrant double complex, filtered by columns.
//!
//! Pages are computed as explicit subquotients of the total complex `T`:
//!
//! ```text
//! Z^r_p   = { x ∈ F_p T : D x ∈ F_{p-r} T }
//! E^r_p   = Z^r_p / (Z^{r-1}_{p-1} + D Z^{r-1}_{p+r-1})
//! ```
//!
//! with `Z^{-1}_p = F_p T`. Everything is exact over ℤ.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

use super::chain::AbGroup;
use super::double::DoubleComplex;
use super::lattice::{image_lattice, kernel_basis, quotient_invariants, Lattice, Vector};
use super::matrix::IntMatrix;
use super::snf::{elementary_divisors, smith_normal_form};
use crate::error::{Error, Result};

/// Caps on problem size; exceeding one is an error rather than a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_total_rank: usize,
    pub max_pages: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_total_rank: 4000,
            max_pages: 64,
        }
    }
}

impl Limits {
    pub fn check_rank(&self, rank: usize) -> Result<()> {
        if rank > self.max_total_rank {
            return Err(Error::SizeLimit(format!(
                "total rank {rank} exceeds the cap {}",
                self.max_total_rank
            )));
        }
        Ok(())
    }
}

/// A subquotient `num / den` with a chosen generating set.
#[derive(Clone, Debug)]
struct Subquotient {
    num: Lattice,
    /// `V` from the Smith form of the coordinates of `den` in `num`.
    v: IntMatrix,
    /// Invariant factors of that Smith form, padded with zeros to `num.rank()`.
    orders: Vec<BigInt>,
    /// Indices (into the Smith coordinates) of the generators, free ones first.
    gens: Vec<usize>,
    group: AbGroup,
    reps: Vec<Vector>,
}

impl Subquotient {
    fn new(num: Lattice, den: &Lattice) -> Result<Self> {
        let k = num.rank();
        let coords: Vec<Vector> = den
            .basis()
            .iter()
            .map(|b| {
                num.coords(b)
                    .ok_or_else(|| Error::Inconsistent("denominator not inside numerator".into()))
            })
            .collect::<Result<_>>()?;
        let (v, v_inv, diag) = if coords.is_empty() {
            (IntMatrix::identity(k), IntMatrix::identity(k), Vec::new())
        } else {
            let s = smith_normal_form(&IntMatrix::from_dense(coords.len(), k, &coords));
            (s.v, s.v_inv, s.diag)
        };
        let mut orders = diag.clone();
        orders.resize(k, BigInt::zero());
        let mut gens: Vec<usize> = (diag.len()..k).collect();
        gens.extend((0..diag.len()).filter(|&i| !diag[i].is_one()));
        let group = AbGroup {
            free: k - diag.len(),
            torsion: diag.iter().filter(|d| !d.is_one()).cloned().collect(),
        };
        let reps = gens
            .iter()
            .map(|&i| {
                let row: Vector = (0..k).map(|j| v_inv.get(i, j)).collect();
                num.combine(&row)
            })
            .collect();
        Ok(Subquotient {
            num,
            v,
            orders,
            gens,
            group,
            reps,
        })
    }

    /// Coordinates of the class of `x ∈ num` on the generators; torsion
    /// coordinates reduced into `[0, order)`.
    fn class_of(&self, x: &[BigInt]) -> Result<Vector> {
        let c = self
            .num
            .coords(x)
            .ok_or_else(|| Error::Inconsistent("element outside the page numerator".into()))?;
        let k = c.len();
        let smith: Vector = (0..k)
            .map(|j| (0..k).fold(BigInt::zero(), |acc, i| acc + &c[i] * self.v.get(i, j)))
            .collect();
        Ok(self
            .gens
            .iter()
            .map(|&i| {
                let o = &self.orders[i];
                if o.is_zero() {
                    smith[i].clone()
                } else {
                    num_integer::Integer::mod_floor(&smith[i], o)
                }
            })
            .collect())
    }
}

/// One page `E^r` with its differential `d^r` of bidegree `(-r, r-1)`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralPage {
    pub r: usize,
    /// `(p, q) -> E^r_{p,q}` for every grid position.
    pub entries: BTreeMap<(usize, usize), AbGroup>,
    /// `d^r` out of `(p, q)`, rows indexed by the target generators.
    pub differentials: BTreeMap<(usize, usize), IntMatrix>,
    /// Set on the last page, which equals `E^∞`.
    pub is_infinity: bool,
}

impl SpectralPage {
    pub fn entry(&self, p: usize, q: usize) -> AbGroup {
        self.entries.get(&(p, q)).cloned().unwrap_or_default()
    }

    pub fn all_differentials_zero(&self) -> bool {
        self.differentials.values().all(|m| m.is_zero())
    }
}

/// Result of running the spectral sequence together with the total homology.
#[derive(Clone, Debug)]
pub struct SpectralRun {
    pub pages: Vec<SpectralPage>,
    /// `H_s(Tot)` for `s = 0..=max_total_degree`.
    pub total: Vec<AbGroup>,
    /// `filtration[s][p] = F_p H_s`, the image of the homology of the columns `≤ p`.
    pub filtration: Vec<Vec<AbGroup>>,
    /// Smallest `r` from which all differentials vanish.
    pub stable_from: usize,
    p_len: usize,
    d: Vec<IntMatrix>,
    /// `levels[s][p + 1] = F_p Z_s + B_s`; `levels[s][0] = B_s`.
    levels: Vec<Vec<Lattice>>,
    cycles: Vec<Lattice>,
    quotients: HashMap<(usize, usize, usize), Subquotient>,
}

struct Engine<'a> {
    b: &'a DoubleComplex,
    d: Vec<IntMatrix>,
    zcache: HashMap<(i64, i64, usize), Lattice>,
}

impl<'a> Engine<'a> {
    fn filt_len(&self, s: usize, p: i64) -> usize {
        if p < 0 {
            return 0;
        }
        self.b
            .total_blocks(s)
            .iter()
            .filter(|blk| (blk.0 as i64) <= p)
            .map(|blk| blk.3)
            .sum()
    }

    fn dim(&self, s: usize) -> usize {
        self.b.total_dim(s)
    }

    fn apply_d(&self, s: usize, x: &[BigInt]) -> Vector {
        if s == 0 {
            return Vec::new();
        }
        self.d[s].apply(x)
    }

    /// `Z^r_p` in total degree `s`; `r = -1` gives `F_p`.
    fn z(&mut self, r: i64, p: i64, s: usize) -> Lattice {
        let key = (r, p, s);
        if let Some(l) = self.zcache.get(&key) {
            return l.clone();
        }
        let n = self.dim(s);
        let f = self.filt_len(s, p);
        let lat = if p < 0 || f == 0 {
            Lattice::zero(n)
        } else if r < 0 || s == 0 {
            Lattice::new(n, &(0..f).map(|i| super::lattice::unit_vec(n, i)).collect::<Vec<_>>())
        } else {
            let lo = self.filt_len(s - 1, p - r);
            let rows: Vec<usize> = (lo..self.dim(s - 1)).collect();
            let cols: Vec<usize> = (0..f).collect();
            let m = self.d[s].select_rows(&rows).select_cols(&cols);
            let ker: Vec<Vector> = if rows.is_empty() {
                (0..f).map(|i| super::lattice::unit_vec(f, i)).collect()
            } else {
                kernel_basis(&m)
            };
            let padded: Vec<Vector> = ker
                .into_iter()
                .map(|mut v| {
                    v.resize(n, BigInt::zero());
                    v
                })
                .collect();
            Lattice::new(n, &padded)
        };
        self.zcache.insert(key, lat.clone());
        lat
    }

    fn image(&self, s: usize, l: &Lattice) -> Lattice {
        let n = self.dim(s - 1);
        let imgs: Vec<Vector> = l.basis().iter().map(|x| self.apply_d(s, x)).collect();
        Lattice::new(n, &imgs)
    }

    fn page_entry(&mut self, r: i64, p: usize, s: usize) -> Result<Subquotient> {
        let num = self.z(r, p as i64, s);
        let mut den = self.z(r - 1, p as i64 - 1, s);
        if s < self.b.max_total_degree() {
            let src = self.z(r - 1, p as i64 + r - 1, s + 1);
            den = den.sum(&self.image(s + 1, &src));
        }
        Subquotient::new(num, &den)
    }
}

/// Runs the spectral sequence of `b` to `E^∞` and computes the total homology
/// with its column filtration.
pub fn run_spectral_sequence(b: &DoubleComplex, limits: &Limits) -> Result<SpectralRun> {
    b.validate()?;
    limits.check_rank(b.total_rank())?;
    let p_len = b.p_len();
    let q_len = b.q_len();
    let smax = b.max_total_degree();
    let d: Vec<IntMatrix> = (0..=smax + 1).map(|s| b.total_d(s.min(smax + 1))).collect();
    let mut eng = Engine {
        b,
        d,
        zcache: HashMap::new(),
    };
    let last = p_len.max(1);
    if last + 1 > limits.max_pages {
        return Err(Error::SizeLimit(format!(
            "{} pages needed, cap is {}",
            last + 1,
            limits.max_pages
        )));
    }
    let mut quotients: HashMap<(usize, usize, usize), Subquotient> = HashMap::new();
    let mut pages = Vec::new();
    for r in 0..=last {
        let mut entries = BTreeMap::new();
        for p in 0..p_len {
            for q in 0..q_len {
                let sq = eng.page_entry(r as i64, p, p + q)?;
                entries.insert((p, q), sq.group.clone());
                quotients.insert((r, p, q), sq);
            }
        }
        let mut differentials = BTreeMap::new();
        for p in 0..p_len {
            for q in 0..q_len {
                let src = &quotients[&(r, p, q)];
                let tq = q + r;
                let target = if p >= r && tq >= 1 && tq - 1 < q_len {
                    quotients.get(&(r, p - r, tq - 1))
                } else {
                    None
                };
                let s = p + q;
                let rows = target.map_or(0, |t| t.gens.len());
                let mut m = IntMatrix::zeros(rows, src.reps.len());
                for (j, z) in src.reps.iter().enumerate() {
                    let dz = eng.apply_d(s, z);
                    if let Some(t) = target {
                        for (i, c) in t.class_of(&dz)?.into_iter().enumerate() {
                            m.set(i, j, c);
                        }
                    }
                }
                differentials.insert((p, q), m);
            }
        }
        pages.push(SpectralPage {
            r,
            entries,
            differentials,
            is_infinity: r == last,
        });
    }
    for r in 0..last {
        check_next_page(&pages[r], &pages[r + 1], q_len)?;
    }
    let stable_from = (0..=last)
        .rev()
        .take_while(|&r| pages[r].all_differentials_zero())
        .last()
        .unwrap_or(last);

    // Total homology and its filtration.
    let mut total = Vec::new();
    let mut filtration = Vec::new();
    let mut levels = Vec::new();
    let mut cycles = Vec::new();
    for s in 0..=smax {
        let kd = &eng.d[s];
        let n = eng.dim(s);
        let ker = if s == 0 {
            Lattice::full(n)
        } else {
            Lattice::new(n, &kernel_basis(kd))
        };
        let bnd = if s < smax {
            image_lattice(&eng.d[s + 1])
        } else {
            Lattice::zero(n)
        };
        let (free, torsion) = quotient_invariants(&ker, &bnd);
        total.push(AbGroup { free, torsion });
        let mut lv = vec![bnd.clone()];
        let mut fil = Vec::new();
        for p in 0..p_len {
            let zp = eng.z(last as i64 + 1, p as i64, s);
            let l = zp.sum(&bnd);
            let (f, t) = quotient_invariants(&l, &bnd);
            fil.push(AbGroup { free: f, torsion: t });
            lv.push(l);
        }
        for p in 0..p_len {
            let q = s as i64 - p as i64;
            let (f, t) = quotient_invariants(&lv[p + 1], &lv[p]);
            let graded = AbGroup { free: f, torsion: t };
            let einf = if q >= 0 && (q as usize) < q_len {
                pages[last].entry(p, q as usize)
            } else {
                AbGroup::zero()
            };
            if graded != einf {
                return Err(Error::Inconsistent(format!(
                    "E^∞ at ({p},{q}) is {einf} but the filtration quotient is {graded}"
                )));
            }
        }
        filtration.push(fil);
        levels.push(lv);
        cycles.push(ker);
    }
    Ok(SpectralRun {
        pages,
        total,
        filtration,
        stable_from,
        p_len,
        d: eng.d,
        levels,
        cycles,
        quotients,
    })
}

/// `E^{r+1}_{p,q}` must be the homology of `(E^r, d^r)` at `(p,q)`.
fn check_next_page(cur: &SpectralPage, next: &SpectralPage, q_len: usize) -> Result<()> {
    let r = cur.r;
    for (&(p, q), g) in &cur.entries {
        let out = &cur.differentials[&(p, q)];
        let tgt = if p >= r && q + r >= 1 && q + r - 1 < q_len {
            cur.entry(p - r, q + r - 1)
        } else {
            AbGroup::zero()
        };
        let (inc, src) = if q + 1 >= r && q + 1 - r < q_len && cur.entries.contains_key(&(p + r, q + 1 - r)) {
            (
                cur.differentials[&(p + r, q + 1 - r)].clone(),
                cur.entry(p + r, q + 1 - r),
            )
        } else {
            (IntMatrix::zeros(gen_count(g), 0), AbGroup::zero())
        };
        let h = homology_at(g, out, &tgt, &inc, &src)?;
        if h != next.entry(p, q) {
            return Err(Error::Inconsistent(format!(
                "E^{} at ({p},{q}) is {} but H(E^{r}, d^{r}) is {h}",
                r + 1,
                next.entry(p, q)
            )));
        }
    }
    Ok(())
}

fn gen_count(g: &AbGroup) -> usize {
    g.free + g.torsion.len()
}

fn orders(g: &AbGroup) -> Vec<BigInt> {
    let mut o = vec![BigInt::zero(); g.free];
    o.extend(g.torsion.iter().cloned());
    o
}

/// Homology of `src --inc--> g --out--> tgt` for groups given by generators
/// with orders (free generators first).
fn homology_at(
    g: &AbGroup,
    out: &IntMatrix,
    tgt: &AbGroup,
    inc: &IntMatrix,
    src: &AbGroup,
) -> Result<AbGroup> {
    let k = gen_count(g);
    let kt = gen_count(tgt);
    let _ = src;
    // Kernel: x ∈ ℤ^k with out·x ∈ relations of tgt.
    let to = orders(tgt);
    let mut block = IntMatrix::zeros(kt, k + kt);
    for (i, j, v) in out.entries() {
        block.set(i, j, v.clone());
    }
    for (i, o) in to.iter().enumerate() {
        block.set(i, k + i, -o.clone());
    }
    let ker: Vec<Vector> = if kt == 0 {
        (0..k).map(|i| super::lattice::unit_vec(k, i)).collect()
    } else {
        kernel_basis(&block)
            .into_iter()
            .map(|mut v| {
                v.truncate(k);
                v
            })
            .collect()
    };
    let kl = Lattice::new(k, &ker);
    let mut im: Vec<Vector> = (0..inc.cols()).map(|j| inc.column(j)).collect();
    for (i, o) in orders(g).iter().enumerate() {
        if !o.is_zero() {
            let mut v = vec![BigInt::zero(); k];
            v[i] = o.clone();
            im.push(v);
        }
    }
    let il = Lattice::new(k, &im);
    if !kl.contains_lattice(&il) {
        return Err(Error::Inconsistent("d^r ∘ d^r != 0 on a page".into()));
    }
    let (free, torsion) = quotient_invariants(&kl, &il);
    Ok(AbGroup { free, torsion })
}

impl SpectralRun {
    pub fn last_page(&self) -> &SpectralPage {
        self.pages.last().expect("at least one page")
    }

    pub fn e(&self, r: usize, p: usize, q: usize) -> AbGroup {
        let r = r.min(self.pages.len() - 1);
        self.pages[r].entry(p, q)
    }

    pub fn e_infinity(&self, p: usize, q: usize) -> AbGroup {
        self.last_page().entry(p, q)
    }

    pub fn total_free_ranks(&self) -> Vec<usize> {
        self.total.iter().map(|g| g.free).collect()
    }

    /// Smallest `p` with `v ∈ F_p Z_s + B_s`; `None` when `v` is a boundary.
    pub fn filtration_degree(&self, s: usize, v: &[BigInt]) -> Result<Option<usize>> {
        if !self.cycles[s].contains(v) {
            return Err(Error::Invalid(format!("vector is not a cycle in degree {s}")));
        }
        if self.levels[s][0].contains(v) {
            return Ok(None);
        }
        Ok((0..self.p_len).find(|&p| self.levels[s][p + 1].contains(v)))
    }

    /// Whether `v` and `w` agree modulo `F_{p-1}`, i.e. have the same image in `E^∞_p`.
    pub fn same_leading_term(&self, s: usize, p: usize, v: &[BigInt], w: &[BigInt]) -> bool {
        let diff: Vector = v.iter().zip(w).map(|(a, b)| a - b).collect();
        self.levels[s][p].contains(&diff)
    }

    /// Coordinates of the class of a total-degree-`s` chain `z` in `E^r_{p,s-p}`.
    pub fn page_class(&self, r: usize, p: usize, s: usize, z: &[BigInt]) -> Result<Vector> {
        let q = s.checked_sub(p).ok_or_else(|| Error::Invalid("q < 0".into()))?;
        let sq = self
            .quotients
            .get(&(r, p, q))
            .ok_or_else(|| Error::Invalid(format!("no entry E^{r}_{{{p},{q}}}")))?;
        sq.class_of(z)
    }

    /// Representatives of the generators of `E^r_{p,q}` as total chains.
    pub fn page_generators(&self, r: usize, p: usize, q: usize) -> Vec<Vector> {
        self.quotients
            .get(&(r, p, q))
            .map(|s| s.reps.clone())
            .unwrap_or_default()
    }

    pub fn total_differential(&self, s: usize) -> &IntMatrix {
        &self.d[s]
    }
}

/// Rank of a differential over ℚ restricted to the free generators.
pub fn rational_rank(m: &IntMatrix, src: &AbGroup, tgt: &AbGroup) -> usize {
    let rows: Vec<usize> = (0..tgt.free).collect();
    let cols: Vec<usize> = (0..src.free).collect();
    elementary_divisors(&m.select_rows(&rows).select_cols(&cols)).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::chain::{chain_homology, free_ranks};
    use crate::homalg::double::{cubical_space, subdivided_space, tensor_over_group, FixedFactor};
    use crate::homalg::ring::CubeModel;

    #[test]
    fn plane_mod_translations_is_the_torus() {
        let c = cubical_space(2, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        let run = run_spectral_sequence(&b, &Limits::default()).unwrap();
        let e1: Vec<usize> = (0..3).map(|p| run.e(1, p, 0).free).collect();
        assert_eq!(e1, vec![1, 2, 1]);
        assert!(run.pages[1].all_differentials_zero());
        assert_eq!(run.total_free_ranks(), vec![1, 2, 1]);
    }

    #[test]
    fn single_entry_is_stable_from_the_start() {
        let b = DoubleComplex::new(vec![vec![0, 0], vec![0, 3]]);
        let run = run_spectral_sequence(&b, &Limits::default()).unwrap();
        assert_eq!(run.e(0, 1, 1), AbGroup::free(3));
        assert_eq!(run.e_infinity(1, 1), AbGroup::free(3));
    }

    #[test]
    fn subdivided_torus_has_nonzero_d1() {
        let c = subdivided_space(2, 2, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        let run = run_spectral_sequence(&b, &Limits::default()).unwrap();
        assert!(!run.pages[1].all_differentials_zero());
        assert_eq!(run.total_free_ranks(), vec![1, 2, 1]);
        let direct = chain_homology(&b.total_complex()).unwrap();
        assert_eq!(free_ranks(&direct), vec![1, 2, 1]);
    }

    #[test]
    fn line_with_trivial_second_factor() {
        let c = cubical_space(1, FixedFactor::FreeAbelian(1));
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        let run = run_spectral_sequence(&b, &Limits::default()).unwrap();
        for p in 0..2 {
            assert_eq!(run.e(1, p, 0), AbGroup::free(1));
            assert_eq!(run.e(1, p, 1), AbGroup::free(1));
        }
        assert_eq!(run.total_free_ranks(), vec![1, 2, 1]);
    }

    #[test]
    fn torsion_appears_on_e2() {
        // ℤ --2--> ℤ horizontally in row 0.
        let mut b = DoubleComplex::new(vec![vec![1], vec![1]]);
        b.set_h(1, 0, IntMatrix::from_i64(&[vec![2]])).unwrap();
        let run = run_spectral_sequence(&b, &Limits::default()).unwrap();
        assert_eq!(run.e(1, 0, 0), AbGroup::free(1));
        assert_eq!(run.e(2, 0, 0).torsion, vec![BigInt::from(2)]);
        assert!(run.e(2, 1, 0).is_zero());
        assert_eq!(run.total[0].torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn staircase_gives_d2() {
        // x(2,0) -> y(1,0) <- w(1,1) -> t(0,1)
        let mut b = DoubleComplex::new(vec![vec![0, 1], vec![1, 1], vec![1, 0]]);
        b.set_h(2, 0, IntMatrix::from_i64(&[vec![1]])).unwrap();
        b.set_v(1, 1, IntMatrix::from_i64(&[vec![-1]])).unwrap();
        b.set_h(1, 1, IntMatrix::from_i64(&[vec![3]])).unwrap();
        let run = run_spectral_sequence(&b, &Limits::default()).unwrap();
        assert_eq!(run.e(2, 2, 0), AbGroup::free(1));
        assert_eq!(run.e(2, 0, 1), AbGroup::free(1));
        assert!(!run.pages[2].all_differentials_zero());
        assert!(run.e_infinity(2, 0).is_zero());
        assert_eq!(run.e_infinity(0, 1).torsion, vec![BigInt::from(3)]);
    }

    #[test]
    fn filtration_degree_of_classes() {
        let c = cubical_space(2, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).unwrap();
        let run = run_spectral_sequence(&b, &Limits::default()).unwrap();
        let top = vec![BigInt::one()];
        assert_eq!(run.filtration_degree(2, &top).unwrap(), Some(2));
    }
}
