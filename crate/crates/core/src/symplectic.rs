//! The symplectic lattice H₁(S_g; ℤ) ≅ ℤ^{2g}, transvections, and splittings.
//!
//! Coordinates are ordered `e₀, f₀, e₁, f₁, …` with `eᵢ·fᵢ = 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Check;
use crate::homalg::lattice::{kernel_basis, unit_vec, zero_vec, Lattice, Vector};
use crate::homalg::matrix::IntMatrix;
use crate::homalg::snf::smith_normal_form;

pub type HVec = Vector;

pub fn e(g: usize, i: usize) -> HVec {
    unit_vec(2 * g, 2 * i)
}

pub fn f(g: usize, i: usize) -> HVec {
    unit_vec(2 * g, 2 * i + 1)
}

pub fn add(u: &[BigInt], v: &[BigInt]) -> HVec {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub fn sub(u: &[BigInt], v: &[BigInt]) -> HVec {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn scale(s: &BigInt, v: &[BigInt]) -> HVec {
    v.iter().map(|a| s * a).collect()
}

pub fn neg(v: &[BigInt]) -> HVec {
    v.iter().map(|a| -a).collect()
}

/// `u + s·v`
pub fn axpy(u: &[BigInt], s: &BigInt, v: &[BigInt]) -> HVec {
    u.iter().zip(v).map(|(a, b)| a + s * b).collect()
}

pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    content(v).is_one()
}

/// The algebraic intersection number `uᵀJv`.
pub fn intersection(u: &[BigInt], v: &[BigInt]) -> Result<BigInt> {
    if u.len() != v.len() || u.len() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "cannot pair vectors of lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let mut s = BigInt::zero();
    for i in (0..u.len()).step_by(2) {
        s += &u[i] * &v[i + 1] - &u[i + 1] * &v[i];
    }
    Ok(s)
}

fn dot(u: &[BigInt], v: &[BigInt]) -> BigInt {
    intersection(u, v).expect("lengths checked by caller")
}

/// `c ↦ c + s(c·γ)γ`, the action of the `s`-th power of a Dehn twist on homology.
pub fn transvection(gamma: &[BigInt], s: &BigInt, c: &[BigInt]) -> Result<HVec> {
    if gamma.iter().all(Zero::is_zero) {
        return Err(Error::Invalid("transvection along the zero vector".into()));
    }
    let k = intersection(c, gamma)? * s;
    Ok(axpy(c, &k, gamma))
}

/// Matrix of `transvection(gamma, s)` acting on column vectors.
pub fn transvection_matrix(gamma: &[BigInt], s: &BigInt) -> Result<IntMatrix> {
    let n = gamma.len();
    let cols: Vec<HVec> = (0..n)
        .map(|j| transvection(gamma, s, &unit_vec(n, j)))
        .collect::<Result<_>>()?;
    Ok(IntMatrix::from_columns(n, &cols))
}

/// The symplectic form `J` as a matrix.
pub fn form_matrix(g: usize) -> IntMatrix {
    let mut j = IntMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        j.set(2 * i, 2 * i + 1, BigInt::one());
        j.set(2 * i + 1, 2 * i, -BigInt::one());
    }
    j
}

/// `(x, y)` with `a x + b y = gcd(a, b) >= 0`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Coefficients `c` with `Σ cⱼ vⱼ = gcd(v)`.
fn bezout(v: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); v.len()];
    for (i, x) in v.iter().enumerate() {
        let (d, s, t) = ext_gcd(&g, x);
        for c in coeffs.iter_mut().take(i) {
            *c *= &s;
        }
        coeffs[i] = t;
        g = d;
    }
    (g, coeffs)
}

/// A subgroup of the homology lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    lattice: Lattice,
}

impl Subgroup {
    pub fn new(dim: usize, gens: &[HVec]) -> Self {
        Subgroup {
            lattice: Lattice::new(dim, gens),
        }
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn is_saturated(&self) -> bool {
        self.lattice.is_saturated()
    }

    pub fn basis(&self) -> &[HVec] {
        self.lattice.basis()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.lattice.contains(v)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// An element `b` with `a·b = 1`, if one exists.
    pub fn dual_partner(&self, a: &[BigInt]) -> Option<HVec> {
        let pairings: Vec<BigInt> = self.basis().iter().map(|u| dot(a, u)).collect();
        let (g, c) = bezout(&pairings);
        if !g.is_one() {
            return None;
        }
        let mut b = zero_vec(a.len());
        for (ci, u) in c.iter().zip(self.basis()) {
            b = axpy(&b, ci, u);
        }
        Some(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `g` rank-2 summands.
    Full,
    /// `n` rank-2 summands followed by one summand of rank `2(g-n)`.
    Truncated(usize),
}

impl Family {
    pub fn summand_count(&self, g: usize) -> usize {
        match self {
            Family::Full => g,
            Family::Truncated(n) => n + 1,
        }
    }

    pub fn ranks(&self, g: usize) -> Vec<usize> {
        match self {
            Family::Full => vec![2; g],
            Family::Truncated(n) => {
                let mut r = vec![2; *n];
                r.push(2 * (g - n));
                r
            }
        }
    }

    /// Length of the shift vector.
    pub fn shift_len(&self, g: usize) -> usize {
        match self {
            Family::Full => g - 1,
            Family::Truncated(n) => *n,
        }
    }
}

/// An ordered orthogonal splitting of the homology lattice together with the class `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub genus: usize,
    pub family: Family,
    pub x: HVec,
    summands: Vec<Subgroup>,
}

/// The decomposition `x = Σ xᵢ`, `xᵢ = lᵢ aᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitData {
    #[serde(with = "crate::json::vec2")]
    pub parts: Vec<HVec>,
    #[serde(with = "crate::json::vec2")]
    pub a: Vec<HVec>,
    #[serde(with = "crate::json::vec")]
    pub l: Vec<BigInt>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub data: Option<SplitData>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check::new(name, pass, detail)
}

impl Splitting {
    /// Builds a splitting from generator lists; no validity is asserted.
    pub fn new(genus: usize, family: Family, x: HVec, summands: &[Vec<HVec>]) -> Result<Self> {
        let dim = 2 * genus;
        if x.len() != dim {
            return Err(Error::Dimension(format!("x has length {}, expected {dim}", x.len())));
        }
        for s in summands.iter().flatten() {
            if s.len() != dim {
                return Err(Error::Dimension("summand generator length".into()));
            }
        }
        Ok(Splitting {
            genus,
            family,
            x,
            summands: summands.iter().map(|g| Subgroup::new(dim, g)).collect(),
        })
    }

    /// `Uᵢ = ⟨eᵢ, fᵢ⟩` (and the remaining span for the truncated family).
    pub fn standard(genus: usize, family: Family, x: HVec) -> Result<Self> {
        let gens: Vec<Vec<HVec>> = match family {
            Family::Full => (0..genus).map(|i| vec![e(genus, i), f(genus, i)]).collect(),
            Family::Truncated(n) => {
                let mut v: Vec<Vec<HVec>> =
                    (0..n).map(|i| vec![e(genus, i), f(genus, i)]).collect();
                v.push((n..genus).flat_map(|i| [e(genus, i), f(genus, i)]).collect());
                v
            }
        };
        Splitting::new(genus, family, x, &gens)
    }

    pub fn summands(&self) -> &[Subgroup] {
        &self.summands
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    /// Applies a linear map (given on column vectors) to `x` and every summand.
    pub fn map(&self, m: &IntMatrix) -> Splitting {
        let gens: Vec<Vec<HVec>> = self
            .summands
            .iter()
            .map(|s| s.basis().iter().map(|b| m.apply(b)).collect())
            .collect();
        Splitting::new(self.genus, self.family, m.apply(&self.x), &gens)
            .expect("map preserves dimensions")
    }

    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let g = self.genus;
        let dim = self.dim();
        checks.push(check(
            "genus",
            g >= 2,
            format!("genus {g}"),
        ));
        checks.push(check(
            "x primitive",
            is_primitive(&self.x),
            format!("content {}", content(&self.x)),
        ));
        let want = self.family.ranks(g);
        let have: Vec<usize> = self.summands.iter().map(|s| s.rank()).collect();
        let family_ok = match self.family {
            Family::Full => true,
            Family::Truncated(n) => n >= 1 && n + 3 <= g,
        };
        checks.push(check(
            "family parameters",
            family_ok,
            format!("{:?} in genus {g}", self.family),
        ));
        checks.push(check(
            "rank pattern",
            want == have,
            format!("expected {want:?}, found {have:?}"),
        ));
        let mut orth = true;
        let mut detail = String::from("all cross pairings vanish");
        'outer: for i in 0..self.summands.len() {
            for j in i + 1..self.summands.len() {
                for u in self.summands[i].basis() {
                    for v in self.summands[j].basis() {
                        let p = dot(u, v);
                        if !p.is_zero() {
                            orth = false;
                            detail = format!("U{i} and U{j} pair to {p}");
                            break 'outer;
                        }
                    }
                }
            }
        }
        checks.push(check("orthogonality", orth, detail));
        let stacked: Vec<HVec> = self.summands.iter().flat_map(|s| s.basis().to_vec()).collect();
        let square = stacked.len() == dim;
        let m = IntMatrix::from_columns(dim, &stacked);
        let det = if square {
            m.determinant().unwrap_or_else(|_| BigInt::zero())
        } else {
            BigInt::zero()
        };
        let direct = square && det.abs().is_one();
        checks.push(check(
            "direct sum",
            direct,
            format!("{} generators, determinant {det}", stacked.len()),
        ));
        let mut data = None;
        if direct {
            let s = smith_normal_form(&m);
            let y = s.v.apply(&s.u.apply(&self.x));
            let mut parts = Vec::new();
            let mut off = 0;
            for sub in &self.summands {
                let mut p = zero_vec(dim);
                for b in sub.basis() {
                    p = axpy(&p, &y[off], b);
                    off += 1;
                }
                parts.push(p);
            }
            let zero: Vec<usize> = parts
                .iter()
                .enumerate()
                .filter(|(_, p)| p.iter().all(Zero::is_zero))
                .map(|(i, _)| i)
                .collect();
            checks.push(check(
                "nonzero components",
                zero.is_empty(),
                if zero.is_empty() {
                    "every component of x is nonzero".into()
                } else {
                    format!("zero components at {zero:?}")
                },
            ));
            if zero.is_empty() {
                let l: Vec<BigInt> = parts.iter().map(|p| content(p)).collect();
                let a = parts
                    .iter()
                    .zip(&l)
                    .map(|(p, c)| p.iter().map(|x| x / c).collect())
                    .collect();
                data = Some(SplitData { parts, a, l });
            }
        } else {
            checks.push(check(
                "nonzero components",
                false,
                "decomposition of x undefined".into(),
            ));
        }
        ValidationReport { checks, data }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// The decomposition of `x`; errors if the splitting is invalid.
    pub fn data(&self) -> Result<SplitData> {
        let r = self.validate();
        if !r.is_valid() {
            let why: Vec<String> = r
                .failures()
                .iter()
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect();
            return Err(Error::Invalid(format!("invalid splitting ({})", why.join("; "))));
        }
        Ok(r.data.expect("valid splittings carry data"))
    }

    /// Deterministic `bᵢ ∈ Uᵢ` with `aᵢ·bᵢ = 1` for every summand.
    pub fn partners(&self) -> Result<Vec<HVec>> {
        let d = self.data()?;
        self.summands
            .iter()
            .zip(&d.a)
            .enumerate()
            .map(|(i, (s, a))| {
                s.dual_partner(a)
                    .ok_or_else(|| Error::Inconsistent(format!("no dual partner in U{i}")))
            })
            .collect()
    }

    /// `(U_{g-1}, …, U₀)`; only defined for the full family.
    pub fn reverse(&self) -> Result<Splitting> {
        if self.family != Family::Full {
            return Err(Error::Invalid("reversal is only defined for the full family".into()));
        }
        let mut s = self.clone();
        s.summands.reverse();
        Ok(s)
    }

    /// The shift `U[k]`.
    pub fn shift(&self, k: &[BigInt]) -> Result<Splitting> {
        let b = self.partners()?;
        self.shift_with(k, &b)
    }

    /// The shift computed from a caller-supplied choice of the classes `bᵢ`.
    pub fn shift_with(&self, k: &[BigInt], b: &[HVec]) -> Result<Splitting> {
        let g = self.genus;
        let len = self.family.shift_len(g);
        if k.len() != len {
            return Err(Error::Invalid(format!("shift vector has length {}, expected {len}", k.len())));
        }
        let d = self.data()?;
        let dim = self.dim();
        let a = &d.a;
        let twos = match self.family {
            Family::Full => g,
            Family::Truncated(n) => n,
        };
        for i in 0..twos {
            if !self.summands[i].contains(&b[i]) || !dot(&a[i], &b[i]).is_one() {
                return Err(Error::Invalid(format!("b{i} is not a dual partner of a{i} in U{i}")));
            }
        }
        let mut new_b = Vec::with_capacity(twos);
        for i in 0..twos {
            let mut bi = b[i].clone();
            if i >= 1 {
                bi = axpy(&bi, &k[i - 1], &a[i - 1]);
            }
            if i + 1 < a.len() && i < len {
                bi = axpy(&bi, &k[i], &a[i + 1]);
            }
            new_b.push(bi);
        }
        let mut gens: Vec<Vec<HVec>> = (0..twos).map(|i| vec![a[i].clone(), new_b[i].clone()]).collect();
        if let Family::Truncated(_) = self.family {
            let rows: Vec<HVec> = gens.iter().flatten().cloned().collect();
            // w·v = (Jᵀw)ᵀv
            let jt = form_matrix(g).transpose();
            let pair_rows: Vec<HVec> = rows.iter().map(|w| jt.apply(w)).collect();
            let m = IntMatrix::from_dense(pair_rows.len(), dim, &pair_rows);
            gens.push(kernel_basis(&m));
        }
        Splitting::new(g, self.family, self.x.clone(), &gens)
    }

    /// The a-sequence.
    pub fn a_sequence(&self) -> Result<Vec<HVec>> {
        Ok(self.data()?.a)
    }

    /// Lattices `Uᵢ + ⟨a_{i-1}, a_{i+1}⟩` over the rank-2 summands; invariant under shift.
    pub fn shift_invariant_lattices(&self) -> Result<Vec<Lattice>> {
        let d = self.data()?;
        let twos = match self.family {
            Family::Full => self.genus,
            Family::Truncated(n) => n,
        };
        Ok((0..twos)
            .map(|i| {
                let mut gens: Vec<HVec> = self.summands[i].basis().to_vec();
                if i >= 1 {
                    gens.push(d.a[i - 1].clone());
                }
                if i + 1 < d.a.len() {
                    gens.push(d.a[i + 1].clone());
                }
                Lattice::new(self.dim(), &gens)
            })
            .collect())
    }
}

/// Outcome of comparing two splittings up to shift (and reversal for the full family).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MatchResult {
    NoMatch,
    /// `V = U[k]`, or `V = reverse(U)[k]` when `reversed`.
    Match {
        #[serde(with = "crate::json::vec")]
        k: Vec<BigInt>,
        reversed: bool,
    },
}

pub fn orbit_compare(u: &Splitting, v: &Splitting) -> Result<MatchResult> {
    if u.genus != v.genus || u.family != v.family || u.x != v.x {
        return Ok(MatchResult::NoMatch);
    }
    let va = v.a_sequence()?;
    let bv = v.partners()?;
    let revs: &[bool] = if u.family == Family::Full {
        &[false, true]
    } else {
        &[false]
    };
    for &rev in revs {
        let w = if rev { u.reverse()? } else { u.clone() };
        if w.a_sequence()? != va {
            continue;
        }
        let bw = w.partners()?;
        let len = w.family.shift_len(w.genus);
        let k: Vec<BigInt> = (1..=len)
            .map(|j| dot(&sub(&bv[j - 1], &bw[j - 1]), &bw[j]))
            .collect();
        if w.shift(&k)? == *v {
            return Ok(MatchResult::Match { k, reversed: rev });
        }
    }
    Ok(MatchResult::NoMatch)
}

pub fn reverse_k(k: &[BigInt]) -> Vec<BigInt> {
    k.iter().rev().cloned().collect()
}

/// Canonical label of a splitting's orbit under shift (and reversal for the full family).
///
/// Each `Uᵢ + ⟨a_{i-1}, a_{i+1}⟩` is unchanged by shifting and, together with the
/// a-sequence, pins down the orbit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitKey {
    pub family: Family,
    pub genus: usize,
    #[serde(with = "crate::json::vec")]
    pub x: Vec<BigInt>,
    #[serde(with = "crate::json::vec2")]
    pub a: Vec<Vec<BigInt>>,
    #[serde(with = "crate::json::vec3")]
    pub spans: Vec<Vec<Vec<BigInt>>>,
}

fn one_sided_key(s: &Splitting) -> Result<OrbitKey> {
    Ok(OrbitKey {
        family: s.family,
        genus: s.genus,
        x: s.x.clone(),
        a: s.a_sequence()?,
        spans: s
            .shift_invariant_lattices()?
            .iter()
            .map(|l| l.basis().to_vec())
            .collect(),
    })
}

pub fn orbit_key(s: &Splitting) -> Result<OrbitKey> {
    let k = one_sided_key(s)?;
    if s.family == Family::Full {
        Ok(k.min(one_sided_key(&s.reverse()?)?))
    } else {
        Ok(k)
    }
}

/// On-disk form of a splitting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingJson {
    pub genus: usize,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(with = "crate::json::vec")]
    pub x: Vec<BigInt>,
    #[serde(with = "crate::json::vec3")]
    pub summands: Vec<Vec<Vec<BigInt>>>,
}

impl SplittingJson {
    pub fn into_splitting(self) -> Result<Splitting> {
        let family = match (self.family.as_str(), self.n) {
            ("full", _) => Family::Full,
            ("truncated", Some(n)) => Family::Truncated(n),
            ("truncated", None) => {
                return Err(Error::Parse("truncated splitting needs \"n\"".into()))
            }
            (other, _) => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        Splitting::new(self.genus, family, self.x, &self.summands)
    }
}

impl From<&Splitting> for SplittingJson {
    fn from(s: &Splitting) -> Self {
        let (family, n) = match s.family {
            Family::Full => ("full", None),
            Family::Truncated(n) => ("truncated", Some(n)),
        };
        SplittingJson {
            genus: s.genus,
            family: family.into(),
            n,
            x: s.x.clone(),
            summands: s.summands.iter().map(|u| u.basis().to_vec()).collect(),
        }
    }
}

impl Splitting {
    pub fn from_json(text: &str) -> Result<Splitting> {
        let j: SplittingJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("splitting.json: {e}")))?;
        j.into_splitting()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SplittingJson::from(self)).expect("serializable")
    }
}

/// Random splittings for property tests and sweeps.
pub mod sample {
    use super::*;

    pub fn small_int<R: Rng>(rng: &mut R, bound: i64) -> BigInt {
        BigInt::from(rng.gen_range(-bound..=bound))
    }

    pub fn vector<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> HVec {
        (0..dim).map(|_| small_int(rng, bound)).collect()
    }

    pub fn nonzero_vector<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> HVec {
        loop {
            let v = vector(rng, dim, bound);
            if v.iter().any(|x| !x.is_zero()) {
                return v;
            }
        }
    }

    pub fn primitive_vector<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> HVec {
        loop {
            let v = vector(rng, dim, bound);
            if is_primitive(&v) {
                return v;
            }
        }
    }

    /// Product of `steps` random transvections with small vectors.
    pub fn symplectic_matrix<R: Rng>(rng: &mut R, g: usize, steps: usize) -> IntMatrix {
        let mut m = IntMatrix::identity(2 * g);
        for _ in 0..steps {
            let v = nonzero_vector(rng, 2 * g, 1);
            let s = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
            m = transvection_matrix(&v, &s).unwrap().mul(&m).unwrap();
        }
        m
    }

    /// A valid splitting: a standard one with random `aᵢ`, `lᵢ ∈ 1..=lmax`, moved by a random symplectic map.
    pub fn splitting<R: Rng>(rng: &mut R, g: usize, family: Family, lmax: i64, steps: usize) -> Splitting {
        let dim = 2 * g;
        let mut x = zero_vec(dim);
        let twos = match family {
            Family::Full => g,
            Family::Truncated(n) => n,
        };
        for i in 0..twos {
            let (p, q) = loop {
                let p = rng.gen_range(-2i64..=2);
                let q = rng.gen_range(-2i64..=2);
                if p.gcd(&q) == 1 {
                    break (p, q);
                }
            };
            // l₀ = 1 keeps x primitive.
            let l = BigInt::from(if i == 0 { 1 } else { rng.gen_range(1..=lmax) });
            x[2 * i] = &l * p;
            x[2 * i + 1] = &l * q;
        }
        if let Family::Truncated(n) = family {
            let v = primitive_vector(rng, dim - 2 * n, 2);
            let l = BigInt::from(rng.gen_range(1..=lmax));
            for (j, c) in v.into_iter().enumerate() {
                x[2 * n + j] = &l * c;
            }
        }
        let base = Splitting::standard(g, family, x).unwrap();
        let m = symplectic_matrix(rng, g, steps);
        base.map(&m)
    }

    pub fn shift_vector<R: Rng>(rng: &mut R, len: usize, bound: i64) -> Vec<BigInt> {
        (0..len).map(|_| small_int(rng, bound)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::lattice::vec_from_i64;

    fn v(x: &[i64]) -> HVec {
        vec_from_i64(x)
    }

    fn std3() -> Splitting {
        Splitting::standard(3, Family::Full, v(&[1, 0, 1, 0, 1, 0])).unwrap()
    }

    #[test]
    fn basis_pairings() {
        let g = 1;
        assert_eq!(intersection(&e(g, 0), &f(g, 0)).unwrap(), BigInt::one());
        assert_eq!(intersection(&f(g, 0), &e(g, 0)).unwrap(), -BigInt::one());
        let u = add(&e(2, 0), &f(2, 1));
        let w = add(&f(2, 0), &e(2, 1));
        assert!(intersection(&u, &w).unwrap().is_zero());
    }

    #[test]
    fn transvection_examples() {
        let one = BigInt::one();
        assert_eq!(transvection(&e(1, 0), &one, &f(1, 0)).unwrap(), v(&[-1, 1]));
        assert_eq!(transvection(&e(1, 0), &one, &e(1, 0)).unwrap(), e(1, 0));
        assert_eq!(transvection(&e(1, 0), &BigInt::from(3), &f(1, 0)).unwrap(), v(&[-3, 1]));
        assert!(intersection(&e(1, 0), &f(1, 0)).is_ok());
        assert!(intersection(&e(1, 0), &f(2, 0)).is_err());
    }

    #[test]
    fn validation_examples() {
        let s = std3();
        let r = s.validate();
        assert!(r.is_valid());
        let d = r.data.unwrap();
        assert_eq!(d.a, vec![e(3, 0), e(3, 1), e(3, 2)]);
        assert_eq!(d.l, vec![BigInt::one(); 3]);

        let zero_part = Splitting::standard(3, Family::Full, v(&[1, 0, 1, 0, 0, 0])).unwrap();
        let r = zero_part.validate();
        assert!(!r.is_valid());
        assert_eq!(r.failures()[0].name, "nonzero components");

        let bad = Splitting::new(
            3,
            Family::Full,
            v(&[1, 0, 1, 0, 1, 0]),
            &[
                vec![e(3, 0), add(&f(3, 0), &e(3, 1))],
                vec![e(3, 1), f(3, 1)],
                vec![e(3, 2), f(3, 2)],
            ],
        )
        .unwrap();
        let r = bad.validate();
        let fails: Vec<&str> = r.failures().iter().map(|c| c.name.as_str()).collect();
        assert!(fails.contains(&"orthogonality"));
    }

    #[test]
    fn shift_example() {
        let s = std3();
        let t = s.shift(&[BigInt::one(), BigInt::zero()]).unwrap();
        let expect = Splitting::new(
            3,
            Family::Full,
            s.x.clone(),
            &[
                vec![e(3, 0), add(&f(3, 0), &e(3, 1))],
                vec![e(3, 1), add(&f(3, 1), &e(3, 0))],
                vec![e(3, 2), f(3, 2)],
            ],
        )
        .unwrap();
        assert_eq!(t, expect);
        assert!(t.is_valid());
        assert_eq!(s.shift(&[BigInt::zero(), BigInt::zero()]).unwrap(), s);
    }

    #[test]
    fn shift_is_independent_of_partner_choice() {
        let s = std3();
        let b = s.partners().unwrap();
        let a = s.a_sequence().unwrap();
        let b2: Vec<HVec> = b.iter().zip(&a).map(|(bi, ai)| axpy(bi, &BigInt::from(5), ai)).collect();
        let k = vec![BigInt::from(2), BigInt::from(-1)];
        assert_eq!(s.shift_with(&k, &b).unwrap(), s.shift_with(&k, &b2).unwrap());
    }

    #[test]
    fn orbit_compare_examples() {
        let s = std3();
        let k = vec![BigInt::one(), BigInt::zero()];
        assert_eq!(
            orbit_compare(&s, &s.shift(&k).unwrap()).unwrap(),
            MatchResult::Match { k: k.clone(), reversed: false }
        );
        assert_eq!(
            orbit_compare(&s, &s.reverse().unwrap()).unwrap(),
            MatchResult::Match { k: vec![BigInt::zero(); 2], reversed: true }
        );
        let permuted = Splitting::new(
            3,
            Family::Full,
            s.x.clone(),
            &[vec![e(3, 1), f(3, 1)], vec![e(3, 0), f(3, 0)], vec![e(3, 2), f(3, 2)]],
        )
        .unwrap();
        assert_eq!(orbit_compare(&s, &permuted).unwrap(), MatchResult::NoMatch);
    }

    #[test]
    fn truncated_shift_recomputes_the_big_summand() {
        let x = v(&[1, 0, 1, 0, 0, 0, 0, 0]);
        let s = Splitting::standard(4, Family::Truncated(1), x).unwrap();
        assert!(s.is_valid());
        let t = s.shift(&[BigInt::from(2)]).unwrap();
        assert!(t.is_valid());
        assert_eq!(t.summands()[1].rank(), 6);
        assert_eq!(
            orbit_compare(&s, &t).unwrap(),
            MatchResult::Match { k: vec![BigInt::from(2)], reversed: false }
        );
    }

    #[test]
    fn orbit_keys_and_json() {
        let s = std3();
        let k = vec![BigInt::from(3), BigInt::from(-2)];
        let t = s.shift(&k).unwrap();
        assert_eq!(orbit_key(&s).unwrap(), orbit_key(&t).unwrap());
        assert_eq!(orbit_key(&s).unwrap(), orbit_key(&t.reverse().unwrap()).unwrap());
        let other = Splitting::standard(3, Family::Full, v(&[1, 0, 0, 1, 1, 0])).unwrap();
        assert_ne!(orbit_key(&s).unwrap(), orbit_key(&other).unwrap());
        let back = Splitting::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let tr = Splitting::standard(4, Family::Truncated(1), v(&[1, 0, 1, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(Splitting::from_json(&tr.to_json()).unwrap(), tr);
    }

    #[test]
    fn random_splittings_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for g in 3..=5 {
            let s = sample::splitting(&mut rng, g, Family::Full, 4, 6);
            assert!(s.is_valid(), "{:?}", s.validate());
            if g >= 4 {
                let t = sample::splitting(&mut rng, g, Family::Truncated(g - 3), 4, 6);
                assert!(t.is_valid(), "{:?}", t.validate());
            }
        }
    }
}
