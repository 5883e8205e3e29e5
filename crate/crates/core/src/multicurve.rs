//! Oriented multicurves modeled as decorated decomposition graphs.
//!
//! Vertices are the components of the complement (genus and puncture count),
//! edges are the curves (homology class plus the component on each side).
//! A component lies on the left of a curve when the curve is oriented as part
//! of that component's boundary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homalg::lattice::{solve_integer, zero_vec};
use crate::homalg::matrix::IntMatrix;
use crate::homalg::snf;
use crate::report::Report;
use crate::symplectic::{intersection, Family, HVec, Splitting};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Role {
    Alpha(usize),
    AlphaPrime(usize),
    Beta(usize),
    BetaPrime(usize),
    Delta(usize),
    Gamma(usize),
    Epsilon,
    #[default]
    Other,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Alpha(i) => write!(f, "alpha{i}"),
            Role::AlphaPrime(i) => write!(f, "alpha{i}'"),
            Role::Beta(i) => write!(f, "beta{i}"),
            Role::BetaPrime(i) => write!(f, "beta{i}'"),
            Role::Delta(i) => write!(f, "delta{i}"),
            Role::Gamma(i) => write!(f, "gamma{i}"),
            Role::Epsilon => write!(f, "epsilon"),
            Role::Other => write!(f, "other"),
        }
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Role> {
        match s {
            "epsilon" => return Ok(Role::Epsilon),
            "other" | "" => return Ok(Role::Other),
            _ => {}
        }
        let (body, primed) = match s.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let split = body
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| Error::Parse(format!("unknown role {s:?}")))?;
        let (name, num) = body.split_at(split);
        let i: usize = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad role index in {s:?}")))?;
        Ok(match (name, primed) {
            ("alpha", false) => Role::Alpha(i),
            ("alpha", true) => Role::AlphaPrime(i),
            ("beta", false) => Role::Beta(i),
            ("beta", true) => Role::BetaPrime(i),
            ("delta", false) => Role::Delta(i),
            ("gamma", false) => Role::Gamma(i),
            _ => return Err(Error::Parse(format!("unknown role {s:?}"))),
        })
    }
}

impl TryFrom<String> for Role {
    type Error = Error;
    fn try_from(s: String) -> Result<Role> {
        s.parse()
    }
}

impl From<Role> for String {
    fn from(r: Role) -> String {
        r.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub genus: usize,
    pub punctures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl Component {
    pub fn new(id: &str, genus: usize, punctures: usize) -> Self {
        Component {
            id: id.to_string(),
            genus,
            punctures,
            tag: None,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub id: String,
    #[serde(with = "crate::json::vec")]
    pub class: HVec,
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub role: Role,
}

impl Curve {
    pub fn new(id: &str, class: HVec, left: &str, right: &str, role: Role) -> Self {
        Curve {
            id: id.to_string(),
            class,
            left: left.to_string(),
            right: right.to_string(),
            role,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.left == self.right
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompGraph {
    pub genus: usize,
    pub components: Vec<Component>,
    pub curves: Vec<Curve>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticurveInvariants {
    pub size: usize,
    pub components: usize,
    pub homology_rank: usize,
    pub dimension: usize,
    pub bp: usize,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

impl DecompGraph {
    pub fn new(genus: usize, components: Vec<Component>, curves: Vec<Curve>) -> Self {
        DecompGraph {
            genus,
            components,
            curves,
        }
    }

    /// The empty multicurve: the whole surface as one component.
    pub fn empty(genus: usize) -> Self {
        DecompGraph::new(genus, vec![Component::new("S", genus, 0)], Vec::new())
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    pub fn comp_index(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn curve_index(&self, id: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.id == id)
    }

    pub fn curve(&self, id: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.id == id)
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn by_role(&self, role: Role) -> Option<&Curve> {
        self.curves.iter().find(|c| c.role == role)
    }

    /// Curve ids whose given side is the component `id`, with multiplicity.
    fn sides_at(&self, id: &str, side: Side) -> Vec<String> {
        let mut v: Vec<String> = self
            .curves
            .iter()
            .filter(|c| match side {
                Side::Left => c.left == id,
                Side::Right => c.right == id,
            })
            .map(|c| c.id.clone())
            .collect();
        v.sort();
        v
    }

    pub fn class_matrix(&self) -> IntMatrix {
        let cols: Vec<HVec> = self.curves.iter().map(|c| c.class.clone()).collect();
        IntMatrix::from_columns(self.dim(), &cols)
    }

    pub fn homology_rank(&self) -> usize {
        if self.curves.is_empty() {
            return 0;
        }
        snf::rank(&self.class_matrix())
    }

    /// Σ over nonzero classes of (multiplicity − 1).
    pub fn bp(&self) -> usize {
        let mut counts: BTreeMap<&HVec, usize> = BTreeMap::new();
        for c in &self.curves {
            if c.class.iter().any(|x| !x.is_zero()) {
                *counts.entry(&c.class).or_default() += 1;
            }
        }
        counts.values().map(|m| m - 1).sum()
    }

    /// Union-find over components after gluing along the curves in `glue`.
    fn glued_roots(&self, glue: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.components.len()).collect();
        for k in glue {
            let c = &self.curves[k];
            if let (Some(a), Some(b)) = (self.comp_index(&c.left), self.comp_index(&c.right)) {
                union(&mut parent, a, b);
            }
        }
        (0..parent.len()).map(|i| find(&mut parent, i)).collect()
    }

    fn is_connected_without(&self, skip: Option<usize>) -> bool {
        let roots = self.glued_roots((0..self.curves.len()).filter(|&k| Some(k) != skip));
        roots.iter().all(|&r| r == roots[0])
    }

    pub fn validate(&self) -> Report {
        let mut r = Report::new();
        let mut ids = BTreeSet::new();
        let dup_comp = self.components.iter().find(|c| !ids.insert(c.id.clone()));
        let mut cids = BTreeSet::new();
        let dup_curve = self.curves.iter().find(|c| !cids.insert(c.id.clone()));
        let dangling: Vec<&str> = self
            .curves
            .iter()
            .filter(|c| self.comp_index(&c.left).is_none() || self.comp_index(&c.right).is_none())
            .map(|c| c.id.as_str())
            .collect();
        let refs_ok = dup_comp.is_none() && dup_curve.is_none() && dangling.is_empty();
        r.push(
            "references",
            refs_ok,
            if refs_ok {
                "ids unique and all sides resolve".to_string()
            } else {
                format!(
                    "duplicate component {:?}, duplicate curve {:?}, dangling curves {:?}",
                    dup_comp.map(|c| &c.id),
                    dup_curve.map(|c| &c.id),
                    dangling
                )
            },
        );
        let bad_len: Vec<&str> = self
            .curves
            .iter()
            .filter(|c| c.class.len() != self.dim())
            .map(|c| c.id.as_str())
            .collect();
        r.push(
            "class length",
            bad_len.is_empty(),
            format!("curves with wrong class length: {bad_len:?}"),
        );
        if !refs_ok || !bad_len.is_empty() {
            return r;
        }

        let mut slot_bad = Vec::new();
        let mut boundary_bad = Vec::new();
        for comp in &self.components {
            let mut used = 0;
            let mut sum = zero_vec(self.dim());
            for c in &self.curves {
                if c.left == comp.id {
                    used += 1;
                    sum = crate::symplectic::add(&sum, &c.class);
                }
                if c.right == comp.id {
                    used += 1;
                    sum = crate::symplectic::sub(&sum, &c.class);
                }
            }
            if used != comp.punctures {
                slot_bad.push(format!("{} has {} punctures but {} curve sides", comp.id, comp.punctures, used));
            }
            if sum.iter().any(|x| !x.is_zero()) {
                boundary_bad.push(comp.id.clone());
            }
        }
        r.push("puncture slots", slot_bad.is_empty(), slot_bad.join(", "));
        r.push(
            "boundary relation",
            boundary_bad.is_empty(),
            if boundary_bad.is_empty() {
                "signed boundary sums vanish".to_string()
            } else {
                format!("nonzero signed boundary sum at {boundary_bad:?}")
            },
        );
        let connected = self.components.is_empty() || self.is_connected_without(None);
        r.push("connected", connected, "complement components glue to one surface");
        let chi: i64 = self.components.iter().map(|c| c.euler_characteristic()).sum();
        let want = 2 - 2 * self.genus as i64;
        r.push(
            "euler characteristic",
            chi == want,
            format!("sum over components {chi}, closed genus-{} surface {want}", self.genus),
        );
        let mut sep_bad = Vec::new();
        if connected {
            for (k, c) in self.curves.iter().enumerate() {
                let bridge = !self.is_connected_without(Some(k));
                let zero = c.class.iter().all(Zero::is_zero);
                if bridge != zero {
                    sep_bad.push(c.id.clone());
                }
            }
        }
        r.push(
            "separating iff nullhomologous",
            sep_bad.is_empty(),
            format!("mismatched curves {sep_bad:?}"),
        );
        let rank = self.homology_rank();
        let expect = self.curves.len() + 1 - self.components.len().min(self.curves.len() + 1);
        r.push(
            "homology rank",
            rank == expect,
            format!(
                "rank {rank}; {} curves and {} components force {expect}",
                self.curves.len(),
                self.components.len()
            ),
        );
        let mut seen: BTreeSet<(HVec, String, String)> = BTreeSet::new();
        let mut dups = Vec::new();
        for c in &self.curves {
            let key = (c.class.clone(), c.left.clone(), c.right.clone());
            let rev = (crate::symplectic::neg(&c.class), c.right.clone(), c.left.clone());
            if seen.contains(&key) || seen.contains(&rev) {
                dups.push(c.id.clone());
            }
            seen.insert(key);
        }
        r.push("distinct curves", dups.is_empty(), format!("duplicated records {dups:?}"));
        r
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_pass()
    }

    pub fn require_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.is_pass() {
            Ok(())
        } else {
            Err(Error::Invalid(format!("invalid multicurve graph ({})", r.summary())))
        }
    }

    pub fn invariants(&self) -> Result<MulticurveInvariants> {
        self.require_valid()?;
        Ok(MulticurveInvariants {
            size: self.curves.len(),
            components: self.components.len(),
            homology_rank: self.homology_rank(),
            dimension: self.components.len() - 1,
            bp: self.bp(),
        })
    }

    /// The submulticurve on the curves at `keep`; components are glued along the dropped curves.
    pub fn submulticurve(&self, keep: &[usize]) -> DecompGraph {
        let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
        let roots = self.glued_roots((0..self.curves.len()).filter(|k| !keep_set.contains(k)));
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &r) in roots.iter().enumerate() {
            groups.entry(r).or_default().push(i);
        }
        let mut new_id: BTreeMap<usize, String> = BTreeMap::new();
        let mut comps = Vec::new();
        for (root, members) in &groups {
            let id = if members.len() == 1 {
                self.components[members[0]].id.clone()
            } else {
                members
                    .iter()
                    .map(|&i| self.components[i].id.as_str())
                    .collect::<Vec<_>>()
                    .join("+")
            };
            let chi: i64 = members.iter().map(|&i| self.components[i].euler_characteristic()).sum();
            let punctures = self
                .curves
                .iter()
                .enumerate()
                .filter(|(k, _)| keep_set.contains(k))
                .map(|(_, c)| {
                    let l = self.comp_index(&c.left).map(|i| roots[i] == *root).unwrap_or(false);
                    let r = self.comp_index(&c.right).map(|i| roots[i] == *root).unwrap_or(false);
                    l as usize + r as usize
                })
                .sum::<usize>();
            let genus = ((2 - chi - punctures as i64) / 2).max(0) as usize;
            let tag = members.iter().find_map(|&i| self.components[i].tag.clone());
            new_id.insert(*root, id.clone());
            comps.push(Component {
                id,
                genus,
                punctures,
                tag,
            });
        }
        let curves = keep
            .iter()
            .map(|&k| {
                let c = &self.curves[k];
                let l = roots[self.comp_index(&c.left).expect("validated")];
                let r = roots[self.comp_index(&c.right).expect("validated")];
                Curve {
                    left: new_id[&l].clone(),
                    right: new_id[&r].clone(),
                    ..c.clone()
                }
            })
            .collect();
        DecompGraph::new(self.genus, comps, curves)
    }

    /// For each component, the id of the component containing it in `submulticurve(keep)`.
    pub fn component_map(&self, keep: &[usize]) -> Vec<String> {
        let sub = self.submulticurve(keep);
        let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
        let roots = self.glued_roots((0..self.curves.len()).filter(|k| !keep_set.contains(k)));
        let mut groups: BTreeMap<usize, usize> = BTreeMap::new();
        for &r in &roots {
            let next = groups.len();
            groups.entry(r).or_insert(next);
        }
        roots.iter().map(|r| sub.components[groups[r]].id.clone()).collect()
    }

    pub fn submulticurve_by_ids(&self, ids: &[&str]) -> Result<DecompGraph> {
        let idx: Vec<usize> = ids
            .iter()
            .map(|id| {
                self.curve_index(id)
                    .ok_or_else(|| Error::Invalid(format!("no curve {id:?}")))
            })
            .collect::<Result<_>>()?;
        Ok(self.submulticurve(&idx))
    }

    /// Cuts component `comp` along a new curve. The slots listed in `to_a` (and
    /// `genus_a` of the genus) go to piece `ids.0`, the rest to `ids.1`. The new
    /// curve has piece A on its right; its class follows from A's boundary relation.
    pub fn split_component(
        &self,
        comp: &str,
        to_a: &[(String, Side)],
        genus_a: usize,
        new_curve: &str,
        ids: (&str, &str),
    ) -> Result<DecompGraph> {
        let ci = self
            .comp_index(comp)
            .ok_or_else(|| Error::Invalid(format!("no component {comp:?}")))?;
        let old = &self.components[ci];
        if genus_a > old.genus {
            return Err(Error::Invalid("genus of piece exceeds component genus".into()));
        }
        let mut slots = Vec::new();
        for c in &self.curves {
            if c.left == comp {
                slots.push((c.id.clone(), Side::Left));
            }
            if c.right == comp {
                slots.push((c.id.clone(), Side::Right));
            }
        }
        for s in to_a {
            if !slots.contains(s) {
                return Err(Error::Invalid(format!("slot {s:?} is not on {comp}")));
            }
        }
        let na = to_a.len() + 1;
        let nb = slots.len() - to_a.len() + 1;
        let genus_b = old.genus - genus_a;
        if 2 * genus_a + na < 3 || 2 * genus_b + nb < 3 {
            return Err(Error::Invalid("split would create a disk or annulus".into()));
        }
        let mut class = zero_vec(self.dim());
        let mut curves = self.curves.clone();
        for c in curves.iter_mut() {
            if to_a.contains(&(c.id.clone(), Side::Left)) {
                class = crate::symplectic::add(&class, &c.class);
                c.left = ids.0.to_string();
            } else if c.left == comp {
                c.left = ids.1.to_string();
            }
            if to_a.contains(&(c.id.clone(), Side::Right)) {
                class = crate::symplectic::sub(&class, &c.class);
                c.right = ids.0.to_string();
            } else if c.right == comp {
                c.right = ids.1.to_string();
            }
        }
        curves.push(Curve::new(new_curve, class, ids.1, ids.0, Role::Other));
        let mut comps = self.components.clone();
        comps[ci] = Component {
            id: ids.0.to_string(),
            genus: genus_a,
            punctures: na,
            tag: old.tag.clone(),
        };
        comps.insert(
            ci + 1,
            Component {
                id: ids.1.to_string(),
                genus: genus_b,
                punctures: nb,
                tag: None,
            },
        );
        Ok(DecompGraph::new(self.genus, comps, curves))
    }

    /// Applies a linear map (on column vectors) to every curve class.
    pub fn map_classes(&self, m: &IntMatrix) -> DecompGraph {
        let mut g = self.clone();
        for c in g.curves.iter_mut() {
            c.class = m.apply(&c.class);
        }
        g
    }

    pub fn from_json(text: &str) -> Result<DecompGraph> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("multicurve.json: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// The standard configurations built from a splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    /// Chain of four-holed spheres for the full family.
    N,
    /// Truncated chain ending in a twice-punctured surface of genus g−n−1.
    Nn(usize),
    /// Separating curves and bounding pairs for the full family.
    Gamma,
    /// Truncated separating chain with a one-holed subsurface of genus g−n−1.
    GammaN(usize),
}

impl FromStr for FamilyTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<FamilyTag> {
        let t = s.trim();
        if t == "N" {
            return Ok(FamilyTag::N);
        }
        if t == "Gamma" {
            return Ok(FamilyTag::Gamma);
        }
        let parse_n = |rest: &str| {
            rest.trim_start_matches(['(', ':', '='])
                .trim_end_matches(')')
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad family tag {s:?}")))
        };
        if let Some(rest) = t.strip_prefix("GammaN") {
            return Ok(FamilyTag::GammaN(parse_n(rest)?));
        }
        if let Some(rest) = t.strip_prefix("Nn") {
            return Ok(FamilyTag::Nn(parse_n(rest)?));
        }
        Err(Error::Parse(format!("unknown family tag {s:?} (N, Nn:<n>, Gamma, GammaN:<n>)")))
    }
}

impl FamilyTag {
    fn splitting_family(&self) -> Family {
        match self {
            FamilyTag::N | FamilyTag::Gamma => Family::Full,
            FamilyTag::Nn(n) | FamilyTag::GammaN(n) => Family::Truncated(*n),
        }
    }
}

/// Default `bᵢ` choices, or the caller's tuple checked for `bᵢ ∈ Uᵢ`, `aᵢ·bᵢ = 1`.
fn resolve_b(s: &Splitting, count: usize, b: Option<&[HVec]>) -> Result<Vec<HVec>> {
    let a = s.a_sequence()?;
    let b: Vec<HVec> = match b {
        Some(b) => b.to_vec(),
        None => s.partners()?[1..=count].to_vec(),
    };
    if b.len() != count {
        return Err(Error::Invalid(format!("expected {count} classes b1..b{count}, got {}", b.len())));
    }
    for (j, bj) in b.iter().enumerate() {
        let i = j + 1;
        if bj.len() != s.dim() {
            return Err(Error::Dimension(format!("b{i} has wrong length")));
        }
        if !s.summands()[i].contains(bj) {
            return Err(Error::Invalid(format!("b{i} is not in U{i}")));
        }
        if intersection(&a[i], bj)? != BigInt::from(1) {
            return Err(Error::Invalid(format!("a{i}·b{i} != 1")));
        }
    }
    Ok(b)
}

pub fn build_standard(tag: FamilyTag, s: &Splitting, b: Option<&[HVec]>) -> Result<DecompGraph> {
    if s.family != tag.splitting_family() {
        return Err(Error::Invalid(format!(
            "family tag {tag:?} needs a {:?} splitting, got {:?}",
            tag.splitting_family(),
            s.family
        )));
    }
    let data = s.data()?;
    let a = &data.a;
    let g = s.genus;
    let zero = zero_vec(s.dim());
    let y = |i: usize| format!("Y{i}");
    let curve = |role: Role, class: &HVec, left: &str, right: &str| {
        Curve::new(&role.to_string(), class.clone(), left, right, role)
    };
    match tag {
        FamilyTag::N | FamilyTag::Nn(_) => {
            // Y_i sits left of αᵢ and α'_{i-1}, right of α'ᵢ and α_{i-1}.
            let (chain, last_free) = match tag {
                FamilyTag::N => (g - 1, None),
                FamilyTag::Nn(n) => (n, Some(g - n - 1)),
                _ => unreachable!(),
            };
            let mut comps: Vec<Component> = (1..=chain).map(|i| Component::new(&y(i), 0, 4)).collect();
            if let Some(gp) = last_free {
                comps.push(Component::new(&y(chain + 1), gp, 2));
            }
            let mut curves = vec![curve(Role::Alpha(0), &a[0], &y(1), &y(1))];
            let top = match tag {
                FamilyTag::N => g - 2,
                _ => chain,
            };
            for i in 1..=top {
                curves.push(curve(Role::Alpha(i), &a[i], &y(i), &y(i + 1)));
                curves.push(curve(Role::AlphaPrime(i), &a[i], &y(i + 1), &y(i)));
            }
            if tag == FamilyTag::N {
                curves.push(curve(Role::Alpha(g - 1), &a[g - 1], &y(g - 1), &y(g - 1)));
            }
            Ok(DecompGraph::new(g, comps, curves))
        }
        FamilyTag::Gamma | FamilyTag::GammaN(_) => {
            let (count, truncated) = match tag {
                FamilyTag::Gamma => (g - 2, false),
                FamilyTag::GammaN(n) => (n, true),
                _ => unreachable!(),
            };
            let b = resolve_b(s, count, b)?;
            let pa = |i: usize| format!("X{i}a");
            let pb = |i: usize| format!("X{i}b");
            let mut comps = vec![Component::new("X0", 1, 1)];
            let mut curves = Vec::new();
            for i in 1..=count {
                comps.push(Component::new(&pa(i), 0, 3));
                comps.push(Component::new(&pb(i), 0, 3));
                let before = if i == 1 { "X0".to_string() } else { pb(i - 1) };
                curves.push(curve(Role::Delta(i), &zero, &before, &pa(i)));
                curves.push(curve(Role::Beta(i), &b[i - 1], &pb(i), &pa(i)));
                curves.push(curve(Role::BetaPrime(i), &b[i - 1], &pa(i), &pb(i)));
            }
            if truncated {
                let mut psi = Component::new("Psi", g - count - 1, 1);
                psi.tag = Some("psi".into());
                comps.push(psi);
                curves.push(curve(Role::Epsilon, &zero, &pb(count), "Psi"));
            } else {
                let last = format!("X{}", g - 1);
                comps.push(Component::new(&last, 1, 1));
                curves.push(curve(Role::Delta(g - 1), &zero, &pb(count), &last));
            }
            Ok(DecompGraph::new(g, comps, curves))
        }
    }
}

/// Checks on the α-labeled chain that do not refer to a splitting.
fn chain_checks(gr: &DecompGraph, tag: FamilyTag, x: &[BigInt], r: &mut Report) -> Option<Vec<HVec>> {
    let g = gr.genus;
    let (n, full) = match tag {
        FamilyTag::N => (g - 1, true),
        FamilyTag::Nn(n) => (n, false),
        _ => unreachable!(),
    };
    // Roles αᵢ for i ≤ n (i ≤ g−1 in the full family) and α'ᵢ for 1 ≤ i ≤ n (≤ g−2).
    let top_prime = if full { g - 2 } else { n };
    let mut want: Vec<Role> = (0..=n).map(Role::Alpha).collect();
    want.extend((1..=top_prime).map(Role::AlphaPrime));
    let have: Vec<Role> = gr.curves.iter().map(|c| c.role).collect();
    let mut sorted_have = have.clone();
    sorted_have.sort();
    let mut sorted_want = want.clone();
    sorted_want.sort();
    let roles_ok = sorted_have == sorted_want;
    r.push(
        "roles",
        roles_ok,
        format!("expected roles {:?}, found {:?}", fmt_roles(&sorted_want), fmt_roles(&sorted_have)),
    );
    if !roles_ok {
        return None;
    }
    let cl = |role: Role| gr.by_role(role).expect("roles checked").class.clone();
    let alphas: Vec<HVec> = (0..=n).map(|i| cl(Role::Alpha(i))).collect();
    let zero_cls: Vec<String> = gr
        .curves
        .iter()
        .filter(|c| c.class.iter().all(Zero::is_zero))
        .map(|c| c.id.clone())
        .collect();
    r.push("nonseparating", zero_cls.is_empty(), format!("nullhomologous curves {zero_cls:?}"));
    let unpaired: Vec<usize> = (1..=top_prime)
        .filter(|&i| cl(Role::AlphaPrime(i)) != alphas[i])
        .collect();
    r.push(
        "paired classes",
        unpaired.is_empty(),
        if unpaired.is_empty() {
            "each alpha' is homologous to its alpha".to_string()
        } else {
            format!("alpha' not homologous to alpha at {unpaired:?}")
        },
    );
    // Adjacency: Yᵢ := left side of αᵢ.
    let last = if full { g - 1 } else { usize::MAX };
    let id_of = |role: Role| gr.by_role(role).expect("roles checked").id.clone();
    let prime = |i: usize| id_of(if i == 0 || i == last { Role::Alpha(i) } else { Role::AlphaPrime(i) });
    let mut adj_bad = Vec::new();
    let chain_len = if full { g - 1 } else { n };
    let mut ys = Vec::new();
    for i in 1..=chain_len {
        let yi = gr.by_role(Role::Alpha(i)).expect("roles checked").left.clone();
        let mut lefts = vec![id_of(Role::Alpha(i)), prime(i - 1)];
        let mut rights = vec![prime(i), id_of(Role::Alpha(i - 1))];
        lefts.sort();
        rights.sort();
        let comp = gr.component(&yi);
        let shape_ok = comp.map_or(false, |c| c.genus == 0 && c.punctures == 4);
        if !shape_ok || gr.sides_at(&yi, Side::Left) != lefts || gr.sides_at(&yi, Side::Right) != rights {
            adj_bad.push(format!("Y{i}={yi}"));
        }
        ys.push(yi);
    }
    let mut count_ok = gr.components.len() == chain_len + if full { 0 } else { 1 };
    if !full {
        let yl = gr.by_role(Role::Alpha(n)).expect("roles checked").right.clone();
        let gp = g - n - 1;
        let comp = gr.component(&yl);
        let ok = comp.map_or(false, |c| c.genus == gp && c.punctures == 2)
            && gr.sides_at(&yl, Side::Left) == vec![id_of(Role::AlphaPrime(n))]
            && gr.sides_at(&yl, Side::Right) == vec![id_of(Role::Alpha(n))];
        if !ok {
            adj_bad.push(format!("Y{}={yl} (genus {gp}, two punctures)", n + 1));
        }
        ys.push(yl);
    }
    let distinct: BTreeSet<&String> = ys.iter().collect();
    count_ok &= distinct.len() == ys.len();
    r.push(
        "chain of pieces",
        adj_bad.is_empty() && count_ok,
        if adj_bad.is_empty() && count_ok {
            format!("{} complementary pieces in the required pattern", ys.len())
        } else {
            format!("{} components; mismatched pieces {adj_bad:?}", gr.components.len())
        },
    );
    let m = IntMatrix::from_columns(gr.dim(), &alphas);
    let independent = snf::rank(&m) == alphas.len();
    let sol = if independent { solve_integer(&m, x) } else { None };
    let positive = sol.as_ref().map_or(false, |l| l.iter().all(|v| v.is_positive()));
    r.push(
        "positive coefficients",
        positive,
        match (&sol, independent) {
            (_, false) => "alpha classes are dependent".to_string(),
            (None, true) => "x is not an integral combination of the alphas".to_string(),
            (Some(l), true) => format!("coefficients {}", fmt_ints(l)),
        },
    );
    Some(alphas)
}

fn fmt_roles(r: &[Role]) -> Vec<String> {
    r.iter().map(|x| x.to_string()).collect()
}

fn fmt_ints(v: &[BigInt]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(","))
}

fn gamma_checks(gr: &DecompGraph, tag: FamilyTag, s: &Splitting, r: &mut Report) {
    let g = gr.genus;
    let (count, truncated) = match tag {
        FamilyTag::Gamma => (g - 2, false),
        FamilyTag::GammaN(n) => (n, true),
        _ => unreachable!(),
    };
    let deltas = if truncated { count } else { g - 1 };
    let mut want: Vec<Role> = (1..=deltas).map(Role::Delta).collect();
    want.extend((1..=count).flat_map(|i| [Role::Beta(i), Role::BetaPrime(i)]));
    if truncated {
        want.push(Role::Epsilon);
    }
    want.sort();
    let mut have: Vec<Role> = gr.curves.iter().map(|c| c.role).collect();
    have.sort();
    r.push(
        "roles",
        have == want,
        format!("expected {:?}, found {:?}", fmt_roles(&want), fmt_roles(&have)),
    );
    if have != want {
        return;
    }
    let get = |role: Role| gr.by_role(role).expect("roles checked");
    let sep_bad: Vec<usize> = (1..=deltas)
        .filter(|&i| get(Role::Delta(i)).class.iter().any(|x| !x.is_zero()))
        .collect();
    r.push("separating deltas", sep_bad.is_empty(), format!("non-separating deltas {sep_bad:?}"));

    // Pieces Xᵢ: glue along the betas (and ε in the truncated family).
    let keep: Vec<usize> = gr
        .curves
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c.role, Role::Delta(_)))
        .map(|(k, _)| k)
        .collect();
    let merged = gr.submulticurve(&keep);
    let piece_of = |comp: &str| -> String {
        // The merged component containing the original component.
        merged
            .components
            .iter()
            .find(|c| c.id.split('+').any(|p| p == comp))
            .map(|c| c.id.clone())
            .unwrap_or_default()
    };
    let mut pieces = Vec::new();
    let mut piece_bad = Vec::new();
    for i in 0..=deltas {
        let id = if i == 0 {
            piece_of(&get(Role::Delta(1)).left)
        } else {
            piece_of(&get(Role::Delta(i)).right)
        };
        let comp = merged.component(&id);
        let (wg, wp) = if i == 0 {
            (1, 1)
        } else if i < deltas || (!truncated && i < g - 1) {
            (1, 2)
        } else if truncated {
            (g - count, 1)
        } else {
            (1, 1)
        };
        if comp.map_or(true, |c| c.genus != wg || c.punctures != wp) {
            piece_bad.push(format!("X{i} should have genus {wg} and {wp} punctures"));
        }
        if i >= 1 && i < deltas {
            let next = piece_of(&get(Role::Delta(i + 1)).left);
            if next != id {
                piece_bad.push(format!("X{i} is not adjacent to delta{}", i + 1));
            }
        }
        pieces.push(id);
    }
    let distinct: BTreeSet<&String> = pieces.iter().collect();
    let pieces_ok = piece_bad.is_empty() && distinct.len() == pieces.len() && merged.components.len() == pieces.len();
    r.push("pieces", pieces_ok, format!("{piece_bad:?}"));

    let data = match s.data() {
        Ok(d) => d,
        Err(e) => {
            r.push("splitting", false, e.to_string());
            return;
        }
    };
    let mut in_u = Vec::new();
    let mut inside = Vec::new();
    let mut classes = Vec::new();
    let mut sided = Vec::new();
    for i in 1..=count {
        let b = get(Role::Beta(i));
        let bp = get(Role::BetaPrime(i));
        for c in [b, bp] {
            if !s.summands()[i].contains(&c.class) {
                in_u.push(c.id.clone());
            }
            if piece_of(&c.left) != pieces[i] || piece_of(&c.right) != pieces[i] {
                inside.push(c.id.clone());
            }
        }
        let pairing = intersection(&data.a[i], &b.class).unwrap_or_default();
        if b.class != bp.class || pairing != BigInt::from(1) {
            classes.push(i);
        }
        let near = &get(Role::Delta(i)).right;
        let three = gr.component(near).map_or(false, |c| c.genus == 0 && c.punctures == 3);
        if b.right != *near || !three {
            sided.push(i);
        }
    }
    r.push("piece homology", in_u.is_empty(), format!("curve classes outside their summand {in_u:?}"));
    r.push("betas inside pieces", inside.is_empty(), format!("misplaced {inside:?}"));
    r.push(
        "beta classes",
        classes.is_empty(),
        format!("indices with [beta] != [beta'] or a.[beta] != 1: {classes:?}"),
    );
    r.push(
        "beta sidedness",
        sided.is_empty(),
        format!("the three-holed piece next to delta_i is not right of beta_i at {sided:?}"),
    );
    if truncated {
        let eps = get(Role::Epsilon);
        let psi = gr.component(&eps.right);
        let gp = g - count - 1;
        let psi_ok = psi.map_or(false, |c| c.genus == gp && c.punctures == 1)
            && eps.class.iter().all(Zero::is_zero);
        // Z: the part between delta_n and epsilon, glued along the last bounding pair.
        let z_keep: Vec<usize> = gr
            .curves
            .iter()
            .enumerate()
            .filter(|(_, c)| !matches!(c.role, Role::Beta(i) | Role::BetaPrime(i) if i == count))
            .map(|(k, _)| k)
            .collect();
        let zg = gr.submulticurve(&z_keep);
        let z = zg
            .components
            .iter()
            .find(|c| c.id.split('+').any(|p| p == get(Role::Delta(count)).right));
        let z_ok = z.map_or(false, |c| {
            c.genus == 1 && c.punctures == 2 && c.id.split('+').any(|p| p == eps.left)
        });
        r.push(
            "subsurface placement",
            psi_ok && z_ok,
            format!(
                "genus-{gp} one-holed piece beyond epsilon: {psi_ok}; two-holed torus between delta{count} and epsilon: {z_ok}"
            ),
        );
    }
}

/// Verdicts for the family's conditions, plus compatibility with `s`.
pub fn check_conditions(gr: &DecompGraph, tag: FamilyTag, s: &Splitting) -> Report {
    let mut r = Report::new();
    let gv = gr.validate();
    r.push("graph valid", gv.is_pass(), gv.summary());
    let sv = s.validate();
    r.push("splitting valid", sv.is_valid(), {
        let f: Vec<String> = sv.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        f.join("; ")
    });
    if s.family != tag.splitting_family() || s.genus != gr.genus {
        r.push("family", false, format!("{tag:?} does not match a genus-{} {:?} splitting", s.genus, s.family));
        return r;
    }
    if !gv.is_pass() || !sv.is_valid() {
        return r;
    }
    match tag {
        FamilyTag::N | FamilyTag::Nn(_) => {
            if let Some(alphas) = chain_checks(gr, tag, &s.x, &mut r) {
                let a = s.a_sequence().expect("validated");
                let mut rev = a.clone();
                rev.reverse();
                let ok = alphas == a || (tag == FamilyTag::N && alphas == rev);
                r.push(
                    "compatible with splitting",
                    ok,
                    "alpha classes equal the primitive parts of x, in order or reversed",
                );
            }
        }
        FamilyTag::Gamma | FamilyTag::GammaN(_) => gamma_checks(gr, tag, s, &mut r),
    }
    r
}

/// A submulticurve matching a chain pattern, with its labeling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub curves: Vec<String>,
    pub labels: Vec<(String, String)>,
    #[serde(with = "crate::json::vec2")]
    pub a_sequence: Vec<HVec>,
}

/// Attempts to label `sub` as a chain of the given family.
fn label_chain(sub: &DecompGraph, tag: FamilyTag, x: &[BigInt]) -> Option<DecompGraph> {
    let g = sub.genus;
    let (len, full) = match tag {
        FamilyTag::N => (g - 1, true),
        FamilyTag::Nn(n) => (n, false),
        _ => return None,
    };
    let loops: Vec<usize> = (0..sub.curves.len()).filter(|&k| sub.curves[k].is_loop()).collect();
    for &start in &loops {
        let mut roles = vec![None; sub.curves.len()];
        roles[start] = Some(Role::Alpha(0));
        let mut y = sub.curves[start].left.clone();
        let mut ok = true;
        let steps = if full { g - 2 } else { len };
        for i in 1..=steps {
            let fwd = (0..sub.curves.len())
                .find(|&k| roles[k].is_none() && sub.curves[k].left == y && sub.curves[k].right != y);
            let Some(f) = fwd else {
                ok = false;
                break;
            };
            let next = sub.curves[f].right.clone();
            let back = (0..sub.curves.len())
                .find(|&k| roles[k].is_none() && k != f && sub.curves[k].left == next && sub.curves[k].right == y);
            let Some(bk) = back else {
                ok = false;
                break;
            };
            roles[f] = Some(Role::Alpha(i));
            roles[bk] = Some(Role::AlphaPrime(i));
            y = next;
        }
        if !ok {
            continue;
        }
        if full {
            let end = (0..sub.curves.len()).find(|&k| roles[k].is_none() && sub.curves[k].is_loop() && sub.curves[k].left == y);
            match end {
                Some(e) => roles[e] = Some(Role::Alpha(g - 1)),
                None => continue,
            }
        }
        if roles.iter().any(Option::is_none) {
            continue;
        }
        let mut labeled = sub.clone();
        for (c, role) in labeled.curves.iter_mut().zip(&roles) {
            c.role = role.expect("all assigned");
        }
        let mut r = Report::new();
        if chain_checks(&labeled, tag, x, &mut r).is_some() && r.is_pass() {
            return Some(labeled);
        }
    }
    None
}

/// All submulticurves of `m` matching the chain pattern of `tag` for the class `x`.
///
/// `m` witnesses perfectness when at most one selection comes back.
pub fn perfectness_scan(m: &DecompGraph, tag: FamilyTag, x: &[BigInt]) -> Result<Vec<Selection>> {
    m.require_valid()?;
    let g = m.genus;
    let k = match tag {
        FamilyTag::N => 2 * g - 2,
        FamilyTag::Nn(n) => {
            if n == 0 || n + 3 > g {
                return Err(Error::Invalid(format!("chain length {n} out of range for genus {g}")));
            }
            2 * n + 1
        }
        _ => return Err(Error::Unsupported("perfectness scan is defined for the chain families".into())),
    };
    let usable: Vec<usize> = (0..m.curves.len())
        .filter(|&i| m.curves[i].class.iter().any(|v| !v.is_zero()))
        .collect();
    let mut out = Vec::new();
    if usable.len() < k {
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let pick: Vec<usize> = idx.iter().map(|&i| usable[i]).collect();
        let sub = m.submulticurve(&pick);
        if let Some(lab) = label_chain(&sub, tag, x) {
            let mut curves: Vec<String> = lab.curves.iter().map(|c| c.id.clone()).collect();
            curves.sort();
            let mut labels: Vec<(Role, String)> = lab.curves.iter().map(|c| (c.role, c.id.clone())).collect();
            labels.sort();
            let top = match tag {
                FamilyTag::N => g - 1,
                FamilyTag::Nn(n) => n,
                _ => unreachable!(),
            };
            let a_sequence = (0..=top)
                .map(|i| lab.by_role(Role::Alpha(i)).expect("labeled").class.clone())
                .collect();
            out.push(Selection {
                curves,
                labels: labels.into_iter().map(|(r, id)| (r.to_string(), id)).collect(),
                a_sequence,
            });
        }
        // Next k-combination of 0..usable.len().
        let n = usable.len();
        let mut i = k;
        loop {
            if i == 0 {
                out.sort_by(|a, b| a.curves.cmp(&b.curves));
                return Ok(out);
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Random valid graphs for sweeps and property tests.
pub mod sample {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    /// Cuts a random genus-0 component with at least four punctures into two pieces.
    pub fn random_split<R: Rng>(rng: &mut R, gr: &DecompGraph, label: &str) -> Option<DecompGraph> {
        let cands: Vec<&Component> = gr
            .components
            .iter()
            .filter(|c| c.genus == 0 && c.punctures >= 4)
            .collect();
        let comp = (*cands.choose(rng)?).clone();
        let mut slots = Vec::new();
        for c in &gr.curves {
            if c.left == comp.id {
                slots.push((c.id.clone(), Side::Left));
            }
            if c.right == comp.id {
                slots.push((c.id.clone(), Side::Right));
            }
        }
        slots.shuffle(rng);
        let na = rng.gen_range(2..=slots.len() - 2);
        let to_a: Vec<(String, Side)> = slots[..na].to_vec();
        gr.split_component(
            &comp.id,
            &to_a,
            0,
            &format!("c{label}"),
            (&format!("{}.{label}a", comp.id), &format!("{}.{label}b", comp.id)),
        )
        .ok()
    }

    /// A valid graph: a standard chain for a random splitting, cut `splits` times,
    /// with each curve then dropped with probability `drop`.
    pub fn graph<R: Rng>(rng: &mut R, g: usize, splits: usize, drop: f64) -> (DecompGraph, Splitting) {
        let s = crate::symplectic::sample::splitting(rng, g, Family::Full, 5, 4);
        let mut gr = build_standard(FamilyTag::N, &s, None).expect("valid splitting");
        for c in gr.curves.iter_mut() {
            c.role = Role::Other;
        }
        for t in 0..splits {
            if let Some(next) = random_split(rng, &gr, &t.to_string()) {
                gr = next;
            }
        }
        let keep: Vec<usize> = (0..gr.curves.len()).filter(|_| !rng.gen_bool(drop)).collect();
        (gr.submulticurve(&keep), s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::lattice::vec_from_i64;
    use crate::symplectic::{e, f};

    fn v(x: &[i64]) -> HVec {
        vec_from_i64(x)
    }

    fn std_split(g: usize) -> Splitting {
        let mut x = zero_vec(2 * g);
        for i in 0..g {
            x[2 * i] = BigInt::from(1);
        }
        Splitting::standard(g, Family::Full, x).unwrap()
    }

    fn trunc_split(g: usize, n: usize) -> Splitting {
        let mut x = zero_vec(2 * g);
        for i in 0..=n {
            x[2 * i] = BigInt::from(1);
        }
        Splitting::standard(g, Family::Truncated(n), x).unwrap()
    }

    #[test]
    fn standard_n_for_genus_three() {
        let gr = build_standard(FamilyTag::N, &std_split(3), None).unwrap();
        assert!(gr.validate().is_pass(), "{:?}", gr.validate());
        let classes: Vec<HVec> = gr.curves.iter().map(|c| c.class.clone()).collect();
        assert_eq!(classes, vec![e(3, 0), e(3, 1), e(3, 1), e(3, 2)]);
        assert_eq!(gr.components.len(), 2);
        assert!(gr.components.iter().all(|c| c.genus == 0 && c.punctures == 4));
        let chi: i64 = gr.components.iter().map(|c| c.euler_characteristic()).sum();
        assert_eq!(chi, -4);
        let inv = gr.invariants().unwrap();
        assert_eq!(
            (inv.size, inv.components, inv.homology_rank, inv.dimension, inv.bp),
            (4, 2, 3, 1, 1)
        );
    }

    #[test]
    fn negated_class_breaks_both_boundaries() {
        let mut gr = build_standard(FamilyTag::N, &std_split(3), None).unwrap();
        let k = gr.curve_index("alpha1").unwrap();
        gr.curves[k].class = crate::symplectic::neg(&gr.curves[k].class);
        let r = gr.validate();
        let c = r.get("boundary relation").unwrap();
        assert!(!c.pass);
        assert!(c.detail.contains("Y1") && c.detail.contains("Y2"), "{}", c.detail);
    }

    #[test]
    fn empty_multicurve() {
        let gr = DecompGraph::empty(4);
        assert!(gr.is_valid());
        let inv = gr.invariants().unwrap();
        assert_eq!((inv.size, inv.components, inv.dimension), (0, 1, 0));
        assert_eq!(gr.components[0].genus, 4);
    }

    #[test]
    fn standard_invariant_counts() {
        for g in 3..=7 {
            let gr = build_standard(FamilyTag::N, &std_split(g), None).unwrap();
            let inv = gr.invariants().unwrap();
            assert_eq!(
                (inv.size, inv.components, inv.homology_rank, inv.dimension, inv.bp),
                (2 * g - 2, g - 1, g, g - 2, g - 2)
            );
            for n in 1..=g.saturating_sub(3) {
                let gr = build_standard(FamilyTag::Nn(n), &trunc_split(g, n), None).unwrap();
                assert!(gr.is_valid(), "{:?}", gr.validate());
                let inv = gr.invariants().unwrap();
                assert_eq!(
                    (inv.size, inv.components, inv.dimension, inv.bp),
                    (2 * n + 1, n + 1, n, n)
                );
            }
        }
    }

    #[test]
    fn gamma_for_genus_three() {
        let s = std_split(3);
        let gr = build_standard(FamilyTag::Gamma, &s, Some(&[f(3, 1)])).unwrap();
        assert!(gr.is_valid(), "{:?}", gr.validate());
        let zero = zero_vec(6);
        assert_eq!(gr.by_role(Role::Delta(1)).unwrap().class, zero);
        assert_eq!(gr.by_role(Role::Delta(2)).unwrap().class, zero);
        assert_eq!(gr.by_role(Role::Beta(1)).unwrap().class, f(3, 1));
        assert_eq!(gr.by_role(Role::BetaPrime(1)).unwrap().class, f(3, 1));
        let tori = gr.components.iter().filter(|c| c.genus == 1 && c.punctures == 1).count();
        let pants = gr.components.iter().filter(|c| c.genus == 0 && c.punctures == 3).count();
        assert_eq!((tori, pants, gr.components.len()), (2, 2, 4));
        assert!(check_conditions(&gr, FamilyTag::Gamma, &s).is_pass());
        let bad = build_standard(FamilyTag::Gamma, &s, Some(&[e(3, 1)]));
        assert!(bad.is_err());
    }

    #[test]
    fn truncated_builders() {
        let s = trunc_split(4, 1);
        let gr = build_standard(FamilyTag::Nn(1), &s, None).unwrap();
        assert_eq!(gr.curves.len(), 3);
        let mut shapes: Vec<(usize, usize)> = gr.components.iter().map(|c| (c.genus, c.punctures)).collect();
        shapes.sort();
        assert_eq!(shapes, vec![(0, 4), (2, 2)]);
        assert!(check_conditions(&gr, FamilyTag::Nn(1), &s).is_pass());
        for g in 4..=7 {
            for n in 1..=g - 3 {
                let s = trunc_split(g, n);
                let gr = build_standard(FamilyTag::GammaN(n), &s, None).unwrap();
                assert!(gr.is_valid(), "{:?}", gr.validate());
                let r = check_conditions(&gr, FamilyTag::GammaN(n), &s);
                assert!(r.is_pass(), "g={g} n={n}: {}", r.summary());
            }
        }
    }

    #[test]
    fn condition_failures() {
        let s = std_split(3);
        let gr = build_standard(FamilyTag::N, &s, None).unwrap();
        assert!(check_conditions(&gr, FamilyTag::N, &s).is_pass());

        let mut bad = gr.clone();
        let k = bad.curve_index("alpha1'").unwrap();
        bad.curves[k].class = v(&[0, 0, 1, 0, 1, 0]);
        // Relax graph validity so the condition list is reached.
        let mut r = Report::new();
        chain_checks(&bad, FamilyTag::N, &s.x, &mut r);
        assert!(r.failed("paired classes"));

        let other = Splitting::standard(3, Family::Full, v(&[1, 0, -1, 0, 1, 0])).unwrap();
        let r = check_conditions(&gr, FamilyTag::N, &other);
        assert!(r.failed("positive coefficients"), "{r:?}");
    }

    #[test]
    fn json_round_trip() {
        let gr = build_standard(FamilyTag::GammaN(1), &trunc_split(4, 1), None).unwrap();
        assert_eq!(DecompGraph::from_json(&gr.to_json()).unwrap(), gr);
        assert_eq!("alpha3'".parse::<Role>().unwrap(), Role::AlphaPrime(3));
        assert_eq!("Nn:2".parse::<FamilyTag>().unwrap(), FamilyTag::Nn(2));
    }

    fn with_extra_curve(sign: i64) -> (DecompGraph, Splitting) {
        // Cut Y1 into two pairs of pants; the new curve pairs alpha0 with one side of the alpha1 pair.
        let s = std_split(3);
        let gr = build_standard(FamilyTag::N, &s, None).unwrap();
        let to_a = if sign > 0 {
            vec![("alpha0".to_string(), Side::Left), ("alpha1'".to_string(), Side::Right)]
        } else {
            vec![("alpha0".to_string(), Side::Right), ("alpha1".to_string(), Side::Left)]
        };
        let m = gr.split_component("Y1", &to_a, 0, "eps", ("Y1a", "Y1b")).unwrap();
        assert!(m.is_valid(), "{:?}", m.validate());
        (m, s)
    }

    #[test]
    fn perfectness_examples() {
        let s = std_split(3);
        let gr = build_standard(FamilyTag::N, &s, None).unwrap();
        assert_eq!(perfectness_scan(&gr, FamilyTag::N, &s.x).unwrap().len(), 1);

        // Extra curve of class a1 − a0: no second pattern.
        let (m, s) = with_extra_curve(-1);
        assert_eq!(m.curve("eps").unwrap().class, v(&[-1, 0, 1, 0, 0, 0]));
        let sel = perfectness_scan(&m, FamilyTag::N, &s.x).unwrap();
        assert_eq!(sel.len(), 1);

        // Extra curve of class a0 − a1 replaces alpha0 in a second chain.
        let (m, s) = with_extra_curve(1);
        assert_eq!(m.curve("eps").unwrap().class, v(&[1, 0, -1, 0, 0, 0]));
        let sel = perfectness_scan(&m, FamilyTag::N, &s.x).unwrap();
        assert_eq!(sel.len(), 2);
        assert_ne!(sel[0].a_sequence, sel[1].a_sequence);
    }

    #[test]
    fn random_graphs_are_valid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = rng.gen_range(3..=5);
            let (gr, _) = sample::graph(&mut rng, g, 3, 0.3);
            assert!(gr.is_valid(), "{:?}", gr.validate());
        }
    }
}
