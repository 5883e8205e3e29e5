//! Abelian cycles built from bounding-pair and separating twists, their images
//! under the detector maps, involution and reversal signs, and finite
//! linear-independence certificates.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cartan_leray::{certify_stable, stable_entry, StabilityCertificate};
use crate::cycle_complex::standard_cube;
use crate::error::{Error, Result};
use crate::homalg::matrix::IntMatrix;
use crate::homalg::rational::{det, q, Q};
use crate::homalg::snf;
use crate::multicurve::{build_standard, check_conditions, DecompGraph, FamilyTag, Role};
use crate::report::Report;
use crate::symplectic::{intersection, orbit_key, transvection_matrix, Family, HVec, OrbitKey, Splitting, SplittingJson};

/// A commuting generator of an abelian cycle, named by its position in the standard configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `T_{βᵢ} T_{βᵢ'}⁻¹`.
    BoundingPair { index: usize },
    /// `T_{δᵢ}`.
    Separating { index: usize },
    /// The pushed-forward class `ψ_*(ξ_λ)`.
    Payload,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Generator::BoundingPair { index } => write!(f, "BP(beta{index},beta{index}')"),
            Generator::Separating { index } => write!(f, "T(delta{index})"),
            Generator::Payload => write!(f, "xi"),
        }
    }
}

/// Sorts a signed generator list into standard order.
///
/// Returns the sign picked up from inverses and from the permutation, or
/// `None` when a generator repeats (the cycle then vanishes).
pub fn normal_form(list: &[(Generator, i8)]) -> Option<(i8, Vec<Generator>)> {
    let mut sign: i8 = list.iter().map(|(_, e)| *e).product();
    let mut gens: Vec<Generator> = list.iter().map(|(g, _)| *g).collect();
    for i in 0..gens.len() {
        for j in 0..gens.len() - 1 - i {
            match gens[j].cmp(&gens[j + 1]) {
                std::cmp::Ordering::Greater => {
                    gens.swap(j, j + 1);
                    sign = -sign;
                }
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Some((sign, gens))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twist {
    pub generator: Generator,
    /// Curve ids in the Γ-graph: `[βᵢ, βᵢ']` or `[δᵢ]`.
    pub curves: Vec<String>,
    #[serde(with = "crate::json::vec")]
    pub class: HVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payload {
    pub lambda: u64,
    /// Genus of the one-holed subsurface carrying the class.
    pub genus: usize,
    pub degree: usize,
    /// Component of the Γ-graph holding the subsurface.
    pub placement: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianCycleSymbol {
    pub family: Family,
    pub genus: usize,
    pub source: SplittingJson,
    #[serde(with = "crate::json::vec2")]
    pub b: Vec<HVec>,
    pub twists: Vec<Twist>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Payload>,
    pub sign: i8,
    pub degree: usize,
    pub key: OrbitKey,
}

impl fmt::Display for AbelianCycleSymbol {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let mut parts: Vec<String> = self.twists.iter().map(|t| t.generator.to_string()).collect();
        if let Some(p) = &self.payload {
            parts.push(format!("xi[{}] in {} (genus {})", p.lambda, p.placement, p.genus));
        }
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(f, "{sign}A({})", parts.join(", "))
    }
}

fn gamma_tag(family: Family) -> FamilyTag {
    match family {
        Family::Full => FamilyTag::Gamma,
        Family::Truncated(n) => FamilyTag::GammaN(n),
    }
}

fn bp_count(family: Family, g: usize) -> usize {
    match family {
        Family::Full => g - 2,
        Family::Truncated(n) => n,
    }
}

/// The generators of the class for a splitting, in standard order.
fn generator_list(family: Family, g: usize) -> Vec<Generator> {
    let k = bp_count(family, g);
    let deltas = match family {
        Family::Full => g - 1,
        Family::Truncated(n) => n,
    };
    let mut v: Vec<Generator> = (1..=k).map(|index| Generator::BoundingPair { index }).collect();
    v.extend((1..=deltas).map(|index| Generator::Separating { index }));
    if matches!(family, Family::Truncated(_)) {
        v.push(Generator::Payload);
    }
    v
}

/// Rewrites the generators of `A_{U,b}` in the labels of the reversed splitting.
///
/// βᵢ becomes β'_{g-1-i} and vice versa (the side facing δᵢ changes), so each
/// bounding pair is inverted; δᵢ becomes δ_{g-i}.
fn reversal_image(g: usize) -> Vec<(Generator, i8)> {
    generator_list(Family::Full, g)
        .into_iter()
        .map(|gen| match gen {
            Generator::BoundingPair { index } => (Generator::BoundingPair { index: g - 1 - index }, -1),
            Generator::Separating { index } => (Generator::Separating { index: g - index }, 1),
            Generator::Payload => (Generator::Payload, 1),
        })
        .collect()
}

/// The sign in `A_{U,b} = ε · A_{Ū,b̄}` read off by normal form; always +1.
pub fn reversal_sign(g: usize) -> i8 {
    normal_form(&reversal_image(g)).expect("distinct generators").0
}

fn default_b(s: &Splitting) -> Result<Vec<HVec>> {
    let k = bp_count(s.family, s.genus);
    Ok(s.partners()?[1..=k].to_vec())
}

fn one_orientation(s: &Splitting, b: &[HVec], lambda: Option<u64>) -> Result<AbelianCycleSymbol> {
    let g = s.genus;
    let tag = gamma_tag(s.family);
    let gamma = build_standard(tag, s, Some(b))?;
    let cond = check_conditions(&gamma, tag, s);
    if !cond.is_pass() {
        return Err(Error::Invalid(format!("placement invalid: {}", cond.summary())));
    }
    let id = |r: Role| -> Result<(String, HVec)> {
        gamma
            .by_role(r)
            .map(|c| (c.id.clone(), c.class.clone()))
            .ok_or_else(|| Error::Inconsistent(format!("Γ-graph lacks {r}")))
    };
    let mut twists = Vec::new();
    for generator in generator_list(s.family, g) {
        match generator {
            Generator::BoundingPair { index } => {
                let (p, class) = id(Role::Beta(index))?;
                let (m, _) = id(Role::BetaPrime(index))?;
                twists.push(Twist {
                    generator,
                    curves: vec![p, m],
                    class,
                });
            }
            Generator::Separating { index } => {
                let (d, class) = id(Role::Delta(index))?;
                twists.push(Twist {
                    generator,
                    curves: vec![d],
                    class,
                });
            }
            Generator::Payload => {}
        }
    }
    let payload = match (s.family, lambda) {
        (Family::Full, None) => None,
        (Family::Truncated(n), Some(lambda)) => {
            let gp = g - n - 1;
            let placement = gamma
                .components
                .iter()
                .find(|c| c.tag.as_deref() == Some("psi"))
                .map(|c| c.id.clone())
                .ok_or_else(|| Error::Invalid("placement invalid: no subsurface for the payload".into()))?;
            Some(Payload {
                lambda,
                genus: gp,
                degree: 3 * gp - 2,
                placement,
            })
        }
        (Family::Full, Some(_)) => return Err(Error::Invalid("the full family carries no payload".into())),
        (Family::Truncated(_), None) => return Err(Error::Invalid("the truncated family needs a payload index".into())),
    };
    let degree = twists.len() + payload.as_ref().map_or(0, |p| p.degree);
    Ok(AbelianCycleSymbol {
        family: s.family,
        genus: g,
        source: SplittingJson::from(s),
        b: b.to_vec(),
        twists,
        payload,
        sign: 1,
        degree,
        key: orbit_key(s)?,
    })
}

/// Graph-level well-formedness: distinct disjoint curves, trivial homology
/// action of each bounding pair, separating curves nullhomologous, degree.
fn structural_checks(sym: &AbelianCycleSymbol) -> Report {
    let g = sym.genus;
    let mut r = Report::new();
    let mut seen = BTreeMap::new();
    let mut distinct = true;
    for t in &sym.twists {
        for c in &t.curves {
            distinct &= seen.insert(c.clone(), ()).is_none();
        }
    }
    r.push("twist curves pairwise disjoint", distinct, format!("{} curves", seen.len()));
    let id = IntMatrix::identity(2 * g);
    let bp_ok = sym.twists.iter().filter(|t| matches!(t.generator, Generator::BoundingPair { .. })).all(|t| {
        let plus = transvection_matrix(&t.class, &BigInt::one());
        let minus = transvection_matrix(&t.class, &-BigInt::one());
        match (plus, minus) {
            (Ok(p), Ok(m)) => p.mul(&m).map(|x| x == id).unwrap_or(false),
            _ => false,
        }
    });
    r.push("bounding pairs act trivially on homology", bp_ok, "T_b T_b^-1 = 1 on Z^2g");
    let sep_ok = sym
        .twists
        .iter()
        .filter(|t| matches!(t.generator, Generator::Separating { .. }))
        .all(|t| t.class.iter().all(Zero::is_zero));
    r.push("separating curves are nullhomologous", sep_ok, "");
    let want = match sym.family {
        Family::Full => 2 * g - 3,
        Family::Truncated(n) => 3 * g - 5 - n,
    };
    r.push(
        "degree",
        sym.degree == want,
        format!("degree {} (expected {want})", sym.degree),
    );
    r.push("sign is a unit", sym.sign == 1 || sym.sign == -1, format!("{}", sym.sign));
    r
}

/// Builds `A_{U,b}` (full family) or `A_{U,Γ,ψ,λ}` (truncated family).
///
/// In the full family the symbol is stored in the orientation (U or Ū) with
/// the smaller a-sequence, so that `A_{Ū,b̄}` and `A_{U,b}` give equal symbols.
pub fn make_symbol(s: &Splitting, b: Option<&[HVec]>, lambda: Option<u64>) -> Result<AbelianCycleSymbol> {
    if !s.is_valid() {
        return Err(Error::Invalid("splitting fails validation".into()));
    }
    let b = match b {
        Some(b) => b.to_vec(),
        None => default_b(s)?,
    };
    let a = s.a_sequence()?;
    for (j, bj) in b.iter().enumerate() {
        if bj.len() == s.dim() && intersection(&a[j + 1], bj)? != BigInt::one() {
            return Err(Error::Invalid(format!("a{}·b{} != 1", j + 1, j + 1)));
        }
    }
    let here = one_orientation(s, &b, lambda)?;
    let sym = if s.family == Family::Full {
        let rs = s.reverse()?;
        let mut rb = b.clone();
        rb.reverse();
        let there = one_orientation(&rs, &rb, lambda)?;
        let mine = (s.a_sequence()?, &here.source.summands, &here.b);
        let theirs = (rs.a_sequence()?, &there.source.summands, &there.b);
        if theirs < mine {
            AbelianCycleSymbol {
                sign: here.sign * reversal_sign(s.genus),
                ..there
            }
        } else {
            here
        }
    } else {
        here
    };
    let checks = structural_checks(&sym);
    if !checks.is_pass() {
        return Err(Error::Inconsistent(format!("symbol checks: {}", checks.summary())));
    }
    Ok(sym)
}

impl AbelianCycleSymbol {
    pub fn splitting(&self) -> Result<Splitting> {
        self.source.clone().into_splitting()
    }

    /// Rebuilds the symbol from its recorded source and compares.
    pub fn validate(&self) -> Result<()> {
        let s = self.splitting()?;
        let rebuilt = make_symbol(&s, Some(&self.b), self.payload.as_ref().map(|p| p.lambda))?;
        let same_up_to_sign = AbelianCycleSymbol {
            sign: self.sign,
            ..rebuilt.clone()
        } == *self;
        if !same_up_to_sign || rebuilt.sign != self.sign {
            return Err(Error::Invalid("malformed symbol: does not match its source".into()));
        }
        Ok(())
    }

    /// The symbol transformation induced by the hyperelliptic rotation:
    /// δᵢ fixed, βᵢ and βᵢ' exchanged.
    pub fn involution_image(&self) -> Vec<(Generator, i8)> {
        self.twists
            .iter()
            .map(|t| match t.generator {
                Generator::BoundingPair { .. } => (t.generator, -1),
                other => (other, 1),
            })
            .chain(self.payload.iter().map(|_| (Generator::Payload, 1)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaPayload {
    pub placement: String,
    pub lambda: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSymbol {
    pub key: OrbitKey,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<ThetaPayload>,
    pub sign: i8,
    /// How the cell of the chain is oriented.
    pub orientation: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub value: Option<ThetaSymbol>,
    pub checklist: Report,
}

/// The hypotheses behind reading the class off the corner entry, rechecked on
/// the constructed chain and Γ-graph.
pub fn lemma_checklist(sym: &AbelianCycleSymbol) -> Result<Report> {
    let s = sym.splitting()?;
    let mut r = structural_checks(sym);
    let (n_graph, chart) = standard_cube(&s)?;
    let chain_tag = match s.family {
        Family::Full => FamilyTag::N,
        Family::Truncated(n) => FamilyTag::Nn(n),
    };
    let cond = check_conditions(&n_graph, chain_tag, &s);
    r.push("chain satisfies its conditions", cond.is_pass(), cond.summary());
    r.push(
        "cube facets exchanged by twist pairs",
        chart.checks.is_pass(),
        format!("{} facets, {}", chart.facets.len(), chart.checks.summary()),
    );
    let gamma = build_standard(gamma_tag(s.family), &s, Some(&sym.b))?;
    let gcond = check_conditions(&gamma, gamma_tag(s.family), &s);
    r.push("Γ-graph satisfies its conditions", gcond.is_pass(), gcond.summary());
    r.push(
        "bounding pairs are homologous pairs",
        pairs_homologous(&gamma, sym),
        "[beta_i] = [beta_i'] in the Γ-graph",
    );
    let (entry, region) = stable_entry(s.family, s.genus);
    let cert = certify_stable(&region, entry);
    r.push(
        "corner entry is stable",
        cert.certified,
        format!("entry {entry:?} against {region}"),
    );
    Ok(r)
}

/// Each bounding pair in the Γ-graph consists of two homologous curves.
fn pairs_homologous(gamma: &DecompGraph, sym: &AbelianCycleSymbol) -> bool {
    sym.twists.iter().all(|t| match t.generator {
        Generator::BoundingPair { index } => match (gamma.by_role(Role::Beta(index)), gamma.by_role(Role::BetaPrime(index))) {
            (Some(p), Some(m)) => p.class == m.class && p.id != m.id,
            _ => false,
        },
        _ => true,
    })
}

fn evaluate_unchecked(key: &OrbitKey, sym: &AbelianCycleSymbol) -> Option<ThetaSymbol> {
    (sym.key == *key).then(|| ThetaSymbol {
        key: sym.key.clone(),
        payload: sym.payload.as_ref().map(|p| ThetaPayload {
            placement: p.placement.clone(),
            lambda: p.lambda,
        }),
        sign: sym.sign,
        orientation: match sym.family {
            Family::Full => "cube coordinates of the chain labelled so that [alpha_i] lies in U_i".into(),
            Family::Truncated(_) => "standard orientation of the cube [0,1]^n".into(),
        },
    })
}

/// `Φ_𝔑(A)`: θ of the source orbit when the keys agree, zero otherwise.
pub fn phi_evaluate(key: &OrbitKey, sym: &AbelianCycleSymbol) -> Result<Evaluation> {
    sym.validate()?;
    Ok(Evaluation {
        value: evaluate_unchecked(key, sym),
        checklist: lemma_checklist(sym)?,
    })
}

pub const AXIOM_THETA_BASIS: &str =
    "the corner E1 entry is free on the theta classes of the splittings in the orbit, with theta(U) = theta(reversed U) as the only relations";
pub const AXIOM_PAYLOAD: &str =
    "the classes xi_lambda of the one-holed subsurface are linearly independent, and so are their theta images for fixed N and psi";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    pub family: String,
    pub genus: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub symbols: Vec<String>,
    /// Column labels: orbit-key index and payload index.
    pub columns: Vec<(usize, Option<u64>)>,
    pub matrix: Vec<Vec<i64>>,
    pub rank: usize,
    pub duplicates: Vec<(usize, usize)>,
    pub axioms_cited: Vec<String>,
    pub stability_certificate_ref: StabilityCertificate,
    /// The reduction steps from symbols to θ-coordinates.
    pub links: Report,
    pub certified: bool,
}

pub const REQUIRED_LINKS: [&str; 4] = [
    "symbols well formed",
    "lemma hypotheses",
    "stability certificate",
    "theta coordinates",
];

fn signed_permutation_pattern(m: &[Vec<i64>]) -> bool {
    let rows_ok = m.iter().all(|row| {
        row.iter().filter(|&&v| v != 0).count() == 1 && row.iter().all(|&v| v.abs() <= 1)
    });
    let cols = m.first().map_or(0, Vec::len);
    let cols_ok = (0..cols).all(|j| m.iter().filter(|row| row[j] != 0).count() <= 1);
    rows_ok && cols_ok
}

impl IndependenceCertificate {
    /// Rechecks that every link of the reduction is present and holds.
    pub fn verify(&self) -> Report {
        let mut r = Report::new();
        for name in REQUIRED_LINKS {
            let ok = self.links.get(name).map_or(false, |c| c.pass);
            r.push(name, ok, if ok { "present" } else { "missing or failing" });
        }
        r.push("stability certificate issued", self.stability_certificate_ref.certified, "");
        r.push(
            "axioms cited",
            self.axioms_cited.iter().any(|a| a == AXIOM_THETA_BASIS)
                && (self.n.is_none() || self.axioms_cited.iter().any(|a| a == AXIOM_PAYLOAD)),
            format!("{} cited", self.axioms_cited.len()),
        );
        r.push("no duplicate keys", self.duplicates.is_empty(), format!("{:?}", self.duplicates));
        r.push(
            "matrix pattern",
            signed_permutation_pattern(&self.matrix) && self.rank == self.symbols.len(),
            format!("rank {} for {} symbols", self.rank, self.symbols.len()),
        );
        r
    }
}

/// Evaluates every symbol on every orbit key in the list and certifies the
/// resulting matrix has a signed-permutation pattern.
pub fn independence_certificate(symbols: &[AbelianCycleSymbol]) -> Result<IndependenceCertificate> {
    let first = symbols.first().ok_or_else(|| Error::Invalid("no symbols".into()))?;
    let (family, g) = (first.family, first.genus);
    if symbols.iter().any(|s| s.family != family || s.genus != g) {
        return Err(Error::Invalid("symbols mix families or genera".into()));
    }
    let mut links = Report::new();
    let mut well_formed = Vec::new();
    let mut lemma_ok = true;
    for (i, s) in symbols.iter().enumerate() {
        if let Err(e) = s.validate() {
            well_formed.push(format!("#{i}: {e}"));
            continue;
        }
        lemma_ok &= lemma_checklist(s)?.is_pass();
    }
    links.push(
        "symbols well formed",
        well_formed.is_empty(),
        if well_formed.is_empty() {
            format!("{} symbols rebuilt from their sources", symbols.len())
        } else {
            well_formed.join("; ")
        },
    );
    links.push("lemma hypotheses", lemma_ok, "checklist passes for every symbol");
    let (entry, region) = stable_entry(family, g);
    let stab = certify_stable(&region, entry);
    links.push(
        "stability certificate",
        stab.certified,
        format!("E-infinity = E1 at {entry:?}"),
    );

    let mut keys: Vec<&OrbitKey> = Vec::new();
    let mut columns: Vec<(usize, Option<u64>)> = Vec::new();
    let mut row_col = Vec::new();
    for s in symbols {
        let k = match keys.iter().position(|k| **k == s.key) {
            Some(k) => k,
            None => {
                keys.push(&s.key);
                keys.len() - 1
            }
        };
        let col = (k, s.payload.as_ref().map(|p| p.lambda));
        let j = match columns.iter().position(|c| *c == col) {
            Some(j) => j,
            None => {
                columns.push(col);
                columns.len() - 1
            }
        };
        row_col.push(j);
    }
    let mut duplicates = Vec::new();
    for i in 0..symbols.len() {
        for j in i + 1..symbols.len() {
            if row_col[i] == row_col[j] {
                duplicates.push((i, j));
            }
        }
    }
    let matrix: Vec<Vec<i64>> = symbols
        .iter()
        .map(|s| {
            columns
                .iter()
                .map(|&(k, lambda)| match evaluate_unchecked(keys[k], s) {
                    Some(t) if t.payload.as_ref().map(|p| p.lambda) == lambda => t.sign as i64,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    let rank = if matrix.is_empty() || columns.is_empty() {
        0
    } else {
        snf::rank(&IntMatrix::from_i64(&matrix))
    };
    let pattern = signed_permutation_pattern(&matrix);
    links.push(
        "theta coordinates",
        pattern && duplicates.is_empty(),
        format!("{}x{} matrix, rank {rank}", matrix.len(), columns.len()),
    );
    let mut axioms_cited = vec![AXIOM_THETA_BASIS.to_string()];
    let n = match family {
        Family::Full => None,
        Family::Truncated(n) => {
            axioms_cited.push(AXIOM_PAYLOAD.to_string());
            Some(n)
        }
    };
    let mut cert = IndependenceCertificate {
        family: match family {
            Family::Full => "full".into(),
            Family::Truncated(_) => "truncated".into(),
        },
        genus: g,
        n,
        symbols: symbols.iter().map(|s| s.to_string()).collect(),
        columns,
        matrix,
        rank,
        duplicates,
        axioms_cited,
        stability_certificate_ref: stab,
        links,
        certified: false,
    };
    cert.certified = cert.verify().is_pass();
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionReport {
    pub family: Family,
    pub genus: usize,
    pub sign: i8,
    /// `(generator, exponent)` after the rotation, before normal form.
    pub image: Vec<(Generator, i8)>,
}

/// Eigenvalue of the hyperelliptic rotation on the class, from the normal
/// form of the swapped generator list.
pub fn involution_sign(family: Family, g: usize) -> Result<InvolutionReport> {
    if g < 3 {
        return Err(Error::Invalid("genus must be at least 3".into()));
    }
    if let Family::Truncated(n) = family {
        if n == 0 || n + 3 > g {
            return Err(Error::Invalid(format!("n = {n} out of range 1..=g-3")));
        }
    }
    let image: Vec<(Generator, i8)> = generator_list(family, g)
        .into_iter()
        .map(|gen| match gen {
            Generator::BoundingPair { .. } => (gen, -1),
            other => (other, 1),
        })
        .collect();
    let (sign, _) = normal_form(&image).expect("distinct generators");
    Ok(InvolutionReport {
        family,
        genus: g,
        sign,
        image,
    })
}

/// Applies the rotation twice to a signed list and returns the total sign.
pub fn involution_twice(image: &[(Generator, i8)]) -> i8 {
    let twice: Vec<(Generator, i8)> = image
        .iter()
        .map(|&(gen, e)| match gen {
            Generator::BoundingPair { .. } => (gen, -e),
            other => (other, e),
        })
        .collect();
    normal_form(&twice).expect("distinct generators").0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignLedger {
    pub genus: usize,
    /// Sign of reversing the separating twists in `A(T_δ₁, …, T_δ_{g−1})`.
    pub class_sign: i8,
    /// Determinant of the cube coordinate change `tᵢ ↦ 1 − t_{g−1−i}`.
    pub orientation_sign: i8,
    pub product: i8,
}

pub fn theta_signs(g: usize) -> Result<SignLedger> {
    if g < 3 {
        return Err(Error::Invalid("genus must be at least 3".into()));
    }
    let image: Vec<(Generator, i8)> = (1..g)
        .map(|i| (Generator::Separating { index: g - i }, 1))
        .collect();
    let class_sign = normal_form(&image).expect("distinct").0;
    let d = g - 2;
    let m: Vec<Vec<Q>> = (0..d)
        .map(|i| (0..d).map(|j| if j == d - 1 - i { q(-1) } else { q(0) }).collect())
        .collect();
    let orientation_sign = if d == 0 || det(m) == q(1) { 1 } else { -1 };
    Ok(SignLedger {
        genus: g,
        class_sign,
        orientation_sign,
        product: class_sign * orientation_sign,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignRow {
    pub genus: usize,
    pub involution_full: i8,
    /// `(n, sign)` for `1 ≤ n ≤ g − 3`.
    pub involution_truncated: Vec<(usize, i8)>,
    pub theta: SignLedger,
}

pub fn signs_table(gmax: usize) -> Result<Vec<SignRow>> {
    (3..=gmax)
        .map(|g| {
            Ok(SignRow {
                genus: g,
                involution_full: involution_sign(Family::Full, g)?.sign,
                involution_truncated: (1..=g.saturating_sub(3))
                    .map(|n| Ok((n, involution_sign(Family::Truncated(n), g)?.sign)))
                    .collect::<Result<_>>()?,
                theta: theta_signs(g)?,
            })
        })
        .collect()
}

/// Splittings with pairwise distinct orbit keys, for sweeps and certificates.
pub mod sample {
    use super::*;
    use crate::symplectic::{axpy, e, f, sample as ssample};
    use rand::Rng;

    /// The standard splitting with `x = Σ (k − i)·eᵢ` over the `k` leading summands.
    pub fn standard(g: usize, family: Family) -> Splitting {
        let k = family.summand_count(g);
        let mut x = vec![BigInt::zero(); 2 * g];
        for i in 0..k {
            x = axpy(&x, &BigInt::from((k - i) as i64), &e(g, i));
        }
        Splitting::standard(g, family, x).expect("standard splitting is valid")
    }

    /// `count` splittings of `x` with distinct keys, obtained from the standard
    /// one by transvections along classes orthogonal to `x`.
    pub fn distinct_splittings<R: Rng>(rng: &mut R, g: usize, family: Family, count: usize) -> Vec<Splitting> {
        let base = standard(g, family);
        let x = base.x.clone();
        let k = family.summand_count(g);
        // x · f_{k-1} = 1 for the standard x.
        let y = f(g, k - 1);
        let mut out = vec![base.clone()];
        let mut keys = vec![orbit_key(&base).expect("valid")];
        let mut tries = 0;
        while out.len() < count && tries < 100 * count {
            tries += 1;
            let c = ssample::vector(rng, 2 * g, 2);
            let kx = intersection(&x, &c).expect("same length");
            let c = axpy(&c, &-kx, &y);
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            let s = rng.gen_range(1..=2i64) * if rng.gen() { 1 } else { -1 };
            let Ok(m) = transvection_matrix(&c, &BigInt::from(s)) else {
                continue;
            };
            let src = &out[rng.gen_range(0..out.len())];
            let cand = src.map(&m);
            if cand.x != x || !cand.is_valid() {
                continue;
            }
            let Ok(key) = orbit_key(&cand) else { continue };
            if !keys.contains(&key) {
                keys.push(key);
                out.push(cand);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::sample::{distinct_splittings, standard};
    use super::*;
    use crate::symplectic::f;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn genus_three_symbol() {
        let s = standard(3, Family::Full);
        let sym = make_symbol(&s, Some(&[f(3, 1)]), None).unwrap();
        assert_eq!(sym.degree, 3);
        let gens: Vec<Generator> = sym.twists.iter().map(|t| t.generator).collect();
        assert_eq!(
            gens,
            vec![
                Generator::BoundingPair { index: 1 },
                Generator::Separating { index: 1 },
                Generator::Separating { index: 2 }
            ]
        );
        assert_eq!(sym.to_string(), "A(BP(beta1,beta1'), T(delta1), T(delta2))");
    }

    #[test]
    fn truncated_symbol_degree() {
        let s = standard(4, Family::Truncated(1));
        let sym = make_symbol(&s, None, Some(7)).unwrap();
        assert_eq!(sym.twists.len(), 2);
        assert_eq!(sym.payload.as_ref().unwrap().degree, 4);
        assert_eq!(sym.degree, 6);
        assert!(make_symbol(&s, None, None).is_err());
    }

    #[test]
    fn bad_partner_is_rejected() {
        let s = standard(3, Family::Full);
        let e1 = crate::symplectic::e(3, 1);
        let err = make_symbol(&s, Some(&[e1]), None).unwrap_err();
        assert!(err.to_string().contains("a1·b1"), "{err}");
    }

    #[test]
    fn reversal_identity() {
        for g in 3..=8 {
            assert_eq!(reversal_sign(g), 1);
        }
        let s = standard(4, Family::Full);
        let b = default_b(&s).unwrap();
        let mut rb = b.clone();
        rb.reverse();
        let u = make_symbol(&s, Some(&b), None).unwrap();
        let ubar = make_symbol(&s.reverse().unwrap(), Some(&rb), None).unwrap();
        assert_eq!(u, ubar);
        let key = orbit_key(&s).unwrap();
        let v = phi_evaluate(&key, &ubar).unwrap();
        assert_eq!(v.value.unwrap().sign, 1);
        assert!(v.checklist.is_pass(), "{}", v.checklist.summary());
    }

    #[test]
    fn phi_on_other_orbits_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ss = distinct_splittings(&mut rng, 3, Family::Full, 3);
        assert_eq!(ss.len(), 3);
        let syms: Vec<_> = ss.iter().map(|s| make_symbol(s, None, None).unwrap()).collect();
        for (i, s) in syms.iter().enumerate() {
            let nonzero = ss
                .iter()
                .filter(|t| phi_evaluate(&orbit_key(t).unwrap(), s).unwrap().value.is_some())
                .count();
            assert_eq!(nonzero, 1, "symbol {i}");
        }
    }

    #[test]
    fn certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ss = distinct_splittings(&mut rng, 3, Family::Full, 3);
        let syms: Vec<_> = ss.iter().map(|s| make_symbol(s, None, None).unwrap()).collect();
        let c = independence_certificate(&syms).unwrap();
        assert!(c.certified, "{}", c.verify().summary());
        assert_eq!(c.rank, 3);
        let one = independence_certificate(&syms[..1]).unwrap();
        assert_eq!((one.rank, one.certified), (1, true));

        let rs = ss[1].reverse().unwrap();
        let mut rb = default_b(&ss[1]).unwrap();
        rb.reverse();
        let mut with_dup = syms.clone();
        with_dup.push(make_symbol(&rs, Some(&rb), None).unwrap());
        let d = independence_certificate(&with_dup).unwrap();
        assert!(!d.certified);
        assert_eq!(d.duplicates, vec![(1, 3)]);
        assert_eq!(d.rank, 3);

        // Removing any link invalidates the certificate.
        for name in REQUIRED_LINKS {
            let mut broken = c.clone();
            broken.links = Report::new();
            for ch in &c.links.checks {
                if ch.name != name {
                    broken.links.push(&ch.name, ch.pass, ch.detail.clone());
                }
            }
            assert!(!broken.verify().is_pass(), "{name}");
        }
        let mut no_axiom = c.clone();
        no_axiom.axioms_cited.clear();
        assert!(!no_axiom.verify().is_pass());
    }

    #[test]
    fn truncated_certificate_counts_payloads() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ss = distinct_splittings(&mut rng, 4, Family::Truncated(1), 2);
        let mut syms = Vec::new();
        for s in &ss {
            for lambda in 0..2 {
                syms.push(make_symbol(s, None, Some(lambda)).unwrap());
            }
        }
        let c = independence_certificate(&syms).unwrap();
        assert!(c.certified, "{}", c.verify().summary());
        assert_eq!(c.rank, 4);
        assert!(c.axioms_cited.iter().any(|a| a == AXIOM_PAYLOAD));
    }

    #[test]
    fn signs() {
        assert_eq!(involution_sign(Family::Full, 3).unwrap().sign, -1);
        assert_eq!(involution_sign(Family::Full, 4).unwrap().sign, 1);
        assert_eq!(involution_sign(Family::Truncated(2), 5).unwrap().sign, 1);
        let t3 = theta_signs(3).unwrap();
        assert_eq!((t3.class_sign, t3.orientation_sign, t3.product), (-1, -1, 1));
        let t5 = theta_signs(5).unwrap();
        assert_eq!((t5.class_sign, t5.orientation_sign), (1, 1));
        for row in signs_table(12).unwrap() {
            let g = row.genus;
            assert_eq!(row.involution_full, if g % 2 == 0 { 1 } else { -1 });
            assert_eq!(row.theta.product, 1);
            for (n, s) in row.involution_truncated {
                assert_eq!(s, if n % 2 == 0 { 1 } else { -1 });
            }
            let inv = involution_sign(Family::Full, g).unwrap();
            assert_eq!(involution_twice(&inv.image), 1);
        }
    }
}
