//! Acceptance harness: one pass/fail line per criterion, with seeds and timings.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! Criteria listed in `KNOWN_FAILING` are expected to fail; the analysis is
//! printed alongside. Any other failure, or a known failure that starts
//! passing, makes the run exit nonzero.

use std::time::{Duration, Instant};

use cyclelab_core::cartan_leray::{
    assemble_e1, certify_stable, check_vanishing, expanded_point, family_star, orbit_chain_complex,
    quotient_by_orbit, sample as planted, stable_entry, verify_corner_lemma, OrbitPattern, Poly,
    VanishingRegion,
};
use cyclelab_core::cycle_complex::{build_cell, check_membership, enumerate_basic_cycles, fixtures};
use cyclelab_core::homalg::chain::{chain_homology, free_ranks};
use cyclelab_core::homalg::double::{
    cubical_space, rotating_polygon, subdivided_space, tensor_over_group, translated_torus, FixedFactor,
};
use cyclelab_core::homalg::kunneth::product_of_free_homology;
use cyclelab_core::homalg::matrix::IntMatrix;
use cyclelab_core::homalg::ring::{binomial, free_abelian_resolution, free_group_resolution, CubeModel};
use cyclelab_core::homalg::snf::{elementary_divisors, smith_normal_form};
use cyclelab_core::homalg::sseq::{run_spectral_sequence, Limits};
use cyclelab_core::multicurve::{build_standard, sample as graphs, FamilyTag};
use cyclelab_core::symplectic::{
    intersection, orbit_key, reverse_k, sample, transvection, Family, HVec,
};
use cyclelab_core::torelli_classes::{
    independence_certificate, involution_twice, involution_sign, make_symbol, sample as splittings, signs_table,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const LIMIT_DIMENSION_FORMULA: Duration = Duration::from_secs(10);
const LIMIT_TORUS: Duration = Duration::from_secs(30);
const LIMIT_CORNER: Duration = Duration::from_secs(120);
const LIMIT_INDEPENDENCE: Duration = Duration::from_secs(60);
const MAX_L: i64 = 5;
const TRUNCATION_MAX: u64 = 4;
const KUNNETH_T_MAX: usize = 2;
const PLANTED_COMPLEXES: u64 = 100;
const INDEPENDENT_SPLITTINGS: usize = 20;
const SIGN_GENUS_MAX: usize = 12;
const INVARIANT_CASES: u64 = 10_000;

/// Criteria expected to fail, with the reason.
const KNOWN_FAILING: &[(usize, &str)] = &[(
    2,
    "the multicurve also carries the basic cycle g3 + g5 ([g3] + [g5] = a3 + (a1 + a2 + a3) = x, \
     independent support classes), so the set of basic cycles has three elements, not exactly two",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let mut out = f();
    let el = t.elapsed();
    if let Some(l) = limit {
        if el > l {
            out.pass = false;
            out.detail += &format!("; over the {:.0} s limit", l.as_secs_f64());
        }
    }
    (out, el)
}

fn dimension_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut cells = 0;
    let mut bad = Vec::new();
    for g in 3..=6 {
        let mut tags = vec![FamilyTag::N];
        tags.extend((1..=g - 3).map(FamilyTag::Nn));
        for tag in tags {
            let family = match tag {
                FamilyTag::Nn(n) => Family::Truncated(n),
                _ => Family::Full,
            };
            for _ in 0..3 {
                let s = sample::splitting(&mut rng, g, family, MAX_L, 3);
                let m = build_standard(tag, &s, None).expect("standard configuration");
                let inv = m.invariants().expect("valid graph");
                match build_cell(&m, &s.x) {
                    Ok(c) if c.dimension == inv.size - inv.homology_rank && c.dimension == inv.components - 1 => {
                        cells += 1
                    }
                    Ok(c) => bad.push(format!("g={g} {tag:?}: dim {}", c.dimension)),
                    Err(e) => bad.push(format!("g={g} {tag:?}: {e}")),
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("{cells} cells, 3 <= g <= 6, l_i <= {MAX_L}, seed {SEED}; failures {bad:?}"),
    )
}

fn remark_regression() -> Outcome {
    let (m, x) = fixtures::dependent_five_curves();
    let cycles = enumerate_basic_cycles(&m, &x).expect("enumerates");
    let found: Vec<String> = cycles.iter().map(|c| c.to_string()).collect();
    let expected = ["g1 + g2 + 2*g3", "g4 + 2*g5"];
    let contains = expected.iter().all(|e| found.iter().any(|f| f == e));
    let exactly = contains && found.len() == expected.len();
    let mem = check_membership(&m, &x).expect("membership");
    let witness_ok = mem.witness.as_ref().is_some_and(|w| {
        let nonneg = w.iter().all(|c| !c.is_negative()) && w.iter().any(|c| !c.is_zero());
        let sum = (0..m.dim()).all(|i| {
            m.curves
                .iter()
                .zip(w)
                .map(|(c, k)| &c.class[i] * k)
                .sum::<BigInt>()
                .is_zero()
        });
        nonneg && sum
    });
    let parts = [
        ("both listed cycles are basic", contains),
        ("exactly two basic cycles", exactly),
        ("condition (1) holds", mem.covered),
        ("condition (2) fails", !mem.no_null_combination),
        ("witness is nonnegative and sums to zero", witness_ok),
    ];
    let detail: Vec<String> = parts
        .iter()
        .map(|(n, ok)| format!("{n}: {}", if *ok { "yes" } else { "no" }))
        .collect();
    Outcome::new(
        parts.iter().all(|p| p.1),
        format!("found [{}]; {}", found.join(", "), detail.join("; ")),
    )
}

fn torus_oracle() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in 1..=4 {
        let c = cubical_space(n, FixedFactor::Trivial);
        let b = tensor_over_group(&c, CubeModel::Cubical).expect("double complex");
        let run = run_spectral_sequence(&b, &Limits::default()).expect("runs");
        let via_sseq = run.total_free_ranks();
        let direct = free_ranks(&chain_homology(&orbit_chain_complex(&c).expect("orbit complex")).expect("homology"));
        let want: Vec<usize> = (0..=n).map(|k| binomial(n, k)).collect();
        let good = via_sseq == want && direct == want;
        ok &= good;
        lines.push(format!("n={n} {via_sseq:?}"));
    }
    Outcome::new(ok, lines.join(", "))
}

fn corner_lemma() -> Outcome {
    let mut cases = 0;
    let mut bad = Vec::new();
    for n in 1..=4 {
        for j in 0..=4 - n {
            for q in 0..=j {
                cases += 1;
                match verify_corner_lemma(n, j, q) {
                    Ok(r) => {
                        let good = r.passes()
                            && r.e1_rank == binomial(j, q)
                            && r.e_infinity_rank == r.e1_rank
                            && r.filtration_degrees.iter().all(|d| *d == Some(n));
                        if !good {
                            bad.push(format!("({n},{j},{q}): {}", r.checks.summary()));
                        }
                    }
                    Err(e) => bad.push(format!("({n},{j},{q}): {e}")),
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{cases} cases with n + j <= 4; failures {bad:?}"))
}

fn stability() -> Outcome {
    let mut entries = 0;
    let mut bad = Vec::new();
    for g in 3..=8 {
        let mut fams = vec![Family::Full];
        fams.extend((1..=g - 3).map(Family::Truncated));
        for fam in fams {
            let (entry, region) = stable_entry(fam, g);
            let (want, want_region) = match fam {
                Family::Full => ((g - 2, g - 1), VanishingRegion::full_family(g)),
                Family::Truncated(n) => ((n, 3 * g - 5 - 2 * n), VanishingRegion::truncated_family(g, n)),
            };
            entries += 1;
            if entry != want || region != want_region || !certify_stable(&region, entry).certified {
                bad.push(format!("g={g} {fam:?}"));
            }
        }
    }
    let mut checked = 0;
    for seed in 0..PLANTED_COMPLEXES {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ seed);
        let pl = planted::region_complex(&mut rng, 5);
        let run = match run_spectral_sequence(&pl.complex, &Limits::default()) {
            Ok(r) => r,
            Err(e) => {
                bad.push(format!("planted seed {seed}: {e}"));
                continue;
            }
        };
        for p in 0..5 {
            for q in 0..5 {
                let e1 = run.e(1, p, q);
                if !e1.is_zero() && !pl.allowed.contains(&(p, q)) {
                    bad.push(format!("planted seed {seed}: E1 outside the region at ({p},{q})"));
                }
                if certify_stable(&pl.region, (p, q)).certified {
                    checked += 1;
                    if e1 != run.e_infinity(p, q) {
                        bad.push(format!("planted seed {seed}: E1 != E-infinity at ({p},{q})"));
                    }
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "{entries} entries for 3 <= g <= 8; {checked} certified positions on {PLANTED_COMPLEXES} planted complexes (seed {SEED}); failures {bad:?}"
        ),
    )
}

fn monomial(c: u64, q: usize) -> Poly {
    let mut v = vec![0; q];
    v.push(c);
    Poly(v)
}

fn hn_structure() -> Outcome {
    let mut bad = Vec::new();
    let mut kunneth = 0;
    for g in 3..=6usize {
        let s = splittings::standard(g, Family::Full);
        let extra: Vec<usize> = (1..g).collect();
        let (m, data) = match family_star(FamilyTag::N, &s, &extra) {
            Ok(v) => v,
            Err(e) => {
                bad.push(format!("g={g}: {e}"));
                continue;
            }
        };
        let n = build_standard(FamilyTag::N, &s, None).expect("chain");
        let pattern = OrbitPattern {
            tag: FamilyTag::N,
            x: s.x.clone(),
            n_curves: n.curves.iter().map(|c| c.id.clone()).collect(),
        };
        let quot = match quotient_by_orbit(&data, &m, &pattern) {
            Ok(q) => q,
            Err(e) => {
                bad.push(format!("g={g} quotient: {e}"));
                continue;
            }
        };
        for t in 1..=TRUNCATION_MAX {
            let grid = assemble_e1(&quot, t);
            for q in 0..g {
                let want = monomial(binomial(g - 1, q) as u64, q);
                match grid.poly(g - 2, q) {
                    Ok(p) if p == want && p.eval(t) == want.eval(t) => {}
                    other => bad.push(format!("g={g} t={t} q={q}: {other:?}")),
                }
            }
            if !check_vanishing(&grid, &VanishingRegion::full_family(g)).is_pass() {
                bad.push(format!("g={g} t={t}: support meets the vanishing region"));
            }
        }
        if g <= 4 {
            let bottom = quot.layer(g - 2);
            let stab = &bottom[0].stab;
            for t in 1..=KUNNETH_T_MAX {
                let c = expanded_point(stab, t).expect("finite model");
                let b = tensor_over_group(&c, CubeModel::Cubical).expect("double complex");
                let run = run_spectral_sequence(&b, &Limits::default()).expect("runs");
                let oracle = free_ranks(&product_of_free_homology(&vec![t; g - 1]));
                for q in 0..g {
                    let closed = monomial(binomial(g - 1, q) as u64, q).eval(t as u64) as usize;
                    let e1 = run.e(1, 0, q).free;
                    kunneth += 1;
                    if e1 != closed || oracle.get(q).copied().unwrap_or(0) != closed {
                        bad.push(format!("g={g} t={t} q={q}: E1 {e1}, oracle {:?}, closed {closed}", oracle.get(q)));
                    }
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("closed form for 3 <= g <= 6, t <= {TRUNCATION_MAX}; {kunneth} Kunneth comparisons; failures {bad:?}"),
    )
}

fn independence() -> Outcome {
    let mut bad = Vec::new();
    let mut lines = Vec::new();
    for g in 3..=5 {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + g as u64);
        let ss = splittings::distinct_splittings(&mut rng, g, Family::Full, INDEPENDENT_SPLITTINGS);
        if ss.len() < INDEPENDENT_SPLITTINGS {
            bad.push(format!("g={g}: only {} distinct keys", ss.len()));
            continue;
        }
        let syms: Vec<_> = match ss.iter().map(|s| make_symbol(s, None, None)).collect() {
            Ok(v) => v,
            Err(e) => {
                bad.push(format!("g={g}: {e}"));
                continue;
            }
        };
        let cert = independence_certificate(&syms).expect("certificate");
        let k = INDEPENDENT_SPLITTINGS;
        let identity = cert.matrix.len() == k
            && cert
                .matrix
                .iter()
                .enumerate()
                .all(|(i, row)| row.len() == k && row.iter().enumerate().all(|(j, v)| *v == (i == j) as i64));
        if !(identity && cert.rank == k && cert.certified) {
            bad.push(format!("g={g}: rank {}, identity {identity}, certified {}", cert.rank, cert.certified));
        }
        let s0 = &ss[0];
        let mut rb = s0.partners().expect("partners")[1..=g - 2].to_vec();
        rb.reverse();
        let dup = make_symbol(&s0.reverse().expect("full family"), Some(&rb), None).expect("reversed symbol");
        let mut with_dup = syms.clone();
        with_dup.push(dup);
        let d = independence_certificate(&with_dup).expect("certificate");
        if d.certified || d.duplicates.is_empty() {
            bad.push(format!("g={g}: reversed duplicate accepted"));
        }
        lines.push(format!("g={g} rank {}", cert.rank));
    }
    Outcome::new(bad.is_empty(), format!("{} (seed {SEED}+g); failures {bad:?}", lines.join(", ")))
}

fn sign_tables() -> Outcome {
    let table = signs_table(SIGN_GENUS_MAX).expect("table");
    let mut bad = Vec::new();
    for r in &table {
        let g = r.genus;
        let pm = |k: usize| if k % 2 == 0 { 1 } else { -1 };
        if r.involution_full != pm(g - 2) {
            bad.push(format!("g={g} full"));
        }
        for &(n, s) in &r.involution_truncated {
            if s != pm(n) {
                bad.push(format!("g={g} n={n}"));
            }
        }
        if r.theta.product != 1 || r.theta.class_sign != pm((g - 1) * (g - 2) / 2) {
            bad.push(format!("g={g} theta"));
        }
        if involution_twice(&involution_sign(Family::Full, g).expect("sign").image) != 1 {
            bad.push(format!("g={g} involution squared"));
        }
    }
    Outcome::new(bad.is_empty(), format!("{} genera up to {SIGN_GENUS_MAX}; failures {bad:?}", table.len()))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
    let rows: Vec<Vec<i64>> = (0..m)
        .map(|_| (0..n).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(-5..=5) }).collect())
        .collect();
    IntMatrix::from_i64(&rows)
}

fn invariant_suite() -> Outcome {
    let mut fails = [0u64; 4];
    let mut first: Vec<String> = Vec::new();
    let mut note = |k: usize, seed: u64, what: String, fails: &mut [u64; 4]| {
        fails[k] += 1;
        if first.len() < 5 {
            first.push(format!("seed {seed}: {what}"));
        }
    };
    for case in 0..INVARIANT_CASES {
        let seed = SEED.wrapping_mul(31).wrapping_add(case);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        // Transvections preserve the intersection form.
        let g = rng.gen_range(1..=4);
        let gamma: HVec = sample::nonzero_vector(&mut rng, 2 * g, 4);
        let (c, d) = (sample::vector(&mut rng, 2 * g, 6), sample::vector(&mut rng, 2 * g, 6));
        let s = BigInt::from(rng.gen_range(-4..=4));
        let (tc, td) = (transvection(&gamma, &s, &c).unwrap(), transvection(&gamma, &s, &d).unwrap());
        if intersection(&tc, &td).unwrap() != intersection(&c, &d).unwrap() {
            note(0, seed, "form not preserved".into(), &mut fails);
        }

        // Shift group: action, freeness, reversal compatibility, key invariance.
        let g = rng.gen_range(3..=5);
        let family = if g >= 4 && rng.gen_bool(0.5) { Family::Truncated(rng.gen_range(1..=g - 3)) } else { Family::Full };
        let u = sample::splitting(&mut rng, g, family, 4, 3);
        let len = family.shift_len(g);
        let k = sample::shift_vector(&mut rng, len, 3);
        let k2 = sample::shift_vector(&mut rng, len, 3);
        let laws = (|| -> cyclelab_core::Result<bool> {
            let uk = u.shift(&k)?;
            let sum: Vec<BigInt> = k.iter().zip(&k2).map(|(a, b)| a + b).collect();
            let mut ok = uk.is_valid() && uk.shift(&k2)? == u.shift(&sum)?;
            ok &= (uk == u) == k.iter().all(Zero::is_zero);
            if family == Family::Full {
                ok &= uk.reverse()? == u.reverse()?.shift(&reverse_k(&k))?;
            }
            Ok(ok && orbit_key(&u)? == orbit_key(&uk)?)
        })();
        if !matches!(laws, Ok(true)) {
            note(1, seed, format!("shift laws: {laws:?}"), &mut fails);
        }

        // ∂² = 0 on constructed complexes.
        let square_zero = match case % 4 {
            0 => {
                let pl = planted::region_complex(&mut rng, 4);
                pl.complex.validate().is_ok() && pl.complex.total_complex().check_square_zero().is_ok()
            }
            1 => {
                let splits = rng.gen_range(0..2);
                let (gr, s) = graphs::graph(&mut rng, 3, splits, 0.2);
                match build_cell(&gr, &s.x) {
                    Ok(cell) => cell.chain_complex().map_or(false, |c| c.check_square_zero().is_ok()),
                    Err(cyclelab_core::Error::Refused(_)) => true,
                    Err(_) => false,
                }
            }
            2 => {
                let fixed = match rng.gen_range(0..3) {
                    0 => FixedFactor::Trivial,
                    1 => FixedFactor::FreeAbelian(rng.gen_range(1..=2)),
                    _ => FixedFactor::ProductOfFree(vec![rng.gen_range(1..=2)]),
                };
                let c = match rng.gen_range(0..4) {
                    0 => cubical_space(rng.gen_range(1..=2), fixed),
                    1 => subdivided_space(1, rng.gen_range(2..=3), fixed),
                    2 => translated_torus(1, rng.gen_range(2..=3), fixed),
                    _ => rotating_polygon(rng.gen_range(3..=5)),
                };
                let model = if rng.gen_bool(0.5) { CubeModel::Cubical } else { CubeModel::KoszulExterior };
                tensor_over_group(&c, model).map_or(false, |b| {
                    b.validate().is_ok() && b.total_complex().check_square_zero().is_ok()
                })
            }
            _ => {
                let model = if rng.gen_bool(0.5) { CubeModel::Cubical } else { CubeModel::KoszulExterior };
                let a = free_abelian_resolution(rng.gen_range(0..=3), model);
                let f = free_group_resolution(rng.gen_range(1..=3));
                a.check_square_zero()
                    && f.check_square_zero()
                    && a.augmented().tensor(&f.augmented()).check_square_zero().is_ok()
            }
        };
        if !square_zero {
            note(2, seed, format!("square-zero kind {}", case % 4), &mut fails);
        }

        // Smith normal form: unimodular transforms, diagonal, divisibility.
        let a = random_matrix(&mut rng);
        let sm = smith_normal_form(&a);
        let unit = |m: &IntMatrix| m.determinant().map_or(false, |d| d.abs().is_one());
        let mut ok = sm.u.mul(&a).and_then(|x| x.mul(&sm.v)).map_or(false, |x| x == sm.d)
            && unit(&sm.u)
            && unit(&sm.v)
            && sm.u.mul(&sm.u_inv).map_or(false, |x| x == IntMatrix::identity(a.rows()))
            && sm.v.mul(&sm.v_inv).map_or(false, |x| x == IntMatrix::identity(a.cols()))
            && sm.d.entries().all(|(i, j, _)| i == j)
            && sm.diag.iter().all(|x| x.is_positive())
            && sm.diag.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        ok &= elementary_divisors(&a) == sm.diag;
        if !ok {
            note(3, seed, "smith form".into(), &mut fails);
        }
    }
    let total: u64 = fails.iter().sum();
    Outcome::new(
        total == 0,
        format!(
            "{INVARIANT_CASES} cases each (seeds {SEED}*31 + i); failures form {}, shifts {}, square-zero {}, smith {}; {first:?}",
            fails[0], fails[1], fails[2], fails[3]
        ),
    )
}

fn main() {
    type Criterion = (usize, &'static str, Option<Duration>, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        (1, "dimension formula on standard families", Some(LIMIT_DIMENSION_FORMULA), dimension_formula),
        (2, "dependent five-curve regression", None, remark_regression),
        (3, "torus oracle for the spectral sequence", Some(LIMIT_TORUS), torus_oracle),
        (4, "corner-entry lemma", Some(LIMIT_CORNER), corner_lemma),
        (5, "stability certificates", None, stability),
        (6, "E1 of the chain stabilizer", None, hn_structure),
        (7, "independence certificates", Some(LIMIT_INDEPENDENCE), independence),
        (8, "sign tables", None, sign_tables),
        (9, "algebraic invariant suite", None, invariant_suite),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = 0;
    for (id, name, limit, f) in criteria {
        if filter.is_some_and(|k| k != id) {
            continue;
        }
        let (out, el) = timed(limit, f);
        let known = KNOWN_FAILING.iter().find(|(k, _)| *k == id);
        println!(
            "criterion {id}: {} {name} ({:.2} s) {}",
            if out.pass { "PASS" } else { "FAIL" },
            el.as_secs_f64(),
            out.detail
        );
        match (out.pass, known) {
            (false, Some((_, why))) => println!("criterion {id}: known failure: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                println!("criterion {id}: listed as known failing but passed; update KNOWN_FAILING");
                unexpected += 1;
            }
            (true, None) => {}
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} unexpected acceptance results");
        std::process::exit(1);
    }
}
