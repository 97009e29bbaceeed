//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use edp_cli::parse_model;
use edp_core::constructions::{
    norm_extension_module, permutation_lattice, random_module, random_presentation, sign_torus, small_groups,
    standard_module, NormExtensionSpec, StandardKind,
};
use edp_core::gmodule::{cobar, direct_sum, module_structure, prime_to_p_modification};
use edp_core::presentation::{cokernel_prime_to_p, spans_cobar, PermutationModule};
use edp_core::solver::{brute_force_ed, c_rank, ed, minimal_p_presentation, wreath_ed};
use edp_core::{FiniteGroup, GModule, Subgroup};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture_path(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect()
}

fn fixture_group(name: &str) -> FiniteGroup {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse_model(&text).expect("fixture parses").group
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: edp_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Small groups of order at most 8 for p = 2 and 3.
fn oracle_groups() -> Vec<FiniteGroup> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        out.extend(
            small_groups(p)
                .unwrap()
                .into_iter()
                .map(|(_, g)| g)
                .filter(|g| g.order() <= 8),
        );
    }
    out
}

fn random_suite(seed: u64, count: usize) -> Vec<GModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gs = oracle_groups();
    (0..count)
        .map(|i| random_module(&mut rng, &gs[i % gs.len()], 4).expect("random module"))
        .collect()
}

fn norm_closed_form() -> Outcome {
    let mut cases = 0;
    for name in ["z2.edp", "z4.edp", "z2xz2.edp", "z8.edp", "d4.edp", "q8.edp"] {
        let g = fixture_group(name);
        let reps: Vec<Subgroup> = core(g.enumerate_subgroups())?
            .classes
            .into_iter()
            .map(|c| c.representative)
            .collect();
        let k = reps.len();
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        for a in 0..k {
            subsets.push(vec![a]);
            for b in a + 1..k {
                subsets.push(vec![a, b]);
                for c in b + 1..k {
                    subsets.push(vec![a, b, c]);
                }
            }
        }
        for s in &subsets {
            let stabilizers: Vec<Subgroup> = s.iter().map(|&i| reps[i].clone()).collect();
            let has_full = stabilizers.iter().any(|h| h.order() == g.order());
            for r in 0..=2u32 {
                let x = core(norm_extension_module(&NormExtensionSpec {
                    group: g.clone(),
                    stabilizers: stabilizers.clone(),
                    r,
                }))?;
                let expected = usize::from(!(r == 0 && has_full));
                let got = core(ed(&x))?;
                ensure(got == expected, || {
                    format!("{name} stabilizers {s:?} r={r}: ed {got}, expected {expected}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases"))
}

fn sign_tori() -> Outcome {
    for n in 1..=4 {
        let x = core(sign_torus(n))?;
        let e = core(ed(&x))?;
        ensure(e == n, || format!("n={n}: ed {e}"))?;
        if n <= 3 {
            let b = core(brute_force_ed(&x, 2 * n))?;
            ensure(b == n, || format!("n={n}: oracle {b}"))?;
        }
    }
    Ok("n = 1..4".into())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let suite = random_suite(0xED01, 120);
    for (i, x) in suite.iter().enumerate() {
        let r = core(minimal_p_presentation(x))?;
        let bound = r.cobar_dim * x.group().order();
        let b = core(brute_force_ed(x, bound))?;
        ensure(b == r.ed, || format!("module {i}: solver {} oracle {b}", r.ed))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("{} modules in {:.2?}", suite.len(), took))
}

fn double_criterion() -> Outcome {
    let suite = random_suite(0xED01, 120);
    let mut rng = ChaCha8Rng::seed_from_u64(0xED04);
    let mut checked = 0;
    for x in &suite {
        let w = core(minimal_p_presentation(x))?.witness;
        ensure(spans_cobar(&w) && cokernel_prime_to_p(&w), || {
            "witness fails a criterion".into()
        })?;
        checked += 1;
    }
    let mut positives = 0;
    for i in 0..50 {
        let x = &suite[i % suite.len()];
        let phi = core(random_presentation(&mut rng, x))?;
        let (a, b) = (spans_cobar(&phi), cokernel_prime_to_p(&phi));
        ensure(a == b, || format!("random presentation {i}: span {a} cokernel {b}"))?;
        positives += usize::from(a);
        checked += 1;
    }
    Ok(format!(
        "{checked} maps, {positives}/50 random maps are p-presentations"
    ))
}

fn additivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xED05);
    let gs = oracle_groups();
    for i in 0..50 {
        let g = gs.choose(&mut rng).unwrap();
        let a = core(random_module(&mut rng, g, 4))?;
        let b = core(random_module(&mut rng, g, 4))?;
        let (ea, eb) = (core(ed(&a))?, core(ed(&b))?);
        let es = core(ed(&core(direct_sum(&a, &b))?))?;
        ensure(es == ea + eb, || format!("pair {i}: {es} != {ea} + {eb}"))?;
    }
    Ok("50 pairs".into())
}

fn isogeny_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xED06);
    let suite = random_suite(0xED16, 50);
    for (i, x) in suite.iter().enumerate() {
        let qs: Vec<u64> = [2u64, 3, 5].into_iter().filter(|&q| q != x.p()).collect();
        let q = *qs.choose(&mut rng).unwrap();
        let seed: u64 = rng.gen();
        let y = core(prime_to_p_modification(x, q, seed))?;
        let (ex, ey) = (core(ed(x))?, core(ed(&y))?);
        ensure(ex == ey, || format!("triple {i} (q={q}, seed={seed}): {ex} != {ey}"))?;
    }
    Ok("50 triples".into())
}

fn fixed_vector_conditions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xED07);
    let gs = oracle_groups();
    let (mut inside, mut outside) = (0, 0);
    for i in 0..100 {
        let g = gs.choose(&mut rng).unwrap();
        let subs: Vec<Subgroup> = core(g.enumerate_subgroups())?
            .classes
            .into_iter()
            .flat_map(|c| c.members)
            .collect();
        let k = rng.gen_range(1..=4);
        let summands = (0..k).map(|_| subs.choose(&mut rng).unwrap().clone()).collect();
        let pm = core(PermutationModule::new(g.clone(), summands))?;
        let mut v = vec![BigInt::from(0); pm.rank()];
        for sum in pm.orbit_sums() {
            let c = BigInt::from(rng.gen_range(-3i64..=3));
            for (a, b) in v.iter_mut().zip(&sum) {
                *a += &c * b;
            }
        }
        ensure(pm.is_fixed(&v), || format!("vector {i} not fixed"))?;
        let (b, c) = (pm.in_augmentation_sublattice(&v), pm.coefficient_condition(&v));
        ensure(b == c, || format!("vector {i}: membership {b}, coefficients {c}"))?;
        if b {
            inside += 1;
        } else {
            outside += 1;
        }
    }
    Ok(format!("100 vectors, {inside} inside, {outside} outside"))
}

fn cli_value(args: &[&str], key: &str) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_edp"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited with {:?}", out.status.code())
    })?;
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .map(str::to_owned)
        .ok_or_else(|| format!("{args:?}: no `{key}` in output"))
}

fn sandwich_cli() -> Outcome {
    let bounds = ["bounds", "--pfaithful", "2", "--pgenfree", "3", "--dim", "1"];
    let lower = cli_value(&bounds, "lower")?;
    let upper = cli_value(&bounds, "upper")?;
    ensure(lower == "1" && upper == "2", || format!("bounds {lower}..{upper}"))?;
    let sign = fixture_path("sign1.edp");
    let sign = sign.to_str().unwrap();
    let gap = cli_value(&["gap", sign], "gap")?;
    ensure(gap == "1", || format!("gap {gap}"))?;
    let tame = cli_value(&["tame", sign], "tame")?;
    ensure(tame == "false", || format!("tame {tame}"))?;
    Ok("lower 1, upper 2, gap 1, tame false".into())
}

fn c_ranks() -> Outcome {
    for p in [2u64, 3] {
        for s in 0..=3usize {
            for m in 0..=3usize {
                let mut x = core(standard_module(&StandardKind::SplitTorus { p, n: m }))?;
                for _ in 0..s {
                    x = core(direct_sum(&x, &core(standard_module(&StandardKind::Mu { p, r: 1 }))?))?;
                }
                // each split G_m factor adds its own mu_p to the split p-torsion center
                let c = c_rank(&x);
                ensure(c == s + m, || format!("p={p} s={s} m={m}: c_rank {c}"))?;
            }
        }
    }
    Ok("c_rank = s + m for p in {2,3}, s, m <= 3; s when m = 0".into())
}

fn torsion_and_quasi_trivial() -> Outcome {
    let mut torsion = 0;
    let dir = fixture_path("");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .filter(|n| n.ends_with(".edp"))
        .collect();
    names.sort();
    let mut modules: Vec<(String, GModule)> = Vec::new();
    for n in &names {
        let text = std::fs::read_to_string(dir.join(n)).map_err(|e| e.to_string())?;
        if let Ok(m) = parse_model(&text) {
            modules.push((n.clone(), m.module));
        }
    }
    for name in ["z2.edp", "z4.edp", "d4.edp", "q8.edp", "z3.edp"] {
        let g = fixture_group(name);
        for r in 1..=2 {
            let x = core(norm_extension_module(&NormExtensionSpec {
                group: g.clone(),
                stabilizers: vec![g.trivial_subgroup(), g.whole()],
                r,
            }))?;
            modules.push((format!("{name} norm r={r}"), x));
        }
    }
    for (name, x) in &modules {
        if module_structure(x).p_torsion {
            torsion += 1;
            let e = core(ed(x))?;
            ensure(e >= 1, || format!("{name}: p-torsion but ed {e}"))?;
        }
    }
    let mut lattices = 0;
    for name in ["z2.edp", "z4.edp", "z2xz2.edp", "z8.edp", "d4.edp", "q8.edp", "z3.edp"] {
        let g = fixture_group(name);
        let reps: Vec<Subgroup> = core(g.enumerate_subgroups())?
            .classes
            .into_iter()
            .map(|c| c.representative)
            .collect();
        for a in 0..reps.len() {
            for b in a..reps.len() {
                let x = core(permutation_lattice(&g, &[reps[a].clone(), reps[b].clone()]))?;
                let e = core(ed(&x))?;
                ensure(e == 0, || format!("{name} Z[G/{}] + Z[G/{}]: ed {e}", reps[a], reps[b]))?;
                lattices += 1;
            }
        }
    }
    Ok(format!("{torsion} torsion modules, {lattices} permutation lattices"))
}

fn wreath_branches() -> Outcome {
    let ed_sign = core(ed(&core(sign_torus(1))?))?;
    let w = core(wreath_ed(ed_sign, 2, 0))?;
    ensure(w == 2, || format!("sign branch {w}"))?;
    let ed_split = core(ed(&core(standard_module(&StandardKind::SplitTorus { p: 2, n: 1 }))?))?;
    let ed_f = core(ed(&core(standard_module(&StandardKind::Mu { p: 2, r: 1 }))?))?;
    ensure(ed_split == 0 && ed_f == 1, || format!("inputs {ed_split}, {ed_f}"))?;
    let w = core(wreath_ed(ed_split, 2, ed_f))?;
    ensure(w == 1, || format!("split branch {w}"))?;
    let dim = cobar(&core(sign_torus(2))?).dim();
    ensure(dim == 2, || format!("sign torus quotient {dim}"))?;
    Ok("2 and 1".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("norm extension closed form", norm_closed_form),
        ("sign tori", sign_tori),
        ("solver matches exhaustive oracle", oracle_equivalence),
        ("span and cokernel criteria agree", double_criterion),
        ("additivity over direct sums", additivity),
        ("prime-to-p isogeny invariance", isogeny_invariance),
        ("fixed-vector membership conditions", fixed_vector_conditions),
        ("representation-dimension sandwich via cli", sandwich_cli),
        ("rank of the split p-torsion center", c_ranks),
        ("torsion and quasi-trivial lattices", torsion_and_quasi_trivial),
        ("wreath formula branches", wreath_branches),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({took:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({took:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
