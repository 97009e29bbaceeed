//! Builders for character modules with known answers, and seeded random
//! instances for property tests.

use num_bigint::BigInt;
use num_traits::{One, Pow};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exactlin::{check_prime, lattice_basis, IntMatrix, LatticeSolver};
use crate::gmodule::{direct_sum, fixed_preimage_lattice, validate_module, GModule};
use crate::pgroup::{FiniteGroup, Subgroup};
use crate::presentation::{PermutationModule, PresentationMap};

/// Permutation matrices of the coset action on `sum_i Z[G/H_i]`, indexed by
/// element id.
fn coset_action_matrices(pm: &PermutationModule) -> Vec<IntMatrix> {
    let n = pm.rank();
    (0..pm.group().order())
        .map(|g| {
            let mut m = IntMatrix::zeros(n, n);
            for idx in 0..n {
                m[(pm.act_on_basis(g, idx), idx)] = BigInt::one();
            }
            m
        })
        .collect()
}

/// The permutation lattice `sum_i Z[G/H_i]` as a module without relations.
pub fn permutation_lattice(group: &FiniteGroup, subgroups: &[Subgroup]) -> Result<GModule> {
    let pm = PermutationModule::new(group.clone(), subgroups.to_vec())?;
    let actions = coset_action_matrices(&pm);
    let m = GModule::from_parts_unchecked(group.p(), group.clone(), IntMatrix::zeros(pm.rank(), 0), actions);
    validate_module(&m)?;
    Ok(m)
}

/// Data for the preimage of `mu_{p^r}` under the norm of an étale algebra
/// whose factors have the given stabilizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormExtensionSpec {
    pub group: FiniteGroup,
    pub stabilizers: Vec<Subgroup>,
    pub r: u32,
}

/// `P / <w>` with `P = sum_i Z[G/H_i]` and `w = p^r` times the sum of all
/// coset basis vectors; for `r = 0` this is the norm-one torus lattice.
pub fn norm_extension_module(spec: &NormExtensionSpec) -> Result<GModule> {
    if spec.stabilizers.is_empty() {
        return Err(Error::InvalidParameter("at least one stabilizer required".into()));
    }
    let pm = PermutationModule::new(spec.group.clone(), spec.stabilizers.clone())?;
    let scale: BigInt = BigInt::from(spec.group.p()).pow(spec.r);
    let w: Vec<BigInt> = vec![scale; pm.rank()];
    let relations = IntMatrix::from_columns(pm.rank(), &[w]);
    let actions = coset_action_matrices(&pm);
    let m = GModule::from_parts_unchecked(spec.group.p(), spec.group.clone(), relations, actions);
    validate_module(&m)?;
    Ok(m)
}

/// `Z^n` with `Z/2` acting by `-1`, at p = 2.
pub fn sign_torus(n: usize) -> Result<GModule> {
    if n == 0 {
        return Err(Error::InvalidParameter("sign torus needs n >= 1".into()));
    }
    let neg = IntMatrix::identity(n).scale(&BigInt::from(-1));
    GModule::new(2, FiniteGroup::cyclic(2, 2)?, IntMatrix::zeros(n, 0), vec![neg])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardKind {
    /// `Z^n`, trivial group.
    SplitTorus { p: u64, n: usize },
    /// `Z/p^r`, trivial group.
    Mu { p: u64, r: u32 },
    /// `Z[G/H]`.
    PermLattice { group: FiniteGroup, subgroup: Subgroup },
}

pub fn standard_module(kind: &StandardKind) -> Result<GModule> {
    match kind {
        StandardKind::SplitTorus { p, n } => GModule::free_trivial(FiniteGroup::trivial(*p)?, *n),
        StandardKind::Mu { p, r } => {
            check_prime(*p)?;
            if *r == 0 {
                return Err(Error::InvalidParameter("mu needs r >= 1".into()));
            }
            let q = BigInt::from(*p).pow(*r);
            let rel = IntMatrix::from_columns(1, &[vec![q]]);
            GModule::trivial_action(FiniteGroup::trivial(*p)?, rel)
        }
        StandardKind::PermLattice { group, subgroup } => permutation_lattice(group, std::slice::from_ref(subgroup)),
    }
}

/// Small p-groups used by the random generators, with their names.
pub fn small_groups(p: u64) -> Result<Vec<(&'static str, FiniteGroup)>> {
    check_prime(p)?;
    let mut out = vec![
        ("1", FiniteGroup::trivial(p)?),
        ("C", FiniteGroup::cyclic(p, p as usize)?),
    ];
    if p == 2 {
        let z2 = FiniteGroup::cyclic(2, 2)?;
        let z4 = FiniteGroup::cyclic(2, 4)?;
        let v4 = z2.direct_product(&z2)?.0;
        out.push(("Z4", z4.clone()));
        out.push(("Z2xZ2", v4.clone()));
        out.push(("Z8", FiniteGroup::cyclic(2, 8)?));
        out.push(("Z4xZ2", z4.direct_product(&z2)?.0));
        out.push(("Z2^3", v4.direct_product(&z2)?.0));
        out.push(("D4", FiniteGroup::dihedral(2, 4)?));
        out.push(("Q8", FiniteGroup::quaternion()?));
    }
    Ok(out)
}

/// Random unimodular matrix as a product of elementary operations.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let k = BigInt::from(rng.gen_range(-2i64..=2));
        m.add_row_multiple(i, j, &k);
        if rng.gen_bool(0.3) {
            m.swap_rows(i, j);
        }
    }
    m
}

/// Submodule of `x` generated by the orbit of `v`, in a basis of its own.
/// `x` must be torsion-free without relations.
fn orbit_submodule(x: &GModule, v: &[BigInt]) -> Result<Option<GModule>> {
    let n = x.ngens();
    let orbit: Vec<Vec<BigInt>> = x.actions().iter().map(|a| a.mul_vec(v)).collect();
    let basis = lattice_basis(&IntMatrix::from_columns(n, &orbit));
    if basis.cols() == 0 {
        return Ok(None);
    }
    let solver = LatticeSolver::new(&basis);
    let actions = x
        .actions()
        .iter()
        .map(|a| solver.solve_columns(&a.mul(&basis)).expect("orbit lattice is stable"))
        .collect();
    let m = GModule::from_parts_unchecked(x.p(), x.group().clone(), IntMatrix::zeros(basis.cols(), 0), actions);
    validate_module(&m)?;
    Ok(Some(m))
}

/// Quotient of `x` by the submodule generated by `w`.
fn orbit_quotient(x: &GModule, w: &[BigInt]) -> Result<GModule> {
    let n = x.ngens();
    let orbit: Vec<Vec<BigInt>> = x.actions().iter().map(|a| a.mul_vec(w)).collect();
    let extra = IntMatrix::from_columns(n, &orbit);
    let relations = lattice_basis(&x.relations().hcat(&extra));
    let m = GModule::from_parts_unchecked(x.p(), x.group().clone(), relations, x.actions().to_vec());
    validate_module(&m)?;
    Ok(m)
}

/// A random valid module over `group` with at most `max_rank` generators.
///
/// Built as a direct sum of permutation lattices, orbit sublattices of
/// permutation lattices, norm-type quotients and cyclic torsion, then
/// possibly divided by the orbit of a random vector and rewritten in a
/// random generator basis.
pub fn random_module<R: Rng>(rng: &mut R, group: &FiniteGroup, max_rank: usize) -> Result<GModule> {
    let p = group.p();
    let q: i64 = if p == 2 { 3 } else { 2 };
    let classes = group.enumerate_subgroups()?.classes;
    let target = rng.gen_range(1..=max_rank.max(1));
    let mut acc = GModule::free_trivial(group.clone(), 0)?;
    let mut guard = 0;
    while acc.ngens() < target && guard < 32 {
        guard += 1;
        let room = target - acc.ngens();
        let fitting: Vec<&Subgroup> = classes
            .iter()
            .filter(|c| c.index <= room)
            .flat_map(|c| c.members.iter())
            .collect();
        let h = (*fitting.choose(rng).expect("the whole group always fits")).clone();
        let block = match rng.gen_range(0..5) {
            0 => permutation_lattice(group, &[h])?,
            1 => {
                let base = permutation_lattice(group, &[h])?;
                let v: Vec<BigInt> = (0..base.ngens())
                    .map(|_| BigInt::from(rng.gen_range(-1i64..=1)))
                    .collect();
                match orbit_submodule(&base, &v)? {
                    Some(m) => m,
                    None => continue,
                }
            }
            2 => {
                let c = *[1, p as i64, (p * p) as i64, q].choose(rng).unwrap();
                let pm = PermutationModule::new(group.clone(), vec![h])?;
                let w = vec![BigInt::from(c); pm.rank()];
                orbit_quotient(&permutation_lattice(group, pm.summands())?, &w)?
            }
            3 => {
                let m = *[p as i64, (p * p) as i64, q, 1].choose(rng).unwrap();
                GModule::trivial_action(group.clone(), IntMatrix::from_rows(&[[m]]))?
            }
            _ => GModule::free_trivial(group.clone(), 1)?,
        };
        if block.ngens() == 0 || block.ngens() > room {
            continue;
        }
        acc = direct_sum(&acc, &block)?;
    }
    if acc.ngens() == 0 {
        acc = GModule::free_trivial(group.clone(), 1)?;
    }
    if rng.gen_bool(0.35) {
        let mult = *[1, p as i64, q].choose(rng).unwrap();
        let w: Vec<BigInt> = (0..acc.ngens())
            .map(|_| BigInt::from(rng.gen_range(-1i64..=1) * mult))
            .collect();
        acc = orbit_quotient(&acc, &w)?;
    }
    let u = random_unimodular(rng, acc.ngens());
    acc.change_basis(&u)
}

/// A random valid presentation map into `x`: a few random subgroups with
/// images drawn from their fixed lattices.
pub fn random_presentation<R: Rng>(rng: &mut R, x: &GModule) -> Result<PresentationMap> {
    let classes = x.group().enumerate_subgroups()?.classes;
    let subgroups: Vec<&Subgroup> = classes.iter().flat_map(|c| c.members.iter()).collect();
    let k = rng.gen_range(1..=4);
    let mut summands = Vec::with_capacity(k);
    let mut images = Vec::with_capacity(k);
    for _ in 0..k {
        let h = (*subgroups.choose(rng).unwrap()).clone();
        let lattice = fixed_preimage_lattice(x, &h)?;
        let mut img = vec![BigInt::from(0); x.ngens()];
        for col in lattice.columns() {
            let c = BigInt::from(rng.gen_range(-2i64..=2));
            for (a, b) in img.iter_mut().zip(&col) {
                *a += &c * b;
            }
        }
        summands.push(h);
        images.push(img);
    }
    let domain = PermutationModule::new(x.group().clone(), summands)?;
    PresentationMap::new(domain, x.clone(), images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{c_rank, ed};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyclic(p: u64) -> FiniteGroup {
        FiniteGroup::cyclic(p, p as usize).unwrap()
    }

    #[test]
    fn norm_extension_examples() {
        for p in [2u64, 3, 5] {
            let g = cyclic(p);
            let spec = |stabs: Vec<Subgroup>, r| NormExtensionSpec {
                group: g.clone(),
                stabilizers: stabs,
                r,
            };
            let x = norm_extension_module(&spec(vec![g.trivial_subgroup()], 0)).unwrap();
            assert_eq!(ed(&x).unwrap(), 1, "norm-one torus, p = {p}");
            let x = norm_extension_module(&spec(vec![g.whole(), g.trivial_subgroup()], 0)).unwrap();
            assert_eq!(ed(&x).unwrap(), 0, "degree-one factor, p = {p}");
            let x = norm_extension_module(&spec(vec![g.trivial_subgroup()], 1)).unwrap();
            assert_eq!(ed(&x).unwrap(), 1, "r = 1, p = {p}");
        }
    }

    #[test]
    fn sign_tori() {
        assert_eq!(ed(&sign_torus(1).unwrap()).unwrap(), 1);
        assert_eq!(ed(&sign_torus(3).unwrap()).unwrap(), 3);
        assert_eq!(c_rank(&sign_torus(1).unwrap()), 1);
        assert!(sign_torus(0).is_err());
    }

    #[test]
    fn standard_kinds() {
        let split = standard_module(&StandardKind::SplitTorus { p: 2, n: 3 }).unwrap();
        assert_eq!(ed(&split).unwrap(), 0);
        let mu = standard_module(&StandardKind::Mu { p: 3, r: 2 }).unwrap();
        assert_eq!(ed(&mu).unwrap(), 1);
        let z2 = cyclic(2);
        let perm = standard_module(&StandardKind::PermLattice {
            group: z2.clone(),
            subgroup: z2.trivial_subgroup(),
        })
        .unwrap();
        assert_eq!(ed(&perm).unwrap(), 0);
        assert!(standard_module(&StandardKind::Mu { p: 4, r: 1 }).is_err());
    }

    #[test]
    fn random_modules_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3] {
            for (_, g) in small_groups(p).unwrap() {
                for _ in 0..4 {
                    let x = random_module(&mut rng, &g, 4).unwrap();
                    assert!(x.ngens() <= 4);
                    validate_module(&x).unwrap();
                    random_presentation(&mut rng, &x).unwrap();
                }
            }
        }
    }
}
