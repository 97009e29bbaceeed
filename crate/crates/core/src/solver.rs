//! Essential p-dimension of groups of multiplicative type.
//!
//! For a character module `X` the essential p-dimension is the least
//! `rank P - dim G` over p-presentations `P -> X`. A map is a p-presentation
//! exactly when the images span `X / (pX + IX)`, and a transitive summand
//! `Z[G/H]` contributes a single class there, which can be any element of
//! `V_H`, the image of the `H`-fixed classes. So the minimum is a
//! minimum-weight basis problem: choose vectors from the `V_H`, each costing
//! `[G:H]`, spanning the whole quotient.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactlin::{fp_solve, min_cost_spanning_tower, FpSubspace, IntMatrix};
use crate::gmodule::{
    cobar, direct_sum, fixed_image_subspace, fixed_preimage_lattice, invariant_rank, module_structure, CobarSpace,
    GModule,
};
use crate::pgroup::{Subgroup, DEFAULT_SUBGROUP_CEILING};
use crate::presentation::{is_p_presentation, PermutationModule, PresentationMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    pub subgroup_ceiling: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            subgroup_ceiling: DEFAULT_SUBGROUP_CEILING,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostEntry {
    /// Canonical representative of a conjugacy class of subgroups.
    pub subgroup: Subgroup,
    pub index: usize,
    /// Classes in `X / (pX + IX)` reachable from `H`-fixed vectors.
    pub subspace: FpSubspace,
    /// Preimage lattice of the `H`-fixed classes.
    pub fixed_lattice: IntMatrix,
}

/// One entry per conjugacy class of subgroups, sorted by index and then
/// by representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostTable {
    pub entries: Vec<CostEntry>,
    pub cobar: CobarSpace,
}

pub fn cost_table(x: &GModule) -> Result<CostTable> {
    cost_table_with(x, &SolverOptions::default())
}

pub fn cost_table_with(x: &GModule, opts: &SolverOptions) -> Result<CostTable> {
    let classes = x.group().enumerate_subgroups_with_ceiling(opts.subgroup_ceiling)?;
    let cb = cobar(x);
    let mut entries = classes
        .classes
        .par_iter()
        .map(|c| {
            let h = c.representative.clone();
            let fixed_lattice = fixed_preimage_lattice(x, &h)?;
            let images: Vec<Vec<u64>> = fixed_lattice.columns().iter().map(|v| cb.project(v)).collect();
            let subspace = crate::exactlin::fp_span(&images, cb.p(), cb.dim())?;
            Ok(CostEntry {
                subgroup: h,
                index: c.index,
                subspace,
                fixed_lattice,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.index.cmp(&b.index).then_with(|| a.subgroup.cmp(&b.subgroup)));
    Ok(CostTable { entries, cobar: cb })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdResult {
    pub ed: usize,
    pub min_rank_p: usize,
    pub free_rank: usize,
    pub cobar_dim: usize,
    pub witness: PresentationMap,
    /// `(c, dim W_c)` where `W_c` is spanned by all `V_H` with `[G:H] <= c`.
    pub tower: Vec<(u64, usize)>,
}

pub fn minimal_p_presentation(x: &GModule) -> Result<EdResult> {
    minimal_p_presentation_with(x, &SolverOptions::default())
}

pub fn minimal_p_presentation_with(x: &GModule, opts: &SolverOptions) -> Result<EdResult> {
    let structure = module_structure(x);
    let cb = cobar(x);
    if cb.dim() == 0 {
        // Nakayama: X/pX = I(X/pX) forces X/pX = 0 for a p-group
        assert_eq!(structure.free_rank, 0, "trivial quotient with positive free rank");
        assert!(!structure.p_torsion, "trivial quotient with p-torsion");
        let domain = PermutationModule::new(x.group().clone(), Vec::new())?;
        let witness = PresentationMap::new(domain, x.clone(), Vec::new())?;
        return Ok(EdResult {
            ed: 0,
            min_rank_p: 0,
            free_rank: 0,
            cobar_dim: 0,
            witness,
            tower: Vec::new(),
        });
    }

    let table = cost_table_with(x, opts)?;
    let costed: Vec<(FpSubspace, u64)> = table
        .entries
        .iter()
        .map(|e| (e.subspace.clone(), e.index as u64))
        .collect();
    let tower = min_cost_spanning_tower(&costed, &cb.full_space())?;

    let mut summands = Vec::with_capacity(tower.chosen.len());
    let mut images = Vec::with_capacity(tower.chosen.len());
    for (v, src) in &tower.chosen {
        let entry = &table.entries[*src];
        summands.push(entry.subgroup.clone());
        images.push(lift_class(&cb, &entry.fixed_lattice, v));
    }
    let domain = PermutationModule::new(x.group().clone(), summands)?;
    let witness = PresentationMap::new(domain, x.clone(), images)?;
    assert!(is_p_presentation(&witness), "greedy witness is not a p-presentation");
    let min_rank_p = tower.total_cost as usize;
    debug_assert_eq!(witness.domain().rank(), min_rank_p);

    Ok(EdResult {
        ed: min_rank_p - structure.free_rank,
        min_rank_p,
        free_rank: structure.free_rank,
        cobar_dim: cb.dim(),
        witness,
        tower: tower.levels,
    })
}

/// An integer vector of `lattice` whose class is `v`: solve over `F_p`
/// against the projected basis, then lift coefficients into `0..p`.
fn lift_class(cb: &CobarSpace, lattice: &IntMatrix, v: &[u64]) -> Vec<BigInt> {
    let basis = lattice.columns();
    let projected: Vec<Vec<u64>> = basis.iter().map(|c| cb.project(c)).collect();
    let coeffs = fp_solve(&projected, v, cb.p()).expect("class lies in the fixed image");
    let mut x = vec![BigInt::from(0); lattice.rows()];
    for (c, col) in coeffs.iter().zip(&basis) {
        if *c != 0 {
            for (xi, bi) in x.iter_mut().zip(col) {
                *xi += bi * BigInt::from(*c);
            }
        }
    }
    x
}

pub fn ed(x: &GModule) -> Result<usize> {
    Ok(minimal_p_presentation(x)?.ed)
}

/// Largest group order accepted by [`brute_force_ed`].
pub const ORACLE_MAX_ORDER: usize = 8;
/// Largest generator count accepted by [`brute_force_ed`].
pub const ORACLE_MAX_NGENS: usize = 4;

/// Exhaustive search for the least total index of a spanning choice.
///
/// Every multiset of subgroup classes with total index at most
/// `cost_ceiling` is tried, cheapest first, against every choice of one
/// vector per summand. Only multisets of exactly `dim X̄` summands are
/// generated: fewer cannot span, and a spanning family with more contains
/// a spanning subfamily of `dim X̄` members of smaller total index.
pub fn brute_force_ed(x: &GModule, cost_ceiling: usize) -> Result<usize> {
    let p = x.p();
    if x.group().order() > ORACLE_MAX_ORDER || x.ngens() > ORACLE_MAX_NGENS || !(p == 2 || p == 3) {
        return Err(Error::InstanceTooLarge(format!(
            "order {}, {} generators, p = {p}",
            x.group().order(),
            x.ngens()
        )));
    }
    let structure = module_structure(x);
    let cb = cobar(x);
    let s = cb.dim();
    if s == 0 {
        return Ok(0);
    }
    let classes = x.group().enumerate_subgroups()?.classes;
    let mut options: Vec<(usize, Vec<Vec<u64>>)> = Vec::new();
    for c in &classes {
        let v = fixed_image_subspace(x, &c.representative, &cb)?;
        options.push((c.index, v.normalized_vectors()));
    }

    let mut multisets: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut current = Vec::with_capacity(s);
    collect_multisets(&options, s, 0, 0, cost_ceiling, &mut current, &mut multisets);
    multisets.sort();
    for (total, picks) in multisets {
        let zero = FpSubspace::zero(p, s);
        if spanning_choice_exists(&options, &picks, 0, &zero) {
            return Ok(total - structure.free_rank);
        }
    }
    Err(Error::CeilingTooLow { ceiling: cost_ceiling })
}

fn collect_multisets(
    options: &[(usize, Vec<Vec<u64>>)],
    size: usize,
    start: usize,
    total: usize,
    ceiling: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<(usize, Vec<usize>)>,
) {
    if current.len() == size {
        out.push((total, current.clone()));
        return;
    }
    for i in start..options.len() {
        let t = total + options[i].0;
        if t > ceiling {
            continue;
        }
        current.push(i);
        collect_multisets(options, size, i, t, ceiling, current, out);
        current.pop();
    }
}

fn spanning_choice_exists(
    options: &[(usize, Vec<Vec<u64>>)],
    picks: &[usize],
    depth: usize,
    span: &FpSubspace,
) -> bool {
    if depth == picks.len() {
        return span.dim() == span.ambient_dim();
    }
    options[picks[depth]]
        .1
        .iter()
        .any(|v| !span.contains(v) && spanning_choice_exists(options, picks, depth + 1, &span.with_vector(v)))
}

/// Rank of the maximal split p-torsion subgroup of the center, which for a
/// group of multiplicative type is `dim X / (pX + IX)`.
pub fn c_rank(x: &GModule) -> usize {
    cobar(x).dim()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundsResult {
    pub lower: usize,
    pub upper: usize,
    pub gap_bound: Option<usize>,
}

/// `min dim p-faithful - dim G <= ed <= min dim p-generically free - dim G`.
pub fn ed_bounds(dim_p_faithful_min: usize, dim_p_genfree_min: usize, dim_g: usize) -> Result<BoundsResult> {
    if dim_p_faithful_min > dim_p_genfree_min {
        return Err(Error::BoundOrder(format!(
            "p-faithful minimum {dim_p_faithful_min} exceeds p-generically free minimum {dim_p_genfree_min}"
        )));
    }
    if dim_g > dim_p_faithful_min {
        return Err(Error::BoundOrder(format!(
            "dim G = {dim_g} exceeds p-faithful minimum {dim_p_faithful_min}"
        )));
    }
    Ok(BoundsResult {
        lower: dim_p_faithful_min - dim_g,
        upper: dim_p_genfree_min - dim_g,
        gap_bound: None,
    })
}

/// [`ed_bounds`] together with a gap bound, which must dominate the spread.
pub fn ed_bounds_with_gap(
    dim_p_faithful_min: usize,
    dim_p_genfree_min: usize,
    dim_g: usize,
    gap: usize,
) -> Result<BoundsResult> {
    let mut b = ed_bounds(dim_p_faithful_min, dim_p_genfree_min, dim_g)?;
    if b.upper - b.lower > gap {
        return Err(Error::BoundOrder(format!(
            "spread {} exceeds gap bound {gap}",
            b.upper - b.lower
        )));
    }
    b.gap_bound = Some(gap);
    Ok(b)
}

fn require_torsion_free(t: &GModule) -> Result<()> {
    if module_structure(t).invariant_factors.is_empty() {
        Ok(())
    } else {
        Err(Error::TorsionPresent)
    }
}

/// `dim T - dim T^C` for a torus lattice `t` with the acting group read as `C(F)`.
pub fn gap_bound(t: &GModule) -> Result<usize> {
    require_torsion_free(t)?;
    Ok(module_structure(t).free_rank - invariant_rank(t)?)
}

/// Whether the acting group acts trivially on the torus lattice.
pub fn is_tame(t: &GModule) -> Result<bool> {
    require_torsion_free(t)?;
    let rel = t.relation_lattice();
    let n = t.ngens();
    Ok(t.actions().iter().all(|a| {
        let d = a.sub(&IntMatrix::identity(n));
        d.is_zero() || rel.contains_columns(&d)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdditivityReport {
    pub ed1: usize,
    pub ed2: usize,
    pub ed_sum: usize,
    pub holds: bool,
}

pub fn additivity_check(x1: &GModule, x2: &GModule) -> Result<AdditivityReport> {
    let ed1 = ed(x1)?;
    let ed2 = ed(x2)?;
    let ed_sum = ed(&direct_sum(x1, x2)?)?;
    Ok(AdditivityReport {
        ed1,
        ed2,
        ed_sum,
        holds: ed_sum == ed1 + ed2,
    })
}

/// Essential p-dimension of `T^n ⋊ F` with `F` permuting the factors:
/// `n * ed_t` when `ed_t > 0`, otherwise `ed_f`.
pub fn wreath_ed(ed_t: usize, n: usize, ed_f: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("wreath product needs n >= 1".into()));
    }
    Ok(if ed_t > 0 { n * ed_t } else { ed_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgroup::FiniteGroup;

    fn z2() -> FiniteGroup {
        FiniteGroup::cyclic(2, 2).unwrap()
    }

    fn sign(n: usize) -> GModule {
        let neg = IntMatrix::identity(n).scale(&BigInt::from(-1));
        GModule::new(2, z2(), IntMatrix::zeros(n, 0), vec![neg]).unwrap()
    }

    fn swap() -> GModule {
        GModule::new(
            2,
            z2(),
            IntMatrix::zeros(2, 0),
            vec![IntMatrix::from_rows(&[[0, 1], [1, 0]])],
        )
        .unwrap()
    }

    #[test]
    fn cost_tables() {
        let t = FiniteGroup::trivial(2).unwrap();
        let ct = cost_table(&GModule::free_trivial(t, 3).unwrap()).unwrap();
        assert_eq!(ct.entries.len(), 1);
        assert_eq!((ct.entries[0].index, ct.entries[0].subspace.dim()), (1, 3));

        let ct = cost_table(&sign(1)).unwrap();
        let summary: Vec<(usize, usize, usize)> = ct
            .entries
            .iter()
            .map(|e| (e.subgroup.order(), e.index, e.subspace.dim()))
            .collect();
        assert_eq!(summary, vec![(2, 1, 0), (1, 2, 1)]);

        let ct = cost_table(&swap()).unwrap();
        let dims: Vec<usize> = ct.entries.iter().map(|e| e.subspace.dim()).collect();
        assert_eq!(dims, vec![0, 1]);
    }

    #[test]
    fn small_ed_values() {
        let t = FiniteGroup::trivial(2).unwrap();
        assert_eq!(ed(&GModule::free_trivial(t, 3).unwrap()).unwrap(), 0);
        for n in 1..=3 {
            let r = minimal_p_presentation(&sign(n)).unwrap();
            assert_eq!(r.ed, n);
            assert_eq!(r.min_rank_p, 2 * n);
            assert_eq!(r.tower, vec![(1, 0), (2, n)]);
        }
        assert_eq!(ed(&swap()).unwrap(), 0);
    }

    #[test]
    fn oracle_on_small_cases() {
        let t = FiniteGroup::trivial(2).unwrap();
        assert_eq!(brute_force_ed(&GModule::free_trivial(t, 1).unwrap(), 1).unwrap(), 0);
        assert_eq!(brute_force_ed(&sign(2), 4).unwrap(), 2);
        assert_eq!(brute_force_ed(&sign(2), 3), Err(Error::CeilingTooLow { ceiling: 3 }));
        let big = GModule::free_trivial(FiniteGroup::cyclic(2, 16).unwrap(), 1).unwrap();
        assert!(matches!(brute_force_ed(&big, 10), Err(Error::InstanceTooLarge(_))));
    }

    #[test]
    fn ranks_of_c() {
        assert_eq!(c_rank(&sign(3)), 3);
        assert_eq!(c_rank(&swap()), 1);
        let t = FiniteGroup::trivial(3).unwrap();
        let mu = GModule::trivial_action(t, IntMatrix::diagonal(&[3, 3])).unwrap();
        assert_eq!(c_rank(&mu), 2);
    }

    #[test]
    fn bounds() {
        let b = ed_bounds(2, 3, 1).unwrap();
        assert_eq!((b.lower, b.upper), (1, 2));
        let b = ed_bounds(4, 4, 2).unwrap();
        assert_eq!(b.lower, b.upper);
        assert_eq!(ed_bounds(2, 5, 2).unwrap().lower, 0);
        assert!(matches!(ed_bounds(3, 2, 1), Err(Error::BoundOrder(_))));
        assert!(matches!(ed_bounds(1, 2, 2), Err(Error::BoundOrder(_))));
        assert_eq!(ed_bounds_with_gap(2, 3, 1, 1).unwrap().gap_bound, Some(1));
        assert!(ed_bounds_with_gap(2, 4, 1, 1).is_err());
    }

    #[test]
    fn gap_and_tameness() {
        assert_eq!(gap_bound(&GModule::free_trivial(z2(), 2).unwrap()).unwrap(), 0);
        assert_eq!(gap_bound(&sign(1)).unwrap(), 1);
        assert_eq!(gap_bound(&swap()).unwrap(), 1);
        assert!(is_tame(&GModule::free_trivial(z2(), 2).unwrap()).unwrap());
        assert!(!is_tame(&sign(1)).unwrap());
        assert!(!is_tame(&swap()).unwrap());
        let torsion = GModule::trivial_action(z2(), IntMatrix::from_rows(&[[2]])).unwrap();
        assert_eq!(gap_bound(&torsion), Err(Error::TorsionPresent));
    }

    #[test]
    fn wreath() {
        assert_eq!(wreath_ed(1, 2, 1).unwrap(), 2);
        assert_eq!(wreath_ed(0, 5, 1).unwrap(), 1);
        assert_eq!(wreath_ed(0, 3, 0).unwrap(), 0);
        assert!(wreath_ed(1, 0, 0).is_err());
    }

    #[test]
    fn additivity_of_signs() {
        let r = additivity_check(&sign(1), &sign(1)).unwrap();
        assert_eq!((r.ed1, r.ed2, r.ed_sum, r.holds), (1, 1, 2, true));
    }
}
