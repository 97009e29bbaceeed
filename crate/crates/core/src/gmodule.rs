//! Finitely presented modules over the integral group ring of a p-group.
//!
//! A module is `Z^n / im(R)` for an `n x t` relation matrix `R` whose
//! columns are the relations, with one `n x n` integer matrix per group
//! element describing the action on generators. These are the character
//! modules of groups of multiplicative type: the free rank is the dimension
//! of the group and the torsion part records its finite factors.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactlin::{
    fp_span, integer_kernel, lattice_basis, reduce_mod, smith_normal_form, unimodular_inverse, FpSubspace, IntMatrix,
    LatticeSolver,
};
use crate::pgroup::{FiniteGroup, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    p: u64,
    group: FiniteGroup,
    relations: IntMatrix,
    /// Indexed by element id; entry 0 is the identity matrix.
    actions: Vec<IntMatrix>,
}

/// Free rank and invariant factors of the underlying abelian group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleStructure {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
    pub p_torsion: bool,
}

impl GModule {
    /// Builds and validates a module. `actions` holds one matrix per
    /// non-identity element, in id order (`actions[i]` acts as element `i + 1`).
    pub fn new(p: u64, group: FiniteGroup, relations: IntMatrix, actions: Vec<IntMatrix>) -> Result<Self> {
        let n = relations.rows();
        if actions.len() + 1 != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} action matrices for a group of order {}",
                actions.len(),
                group.order()
            )));
        }
        let mut all = Vec::with_capacity(group.order());
        all.push(IntMatrix::identity(n));
        all.extend(actions);
        let m = GModule {
            p,
            group,
            relations,
            actions: all,
        };
        validate_module(&m)?;
        Ok(m)
    }

    /// Module on which every element acts as the identity.
    pub fn trivial_action(group: FiniteGroup, relations: IntMatrix) -> Result<Self> {
        let n = relations.rows();
        let actions = vec![IntMatrix::identity(n); group.order() - 1];
        Self::new(group.p(), group, relations, actions)
    }

    /// `Z^n` with trivial action and no relations.
    pub fn free_trivial(group: FiniteGroup, n: usize) -> Result<Self> {
        Self::trivial_action(group, IntMatrix::zeros(n, 0))
    }

    pub(crate) fn from_parts_unchecked(
        p: u64,
        group: FiniteGroup,
        relations: IntMatrix,
        actions: Vec<IntMatrix>,
    ) -> Self {
        GModule {
            p,
            group,
            relations,
            actions,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn ngens(&self) -> usize {
        self.relations.rows()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.actions[g]
    }

    pub fn actions(&self) -> &[IntMatrix] {
        &self.actions
    }

    /// Relation lattice solver, for membership tests in `im(R)`.
    pub fn relation_lattice(&self) -> LatticeSolver {
        LatticeSolver::new(&self.relations)
    }

    /// Module in a new generator basis: the columns of `q` are the new
    /// generators written in the old ones. `q` must be unimodular.
    pub fn change_basis(&self, q: &IntMatrix) -> Result<GModule> {
        let qinv =
            unimodular_inverse(q).ok_or_else(|| Error::InvalidParameter("basis change is not unimodular".into()))?;
        if q.rows() != self.ngens() {
            return Err(Error::DimensionMismatch("basis change has wrong size".into()));
        }
        let relations = qinv.mul(&self.relations);
        let actions = self.actions.iter().map(|a| qinv.mul(a).mul(q)).collect();
        Ok(GModule::from_parts_unchecked(
            self.p,
            self.group.clone(),
            relations,
            actions,
        ))
    }

    /// The same module over the group with ids relabeled by `perm`.
    pub fn relabel_group(&self, perm: &[usize]) -> Result<GModule> {
        let group = self.group.relabel(perm)?;
        let mut actions = vec![IntMatrix::zeros(0, 0); self.actions.len()];
        for (g, a) in self.actions.iter().enumerate() {
            actions[perm[g]] = a.clone();
        }
        Ok(GModule::from_parts_unchecked(
            self.p,
            group,
            self.relations.clone(),
            actions,
        ))
    }
}

/// Checks that the actions preserve the relations, induce automorphisms,
/// and compose like the group table.
pub fn validate_module(x: &GModule) -> Result<()> {
    if x.p != x.group.p() {
        return Err(Error::PrimeMismatch {
            expected: x.group.p(),
            found: x.p,
        });
    }
    let n = x.ngens();
    if x.actions.len() != x.group.order() {
        return Err(Error::DimensionMismatch(
            "one action matrix per element required".into(),
        ));
    }
    for (g, a) in x.actions.iter().enumerate() {
        if a.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "action of element {g} is {}x{}, expected {n}x{n}",
                a.rows(),
                a.cols()
            )));
        }
    }
    if !x.actions[0].is_identity() {
        return Err(Error::NotAHomomorphism { g: 0, h: 0 });
    }
    let rel = x.relation_lattice();
    for (g, a) in x.actions.iter().enumerate().skip(1) {
        if !rel.contains_columns(&a.mul(&x.relations)) {
            return Err(Error::ActionNotStable { element: g });
        }
        // a stable endomorphism of a noetherian module is an automorphism
        // as soon as it is surjective, i.e. [A | R] spans Z^n
        let snf = smith_normal_form(&a.hcat(&x.relations));
        if snf.rank != n || !snf.invariant_factors().iter().all(One::is_one) {
            return Err(Error::NotAnAutomorphism { element: g });
        }
    }
    let order = x.group.order();
    for g in 1..order {
        for h in 1..order {
            let lhs = x.actions[g].mul(&x.actions[h]);
            let diff = lhs.sub(&x.actions[x.group.mul(g, h)]);
            if !diff.is_zero() && !rel.contains_columns(&diff) {
                return Err(Error::NotAHomomorphism { g, h });
            }
        }
    }
    Ok(())
}

pub fn module_structure(x: &GModule) -> ModuleStructure {
    let snf = smith_normal_form(&x.relations);
    let invariant_factors: Vec<BigInt> = snf.invariant_factors().into_iter().filter(|d| !d.is_one()).collect();
    let p = BigInt::from(x.p);
    let p_torsion = invariant_factors.iter().any(|d| (d % &p).is_zero());
    ModuleStructure {
        free_rank: x.ngens() - snf.rank,
        invariant_factors,
        p_torsion,
    }
}

/// The quotient `X / (pX + IX)` as an `F_p` vector space, with the
/// canonical projection from generator coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobarSpace {
    p: u64,
    ngens: usize,
    /// Image of `im(R) + IX` in `F_p^n`.
    kernel: FpSubspace,
    /// Non-pivot columns of `kernel`; they index the quotient coordinates.
    free_coords: Vec<usize>,
}

impl CobarSpace {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.free_coords.len()
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    /// Subspace of `F_p^n` killed by the projection.
    pub fn kernel(&self) -> &FpSubspace {
        &self.kernel
    }

    pub fn project_mod_p(&self, v: &[u64]) -> Vec<u64> {
        let r = self.kernel.reduce(v);
        self.free_coords.iter().map(|&c| r[c]).collect()
    }

    pub fn project(&self, x: &[BigInt]) -> Vec<u64> {
        let v: Vec<u64> = x.iter().map(|a| reduce_mod(a, self.p)).collect();
        self.project_mod_p(&v)
    }

    /// The projection as a `dim x ngens` matrix over `F_p`.
    pub fn projection_matrix(&self) -> Vec<Vec<u64>> {
        let cols: Vec<Vec<u64>> = (0..self.ngens)
            .map(|j| {
                let mut e = vec![0; self.ngens];
                e[j] = 1;
                self.project_mod_p(&e)
            })
            .collect();
        (0..self.dim()).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    }

    pub fn full_space(&self) -> FpSubspace {
        FpSubspace::full(self.p, self.dim())
    }
}

fn cobar_from_elements(x: &GModule, elements: &[usize]) -> CobarSpace {
    let n = x.ngens();
    let p = x.p;
    let mut vectors: Vec<Vec<u64>> = Vec::new();
    let push_columns = |m: &IntMatrix, vectors: &mut Vec<Vec<u64>>| {
        let rows = m.mod_p(p);
        for j in 0..m.cols() {
            vectors.push(rows.iter().map(|r| r[j]).collect());
        }
    };
    push_columns(&x.relations, &mut vectors);
    for &g in elements {
        push_columns(&x.actions[g].sub(&IntMatrix::identity(n)), &mut vectors);
    }
    let kernel = fp_span(&vectors, p, n).expect("module prime is validated");
    let free_coords = (0..n).filter(|c| !kernel.pivots().contains(c)).collect();
    CobarSpace {
        p,
        ngens: n,
        kernel,
        free_coords,
    }
}

/// `X / (pX + IX)`. The augmentation ideal is generated as a left ideal by
/// `g - 1` for `g` in a generating set, since `gh - 1 = g(h - 1) + (g - 1)`.
pub fn cobar(x: &GModule) -> CobarSpace {
    cobar_from_elements(x, &x.group.generators())
}

/// Same quotient using `g - 1` for every element; used to cross-check
/// [`cobar`].
pub fn cobar_all_elements(x: &GModule) -> CobarSpace {
    let all: Vec<usize> = (1..x.group.order()).collect();
    cobar_from_elements(x, &all)
}

/// Lattice `L` in `Z^n` of generator vectors whose class in `X` is fixed by
/// `H`. Contains `im(R)`; returned as a canonical basis.
pub fn fixed_preimage_lattice(x: &GModule, h: &Subgroup) -> Result<IntMatrix> {
    if !x.group.is_subgroup(h) {
        return Err(Error::NotASubgroup);
    }
    let n = x.ngens();
    let gens = x.group.generators_of(h.elements());
    if gens.is_empty() {
        return Ok(IntMatrix::identity(n));
    }
    let t = x.relations.cols();
    let k = gens.len();
    // (A_h - I) x - R y_h = 0 for every generator h
    let mut block = IntMatrix::zeros(n * k, n + k * t);
    let neg_r = x.relations.scale(&BigInt::from(-1));
    for (b, &g) in gens.iter().enumerate() {
        let d = x.actions[g].sub(&IntMatrix::identity(n));
        for i in 0..n {
            for j in 0..n {
                block[(b * n + i, j)] = d[(i, j)].clone();
            }
            for j in 0..t {
                block[(b * n + i, n + b * t + j)] = neg_r[(i, j)].clone();
            }
        }
    }
    let kernel = integer_kernel(&block);
    let lattice = lattice_basis(&kernel.row_range(0, n));
    debug_assert!(LatticeSolver::new(&lattice).contains_columns(&x.relations));
    Ok(lattice)
}

/// Image in `X / (pX + IX)` of the classes fixed by `H`.
pub fn fixed_image_subspace(x: &GModule, h: &Subgroup, cb: &CobarSpace) -> Result<FpSubspace> {
    if cb.p != x.p || cb.ngens != x.ngens() {
        return Err(Error::CobarMismatch);
    }
    let lattice = fixed_preimage_lattice(x, h)?;
    let images: Vec<Vec<u64>> = lattice.columns().iter().map(|c| cb.project(c)).collect();
    fp_span(&images, cb.p, cb.dim())
}

/// Block-diagonal sum of two modules over the same group.
pub fn direct_sum(x1: &GModule, x2: &GModule) -> Result<GModule> {
    if x1.p != x2.p {
        return Err(Error::PrimeMismatch {
            expected: x1.p,
            found: x2.p,
        });
    }
    if x1.group != x2.group {
        return Err(Error::GroupMismatch);
    }
    let relations = x1.relations.block_diag(&x2.relations);
    let actions = x1
        .actions
        .iter()
        .zip(&x2.actions)
        .map(|(a, b)| a.block_diag(b))
        .collect();
    Ok(GModule::from_parts_unchecked(
        x1.p,
        x1.group.clone(),
        relations,
        actions,
    ))
}

/// Pulls a module back along a surjective homomorphism `bigger -> x.group`
/// given as the image id of each element of `bigger`.
pub fn inflate(x: &GModule, bigger: &FiniteGroup, projection: &[usize]) -> Result<GModule> {
    if bigger.p() != x.p {
        return Err(Error::PrimeMismatch {
            expected: x.p,
            found: bigger.p(),
        });
    }
    if projection.len() != bigger.order() || projection.first() != Some(&0) {
        return Err(Error::InvalidParameter(
            "projection must map identity to identity".into(),
        ));
    }
    for &y in projection {
        x.group.check_element(y)?;
    }
    for a in 0..bigger.order() {
        for b in 0..bigger.order() {
            if projection[bigger.mul(a, b)] != x.group.mul(projection[a], projection[b]) {
                return Err(Error::InvalidParameter("projection is not a homomorphism".into()));
            }
        }
    }
    let actions = projection.iter().map(|&g| x.actions[g].clone()).collect();
    Ok(GModule::from_parts_unchecked(
        x.p,
        bigger.clone(),
        x.relations.clone(),
        actions,
    ))
}

/// Modifies `x` by an isogeny of degree a power of `q`, which leaves the
/// essential p-dimension unchanged. Depending on the seed this either adds
/// a trivial `Z/q` summand, or passes to the submodule
/// `im(R) + qZ^n + Z[G] v` for a pseudo-random `v`, which has q-power index.
pub fn prime_to_p_modification(x: &GModule, q: u64, seed: u64) -> Result<GModule> {
    crate::exactlin::check_prime(q)?;
    if q == x.p {
        return Err(Error::InvalidParameter(format!("q = {q} must differ from p")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x.ngens();
    if n == 0 || rng.gen_bool(0.5) {
        let zq = GModule::trivial_action(x.group.clone(), IntMatrix::from_rows(&[[q as i64]]))?;
        return direct_sum(x, &zq);
    }
    let v: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(0..q))).collect();
    let mut gens = x.relations.hcat(&IntMatrix::identity(n).scale(&BigInt::from(q)));
    let orbit: Vec<Vec<BigInt>> = x.actions.iter().map(|a| a.mul_vec(&v)).collect();
    gens = gens.hcat(&IntMatrix::from_columns(n, &orbit));
    let basis = lattice_basis(&gens);
    debug_assert_eq!(basis.cols(), n);
    let solver = LatticeSolver::new(&basis);
    let relations = solver
        .solve_columns(&x.relations)
        .expect("relations lie in the sublattice");
    let actions = x
        .actions
        .iter()
        .map(|a| solver.solve_columns(&a.mul(&basis)).expect("sublattice is stable"))
        .collect();
    let m = GModule::from_parts_unchecked(x.p, x.group.clone(), relations, actions);
    validate_module(&m)?;
    Ok(m)
}

/// Rank of the lattice of classes fixed by the whole group, i.e. the
/// dimension of the fixed subtorus.
pub fn invariant_rank(x: &GModule) -> Result<usize> {
    let l = fixed_preimage_lattice(x, &x.group.whole())?;
    Ok(l.cols() - smith_normal_form(&x.relations).rank)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn validation_examples() {
        assert!(GModule::free_trivial(z2(), 2).is_ok());
        assert!(GModule::new(
            2,
            z2(),
            IntMatrix::zeros(2, 0),
            vec![IntMatrix::from_rows(&[[0, 1], [1, 0]])]
        )
        .is_ok());
        assert_eq!(
            GModule::new(2, z2(), IntMatrix::zeros(1, 0), vec![IntMatrix::from_rows(&[[2]])]),
            Err(Error::NotAnAutomorphism { element: 1 })
        );
        assert_eq!(
            GModule::new(3, z2(), IntMatrix::zeros(1, 0), vec![IntMatrix::from_rows(&[[1]])]),
            Err(Error::PrimeMismatch { expected: 2, found: 3 })
        );
        // Z/4 acting by -1 through a generator whose square should be trivial
        let z4 = FiniteGroup::cyclic(2, 4).unwrap();
        let a = |x: i64| IntMatrix::from_rows(&[[x]]);
        assert_eq!(
            GModule::new(2, z4, IntMatrix::zeros(1, 0), vec![a(-1), a(-1), a(-1)]),
            Err(Error::NotAHomomorphism { g: 1, h: 1 })
        );
    }

    #[test]
    fn unstable_action_detected() {
        // X = Z^2 / (2 e1); swapping coordinates moves the relation off the lattice
        let r = IntMatrix::from_rows(&[[2], [0]]);
        assert_eq!(
            GModule::new(2, z2(), r, vec![IntMatrix::from_rows(&[[0, 1], [1, 0]])]),
            Err(Error::ActionNotStable { element: 1 })
        );
    }

    #[test]
    fn action_modulo_relations() {
        // on Z/2 the action by -1 is the identity, so a trivial-group-style
        // square check passes modulo the relation
        let x = GModule::new(
            2,
            z2(),
            IntMatrix::from_rows(&[[2]]),
            vec![IntMatrix::from_rows(&[[-1]])],
        );
        assert!(x.is_ok());
    }

    #[test]
    fn structures() {
        let s = module_structure(&GModule::free_trivial(z2(), 3).unwrap());
        assert_eq!((s.free_rank, s.invariant_factors.len(), s.p_torsion), (3, 0, false));
        let t = FiniteGroup::trivial(3).unwrap();
        let mu = GModule::trivial_action(t, IntMatrix::from_rows(&[[9]])).unwrap();
        let s = module_structure(&mu);
        assert_eq!(s.free_rank, 0);
        assert_eq!(s.invariant_factors, vec![BigInt::from(9)]);
        assert!(s.p_torsion);
    }

    #[test]
    fn cobar_examples() {
        assert_eq!(cobar(&GModule::free_trivial(z2(), 3).unwrap()).dim(), 3);
        assert_eq!(cobar(&sign(3)).dim(), 3);
        let c = cobar(&swap());
        assert_eq!(c.dim(), 1);
        assert_eq!(c.project_mod_p(&[1, 1]), vec![0]);
        assert_eq!(c.project_mod_p(&[1, 0]), vec![1]);
        assert_eq!(c.projection_matrix(), vec![vec![1, 1]]);
    }

    #[test]
    fn fixed_lattices() {
        let x = sign(1);
        let l = fixed_preimage_lattice(&x, &x.group().trivial_subgroup()).unwrap();
        assert_eq!(l, IntMatrix::identity(1));
        let l = fixed_preimage_lattice(&x, &x.group().whole()).unwrap();
        assert_eq!(l.cols(), 0);
        let y = swap();
        let l = fixed_preimage_lattice(&y, &y.group().whole()).unwrap();
        assert_eq!(l, IntMatrix::from_rows(&[[1], [1]]));
        let cb = cobar(&y);
        assert_eq!(fixed_image_subspace(&y, &y.group().whole(), &cb).unwrap().dim(), 0);
        assert_eq!(
            fixed_image_subspace(&y, &y.group().trivial_subgroup(), &cb)
                .unwrap()
                .dim(),
            1
        );
    }

    #[test]
    fn fixed_lattice_with_torsion() {
        // Z/2 with the sign action: -x = x holds for every class
        let x = GModule::new(
            2,
            z2(),
            IntMatrix::from_rows(&[[2]]),
            vec![IntMatrix::from_rows(&[[-1]])],
        )
        .unwrap();
        let l = fixed_preimage_lattice(&x, &x.group().whole()).unwrap();
        assert_eq!(l, IntMatrix::identity(1));
    }

    #[test]
    fn sums_and_inflation() {
        let s = direct_sum(&sign(1), &sign(1)).unwrap();
        assert_eq!(s, sign(2));
        let zero = GModule::free_trivial(z2(), 0).unwrap();
        assert_eq!(direct_sum(&sign(2), &zero).unwrap(), sign(2));
        let t = FiniteGroup::trivial(2).unwrap();
        assert_eq!(
            direct_sum(&sign(1), &GModule::free_trivial(t, 1).unwrap()),
            Err(Error::GroupMismatch)
        );

        let (v4, pr1, _) = z2().direct_product(&z2()).unwrap();
        let inflated = inflate(&sign(1), &v4, &pr1).unwrap();
        assert!(validate_module(&inflated).is_ok());
        assert_eq!(cobar(&inflated).dim(), 1);
    }

    #[test]
    fn isogeny_modification_is_deterministic() {
        let x = swap();
        for seed in 0..6 {
            let a = prime_to_p_modification(&x, 3, seed).unwrap();
            let b = prime_to_p_modification(&x, 3, seed).unwrap();
            assert_eq!(a, b);
            assert_eq!(cobar(&a).dim(), cobar(&x).dim());
            assert_eq!(module_structure(&a).free_rank, 2);
        }
        assert!(matches!(
            prime_to_p_modification(&x, 2, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn invariant_ranks() {
        assert_eq!(invariant_rank(&sign(2)).unwrap(), 0);
        assert_eq!(invariant_rank(&swap()).unwrap(), 1);
        assert_eq!(invariant_rank(&GModule::free_trivial(z2(), 3).unwrap()).unwrap(), 3);
    }
}
