//! Permutation modules and maps `P -> X` out of them.
//!
//! `P = sum_i Z[G/H_i]` has the disjoint union of the coset spaces as its
//! permutation basis. A map to `X` is fixed by the images `x_i` of the
//! cosets `eH_i`, which must be `H_i`-fixed classes; the coset `gH_i` is then
//! sent to `g x_i`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{fp_span, integer_kernel, lattice_basis, smith_normal_form, IntMatrix, LatticeSolver};
use crate::gmodule::{cobar, module_structure, GModule};
use crate::pgroup::{FiniteGroup, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationModule {
    group: FiniteGroup,
    summands: Vec<Subgroup>,
    /// Per summand: left cosets as sorted element lists, ordered by their
    /// least element.
    cosets: Vec<Vec<Vec<usize>>>,
    /// Per summand: element id -> coset position.
    coset_of: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    rank: usize,
}

impl PermutationModule {
    pub fn new(group: FiniteGroup, summands: Vec<Subgroup>) -> Result<Self> {
        let n = group.order();
        let mut cosets = Vec::with_capacity(summands.len());
        let mut coset_of = Vec::with_capacity(summands.len());
        let mut offsets = Vec::with_capacity(summands.len());
        let mut rank = 0;
        for h in &summands {
            if !group.is_subgroup(h) {
                return Err(Error::NotASubgroup);
            }
            let mut owner = vec![usize::MAX; n];
            let mut list: Vec<Vec<usize>> = Vec::new();
            for g in 0..n {
                if owner[g] != usize::MAX {
                    continue;
                }
                let mut c: Vec<usize> = h.elements().iter().map(|&x| group.mul(g, x)).collect();
                c.sort_unstable();
                for &y in &c {
                    owner[y] = list.len();
                }
                list.push(c);
            }
            offsets.push(rank);
            rank += list.len();
            cosets.push(list);
            coset_of.push(owner);
        }
        Ok(PermutationModule {
            group,
            summands,
            cosets,
            coset_of,
            offsets,
            rank,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn summands(&self) -> &[Subgroup] {
        &self.summands
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn offset(&self, summand: usize) -> usize {
        self.offsets[summand]
    }

    /// Least element of each coset of summand `i`, in basis order.
    pub fn coset_representatives(&self, i: usize) -> Vec<usize> {
        self.cosets[i].iter().map(|c| c[0]).collect()
    }

    /// Basis positions fixed by the whole group: the single coset of each
    /// summand with `H = G`.
    pub fn fixed_basis(&self) -> Vec<usize> {
        self.summands
            .iter()
            .enumerate()
            .filter(|(_, h)| h.order() == self.group.order())
            .map(|(i, _)| self.offsets[i])
            .collect()
    }

    /// Summand and coset position of a basis index.
    fn locate(&self, idx: usize) -> (usize, usize) {
        let s = self.offsets.partition_point(|&o| o <= idx) - 1;
        (s, idx - self.offsets[s])
    }

    /// Image of basis element `idx` under `g`: `g (aH) = (ga) H`.
    pub fn act_on_basis(&self, g: usize, idx: usize) -> usize {
        let (s, c) = self.locate(idx);
        let rep = self.cosets[s][c][0];
        self.offsets[s] + self.coset_of[s][self.group.mul(g, rep)]
    }

    pub fn act(&self, g: usize, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rank];
        for (idx, a) in v.iter().enumerate() {
            if !a.is_zero() {
                out[self.act_on_basis(g, idx)] += a;
            }
        }
        out
    }

    /// Basis of the fixed sublattice: one orbit sum per summand.
    pub fn orbit_sums(&self) -> Vec<Vec<BigInt>> {
        (0..self.summands.len())
            .map(|s| {
                let mut v = vec![BigInt::zero(); self.rank];
                for c in 0..self.cosets[s].len() {
                    v[self.offsets[s] + c] = BigInt::one();
                }
                v
            })
            .collect()
    }

    /// Generators of `pP + IP`: `p e` and `g e - e` for every basis element
    /// `e` and every `g` in a generating set of the group.
    pub fn augmentation_sublattice(&self) -> IntMatrix {
        let mut cols = Vec::new();
        let p = BigInt::from(self.group.p());
        for idx in 0..self.rank {
            let mut v = vec![BigInt::zero(); self.rank];
            v[idx] = p.clone();
            cols.push(v);
        }
        for g in self.group.generators() {
            for idx in 0..self.rank {
                let j = self.act_on_basis(g, idx);
                if j != idx {
                    let mut v = vec![BigInt::zero(); self.rank];
                    v[j] += 1;
                    v[idx] -= 1;
                    cols.push(v);
                }
            }
        }
        lattice_basis(&IntMatrix::from_columns(self.rank, &cols))
    }

    pub fn in_augmentation_sublattice(&self, v: &[BigInt]) -> bool {
        LatticeSolver::new(&self.augmentation_sublattice()).contains(v)
    }

    /// Coefficients at the fixed basis elements all divisible by p.
    pub fn coefficient_condition(&self, v: &[BigInt]) -> bool {
        let p = BigInt::from(self.group.p());
        self.fixed_basis().iter().all(|&i| (&v[i] % &p).is_zero())
    }

    pub fn is_fixed(&self, v: &[BigInt]) -> bool {
        self.group.generators().iter().all(|&g| self.act(g, v) == v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationMap {
    domain: PermutationModule,
    codomain: GModule,
    images: Vec<Vec<BigInt>>,
    lifted: IntMatrix,
}

impl PresentationMap {
    /// Builds the map sending coset `eH_i` to `images[i]` and validates it.
    pub fn new(domain: PermutationModule, codomain: GModule, images: Vec<Vec<BigInt>>) -> Result<Self> {
        if domain.group != *codomain.group() {
            return Err(Error::GroupMismatch);
        }
        if images.len() != domain.summands.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} summands",
                images.len(),
                domain.summands.len()
            )));
        }
        if let Some(i) = images.iter().position(|x| x.len() != codomain.ngens()) {
            return Err(Error::DimensionMismatch(format!(
                "image {i} has length {}, module has {} generators",
                images[i].len(),
                codomain.ngens()
            )));
        }
        let lifted = lift_images(&domain, &codomain, &images);
        let phi = PresentationMap {
            domain,
            codomain,
            images,
            lifted,
        };
        validate_presentation(&phi)?;
        Ok(phi)
    }

    pub fn domain(&self) -> &PermutationModule {
        &self.domain
    }

    pub fn codomain(&self) -> &GModule {
        &self.codomain
    }

    pub fn images(&self) -> &[Vec<BigInt>] {
        &self.images
    }

    /// `ngens x rank(P)` matrix of the images of all basis elements.
    pub fn lifted_matrix(&self) -> &IntMatrix {
        &self.lifted
    }

    /// Drops summands, keeping the others in order.
    pub fn restrict(&self, keep: &[usize]) -> Result<PresentationMap> {
        let summands = keep.iter().map(|&i| self.domain.summands[i].clone()).collect();
        let images = keep.iter().map(|&i| self.images[i].clone()).collect();
        let domain = PermutationModule::new(self.domain.group.clone(), summands)?;
        PresentationMap::new(domain, self.codomain.clone(), images)
    }
}

fn lift_images(domain: &PermutationModule, codomain: &GModule, images: &[Vec<BigInt>]) -> IntMatrix {
    let mut cols = Vec::with_capacity(domain.rank);
    for (i, x) in images.iter().enumerate() {
        for g in domain.coset_representatives(i) {
            cols.push(codomain.action(g).mul_vec(x));
        }
    }
    IntMatrix::from_columns(codomain.ngens(), &cols)
}

/// Checks shapes, that each `x_i` is fixed by `H_i` modulo relations, and
/// that the stored lifted matrix matches the images.
pub fn validate_presentation(phi: &PresentationMap) -> Result<()> {
    let x = &phi.codomain;
    if phi.domain.group != *x.group() {
        return Err(Error::GroupMismatch);
    }
    if phi.images.len() != phi.domain.summands.len() || phi.lifted.shape() != (x.ngens(), phi.domain.rank) {
        return Err(Error::DimensionMismatch(
            "presentation data has inconsistent shape".into(),
        ));
    }
    let rel = x.relation_lattice();
    let n = x.ngens();
    for (i, (h, xi)) in phi.domain.summands.iter().zip(&phi.images).enumerate() {
        if xi.len() != n {
            return Err(Error::DimensionMismatch(format!("image {i} has wrong length")));
        }
        for g in x.group().generators_of(h.elements()) {
            let moved = x.action(g).mul_vec(xi);
            let diff: Vec<BigInt> = moved.iter().zip(xi).map(|(a, b)| a - b).collect();
            if !rel.contains(&diff) {
                return Err(Error::ImageNotFixed { summand: i });
            }
        }
    }
    if lift_images(&phi.domain, x, &phi.images) != phi.lifted {
        return Err(Error::DimensionMismatch("lifted matrix does not match images".into()));
    }
    Ok(())
}

/// Whether the classes of the images span `X / (pX + IX)`.
pub fn spans_cobar(phi: &PresentationMap) -> bool {
    let cb = cobar(&phi.codomain);
    let classes: Vec<Vec<u64>> = phi.images.iter().map(|x| cb.project(x)).collect();
    let span = fp_span(&classes, cb.p(), cb.dim()).expect("prime validated with the module");
    span.dim() == cb.dim()
}

/// Whether `X / phi(P)` is finite of order prime to p, read off the Smith
/// form of `[lifted | R]`.
pub fn cokernel_prime_to_p(phi: &PresentationMap) -> bool {
    let x = &phi.codomain;
    let snf = smith_normal_form(&phi.lifted.hcat(x.relations()));
    let p = BigInt::from(x.p());
    snf.rank == x.ngens() && snf.invariant_factors().iter().all(|d| !(d % &p).is_zero())
}

/// Decides whether `phi` is a p-presentation by both criteria and insists
/// they agree.
pub fn is_p_presentation(phi: &PresentationMap) -> bool {
    let by_span = spans_cobar(phi);
    let by_cokernel = cokernel_prime_to_p(phi);
    assert_eq!(by_span, by_cokernel, "span criterion and cokernel criterion disagree");
    by_span
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub kernel_rank: usize,
    /// Columns in the permutation basis of `P`.
    pub kernel_basis: IntMatrix,
    pub in_pp_plus_ip: bool,
    /// Coefficients at group-fixed basis elements divisible by p. Only
    /// known to match `in_pp_plus_ip` when `is_trivial_module` holds.
    pub condition_c: bool,
    pub is_trivial_module: bool,
}

pub fn kernel_report(phi: &PresentationMap) -> Result<KernelReport> {
    if !is_p_presentation(phi) {
        return Err(Error::NotAPPresentation);
    }
    let x = &phi.codomain;
    let rank = phi.domain.rank;
    let full = integer_kernel(&phi.lifted.hcat(x.relations()));
    let kernel_basis = lattice_basis(&full.row_range(0, rank));
    let kernel_rank = kernel_basis.cols();
    debug_assert_eq!(kernel_rank, rank - module_structure(x).free_rank);

    let columns = kernel_basis.columns();
    let aug = LatticeSolver::new(&phi.domain.augmentation_sublattice());
    let in_pp_plus_ip = columns.iter().all(|c| aug.contains(c));
    let condition_c = columns.iter().all(|c| phi.domain.coefficient_condition(c));
    let is_trivial_module = columns.iter().all(|c| phi.domain.is_fixed(c));
    Ok(KernelReport {
        kernel_rank,
        kernel_basis,
        in_pp_plus_ip,
        condition_c,
        is_trivial_module,
    })
}

/// Membership of the kernel in `pP + IP` against the coefficient test; only
/// meaningful when the group fixes the kernel pointwise.
pub fn conditions_b_c_agree(phi: &PresentationMap) -> Result<bool> {
    let r = kernel_report(phi)?;
    if !r.is_trivial_module {
        return Err(Error::KernelNotTrivialModule);
    }
    Ok(r.in_pp_plus_ip == r.condition_c)
}
