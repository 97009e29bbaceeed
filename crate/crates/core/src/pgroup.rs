//! Finite p-groups given by Cayley tables.
//!
//! Elements are ids `0..order` with `0` the identity and
//! `table[a][b] = a * b`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, GroupAxiom, Result};
use crate::exactlin::check_prime;

/// Default bound on the group order accepted by subgroup enumeration.
pub const DEFAULT_SUBGROUP_CEILING: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    p: u64,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

fn not_a_group(axiom: GroupAxiom, detail: impl Into<String>) -> Error {
    Error::NotAGroup {
        axiom,
        detail: detail.into(),
    }
}

/// A group built from permutations, the ids of its generators, and for each
/// element its `(parent, generator index)` closure word.
pub type PermutationClosure = (FiniteGroup, Vec<usize>, Vec<Option<(usize, usize)>>);

/// Whether `n` is `p^k` for some `k >= 0`.
pub fn is_power_of(mut n: usize, p: u64) -> bool {
    if n == 0 {
        return false;
    }
    let p = p as usize;
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

impl FiniteGroup {
    /// Validates a Cayley table: shape, identity at id 0, inverses,
    /// associativity, and a p-power order.
    pub fn from_table(p: u64, table: Vec<Vec<usize>>) -> Result<Self> {
        check_prime(p)?;
        let n = table.len();
        if n == 0 {
            return Err(not_a_group(GroupAxiom::Shape, "empty table"));
        }
        if let Some(i) = table.iter().position(|r| r.len() != n) {
            return Err(not_a_group(GroupAxiom::Shape, format!("row {i} has wrong length")));
        }
        for (a, row) in table.iter().enumerate() {
            if let Some(b) = row.iter().position(|&x| x >= n) {
                return Err(not_a_group(GroupAxiom::EntryRange, format!("entry ({a},{b})")));
            }
        }
        if let Some(a) = (0..n).find(|&a| table[0][a] != a || table[a][0] != a) {
            return Err(not_a_group(GroupAxiom::Identity, format!("element {a}")));
        }
        let mut inverses = vec![0; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == 0) {
                Some(b) if table[b][a] == 0 => inverses[a] = b,
                _ => return Err(not_a_group(GroupAxiom::Inverses, format!("element {a}"))),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(not_a_group(
                            GroupAxiom::Associativity,
                            format!("({a}*{b})*{c} != {a}*({b}*{c})"),
                        ));
                    }
                }
            }
        }
        if !is_power_of(n, p) {
            return Err(Error::NotAPGroup { p, order: n });
        }
        Ok(FiniteGroup { p, table, inverses })
    }

    pub fn trivial(p: u64) -> Result<Self> {
        Self::from_table(p, vec![vec![0]])
    }

    /// Cyclic group of order `n`; element `k` is the `k`-th power of a generator.
    pub fn cyclic(p: u64, n: usize) -> Result<Self> {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(p, table)
    }

    /// Dihedral group of order `2n`: ids `0..n` are rotations `r^k`, ids
    /// `n..2n` are reflections `s r^k`.
    pub fn dihedral(p: u64, n: usize) -> Result<Self> {
        // (s^a r^k)(s^b r^l) = s^{a+b} r^{(-1)^b k + l}
        let decode = |x: usize| (x / n, x % n);
        let encode = |a: usize, k: usize| a * n + k;
        let table = (0..2 * n)
            .map(|x| {
                (0..2 * n)
                    .map(|y| {
                        let (a, k) = decode(x);
                        let (b, l) = decode(y);
                        let k = if b == 1 { (n - k) % n } else { k };
                        encode((a + b) % 2, (k + l) % n)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(p, table)
    }

    /// Quaternion group of order 8 with ids `[1, i, j, k, -1, -i, -j, -k]`.
    pub fn quaternion() -> Result<Self> {
        // unit index 0..4 for 1,i,j,k; sign bit as offset 4
        const MUL: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let table = (0..8)
            .map(|x: usize| {
                (0..8)
                    .map(|y: usize| {
                        let (u, neg) = MUL[x % 4][y % 4];
                        let sign = (x >= 4) ^ (y >= 4) ^ neg;
                        u + if sign { 4 } else { 0 }
                    })
                    .collect()
            })
            .collect();
        Self::from_table(2, table)
    }

    /// Direct product with ids `(a, b) -> a * other.order() + b`, together
    /// with the two projection maps as id lists.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<(FiniteGroup, Vec<usize>, Vec<usize>)> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch {
                expected: self.p,
                found: other.p,
            });
        }
        let (n, m) = (self.order(), other.order());
        let table = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        let g = Self::from_table(self.p, table)?;
        let first = (0..n * m).map(|x| x / m).collect();
        let second = (0..n * m).map(|x| x % m).collect();
        Ok((g, first, second))
    }

    /// Group from permutations of `0..degree`. Ids are assigned by
    /// breadth-first search: identity first, then the distinct non-identity
    /// generators in order, then right multiples by generators. Returns
    /// the group, the id of each generator, and for every non-identity
    /// element a `(parent, generator index)` pair with
    /// `element = parent * generator`.
    pub fn from_permutations(p: u64, degree: usize, generators: &[Vec<usize>]) -> Result<PermutationClosure> {
        for g in generators {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
                return Err(Error::InvalidParameter(format!(
                    "generator {g:?} is not a permutation of {degree} points"
                )));
            }
        }
        // a * b acts by applying b first, then a
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&x| a[x]).collect() };
        let identity: Vec<usize> = (0..degree).collect();
        let mut elems: Vec<Vec<usize>> = vec![identity];
        let mut words: Vec<Option<(usize, usize)>> = vec![None];
        let mut index = std::collections::HashMap::new();
        index.insert(elems[0].clone(), 0usize);
        let mut gen_ids = Vec::with_capacity(generators.len());
        for (gi, g) in generators.iter().enumerate() {
            let id = *index.entry(g.clone()).or_insert_with(|| {
                elems.push(g.clone());
                words.push(Some((0, gi)));
                elems.len() - 1
            });
            gen_ids.push(id);
        }
        let mut queue: VecDeque<usize> = (0..elems.len()).collect();
        while let Some(x) = queue.pop_front() {
            for (gi, g) in generators.iter().enumerate() {
                let y = compose(&elems[x], g);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                    words.push(Some((x, gi)));
                    queue.push_back(elems.len() - 1);
                }
            }
            if elems.len() > 1 << 16 {
                return Err(Error::InvalidParameter("permutation group too large".into()));
            }
        }
        let table = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        let g = Self::from_table(p, table)?;
        Ok((g, gen_ids, words))
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.table.len()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn check_element(&self, id: usize) -> Result<()> {
        if id < self.order() {
            Ok(())
        } else {
            Err(Error::BadElement {
                id,
                order: self.order(),
            })
        }
    }

    /// A deterministic generating set: scan ids in order and keep each
    /// element not already in the subgroup generated so far.
    pub fn generators_of(&self, elements: &[usize]) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current: BTreeSet<usize> = BTreeSet::from([0]);
        for &x in elements {
            if !current.contains(&x) {
                gens.push(x);
                current = self.closure(&current, &[x]);
            }
        }
        gens
    }

    pub fn generators(&self) -> Vec<usize> {
        let all: Vec<usize> = (0..self.order()).collect();
        self.generators_of(&all)
    }

    fn closure(&self, base: &BTreeSet<usize>, extra: &[usize]) -> BTreeSet<usize> {
        let mut set = base.clone();
        set.insert(0);
        let gens: Vec<usize> = base.iter().chain(extra).copied().filter(|&g| g != 0).collect();
        let mut queue: VecDeque<usize> = set.iter().copied().collect();
        for &g in extra {
            if set.insert(g) {
                queue.push_back(g);
            }
        }
        // in a finite group, closing under right multiplication by the
        // generators also yields inverses
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    pub fn subgroup_generated(&self, elems: &[usize]) -> Result<Subgroup> {
        for &e in elems {
            self.check_element(e)?;
        }
        let set = self.closure(&BTreeSet::new(), elems);
        Ok(Subgroup {
            elements: set.into_iter().collect(),
        })
    }

    /// Validates an explicit element set as a subgroup.
    pub fn subgroup(&self, elems: &[usize]) -> Result<Subgroup> {
        for &e in elems {
            self.check_element(e)?;
        }
        let set: BTreeSet<usize> = elems.iter().copied().collect();
        if !set.contains(&0) {
            return Err(Error::NotASubgroup);
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(Error::NotASubgroup);
                }
            }
        }
        Ok(Subgroup {
            elements: set.into_iter().collect(),
        })
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            elements: (0..self.order()).collect(),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { elements: vec![0] }
    }

    pub fn is_subgroup(&self, h: &Subgroup) -> bool {
        self.subgroup(&h.elements).is_ok()
    }

    /// `g H g^{-1}`
    pub fn conjugate(&self, h: &Subgroup, g: usize) -> Subgroup {
        let gi = self.inv(g);
        let set: BTreeSet<usize> = h.elements.iter().map(|&x| self.mul(self.mul(g, x), gi)).collect();
        Subgroup {
            elements: set.into_iter().collect(),
        }
    }

    /// Relabels element ids by `perm` (which must fix 0): element `a`
    /// becomes `perm[a]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteGroup> {
        let n = self.order();
        let mut seen = vec![false; n];
        if perm.len() != n || perm[0] != 0 || perm.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(Error::InvalidParameter(
                "relabeling must be a permutation fixing 0".into(),
            ));
        }
        let mut table = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                table[perm[a]][perm[b]] = perm[self.mul(a, b)];
            }
        }
        Self::from_table(self.p, table)
    }

    pub fn enumerate_subgroups(&self) -> Result<SubgroupClassTable> {
        self.enumerate_subgroups_with_ceiling(DEFAULT_SUBGROUP_CEILING)
    }

    /// All subgroups grouped into conjugacy classes.
    ///
    /// Subgroups are found by closing every known subgroup under one more
    /// element, starting from the trivial subgroup; since every subgroup is
    /// generated by finitely many elements this reaches all of them. An
    /// element already in `H` is skipped, and `<H, g>` only depends on the
    /// coset `gH`, so one element per coset is tried.
    pub fn enumerate_subgroups_with_ceiling(&self, ceiling: usize) -> Result<SubgroupClassTable> {
        if self.order() > ceiling {
            return Err(Error::GroupTooLarge {
                order: self.order(),
                ceiling,
            });
        }
        let n = self.order();
        let start: BTreeSet<usize> = BTreeSet::from([0]);
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        seen.insert(vec![0]);
        let mut all: Vec<Vec<usize>> = vec![vec![0]];
        let mut queue: VecDeque<BTreeSet<usize>> = VecDeque::from([start]);
        while let Some(h) = queue.pop_front() {
            let mut covered = vec![false; n];
            for &x in &h {
                covered[x] = true;
            }
            for g in 0..n {
                if covered[g] {
                    continue;
                }
                for &x in &h {
                    covered[self.mul(g, x)] = true;
                }
                let k = self.closure(&h, &[g]);
                let key: Vec<usize> = k.iter().copied().collect();
                if seen.insert(key.clone()) {
                    all.push(key);
                    queue.push_back(k);
                }
            }
        }

        let mut assigned: HashSet<Vec<usize>> = HashSet::new();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut classes = Vec::new();
        for h in &all {
            if assigned.contains(h) {
                continue;
            }
            let sub = Subgroup { elements: h.clone() };
            let members: BTreeSet<Vec<usize>> = (0..n).map(|g| self.conjugate(&sub, g).elements).collect();
            for m in &members {
                assigned.insert(m.clone());
            }
            let rep = members.iter().next().cloned().unwrap();
            classes.push(SubgroupClass {
                representative: Subgroup { elements: rep },
                index: n / h.len(),
                members: members.into_iter().map(|elements| Subgroup { elements }).collect(),
            });
        }
        classes.sort_by(|a, b| {
            b.index
                .cmp(&a.index)
                .then_with(|| a.representative.elements.cmp(&b.representative.elements))
        });
        Ok(SubgroupClassTable { classes })
    }
}

/// A subgroup as a sorted list of element ids of its parent group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn index_in(&self, group: &FiniteGroup) -> usize {
        group.order() / self.order()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }
}

impl std::fmt::Display for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids: Vec<String> = self.elements.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupClass {
    /// Lexicographically least member.
    pub representative: Subgroup,
    pub index: usize,
    pub members: Vec<Subgroup>,
}

/// Conjugacy classes of subgroups, largest index (smallest subgroup) first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupClassTable {
    pub classes: Vec<SubgroupClass>,
}

impl SubgroupClassTable {
    pub fn subgroup_count(&self) -> usize {
        self.classes.iter().map(|c| c.members.len()).sum()
    }

    /// Position of the class containing `h`.
    pub fn class_of(&self, h: &Subgroup) -> Option<usize> {
        self.classes.iter().position(|c| c.members.contains(h))
    }
}
