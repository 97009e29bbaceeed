use edp_core::pgroup::{is_power_of, FiniteGroup};

fn order_16_groups() -> Vec<(&'static str, FiniteGroup)> {
    let z2 = FiniteGroup::cyclic(2, 2).unwrap();
    let z4 = FiniteGroup::cyclic(2, 4).unwrap();
    let z8 = FiniteGroup::cyclic(2, 8).unwrap();
    let v4 = z2.direct_product(&z2).unwrap().0;
    vec![
        ("Z16", FiniteGroup::cyclic(2, 16).unwrap()),
        ("Z4xZ4", z4.direct_product(&z4).unwrap().0),
        ("Z2^4", v4.direct_product(&v4).unwrap().0),
        ("Z8xZ2", z8.direct_product(&z2).unwrap().0),
        ("D8", FiniteGroup::dihedral(2, 8).unwrap()),
        (
            "Q8xZ2",
            FiniteGroup::quaternion().unwrap().direct_product(&z2).unwrap().0,
        ),
        (
            "D4xZ2",
            FiniteGroup::dihedral(2, 4).unwrap().direct_product(&z2).unwrap().0,
        ),
    ]
}

/// Number of subsets containing the identity that are closed under the
/// product; in a finite group those are exactly the subgroups.
fn closed_subset_count(g: &FiniteGroup) -> usize {
    let n = g.order();
    let mut count = 0;
    for mask in 0u32..(1 << (n - 1)) {
        let set = ((mask as u64) << 1) | 1;
        let closed = (0..n).filter(|&a| set >> a & 1 == 1).all(|a| {
            (0..n)
                .filter(|&b| set >> b & 1 == 1)
                .all(|b| set >> g.mul(a, b) & 1 == 1)
        });
        if closed {
            count += 1;
        }
    }
    count
}

#[test]
fn enumeration_matches_subset_closure() {
    let mut groups = order_16_groups();
    groups.push(("Q8", FiniteGroup::quaternion().unwrap()));
    groups.push(("D4", FiniteGroup::dihedral(2, 4).unwrap()));
    groups.push(("Z9", FiniteGroup::cyclic(3, 9).unwrap()));
    let z3 = FiniteGroup::cyclic(3, 3).unwrap();
    groups.push(("Z3xZ3", z3.direct_product(&z3).unwrap().0));
    for (name, g) in groups {
        let table = g.enumerate_subgroups().unwrap();
        assert_eq!(table.subgroup_count(), closed_subset_count(&g), "{name}");
    }
}

#[test]
fn known_subgroup_counts() {
    let expected = [
        ("Z16", 5),
        ("Z4xZ4", 15),
        ("Z2^4", 67),
        ("Z8xZ2", 11),
        ("D8", 19),
        ("Q8xZ2", 19),
        ("D4xZ2", 35),
    ];
    for ((name, g), (ename, count)) in order_16_groups().into_iter().zip(expected) {
        assert_eq!(name, ename);
        assert_eq!(g.enumerate_subgroups().unwrap().subgroup_count(), count, "{name}");
    }
}

#[test]
fn classes_are_closed_under_conjugation() {
    for (name, g) in order_16_groups() {
        let table = g.enumerate_subgroups().unwrap();
        let mut seen = std::collections::HashSet::new();
        for (ci, class) in table.classes.iter().enumerate() {
            assert!(is_power_of(class.index, 2), "{name}");
            assert_eq!(class.representative, class.members.iter().min().unwrap().clone());
            for m in &class.members {
                assert!(seen.insert(m.clone()), "{name}: subgroup listed twice");
                assert_eq!(m.index_in(&g), class.index);
                for x in 0..g.order() {
                    assert_eq!(table.class_of(&g.conjugate(m, x)), Some(ci), "{name}");
                }
            }
        }
    }
}

#[test]
fn enumeration_is_deterministic_under_relabeling_counts() {
    let g = FiniteGroup::dihedral(2, 8).unwrap();
    let mut perm: Vec<usize> = (0..16).collect();
    perm[1..].reverse();
    let r = g.relabel(&perm).unwrap();
    let a = g.enumerate_subgroups().unwrap();
    let b = r.enumerate_subgroups().unwrap();
    let sizes = |t: &edp_core::SubgroupClassTable| -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = t.classes.iter().map(|c| (c.index, c.members.len())).collect();
        v.sort();
        v
    };
    assert_eq!(sizes(&a), sizes(&b));
}
