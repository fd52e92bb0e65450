//! Constructors for the small finite groups used in tests and in the
//! exhaustive magnetic-group catalog (all groups of even order up to 16,
//! together with every surjective grading onto Z/2).

use std::collections::BTreeMap;

use crate::group::{build_group, Group, MagneticGroup};

pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

pub fn cyclic(n: usize) -> Group {
    Group::from_table(cyclic_table(n)).unwrap()
}

pub fn group_to_table(g: &Group) -> Vec<Vec<usize>> {
    (0..g.order)
        .map(|a| (0..g.order).map(|b| g.mul(a, b)).collect())
        .collect()
}

/// Direct product; element (a, b) has index a * |B| + b.
pub fn direct_product(a: &Group, b: &Group) -> Group {
    let n = a.order * b.order;
    let idx = |x: usize, y: usize| x * b.order + y;
    let table: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            let (pa, pb) = (p / b.order, p % b.order);
            (0..n)
                .map(|q| {
                    let (qa, qb) = (q / b.order, q % b.order);
                    idx(a.mul(pa, qa), b.mul(pb, qb))
                })
                .collect()
        })
        .collect();
    Group::from_table(table).unwrap()
}

/// C2 acting on Cn by x -> x^t (t^2 = 1 mod n). Elements r^i are 0..n,
/// s r^i are n..2n. t = n-1 gives the dihedral group.
pub fn cn_rtimes_c2(n: usize, t: usize) -> Group {
    assert_eq!((t * t) % n, 1 % n, "action must be an involution");
    let idx = |s: usize, i: usize| s * n + i;
    let order = 2 * n;
    let table: Vec<Vec<usize>> = (0..order)
        .map(|p| {
            let (ps, pi) = (p / n, p % n);
            (0..order)
                .map(|q| {
                    let (qs, qi) = (q / n, q % n);
                    // (s^ps r^pi)(s^qs r^qi) = s^(ps+qs) r^(t^qs * pi + qi)
                    let moved = if qs == 1 { (t * pi) % n } else { pi };
                    idx((ps + qs) % 2, (moved + qi) % n)
                })
                .collect()
        })
        .collect();
    Group::from_table(table).unwrap()
}

/// Dihedral group of order 2n.
pub fn dihedral(n: usize) -> Group {
    cn_rtimes_c2(n, n - 1)
}

pub fn symmetric3() -> Group {
    dihedral(3)
}

/// Dicyclic group of order 4n: a^(2n) = e, b^2 = a^n, b a b^-1 = a^-1.
/// dicyclic(2) is the quaternion group Q8.
pub fn dicyclic(n: usize) -> Group {
    let m = 2 * n;
    let order = 4 * n;
    let idx = |s: usize, i: usize| s * m + i;
    let table: Vec<Vec<usize>> = (0..order)
        .map(|p| {
            let (ps, pi) = (p / m, p % m);
            (0..order)
                .map(|q| {
                    let (qs, qi) = (q / m, q % m);
                    // (b^ps a^pi)(b^qs a^qi)
                    if qs == 0 {
                        idx(ps, (pi + qi) % m)
                    } else {
                        // b^ps a^pi b a^qi = b^(ps+1) a^(-pi) a^qi, with b^2 = a^n
                        let i = (m - pi + qi) % m;
                        if ps == 0 {
                            idx(1, i)
                        } else {
                            idx(0, (i + n) % m)
                        }
                    }
                })
                .collect()
        })
        .collect();
    Group::from_table(table).unwrap()
}

/// a^4 = b^4 = e with b a b^-1 = a^-1; SmallGroup(16,4).
pub fn c4_rtimes_c4() -> Group {
    let idx = |i: usize, j: usize| i * 4 + j;
    let table: Vec<Vec<usize>> = (0..16)
        .map(|p| {
            let (pi, pj) = (p / 4, p % 4);
            (0..16)
                .map(|q| {
                    let (qi, qj) = (q / 4, q % 4);
                    // (a^pi b^pj)(a^qi b^qj) = a^(pi + (-1)^pj qi) b^(pj+qj)
                    let moved = if pj % 2 == 1 { (4 - qi) % 4 } else { qi };
                    idx((pi + moved) % 4, (pj + qj) % 4)
                })
                .collect()
        })
        .collect();
    Group::from_table(table).unwrap()
}

/// (C2 x C2) rtimes C4 with the C4 generator swapping the factors;
/// SmallGroup(16,3).
pub fn c2c2_rtimes_c4() -> Group {
    let idx = |v: usize, j: usize| v * 4 + j;
    let table: Vec<Vec<usize>> = (0..16)
        .map(|p| {
            let (pv, pj) = (p / 4, p % 4);
            (0..16)
                .map(|q| {
                    let (qv, qj) = (q / 4, q % 4);
                    let (qx, qy) = (qv / 2, qv % 2);
                    let moved = if pj % 2 == 1 { qy * 2 + qx } else { qv };
                    let (px, py) = ((pv / 2) ^ (moved / 2), (pv % 2) ^ (moved % 2));
                    idx(px * 2 + py, (pj + qj) % 4)
                })
                .collect()
        })
        .collect();
    Group::from_table(table).unwrap()
}

/// Quotient of a group by a central subgroup, cosets ordered by their
/// smallest element so the identity coset is element 0.
pub fn quotient_by_central(g: &Group, central: &[usize]) -> Group {
    let mut coset_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for x in 0..g.order {
        if coset_of.contains_key(&x) {
            continue;
        }
        let mut cs: Vec<usize> = central.iter().map(|&z| g.mul(x, z)).collect();
        cs.sort_unstable();
        cs.dedup();
        let id = cosets.len();
        for &y in &cs {
            coset_of.insert(y, id);
        }
        cosets.push(cs);
    }
    let n = cosets.len();
    let table: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            (0..n)
                .map(|q| coset_of[&g.mul(cosets[p][0], cosets[q][0])])
                .collect()
        })
        .collect();
    Group::from_table(table).unwrap()
}

/// Central product D8 o C4 of the dihedral group of order 8 and C4,
/// glueing the central rotation to the square; SmallGroup(16,13).
pub fn pauli_group() -> Group {
    let d8 = dihedral(4);
    let c4 = cyclic(4);
    let prod = direct_product(&d8, &c4);
    // r^2 is element 2 of the dihedral table; (r^2, 2) has index 2*4+2.
    let z = 2 * 4 + 2;
    quotient_by_central(&prod, &[0, z])
}

/// Alternating group A4 as even permutations of four letters.
pub fn alternating4() -> Group {
    let mut perms: Vec<[usize; 4]> = Vec::new();
    for a in 0..4usize {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    for &x in &p {
                        seen[x] = true;
                    }
                    if seen.iter().all(|&s| s) && permutation_sign(&p) == 1 {
                        perms.push(p);
                    }
                }
            }
        }
    }
    perms.sort_unstable(); // identity is lexicographically first
    let pos: BTreeMap<[usize; 4], usize> =
        perms.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let table: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| {
                    let comp = [p[q[0]], p[q[1]], p[q[2]], p[q[3]]];
                    pos[&comp]
                })
                .collect()
        })
        .collect();
    Group::from_table(table).unwrap()
}

fn permutation_sign(p: &[usize; 4]) -> i8 {
    let mut sign = 1i8;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// The magnetic cyclic group (Z/2n, mod 2).
pub fn magnetic_cyclic(n: usize) -> MagneticGroup {
    assert!(n % 2 == 0, "magnetic cyclic groups have even order");
    let phi: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    build_group(cyclic_table(n), phi).unwrap()
}

/// G x Z/2 graded by the second coordinate.
pub fn magnetic_product_with_z2(g: &Group) -> MagneticGroup {
    let prod = direct_product(g, &cyclic(2));
    let phi: Vec<u8> = (0..prod.order).map(|i| (i % 2) as u8).collect();
    build_group(group_to_table(&prod), phi).unwrap()
}

/// Every group of even order up to 16, up to isomorphism.
pub fn all_groups_up_to_16() -> Vec<(String, Group)> {
    let c = cyclic;
    let mut out: Vec<(String, Group)> = vec![
        ("C2".into(), c(2)),
        ("C4".into(), c(4)),
        ("C2xC2".into(), direct_product(&c(2), &c(2))),
        ("C6".into(), c(6)),
        ("S3".into(), symmetric3()),
        ("C8".into(), c(8)),
        ("C4xC2".into(), direct_product(&c(4), &c(2))),
        ("C2^3".into(), direct_product(&direct_product(&c(2), &c(2)), &c(2))),
        ("D8".into(), dihedral(4)),
        ("Q8".into(), dicyclic(2)),
        ("C10".into(), c(10)),
        ("D10".into(), dihedral(5)),
        ("C12".into(), c(12)),
        ("C6xC2".into(), direct_product(&c(6), &c(2))),
        ("D12".into(), dihedral(6)),
        ("A4".into(), alternating4()),
        ("Dic3".into(), dicyclic(3)),
        ("C14".into(), c(14)),
        ("D14".into(), dihedral(7)),
        ("C16".into(), c(16)),
        ("C4xC4".into(), direct_product(&c(4), &c(4))),
        ("C8xC2".into(), direct_product(&c(8), &c(2))),
        ("C4xC2xC2".into(), direct_product(&direct_product(&c(4), &c(2)), &c(2))),
        (
            "C2^4".into(),
            direct_product(
                &direct_product(&c(2), &c(2)),
                &direct_product(&c(2), &c(2)),
            ),
        ),
        ("D16".into(), dihedral(8)),
        ("Q16".into(), dicyclic(4)),
        ("SD16".into(), cn_rtimes_c2(8, 3)),
        ("M16".into(), cn_rtimes_c2(8, 5)),
        ("D8xC2".into(), direct_product(&dihedral(4), &c(2))),
        ("Q8xC2".into(), direct_product(&dicyclic(2), &c(2))),
        ("C4:C4".into(), c4_rtimes_c4()),
        ("C2^2:C4".into(), c2c2_rtimes_c4()),
        ("Pauli".into(), pauli_group()),
    ];
    out.sort_by_key(|(_, g)| g.order);
    out
}

/// All surjective gradings G -> Z/2 of a group, each one a magnetic group.
pub fn magnetic_structures(g: &Group) -> Vec<MagneticGroup> {
    let gens = g.generating_set();
    let k = gens.len();
    let mut out = Vec::new();
    for mask in 0..(1u32 << k) {
        let mut phi = vec![u8::MAX; g.order];
        phi[0] = 0;
        let mut frontier = vec![0usize];
        let mut ok = true;
        while let Some(x) = frontier.pop() {
            for (i, &gen) in gens.iter().enumerate() {
                let v = phi[x] ^ ((mask >> i) & 1) as u8;
                let y = g.mul(x, gen);
                if phi[y] == u8::MAX {
                    phi[y] = v;
                    frontier.push(y);
                } else if phi[y] != v {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        if !ok || phi.iter().any(|&v| v == u8::MAX) {
            continue;
        }
        if phi.iter().all(|&v| v == 0) {
            continue; // not surjective
        }
        if let Ok(mg) = build_group(group_to_table(g), phi) {
            out.push(mg);
        }
    }
    out
}

/// The exhaustive catalog of magnetic groups of order <= 16.
pub fn magnetic_catalog_up_to_16() -> Vec<(String, MagneticGroup)> {
    let mut out = Vec::new();
    for (name, g) in all_groups_up_to_16() {
        for (i, mg) in magnetic_structures(&g).into_iter().enumerate() {
            out.push((format!("{}#{}", name, i), mg));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_standard_groups() {
        assert_eq!(dihedral(4).order, 8);
        assert_eq!(dicyclic(2).order, 8);
        assert_eq!(dicyclic(4).order, 16);
        assert_eq!(alternating4().order, 12);
        assert_eq!(pauli_group().order, 16);
        assert_eq!(c4_rtimes_c4().order, 16);
        assert_eq!(c2c2_rtimes_c4().order, 16);
    }

    #[test]
    fn q8_has_unique_involution() {
        let q8 = dicyclic(2);
        let inv: Vec<usize> = (0..8).filter(|&x| x != 0 && q8.mul(x, x) == 0).collect();
        assert_eq!(inv.len(), 1);
    }

    /// Brute-force isomorphism test: map a generating set onto candidate
    /// images with matching element orders and extend multiplicatively.
    fn isomorphic(a: &Group, b: &Group) -> bool {
        if a.order != b.order {
            return false;
        }
        let gens = a.generating_set();
        let mut images = vec![0usize; gens.len()];
        fn rec(a: &Group, b: &Group, gens: &[usize], images: &mut Vec<usize>, k: usize) -> bool {
            if k == gens.len() {
                // extend to a full map and verify
                let mut map = vec![usize::MAX; a.order];
                map[0] = 0;
                let mut frontier = vec![0usize];
                while let Some(x) = frontier.pop() {
                    for (i, &g) in gens.iter().enumerate() {
                        let y = a.mul(x, g);
                        let im = b.mul(map[x], images[i]);
                        if map[y] == usize::MAX {
                            map[y] = im;
                            frontier.push(y);
                        } else if map[y] != im {
                            return false;
                        }
                    }
                }
                let mut seen = vec![false; b.order];
                for &m in &map {
                    if m == usize::MAX {
                        return false;
                    }
                    seen[m] = true;
                }
                if seen.iter().any(|&s| !s) {
                    return false;
                }
                for x in 0..a.order {
                    for y in 0..a.order {
                        if map[a.mul(x, y)] != b.mul(map[x], map[y]) {
                            return false;
                        }
                    }
                }
                return true;
            }
            let want = a.element_order(gens[k]);
            for cand in 0..b.order {
                if b.element_order(cand) == want {
                    images[k] = cand;
                    if rec(a, b, gens, images, k + 1) {
                        return true;
                    }
                }
            }
            false
        }
        rec(a, b, &gens, &mut images, 0)
    }

    #[test]
    fn order_16_groups_pairwise_nonisomorphic() {
        let groups: Vec<(String, Group)> = all_groups_up_to_16()
            .into_iter()
            .filter(|(_, g)| g.order == 16)
            .collect();
        assert_eq!(groups.len(), 14);
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                assert!(
                    !isomorphic(&groups[i].1, &groups[j].1),
                    "{} and {} are isomorphic: catalog misses a group",
                    groups[i].0,
                    groups[j].0
                );
            }
        }
    }

    #[test]
    fn magnetic_structure_counts() {
        // Z/4 has a unique index-2 subgroup, so exactly one grading.
        assert_eq!(magnetic_structures(&cyclic(4)).len(), 1);
        // Klein four group: three hyperplanes.
        let v4 = direct_product(&cyclic(2), &cyclic(2));
        assert_eq!(magnetic_structures(&v4).len(), 3);
        // A4 has no index-2 subgroup.
        assert_eq!(magnetic_structures(&alternating4()).len(), 0);
        // Q8: three cyclic subgroups of order 4.
        assert_eq!(magnetic_structures(&dicyclic(2)).len(), 3);
    }

    #[test]
    fn catalog_is_well_formed() {
        let catalog = magnetic_catalog_up_to_16();
        assert!(catalog.len() > 40);
        for (name, mg) in &catalog {
            assert!(mg.order() <= 16, "{}", name);
            assert_eq!(mg.core_elements().len() * 2, mg.order(), "{}", name);
        }
    }
}
