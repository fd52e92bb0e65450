//! Finite magnetic groups: multiplication tables, the grading homomorphism,
//! subgroups, conjugacy classes, central extensions and the splitting test
//! behind the 4- vs 8-periodicity decision.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("phi is not a homomorphism to Z/2")]
    PhiNotHomomorphism,
    #[error("phi is not surjective: a magnetic group needs an antiunitary element")]
    PhiNotSurjective,
    #[error("subset is not a subgroup")]
    NotASubgroup,
    #[error("group order {0} exceeds the configured bound {1}")]
    GroupTooLarge(usize, usize),
    #[error("invalid central extension: {0}")]
    BadExtension(String),
    #[error("kernel character is not a homomorphism to {{+1,-1}}")]
    BadKernelCharacter,
}

/// A finite group given extensionally by its multiplication table.
/// Elements are dense indices 0..order-1 and element 0 is the identity.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Group {
    pub order: usize,
    /// Row major: mult[a * order + b] = a * b.
    pub mult: Vec<usize>,
    #[serde(skip)]
    pub inv: Vec<usize>,
}

impl Group {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Group, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        let mut mult = vec![0usize; n * n];
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::NotAGroup("table is not square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(GroupError::NotAGroup("entry out of range".into()));
                }
                mult[i * n + j] = v;
            }
        }
        let mut g = Group {
            order: n,
            mult,
            inv: vec![0; n],
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&mut self) -> Result<(), GroupError> {
        let n = self.order;
        // identity must be element 0
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(GroupError::NotAGroup(
                    "element 0 is not a two-sided identity".into(),
                ));
            }
        }
        // inverses
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if self.mul(a, b) == 0 {
                    inv[a] = b;
                }
            }
            if inv[a] == usize::MAX {
                return Err(GroupError::NotAGroup(format!("element {} has no inverse", a)));
            }
        }
        self.inv = inv;
        // associativity, exhaustively
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(GroupError::NotAGroup(format!(
                            "associativity fails at ({}, {}, {})",
                            a, b, c
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    #[inline]
    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        // g^-1 x g
        self.mul(self.mul(self.inverse(g), x), g)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order)
            .map(|a| self.element_order(a))
            .fold(1, num::integer::lcm)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        let mut x = 0;
        for _ in 0..k {
            x = self.mul(x, a);
        }
        x
    }

    /// Closure of a subset under multiplication and inverses.
    pub fn generated_by(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inverse(g))] {
                    if !seen[y] {
                        seen[y] = true;
                        frontier.push(y);
                    }
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    /// A small generating set, greedily built from the smallest elements.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut have = self.generated_by(&gens);
        for x in 1..self.order {
            if !have.contains(&x) {
                gens.push(x);
                have = self.generated_by(&gens);
                if have.len() == self.order {
                    break;
                }
            }
        }
        gens
    }

    pub fn is_subgroup(&self, subset: &[usize]) -> bool {
        if !subset.contains(&0) {
            return false;
        }
        subset
            .iter()
            .all(|&a| subset.iter().all(|&b| subset.contains(&self.mul(a, b))))
    }

    /// Conjugacy classes of a subgroup under its own conjugation action.
    pub fn conjugacy_classes(&self, subset: &[usize]) -> Result<Vec<Vec<usize>>, GroupError> {
        if !self.is_subgroup(subset) {
            return Err(GroupError::NotASubgroup);
        }
        let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &x in subset {
            if class_of.contains_key(&x) {
                continue;
            }
            let mut cls: Vec<usize> = Vec::new();
            for &g in subset {
                let y = self.conjugate(g, x);
                if !cls.contains(&y) {
                    cls.push(y);
                }
            }
            cls.sort_unstable();
            let id = classes.len();
            for &y in &cls {
                class_of.insert(y, id);
            }
            classes.push(cls);
        }
        Ok(classes)
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&z| (0..self.order).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }
}

/// A subgroup materialized as a group in its own right, with translation
/// maps to and from the parent's element indices.
#[derive(Clone, Debug)]
pub struct Subgroup {
    /// Sorted parent indices; position i is the subgroup's element i.
    pub elements: Vec<usize>,
    pub group: Group,
}

impl Subgroup {
    pub fn new(parent: &Group, subset: &[usize]) -> Result<Subgroup, GroupError> {
        if !parent.is_subgroup(subset) {
            return Err(GroupError::NotASubgroup);
        }
        let mut elements: Vec<usize> = subset.to_vec();
        elements.sort_unstable();
        elements.dedup();
        if elements[0] != 0 {
            return Err(GroupError::NotASubgroup);
        }
        let pos: BTreeMap<usize, usize> =
            elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let n = elements.len();
        let mut mult = vec![0usize; n * n];
        for i in 0..n {
            for j in 0..n {
                mult[i * n + j] = pos[&parent.mul(elements[i], elements[j])];
            }
        }
        let mut inv = vec![0usize; n];
        for i in 0..n {
            inv[i] = pos[&parent.inverse(elements[i])];
        }
        Ok(Subgroup {
            elements,
            group: Group {
                order: n,
                mult,
                inv,
            },
        })
    }

    pub fn index_of(&self, parent_elem: usize) -> Option<usize> {
        self.elements.binary_search(&parent_elem).ok()
    }

    pub fn contains(&self, parent_elem: usize) -> bool {
        self.index_of(parent_elem).is_some()
    }
}

/// A finite magnetic group: a group with a surjective grading onto Z/2.
#[derive(Clone, Debug)]
pub struct MagneticGroup {
    pub group: Group,
    /// phi[g] in {0, 1}; 1 marks the antiunitary elements.
    pub phi: Vec<u8>,
    /// Canonically the smallest-index antiunitary element.
    pub a0: usize,
    pub labels: Option<Vec<String>>,
}

/// Validates the table, the grading and selects a0.
pub fn build_group(table: Vec<Vec<usize>>, phi_values: Vec<u8>) -> Result<MagneticGroup, GroupError> {
    let group = Group::from_table(table)?;
    if phi_values.len() != group.order {
        return Err(GroupError::PhiNotHomomorphism);
    }
    if phi_values.iter().any(|&v| v > 1) {
        return Err(GroupError::PhiNotHomomorphism);
    }
    for a in 0..group.order {
        for b in 0..group.order {
            if phi_values[group.mul(a, b)] != phi_values[a] ^ phi_values[b] {
                return Err(GroupError::PhiNotHomomorphism);
            }
        }
    }
    let a0 = match phi_values.iter().position(|&v| v == 1) {
        Some(a0) => a0,
        None => return Err(GroupError::PhiNotSurjective),
    };
    Ok(MagneticGroup {
        group,
        phi: phi_values,
        a0,
        labels: None,
    })
}

impl MagneticGroup {
    pub fn order(&self) -> usize {
        self.group.order
    }

    /// Kernel of phi, the unitarily acting subgroup.
    pub fn core_elements(&self) -> Vec<usize> {
        (0..self.group.order).filter(|&g| self.phi[g] == 0).collect()
    }

    pub fn core_subgroup(&self) -> Subgroup {
        Subgroup::new(&self.group, &self.core_elements()).expect("core is a subgroup")
    }

    pub fn antiunitary_elements(&self) -> Vec<usize> {
        (0..self.group.order).filter(|&g| self.phi[g] == 1).collect()
    }

    pub fn is_magnetic_subset(&self, subset: &[usize]) -> bool {
        subset.iter().any(|&g| self.phi[g] == 1)
    }
}

/// A central extension 1 -> A -> total -> base -> 1 with A elementary
/// abelian of exponent at most 2, compatible with the gradings.
#[derive(Clone, Debug)]
pub struct CentralExtension {
    pub total: Group,
    /// Grading of the total group; all zero when the extension is unitary.
    pub total_phi: Vec<u8>,
    pub base: Group,
    pub base_phi: Vec<u8>,
    /// projection[t] = image of total element t in the base.
    pub projection: Vec<usize>,
    /// Sorted preimage of the base identity.
    pub kernel: Vec<usize>,
}

impl CentralExtension {
    pub fn new(
        total: Group,
        total_phi: Vec<u8>,
        base: Group,
        base_phi: Vec<u8>,
        projection: Vec<usize>,
    ) -> Result<CentralExtension, GroupError> {
        if projection.len() != total.order {
            return Err(GroupError::BadExtension("projection length mismatch".into()));
        }
        if total_phi.len() != total.order || base_phi.len() != base.order {
            return Err(GroupError::BadExtension("phi length mismatch".into()));
        }
        for t in 0..total.order {
            if projection[t] >= base.order {
                return Err(GroupError::BadExtension("projection out of range".into()));
            }
            if total_phi[t] != base_phi[projection[t]] {
                return Err(GroupError::BadExtension(
                    "gradings incompatible with projection".into(),
                ));
            }
        }
        for a in 0..total.order {
            for b in 0..total.order {
                if projection[total.mul(a, b)] != base.mul(projection[a], projection[b]) {
                    return Err(GroupError::BadExtension("projection not a homomorphism".into()));
                }
            }
        }
        let mut hit = vec![false; base.order];
        for &p in &projection {
            hit[p] = true;
        }
        if hit.iter().any(|&h| !h) {
            return Err(GroupError::BadExtension("projection not surjective".into()));
        }
        let kernel: Vec<usize> = (0..total.order).filter(|&t| projection[t] == 0).collect();
        let center = total.center();
        for &k in &kernel {
            if !center.contains(&k) {
                return Err(GroupError::BadExtension("kernel is not central".into()));
            }
            if total.mul(k, k) != 0 {
                return Err(GroupError::BadExtension(
                    "kernel has an element of order > 2".into(),
                ));
            }
        }
        Ok(CentralExtension {
            total,
            total_phi,
            base,
            base_phi,
            projection,
            kernel,
        })
    }

    pub fn is_magnetic(&self) -> bool {
        self.total_phi.iter().any(|&v| v == 1)
    }

    /// Sorted preimage of a subset of the base.
    pub fn preimage(&self, base_subset: &[usize]) -> Vec<usize> {
        (0..self.total.order)
            .filter(|&t| base_subset.contains(&self.projection[t]))
            .collect()
    }
}

/// The pullback of Z/4 -> Z/2 along phi: the degree-shift extension
/// G^ = {(g, m) : phi(g) = m mod 2} with kernel of order 2.
pub fn pullback_extension(mg: &MagneticGroup) -> CentralExtension {
    let n = mg.group.order;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for g in 0..n {
        for m in 0..4usize {
            if (m % 2) as u8 == mg.phi[g] {
                pairs.push((g, m));
            }
        }
    }
    // (0, 0) comes first, so the identity is element 0.
    let pos: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let order = pairs.len();
    let mut mult = vec![0usize; order * order];
    for (i, &(g1, m1)) in pairs.iter().enumerate() {
        for (j, &(g2, m2)) in pairs.iter().enumerate() {
            mult[i * order + j] = pos[&(mg.group.mul(g1, g2), (m1 + m2) % 4)];
        }
    }
    let mut inv = vec![0usize; order];
    for (i, &(g, m)) in pairs.iter().enumerate() {
        inv[i] = pos[&(mg.group.inverse(g), (4 - m) % 4)];
    }
    let total = Group { order, mult, inv };
    let total_phi: Vec<u8> = pairs.iter().map(|&(_, m)| (m % 2) as u8).collect();
    let projection: Vec<usize> = pairs.iter().map(|&(g, _)| g).collect();
    CentralExtension::new(total, total_phi, mg.group.clone(), mg.phi.clone(), projection)
        .expect("pullback construction is always a valid extension")
}

/// Searches for a homomorphic section of a kernel-order-2 extension by
/// enumerating lifts of a generating set, pruned by extension consistency.
/// Returns the section as base element -> total element when one exists.
pub fn extension_splits(ext: &CentralExtension) -> Option<Vec<usize>> {
    assert_eq!(ext.kernel.len(), 2, "splitting test expects a kernel of order 2");
    let base = &ext.base;
    let gens = base.generating_set();
    // Preimages of each generator.
    let lifts: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            (0..ext.total.order)
                .filter(|&t| ext.projection[t] == g)
                .collect()
        })
        .collect();
    let k = gens.len();
    let mut choice = vec![0usize; k];
    loop {
        if let Some(section) = try_section(ext, &gens, &lifts, &choice) {
            return Some(section);
        }
        // next choice vector
        let mut i = 0;
        loop {
            if i == k {
                return None;
            }
            choice[i] += 1;
            if choice[i] < lifts[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn try_section(
    ext: &CentralExtension,
    gens: &[usize],
    lifts: &[Vec<usize>],
    choice: &[usize],
) -> Option<Vec<usize>> {
    let base = &ext.base;
    let total = &ext.total;
    let mut section = vec![usize::MAX; base.order];
    section[0] = 0;
    let mut frontier = vec![0usize];
    while let Some(b) = frontier.pop() {
        for (i, &g) in gens.iter().enumerate() {
            let lift = lifts[i][choice[i]];
            let nb = base.mul(b, g);
            let nt = total.mul(section[b], lift);
            if section[nb] == usize::MAX {
                section[nb] = nt;
                frontier.push(nb);
            } else if section[nb] != nt {
                return None;
            }
        }
    }
    // the closure reached everything (gens generate), now verify fully
    for a in 0..base.order {
        for b in 0..base.order {
            if total.mul(section[a], section[b]) != section[base.mul(a, b)] {
                return None;
            }
        }
    }
    for (b, &t) in section.iter().enumerate() {
        if ext.projection[t] != b {
            return None;
        }
    }
    Some(section)
}

/// A character of the extension kernel with values in {+1, -1}.
#[derive(Clone, Debug)]
pub struct KernelCharacter {
    /// Aligned with the sorted kernel element list.
    pub values: Vec<i8>,
}

impl KernelCharacter {
    pub fn new(ext: &CentralExtension, values: Vec<i8>) -> Result<KernelCharacter, GroupError> {
        if values.len() != ext.kernel.len() {
            return Err(GroupError::BadKernelCharacter);
        }
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(GroupError::BadKernelCharacter);
        }
        let pos = |k: usize| ext.kernel.iter().position(|&x| x == k).unwrap();
        for (i, &k1) in ext.kernel.iter().enumerate() {
            for (j, &k2) in ext.kernel.iter().enumerate() {
                let prod = ext.total.mul(k1, k2);
                if values[pos(prod)] != values[i] * values[j] {
                    return Err(GroupError::BadKernelCharacter);
                }
            }
        }
        Ok(KernelCharacter { values })
    }

    pub fn sign(&self, ext: &CentralExtension, kernel_elem: usize) -> i8 {
        let i = ext
            .kernel
            .iter()
            .position(|&x| x == kernel_elem)
            .expect("element not in kernel");
        self.values[i]
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 1)
    }
}

/// A twist for K-theory computations: a central extension together with a
/// sign character of the kernel.
#[derive(Clone, Debug)]
pub struct Twist {
    pub ext: CentralExtension,
    pub character: KernelCharacter,
}
