//! Complex character tables of small finite groups with exact cyclotomic
//! values. Abelian groups go through dual-group enumeration; nonabelian
//! groups use the Burnside class-algebra method evaluated in a prime field
//! (Dixon) with the exact lift back to Q(zeta_m).

use std::cmp::Ordering;

use num::bigint::BigInt;
use num::rational::BigRational;
use thiserror::Error;

use crate::cyclotomic::Cyclotomic;
use crate::group::Group;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharTabError {
    #[error("group order {0} exceeds the configured bound {1}")]
    GroupTooLarge(usize, usize),
}

/// Conjugacy class data of a group.
#[derive(Clone, Debug)]
pub struct Classes {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// class index of the inverses of a class
    pub inverse_class: Vec<usize>,
}

impl Classes {
    pub fn of(g: &Group) -> Classes {
        let all: Vec<usize> = (0..g.order).collect();
        let classes = g.conjugacy_classes(&all).expect("whole group");
        let mut class_of = vec![0usize; g.order];
        for (i, cls) in classes.iter().enumerate() {
            for &x in cls {
                class_of[x] = i;
            }
        }
        let inverse_class = classes
            .iter()
            .map(|cls| class_of[g.inverse(cls[0])])
            .collect();
        Classes {
            classes,
            class_of,
            inverse_class,
        }
    }

    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn rep(&self, i: usize) -> usize {
        self.classes[i][0]
    }

    pub fn size(&self, i: usize) -> usize {
        self.classes[i].len()
    }
}

/// An irreducible complex character with exact values per conjugacy class.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    pub degree: usize,
    pub values: Vec<Cyclotomic>,
}

impl Character {
    pub fn value_at(&self, table: &CharacterTable, element: usize) -> &Cyclotomic {
        &self.values[table.classes.class_of[element]]
    }
}

/// The full character table of a group.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub group: Group,
    pub classes: Classes,
    pub chars: Vec<Character>,
    pub conductor: u64,
}

impl CharacterTable {
    /// Hermitian inner product of two class functions, exact.
    pub fn inner(&self, a: &Character, b: &Character) -> Cyclotomic {
        let mut sum = Cyclotomic::zero(1);
        for i in 0..self.classes.count() {
            let term = a.values[i].mul(&b.values[i].conj());
            let weighted = term.scale(&BigRational::from(BigInt::from(self.classes.size(i) as i64)));
            sum = sum.add(&weighted);
        }
        sum.scale(&BigRational::new(
            BigInt::from(1),
            BigInt::from(self.group.order as i64),
        ))
    }

    /// Multiplicity of irreducible b inside the class function a.
    pub fn multiplicity(&self, a: &[Cyclotomic], b: &Character) -> BigInt {
        let mut sum = Cyclotomic::zero(1);
        for i in 0..self.classes.count() {
            let term = a[i].mul(&b.values[i].conj());
            let weighted = term.scale(&BigRational::from(BigInt::from(self.classes.size(i) as i64)));
            sum = sum.add(&weighted);
        }
        let q = sum.scale(&BigRational::new(
            BigInt::from(1),
            BigInt::from(self.group.order as i64),
        ));
        q.as_integer().expect("multiplicity must be an integer")
    }
}

/// Computes the full irreducible character table; rows are sorted by degree
/// and then by value vectors for a deterministic, stable order.
pub fn character_table(g: &Group, max_order: usize) -> Result<CharacterTable, CharTabError> {
    if g.order > max_order {
        return Err(CharTabError::GroupTooLarge(g.order, max_order));
    }
    let classes = Classes::of(g);
    let mut chars = if g.is_abelian() {
        abelian_characters(g)
    } else {
        dixon_characters(g, &classes)
    };
    // deterministic order: by degree ascending, then value vector descending
    // (the trivial character sorts first among the linear ones).
    chars.sort_by(|a, b| match a.degree.cmp(&b.degree) {
        Ordering::Equal => {
            for (x, y) in a.values.iter().zip(b.values.iter()) {
                match y.cmp_canonical(x) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        }
        ord => ord,
    });
    let conductor = g.exponent() as u64;
    let table = CharacterTable {
        group: g.clone(),
        classes,
        chars,
        conductor,
    };
    debug_assert!(table_is_consistent(&table));
    Ok(table)
}

fn table_is_consistent(t: &CharacterTable) -> bool {
    let sum: usize = t.chars.iter().map(|c| c.degree * c.degree).sum();
    if sum != t.group.order {
        return false;
    }
    for (i, a) in t.chars.iter().enumerate() {
        for (j, b) in t.chars.iter().enumerate() {
            let p = t.inner(a, b);
            let expect = if i == j { 1 } else { 0 };
            if p != Cyclotomic::from_integer(expect) {
                return false;
            }
        }
    }
    true
}

/// Characters of an abelian group by extending along a generating chain.
fn abelian_characters(g: &Group) -> Vec<Character> {
    let m = g.exponent() as u64;
    // exps[x] = k means chi(x) = zeta_m^k; built per character.
    let gens = g.generating_set();
    let mut partials: Vec<Vec<Option<u64>>> = vec![{
        let mut v = vec![None; g.order];
        v[0] = Some(0);
        v
    }];
    let mut generated: Vec<usize> = vec![0];
    for &gen in &gens {
        // minimal r with gen^r in the generated subgroup
        let mut r = 1usize;
        let mut p = gen;
        while !generated.contains(&p) {
            p = g.mul(p, gen);
            r += 1;
        }
        let mut next: Vec<Vec<Option<u64>>> = Vec::new();
        for chi in &partials {
            let known = chi[p].expect("value on generated subgroup");
            // solve r * x = known (mod m); r divides m by Lagrange
            debug_assert_eq!(m % r as u64, 0);
            let step = m / r as u64;
            for t in 0..r as u64 {
                // candidate x with r*x = known mod m
                let x = (known / r as u64 + t * step) % m;
                if (x * r as u64) % m != known % m {
                    continue;
                }
                let mut ext = chi.clone();
                // fill in products old * gen^k
                let mut ok = true;
                let mut frontier: Vec<usize> = (0..g.order).filter(|&e| ext[e].is_some()).collect();
                while let Some(e) = frontier.pop() {
                    let val = ext[e].unwrap();
                    let ne = g.mul(e, gen);
                    let nv = (val + x) % m;
                    match ext[ne] {
                        None => {
                            ext[ne] = Some(nv);
                            frontier.push(ne);
                        }
                        Some(v) => {
                            if v != nv {
                                ok = false;
                                break;
                            }
                        }
                    }
                }
                if ok {
                    next.push(ext);
                }
            }
        }
        partials = next;
        generated = g.generated_by(&gens[0..=gens.iter().position(|&x| x == gen).unwrap()]);
    }
    partials
        .into_iter()
        .filter(|chi| chi.iter().all(|v| v.is_some()))
        .map(|chi| Character {
            degree: 1,
            values: (0..g.order)
                .map(|x| Cyclotomic::root_of_unity(m, chi[x].unwrap()))
                .collect(),
        })
        .collect()
}

// ---- Dixon's modular realization of the Burnside class-algebra method ----

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

struct ModMat {
    n: usize,
    a: Vec<u64>,
}

impl ModMat {
    fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.n + j]
    }
}

/// Kernel basis of (m - lambda I) over F_p, vectors as rows.
fn eigenspace(m: &ModMat, lambda: u64, p: u64) -> Vec<Vec<u64>> {
    let n = m.n;
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = m.get(i, j) % p;
                    if i == j {
                        (v + p - lambda % p) % p
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    // row echelon
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let mut sel = None;
        for r in row..n {
            if a[r][col] != 0 {
                sel = Some(r);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        a.swap(row, sel);
        let inv = inv_mod(a[row][col], p);
        for c in 0..n {
            a[row][c] = a[row][c] * inv % p;
        }
        for r in 0..n {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..n {
                    a[r][c] = (a[r][c] + p - f * a[row][c] % p) % p;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = (p - a[r][free] % p) % p;
        }
        basis.push(v);
    }
    basis
}

fn mat_apply(m: &ModMat, v: &[u64], p: u64) -> Vec<u64> {
    (0..m.n)
        .map(|i| {
            let mut s = 0u64;
            for j in 0..m.n {
                s = (s + m.get(i, j) * v[j]) % p;
            }
            s
        })
        .collect()
}

fn dixon_characters(g: &Group, classes: &Classes) -> Vec<Character> {
    let r = classes.count();
    let m = g.exponent() as u64;
    // p = 1 mod m, p > 2|G| so degrees and multiplicities lift uniquely.
    let mut p = m + 1;
    while !(is_prime(p) && p > 2 * g.order as u64) {
        p += m;
    }
    // z of multiplicative order m in F_p, from a generator of F_p^*
    let z = {
        let mut gen = 2u64;
        loop {
            let mut x = gen % p;
            let mut order = 1u64;
            while x != 1 {
                x = x * gen % p;
                order += 1;
            }
            if order == p - 1 {
                break pow_mod(gen, (p - 1) / m, p);
            }
            gen += 1;
        }
    };

    // structure constants a_ijk: number of (x, y) in C_i x C_j with xy = rep_k
    let mut mats: Vec<ModMat> = Vec::new();
    for i in 0..r {
        let mut a = vec![0u64; r * r];
        for j in 0..r {
            for &x in &classes.classes[i] {
                for &y in &classes.classes[j] {
                    let kcls = classes.class_of[g.mul(x, y)];
                    // count products landing on the representative only
                    if g.mul(x, y) == classes.rep(kcls) {
                        a[j * r + kcls] += 1;
                    }
                }
            }
        }
        // (M_i)_{jk} = a_{ijk}; we stored per (j, k)
        mats.push(ModMat { n: r, a });
    }
    // NB: (M_i w)_j = sum_k a_{ijk} w_k requires М_i[(j,k)] = a_{ijk}: rows j.

    // split the common eigenspaces
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..r)
        .map(|i| {
            let mut v = vec![0u64; r];
            v[i] = 1;
            v
        })
        .collect()];
    for mi in &mats {
        let mut next: Vec<Vec<Vec<u64>>> = Vec::new();
        for space in &spaces {
            if space.len() == 1 {
                next.push(space.clone());
                continue;
            }
            // restrict mi to the subspace: express mi * basis in the basis
            let dim = space.len();
            let images: Vec<Vec<u64>> = space.iter().map(|v| mat_apply(mi, v, p)).collect();
            let coords = express_in_basis(&images, space, p);
            let Some(coords) = coords else {
                next.push(space.clone());
                continue;
            };
            // mi(basis_k) = sum_j coords[k][j] basis_j, so the matrix acting
            // on coefficient vectors has entry (j, k) = coords[k][j].
            let mut sub_a = vec![0u64; dim * dim];
            for k in 0..dim {
                for j in 0..dim {
                    sub_a[j * dim + k] = coords[k][j];
                }
            }
            let sub = ModMat { n: dim, a: sub_a };
            let mut found: Vec<Vec<Vec<u64>>> = Vec::new();
            let mut used_dim = 0;
            for lambda in 0..p {
                if used_dim == dim {
                    break;
                }
                let basis = eigenspace(&sub, lambda, p);
                if basis.is_empty() {
                    continue;
                }
                used_dim += basis.len();
                let lifted: Vec<Vec<u64>> = basis
                    .iter()
                    .map(|coef| {
                        let mut v = vec![0u64; r];
                        for (ci, c) in coef.iter().enumerate() {
                            for (vi, x) in space[ci].iter().enumerate() {
                                v[vi] = (v[vi] + c * x) % p;
                            }
                        }
                        v
                    })
                    .collect();
                found.push(lifted);
            }
            next.extend(found);
        }
        spaces = next;
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
    }
    assert!(
        spaces.iter().all(|s| s.len() == 1) && spaces.len() == r,
        "class algebra failed to split (internal error)"
    );

    // each 1-dim space yields the eigenvalue vector omega_i
    let mut chars = Vec::new();
    for space in &spaces {
        let v = &space[0];
        let omegas: Vec<u64> = mats
            .iter()
            .map(|mi| {
                let image = mat_apply(mi, v, p);
                // omega = image[j] / v[j] at a nonzero coordinate
                let j = v.iter().position(|&x| x != 0).unwrap();
                image[j] * inv_mod(v[j], p) % p
            })
            .collect();
        // degree from the orthogonality relation
        let mut s = 0u64;
        for i in 0..r {
            let ii = classes.inverse_class[i];
            let hi = classes.size(i) as u64;
            s = (s + omegas[i] * omegas[ii] % p * inv_mod(hi % p, p)) % p;
        }
        let d2 = g.order as u64 * inv_mod(s, p) % p;
        let d = (1..=g.order as u64)
            .find(|d| d * d % p == d2 && d * d <= g.order as u64)
            .expect("degree must exist");
        // theta(chi(rep_i)) = d * omega_i / h_i
        let theta: Vec<u64> = (0..r)
            .map(|i| d * omegas[i] % p * inv_mod(classes.size(i) as u64 % p, p) % p)
            .collect();
        // exact lift: chi(rep) = sum_j mu_j zeta_m^j with
        // mu_j = (1/m) sum_s theta(chi(rep^s)) z^{-js}.
        let minv = inv_mod(m % p, p);
        let zinv = inv_mod(z, p);
        let values: Vec<Cyclotomic> = (0..r)
            .map(|i| {
                let rep = classes.rep(i);
                let mut acc = Cyclotomic::zero(1);
                for j in 0..m {
                    let mut sum = 0u64;
                    for s in 0..m {
                        let power = g.power(rep, s as usize);
                        let th = theta[classes.class_of[power]];
                        sum = (sum + th * pow_mod(zinv, j * s % (p - 1), p)) % p;
                    }
                    let mu = sum * minv % p;
                    assert!(mu <= g.order as u64, "multiplicity lift out of range");
                    if mu > 0 {
                        let term = Cyclotomic::root_of_unity(m, j)
                            .scale(&BigRational::from(BigInt::from(mu)));
                        acc = acc.add(&term);
                    }
                }
                acc
            })
            .collect();
        chars.push(Character {
            degree: d as usize,
            values,
        });
    }
    chars
}

/// Solve coords such that images = coords * basis over F_p (basis rows).
fn express_in_basis(images: &[Vec<u64>], basis: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let dim = basis.len();
    let n = basis[0].len();
    // gaussian elimination on basis^T | images^T
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut row: Vec<u64> = (0..dim).map(|j| basis[j][i]).collect();
            row.extend(images.iter().map(|img| img[i]));
            row
        })
        .collect();
    let cols = dim + images.len();
    let mut row = 0;
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..dim {
        let mut sel = None;
        for r in row..n {
            if a[r][col] != 0 {
                sel = Some(r);
                break;
            }
        }
        let Some(sel) = sel else { return None };
        a.swap(row, sel);
        let inv = inv_mod(a[row][col], p);
        for c in 0..cols {
            a[row][c] = a[row][c] * inv % p;
        }
        for r in 0..n {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..cols {
                    a[r][c] = (a[r][c] + p - f * a[row][c] % p) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    // consistency: rows beyond `row` must be zero on the image side
    for r in row..n {
        if a[r][dim..].iter().any(|&x| x != 0) {
            return None;
        }
    }
    let mut coords = vec![vec![0u64; dim]; images.len()];
    for (pr, &pc) in pivots.iter().enumerate() {
        for (k, _) in images.iter().enumerate() {
            coords[k][pc] = a[pr][dim + k];
        }
    }
    Some(coords)
}
