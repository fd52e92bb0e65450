//! Exact linear algebra over the integers: Smith normal form, finitely
//! generated abelian groups by presentation, morphisms, kernels, cokernels
//! and subquotients. Everything runs on arbitrary-precision integers.

use std::fmt;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
#[allow(unused_imports)]
use num::traits::Euclid;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbelianError {
    #[error("morphism incompatible with source relations")]
    IncompatibleMorphism,
    #[error("composition of the two morphisms is nonzero modulo relations")]
    NotAComplex,
}

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let s = self[(i, j)].to_string();
                        s.parse::<i64>().expect("entry exceeds i64 in report")
                    })
                    .collect()
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row a += c * row b
    fn add_row(&mut self, a: usize, b: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(b, j)] * c;
            self[(a, j)] += v;
        }
    }

    /// col a += c * col b
    fn add_col(&mut self, a: usize, b: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, b)] * c;
            self[(i, a)] += v;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self[(a, j)].clone();
            self[(a, j)] = v;
        }
    }

    fn negate_col(&mut self, a: usize) {
        for i in 0..self.rows {
            let v = -self[(i, a)].clone();
            self[(i, a)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Result of a Smith normal form computation: u * m * v = d with u, v
/// unimodular and d diagonal with the divisibility chain d1 | d2 | ...
pub struct Snf {
    pub d: Mat,
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub v_inv: Mat,
}

impl Snf {
    pub fn rank(&self) -> usize {
        let n = self.d.rows.min(self.d.cols);
        (0..n).filter(|&i| !self.d[(i, i)].is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith normal form with the smallest-absolute-value pivot rule, ties
/// broken by row-major position.
pub fn smith_normal_form(m: &Mat) -> Snf {
    let mut d = m.clone();
    let rows = d.rows;
    let cols = d.cols;
    let mut u = Mat::identity(rows);
    let mut u_inv = Mat::identity(rows);
    let mut v = Mat::identity(cols);
    let mut v_inv = Mat::identity(cols);

    // Elementary ops, mirrored into the transforms. Row ops act on u (and
    // inversely on u_inv columns); col ops act on v (inversely on v_inv rows).
    macro_rules! row_swap {
        ($a:expr, $b:expr) => {{
            d.swap_rows($a, $b);
            u.swap_rows($a, $b);
            u_inv.swap_cols($a, $b);
        }};
    }
    macro_rules! col_swap {
        ($a:expr, $b:expr) => {{
            d.swap_cols($a, $b);
            v.swap_cols($a, $b);
            v_inv.swap_rows($a, $b);
        }};
    }
    macro_rules! row_add {
        ($a:expr, $b:expr, $c:expr) => {{
            let c: BigInt = $c;
            d.add_row($a, $b, &c);
            u.add_row($a, $b, &c);
            u_inv.add_col($b, $a, &(-c));
        }};
    }
    macro_rules! col_add {
        ($a:expr, $b:expr, $c:expr) => {{
            let c: BigInt = $c;
            d.add_col($a, $b, &c);
            v.add_col($a, $b, &c);
            v_inv.add_row($b, $a, &(-c));
        }};
    }

    let n = rows.min(cols);
    let mut t = 0;
    while t < n {
        // Find the smallest-absolute-value nonzero pivot in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[(i, j)].is_zero() {
                    continue;
                }
                match &pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        let (pi, pj) = (*pi, *pj);
                        if d[(i, j)].abs() < d[(pi, pj)].abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        row_swap!(t, pi);
        col_swap!(t, pj);

        // Clear column t with row operations, then row t with column
        // operations; a column swap can re-dirty the column, so alternate
        // until both are clean. Each pivot change strictly shrinks it.
        loop {
            loop {
                let Some(i) = ((t + 1)..rows).find(|&i| !d[(i, t)].is_zero()) else {
                    break;
                };
                if d[(i, t)].abs() < d[(t, t)].abs() {
                    row_swap!(t, i);
                    continue;
                }
                let q = div_round(&d[(i, t)], &d[(t, t)]);
                row_add!(i, t, -q);
            }
            loop {
                let Some(j) = ((t + 1)..cols).find(|&j| !d[(t, j)].is_zero()) else {
                    break;
                };
                if d[(t, j)].abs() < d[(t, t)].abs() {
                    col_swap!(t, j);
                    continue;
                }
                let q = div_round(&d[(t, j)], &d[(t, t)]);
                col_add!(j, t, -q);
            }
            let col_clean = ((t + 1)..rows).all(|i| d[(i, t)].is_zero());
            let row_clean = ((t + 1)..cols).all(|j| d[(t, j)].is_zero());
            if col_clean && row_clean {
                break;
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }
    let rank = t;

    // Enforce the divisibility chain on the diagonal with explicit 2x2
    // Bezout transforms: diag(a, b) -> diag(gcd, lcm) via
    // P = [[x, y], [-b/g, a/g]], Q = [[1, -y b/g], [1, x a/g]]
    // where g = x a + y b. Bubble until the chain holds.
    loop {
        let mut fixed = true;
        for i in 0..rank.saturating_sub(1) {
            let a = d[(i, i)].clone();
            let b = d[(i + 1, i + 1)].clone();
            if (&b % &a).is_zero() {
                continue;
            }
            fixed = false;
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (ag, bg) = (&a / &g, &b / &g);
            let j = i + 1;
            // rows i, j of d and u: left-multiply by P
            let apply_rows = |m: &mut Mat| {
                for c in 0..m.cols {
                    let top = &x * &m[(i, c)] + &y * &m[(j, c)];
                    let bot = -&bg * &m[(i, c)] + &ag * &m[(j, c)];
                    m[(i, c)] = top;
                    m[(j, c)] = bot;
                }
            };
            apply_rows(&mut d);
            apply_rows(&mut u);
            // u_inv gets P^-1 = [[a/g, -y], [b/g, x]] on columns i, j
            for r in 0..u_inv.rows {
                let left = &ag * &u_inv[(r, i)] + &bg * &u_inv[(r, j)];
                let right = -&y * &u_inv[(r, i)] + &x * &u_inv[(r, j)];
                u_inv[(r, i)] = left;
                u_inv[(r, j)] = right;
            }
            // cols i, j of d and v: right-multiply by Q = [[1, -y bg], [1, x ag]]
            let ybg = &y * &bg;
            let xag = &x * &ag;
            let apply_cols = |m: &mut Mat| {
                for r in 0..m.rows {
                    let left = &m[(r, i)] + &m[(r, j)];
                    let right = -&ybg * &m[(r, i)] + &xag * &m[(r, j)];
                    m[(r, i)] = left;
                    m[(r, j)] = right;
                }
            };
            apply_cols(&mut d);
            apply_cols(&mut v);
            // v_inv gets Q^-1 = [[x ag, y bg], [-1, 1]] on rows i, j
            for c in 0..v_inv.cols {
                let top = &xag * &v_inv[(i, c)] + &ybg * &v_inv[(j, c)];
                let bot = -&v_inv[(i, c)] + &v_inv[(j, c)];
                v_inv[(i, c)] = top;
                v_inv[(j, c)] = bot;
            }
            debug_assert_eq!(d[(i, i)], g);
            debug_assert!(d[(i, j)].is_zero() && d[(j, i)].is_zero());
        }
        if fixed {
            break;
        }
    }

    Snf {
        d,
        u,
        u_inv,
        v,
        v_inv,
    }
}

/// Rounded division used to shrink entries toward zero fast.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    // Adjust so the remainder has magnitude at most |b|/2.
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Basis of the integer nullspace of m, as columns.
pub fn nullspace(m: &Mat) -> Mat {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    Mat::from_fn(m.cols, m.cols - r, |i, j| snf.v[(i, r + j)].clone())
}

/// Solve m * x = b over the integers (matrix of right-hand columns).
pub fn solve(m: &Mat, b: &Mat) -> Option<Mat> {
    assert_eq!(m.rows, b.rows);
    let snf = smith_normal_form(m);
    let ub = snf.u.mul(b);
    let r = snf.rank();
    let mut y = Mat::zeros(m.cols, b.cols);
    for j in 0..b.cols {
        for i in 0..m.rows.min(m.cols).min(m.rows) {
            if i < r {
                let di = &snf.d[(i, i)];
                let (q, rem) = ub[(i, j)].div_rem(di);
                if !rem.is_zero() {
                    return None;
                }
                y[(i, j)] = q;
            }
        }
        for i in r..m.rows {
            if !ub[(i, j)].is_zero() {
                return None;
            }
        }
    }
    Some(snf.v.mul(&y))
}

/// A finitely generated abelian group in canonical form: rank plus invariant
/// factors d1 | d2 | ... with each di >= 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FgAbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn zero() -> Self {
        FgAbelianGroup {
            rank: 0,
            torsion: vec![],
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup {
            rank,
            torsion: vec![],
        }
    }

    pub fn torsion_i64(torsion: &[i64]) -> Self {
        FgAbelianGroup {
            rank: 0,
            torsion: torsion.iter().map(|&d| BigInt::from(d)).collect(),
        }
    }

    pub fn with(rank: usize, torsion: &[i64]) -> Self {
        FgAbelianGroup {
            rank,
            torsion: torsion.iter().map(|&d| BigInt::from(d)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        // Canonical form of the sum: merge by prime powers.
        let mut factors: Vec<BigInt> = self.torsion.clone();
        factors.extend(other.torsion.iter().cloned());
        let canon = canonical_torsion(&factors);
        FgAbelianGroup {
            rank: self.rank + other.rank,
            torsion: canon,
        }
    }

    /// Canonical display notation, e.g. "Z^2 + Z/2".
    pub fn notation(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        if self.rank == 1 {
            parts.push("Z".to_string());
        } else if self.rank > 1 {
            parts.push(format!("Z^{}", self.rank));
        }
        for d in &self.torsion {
            parts.push(format!("Z/{}", d));
        }
        parts.join(" + ")
    }
}

/// Rewrites an arbitrary list of cyclic orders into the invariant factor
/// chain d1 | d2 | ...
fn canonical_torsion(factors: &[BigInt]) -> Vec<BigInt> {
    let n = factors.len();
    if n == 0 {
        return vec![];
    }
    let mut m = Mat::zeros(n, n);
    for (i, d) in factors.iter().enumerate() {
        m[(i, i)] = d.clone();
    }
    let snf = smith_normal_form(&m);
    snf.diagonal()
        .into_iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .collect()
}

/// A presented abelian group: Z^gens modulo the column span of `rels`.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub gens: usize,
    pub rels: Mat,
}

impl Presentation {
    pub fn free(gens: usize) -> Self {
        Presentation {
            gens,
            rels: Mat::zeros(gens, 0),
        }
    }

    pub fn from_orders(orders: &[BigInt]) -> Self {
        let n = orders.len();
        let mut rels = Mat::zeros(n, n);
        for (i, d) in orders.iter().enumerate() {
            rels[(i, i)] = d.clone();
        }
        Presentation { gens: n, rels }
    }

    /// Canonical form together with lifts: returns the group, and a matrix
    /// whose column j expresses canonical generator j in the presentation
    /// generators. Generator order matches the notation: free generators
    /// first, then torsion generators in divisibility order.
    pub fn canonical(&self) -> (FgAbelianGroup, Mat) {
        let snf = smith_normal_form(&self.rels);
        let diag = snf.diagonal();
        let mut torsion_idx: Vec<usize> = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if !d.is_zero() && !d.is_one() {
                torsion_idx.push(i);
            }
        }
        let rank_start = diag.iter().filter(|d| !d.is_zero()).count();
        let free_idx: Vec<usize> = (rank_start..self.gens).collect();
        let group = FgAbelianGroup {
            rank: free_idx.len(),
            torsion: torsion_idx.iter().map(|&i| diag[i].clone()).collect(),
        };
        let keep: Vec<usize> = free_idx.into_iter().chain(torsion_idx).collect();
        let lifts = Mat::from_fn(self.gens, keep.len(), |i, j| snf.u_inv[(i, keep[j])].clone());
        (group, lifts)
    }

    /// Presentation of a group already in canonical form, generators ordered
    /// as in `canonical`: free first, then torsion.
    pub fn of_canonical(group: &FgAbelianGroup) -> Self {
        let gens = group.rank + group.torsion.len();
        let mut rels = Mat::zeros(gens, group.torsion.len());
        for (j, d) in group.torsion.iter().enumerate() {
            rels[(group.rank + j, j)] = d.clone();
        }
        Presentation { gens, rels }
    }

    pub fn group(&self) -> FgAbelianGroup {
        self.canonical().0
    }

    /// Does the column vector v lie in the relation lattice?
    pub fn is_relation(&self, v: &Mat) -> bool {
        solve(&self.rels, v).is_some()
    }
}

/// A morphism of presented abelian groups, given by a matrix on generators.
#[derive(Clone, Debug)]
pub struct AbMorphism {
    pub source: Presentation,
    pub target: Presentation,
    pub matrix: Mat,
}

impl AbMorphism {
    pub fn new(source: Presentation, target: Presentation, matrix: Mat) -> Result<Self, AbelianError> {
        if matrix.rows != target.gens || matrix.cols != source.gens {
            return Err(AbelianError::IncompatibleMorphism);
        }
        // Each source relation must map into the target relation lattice.
        let image_rels = matrix.mul(&source.rels);
        if solve(&target.rels, &image_rels).is_none() {
            return Err(AbelianError::IncompatibleMorphism);
        }
        Ok(AbMorphism {
            source,
            target,
            matrix,
        })
    }

    pub fn zero(source: Presentation, target: Presentation) -> Self {
        let matrix = Mat::zeros(target.gens, source.gens);
        AbMorphism {
            source,
            target,
            matrix,
        }
    }

    /// Is this the zero morphism modulo target relations?
    pub fn is_zero_map(&self) -> bool {
        solve(&self.target.rels, &self.matrix).is_some()
    }
}

/// Kernel of a morphism: the subgroup of the source, with an inclusion
/// matrix expressing kernel generators in source generators.
pub struct SubgroupOfSource {
    pub group: FgAbelianGroup,
    pub presentation: Presentation,
    /// source-gens x kernel-gens
    pub inclusion: Mat,
}

pub fn kernel(f: &AbMorphism) -> SubgroupOfSource {
    // x in Z^s with f(x) in the target lattice: x-part of the nullspace of
    // [M | R_t], then saturate by the source relations (they are in the
    // kernel of the quotient map automatically).
    let stacked = f.matrix.hstack(&f.target.rels);
    let ns = nullspace(&stacked);
    let mut incl = Mat::from_fn(f.source.gens, ns.cols, |i, j| ns[(i, j)].clone());
    incl = incl.hstack(&f.source.rels);
    // Relations among the chosen kernel generators: v with incl*v in the
    // source relation lattice.
    let rel_ns = nullspace(&incl.hstack(&f.source.rels));
    let rels = Mat::from_fn(incl.cols, rel_ns.cols, |i, j| rel_ns[(i, j)].clone());
    let pres = Presentation {
        gens: incl.cols,
        rels,
    };
    let (group, _) = pres.canonical();
    SubgroupOfSource {
        group,
        presentation: pres,
        inclusion: incl,
    }
}

/// Cokernel: target modulo image, with the projection expressed on target
/// generators implicitly (the quotient presentation keeps target generators).
pub struct QuotientOfTarget {
    pub group: FgAbelianGroup,
    pub presentation: Presentation,
}

pub fn cokernel(f: &AbMorphism) -> QuotientOfTarget {
    let rels = f.target.rels.hstack(&f.matrix);
    let pres = Presentation {
        gens: f.target.gens,
        rels,
    };
    let (group, _) = pres.canonical();
    QuotientOfTarget {
        group,
        presentation: pres,
    }
}

/// Homology at the middle node of incoming -> B -> outgoing:
/// ker(outgoing) / im(incoming). Returns the canonical group and, for each
/// canonical generator, a lift expressed in B's generators.
#[derive(Debug)]
pub struct Subquotient {
    pub group: FgAbelianGroup,
    /// B-gens x canonical-gens
    pub lifts: Mat,
}

pub fn subquotient(incoming: &AbMorphism, outgoing: &AbMorphism) -> Result<Subquotient, AbelianError> {
    assert_eq!(
        incoming.target.gens, outgoing.source.gens,
        "middle node mismatch"
    );
    // The composite must vanish modulo the final target's relations.
    let comp = outgoing.matrix.mul(&incoming.matrix);
    if solve(&outgoing.target.rels, &comp).is_none() {
        return Err(AbelianError::NotAComplex);
    }
    let ker = kernel(outgoing);
    // Express the incoming image on kernel generators: solve
    // inclusion * X = M_in (mod source relations of the middle).
    let stacked = ker.inclusion.hstack(&incoming.target.rels);
    let sol = solve(&stacked, &incoming.matrix).ok_or(AbelianError::NotAComplex)?;
    let x = Mat::from_fn(ker.inclusion.cols, incoming.matrix.cols, |i, j| {
        sol[(i, j)].clone()
    });
    let rels = ker.presentation.rels.hstack(&x);
    let pres = Presentation {
        gens: ker.presentation.gens,
        rels,
    };
    let (group, lifts_in_ker) = pres.canonical();
    let mut lifts = ker.inclusion.mul(&lifts_in_ker);
    size_reduce_columns(&mut lifts, &incoming.target.rels);
    Ok(Subquotient { group, lifts })
}

/// Greedy size reduction of lift columns modulo a relation lattice, so the
/// reported representative has small support.
fn size_reduce_columns(lifts: &mut Mat, rels: &Mat) {
    for _ in 0..2 {
        for j in 0..lifts.cols {
            for r in 0..rels.cols {
                let mut dot = BigInt::zero();
                let mut norm = BigInt::zero();
                for i in 0..lifts.rows {
                    dot += &lifts[(i, j)] * &rels[(i, r)];
                    norm += &rels[(i, r)] * &rels[(i, r)];
                }
                if norm.is_zero() {
                    continue;
                }
                let q = div_round(&dot, &norm);
                if q.is_zero() {
                    continue;
                }
                for i in 0..lifts.rows {
                    let v = &rels[(i, r)] * &q;
                    lifts[(i, j)] -= v;
                }
            }
        }
    }
}
