//! Irreducible corepresentations of finite magnetic groups: the
//! Schur-Frobenius indicator and its trichotomy, the Wigner construction
//! with explicit matrices, induction and decomposition, twisted
//! representation rings, and Frobenius reciprocity bookkeeping.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{Signed, Zero};
use thiserror::Error;

use crate::chartab::{character_table, CharTabError, Character, CharacterTable};
use crate::cyclotomic::Cyclotomic;
use crate::group::{MagneticGroup, Subgroup, Twist};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorepError {
    #[error(transparent)]
    CharTab(#[from] CharTabError),
    #[error("Schur-Frobenius indicator is not an integer (invalid character input)")]
    NonIntegerIndicator,
    #[error("indicator {0} outside the trichotomy (implementation bug)")]
    IndicatorOutOfRange(i64),
    #[error("the two representations are not isomorphic")]
    NotIsomorphic,
    #[error("intertwiner space has dimension > 1: representation not irreducible")]
    NotIrreducible,
    #[error("explicit matrices unavailable for {0} (supply them for nonabelian cores)")]
    MatricesUnavailable(String),
    #[error("core multiplicities incompatible with a magnetic decomposition at {0}")]
    InconsistentMultiplicities(String),
    #[error("restriction character has a negative multiplicity")]
    InvalidRestriction,
}

/// Real, complex or quaternionic type of a corepresentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchurType {
    Real,
    Complex,
    Quaternionic,
}

impl SchurType {
    pub fn endomorphism_real_dim(self) -> usize {
        match self {
            SchurType::Real => 1,
            SchurType::Complex => 2,
            SchurType::Quaternionic => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchurType::Real => "real",
            SchurType::Complex => "complex",
            SchurType::Quaternionic => "quaternionic",
        }
    }
}

/// Exact matrices of a corepresentation: the antiunitary part of an element
/// g with phi(g) = 1 is mats[g] followed by complex conjugation.
#[derive(Clone, Debug)]
pub struct CorepMatrices {
    pub dim: usize,
    pub mats: Vec<Vec<Vec<Cyclotomic>>>,
    pub phi: Vec<u8>,
}

impl CorepMatrices {
    /// Exact corepresentation law M(gh) = M(g) conj^phi(g)(M(h)).
    pub fn law_holds(&self, mg: &MagneticGroup) -> bool {
        let n = mg.group.order;
        for g in 0..n {
            for h in 0..n {
                let lhs = &self.mats[mg.group.mul(g, h)];
                let mut rhs_h = self.mats[h].clone();
                if mg.phi[g] == 1 {
                    rhs_h = cyc_mat_conj(&rhs_h);
                }
                let rhs = cyc_mat_mul(&self.mats[g], &rhs_h);
                if !cyc_mat_eq(lhs, &rhs) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_numeric(&self) -> Vec<CMat> {
        self.mats
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|e| e.to_complex()).collect())
                    .collect()
            })
            .collect()
    }
}

/// One irreducible corepresentation.
#[derive(Clone, Debug)]
pub struct MagneticIrrep {
    pub name: String,
    pub schur_type: SchurType,
    /// Complex dimension of the corepresentation.
    pub dimension: usize,
    /// Indices into the core character table; one entry for real and
    /// quaternionic types, the conjugate pair (canonical member first) for
    /// complex type.
    pub constituents: Vec<usize>,
    pub indicator: i64,
    pub matrices: Option<CorepMatrices>,
}

/// The classified representation ring of a magnetic group, or, for unitary
/// stabilizers, the plain complex representation ring.
#[derive(Clone, Debug)]
pub struct MagneticRepRing {
    /// False for the complex representation ring of a unitary group.
    pub magnetic: bool,
    pub irreps: Vec<MagneticIrrep>,
    /// (n_R, n_C, n_H)
    pub counts: (usize, usize, usize),
    pub core_table: CharacterTable,
}

impl MagneticRepRing {
    /// Synthetic ring with the given type counts; used to tabulate
    /// coefficient rows for arbitrary (n_R, n_C, n_H).
    pub fn with_counts(n_r: usize, n_c: usize, n_h: usize) -> MagneticRepRing {
        let table = character_table(&crate::catalog::cyclic(1), 4).unwrap();
        let mut irreps = Vec::new();
        let mut mk = |ty: SchurType, k: usize| {
            irreps.push(MagneticIrrep {
                name: format!("R{}", k + 1),
                schur_type: ty,
                dimension: 1,
                constituents: vec![],
                indicator: 0,
                matrices: None,
            });
        };
        let mut k = 0;
        for _ in 0..n_r {
            mk(SchurType::Real, k);
            k += 1;
        }
        for _ in 0..n_c {
            mk(SchurType::Complex, k);
            k += 1;
        }
        for _ in 0..n_h {
            mk(SchurType::Quaternionic, k);
            k += 1;
        }
        MagneticRepRing {
            magnetic: true,
            irreps,
            counts: (n_r, n_c, n_h),
            core_table: table,
        }
    }
}

/// chi'(g) = conj(chi(a0^-1 g a0)), the conjugate character by a0.
pub fn conjugate_character(
    mg: &MagneticGroup,
    core: &Subgroup,
    table: &CharacterTable,
    chi: &Character,
) -> Character {
    conjugate_character_by(mg, core, table, chi, mg.a0)
}

pub fn conjugate_character_by(
    mg: &MagneticGroup,
    core: &Subgroup,
    table: &CharacterTable,
    chi: &Character,
    a0: usize,
) -> Character {
    let values = (0..table.classes.count())
        .map(|i| {
            let rep_parent = core.elements[table.classes.rep(i)];
            let conj_parent = mg
                .group
                .mul(mg.group.mul(mg.group.inverse(a0), rep_parent), a0);
            let idx = core.index_of(conj_parent).expect("core is normal");
            chi.values[table.classes.class_of[idx]].conj()
        })
        .collect();
    Character {
        degree: chi.degree,
        values,
    }
}

/// Sum of chi(g^2) over the antiunitary coset; the exact integer decides
/// the type: +|G0| real, 0 complex, -|G0| quaternionic.
pub fn schur_frobenius(
    mg: &MagneticGroup,
    core: &Subgroup,
    table: &CharacterTable,
    chi: &Character,
) -> Result<BigInt, CorepError> {
    let mut sum = Cyclotomic::zero(1);
    for g in mg.antiunitary_elements() {
        let g2 = mg.group.mul(g, g);
        let idx = core.index_of(g2).expect("squares of antiunitary lie in core");
        sum = sum.add(&chi.values[table.classes.class_of[idx]]);
    }
    sum.as_integer().ok_or(CorepError::NonIntegerIndicator)
}

fn type_from_indicator(indicator: &BigInt, core_order: usize) -> Result<SchurType, CorepError> {
    let n = BigInt::from(core_order as i64);
    if *indicator == n {
        Ok(SchurType::Real)
    } else if indicator.is_zero() {
        Ok(SchurType::Complex)
    } else if *indicator == -n {
        Ok(SchurType::Quaternionic)
    } else {
        Err(CorepError::IndicatorOutOfRange(
            indicator.to_string().parse().unwrap_or(i64::MAX),
        ))
    }
}

/// Classifies every irreducible corepresentation of a magnetic group.
pub fn classify_magnetic_irreps(
    mg: &MagneticGroup,
    max_order: usize,
) -> Result<MagneticRepRing, CorepError> {
    classify_with_a0(mg, mg.a0, max_order)
}

/// Classification with an explicit antiunitary representative; the result
/// is independent of the choice, which the test suite checks.
pub fn classify_with_a0(
    mg: &MagneticGroup,
    a0: usize,
    max_order: usize,
) -> Result<MagneticRepRing, CorepError> {
    assert_eq!(mg.phi[a0], 1, "a0 must be antiunitary");
    let core = mg.core_subgroup();
    let table = character_table(&core.group, max_order)?;
    let n_chars = table.chars.len();
    let mut consumed = vec![false; n_chars];
    let mut irreps: Vec<MagneticIrrep> = Vec::new();
    let mut counts = (0usize, 0usize, 0usize);
    for i in 0..n_chars {
        if consumed[i] {
            continue;
        }
        let chi = &table.chars[i];
        let ind = schur_frobenius(mg, &core, &table, chi)?;
        let ty = type_from_indicator(&ind, core.group.order)?;
        let ind_i64: i64 = ind.to_string().parse().unwrap_or(0);
        match ty {
            SchurType::Real => {
                consumed[i] = true;
                counts.0 += 1;
                irreps.push(MagneticIrrep {
                    name: String::new(),
                    schur_type: ty,
                    dimension: chi.degree,
                    constituents: vec![i],
                    indicator: ind_i64,
                    matrices: None,
                });
            }
            SchurType::Quaternionic => {
                consumed[i] = true;
                counts.2 += 1;
                irreps.push(MagneticIrrep {
                    name: String::new(),
                    schur_type: ty,
                    dimension: 2 * chi.degree,
                    constituents: vec![i],
                    indicator: ind_i64,
                    matrices: None,
                });
            }
            SchurType::Complex => {
                let conj = conjugate_character_by(mg, &core, &table, chi, a0);
                let j = table
                    .chars
                    .iter()
                    .position(|c| *c == conj)
                    .expect("conjugate of an irreducible is irreducible");
                assert_ne!(i, j, "complex type means the pair is non-isomorphic");
                consumed[i] = true;
                consumed[j] = true;
                counts.1 += 1;
                irreps.push(MagneticIrrep {
                    name: String::new(),
                    schur_type: ty,
                    dimension: 2 * chi.degree,
                    constituents: vec![i.min(j), i.max(j)],
                    indicator: ind_i64,
                    matrices: None,
                });
            }
        }
    }
    for (k, irrep) in irreps.iter_mut().enumerate() {
        irrep.name = format!("R{}", k + 1);
        if table.chars[irrep.constituents[0]].degree == 1 {
            irrep.matrices = wigner_matrices_linear(mg, &core, &table, irrep, a0);
        }
    }
    Ok(MagneticRepRing {
        magnetic: true,
        irreps,
        counts,
        core_table: table,
    })
}

/// The Wigner construction for irreps whose core constituents are
/// one-dimensional; everything stays exact in the cyclotomic field.
fn wigner_matrices_linear(
    mg: &MagneticGroup,
    core: &Subgroup,
    table: &CharacterTable,
    irrep: &MagneticIrrep,
    a0: usize,
) -> Option<CorepMatrices> {
    let chi = &table.chars[irrep.constituents[0]];
    if chi.degree != 1 {
        return None;
    }
    let n = mg.group.order;
    let chi_at = |parent: usize| -> Cyclotomic {
        let idx = core.index_of(parent).expect("core element");
        chi.values[table.classes.class_of[idx]].clone()
    };
    let chi_conj_at = |parent: usize| -> Cyclotomic {
        // conjugate representation chi'(g) = conj(chi(a0^-1 g a0))
        let c = mg.group.mul(mg.group.mul(mg.group.inverse(a0), parent), a0);
        chi_at(c).conj()
    };
    let a0_inv = mg.group.inverse(a0);
    let a0_sq = mg.group.mul(a0, a0);
    let zero = Cyclotomic::zero(1);
    let mats: Vec<Vec<Vec<Cyclotomic>>> = match irrep.schur_type {
        SchurType::Real => {
            // T = 1 requires chi(a0^2) = 1 in the scalar case.
            debug_assert!(chi_at(a0_sq) == Cyclotomic::from_integer(1));
            (0..n)
                .map(|g| {
                    if mg.phi[g] == 0 {
                        vec![vec![chi_at(g)]]
                    } else {
                        vec![vec![chi_at(mg.group.mul(g, a0_inv))]]
                    }
                })
                .collect()
        }
        SchurType::Quaternionic => {
            debug_assert!(chi_at(a0_sq) == Cyclotomic::from_integer(-1));
            (0..n)
                .map(|g| {
                    if mg.phi[g] == 0 {
                        let v = chi_at(g);
                        vec![vec![v.clone(), zero.clone()], vec![zero.clone(), v]]
                    } else {
                        let v = chi_at(mg.group.mul(g, a0_inv));
                        vec![vec![zero.clone(), v.clone()], vec![v.neg(), zero.clone()]]
                    }
                })
                .collect()
        }
        SchurType::Complex => (0..n)
            .map(|g| {
                if mg.phi[g] == 0 {
                    vec![
                        vec![chi_at(g), zero.clone()],
                        vec![zero.clone(), chi_conj_at(g)],
                    ]
                } else {
                    vec![
                        vec![zero.clone(), chi_at(mg.group.mul(g, a0))],
                        vec![chi_conj_at(mg.group.mul(g, a0_inv)), zero.clone()],
                    ]
                }
            })
            .collect(),
    };
    let mats = phase_normalize(mats, mg, a0);
    let cm = CorepMatrices {
        dim: mats[0].len(),
        mats,
        phi: mg.phi.clone(),
    };
    debug_assert!(cm.law_holds(mg));
    Some(cm)
}

/// Rescales every antiunitary matrix by a unit scalar so the first nonzero
/// entry in the first row of M(a0) is real positive. The isomorphism class
/// is unaffected.
fn phase_normalize(
    mut mats: Vec<Vec<Vec<Cyclotomic>>>,
    mg: &MagneticGroup,
    a0: usize,
) -> Vec<Vec<Vec<Cyclotomic>>> {
    let first = mats[a0][0].iter().find(|e| !e.is_zero()).cloned();
    let Some(u) = first else { return mats };
    let n = u.conductor().max(1);
    let mut inverse_phase: Option<Cyclotomic> = None;
    for k in 0..n {
        let z = Cyclotomic::root_of_unity(n, k);
        let prod = u.mul(&z);
        if let Some(q) = prod.is_rational() {
            if q.is_positive() {
                inverse_phase = Some(z);
                break;
            }
        }
    }
    let Some(z) = inverse_phase else { return mats };
    for g in 0..mats.len() {
        if mg.phi[g] == 1 {
            for row in mats[g].iter_mut() {
                for e in row.iter_mut() {
                    *e = e.mul(&z);
                }
            }
        }
    }
    mats
}

// ------------------------- numeric matrix helpers -------------------------

pub type CMat = Vec<Vec<Complex64>>;

pub fn cmat_mul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn cmat_conj(a: &CMat) -> CMat {
    a.iter()
        .map(|row| row.iter().map(|e| e.conj()).collect())
        .collect()
}

pub fn cmat_sub_norm(a: &CMat, b: &CMat) -> f64 {
    let mut s = 0.0f64;
    for (ra, rb) in a.iter().zip(b.iter()) {
        for (x, y) in ra.iter().zip(rb.iter()) {
            s = s.max((x - y).norm());
        }
    }
    s
}

fn cyc_mat_mul(a: &[Vec<Cyclotomic>], b: &[Vec<Cyclotomic>]) -> Vec<Vec<Cyclotomic>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Cyclotomic::zero(1);
                    for t in 0..k {
                        s = s.add(&a[i][t].mul(&b[t][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn cyc_mat_conj(a: &[Vec<Cyclotomic>]) -> Vec<Vec<Cyclotomic>> {
    a.iter()
        .map(|row| row.iter().map(|e| e.conj()).collect())
        .collect()
}

fn cyc_mat_eq(a: &[Vec<Cyclotomic>], b: &[Vec<Cyclotomic>]) -> bool {
    a.iter()
        .zip(b.iter())
        .all(|(ra, rb)| ra.iter().zip(rb.iter()).all(|(x, y)| x == y))
}

const TOL: f64 = 1e-9;

/// Complex nullspace via Gaussian elimination with partial pivoting.
fn complex_nullspace(rows: Vec<Vec<Complex64>>, cols: usize) -> Vec<Vec<Complex64>> {
    let mut a = rows;
    let m = a.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let mut best = None;
        let mut best_norm = TOL;
        for r in rank..m {
            let nr = a[r][col].norm();
            if nr > best_norm {
                best_norm = nr;
                best = Some(r);
            }
        }
        let Some(sel) = best else { continue };
        a.swap(rank, sel);
        let inv = Complex64::new(1.0, 0.0) / a[rank][col];
        for c in 0..cols {
            a[rank][c] *= inv;
        }
        for r in 0..m {
            if r != rank {
                let f = a[r][col];
                if f.norm() > 0.0 {
                    for c in 0..cols {
                        let v = a[rank][c];
                        a[r][c] -= f * v;
                    }
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); cols];
        v[free] = Complex64::new(1.0, 0.0);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free];
        }
        basis.push(v);
    }
    basis
}

/// Solves T rho'(g) = rho(g) T for all core elements, rescaled so that
/// T conj(T) = sign * rho(a0^2). Errors when the solution space is trivial
/// (not isomorphic) or has dimension above one (not irreducible).
pub fn find_intertwiner(
    rho: &[CMat],
    rho_prime: &[CMat],
    mg: &MagneticGroup,
    core: &Subgroup,
) -> Result<(CMat, i8), CorepError> {
    let d = rho[0].len();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for idx in 0..core.group.order {
        // (T rho'(g) - rho(g) T)_{ij} = 0, unknowns T_{kl} flattened k*d + l
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![Complex64::new(0.0, 0.0); d * d];
                for l in 0..d {
                    row[i * d + l] += rho_prime[idx][l][j];
                }
                for k in 0..d {
                    row[k * d + j] -= rho[idx][i][k];
                }
                rows.push(row);
            }
        }
    }
    let basis = complex_nullspace(rows, d * d);
    if basis.is_empty() {
        return Err(CorepError::NotIsomorphic);
    }
    if basis.len() > 1 {
        return Err(CorepError::NotIrreducible);
    }
    let mut t: CMat = (0..d)
        .map(|i| (0..d).map(|j| basis[0][i * d + j]).collect())
        .collect();
    // c from T conj(T) = c * rho(a0^2)
    let a0_sq = mg.group.mul(mg.a0, mg.a0);
    let a0_sq_idx = core.index_of(a0_sq).expect("a0^2 lies in the core");
    let rho_a0sq = &rho[a0_sq_idx];
    let ttbar = cmat_mul(&t, &cmat_conj(&t));
    let mut c = Complex64::new(0.0, 0.0);
    let mut best = 0.0;
    for i in 0..d {
        for j in 0..d {
            if rho_a0sq[i][j].norm() > best {
                best = rho_a0sq[i][j].norm();
                c = ttbar[i][j] / rho_a0sq[i][j];
            }
        }
    }
    if c.norm() < TOL || c.im.abs() > TOL * c.norm() {
        return Err(CorepError::NotIsomorphic);
    }
    let scale = 1.0 / c.norm().sqrt();
    for row in t.iter_mut() {
        for e in row.iter_mut() {
            *e *= scale;
        }
    }
    let sign: i8 = if c.re > 0.0 { 1 } else { -1 };
    // residual check
    let ttbar = cmat_mul(&t, &cmat_conj(&t));
    let target: CMat = rho_a0sq
        .iter()
        .map(|row| row.iter().map(|e| e * (sign as f64)).collect())
        .collect();
    if cmat_sub_norm(&ttbar, &target) > 1e-6 {
        return Err(CorepError::NotIsomorphic);
    }
    // deterministic phase: first nonzero entry real positive
    'outer: for i in 0..d {
        for j in 0..d {
            if t[i][j].norm() > TOL {
                let phase = t[i][j] / t[i][j].norm();
                let inv = phase.conj();
                for row in t.iter_mut() {
                    for e in row.iter_mut() {
                        *e *= inv;
                    }
                }
                break 'outer;
            }
        }
    }
    Ok((t, sign))
}

/// Wigner's construction for a single core irreducible: the explicit
/// corepresentation when the constituent is one-dimensional (exact), or an
/// error asking for supplied matrices otherwise.
pub fn wigner_construct(
    _mg: &MagneticGroup,
    ring: &MagneticRepRing,
    irrep_index: usize,
) -> Result<CorepMatrices, CorepError> {
    let irrep = &ring.irreps[irrep_index];
    match &irrep.matrices {
        Some(m) => Ok(m.clone()),
        None => Err(CorepError::MatricesUnavailable(format!(
            "{} has a core constituent of dimension > 1",
            irrep.name
        ))),
    }
}

/// rho'(g) = conj(rho(a0^-1 g a0)) on core element indices.
pub fn conjugate_matrices(mg: &MagneticGroup, core: &Subgroup, rho: &[CMat]) -> Vec<CMat> {
    let a0 = mg.a0;
    (0..core.group.order)
        .map(|idx| {
            let parent = core.elements[idx];
            let conj_parent = mg
                .group
                .mul(mg.group.mul(mg.group.inverse(a0), parent), a0);
            let cidx = core.index_of(conj_parent).expect("core is normal");
            cmat_conj(&rho[cidx])
        })
        .collect()
}

/// Wigner's construction from explicitly supplied core matrices; numeric.
pub fn wigner_construct_numeric(
    mg: &MagneticGroup,
    core: &Subgroup,
    rho: &[CMat],
) -> Result<(Vec<CMat>, SchurType), CorepError> {
    let rho_prime = conjugate_matrices(mg, core, rho);
    let n = mg.group.order;
    let a0 = mg.a0;
    let a0_inv = mg.group.inverse(a0);
    match find_intertwiner(rho, &rho_prime, mg, core) {
        Ok((t, sign)) => {
            let ty = if sign > 0 {
                SchurType::Real
            } else {
                SchurType::Quaternionic
            };
            let mats: Vec<CMat> = (0..n)
                .map(|g| {
                    if mg.phi[g] == 0 {
                        let idx = core.index_of(g).unwrap();
                        match ty {
                            SchurType::Real => rho[idx].clone(),
                            _ => block_diag(&rho[idx], &rho[idx]),
                        }
                    } else {
                        let idx = core.index_of(mg.group.mul(g, a0_inv)).unwrap();
                        let rt = cmat_mul(&rho[idx], &t);
                        match ty {
                            SchurType::Real => rt,
                            _ => {
                                let neg: CMat = rt
                                    .iter()
                                    .map(|row| row.iter().map(|e| -e).collect())
                                    .collect();
                                block_off_diag(&rt, &neg)
                            }
                        }
                    }
                })
                .collect();
            Ok((mats, ty))
        }
        Err(CorepError::NotIsomorphic) => {
            // complex type: block form on rho + rho'
            let mats: Vec<CMat> = (0..n)
                .map(|g| {
                    if mg.phi[g] == 0 {
                        let idx = core.index_of(g).unwrap();
                        block_diag(&rho[idx], &rho_prime[idx])
                    } else {
                        let up = core.index_of(mg.group.mul(g, a0)).unwrap();
                        let lo = core.index_of(mg.group.mul(g, a0_inv)).unwrap();
                        block_off_diag(&rho[up], &rho_prime[lo])
                    }
                })
                .collect();
            Ok((mats, SchurType::Complex))
        }
        Err(e) => Err(e),
    }
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let d = a.len();
    let zero = Complex64::new(0.0, 0.0);
    (0..2 * d)
        .map(|i| {
            (0..2 * d)
                .map(|j| {
                    if i < d && j < d {
                        a[i][j]
                    } else if i >= d && j >= d {
                        b[i - d][j - d]
                    } else {
                        zero
                    }
                })
                .collect()
        })
        .collect()
}

/// [[0, a], [b, 0]]
fn block_off_diag(a: &CMat, b: &CMat) -> CMat {
    let d = a.len();
    let zero = Complex64::new(0.0, 0.0);
    (0..2 * d)
        .map(|i| {
            (0..2 * d)
                .map(|j| {
                    if i < d && j >= d {
                        a[i][j - d]
                    } else if i >= d && j < d {
                        b[i - d][j]
                    } else {
                        zero
                    }
                })
                .collect()
        })
        .collect()
}

/// Numeric corepresentation law residual, for supplied-matrix coreps.
pub fn corep_law_residual(mats: &[CMat], mg: &MagneticGroup) -> f64 {
    let n = mg.group.order;
    let mut worst = 0.0f64;
    for g in 0..n {
        for h in 0..n {
            let mut mh = mats[h].clone();
            if mg.phi[g] == 1 {
                mh = cmat_conj(&mh);
            }
            let rhs = cmat_mul(&mats[g], &mh);
            worst = worst.max(cmat_sub_norm(&mats[mg.group.mul(g, h)], &rhs));
        }
    }
    worst
}

/// Real dimension of the commutant {X : X M(g) = M(g) conj^phi(g)(X)}.
pub fn commutant_real_dim(mats: &[CMat], mg: &MagneticGroup) -> usize {
    let d = mats[0].len();
    // unknowns: Re X and Im X, 2 d^2 reals
    let unknowns = 2 * d * d;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for g in 0..mg.group.order {
        let m = &mats[g];
        let conj = mg.phi[g] == 1;
        // X * M - M * sigma(X) = 0; entry (i, j), both real and imag parts.
        for i in 0..d {
            for j in 0..d {
                let mut row_re = vec![0.0f64; unknowns];
                let mut row_im = vec![0.0f64; unknowns];
                for k in 0..d {
                    // + X[i][k] * M[k][j]
                    let c = m[k][j];
                    let (re_idx, im_idx) = (2 * (i * d + k), 2 * (i * d + k) + 1);
                    row_re[re_idx] += c.re;
                    row_re[im_idx] -= c.im;
                    row_im[re_idx] += c.im;
                    row_im[im_idx] += c.re;
                    // - M[i][k] * sigma(X)[k][j]
                    let c2 = m[i][k];
                    let (re2, im2) = (2 * (k * d + j), 2 * (k * d + j) + 1);
                    let sgn = if conj { -1.0 } else { 1.0 };
                    row_re[re2] -= c2.re;
                    row_re[im2] += sgn * c2.im;
                    row_im[re2] -= c2.im;
                    row_im[im2] -= sgn * c2.re;
                }
                rows.push(row_re);
                rows.push(row_im);
            }
        }
    }
    unknowns - real_rank(rows, unknowns)
}

fn real_rank(mut a: Vec<Vec<f64>>, cols: usize) -> usize {
    let m = a.len();
    let mut rank = 0usize;
    for col in 0..cols {
        let mut best = None;
        let mut best_abs = 1e-7;
        for r in rank..m {
            if a[r][col].abs() > best_abs {
                best_abs = a[r][col].abs();
                best = Some(r);
            }
        }
        let Some(sel) = best else { continue };
        a.swap(rank, sel);
        let inv = 1.0 / a[rank][col];
        for c in 0..cols {
            a[rank][c] *= inv;
        }
        for r in 0..m {
            if r != rank && a[r][col].abs() > 0.0 {
                let f = a[r][col];
                for c in 0..cols {
                    let v = a[rank][c];
                    a[r][c] -= f * v;
                }
            }
        }
        rank += 1;
        if rank == m.min(cols) {
            break;
        }
    }
    rank
}

// --------------------------- induction and decomposition ---------------------------

/// Core character of the induced corepresentation Ind V = V + a0 V.
pub fn induce_character(
    mg: &MagneticGroup,
    core: &Subgroup,
    table: &CharacterTable,
    chi: &Character,
) -> Vec<Cyclotomic> {
    let conj = conjugate_character(mg, core, table, chi);
    (0..table.classes.count())
        .map(|i| chi.values[i].add(&conj.values[i]))
        .collect()
}

/// Induced corepresentation in explicit block form from 1-dimensional core
/// characters; exact.
pub fn induce_matrices(
    mg: &MagneticGroup,
    core: &Subgroup,
    table: &CharacterTable,
    chi: &Character,
) -> Result<CorepMatrices, CorepError> {
    if chi.degree != 1 {
        return Err(CorepError::MatricesUnavailable(
            "induction with explicit matrices needs a 1-dimensional core representation".into(),
        ));
    }
    let n = mg.group.order;
    let a0 = mg.a0;
    let a0_inv = mg.group.inverse(a0);
    let zero = Cyclotomic::zero(1);
    let chi_at = |parent: usize| -> Cyclotomic {
        let idx = core.index_of(parent).expect("core element");
        chi.values[table.classes.class_of[idx]].clone()
    };
    let chi_conj_at = |parent: usize| -> Cyclotomic {
        let c = mg.group.mul(mg.group.mul(a0_inv, parent), a0);
        chi_at(c).conj()
    };
    let mats: Vec<Vec<Vec<Cyclotomic>>> = (0..n)
        .map(|g| {
            if mg.phi[g] == 0 {
                vec![
                    vec![chi_at(g), zero.clone()],
                    vec![zero.clone(), chi_conj_at(g)],
                ]
            } else {
                vec![
                    vec![zero.clone(), chi_at(mg.group.mul(g, a0))],
                    vec![chi_conj_at(mg.group.mul(g, a0_inv)), zero.clone()],
                ]
            }
        })
        .collect();
    let cm = CorepMatrices {
        dim: 2,
        mats,
        phi: mg.phi.clone(),
    };
    debug_assert!(cm.law_holds(mg));
    Ok(cm)
}

/// Decomposes a corepresentation, given its core-restriction class function,
/// into magnetic irreps. Returns multiplicities aligned with ring.irreps.
pub fn decompose(
    ring: &MagneticRepRing,
    restriction: &[Cyclotomic],
) -> Result<Vec<BigInt>, CorepError> {
    let table = &ring.core_table;
    let mults: Vec<BigInt> = table
        .chars
        .iter()
        .map(|chi| table.multiplicity(restriction, chi))
        .collect();
    if mults.iter().any(|m| m.is_negative()) {
        return Err(CorepError::InvalidRestriction);
    }
    let mut out = Vec::with_capacity(ring.irreps.len());
    for irrep in &ring.irreps {
        let m = match irrep.schur_type {
            SchurType::Real => mults[irrep.constituents[0]].clone(),
            SchurType::Complex => {
                let a = &mults[irrep.constituents[0]];
                let b = &mults[irrep.constituents[1]];
                if a != b {
                    return Err(CorepError::InconsistentMultiplicities(irrep.name.clone()));
                }
                a.clone()
            }
            SchurType::Quaternionic => {
                let a = &mults[irrep.constituents[0]];
                if (a % BigInt::from(2)).is_zero() {
                    a / BigInt::from(2)
                } else {
                    return Err(CorepError::InconsistentMultiplicities(irrep.name.clone()));
                }
            }
        };
        out.push(m);
    }
    Ok(out)
}

/// Core-restriction class function of a sum of magnetic irreps.
pub fn restriction_character(ring: &MagneticRepRing, mults: &[BigInt]) -> Vec<Cyclotomic> {
    let table = &ring.core_table;
    let mut values = vec![Cyclotomic::zero(1); table.classes.count()];
    for (irrep, m) in ring.irreps.iter().zip(mults.iter()) {
        if m.is_zero() {
            continue;
        }
        let q = BigRational::from(m.clone());
        let add_char = |values: &mut Vec<Cyclotomic>, idx: usize, factor: &BigRational| {
            for (i, v) in values.iter_mut().enumerate() {
                *v = v.add(&table.chars[idx].values[i].scale(factor));
            }
        };
        match irrep.schur_type {
            SchurType::Real => add_char(&mut values, irrep.constituents[0], &q),
            SchurType::Complex => {
                add_char(&mut values, irrep.constituents[0], &q);
                add_char(&mut values, irrep.constituents[1], &q);
            }
            SchurType::Quaternionic => {
                let q2 = &q * BigRational::from(BigInt::from(2));
                add_char(&mut values, irrep.constituents[0], &q2);
            }
        }
    }
    values
}

/// Frobenius reciprocity bookkeeping: real dimensions of
/// Hom_corep(Ind V, W) and Hom_core(V, res W); the two must agree.
pub fn frobenius_check(
    mg: &MagneticGroup,
    ring: &MagneticRepRing,
    v_char: &[Cyclotomic],
    w_mults: &[BigInt],
) -> Result<(BigInt, BigInt), CorepError> {
    let core = mg.core_subgroup();
    let table = &ring.core_table;
    // Ind V has core character v + v'
    let v_character = Character {
        degree: 0,
        values: v_char.to_vec(),
    };
    let conj = conjugate_character(mg, &core, table, &v_character);
    let induced: Vec<Cyclotomic> = (0..table.classes.count())
        .map(|i| v_char[i].add(&conj.values[i]))
        .collect();
    let ind_mults = decompose(ring, &induced)?;
    let mut lhs = BigInt::zero();
    for ((irrep, a), w) in ring.irreps.iter().zip(ind_mults.iter()).zip(w_mults.iter()) {
        lhs += a * w * BigInt::from(irrep.schur_type.endomorphism_real_dim() as i64);
    }
    // rhs: complex dimension of Hom_core(V, res W), doubled to real dims
    let res_w = restriction_character(ring, w_mults);
    let mut rhs = BigInt::zero();
    for chi in &table.chars {
        let mv = table.multiplicity(v_char, chi);
        let mw = table.multiplicity(&res_w, chi);
        rhs += mv * mw;
    }
    rhs *= BigInt::from(2);
    Ok((lhs, rhs))
}

// ----------------------------- twisted rings -----------------------------

/// Classifies the twisted representation ring: irreducibles of the total
/// group of the extension on which the kernel acts by the given character.
/// Magnetic totals give corepresentation rings, unitary totals plain
/// complex rings.
pub fn twisted_irreps(twist: &Twist, max_order: usize) -> Result<MagneticRepRing, CorepError> {
    let ext = &twist.ext;
    if ext.is_magnetic() {
        let mg = crate::group::build_group(
            crate::catalog::group_to_table(&ext.total),
            ext.total_phi.clone(),
        )
        .expect("extension total is a valid magnetic group");
        let ring = classify_magnetic_irreps(&mg, max_order)?;
        let core = mg.core_subgroup();
        let table = &ring.core_table;
        let keep: Vec<MagneticIrrep> = ring
            .irreps
            .iter()
            .filter(|irrep| {
                irrep.constituents.iter().all(|&ci| {
                    let chi = &table.chars[ci];
                    ext.kernel.iter().all(|&k| {
                        let idx = core.index_of(k).expect("kernel lies in the core");
                        let val = &chi.values[table.classes.class_of[idx]];
                        let want = twist.character.sign(ext, k) as i64;
                        *val
                            == Cyclotomic::from_integer(want)
                                .scale(&BigRational::from(BigInt::from(chi.degree as i64)))
                    })
                })
            })
            .cloned()
            .collect();
        let mut counts = (0, 0, 0);
        let mut renamed = Vec::new();
        for (k, mut irrep) in keep.into_iter().enumerate() {
            match irrep.schur_type {
                SchurType::Real => counts.0 += 1,
                SchurType::Complex => counts.1 += 1,
                SchurType::Quaternionic => counts.2 += 1,
            }
            irrep.name = format!("R{}", k + 1);
            renamed.push(irrep);
        }
        Ok(MagneticRepRing {
            magnetic: true,
            irreps: renamed,
            counts,
            core_table: ring.core_table,
        })
    } else {
        let table = character_table(&ext.total, max_order)?;
        let keep: Vec<usize> = (0..table.chars.len())
            .filter(|&i| {
                let chi = &table.chars[i];
                ext.kernel.iter().all(|&k| {
                    let val = &chi.values[table.classes.class_of[k]];
                    let want = twist.character.sign(ext, k) as i64;
                    *val
                        == Cyclotomic::from_integer(want)
                            .scale(&BigRational::from(BigInt::from(chi.degree as i64)))
                })
            })
            .collect();
        let irreps: Vec<MagneticIrrep> = keep
            .iter()
            .enumerate()
            .map(|(k, &i)| MagneticIrrep {
                name: format!("R'{}", k + 1),
                schur_type: SchurType::Complex,
                dimension: table.chars[i].degree,
                constituents: vec![i],
                indicator: 0,
                matrices: None,
            })
            .collect();
        let n = irreps.len();
        Ok(MagneticRepRing {
            magnetic: false,
            irreps,
            counts: (0, n, 0),
            core_table: table,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::group::{pullback_extension, KernelCharacter};

    fn z4() -> MagneticGroup {
        catalog::magnetic_cyclic(4)
    }

    fn z8() -> MagneticGroup {
        catalog::magnetic_cyclic(8)
    }

    fn setup(mg: &MagneticGroup) -> (Subgroup, CharacterTable) {
        let core = mg.core_subgroup();
        let table = character_table(&core.group, 64).unwrap();
        (core, table)
    }

    #[test]
    fn indicator_on_z4() {
        let mg = z4();
        let (core, table) = setup(&mg);
        // trivial: +2 (real), sign: -2 (quaternionic)
        let i0 = schur_frobenius(&mg, &core, &table, &table.chars[0]).unwrap();
        let i1 = schur_frobenius(&mg, &core, &table, &table.chars[1]).unwrap();
        assert_eq!(i0, BigInt::from(2));
        assert_eq!(i1, BigInt::from(-2));
    }

    #[test]
    fn indicator_complex_on_z8() {
        let mg = z8();
        let (core, table) = setup(&mg);
        // core Z/4: chi_1 (value i at element 2) has indicator 0
        let i_char = table
            .chars
            .iter()
            .position(|c| {
                let idx = core.index_of(2).unwrap();
                c.values[table.classes.class_of[idx]] == Cyclotomic::root_of_unity(4, 1)
            })
            .unwrap();
        let ind = schur_frobenius(&mg, &core, &table, &table.chars[i_char]).unwrap();
        assert_eq!(ind, BigInt::from(0));
    }

    #[test]
    fn conjugate_character_involution_on_z8_core() {
        let mg = z8();
        let (core, table) = setup(&mg);
        for chi in &table.chars {
            let c1 = conjugate_character(&mg, &core, &table, chi);
            let c2 = conjugate_character(&mg, &core, &table, &c1);
            assert_eq!(c2.values, chi.values);
            // indicator is conjugation invariant
            let a = schur_frobenius(&mg, &core, &table, chi).unwrap();
            let b = schur_frobenius(&mg, &core, &table, &c1).unwrap();
            assert_eq!(a, b);
        }
        // chi_1 pairs with chi_3 = conj
        let i = Cyclotomic::root_of_unity(4, 1);
        let idx2 = core.index_of(2).unwrap();
        let chi1 = table
            .chars
            .iter()
            .position(|c| c.values[table.classes.class_of[idx2]] == i)
            .unwrap();
        let conj = conjugate_character(&mg, &core, &table, &table.chars[chi1]);
        assert_eq!(conj.values[table.classes.class_of[idx2]], i.conj());
    }

    #[test]
    fn self_conjugate_sign_character() {
        let mg = z4();
        let (core, table) = setup(&mg);
        let conj = conjugate_character(&mg, &core, &table, &table.chars[1]);
        assert_eq!(conj.values, table.chars[1].values);
    }

    #[test]
    fn classify_small_cyclic_groups() {
        assert_eq!(
            classify_magnetic_irreps(&catalog::magnetic_cyclic(2), 64)
                .unwrap()
                .counts,
            (1, 0, 0)
        );
        assert_eq!(classify_magnetic_irreps(&z4(), 64).unwrap().counts, (1, 0, 1));
        assert_eq!(classify_magnetic_irreps(&z8(), 64).unwrap().counts, (1, 1, 1));
    }

    #[test]
    fn z4_wigner_matrices_match_reference_forms() {
        let ring = classify_magnetic_irreps(&z4(), 64).unwrap();
        // R1: one-dimensional, a0 acts as plain conjugation (matrix 1)
        let r1 = &ring.irreps[0];
        assert_eq!(r1.schur_type, SchurType::Real);
        let m = r1.matrices.as_ref().unwrap();
        assert_eq!(m.dim, 1);
        assert_eq!(m.mats[1][0][0], Cyclotomic::from_integer(1));
        // R2: two-dimensional, a0 -> ((0,1),(-1,0)) K
        let r2 = &ring.irreps[1];
        assert_eq!(r2.schur_type, SchurType::Quaternionic);
        let m = r2.matrices.as_ref().unwrap();
        assert_eq!(m.dim, 2);
        assert_eq!(m.mats[1][0][1], Cyclotomic::from_integer(1));
        assert_eq!(m.mats[1][1][0], Cyclotomic::from_integer(-1));
        assert_eq!(m.mats[1][0][0], Cyclotomic::from_integer(0));
    }

    #[test]
    fn corep_law_and_commutant_dimensions() {
        for mg in [catalog::magnetic_cyclic(2), z4(), z8(), catalog::magnetic_cyclic(6)] {
            let ring = classify_magnetic_irreps(&mg, 64).unwrap();
            for irrep in &ring.irreps {
                let m = irrep.matrices.as_ref().expect("cyclic cores are abelian");
                assert!(m.law_holds(&mg), "{} law", irrep.name);
                let dim = commutant_real_dim(&m.to_numeric(), &mg);
                assert_eq!(
                    dim,
                    irrep.schur_type.endomorphism_real_dim(),
                    "{} commutant",
                    irrep.name
                );
            }
        }
    }

    #[test]
    fn intertwiner_scalar_cases() {
        let mg = z4();
        let core = mg.core_subgroup();
        let one = Complex64::new(1.0, 0.0);
        // trivial rep: T = 1, sign +1
        let rho: Vec<CMat> = vec![vec![vec![one]], vec![vec![one]]];
        let rho_p = conjugate_matrices(&mg, &core, &rho);
        let (t, sign) = find_intertwiner(&rho, &rho_p, &mg, &core).unwrap();
        assert_eq!(sign, 1);
        assert!((t[0][0] - one).norm() < 1e-9);
        // sign rep: rho(2) = -1 forces sign -1
        let rho: Vec<CMat> = vec![vec![vec![one]], vec![vec![-one]]];
        let rho_p = conjugate_matrices(&mg, &core, &rho);
        let (_, sign) = find_intertwiner(&rho, &rho_p, &mg, &core).unwrap();
        assert_eq!(sign, -1);
    }

    #[test]
    fn intertwiner_2dim_dihedral_core() {
        // D4 x Z/2 graded by the second factor: the 2-dim core irrep is
        // realized by real matrices, so it is self-conjugate with sign +1,
        // matching its +|G0| indicator.
        let d4 = catalog::dihedral(4);
        let mg = catalog::magnetic_product_with_z2(&d4);
        let core = mg.core_subgroup();
        // standard 2-dim rep of D4: r -> rotation by 90 degrees, s -> flip
        let rot = |k: usize| -> CMat {
            let c = [1.0, 0.0, -1.0, 0.0][k % 4];
            let s = [0.0, 1.0, 0.0, -1.0][k % 4];
            vec![
                vec![Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                vec![Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ]
        };
        let flip: CMat = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
        ];
        // core elements are (d4 element, 0) with index = d4_index * 2 ... but
        // the subgroup re-indexes; build rho on subgroup element order.
        let rho: Vec<CMat> = (0..core.group.order)
            .map(|idx| {
                let parent = core.elements[idx];
                let d4_elem = parent / 2; // direct product layout (g, k) -> g*2+k
                if d4_elem < 4 {
                    rot(d4_elem)
                } else {
                    cmat_mul(&flip, &rot(d4_elem - 4))
                }
            })
            .collect();
        let rho_p = conjugate_matrices(&mg, &core, &rho);
        let (_, sign) = find_intertwiner(&rho, &rho_p, &mg, &core).unwrap();
        assert_eq!(sign, 1);
        // cross-check with the indicator
        let table = character_table(&core.group, 64).unwrap();
        let chi2 = table.chars.iter().find(|c| c.degree == 2).unwrap();
        let ind = schur_frobenius(&mg, &core, &table, chi2).unwrap();
        assert_eq!(ind, BigInt::from(8));
        // and the induced corep carries commutant of a real-type irrep twice
        let (mats, ty) = wigner_construct_numeric(&mg, &core, &rho).unwrap();
        assert_eq!(ty, SchurType::Real);
        assert!(corep_law_residual(&mats, &mg) < 1e-9);
    }

    #[test]
    fn induction_decomposition_examples() {
        let mg = z4();
        let ring = classify_magnetic_irreps(&mg, 64).unwrap();
        let core = mg.core_subgroup();
        let table = &ring.core_table;
        // Ind(trivial) = 2 * R1
        let ind = induce_character(&mg, &core, table, &table.chars[0]);
        let mults = decompose(&ring, &ind).unwrap();
        assert_eq!(mults, vec![BigInt::from(2), BigInt::from(0)]);
        // Ind(sign) = R2 once
        let ind = induce_character(&mg, &core, table, &table.chars[1]);
        let mults = decompose(&ring, &ind).unwrap();
        assert_eq!(mults, vec![BigInt::from(0), BigInt::from(1)]);
        // regular corep: restriction 2 * (trivial + sign) -> 2 R1 + 1 R2
        let reg: Vec<Cyclotomic> = (0..table.classes.count())
            .map(|i| {
                table.chars[0].values[i]
                    .add(&table.chars[1].values[i])
                    .scale(&BigRational::from(BigInt::from(2)))
            })
            .collect();
        let mults = decompose(&ring, &reg).unwrap();
        assert_eq!(mults, vec![BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn induction_complex_case_on_z8() {
        let mg = z8();
        let ring = classify_magnetic_irreps(&mg, 64).unwrap();
        let core = mg.core_subgroup();
        let table = &ring.core_table;
        // chi_1 induces the complex irrep once
        let complex_idx = ring
            .irreps
            .iter()
            .position(|r| r.schur_type == SchurType::Complex)
            .unwrap();
        let chi1 = ring.irreps[complex_idx].constituents[0];
        let ind = induce_character(&mg, &core, table, &table.chars[chi1]);
        let mults = decompose(&ring, &ind).unwrap();
        for (k, m) in mults.iter().enumerate() {
            let want = if k == complex_idx { 1 } else { 0 };
            assert_eq!(*m, BigInt::from(want));
        }
    }

    #[test]
    fn decompose_rejects_inconsistent_multiplicities() {
        let mg = z4();
        let ring = classify_magnetic_irreps(&mg, 64).unwrap();
        let table = &ring.core_table;
        // trivial + sign: sign needs multiplicity 2 for the quaternionic irrep
        let f: Vec<Cyclotomic> = (0..table.classes.count())
            .map(|i| table.chars[0].values[i].add(&table.chars[1].values[i]))
            .collect();
        let err = decompose(&ring, &f).unwrap_err();
        assert_eq!(err, CorepError::InconsistentMultiplicities("R2".into()));
        // sign + sign is fine
        let f: Vec<Cyclotomic> = (0..table.classes.count())
            .map(|i| table.chars[1].values[i].scale(&BigRational::from(BigInt::from(2))))
            .collect();
        let mults = decompose(&ring, &f).unwrap();
        assert_eq!(mults, vec![BigInt::from(0), BigInt::from(1)]);
    }

    #[test]
    fn frobenius_reciprocity_named_cases() {
        let mg = z4();
        let ring = classify_magnetic_irreps(&mg, 64).unwrap();
        let table = &ring.core_table;
        // V = sign, W = quaternionic irrep
        let v: Vec<Cyclotomic> = table.chars[1].values.clone();
        let w = vec![BigInt::from(0), BigInt::from(1)];
        let (lhs, rhs) = frobenius_check(&mg, &ring, &v, &w).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, BigInt::from(4));
        // V = trivial, W = real irrep
        let v: Vec<Cyclotomic> = table.chars[0].values.clone();
        let w = vec![BigInt::from(1), BigInt::from(0)];
        let (lhs, rhs) = frobenius_check(&mg, &ring, &v, &w).unwrap();
        assert_eq!(lhs, rhs);
        // W = 0
        let w = vec![BigInt::from(0), BigInt::from(0)];
        let (lhs, rhs) = frobenius_check(&mg, &ring, &v, &w).unwrap();
        assert_eq!(lhs, BigInt::from(0));
        assert_eq!(rhs, BigInt::from(0));
    }

    #[test]
    fn twisted_ring_z8_over_z4() {
        let mg = z4();
        // the relevant extension is Z/8 over Z/4 with phi = mod 2 and
        // projection mod 4 (the pullback of Z/4 is Z/4 x Z/2 instead)
        let total = catalog::magnetic_cyclic(8);
        let ext = crate::group::CentralExtension::new(
            total.group.clone(),
            total.phi.clone(),
            mg.group.clone(),
            mg.phi.clone(),
            (0..8).map(|t| t % 4).collect(),
        )
        .unwrap();
        let chi = KernelCharacter::new(&ext, vec![1, -1]).unwrap();
        let twist = Twist {
            ext,
            character: chi,
        };
        let ring = twisted_irreps(&twist, 64).unwrap();
        assert_eq!(ring.irreps.len(), 1);
        let r = &ring.irreps[0];
        assert_eq!(r.schur_type, SchurType::Complex);
        assert_eq!(r.dimension, 2);
        // antiunitary generator matrix, up to the phase convention, is
        // ((0, i), (1, 0)) K
        let m = r.matrices.as_ref().expect("1-dim constituents");
        let got = &m.mats[1];
        let want = [
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ];
        // find a unit phase z with got = z * want
        let mut phase: Option<Complex64> = None;
        for i in 0..2 {
            for j in 0..2 {
                let w = want[i][j];
                let g = got[i][j].to_complex();
                if w.norm() > 0.5 {
                    phase = Some(g / w);
                }
            }
        }
        let z = phase.unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-9);
        for i in 0..2 {
            for j in 0..2 {
                let g = got[i][j].to_complex();
                assert!((g - z * want[i][j]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn twisted_ring_z4_over_z2_unitary() {
        // total Z/4 (no grading), base Z/2, kernel {0, 2}, sign character:
        // exactly the two complex irreps i and -i.
        let total = catalog::cyclic(4);
        let base = catalog::cyclic(2);
        let ext = crate::group::CentralExtension::new(
            total,
            vec![0; 4],
            base,
            vec![0; 2],
            (0..4).map(|t| t % 2).collect(),
        )
        .unwrap();
        let chi = KernelCharacter::new(&ext, vec![1, -1]).unwrap();
        let ring = twisted_irreps(
            &Twist {
                ext,
                character: chi,
            },
            64,
        )
        .unwrap();
        assert!(!ring.magnetic);
        assert_eq!(ring.irreps.len(), 2);
        assert!(ring.irreps.iter().all(|r| r.dimension == 1));
    }

    #[test]
    fn trivial_twist_recovers_base_ring() {
        let mg = z4();
        let ext = pullback_extension(&mg);
        let chi = KernelCharacter::new(&ext, vec![1, 1]).unwrap();
        let twisted = twisted_irreps(
            &Twist {
                ext,
                character: chi,
            },
            64,
        )
        .unwrap();
        let base = classify_magnetic_irreps(&mg, 64).unwrap();
        assert_eq!(twisted.counts, base.counts);
    }

    #[test]
    fn untwisted_total_ring_is_union_over_kernel_characters() {
        let mg = z4();
        let ext = pullback_extension(&mg);
        let total_mg = crate::group::build_group(
            catalog::group_to_table(&ext.total),
            ext.total_phi.clone(),
        )
        .unwrap();
        let total_ring = classify_magnetic_irreps(&total_mg, 64).unwrap();
        let mut sum = (0, 0, 0);
        for vals in [vec![1, 1], vec![1, -1]] {
            let chi = KernelCharacter::new(&ext, vals).unwrap();
            let ring = twisted_irreps(
                &Twist {
                    ext: ext.clone(),
                    character: chi,
                },
                64,
            )
            .unwrap();
            sum.0 += ring.counts.0;
            sum.1 += ring.counts.1;
            sum.2 += ring.counts.2;
        }
        assert_eq!(sum, total_ring.counts);
    }

    #[test]
    fn decompose_round_trips_multiplicity_vectors() {
        for mg in [z4(), z8(), catalog::magnetic_product_with_z2(&catalog::symmetric3())] {
            let ring = classify_magnetic_irreps(&mg, 64).unwrap();
            let n = ring.irreps.len();
            // a few deterministic multiplicity vectors
            for seed in 0..5u64 {
                let mults: Vec<BigInt> = (0..n)
                    .map(|i| BigInt::from(((seed + i as u64 * 3) % 4) as i64))
                    .collect();
                let ch = restriction_character(&ring, &mults);
                let back = decompose(&ring, &ch).unwrap();
                assert_eq!(back, mults);
            }
        }
    }

    #[test]
    fn wigner_construct_requires_matrices_for_big_constituents() {
        // S4-like core with a 2-dimensional irrep: D4 x Z/2
        let mg = catalog::magnetic_product_with_z2(&catalog::dihedral(4));
        let ring = classify_magnetic_irreps(&mg, 64).unwrap();
        let big = ring
            .irreps
            .iter()
            .position(|r| ring.core_table.chars[r.constituents[0]].degree > 1)
            .expect("2-dim core irrep exists");
        let err = wigner_construct(&mg, &ring, big).unwrap_err();
        assert!(matches!(err, CorepError::MatricesUnavailable(_)));
        // linear constituents are constructible
        let small = ring
            .irreps
            .iter()
            .position(|r| ring.core_table.chars[r.constituents[0]].degree == 1)
            .unwrap();
        assert!(wigner_construct(&mg, &ring, small).is_ok());
    }

    #[test]
    fn a0_invariance_of_classification() {
        for mg in [z4(), z8(), catalog::magnetic_product_with_z2(&catalog::symmetric3())] {
            let reference = classify_magnetic_irreps(&mg, 64).unwrap().counts;
            for a0 in mg.antiunitary_elements() {
                let counts = classify_with_a0(&mg, a0, 64).unwrap().counts;
                assert_eq!(counts, reference);
            }
        }
    }
}
