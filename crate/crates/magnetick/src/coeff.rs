//! Coefficient groups of magnetic equivariant K-theory at points and orbits,
//! assembled from the classical KO/KU/KSp point tables, together with the
//! induced maps on coefficients that the spectral-sequence differentials are
//! built from.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, Zero};
use thiserror::Error;

use crate::abelian::{FgAbelianGroup, Mat, Presentation};
use crate::chartab::{character_table, CharacterTable};
use crate::corep::{classify_magnetic_irreps, CorepError, MagneticRepRing, SchurType};
use crate::cyclotomic::Cyclotomic;
use crate::group::{build_group, GroupError, MagneticGroup, Subgroup, Twist};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoeffError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Corep(#[from] CorepError),
    #[error("subset is not a subgroup of the ambient group")]
    NotASubgroup,
    #[error("stabilizer does not lift through the extension: {0}")]
    StabilizerDoesNotLift(String),
    #[error("orbit map ill defined: conjugate of the target stabilizer by g does not land in the source stabilizer")]
    NotEquivariant,
}

/// One Z or Z/2 piece of a coefficient row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    Z,
    Z2,
    Zero,
}

/// Which classical point table a summand comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    KO,
    KU,
    KSp,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::KO => "KO",
            Field::KU => "KU",
            Field::KSp => "KSp",
        }
    }
}

fn qmod8(t: i64) -> usize {
    (((-t) % 8 + 8) % 8) as usize
}

/// KO^t(point), 8-periodic: Z, Z/2, Z/2, 0, Z, 0, 0, 0 for t = 0..-7.
pub fn ko_piece(t: i64) -> Piece {
    match qmod8(t) {
        0 | 4 => Piece::Z,
        1 | 2 => Piece::Z2,
        _ => Piece::Zero,
    }
}

/// KU^t(point), 2-periodic: Z in even degrees.
pub fn ku_piece(t: i64) -> Piece {
    if t.rem_euclid(2) == 0 {
        Piece::Z
    } else {
        Piece::Zero
    }
}

/// KSp^t(point) = KO^(t-4)(point): Z, 0, 0, 0, Z, Z/2, Z/2, 0.
pub fn ksp_piece(t: i64) -> Piece {
    match qmod8(t) {
        0 | 4 => Piece::Z,
        5 | 6 => Piece::Z2,
        _ => Piece::Zero,
    }
}

pub fn field_piece(field: Field, t: i64) -> Piece {
    match field {
        Field::KO => ko_piece(t),
        Field::KU => ku_piece(t),
        Field::KSp => ksp_piece(t),
    }
}

fn field_of(ty: SchurType) -> Field {
    match ty {
        SchurType::Real => Field::KO,
        SchurType::Complex => Field::KU,
        SchurType::Quaternionic => Field::KSp,
    }
}

/// Label of one summand of a coefficient row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandLabel {
    pub irrep: String,
    pub field: Field,
    /// Bott degree, folded into 0..-7.
    pub bott: i64,
    pub torsion: bool,
}

impl SummandLabel {
    pub fn render(&self) -> String {
        format!("{}:{}@{}", self.irrep, self.field.as_str(), self.bott)
    }
}

/// A coefficient group at a fixed degree with labeled summands.
#[derive(Clone, Debug)]
pub struct CoefficientRow {
    pub t: i64,
    pub group: FgAbelianGroup,
    pub labels: Vec<SummandLabel>,
    /// Cyclic order per summand in label order: 0 for Z, 2 for Z/2.
    pub orders: Vec<BigInt>,
}

impl CoefficientRow {
    pub fn presentation(&self) -> Presentation {
        Presentation::from_orders(&self.orders)
    }
}

/// K^t of a point assembled from a classified representation ring.
pub fn point_coefficients(ring: &MagneticRepRing, t: i64) -> CoefficientRow {
    let mut labels = Vec::new();
    let mut orders = Vec::new();
    let mut group = FgAbelianGroup::zero();
    for irrep in &ring.irreps {
        let field = if ring.magnetic {
            field_of(irrep.schur_type)
        } else {
            Field::KU
        };
        let piece = field_piece(field, t);
        let bott = -((-t).rem_euclid(8));
        match piece {
            Piece::Zero => {}
            Piece::Z => {
                labels.push(SummandLabel {
                    irrep: irrep.name.clone(),
                    field,
                    bott,
                    torsion: false,
                });
                orders.push(BigInt::zero());
                group = group.direct_sum(&FgAbelianGroup::free(1));
            }
            Piece::Z2 => {
                labels.push(SummandLabel {
                    irrep: irrep.name.clone(),
                    field,
                    bott,
                    torsion: true,
                });
                orders.push(BigInt::from(2));
                group = group.direct_sum(&FgAbelianGroup::torsion_i64(&[2]));
            }
        }
    }
    CoefficientRow {
        t,
        group,
        labels,
        orders,
    }
}

/// Stabilizer data of one equivariant cell, with the (possibly lifted)
/// representation ring that generates its coefficient rows.
#[derive(Clone, Debug)]
pub struct OrbitCell {
    /// The stabilizer inside the base group.
    pub base_stabilizer: Vec<usize>,
    pub kind: CellKind,
}

#[derive(Clone, Debug)]
pub enum CellKind {
    /// Stabilizer not contained in the core: magnetic point coefficients.
    Magnetic {
        /// Lifted stabilizer as a subgroup of the ambient group
        /// (the twist total, or the base group itself when untwisted).
        sub: Subgroup,
        mg: MagneticGroup,
        core: Subgroup,
        ring: MagneticRepRing,
    },
    /// Stabilizer inside the core: complex representation ring rows.
    Unitary {
        sub: Subgroup,
        table: CharacterTable,
        /// Indices of the (twist-filtered) characters, in table order.
        keep: Vec<usize>,
    },
}

impl OrbitCell {
    pub fn row(&self, t: i64) -> CoefficientRow {
        match &self.kind {
            CellKind::Magnetic { ring, .. } => point_coefficients(ring, t),
            CellKind::Unitary { keep, .. } => {
                let mut labels = Vec::new();
                let mut orders = Vec::new();
                let mut group = FgAbelianGroup::zero();
                if ku_piece(t) == Piece::Z {
                    for k in 0..keep.len() {
                        labels.push(SummandLabel {
                            irrep: format!("R'{}", k + 1),
                            field: Field::KU,
                            bott: -((-t).rem_euclid(8)),
                            torsion: false,
                        });
                        orders.push(BigInt::zero());
                        group = group.direct_sum(&FgAbelianGroup::free(1));
                    }
                }
                CoefficientRow {
                    t,
                    group,
                    labels,
                    orders,
                }
            }
        }
    }
}

/// Builds the coefficient data of the orbit G/H, twisted when requested.
/// The stabilizer is lifted through the extension; the lift is computed as
/// the full preimage, never guessed.
pub fn orbit_cell(
    g: &MagneticGroup,
    stabilizer: &[usize],
    twist: Option<&Twist>,
    max_order: usize,
) -> Result<OrbitCell, CoeffError> {
    if !g.group.is_subgroup(stabilizer) {
        return Err(CoeffError::NotASubgroup);
    }
    let mut base_stab: Vec<usize> = stabilizer.to_vec();
    base_stab.sort_unstable();
    base_stab.dedup();
    let magnetic = g.is_magnetic_subset(&base_stab);
    match twist {
        None => {
            let sub = Subgroup::new(&g.group, &base_stab).map_err(|_| CoeffError::NotASubgroup)?;
            if magnetic {
                let phi: Vec<u8> = sub.elements.iter().map(|&e| g.phi[e]).collect();
                let mg = build_group(crate::catalog::group_to_table(&sub.group), phi)
                    .expect("subgroup of a valid group is valid");
                let ring = classify_magnetic_irreps(&mg, max_order)?;
                let core = mg.core_subgroup();
                Ok(OrbitCell {
                    base_stabilizer: base_stab,
                    kind: CellKind::Magnetic {
                        sub,
                        mg,
                        core,
                        ring,
                    },
                })
            } else {
                let table = character_table(&sub.group, max_order)
                    .map_err(CorepError::CharTab)
                    .map_err(CoeffError::Corep)?;
                let keep = (0..table.chars.len()).collect();
                Ok(OrbitCell {
                    base_stabilizer: base_stab,
                    kind: CellKind::Unitary { sub, table, keep },
                })
            }
        }
        Some(twist) => {
            let ext = &twist.ext;
            if ext.base.order != g.group.order || ext.base.mult != g.group.mult {
                return Err(CoeffError::StabilizerDoesNotLift(
                    "twist base group differs from the acting group".into(),
                ));
            }
            let lifted = ext.preimage(&base_stab);
            let sub = Subgroup::new(&ext.total, &lifted).map_err(|_| {
                CoeffError::StabilizerDoesNotLift("preimage is not a subgroup".into())
            })?;
            if magnetic {
                let phi: Vec<u8> = sub.elements.iter().map(|&e| ext.total_phi[e]).collect();
                let mg = build_group(crate::catalog::group_to_table(&sub.group), phi)
                    .expect("lifted stabilizer is a valid magnetic group");
                let ring = classify_magnetic_irreps(&mg, max_order)?;
                let core = mg.core_subgroup();
                // filter: each kernel element acts by the prescribed sign
                let filtered = filter_ring_by_kernel(&ring, &core, &sub, ext, twist);
                Ok(OrbitCell {
                    base_stabilizer: base_stab,
                    kind: CellKind::Magnetic {
                        sub,
                        mg,
                        core,
                        ring: filtered,
                    },
                })
            } else {
                let table = character_table(&sub.group, max_order)
                    .map_err(CorepError::CharTab)
                    .map_err(CoeffError::Corep)?;
                let keep: Vec<usize> = (0..table.chars.len())
                    .filter(|&i| {
                        let chi = &table.chars[i];
                        ext.kernel.iter().all(|&k| {
                            let idx = sub.index_of(k).expect("kernel lies in every preimage");
                            let val = &chi.values[table.classes.class_of[idx]];
                            let want = twist.character.sign(ext, k) as i64;
                            *val
                                == Cyclotomic::from_integer(want).scale(&BigRational::from(
                                    BigInt::from(chi.degree as i64),
                                ))
                        })
                    })
                    .collect();
                Ok(OrbitCell {
                    base_stabilizer: base_stab,
                    kind: CellKind::Unitary { sub, table, keep },
                })
            }
        }
    }
}

fn filter_ring_by_kernel(
    ring: &MagneticRepRing,
    core: &Subgroup,
    sub: &Subgroup,
    ext: &crate::group::CentralExtension,
    twist: &Twist,
) -> MagneticRepRing {
    let table = &ring.core_table;
    let keep: Vec<_> = ring
        .irreps
        .iter()
        .filter(|irrep| {
            irrep.constituents.iter().all(|&ci| {
                let chi = &table.chars[ci];
                ext.kernel.iter().all(|&k| {
                    let sub_idx = sub.index_of(k).expect("kernel in preimage");
                    let core_idx = core.index_of(sub_idx).expect("kernel in core");
                    let val = &chi.values[table.classes.class_of[core_idx]];
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
    MagneticRepRing {
        magnetic: true,
        irreps: renamed,
        counts,
        core_table: ring.core_table.clone(),
    }
}

/// Summand descriptor used when computing restriction matrices.
enum SummandData {
    /// Real or quaternionic type: the single core constituent character,
    /// with res(V) containing it once or twice.
    SelfConj {
        field: Field,
        /// character values indexed by ambient elements of the cell's core
        chi: CharValues,
        copies: i64,
    },
    /// Complex type pair (canonical first) or a unitary character.
    KuLike {
        chi: CharValues,
        chi_conj: Option<CharValues>,
    },
}

/// A character materialized as (ambient element -> value).
#[derive(Clone)]
struct CharValues {
    elems: Vec<usize>,
    values: Vec<Cyclotomic>,
}

impl CharValues {
    fn at(&self, ambient: usize) -> &Cyclotomic {
        let i = self
            .elems
            .binary_search(&ambient)
            .expect("element outside the character's domain");
        &self.values[i]
    }
}

fn char_values_magnetic(
    sub: &Subgroup,
    core: &Subgroup,
    table: &CharacterTable,
    chi_idx: usize,
) -> CharValues {
    let elems: Vec<usize> = core.elements.iter().map(|&ci| sub.elements[ci]).collect();
    let values = core
        .elements
        .iter()
        .map(|&ci| {
            let core_idx = core.index_of(ci).unwrap();
            table.chars[chi_idx].values[table.classes.class_of[core_idx]].clone()
        })
        .collect();
    CharValues { elems, values }
}

fn char_values_unitary(sub: &Subgroup, table: &CharacterTable, chi_idx: usize) -> CharValues {
    let elems = sub.elements.clone();
    let values = (0..sub.group.order)
        .map(|i| table.chars[chi_idx].values[table.classes.class_of[i]].clone())
        .collect();
    CharValues { elems, values }
}

fn cell_summands(cell: &OrbitCell, t: i64) -> Vec<(SummandData, Piece)> {
    let mut out = Vec::new();
    match &cell.kind {
        CellKind::Magnetic {
            sub, core, ring, ..
        } => {
            let table = &ring.core_table;
            for irrep in &ring.irreps {
                let field = field_of(irrep.schur_type);
                let piece = field_piece(field, t);
                if piece == Piece::Zero {
                    continue;
                }
                let data = match irrep.schur_type {
                    SchurType::Real => SummandData::SelfConj {
                        field,
                        chi: char_values_magnetic(sub, core, table, irrep.constituents[0]),
                        copies: 1,
                    },
                    SchurType::Quaternionic => SummandData::SelfConj {
                        field,
                        chi: char_values_magnetic(sub, core, table, irrep.constituents[0]),
                        copies: 2,
                    },
                    SchurType::Complex => SummandData::KuLike {
                        chi: char_values_magnetic(sub, core, table, irrep.constituents[0]),
                        chi_conj: Some(char_values_magnetic(
                            sub,
                            core,
                            table,
                            irrep.constituents[1],
                        )),
                    },
                };
                out.push((data, piece));
            }
        }
        CellKind::Unitary { sub, table, keep } => {
            if ku_piece(t) == Piece::Z {
                for &i in keep {
                    out.push((
                        SummandData::KuLike {
                            chi: char_values_unitary(sub, table, i),
                            chi_conj: None,
                        },
                        Piece::Z,
                    ));
                }
            }
        }
    }
    out
}

/// Result of a coefficient restriction: the matrix plus any flags raised for
/// antiunitary incidences on KO/KSp free summands, whose conjugation action
/// the underlying theory does not pin down (taken to act trivially here).
#[derive(Debug)]
pub struct RestrictionOutcome {
    pub matrix: Mat,
    pub warnings: Vec<String>,
}

impl PartialEq for RestrictionOutcome {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

/// The coefficient map K^t(G/H_from) -> K^t(G/H_to) induced by the orbit map
/// x H_to -> x g H_from. Requires g^-1 H_to g inside H_from.
pub fn restriction_matrix(
    g_group: &MagneticGroup,
    from: &OrbitCell,
    to: &OrbitCell,
    g: usize,
    t: i64,
    twist: Option<&Twist>,
) -> Result<RestrictionOutcome, CoeffError> {
    // equivariance at the base level
    for &h in &to.base_stabilizer {
        let conj = g_group
            .group
            .mul(g_group.group.mul(g_group.group.inverse(g), h), g);
        if !from.base_stabilizer.contains(&conj) {
            return Err(CoeffError::NotEquivariant);
        }
    }
    let parity = g_group.phi[g];
    // ambient group and conjugating element: a lift of g when twisted
    let ambient: &crate::group::Group = match twist {
        None => &g_group.group,
        Some(tw) => &tw.ext.total,
    };
    let conj_elem = match twist {
        None => g,
        Some(tw) => (0..tw.ext.total.order)
            .find(|&x| tw.ext.projection[x] == g)
            .expect("projection is surjective"),
    };
    let c_inv = ambient.inverse(conj_elem);

    // U(chi)(h) = conj^parity(chi(c^-1 h c)), evaluated on a target domain.
    let u_on = |chi: &CharValues, domain: &[usize]| -> Vec<Cyclotomic> {
        domain
            .iter()
            .map(|&h| {
                let moved = ambient.mul(ambient.mul(c_inv, h), conj_elem);
                let v = chi.at(moved).clone();
                if parity == 1 {
                    v.conj()
                } else {
                    v
                }
            })
            .collect()
    };

    let src = cell_summands(from, t);
    let dst = cell_summands(to, t);
    let mut matrix = Mat::zeros(dst.len(), src.len());
    let mut warnings: Vec<String> = Vec::new();

    let k_odd = (-t).rem_euclid(4) == 2;
    let omega: i64 = if k_odd && parity == 1 { -1 } else { 1 };

    for (sj, (s, s_piece)) in src.iter().enumerate() {
        // flag antiunitary incidences on free KO/KSp summands
        if parity == 1 && *s_piece == Piece::Z {
            if let SummandData::SelfConj { field, .. } = s {
                warnings.push(format!(
                    "antiunitary incidence on a free {} summand at t = {}; conjugation taken to act trivially",
                    field.as_str(),
                    t
                ));
            }
        }
        for (di, (d, d_piece)) in dst.iter().enumerate() {
            let target_chi = match d {
                SummandData::SelfConj { chi, .. } => chi,
                SummandData::KuLike { chi, .. } => chi,
            };
            let domain = &target_chi.elems;
            // the source class function moved to the target domain
            let xi: Vec<Cyclotomic> = if k_odd {
                match s {
                    SummandData::KuLike { chi, chi_conj } => {
                        let a = u_on(chi, domain);
                        match chi_conj {
                            None => a,
                            Some(cc) => {
                                let b = u_on(cc, domain);
                                a.iter().zip(b.iter()).map(|(x, y)| x.sub(y)).collect()
                            }
                        }
                    }
                    SummandData::SelfConj { chi, .. } => u_on(chi, domain),
                }
            } else {
                match s {
                    SummandData::SelfConj { chi, copies, .. } => {
                        let a = u_on(chi, domain);
                        let q = BigRational::from(BigInt::from(*copies));
                        a.iter().map(|x| x.scale(&q)).collect()
                    }
                    SummandData::KuLike { chi, chi_conj } => {
                        let a = u_on(chi, domain);
                        match chi_conj {
                            None => a,
                            Some(cc) => {
                                let b = u_on(cc, domain);
                                a.iter().zip(b.iter()).map(|(x, y)| x.add(y)).collect()
                            }
                        }
                    }
                }
            };
            // target_chi's element list is exactly the evaluation domain
            let mult_of_target = || -> BigInt {
                let mut sum = Cyclotomic::zero(1);
                for i in 0..domain.len() {
                    sum = sum.add(&xi[i].mul(&target_chi.values[i].conj()));
                }
                let q = sum.scale(&BigRational::new(
                    BigInt::from(1),
                    BigInt::from(domain.len() as i64),
                ));
                q.as_integer().expect("multiplicity must be an integer")
            };
            let entry: BigInt = match (s_piece, d_piece) {
                (Piece::Z, Piece::Z2) | (Piece::Z2, Piece::Z) => BigInt::zero(),
                (Piece::Z2, Piece::Z2) => {
                    // torsion to torsion: the magnetic multiplicity mod 2 is
                    // the plain multiplicity of the unscaled constituents
                    // (the source and target copy factors cancel)
                    let SummandData::SelfConj { chi: sb, .. } = s else {
                        unreachable!("torsion rows only occur for self-conjugate types")
                    };
                    debug_assert!(matches!(d, SummandData::SelfConj { .. }));
                    let a = u_on(sb, domain);
                    let mut sum = Cyclotomic::zero(1);
                    for i in 0..domain.len() {
                        sum = sum.add(&a[i].mul(&target_chi.values[i].conj()));
                    }
                    let q = sum.scale(&BigRational::new(
                        BigInt::from(1),
                        BigInt::from(domain.len() as i64),
                    ));
                    q.as_integer()
                        .expect("multiplicity must be an integer")
                        .mod_floor(&BigInt::from(2))
                }
                (Piece::Z, Piece::Z) => {
                    if k_odd {
                        debug_assert!(
                            matches!(s, SummandData::KuLike { .. })
                                && matches!(d, SummandData::KuLike { .. }),
                            "KO/KSp have no free rows at t = 2 mod 4"
                        );
                        mult_of_target() * BigInt::from(omega)
                    } else {
                        match d {
                            SummandData::KuLike { .. } => mult_of_target(),
                            SummandData::SelfConj { copies, .. } => {
                                let m = mult_of_target();
                                let c = BigInt::from(*copies);
                                let (q, r) = m.div_rem(&c);
                                assert!(r.is_zero(), "magnetic multiplicity must divide evenly");
                                q
                            }
                        }
                    }
                }
                _ => BigInt::zero(),
            };
            matrix[(di, sj)] = entry;
        }
    }
    Ok(RestrictionOutcome { matrix, warnings })
}

/// Periodicity of the coefficient rows: 4 when the pullback extension
/// splits, 8 otherwise.
pub fn periodicity(g: &MagneticGroup) -> (u32, Option<Vec<usize>>) {
    let ext = crate::group::pullback_extension(g);
    match crate::group::extension_splits(&ext) {
        Some(section) => (4, Some(section)),
        None => (8, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::group::{CentralExtension, KernelCharacter};

    fn z4() -> MagneticGroup {
        catalog::magnetic_cyclic(4)
    }

    fn soc_twist() -> Twist {
        let mg = z4();
        let total = catalog::magnetic_cyclic(8);
        let ext = CentralExtension::new(
            total.group.clone(),
            total.phi.clone(),
            mg.group.clone(),
            mg.phi.clone(),
            (0..8).map(|t| t % 4).collect(),
        )
        .unwrap();
        let chi = KernelCharacter::new(&ext, vec![1, -1]).unwrap();
        Twist {
            ext,
            character: chi,
        }
    }

    #[test]
    fn point_rows_of_z4() {
        let ring = classify_magnetic_irreps(&z4(), 64).unwrap();
        // t = 0: Z^2, t = -1: Z/2, t = -3: 0
        assert_eq!(point_coefficients(&ring, 0).group, FgAbelianGroup::free(2));
        assert_eq!(
            point_coefficients(&ring, -1).group,
            FgAbelianGroup::torsion_i64(&[2])
        );
        assert!(point_coefficients(&ring, -3).group.is_zero());
    }

    #[test]
    fn coefok_table_for_all_small_counts() {
        for n_r in 0..=3usize {
            for n_c in 0..=3usize {
                for n_h in 0..=3usize {
                    let ring = MagneticRepRing::with_counts(n_r, n_c, n_h);
                    let expected = |q: usize| -> FgAbelianGroup {
                        let mut g = FgAbelianGroup::zero();
                        let z = |n: usize| FgAbelianGroup::free(n);
                        let z2 = |n: usize| FgAbelianGroup {
                            rank: 0,
                            torsion: vec![BigInt::from(2); n],
                        };
                        match q {
                            0 | 4 => {
                                g = g.direct_sum(&z(n_r)).direct_sum(&z(n_c)).direct_sum(&z(n_h))
                            }
                            1 => g = g.direct_sum(&z2(n_r)),
                            2 => g = g.direct_sum(&z2(n_r)).direct_sum(&z(n_c)),
                            3 | 7 => {}
                            5 => g = g.direct_sum(&z2(n_h)),
                            6 => g = g.direct_sum(&z(n_c)).direct_sum(&z2(n_h)),
                            _ => unreachable!(),
                        }
                        g
                    };
                    for q in 0..8i64 {
                        let row = point_coefficients(&ring, -q);
                        assert_eq!(
                            row.group,
                            expected(q as usize),
                            "counts ({}, {}, {}) at q = {}",
                            n_r,
                            n_c,
                            n_h,
                            q
                        );
                        // 8-periodicity
                        let row8 = point_coefficients(&ring, -q - 8);
                        assert_eq!(row.group, row8.group);
                    }
                }
            }
        }
    }

    #[test]
    fn orbit_rows_of_the_torus_cells() {
        let mg = z4();
        // Gamma cell: full stabilizer
        let gamma = orbit_cell(&mg, &[0, 1, 2, 3], None, 64).unwrap();
        let row = gamma.row(0);
        assert_eq!(row.group, FgAbelianGroup::free(2));
        assert_eq!(row.labels[0].irrep, "R1");
        assert_eq!(row.labels[1].irrep, "R2");
        // A cell: stabilizer {0, 2} in the core
        let a = orbit_cell(&mg, &[0, 2], None, 64).unwrap();
        assert_eq!(a.row(0).group, FgAbelianGroup::free(2));
        assert!(a.row(-1).group.is_zero());
        assert_eq!(a.row(0).labels[0].irrep, "R'1");
        // twisted Gamma: one complex irrep
        let tw = soc_twist();
        let gamma_tw = orbit_cell(&mg, &[0, 1, 2, 3], Some(&tw), 64).unwrap();
        assert_eq!(gamma_tw.row(0).group, FgAbelianGroup::free(1));
        assert!(gamma_tw.row(-1).group.is_zero());
    }

    #[test]
    fn restriction_gamma_to_edge() {
        let mg = z4();
        let gamma = orbit_cell(&mg, &[0, 1, 2, 3], None, 64).unwrap();
        let a = orbit_cell(&mg, &[0, 2], None, 64).unwrap();
        let edge = orbit_cell(&mg, &[0], None, 64).unwrap();
        // K0(G/G) -> K0(G/e): ranks 1 and 2
        let out = restriction_matrix(&mg, &gamma, &edge, 0, 0, None).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![1, 2]]);
        assert!(out.warnings.is_empty());
        // A cell to edge: 1 and 1
        let out = restriction_matrix(&mg, &a, &edge, 0, 0, None).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![1, 1]]);
        // identity orbit map: identity matrix
        let out = restriction_matrix(&mg, &edge, &edge, 0, 0, None).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![1]]);
    }

    #[test]
    fn twisted_restrictions_match_soc_displays() {
        let mg = z4();
        let tw = soc_twist();
        let gamma = orbit_cell(&mg, &[0, 1, 2, 3], Some(&tw), 64).unwrap();
        let a = orbit_cell(&mg, &[0, 2], Some(&tw), 64).unwrap();
        let edge = orbit_cell(&mg, &[0], Some(&tw), 64).unwrap();
        // rank-level: R -> 2, i/-i -> 1 each
        let out = restriction_matrix(&mg, &gamma, &edge, 0, 0, Some(&tw)).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![2]]);
        let out = restriction_matrix(&mg, &a, &edge, 0, 0, Some(&tw)).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![1, 1]]);
        // Bott degree -2: the complex pair cancels, the unitary cell does not
        let out = restriction_matrix(&mg, &gamma, &edge, 0, -2, Some(&tw)).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![0]]);
        let out = restriction_matrix(&mg, &a, &edge, 0, -2, Some(&tw)).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![1, 1]]);
    }

    #[test]
    fn conjugation_sign_on_bott_classes() {
        let mg = z4();
        let edge = orbit_cell(&mg, &[0], None, 64).unwrap();
        // antiunitary g = 1 acts by -1 on KU^-2 and trivially on KU^0
        let out = restriction_matrix(&mg, &edge, &edge, 1, -2, None).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![-1]]);
        let out = restriction_matrix(&mg, &edge, &edge, 1, 0, None).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![1]]);
        // involution: applying it twice is the identity
        let m = restriction_matrix(&mg, &edge, &edge, 1, -2, None)
            .unwrap()
            .matrix;
        let twice = m.mul(&m);
        assert_eq!(twice.to_i64_rows(), vec![vec![1]]);
    }

    #[test]
    fn equivariance_precondition() {
        let mg = z4();
        let gamma = orbit_cell(&mg, &[0, 1, 2, 3], None, 64).unwrap();
        let a = orbit_cell(&mg, &[0, 2], None, 64).unwrap();
        // map from the small stabilizer to the big one is ill defined
        let err = restriction_matrix(&mg, &a, &gamma, 0, 0, None).unwrap_err();
        assert_eq!(err, CoeffError::NotEquivariant);
    }

    #[test]
    fn trivial_stabilizer_gives_ku_row() {
        let mg = z4();
        let edge = orbit_cell(&mg, &[0], None, 64).unwrap();
        assert_eq!(edge.row(0).group, FgAbelianGroup::free(1));
        assert!(edge.row(-1).group.is_zero());
        assert_eq!(edge.row(-2).group, FgAbelianGroup::free(1));
    }

    #[test]
    fn periodicity_of_cyclic_groups() {
        // Z/2n splits exactly when n is even: a section needs a lift
        // beta: Z/2n -> Z/4 of the grading, and 2n * beta(1) = 0 mod 4 with
        // beta(1) odd forces n even. Z/6 and Z/10 are only 8-periodic.
        for n in [2usize, 4, 6, 8] {
            let mg = catalog::magnetic_cyclic(2 * n);
            let (p, section) = periodicity(&mg);
            assert_eq!(p, 4, "Z/{} splits", 2 * n);
            assert!(section.is_some());
        }
        for n in [1usize, 3, 5] {
            let mg = catalog::magnetic_cyclic(2 * n);
            let (p, section) = periodicity(&mg);
            assert_eq!(p, 8, "Z/{} does not split", 2 * n);
            assert!(section.is_none());
        }
    }

    #[test]
    fn four_periodicity_of_rows_iff_split() {
        // split case: rows agree at t and t-4
        let mg = z4();
        let ring = classify_magnetic_irreps(&mg, 64).unwrap();
        for t in 0..8i64 {
            let a = point_coefficients(&ring, -t);
            let b = point_coefficients(&ring, -t - 4);
            assert_eq!(a.group, b.group);
        }
        // Z/2 is only 8-periodic: row(-1) = Z/2 but row(-5) = 0
        let mg2 = catalog::magnetic_cyclic(2);
        let ring2 = classify_magnetic_irreps(&mg2, 64).unwrap();
        assert_ne!(
            point_coefficients(&ring2, -1).group,
            point_coefficients(&ring2, -5).group
        );
    }

    #[test]
    fn functoriality_on_subgroup_chains() {
        // chains inside Z/8 magnetic: {0} <= {0,4} <= {0,2,4,6} <= G
        let mg = catalog::magnetic_cyclic(8);
        let chains: Vec<Vec<usize>> = vec![
            (0..8).collect(),
            vec![0, 2, 4, 6],
            vec![0, 4],
            vec![0],
        ];
        for i in 0..chains.len() {
            for j in (i + 1)..chains.len() {
                for k in (j + 1)..chains.len() {
                    let big = orbit_cell(&mg, &chains[i], None, 64).unwrap();
                    let mid = orbit_cell(&mg, &chains[j], None, 64).unwrap();
                    let small = orbit_cell(&mg, &chains[k], None, 64).unwrap();
                    for t in [0i64, -1, -2, -4, -5, -6] {
                        for g1 in 0..8usize {
                            for g2 in 0..8usize {
                                let leg1 =
                                    restriction_matrix(&mg, &big, &mid, g1, t, None).unwrap();
                                let leg2 =
                                    restriction_matrix(&mg, &mid, &small, g2, t, None).unwrap();
                                let composite = mg.group.mul(g2, g1);
                                let direct = restriction_matrix(
                                    &mg, &big, &small, composite, t, None,
                                )
                                .unwrap();
                                assert_eq!(
                                    leg2.matrix.mul(&leg1.matrix),
                                    direct.matrix,
                                    "chain ({},{},{}) t={} g1={} g2={}",
                                    i,
                                    j,
                                    k,
                                    t,
                                    g1,
                                    g2
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn identity_restriction_on_quaternionic_torsion_rows() {
        // Z/8 magnetic has a quaternionic irrep whose KSp row at t = -5 is
        // Z/2; the identity orbit map must be the identity there.
        let mg = catalog::magnetic_cyclic(8);
        let cell = orbit_cell(&mg, &(0..8).collect::<Vec<_>>(), None, 64).unwrap();
        let row = cell.row(-5);
        assert_eq!(row.group, FgAbelianGroup::torsion_i64(&[2]));
        let out = restriction_matrix(&mg, &cell, &cell, 0, -5, None).unwrap();
        assert_eq!(out.matrix.to_i64_rows(), vec![vec![1]]);
    }

    #[test]
    fn antiunitary_flag_on_ko_summands() {
        let mg = z4();
        let gamma = orbit_cell(&mg, &[0, 1, 2, 3], None, 64).unwrap();
        let out = restriction_matrix(&mg, &gamma, &gamma, 1, 0, None).unwrap();
        assert!(!out.warnings.is_empty());
        let out = restriction_matrix(&mg, &gamma, &gamma, 2, 0, None).unwrap();
        assert!(out.warnings.is_empty());
    }
}
