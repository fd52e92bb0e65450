//! Finite G-CW complexes with stabilizers and incidence data. Incidence
//! records carry the group element and sign of each geometric intersection
//! point; they are input data, read off a figure, not computed from
//! geometry.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{solve, Mat};
use crate::coeff::{orbit_cell, restriction_matrix, CoeffError, OrbitCell};
use crate::group::{MagneticGroup, Twist};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("duplicate cell id {0}")]
    DuplicateCell(String),
    #[error("incidence references unknown cell {0}")]
    UnknownCell(String),
    #[error("incidence {upper} over {lower} connects dimensions {du} and {dl}")]
    BadIncidenceDimension {
        upper: String,
        lower: String,
        du: usize,
        dl: usize,
    },
    #[error("orbit map ill defined for incidence {upper} over {lower} with g = {g}")]
    OrbitMapIllDefined {
        upper: String,
        lower: String,
        g: usize,
    },
    #[error("d o d is nonzero at (n, t) = ({n}, {t})")]
    DSquaredNonzero { n: usize, t: i64 },
    #[error("cell orientation must be +1 or -1")]
    BadOrientation,
    #[error("complexes of dimension {0} are unsupported; the filtration analysis assumes dimension <= 3")]
    UnsupportedDimension(usize),
    #[error("incidence sign must be +1 or -1")]
    BadIncidenceSign,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// JSON-facing description of one equivariant cell G/H x D^n.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellSpec {
    pub id: String,
    pub dim: usize,
    pub stabilizer: Vec<usize>,
    #[serde(default = "default_orientation")]
    pub orientation: i8,
}

fn default_orientation() -> i8 {
    1
}

/// One geometric intersection point of the attaching map of `upper` with
/// the cell `lower`: the orbit map uses `g`, the orientation gives `sign`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncidenceSpec {
    pub upper: String,
    pub lower: String,
    pub g: usize,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GcwComplex {
    pub cells: Vec<CellSpec>,
    pub incidences: Vec<IncidenceSpec>,
}

/// A validated complex with precomputed orbit coefficient data.
pub struct CheckedComplex {
    pub cells: Vec<CheckedCell>,
    /// cell indices grouped by dimension
    pub by_dim: Vec<Vec<usize>>,
    /// (upper cell index, lower cell index, g, sign)
    pub incidences: Vec<(usize, usize, usize, i8)>,
    pub top_dim: usize,
}

pub struct CheckedCell {
    pub id: String,
    pub dim: usize,
    pub orientation: i8,
    pub orbit: OrbitCell,
}

/// Differential data for one degree t: the block matrices from dimension n
/// to n + 1, plus flags raised during assembly.
pub struct Differentials {
    pub t: i64,
    /// matrices[n]: sum of cell rows at dim n -> dim n + 1
    pub matrices: Vec<Mat>,
    pub warnings: Vec<String>,
}

/// Validates cell and incidence data and precomputes coefficient cells.
/// d o d = 0 is checked for every t in `t_range` (checked, not assumed).
pub fn validate_complex(
    spec: &GcwComplex,
    g: &MagneticGroup,
    twist: Option<&Twist>,
    t_range: &[i64],
    max_order: usize,
) -> Result<CheckedComplex, ComplexError> {
    let mut cells: Vec<CheckedCell> = Vec::new();
    for c in &spec.cells {
        if cells.iter().any(|x| x.id == c.id) {
            return Err(ComplexError::DuplicateCell(c.id.clone()));
        }
        if c.orientation != 1 && c.orientation != -1 {
            return Err(ComplexError::BadOrientation);
        }
        let orbit = orbit_cell(g, &c.stabilizer, twist, max_order)?;
        cells.push(CheckedCell {
            id: c.id.clone(),
            dim: c.dim,
            orientation: c.orientation,
            orbit,
        });
    }
    let top_dim = cells.iter().map(|c| c.dim).max().unwrap_or(0);
    if top_dim > 3 {
        return Err(ComplexError::UnsupportedDimension(top_dim));
    }
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top_dim + 1];
    for (i, c) in cells.iter().enumerate() {
        by_dim[c.dim].push(i);
    }
    let find = |id: &str| -> Result<usize, ComplexError> {
        cells
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| ComplexError::UnknownCell(id.to_string()))
    };
    let mut incidences = Vec::new();
    for inc in &spec.incidences {
        let u = find(&inc.upper)?;
        let l = find(&inc.lower)?;
        if cells[u].dim != cells[l].dim + 1 {
            return Err(ComplexError::BadIncidenceDimension {
                upper: inc.upper.clone(),
                lower: inc.lower.clone(),
                du: cells[u].dim,
                dl: cells[l].dim,
            });
        }
        if inc.sign != 1 && inc.sign != -1 {
            return Err(ComplexError::BadIncidenceSign);
        }
        // orbit map condition: g^-1 H_upper g inside H_lower
        for &h in &cells[u].orbit.base_stabilizer {
            let conj = g.group.mul(g.group.mul(g.group.inverse(inc.g), h), inc.g);
            if !cells[l].orbit.base_stabilizer.contains(&conj) {
                return Err(ComplexError::OrbitMapIllDefined {
                    upper: inc.upper.clone(),
                    lower: inc.lower.clone(),
                    g: inc.g,
                });
            }
        }
        incidences.push((u, l, inc.g, inc.sign));
    }
    let checked = CheckedComplex {
        cells,
        by_dim,
        incidences,
        top_dim,
    };
    // d o d = 0 at every requested degree
    for &t in t_range {
        let d = differentials(&checked, g, twist, t)?;
        for n in 0..checked.top_dim.saturating_sub(1) {
            let prod = d.matrices[n + 1].mul(&d.matrices[n]);
            let rels = dim_presentation(&checked, n + 2, t);
            if solve(&rels, &prod).is_none() {
                return Err(ComplexError::DSquaredNonzero { n, t });
            }
        }
    }
    Ok(checked)
}

/// Relation matrix of the cochain group at dimension n, degree t.
fn dim_presentation(x: &CheckedComplex, n: usize, t: i64) -> Mat {
    let mut orders: Vec<num::BigInt> = Vec::new();
    if n <= x.top_dim {
        for &ci in &x.by_dim[n] {
            orders.extend(x.cells[ci].orbit.row(t).orders.iter().cloned());
        }
    }
    crate::abelian::Presentation::from_orders(&orders).rels
}

/// Assembles the Bredon coboundary at degree t: the block of the matrix
/// from lower cell b to upper cell c is the signed sum of coefficient
/// restrictions over all incidence records joining them.
pub fn differentials(
    x: &CheckedComplex,
    g: &MagneticGroup,
    twist: Option<&Twist>,
    t: i64,
) -> Result<Differentials, ComplexError> {
    let mut matrices = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    for n in 0..x.top_dim {
        let src_cells = &x.by_dim[n];
        let dst_cells = &x.by_dim[n + 1];
        let src_sizes: Vec<usize> = src_cells
            .iter()
            .map(|&ci| x.cells[ci].orbit.row(t).orders.len())
            .collect();
        let dst_sizes: Vec<usize> = dst_cells
            .iter()
            .map(|&ci| x.cells[ci].orbit.row(t).orders.len())
            .collect();
        let src_total: usize = src_sizes.iter().sum();
        let dst_total: usize = dst_sizes.iter().sum();
        let mut m = Mat::zeros(dst_total, src_total);
        for &(u, l, gg, sign) in &x.incidences {
            if x.cells[u].dim != n + 1 {
                continue;
            }
            let bi = src_cells.iter().position(|&c| c == l).unwrap();
            let ci = dst_cells.iter().position(|&c| c == u).unwrap();
            let row_off: usize = dst_sizes[..ci].iter().sum();
            let col_off: usize = src_sizes[..bi].iter().sum();
            let out = restriction_matrix(g, &x.cells[l].orbit, &x.cells[u].orbit, gg, t, twist)?;
            for w in out.warnings {
                let msg = format!("{} -> {}: {}", x.cells[l].id, x.cells[u].id, w);
                if !warnings.contains(&msg) {
                    warnings.push(msg);
                }
            }
            let s = num::BigInt::from(
                (sign as i64) * (x.cells[u].orientation as i64) * (x.cells[l].orientation as i64),
            );
            for r in 0..out.matrix.rows {
                for c in 0..out.matrix.cols {
                    let v = &out.matrix[(r, c)] * &s;
                    m[(row_off + r, col_off + c)] += v;
                }
            }
        }
        matrices.push(m);
    }
    Ok(Differentials {
        t,
        matrices,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn z4() -> MagneticGroup {
        catalog::magnetic_cyclic(4)
    }

    /// The Z/4 torus complex with the orientation fixture reproducing the
    /// reference differential matrices.
    pub fn torus_complex() -> GcwComplex {
        let cell = |id: &str, dim: usize, stab: Vec<usize>| CellSpec {
            id: id.into(),
            dim,
            stabilizer: stab,
            orientation: 1,
        };
        let inc = |upper: &str, lower: &str, g: usize, sign: i8| IncidenceSpec {
            upper: upper.into(),
            lower: lower.into(),
            g,
            sign,
        };
        GcwComplex {
            cells: vec![
                cell("Gamma", 0, vec![0, 1, 2, 3]),
                cell("A", 0, vec![0, 2]),
                cell("X", 0, vec![0, 1, 2, 3]),
                cell("gamma", 1, vec![0]),
                cell("sigma", 1, vec![0]),
                cell("Omega", 2, vec![0]),
            ],
            incidences: vec![
                inc("gamma", "A", 0, -1),
                inc("gamma", "X", 0, 1),
                inc("sigma", "Gamma", 0, -1),
                inc("sigma", "A", 0, 1),
                inc("Omega", "gamma", 0, 1),
                inc("Omega", "gamma", 1, -1),
                inc("Omega", "sigma", 0, 1),
                inc("Omega", "sigma", 3, -1),
            ],
        }
    }

    #[test]
    fn torus_validates() {
        let mg = z4();
        let t_range: Vec<i64> = (0..4).map(|q| -q).collect();
        let x = validate_complex(&torus_complex(), &mg, None, &t_range, 64).unwrap();
        assert_eq!(x.top_dim, 2);
        assert_eq!(x.by_dim[0].len(), 3);
        assert_eq!(x.by_dim[1].len(), 2);
        assert_eq!(x.by_dim[2].len(), 1);
    }

    #[test]
    fn single_fixed_point_validates() {
        let mg = z4();
        let x = GcwComplex {
            cells: vec![CellSpec {
                id: "pt".into(),
                dim: 0,
                stabilizer: vec![0, 1, 2, 3],
                orientation: 1,
            }],
            incidences: vec![],
        };
        let checked = validate_complex(&x, &mg, None, &[0, -1, -2, -3], 64).unwrap();
        assert_eq!(checked.top_dim, 0);
    }

    #[test]
    fn high_dimensional_complexes_rejected() {
        let mg = z4();
        let x = GcwComplex {
            cells: vec![CellSpec {
                id: "c".into(),
                dim: 4,
                stabilizer: vec![0],
                orientation: 1,
            }],
            incidences: vec![],
        };
        match validate_complex(&x, &mg, None, &[0], 64) {
            Err(ComplexError::UnsupportedDimension(4)) => {}
            other => panic!("expected UnsupportedDimension, got {:?}", other.err()),
        }
    }

    #[test]
    fn bad_stabilizer_condition_detected() {
        let mg = z4();
        // an edge with full stabilizer attached to a vertex with a small one
        let x = GcwComplex {
            cells: vec![
                CellSpec {
                    id: "v".into(),
                    dim: 0,
                    stabilizer: vec![0, 2],
                    orientation: 1,
                },
                CellSpec {
                    id: "e".into(),
                    dim: 1,
                    stabilizer: vec![0, 1, 2, 3],
                    orientation: 1,
                },
            ],
            incidences: vec![IncidenceSpec {
                upper: "e".into(),
                lower: "v".into(),
                g: 0,
                sign: 1,
            }],
        };
        match validate_complex(&x, &mg, None, &[0], 64) {
            Err(ComplexError::OrbitMapIllDefined { .. }) => {}
            Err(other) => panic!("unexpected error {:?}", other),
            Ok(_) => panic!("expected OrbitMapIllDefined"),
        }
    }

    #[test]
    fn torus_d1_matrices_match_reference_values() {
        let mg = z4();
        let t_range: Vec<i64> = (0..4).map(|q| -q).collect();
        let x = validate_complex(&torus_complex(), &mg, None, &t_range, 64).unwrap();
        // t = 0, n = 0: rows gamma, sigma; cols Gamma(R1 R2) A(R'1 R'2) X(R1 R2)
        let d = differentials(&x, &mg, None, 0).unwrap();
        assert_eq!(
            d.matrices[0].to_i64_rows(),
            vec![vec![0, 0, -1, -1, 1, 2], vec![-1, -2, 1, 1, 0, 0]]
        );
        // t = 0, n = 1: (0, 0)
        assert_eq!(d.matrices[1].to_i64_rows(), vec![vec![0, 0]]);
        // t = -2, n = 1: (2, 2)
        let d = differentials(&x, &mg, None, -2).unwrap();
        assert_eq!(d.matrices[1].to_i64_rows(), vec![vec![2, 2]]);
        // t = -2, n = 0: torsion columns vanish, A block survives
        assert_eq!(
            d.matrices[0].to_i64_rows(),
            vec![vec![0, -1, -1, 0], vec![0, 1, 1, 0]]
        );
    }

    #[test]
    fn orientation_flip_negates_rows_and_columns() {
        let mg = z4();
        let t_range: Vec<i64> = (0..4).map(|q| -q).collect();
        let mut spec = torus_complex();
        spec.cells[3].orientation = -1; // flip gamma
        let x = validate_complex(&spec, &mg, None, &t_range, 64).unwrap();
        let d = differentials(&x, &mg, None, 0).unwrap();
        // the gamma row of d1(0) and the gamma column of d1(1) negate
        assert_eq!(
            d.matrices[0].to_i64_rows(),
            vec![vec![0, 0, 1, 1, -1, -2], vec![-1, -2, 1, 1, 0, 0]]
        );
        let dm2 = differentials(&x, &mg, None, -2).unwrap();
        assert_eq!(dm2.matrices[1].to_i64_rows(), vec![vec![-2, 2]]);
    }

    #[test]
    fn torus_twisted_d1_matrices() {
        let mg = z4();
        let total = catalog::magnetic_cyclic(8);
        let ext = crate::group::CentralExtension::new(
            total.group.clone(),
            total.phi.clone(),
            mg.group.clone(),
            mg.phi.clone(),
            (0..8).map(|t| t % 4).collect(),
        )
        .unwrap();
        let chi = crate::group::KernelCharacter::new(&ext, vec![1, -1]).unwrap();
        let tw = Twist {
            ext,
            character: chi,
        };
        let t_range: Vec<i64> = (0..4).map(|q| -q).collect();
        let x = validate_complex(&torus_complex(), &mg, Some(&tw), &t_range, 64).unwrap();
        let d = differentials(&x, &mg, Some(&tw), 0).unwrap();
        assert_eq!(
            d.matrices[0].to_i64_rows(),
            vec![vec![0, -1, -1, 2], vec![-2, 1, 1, 0]]
        );
        assert_eq!(d.matrices[1].to_i64_rows(), vec![vec![0, 0]]);
        let d = differentials(&x, &mg, Some(&tw), -2).unwrap();
        assert_eq!(
            d.matrices[0].to_i64_rows(),
            vec![vec![0, -1, -1, 0], vec![0, 1, 1, 0]]
        );
        assert_eq!(d.matrices[1].to_i64_rows(), vec![vec![2, 2]]);
    }
}
