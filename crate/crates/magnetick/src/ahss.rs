//! The Atiyah-Hirzebruch spectral sequence over a finite G-CW complex:
//! first page assembly, page turning by subquotients, user-supplied higher
//! differentials, and the filtration-graded K-theory report with extension
//! ambiguity flags.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{subquotient, AbMorphism, AbelianError, FgAbelianGroup, Mat, Presentation};
use crate::coeff::periodicity;
use crate::complex::{differentials, validate_complex, CheckedComplex, ComplexError, GcwComplex};
use crate::group::{MagneticGroup, Twist};

#[derive(Debug, Error)]
pub enum AhssError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error("override at page {page} from ({n}, {t}): matrix shape {got_rows}x{got_cols} does not match {want_rows}x{want_cols}")]
    ShapeMismatch {
        page: u32,
        n: i64,
        t: i64,
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("override at page {0} targets a bidegree outside the computed window")]
    BadOverrideBidegree(u32),
    #[error("page still carries nonzero differentials; turn it before reading the limit")]
    PageNotStable,
    #[error("extension assertion at degree {0} is inconsistent with the graded pieces")]
    AssertionInvalid(i64),
}

/// A user-supplied higher differential, given on the reported generator
/// bases of the two entries it connects.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DifferentialOverride {
    pub page: u32,
    /// source bidegree (n, t)
    pub from: (i64, i64),
    /// rows indexed by target generators, columns by source generators
    pub matrix: Vec<Vec<i64>>,
}

/// A user assertion resolving the extension problem at one degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionAssertion {
    pub degree: i64,
    /// "split" or "nonsplit"
    pub kind: String,
    /// required for "nonsplit": the asserted total group
    #[serde(default)]
    pub total: Option<AssertedGroup>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssertedGroup {
    pub rank: usize,
    #[serde(default)]
    pub torsion: Vec<i64>,
}

/// One entry of a spectral page.
#[derive(Clone, Debug)]
pub struct PageEntry {
    pub pres: Presentation,
    pub group: FgAbelianGroup,
    pub labels: Vec<String>,
    /// first-page coordinates of each generator (E1-gens x gens)
    pub lifts: Mat,
}

impl PageEntry {
    fn zero() -> PageEntry {
        PageEntry {
            pres: Presentation::free(0),
            group: FgAbelianGroup::zero(),
            labels: vec![],
            lifts: Mat::zeros(0, 0),
        }
    }
}

/// A bigraded page with its differentials d_r: (n, t) -> (n + r, t - r + 1).
#[derive(Clone, Debug)]
pub struct SpectralPage {
    pub r: u32,
    pub period: u32,
    pub top_dim: usize,
    pub entries: BTreeMap<(i64, i64), PageEntry>,
    pub diffs: BTreeMap<(i64, i64), Mat>,
}

impl SpectralPage {
    pub fn fold_t(&self, t: i64) -> i64 {
        -((-t).rem_euclid(self.period as i64))
    }

    pub fn entry(&self, n: i64, t: i64) -> &PageEntry {
        static EMPTY: std::sync::OnceLock<PageEntry> = std::sync::OnceLock::new();
        let folded = self.fold_t(t);
        self.entries
            .get(&(n, folded))
            .unwrap_or_else(|| EMPTY.get_or_init(PageEntry::zero))
    }

    /// Differentials of this page compose with the incoming ones to zero
    /// and run off the board eventually; zero when none was installed.
    pub fn diff_matrix(&self, n: i64, t: i64) -> Mat {
        let folded = self.fold_t(t);
        match self.diffs.get(&(n, folded)) {
            Some(m) => m.clone(),
            None => {
                let src = self.entry(n, t).pres.gens;
                let dst = self
                    .entry(n + self.r as i64, t - self.r as i64 + 1)
                    .pres
                    .gens;
                Mat::zeros(dst, src)
            }
        }
    }

    pub fn has_nonzero_diffs(&self) -> bool {
        self.diffs.values().any(|m| !m.is_zero())
    }

    /// True when every potential differential has zero source or target.
    pub fn no_possible_differentials(&self) -> bool {
        for (&(n, t), e) in &self.entries {
            if e.pres.gens == 0 {
                continue;
            }
            let target = self.entry(n + self.r as i64, t - self.r as i64 + 1);
            if target.pres.gens > 0 && n + (self.r as i64) <= self.top_dim as i64 {
                return false;
            }
        }
        true
    }

    /// Turns the page: homology at every node, labels lifted through.
    pub fn turn(&self) -> Result<SpectralPage, AhssError> {
        let r = self.r as i64;
        let mut entries = BTreeMap::new();
        for (&(n, t), e) in &self.entries {
            let incoming_src = self.entry(n - r, t + r - 1);
            let incoming = AbMorphism::new(
                incoming_src.pres.clone(),
                e.pres.clone(),
                self.diff_matrix(n - r, t + r - 1),
            )
            .map_err(AhssError::Abelian)?;
            let outgoing_dst = self.entry(n + r, t - r + 1);
            let outgoing = AbMorphism::new(
                e.pres.clone(),
                outgoing_dst.pres.clone(),
                self.diff_matrix(n, t),
            )
            .map_err(AhssError::Abelian)?;
            let sq = subquotient(&incoming, &outgoing).map_err(|err| match err {
                AbelianError::NotAComplex => AhssError::Abelian(AbelianError::NotAComplex),
                e => AhssError::Abelian(e),
            })?;
            let lifts = e.lifts.mul(&sq.lifts);
            let labels = render_labels(&sq.group, &lifts);
            let pres = Presentation::of_canonical(&sq.group);
            entries.insert(
                (n, t),
                PageEntry {
                    pres,
                    group: sq.group,
                    labels,
                    lifts,
                },
            );
        }
        Ok(SpectralPage {
            r: self.r + 1,
            period: self.period,
            top_dim: self.top_dim,
            entries,
            diffs: BTreeMap::new(),
        })
    }

    /// Installs overrides for this page number; shapes and compatibility are
    /// validated against the computed entries.
    pub fn apply_overrides(&mut self, overrides: &[DifferentialOverride]) -> Result<(), AhssError> {
        for ov in overrides {
            if ov.page != self.r {
                continue;
            }
            let (n, t) = ov.from;
            let folded = self.fold_t(t);
            if !self.entries.contains_key(&(n, folded)) {
                return Err(AhssError::BadOverrideBidegree(ov.page));
            }
            let src = self.entry(n, t).pres.clone();
            let dst_entry = self.entry(n + self.r as i64, t - self.r as i64 + 1);
            let dst = dst_entry.pres.clone();
            let rows = ov.matrix.len();
            let cols = ov.matrix.first().map_or(0, |r| r.len());
            if rows != dst.gens || ov.matrix.iter().any(|r| r.len() != cols) || cols != src.gens {
                return Err(AhssError::ShapeMismatch {
                    page: ov.page,
                    n,
                    t,
                    got_rows: rows,
                    got_cols: cols,
                    want_rows: dst.gens,
                    want_cols: src.gens,
                });
            }
            let m = Mat::from_rows_i64(&ov.matrix);
            AbMorphism::new(src, dst, m.clone()).map_err(AhssError::Abelian)?;
            self.diffs.insert((n, folded), m);
        }
        Ok(())
    }

    pub fn total_rank(&self) -> usize {
        self.entries.values().map(|e| e.group.rank).sum()
    }
}

/// The E1 page: direct sums of orbit coefficient rows with the assembled
/// Bredon coboundary as d1.
pub fn e1_page(
    x: &CheckedComplex,
    g: &MagneticGroup,
    twist: Option<&Twist>,
    period: u32,
    top_dim: usize,
) -> Result<(SpectralPage, Vec<String>), AhssError> {
    let mut entries = BTreeMap::new();
    let t_range: Vec<i64> = (0..period as i64).map(|q| -q).collect();
    for &t in &t_range {
        for n in 0..=top_dim {
            let mut orders: Vec<BigInt> = Vec::new();
            let mut labels: Vec<String> = Vec::new();
            if n <= x.top_dim {
                for &ci in &x.by_dim[n] {
                    let row = x.cells[ci].orbit.row(t);
                    for (label, order) in row.labels.iter().zip(row.orders.iter()) {
                        labels.push(format!("{}:{}", x.cells[ci].id, label.render()));
                        orders.push(order.clone());
                    }
                }
            }
            let pres = Presentation::from_orders(&orders);
            let (group, _) = pres.canonical();
            let gens = pres.gens;
            entries.insert(
                (n as i64, t),
                PageEntry {
                    pres,
                    group,
                    labels,
                    lifts: Mat::identity(gens),
                },
            );
        }
    }
    let mut diffs = BTreeMap::new();
    let mut warnings = Vec::new();
    for &t in &t_range {
        let d = differentials(x, g, twist, t)?;
        for w in d.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        for (n, m) in d.matrices.into_iter().enumerate() {
            if !m.is_zero() {
                diffs.insert((n as i64, t), m);
            }
        }
    }
    Ok((
        SpectralPage {
            r: 1,
            period,
            top_dim,
            entries,
            diffs,
        },
        warnings,
    ))
}

/// Pretty label for a page generator: its lift as a combination of
/// first-page generators.
fn render_labels(group: &FgAbelianGroup, lifts: &Mat) -> Vec<String> {
    // coordinate expressions in the first-page basis; the report layer
    // substitutes the first-page generator names
    let gens = group.rank + group.torsion.len();
    (0..gens)
        .map(|j| {
            let mut terms: Vec<String> = Vec::new();
            for i in 0..lifts.rows {
                let c = &lifts[(i, j)];
                if c.is_zero() {
                    continue;
                }
                let coeff = if c.is_one() {
                    String::new()
                } else if (-c).is_one() {
                    "-".to_string()
                } else {
                    format!("{}*", c)
                };
                terms.push(format!("{}e{}", coeff, i));
            }
            if terms.is_empty() {
                "0".to_string()
            } else {
                let mut s = String::new();
                for (k, term) in terms.iter().enumerate() {
                    if k == 0 {
                        s.push_str(term);
                    } else if let Some(stripped) = term.strip_prefix('-') {
                        s.push_str(" - ");
                        s.push_str(stripped);
                    } else {
                        s.push_str(" + ");
                        s.push_str(term);
                    }
                }
                s
            }
        })
        .collect()
}

/// The filtration-graded pieces of one K-group degree.
#[derive(Clone, Debug)]
pub struct GradedKReport {
    /// reports K^degree with degree = -n
    pub degree: i64,
    /// graded pieces E_inf^{p, degree - p} in filtration order p = 0, 1, ...
    pub pieces: Vec<FgAbelianGroup>,
    /// set when some quotient piece has torsion over a nonzero deeper piece
    pub ambiguous: bool,
    /// the assembled total; None when ambiguous and unasserted
    pub total: Option<FgAbelianGroup>,
    pub assertion: Option<ExtensionAssertion>,
}

/// Reads the stabilized page off into graded K-groups; degrees lists the
/// values -n to report. Extension assertions resolve flagged degrees.
pub fn graded_k_report(
    page: &SpectralPage,
    degrees: &[i64],
    assertions: &[ExtensionAssertion],
) -> Result<Vec<GradedKReport>, AhssError> {
    if page.has_nonzero_diffs() {
        return Err(AhssError::PageNotStable);
    }
    let mut out = Vec::new();
    for &deg in degrees {
        let pieces: Vec<FgAbelianGroup> = (0..=page.top_dim as i64)
            .map(|p| page.entry(p, deg - p).group.clone())
            .collect();
        // ambiguity: a torsion quotient piece sitting over a nonzero deeper
        // piece leaves the extension problem open
        let mut ambiguous = false;
        for p in 0..pieces.len() {
            if !pieces[p].torsion.is_empty()
                && pieces[(p + 1)..].iter().any(|q| !q.is_zero())
            {
                ambiguous = true;
            }
        }
        let assertion = assertions.iter().find(|a| a.degree == deg).cloned();
        let direct_sum = pieces
            .iter()
            .fold(FgAbelianGroup::zero(), |acc, p| acc.direct_sum(p));
        let total = if !ambiguous {
            Some(direct_sum.clone())
        } else {
            match &assertion {
                None => None,
                Some(a) if a.kind == "split" => Some(direct_sum.clone()),
                Some(a) => {
                    let asserted = a
                        .total
                        .as_ref()
                        .ok_or(AhssError::AssertionInvalid(deg))?;
                    let total = FgAbelianGroup::with(asserted.rank, &asserted.torsion);
                    validate_extension_total(&pieces, &total)
                        .then_some(total)
                        .ok_or(AhssError::AssertionInvalid(deg))
                        .map(Some)?
                }
            }
        };
        out.push(GradedKReport {
            degree: deg,
            pieces,
            ambiguous,
            total,
            assertion,
        });
    }
    Ok(out)
}

/// Sanity constraints every iterated extension of the pieces satisfies:
/// the rank adds up, the torsion subgroup of each piece embeds, and the
/// total torsion order divides the product of the pieces' torsion orders.
fn validate_extension_total(pieces: &[FgAbelianGroup], total: &FgAbelianGroup) -> bool {
    let rank_sum: usize = pieces.iter().map(|p| p.rank).sum();
    if total.rank != rank_sum {
        return false;
    }
    let torsion_order = |g: &FgAbelianGroup| -> BigInt {
        g.torsion.iter().fold(BigInt::one(), |acc, d| acc * d)
    };
    let product: BigInt = pieces.iter().map(torsion_order).product();
    let t = torsion_order(total);
    if t.is_zero() {
        return false;
    }
    (product % &t).is_zero()
}

/// Everything a run of the spectral sequence produces.
#[derive(Debug)]
pub struct AhssRun {
    pub period: u32,
    pub section: Option<Vec<usize>>,
    pub pages: Vec<SpectralPage>,
    pub graded: Vec<GradedKReport>,
    pub warnings: Vec<String>,
    pub overrides: Vec<DifferentialOverride>,
    pub assertions: Vec<ExtensionAssertion>,
    pub cell_labels: BTreeMap<(i64, i64), Vec<String>>,
}

/// Runs the full pipeline: validation, E1 and d1, page turning with
/// overrides, and the graded report at the requested degrees.
pub fn run_ahss(
    g: &MagneticGroup,
    spec: &GcwComplex,
    twist: Option<&Twist>,
    overrides: &[DifferentialOverride],
    assertions: &[ExtensionAssertion],
    degrees: Option<Vec<i64>>,
    max_order: usize,
) -> Result<AhssRun, AhssError> {
    // periodicity from the total group when twisted (the twisted theory is a
    // summand of the total group's K-theory)
    let (period, section) = match twist {
        None => periodicity(g),
        Some(tw) => {
            let total = crate::group::build_group(
                crate::catalog::group_to_table(&tw.ext.total),
                tw.ext.total_phi.clone(),
            )
            .expect("twist total is a valid magnetic group");
            periodicity(&total)
        }
    };
    let t_range: Vec<i64> = (0..period as i64).map(|q| -q).collect();
    let x = validate_complex(spec, g, twist, &t_range, max_order)?;
    let (mut page, warnings) = e1_page(&x, g, twist, period, x.top_dim)?;
    let mut cell_labels = BTreeMap::new();
    for (&k, e) in &page.entries {
        cell_labels.insert(k, e.labels.clone());
    }
    let mut pages = vec![page.clone()];
    let max_override_page = overrides.iter().map(|o| o.page).max().unwrap_or(0);
    loop {
        let r = page.r;
        if r >= 2 {
            page.apply_overrides(overrides)?;
            pages.pop();
            pages.push(page.clone());
        }
        // stabilization: stop once no differentials are installed and the
        // override list is exhausted (the user's declaration); a right
        // half-plane with finitely many columns guarantees termination.
        let keep_turning = page.has_nonzero_diffs() || r < 2 || r < max_override_page;
        if !keep_turning || r as usize > x.top_dim + 2 {
            break;
        }
        page = page.turn()?;
        pages.push(page.clone());
    }
    let degrees = degrees.unwrap_or_else(|| t_range.clone());
    let graded = graded_k_report(pages.last().unwrap(), &degrees, assertions)?;
    Ok(AhssRun {
        period,
        section,
        pages,
        graded,
        warnings,
        overrides: overrides.to_vec(),
        assertions: assertions.to_vec(),
        cell_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::group::{CentralExtension, KernelCharacter};

    fn z4() -> MagneticGroup {
        catalog::magnetic_cyclic(4)
    }

    fn torus() -> GcwComplex {
        let cell = |id: &str, dim: usize, stab: Vec<usize>| crate::complex::CellSpec {
            id: id.into(),
            dim,
            stabilizer: stab,
            orientation: 1,
        };
        let inc = |upper: &str, lower: &str, g: usize, sign: i8| crate::complex::IncidenceSpec {
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

    fn nosoc_override() -> DifferentialOverride {
        DifferentialOverride {
            page: 2,
            from: (0, -1),
            matrix: vec![vec![1, 1]],
        }
    }

    fn nosoc_assertion() -> ExtensionAssertion {
        ExtensionAssertion {
            degree: -2,
            kind: "nonsplit".into(),
            total: Some(AssertedGroup {
                rank: 2,
                torsion: vec![2],
            }),
        }
    }

    fn group(rank: usize, torsion: &[i64]) -> FgAbelianGroup {
        FgAbelianGroup::with(rank, torsion)
    }

    #[test]
    fn untwisted_torus_first_page() {
        let mg = z4();
        let run = run_ahss(&mg, &torus(), None, &[], &[], None, 64).unwrap();
        assert_eq!(run.period, 4);
        let e1 = &run.pages[0];
        assert_eq!(e1.entry(0, 0).group, group(6, &[]));
        assert_eq!(e1.entry(1, 0).group, group(2, &[]));
        assert_eq!(e1.entry(2, 0).group, group(1, &[]));
        assert_eq!(e1.entry(0, -1).group, group(0, &[2, 2]));
        assert_eq!(e1.entry(0, -2).group, group(2, &[2, 2]));
        assert_eq!(e1.entry(1, -2).group, group(2, &[]));
        assert_eq!(e1.entry(2, -2).group, group(1, &[]));
        assert!(e1.entry(0, -3).group.is_zero());
        assert!(e1.entry(1, -3).group.is_zero());
    }

    #[test]
    fn untwisted_torus_second_page() {
        let mg = z4();
        let run = run_ahss(&mg, &torus(), None, &[], &[], None, 64).unwrap();
        let e2 = &run.pages[1];
        assert_eq!(e2.r, 2);
        assert_eq!(e2.entry(0, 0).group, group(4, &[]));
        assert!(e2.entry(1, 0).group.is_zero());
        assert_eq!(e2.entry(2, 0).group, group(1, &[]));
        assert_eq!(e2.entry(0, -1).group, group(0, &[2, 2]));
        assert!(e2.entry(1, -1).group.is_zero());
        assert!(e2.entry(2, -1).group.is_zero());
        assert_eq!(e2.entry(0, -2).group, group(1, &[2, 2]));
        assert!(e2.entry(1, -2).group.is_zero());
        assert_eq!(e2.entry(2, -2).group, group(0, &[2]));
        assert!(e2.entry(0, -3).group.is_zero());
    }

    #[test]
    fn nosoc_override_gives_third_page_and_final_groups() {
        let mg = z4();
        let run = run_ahss(
            &mg,
            &torus(),
            None,
            &[nosoc_override()],
            &[nosoc_assertion()],
            None,
            64,
        )
        .unwrap();
        let e3 = run.pages.last().unwrap();
        assert_eq!(e3.r, 3);
        assert_eq!(e3.entry(0, -1).group, group(0, &[2]));
        assert!(e3.entry(2, -2).group.is_zero());
        // graded K-groups: Z^4, Z/2, (Z + Z/2) + Z, 0
        let by_deg: BTreeMap<i64, &GradedKReport> =
            run.graded.iter().map(|g| (g.degree, g)).collect();
        assert_eq!(by_deg[&0].total.as_ref().unwrap(), &group(4, &[]));
        assert!(!by_deg[&0].ambiguous);
        assert_eq!(by_deg[&-1].total.as_ref().unwrap(), &group(0, &[2]));
        assert!(by_deg[&-2].ambiguous);
        assert_eq!(by_deg[&-2].total.as_ref().unwrap(), &group(2, &[2]));
        assert!(by_deg[&-3].total.as_ref().unwrap().is_zero());
    }

    #[test]
    fn nosoc_without_assertion_reports_ambiguity() {
        let mg = z4();
        let run = run_ahss(&mg, &torus(), None, &[nosoc_override()], &[], None, 64).unwrap();
        let k2 = run.graded.iter().find(|g| g.degree == -2).unwrap();
        assert!(k2.ambiguous);
        assert!(k2.total.is_none());
        // pieces in filtration order: E(0,-2), E(1,-3), E(2,-4) = E(2,0)
        assert_eq!(k2.pieces[0], group(1, &[2, 2]));
        assert!(k2.pieces[1].is_zero());
        assert_eq!(k2.pieces[2], group(1, &[]));
    }

    #[test]
    fn soc_torus_collapses_at_page_two() {
        let mg = z4();
        let tw = soc_twist();
        let run = run_ahss(&mg, &torus(), Some(&tw), &[], &[], None, 64).unwrap();
        assert_eq!(run.period, 4);
        let e1 = &run.pages[0];
        assert_eq!(e1.entry(0, 0).group, group(4, &[]));
        assert_eq!(e1.entry(1, 0).group, group(2, &[]));
        assert_eq!(e1.entry(2, 0).group, group(1, &[]));
        assert!(e1.entry(0, -1).group.is_zero());
        let e2 = run.pages.last().unwrap();
        assert_eq!(e2.r, 2);
        assert_eq!(e2.entry(0, 0).group, group(2, &[]));
        assert_eq!(e2.entry(1, 0).group, group(0, &[2]));
        assert_eq!(e2.entry(2, 0).group, group(1, &[]));
        assert_eq!(e2.entry(0, -2).group, group(3, &[]));
        assert!(e2.entry(1, -2).group.is_zero());
        assert_eq!(e2.entry(2, -2).group, group(0, &[2]));
        // final groups: Z^2 + Z/2, 0, Z^3 + Z, Z/2 with no ambiguity
        let by_deg: BTreeMap<i64, &GradedKReport> =
            run.graded.iter().map(|g| (g.degree, g)).collect();
        for d in [0i64, -1, -2, -3] {
            assert!(!by_deg[&d].ambiguous, "degree {}", d);
        }
        assert_eq!(by_deg[&0].total.as_ref().unwrap(), &group(2, &[2]));
        assert!(by_deg[&-1].total.as_ref().unwrap().is_zero());
        assert_eq!(by_deg[&-2].total.as_ref().unwrap(), &group(4, &[]));
        assert_eq!(by_deg[&-3].total.as_ref().unwrap(), &group(0, &[2]));
    }

    #[test]
    fn zero_differential_page_turn_is_identity() {
        let mg = z4();
        let run = run_ahss(&mg, &torus(), None, &[], &[], None, 64).unwrap();
        let e2 = &run.pages[1]; // all d2 unset: zero
        let e3 = e2.turn().unwrap();
        for (k, e) in &e2.entries {
            assert_eq!(e3.entries[k].group, e.group);
        }
    }

    #[test]
    fn total_rank_never_grows() {
        let mg = z4();
        for tw in [None, Some(soc_twist())] {
            let run = run_ahss(&mg, &torus(), tw.as_ref(), &[], &[], None, 64).unwrap();
            for w in run.pages.windows(2) {
                assert!(w[1].total_rank() <= w[0].total_rank());
            }
        }
    }

    #[test]
    fn shape_mismatch_in_override() {
        let mg = z4();
        let bad = DifferentialOverride {
            page: 2,
            from: (0, -1),
            matrix: vec![vec![1, 1, 1]],
        };
        let err = run_ahss(&mg, &torus(), None, &[bad], &[], None, 64).unwrap_err();
        assert!(matches!(err, AhssError::ShapeMismatch { .. }));
    }

    #[test]
    fn invalid_assertion_rejected() {
        let mg = z4();
        let bad = ExtensionAssertion {
            degree: -2,
            kind: "nonsplit".into(),
            total: Some(AssertedGroup {
                rank: 5,
                torsion: vec![],
            }),
        };
        let err = run_ahss(
            &mg,
            &torus(),
            None,
            &[nosoc_override()],
            &[bad],
            None,
            64,
        )
        .unwrap_err();
        assert!(matches!(err, AhssError::AssertionInvalid(-2)));
    }

    #[test]
    fn unstable_page_rejected_for_graded_report() {
        let mg = z4();
        let run = run_ahss(&mg, &torus(), None, &[], &[], None, 64).unwrap();
        // page 1 still carries its differentials
        let err = graded_k_report(&run.pages[0], &[0], &[]).unwrap_err();
        assert!(matches!(err, AhssError::PageNotStable));
    }

    #[test]
    fn folding_consistency_with_period_eight() {
        // the same torus run with degrees folded at period 4 matches the
        // graded pieces computed from the folded window
        let mg = z4();
        let run = run_ahss(
            &mg,
            &torus(),
            None,
            &[nosoc_override()],
            &[nosoc_assertion()],
            Some(vec![0, -1, -2, -3, -4, -5, -6, -7]),
            64,
        )
        .unwrap();
        let by_deg: BTreeMap<i64, &GradedKReport> =
            run.graded.iter().map(|g| (g.degree, g)).collect();
        for d in [0i64, -1, -2, -3] {
            assert_eq!(
                by_deg[&d].pieces,
                by_deg[&(d - 4)].pieces,
                "degree {} folds",
                d
            );
        }
    }
}
