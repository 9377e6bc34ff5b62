//! Covering data indexed by tuples of opens, with glueing and covering
//! cohomology.
//!
//! A cover has `opens` opens indexed `0..opens` and is truncated at depth
//! `truncation = r`: there is one module (or complex) for every tuple
//! `t` in `{0..opens}^(m+1)` with `m <= r`, thought of as the overlap of
//! the listed opens, repeats allowed.  Restriction runs along strictly
//! monotone `alpha : [m] -> [n]`, encoded as its image vector: for a
//! tuple `t` of length `n+1` the structure map
//! `rho(alpha, t) : M_{t∘alpha} -> M_t` restricts from the sub-overlap.
//! The identity `alpha` always acts as the identity and is never stored;
//! all other maps are stored explicitly and validated for strict
//! functoriality `rho(beta∘alpha, t) = rho(beta, t) ∘ rho(alpha, t∘beta)`
//! modulo relations.
//!
//! The quality of a datum is its Cartesian exponent: the worst
//! `pi`-isomorphism defect among its structure maps.  Everything else in
//! this module measures how that defect propagates — into the glued
//! module (one-sided inverse limit over pairs), into a finite-type model
//! of the glue, and into covering cohomology — and audits each measured
//! exponent against the a-priori bound.

use std::collections::BTreeMap;

use crate::bounds;
use crate::cert::PiCertificate;
use crate::complex::{ChainMap, CochainComplex};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module::{FpModule, ModuleMap};
use crate::normal_form::solve_simultaneous;
use crate::pseudo::{
    build_pseudo_resolution, is_zero_module, pi_finite_type, vanishes_above, BuildOptions,
    PseudoResolution,
};
use crate::ring::RingSpec;

/// All tuples in `{0..opens}^len`, lexicographically.
pub(crate) fn all_tuples(opens: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * opens);
        for t in &out {
            for v in 0..opens {
                let mut s = t.clone();
                s.push(v);
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// Every tuple a datum truncated at `truncation` carries: all lengths
/// from single opens up to `truncation + 1`.
pub(crate) fn datum_tuples(opens: usize, truncation: usize) -> Vec<Vec<usize>> {
    let mut tuples = Vec::new();
    for len in 1..=truncation + 1 {
        tuples.extend(all_tuples(opens, len));
    }
    tuples
}

/// Strictly increasing vectors of length `m1` with values in `0..n1`:
/// the strictly monotone injections `[m1-1] -> [n1-1]` by image, and
/// equally the increasing tuples of length `m1` on `n1` opens.
pub(crate) fn strict_injections(m1: usize, n1: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, left: usize, n1: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=(n1 - left) {
            cur.push(v);
            rec(v + 1, left - 1, n1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m1 <= n1 {
        rec(0, m1, n1, &mut Vec::with_capacity(m1), &mut out);
    }
    out
}

pub(crate) fn is_identity_injection(alpha: &[usize], n1: usize) -> bool {
    alpha.len() == n1 && alpha.iter().enumerate().all(|(i, &v)| v == i)
}

/// `t ∘ alpha`: the sub-tuple of `t` selected by `alpha`.
pub(crate) fn apply_tuple(t: &[usize], alpha: &[usize]) -> Vec<usize> {
    alpha.iter().map(|&i| t[i]).collect()
}

/// `beta ∘ alpha` as image vectors.
fn compose_injections(beta: &[usize], alpha: &[usize]) -> Vec<usize> {
    alpha.iter().map(|&i| beta[i]).collect()
}

/// The face skipping position `j`: `[len-2] -> [len-1]` as an image vector.
fn face(len: usize, j: usize) -> Vec<usize> {
    (0..len).filter(|&x| x != j).collect()
}

/// Direct sum with generator offsets, in the given order.
pub(crate) fn sum_module(rs: &RingSpec, parts: &[FpModule]) -> Result<(FpModule, Vec<usize>)> {
    let mut offsets = Vec::with_capacity(parts.len());
    let mut gens = 0;
    let mut rel = Matrix::zero(rs.ring().clone(), 0, 0);
    for p in parts {
        offsets.push(gens);
        gens += p.generators();
        rel = rel.block_diagonal(p.relations())?;
    }
    Ok((FpModule::new(rs.clone(), gens, rel)?, offsets))
}

fn check_tuple(t: &[usize], opens: usize, truncation: usize) -> Result<()> {
    if t.is_empty() || t.len() > truncation + 1 {
        return Err(Error::InvalidObject(format!(
            "tuple {t:?} has length outside 1..={}",
            truncation + 1
        )));
    }
    if t.iter().any(|&v| v >= opens) {
        return Err(Error::InvalidObject(format!(
            "tuple {t:?} names an open >= {opens}"
        )));
    }
    Ok(())
}

/// A module for every tuple of opens up to the truncation depth, with
/// validated restriction maps.
#[derive(Clone, Debug)]
pub struct CechModuleDatum {
    ring: RingSpec,
    opens: usize,
    truncation: usize,
    modules: BTreeMap<Vec<usize>, FpModule>,
    maps: BTreeMap<(Vec<usize>, Vec<usize>), ModuleMap>,
}

impl CechModuleDatum {
    pub fn new(
        ring: RingSpec,
        opens: usize,
        truncation: usize,
        modules: BTreeMap<Vec<usize>, FpModule>,
        maps: BTreeMap<(Vec<usize>, Vec<usize>), ModuleMap>,
    ) -> Result<CechModuleDatum> {
        if opens == 0 {
            return Err(Error::InvalidObject("a cover needs at least one open".into()));
        }
        let datum = CechModuleDatum {
            ring,
            opens,
            truncation,
            modules,
            maps,
        };
        datum.validate()?;
        Ok(datum)
    }

    fn validate(&self) -> Result<()> {
        let mut expected = 0usize;
        for len in 1..=self.truncation + 1 {
            for t in all_tuples(self.opens, len) {
                expected += 1;
                let m = self.modules.get(&t).ok_or_else(|| {
                    Error::InvalidObject(format!("missing module for tuple {t:?}"))
                })?;
                if m.ring() != &self.ring {
                    return Err(Error::RingMismatch(format!("{} vs {}", m.ring(), self.ring)));
                }
            }
        }
        if self.modules.len() != expected {
            return Err(Error::InvalidObject(format!(
                "{} modules listed, cover needs exactly {expected}",
                self.modules.len()
            )));
        }
        for (alpha, t) in self.maps.keys() {
            check_tuple(t, self.opens, self.truncation)?;
            if is_identity_injection(alpha, t.len()) {
                return Err(Error::InvalidObject(format!(
                    "identity restriction on {t:?} must stay implicit"
                )));
            }
            if alpha.is_empty()
                || alpha.len() > t.len()
                || alpha.windows(2).any(|w| w[0] >= w[1])
                || *alpha.last().unwrap() >= t.len()
            {
                return Err(Error::InvalidObject(format!(
                    "{alpha:?} is not a strict injection into a tuple of length {}",
                    t.len()
                )));
            }
        }
        // every non-identity restriction present, with matching endpoints
        for n1 in 1..=self.truncation + 1 {
            for t in all_tuples(self.opens, n1) {
                for m1 in 1..=n1 {
                    for alpha in strict_injections(m1, n1) {
                        if is_identity_injection(&alpha, n1) {
                            continue;
                        }
                        let f = self.maps.get(&(alpha.clone(), t.clone())).ok_or_else(|| {
                            Error::InvalidObject(format!(
                                "missing restriction {alpha:?} into tuple {t:?}"
                            ))
                        })?;
                        let src = &self.modules[&apply_tuple(&t, &alpha)];
                        let tgt = &self.modules[&t];
                        if f.source() != src || f.target() != tgt {
                            return Err(Error::InvalidObject(format!(
                                "restriction {alpha:?} into {t:?} has wrong endpoints"
                            )));
                        }
                    }
                }
            }
        }
        // strict functoriality modulo relations
        for n1 in 1..=self.truncation + 1 {
            for t in all_tuples(self.opens, n1) {
                for m1 in 1..=n1 {
                    for beta in strict_injections(m1, n1) {
                        if is_identity_injection(&beta, n1) {
                            continue;
                        }
                        let tb = apply_tuple(&t, &beta);
                        for l1 in 1..=m1 {
                            for alpha in strict_injections(l1, m1) {
                                if is_identity_injection(&alpha, m1) {
                                    continue;
                                }
                                let gamma = compose_injections(&beta, &alpha);
                                let lhs = self.structure_map(&gamma, &t)?;
                                let rhs = self
                                    .structure_map(&beta, &t)?
                                    .compose(&self.structure_map(&alpha, &tb)?)?;
                                if !lhs.equals(&rhs)? {
                                    return Err(Error::InvalidObject(format!(
                                        "restrictions fail to compose at {alpha:?} then {beta:?} into {t:?}"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn opens(&self) -> usize {
        self.opens
    }

    /// Covering dimension: `opens - 1`.
    pub fn k(&self) -> usize {
        self.opens - 1
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn module(&self, t: &[usize]) -> Result<&FpModule> {
        self.modules
            .get(t)
            .ok_or_else(|| Error::InvalidObject(format!("no module for tuple {t:?}")))
    }

    pub fn structure_map(&self, alpha: &[usize], t: &[usize]) -> Result<ModuleMap> {
        if is_identity_injection(alpha, t.len()) {
            return Ok(ModuleMap::identity(self.module(t)?));
        }
        self.maps
            .get(&(alpha.to_vec(), t.to_vec()))
            .cloned()
            .ok_or_else(|| Error::InvalidObject(format!("no restriction {alpha:?} into {t:?}")))
    }

    /// Worst `pi`-isomorphism defect among the stored restrictions.
    pub fn cartesian_exponent(&self, cap: u32) -> Result<u32> {
        let mut worst = 0;
        for ((alpha, t), f) in &self.maps {
            let e = f.pi_iso_exponent(cap)?.ok_or(Error::ExponentCapExceeded {
                what: format!("restriction {alpha:?} into {t:?}"),
                cap,
            })?;
            worst = worst.max(e);
        }
        Ok(worst)
    }

    pub fn is_pi_cartesian(&self, e: u32) -> Result<bool> {
        for f in self.maps.values() {
            if !f.is_pi_isomorphism(e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The alternating-face complex on strictly increasing tuples, supported
/// on `[0, min(k, truncation)]`.
pub fn ordered_cech_complex(datum: &CechModuleDatum) -> Result<CochainComplex> {
    let rs = datum.ring().clone();
    let p_max = datum.k().min(datum.truncation());
    let mut terms = Vec::new();
    let mut offsets = Vec::new();
    let mut levels = Vec::new();
    for p in 0..=p_max {
        let tuples = strict_injections(p + 1, datum.opens());
        let parts = tuples
            .iter()
            .map(|t| datum.module(t).cloned())
            .collect::<Result<Vec<_>>>()?;
        let (sum, offs) = sum_module(&rs, &parts)?;
        terms.push(sum);
        offsets.push(offs);
        levels.push(tuples);
    }
    let mut diffs = Vec::new();
    for p in 0..p_max {
        let mut d = Matrix::zero(
            rs.ring().clone(),
            terms[p + 1].generators(),
            terms[p].generators(),
        );
        for (si, s) in levels[p + 1].iter().enumerate() {
            for j in 0..s.len() {
                let t = apply_tuple(s, &face(s.len(), j));
                let ti = levels[p].iter().position(|u| *u == t).expect("face present");
                let mut block = datum.structure_map(&face(s.len(), j), s)?.matrix().clone();
                if j % 2 == 1 {
                    block = block.neg();
                }
                d.paste(offsets[p + 1][si], offsets[p][ti], &block);
            }
        }
        diffs.push(ModuleMap::new(terms[p].clone(), terms[p + 1].clone(), d)?);
    }
    CochainComplex::new(rs, 0, terms, diffs)
}

/// The glued module: sections over the whole cover, presented as the
/// kernel of the pair-difference map on level-one products.
#[derive(Clone, Debug)]
pub struct GlueResult {
    pub module: FpModule,
    /// Inclusion into the product of the single-open modules.
    pub inclusion: ModuleMap,
    /// Projection to each single-open module.
    pub projections: Vec<ModuleMap>,
}

/// Difference map from the product over single opens to the product over
/// ordered pairs: `x ↦ (x_j|_{(j,k)} - x_k|_{(j,k)})`.
fn pair_difference(datum: &CechModuleDatum) -> Result<ModuleMap> {
    let rs = datum.ring().clone();
    let singles = all_tuples(datum.opens(), 1);
    let pairs = all_tuples(datum.opens(), 2);
    let parts0 = singles
        .iter()
        .map(|t| datum.module(t).cloned())
        .collect::<Result<Vec<_>>>()?;
    let parts1 = pairs
        .iter()
        .map(|t| datum.module(t).cloned())
        .collect::<Result<Vec<_>>>()?;
    let (prod0, off0) = sum_module(&rs, &parts0)?;
    let (prod1, off1) = sum_module(&rs, &parts1)?;
    let mut d = Matrix::zero(rs.ring().clone(), prod1.generators(), prod0.generators());
    for (pi, pair) in pairs.iter().enumerate() {
        let (j, k) = (pair[0], pair[1]);
        let from_j = datum.structure_map(&[0], pair)?.matrix().clone();
        let from_k = datum.structure_map(&[1], pair)?.matrix().clone();
        if j == k {
            d.paste(off1[pi], off0[j], &from_j.sub(&from_k)?);
        } else {
            d.paste(off1[pi], off0[j], &from_j);
            d.paste(off1[pi], off0[k], &from_k.neg());
        }
    }
    ModuleMap::new(prod0, prod1, d)
}

pub fn glue(datum: &CechModuleDatum) -> Result<GlueResult> {
    if datum.truncation() < 1 {
        return Err(Error::Precondition(
            "glueing needs the cover truncated at depth >= 1".into(),
        ));
    }
    let (module, inclusion) = pair_difference(datum)?.kernel()?;
    let mut projections = Vec::with_capacity(datum.opens());
    let mut offset = 0;
    for j in 0..datum.opens() {
        let mj = datum.module(&[j])?.clone();
        let rows = mj.generators();
        let mat = inclusion.matrix().row_block(offset, offset + rows);
        projections.push(ModuleMap::new(module.clone(), mj, mat)?);
        offset += rows;
    }
    Ok(GlueResult {
        module,
        inclusion,
        projections,
    })
}

/// Factor `map` through the kernel inclusion `incl` of its target.
pub fn factor_through_kernel(incl: &ModuleMap, map: &ModuleMap) -> Result<ModuleMap> {
    let parts = solve_simultaneous(
        &[incl.matrix(), incl.target().relations()],
        map.matrix(),
    )?
    .ok_or_else(|| {
        Error::InternalSolve("map does not factor through the kernel it must land in".into())
    })?;
    ModuleMap::new(map.source().clone(), incl.source().clone(), parts[0].clone())
}

/// Measured ladder for the glue projections: restrictions are
/// `pi^e`-isomorphisms, the horizontal comparison maps stay within
/// `pi^{2e}`, the induced maps on pair-equalizers within `pi^{4e}`, and
/// each projection `glue -> M_(i)` within `pi^{8e}`.
#[derive(Clone, Debug)]
pub struct GlueQualityAudit {
    pub cartesian_exponent: u32,
    pub horizontal_bound: u32,
    pub horizontal_measured: u32,
    pub equalizer_bound: u32,
    pub equalizer_measured: u32,
    pub bound: u32,
    pub measured: u32,
    /// One certificate per open for `glue -> M_(i)`.
    pub certificates: Vec<PiCertificate>,
}

/// For a fixed open `i`, the equalizer of the double overlaps with `i`:
/// kernel of `(y_j) ↦ (y_j|_{(i,j,k)} - y_k|_{(i,j,k)})`.
fn overlap_equalizer(datum: &CechModuleDatum, i: usize) -> Result<(FpModule, ModuleMap)> {
    let rs = datum.ring().clone();
    let opens = datum.opens();
    let parts0 = (0..opens)
        .map(|j| datum.module(&[i, j]).cloned())
        .collect::<Result<Vec<_>>>()?;
    let pairs = all_tuples(opens, 2);
    let parts1 = pairs
        .iter()
        .map(|p| datum.module(&[i, p[0], p[1]]).cloned())
        .collect::<Result<Vec<_>>>()?;
    let (prod0, off0) = sum_module(&rs, &parts0)?;
    let (prod1, off1) = sum_module(&rs, &parts1)?;
    let mut d = Matrix::zero(rs.ring().clone(), prod1.generators(), prod0.generators());
    for (pi, pair) in pairs.iter().enumerate() {
        let (j, k) = (pair[0], pair[1]);
        let t = vec![i, j, k];
        // keep (i,j): positions {0,1}; keep (i,k): positions {0,2}
        let from_j = datum.structure_map(&[0, 1], &t)?.matrix().clone();
        let from_k = datum.structure_map(&[0, 2], &t)?.matrix().clone();
        if j == k {
            d.paste(off1[pi], off0[j], &from_j.sub(&from_k)?);
        } else {
            d.paste(off1[pi], off0[j], &from_j);
            d.paste(off1[pi], off0[k], &from_k.neg());
        }
    }
    ModuleMap::new(prod0, prod1, d)?.kernel()
}

pub fn glue_quality_audit(datum: &CechModuleDatum, cap: u32) -> Result<GlueQualityAudit> {
    if datum.truncation() < 2 {
        return Err(Error::Precondition(
            "the glue audit needs triple overlaps: truncation >= 2".into(),
        ));
    }
    let e = datum.cartesian_exponent(cap)?;
    let g = glue(datum)?;
    let opens = datum.opens();

    let mut horizontal = 0u32;
    let mut equalizer = 0u32;
    let mut total = 0u32;
    let mut certificates = Vec::with_capacity(opens);
    for i in 0..opens {
        // horizontal comparisons into the overlap column for this open
        for j in 0..opens {
            for (alpha, t) in [
                (vec![0], vec![i, j]), // M_(i) -> M_(i,j)
                (vec![1], vec![i, j]), // M_(j) -> M_(i,j)
            ] {
                let f = datum.structure_map(&alpha, &t)?;
                let m = f.pi_iso_exponent(cap)?.ok_or(Error::ExponentCapExceeded {
                    what: format!("comparison {alpha:?} into {t:?}"),
                    cap,
                })?;
                horizontal = horizontal.max(m);
            }
            for k in 0..opens {
                for (alpha, t) in [
                    (vec![0], vec![i, j, k]),    // M_(i) -> M_(i,j,k)
                    (vec![1, 2], vec![i, j, k]), // M_(j,k) -> M_(i,j,k)
                ] {
                    let f = datum.structure_map(&alpha, &t)?;
                    let m = f.pi_iso_exponent(cap)?.ok_or(Error::ExponentCapExceeded {
                        what: format!("comparison {alpha:?} into {t:?}"),
                        cap,
                    })?;
                    horizontal = horizontal.max(m);
                }
            }
        }

        let (_, eq_incl) = overlap_equalizer(datum, i)?;
        // from the glue: x ↦ (x_j|_{(i,j)})_j
        let mut from_glue = Matrix::zero(datum.ring().ring().clone(), 0, g.module.generators());
        // from the single open: x ↦ (x|_{(i,j)})_j
        let mi = datum.module(&[i])?.clone();
        let mut from_single = Matrix::zero(datum.ring().ring().clone(), 0, mi.generators());
        for j in 0..opens {
            let restrict_j = datum.structure_map(&[1], &[i, j])?; // M_(j) -> M_(i,j)
            let restrict_i = datum.structure_map(&[0], &[i, j])?; // M_(i) -> M_(i,j)
            from_glue = from_glue.vstack(&restrict_j.matrix().mul(g.projections[j].matrix())?)?;
            from_single = from_single.vstack(restrict_i.matrix())?;
        }
        let u = factor_through_kernel(
            &eq_incl,
            &ModuleMap::new(g.module.clone(), eq_incl.target().clone(), from_glue)?,
        )?;
        let v = factor_through_kernel(
            &eq_incl,
            &ModuleMap::new(mi.clone(), eq_incl.target().clone(), from_single)?,
        )?;
        for (name, f) in [("glue side", &u), ("single side", &v)] {
            let m = f.pi_iso_exponent(cap)?.ok_or(Error::ExponentCapExceeded {
                what: format!("{name} equalizer comparison at open {i}"),
                cap,
            })?;
            equalizer = equalizer.max(m);
        }

        let cert = PiCertificate::measure_required(
            &g.projections[i],
            cap,
            &format!("glue projection to open {i}"),
        )?;
        total = total.max(cert.exponent);
        certificates.push(cert);
    }

    Ok(GlueQualityAudit {
        cartesian_exponent: e,
        horizontal_bound: 2 * e,
        horizontal_measured: horizontal,
        equalizer_bound: 4 * e,
        equalizer_measured: equalizer,
        bound: bounds::GLUE_QUALITY_BOUND * e,
        measured: total,
        certificates,
    })
}

/// A finite-type model of the glue: the submodule generated by retract
/// sections of the projections, with per-tuple comparison certificates.
#[derive(Clone, Debug)]
pub struct GlueFiniteType {
    pub module: FpModule,
    /// Inclusion of the model into the glue.
    pub inclusion: ModuleMap,
    pub cartesian_exponent: u32,
    /// Each `glue -> M_t` stays within `pi^{9e}`.
    pub level_bound: u32,
    pub level_measured: u32,
    /// The model exhausts the glue up to `pi^{16e}`.
    pub surjectivity_bound: u32,
    pub surjectivity_measured: u32,
    /// Each `model -> M_t` stays within `pi^{25e}`.
    pub bound: u32,
    pub measured: u32,
    /// The comparison maps `model -> M_t` the certificates were measured
    /// against, so a report can be re-checked without the datum.
    pub comparisons: BTreeMap<Vec<usize>, ModuleMap>,
    pub certificates: BTreeMap<Vec<usize>, PiCertificate>,
}

impl GlueFiniteType {
    /// Re-check every stored comparison certificate against its map.
    pub fn verify(&self) -> Result<()> {
        for (t, cert) in &self.certificates {
            let map = self.comparisons.get(t).ok_or_else(|| {
                Error::VerificationFailed(format!("no comparison map stored for {t:?}"))
            })?;
            cert.verify(map)?;
        }
        Ok(())
    }
}

pub fn glue_finite_type(datum: &CechModuleDatum, cap: u32) -> Result<GlueFiniteType> {
    if datum.truncation() < 2 {
        return Err(Error::Precondition(
            "the finite-type glue needs triple overlaps: truncation >= 2".into(),
        ));
    }
    let e = datum.cartesian_exponent(cap)?;
    let g = glue(datum)?;
    let rs = datum.ring().clone();

    // sections of the projections, up to pi^{2 * 8e}
    let mut sections = Matrix::zero(rs.ring().clone(), g.module.generators(), 0);
    let mut surj = 0u32;
    for proj in &g.projections {
        let (section, _l) = proj.retract_inverse(cap)?.ok_or(Error::ExponentCapExceeded {
            what: "glue projection retract".into(),
            cap,
        })?;
        sections = sections.hstack(section.matrix())?;
    }
    let singles = all_tuples(datum.opens(), 1);
    let parts0 = singles
        .iter()
        .map(|t| datum.module(t).cloned())
        .collect::<Result<Vec<_>>>()?;
    let (prod0, _) = sum_module(&rs, &parts0)?;
    let assemble = ModuleMap::new(prod0, g.module.clone(), sections)?;
    let (module, inclusion, _) = assemble.image()?;
    let (coker, _) = inclusion.cokernel()?;
    if let Some((s, _)) = coker.min_null_exponent(cap)? {
        surj = surj.max(s);
    } else {
        return Err(Error::ExponentCapExceeded {
            what: "finite-type glue exhaustion".into(),
            cap,
        });
    }

    let mut level = 0u32;
    let mut measured = 0u32;
    let mut comparisons = BTreeMap::new();
    let mut certificates = BTreeMap::new();
    for len in 1..=datum.truncation() + 1 {
        for t in all_tuples(datum.opens(), len) {
            // glue -> M_(t_0) -> M_t
            let alpha = vec![0];
            let to_first = g.projections[t[0]].clone();
            let level_map = if len == 1 {
                to_first
            } else {
                datum.structure_map(&alpha, &t)?.compose(&to_first)?
            };
            let lm = level_map
                .pi_iso_exponent(cap)?
                .ok_or(Error::ExponentCapExceeded {
                    what: format!("glue level map to {t:?}"),
                    cap,
                })?;
            level = level.max(lm);
            let comparison = level_map.compose(&inclusion)?;
            let cert = PiCertificate::measure_required(
                &comparison,
                cap,
                &format!("finite-type comparison to {t:?}"),
            )?;
            measured = measured.max(cert.exponent);
            comparisons.insert(t.clone(), comparison);
            certificates.insert(t, cert);
        }
    }

    Ok(GlueFiniteType {
        module,
        inclusion,
        cartesian_exponent: e,
        level_bound: bounds::GLUE_FINITE_TYPE_LEVEL_BOUND * e,
        level_measured: level,
        surjectivity_bound: 2 * bounds::GLUE_QUALITY_BOUND * e,
        surjectivity_measured: surj,
        bound: bounds::GLUE_FINITE_TYPE_BOUND * e,
        measured,
        comparisons,
        certificates,
    })
}

/// A complex for every tuple of opens, with validated restriction chain
/// maps.
#[derive(Clone, Debug)]
pub struct CechComplexDatum {
    ring: RingSpec,
    opens: usize,
    truncation: usize,
    complexes: BTreeMap<Vec<usize>, CochainComplex>,
    maps: BTreeMap<(Vec<usize>, Vec<usize>), ChainMap>,
}

fn chain_maps_agree(f: &ChainMap, g: &ChainMap) -> Result<bool> {
    let lo = f.source().lo().min(f.target().lo()) - 1;
    let hi = f.source().hi().max(f.target().hi()) + 1;
    for i in lo..=hi {
        if !f.component(i).equals(&g.component(i))? {
            return Ok(false);
        }
    }
    Ok(true)
}

impl CechComplexDatum {
    pub fn new(
        ring: RingSpec,
        opens: usize,
        truncation: usize,
        complexes: BTreeMap<Vec<usize>, CochainComplex>,
        maps: BTreeMap<(Vec<usize>, Vec<usize>), ChainMap>,
    ) -> Result<CechComplexDatum> {
        if opens == 0 {
            return Err(Error::InvalidObject("a cover needs at least one open".into()));
        }
        let datum = CechComplexDatum {
            ring,
            opens,
            truncation,
            complexes,
            maps,
        };
        datum.validate()?;
        Ok(datum)
    }

    fn validate(&self) -> Result<()> {
        let mut expected = 0usize;
        for len in 1..=self.truncation + 1 {
            for t in all_tuples(self.opens, len) {
                expected += 1;
                let c = self.complexes.get(&t).ok_or_else(|| {
                    Error::InvalidObject(format!("missing complex for tuple {t:?}"))
                })?;
                if c.ring() != &self.ring {
                    return Err(Error::RingMismatch(format!("{} vs {}", c.ring(), self.ring)));
                }
            }
        }
        if self.complexes.len() != expected {
            return Err(Error::InvalidObject(format!(
                "{} complexes listed, cover needs exactly {expected}",
                self.complexes.len()
            )));
        }
        for (alpha, t) in self.maps.keys() {
            check_tuple(t, self.opens, self.truncation)?;
            if is_identity_injection(alpha, t.len()) {
                return Err(Error::InvalidObject(format!(
                    "identity restriction on {t:?} must stay implicit"
                )));
            }
        }
        for n1 in 1..=self.truncation + 1 {
            for t in all_tuples(self.opens, n1) {
                for m1 in 1..=n1 {
                    for alpha in strict_injections(m1, n1) {
                        if is_identity_injection(&alpha, n1) {
                            continue;
                        }
                        let f = self.maps.get(&(alpha.clone(), t.clone())).ok_or_else(|| {
                            Error::InvalidObject(format!(
                                "missing restriction {alpha:?} into tuple {t:?}"
                            ))
                        })?;
                        let src = &self.complexes[&apply_tuple(&t, &alpha)];
                        let tgt = &self.complexes[&t];
                        if f.source() != src || f.target() != tgt {
                            return Err(Error::InvalidObject(format!(
                                "restriction {alpha:?} into {t:?} has wrong endpoints"
                            )));
                        }
                    }
                }
            }
        }
        for n1 in 1..=self.truncation + 1 {
            for t in all_tuples(self.opens, n1) {
                for m1 in 1..=n1 {
                    for beta in strict_injections(m1, n1) {
                        if is_identity_injection(&beta, n1) {
                            continue;
                        }
                        let tb = apply_tuple(&t, &beta);
                        for l1 in 1..=m1 {
                            for alpha in strict_injections(l1, m1) {
                                if is_identity_injection(&alpha, m1) {
                                    continue;
                                }
                                let gamma = compose_injections(&beta, &alpha);
                                let lhs = self.structure_map(&gamma, &t)?;
                                let rhs = self
                                    .structure_map(&beta, &t)?
                                    .compose(&self.structure_map(&alpha, &tb)?)?;
                                if !chain_maps_agree(&lhs, &rhs)? {
                                    return Err(Error::InvalidObject(format!(
                                        "restrictions fail to compose at {alpha:?} then {beta:?} into {t:?}"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn opens(&self) -> usize {
        self.opens
    }

    pub fn k(&self) -> usize {
        self.opens - 1
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn complex(&self, t: &[usize]) -> Result<&CochainComplex> {
        self.complexes
            .get(t)
            .ok_or_else(|| Error::InvalidObject(format!("no complex for tuple {t:?}")))
    }

    pub fn structure_map(&self, alpha: &[usize], t: &[usize]) -> Result<ChainMap> {
        if is_identity_injection(alpha, t.len()) {
            return Ok(ChainMap::identity(self.complex(t)?));
        }
        self.maps
            .get(&(alpha.to_vec(), t.to_vec()))
            .cloned()
            .ok_or_else(|| Error::InvalidObject(format!("no restriction {alpha:?} into {t:?}")))
    }

    /// The module datum of degree-`q` cohomologies with induced maps.
    pub fn cohomology_datum(&self, q: i64) -> Result<CechModuleDatum> {
        let mut modules = BTreeMap::new();
        for (t, c) in &self.complexes {
            modules.insert(t.clone(), c.cohomology(q)?.module);
        }
        let mut maps = BTreeMap::new();
        for (key, f) in &self.maps {
            maps.insert(key.clone(), f.induced_cohomology_map(q)?);
        }
        CechModuleDatum::new(
            self.ring.clone(),
            self.opens,
            self.truncation,
            modules,
            maps,
        )
    }
}

/// Layout of the total covering complex: labelled blocks per degree.
struct TotalLayout {
    p_max: usize,
    qlo: i64,
    qhi: i64,
    /// Increasing tuples per covering level.
    levels: Vec<Vec<Vec<usize>>>,
}

impl TotalLayout {
    fn new(datum: &CechComplexDatum) -> Result<TotalLayout> {
        let p_max = datum.k().min(datum.truncation());
        let mut qlo = i64::MAX;
        let mut qhi = i64::MIN;
        let mut levels = Vec::new();
        for p in 0..=p_max {
            let tuples = strict_injections(p + 1, datum.opens());
            for t in &tuples {
                let c = datum.complex(t)?;
                qlo = qlo.min(c.lo());
                qhi = qhi.max(c.hi());
            }
            levels.push(tuples);
        }
        Ok(TotalLayout {
            p_max,
            qlo,
            qhi,
            levels,
        })
    }

    fn lo(&self) -> i64 {
        self.qlo
    }

    fn hi(&self) -> i64 {
        self.qhi + self.p_max as i64
    }

    /// Sum of the blocks `(p, t, degree n - p)` in level-then-tuple order.
    fn term(
        &self,
        datum: &CechComplexDatum,
        n: i64,
    ) -> Result<(FpModule, BTreeMap<(usize, Vec<usize>), usize>)> {
        let mut parts = Vec::new();
        let mut keys = Vec::new();
        for (p, tuples) in self.levels.iter().enumerate() {
            for t in tuples {
                parts.push(datum.complex(t)?.term(n - p as i64));
                keys.push((p, t.clone()));
            }
        }
        let (sum, offs) = sum_module(datum.ring(), &parts)?;
        Ok((sum, keys.into_iter().zip(offs).collect()))
    }
}

/// The total complex of the covering of complexes: covering differential
/// plus `(-1)^p` times the coefficient differential.
pub fn total_cech_complex(datum: &CechComplexDatum) -> Result<CochainComplex> {
    let layout = TotalLayout::new(datum)?;
    let rs = datum.ring().clone();
    let mut terms = Vec::new();
    let mut offsets = Vec::new();
    for n in layout.lo()..=layout.hi() {
        let (sum, offs) = layout.term(datum, n)?;
        terms.push(sum);
        offsets.push(offs);
    }
    let mut diffs = Vec::new();
    for n in layout.lo()..layout.hi() {
        let idx = (n - layout.lo()) as usize;
        let src = &terms[idx];
        let tgt = &terms[idx + 1];
        let mut d = Matrix::zero(rs.ring().clone(), tgt.generators(), src.generators());
        for (p, tuples) in layout.levels.iter().enumerate() {
            let q = n - p as i64;
            for t in tuples {
                let col = offsets[idx][&(p, t.clone())];
                // coefficient direction, sign (-1)^p
                let mut block = datum.complex(t)?.diff(q).matrix().clone();
                if p % 2 == 1 {
                    block = block.neg();
                }
                d.paste(offsets[idx + 1][&(p, t.clone())], col, &block);
                // covering direction into each tuple with t as a face
                if p + 1 <= layout.p_max {
                    for s in &layout.levels[p + 1] {
                        for j in 0..s.len() {
                            if apply_tuple(s, &face(s.len(), j)) != *t {
                                continue;
                            }
                            let rho = datum.structure_map(&face(s.len(), j), s)?;
                            let mut block = rho.component(q).matrix().clone();
                            if j % 2 == 1 {
                                block = block.neg();
                            }
                            d.paste(offsets[idx + 1][&(p + 1, s.clone())], col, &block);
                        }
                    }
                }
            }
        }
        diffs.push(ModuleMap::new(src.clone(), tgt.clone(), d)?);
    }
    CochainComplex::new(rs, layout.lo(), terms, diffs)
}

/// A map of covering data: one chain map per tuple, natural for the
/// restrictions modulo relations.
#[derive(Clone, Debug)]
pub struct CechDatumMap {
    source: CechComplexDatum,
    target: CechComplexDatum,
    components: BTreeMap<Vec<usize>, ChainMap>,
}

impl CechDatumMap {
    pub fn new(
        source: CechComplexDatum,
        target: CechComplexDatum,
        components: BTreeMap<Vec<usize>, ChainMap>,
    ) -> Result<CechDatumMap> {
        if source.ring() != target.ring()
            || source.opens() != target.opens()
            || source.truncation() != target.truncation()
        {
            return Err(Error::Precondition(
                "covering map endpoints describe different covers".into(),
            ));
        }
        for len in 1..=source.truncation() + 1 {
            for t in all_tuples(source.opens(), len) {
                let f = components.get(&t).ok_or_else(|| {
                    Error::InvalidObject(format!("missing component for tuple {t:?}"))
                })?;
                if f.source() != source.complex(&t)? || f.target() != target.complex(&t)? {
                    return Err(Error::InvalidObject(format!(
                        "component for {t:?} has wrong endpoints"
                    )));
                }
            }
        }
        // naturality against every stored restriction
        for n1 in 1..=source.truncation() + 1 {
            for t in all_tuples(source.opens(), n1) {
                for m1 in 1..=n1 {
                    for alpha in strict_injections(m1, n1) {
                        if is_identity_injection(&alpha, n1) {
                            continue;
                        }
                        let ta = apply_tuple(&t, &alpha);
                        let lhs = components[&t].compose(&source.structure_map(&alpha, &t)?)?;
                        let rhs = target
                            .structure_map(&alpha, &t)?
                            .compose(&components[&ta])?;
                        if !chain_maps_agree(&lhs, &rhs)? {
                            return Err(Error::InvalidObject(format!(
                                "component fails naturality at {alpha:?} into {t:?}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(CechDatumMap {
            source,
            target,
            components,
        })
    }

    pub fn source(&self) -> &CechComplexDatum {
        &self.source
    }

    pub fn target(&self) -> &CechComplexDatum {
        &self.target
    }

    pub fn component(&self, t: &[usize]) -> Result<&ChainMap> {
        self.components
            .get(t)
            .ok_or_else(|| Error::InvalidObject(format!("no component for tuple {t:?}")))
    }

    /// The induced map of total covering complexes.
    pub fn total_chain_map(&self) -> Result<ChainMap> {
        let tot_src = total_cech_complex(&self.source)?;
        let tot_tgt = total_cech_complex(&self.target)?;
        let src_layout = TotalLayout::new(&self.source)?;
        let tgt_layout = TotalLayout::new(&self.target)?;
        let rs = self.source.ring().clone();
        let lo = tot_src.lo().min(tot_tgt.lo());
        let hi = tot_src.hi().max(tot_tgt.hi());
        let mut comps = BTreeMap::new();
        for n in lo..=hi {
            let (src_term, src_offs) = src_layout.term(&self.source, n)?;
            let (tgt_term, tgt_offs) = tgt_layout.term(&self.target, n)?;
            let mut m = Matrix::zero(rs.ring().clone(), tgt_term.generators(), src_term.generators());
            for (key, &col) in &src_offs {
                let (p, t) = key;
                let Some(&row) = tgt_offs.get(key) else {
                    continue;
                };
                let block = self.components[t].component(n - *p as i64);
                m.paste(row, col, block.matrix());
            }
            comps.insert(n, ModuleMap::new(tot_src.term(n), tot_tgt.term(n), m)?);
        }
        ChainMap::new(tot_src, tot_tgt, comps)
    }
}

/// A termwise `pi^e`-isomorphism of covering data passes to the total
/// complexes with cohomology defect at most `2e`.
#[derive(Clone, Debug)]
pub struct CechTransferAudit {
    pub levelwise_exponent: u32,
    pub bound: u32,
    pub measured: u32,
    pub per_degree: Vec<(i64, u32)>,
}

pub fn cech_map_transfer(map: &CechDatumMap, e: u32, cap: u32) -> Result<CechTransferAudit> {
    let src = map.source();
    let p_max = src.k().min(src.truncation());
    for p in 0..=p_max {
        for t in strict_injections(p + 1, src.opens()) {
            let f = map.component(&t)?;
            let lo = f.source().lo().min(f.target().lo());
            let hi = f.source().hi().max(f.target().hi());
            for q in lo..=hi {
                if !f.component(q).is_pi_isomorphism(e)? {
                    return Err(Error::Precondition(format!(
                        "component for {t:?} is not a pi^{e}-isomorphism in degree {q}"
                    )));
                }
            }
        }
    }
    let tot = map.total_chain_map()?;
    let lo = tot.source().lo().min(tot.target().lo());
    let hi = tot.source().hi().max(tot.target().hi());
    let mut per_degree = Vec::new();
    let mut measured = 0u32;
    for i in lo..=hi {
        let h = tot.induced_cohomology_map(i)?;
        let m = h.pi_iso_exponent(cap)?.ok_or(Error::ExponentCapExceeded {
            what: format!("total covering cohomology in degree {i}"),
            cap,
        })?;
        measured = measured.max(m);
        per_degree.push((i, m));
    }
    Ok(CechTransferAudit {
        levelwise_exponent: e,
        bound: bounds::cech_transfer_bound(e),
        measured,
        per_degree,
    })
}

/// A covering map that is a `pi`-isomorphism on cohomology above `a` and
/// a `pi`-surjection at `a`, tuple by tuple, stays within `pi^{4(k+1)}`
/// on total cohomology above `a + k` and within `pi^{2(k+1)}` as a
/// surjection at `a + k`.
#[derive(Clone, Debug)]
pub struct CohomologyTransferAudit {
    pub a: i64,
    pub k: usize,
    pub iso_bound: u32,
    pub iso_measured: u32,
    pub surj_bound: u32,
    pub surj_measured: u32,
    pub per_degree: Vec<(i64, u32)>,
}

pub fn cohomology_bound_transfer(
    map: &CechDatumMap,
    a: i64,
    cap: u32,
) -> Result<CohomologyTransferAudit> {
    let src = map.source();
    let k = src.k();
    if src.truncation() < k {
        return Err(Error::Precondition(format!(
            "edge transfer needs the full covering depth {k}"
        )));
    }
    for p in 0..=k {
        for t in strict_injections(p + 1, src.opens()) {
            let f = map.component(&t)?;
            let hi = f.source().hi().max(f.target().hi());
            for i in a..=hi {
                let h = f.induced_cohomology_map(i)?;
                if i > a {
                    if !h.is_pi_isomorphism(1)? {
                        return Err(Error::Precondition(format!(
                            "cohomology of {t:?} is not a pi-isomorphism in degree {i}"
                        )));
                    }
                } else {
                    let (coker, _) = h.cokernel()?;
                    if !coker.is_pi_null(1)? {
                        return Err(Error::Precondition(format!(
                            "cohomology of {t:?} is not pi-surjective in degree {i}"
                        )));
                    }
                }
            }
        }
    }
    let tot = map.total_chain_map()?;
    let hi = tot.source().hi().max(tot.target().hi());
    let edge = a + k as i64;
    let mut per_degree = Vec::new();
    let mut iso_measured = 0u32;
    let h_edge = tot.induced_cohomology_map(edge)?;
    let (coker, _) = h_edge.cokernel()?;
    let surj_measured = coker
        .min_null_exponent(cap)?
        .map(|(e, _)| e)
        .ok_or(Error::ExponentCapExceeded {
            what: format!("edge surjectivity in degree {edge}"),
            cap,
        })?;
    for i in (edge + 1)..=hi {
        let h = tot.induced_cohomology_map(i)?;
        let m = h.pi_iso_exponent(cap)?.ok_or(Error::ExponentCapExceeded {
            what: format!("total covering cohomology in degree {i}"),
            cap,
        })?;
        iso_measured = iso_measured.max(m);
        per_degree.push((i, m));
    }
    Ok(CohomologyTransferAudit {
        a,
        k,
        iso_bound: bounds::cohomology_transfer_iso_bound(k),
        iso_measured,
        surj_bound: bounds::cohomology_transfer_surj_bound(k),
        surj_measured,
        per_degree,
    })
}

/// Resolution of the total covering complex on the shifted window
/// `[a + k, b + k]`, with the finite-type bookkeeping that justifies it:
/// second-page pieces compress within `pi`, total cohomology within
/// `pi^{k+1}`.
#[derive(Clone, Debug)]
pub struct CechCoherenceAudit {
    pub resolution: PseudoResolution,
    pub window: (i64, i64),
    /// `(covering degree, coefficient degree, measured exponent)` for the
    /// second-page pieces, each within `pi`.
    pub second_page: Vec<(usize, i64, u32)>,
    /// Filtration depth `k + 1` caps the finite-type exponent per degree.
    pub filtration_bound: u32,
    pub finite_type_measured: Vec<(i64, u32)>,
}

pub fn cech_pseudo_coherence(
    datum: &CechComplexDatum,
    a: i64,
    b: i64,
    opts: BuildOptions,
) -> Result<CechCoherenceAudit> {
    let k = datum.k();
    if datum.truncation() < k {
        return Err(Error::Precondition(format!(
            "coherence transfer needs the full covering depth {k}"
        )));
    }
    if a > b {
        return Err(Error::Precondition(format!("empty window [{a}, {b}]")));
    }
    for len in 1..=datum.truncation() + 1 {
        for t in all_tuples(datum.opens(), len) {
            if !vanishes_above(datum.complex(&t)?, b)? {
                return Err(Error::Precondition(format!(
                    "complex for {t:?} does not vanish above degree {b}"
                )));
            }
        }
    }
    let mut second_page = Vec::new();
    for q in a..=b {
        let hq = datum.cohomology_datum(q)?;
        let cq = ordered_cech_complex(&hq)?;
        for p in 0..=k {
            let e2 = cq.cohomology(p as i64)?.module;
            let cert = pi_finite_type(&e2, 1)?;
            second_page.push((p, q, cert.exponent));
        }
    }
    let tot = total_cech_complex(datum)?;
    let window = (a + k as i64, b + k as i64);
    let mut finite_type_measured = Vec::new();
    for i in window.0..=window.1 {
        let h = tot.cohomology(i)?.module;
        if is_zero_module(&h)? {
            finite_type_measured.push((i, 0));
            continue;
        }
        let cert = pi_finite_type(&h, k as u32 + 1)?;
        finite_type_measured.push((i, cert.exponent));
    }
    let resolution = build_pseudo_resolution(&tot, window.0, window.1, opts)?;
    Ok(CechCoherenceAudit {
        resolution,
        window,
        second_page,
        filtration_bound: k as u32 + 1,
        finite_type_measured,
    })
}
