//! Uniform-exponent certificate families over a finite list of torsion
//! directions, and the levelwise free resolution of covering data.
//!
//! A context fixes one base ring and finitely many nonzero non-unit
//! elements.  Every "for all directions" statement is materialized as a
//! finite family of per-direction certificates sharing one exponent
//! level, so re-verification is a finite, exact computation.  The
//! levelwise resolution covers each module of a covering datum by the
//! direct sum of free covers pulled in along every sub-tuple inclusion,
//! which is what makes the face maps of the datum lift strictly.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::cech::{
    all_tuples, apply_tuple, factor_through_kernel, is_identity_injection, strict_injections,
    sum_module, CechComplexDatum, CechModuleDatum,
};
use crate::cert::NullityCert;
use crate::complex::{ChainMap, CochainComplex};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module::{FpModule, ModuleMap};
use crate::pseudo::{compressed_cover, is_zero_module, pi_finite_type, PiFiniteTypeCert, PseudoResolution};
use crate::ring::{Ring, RingSpec};

/// A base ring together with finitely many torsion directions.  Each
/// direction is a nonzero non-unit element; statements "for every
/// direction" quantify over exactly this list.
///
/// The list is a stand-in for an idempotent ideal of torsion elements:
/// no finitely presented carrier holds a genuine one, so every almost-style
/// statement here is a uniform-exponent family statement instead of a
/// limit statement.
#[derive(Clone, Debug)]
pub struct AlmostContext {
    ring: Ring,
    specs: Vec<RingSpec>,
}

impl AlmostContext {
    pub fn new(ring: Ring, generators: &[i64]) -> Result<AlmostContext> {
        let mut specs = Vec::with_capacity(generators.len());
        for g in generators {
            specs.push(RingSpec::new(ring.clone(), BigInt::from(*g))?);
        }
        Ok(AlmostContext { ring, specs })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn generator(&self, i: usize) -> Result<&BigInt> {
        Ok(self.spec(i)?.pi())
    }

    pub fn spec(&self, i: usize) -> Result<&RingSpec> {
        self.specs
            .get(i)
            .ok_or_else(|| Error::Precondition(format!("no generator {i} in the context")))
    }

    /// The same presentation, read against direction `i`.
    pub fn with_generator(&self, m: &FpModule, i: usize) -> Result<FpModule> {
        if m.ring().ring() != &self.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                m.ring().ring(),
                self.ring
            )));
        }
        FpModule::new(self.spec(i)?.clone(), m.generators(), m.relations().clone())
    }

    /// Killed outright by every direction in the list.
    pub fn is_almost_zero(&self, m: &FpModule) -> Result<bool> {
        for i in 0..self.len() {
            if !self.with_generator(m, i)?.is_pi_null(1)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One finite-type certificate per context direction, bundled at a
/// uniform exponent level: member `i` covers the module up to the `i`-th
/// direction raised to at most `exponent`.
#[derive(Clone, Debug)]
pub struct AlmostCert {
    pub exponent: u32,
    pub members: Vec<PiFiniteTypeCert>,
}

impl AlmostCert {
    /// Re-run every member against `m` read in its direction.  Exact and
    /// idempotent: nothing is cached between calls.
    pub fn verify(&self, ctx: &AlmostContext, m: &FpModule) -> Result<()> {
        if self.members.len() != ctx.len() {
            return Err(Error::VerificationFailed(format!(
                "{} members for {} directions",
                self.members.len(),
                ctx.len()
            )));
        }
        for (i, member) in self.members.iter().enumerate() {
            if member.exponent > self.exponent {
                return Err(Error::VerificationFailed(format!(
                    "member {i} exceeds the uniform level {}",
                    self.exponent
                )));
            }
            if &member.module != &ctx.with_generator(m, i)? {
                return Err(Error::VerificationFailed(format!(
                    "member {i} certifies a different module"
                )));
            }
            member.verify()?;
        }
        Ok(())
    }
}

/// Bundle per-direction certificates at the uniform level `l`.  Every
/// member must already certify at `l` or better.
pub fn almost_from_family(family: Vec<PiFiniteTypeCert>, l: u32) -> Result<AlmostCert> {
    for (i, member) in family.iter().enumerate() {
        if member.exponent > l {
            return Err(Error::Precondition(format!(
                "member {i} certifies exponent {} above the uniform level {l}",
                member.exponent
            )));
        }
        member.verify()?;
    }
    Ok(AlmostCert {
        exponent: l,
        members: family,
    })
}

/// Measure a finite-type certificate for `m` in every context direction
/// at level `l` and bundle the family.
pub fn almost_finite_type(ctx: &AlmostContext, m: &FpModule, l: u32) -> Result<AlmostCert> {
    let mut family = Vec::with_capacity(ctx.len());
    for i in 0..ctx.len() {
        family.push(pi_finite_type(&ctx.with_generator(m, i)?, l)?);
    }
    almost_from_family(family, l)
}

/// Finitely many generators covering `module` up to multiplication by one
/// ring element — not necessarily a power of a single direction.
#[derive(Clone, Debug)]
pub struct ElementFiniteTypeCert {
    pub module: FpModule,
    pub annihilator: BigInt,
    pub generator_map: ModuleMap,
}

impl ElementFiniteTypeCert {
    pub fn verify(&self) -> Result<()> {
        if !self.generator_map.source().is_free_presentation() {
            return Err(Error::VerificationFailed(
                "generator map must start from a free module".into(),
            ));
        }
        if self.generator_map.target() != &self.module {
            return Err(Error::VerificationFailed(
                "generator map does not land in the certified module".into(),
            ));
        }
        let (coker, _) = self.generator_map.cokernel()?;
        if !ModuleMap::scaled_identity(&coker, &self.annihilator)?.is_zero_map()? {
            return Err(Error::VerificationFailed(format!(
                "{} does not annihilate the cokernel",
                self.annihilator
            )));
        }
        Ok(())
    }
}

/// Concatenate the covers of two finite-type certificates on the same
/// presentation into one cover whose cokernel is a common quotient of
/// both input cokernels, hence killed by `x*a1 + y*a2` where `a_i` are
/// the input annihilators.
pub fn combine_finite_type(
    c1: &PiFiniteTypeCert,
    c2: &PiFiniteTypeCert,
    x: &BigInt,
    y: &BigInt,
) -> Result<ElementFiniteTypeCert> {
    c1.verify()?;
    c2.verify()?;
    let ring = c1.module.ring().ring().clone();
    if c2.module.ring().ring() != &ring
        || c1.module.generators() != c2.module.generators()
        || c1.module.relations() != c2.module.relations()
    {
        return Err(Error::Precondition(
            "certificates cover different modules".into(),
        ));
    }
    let a1 = c1.module.ring().pi_pow(c1.exponent);
    let a2 = c2.module.ring().pi_pow(c2.exponent);
    let annihilator = ring.add(&ring.mul(x, &a1), &ring.mul(y, &a2));
    let cover = c1
        .generator_map
        .matrix()
        .hstack(c2.generator_map.matrix())?;
    let source = FpModule::free(
        c1.module.ring().clone(),
        c1.generator_map.source().generators() + c2.generator_map.source().generators(),
    );
    let cert = ElementFiniteTypeCert {
        module: c1.module.clone(),
        annihilator,
        generator_map: ModuleMap::new(source, c1.module.clone(), cover)?,
    };
    cert.verify()?;
    Ok(cert)
}

/// Which member of a short exact triple the certificate is wanted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleSlot {
    Sub,
    Middle,
    Quotient,
}

fn check_short_exact(inclusion: &ModuleMap, projection: &ModuleMap) -> Result<()> {
    if inclusion.target() != projection.source() {
        return Err(Error::Precondition(
            "inclusion and projection do not share the middle module".into(),
        ));
    }
    let (ker_u, _) = inclusion.kernel()?;
    if !is_zero_module(&ker_u)? {
        return Err(Error::Precondition("the inclusion is not injective".into()));
    }
    let (coker_v, _) = projection.cokernel()?;
    if !is_zero_module(&coker_v)? {
        return Err(Error::Precondition(
            "the projection is not surjective".into(),
        ));
    }
    if !projection.compose(inclusion)?.is_zero_map()? {
        return Err(Error::Precondition(
            "the composite through the middle is nonzero".into(),
        ));
    }
    let (_, kv_incl) = projection.kernel()?;
    let middle = inclusion.target();
    if crate::normal_form::solve_simultaneous(
        &[inclusion.matrix(), middle.relations()],
        kv_incl.matrix(),
    )?
    .is_none()
    {
        return Err(Error::Precondition(
            "the projection kernel does not factor through the inclusion".into(),
        ));
    }
    Ok(())
}

/// Read a map against direction `i` of the context.
fn map_with_generator(ctx: &AlmostContext, f: &ModuleMap, i: usize) -> Result<ModuleMap> {
    ModuleMap::new(
        ctx.with_generator(f.source(), i)?,
        ctx.with_generator(f.target(), i)?,
        f.matrix().clone(),
    )
}

fn member_cert(
    module: FpModule,
    generator_map: ModuleMap,
    bound: u32,
    what: &str,
) -> Result<PiFiniteTypeCert> {
    let (coker, _) = generator_map.cokernel()?;
    let coker_witness = NullityCert::measure_required(&coker, bound, what)?;
    Ok(PiFiniteTypeCert {
        module,
        exponent: coker_witness.exponent,
        generator_map,
        coker_witness,
    })
}

/// Produce a finite-type family for the remaining member of a short exact
/// triple `0 -> sub -> middle -> quotient -> 0` from the families of the
/// other two, following the kernel-chase of the extension argument.  The
/// measured exponent per direction is capped by the construction itself:
/// the covering level of the middle when the unknown sits at an end, and
/// the sum of the two covering levels when the unknown is the middle.
pub fn two_of_three(
    ctx: &AlmostContext,
    inclusion: &ModuleMap,
    projection: &ModuleMap,
    known_a: &AlmostCert,
    known_b: &AlmostCert,
    unknown: TripleSlot,
) -> Result<AlmostCert> {
    check_short_exact(inclusion, projection)?;
    let sub = inclusion.source();
    let middle = inclusion.target();
    let quotient = projection.target();
    match unknown {
        TripleSlot::Sub => {
            known_a.verify(ctx, middle)?;
            known_b.verify(ctx, quotient)?;
        }
        TripleSlot::Middle => {
            known_a.verify(ctx, sub)?;
            known_b.verify(ctx, quotient)?;
        }
        TripleSlot::Quotient => {
            known_a.verify(ctx, sub)?;
            known_b.verify(ctx, middle)?;
        }
    }
    let mut members = Vec::with_capacity(ctx.len());
    let mut level = 0u32;
    for i in 0..ctx.len() {
        let u = map_with_generator(ctx, inclusion, i)?;
        let v = map_with_generator(ctx, projection, i)?;
        let member = match unknown {
            TripleSlot::Quotient => {
                // push the middle cover forward; its cokernel is a
                // quotient of the middle cover's cokernel
                let f2 = &known_b.members[i].generator_map;
                let cover = v.compose(f2)?;
                member_cert(
                    v.target().clone(),
                    cover,
                    known_b.members[i].exponent,
                    "pushed-forward cover",
                )?
            }
            TripleSlot::Sub => {
                // pull the middle cover back: generators of the preimage
                // of the sub under the cover reach everything the cover
                // reaches inside the sub
                let f2 = &known_a.members[i].generator_map;
                let g = v.compose(f2)?;
                let (pre, pre_incl) = g.kernel()?;
                let into_middle = f2.compose(&pre_incl)?;
                let sol = crate::normal_form::solve_simultaneous(
                    &[u.matrix(), u.target().relations()],
                    into_middle.matrix(),
                )?
                .ok_or_else(|| {
                    Error::InternalSolve("preimage does not land in the sub".into())
                })?;
                let to_sub = ModuleMap::new(pre.clone(), u.source().clone(), sol[0].clone())?;
                let free_pre = compressed_cover(&pre, None)?;
                member_cert(
                    u.source().clone(),
                    to_sub.compose(&free_pre)?,
                    known_a.members[i].exponent,
                    "pulled-back cover",
                )?
            }
            TripleSlot::Middle => {
                // lift the quotient cover through the projection and
                // adjoin the pushed-in sub cover; chasing an element
                // costs one covering level on each side
                let f1 = &known_a.members[i].generator_map;
                let f3 = &known_b.members[i].generator_map;
                let lift = crate::normal_form::solve_simultaneous(
                    &[v.matrix(), v.target().relations()],
                    f3.matrix(),
                )?
                .ok_or_else(|| Error::InternalSolve("quotient cover does not lift".into()))?;
                let pushed = u.compose(f1)?;
                let cover = pushed.matrix().hstack(&lift[0])?;
                let source = FpModule::free(
                    u.source().ring().clone(),
                    f1.source().generators() + f3.source().generators(),
                );
                member_cert(
                    u.target().clone(),
                    ModuleMap::new(source, u.target().clone(), cover)?,
                    known_a.members[i].exponent + known_b.members[i].exponent,
                    "extension cover",
                )?
            }
        };
        level = level.max(member.exponent);
        members.push(member);
    }
    Ok(AlmostCert {
        exponent: level,
        members,
    })
}

/// One constructed stage of the levelwise resolution, kept private: the
/// free sum per tuple with its component layout and the map down to the
/// stage's coefficient datum.
struct Stage {
    free: CechModuleDatum,
    augmentations: BTreeMap<Vec<usize>, ModuleMap>,
}

fn nonempty_subsets(len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::with_capacity((1usize << len) - 1);
    for mask in 1u64..(1u64 << len) {
        let mut s = Vec::new();
        for b in 0..len {
            if mask & (1 << b) != 0 {
                s.push(b);
            }
        }
        out.push(s);
    }
    out.sort();
    out
}

pub(crate) fn non_identity_faces(len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for m1 in 1..=len {
        for alpha in strict_injections(m1, len) {
            if !is_identity_injection(&alpha, len) {
                out.push(alpha);
            }
        }
    }
    out
}

/// Cover every module of `datum` by the direct sum, over all sub-tuple
/// inclusions, of the free covers of the restricted modules.  The face
/// maps of the datum lift to component-shuffling injections of the free
/// sums, strictly compatible with the covers.
fn cover_stage(
    datum: &CechModuleDatum,
    lazy_threshold: Option<u32>,
    rank_budget: Option<usize>,
) -> Result<Stage> {
    let rs = datum.ring().clone();
    let opens = datum.opens();
    let truncation = datum.truncation();
    let mut tuples = Vec::new();
    for len in 1..=truncation + 1 {
        tuples.extend(all_tuples(opens, len));
    }
    let mut covers: BTreeMap<Vec<usize>, ModuleMap> = BTreeMap::new();
    for t in &tuples {
        covers.insert(t.clone(), compressed_cover(datum.module(t)?, lazy_threshold)?);
    }
    // component layout per tuple: one block per nonempty subset of its
    // positions, carrying the free cover of the restricted module
    let mut subsets_by_tuple: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
    let mut offsets_by_tuple: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut free_modules: BTreeMap<Vec<usize>, FpModule> = BTreeMap::new();
    let mut augmentations: BTreeMap<Vec<usize>, ModuleMap> = BTreeMap::new();
    for t in &tuples {
        let subsets = nonempty_subsets(t.len());
        let parts: Vec<FpModule> = subsets
            .iter()
            .map(|s| covers[&apply_tuple(t, s)].source().clone())
            .collect();
        let (total, offsets) = sum_module(&rs, &parts)?;
        if let Some(budget) = rank_budget {
            if total.generators() > budget {
                return Err(Error::SizeBudget(format!(
                    "free term over {t:?} needs {} generators, budget {budget}",
                    total.generators()
                )));
            }
        }
        let target = datum.module(t)?.clone();
        let mut aug = Matrix::zero(rs.ring().clone(), target.generators(), total.generators());
        for (j, s) in subsets.iter().enumerate() {
            let piece = datum
                .structure_map(s, t)?
                .compose(&covers[&apply_tuple(t, s)])?;
            aug.paste(0, offsets[j], piece.matrix());
        }
        augmentations.insert(t.clone(), ModuleMap::new(total.clone(), target, aug)?);
        subsets_by_tuple.insert(t.clone(), subsets);
        offsets_by_tuple.insert(t.clone(), offsets);
        free_modules.insert(t.clone(), total);
    }
    // face maps: the block indexed by a subset of the source positions
    // lands identically on the block indexed by its image positions
    let mut maps: BTreeMap<(Vec<usize>, Vec<usize>), ModuleMap> = BTreeMap::new();
    for t in &tuples {
        for beta in non_identity_faces(t.len()) {
            let tb = apply_tuple(t, &beta);
            let source = &free_modules[&tb];
            let target = &free_modules[t];
            let mut mat = Matrix::zero(
                rs.ring().clone(),
                target.generators(),
                source.generators(),
            );
            let src_subsets = &subsets_by_tuple[&tb];
            let src_offsets = &offsets_by_tuple[&tb];
            let tgt_subsets = &subsets_by_tuple[t];
            let tgt_offsets = &offsets_by_tuple[t];
            for (j, s) in src_subsets.iter().enumerate() {
                let image = apply_tuple(&beta, s);
                let pos = tgt_subsets
                    .binary_search(&image)
                    .map_err(|_| Error::InvalidObject("missing component block".into()))?;
                let rank = covers[&apply_tuple(&tb, s)].source().generators();
                mat.paste(
                    tgt_offsets[pos],
                    src_offsets[j],
                    &Matrix::identity(rs.ring().clone(), rank),
                );
            }
            maps.insert(
                (beta, t.clone()),
                ModuleMap::new(source.clone(), target.clone(), mat)?,
            );
        }
    }
    let free = CechModuleDatum::new(rs, opens, truncation, free_modules, maps)?;
    Ok(Stage {
        free,
        augmentations,
    })
}

/// The kernels of a stage's augmentations, with the face maps they
/// inherit from the free sums, plus the inclusions back into the sums.
fn kernel_stage(stage: &Stage) -> Result<(CechModuleDatum, BTreeMap<Vec<usize>, ModuleMap>)> {
    let rs = stage.free.ring().clone();
    let opens = stage.free.opens();
    let truncation = stage.free.truncation();
    let mut tuples = Vec::new();
    for len in 1..=truncation + 1 {
        tuples.extend(all_tuples(opens, len));
    }
    let mut modules = BTreeMap::new();
    let mut inclusions = BTreeMap::new();
    for t in &tuples {
        let (k, incl) = stage.augmentations[t].kernel()?;
        modules.insert(t.clone(), k);
        inclusions.insert(t.clone(), incl);
    }
    let mut maps = BTreeMap::new();
    for t in &tuples {
        for beta in non_identity_faces(t.len()) {
            let tb = apply_tuple(t, &beta);
            let through = stage
                .free
                .structure_map(&beta, t)?
                .compose(&inclusions[&tb])?;
            maps.insert(
                (beta, t.clone()),
                factor_through_kernel(&inclusions[t], &through)?,
            );
        }
    }
    Ok((
        CechModuleDatum::new(rs, opens, truncation, modules, maps)?,
        inclusions,
    ))
}

/// Free complexes over a covering datum: one termwise-free resolution per
/// tuple, with face maps lifting the datum's and commuting with the
/// augmentations on the nose.
#[derive(Clone, Debug)]
pub struct SimplicialResolution {
    /// the covering datum being resolved
    pub datum: CechModuleDatum,
    /// the free complexes with their lifted face maps
    pub complexes: CechComplexDatum,
    /// per-tuple certified resolutions `F_t -> M_t[0]`
    pub witnesses: BTreeMap<Vec<usize>, PseudoResolution>,
}

impl SimplicialResolution {
    /// Re-check every per-tuple certificate and the strict commutation of
    /// every lifted face square with the augmentations.
    pub fn verify(&self) -> Result<()> {
        let opens = self.datum.opens();
        let truncation = self.datum.truncation();
        for len in 1..=truncation + 1 {
            for t in all_tuples(opens, len) {
                let witness = self
                    .witnesses
                    .get(&t)
                    .ok_or_else(|| Error::VerificationFailed(format!("no witness for {t:?}")))?;
                witness.verify()?;
                if &witness.p != self.complexes.complex(&t)? {
                    return Err(Error::VerificationFailed(format!(
                        "witness complex differs from the stored one at {t:?}"
                    )));
                }
                let aug_t = witness.map.component(0);
                for m1 in 1..=len {
                    for alpha in strict_injections(m1, len) {
                        if is_identity_injection(&alpha, len) {
                            continue;
                        }
                        let ta = apply_tuple(&t, &alpha);
                        let lifted = self.complexes.structure_map(&alpha, &t)?.component(0);
                        let aug_ta = self.witnesses[&ta].map.component(0);
                        let over = self.datum.structure_map(&alpha, &t)?;
                        if !aug_t.compose(&lifted)?.equals(&over.compose(&aug_ta)?)? {
                            return Err(Error::VerificationFailed(format!(
                                "face {alpha:?} into {t:?} does not commute with the covers"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Resolve every module of the datum by free modules, `depth` stages
/// deep, so that each per-tuple complex maps to its module as a certified
/// resolution on `[-depth, 0]`.  With `lazy_threshold: Some(l)` the
/// stage covers skip `pi^l`-annihilated cyclic pieces, so every
/// certificate carries exponent `l` instead of being exact.  A rank
/// budget, when given, aborts any stage whose free term would exceed it
/// instead of grinding through matrices that no longer fit a desk.
pub fn simplicial_free_pi_resolution(
    datum: &CechModuleDatum,
    depth: u32,
    lazy_threshold: Option<u32>,
    rank_budget: Option<usize>,
) -> Result<SimplicialResolution> {
    let rs = datum.ring().clone();
    let opens = datum.opens();
    let truncation = datum.truncation();
    let mut tuples = Vec::new();
    for len in 1..=truncation + 1 {
        tuples.extend(all_tuples(opens, len));
    }
    // stage 0 covers the datum itself; stage j covers the kernels of
    // stage j-1
    let mut stages: Vec<Stage> = Vec::with_capacity(depth as usize + 1);
    let mut inclusions: Vec<BTreeMap<Vec<usize>, ModuleMap>> = Vec::with_capacity(depth as usize);
    let mut current = datum.clone();
    for j in 0..=depth {
        let stage = cover_stage(&current, lazy_threshold, rank_budget)?;
        if j < depth {
            let (next, incls) = kernel_stage(&stage)?;
            inclusions.push(incls);
            current = next;
        }
        stages.push(stage);
    }
    let lo = -(depth as i64);
    let exponent = lazy_threshold.unwrap_or(0);
    let mut complexes = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    for t in &tuples {
        let mut terms = Vec::with_capacity(depth as usize + 1);
        let mut diffs = Vec::new();
        for j in (0..=depth).rev() {
            terms.push(stages[j as usize].free.module(t)?.clone());
        }
        for j in (1..=depth).rev() {
            let aug = &stages[j as usize].augmentations[t];
            let incl = &inclusions[(j - 1) as usize][t];
            diffs.push(incl.compose(aug)?);
        }
        let complex = CochainComplex::new(rs.clone(), lo, terms, diffs)?;
        let target = CochainComplex::concentrated(datum.module(t)?.clone(), 0);
        let map = ChainMap::new(
            complex.clone(),
            target.clone(),
            BTreeMap::from([(0, stages[0].augmentations[t].clone())]),
        )?;
        witnesses.insert(
            t.clone(),
            PseudoResolution::new(complex.clone(), target, map, (lo, 0), exponent)?,
        );
        complexes.insert(t.clone(), complex);
    }
    let mut chain_maps = BTreeMap::new();
    for t in &tuples {
        for beta in non_identity_faces(t.len()) {
            let tb = apply_tuple(t, &beta);
            let mut components = BTreeMap::new();
            for j in 0..=depth {
                components.insert(
                    -(j as i64),
                    stages[j as usize].free.structure_map(&beta, t)?,
                );
            }
            chain_maps.insert(
                (beta.clone(), t.clone()),
                ChainMap::new(
                    complexes[&tb].clone(),
                    complexes[t].clone(),
                    components,
                )?,
            );
        }
    }
    let complexes = CechComplexDatum::new(rs, opens, truncation, complexes, chain_maps)?;
    let res = SimplicialResolution {
        datum: datum.clone(),
        complexes,
        witnesses,
    };
    res.verify()?;
    Ok(res)
}
