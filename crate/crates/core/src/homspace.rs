//! The mapping complex `Hom(P, M)` realized as an honest cochain complex
//! of presented modules, so chain-map classes, null-homotopies, and their
//! minimal annihilation exponents all reduce to the same kernel/solve
//! machinery as everything else.
//!
//! Degree `n` holds the products `Hom(P^i, M^{i+n})` over the window of
//! `P`, flattened column-major; the differential is
//! `δ(f) = d_M ∘ f - (-1)^n f ∘ d_P`, assembled from Kronecker blocks.
//! Chain maps `P -> M` are the zero-cycles, homotopies the degree `-1`
//! elements, and `H^0` is the module of maps up to homotopy.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::cert::PiCertificate;
use crate::complex::{ChainMap, CochainComplex, Homotopy};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module::{FpModule, ModuleMap};
use crate::normal_form::solve_simultaneous;

/// Layout of one flattened degree: for each source degree `i` of `P`, the
/// offset and width of its `Hom(P^i, M^{i+n})` block.
#[derive(Clone, Debug)]
struct Layout {
    blocks: Vec<(i64, usize, usize)>, // (i, offset, size)
    total: usize,
}

impl Layout {
    fn block(&self, i: i64) -> Option<(usize, usize)> {
        self.blocks
            .iter()
            .find(|(d, _, _)| *d == i)
            .map(|(_, o, s)| (*o, *s))
    }
}

#[derive(Clone, Debug)]
pub struct HomComplex {
    complex: CochainComplex,
    p: CochainComplex,
    m: CochainComplex,
    layouts: BTreeMap<i64, Layout>, // degrees -1, 0, 1
}

fn layout_for(p: &CochainComplex, m: &CochainComplex, n: i64) -> Layout {
    let mut blocks = Vec::new();
    let mut offset = 0usize;
    for i in p.lo()..=p.hi() {
        let size = p.term(i).generators() * m.term(i + n).generators();
        blocks.push((i, offset, size));
        offset += size;
    }
    Layout {
        blocks,
        total: offset,
    }
}

impl HomComplex {
    pub fn new(p: &CochainComplex, m: &CochainComplex) -> Result<HomComplex> {
        if p.ring() != m.ring() {
            return Err(Error::RingMismatch(format!("{} vs {}", p.ring(), m.ring())));
        }
        if !p.is_termwise_free() {
            return Err(Error::Precondition(
                "mapping complex wants a free source".into(),
            ));
        }
        let ring = p.ring().clone();
        let r = ring.ring().clone();
        let mut layouts = BTreeMap::new();
        let mut terms = Vec::new();
        for n in -1..=1i64 {
            let layout = layout_for(p, m, n);
            // relations: per block, one copy of rel(M^{i+n}) per generator of P^i
            let mut rel_cols = 0usize;
            let mut rel_blocks = Vec::new();
            for &(i, offset, _) in &layout.blocks {
                let gp = p.term(i).generators();
                let relm = m.term(i + n).relations().clone();
                let block = Matrix::identity(r.clone(), gp).kronecker(&relm)?;
                rel_cols += block.cols();
                rel_blocks.push((offset, block));
            }
            let mut rel = Matrix::zero(r.clone(), layout.total, rel_cols);
            let mut c0 = 0usize;
            for (offset, block) in rel_blocks {
                rel.paste(offset, c0, &block);
                c0 += block.cols();
            }
            terms.push(FpModule::new(ring.clone(), layout.total, rel)?);
            layouts.insert(n, layout);
        }
        let mut diffs = Vec::new();
        for n in -1..=0i64 {
            let src = &layouts[&n];
            let tgt = &layouts[&(n + 1)];
            let mut d = Matrix::zero(r.clone(), tgt.total, src.total);
            let sign = if n.rem_euclid(2) == 0 {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            for &(i, t_off, t_size) in &tgt.blocks {
                if t_size == 0 {
                    continue;
                }
                let gp_i = p.term(i).generators();
                // d_M ∘ f^i : (I ⊗ d_M^{i+n}) on block i
                if let Some((s_off, s_size)) = src.block(i) {
                    if s_size > 0 {
                        let dm = m.diff(i + n).matrix().clone();
                        let block = Matrix::identity(r.clone(), gp_i).kronecker(&dm)?;
                        d.paste(t_off, s_off, &block);
                    }
                }
                // -(-1)^n f^{i+1} ∘ d_P^i : (d_P^{i,T} ⊗ I) on block i+1
                if let Some((s_off, s_size)) = src.block(i + 1) {
                    if s_size > 0 {
                        let dp_t = p.diff(i).matrix().transpose();
                        let gm = m.term(i + 1 + n).generators();
                        let block = dp_t
                            .kronecker(&Matrix::identity(r.clone(), gm))?
                            .scale(&sign);
                        d.paste(t_off, s_off, &block);
                    }
                }
            }
            diffs.push(ModuleMap::new(
                terms[(n + 1) as usize].clone(),
                terms[(n + 2) as usize].clone(),
                d,
            )?);
        }
        let complex = CochainComplex::new(ring, -1, terms, diffs)?;
        Ok(HomComplex {
            complex,
            p: p.clone(),
            m: m.clone(),
            layouts,
        })
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    /// Flatten a chain map into degree-0 coordinates.
    pub fn vec_chain_map(&self, f: &ChainMap) -> Result<Matrix> {
        if f.source() != &self.p || f.target() != &self.m {
            return Err(Error::Precondition(
                "chain map does not belong to this mapping complex".into(),
            ));
        }
        let layout = &self.layouts[&0];
        let r = self.p.ring().ring().clone();
        let mut v = Matrix::zero(r, layout.total, 1);
        for &(i, offset, size) in &layout.blocks {
            if size == 0 {
                continue;
            }
            let flat = f.component(i).matrix().vec_columns();
            v.paste(offset, 0, &flat);
        }
        Ok(v)
    }

    /// Reassemble a degree `-1` coordinate column into a homotopy
    /// `s^i : P^i -> M^{i-1}`.
    pub fn homotopy_from_vec(&self, v: &Matrix) -> Result<Homotopy> {
        let layout = &self.layouts[&-1];
        if v.rows() != layout.total || v.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "homotopy vector is {}x{}, wanted {}x1",
                v.rows(),
                v.cols(),
                layout.total
            )));
        }
        let r = self.p.ring().ring().clone();
        let mut components = BTreeMap::new();
        for &(i, offset, size) in &layout.blocks {
            if size == 0 {
                continue;
            }
            let gm = self.m.term(i - 1).generators();
            let gp = self.p.term(i).generators();
            let flat = v.row_block(offset, offset + size);
            let mat = Matrix::from_vec_columns(r.clone(), gm, gp, &flat)?;
            components.insert(
                i,
                ModuleMap::new(self.p.term(i), self.m.term(i - 1), mat)?,
            );
        }
        Ok(Homotopy { components })
    }

    /// Minimal exponent annihilating the whole module of maps up to
    /// homotopy, i.e. of `H^0` of this complex.
    pub fn annihilation_exponent(&self, cap: u32) -> Result<Option<u32>> {
        let h0 = self.complex.cohomology(0)?;
        Ok(h0.module.min_null_exponent(cap)?.map(|(l, _)| l))
    }

    /// Minimal `L <= cap` with `pi^L f` null-homotopic, with a verified
    /// witness homotopy.  One simultaneous solve per candidate exponent.
    pub fn minimal_null_homotopy(
        &self,
        f: &ChainMap,
        cap: u32,
    ) -> Result<Option<(u32, Homotopy)>> {
        let target0 = self.vec_chain_map(f)?;
        let delta = self.complex.diff(-1);
        let rel = self.complex.term(0).relations().clone();
        for l in 0..=cap {
            let scaled = target0.scale(&self.p.ring().pi_pow(l));
            let Some(parts) = solve_simultaneous(&[delta.matrix(), &rel], &scaled)? else {
                continue;
            };
            let h = self.homotopy_from_vec(&parts[0])?;
            h.verify_null_homotopy(f, l)?;
            return Ok(Some((l, h)));
        }
        Ok(None)
    }
}

/// Post-composition with `alpha : M -> M'` as a chain map of mapping
/// complexes `Hom(P, M) -> Hom(P, M')`.
pub fn postcompose_map(
    p: &CochainComplex,
    alpha: &ChainMap,
    hom_src: &HomComplex,
    hom_tgt: &HomComplex,
) -> Result<ChainMap> {
    let r = p.ring().ring().clone();
    let mut components = BTreeMap::new();
    for n in -1..=1i64 {
        let src_layout = &hom_src.layouts[&n];
        let tgt_layout = &hom_tgt.layouts[&n];
        let mut mat = Matrix::zero(r.clone(), tgt_layout.total, src_layout.total);
        for &(i, s_off, s_size) in &src_layout.blocks {
            if s_size == 0 {
                continue;
            }
            let (t_off, t_size) = tgt_layout.block(i).unwrap_or((0, 0));
            if t_size == 0 {
                continue;
            }
            let gp = p.term(i).generators();
            let a = alpha.component(i + n).matrix().clone();
            let block = Matrix::identity(r.clone(), gp).kronecker(&a)?;
            mat.paste(t_off, s_off, &block);
        }
        components.insert(
            n,
            ModuleMap::new(
                hom_src.complex.term(n),
                hom_tgt.complex.term(n),
                mat,
            )?,
        );
    }
    ChainMap::new(
        hom_src.complex.clone(),
        hom_tgt.complex.clone(),
        components,
    )
}

/// Audit of the induced map `Hom(P, M) -> Hom(P, M')` on classes up to
/// homotopy: the claimed bound next to the measured exponent with its
/// certificate.
#[derive(Clone, Debug)]
pub struct InducedHomAudit {
    pub bound: u32,
    pub measured: u32,
    pub certificate: PiCertificate,
}

/// For `alpha : M -> M'` inducing `pi^e`-isomorphisms on cohomology and
/// `P` free on `[a, b]`, the induced map on maps-up-to-homotopy is a
/// `pi^{2e(b-a+3)}`-isomorphism; measure the true exponent and certify it.
pub fn induced_hom_pi_iso_audit(
    p: &CochainComplex,
    alpha: &ChainMap,
    e: u32,
    cap: u32,
) -> Result<InducedHomAudit> {
    let hom_src = HomComplex::new(p, alpha.source())?;
    let hom_tgt = HomComplex::new(p, alpha.target())?;
    let induced = postcompose_map(p, alpha, &hom_src, &hom_tgt)?;
    let h = induced.induced_cohomology_map(0)?;
    let bound = crate::bounds::induced_hom_iso_bound(e, p.lo(), p.hi());
    let certificate = PiCertificate::measure_required(&h, cap, "induced map on hom classes")?;
    Ok(InducedHomAudit {
        bound,
        measured: certificate.exponent,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_homotopy_ladder;
    use crate::oracle;
    use crate::ring::RingSpec;

    fn two_term(ring: RingSpec, lo: i64, c: i64) -> CochainComplex {
        let r1 = FpModule::free(ring.clone(), 1);
        let d = ModuleMap::scaled_identity(&r1, &BigInt::from(c)).unwrap();
        CochainComplex::new(ring, lo, vec![r1.clone(), r1], vec![d]).unwrap()
    }

    #[test]
    fn hom_annihilation_within_ladder_bound() {
        // P = M = [R --2--> R] over Z/8 on [-1, 0]: H^i(M) pi-null, so the
        // ladder gives pi^2 · Hom-classes = 0; the measured exponent cannot
        // exceed it (and must be positive: id is not null-homotopic).
        let rs = RingSpec::modular(8, 2).unwrap();
        let k = two_term(rs, -1, 2);
        let hom = HomComplex::new(&k, &k).unwrap();
        let measured = hom.annihilation_exponent(8).unwrap().unwrap();
        assert!(measured <= 2, "measured {measured} > ladder bound 2");
        assert!(measured >= 1);
        // the identity's own minimal null-homotopy exponent agrees with the
        // ladder on this example
        let id = ChainMap::identity(&k);
        let (l, h) = hom.minimal_null_homotopy(&id, 8).unwrap().unwrap();
        assert!(l <= measured);
        h.verify_null_homotopy(&id, l).unwrap();
        // and the ladder's uniform homotopy is a valid (possibly larger) one
        let ladder = build_homotopy_ladder(&id, 1).unwrap();
        let (exp, uniform) = ladder.uniform_null_homotopy(&id).unwrap();
        assert_eq!(exp, 2);
        uniform.verify_null_homotopy(&id, exp).unwrap();
    }

    #[test]
    fn hom_classes_match_exhaustive_count() {
        // over Z/4 count chain maps / homotopy exhaustively and compare
        // with the presented H^0
        let rs = RingSpec::modular(4, 2).unwrap();
        let k = two_term(rs, -1, 2);
        let hom = HomComplex::new(&k, &k).unwrap();
        let h0 = hom.complex().cohomology(0).unwrap();
        let algebraic = oracle::coset_count(h0.module.relations(), 1 << 14).unwrap();

        // brute force: degree-0 vectors that are cycles, modulo boundaries
        // and degree-0 relations
        let ring = hom.complex().term(0).ring().ring().clone();
        let d0 = hom.complex().diff(0);
        let d_in = hom.complex().diff(-1);
        let rel0 = hom.complex().term(0).relations().clone();
        let rel1 = hom.complex().term(1).relations().clone();
        let mut cycles = Vec::new();
        for v in oracle::enumerate_vectors(&ring, hom.complex().term(0).generators(), 1 << 14)
            .unwrap()
        {
            let vc = Matrix::column_vector(ring.clone(), &v);
            let dv = d0.matrix().mul(&vc).unwrap();
            if oracle::enumerate_solution(&rel1, &dv, 1 << 14).unwrap().is_some() {
                cycles.push(vc);
            }
        }
        // boundary + relation span
        let span = d_in.matrix().hstack(&rel0).unwrap();
        let span_size = oracle::span_size(&span, 1 << 14).unwrap();
        let brute = cycles.len() as u64 / span_size;
        assert_eq!(algebraic, brute);
    }

    #[test]
    fn induced_hom_audit_respects_bound() {
        // alpha = ·2 on [R] over Z/8 is a pi-iso of exponent 1; with P a
        // single free generator the bound is 2·1·(0-0+3) = 6.
        let rs = RingSpec::modular(8, 2).unwrap();
        let c = CochainComplex::concentrated(FpModule::free(rs.clone(), 1), 0);
        let mut comps = BTreeMap::new();
        comps.insert(
            0,
            ModuleMap::scaled_identity(&c.term(0), &BigInt::from(2)).unwrap(),
        );
        let alpha = ChainMap::new(c.clone(), c.clone(), comps).unwrap();
        let audit = induced_hom_pi_iso_audit(&c, &alpha, 1, 16).unwrap();
        assert_eq!(audit.bound, 6);
        assert!(audit.measured <= audit.bound);
        let hom_src = HomComplex::new(&c, alpha.source()).unwrap();
        let hom_tgt = HomComplex::new(&c, alpha.target()).unwrap();
        let induced = postcompose_map(&c, &alpha, &hom_src, &hom_tgt).unwrap();
        let h = induced.induced_cohomology_map(0).unwrap();
        audit.certificate.verify(&h).unwrap();
    }
}
