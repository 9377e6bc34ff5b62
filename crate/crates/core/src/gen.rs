//! Seeded random instance generators for the exponent-ledger audits.
//!
//! Every structure is drawn from a caller-seeded ChaCha stream, so a
//! ledger run is reproducible from the seed alone.  The generators
//! produce *hypothesis-satisfying* instances by construction — chain
//! maps come from the kernel lattice of the commutation system, exact
//! complexes are sums of cones of unimodular `pi`-multiples conjugated
//! by random base changes, Cartesian data are quotient towers along
//! `pi`-torsion submodules — so the bounds under test are exercised on
//! their actual domain, not on rejection-sampled noise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cech::CechModuleDatum;
use crate::complex::{ChainMap, CochainComplex};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module::{FpModule, ModuleMap};
use crate::normal_form::kernel_matrix;
use crate::ring::RingSpec;

pub struct InstanceGen {
    rng: ChaCha8Rng,
}

impl InstanceGen {
    pub fn new(seed: u64) -> InstanceGen {
        InstanceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn size_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    /// One of the two small primes the ledger quantifies over.
    pub fn prime(&mut self) -> i64 {
        if self.rng.gen() {
            2
        } else {
            3
        }
    }

    /// Uniform entries in `[-bound, bound]`, reduced into the ring.
    pub fn matrix(&mut self, rs: &RingSpec, rows: usize, cols: usize, bound: i64) -> Matrix {
        let mut m = Matrix::zero(rs.ring().clone(), rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = BigInt::from(self.int_in(-bound, bound));
                m.set(i, j, rs.ring().reduce(&x));
            }
        }
        m
    }

    /// A random unimodular matrix together with its exact inverse, built
    /// from `ops` elementary row operations applied to the identity.
    pub fn unimodular(&mut self, rs: &RingSpec, n: usize, ops: usize) -> (Matrix, Matrix) {
        let ring = rs.ring().clone();
        let mut l = Matrix::identity(ring.clone(), n);
        let mut l_inv = Matrix::identity(ring.clone(), n);
        if n < 2 {
            return (l, l_inv);
        }
        for _ in 0..ops {
            let i = self.size_in(0, n - 1);
            let mut j = self.size_in(0, n - 2);
            if j >= i {
                j += 1;
            }
            match self.size_in(0, 2) {
                0 => {
                    // row_i += c * row_j on l; col_j -= c * col_i on l_inv
                    let c = BigInt::from(self.int_in(-2, 2));
                    for t in 0..n {
                        let v = ring.add(l.get(i, t), &ring.mul(&c, l.get(j, t)));
                        l.set(i, t, v);
                        let w = ring.sub(l_inv.get(t, j), &ring.mul(&c, l_inv.get(t, i)));
                        l_inv.set(t, j, w);
                    }
                }
                1 => {
                    for t in 0..n {
                        let (a, b) = (l.get(i, t).clone(), l.get(j, t).clone());
                        l.set(i, t, b);
                        l.set(j, t, a);
                        let (a, b) = (l_inv.get(t, i).clone(), l_inv.get(t, j).clone());
                        l_inv.set(t, i, b);
                        l_inv.set(t, j, a);
                    }
                }
                _ => {
                    for t in 0..n {
                        let v = ring.neg(l.get(i, t));
                        l.set(i, t, v);
                        let w = ring.neg(l_inv.get(t, i));
                        l_inv.set(t, i, w);
                    }
                }
            }
        }
        (l, l_inv)
    }

    /// A finitely presented module with up to `max_gens` generators and
    /// a random small relation matrix.
    pub fn module(&mut self, rs: &RingSpec, max_gens: usize, bound: i64) -> Result<FpModule> {
        let g = self.size_in(1, max_gens.max(1));
        let r = self.size_in(0, g + 1);
        let rel = self.matrix(rs, g, r, bound);
        FpModule::new(rs.clone(), g, rel)
    }

    /// A uniformly scattered well-defined map `src -> tgt`: the matrices
    /// that descend to module maps form the kernel lattice of the
    /// system `B * R_src = R_tgt * X`, and a random integer combination
    /// of a lattice basis is drawn.
    pub fn module_map(&mut self, src: &FpModule, tgt: &FpModule) -> Result<ModuleMap> {
        let ring = src.ring().ring().clone();
        let (g1, g2) = (src.generators(), tgt.generators());
        if g1 == 0 || g2 == 0 {
            return ModuleMap::zero(src, tgt);
        }
        let r1 = src.relations().cols();
        let b = if r1 == 0 {
            self.matrix(src.ring(), g2, g1, 3)
        } else {
            let left = src.relations().transpose().kronecker(&Matrix::identity(ring.clone(), g2))?;
            let right = Matrix::identity(ring.clone(), r1).kronecker(tgt.relations())?;
            let system = left.hstack(&right.neg())?;
            let basis = kernel_matrix(&system)?;
            let combo = self.matrix(src.ring(), basis.cols(), 1, 2);
            let vec_b = basis.mul(&combo)?.row_block(0, g1 * g2);
            Matrix::from_vec_columns(ring, g2, g1, &vec_b)?
        };
        ModuleMap::new(src.clone(), tgt.clone(), b)
    }

    /// A free complex on `[lo, hi]` with exact `d ∘ d = 0`: each term is
    /// split into an incoming and an outgoing block, the differential
    /// maps outgoing to incoming through a random matrix, and every term
    /// is then conjugated by a random unimodular base change.
    pub fn free_complex(
        &mut self,
        rs: &RingSpec,
        lo: i64,
        hi: i64,
        max_rank: usize,
        bound: i64,
    ) -> Result<CochainComplex> {
        let len = (hi - lo + 1) as usize;
        let mut incoming = vec![0usize; len];
        let mut outgoing = vec![0usize; len];
        for k in 1..len {
            incoming[k] = self.size_in(0, max_rank);
        }
        // a block leaving the top term would have nowhere to land
        for k in 0..len - 1 {
            outgoing[k] = self.size_in(0, max_rank);
        }
        if len == 1 {
            incoming[0] = self.size_in(0, max_rank);
        }
        let blocks: Vec<Matrix> = (0..len - 1)
            .map(|k| self.matrix(rs, incoming[k + 1], outgoing[k], bound))
            .collect();
        self.assemble_complex(rs, lo, &incoming, &outgoing, &blocks)
    }

    /// A complex all of whose cohomology is `pi`-null: a direct sum of
    /// cones of unimodular multiples of `pi`, conjugated by random base
    /// changes.  The incoming block of each term is hit by `pi * U`
    /// with `U` unimodular, so kernels vanish (or are `pi`-torsion over
    /// a modular ring) and cokernels are killed by `pi` exactly.
    pub fn pi_exact_complex(
        &mut self,
        rs: &RingSpec,
        lo: i64,
        hi: i64,
        max_rank: usize,
    ) -> Result<CochainComplex> {
        let len = (hi - lo + 1) as usize;
        let mut outgoing = vec![0usize; len];
        for k in 0..len - 1 {
            outgoing[k] = self.size_in(0, max_rank);
        }
        if len > 1 && outgoing[..len - 1].iter().all(|&r| r == 0) {
            outgoing[0] = 1;
        }
        let mut incoming = vec![0usize; len];
        for k in 1..len {
            incoming[k] = outgoing[k - 1];
        }
        let blocks: Vec<Matrix> = (0..len - 1)
            .map(|k| {
                let (u, _) = self.unimodular(rs, outgoing[k], 6);
                u.scale(rs.pi())
            })
            .collect();
        self.assemble_complex(rs, lo, &incoming, &outgoing, &blocks)
    }

    fn assemble_complex(
        &mut self,
        rs: &RingSpec,
        lo: i64,
        incoming: &[usize],
        outgoing: &[usize],
        blocks: &[Matrix],
    ) -> Result<CochainComplex> {
        let ring = rs.ring().clone();
        let len = incoming.len();
        let ranks: Vec<usize> = (0..len).map(|k| incoming[k] + outgoing[k]).collect();
        let changes: Vec<(Matrix, Matrix)> = ranks
            .iter()
            .map(|&n| self.unimodular(rs, n, 2 * n))
            .collect();
        let terms: Vec<FpModule> = ranks.iter().map(|&n| FpModule::free(rs.clone(), n)).collect();
        let mut diffs = Vec::with_capacity(len.saturating_sub(1));
        for k in 0..len.saturating_sub(1) {
            let mut d = Matrix::zero(ring.clone(), ranks[k + 1], ranks[k]);
            d.paste(0, incoming[k], &blocks[k]);
            let conj = changes[k + 1].0.mul(&d)?.mul(&changes[k].1)?;
            diffs.push(ModuleMap::new(terms[k].clone(), terms[k + 1].clone(), conj)?);
        }
        CochainComplex::new(rs.clone(), lo, terms, diffs)
    }

    /// A random chain map between two termwise-free complexes, drawn
    /// from the kernel lattice of the full commutation system
    /// `d_tgt ∘ f - f ∘ d_src = 0` over all degrees at once.
    pub fn chain_map(&mut self, src: &CochainComplex, tgt: &CochainComplex) -> Result<ChainMap> {
        if !src.is_termwise_free() || !tgt.is_termwise_free() {
            return Err(Error::Precondition(
                "random chain maps are drawn between termwise-free complexes".into(),
            ));
        }
        let ring = src.ring().ring().clone();
        let lo = src.lo().min(tgt.lo());
        let hi = src.hi().max(tgt.hi());
        let degrees: Vec<i64> = (lo..=hi).collect();
        let var_sizes: Vec<usize> = degrees
            .iter()
            .map(|&i| tgt.term(i).generators() * src.term(i).generators())
            .collect();
        let total_vars: usize = var_sizes.iter().sum();
        if total_vars == 0 {
            return ChainMap::zero(src, tgt);
        }
        let offset: Vec<usize> = var_sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        let mut rows_blocks: Vec<Matrix> = Vec::new();
        for (k, &i) in degrees.iter().enumerate() {
            let rows = tgt.term(i + 1).generators() * src.term(i).generators();
            if rows == 0 {
                continue;
            }
            let mut block = Matrix::zero(ring.clone(), rows, total_vars);
            // vec(d_tgt^i * f^i) = (I ⊗ d_tgt^i) vec(f^i)
            let left = Matrix::identity(ring.clone(), src.term(i).generators())
                .kronecker(tgt.diff(i).matrix())?;
            block.paste(0, offset[k], &left);
            // vec(f^{i+1} * d_src^i) = (d_src^iᵀ ⊗ I) vec(f^{i+1})
            if k + 1 < degrees.len() && var_sizes[k + 1] > 0 {
                let right = src
                    .diff(i)
                    .matrix()
                    .transpose()
                    .kronecker(&Matrix::identity(ring.clone(), tgt.term(i + 1).generators()))?;
                block.paste(0, offset[k + 1], &right.neg());
            }
            rows_blocks.push(block);
        }
        let mut components = BTreeMap::new();
        if rows_blocks.is_empty() {
            for (k, &i) in degrees.iter().enumerate() {
                if var_sizes[k] == 0 {
                    continue;
                }
                let b = self.matrix(src.ring(), tgt.term(i).generators(), src.term(i).generators(), 3);
                components.insert(i, ModuleMap::new(src.term(i), tgt.term(i), b)?);
            }
            return ChainMap::new(src.clone(), tgt.clone(), components);
        }
        let mut system = rows_blocks[0].clone();
        for b in &rows_blocks[1..] {
            system = system.vstack(b)?;
        }
        let basis = kernel_matrix(&system)?;
        let combo = self.matrix(src.ring(), basis.cols(), 1, 2);
        let solution = basis.mul(&combo)?;
        for (k, &i) in degrees.iter().enumerate() {
            if var_sizes[k] == 0 {
                continue;
            }
            let vec_f = solution.row_block(offset[k], offset[k] + var_sizes[k]);
            let f = Matrix::from_vec_columns(
                ring.clone(),
                tgt.term(i).generators(),
                src.term(i).generators(),
                &vec_f,
            )?;
            components.insert(i, ModuleMap::new(src.term(i), tgt.term(i), f)?);
        }
        ChainMap::new(src.clone(), tgt.clone(), components)
    }

    /// A short exact triple `M1 -> M2 -> M3`: the image of a random map
    /// into a random module, together with its cokernel projection.
    pub fn exact_triple(
        &mut self,
        rs: &RingSpec,
        max_gens: usize,
        bound: i64,
    ) -> Result<(ModuleMap, ModuleMap)> {
        let m2 = self.module(rs, max_gens, bound)?;
        let s = self.size_in(1, max_gens.max(1));
        let free = FpModule::free(rs.clone(), s);
        let w = self.module_map(&free, &m2)?;
        let (_, inclusion, _) = w.image()?;
        let (_, projection) = inclusion.cokernel()?;
        Ok((inclusion, projection))
    }

    /// A `pi`-Cartesian quotient tower: a fixed module `W = (R/pi^c)^g`
    /// and, per open, a random set of `pi`-torsion elements; the tuple
    /// `t` carries `W` modulo the torsion elements of the opens in `t`,
    /// with identity-on-generators projections as restrictions.  Every
    /// restriction kernel is generated by `pi`-torsion classes, so the
    /// datum is `pi`-Cartesian on the nose.
    pub fn cartesian_datum(
        &mut self,
        rs: &RingSpec,
        opens: usize,
        truncation: usize,
        max_rank: usize,
        height: u32,
    ) -> Result<CechModuleDatum> {
        let ring = rs.ring().clone();
        let g = self.size_in(1, max_rank.max(1));
        let torsion_scale = rs.pi_pow(height.saturating_sub(1));
        let mut open_torsion: Vec<Matrix> = Vec::with_capacity(opens);
        for _ in 0..opens {
            let cols = self.size_in(0, g);
            let raw = self.matrix(rs, g, cols, 2);
            open_torsion.push(raw.scale(&torsion_scale));
        }
        let ambient = Matrix::identity(ring.clone(), g).scale(&rs.pi_pow(height));
        let module_for = |set: &[usize]| -> Result<FpModule> {
            let mut rel = ambient.clone();
            for &i in set {
                rel = rel.hstack(&open_torsion[i])?;
            }
            FpModule::new(rs.clone(), g, rel)
        };
        let mut modules = BTreeMap::new();
        let mut maps = BTreeMap::new();
        for t in crate::cech::datum_tuples(opens, truncation) {
            let set: Vec<usize> = {
                let mut s: Vec<usize> = t.clone();
                s.sort_unstable();
                s.dedup();
                s
            };
            modules.insert(t, module_for(&set)?);
        }
        for t in crate::cech::datum_tuples(opens, truncation) {
            for alpha in crate::almost::non_identity_faces(t.len()) {
                let ta: Vec<usize> = alpha.iter().map(|&p| t[p]).collect();
                let src = modules[&ta].clone();
                let tgt = modules[&t].clone();
                let f = ModuleMap::new(src, tgt, Matrix::identity(ring.clone(), g))?;
                maps.insert((alpha, t.clone()), f);
            }
        }
        CechModuleDatum::new(rs.clone(), opens, truncation, modules, maps)
    }
}

/// The deterministic capped-potential tower: every tuple carries `m`,
/// restricting a vertex into a genuine overlap multiplies by `pi^w`, and
/// overlap-to-overlap restrictions are untouched.  (A per-face weight
/// would compound on composite faces and push the datum out of the
/// Cartesian hypothesis; the capped potential is the functorial way to
/// make every transition cost the same power.)  `w = 0` is the constant
/// datum.
pub fn capped_weight_datum(
    m: &FpModule,
    opens: usize,
    truncation: usize,
    w: u32,
) -> Result<CechModuleDatum> {
    let level = |t: &[usize]| -> u32 {
        let mut s: Vec<usize> = t.to_vec();
        s.sort_unstable();
        s.dedup();
        u32::from(s.len() > 1)
    };
    let rs = m.ring().clone();
    let mut modules = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for t in crate::cech::datum_tuples(opens, truncation) {
        modules.insert(t, m.clone());
    }
    for t in crate::cech::datum_tuples(opens, truncation) {
        for alpha in crate::almost::non_identity_faces(t.len()) {
            let ta: Vec<usize> = alpha.iter().map(|&p| t[p]).collect();
            let drop = level(&t) - level(&ta);
            let f = ModuleMap::scaled_identity(m, &rs.pi_pow(w * drop))?;
            maps.insert((alpha, t.clone()), f);
        }
    }
    CechModuleDatum::new(rs, opens, truncation, modules, maps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unimodular_pairs_invert_exactly() {
        let mut gen = InstanceGen::new(7);
        for _ in 0..20 {
            let rs = if gen.int_in(0, 1) == 0 {
                RingSpec::integers(2).unwrap()
            } else {
                RingSpec::modular(9, 3).unwrap()
            };
            let n = gen.size_in(1, 5);
            let (l, l_inv) = gen.unimodular(&rs, n, 3 * n);
            assert!(l.mul(&l_inv).unwrap().is_identity());
            assert!(l_inv.mul(&l).unwrap().is_identity());
        }
    }

    #[test]
    fn generated_maps_are_well_defined() {
        let mut gen = InstanceGen::new(11);
        for trial in 0..40 {
            let rs = if trial % 2 == 0 {
                RingSpec::integers(2).unwrap()
            } else {
                RingSpec::modular(8, 2).unwrap()
            };
            let m1 = gen.module(&rs, 3, 6).unwrap();
            let m2 = gen.module(&rs, 3, 6).unwrap();
            // ModuleMap::new re-checks well-definedness and errors out
            // on any matrix that does not descend
            gen.module_map(&m1, &m2).unwrap();
        }
    }

    #[test]
    fn pi_exact_complexes_are_pi_exact() {
        let mut gen = InstanceGen::new(13);
        for trial in 0..25 {
            let pi = gen.prime();
            let rs = if trial % 3 == 0 {
                RingSpec::modular((pi * pi * pi) as u64, pi).unwrap()
            } else {
                RingSpec::integers(pi).unwrap()
            };
            let lo = gen.int_in(-3, 0);
            let hi = lo + gen.int_in(1, 3);
            let m = gen.pi_exact_complex(&rs, lo, hi, 3).unwrap();
            assert!(m.is_pi_exact(1).unwrap());
        }
    }

    #[test]
    fn chain_maps_commute_and_vary() {
        let mut gen = InstanceGen::new(17);
        let rs = RingSpec::integers(2).unwrap();
        let mut nonzero = 0;
        for _ in 0..30 {
            let src = gen.free_complex(&rs, -2, 1, 3, 4).unwrap();
            let tgt = gen.pi_exact_complex(&rs, -2, 1, 3).unwrap();
            // ChainMap::new re-checks commutation on every degree
            let f = gen.chain_map(&src, &tgt).unwrap();
            if !f.is_zero_map().unwrap() {
                nonzero += 1;
            }
        }
        assert!(nonzero >= 10, "only {nonzero} nonzero maps in 30 draws");
    }

    #[test]
    fn exact_triples_are_exact() {
        let mut gen = InstanceGen::new(19);
        for trial in 0..30 {
            let rs = if trial % 2 == 0 {
                RingSpec::integers(2).unwrap()
            } else {
                RingSpec::integers(3).unwrap()
            };
            let (incl, proj) = gen.exact_triple(&rs, 3, 5).unwrap();
            assert!(proj.compose(&incl).unwrap().is_zero_map().unwrap());
            // kernel of the projection is exactly the image: the induced
            // map from M1 onto ker(proj) is an exact isomorphism
            let (_, ker_incl) = proj.kernel().unwrap();
            let through = crate::cech::factor_through_kernel(&ker_incl, &incl).unwrap();
            assert_eq!(through.pi_iso_exponent(8).unwrap(), Some(0));
        }
    }

    #[test]
    fn cartesian_towers_measure_at_most_one() {
        let mut gen = InstanceGen::new(23);
        for trial in 0..15 {
            let pi = gen.prime();
            let rs = RingSpec::integers(pi).unwrap();
            let opens = gen.size_in(3, 4);
            let datum = gen
                .cartesian_datum(&rs, opens, 2, 2, if trial % 2 == 0 { 2 } else { 3 })
                .unwrap();
            assert!(datum.cartesian_exponent(8).unwrap() <= 1);
        }
    }

    #[test]
    fn capped_weight_tower_matches_by_hand_exponents() {
        let rs = RingSpec::integers(2).unwrap();
        let m = FpModule::cyclic(rs, &BigInt::from(16));
        let datum = capped_weight_datum(&m, 3, 2, 1).unwrap();
        assert_eq!(datum.cartesian_exponent(8).unwrap(), 1);
        let constant = capped_weight_datum(&m, 3, 2, 0).unwrap();
        assert_eq!(constant.cartesian_exponent(8).unwrap(), 0);
    }
}
