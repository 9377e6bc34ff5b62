//! Bounded cochain complexes of presented modules, chain maps, homotopies,
//! and the descending homotopy-ladder construction that powers every
//! annihilation and lifting bound.
//!
//! Degrees outside a complex's stored window read as zero modules and zero
//! maps, so degree-indexed code never branches on window edges.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module::{FpModule, ModuleMap};
use crate::normal_form::solve_simultaneous;
use crate::ring::RingSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    ring: RingSpec,
    lo: i64,
    terms: Vec<FpModule>,            // index i - lo
    diffs: Vec<ModuleMap>,           // d^i : terms[i] -> terms[i+1], i in lo..hi
}

impl CochainComplex {
    /// A complex supported on `[lo, lo + terms.len() - 1]`.  Checks ring
    /// agreement, differential endpoints, and `d ∘ d = 0`.
    pub fn new(ring: RingSpec, lo: i64, terms: Vec<FpModule>, diffs: Vec<ModuleMap>) -> Result<CochainComplex> {
        if terms.is_empty() {
            return Err(Error::InvalidObject("complex needs at least one term".into()));
        }
        if diffs.len() + 1 != terms.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} terms need {} differentials, got {}",
                terms.len(),
                terms.len() - 1,
                diffs.len()
            )));
        }
        for t in &terms {
            if t.ring() != &ring {
                return Err(Error::RingMismatch(format!("{} vs {}", t.ring(), ring)));
            }
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.source() != &terms[k] || d.target() != &terms[k + 1] {
                return Err(Error::InvalidObject(format!(
                    "differential {k} endpoints do not match the terms"
                )));
            }
        }
        for k in 0..diffs.len().saturating_sub(1) {
            if !diffs[k + 1].compose(&diffs[k])?.is_zero_map()? {
                return Err(Error::InvalidObject(format!(
                    "d ∘ d != 0 at degree {}",
                    lo + k as i64
                )));
            }
        }
        Ok(CochainComplex {
            ring,
            lo,
            terms,
            diffs,
        })
    }

    /// One module placed in a single degree.
    pub fn concentrated(m: FpModule, degree: i64) -> CochainComplex {
        CochainComplex {
            ring: m.ring().clone(),
            lo: degree,
            terms: vec![m],
            diffs: vec![],
        }
    }

    pub fn zero_complex(ring: RingSpec, degree: i64) -> CochainComplex {
        CochainComplex::concentrated(FpModule::zero(ring), degree)
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    /// The term in degree `i`; zero module outside the window.
    pub fn term(&self, i: i64) -> FpModule {
        if i < self.lo || i > self.hi() {
            FpModule::zero(self.ring.clone())
        } else {
            self.terms[(i - self.lo) as usize].clone()
        }
    }

    /// The differential `d^i : term(i) -> term(i+1)`; zero map outside.
    pub fn diff(&self, i: i64) -> ModuleMap {
        if i >= self.lo && i < self.hi() {
            self.diffs[(i - self.lo) as usize].clone()
        } else {
            ModuleMap::zero(&self.term(i), &self.term(i + 1)).expect("same ring")
        }
    }

    /// Are all terms free presentations?
    pub fn is_termwise_free(&self) -> bool {
        self.terms.iter().all(FpModule::is_free_presentation)
    }

    /// `C[k]`: degree `i` holds what `C` held in degree `i + k`, with the
    /// differential scaled by `(-1)^k`.
    pub fn shift(&self, k: i64) -> CochainComplex {
        let sign = if k.rem_euclid(2) == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        CochainComplex {
            ring: self.ring.clone(),
            lo: self.lo - k,
            terms: self.terms.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&sign)).collect(),
        }
    }

    /// Brutal truncation: drop all terms below `a`.
    pub fn truncate_stupid_geq(&self, a: i64) -> CochainComplex {
        if a <= self.lo {
            return self.clone();
        }
        if a > self.hi() {
            return CochainComplex::zero_complex(self.ring.clone(), a);
        }
        let start = (a - self.lo) as usize;
        CochainComplex {
            ring: self.ring.clone(),
            lo: a,
            terms: self.terms[start..].to_vec(),
            diffs: self.diffs[start..].to_vec(),
        }
    }

    /// Canonical truncation `τ^{≥a}`: degree `a` becomes the cokernel of
    /// `d^{a-1}` (same generator coordinates, extra relations), higher
    /// degrees are untouched.  Cohomology in degrees `>= a` is preserved.
    pub fn truncate_canonical_geq(&self, a: i64) -> Result<CochainComplex> {
        if a <= self.lo {
            return Ok(self.clone());
        }
        if a > self.hi() {
            return Ok(CochainComplex::zero_complex(self.ring.clone(), a));
        }
        let d_in = self.diff(a - 1);
        let (bottom, _) = d_in.cokernel()?;
        let mut terms = vec![bottom.clone()];
        let start = (a - self.lo) as usize;
        terms.extend_from_slice(&self.terms[start + 1..]);
        let mut diffs = Vec::new();
        if a < self.hi() {
            let d_out = self.diff(a);
            diffs.push(ModuleMap::new(
                bottom,
                self.term(a + 1),
                d_out.matrix().clone(),
            )?);
            diffs.extend_from_slice(&self.diffs[start + 1..]);
        }
        CochainComplex::new(self.ring.clone(), a, terms, diffs)
    }

    /// `H^i = ker(d^i) / im(d^{i-1})`, presented on lifted kernel
    /// generators; `cycle_lift` carries each presentation generator to its
    /// cycle's coordinates in `term(i)`.
    pub fn cohomology(&self, i: i64) -> Result<Cohomology> {
        let d_out = self.diff(i);
        let (kernel, incl) = d_out.kernel()?;
        let cycle_lift = incl.matrix().clone();
        let d_in = self.diff(i - 1);
        let term = self.term(i);
        // boundary images expressed in kernel coordinates
        let parts = solve_simultaneous(
            &[&cycle_lift, term.relations()],
            d_in.matrix(),
        )?
        .ok_or_else(|| Error::InternalSolve("boundary is not a cycle".into()))?;
        let boundary_coeffs = &parts[0];
        let relations = kernel.relations().hstack(boundary_coeffs)?;
        let module = FpModule::new(self.ring.clone(), kernel.generators(), relations)?;
        Ok(Cohomology { module, cycle_lift })
    }

    /// Minimal per-degree annihilator exponents of cohomology across the
    /// window, each capped at `cap`.
    pub fn pi_exactness_exponents(&self, cap: u32) -> Result<Vec<(i64, Option<u32>)>> {
        let mut out = Vec::new();
        for i in self.lo..=self.hi() {
            let h = self.cohomology(i)?;
            let e = h.module.min_null_exponent(cap)?.map(|(l, _)| l);
            out.push((i, e));
        }
        Ok(out)
    }

    pub fn is_pi_exact(&self, l: u32) -> Result<bool> {
        for i in self.lo..=self.hi() {
            if !self.cohomology(i)?.module.is_pi_null(l)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl std::fmt::Display for CochainComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "complex on [{}, {}] over {}", self.lo, self.hi(), self.ring)?;
        Ok(())
    }
}

/// Cohomology in one degree: the presented module and the matrix lifting
/// its generators to cycle coordinates in the ambient term.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub module: FpModule,
    pub cycle_lift: Matrix,
}

/// A degreewise map commuting with the differentials.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: CochainComplex,
    target: CochainComplex,
    components: BTreeMap<i64, ModuleMap>,
}

impl ChainMap {
    pub fn new(
        source: CochainComplex,
        target: CochainComplex,
        components: BTreeMap<i64, ModuleMap>,
    ) -> Result<ChainMap> {
        if source.ring != target.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                source.ring, target.ring
            )));
        }
        for (&i, f) in &components {
            if f.source() != &source.term(i) || f.target() != &target.term(i) {
                return Err(Error::InvalidObject(format!(
                    "component {i} endpoints do not match the complexes"
                )));
            }
        }
        let map = ChainMap {
            source,
            target,
            components,
        };
        let lo = map.source.lo.min(map.target.lo) - 1;
        let hi = map.source.hi().max(map.target.hi());
        for i in lo..=hi {
            let left = map.component(i + 1).compose(&map.source.diff(i))?;
            let right = map.target.diff(i).compose(&map.component(i))?;
            if !left.equals(&right)? {
                return Err(Error::InvalidObject(format!(
                    "map does not commute with differentials at degree {i}"
                )));
            }
        }
        Ok(map)
    }

    pub fn identity(c: &CochainComplex) -> ChainMap {
        let mut components = BTreeMap::new();
        for i in c.lo..=c.hi() {
            components.insert(i, ModuleMap::identity(&c.term(i)));
        }
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            components,
        }
    }

    pub fn zero(source: &CochainComplex, target: &CochainComplex) -> Result<ChainMap> {
        if source.ring != target.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                source.ring, target.ring
            )));
        }
        Ok(ChainMap {
            source: source.clone(),
            target: target.clone(),
            components: BTreeMap::new(),
        })
    }

    pub fn source(&self) -> &CochainComplex {
        &self.source
    }

    pub fn target(&self) -> &CochainComplex {
        &self.target
    }

    /// The component in degree `i`; zero map when absent.
    pub fn component(&self, i: i64) -> ModuleMap {
        match self.components.get(&i) {
            Some(f) => f.clone(),
            None => ModuleMap::zero(&self.source.term(i), &self.target.term(i))
                .expect("same ring"),
        }
    }

    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target != self.source {
            return Err(Error::Precondition(
                "chain map composition: inner target differs from outer source".into(),
            ));
        }
        let lo = first.source.lo;
        let hi = first.source.hi();
        let mut components = BTreeMap::new();
        for i in lo..=hi {
            components.insert(i, self.component(i).compose(&first.component(i))?);
        }
        Ok(ChainMap {
            source: first.source.clone(),
            target: self.target.clone(),
            components,
        })
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Precondition("sum of chain maps with different ends".into()));
        }
        let lo = self.source.lo.min(self.target.lo);
        let hi = self.source.hi().max(self.target.hi());
        let mut components = BTreeMap::new();
        for i in lo..=hi {
            components.insert(i, self.component(i).add(&other.component(i))?);
        }
        Ok(ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            components,
        })
    }

    pub fn scale(&self, c: &BigInt) -> ChainMap {
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self
                .components
                .iter()
                .map(|(&i, f)| (i, f.scale(c)))
                .collect(),
        }
    }

    pub fn neg(&self) -> ChainMap {
        self.scale(&-BigInt::one())
    }

    /// The same map between the shifted complexes; components move to
    /// degree `i - k` and pick up no sign (only differentials do).
    pub fn shift(&self, k: i64) -> ChainMap {
        ChainMap {
            source: self.source.shift(k),
            target: self.target.shift(k),
            components: self
                .components
                .iter()
                .map(|(&i, f)| (i - k, f.clone()))
                .collect(),
        }
    }

    pub fn is_zero_map(&self) -> Result<bool> {
        for f in self.components.values() {
            if !f.is_zero_map()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The induced map `H^i(source) -> H^i(target)`.
    pub fn induced_cohomology_map(&self, i: i64) -> Result<ModuleMap> {
        let hs = self.source.cohomology(i)?;
        let ht = self.target.cohomology(i)?;
        let carried = self.component(i).matrix().mul(&hs.cycle_lift)?;
        let parts = solve_simultaneous(
            &[&ht.cycle_lift, self.target.term(i).relations()],
            &carried,
        )?
        .ok_or_else(|| Error::InternalSolve("image of a cycle is not a cycle".into()))?;
        ModuleMap::new(hs.module, ht.module, parts[0].clone())
    }

    /// Per-degree `pi`-isomorphism exponents of the induced cohomology maps
    /// over the union window.
    pub fn induced_iso_exponents(&self, cap: u32) -> Result<Vec<(i64, Option<u32>)>> {
        let lo = self.source.lo.min(self.target.lo);
        let hi = self.source.hi().max(self.target.hi());
        let mut out = Vec::new();
        for i in lo..=hi {
            let h = self.induced_cohomology_map(i)?;
            out.push((i, h.pi_iso_exponent(cap)?));
        }
        Ok(out)
    }
}

/// Mapping cone of `f : A -> B`: degree `i` is `A^{i+1} ⊕ B^i` with
/// differential `[[-d_A, 0], [f, d_B]]`.  Returns the cone with the
/// inclusion `B -> C` and projection `C -> A[1]`.
pub fn cone(f: &ChainMap) -> Result<(CochainComplex, ChainMap, ChainMap)> {
    let a = f.source();
    let b = f.target();
    let ring = a.ring().clone();
    let lo = (a.lo - 1).min(b.lo);
    let hi = (a.hi() - 1).max(b.hi());
    let mut terms = Vec::new();
    for i in lo..=hi {
        terms.push(a.term(i + 1).direct_sum(&b.term(i))?);
    }
    let mut diffs = Vec::new();
    for i in lo..hi {
        let da = a.diff(i + 1);
        let db = b.diff(i);
        let fi = f.component(i + 1);
        let top = da
            .matrix()
            .neg()
            .hstack(&Matrix::zero(ring.ring().clone(), da.matrix().rows(), db.matrix().cols()))?;
        let bottom = fi.matrix().hstack(db.matrix())?;
        let d = top.vstack(&bottom)?;
        diffs.push(ModuleMap::new(
            terms[(i - lo) as usize].clone(),
            terms[(i - lo + 1) as usize].clone(),
            d,
        )?);
    }
    let c = CochainComplex::new(ring.clone(), lo, terms, diffs)?;

    let mut incl_components = BTreeMap::new();
    for i in b.lo..=b.hi() {
        let bt = b.term(i);
        let ct = c.term(i);
        let at_cols = a.term(i + 1).generators();
        let m = Matrix::zero(ring.ring().clone(), at_cols, bt.generators())
            .vstack(&Matrix::identity(ring.ring().clone(), bt.generators()))?;
        incl_components.insert(i, ModuleMap::new(bt, ct, m)?);
    }
    let incl = ChainMap::new(b.clone(), c.clone(), incl_components)?;

    let a_shift = a.shift(1);
    let mut proj_components = BTreeMap::new();
    for i in a_shift.lo..=a_shift.hi() {
        let ct = c.term(i);
        let at = a_shift.term(i);
        let b_cols = b.term(i).generators();
        let m = Matrix::identity(ring.ring().clone(), at.generators())
            .hstack(&Matrix::zero(ring.ring().clone(), at.generators(), b_cols))?;
        proj_components.insert(i, ModuleMap::new(ct, at, m)?);
    }
    let proj = ChainMap::new(c.clone(), a_shift, proj_components)?;

    Ok((c, incl, proj))
}

/// A degreewise collection `s^i : source^i -> target^{i-1}`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub components: BTreeMap<i64, ModuleMap>,
}

impl Homotopy {
    pub fn component(
        &self,
        i: i64,
        source: &CochainComplex,
        target: &CochainComplex,
    ) -> ModuleMap {
        match self.components.get(&i) {
            Some(s) => s.clone(),
            None => ModuleMap::zero(&source.term(i), &target.term(i - 1)).expect("same ring"),
        }
    }

    /// Scale every component by `c`.
    pub fn scale(&self, c: &BigInt) -> Homotopy {
        Homotopy {
            components: self
                .components
                .iter()
                .map(|(&i, s)| (i, s.scale(c)))
                .collect(),
        }
    }

    /// Check `pi^exponent * f = d_target ∘ s + s ∘ d_source` exactly in
    /// every degree.
    pub fn verify_null_homotopy(&self, f: &ChainMap, exponent: u32) -> Result<()> {
        let src = f.source();
        let tgt = f.target();
        let lo = src.lo.min(tgt.lo) - 1;
        let hi = src.hi().max(tgt.hi()) + 1;
        self.verify_null_homotopy_on(f, exponent, lo, hi)
    }

    /// Check the null-homotopy identity on the degrees `[lo, hi]` only:
    /// a homotopy built on a window of the complexes says nothing outside
    /// it.
    pub fn verify_null_homotopy_on(
        &self,
        f: &ChainMap,
        exponent: u32,
        lo: i64,
        hi: i64,
    ) -> Result<()> {
        let src = f.source();
        let tgt = f.target();
        let scale = src.ring().pi_pow(exponent);
        for i in lo..=hi {
            let lhs = f.component(i).scale(&scale);
            let ds = tgt
                .diff(i - 1)
                .compose(&self.component(i, src, tgt))?;
            let sd = self
                .component(i + 1, src, tgt)
                .compose(&src.diff(i))?;
            if !lhs.equals(&ds.add(&sd)?)? {
                return Err(Error::VerificationFailed(format!(
                    "null homotopy fails at degree {i}"
                )));
            }
        }
        Ok(())
    }
}

/// The descending ladder: for `f : P -> M` with `P` termwise free on
/// `[a, b]` and `pi^mu_exponent` annihilating `H^i(M)` for `i` in `[a, b]`,
/// produce `s^i : P^i -> M^{i-1}` with, in every degree,
///
/// ```text
/// mu^{b-i+1} f^i  =  mu * (s^{i+1} ∘ d_P^i)  +  d_M^{i-1} ∘ s^i,      mu = pi^mu_exponent
/// ```
#[derive(Clone, Debug)]
pub struct HomotopyLadder {
    pub s: BTreeMap<i64, ModuleMap>,
    pub mu_exponent: u32,
    pub window: (i64, i64),
}

impl HomotopyLadder {
    pub fn verify(&self, f: &ChainMap) -> Result<()> {
        let (a, b) = self.window;
        let src = f.source();
        let tgt = f.target();
        let mu = src.ring().pi_pow(self.mu_exponent);
        for i in a..=b {
            let lhs = f
                .component(i)
                .scale(&src.ring().pi_pow(self.mu_exponent * (b - i + 1) as u32));
            let s_i = self.component(i, src, tgt);
            let s_next = self.component(i + 1, src, tgt);
            let term1 = s_next.compose(&src.diff(i))?.scale(&mu);
            let term2 = tgt.diff(i - 1).compose(&s_i)?;
            if !lhs.equals(&term1.add(&term2)?)? {
                return Err(Error::VerificationFailed(format!(
                    "ladder identity fails at degree {i}"
                )));
            }
        }
        Ok(())
    }

    fn component(&self, i: i64, src: &CochainComplex, tgt: &CochainComplex) -> ModuleMap {
        match self.s.get(&i) {
            Some(s) => s.clone(),
            None => ModuleMap::zero(&src.term(i), &tgt.term(i - 1)).expect("same ring"),
        }
    }

    /// Collapse the graded identities into one uniform null homotopy:
    /// `pi^{mu_exponent * (b-a+1)} * f = d σ + σ d` with
    /// `σ^i = mu^{i-a} s^i`.
    pub fn uniform_null_homotopy(&self, f: &ChainMap) -> Result<(u32, Homotopy)> {
        let (a, b) = self.window;
        let src = f.source();
        let mut components = BTreeMap::new();
        for (&i, s) in &self.s {
            let scale = src.ring().pi_pow(self.mu_exponent * (i - a) as u32);
            components.insert(i, s.scale(&scale));
        }
        let exponent = self.mu_exponent * (b - a + 1) as u32;
        let h = Homotopy { components };
        h.verify_null_homotopy_on(f, exponent, a, b)?;
        Ok((exponent, h))
    }
}

/// Build the ladder for `f : P -> M`.  `P` must be termwise free on its
/// window `[a, b]`; solvability at each degree is exactly the requirement
/// that `pi^mu_exponent` kills `H^i(M)` there, and a failed solve reports
/// the degree.
pub fn build_homotopy_ladder(f: &ChainMap, mu_exponent: u32) -> Result<HomotopyLadder> {
    let p = f.source();
    build_homotopy_ladder_on(f, mu_exponent, (p.lo(), p.hi()))
}

/// Build the ladder on an explicit degree window, descending from its
/// top.  Degrees of the source below the window are left alone — the
/// identities (and any homotopy collapsed from them) hold on the window
/// only, which is what a complex with uncontrolled cohomology at its
/// bottom edge supports.
pub fn build_homotopy_ladder_on(
    f: &ChainMap,
    mu_exponent: u32,
    window: (i64, i64),
) -> Result<HomotopyLadder> {
    let p = f.source();
    let m = f.target();
    let (a, b) = window;
    if a > b {
        return Err(Error::Precondition(format!("empty ladder window [{a}, {b}]")));
    }
    for i in a..=b {
        if !p.term(i).is_free_presentation() {
            return Err(Error::Precondition(format!(
                "ladder source must be free in degree {i}"
            )));
        }
    }
    let mu = p.ring().pi_pow(mu_exponent);
    let mut ladder = HomotopyLadder {
        s: BTreeMap::new(),
        mu_exponent,
        window: (a, b),
    };
    for i in (a..=b).rev() {
        let s_next = ladder.component(i + 1, p, m);
        // T^i = mu^{b-i} f^i - s^{i+1} ∘ d_P^i
        let scaled_f = f
            .component(i)
            .scale(&p.ring().pi_pow(mu_exponent * (b - i) as u32));
        let t = scaled_f.sub(&s_next.compose(&p.diff(i))?)?;
        let rhs = t.matrix().scale(&mu);
        let d_in = m.diff(i - 1);
        let rel = m.term(i).relations().clone();
        let parts = solve_simultaneous(&[d_in.matrix(), &rel], &rhs)?.ok_or_else(|| {
            Error::Precondition(format!(
                "ladder solve failed at degree {i}: pi^{mu_exponent} does not kill H^{i} of the target"
            ))
        })?;
        let s_i = ModuleMap::new(p.term(i), m.term(i - 1), parts[0].clone())?;
        ladder.s.insert(i, s_i);
    }
    ladder.verify(f)?;
    Ok(ladder)
}

/// Annihilation of `Hom` up to homotopy: for `f : P -> M` with `P`
/// termwise free on `[a, b]` and every `H^i(M)` on that window
/// `pi^e`-null, `pi^{e(b-a+1)} f` is null-homotopic.  Returns the witness
/// homotopy and the exponent actually used.
pub fn hom_annihilation(f: &ChainMap, e: u32) -> Result<(u32, Homotopy)> {
    let ladder = build_homotopy_ladder(f, e)?;
    ladder.uniform_null_homotopy(f)
}

/// Result of lifting `g` through `f` up to `pi^exponent`:
/// `f ∘ h - pi^exponent * g = d s + s d` exactly.
#[derive(Clone, Debug)]
pub struct LiftResult {
    pub h: ChainMap,
    pub homotopy: Homotopy,
    pub exponent: u32,
}

impl LiftResult {
    pub fn verify(&self, f: &ChainMap, g: &ChainMap) -> Result<()> {
        let lhs = f
            .compose(&self.h)?
            .add(&g.scale(&g.source().ring().pi_pow(self.exponent)).neg())?;
        self.homotopy.verify_null_homotopy(&lhs, 0)
    }
}

/// Lift `g : P -> M` through `f : N -> M` up to a `pi` power: with `P`
/// termwise free on `[a, b]` and `pi^{2 e_iso}` annihilating the cone of
/// `f` in cohomology on `[a, b]`, produces `h : P -> N` and a homotopy `s`
/// with `f ∘ h - pi^{2 e_iso (b-a+1)} g = d_M s + s d_P` exactly.
pub fn lift_through(f: &ChainMap, g: &ChainMap, e_iso: u32) -> Result<LiftResult> {
    if f.target() != g.target() {
        return Err(Error::Precondition(
            "lift: the two maps must share a target".into(),
        ));
    }
    let p = g.source();
    let n = f.source();
    let (_cone, incl, _proj) = cone(f)?;
    let composite = incl.compose(g)?;
    let ladder = build_homotopy_ladder(&composite, 2 * e_iso)?;
    let (exponent, sigma) = ladder.uniform_null_homotopy(&composite)?;
    // split σ^i : P^i -> C^{i-1} = N^i ⊕ M^{i-1} into (h^i, -s^i)
    let mut h_components = BTreeMap::new();
    let mut s_components = BTreeMap::new();
    for (&i, sg) in &sigma.components {
        let n_rows = n.term(i).generators();
        let matrix = sg.matrix();
        let h_m = matrix.row_block(0, n_rows);
        let s_m = matrix.row_block(n_rows, matrix.rows()).neg();
        h_components.insert(i, ModuleMap::new(p.term(i), n.term(i), h_m)?);
        s_components.insert(i, ModuleMap::new(p.term(i), f.target().term(i - 1), s_m)?);
    }
    let h = ChainMap::new(p.clone(), n.clone(), h_components)?;
    let result = LiftResult {
        h,
        homotopy: Homotopy {
            components: s_components,
        },
        exponent,
    };
    result.verify(f, g)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn two_term(ring: RingSpec, lo: i64, c: i64) -> CochainComplex {
        // R --c--> R in degrees [lo, lo+1]
        let r1 = FpModule::free(ring.clone(), 1);
        let d = ModuleMap::scaled_identity(&r1, &BigInt::from(c)).unwrap();
        CochainComplex::new(ring, lo, vec![r1.clone(), r1], vec![d]).unwrap()
    }

    #[test]
    fn d_squared_is_enforced() {
        let rs = RingSpec::integers(2).unwrap();
        let r1 = FpModule::free(rs.clone(), 1);
        let d0 = ModuleMap::scaled_identity(&r1, &BigInt::from(2)).unwrap();
        let d1 = ModuleMap::scaled_identity(&r1, &BigInt::from(3)).unwrap();
        let bad = CochainComplex::new(
            rs.clone(),
            0,
            vec![r1.clone(), r1.clone(), r1.clone()],
            vec![d0.clone(), d1],
        );
        assert!(bad.is_err());
        let zero = ModuleMap::zero(&r1, &r1).unwrap();
        let ok = CochainComplex::new(rs, 0, vec![r1.clone(), r1.clone(), r1], vec![d0, zero]);
        assert!(ok.is_ok());
    }

    #[test]
    fn canonical_truncation_of_multiplication_complex() {
        // Z --p--> Z in degrees [-1, 0]; τ^{≥0} is Z/p in degree 0
        let rs = RingSpec::integers(3).unwrap();
        let k = two_term(rs, -1, 3);
        let t = k.truncate_canonical_geq(0).unwrap();
        assert_eq!(t.lo(), 0);
        assert_eq!(t.hi(), 0);
        let m = t.term(0);
        assert!(m.is_pi_null(1).unwrap());
        assert!(!m.is_pi_null(0).unwrap());
        // the brutal truncation keeps the free module instead
        let s = k.truncate_stupid_geq(0);
        assert!(s.term(0).is_free_presentation());
    }

    #[test]
    fn cohomology_of_multiplication_complex() {
        let rs = RingSpec::integers(3).unwrap();
        let k = two_term(rs, -1, 3);
        let h0 = k.cohomology(0).unwrap();
        assert!(h0.module.is_pi_null(1).unwrap());
        assert!(!h0.module.is_pi_null(0).unwrap());
        let hm1 = k.cohomology(-1).unwrap();
        assert!(hm1.module.is_pi_null(0).unwrap()); // kernel of injective map
    }

    #[test]
    fn shift_negates_and_moves() {
        let rs = RingSpec::integers(2).unwrap();
        let k = two_term(rs, 0, 2);
        let s = k.shift(1);
        assert_eq!(s.lo(), -1);
        assert_eq!(s.hi(), 0);
        assert_eq!(
            *s.diff(-1).matrix().get(0, 0),
            BigInt::from(-2)
        );
        let h = s.cohomology(0).unwrap();
        assert!(h.module.is_pi_null(1).unwrap());
    }

    #[test]
    fn cone_of_identity_is_exact() {
        let rs = RingSpec::modular(8, 2).unwrap();
        let k = two_term(rs, 0, 2);
        let id = ChainMap::identity(&k);
        let (c, incl, proj) = cone(&id).unwrap();
        assert!(c.is_pi_exact(0).unwrap());
        // inclusion then projection is zero: B -> C -> A[1]
        assert!(proj.compose(&incl).unwrap().is_zero_map().unwrap());
    }

    #[test]
    fn ladder_and_uniform_annihilation() {
        // P = M = [R --2--> R] over Z/8 in degrees [-1, 0]; H^0 = R/2 and
        // H^{-1} = ker(2) are pi-null, so pi^2 id is null-homotopic.
        let rs = RingSpec::modular(8, 2).unwrap();
        let k = two_term(rs, -1, 2);
        assert!(k.is_pi_exact(1).unwrap());
        let id = ChainMap::identity(&k);
        let ladder = build_homotopy_ladder(&id, 1).unwrap();
        ladder.verify(&id).unwrap();
        let (exp, h) = ladder.uniform_null_homotopy(&id).unwrap();
        assert_eq!(exp, 2);
        h.verify_null_homotopy(&id, 2).unwrap();
    }

    #[test]
    fn ladder_rejects_inexact_target() {
        // H^0 of a single free term R is R itself — not pi-null over Z/8.
        let rs = RingSpec::modular(8, 2).unwrap();
        let c = CochainComplex::concentrated(FpModule::free(rs, 1), 0);
        let id = ChainMap::identity(&c);
        let err = build_homotopy_ladder(&id, 1);
        assert!(err.is_err());
    }

    #[test]
    fn lift_through_multiplication() {
        // f = ·2 : [R] -> [R] over Z/8 (pi-iso exponent 1), g = id.
        // The lift gets f∘h = pi^2 g up to homotopy, exactly h = ·2.
        let rs = RingSpec::modular(8, 2).unwrap();
        let c = CochainComplex::concentrated(FpModule::free(rs.clone(), 1), 0);
        let mut comps = BTreeMap::new();
        comps.insert(
            0,
            ModuleMap::scaled_identity(&c.term(0), &BigInt::from(2)).unwrap(),
        );
        let f = ChainMap::new(c.clone(), c.clone(), comps).unwrap();
        let exps = f.induced_iso_exponents(8).unwrap();
        assert_eq!(exps, vec![(0, Some(1))]);
        let g = ChainMap::identity(&c);
        let lift = lift_through(&f, &g, 1).unwrap();
        assert_eq!(lift.exponent, 2);
        lift.verify(&f, &g).unwrap();
    }

    #[test]
    fn induced_map_on_cohomology() {
        // id on [R --2--> R] over Z/4 induces the identity on H^0 = Z/2
        let rs = RingSpec::modular(4, 2).unwrap();
        let k = two_term(rs, -1, 2);
        let id = ChainMap::identity(&k);
        let h = id.induced_cohomology_map(0).unwrap();
        assert_eq!(h.pi_iso_exponent(4).unwrap(), Some(0));
    }
}
