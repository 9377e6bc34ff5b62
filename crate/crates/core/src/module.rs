//! Finitely presented modules `R^g / colspan(relations)` and maps between
//! them, with every homological primitive (kernel, cokernel, image) returned
//! as a presented module plus the structure map that names it.
//!
//! Maps are validated at construction: `matrix * relations_source` must land
//! in the relation span of the target, so an ill-defined map is impossible
//! to hold.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::normal_form::{kernel_matrix, solve_in_column_span, solve_simultaneous};
use crate::ring::RingSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpModule {
    ring: RingSpec,
    generators: usize,
    relations: Matrix, // generators x (number of relations)
}

impl FpModule {
    pub fn new(ring: RingSpec, generators: usize, relations: Matrix) -> Result<FpModule> {
        if relations.rows() != generators {
            return Err(Error::DimensionMismatch(format!(
                "{} generators but relations have {} rows",
                generators,
                relations.rows()
            )));
        }
        if relations.ring() != ring.ring() {
            return Err(Error::RingMismatch(format!(
                "relations over {}, module over {}",
                relations.ring(),
                ring.ring()
            )));
        }
        Ok(FpModule {
            ring,
            generators,
            relations,
        })
    }

    /// `R^g`, no relations.
    pub fn free(ring: RingSpec, g: usize) -> FpModule {
        let relations = Matrix::zero(ring.ring().clone(), g, 0);
        FpModule {
            ring,
            generators: g,
            relations,
        }
    }

    pub fn zero(ring: RingSpec) -> FpModule {
        FpModule::free(ring, 0)
    }

    /// `R / (c)` as a one-generator module.
    pub fn cyclic(ring: RingSpec, c: &BigInt) -> FpModule {
        let relations = Matrix::from_entries(ring.ring().clone(), 1, 1, vec![c.clone()])
            .expect("1x1");
        FpModule {
            ring,
            generators: 1,
            relations,
        }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &Matrix {
        &self.relations
    }

    pub fn is_free_presentation(&self) -> bool {
        self.relations.cols() == 0
    }

    /// Do the columns of `x` all represent zero, i.e. lie in the relation
    /// span?
    pub fn represents_zero(&self, x: &Matrix) -> Result<bool> {
        if x.rows() != self.generators {
            return Err(Error::DimensionMismatch(format!(
                "element has {} coordinates, module has {} generators",
                x.rows(),
                self.generators
            )));
        }
        Ok(solve_in_column_span(&self.relations, x)?.is_some())
    }

    pub fn elements_equal(&self, x: &Matrix, y: &Matrix) -> Result<bool> {
        self.represents_zero(&x.sub(y)?)
    }

    /// Minimal `l <= cap` with `pi^l * M = 0`, together with the solving
    /// witness `relations * w = pi^l * I`.
    pub fn min_null_exponent(&self, cap: u32) -> Result<Option<(u32, Matrix)>> {
        for l in 0..=cap {
            let scale = self.ring.pi_pow(l);
            let target = Matrix::scalar(self.ring.ring().clone(), self.generators, &scale);
            if let Some(w) = solve_in_column_span(&self.relations, &target)? {
                return Ok(Some((l, w)));
            }
        }
        Ok(None)
    }

    pub fn is_pi_null(&self, l: u32) -> Result<bool> {
        let scale = self.ring.pi_pow(l);
        let target = Matrix::scalar(self.ring.ring().clone(), self.generators, &scale);
        Ok(solve_in_column_span(&self.relations, &target)?.is_some())
    }

    pub fn direct_sum(&self, other: &FpModule) -> Result<FpModule> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        FpModule::new(
            self.ring.clone(),
            self.generators + other.generators,
            self.relations.block_diagonal(&other.relations)?,
        )
    }

    /// Standard basis element `e_i` as a column.
    pub fn basis_element(&self, i: usize) -> Matrix {
        let mut v = Matrix::zero(self.ring.ring().clone(), self.generators, 1);
        v.set(i, 0, BigInt::one());
        v
    }

    /// Extension of scalars `Z -> Z/N`: the same presentation with entries
    /// reduced.
    pub fn base_change(&self, target: &RingSpec) -> Result<FpModule> {
        if self.ring.ring().is_modular() {
            return Err(Error::Precondition(
                "base change starts from a module over Z".into(),
            ));
        }
        if !target.ring().is_modular() {
            return Err(Error::Precondition("base change target must be Z/N".into()));
        }
        FpModule::new(
            target.clone(),
            self.generators,
            self.relations.change_ring(target.ring()),
        )
    }

    /// Derived extension of scalars along `Z -> Z/N` via the two-term free
    /// resolution `L_1 -> L_0 = Z^g` with `L_1` a lattice basis of the
    /// relation span.  Returns `(degree-0 part, degree-1 part)`: the plain
    /// base change and the torsion module `ker(L_1/N -> L_0/N)`.
    pub fn derived_base_change(&self, target: &RingSpec) -> Result<(FpModule, FpModule)> {
        if self.ring.ring().is_modular() {
            return Err(Error::Precondition(
                "derived base change starts from a module over Z".into(),
            ));
        }
        let l1 = crate::normal_form::column_lattice_basis(&self.relations)?;
        let tor0 = self.base_change(target)?;
        let l1n = l1.change_ring(target.ring());
        let free1 = FpModule::free(target.clone(), l1.cols());
        let free0 = FpModule::free(target.clone(), self.generators);
        let d = ModuleMap::new(free1, free0, l1n)?;
        let (tor1, _) = d.kernel()?;
        Ok((tor0, tor1))
    }
}

impl std::fmt::Display for FpModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "<{} gens, {} rels over {}>",
            self.generators,
            self.relations.cols(),
            self.ring
        )
    }
}

/// A map of presented modules, stored as its matrix on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: FpModule,
    target: FpModule,
    matrix: Matrix, // target.generators x source.generators
}

impl ModuleMap {
    pub fn new(source: FpModule, target: FpModule, matrix: Matrix) -> Result<ModuleMap> {
        if source.ring != target.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                source.ring, target.ring
            )));
        }
        if matrix.rows() != target.generators || matrix.cols() != source.generators {
            return Err(Error::DimensionMismatch(format!(
                "map matrix is {}x{}, needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generators,
                source.generators
            )));
        }
        if matrix.ring() != source.ring.ring() {
            return Err(Error::RingMismatch(format!(
                "map matrix over {}, modules over {}",
                matrix.ring(),
                source.ring.ring()
            )));
        }
        // well-definedness: images of source relations must be relations
        let carried = matrix.mul(&source.relations)?;
        if solve_in_column_span(&target.relations, &carried)?.is_none() {
            return Err(Error::InvalidObject(
                "map does not carry source relations into target relations".into(),
            ));
        }
        Ok(ModuleMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(m: &FpModule) -> ModuleMap {
        let matrix = Matrix::identity(m.ring.ring().clone(), m.generators);
        ModuleMap {
            source: m.clone(),
            target: m.clone(),
            matrix,
        }
    }

    pub fn zero(source: &FpModule, target: &FpModule) -> Result<ModuleMap> {
        if source.ring != target.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                source.ring, target.ring
            )));
        }
        Ok(ModuleMap {
            source: source.clone(),
            target: target.clone(),
            matrix: Matrix::zero(source.ring.ring().clone(), target.generators, source.generators),
        })
    }

    /// Multiplication by a ring element as a self-map.
    pub fn scaled_identity(m: &FpModule, c: &BigInt) -> Result<ModuleMap> {
        let matrix = Matrix::scalar(m.ring.ring().clone(), m.generators, c);
        ModuleMap::new(m.clone(), m.clone(), matrix)
    }

    pub fn source(&self) -> &FpModule {
        &self.source
    }

    pub fn target(&self) -> &FpModule {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.matrix.mul(x)
    }

    /// `self ∘ first` (apply `first`, then `self`).
    pub fn compose(&self, first: &ModuleMap) -> Result<ModuleMap> {
        if first.target != self.source {
            return Err(Error::Precondition(
                "composition: inner target differs from outer source".into(),
            ));
        }
        // carried relations stay carried under composition, skip revalidation
        Ok(ModuleMap {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&first.matrix)?,
        })
    }

    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Precondition("sum of maps with different ends".into()));
        }
        Ok(ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModuleMap {
        ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.neg(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> ModuleMap {
        ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.scale(c),
        }
    }

    pub fn is_zero_map(&self) -> Result<bool> {
        self.target.represents_zero(&self.matrix)
    }

    /// Do `self` and `other` agree as maps (equal on classes, not just on
    /// matrices)?
    pub fn equals(&self, other: &ModuleMap) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Ok(false);
        }
        self.target
            .represents_zero(&self.matrix.sub(&other.matrix)?)
    }

    /// Kernel as a presented module with its inclusion.
    ///
    /// Lifted kernel generators are the `x`-parts of `ker[matrix | rel_T]`;
    /// their relations are the coefficients carrying them into `rel_S`.
    pub fn kernel(&self) -> Result<(FpModule, ModuleMap)> {
        let lifted = self.lifted_kernel_generators()?;
        let combined = lifted.hstack(&self.source.relations)?;
        let krel_full = kernel_matrix(&combined)?;
        let krel = krel_full.row_block(0, lifted.cols());
        let k = FpModule::new(self.source.ring.clone(), lifted.cols(), krel)?;
        let incl = ModuleMap::new(k.clone(), self.source.clone(), lifted)?;
        Ok((k, incl))
    }

    /// Columns of `R^{g_S}` spanning `{x : matrix * x ∈ span rel_T}`.
    fn lifted_kernel_generators(&self) -> Result<Matrix> {
        let combined = self.matrix.hstack(&self.target.relations)?;
        let big = kernel_matrix(&combined)?;
        Ok(big.row_block(0, self.source.generators))
    }

    /// Cokernel as a presented module with its projection.
    pub fn cokernel(&self) -> Result<(FpModule, ModuleMap)> {
        let rel = self.matrix.hstack(&self.target.relations)?;
        let c = FpModule::new(self.target.ring.clone(), self.target.generators, rel)?;
        let proj = ModuleMap::new(
            self.target.clone(),
            c.clone(),
            Matrix::identity(self.target.ring.ring().clone(), self.target.generators),
        )?;
        Ok((c, proj))
    }

    /// Image as a presented module, with the inclusion into the target and
    /// the surjection from the source.
    pub fn image(&self) -> Result<(FpModule, ModuleMap, ModuleMap)> {
        let rel = self.lifted_kernel_generators()?;
        let im = FpModule::new(self.source.ring.clone(), self.source.generators, rel)?;
        let incl = ModuleMap::new(im.clone(), self.target.clone(), self.matrix.clone())?;
        let surj = ModuleMap::new(
            self.source.clone(),
            im.clone(),
            Matrix::identity(self.source.ring.ring().clone(), self.source.generators),
        )?;
        Ok((im, incl, surj))
    }

    /// Minimal `l <= cap` with kernel and cokernel both `pi^l`-null.
    pub fn pi_iso_exponent(&self, cap: u32) -> Result<Option<u32>> {
        let (ker, _) = self.kernel()?;
        let (coker, _) = self.cokernel()?;
        let Some((ek, _)) = ker.min_null_exponent(cap)? else {
            return Ok(None);
        };
        let Some((ec, _)) = coker.min_null_exponent(cap)? else {
            return Ok(None);
        };
        Ok(Some(ek.max(ec)))
    }

    pub fn is_pi_isomorphism(&self, l: u32) -> Result<bool> {
        let (ker, _) = self.kernel()?;
        if !ker.is_pi_null(l)? {
            return Ok(false);
        }
        let (coker, _) = self.cokernel()?;
        coker.is_pi_null(l)
    }

    /// A two-sided inverse up to `pi^{2l}`: the minimal `l <= cap` with a
    /// map `g` such that `g ∘ self = pi^{2l} id` and `self ∘ g = pi^{2l} id`
    /// exactly, built by solving `matrix * X ≡ pi^l I` modulo the target
    /// relations and setting `g = pi^l X`.
    pub fn retract_inverse(&self, cap: u32) -> Result<Option<(ModuleMap, u32)>> {
        let (ker, _) = self.kernel()?;
        let Some((ek, _)) = ker.min_null_exponent(cap)? else {
            return Ok(None);
        };
        let ring = self.source.ring.clone();
        for l in ek..=cap {
            let scale = ring.pi_pow(l);
            let rhs = Matrix::scalar(ring.ring().clone(), self.target.generators, &scale);
            let Some(parts) = solve_simultaneous(&[&self.matrix, &self.target.relations], &rhs)?
            else {
                continue;
            };
            let x = &parts[0];
            let g = ModuleMap::new(
                self.target.clone(),
                self.source.clone(),
                x.scale(&scale),
            )?;
            let two_l = ring.pi_pow(2 * l);
            let gf = g.compose(self)?;
            let fg = self.compose(&g)?;
            let id_s = ModuleMap::scaled_identity(&self.source, &two_l)?;
            let id_t = ModuleMap::scaled_identity(&self.target, &two_l)?;
            if !gf.equals(&id_s)? || !fg.equals(&id_t)? {
                return Err(Error::InternalSolve(
                    "retract identities failed after solvable inverse".into(),
                ));
            }
            return Ok(Some((g, l)));
        }
        Ok(None)
    }
}

impl std::fmt::Display for ModuleMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}
