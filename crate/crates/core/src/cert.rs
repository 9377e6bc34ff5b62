//! Exponent certificates: checkable witnesses, not bare claims.
//!
//! A certificate never asserts more than its witness data proves by direct
//! matrix multiplication (plus one deterministic kernel/cokernel
//! recomputation for map certificates).  Verification recomputes nothing
//! that requires search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module::{FpModule, ModuleMap};

/// Witnessed claim: `pi^exponent` annihilates the module.  The witness `w`
/// solves `relations * w = pi^exponent * I` over the module's ring, which
/// exhibits every generator's `pi^exponent`-multiple as a relation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NullityCert {
    pub exponent: u32,
    pub witness: Matrix,
}

impl NullityCert {
    /// Measure the minimal exponent `<= cap` and produce its witness.
    pub fn measure(m: &FpModule, cap: u32) -> Result<Option<NullityCert>> {
        match m.min_null_exponent(cap)? {
            Some((exponent, witness)) => Ok(Some(NullityCert { exponent, witness })),
            None => Ok(None),
        }
    }

    /// Like [`NullityCert::measure`] but an exponent past `cap` is an error
    /// instead of `None`.
    pub fn measure_required(m: &FpModule, cap: u32, what: &str) -> Result<NullityCert> {
        NullityCert::measure(m, cap)?.ok_or_else(|| Error::ExponentCapExceeded {
            what: what.to_string(),
            cap,
        })
    }

    pub fn verify(&self, m: &FpModule) -> Result<()> {
        let ring = m.ring().ring().clone();
        let w = self.witness.change_ring(&ring);
        let lhs = m.relations().mul(&w)?;
        let scale = m.ring().pi_pow(self.exponent);
        let rhs = Matrix::scalar(ring, m.generators(), &scale);
        if lhs != rhs {
            return Err(Error::VerificationFailed(format!(
                "nullity witness does not reach pi^{}",
                self.exponent
            )));
        }
        Ok(())
    }
}

/// Witnessed claim: a map has `pi^exponent`-null kernel and cokernel.
/// Kernel and cokernel presentations are recomputed deterministically at
/// verification time, then the embedded nullity witnesses are multiplied
/// out against them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiCertificate {
    pub exponent: u32,
    pub kernel_null: NullityCert,
    pub cokernel_null: NullityCert,
}

impl PiCertificate {
    /// Measure the minimal common exponent `<= cap`.
    pub fn measure(f: &ModuleMap, cap: u32) -> Result<Option<PiCertificate>> {
        let (ker, _) = f.kernel()?;
        let (coker, _) = f.cokernel()?;
        let Some(k) = NullityCert::measure(&ker, cap)? else {
            return Ok(None);
        };
        let Some(c) = NullityCert::measure(&coker, cap)? else {
            return Ok(None);
        };
        let exponent = k.exponent.max(c.exponent);
        Ok(Some(PiCertificate {
            exponent,
            kernel_null: k,
            cokernel_null: c,
        }))
    }

    pub fn measure_required(f: &ModuleMap, cap: u32, what: &str) -> Result<PiCertificate> {
        PiCertificate::measure(f, cap)?.ok_or_else(|| Error::ExponentCapExceeded {
            what: what.to_string(),
            cap,
        })
    }

    pub fn verify(&self, f: &ModuleMap) -> Result<()> {
        if self.kernel_null.exponent > self.exponent || self.cokernel_null.exponent > self.exponent
        {
            return Err(Error::VerificationFailed(
                "component exponents exceed the stated exponent".into(),
            ));
        }
        let (ker, _) = f.kernel()?;
        let (coker, _) = f.cokernel()?;
        self.kernel_null.verify(&ker)?;
        self.cokernel_null.verify(&coker)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    #[test]
    fn nullity_cert_round_trip() {
        // Z/4 as a module over (Z/4, pi=2): exponent 2, not less.
        let rs = RingSpec::modular(4, 2).unwrap();
        let m = FpModule::free(rs, 1);
        assert!(NullityCert::measure(&m, 1).unwrap().is_none());
        let c = NullityCert::measure(&m, 8).unwrap().unwrap();
        assert_eq!(c.exponent, 2);
        c.verify(&m).unwrap();
        // tampering with the exponent breaks verification
        let bad = NullityCert {
            exponent: 1,
            witness: c.witness.clone(),
        };
        assert!(bad.verify(&m).is_err());
    }

    #[test]
    fn pi_certificate_on_multiplication() {
        // multiplication by 2 on Z/8 over (Z/8, pi=2): kernel {0,4} and
        // cokernel Z/2, both killed by pi itself.
        let rs = RingSpec::modular(8, 2).unwrap();
        let m = FpModule::free(rs, 1);
        let f = ModuleMap::scaled_identity(&m, &num_bigint::BigInt::from(2)).unwrap();
        let cert = PiCertificate::measure(&f, 8).unwrap().unwrap();
        assert_eq!(cert.exponent, 1);
        cert.verify(&f).unwrap();
    }
}
