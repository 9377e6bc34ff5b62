//! The two coefficient rings everything runs over: `Z` and `Z/N`.
//!
//! All arithmetic is exact.  Elements are [`BigInt`]s; over `Z/N` every
//! stored value is the reduced representative in `[0, N)`, so equality of
//! stored values is equality in the ring.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A coefficient ring: the integers, or the integers modulo `N` (`N >= 2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ring {
    Int,
    Mod(BigUint),
}

impl Ring {
    /// `Z/N` with a checked modulus.
    pub fn modulo(n: BigUint) -> Result<Ring> {
        if n < BigUint::from(2u32) {
            return Err(Error::InvalidRing(format!("modulus must be >= 2, got {n}")));
        }
        Ok(Ring::Mod(n))
    }

    pub fn is_modular(&self) -> bool {
        matches!(self, Ring::Mod(_))
    }

    pub fn modulus(&self) -> Option<BigInt> {
        match self {
            Ring::Int => None,
            Ring::Mod(n) => Some(BigInt::from(n.clone())),
        }
    }

    /// Canonical representative: the value itself over `Z`, the residue in
    /// `[0, N)` over `Z/N`.
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match self {
            Ring::Int => x.clone(),
            Ring::Mod(n) => {
                let n = BigInt::from(n.clone());
                let r = x % &n;
                if r.is_negative() {
                    r + n
                } else {
                    r
                }
            }
        }
    }

    pub fn is_zero(&self, x: &BigInt) -> bool {
        self.reduce(x).is_zero()
    }

    pub fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a + b))
    }

    pub fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a - b))
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a * b))
    }

    pub fn neg(&self, a: &BigInt) -> BigInt {
        self.reduce(&(-a))
    }

    /// Is `x` a unit of the ring?
    pub fn is_unit(&self, x: &BigInt) -> bool {
        match self {
            Ring::Int => x.abs().is_one(),
            Ring::Mod(n) => {
                let r = self.reduce(x);
                r.gcd(&BigInt::from(n.clone())).is_one()
            }
        }
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self, x: &BigInt) -> Result<BigInt> {
        match self {
            Ring::Int => {
                if self.is_unit(x) {
                    Ok(x.clone())
                } else {
                    Err(Error::Precondition(format!("{x} is not a unit of Z")))
                }
            }
            Ring::Mod(n) => {
                let n = BigInt::from(n.clone());
                let r = self.reduce(x);
                let eg = r.extended_gcd(&n);
                if !eg.gcd.is_one() {
                    return Err(Error::Precondition(format!(
                        "{r} is not a unit modulo {n}"
                    )));
                }
                Ok(self.reduce(&eg.x))
            }
        }
    }

    /// The "size" used for pivot selection and termination arguments:
    /// `|x|` over `Z`, `gcd(rep, N)` over `Z/N` (with `size(0) = 0` so that
    /// only genuinely zero entries report size zero).
    pub fn pivot_size(&self, x: &BigInt) -> BigInt {
        match self {
            Ring::Int => x.abs(),
            Ring::Mod(n) => {
                let r = self.reduce(x);
                if r.is_zero() {
                    BigInt::zero()
                } else {
                    r.gcd(&BigInt::from(n.clone()))
                }
            }
        }
    }

    /// Ideal membership for principal ideals: does `x` lie in `(d)`?
    ///
    /// Over `Z` this is ordinary divisibility (with `(0) = {0}`).  Over
    /// `Z/N` the ideal `(d)` equals `(gcd(d, N))`, so membership is
    /// divisibility of representatives by that gcd.
    pub fn divides(&self, d: &BigInt, x: &BigInt) -> bool {
        match self {
            Ring::Int => {
                if d.is_zero() {
                    x.is_zero()
                } else {
                    x.is_multiple_of(d)
                }
            }
            Ring::Mod(n) => {
                let n = BigInt::from(n.clone());
                let dr = self.reduce(d);
                let xr = self.reduce(x);
                let g = if dr.is_zero() { n } else { dr.gcd(&n) };
                if g.is_zero() {
                    xr.is_zero()
                } else {
                    xr.is_multiple_of(&g)
                }
            }
        }
    }

    /// One solution `y` of `d * y = c`, if any.
    ///
    /// Over `Z` the solution is unique when `d != 0`.  Over `Z/N` the
    /// returned representative is the smallest non-negative solution of the
    /// congruence.
    pub fn solve_scalar(&self, d: &BigInt, c: &BigInt) -> Option<BigInt> {
        match self {
            Ring::Int => {
                if d.is_zero() {
                    if c.is_zero() {
                        Some(BigInt::zero())
                    } else {
                        None
                    }
                } else if c.is_multiple_of(d) {
                    Some(c / d)
                } else {
                    None
                }
            }
            Ring::Mod(n) => {
                let n = BigInt::from(n.clone());
                let dr = self.reduce(d);
                let cr = self.reduce(c);
                if dr.is_zero() {
                    return if cr.is_zero() { Some(BigInt::zero()) } else { None };
                }
                let eg = dr.extended_gcd(&n);
                let g = eg.gcd.clone();
                if !cr.is_multiple_of(&g) {
                    return None;
                }
                // d*y ≡ c (mod n)  <=>  (d/g)*y ≡ c/g (mod n/g)
                let ng = &n / &g;
                let dg = &dr / &g;
                let cg = &cr / &g;
                let inv = dg.extended_gcd(&ng).x;
                let mut y = (cg * inv) % &ng;
                if y.is_negative() {
                    y += &ng;
                }
                Some(y)
            }
        }
    }

    /// A unit `u` with `u * a = pivot_size(a)` in the ring: over `Z` the
    /// sign, over `Z/N` the classical unit carrying `a` to `gcd(a, N)`.
    pub fn unit_to_canonical(&self, a: &BigInt) -> BigInt {
        match self {
            Ring::Int => {
                if a.is_negative() {
                    BigInt::from(-1)
                } else {
                    BigInt::one()
                }
            }
            Ring::Mod(n) => {
                let n_int = BigInt::from(n.clone());
                let r = self.reduce(a);
                if r.is_zero() {
                    return BigInt::one();
                }
                let g = r.gcd(&n_int);
                let a1 = &r / &g; // coprime to n/g
                let ng = &n_int / &g;
                // u0: inverse of a1 modulo n/g; then adjust u0 + t*(n/g) to be
                // a unit modulo n.  A valid t < n exists by CRT: primes of n
                // dividing n/g never divide u0, and for the others n/g is
                // invertible, so the bad residue can be dodged.
                let mut u = {
                    let eg = a1.extended_gcd(&ng);
                    let mut u0 = eg.x % &n_int;
                    if u0.is_negative() {
                        u0 += &n_int;
                    }
                    u0
                };
                if ng.is_one() {
                    // a generates the whole gcd-ideal only via 0 + t adjustments
                    u = BigInt::one();
                }
                let mut t = BigInt::zero();
                loop {
                    let cand = self.reduce(&(&u + &t * &ng));
                    if cand.gcd(&n_int).is_one() {
                        debug_assert_eq!(self.reduce(&(&cand * &r)), self.reduce(&g));
                        return cand;
                    }
                    t += 1;
                    assert!(t <= n_int, "no unit multiplier found (impossible)");
                }
            }
        }
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ring::Int => write!(f, "Z"),
            Ring::Mod(n) => write!(f, "Z/{n}"),
        }
    }
}

/// A coefficient ring together with the distinguished non-zero non-unit
/// element whose powers measure every defect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    ring: Ring,
    pi: BigInt,
}

impl RingSpec {
    pub fn new(ring: Ring, pi: BigInt) -> Result<RingSpec> {
        let pi = ring.reduce(&pi);
        if ring.is_zero(&pi) {
            return Err(Error::InvalidRing("pi must be nonzero".into()));
        }
        if ring.is_unit(&pi) {
            return Err(Error::InvalidRing(format!(
                "pi must not be a unit, got {pi} in {ring}"
            )));
        }
        Ok(RingSpec { ring, pi })
    }

    /// Integers with distinguished element `pi`.
    pub fn integers(pi: i64) -> Result<RingSpec> {
        RingSpec::new(Ring::Int, BigInt::from(pi))
    }

    /// `Z/N` with distinguished element `pi`.
    pub fn modular(n: u64, pi: i64) -> Result<RingSpec> {
        RingSpec::new(Ring::modulo(BigUint::from(n))?, BigInt::from(pi))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn pi(&self) -> &BigInt {
        &self.pi
    }

    /// `pi^l`, reduced.
    pub fn pi_pow(&self, l: u32) -> BigInt {
        let mut acc = BigInt::one();
        for _ in 0..l {
            acc = self.ring.mul(&acc, &self.pi);
        }
        acc
    }

    /// The same carrier with a different distinguished element.
    pub fn with_pi(&self, pi: BigInt) -> Result<RingSpec> {
        RingSpec::new(self.ring.clone(), pi)
    }
}

impl std::fmt::Display for RingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, pi = {})", self.ring, self.pi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Ring {
        Ring::Int
    }

    fn zn(n: u64) -> Ring {
        Ring::modulo(BigUint::from(n)).unwrap()
    }

    #[test]
    fn reduce_is_canonical() {
        let r = zn(12);
        assert_eq!(r.reduce(&BigInt::from(-1)), BigInt::from(11));
        assert_eq!(r.reduce(&BigInt::from(25)), BigInt::from(1));
        assert_eq!(z().reduce(&BigInt::from(-7)), BigInt::from(-7));
    }

    #[test]
    fn units() {
        assert!(z().is_unit(&BigInt::from(-1)));
        assert!(!z().is_unit(&BigInt::from(2)));
        let r = zn(12);
        assert!(r.is_unit(&BigInt::from(5)));
        assert!(!r.is_unit(&BigInt::from(8)));
        assert_eq!(
            r.mul(&r.inverse(&BigInt::from(5)).unwrap(), &BigInt::from(5)),
            BigInt::one()
        );
    }

    #[test]
    fn ideal_membership() {
        // In Z/12 the ideal (8) = (gcd(8,12)) = (4).
        let r = zn(12);
        assert!(r.divides(&BigInt::from(8), &BigInt::from(4)));
        assert!(!r.divides(&BigInt::from(8), &BigInt::from(2)));
        assert!(z().divides(&BigInt::from(0), &BigInt::from(0)));
        assert!(!z().divides(&BigInt::from(0), &BigInt::from(3)));
    }

    #[test]
    fn scalar_solve_modular() {
        // 2*y = 3 has no solution mod 5? It does: y = 4. gcd(2,5)=1.
        let r = zn(5);
        assert_eq!(r.solve_scalar(&BigInt::from(2), &BigInt::from(3)), Some(BigInt::from(4)));
        // 2*y = 3 mod 4: gcd(2,4)=2 does not divide 3.
        let r4 = zn(4);
        assert_eq!(r4.solve_scalar(&BigInt::from(2), &BigInt::from(3)), None);
        assert_eq!(r4.solve_scalar(&BigInt::from(2), &BigInt::from(2)), Some(BigInt::from(1)));
    }

    #[test]
    fn unit_multiplier_reaches_gcd() {
        for n in [4u64, 6, 8, 12, 16, 30, 36] {
            let r = zn(n);
            for a in 0..n {
                let a = BigInt::from(a);
                let u = r.unit_to_canonical(&a);
                assert!(r.is_unit(&u), "u={u} not a unit mod {n}");
                assert_eq!(r.mul(&u, &a), r.reduce(&r.pivot_size(&a)), "a={a}, n={n}");
            }
        }
    }

    #[test]
    fn ring_spec_rejects_bad_pi() {
        assert!(RingSpec::integers(1).is_err());
        assert!(RingSpec::integers(0).is_err());
        assert!(RingSpec::integers(2).is_ok());
        assert!(RingSpec::modular(9, 3).is_ok());
        // 5 is a unit mod 9
        assert!(RingSpec::modular(9, 5).is_err());
        // pi = 0 mod 9
        assert!(RingSpec::modular(9, 9).is_err());
    }
}
