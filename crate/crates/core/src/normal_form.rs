//! Diagonal (Smith) and column-echelon (Hermite) normal forms with full
//! transformation witnesses, plus the linear solvers built on them.
//!
//! Every result carries the transforms *and* their inverses, maintained
//! op-by-op, so verification is plain matrix multiplication and never
//! requires inverting anything after the fact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::Ring;

/// `d = u * a * v` with `u, v` invertible, `d` diagonal, diagonal entries
/// canonical and dividing in sequence (as ideals), `rank` = number of
/// nonzero diagonal entries.
#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub d: Matrix,
    pub u: Matrix,
    pub v: Matrix,
    pub u_inv: Matrix,
    pub v_inv: Matrix,
    pub rank: usize,
}

impl NormalFormResult {
    /// Diagonal entries `d_0 .. d_{rank-1}`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Re-multiplication check: `d == u a v`, all four inverse identities,
    /// diagonality, canonical entries, divisor chain.
    pub fn verify(&self, a: &Matrix) -> Result<()> {
        let ring = a.ring().clone();
        let uav = self.u.mul(a)?.mul(&self.v)?;
        if uav != self.d {
            return Err(Error::VerificationFailed("u*a*v != d".into()));
        }
        for (m, mi, name) in [
            (&self.u, &self.u_inv, "u"),
            (&self.v, &self.v_inv, "v"),
        ] {
            if !m.mul(mi)?.is_identity() || !mi.mul(m)?.is_identity() {
                return Err(Error::VerificationFailed(format!(
                    "{name} * {name}_inv != identity"
                )));
            }
        }
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                if i != j && !self.d.get(i, j).is_zero() {
                    return Err(Error::VerificationFailed("d is not diagonal".into()));
                }
            }
        }
        let n = self.d.rows().min(self.d.cols());
        for i in 0..n {
            let di = self.d.get(i, i);
            let nonzero = !di.is_zero();
            if (i < self.rank) != nonzero {
                return Err(Error::VerificationFailed("rank mismatch".into()));
            }
            if nonzero && *di != ring.reduce(&ring.pivot_size(di)) {
                return Err(Error::VerificationFailed(format!(
                    "diagonal entry {di} not canonical"
                )));
            }
            if i + 1 < self.rank && !ring.divides(di, self.d.get(i + 1, i + 1)) {
                return Err(Error::VerificationFailed("divisor chain broken".into()));
            }
        }
        Ok(())
    }
}

/// Row and column elementary operations applied simultaneously to the work
/// matrix and the transform witnesses, keeping `a_work = u * a_orig * v`
/// and the inverse pairs exact at every step.
struct Engine {
    ring: Ring,
    a: Matrix,
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
    v_inv: Matrix,
}

impl Engine {
    fn new(a: &Matrix) -> Engine {
        let ring = a.ring().clone();
        Engine {
            ring: ring.clone(),
            a: a.clone(),
            u: Matrix::identity(ring.clone(), a.rows()),
            u_inv: Matrix::identity(ring.clone(), a.rows()),
            v: Matrix::identity(ring.clone(), a.cols()),
            v_inv: Matrix::identity(ring, a.cols()),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols() {
                let x = m.get(i, c).clone();
                let y = m.get(j, c).clone();
                m.set(i, c, y);
                m.set(j, c, x);
            }
        }
        // u_inv picks up the swap on columns
        for r in 0..self.u_inv.rows() {
            let x = self.u_inv.get(r, i).clone();
            let y = self.u_inv.get(r, j).clone();
            self.u_inv.set(r, i, y);
            self.u_inv.set(r, j, x);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows() {
                let x = m.get(r, i).clone();
                let y = m.get(r, j).clone();
                m.set(r, i, y);
                m.set(r, j, x);
            }
        }
        for c in 0..self.v_inv.cols() {
            let x = self.v_inv.get(i, c).clone();
            let y = self.v_inv.get(j, c).clone();
            self.v_inv.set(i, c, y);
            self.v_inv.set(j, c, x);
        }
    }

    /// `row_i += c * row_j` (`i != j`).
    fn row_addmul(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for k in 0..m.cols() {
                let x = m.get(i, k) + c * m.get(j, k);
                m.set(i, k, x);
            }
        }
        // (I + cE_ij)^{-1} = I - cE_ij acting on the right: col_j -= c col_i
        for r in 0..self.u_inv.rows() {
            let x = self.u_inv.get(r, j) - c * self.u_inv.get(r, i);
            self.u_inv.set(r, j, x);
        }
    }

    /// `col_j += c * col_k` (`j != k`).
    fn col_addmul(&mut self, j: usize, k: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows() {
                let x = m.get(r, j) + c * m.get(r, k);
                m.set(r, j, x);
            }
        }
        for col in 0..self.v_inv.cols() {
            let x = self.v_inv.get(k, col) - c * self.v_inv.get(j, col);
            self.v_inv.set(k, col, x);
        }
    }

    /// `row_i *= s` for a unit `s`.
    fn scale_row(&mut self, i: usize, s: &BigInt) {
        let s_inv = self.ring.inverse(s).expect("unit");
        for m in [&mut self.a, &mut self.u] {
            for k in 0..m.cols() {
                let x = m.get(i, k) * s;
                m.set(i, k, x);
            }
        }
        for r in 0..self.u_inv.rows() {
            let x = self.u_inv.get(r, i) * &s_inv;
            self.u_inv.set(r, i, x);
        }
    }

    /// `col_j *= s` for a unit `s`.
    fn scale_col(&mut self, j: usize, s: &BigInt) {
        let s_inv = self.ring.inverse(s).expect("unit");
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows() {
                let x = m.get(r, j) * s;
                m.set(r, j, x);
            }
        }
        for c in 0..self.v_inv.cols() {
            let x = self.v_inv.get(j, c) * &s_inv;
            self.v_inv.set(j, c, x);
        }
    }

    /// Determinant-one transform on rows `i, j` placing `gcd` of the stored
    /// representatives of column `k` into position `(i, k)` and zero into
    /// `(j, k)`.
    fn bezout_rows(&mut self, i: usize, j: usize, k: usize) {
        let a = self.a.get(i, k).clone();
        let b = self.a.get(j, k).clone();
        let eg = a.extended_gcd(&b);
        let (g, p, q) = (eg.gcd, eg.x, eg.y);
        let ag = &a / &g;
        let bg = &b / &g;
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols() {
                let x = m.get(i, c).clone();
                let y = m.get(j, c).clone();
                m.set(i, c, &p * &x + &q * &y);
                m.set(j, c, -&bg * &x + &ag * &y);
            }
        }
        // right-multiply u_inv by the inverse block [[ag, -q], [bg, p]]
        for r in 0..self.u_inv.rows() {
            let x = self.u_inv.get(r, i).clone();
            let y = self.u_inv.get(r, j).clone();
            self.u_inv.set(r, i, &ag * &x + &bg * &y);
            self.u_inv.set(r, j, -&q * &x + &p * &y);
        }
    }

    /// Determinant-one transform on columns `j, k` placing `gcd` of the
    /// stored representatives of row `i` into `(i, j)` and zero into `(i, k)`.
    fn bezout_cols(&mut self, j: usize, k: usize, i: usize) {
        let a = self.a.get(i, j).clone();
        let b = self.a.get(i, k).clone();
        let eg = a.extended_gcd(&b);
        let (g, p, q) = (eg.gcd, eg.x, eg.y);
        let ag = &a / &g;
        let bg = &b / &g;
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows() {
                let x = m.get(r, j).clone();
                let y = m.get(r, k).clone();
                m.set(r, j, &p * &x + &q * &y);
                m.set(r, k, -&bg * &x + &ag * &y);
            }
        }
        // left-multiply v_inv by the inverse block [[ag, bg], [-q, p]]
        for c in 0..self.v_inv.cols() {
            let x = self.v_inv.get(j, c).clone();
            let y = self.v_inv.get(k, c).clone();
            self.v_inv.set(j, c, &ag * &x + &bg * &y);
            self.v_inv.set(k, c, -&q * &x + &p * &y);
        }
    }

    /// Smallest nonzero entry of the trailing submatrix by pivot size,
    /// ties to the lexicographically first position — deterministic.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let s = self.ring.pivot_size(x);
                match &best {
                    Some((bs, _, _)) if *bs <= s => {}
                    _ => best = Some((s, i, j)),
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }
}

/// Smith normal form over `Z` or `Z/N`.
pub fn smith_normal_form(a: &Matrix) -> Result<NormalFormResult> {
    let mut e = Engine::new(a);
    let n = a.rows().min(a.cols());
    let mut t = 0;
    while t < n {
        let Some((pi, pj)) = e.find_pivot(t) else { break };
        e.swap_rows(t, pi);
        e.swap_cols(t, pj);
        loop {
            let mut any_bezout = false;
            for i in t + 1..e.a.rows() {
                let b = e.a.get(i, t).clone();
                if b.is_zero() {
                    continue;
                }
                let piv = e.a.get(t, t).clone();
                if e.ring.divides(&piv, &b) {
                    let c = e.ring.solve_scalar(&piv, &b).expect("divisible");
                    e.row_addmul(i, t, &-c);
                } else {
                    e.bezout_rows(t, i, t);
                    any_bezout = true;
                }
            }
            for j in t + 1..e.a.cols() {
                let b = e.a.get(t, j).clone();
                if b.is_zero() {
                    continue;
                }
                let piv = e.a.get(t, t).clone();
                if e.ring.divides(&piv, &b) {
                    let c = e.ring.solve_scalar(&piv, &b).expect("divisible");
                    e.col_addmul(j, t, &-c);
                } else {
                    e.bezout_cols(t, j, t);
                    any_bezout = true;
                }
            }
            let col_clear = (t + 1..e.a.rows()).all(|i| e.a.get(i, t).is_zero());
            let row_clear = (t + 1..e.a.cols()).all(|j| e.a.get(t, j).is_zero());
            if col_clear && row_clear {
                break;
            }
            debug_assert!(any_bezout, "cleanup pass stalled");
        }
        t += 1;
    }
    let mut rank = t;

    // Divisor-chain repair: adjacent gcd/lcm exchanges, swept until stable.
    // Each exchange is a compare-and-swap of prime valuations, so at most
    // `rank` sweeps are needed.
    let mut pass = 0usize;
    loop {
        let mut changed = false;
        for i in 0..rank.saturating_sub(1) {
            let di = e.a.get(i, i).clone();
            let dj = e.a.get(i + 1, i + 1).clone();
            if e.ring.divides(&di, &dj) {
                continue;
            }
            e.col_addmul(i, i + 1, &BigInt::one());
            e.bezout_rows(i, i + 1, i);
            let g = e.a.get(i, i).clone();
            let fill = e.a.get(i, i + 1).clone();
            if !fill.is_zero() {
                let c = e.ring.solve_scalar(&g, &fill).ok_or_else(|| {
                    Error::InternalSolve("chain repair fill not divisible".into())
                })?;
                e.col_addmul(i + 1, i, &-c);
            }
            changed = true;
        }
        if !changed {
            break;
        }
        pass += 1;
        if pass > rank + 2 {
            return Err(Error::InternalSolve("divisor chain did not stabilize".into()));
        }
    }

    // Over Z/N an "lcm" entry produced by the repair can be a multiple of
    // the modulus, i.e. zero in the ring: the rank shrinks.
    while rank > 0 && e.a.get(rank - 1, rank - 1).is_zero() {
        rank -= 1;
    }

    // Canonical generators: positive over Z, gcd-with-modulus over Z/N.
    for i in 0..rank {
        let di = e.a.get(i, i).clone();
        let s = e.ring.unit_to_canonical(&di);
        if !s.is_one() {
            e.scale_row(i, &s);
        }
    }

    let result = NormalFormResult {
        d: e.a,
        u: e.u,
        v: e.v,
        u_inv: e.u_inv,
        v_inv: e.v_inv,
        rank,
    };
    debug_assert!(result.verify(a).is_ok());
    Ok(result)
}

/// Column-echelon Hermite form over `Z`: `h = a * v` with `v` unimodular,
/// pivot rows strictly increasing, pivots positive, entries left of a pivot
/// in its row reduced to `[0, pivot)`, columns past the rank zero.
#[derive(Clone, Debug)]
pub struct HermiteResult {
    pub h: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
    /// `pivot_rows[p]` is the row of the pivot in column `p`.
    pub pivot_rows: Vec<usize>,
}

impl HermiteResult {
    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    pub fn verify(&self, a: &Matrix) -> Result<()> {
        if a.mul(&self.v)? != self.h {
            return Err(Error::VerificationFailed("a*v != h".into()));
        }
        if !self.v.mul(&self.v_inv)?.is_identity() || !self.v_inv.mul(&self.v)?.is_identity() {
            return Err(Error::VerificationFailed("v * v_inv != identity".into()));
        }
        let mut prev = None;
        for (p, &r) in self.pivot_rows.iter().enumerate() {
            if let Some(q) = prev {
                if r <= q {
                    return Err(Error::VerificationFailed("pivot rows not increasing".into()));
                }
            }
            prev = Some(r);
            let piv = self.h.get(r, p);
            if !piv.is_positive() {
                return Err(Error::VerificationFailed("pivot not positive".into()));
            }
            for j in 0..self.h.cols() {
                let x = self.h.get(r, j);
                if j > p && !x.is_zero() {
                    return Err(Error::VerificationFailed("entry right of pivot".into()));
                }
                if j < p && (x.is_negative() || x >= piv) {
                    return Err(Error::VerificationFailed("entry left of pivot unreduced".into()));
                }
            }
            for i in 0..r {
                if !self.h.get(i, p).is_zero() {
                    return Err(Error::VerificationFailed("entry above pivot".into()));
                }
            }
        }
        for j in self.rank()..self.h.cols() {
            for i in 0..self.h.rows() {
                if !self.h.get(i, j).is_zero() {
                    return Err(Error::VerificationFailed("nonzero column past rank".into()));
                }
            }
        }
        Ok(())
    }
}

pub fn hermite_normal_form(a: &Matrix) -> Result<HermiteResult> {
    if a.ring().is_modular() {
        return Err(Error::Precondition(
            "column echelon form is defined over Z only".into(),
        ));
    }
    let mut e = Engine::new(a);
    let mut pivot_rows = Vec::new();
    let mut cur = 0usize;
    for i in 0..e.a.rows() {
        if cur >= e.a.cols() {
            break;
        }
        // shrink the working row to one nonzero entry at `cur`
        loop {
            let mut best: Option<(BigInt, usize)> = None;
            for j in cur..e.a.cols() {
                let x = e.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let s = x.abs();
                match &best {
                    Some((bs, _)) if *bs <= s => {}
                    _ => best = Some((s, j)),
                }
            }
            let Some((_, jmin)) = best else { break };
            e.swap_cols(cur, jmin);
            let mut clean = true;
            for j in cur + 1..e.a.cols() {
                let b = e.a.get(i, j).clone();
                if b.is_zero() {
                    continue;
                }
                let piv = e.a.get(i, cur).clone();
                if b.is_multiple_of(&piv) {
                    let c = &b / &piv;
                    e.col_addmul(j, cur, &-c);
                } else {
                    e.bezout_cols(cur, j, i);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if e.a.get(i, cur).is_zero() {
            continue;
        }
        if e.a.get(i, cur).is_negative() {
            e.scale_col(cur, &BigInt::from(-1));
        }
        let piv = e.a.get(i, cur).clone();
        for j in 0..cur {
            let x = e.a.get(i, j).clone();
            let c = x.div_floor(&piv);
            e.col_addmul(j, cur, &-c);
        }
        pivot_rows.push(i);
        cur += 1;
    }
    let result = HermiteResult {
        h: e.a,
        v: e.v,
        v_inv: e.v_inv,
        pivot_rows,
    };
    debug_assert!(result.verify(a).is_ok());
    Ok(result)
}

/// Solve `a * x = b` column by column; `None` when some column of `b` is
/// outside the column span.  Complete over both rings: echelon substitution
/// over `Z`, diagonal congruences over `Z/N`.
pub fn solve_in_column_span(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", a.ring(), b.ring())));
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve {}x{} against rhs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    match a.ring() {
        Ring::Int => {
            let hf = hermite_normal_form(a)?;
            solve_from_hermite(&hf, a, b)
        }
        Ring::Mod(_) => {
            let nf = smith_normal_form(a)?;
            solve_from_smith(&nf, a, b)
        }
    }
}

/// The Hermite-based solve with a precomputed echelon form (for repeated
/// right-hand sides against one matrix).
pub fn solve_from_hermite(hf: &HermiteResult, a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    let ring = a.ring().clone();
    let mut x = Matrix::zero(ring.clone(), a.cols(), b.cols());
    for col in 0..b.cols() {
        let mut residual = b.column(col);
        let mut y = vec![BigInt::zero(); a.cols()];
        let mut p = 0usize;
        for r in 0..a.rows() {
            if p < hf.rank() && hf.pivot_rows[p] == r {
                let piv = hf.h.get(r, p);
                if !residual[r].is_multiple_of(piv) {
                    return Ok(None);
                }
                let c = &residual[r] / piv;
                if !c.is_zero() {
                    for i in r..a.rows() {
                        let delta = &c * hf.h.get(i, p);
                        residual[i] -= delta;
                    }
                }
                y[p] = c;
                p += 1;
            } else if !residual[r].is_zero() {
                return Ok(None);
            }
        }
        let ycol = Matrix::column_vector(ring.clone(), &y);
        let xcol = hf.v.mul(&ycol)?;
        for i in 0..a.cols() {
            x.set(i, col, xcol.get(i, 0).clone());
        }
    }
    Ok(Some(x))
}

/// The Smith-based solve with a precomputed normal form.
pub fn solve_from_smith(nf: &NormalFormResult, a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    let ring = a.ring().clone();
    let c = nf.u.mul(b)?;
    let mut x = Matrix::zero(ring.clone(), a.cols(), b.cols());
    for col in 0..b.cols() {
        let mut z = vec![BigInt::zero(); a.cols()];
        for i in 0..a.rows() {
            let ci = c.get(i, col);
            if i < nf.rank {
                match ring.solve_scalar(nf.d.get(i, i), ci) {
                    Some(zi) => z[i] = zi,
                    None => return Ok(None),
                }
            } else if !ci.is_zero() {
                return Ok(None);
            }
        }
        let zcol = Matrix::column_vector(ring.clone(), &z);
        let xcol = nf.v.mul(&zcol)?;
        for i in 0..a.cols() {
            x.set(i, col, xcol.get(i, 0).clone());
        }
    }
    Ok(Some(x))
}

/// Solve `a_1 x_1 + a_2 x_2 + ... = rhs` for the unknown blocks `x_k`,
/// returning them split back apart.
pub fn solve_simultaneous(parts: &[&Matrix], rhs: &Matrix) -> Result<Option<Vec<Matrix>>> {
    let Some(first) = parts.first() else {
        return Err(Error::Precondition("no coefficient blocks".into()));
    };
    let mut stacked = (*first).clone();
    for p in &parts[1..] {
        stacked = stacked.hstack(p)?;
    }
    let Some(x) = solve_in_column_span(&stacked, rhs)? else {
        return Ok(None);
    };
    let mut out = Vec::with_capacity(parts.len());
    let mut row = 0usize;
    for p in parts {
        out.push(x.row_block(row, row + p.cols()));
        row += p.cols();
    }
    Ok(Some(out))
}

/// Columns generating `{x : a x = 0}`.  Over `Z` this is a basis of the
/// kernel lattice; over `Z/N` it includes the torsion generators
/// `(N / gcd(d_i, N)) v e_i` for each diagonal entry.
pub fn kernel_matrix(a: &Matrix) -> Result<Matrix> {
    let ring = a.ring().clone();
    let nf = smith_normal_form(a)?;
    let mut cols: Vec<usize> = Vec::new();
    let mut torsion: Vec<(usize, BigInt)> = Vec::new();
    match &ring {
        Ring::Int => {
            for i in nf.rank..a.cols() {
                cols.push(i);
            }
        }
        Ring::Mod(n) => {
            let n = BigInt::from(n.clone());
            for i in 0..nf.rank {
                let g = nf.d.get(i, i).gcd(&n);
                if !g.is_one() {
                    torsion.push((i, &n / &g));
                }
            }
            for i in nf.rank..a.cols() {
                cols.push(i);
            }
        }
    }
    let mut out = Matrix::zero(ring.clone(), a.cols(), torsion.len() + cols.len());
    let mut jj = 0usize;
    for (i, scale) in &torsion {
        for r in 0..a.cols() {
            out.set(r, jj, nf.v.get(r, *i) * scale);
        }
        jj += 1;
    }
    for &i in &cols {
        for r in 0..a.cols() {
            out.set(r, jj, nf.v.get(r, i).clone());
        }
        jj += 1;
    }
    debug_assert!(a.mul(&out).map(|m| m.is_zero()).unwrap_or(false));
    Ok(out)
}

/// A basis (as columns) of the lattice spanned by the columns of `a`
/// over `Z`: the nonzero columns of the Hermite form.
pub fn column_lattice_basis(a: &Matrix) -> Result<Matrix> {
    let hf = hermite_normal_form(a)?;
    Ok(hf.h.select_columns(&(0..hf.rank()).collect::<Vec<_>>()))
}
