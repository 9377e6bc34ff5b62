//! Central registry of the exponent bounds the library promises.  Every
//! audit compares a measured exponent against one of these formulas, so
//! they live in one place instead of being re-derived at each call site.

/// Window width `b - a + 1` as a u32 (windows are always non-empty).
fn width(a: i64, b: i64) -> u32 {
    debug_assert!(b >= a);
    (b - a + 1) as u32
}

/// If `pi^e` kills `H^i(M)` for all `i` in `[a, b]` and `P` is free on
/// `[a, b]`, then `pi^{e(b-a+1)}` kills every chain map `P -> M` up to
/// homotopy.
pub fn hom_annihilation_bound(e: u32, a: i64, b: i64) -> u32 {
    e * width(a, b)
}

/// Lifting across a `pi^e`-quasi-isomorphism `f : N -> M` costs two
/// exponents per degree of the window: `pi^{2e(b-a+1)} g` factors through
/// `f` up to homotopy.
pub fn lift_bound(e: u32, a: i64, b: i64) -> u32 {
    2 * e * width(a, b)
}

/// A `pi^e`-quasi-isomorphism `M -> M'` induces a `pi^{2e(b-a+3)}`-
/// isomorphism on chain-map classes from a complex free on `[a, b]`.
/// The `+3` pays for the one-degree slack on each side plus the lift.
pub fn induced_hom_iso_bound(e: u32, a: i64, b: i64) -> u32 {
    2 * e * (width(a, b) + 2)
}

/// A map with kernel and cokernel killed by `pi^l` has a two-sided
/// inverse up to `pi^{2l}`.
pub fn retract_bound(l: u32) -> u32 {
    2 * l
}

/// Forward direction of the isomorphism corollary: composing a
/// `pi^{e_res}`-resolution with a `pi^{e_map}`-isomorphism.
pub fn iso_corollary_forward(e_res: u32, e_map: u32) -> u32 {
    e_res + e_map
}

/// Backward direction: recovering a bound on the original map from a
/// retract of quality `l` costs two extra.
pub fn iso_corollary_backward(l: u32) -> u32 {
    l + 2
}

/// Completing a triangle of resolutions built from retracts of quality
/// `l` is bounded by `pi^{2(l+2)}`.
pub fn triangle_bound(l: u32) -> u32 {
    2 * (l + 2)
}

/// Glueing over a cover: sections agreeing up to `pi`-Cartesian defect 1
/// glue with quality at most `pi^8`.
pub const GLUE_QUALITY_BOUND: u32 = 8;

/// Finite-type glueing: each level costs at most `pi^9`, the retract
/// assembly at most `pi^16`, total `pi^25`.
pub const GLUE_FINITE_TYPE_LEVEL_BOUND: u32 = 9;
pub const GLUE_FINITE_TYPE_BOUND: u32 = 25;

/// A degreewise `pi^e`-isomorphism of covering data induces a
/// `pi^{2e}`-isomorphism on covering cohomology.
pub fn cech_transfer_bound(e: u32) -> u32 {
    2 * e
}

/// Covering cohomology with `k + 1` opens determines module cohomology
/// up to `pi^{4(k+1)}` above the window edge ...
pub fn cohomology_transfer_iso_bound(k: usize) -> u32 {
    4 * (k as u32 + 1)
}

/// ... and up to a `pi^{2(k+1)}`-surjection at the edge itself.
pub fn cohomology_transfer_surj_bound(k: usize) -> u32 {
    2 * (k as u32 + 1)
}

/// A filtration of length `l` with `pi`-trivial graded pieces yields a
/// `pi^l` bound on the whole.
pub fn noetherian_filtration_bound(l: u32) -> u32 {
    l
}

/// Number of monotone maps `[m] -> [n]` in the simplex category:
/// `C(n + m + 1, m + 1)`.
pub fn monotone_map_count(m: usize, n: usize) -> u64 {
    binomial((n + m + 1) as u64, (m + 1) as u64)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Substituting `pi^e` for `pi` in a statement bounded by `pi^m` yields
/// a statement bounded by `pi^{m * e}`.  Every staged bound below that
/// feeds one audited exponent into the next composes through here.
pub fn substitute(bound: u32, exponent: u32) -> u32 {
    bound * exponent
}

/// Exponent budgets of the staged pipeline, in terms of the truncation
/// degree `a < 0`: the four intermediate stages and the final transfer.
pub fn stage_homotopy_bound(a: i64) -> u32 {
    debug_assert!(a < 0);
    substitute(4, (-a) as u32)
}

pub fn stage_truncation_bound(a: i64) -> u32 {
    stage_homotopy_bound(a)
}

pub fn stage_glue_bound(a: i64) -> u32 {
    substitute(GLUE_FINITE_TYPE_BOUND, stage_truncation_bound(a))
}

pub fn stage_descent_bound(a: i64) -> u32 {
    cech_transfer_bound(stage_glue_bound(a))
}

pub fn stage_final_bound(k: usize) -> u32 {
    cohomology_transfer_iso_bound(k)
}

/// Per-degree certificate budget at the end of the pipeline: covering
/// cohomology is `pi^{k+1}`-finite type by the filtration, and crossing
/// the final comparison isomorphism adds its defect once on each side of
/// the cover.
pub fn stage_certificate_bound(k: usize) -> u32 {
    noetherian_filtration_bound(k as u32 + 1) + cohomology_transfer_iso_bound(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas_on_pinned_values() {
        assert_eq!(hom_annihilation_bound(1, -1, 0), 2);
        assert_eq!(lift_bound(1, -1, 0), 4);
        assert_eq!(induced_hom_iso_bound(1, 0, 0), 6);
        assert_eq!(induced_hom_iso_bound(2, -2, 1), 24);
        assert_eq!(retract_bound(3), 6);
        assert_eq!(iso_corollary_forward(2, 3), 5);
        assert_eq!(iso_corollary_backward(1), 3);
        assert_eq!(triangle_bound(1), 6);
        assert_eq!(GLUE_QUALITY_BOUND, 8);
        assert_eq!(GLUE_FINITE_TYPE_BOUND, 25);
        assert_eq!(cech_transfer_bound(1), 2);
        assert_eq!(cohomology_transfer_iso_bound(2), 12);
        assert_eq!(cohomology_transfer_surj_bound(2), 6);
        assert_eq!(stage_homotopy_bound(-5), 20);
        assert_eq!(stage_glue_bound(-5), 500);
        assert_eq!(stage_descent_bound(-5), 1000);
        assert_eq!(stage_final_bound(2), 12);
        assert_eq!(stage_certificate_bound(2), 15);
    }

    #[test]
    fn substitution_multiplies() {
        // replacing pi by pi^4 in the 25-bound gives the 100-bound, and
        // an exact input (exponent 0) trivializes any statement
        assert_eq!(substitute(25, 4), 100);
        assert_eq!(substitute(GLUE_FINITE_TYPE_BOUND, stage_homotopy_bound(-1)), 100);
        assert_eq!(substitute(8, 1), 8);
        assert_eq!(substitute(7, 0), 0);
    }

    #[test]
    fn monotone_map_counts() {
        // |Hom([0], [n])| = n + 1 (points), |Hom([m], [0])| = 1
        for n in 0..5 {
            assert_eq!(monotone_map_count(0, n), (n as u64) + 1);
            assert_eq!(monotone_map_count(n, 0), 1);
        }
        // |Hom([1], [1])| = C(3, 2) = 3: (00), (01), (11)
        assert_eq!(monotone_map_count(1, 1), 3);
        assert_eq!(monotone_map_count(2, 1), 4);
        assert_eq!(monotone_map_count(1, 2), 6);
    }
}
