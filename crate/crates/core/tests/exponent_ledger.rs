//! The measured-exponent ledger.
//!
//! Every certified operation is exercised on seeded random instances and its
//! measured exponent is compared against the registered closed-form bound.
//! Windows stay at width four or less and the distinguished element ranges
//! over 2 and 3, so every law is checked in both residue characteristics and
//! over the integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use picert_core::bounds;
use picert_core::normal_form::{solve_from_hermite, solve_from_smith};
use picert_core::oracle;
use picert_core::{
    almost_finite_type, build_homotopy_ladder, build_pseudo_resolution, cohomology_bound_transfer,
    concentrated_datum, cone, extension_resolution, glue_finite_type, glue_quality_audit,
    hermite_normal_form, hom_annihilation, induced_hom_pi_iso_audit, lift_through,
    simplicial_free_pi_resolution, smith_normal_form, solve_in_column_span, transfer_along_map,
    triangle_resolution, truncation_projection, two_of_three, AlmostContext, BuildOptions,
    CechDatumMap, ChainMap, CochainComplex, ExactTriple, FpModule, InstanceGen, Matrix, ModuleMap,
    Ring, RingSpec, TransferDirection, TripleSlot,
};

const CAP: u32 = 40;
const BUDGET: u64 = 1 << 20;

fn rings() -> Vec<RingSpec> {
    vec![
        RingSpec::integers(2).unwrap(),
        RingSpec::integers(3).unwrap(),
        RingSpec::modular(16, 2).unwrap(),
        RingSpec::modular(27, 3).unwrap(),
    ]
}

/// A conjugate copy `X` of the termwise-free complex `m` (same ranks,
/// differentials conjugated by random unimodular base changes) together with
/// the connecting `pi^e`-isomorphism: `X -> m` when `from_copy` holds,
/// `m -> X` otherwise.  Each component is `pi^e` times a unimodular matrix.
fn conjugate_iso(
    gen: &mut InstanceGen,
    m: &CochainComplex,
    e: u32,
    from_copy: bool,
) -> (CochainComplex, ChainMap) {
    let rs = m.ring().clone();
    let ring = rs.ring().clone();
    let (lo, hi) = (m.lo(), m.hi());
    let pairs: Vec<(Matrix, Matrix)> = (lo..=hi)
        .map(|i| {
            let n = m.term(i).generators();
            gen.unimodular(&rs, n, 2 * n)
        })
        .collect();
    let terms: Vec<FpModule> = (lo..=hi)
        .map(|i| FpModule::free(rs.clone(), m.term(i).generators()))
        .collect();
    let mut diffs = Vec::new();
    for i in lo..hi {
        let k = (i - lo) as usize;
        let d = m.diff(i);
        let conj = pairs[k + 1]
            .0
            .mul(d.matrix())
            .unwrap()
            .mul(&pairs[k].1)
            .unwrap();
        diffs.push(ModuleMap::new(terms[k].clone(), terms[k + 1].clone(), conj).unwrap());
    }
    let x = CochainComplex::new(rs.clone(), lo, terms, diffs).unwrap();
    let scale = rs.pi_pow(e);
    let mut comps = BTreeMap::new();
    for i in lo..=hi {
        let k = (i - lo) as usize;
        let component = if from_copy {
            ModuleMap::new(x.term(i), m.term(i), pairs[k].1.scale(&scale)).unwrap()
        } else {
            ModuleMap::new(m.term(i), x.term(i), pairs[k].0.scale(&scale)).unwrap()
        };
        comps.insert(i, component);
    }
    let alpha = if from_copy {
        ChainMap::new(x.clone(), m.clone(), comps).unwrap()
    } else {
        ChainMap::new(m.clone(), x.clone(), comps).unwrap()
    };
    let _ = ring;
    (x, alpha)
}

fn column(ring: &Ring, v: &[BigInt]) -> Matrix {
    let mut m = Matrix::zero(ring.clone(), v.len(), 1);
    for (i, x) in v.iter().enumerate() {
        m.set(i, 0, x.clone());
    }
    m
}

/// Exhaustive search for an integer solution of `a x = b` with every
/// coordinate of `x` in `[-radius, radius]`.
fn int_solution_in_box(a: &Matrix, b: &Matrix, radius: i64) -> bool {
    let cols = a.cols();
    let mut x = vec![-radius; cols];
    loop {
        let mut hit = true;
        for r in 0..a.rows() {
            let mut acc = BigInt::from(0);
            for (c, xc) in x.iter().enumerate() {
                acc += a.get(r, c) * *xc;
            }
            if &acc != b.get(r, 0) {
                hit = false;
                break;
            }
        }
        if hit {
            return true;
        }
        let mut k = 0;
        loop {
            if k == cols {
                return false;
            }
            x[k] += 1;
            if x[k] <= radius {
                break;
            }
            x[k] = -radius;
            k += 1;
        }
    }
}

#[test]
fn normal_forms_remultiply_on_a_thousand_matrices() {
    let mut gen = InstanceGen::new(0xACE1);
    let specs = rings();
    for trial in 0..1000usize {
        let rows = gen.size_in(0, 5);
        let cols = gen.size_in(0, 5);
        if trial % 2 == 0 {
            let rs = &specs[trial % specs.len()];
            let a = gen.matrix(rs, rows, cols, 9);
            let nf = smith_normal_form(&a).unwrap();
            nf.verify(&a).unwrap();
        } else {
            // column echelon form is an integer-lattice operation
            let rs = &specs[trial % 2];
            let a = gen.matrix(rs, rows, cols, 9);
            let hf = hermite_normal_form(&a).unwrap();
            hf.verify(&a).unwrap();
        }
    }
}

#[test]
fn linear_solves_verify_and_negatives_are_exhaustively_confirmed() {
    let mut gen = InstanceGen::new(0xACE2);
    let specs = rings();
    let mut positives = 0usize;
    let mut modular_negatives = 0usize;
    let mut integer_negatives = 0usize;
    for trial in 0..4000usize {
        if positives >= 150 && modular_negatives >= 40 && integer_negatives >= 20 {
            break;
        }
        let rs = &specs[trial % specs.len()];
        let modular = trial % specs.len() >= 2;
        let rows = gen.size_in(1, 3);
        let cols = gen.size_in(1, 3);
        let a = gen.matrix(rs, rows, cols, 4);
        if trial % 2 == 0 {
            // a solvable right-hand side: check all three solver routes
            let y = gen.matrix(rs, cols, 1, 3);
            let b = a.mul(&y).unwrap();
            let x = solve_in_column_span(&a, &b).unwrap().expect("solvable");
            assert!(a.mul(&x).unwrap().add(&b.neg()).unwrap().is_zero());
            if !modular {
                let hf = hermite_normal_form(&a).unwrap();
                let xh = solve_from_hermite(&hf, &a, &b).unwrap().expect("solvable");
                assert!(a.mul(&xh).unwrap().add(&b.neg()).unwrap().is_zero());
            }
            let nf = smith_normal_form(&a).unwrap();
            let xs = solve_from_smith(&nf, &a, &b).unwrap().expect("solvable");
            assert!(a.mul(&xs).unwrap().add(&b.neg()).unwrap().is_zero());
            positives += 1;
        } else {
            let b = gen.matrix(rs, rows, 1, 9);
            match solve_in_column_span(&a, &b).unwrap() {
                Some(x) => {
                    assert!(a.mul(&x).unwrap().add(&b.neg()).unwrap().is_zero());
                }
                None => {
                    if modular {
                        // over a finite ring the refusal is proved exhaustively
                        assert!(
                            oracle::enumerate_solution(&a, &b, BUDGET).unwrap().is_none(),
                            "solver refused a solvable modular system"
                        );
                        modular_negatives += 1;
                    } else {
                        assert!(
                            !int_solution_in_box(&a, &b, 8),
                            "solver refused a system solvable in a small box"
                        );
                        integer_negatives += 1;
                    }
                }
            }
        }
    }
    assert!(positives >= 150, "only {positives} solvable instances");
    assert!(
        modular_negatives >= 40,
        "only {modular_negatives} modular refusals"
    );
    assert!(
        integer_negatives >= 20,
        "only {integer_negatives} integer refusals"
    );
}

#[test]
fn null_homotopies_stay_under_the_window_bound() {
    let mut gen = InstanceGen::new(0xACE3);
    let specs = rings();
    for trial in 0..200usize {
        let rs = &specs[trial % specs.len()];
        let a = gen.int_in(-3, 0);
        let b = a + gen.int_in(0, 3);
        let m = gen.pi_exact_complex(rs, a, b, 3).unwrap();
        let p = gen.free_complex(rs, a, b, 3, 2).unwrap();
        let f = gen.chain_map(&p, &m).unwrap();
        let (exp, homotopy) = hom_annihilation(&f, 1).unwrap();
        assert!(
            exp <= bounds::hom_annihilation_bound(1, a, b),
            "exponent {exp} above the window bound on [{a}, {b}]"
        );
        homotopy.verify_null_homotopy(&f, exp).unwrap();
    }
}

#[test]
fn homotopy_ladders_remultiply_and_truncations_verify() {
    let mut gen = InstanceGen::new(0xACE4);
    let specs = rings();
    for trial in 0..100usize {
        let rs = &specs[trial % specs.len()];
        let n = gen.int_in(1, 2);
        let m = gen.pi_exact_complex(rs, -3, 0, 2).unwrap();
        let p = gen.free_complex(rs, -n, 0, 2, 2).unwrap();
        let f = gen.chain_map(&p, &m).unwrap();
        let ladder = build_homotopy_ladder(&f, 1).unwrap();
        ladder.verify(&f).unwrap();
        // composing with the canonical truncation projection keeps the
        // annihilation exponent within the truncated window's width
        let (_tr, proj) = truncation_projection(&m, -n).unwrap();
        let g = proj.compose(&f).unwrap();
        let (exp, homotopy) = hom_annihilation(&g, 1).unwrap();
        assert!(
            exp <= (n + 1) as u32,
            "truncated annihilation exponent {exp} above width {}",
            n + 1
        );
        homotopy.verify_null_homotopy(&g, exp).unwrap();
    }
}

#[test]
fn lifts_through_pi_isomorphisms_verify() {
    let mut gen = InstanceGen::new(0xACE5);
    let specs = rings();
    for trial in 0..200usize {
        let rs = &specs[trial % specs.len()];
        let e = 1 + (trial % 2) as u32;
        let a = gen.int_in(-3, 0);
        let b = a + gen.int_in(0, 3);
        let m = gen.free_complex(rs, a, b, 2, 2).unwrap();
        let (_x, f) = conjugate_iso(&mut gen, &m, e, true);
        let p = gen.free_complex(rs, a, b, 2, 2).unwrap();
        let g = gen.chain_map(&p, &m).unwrap();
        let lift = lift_through(&f, &g, e).unwrap();
        assert!(
            lift.exponent <= bounds::lift_bound(e, a, b),
            "lift exponent {} above bound {} on [{a}, {b}]",
            lift.exponent,
            bounds::lift_bound(e, a, b)
        );
        lift.verify(&f, &g).unwrap();
    }
}

#[test]
fn resolution_transfers_respect_the_corollary_bounds() {
    let mut gen = InstanceGen::new(0xACE6);
    let specs = rings();
    for trial in 0..100usize {
        let rs = &specs[trial % specs.len()];
        let width = gen.int_in(1, 3);
        match trial % 3 {
            0 => {
                // forward along a scaled identity on a concentrated module
                let module = gen.module(rs, 3, 5).unwrap();
                let m = CochainComplex::concentrated(module, 0);
                let res = build_pseudo_resolution(&m, -width, 0, BuildOptions::default()).unwrap();
                let alpha = ChainMap::identity(&m).scale(&rs.pi_pow(1));
                let (res2, bound) =
                    transfer_along_map(&res, &alpha, 1, TransferDirection::Forward, CAP).unwrap();
                assert_eq!(bound, bounds::iso_corollary_forward(res.exponent, 1));
                assert!(res2.exponent <= bound);
                res2.verify().unwrap();
            }
            1 => {
                // forward along a conjugating isomorphism of free complexes
                let m = gen.free_complex(rs, -width, 0, 2, 2).unwrap();
                let res = build_pseudo_resolution(&m, -width, 0, BuildOptions::default()).unwrap();
                let (_x, alpha) = conjugate_iso(&mut gen, &m, 1, false);
                let (res2, bound) =
                    transfer_along_map(&res, &alpha, 1, TransferDirection::Forward, CAP).unwrap();
                assert_eq!(bound, bounds::iso_corollary_forward(res.exponent, 1));
                assert!(res2.exponent <= bound);
                res2.verify().unwrap();
            }
            _ => {
                // backward through a conjugating isomorphism
                let m = gen.free_complex(rs, -width, 0, 2, 2).unwrap();
                let res = build_pseudo_resolution(&m, -width, 0, BuildOptions::default()).unwrap();
                let (_x, alpha) = conjugate_iso(&mut gen, &m, 1, true);
                let (res2, bound) =
                    transfer_along_map(&res, &alpha, 1, TransferDirection::Backward, CAP).unwrap();
                assert!(
                    bound <= bounds::lift_bound(1, -width, 0) + res.exponent + 2,
                    "backward bound {bound} above the lifting law"
                );
                assert!(res2.exponent <= bound);
                res2.verify().unwrap();
            }
        }
    }
}

#[test]
fn triangle_resolutions_respect_the_cone_bound() {
    let mut gen = InstanceGen::new(0xACE7);
    let specs = rings();
    for trial in 0..100usize {
        let rs = &specs[trial % specs.len()];
        let b = 0i64;
        let a = b - gen.int_in(1, 3);
        let mod1 = gen.module(rs, 2, 4).unwrap();
        let mod2 = gen.module(rs, 2, 4).unwrap();
        let f = gen.module_map(&mod1, &mod2).unwrap();
        let m1 = CochainComplex::concentrated(mod1, b);
        let m2 = CochainComplex::concentrated(mod2, b);
        let alpha = ChainMap::new(m1.clone(), m2.clone(), BTreeMap::from([(b, f)])).unwrap();
        let res2 = build_pseudo_resolution(&m2, a, b, BuildOptions::default()).unwrap();
        let res1 = build_pseudo_resolution(&m1, a + 1, b + 1, BuildOptions::default()).unwrap();
        let (res3, bound) = triangle_resolution(&res1, &res2, &alpha, CAP).unwrap();
        assert!(
            bound <= bounds::triangle_bound(bounds::lift_bound(res2.exponent, a, b)),
            "triangle bound {bound} above the lifting law"
        );
        assert!(res3.exponent <= bound);
        res3.verify().unwrap();
    }
}

#[test]
fn extension_resolutions_cover_all_three_slots() {
    let mut gen = InstanceGen::new(0xACE8);
    let specs = rings();
    for trial in 0..60usize {
        let rs = &specs[trial % specs.len()];
        let (lo, hi) = (-1i64, 0i64);
        let x = gen.free_complex(rs, lo, hi, 2, 2).unwrap();
        let z = gen.free_complex(rs, lo, hi, 2, 2).unwrap();
        // a degree-one twist makes the middle a non-split-looking extension:
        // any chain map into the shifted sub anticommutes as required
        let w = gen.chain_map(&z, &x.shift(1)).unwrap();
        let ring = rs.ring().clone();
        let mut terms = Vec::new();
        let mut diffs: Vec<ModuleMap> = Vec::new();
        for i in lo..=hi {
            let n = x.term(i).generators() + z.term(i).generators();
            terms.push(FpModule::free(rs.clone(), n));
        }
        for i in lo..hi {
            let k = (i - lo) as usize;
            let (nx, nz) = (x.term(i).generators(), z.term(i).generators());
            let (mx, _mz) = (x.term(i + 1).generators(), z.term(i + 1).generators());
            let mut d = Matrix::zero(ring.clone(), terms[k + 1].generators(), nx + nz);
            let dx = x.diff(i);
            let dz = z.diff(i);
            let wi = w.component(i);
            d.paste(0, 0, dx.matrix());
            d.paste(0, nx, wi.matrix());
            d.paste(mx, nx, dz.matrix());
            diffs.push(ModuleMap::new(terms[k].clone(), terms[k + 1].clone(), d).unwrap());
        }
        let y = CochainComplex::new(rs.clone(), lo, terms, diffs).unwrap();
        let mut inj_comps = BTreeMap::new();
        let mut surj_comps = BTreeMap::new();
        for i in lo..=hi {
            let (nx, nz) = (x.term(i).generators(), z.term(i).generators());
            let mut inj = Matrix::zero(ring.clone(), nx + nz, nx);
            inj.paste(0, 0, &Matrix::identity(ring.clone(), nx));
            let mut surj = Matrix::zero(ring.clone(), nz, nx + nz);
            surj.paste(0, nx, &Matrix::identity(ring.clone(), nz));
            inj_comps.insert(i, ModuleMap::new(x.term(i), y.term(i), inj).unwrap());
            surj_comps.insert(i, ModuleMap::new(y.term(i), z.term(i), surj).unwrap());
        }
        let triple = ExactTriple {
            inj: ChainMap::new(x.clone(), y.clone(), inj_comps).unwrap(),
            surj: ChainMap::new(y.clone(), z.clone(), surj_comps).unwrap(),
        };
        let (a, b) = (-2i64, 0i64);
        let opts = BuildOptions::default;
        match trial % 3 {
            0 => {
                let res_a = build_pseudo_resolution(&x, a + 1, b + 1, opts()).unwrap();
                let res_b = build_pseudo_resolution(&y, a, b, opts()).unwrap();
                let (out, bound) = extension_resolution(1, &triple, &res_a, &res_b, CAP).unwrap();
                assert!(out.exponent <= bound, "quotient slot over budget");
                out.verify().unwrap();
            }
            1 => {
                let res_a = build_pseudo_resolution(&x, a, b, opts()).unwrap();
                let res_b = build_pseudo_resolution(&z, a, b, opts()).unwrap();
                let (out, bound) = extension_resolution(2, &triple, &res_a, &res_b, CAP).unwrap();
                assert!(out.exponent <= bound, "middle slot over budget");
                out.verify().unwrap();
            }
            _ => {
                let res_a = build_pseudo_resolution(&y, a, b, opts()).unwrap();
                let res_b = build_pseudo_resolution(&z, a - 1, b, opts()).unwrap();
                let (out, bound) = extension_resolution(3, &triple, &res_a, &res_b, CAP).unwrap();
                assert!(out.exponent <= bound, "sub slot over budget");
                out.verify().unwrap();
            }
        }
    }
}

#[test]
fn cones_and_truncations_preserve_cohomology_budgets() {
    let mut gen = InstanceGen::new(0xACE9);
    let specs = rings();
    for trial in 0..50usize {
        let rs = &specs[trial % specs.len()];
        let a = gen.int_in(-3, -1);
        let m = gen.free_complex(rs, a, 0, 2, 2).unwrap();
        // the cone of a pi^e-isomorphism has pi^{2e}-null cohomology
        let (_x, alpha) = conjugate_iso(&mut gen, &m, 1, true);
        let (c, _incl, _proj) = cone(&alpha).unwrap();
        for i in c.lo()..=c.hi() {
            let h = c.cohomology(i).unwrap().module;
            let e = h.min_null_exponent(CAP).unwrap();
            assert!(
                matches!(e, Some((v, _)) if v <= 2),
                "cone cohomology in degree {i} not pi^2-null"
            );
        }
        // canonical truncation: isomorphic cohomology at and above the cut,
        // zero strictly below it
        let mid = gen.int_in(a + 1, 0);
        let (tr, proj) = truncation_projection(&m, mid).unwrap();
        for i in a..=0 {
            if i >= mid {
                let induced = proj.induced_cohomology_map(i).unwrap();
                assert!(
                    induced.is_pi_isomorphism(0).unwrap(),
                    "truncation moved cohomology in degree {i}"
                );
            } else {
                let h = tr.cohomology(i).unwrap().module;
                assert_eq!(
                    h.min_null_exponent(0).unwrap().map(|p| p.0),
                    Some(0),
                    "truncation left cohomology below the cut in degree {i}"
                );
            }
        }
    }
}

#[test]
fn induced_hom_audits_stay_bounded() {
    let mut gen = InstanceGen::new(0xACEA);
    let specs = rings();
    for trial in 0..50usize {
        let rs = &specs[trial % specs.len()];
        let a = gen.int_in(-3, 0);
        let b = a + gen.int_in(0, 2);
        let p = gen.free_complex(rs, a, b, 2, 2).unwrap();
        let m = gen.free_complex(rs, a, b, 2, 2).unwrap();
        let (_x, alpha) = conjugate_iso(&mut gen, &m, 1, false);
        let audit = induced_hom_pi_iso_audit(&p, &alpha, 1, CAP).unwrap();
        assert_eq!(audit.bound, bounds::induced_hom_iso_bound(1, a, b));
        assert!(
            audit.measured <= audit.bound,
            "induced map measured {} above bound {}",
            audit.measured,
            audit.bound
        );
    }
}

#[test]
fn glue_audits_hold_on_random_cartesian_towers() {
    let mut gen = InstanceGen::new(0xACEB);
    let modular = [
        RingSpec::modular(4, 2).unwrap(),
        RingSpec::modular(9, 3).unwrap(),
        RingSpec::modular(8, 2).unwrap(),
    ];
    let mut max_quality = 0u32;
    let mut max_finite_type = 0u32;
    for trial in 0..100usize {
        let rs = &modular[trial % modular.len()];
        let opens = 3 + trial % 2;
        let height = 1 + (trial % 3 == 0) as u32;
        let datum = gen.cartesian_datum(rs, opens, 2, 2, height).unwrap();
        let quality = glue_quality_audit(&datum, CAP).unwrap();
        assert!(
            quality.measured <= quality.bound,
            "comparison measured {} above bound {}",
            quality.measured,
            quality.bound
        );
        assert!(quality.horizontal_measured <= quality.horizontal_bound);
        assert!(quality.equalizer_measured <= quality.equalizer_bound);
        let ft = glue_finite_type(&datum, CAP).unwrap();
        assert!(ft.level_measured <= ft.level_bound);
        assert!(ft.surjectivity_measured <= ft.surjectivity_bound);
        assert!(
            ft.measured <= ft.bound,
            "finite-type measured {} above bound {}",
            ft.measured,
            ft.bound
        );
        max_quality = max_quality.max(quality.measured);
        max_finite_type = max_finite_type.max(ft.measured);
    }
    println!(
        "glue ledger maxima: comparison {max_quality}, finite type {max_finite_type}"
    );
}

#[test]
fn covering_cohomology_transfer_stays_bounded() {
    let mut gen = InstanceGen::new(0xACEC);
    let modular = [RingSpec::modular(4, 2).unwrap(), RingSpec::modular(9, 3).unwrap()];
    let mut max_iso = 0u32;
    let mut max_surj = 0u32;
    for trial in 0..100usize {
        let k = if trial < 90 { 2 } else { 3 };
        let rs = &modular[trial % modular.len()];
        let height = 1 + (trial % 2) as u32;
        let datum = gen.cartesian_datum(rs, k + 1, k, 1, height).unwrap();
        let depth = (k + 1) as u32;
        let resolution = simplicial_free_pi_resolution(&datum, depth, Some(1), None).unwrap();
        let coefficients = concentrated_datum(&datum).unwrap();
        let mut components = BTreeMap::new();
        for (t, witness) in &resolution.witnesses {
            components.insert(t.clone(), witness.map.clone());
        }
        let map = CechDatumMap::new(resolution.complexes.clone(), coefficients, components).unwrap();
        let audit = cohomology_bound_transfer(&map, -(depth as i64), CAP).unwrap();
        assert_eq!(audit.k, k);
        assert_eq!(audit.iso_bound, bounds::cohomology_transfer_iso_bound(k));
        assert_eq!(audit.surj_bound, bounds::cohomology_transfer_surj_bound(k));
        assert!(
            audit.iso_measured <= audit.iso_bound,
            "transfer iso measured {} above bound {}",
            audit.iso_measured,
            audit.iso_bound
        );
        assert!(
            audit.surj_measured <= audit.surj_bound,
            "edge surjection measured {} above bound {}",
            audit.surj_measured,
            audit.surj_bound
        );
        max_iso = max_iso.max(audit.iso_measured);
        max_surj = max_surj.max(audit.surj_measured);
    }
    println!("transfer ledger maxima: iso {max_iso}, edge surjection {max_surj}");
}

#[test]
fn two_of_three_certificates_compose() {
    let mut gen = InstanceGen::new(0xACED);
    let rs = RingSpec::integers(2).unwrap();
    let ctx = AlmostContext::new(rs.ring().clone(), &[2]).unwrap();
    for trial in 0..100usize {
        let (inclusion, projection) = gen.exact_triple(&rs, 3, 5).unwrap();
        let sub = almost_finite_type(&ctx, inclusion.source(), 1).unwrap();
        let middle = almost_finite_type(&ctx, inclusion.target(), 1).unwrap();
        let quotient = almost_finite_type(&ctx, projection.target(), 1).unwrap();
        let (derived, target, budget) = match trial % 3 {
            0 => {
                let d =
                    two_of_three(&ctx, &inclusion, &projection, &middle, &quotient, TripleSlot::Sub)
                        .unwrap();
                (d, inclusion.source(), middle.exponent + quotient.exponent)
            }
            1 => {
                let d =
                    two_of_three(&ctx, &inclusion, &projection, &sub, &quotient, TripleSlot::Middle)
                        .unwrap();
                (d, inclusion.target(), sub.exponent + quotient.exponent)
            }
            _ => {
                let d =
                    two_of_three(&ctx, &inclusion, &projection, &sub, &middle, TripleSlot::Quotient)
                        .unwrap();
                (d, projection.target(), sub.exponent + middle.exponent)
            }
        };
        derived.verify(&ctx, target).unwrap();
        assert!(
            derived.exponent <= budget,
            "derived exponent {} above composite budget {budget}",
            derived.exponent
        );
    }
}

#[test]
fn enumeration_oracles_agree_with_certified_kernels() {
    let mut gen = InstanceGen::new(0xACEE);
    // (modulus, distinguished element, generator ceiling): every ambient
    // module stays at or below 512 elements
    let cases = [(2u64, 2i64, 4usize), (4, 2, 3), (8, 2, 2), (9, 3, 2)];
    for trial in 0..100usize {
        let (n, pi, max_g) = cases[trial % cases.len()];
        let rs = RingSpec::modular(n, pi).unwrap();
        let ring = rs.ring().clone();
        let m1 = gen.module(&rs, max_g, 3).unwrap();
        let m2 = gen.module(&rs, max_g, 3).unwrap();
        let f = gen.module_map(&m1, &m2).unwrap();

        // kernel: classes of ambient vectors that land in the relations
        let (k, _incl) = f.kernel().unwrap();
        let lib_kernel = oracle::coset_count(k.relations(), BUDGET).unwrap();
        let mut preimage = 0u64;
        for x in oracle::enumerate_vectors(&ring, m1.generators(), BUDGET).unwrap() {
            let fx = f.matrix().mul(&column(&ring, &x)).unwrap();
            if oracle::enumerate_solution(m2.relations(), &fx, BUDGET)
                .unwrap()
                .is_some()
            {
                preimage += 1;
            }
        }
        let fibre = oracle::span_size(m1.relations(), BUDGET).unwrap();
        assert_eq!(preimage % fibre, 0, "relations do not partition the preimage");
        assert_eq!(lib_kernel, preimage / fibre, "kernel size disagrees");

        // cokernel: ambient classes modulo relations and the image
        let (c, _proj) = f.cokernel().unwrap();
        let lib_cokernel = oracle::coset_count(c.relations(), BUDGET).unwrap();
        let full = n.pow(m2.generators() as u32);
        let span = oracle::span_size(&m2.relations().hstack(f.matrix()).unwrap(), BUDGET).unwrap();
        assert_eq!(full % span, 0);
        assert_eq!(lib_cokernel, full / span, "cokernel size disagrees");

        // minimal annihilating power of the distinguished element
        let lib_null = m1.min_null_exponent(8).unwrap().map(|p| p.0);
        let oracle_null =
            oracle::annihilator_exponent_enumerated(m1.relations(), rs.pi(), 8, BUDGET).unwrap();
        assert_eq!(lib_null, oracle_null, "annihilator exponent disagrees");
    }
}

#[test]
fn enumeration_oracles_agree_with_certified_cohomology() {
    let mut gen = InstanceGen::new(0xACEF);
    let cases = [(2u64, 2i64), (4, 2), (9, 3)];
    for trial in 0..100usize {
        let (n, pi) = cases[trial % cases.len()];
        let rs = RingSpec::modular(n, pi).unwrap();
        let c = gen.free_complex(&rs, -2, 0, 2, 2).unwrap();
        for i in c.lo()..=c.hi() {
            let h = c.cohomology(i).unwrap().module;
            let lib = oracle::coset_count(h.relations(), BUDGET).unwrap();
            let cycles = if i < c.hi() {
                let d = c.diff(i);
                oracle::enumerate_kernel(d.matrix(), BUDGET).unwrap().len() as u64
            } else {
                n.pow(c.term(i).generators() as u32)
            };
            let boundaries = if i > c.lo() {
                let d = c.diff(i - 1);
                oracle::span_size(d.matrix(), BUDGET).unwrap()
            } else {
                1
            };
            assert_eq!(cycles % boundaries, 0, "boundaries do not partition cycles");
            assert_eq!(
                lib,
                cycles / boundaries,
                "cohomology size disagrees in degree {i}"
            );
        }
    }
}
