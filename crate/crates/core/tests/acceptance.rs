//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every tolerance is pinned here, in code.

use fgap_core::dg::{
    self, build_system_exact, build_system_from_e, solve_d1, solve_d1_xy, solve_d2,
    SolveOptions, WeightConvention,
};
use fgap_core::elliptic::Lattice;
use fgap_core::pic::{self, DivClass};
use fgap_core::plane::{self, conic_c0_param, rat, Multiplicity, Rat};
use fgap_core::poly::Poly;
use fgap_core::types::{
    self, c_map, c_map_inverse, class_zero_by_sum, class_zero_sweep, g_alpha, geiser,
    severi_count, AlphaVector, TypeVector,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(number: u32, ok: bool, detail: &str) {
    println!(
        "acceptance {number:02} {} - {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {number:02} failed: {detail}");
}

fn random_lattice(rng: &mut ChaCha8Rng) -> Lattice {
    loop {
        let wa = c(rng.gen_range(0.6..2.4), rng.gen_range(-0.4..0.4));
        let wb = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.7..2.4));
        if let Ok(l) = Lattice::from_periods(wa, wb) {
            return l;
        }
    }
}

fn interior_point(l: &Lattice, rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let a = rng.gen_range(-0.45..0.45);
        let b = rng.gen_range(-0.45..0.45);
        let z = a * (2.0 * l.half_period_a()) + b * (2.0 * l.half_period_b());
        if l.dist_to_two_torsion(z) > 0.06 * l.shortest_vector() {
            return z;
        }
    }
}

#[test]
fn acceptance_01_addition_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let lat = random_lattice(&mut rng);
        let mut done = 0;
        while done < 100 {
            let z = interior_point(&lat, &mut rng);
            let w = interior_point(&lat, &mut rng);
            if lat.dist_to_lattice(z - w) < 0.05 * lat.shortest_vector()
                || lat.dist_to_lattice(z + w) < 0.05 * lat.shortest_vector()
            {
                continue;
            }
            let res = lat.check_addition_identities(z, w).unwrap();
            worst = worst.max(res.half_period_rel).max(res.pair_rel);
            done += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-9 && elapsed.as_secs_f64() < 5.0;
    report(
        1,
        ok,
        &format!(
            "addition identities on 5 lattices x 100 points: worst rel residual {worst:.2e}, {elapsed:.2?}"
        ),
    );
}

#[test]
fn acceptance_02_coefficient_exact_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut exact_ok = true;
    let mut tested = 0;
    while tested < 20 {
        let e0 = rat(rng.gen_range(-9..9), rng.gen_range(1..8));
        let e1 = rat(rng.gen_range(-9..9), rng.gen_range(1..8));
        let e2 = -(e0.clone() + e1.clone());
        if e0 == e1 || e1 == e2 || e0 == e2 {
            continue;
        }
        let alpha = AlphaVector::new([
            rng.gen_range(0..4),
            rng.gen_range(0..4),
            rng.gen_range(0..4),
            rng.gen_range(0..4),
        ])
        .unwrap();
        let sys = build_system_exact(&alpha, [e0, e1, e2], WeightConvention::Squared).unwrap();
        exact_ok &= sys.polys.diagonal_defect().is_zero_poly();
        exact_ok &= sys.polys.bracket_of_f() == sys.polys.g1;
        tested += 1;
    }

    // float mode on a real lattice
    let lat = Lattice::from_periods(c(2.0, 0.0), c(0.6, 1.7)).unwrap();
    let alpha = AlphaVector::new([2, 1, 0, 3]).unwrap();
    let sys = dg::build_system(&alpha, &lat).unwrap();
    let cube = sys
        .polys
        .pi
        .mul(&sys.polys.pi)
        .mul(&sys.polys.pi)
        .scale(&c(64.0, 0.0));
    let diag_rel = sys.polys.diagonal_defect().max_coeff_norm() / cube.max_coeff_norm();
    let bracket_rel = sys.polys.bracket_of_f().sub(&sys.polys.g1).max_coeff_norm()
        / sys.polys.g1.max_coeff_norm();
    let ok = exact_ok && diag_rel < 1e-10 && bracket_rel < 1e-10;
    report(
        2,
        ok,
        &format!(
            "diagonal and bracket identities: 20 exact rational triples, float defects {diag_rel:.2e} / {bracket_rel:.2e}"
        ),
    );
}

#[test]
fn acceptance_03_depth1_closed_form() {
    let alpha = AlphaVector::new([0, 0, 0, 0]).unwrap();
    let sys = build_system_from_e(
        &alpha,
        [c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        WeightConvention::Squared,
    )
    .unwrap();
    let sols = solve_d1_xy(&sys, &SolveOptions::default()).unwrap();
    let s = 2f64.sqrt();
    let expected = [
        c(0.0, 1.0),
        c(0.0, -1.0),
        c(1.0 + s, 0.0),
        c(-1.0 - s, 0.0),
        c(s - 1.0, 0.0),
        c(1.0 - s, 0.0),
    ];
    let mut worst: f64 = 0.0;
    let mut all_found = sols.len() == 6;
    for want in expected {
        match sols
            .iter()
            .map(|sol| (sol.xs[0] - want).norm())
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            Some(d) => worst = worst.max(d),
            None => all_found = false,
        }
    }
    let ok = all_found && worst < 1e-9;
    report(
        3,
        ok,
        &format!("depth-1 closed-form root set recovered, worst error {worst:.2e}"),
    );
}

#[test]
fn acceptance_04_depth2_headline_counts() {
    let start = Instant::now();
    let lat = Lattice::from_periods(c(2.0, 0.0), c(0.6, 1.7)).unwrap();
    let opts = SolveOptions::default();
    let mut ok = true;
    let mut detail = String::new();
    for alpha in [
        AlphaVector::new([4, 0, 0, 0]).unwrap(),
        AlphaVector::new([1, 2, 2, 2]).unwrap(),
    ] {
        let rep = solve_d2(&alpha, &lat, &opts).unwrap();
        let lifted = rep.solutions.iter().filter(|s| s.rhos.is_some()).count();
        let worst = rep
            .solutions
            .iter()
            .flat_map(|s| s.residuals.iter().copied())
            .fold(0.0f64, f64::max);
        ok &= rep.count == 27 && lifted == 27 && worst < 1e-8;
        detail.push_str(&format!(
            "alpha {:?}: count {}, lifted {}, worst residual {:.2e}; ",
            alpha.as_array(),
            rep.count,
            lifted,
            worst
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 120.0;
    report(4, ok, &format!("{detail}{elapsed:.2?}"));
}

#[test]
fn acceptance_05_bound_never_violated() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    // counting only; lifting does not change the count
    let opts = SolveOptions {
        lift: false,
        ..SolveOptions::default()
    };
    let mut max_count = 0usize;
    for _ in 0..10 {
        let lat = random_lattice(&mut rng);
        for _ in 0..5 {
            let alpha = AlphaVector::new([
                rng.gen_range(0..4),
                rng.gen_range(0..4),
                rng.gen_range(0..4),
                rng.gen_range(0..4),
            ])
            .unwrap();
            let rep = solve_d2(&alpha, &lat, &opts).unwrap();
            max_count = max_count.max(rep.count);
            if rep.count > 27 {
                report(
                    5,
                    false,
                    &format!("alpha {:?} produced {} pairs", alpha.as_array(), rep.count),
                );
            }
        }
    }
    report(
        5,
        max_count <= 27,
        &format!("50 random solves, max count {max_count} (bound 27)"),
    );
}

#[test]
fn acceptance_06_counting_formulas() {
    let start = Instant::now();
    let pot0 = types::standard_pot_zero();
    let sweep = class_zero_sweep(6);
    let mut cases = 0;
    let mut ok = true;
    for mu in &sweep {
        let closed = severi_count(mu, 2).unwrap();
        let st = mu.stats();
        ok &= closed == 27 - 14 * st.zeros + 2 * st.zeros * st.zeros - 3 * st.ones;
        let base = types::standard_base(mu, 2).unwrap();
        let rec = types::recursion_count(mu, 2, &base, &pot0).unwrap();
        ok &= rec == closed;
        cases += 1;
    }
    let spot = |v: [i64; 4]| severi_count(&TypeVector::new(v).unwrap(), 2).unwrap();
    ok &= spot([1, 0, 0, 0]) == 0 && spot([1, 0, 0, 2]) == 4 && spot([3, 2, 2, 2]) == 27;
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 10.0;
    report(
        6,
        ok,
        &format!("recursion matches closed form on {cases} types, {elapsed:.2?}"),
    );
}

#[test]
fn acceptance_07_spectral_enumeration() {
    let mut alphas = std::collections::BTreeSet::new();
    for mu in class_zero_sweep(6) {
        for j in 0..2u8 {
            for k in 0..4u8 {
                alphas.insert(c_map(j, k, &mu).unwrap());
            }
        }
    }
    let mut ok = true;
    let mut checked = 0;
    for alpha in &alphas {
        let strata = types::spectral_enumeration(alpha).unwrap();
        let total: i64 = strata.iter().map(|s| s.count).sum();
        let ga = g_alpha(alpha);
        ok &= total == 27;
        for s in &strata {
            ok &= s.genus_g >= ga && s.genus_g <= ga + 2;
            s.validate().unwrap();
        }
        checked += 1;
    }
    report(
        7,
        ok,
        &format!("{checked} coefficient vectors: strata total 27, genus within [g, g+2]"),
    );
}

#[test]
fn acceptance_08_lattice_cross_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut ok = true;
    // 200 random intersection cross-checks
    let mut checked = 0;
    while checked < 200 {
        let v1: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..6));
        let v2: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..6));
        let (nu, sigma) = match (TypeVector::new(v1), TypeVector::new(v2)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        ok &= pic::intersect(&pic::class_of_gamma(&nu), &pic::class_of_gamma(&sigma))
            == types::gamma_intersection(&nu, &sigma);
        checked += 1;
    }
    let k = DivClass::canonical();
    ok &= pic::intersect(&k, &k) == 0;
    let anti = DivClass::anticanonical();
    for mu in class_zero_sweep(5) {
        let base = pic::class_of_gamma(&mu);
        for d in 0..=4i64 {
            let cls = base.add(&anti.scale(d));
            ok &= pic::arithmetic_genus(&cls).unwrap() == d;
        }
    }
    report(
        8,
        ok,
        "divisor classes: 200 intersection cross-checks, K^2 = 0, padded-system genus",
    );
}

#[test]
fn acceptance_09_geiser_combinatorics() {
    let mut ok = true;
    for mu in class_zero_sweep(6) {
        let nbrs = types::exceptional_neighbors(&mu).unwrap();
        let zeros = mu.stats().zeros as usize;
        ok &= nbrs.len() == [24, 18, 13, 9][zeros];
        for nu in &nbrs {
            let img = geiser(&mu, nu).unwrap();
            ok &= nbrs.contains(&img);
            ok &= geiser(&mu, &img).unwrap() == *nu;
            ok &= nu.stats().n + img.stats().n == mu.sum_sq() + 1;
        }
    }
    report(
        9,
        ok,
        "involution, degree sum rule and neighbor census over the full sweep",
    );
}

#[test]
fn acceptance_10_plucker_budget() {
    let mut ok = true;
    let mut combos = std::collections::BTreeSet::new();
    for mu in class_zero_sweep(6) {
        let st = mu.stats();
        combos.insert((st.zeros, st.ones));
        let b = plane::dual_budget(st.zeros, st.ones).unwrap();
        // the budget constructor enforces the delta sum; cross-check nodes
        ok &= b.nodes == severi_count(&mu, 2).unwrap();
        ok &= b.dual_degree == 12 - 2 * st.zeros;
        ok &= b.cusps == 18 - 6 * st.zeros;
    }
    report(
        10,
        ok,
        &format!(
            "delta-sum identity and node counts over {} (zeros, ones) combinations",
            combos.len()
        ),
    );
}

#[test]
fn acceptance_11_conic_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut ok = true;

    // twenty exact rational points on the reference conic
    let mut done = 0;
    while done < 20 {
        let t = rat(rng.gen_range(-15..15), rng.gen_range(1..9));
        if t.is_zero() || t == rat(-1, 1) {
            continue;
        }
        let branch = conic_c0_param::<Rat>(t.clone());
        let q = branch.at(&t);
        let conic = match plane::conic_c411(&q, 0.0) {
            Ok(k) => k,
            Err(_) => continue,
        };
        ok &= plane::intersection_multiplicity(&conic, &branch, &q, 0.0).unwrap()
            == Multiplicity::Finite(4);
        let tp = plane::c411_tangency_point(&q);
        ok &= plane::line_h0::<Rat>().contains(&tp, 0.0);
        ok &= plane::certify_tangency(&conic, &plane::line_h0::<Rat>(), &tp, 0.0).unwrap();
        done += 1;
    }

    // twenty exact rational symmetric conics
    let mut done = 0;
    while done < 20 {
        let cv = rat(rng.gen_range(-12..12), rng.gen_range(2..9));
        let conic = match plane::conic_c222(&cv, 0.0) {
            Ok(k) => k,
            Err(_) => continue,
        };
        let p0 = [cv.clone(), rat(1, 1), rat(1, 1)];
        let p3 = [cv.clone(), rat(-1, 1), rat(1, 1)];
        ok &= plane::certify_tangency(&conic, &plane::line_h0::<Rat>(), &p0, 0.0).unwrap();
        ok &= plane::certify_tangency(&conic, &plane::line_h3::<Rat>(), &p3, 0.0).unwrap();
        // double tangency to the reference conic: the pulled-back quartic is
        // a constant times a perfect square (exact)
        let quartic = conic.compose(&conic_c0_param::<Rat>(rat(0, 1)));
        let sf = quartic.squarefree_part();
        ok &= sf.degree() == Some(2);
        let sq = sf.mul(&sf);
        let lead = quartic.coeff(quartic.degree().unwrap()) / sq.coeff(sq.degree().unwrap());
        ok &= quartic == sq.scale(&lead);
        // float certificate at the stated tangency points
        let cf = to_f64(&cv);
        let conic_f = plane::conic_c222(&c(cf, 0.0), 1e-9).unwrap();
        let (_, _, pts) = plane::c222_tangency_points(c(cf, 0.0));
        for p in pts {
            ok &= plane::certify_tangency(&conic_f, &plane::conic_c0::<Complex64>(), &p, 1e-9)
                .unwrap();
        }
        done += 1;
    }
    report(
        11,
        ok,
        "order-4 and triple-tangency conic certificates, exact over rationals",
    );
}

fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap()
}

#[test]
fn acceptance_12_coefficient_map_round_trip() {
    let mut ok = true;
    let mut cases = 0;
    for mu in class_zero_by_sum(15) {
        let st = mu.stats();
        let min2 = mu.as_array().iter().min().unwrap() >= &2;
        let mut criterion_attained = false;
        for j in 0..2u8 {
            for k in 0..4u8 {
                let alpha = c_map(j, k, &mu).unwrap();
                let (back, pairs) = c_map_inverse(&alpha).unwrap();
                ok &= back == mu && pairs.contains(&(j, k));
                // structural identities of the correspondence
                ok &= alpha.weight_sum() == st.sum_sq - 1;
                ok &= 2 * g_alpha(&alpha) == st.sum - 1;
                let m = alpha.max_entry();
                let s = alpha.sum();
                let mn = alpha.min_entry();
                let parity = if s % 2 == 0 { 2 } else { 0 };
                let big = (2 * m - s + parity * mn).abs() >= 4;
                criterion_attained |= big;
                // the closed-form min-2 criterion is exact on the j = 0
                // images; the j = 1 images can undershoot it
                if j == 0 {
                    ok &= min2 == big;
                }
                cases += 1;
            }
        }
        ok &= min2 == criterion_attained;
    }
    report(
        12,
        ok,
        &format!("coefficient-map round trip and exact identities on {cases} cases"),
    );
}

#[test]
fn depth1_generic_count_and_negative_control() {
    // supporting checks adjacent to the numbered criteria: a generic lattice
    // yields six distinct depth-1 solutions, and perturbing a verified
    // depth-2 solution breaks the constraint
    let lat = Lattice::from_periods(c(1.1, 0.15), c(0.3, 1.35)).unwrap();
    let alpha = AlphaVector::new([1, 1, 1, 1]).unwrap();
    let rep = solve_d1(&alpha, &lat, &SolveOptions::default()).unwrap();
    assert_eq!(rep.count, 6);

    let alpha = AlphaVector::new([4, 0, 0, 0]).unwrap();
    let rep = solve_d2(&alpha, &lat, &SolveOptions::default()).unwrap();
    let sol = rep.solutions.iter().find(|s| s.rhos.is_some()).unwrap();
    let rhos = sol.rhos.clone().unwrap();
    let spec = dg::PotentialSpec {
        alpha,
        rhos: vec![rhos[0] + c(1e-3, 0.0), rhos[1]],
        lattice: lat,
    };
    let res = dg::dg_residual(&spec, WeightConvention::Squared).unwrap();
    assert!(res.iter().any(|r| r.relative() > 1e-4));
}

#[test]
fn depth2_from_raw_branch_values() {
    // the lattice-free entry point used by the CLI's --e mode
    let alpha = AlphaVector::new([0, 0, 0, 0]).unwrap();
    let sys = build_system_from_e(
        &alpha,
        [c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        WeightConvention::Squared,
    )
    .unwrap();
    let (pairs, _) = dg::solve_d2_xy(&sys, &SolveOptions::default()).unwrap();
    assert!(pairs.len() <= 27);
    assert!(!pairs.is_empty());
}

#[test]
fn exact_g1_reference_polynomial() {
    // frozen hand expansion used by criterion 3
    let alpha = AlphaVector::new([0, 0, 0, 0]).unwrap();
    let sys = build_system_exact(
        &alpha,
        [rat(1, 1), rat(0, 1), rat(-1, 1)],
        WeightConvention::Squared,
    )
    .unwrap();
    let want: Poly<BigRational> = Poly::new(
        [1i64, 0, -5, 0, -5, 0, 1]
            .iter()
            .map(|&k| BigRational::from_integer(BigInt::from(k)))
            .collect(),
    );
    assert_eq!(sys.polys.g1, want);
}
