use std::collections::HashMap;
use std::f64::consts::TAU;

use gperiods_core::numtheory::divisors;
use gperiods_core::raster::{composite, extent_of, render_layer};
use gperiods_core::{
    applicability_check, coverage, cyclotomic, dihedral_order, euler_totient, gcd,
    map_to_canvas, multiplicative_order, rasterize, subplot_containment_check, verify_dihedral,
    ColoringMode, Complex64, IntPolynomial, LaurentMap, Palette, PeriodParams, PeriodSet,
    RenderSpec, Rgba,
};
use proptest::prelude::*;

/// Straight double loop with std trig.
fn oracle(n: u64, omega: u64, k: u64) -> Complex64 {
    let d = multiplicative_order(omega as i64, n).unwrap();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut e = k % n;
    for _ in 0..d {
        let t = TAU * e as f64 / n as f64;
        acc += Complex64::new(t.cos(), t.sin());
        e = e * omega % n;
    }
    acc
}

fn units(n: u64) -> impl Iterator<Item = u64> {
    (0..n).filter(move |&w| gcd(w, n) == 1)
}

/// Maps every residue to the index of its orbit in `set`.
fn orbit_index(set: &PeriodSet) -> Vec<usize> {
    let n = set.params.n();
    let w = set.params.omega();
    let by_rep: HashMap<u64, usize> = set.orbits.iter().enumerate().map(|(i, o)| (o.rep, i)).collect();
    (0..n)
        .map(|k| {
            let mut m = k;
            let mut e = k * w % n;
            while e != k {
                m = m.min(e);
                e = e * w % n;
            }
            by_rep[&m]
        })
        .collect()
}

#[test]
fn matches_double_loop_sum() {
    for n in 1..=120u64 {
        for w in units(n) {
            let set = PeriodSet::compute(n, w as i64, 1, ColoringMode::Standard).unwrap();
            let index = orbit_index(&set);
            for k in 0..n {
                let got = set.orbits[index[k as usize]].value;
                let want = oracle(n, w, k);
                assert!((got - want).norm() < 1e-9, "n={n} w={w} k={k}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn orbits_partition_residues() {
    for n in 1..=150u64 {
        for w in units(n) {
            let set = PeriodSet::compute(n, w as i64, 1, ColoringMode::Standard).unwrap();
            let total: u64 = set.orbits.iter().map(|o| o.size).sum();
            assert_eq!(total, n);
            let d = set.params.d();
            for o in &set.orbits {
                assert_eq!(d % o.size, 0);
                assert!(o.value.norm() <= d as f64 + 1e-9);
            }
            assert!(set.orbits.windows(2).all(|p| p[0].rep < p[1].rep));
        }
    }
}

#[test]
fn conjugate_residue_gives_conjugate_value() {
    for n in [7u64, 12, 27, 60, 91, 128, 210] {
        for w in units(n) {
            let set = PeriodSet::compute(n, w as i64, 1, ColoringMode::Standard).unwrap();
            let index = orbit_index(&set);
            for k in 0..n {
                let a = set.orbits[index[k as usize]].value;
                let b = set.orbits[index[((n - k) % n) as usize]].value;
                assert!((a - b.conj()).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn colors_agree_with_residues_mod_c() {
    for (n, w) in [(27u64, 2i64), (60, 7), (105, 2), (144, 5), (200, 3)] {
        for c in divisors(n) {
            let set = PeriodSet::compute(n, w, c, ColoringMode::Standard).unwrap();
            let index = orbit_index(&set);
            let mut class_of_residue: HashMap<u64, u32> = HashMap::new();
            for k in 0..n {
                let class = set.orbits[index[k as usize]].color_class;
                let prev = *class_of_residue.entry(k % c).or_insert(class);
                assert_eq!(prev, class, "n={n} w={w} c={c} k={k}");
            }
            assert!(set.orbits.iter().all(|o| (o.color_class as usize) < set.class_count));
        }
    }
}

#[test]
fn period_squared_classes_are_closed_under_negation() {
    for (n, w) in [(27u64, 2i64), (60, 7), (91, 3)] {
        for c in divisors(n) {
            let set = PeriodSet::compute(n, w, c, ColoringMode::PeriodSquared).unwrap();
            let index = orbit_index(&set);
            for k in 0..n {
                let a = set.orbits[index[k as usize]].color_class;
                let b = set.orbits[index[((n - k) % n) as usize]].color_class;
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn subplots_embed_for_every_divisor() {
    for n in 1..=200u64 {
        for w in units(n).step_by(3) {
            for c in divisors(n) {
                let set = PeriodSet::compute(n, w as i64, c, ColoringMode::Standard).unwrap();
                assert!(subplot_containment_check(&set), "n={n} w={w} c={c}");
            }
        }
    }
}

#[test]
fn dihedral_symmetry_small_moduli() {
    for n in 1..=200u64 {
        for w in units(n) {
            let set = PeriodSet::compute(n, w as i64, 1, ColoringMode::Standard).unwrap();
            let fold = dihedral_order(&set.params);
            let report = verify_dihedral(&set, fold, 1e-8);
            assert!(report.holds, "n={n} w={w} fold={fold} mismatch={}", report.max_mismatch);
        }
    }
}

#[test]
fn cyclotomic_products_and_degrees() {
    for d in 1..=100u64 {
        let mut product = IntPolynomial::from_i64(&[1]);
        for e in divisors(d) {
            let phi = cyclotomic(e).unwrap();
            assert!(phi.is_monic());
            assert_eq!(phi.degree(), Some(euler_totient(e) as usize));
            product = product.mul(&phi);
        }
        assert_eq!(product, IntPolynomial::x_pow_minus_one(d as usize), "d={d}");
    }
}

#[test]
fn applicable_prime_moduli_sit_near_the_image() {
    // d = 3 over prime moduli with 3 | p - 1
    let map = LaurentMap::new(3).unwrap();
    for q in [7u64, 13, 61, 307, 1009, 3019] {
        let w = (2..q).find(|&w| multiplicative_order(w as i64, q).unwrap() == 3).unwrap();
        assert!(applicability_check(q, w as i64).unwrap().applicable());
        let set = PeriodSet::compute(q, w as i64, 1, ColoringMode::Standard).unwrap();
        let report = coverage(&set, &map, 0.05, 250_000).unwrap();
        assert!(report.max_point_distance <= 1e-2 * 3.0, "q={q}: {}", report.max_point_distance);
    }
}

#[test]
fn rotated_positions_land_on_rendered_positions() {
    let spec = RenderSpec {
        width: 640,
        height: 480,
        ..RenderSpec::default()
    };
    for (n, w) in [(29070u64, 1189i64), (91, 27), (400, 21), (1000, 101)] {
        let set = PeriodSet::compute(n, w, 1, ColoringMode::Standard).unwrap();
        let fold = dihedral_order(&set.params);
        let extent = extent_of(set.values());
        let positions: Vec<(f64, f64)> = set.values().map(|z| map_to_canvas(z, extent, &spec)).collect();
        let (cx, cy) = (spec.width as f64 / 2.0, spec.height as f64 / 2.0);
        let (s, c) = (TAU / fold as f64).sin_cos();
        for &(x, y) in &positions {
            let (dx, dy) = (x - cx, y - cy);
            let (rx, ry) = (cx + c * dx - s * dy, cy + s * dx + c * dy);
            let (mx, my) = (x, 2.0 * cy - y);
            for (px, py) in [(rx, ry), (mx, my)] {
                let best = positions
                    .iter()
                    .map(|&(qx, qy)| (qx - px).hypot(qy - py))
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= 1.0, "n={n} w={w}: {best}");
            }
        }
    }
}

fn composite_matches(n: u64, w: i64, c: u64, radius: f64, reversed: bool) {
    let set = PeriodSet::compute(n, w, c, ColoringMode::Standard).unwrap();
    let mut order: Vec<u32> = (0..set.class_count as u32).collect();
    if reversed {
        order.reverse();
    }
    let spec = RenderSpec {
        width: 96,
        height: 64,
        point_radius: radius,
        palette: Palette::Auto,
        background: Rgba([10, 20, 30, 255]),
        layer_order: Some(order.clone()),
        ..RenderSpec::default()
    };
    let flat = rasterize(&set, &spec).unwrap();
    let layers: Vec<_> = order.iter().map(|&k| render_layer(&set, k, &spec).unwrap()).collect();
    let refs: Vec<_> = layers.iter().collect();
    for layer in &layers {
        // untouched pixels stay fully transparent
        assert!(layer.data.chunks(4).all(|p| p[3] == 0 || p[3] == 255));
    }
    assert_eq!(composite(spec.width, spec.height, spec.background, &refs), flat);
}

fn unit_strategy() -> impl Strategy<Value = (u64, i64, u64)> {
    (2u64..400).prop_flat_map(|n| {
        let ws: Vec<u64> = units(n).collect();
        let cs = divisors(n);
        (Just(n), proptest::sample::select(ws), proptest::sample::select(cs))
            .prop_map(|(n, w, c)| (n, w as i64, c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn layers_composite_to_flat((n, w, c) in unit_strategy(), radius in 0.0f64..3.0, reversed: bool) {
        composite_matches(n, w, c, radius, reversed);
    }

    #[test]
    fn values_bounded_by_order((n, w, _c) in unit_strategy()) {
        let set = PeriodSet::compute(n, w, 1, ColoringMode::Standard).unwrap();
        let d = set.params.d() as f64;
        prop_assert!(set.values().all(|z| z.norm() <= d + 1e-9));
    }

    #[test]
    fn omega_may_be_negative_or_unreduced(n in 2u64..300, shift in -3i64..3) {
        let Some(w) = units(n).nth(1) else { return Ok(()) };
        let a = PeriodSet::compute(n, w as i64, 1, ColoringMode::Standard).unwrap();
        let b = PeriodSet::compute(n, w as i64 + shift * n as i64, 1, ColoringMode::Standard).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn subplot_containment_midsize((n, w, c) in unit_strategy().prop_filter("mid", |t| t.0 > 200)) {
        let set = PeriodSet::compute(n, w, c, ColoringMode::Standard).unwrap();
        prop_assert!(subplot_containment_check(&set));
    }
}

#[test]
fn order_divides_totient() {
    for n in 1..=400u64 {
        for w in units(n) {
            let d = multiplicative_order(w as i64, n).unwrap();
            assert_eq!(euler_totient(n) % d, 0);
            let params = PeriodParams::new(n, w as i64).unwrap();
            assert_eq!(params.d(), d);
        }
    }
}

#[test]
fn larger_prime_fills_more_of_the_image() {
    // at small epsilon the denser set covers a visibly larger share
    let map = LaurentMap::new(3).unwrap();
    let small = PeriodSet::compute(3019, 239, 1, ColoringMode::Standard).unwrap();
    let large = PeriodSet::compute(13063, 1347, 1, ColoringMode::Standard).unwrap();
    let a = coverage(&small, &map, 0.03, 1_000_000).unwrap();
    let b = coverage(&large, &map, 0.03, 1_000_000).unwrap();
    assert!(b.fraction_covered > a.fraction_covered + 0.2, "{} vs {}", a.fraction_covered, b.fraction_covered);
}
