//! Orbits of `k -> omega * k` on `Z/nZ`, their Gaussian period values, color
//! classes, and the structural identities the point sets satisfy.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::grid::PointGrid;
use crate::numtheory::{gcd, mul_mod, order_of_unit, reduce};
use crate::roots::unit_root;
use crate::sum::ComplexSum;
use crate::{Error, Result};

/// Default size cap on `n`.
pub const DEFAULT_MAX_N: u64 = 1 << 31;

/// Validated modulus and generator with the generator's cached order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeriodParams {
    n: u64,
    omega: u64,
    d: u64,
}

impl PeriodParams {
    /// Validates with the default size cap.
    pub fn new(n: u64, omega: i64) -> Result<Self> {
        Self::with_cap(n, omega, DEFAULT_MAX_N)
    }

    pub fn with_cap(n: u64, omega: i64, max_n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotPositive { what: "n" });
        }
        if n > max_n {
            return Err(Error::TooLarge { n, max: max_n });
        }
        let w = reduce(omega, n);
        if gcd(w, n) != 1 {
            return Err(Error::NotCoprime { omega, n });
        }
        Ok(Self {
            n,
            omega: w,
            d: order_of_unit(w, n),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Generator reduced into `[0, n)`.
    pub fn omega(&self) -> u64 {
        self.omega
    }

    /// Multiplicative order of the generator.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// Same generator on the modulus `m`, which must divide `n`.
    pub fn restrict(&self, m: u64) -> Self {
        debug_assert!(m > 0 && self.n % m == 0);
        let w = self.omega % m;
        Self {
            n: m,
            omega: w,
            d: order_of_unit(w, m),
        }
    }
}

/// `eta(n, omega, k)` by the definitional sum over `j = 0..d`, compensated.
pub fn period_value(params: &PeriodParams, k: i64) -> Complex64 {
    let n = params.n;
    let mut m = reduce(k, n);
    let mut acc = ComplexSum::new();
    for _ in 0..params.d {
        acc.add(unit_root(m, n));
        m = mul_mod(m, params.omega, n);
    }
    acc.value()
}

/// One orbit before coloring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit {
    /// Smallest element.
    pub rep: u64,
    pub size: u64,
    pub value: Complex64,
}

/// Orbit layout of `Z/nZ`: `(rep, size)` pairs ascending by representative.
///
/// One sequential sweep with a visited bitmap; integer work only.
pub fn orbit_layout(params: &PeriodParams) -> Vec<(u64, u64)> {
    let n = params.n;
    let w = params.omega;
    let mut visited = vec![0u64; (n as usize).div_ceil(64)];
    let mut out = Vec::new();
    for start in 0..n {
        let (word, bit) = ((start / 64) as usize, start % 64);
        if visited[word] >> bit & 1 == 1 {
            continue;
        }
        let mut size = 0u64;
        let mut m = start;
        loop {
            visited[(m / 64) as usize] |= 1 << (m % 64);
            size += 1;
            m = mul_mod(m, w, n);
            if m == start {
                break;
            }
        }
        out.push((start, size));
    }
    out
}

/// Value of the orbit starting at `rep`: `(d / size) * sum_{m in orbit} zeta^m`,
/// summed in traversal order from `rep`.
pub fn orbit_value(params: &PeriodParams, rep: u64, size: u64) -> Complex64 {
    let n = params.n;
    let mut acc = ComplexSum::new();
    let mut m = rep;
    for _ in 0..size {
        acc.add(unit_root(m, n));
        m = mul_mod(m, params.omega, n);
    }
    acc.value() * (params.d / size) as f64
}

/// Uncolored orbits with their values. Coloring is cheap and done separately,
/// so one table serves every choice of `c` and coloring mode.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTable {
    pub params: PeriodParams,
    pub orbits: Vec<Orbit>,
}

impl OrbitTable {
    pub fn compute(params: &PeriodParams) -> Self {
        let orbits = orbit_layout(params)
            .into_iter()
            .map(|(rep, size)| Orbit {
                rep,
                size,
                value: orbit_value(params, rep, size),
            })
            .collect();
        Self {
            params: *params,
            orbits,
        }
    }

    /// Assembles a table from orbits computed elsewhere (e.g. in parallel).
    /// Orbits must follow [`orbit_layout`] order.
    pub fn from_parts(params: PeriodParams, orbits: Vec<Orbit>) -> Self {
        Self { params, orbits }
    }

    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.orbits.iter().map(|o| o.value)
    }

    /// Approximate heap footprint.
    pub fn size_bytes(&self) -> usize {
        core::mem::size_of::<Self>() + self.orbits.len() * core::mem::size_of::<Orbit>()
    }

    pub fn colorize(&self, c: u64, mode: ColoringMode) -> Result<PeriodSet> {
        let classing = color_classes(self.params.n, self.params.omega as i64, c, mode)?;
        let orbits = self
            .orbits
            .iter()
            .map(|o| OrbitRecord {
                rep: o.rep,
                size: o.size,
                value: o.value,
                color_class: classing.class_of(o.rep),
            })
            .collect();
        Ok(PeriodSet {
            params: self.params,
            c,
            mode,
            class_count: classing.class_count,
            orbits,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ColoringMode {
    /// Residues `r` and `r * omega` mod `c` share a color.
    #[default]
    Standard,
    /// Additionally `r` and `-r` share a color, mirroring colors across the
    /// real axis.
    PeriodSquared,
}

/// Partition of `Z/cZ` into color classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorClassing {
    pub c: u64,
    pub mode: ColoringMode,
    class_of: Vec<u32>,
    pub class_count: usize,
}

impl ColorClassing {
    /// Class of the residue `k mod c`.
    #[inline]
    pub fn class_of(&self, k: u64) -> u32 {
        self.class_of[(k % self.c) as usize]
    }

    /// Residues of each class, each list ascending.
    pub fn classes(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (r, &id) in self.class_of.iter().enumerate() {
            out[id as usize].push(r as u64);
        }
        out
    }
}

/// Color classes: orbits of multiplication by `omega` on `Z/cZ` (merged under
/// negation in period-squared mode), numbered by increasing minimal residue.
pub fn color_classes(n: u64, omega: i64, c: u64, mode: ColoringMode) -> Result<ColorClassing> {
    if n == 0 {
        return Err(Error::NotPositive { what: "n" });
    }
    if c == 0 || n % c != 0 {
        return Err(Error::NotDivisor { c, n });
    }
    let w_n = reduce(omega, n);
    if gcd(w_n, n) != 1 {
        return Err(Error::NotCoprime { omega, n });
    }
    let w = w_n % c;
    const UNSET: u32 = u32::MAX;
    let mut class_of = vec![UNSET; c as usize];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..c {
        if class_of[start as usize] != UNSET {
            continue;
        }
        class_of[start as usize] = next;
        stack.push(start);
        while let Some(r) = stack.pop() {
            let mut neighbours = [mul_mod(r, w, c), u64::MAX];
            if mode == ColoringMode::PeriodSquared {
                neighbours[1] = (c - r) % c;
            }
            for s in neighbours {
                if s != u64::MAX && class_of[s as usize] == UNSET {
                    class_of[s as usize] = next;
                    stack.push(s);
                }
            }
        }
        next += 1;
    }
    Ok(ColorClassing {
        c,
        mode,
        class_of,
        class_count: next as usize,
    })
}

/// One colored orbit of `G(n, omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitRecord {
    pub rep: u64,
    pub size: u64,
    pub value: Complex64,
    pub color_class: u32,
}

/// All orbits of `<omega>` on `Z/nZ` with their values and colors.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSet {
    pub params: PeriodParams,
    pub c: u64,
    pub mode: ColoringMode,
    pub class_count: usize,
    /// Ascending by representative.
    pub orbits: Vec<OrbitRecord>,
}

impl PeriodSet {
    /// Validates the inputs (default size cap) and computes the colored set.
    pub fn compute(n: u64, omega: i64, c: u64, mode: ColoringMode) -> Result<Self> {
        compute_period_set(&PeriodParams::new(n, omega)?, c, mode)
    }

    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.orbits.iter().map(|o| o.value)
    }

    /// Points as `(value, class)` for the rasterizer.
    pub fn colored_points(&self) -> Vec<(Complex64, u32)> {
        self.orbits.iter().map(|o| (o.value, o.color_class)).collect()
    }
}

pub fn compute_period_set(params: &PeriodParams, c: u64, mode: ColoringMode) -> Result<PeriodSet> {
    // validate coloring before the expensive part
    color_classes(params.n, params.omega as i64, c, mode)?;
    OrbitTable::compute(params).colorize(c, mode)
}

/// Tolerance used by [`rescale_identity_check`].
pub const RESCALE_TOL: f64 = 1e-8;

/// Checks `eta(n, omega, k) = m * eta(n/g, omega, k/g)` with `g = gcd(n, k)` and
/// `m = ord_n(omega) / ord_{n/g}(omega)`. Returns `(m, holds)`.
pub fn rescale_identity_check(params: &PeriodParams, k: u64) -> (u64, bool) {
    let k = k % params.n;
    let g = gcd(params.n, k);
    let small = params.restrict(params.n / g);
    let multiplier = params.d / small.d;
    let lhs = period_value(params, k as i64);
    let rhs = period_value(&small, (k / g) as i64) * multiplier as f64;
    (multiplier, (lhs - rhs).norm() < RESCALE_TOL)
}

/// Matching tolerance for containment checks.
pub const CONTAINMENT_TOL: f64 = 1e-8;

/// Whether `ord_n / ord_{n/c}` times `G(n/c, omega)` sits inside `G(n, omega)`
/// with every scaled point matched by a point of one common color class.
pub fn subplot_containment_check(set: &PeriodSet) -> bool {
    let c = set.c;
    let small = OrbitTable::compute(&set.params.restrict(set.params.n / c));
    subplot_containment_against(set, &small)
}

/// As [`subplot_containment_check`] with a precomputed table for `G(n/c, omega)`.
pub fn subplot_containment_against(set: &PeriodSet, small: &OrbitTable) -> bool {
    assert_eq!(small.params.n * set.c, set.params.n);
    let factor = (set.params.d / small.params.d) as f64;
    let grid = PointGrid::new(set.values().collect(), cell_for(set.values(), CONTAINMENT_TOL));
    // classes that match every scaled point so far
    let mut common: Option<Vec<u32>> = None;
    for z in small.values() {
        let mut here = Vec::new();
        grid.for_each_within(z * factor, CONTAINMENT_TOL, |i, _| {
            here.push(set.orbits[i].color_class)
        });
        here.sort_unstable();
        here.dedup();
        let next = match common {
            None => here,
            Some(prev) => prev.into_iter().filter(|c| here.binary_search(c).is_ok()).collect(),
        };
        if next.is_empty() {
            return false;
        }
        common = Some(next);
    }
    true
}

/// `gcd(omega - 1, n)`: guaranteed order of rotational symmetry.
pub fn dihedral_order(params: &PeriodParams) -> u64 {
    gcd((params.omega + params.n - 1) % params.n, params.n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DihedralReport {
    pub fold: u64,
    pub holds: bool,
    /// Largest distance from a transformed point to its nearest original.
    pub max_mismatch: f64,
}

/// Checks that the multiset of period values is invariant under rotation by
/// `2 pi / fold` and under complex conjugation, within `tol`. Colors are
/// ignored.
pub fn verify_dihedral(set: &PeriodSet, fold: u64, tol: f64) -> DihedralReport {
    assert!(fold >= 1, "fold must be positive");
    let values: Vec<Complex64> = set.values().collect();
    let grid = PointGrid::new(values.clone(), cell_for(values.iter().copied(), tol));
    let rotation = Complex64::from_polar(1.0, TAU / fold as f64);
    let transforms: [&dyn Fn(Complex64) -> Complex64; 2] =
        [&|z: Complex64| z * rotation, &|z: Complex64| z.conj()];

    let mut holds = true;
    let mut max_mismatch = 0.0f64;
    for transform in transforms {
        let image: Vec<Complex64> = values.iter().map(|&z| transform(z)).collect();
        let image_grid = PointGrid::new(image.clone(), grid.cell());
        for &z in &image {
            let Some((_, dist)) = grid.nearest(z) else {
                continue;
            };
            max_mismatch = max_mismatch.max(dist);
            // multiplicities must agree around every image point
            if dist > tol || grid.count_within(z, tol) != image_grid.count_within(z, tol) {
                holds = false;
            }
        }
    }
    DihedralReport {
        fold,
        holds,
        max_mismatch,
    }
}

/// Cell size for matching: at least `tol`, and coarse enough that a typical
/// cell holds a few points.
fn cell_for(values: impl Iterator<Item = Complex64>, tol: f64) -> f64 {
    let (mut count, mut extent) = (0usize, 0.0f64);
    for z in values {
        count += 1;
        extent = extent.max(z.re.abs()).max(z.im.abs());
    }
    let typical = 2.0 * extent.max(1.0) / libm::sqrt(count.max(1) as f64);
    typical.max(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Definitional double loop with std trig, independent of `unit_root`.
    fn oracle(n: u64, w: u64, k: u64) -> Complex64 {
        let mut d = 1;
        let mut x = w % n;
        while n > 1 && x != 1 {
            x = x * w % n;
            d += 1;
        }
        let mut acc = c(0.0, 0.0);
        let mut m = k % n;
        for _ in 0..d {
            let t = core::f64::consts::TAU * m as f64 / n as f64;
            acc += c(t.cos(), t.sin());
            m = m * w % n;
        }
        acc
    }

    #[test]
    fn params_validation() {
        assert_eq!(
            PeriodParams::new(12, 4),
            Err(Error::NotCoprime { omega: 4, n: 12 })
        );
        assert_eq!(
            PeriodParams::with_cap(100, 1, 50),
            Err(Error::TooLarge { n: 100, max: 50 })
        );
        assert!(PeriodParams::new(0, 1).is_err());
        let p = PeriodParams::new(12, -7).unwrap();
        assert_eq!((p.omega(), p.d()), (5, 2));
        let one = PeriodParams::new(1, 1).unwrap();
        assert_eq!(one.d(), 1);
    }

    #[test]
    fn period_value_examples() {
        let p = PeriodParams::new(12, 5).unwrap();
        assert!(close(period_value(&p, 3), c(0.0, 2.0), 1e-12));
        let p = PeriodParams::new(27, 2).unwrap();
        assert!(close(period_value(&p, 0), c(18.0, 0.0), 1e-12));
        assert!(close(period_value(&p, 9), c(-9.0, 0.0), 1e-12));
        assert!(close(period_value(&p, 9), oracle(27, 2, 9), 1e-12));
        let p = PeriodParams::new(4, 5).unwrap();
        assert!(close(period_value(&p, 1), c(0.0, 1.0), 1e-12));
    }

    #[test]
    fn twenty_seven_orbits() {
        let set = PeriodSet::compute(27, 2, 9, ColoringMode::Standard).unwrap();
        let reps: Vec<u64> = set.orbits.iter().map(|o| o.rep).collect();
        let sizes: Vec<u64> = set.orbits.iter().map(|o| o.size).collect();
        assert_eq!(reps, [0, 1, 3, 9]);
        assert_eq!(sizes, [1, 18, 6, 2]);
        let want = [c(18.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-9.0, 0.0)];
        for (o, w) in set.orbits.iter().zip(want) {
            assert!(close(o.value, w, 1e-12), "{o:?}");
        }
        assert_eq!(set.orbits[0].color_class, set.orbits[3].color_class);
        assert_eq!(set.class_count, 3);
    }

    #[test]
    fn g45_is_the_square() {
        let set = PeriodSet::compute(4, 5, 1, ColoringMode::Standard).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        assert_eq!(set.orbits.len(), 4);
        for (o, w) in set.orbits.iter().zip(want) {
            assert!(close(o.value, w, 1e-12));
        }
        assert_eq!(set.class_count, 1);
    }

    #[test]
    fn trivial_modulus() {
        let set = PeriodSet::compute(1, 1, 1, ColoringMode::Standard).unwrap();
        assert_eq!(set.orbits.len(), 1);
        assert_eq!(set.orbits[0].rep, 0);
        assert!(close(set.orbits[0].value, c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn compute_errors() {
        assert_eq!(
            PeriodSet::compute(12, 5, 5, ColoringMode::Standard),
            Err(Error::NotDivisor { c: 5, n: 12 })
        );
        assert_eq!(
            PeriodSet::compute(12, 4, 1, ColoringMode::Standard),
            Err(Error::NotCoprime { omega: 4, n: 12 })
        );
        assert!(matches!(
            PeriodSet::compute(DEFAULT_MAX_N + 1, 1, 1, ColoringMode::Standard),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn color_class_examples() {
        let cl = color_classes(27, 2, 9, ColoringMode::Standard).unwrap();
        assert_eq!(
            cl.classes(),
            [vec![0], vec![1, 2, 4, 5, 7, 8], vec![3, 6]]
        );
        let cl = color_classes(12, 5, 3, ColoringMode::Standard).unwrap();
        assert_eq!(cl.classes(), [vec![0], vec![1, 2]]);
        let cl = color_classes(12, 5, 1, ColoringMode::Standard).unwrap();
        assert_eq!(cl.class_count, 1);
        // c = n: each orbit of <5> on Z/12Z
        let cl = color_classes(12, 5, 12, ColoringMode::Standard).unwrap();
        assert_eq!(cl.class_count, 8);
        assert_eq!(
            color_classes(12, 5, 0, ColoringMode::Standard),
            Err(Error::NotDivisor { c: 0, n: 12 })
        );
    }

    #[test]
    fn period_squared_merges_negatives() {
        // omega = 1 on Z/5Z: standard gives 5 singleton classes
        let std_cl = color_classes(5, 1, 5, ColoringMode::Standard).unwrap();
        assert_eq!(std_cl.class_count, 5);
        let sq = color_classes(5, 1, 5, ColoringMode::PeriodSquared).unwrap();
        assert_eq!(sq.classes(), [vec![0], vec![1, 4], vec![2, 3]]);
        for r in 0..5 {
            assert_eq!(sq.class_of(r), sq.class_of((5 - r) % 5));
        }
    }

    #[test]
    fn rescale_examples() {
        let p = PeriodParams::new(12, 5).unwrap();
        assert_eq!(rescale_identity_check(&p, 3), (2, true));
        let p = PeriodParams::new(27, 2).unwrap();
        assert_eq!(rescale_identity_check(&p, 9), (9, true));
        let p = PeriodParams::new(35, 2).unwrap();
        assert_eq!(rescale_identity_check(&p, 4), (1, true));
    }

    #[test]
    fn twelve_multiples_of_three() {
        // eta(12, 5, 3k) = 2 exp(2 pi i k / 4)
        let p = PeriodParams::new(12, 5).unwrap();
        for k in 0..4u64 {
            let want = unit_root(k, 4) * 2.0;
            assert!(close(period_value(&p, 3 * k as i64), want, 1e-12));
        }
    }

    #[test]
    fn containment_examples() {
        for (n, w, cc) in [(12u64, 5i64, 3u64), (12, 5, 1), (27, 2, 9), (12, 5, 4)] {
            let set = PeriodSet::compute(n, w, cc, ColoringMode::Standard).unwrap();
            assert!(subplot_containment_check(&set), "({n},{w},{cc})");
        }
    }

    #[test]
    fn containment_detects_wrong_factor() {
        let set = PeriodSet::compute(12, 5, 3, ColoringMode::Standard).unwrap();
        let mut small = OrbitTable::compute(&PeriodParams::new(4, 5).unwrap());
        for o in &mut small.orbits {
            o.value *= 1.5;
        }
        assert!(!subplot_containment_against(&set, &small));
    }

    #[test]
    fn dihedral_examples() {
        let p = PeriodParams::new(29070, 1189).unwrap();
        assert_eq!(dihedral_order(&p), 18);
        let p = PeriodParams::new(255255, 254).unwrap();
        assert_eq!(dihedral_order(&p), 11);
        let p = PeriodParams::new(17, 1).unwrap();
        assert_eq!(dihedral_order(&p), 17);
        let p = PeriodParams::new(1, 0).unwrap();
        assert_eq!(dihedral_order(&p), 1);

        let set = PeriodSet::compute(4, 5, 1, ColoringMode::Standard).unwrap();
        let r = verify_dihedral(&set, 4, 1e-12);
        assert!(r.holds && r.max_mismatch < 1e-12);
        assert!(verify_dihedral(&set, 1, 1e-12).holds);
        // the square has no 8-fold symmetry
        assert!(!verify_dihedral(&set, 8, 1e-9).holds);
    }

    #[test]
    fn dihedral_rejects_multiplicity_mismatch() {
        // {1, 1, -1} is invariant as a set under rotation by pi but not as a multiset
        let mut set = PeriodSet::compute(2, 1, 1, ColoringMode::Standard).unwrap();
        let extra = set.orbits[0];
        set.orbits.push(extra);
        assert!(!verify_dihedral(&set, 2, 1e-9).holds);
    }

    #[test]
    fn oracle_agreement_small() {
        for n in 1..=60u64 {
            for w in 0..n.max(1) {
                if gcd(w, n) != 1 {
                    continue;
                }
                let set = PeriodSet::compute(n, w as i64, 1, ColoringMode::Standard).unwrap();
                assert_eq!(set.orbits.iter().map(|o| o.size).sum::<u64>(), n);
                for o in &set.orbits {
                    assert_eq!(set.params.d() % o.size, 0);
                    assert!(close(o.value, oracle(n, w, o.rep), 1e-10));
                }
            }
        }
    }
}
