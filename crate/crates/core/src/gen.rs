//! Seedable random instances for property checks and benchmarks.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::blocks::Block;
use crate::charts::{PlPath, SpectralChart};
use crate::kkcalc::Diagram;
use crate::num::{dot, integer_kernel, vadd, vscale, Int, IntMatrix, Rat};
use crate::spectra::Spectrum;

/// Interval block with `1 ≤ p ≤ max_p`, `k_j ∈ {1,2}` and multiplicities in `0..=max_entry`.
pub fn random_block<R: Rng + ?Sized>(rng: &mut R, max_p: usize, max_entry: i64) -> Block {
    let p = rng.gen_range(1..=max_p);
    random_block_with_p(rng, p, max_entry)
}

pub fn random_block_with_p<R: Rng + ?Sized>(rng: &mut R, p: usize, max_entry: i64) -> Block {
    loop {
        let k: Vec<Int> = (0..p).map(|_| Int::from(rng.gen_range(1..=2))).collect();
        let alpha: Vec<Int> = (0..p).map(|_| Int::from(rng.gen_range(0..=max_entry))).collect();
        let beta: Vec<Int> = (0..p).map(|_| Int::from(rng.gen_range(0..=max_entry))).collect();
        let n = dot(&alpha, &k);
        if let Ok(b) = Block::interval(k, n, alpha, beta) {
            return b;
        }
    }
}

/// Lattice of diagrams `A → B` as vectors `(λ₀ row-major, λ₁)`; with
/// `kill_unit`, restricted to `λ₀·k = 0`.
pub fn diagram_lattice(a: &Block, b: &Block, kill_unit: bool) -> Vec<Vec<Int>> {
    let (p, pt) = (a.p(), b.p());
    let width = p * pt + 1;
    let mut rows = Vec::new();
    let unit_row = |i: usize| -> Vec<Int> {
        let mut r = vec![Int::zero(); width];
        r[i] = Int::one();
        r
    };
    match (a.boundary(), b.boundary()) {
        (Some(delta), Some(dt)) => {
            for j in 0..p {
                let mut r = vec![Int::zero(); width];
                for i in 0..pt {
                    r[i * p + j] = dt[i].clone();
                }
                r[width - 1] = -delta[j].clone();
                rows.push(r);
            }
        }
        (None, Some(dt)) => {
            for j in 0..p {
                let mut r = vec![Int::zero(); width];
                for i in 0..pt {
                    r[i * p + j] = dt[i].clone();
                }
                rows.push(r);
            }
            rows.push(unit_row(width - 1));
        }
        (_, None) => rows.push(unit_row(width - 1)),
    }
    if kill_unit {
        for i in 0..pt {
            let mut r = vec![Int::zero(); width];
            for j in 0..p {
                r[i * p + j] = a.k()[j].clone();
            }
            rows.push(r);
        }
    }
    integer_kernel(&rows, width)
}

fn diagram_from_vector(a: &Block, b: &Block, v: &[Int]) -> Diagram {
    let p = a.p();
    let rows: Vec<Vec<Int>> = v[..v.len() - 1].chunks(p).map(<[Int]>::to_vec).collect();
    let lambda0 = IntMatrix::from_rows(rows, p).expect("rectangular");
    Diagram::new(a.clone(), b.clone(), lambda0, v[v.len() - 1].clone()).expect("lattice vectors are valid diagrams")
}

/// Random element of a lattice basis with coefficients in `[-coeff, coeff]`.
pub fn sample_lattice<R: Rng + ?Sized>(rng: &mut R, a: &Block, b: &Block, basis: &[Vec<Int>], coeff: i64) -> Diagram {
    let width = a.p() * b.p() + 1;
    let mut v = vec![Int::zero(); width];
    for g in basis {
        let c = Int::from(rng.gen_range(-coeff..=coeff));
        v = vadd(&v, &vscale(&c, g));
    }
    diagram_from_vector(a, b, &v)
}

pub fn random_diagram<R: Rng + ?Sized>(rng: &mut R, a: &Block, b: &Block, coeff: i64) -> Diagram {
    sample_lattice(rng, a, b, &diagram_lattice(a, b, false), coeff)
}

/// Element of `M(A,B)` with `μ` entries in `[-bound, bound]`.
pub fn random_m_element<R: Rng + ?Sized>(rng: &mut R, a: &Block, b: &Block, bound: i64) -> (Vec<Int>, Diagram) {
    let mu: Vec<Int> = (0..b.p()).map(|_| Int::from(rng.gen_range(-bound..=bound))).collect();
    let d = Diagram::from_mu(a, b, &mu).expect("mu diagram");
    (mu, d)
}

/// Spectrum with base entries in `0..=max_t` and up to `max_points` interior
/// points on the grid `1/denom`.
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, a: &Block, max_t: i64, max_points: usize, denom: i64) -> Spectrum {
    loop {
        let base: Vec<Int> = (0..a.p()).map(|_| Int::from(rng.gen_range(0..=max_t))).collect();
        let count = rng.gen_range(0..=max_points);
        let interior: Vec<Rat> =
            (0..count).map(|_| Rat::new(Int::from(rng.gen_range(1..denom)), Int::from(denom))).collect();
        if let Ok(s) = Spectrum::new(a.clone(), base, interior) {
            return s;
        }
    }
}

/// Pair of spectra with identical interiors and `t − s = c·(α − β)`, dense
/// enough that every window of `2` grid cells holds `|c|` points.
pub fn random_alignment_pair<R: Rng + ?Sized>(rng: &mut R, a: &Block, m: u64, c: i64) -> (Spectrum, Spectrum) {
    let delta = a.boundary().expect("interval block");
    let cc = Int::from(c);
    let sub = 5i64;
    loop {
        let reps = c.unsigned_abs() as usize + rng.gen_range(0..=1);
        let mut interior = Vec::new();
        for cell in 0..m as i64 {
            for _ in 0..reps {
                let num = cell * sub + rng.gen_range(1..sub);
                interior.push(Rat::new(Int::from(num), Int::from(m as i64 * sub)));
            }
        }
        let s: Vec<Int> = delta.iter().map(|d| Int::from(rng.gen_range(0..=2)) + (&cc * d).abs()).collect();
        let t = vadd(&s, &vscale(&cc, &delta));
        // Both sides are empty only when c = 0 and nothing was drawn.
        if let (Ok(s1), Ok(s2)) =
            (Spectrum::new(a.clone(), t, interior.clone()), Spectrum::new(a.clone(), s, interior))
        {
            return (s1, s2);
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChartParams {
    pub max_moving: usize,
    pub max_shared_points: usize,
    pub max_t: i64,
    /// Grid for path values.
    pub denom: i64,
    /// All branches constant.
    pub flat: bool,
    /// No base multiplicities anywhere and branch values in `(0,1)`.
    pub interior_only: bool,
}

impl Default for ChartParams {
    fn default() -> Self {
        ChartParams { max_moving: 2, max_shared_points: 2, max_t: 1, denom: 12, flat: false, interior_only: false }
    }
}

fn random_value<R: Rng + ?Sized>(rng: &mut R, denom: i64, interior_only: bool) -> Rat {
    let lo = if interior_only { 1 } else { 0 };
    let hi = if interior_only { denom - 1 } else { denom };
    Rat::new(Int::from(rng.gen_range(lo..=hi)), Int::from(denom))
}

fn random_path<R: Rng + ?Sized>(rng: &mut R, params: &ChartParams) -> PlPath {
    if params.flat {
        return PlPath::constant(random_value(rng, params.denom, params.interior_only));
    }
    let mut xs: Vec<i64> = (1..params.denom).collect();
    xs.shuffle(rng);
    let inner = rng.gen_range(0..=2usize);
    let mut cuts: Vec<i64> = xs.into_iter().take(inner).collect();
    cuts.sort_unstable();
    let mut points = vec![(Rat::zero(), random_value(rng, params.denom, params.interior_only))];
    for x in cuts {
        points.push((Rat::new(Int::from(x), Int::from(params.denom)), random_value(rng, params.denom, params.interior_only)));
    }
    points.push((Rat::one(), random_value(rng, params.denom, params.interior_only)));
    PlPath::new(points).expect("well-formed path")
}

/// A chart out of `a` together with a target built to fit it: the fibers
/// over the two endpoints become the first two base fibers, and a shared
/// constant part (present at both ends with multiplicity `w`) the third.
pub fn random_chart<R: Rng + ?Sized>(rng: &mut R, a: &Block, params: &ChartParams) -> SpectralChart {
    let n = a.n().expect("interval source").clone();
    let alpha = a.alpha().expect("interval source").to_vec();
    let beta = a.beta().expect("interval source").to_vec();
    let max_t = if params.interior_only { 0 } else { params.max_t };
    loop {
        let moving_count = rng.gen_range(0..=params.max_moving);
        let moving: Vec<PlPath> = (0..moving_count).map(|_| random_path(rng, params)).collect();
        let t_moving: Vec<Int> = (0..a.p()).map(|_| Int::from(rng.gen_range(0..=max_t))).collect();
        let moving_dim = dot(&t_moving, a.k()) + &n * Int::from(moving_count);
        if moving_dim.is_zero() {
            continue;
        }
        let endpoint_fiber = |x: Rat| -> Spectrum {
            let mut base = t_moving.clone();
            let mut interior = Vec::new();
            for p in &moving {
                let y = p.eval(&x);
                if y.is_zero() {
                    base = vadd(&base, &alpha);
                } else if y.is_one() {
                    base = vadd(&base, &beta);
                } else {
                    interior.push(y);
                }
            }
            Spectrum::new(a.clone(), base, interior).expect("positive dimension")
        };
        let s0 = endpoint_fiber(Rat::zero());
        let s1 = endpoint_fiber(Rat::one());
        let shared = rng.gen_bool(0.7);
        let (target, base_fibers, t, paths) = if shared {
            let weight = Int::from(rng.gen_range(1..=2));
            let s3 = if params.interior_only {
                let count = rng.gen_range(1..=params.max_shared_points.max(1));
                let pts = (0..count).map(|_| random_value(rng, params.denom, true)).collect();
                Spectrum::new(a.clone(), vec![Int::zero(); a.p()], pts).expect("nonempty")
            } else {
                random_spectrum(rng, a, params.max_t.max(1), params.max_shared_points, params.denom)
            };
            let k_t = vec![s0.dimension(), s1.dimension(), s3.dimension()];
            let nt = s0.dimension() + &weight * s3.dimension();
            let alpha_t = vec![Int::one(), Int::zero(), weight.clone()];
            let beta_t = vec![Int::zero(), Int::one(), weight.clone()];
            let target = Block::interval(k_t, nt, alpha_t, beta_t).expect("fitted target");
            let t = vadd(&t_moving, &vscale(&weight, s3.base()));
            let mut paths = moving.clone();
            let reps = weight.to_usize().expect("small weight");
            for y in s3.interior() {
                paths.extend(std::iter::repeat_n(PlPath::constant(y.clone()), reps));
            }
            (target, vec![s0, s1, s3], t, paths)
        } else {
            let k_t = vec![s0.dimension(), s1.dimension()];
            let nt = s0.dimension();
            let target = Block::interval(k_t, nt, vec![Int::one(), Int::zero()], vec![Int::zero(), Int::one()])
                .expect("fitted target");
            (target, vec![s0, s1], t_moving.clone(), moving.clone())
        };
        return SpectralChart::new(a.clone(), target, base_fibers, t, paths).expect("fitted chart is valid");
    }
}
