//! The d-differentials `Phi_j = prod_i (z_j - a_ji)^{k_i} (dz_j)^d` on the local family,
//! their twisted ratios, and the worked codimension-two example.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::family::chart::{
    curve_point, marked_point_coords, random_rational, Coord, LocalChart, MAX_RETRIES,
};
use crate::marks::Marks;
use crate::strata::{exponent_vector, ExponentVector, Signature, StableTree};
use crate::Rational;

/// Coefficient of `(dz_j)^d` at a point, in the coordinate of line `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionValue {
    pub vertex: usize,
    pub value: Rational,
}

fn pow(base: &Rational, e: i64) -> Rational {
    base.pow(e as i32)
}

fn sign_pow(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `prod_i (z_j - a_ji)^{k_i}` at the curve point `point`; markings at infinity on line `j`
/// contribute no factor.
pub fn evaluate_phi(chart: &LocalChart, j: usize, point: &[Rational]) -> Result<SectionValue> {
    let sig = chart.signature();
    let zj = &point[j];
    let mut value = Rational::one();
    for i in 1..=sig.n() {
        let k = sig.k(i);
        if k == 0 {
            continue;
        }
        let coords = marked_point_coords(chart, i)?;
        let Coord::Finite(a) = &coords[j] else {
            continue;
        };
        let base = zj - a;
        if base.is_zero() {
            return Err(Error::PoleHit(format!("z_{j} = {zj} meets marking {i}")));
        }
        value *= pow(&base, k);
    }
    Ok(SectionValue { vertex: j, value })
}

/// `t^beta` for the chart's smoothing parameters.
pub fn t_monomial(chart: &LocalChart, beta: &ExponentVector) -> Rational {
    chart
        .params()
        .iter()
        .zip(beta.entries())
        .fold(Rational::one(), |acc, (t, &b)| {
            if b == 0 {
                acc
            } else {
                acc * t.pow(b as i32)
            }
        })
}

/// `dz_j / dz_k` along the curve at `point`, by the chain rule over the path from `j` to `k`.
pub fn jacobian(chart: &LocalChart, j: usize, k: usize, point: &[Rational]) -> Result<Rational> {
    let path = chart.path(j, k);
    let mut out = Rational::one();
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        // z_a = b_ab + t / (z_b - b_ba)
        let den = &point[b] - chart.node(b, a)?;
        if den.is_zero() {
            return Err(Error::DenominatorVanishes(format!(
                "z_{b} at node b_{b}{a}"
            )));
        }
        let t = chart.param(a, b)?;
        out *= -(t / (&den * &den));
    }
    Ok(out)
}

/// The twisted section `t^{beta_j} Phi_j` at `point`, written in the coordinate of line `k`:
/// `t^{beta_j} phi_j (dz_j/dz_k)^d`.
pub fn twisted_section_in(
    chart: &LocalChart,
    j: usize,
    k: usize,
    point: &[Rational],
) -> Result<Rational> {
    let beta = exponent_vector(chart.tree(), j, chart.signature());
    let phi = evaluate_phi(chart, j, point)?.value;
    let jac = jacobian(chart, j, k, point)?;
    Ok(t_monomial(chart, &beta) * phi * jac.pow(chart.signature().d() as i32))
}

/// Closed form of `f_jk = t^{beta_j} Phi_j / (t^{beta_k} Phi_k)` for adjacent `j, k`:
/// `(-1)^d prod_{i on j's side} (a_ji - b_jk)^{k_i} / prod_{i on k's side} (a_ki - b_kj)^{k_i}`.
/// A marking at infinity contributes `(-1)^{k_i}`.
pub fn ratio_constant(chart: &LocalChart, j: usize, k: usize) -> Result<Rational> {
    let sig = chart.signature();
    let tree = chart.tree();
    let j_side = tree.branch_marks(k, j)?;
    let mut out = sign_pow(sig.d());
    for i in 1..=sig.n() {
        let ki = sig.k(i);
        if ki == 0 {
            continue;
        }
        let coords = marked_point_coords(chart, i)?;
        let (v, other, num) = if j_side.contains(i) {
            (j, k, true)
        } else {
            (k, j, false)
        };
        let factor = match &coords[v] {
            Coord::Infinity => sign_pow(ki),
            Coord::Finite(a) => {
                let base = a - chart.node(v, other)?;
                if base.is_zero() {
                    return Err(Error::DenominatorVanishes(format!(
                        "marking {i} sits on node b_{v}{other}"
                    )));
                }
                pow(&base, ki)
            }
        };
        if num {
            out *= factor;
        } else {
            out /= factor;
        }
    }
    Ok(out)
}

/// Product of the adjacent ratio constants along the path from `j` to `k`.
pub fn path_ratio_constant(chart: &LocalChart, j: usize, k: usize) -> Result<Rational> {
    let path = chart.path(j, k);
    let mut out = Rational::one();
    for w in path.windows(2) {
        out *= ratio_constant(chart, w[0], w[1])?;
    }
    Ok(out)
}

/// The sampled ratio `t^{beta_j} Phi_j / (t^{beta_k} Phi_k)` at `point`.
pub fn sampled_ratio(
    chart: &LocalChart,
    j: usize,
    k: usize,
    point: &[Rational],
) -> Result<Rational> {
    let num = twisted_section_in(chart, j, k, point)?;
    let den = twisted_section_in(chart, k, k, point)?;
    if den.is_zero() {
        return Err(Error::PoleHit(format!(
            "section {k} vanishes at the sample"
        )));
    }
    Ok(num / den)
}

/// A random point of a smooth fiber, resampled on poles and vanishing denominators.
pub fn random_point<R: Rng>(chart: &LocalChart, base: usize, rng: &mut R) -> Result<Vec<Rational>> {
    for _ in 0..MAX_RETRIES {
        match curve_point(chart, base, random_rational(rng)) {
            Ok(p) => return Ok(p),
            Err(Error::DenominatorVanishes(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingExhausted(MAX_RETRIES))
}

/// Check `t^{beta_j} Phi_j = f_jk t^{beta_k} Phi_k` exactly at `samples` random points of
/// the fiber. Requires every smoothing parameter to be nonzero.
pub fn verify_ratio_identity<R: Rng>(
    chart: &LocalChart,
    j: usize,
    k: usize,
    samples: usize,
    rng: &mut R,
) -> Result<bool> {
    if j == k {
        return Ok(true);
    }
    if !chart.is_smooth_fiber() {
        return Err(Error::InvalidChart(
            "ratio checks need every t nonzero".into(),
        ));
    }
    let f = path_ratio_constant(chart, j, k)?;
    for _ in 0..samples {
        let mut done = false;
        for _ in 0..MAX_RETRIES {
            let point = random_point(chart, j, rng)?;
            match sampled_ratio(chart, j, k, &point) {
                Ok(r) => {
                    if r != f {
                        return Ok(false);
                    }
                    done = true;
                    break;
                }
                Err(Error::PoleHit(_)) | Err(Error::DenominatorVanishes(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if !done {
            return Err(Error::SamplingExhausted(MAX_RETRIES));
        }
    }
    Ok(true)
}

/// The three regimes of the codimension-two example.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Codim2Case {
    /// `nu_1 <= 0` and `nu_2 <= 0`: the central component carries the limit.
    A,
    /// Mixed signs: an outer component carries the limit.
    B,
    /// `nu_1 >= 0` and `nu_2 >= 0` (not both zero): every twisted section vanishes on the
    /// central fiber.
    C,
}

impl fmt::Display for Codim2Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Codim2Case::A => "a",
            Codim2Case::B => "b",
            Codim2Case::C => "c",
        };
        write!(f, "{s}")
    }
}

fn check_chain_blocks(sig: &Signature, blocks: &[Marks; 3]) -> Result<()> {
    let n = sig.n();
    let [b0, b1, b2] = *blocks;
    if !b0.is_disjoint(b1)
        || !b0.is_disjoint(b2)
        || !b1.is_disjoint(b2)
        || (b0 | b1 | b2) != Marks::full(n)
    {
        return Err(Error::BadBlocks(format!(
            "{b0}, {b1}, {b2} do not partition 1..{n}"
        )));
    }
    if b0.is_empty() || b1.len() < 2 || b2.len() < 2 {
        return Err(Error::BadBlocks(
            "need |I0| >= 1, |I1| >= 2, |I2| >= 2".into(),
        ));
    }
    Ok(())
}

/// `(nu_1, nu_2) = (-d - k(I1), -d - k(I2))` for a chain `I1 - I0 - I2`.
pub fn codim2_nu(sig: &Signature, blocks: &[Marks; 3]) -> Result<(i64, i64)> {
    check_chain_blocks(sig, blocks)?;
    Ok((
        -sig.d() - sig.k_sum(blocks[1]),
        -sig.d() - sig.k_sum(blocks[2]),
    ))
}

pub fn classify_codim2_case(sig: &Signature, blocks: &[Marks; 3]) -> Result<Codim2Case> {
    let (nu1, nu2) = codim2_nu(sig, blocks)?;
    Ok(if nu1 <= 0 && nu2 <= 0 {
        Codim2Case::A
    } else if nu1 >= 0 && nu2 >= 0 {
        Codim2Case::C
    } else {
        Codim2Case::B
    })
}

/// The chain tree with vertex 0 carrying `I0`, edges `{0,1}` and `{0,2}`.
pub fn codim2_tree(sig: &Signature, blocks: &[Marks; 3]) -> Result<StableTree> {
    check_chain_blocks(sig, blocks)?;
    StableTree::new(sig.n(), blocks.to_vec(), vec![(0, 1), (0, 2)])
}

/// The normalized chart `xy = t1`, `(x - 1) z = t2`: nodes at 0 and 1 on the central line,
/// at 0 on the outer lines. With `pin_markings`, the last marking of `I0` sits at infinity
/// and the last two of `I1` and of `I2` at 1 and infinity; the remaining markings are random.
pub fn codim2_chart<R: Rng>(
    sig: &Signature,
    blocks: &[Marks; 3],
    t1: Rational,
    t2: Rational,
    pin_markings: bool,
    rng: &mut R,
) -> Result<LocalChart> {
    let tree = codim2_tree(sig, blocks)?;
    let zero = Rational::zero;
    let nodes = vec![(zero(), zero()), (Rational::one(), zero())];
    for _ in 0..MAX_RETRIES {
        let mut home: Vec<Coord> = (0..sig.n())
            .map(|_| Coord::Finite(random_rational(rng)))
            .collect();
        if pin_markings {
            let last = |b: Marks, back: usize| b.to_vec()[b.len() - 1 - back];
            home[last(blocks[0], 0) - 1] = Coord::Infinity;
            for b in &blocks[1..] {
                home[last(*b, 0) - 1] = Coord::Infinity;
                home[last(*b, 1) - 1] = Coord::Finite(Rational::one());
            }
        }
        match LocalChart::new(
            sig.clone(),
            tree.clone(),
            vec![t1.clone(), t2.clone()],
            home,
            nodes.clone(),
        ) {
            Ok(c) => return Ok(c),
            Err(Error::InvalidChart(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingExhausted(MAX_RETRIES))
}

/// The explicit ratios `t^{beta_1} Phi_1 / (t^{beta_0} Phi_0)` and
/// `t^{beta_2} Phi_2 / (t^{beta_0} Phi_0)` in terms of the marking coordinates
/// `x_i, y_i, z_i` of a codimension-two chart with all markings finite.
pub fn codim2_explicit_ratios(
    chart: &LocalChart,
    blocks: &[Marks; 3],
) -> Result<(Rational, Rational)> {
    let sig = chart.signature();
    let t1 = chart.params()[0].clone();
    let t2 = chart.params()[1].clone();
    let coord = |i: usize| -> Result<Rational> {
        chart
            .home_coord(i)
            .finite()
            .cloned()
            .ok_or_else(|| Error::InvalidChart(format!("marking {i} is at infinity")))
    };
    let sign = sign_pow(sig.d());
    let one = Rational::one();
    let mut r1 = sign.clone();
    let mut r2 = sign;
    for i in blocks[0].iter() {
        let x = coord(i)?;
        r1 /= pow(&x, sig.k(i));
        r2 /= pow(&(x - &one), sig.k(i));
    }
    for i in blocks[1].iter() {
        let y = coord(i)?;
        r1 *= pow(&y, sig.k(i));
        r2 *= pow(&(&y / (&t1 - &y)), sig.k(i));
    }
    for i in blocks[2].iter() {
        let z = coord(i)?;
        r1 *= pow(&(&z / (&t2 + &z)), sig.k(i));
        r2 *= pow(&z, sig.k(i));
    }
    Ok((r1, r2))
}

/// Restriction of `t^{beta_j} Phi_j` to the component of the central fiber that line `c`
/// parametrizes, at coordinate `z_c`: `f_jc * t^{beta_c} * phi_c(z_c)` with every `t = 0`.
pub fn central_fiber_restriction(
    chart: &LocalChart,
    j: usize,
    c: usize,
    z_c: &Rational,
) -> Result<Rational> {
    let zero_chart = chart.with_params(vec![Rational::zero(); chart.params().len()])?;
    let f = path_ratio_constant(&zero_chart, j, c)?;
    let beta = exponent_vector(zero_chart.tree(), c, zero_chart.signature());
    let t_beta = if beta.is_zero() {
        Rational::one()
    } else {
        Rational::zero()
    };
    // a point of the central fiber on component c: other lines sit at node coordinates
    let mut point = vec![Rational::zero(); zero_chart.tree().num_vertices()];
    point[c] = z_c.clone();
    let phi = evaluate_phi(&zero_chart, c, &point)?.value;
    Ok(f * t_beta * phi)
}

/// `d * mu_S` is an integer for every edge; a violation is an internal inconsistency.
pub fn exponents_are_integral(sig: &Signature, tree: &StableTree) -> bool {
    let d = BigInt::from(sig.d());
    (0..tree.num_edges()).all(|e| {
        let s = tree.edge_split(e);
        let w = sig.mu(s.near()) * Rational::from_integer(d.clone());
        w.is_integer()
    })
}
