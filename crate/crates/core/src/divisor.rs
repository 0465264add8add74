//! The divisor `D_mu` in its two forms, blow-up triviality, and the volume formula.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::intersection::{product_number, DivisorExpression, DivisorSymbol};
use crate::strata::{
    boundary_weight, enumerate_p_hat, enumerate_stable_trees, enumerate_two_block,
    exceptional_divisor, in_ideal_support, Signature,
};
use crate::Rational;

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `d / ((n-2)(n-1)) * sum_S (|I0| - 1)(|I1| - 1 - (n-1) mu_S) D_S`.
pub fn d_mu_boundary_form(sig: &Signature) -> DivisorExpression {
    let n = sig.n() as i64;
    let scale = Rational::new(BigInt::from(sig.d()), BigInt::from((n - 2) * (n - 1)));
    let mut e = DivisorExpression::new();
    for p in enumerate_two_block(sig) {
        let mu_s = boundary_weight(&p, sig).expect("canonical numbering");
        let a = int(p.i0.len() as i64 - 1);
        let b = int(p.i1.len() as i64 - 1) - int(n - 1) * mu_s;
        e.add_term(DivisorSymbol::from(p), &scale * a * b);
    }
    e
}

/// `(d/2) * (sum_i -mu_i psi_i + sum_S (1 - mu_S) D_S)`.
pub fn d_mu_psi_form(sig: &Signature) -> DivisorExpression {
    let half_d = Rational::new(BigInt::from(sig.d()), BigInt::from(2));
    let mut e = DivisorExpression::new();
    for i in 1..=sig.n() {
        e.add_term(DivisorSymbol::Psi(i), -(&half_d * sig.weights().get(i)));
    }
    for p in enumerate_two_block(sig) {
        let mu_s = boundary_weight(&p, sig).expect("canonical numbering");
        e.add_term(DivisorSymbol::from(p), &half_d * (Rational::one() - mu_s));
    }
    e
}

/// True when the blow-up is an isomorphism, decided by `P-hat(mu)` having no
/// partition with three or more blocks.
pub fn blowup_is_trivial(sig: &Signature) -> bool {
    enumerate_p_hat(sig).iter().all(|p| p.r() < 2)
}

/// The same question decided stratum by stratum: no stable tree has two or more
/// principal subcurves.
pub fn blowup_is_trivial_exhaustive(sig: &Signature) -> bool {
    let n = sig.n();
    enumerate_stable_trees(n, n - 3)
        .iter()
        .all(|t| !in_ideal_support(t, sig))
}

/// `vol_1 = coefficient * pi^pi_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeResult {
    pub coefficient: Rational,
    pub pi_power: u32,
    /// Top self-intersection of `D_mu` on `M_0,n`.
    pub intersection_number: Rational,
    pub e_trivial: bool,
    pub warnings: Vec<String>,
}

impl VolumeResult {
    pub fn abs_coefficient(&self) -> Rational {
        self.coefficient.abs()
    }

    /// `coefficient * pi^pi_power` rendered with 15 significant digits.
    pub fn signed_decimal(&self) -> String {
        render_decimal(&self.coefficient, self.pi_power)
    }

    pub fn abs_decimal(&self) -> String {
        render_decimal(&self.abs_coefficient(), self.pi_power)
    }
}

fn render_decimal(c: &Rational, pi_power: u32) -> String {
    let x = c.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(pi_power as i32);
    format!("{x:.15e}")
}

/// `(-1)^(n-3) / (d^(n-3) (n-2)!)`: the rational factor multiplying `pi^(n-2)` times the
/// top intersection number.
pub fn volume_constant(d: i64, n: usize) -> Rational {
    let k = n as u32 - 3;
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    let fact: BigInt = (1..=(n as u64 - 2)).fold(BigInt::one(), |a, x| a * x);
    Rational::new(BigInt::from(sign), BigInt::from(d).pow(k) * fact)
}

/// The volume of the projectivized stratum. Fails when the exceptional divisor is nonzero.
pub fn volume(sig: &Signature) -> Result<VolumeResult> {
    let e = exceptional_divisor(sig);
    if !e.is_zero() {
        return Err(Error::ExceptionalDivisorNontrivial);
    }
    let mut warnings = Vec::new();
    if sig.d_divides_some_k() {
        warnings.push(format!(
            "d = {} divides some k_i; the volume formula is stated only when it divides none",
            sig.d()
        ));
    }
    let n = sig.n();
    let intersection_number = if n == 3 {
        Rational::one()
    } else {
        let dmu = d_mu_boundary_form(sig);
        product_number(n, &vec![dmu; n - 3])?
    };
    let coefficient = volume_constant(sig.d(), n) * &intersection_number;
    Ok(VolumeResult {
        coefficient,
        pi_power: n as u32 - 2,
        intersection_number,
        e_trivial: true,
        warnings,
    })
}

/// Sum of all coefficients of an expression.
pub fn coefficient_sum(e: &DivisorExpression) -> Rational {
    e.iter().fold(Rational::zero(), |acc, (_, c)| acc + c)
}
