//! Exact arithmetic in cyclotomic fields Q(zeta_d) represented as
//! Q[x]/(Phi_d(x)), plus the discrete Fourier transform over a finite
//! abelian group that turns torsion group rings into tuples of field
//! elements, one per character.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q_from_i64(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Coefficients of the d-th cyclotomic polynomial, ascending, monic.
pub fn cyclotomic_polynomial(d: u64) -> Vec<i128> {
    assert!(d >= 1);
    // x^d - 1 divided by the product of Phi_e over proper divisors e of d.
    let mut num = vec![0i128; d as usize + 1];
    num[0] = -1;
    num[d as usize] = 1;
    for e in 1..d {
        if d % e == 0 {
            let phi_e = cyclotomic_polynomial(e);
            num = divide_int_poly_exact(&num, &phi_e);
        }
    }
    num
}

fn divide_int_poly_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem: Vec<i128> = num.to_vec();
    let dd = den.len() - 1;
    assert_eq!(den[dd], 1, "divisor must be monic");
    let mut quot = vec![0i128; rem.len().saturating_sub(dd)];
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dd] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i - dd + j] -= c * dc;
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "non-exact cyclotomic division");
    quot
}

/// The field Q(zeta_d) as Q[x] modulo Phi_d. Elements are coefficient
/// vectors of length `degree`.
#[derive(Debug, Clone)]
pub struct CyclotomicField {
    order: u64,
    modulus: Vec<Q>,
    degree: usize,
}

pub type CycElem = Vec<Q>;

impl CyclotomicField {
    pub fn new(order: u64) -> Self {
        let phi: Vec<Q> = cyclotomic_polynomial(order)
            .into_iter()
            .map(|c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        let degree = phi.len() - 1;
        CyclotomicField {
            order,
            modulus: phi,
            degree,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn zero(&self) -> CycElem {
        vec![Q::zero(); self.degree]
    }

    pub fn one(&self) -> CycElem {
        self.from_rational(Q::one())
    }

    pub fn from_rational(&self, q: Q) -> CycElem {
        let mut v = self.zero();
        v[0] = q;
        v
    }

    pub fn is_zero(&self, a: &CycElem) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    /// Some(q) iff the element is the rational constant q.
    pub fn as_rational(&self, a: &CycElem) -> Option<Q> {
        if a[1..].iter().all(|c| c.is_zero()) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &CycElem, b: &CycElem) -> CycElem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg(&self, a: &CycElem) -> CycElem {
        a.iter().map(|x| -x).collect()
    }

    pub fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        let mut prod = vec![Q::zero(); 2 * self.degree];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                prod[i + j] += x * y;
            }
        }
        self.reduce(prod)
    }

    fn reduce(&self, mut poly: Vec<Q>) -> CycElem {
        let d = self.degree;
        for i in (d..poly.len()).rev() {
            let c = poly[i].clone();
            if c.is_zero() {
                continue;
            }
            poly[i] = Q::zero();
            for j in 0..d {
                let m = self.modulus[j].clone();
                poly[i - d + j] -= &c * m;
            }
        }
        poly.truncate(d);
        while poly.len() < d {
            poly.push(Q::zero());
        }
        poly
    }

    /// zeta^k reduced into the field.
    pub fn zeta_pow(&self, k: i64) -> CycElem {
        let e = k.rem_euclid(self.order as i64) as usize;
        let mut poly = vec![Q::zero(); e + 1];
        poly[e] = Q::one();
        self.reduce(poly)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x].
    pub fn inv(&self, a: &CycElem) -> Option<CycElem> {
        if self.is_zero(a) {
            return None;
        }
        // Maintain r0 = modulus, r1 = a; coefficients t with t*a = r mod Phi.
        let mut r0: Vec<Q> = self.modulus.clone();
        let mut r1: Vec<Q> = trim(a.clone());
        let mut t0: Vec<Q> = vec![];
        let mut t1: Vec<Q> = vec![Q::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let t = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        // r0 is the gcd, a nonzero constant since Phi_d is irreducible.
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].clone();
        let inv: Vec<Q> = t0.iter().map(|x| x / &c).collect();
        Some(self.reduce(inv))
    }
}

fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    let mut out = vec![Q::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut quot = vec![Q::zero(); rem.len().saturating_sub(db)];
    while rem.len() > db || (rem.len() == b.len() && !rem.is_empty()) {
        if rem.len() < b.len() {
            break;
        }
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() / &lead;
        quot[shift] = c.clone();
        for (j, bc) in b.iter().enumerate() {
            let v = &c * bc;
            rem[shift + j] -= v;
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

/// Laurent polynomials over a cyclotomic field: exponent -> coefficient.
pub type CycLaurent = std::collections::BTreeMap<i64, CycElem>;

/// Exact division of a Laurent polynomial by `c * s^a - 1` with `a != 0`
/// and `c != 0`. Returns None when the division is not exact.
pub fn divide_cyc_laurent(
    field: &CyclotomicField,
    p: &CycLaurent,
    c: &CycElem,
    a: i64,
) -> Option<CycLaurent> {
    assert!(a != 0);
    if p.is_empty() {
        return Some(CycLaurent::new());
    }
    let c_inv = field.inv(c)?;
    // Normalize the divisor to a monic polynomial in s:
    //   a > 0:  c s^a - 1 = c (s^a - c^{-1})
    //   a < 0:  c s^a - 1 = -s^a (s^{-a} - c)
    let (monic_deg, constant, scale, shift) = if a > 0 {
        (a, field.neg(&c_inv), c.clone(), 0)
    } else {
        (-a, field.neg(c), field.from_rational(-Q::one()), a)
    };
    // p = scale * s^shift * (s^monic_deg + constant) * q
    let lo = *p.keys().next().unwrap();
    let hi = *p.keys().last().unwrap();
    let scale_inv = field.inv(&scale)?;
    // Dense coefficients of s^{-lo} p / scale.
    let len = (hi - lo + 1) as usize;
    let mut rem: Vec<CycElem> = vec![field.zero(); len];
    for (&e, v) in p {
        rem[(e - lo) as usize] = field.mul(v, &scale_inv);
    }
    let d = monic_deg as usize;
    if len < d + 1 && rem.iter().any(|v| !field.is_zero(v)) {
        return None;
    }
    let mut quot: Vec<CycElem> = vec![field.zero(); len.saturating_sub(d)];
    for i in (d..len).rev() {
        let coef = rem[i].clone();
        if field.is_zero(&coef) {
            continue;
        }
        quot[i - d] = coef.clone();
        rem[i] = field.zero();
        // subtract coef * constant at position i - d
        let sub = field.mul(&coef, &constant);
        rem[i - d] = field.sub(&rem[i - d], &sub);
    }
    if rem.iter().any(|v| !field.is_zero(v)) {
        return None;
    }
    let mut out = CycLaurent::new();
    for (i, v) in quot.into_iter().enumerate() {
        if !field.is_zero(&v) {
            out.insert(lo - shift + i as i64, v);
        }
    }
    Some(out)
}

/// All characters of the finite abelian group with the given divisor chain,
/// as exponent vectors; character `v` sends the torsion element `b` to
/// zeta_D^{sum_i v_i b_i D/d_i}, D the largest divisor.
pub fn character_exponents(divisors: &[u64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &d in divisors {
        out = out
            .into_iter()
            .flat_map(|base| {
                (0..d as i64).map(move |v| {
                    let mut b = base.clone();
                    b.push(v);
                    b
                })
            })
            .collect();
    }
    out
}

/// The exponent of zeta_D computed by character `v` on torsion vector `b`.
pub fn character_pairing(divisors: &[u64], modulus: u64, v: &[i64], b: &[i64]) -> i64 {
    let mut e: i64 = 0;
    for ((&vi, &bi), &di) in v.iter().zip(b).zip(divisors) {
        e += vi * bi * (modulus / di) as i64;
    }
    e.rem_euclid(modulus as i64)
}
