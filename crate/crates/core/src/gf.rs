//! Arithmetic in `F_q`, `q = p^m`, in a polynomial basis over `F_p`.
//!
//! Elements are identified with their canonical integer encoding
//! `e = sum coeffs[i] * p^i`, so `0` is the additive and `1` the
//! multiplicative identity. Multiplication goes through discrete log tables
//! built once at construction; addition uses a table when `q` is small.

use std::fmt;
use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};

/// Canonical integer encoding of a field element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const ADD_TABLE_MAX_Q: u32 = 1024;

struct Tables {
    p: u32,
    m: u32,
    q: u32,
    irreducible: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
}

/// Parameters of `F_{p^m}` together with precomputed arithmetic tables.
///
/// Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct FieldParams(Arc<Tables>);

impl fmt::Debug for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldParams")
            .field("p", &self.p())
            .field("m", &self.m())
            .field("irreducible", &self.irreducible())
            .finish()
    }
}

impl PartialEq for FieldParams {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.p() == other.p() && self.m() == other.m())
    }
}

impl Eq for FieldParams {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over F_p, low degree first, no trailing zeros.
fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead_inv = mod_pow(*b.last().expect("nonzero divisor"), p - 2, p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        r = trim(r);
    }
    r
}

fn mod_pow(base: u32, mut exp: u32, p: u32) -> u32 {
    let p = p as u64;
    let (mut acc, mut b) = (1u64, base as u64 % p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        exp >>= 1;
    }
    acc as u32
}

fn digits(mut e: u32, p: u32, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let d = e % p;
            e /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Whether a monic polynomial (low degree first) has no factor of degree
/// `1..=deg/2`, by trial division against every monic candidate.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        for tail in 0..(p as u64).pow(d as u32) {
            let mut divisor = digits(tail as u32, p, d as u32);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `m`, comparing
/// coefficients from the constant term upward.
fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    // Enumerate tails with the constant term as most significant digit.
    let total = (p as u64).pow(m);
    for idx in 0..total {
        let mut tail = digits(idx as u32, p, m);
        tail.reverse();
        let mut poly = tail;
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

impl FieldParams {
    /// Builds `F_{p^m}` under the default size cap.
    pub fn new(p: u32, m: u32) -> Result<Self> {
        Self::with_caps(p, m, &Caps::default())
    }

    pub fn with_caps(p: u32, m: u32, caps: &Caps) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if m < 1 {
            return Err(Error::BadExtensionDegree(m));
        }
        let q = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
        if q > caps.field_order as u128 {
            return Err(Error::SizeCap { what: "field order", size: q, cap: caps.field_order as u128 });
        }
        let q = q as u32;
        let irreducible = smallest_irreducible(p, m);

        let mul_raw = |a: u32, b: u32| -> u32 {
            let (da, db) = (digits(a, p, m), digits(b, p, m));
            let mut prod = vec![0u32; (2 * m) as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = poly_rem(&prod, &irreducible, p);
            r.resize(m as usize, 0);
            undigits(&r, p)
        };

        let order = q - 1;
        let mut exp = Vec::with_capacity(order as usize);
        for g in 1..q {
            exp.clear();
            let mut x = 1u32;
            loop {
                exp.push(x);
                x = mul_raw(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() == order as usize {
                break;
            }
        }
        debug_assert_eq!(exp.len(), order as usize);
        let mut log = vec![0u32; q as usize];
        for (i, &x) in exp.iter().enumerate() {
            log[x as usize] = i as u32;
        }

        let add_digits = |a: u32, b: u32| -> u32 {
            if p == 2 {
                return a ^ b;
            }
            let s: Vec<u32> =
                digits(a, p, m).iter().zip(digits(b, p, m)).map(|(x, y)| (x + y) % p).collect();
            undigits(&s, p)
        };
        let add = (q <= ADD_TABLE_MAX_Q).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b);
                }
            }
            t
        });
        let neg = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a, p, m).iter().map(|&x| (p - x) % p).collect();
                undigits(&d, p)
            })
            .collect();

        Ok(FieldParams(Arc::new(Tables { p, m, q, irreducible, exp, log, add, neg })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Defining polynomial, constant term first, leading coefficient 1.
    pub fn irreducible(&self) -> &[u32] {
        &self.0.irreducible
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q()).map(Fe)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> {
        (1..self.q()).map(Fe)
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.q()
    }

    /// Coefficient vector of `a`, constant term first.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        digits(a.0, self.p(), self.m())
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() != self.m() as usize || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients in 0..{}",
                self.m(),
                self.p()
            )));
        }
        Ok(Fe(undigits(coeffs, self.p())))
    }

    pub fn element(&self, value: u32) -> Result<Elem<'_>> {
        if value >= self.q() {
            return Err(Error::ElementOutOfRange { value, q: self.q() });
        }
        Ok(Elem { field: self, value: Fe(value) })
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let t = &self.0;
        match &t.add {
            Some(tab) => Fe(tab[(a.0 * t.q + b.0) as usize]),
            None if t.p == 2 => Fe(a.0 ^ b.0),
            None => {
                let s: Vec<u32> = digits(a.0, t.p, t.m)
                    .iter()
                    .zip(digits(b.0, t.p, t.m))
                    .map(|(x, y)| (x + y) % t.p)
                    .collect();
                Fe(undigits(&s, t.p))
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            return Fe::ZERO;
        }
        let t = &self.0;
        let order = t.q - 1;
        let l = (t.log[a.0 as usize] + t.log[b.0 as usize]) % order;
        Fe(t.exp[l as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let t = &self.0;
        let order = t.q - 1;
        Ok(Fe(t.exp[((order - t.log[a.0 as usize]) % order) as usize]))
    }

    /// `a^(p^s)`, for `0 <= s < m`.
    pub fn frobenius(&self, a: Fe, s: u32) -> Result<Fe> {
        if s >= self.m() {
            return Err(Error::ExponentOutOfRange { s, m: self.m() });
        }
        Ok(self.frob(a, s))
    }

    /// Unchecked Frobenius power; `s` is taken modulo `m`.
    #[inline]
    pub(crate) fn frob(&self, a: Fe, s: u32) -> Fe {
        let s = s % self.m();
        if s == 0 || a.is_zero() {
            return a;
        }
        let t = &self.0;
        let order = (t.q - 1) as u64;
        let e = (t.p as u64).pow(s) % order;
        Fe(t.exp[(t.log[a.0 as usize] as u64 * e % order) as usize])
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let t = &self.0;
        let order = (t.q - 1) as u64;
        Fe(t.exp[(t.log[a.0 as usize] as u64 * (e % order) % order) as usize])
    }

    /// Finds the unique `s` with `table[a] = a^(p^s)` for every `a`.
    ///
    /// `table` is indexed by element encoding and must cover all of `F_q`.
    pub fn identify_automorphism(&self, table: &[Fe]) -> Result<u32> {
        if table.len() != self.q() as usize {
            return Err(Error::NotAnAutomorphism(format!(
                "table has {} entries, field has {}",
                table.len(),
                self.q()
            )));
        }
        let mut seen = vec![false; table.len()];
        for &b in table {
            if !self.contains(b) {
                return Err(Error::ElementOutOfRange { value: b.0, q: self.q() });
            }
            if std::mem::replace(&mut seen[b.0 as usize], true) {
                return Err(Error::NotAnAutomorphism(format!("value {b} is hit twice")));
            }
        }
        (0..self.m())
            .find(|&s| self.elements().all(|a| table[a.0 as usize] == self.frob(a, s)))
            .ok_or_else(|| Error::NotAnAutomorphism("matches no power of Frobenius".into()))
    }
}

/// A field element bound to its field, for checked arithmetic across
/// possibly different fields.
#[derive(Debug, Clone, Copy)]
pub struct Elem<'f> {
    field: &'f FieldParams,
    value: Fe,
}

impl<'f> Elem<'f> {
    pub fn value(&self) -> Fe {
        self.value
    }

    fn same_field(&self, other: &Elem<'_>) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn wrap(&self, value: Fe) -> Elem<'f> {
        Elem { field: self.field, value }
    }

    pub fn add(&self, other: &Elem<'_>) -> Result<Elem<'f>> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.add(self.value, other.value)))
    }

    pub fn mul(&self, other: &Elem<'_>) -> Result<Elem<'f>> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Elem<'f> {
        self.wrap(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Elem<'f>> {
        Ok(self.wrap(self.field.inv(self.value)?))
    }

    pub fn frobenius(&self, s: u32) -> Result<Elem<'f>> {
        Ok(self.wrap(self.field.frobenius(self.value, s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32, m: u32) -> FieldParams {
        FieldParams::new(p, m).unwrap()
    }

    // Polynomial multiplication with schoolbook reduction, independent of the
    // log tables.
    fn mul_oracle(field: &FieldParams, a: Fe, b: Fe) -> Fe {
        let (p, m) = (field.p(), field.m() as usize);
        let (da, db) = (field.coeffs(a), field.coeffs(b));
        let mut prod = vec![0u32; 2 * m];
        for i in 0..m {
            for j in 0..m {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        let irr = field.irreducible();
        for deg in (m..2 * m).rev() {
            let c = prod[deg];
            for k in 0..=m {
                prod[deg - m + k] = (prod[deg - m + k] + (p - c) * irr[k]) % p;
            }
        }
        field.from_coeffs(&prod[..m]).unwrap()
    }

    #[test]
    fn construction_picks_smallest_irreducible() {
        assert_eq!(f(2, 1).irreducible(), &[0, 1]);
        assert_eq!(f(3, 1).q(), 3);
        assert_eq!(f(2, 2).irreducible(), &[1, 1, 1]);
        // Constant term compared first: x^3+x^2+1 precedes x^3+x+1.
        assert_eq!(f(2, 3).irreducible(), &[1, 0, 1, 1]);
        assert_eq!(f(3, 2).irreducible(), &[1, 0, 1]);
    }

    #[test]
    fn f4_irreducible_is_unique_quadratic() {
        let irreducible: Vec<_> = (0..4u32)
            .map(|t| vec![t & 1, t >> 1, 1])
            .filter(|poly| is_irreducible(poly, 2))
            .collect();
        assert_eq!(irreducible, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldParams::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldParams::new(2, 0).unwrap_err(), Error::BadExtensionDegree(0));
        assert!(matches!(FieldParams::new(2, 11), Err(Error::SizeCap { .. })));
        let caps = Caps { field_order: 2048, ..Caps::default() };
        assert_eq!(FieldParams::with_caps(2, 11, &caps).unwrap().q(), 2048);
    }

    #[test]
    fn small_examples() {
        let f4 = f(2, 2);
        assert_eq!(f4.mul(Fe(2), Fe(2)), Fe(3));
        assert_eq!(f4.frobenius(Fe(2), 1).unwrap(), Fe(3));
        let f3 = f(3, 1);
        assert_eq!(f3.inv(Fe(2)).unwrap(), Fe(2));
        assert_eq!(f3.inv(Fe(0)), Err(Error::DivisionByZero));
        assert_eq!(f(2, 1).frobenius(Fe(1), 0).unwrap(), Fe(1));
        assert!(matches!(f4.frobenius(Fe(1), 2), Err(Error::ExponentOutOfRange { .. })));
    }

    #[test]
    fn inverse_by_exhaustive_search() {
        for field in [f(3, 1), f(2, 3), f(5, 2)] {
            for a in field.nonzero_elements() {
                let brute = field.elements().find(|&b| mul_oracle(&field, a, b) == Fe::ONE).unwrap();
                assert_eq!(field.inv(a).unwrap(), brute);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2), (7, 1), (2, 4), (2, 6)] {
            let field = f(p, m);
            for a in field.elements() {
                assert_eq!(field.add(a, field.neg(a)), Fe::ZERO);
                assert_eq!(field.mul(a, Fe::ONE), a);
                if !a.is_zero() {
                    assert_eq!(field.mul(a, field.inv(a).unwrap()), Fe::ONE);
                }
                for b in field.elements() {
                    assert_eq!(field.mul(a, b), mul_oracle(&field, a, b));
                    assert_eq!(field.add(a, b), field.add(b, a));
                    assert_eq!(field.mul(a, b), field.mul(b, a));
                }
            }
            // Associativity and distributivity on the smaller fields only.
            if field.q() <= 16 {
                for a in field.elements() {
                    for b in field.elements() {
                        for c in field.elements() {
                            assert_eq!(field.add(field.add(a, b), c), field.add(a, field.add(b, c)));
                            assert_eq!(field.mul(field.mul(a, b), c), field.mul(a, field.mul(b, c)));
                            assert_eq!(
                                field.mul(a, field.add(b, c)),
                                field.add(field.mul(a, b), field.mul(a, c))
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_powers_form_cyclic_group() {
        for (p, m) in [(2, 2), (2, 3), (3, 2), (2, 4), (2, 6)] {
            let field = f(p, m);
            let tables: Vec<Vec<Fe>> =
                (0..m).map(|s| field.elements().map(|a| field.frob(a, s)).collect()).collect();
            for s in 0..m {
                for a in field.elements() {
                    // a^(p^s) by repeated multiplication.
                    let brute = field.pow(a, (p as u64).pow(s));
                    assert_eq!(tables[s as usize][a.0 as usize], brute);
                    for b in field.elements() {
                        let fa = field.frob(a, s);
                        let fb = field.frob(b, s);
                        assert_eq!(field.frob(field.add(a, b), s), field.add(fa, fb));
                        assert_eq!(field.frob(field.mul(a, b), s), field.mul(fa, fb));
                    }
                }
                for t in 0..m {
                    let composed: Vec<Fe> = field
                        .elements()
                        .map(|a| tables[s as usize][tables[t as usize][a.0 as usize].0 as usize])
                        .collect();
                    assert_eq!(composed, tables[((s + t) % m) as usize]);
                }
            }
            let mut distinct = tables.clone();
            distinct.sort();
            distinct.dedup();
            assert_eq!(distinct.len(), m as usize);
        }
    }

    #[test]
    fn identify_automorphism_examples() {
        let f3 = f(3, 1);
        let id: Vec<Fe> = f3.elements().collect();
        assert_eq!(f3.identify_automorphism(&id).unwrap(), 0);

        let f4 = f(2, 2);
        let swap = [Fe(0), Fe(1), Fe(3), Fe(2)];
        assert_eq!(f4.identify_automorphism(&swap).unwrap(), 1);
        let bad = [Fe(0), Fe(1), Fe(2), Fe(2)];
        assert!(matches!(f4.identify_automorphism(&bad), Err(Error::NotAnAutomorphism(_))));
        // A bijection that is not additive.
        let perm = [Fe(0), Fe(2), Fe(1), Fe(3)];
        assert!(matches!(f4.identify_automorphism(&perm), Err(Error::NotAnAutomorphism(_))));
    }

    #[test]
    fn checked_elements_reject_mixed_fields() {
        let f4 = f(2, 2);
        let f3 = f(3, 1);
        let a = f4.element(2).unwrap();
        let b = f3.element(2).unwrap();
        assert_eq!(a.mul(&b).unwrap_err(), Error::FieldMismatch);
        assert_eq!(a.mul(&a).unwrap().value(), Fe(3));
        assert_eq!(a.neg().value(), Fe(2));
        assert_eq!(f3.element(2).unwrap().inv().unwrap().value(), Fe(2));
        assert!(f4.element(4).is_err());
        let again = FieldParams::new(2, 2).unwrap();
        assert!(a.add(&again.element(1).unwrap()).is_ok());
    }
}
