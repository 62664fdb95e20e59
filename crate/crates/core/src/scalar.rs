//! Exact arithmetic in the rational-function field `Q(k)`.
//!
//! A [`Scalar`] is a reduced fraction of univariate polynomials with
//! rational coefficients. The denominator is kept monic and coprime to the
//! numerator, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number.
pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

/// Dense polynomial in the level symbol, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Poly { coeffs: vec![c] };
        p.trim();
        p
    }

    /// The monomial `k`.
    pub fn var() -> Self {
        Poly {
            coeffs: vec![Q::zero(), Q::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Q>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lc(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeffs.first().cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Euclidean division: `self = q * d + r`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.coeffs.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let dl = d.coeffs.len();
        let inv = d.lc().recip();
        let mut q = vec![Q::zero(); r.len() - dl + 1];
        for i in (0..q.len()).rev() {
            let c = &r[i + dl - 1] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Gcd of the coefficients, as a positive rational, used to strip content.
    pub fn content(&self) -> Q {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in &self.coeffs {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Q::one();
        }
        Q::new(num, den)
    }

    /// Primitive integer-coefficient part with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.lc().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    pub fn to_string_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { "-" } else { "+" });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let x = match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            c.push(x);
        }
        Poly::from_coeffs(c)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::from_coeffs(c)
    }
}

/// An element of `Q(k)` in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_q(q_int(n))
    }

    pub fn from_frac(p: i64, d: i64) -> Self {
        Scalar::from_q(q_frac(p, d))
    }

    pub fn from_q(q: Q) -> Self {
        Scalar {
            num: Poly::constant(q),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    /// The level symbol `k`.
    pub fn k() -> Self {
        Scalar::from_poly(Poly::var())
    }

    /// `k + c` for a rational shift `c`.
    pub fn k_plus(c: Q) -> Self {
        Scalar::from_poly(Poly::from_coeffs(vec![c, Q::one()]))
    }

    pub fn ratio(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Scalar::zero();
        }
        if den.is_constant() {
            let inv = den.lc().recip();
            return Scalar {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = Poly::gcd(&num, &den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lc = d.lc();
        if !lc.is_one() {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Scalar { num: n, den: d }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The rational value when the scalar does not depend on `k`.
    pub fn as_q(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.num.constant_term())
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        let q = self.as_q()?;
        if q.is_integer() {
            q.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero scalar");
        Scalar::ratio(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute a rational value for `k`; `None` if the denominator vanishes.
    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn to_string_var(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.to_string_var(var);
        }
        let mut l = BigInt::one();
        for c in self.num.coeffs.iter().chain(&self.den.coeffs) {
            l = l.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.num.coeffs.iter().chain(&self.den.coeffs) {
            g = g.gcd(&(c * Q::from_integer(l.clone())).to_integer());
        }
        let s = Q::new(l, g);
        let (num, den) = (self.num.scale(&s), self.den.scale(&s));
        let n = num.to_string_var(var);
        let d = den.to_string_var(var);
        let n = if num.coeffs.iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({n})")
        } else {
            n
        };
        format!("{n}/({d})")
    }

    /// Parse `"3/2"`, `"k+2"`, `"(k^2-1)/(2*k+3)"` and similar forms.
    pub fn parse(s: &str) -> Result<Scalar, String> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty scalar".into());
        }
        // split at the top-level '/' that separates two parenthesised parts
        let mut depth = 0i32;
        let mut split = None;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 && s[..i].ends_with(')') => split = Some(i),
                _ => {}
            }
        }
        if let Some(i) = split {
            let n = parse_poly(strip_parens(&s[..i]))?;
            let d = parse_poly(strip_parens(&s[i + 1..]))?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            return Ok(Scalar::ratio(n, d));
        }
        // "p/(q)" form
        if let Some(i) = s.find("/(") {
            let n = parse_poly(strip_parens(&s[..i]))?;
            let d = parse_poly(strip_parens(&s[i + 1..]))?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            return Ok(Scalar::ratio(n, d));
        }
        Ok(Scalar::from_poly(parse_poly(strip_parens(&s))?))
    }
}

fn strip_parens(s: &str) -> &str {
    if s.starts_with('(') && s.ends_with(')') {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

fn parse_q(s: &str) -> Result<Q, String> {
    let bad = || format!("bad rational `{s}`");
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(Q::new(p, q))
    } else {
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Q::from_integer(p))
    }
}

/// Parse a rational number `p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Q, String> {
    parse_q(s.trim())
}

fn parse_poly(s: &str) -> Result<Poly, String> {
    if s.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut acc = Poly::zero();
    for t in terms {
        let (sign, body) = match t.as_bytes()[0] {
            b'+' => (Q::one(), &t[1..]),
            b'-' => (-Q::one(), &t[1..]),
            _ => (Q::one(), t),
        };
        let (coef, mono) = if let Some((c, m)) = body.split_once('*') {
            (parse_q(c)?, Some(m))
        } else if body.starts_with('k') {
            (Q::one(), Some(body))
        } else {
            (parse_q(body)?, None)
        };
        let deg = match mono {
            None => 0usize,
            Some("k") => 1,
            Some(m) => {
                let e = m
                    .strip_prefix("k^")
                    .ok_or_else(|| format!("bad monomial `{m}`"))?;
                e.parse().map_err(|_| format!("bad exponent `{e}`"))?
            }
        };
        let mut c = vec![Q::zero(); deg + 1];
        c[deg] = sign * coef;
        acc = &acc + &Poly::from_coeffs(c);
    }
    Ok(acc)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_var("k"))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.num
            .cmp(&other.num)
            .then_with(|| self.den.cmp(&other.den))
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let n = &self.num + &rhs.num;
            if self.den.is_one() {
                return Scalar::from_poly(n);
            }
            return Scalar::ratio(n, self.den.clone());
        }
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Scalar::ratio(n, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_poly(&self.num * &rhs.num);
        }
        if self.is_constant() {
            let c = self.num.constant_term();
            return Scalar {
                num: rhs.num.scale(&c),
                den: rhs.den.clone(),
            };
        }
        if rhs.is_constant() {
            let c = rhs.num.constant_term();
            return Scalar {
                num: self.num.scale(&c),
                den: self.den.clone(),
            };
        }
        Scalar::ratio(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: &Scalar) -> Scalar {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                self.$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Self {
        Scalar::from_q(q)
    }
}

/// Generalised binomial coefficient `C(n, j)` for any integer `n`.
pub fn binom(n: i64, j: u32) -> Q {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Q::new(num, den)
}

pub fn factorial(n: u32) -> Q {
    (1..=n as i64).fold(Q::one(), |acc, i| acc * q_int(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> Scalar {
        Scalar::k()
    }

    #[test]
    fn reduces_common_factors() {
        // (k^2 - 4)/(k + 2) = k - 2
        let n = &(&k() * &k()) - &Scalar::from_int(4);
        let d = &k() + &Scalar::from_int(2);
        let r = &n / &d;
        assert_eq!(r, &k() - &Scalar::from_int(2));
        assert!(r.denom().is_one());
    }

    #[test]
    fn denominator_is_monic() {
        let r = &Scalar::one() / &(&Scalar::from_int(2) * &k());
        assert_eq!(r.denom(), &Poly::var());
        assert_eq!(r.to_string(), "1/(2*k)");
    }

    #[test]
    fn parse_display() {
        for s in ["3/2", "k+2", "-k", "(k^2-1)/(2*k+3)", "k^3-1/2*k", "0"] {
            let x = Scalar::parse(s).unwrap();
            let y = Scalar::parse(&x.to_string()).unwrap();
            assert_eq!(x, y, "{s}");
        }
        assert_eq!(Scalar::parse("(k^2-1)/(k-1)").unwrap(), &k() + &Scalar::one());
        assert!(Scalar::parse("1/(0)").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), q_int(10));
        assert_eq!(binom(-1, 3), q_int(-1));
        assert_eq!(binom(-2, 2), q_int(3));
        assert_eq!(binom(3, 5), q_int(0));
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (
            proptest::collection::vec(-5i64..5, 1..4),
            proptest::collection::vec(-5i64..5, 1..3),
        )
            .prop_filter_map("nonzero den", |(n, d)| {
                let n = Poly::from_coeffs(n.into_iter().map(q_int).collect());
                let d = Poly::from_coeffs(d.into_iter().map(q_int).collect());
                if d.is_zero() {
                    None
                } else {
                    Some(Scalar::ratio(n, d))
                }
            })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn eval_is_homomorphism(a in arb_scalar(), b in arb_scalar(), x in -7i64..7) {
            let x = q_int(x) + q_frac(1, 3);
            if let (Some(va), Some(vb)) = (a.eval(&x), b.eval(&x)) {
                prop_assert_eq!((&a * &b).eval(&x), Some(&va * &vb));
                prop_assert_eq!((&a + &b).eval(&x), Some(va + vb));
            }
        }
    }
}
