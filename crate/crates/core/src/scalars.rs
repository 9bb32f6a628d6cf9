//! Exact arithmetic in `Q` and in cyclotomic fields `Q(zeta_m)`.
//!
//! A [`Scalar`] stores its coordinates in the power basis `1, zeta, ..., zeta^(phi(m)-1)`
//! reduced modulo the `m`-th cyclotomic polynomial, so two scalars of the same order are
//! equal exactly when their coordinate vectors agree. Scalars of different orders are
//! compared after embedding both into `Q(zeta_L)` with `L = lcm`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn euler_phi(m: u32) -> u32 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn divisors(m: u32) -> Vec<u32> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

/// Power table of `zeta_m` reduced modulo the cyclotomic polynomial.
struct CycloTable {
    phi: usize,
    /// `powers[k]` is `zeta^k` in the power basis, `0 <= k < m`.
    powers: Vec<Vec<BigInt>>,
}

fn table_cache() -> &'static Mutex<HashMap<u32, Arc<CycloTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycloTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn poly_cache() -> &'static Mutex<HashMap<u32, Vec<BigInt>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigInt>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (low to high) of the `m`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic order must be positive");
    if let Some(p) = poly_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by every Phi_d with d | m, d < m.
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = -BigInt::one();
    num[m as usize] = BigInt::one();
    for d in divisors(m) {
        if d == m {
            continue;
        }
        let den = cyclotomic_polynomial(d);
        num = exact_int_poly_div(&num, &den);
    }
    poly_cache().lock().unwrap().insert(m, num.clone());
    num
}

fn exact_int_poly_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = &den[dd];
    debug_assert!(lead.is_one());
    let qlen = rem.len() - dd;
    let mut q = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone() / lead;
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|r| r.is_zero()));
    q
}

fn table(m: u32) -> Arc<CycloTable> {
    if let Some(t) = table_cache().lock().unwrap().get(&m) {
        return t.clone();
    }
    let phi_poly = cyclotomic_polynomial(m);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(m as usize);
    let mut cur = vec![BigInt::zero(); phi];
    cur[0] = BigInt::one();
    for _ in 0..m {
        powers.push(cur.clone());
        // multiply by x, then rewrite x^phi = -sum c_i x^i
        let top = cur[phi - 1].clone();
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigInt::zero();
        if !top.is_zero() {
            for i in 0..phi {
                cur[i] -= &top * &phi_poly[i];
            }
        }
    }
    let t = Arc::new(CycloTable { phi, powers });
    table_cache().lock().unwrap().insert(m, t.clone());
    t
}

/// Exact element of `Q(zeta_m)`.
#[derive(Clone, Debug)]
pub struct Scalar {
    order: u32,
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { order: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { order: 1, coeffs: vec![rat(n)] }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar { order: 1, coeffs: vec![q] }
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `zeta_m^k` for any integer `k`.
    pub fn zeta_pow(m: u32, k: i64) -> Self {
        assert!(m >= 1);
        let t = table(m);
        let idx = k.rem_euclid(m as i64) as usize;
        Scalar {
            order: m,
            coeffs: t.powers[idx].iter().map(|c| BigRational::from_integer(c.clone())).collect(),
        }
    }

    pub fn zeta(m: u32) -> Self {
        Self::zeta_pow(m, 1)
    }

    /// Canonical representative of `sum_k p[k] zeta_m^k`.
    pub fn cyclo_reduce(p: &[BigRational], m: u32) -> Self {
        assert!(m >= 1);
        let t = table(m);
        let mut coeffs = vec![BigRational::zero(); t.phi];
        for (k, c) in p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pw = &t.powers[k % m as usize];
            for (i, e) in pw.iter().enumerate() {
                if !e.is_zero() {
                    coeffs[i] += c * BigRational::from_integer(e.clone());
                }
            }
        }
        Scalar { order: m, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value, when the element lies in `Q` as stored.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Same element viewed in `Q(zeta_l)`; `l` must be a multiple of the order.
    pub fn embed(&self, l: u32) -> Scalar {
        if l == self.order {
            return self.clone();
        }
        assert!(l.is_multiple_of(self.order), "embedding order must be a multiple");
        if self.order == 1 {
            let t = table(l);
            let mut coeffs = vec![BigRational::zero(); t.phi];
            coeffs[0] = self.coeffs[0].clone();
            return Scalar { order: l, coeffs };
        }
        let step = (l / self.order) as usize;
        let t = table(l);
        let mut coeffs = vec![BigRational::zero(); t.phi];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pw = &t.powers[(i * step) % l as usize];
            for (j, e) in pw.iter().enumerate() {
                if !e.is_zero() {
                    coeffs[j] += c * BigRational::from_integer(e.clone());
                }
            }
        }
        Scalar { order: l, coeffs }
    }

    fn aligned<'a>(
        a: &'a Scalar,
        b: &'a Scalar,
    ) -> (u32, std::borrow::Cow<'a, Scalar>, std::borrow::Cow<'a, Scalar>) {
        use std::borrow::Cow;
        if a.order == b.order {
            return (a.order, Cow::Borrowed(a), Cow::Borrowed(b));
        }
        let l = a.order.lcm(&b.order);
        let ea = if a.order == l { Cow::Borrowed(a) } else { Cow::Owned(a.embed(l)) };
        let eb = if b.order == l { Cow::Borrowed(b) } else { Cow::Owned(b.embed(l)) };
        (l, ea, eb)
    }

    /// Galois automorphism `zeta -> zeta^a`, `gcd(a, m) = 1`.
    pub fn galois(&self, a: u32) -> Scalar {
        let m = self.order;
        if m == 1 {
            return self.clone();
        }
        let mut p = vec![BigRational::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = (i as u64 * a as u64 % m as u64) as usize;
            p[k] += c;
        }
        Scalar::cyclo_reduce(&p, m)
    }

    /// Complex conjugation `zeta -> zeta^-1`.
    pub fn conjugate(&self) -> Scalar {
        if self.order <= 2 {
            return self.clone();
        }
        self.galois(self.order - 1)
    }

    /// Product of all Galois conjugates over `Q`, relative to the stored order.
    pub fn norm_to_rational(&self) -> BigRational {
        let m = self.order;
        if m == 1 {
            return self.coeffs[0].clone();
        }
        let mut acc = self.clone();
        for a in 2..m {
            if a.gcd(&m) == 1 {
                acc = &acc * &self.galois(a);
            }
        }
        let acc = acc.embed(m);
        debug_assert!(acc.coeffs[1..].iter().all(|c| c.is_zero()));
        acc.coeffs[0].clone()
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        let m = self.order;
        if m == 1 {
            return Some(Scalar::from_rational(self.coeffs[0].recip()));
        }
        // x^-1 = prod_{a != 1} sigma_a(x) / N(x)
        let mut others = Scalar::one();
        for a in 2..m {
            if a.gcd(&m) == 1 {
                others = &others * &self.galois(a);
            }
        }
        let n = (&others * self).embed(m).coeffs[0].clone();
        Some(others.scale(&n.recip()))
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        Scalar { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, e: i64) -> Scalar {
        let base = if e < 0 { self.inv().expect("inverse of zero") } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Scalar::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    /// All power-basis coordinates are integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Rewrite in the smallest cyclotomic field containing the element.
    pub fn descend(&self) -> Scalar {
        if self.order == 1 {
            return self.clone();
        }
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            return Scalar::from_rational(self.coeffs[0].clone());
        }
        let m = self.order;
        for d in divisors(m) {
            if d == 1 || d == m {
                continue;
            }
            if let Some(s) = self.try_descend_to(d) {
                return s;
            }
        }
        self.clone()
    }

    fn try_descend_to(&self, d: u32) -> Option<Scalar> {
        let m = self.order;
        let phi_d = euler_phi(d) as usize;
        let phi_m = self.coeffs.len();
        // columns: zeta_d^i embedded into Q(zeta_m)
        let cols: Vec<Scalar> = (0..phi_d).map(|i| Scalar::zeta_pow(d, i as i64).embed(m)).collect();
        let mut a: Vec<Vec<BigRational>> = (0..phi_m)
            .map(|r| {
                let mut row: Vec<BigRational> = cols.iter().map(|c| c.coeffs[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let sol = solve_rational(&mut a, phi_d)?;
        Some(Scalar { order: d, coeffs: sol })
    }

    pub fn from_root(r: &RootOfUnity) -> Scalar {
        Scalar::zeta_pow(r.order, r.exponent as i64)
    }
}

/// Solves an augmented rational system in place; returns `None` if inconsistent.
fn solve_rational(a: &mut [Vec<BigRational>], nvars: usize) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nvars {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..=nvars {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[nvars].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); nvars];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = a[i][nvars].clone();
    }
    Some(sol)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        let (_, a, b) = Scalar::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::from_rational(q)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        let (order, a, b) = Scalar::aligned(self, rhs);
        Scalar { order, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        let (order, a, b) = Scalar::aligned(self, rhs);
        Scalar { order, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect() }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        if self.order == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.order == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        let (order, a, b) = Scalar::aligned(self, rhs);
        let t = table(order);
        let mut prod = vec![BigRational::zero(); t.phi];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                let pw = &t.powers[(i + j) % order as usize];
                for (k, e) in pw.iter().enumerate() {
                    if e.is_zero() {
                        continue;
                    }
                    if e.is_one() {
                        prod[k] += &xy;
                    } else if (-e).is_one() {
                        prod[k] -= &xy;
                    } else {
                        prod[k] += &xy * BigRational::from_integer(e.clone());
                    }
                }
            }
        }
        Scalar { order, coeffs: prod }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if self.order == rhs.order {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a += b;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        if self.order == rhs.order {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a -= b;
            }
        } else {
            *self = &*self - rhs;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    /// Literal form accepted by the expression grammar, e.g. `1/2 - 3*zeta(5)^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.descend();
        let mut out = String::new();
        for (i, c) in s.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let body = match i {
                0 => fmt_rational(&a),
                _ => {
                    let z = if i == 1 {
                        format!("zeta({})", s.order)
                    } else {
                        format!("zeta({})^{}", s.order, i)
                    };
                    if a.is_one() {
                        z
                    } else {
                        format!("{}*{}", fmt_rational(&a), z)
                    }
                }
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// `zeta_m^a`, stored with `0 <= a < m`.
#[derive(Clone, Copy, Debug)]
pub struct RootOfUnity {
    order: u32,
    exponent: u32,
}

impl RootOfUnity {
    pub fn new(order: u32, exponent: i64) -> Self {
        assert!(order >= 1);
        RootOfUnity { order, exponent: exponent.rem_euclid(order as i64) as u32 }
    }

    pub fn one() -> Self {
        RootOfUnity { order: 1, exponent: 0 }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    pub fn inverse(&self) -> Self {
        RootOfUnity::new(self.order, -(self.exponent as i64))
    }

    pub fn pow(&self, k: i64) -> Self {
        RootOfUnity::new(self.order, self.exponent as i64 * k)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let l = self.order.lcm(&other.order);
        let a = self.exponent as i64 * (l / self.order) as i64;
        let b = other.exponent as i64 * (l / other.order) as i64;
        RootOfUnity::new(l, a + b)
    }

    /// Multiplicative order of the element itself.
    pub fn multiplicative_order(&self) -> u32 {
        if self.exponent == 0 {
            1
        } else {
            self.order / self.exponent.gcd(&self.order)
        }
    }

    pub fn to_scalar(&self) -> Scalar {
        Scalar::from_root(self)
    }
}

impl PartialEq for RootOfUnity {
    fn eq(&self, other: &Self) -> bool {
        self.exponent as u64 * other.order as u64 == other.exponent as u64 * self.order as u64
    }
}

impl Eq for RootOfUnity {}

/// `v_(1 - zeta_p)(a)`; `None` stands for the valuation of zero.
pub fn one_minus_zeta_valuation(a: &Scalar, p: u32) -> Result<Option<u32>> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if a.is_zero() {
        return Ok(None);
    }
    let d = a.descend();
    if !p.is_multiple_of(d.order()) {
        return Err(Error::NonIntegral(format!("{a} does not lie in Q(zeta_{p})")));
    }
    let e = d.embed(p);
    if !e.is_integral() {
        return Err(Error::NonIntegral(format!("{a} is not in Z[zeta_{p}]")));
    }
    let n = e.norm_to_rational();
    debug_assert!(n.is_integer());
    let mut n = n.numer().abs();
    let pb = BigInt::from(p);
    let mut v = 0u32;
    while !n.is_zero() && (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    Ok(Some(v))
}

/// Parses a nonnegative rational literal like `3` or `3/4` (no sign).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        Some(BigRational::new(a, b))
    } else {
        Some(BigRational::from_integer(s.parse().ok()?))
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}
