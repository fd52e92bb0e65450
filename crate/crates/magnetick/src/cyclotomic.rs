//! Exact arithmetic in cyclotomic fields Q(zeta_n).
//!
//! Elements are stored as rational polynomials in a primitive n-th root of
//! unity, reduced modulo the n-th cyclotomic polynomial so that equality is
//! decidable. Binary operations lift both operands to the lcm of their
//! conductors.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

/// An element of Q(zeta_n), reduced modulo the n-th cyclotomic polynomial.
#[derive(Clone)]
pub struct Cyclotomic {
    conductor: u64,
    /// Length `conductor`; entries beyond deg(Phi_n) - 1 are zero.
    coeffs: Vec<BigRational>,
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_canonical(other) == Ordering::Equal
    }
}

impl Eq for Cyclotomic {}

fn poly_mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division of integer polynomials, panics on nonzero remainder.
fn poly_div_int(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    if rem.len() < den.len() {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![BigInt::zero()];
    }
    let qd = rem.len() - den.len();
    let mut quot = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            quot[k] = c.clone();
            for (i, d) in den.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "nonexact polynomial division");
    quot
}

/// Phi_n as integer coefficients, low degree first. Memoized.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    static CACHE: Mutex<Option<HashMap<u64, Vec<BigInt>>>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    let cache = guard.get_or_insert_with(HashMap::new);
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    // Phi_d = (x^d - 1) / prod of Phi_e over proper divisors e of d, built
    // bottom-up over the divisors of n.
    let mut local: HashMap<u64, Vec<BigInt>> = HashMap::new();
    local.insert(1, vec![BigInt::from(-1), BigInt::from(1)]);
    let mut divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    divisors.sort_unstable();
    for &d in &divisors {
        if local.contains_key(&d) {
            continue;
        }
        if let Some(p) = cache.get(&d) {
            local.insert(d, p.clone());
            continue;
        }
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = BigInt::from(-1);
        num[d as usize] = BigInt::from(1);
        let mut den = vec![BigInt::one()];
        for &e in &divisors {
            if e < d && d % e == 0 {
                den = poly_mul_int(&den, &local[&e]);
            }
        }
        local.insert(d, poly_div_int(&num, &den));
    }
    for (d, p) in &local {
        cache.entry(*d).or_insert_with(|| p.clone());
    }
    local.remove(&n).expect("computed")
}

impl Cyclotomic {
    pub fn zero(n: u64) -> Self {
        Cyclotomic {
            conductor: n,
            coeffs: vec![BigRational::zero(); n as usize],
        }
    }

    pub fn one(n: u64) -> Self {
        Self::from_rational_n(BigRational::one(), n)
    }

    pub fn from_rational_n(q: BigRational, n: u64) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[0] = q;
        c
    }

    pub fn from_integer(v: i64) -> Self {
        Self::from_rational_n(BigRational::from(BigInt::from(v)), 1)
    }

    /// zeta_n^k
    pub fn root_of_unity(n: u64, k: u64) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[(k % n) as usize] = BigRational::one();
        c.reduce();
        c
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Reduce modulo Phi_n so the representation is canonical.
    fn reduce(&mut self) {
        let n = self.conductor;
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        // Divide self by monic Phi_n, keep the remainder.
        for k in (deg..self.coeffs.len()).rev() {
            let c = self.coeffs[k].clone();
            if c.is_zero() {
                continue;
            }
            self.coeffs[k] = BigRational::zero();
            for (i, d) in phi.iter().enumerate().take(deg) {
                let delta = &c * BigRational::from(d.clone());
                self.coeffs[k - deg + i] -= delta;
            }
        }
    }

    /// Re-express in Q(zeta_m) for n | m.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.conductor == 0, "lift target must be a multiple");
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut out = Self::zero(m);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[k * step] = c.clone();
            }
        }
        out.reduce();
        out
    }

    fn lcm_pair(&self, other: &Self) -> (Self, Self) {
        let m = num::integer::lcm(self.conductor, other.conductor);
        (self.lift(m), other.lift(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.lcm_pair(other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (mut a, b) = self.lcm_pair(other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x -= y;
        }
        a
    }

    pub fn neg(&self) -> Self {
        let mut a = self.clone();
        for x in a.coeffs.iter_mut() {
            *x = -x.clone();
        }
        a
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.lcm_pair(other);
        let n = a.conductor;
        let mut out = Self::zero(n);
        out.coeffs = vec![BigRational::zero(); 2 * n as usize];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    out.coeffs[i + j] += x * y;
                }
            }
        }
        // Fold exponents >= n via zeta^n = 1, then reduce mod Phi_n.
        for k in (n as usize..out.coeffs.len()).rev() {
            let c = out.coeffs[k].clone();
            if !c.is_zero() {
                out.coeffs[k] = BigRational::zero();
                out.coeffs[k - n as usize] += c;
            }
        }
        out.coeffs.truncate(n as usize);
        out.reduce();
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut a = self.clone();
        for x in a.coeffs.iter_mut() {
            *x *= q;
        }
        a
    }

    /// Complex conjugation, zeta^k -> zeta^(n-k).
    pub fn conj(&self) -> Self {
        let n = self.conductor as usize;
        let mut out = Self::zero(self.conductor);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[(n - k) % n] += c;
            }
        }
        out.reduce();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// The value as an exact integer, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        let q = self.is_rational()?;
        if q.is_integer() {
            Some(q.to_integer())
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> num::complex::Complex64 {
        use std::f64::consts::TAU;
        let n = self.conductor as f64;
        let mut z = num::complex::Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = rational_to_f64(c);
            let ang = TAU * (k as f64) / n;
            z += num::complex::Complex64::new(q * ang.cos(), q * ang.sin());
        }
        z
    }

    /// Deterministic total order used for canonical character ordering.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let (a, b) = self.lcm_pair(other);
        for (x, y) in a.coeffs.iter().zip(b.coeffs.iter()) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    let n = q.numer();
    let d = q.denom();
    let fn_ = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let fd = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    fn_ / fd
}

impl PartialEq<i64> for Cyclotomic {
    fn eq(&self, other: &i64) -> bool {
        match self.as_integer() {
            Some(v) => v == BigInt::from(*other),
            None => false,
        }
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let n = self.conductor;
        let mut terms: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let base = if k == 0 {
                "1".to_string()
            } else if n == 4 && k == 1 {
                "i".to_string()
            } else if k == 1 {
                format!("z{}", n)
            } else {
                format!("z{}^{}", n, k)
            };
            let t = if k == 0 {
                format!("{}", c)
            } else if c.is_one() {
                base
            } else if (-c.clone()).is_one() {
                format!("-{}", base)
            } else {
                format!("{}*{}", c, base)
            };
            terms.push(t);
        }
        let mut s = String::new();
        for (i, t) in terms.iter().enumerate() {
            if i == 0 {
                s.push_str(t);
            } else if let Some(stripped) = t.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(stripped);
            } else {
                s.push_str(" + ");
                s.push_str(t);
            }
        }
        write!(f, "{}", s)
    }
}
