use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The residue ring Z/m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Zm {
    m: u64,
}

impl TryFrom<u64> for Zm {
    type Error = Error;
    fn try_from(m: u64) -> Result<Self> {
        Zm::new(m)
    }
}

impl From<Zm> for u64 {
    fn from(r: Zm) -> u64 {
        r.m
    }
}

impl Zm {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 || m > u32::MAX as u64 {
            return Err(Error::InvalidModulus(m));
        }
        Ok(Zm { m })
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.m
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.m
    }

    #[inline]
    pub fn from_i64(self, a: i64) -> u64 {
        a.rem_euclid(self.m as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// gcd(a, m), the canonical generator of the ideal (a).
    pub fn ideal(self, a: u64) -> u64 {
        gcd(a % self.m, self.m)
    }

    pub fn is_unit(self, a: u64) -> bool {
        self.ideal(a) == 1
    }

    pub fn inv(self, a: u64) -> Option<u64> {
        let (g, x, _) = ext_gcd(a as i64 % self.m as i64, self.m as i64);
        (g == 1).then(|| self.from_i64(x))
    }

    /// A unit `u` with `u * a ≡ gcd(a, m)`.
    pub fn normalizing_unit(self, a: u64) -> u64 {
        let a = a % self.m;
        if a == 0 {
            return 1;
        }
        let d = gcd(a, self.m);
        let md = self.m / d;
        // (a/d) is a unit mod m/d; lift its inverse to a unit mod m.
        let w = (a / d) % md;
        let base = if md == 1 {
            0
        } else {
            let (_, x, _) = ext_gcd(w as i64, md as i64);
            x.rem_euclid(md as i64) as u64
        };
        let mut c = base;
        while gcd(c, self.m) != 1 {
            c += md;
        }
        c % self.m
    }

    pub fn factorization(self) -> BTreeMap<u64, u32> {
        factorize(self.m)
    }

    /// The prime p when m is a power of p.
    pub fn prime_power_base(self) -> Option<u64> {
        let f = self.factorization();
        (f.len() == 1).then(|| *f.keys().next().unwrap())
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Returns (g, x, y) with a x + b y = g >= 0.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn factorize(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).get(&n) == Some(&1)
}

/// Finite cardinality stored as a prime factorization.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Order(pub BTreeMap<u64, u32>);

impl Order {
    pub fn one() -> Self {
        Order(BTreeMap::new())
    }

    pub fn of(n: u64) -> Self {
        Order(factorize(n))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul_assign_num(&mut self, n: u64) {
        for (p, e) in factorize(n) {
            *self.0.entry(p).or_insert(0) += e;
        }
    }

    pub fn mul(&self, other: &Order) -> Order {
        let mut out = self.clone();
        for (&p, &e) in &other.0 {
            *out.0.entry(p).or_insert(0) += e;
        }
        out
    }

    /// Exact quotient; `None` if `other` does not divide `self`.
    pub fn div(&self, other: &Order) -> Option<Order> {
        let mut out = self.clone();
        for (&p, &e) in &other.0 {
            let slot = out.0.get_mut(&p)?;
            if *slot < e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                out.0.remove(&p);
            }
        }
        Some(out)
    }

    /// The value as an integer when it fits.
    pub fn to_u128(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for (&p, &e) in &self.0 {
            for _ in 0..e {
                acc = acc.checked_mul(p as u128)?;
            }
        }
        Some(acc)
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.0.get(&p).copied().unwrap_or(0)
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizing_unit_hits_gcd() {
        for m in 2..40u64 {
            let r = Zm::new(m).unwrap();
            for a in 0..m {
                let u = r.normalizing_unit(a);
                assert!(r.is_unit(u), "m={m} a={a}");
                assert_eq!(r.mul(u, a), r.ideal(a) % m, "m={m} a={a}");
            }
        }
    }

    #[test]
    fn inverse_and_pow() {
        let r = Zm::new(9).unwrap();
        assert_eq!(r.inv(2), Some(5));
        assert_eq!(r.inv(3), None);
        assert_eq!(r.pow(2, 6), 1);
    }

    #[test]
    fn order_arithmetic() {
        let a = Order::of(12);
        let b = Order::of(4);
        assert_eq!(a.div(&b), Some(Order::of(3)));
        assert_eq!(b.div(&a), None);
        assert_eq!(a.mul(&b).to_u128(), Some(48));
    }
}
