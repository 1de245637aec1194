//! Exact values of the form `int + 0.b1 b2 b3 ...` (binary fraction).
//!
//! Repeated halving gives line scans denominators of up to `2^n`, so plain
//! rationals cost `O(n)` per operation there. Here the fractional bits are a
//! persistent list shared between successive values: halving prepends one
//! bit, doubling drops one, both in constant time.

use std::cmp::Ordering;
use std::rc::Rc;

use crate::rational::Rational;

/// Fractional bits, most significant first. Canonical: empty, or ending in
/// a one bit, so the fraction is zero exactly when the list is empty.
#[derive(Clone, Default)]
struct Bits(Option<Rc<Node>>);

struct Node {
    bit: bool,
    rest: Bits,
}

impl Drop for Node {
    // long chains would overflow the stack with the default recursive drop
    fn drop(&mut self) {
        let mut next = self.rest.0.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut node) => next = node.rest.0.take(),
                Err(_) => break,
            }
        }
    }
}

impl Bits {
    fn cons(bit: bool, rest: &Bits) -> Bits {
        if !bit && rest.0.is_none() {
            return Bits(None);
        }
        Bits(Some(Rc::new(Node { bit, rest: rest.clone() })))
    }

    fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    fn head(&self) -> bool {
        self.0.as_ref().is_some_and(|n| n.bit)
    }

    fn tail(&self) -> Bits {
        self.0.as_ref().map_or_else(Bits::default, |n| n.rest.clone())
    }

    fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let n = cur?;
            cur = n.rest.0.as_deref();
            Some(n.bit)
        })
    }
}

#[derive(Clone)]
pub(crate) struct Dyadic {
    int: i128,
    frac: Bits,
}

impl Dyadic {
    pub(crate) fn int(n: i128) -> Self {
        Dyadic { int: n, frac: Bits::default() }
    }

    pub(crate) fn add_int(&self, c: i128) -> Self {
        Dyadic { int: self.int + c, frac: self.frac.clone() }
    }

    pub(crate) fn half(&self) -> Self {
        Dyadic { int: self.int.div_euclid(2), frac: Bits::cons(self.int.rem_euclid(2) == 1, &self.frac) }
    }

    pub(crate) fn double(&self) -> Self {
        Dyadic { int: 2 * self.int + i128::from(self.frac.head()), frac: self.frac.tail() }
    }

    /// `self + c / 2`.
    pub(crate) fn add_half_int(&self, c: i128) -> Self {
        let (q, r) = (c.div_euclid(2), c.rem_euclid(2) == 1);
        if !r {
            return self.add_int(q);
        }
        // adding 0.1 flips the first bit, carrying when it was set
        let carry = self.frac.head();
        Dyadic { int: self.int + q + i128::from(carry), frac: Bits::cons(!carry, &self.frac.tail()) }
    }

    pub(crate) fn cmp_int(&self, n: i128) -> Ordering {
        match self.int.cmp(&n) {
            Ordering::Equal if !self.frac.is_zero() => Ordering::Greater,
            o => o,
        }
    }

    /// Whether `self + other + c >= 0`.
    pub(crate) fn sum_nonneg(&self, other: &Dyadic, c: i128) -> bool {
        let m = self.int + other.int + c;
        if m >= 0 {
            return true;
        }
        if m < -1 {
            return false;
        }
        // m == -1: need the two fractions to sum to at least one
        let (mut f, mut g) = (self.frac.iter(), other.frac.iter());
        loop {
            match (f.next(), g.next()) {
                (None, None) => return false,
                (x, y) => match (x.unwrap_or(false), y.unwrap_or(false)) {
                    (true, true) => return true,
                    (false, false) => return false,
                    _ => {}
                },
            }
        }
    }

    /// The exact value divided by `scale`.
    #[cfg(test)]
    pub(crate) fn to_rational(&self, scale: i128) -> Rational {
        use num_bigint::BigInt;
        use num_rational::BigRational;
        use num_traits::One;

        let bits: Vec<bool> = self.frac.iter().collect();
        let mut numer = BigInt::from(self.int);
        for &b in &bits {
            numer = numer * 2 + u8::from(b);
        }
        let denom = (BigInt::one() << bits.len()) * BigInt::from(scale);
        Rational::from(BigRational::new(numer, denom))
    }
}

/// Positions and energies multiplied by the least common denominator, when
/// that fits comfortably in machine integers.
pub(crate) fn scale_to_ints(values: &[&[Rational]]) -> Option<(Vec<Vec<i128>>, i128)> {
    const LIMIT: i128 = 1 << 62;
    let mut lcm: i128 = 1;
    for v in values.iter().flat_map(|v| v.iter()) {
        let (_, d) = v.small_parts()?;
        let g = num_integer::gcd(lcm, d);
        lcm = (lcm / g).checked_mul(d).filter(|&l| l < LIMIT)?;
    }
    let scaled = values
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    let (n, d) = x.small_parts()?;
                    n.checked_mul(lcm / d).filter(|s| s.abs() < LIMIT)
                })
                .collect::<Option<Vec<i128>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((scaled, lcm))
}
