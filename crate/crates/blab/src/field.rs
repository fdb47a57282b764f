//! Prime fields of size about 2^61 and their quadratic/cubic extensions.
//!
//! Used by the fingerprinting machinery: polynomial identity testing needs
//! evaluation points that are roots of a pivot polynomial, and those roots
//! may live in a small extension of the base field. Elements of `F_{q^e}`
//! (e <= 3) are stored as fixed arrays of residues modulo an irreducible
//! modulus polynomial.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;

/// Deterministic Miller-Rabin for u64 (the listed witness set is exact below 2^64).
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, m: u64) -> u64 {
    // m prime, a != 0
    pow_mod(a, m - 2, m)
}

/// Fixed list of primes just above 2^61, indexed by fingerprint seeds.
pub fn prime_by_index(idx: usize) -> u64 {
    const COUNT: usize = 8;
    static PRIMES: std::sync::OnceLock<[u64; 8]> = std::sync::OnceLock::new();
    let primes = PRIMES.get_or_init(|| {
        let mut out = [0u64; COUNT];
        let mut n = (1u64 << 61) + 1;
        let mut found = 0;
        while found < COUNT {
            if is_prime_u64(n) {
                out[found] = n;
                found += 1;
            }
            n += 2;
        }
        out
    });
    primes[idx % 8]
}

/// Description of `F_{q^e}`: the prime `q` and, for `e > 1`, a monic
/// irreducible modulus of degree `e` over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField {
    pub q: u64,
    pub e: usize,
    /// Coefficients of the monic modulus, degree `e`; `modulus[e] == 1`.
    /// Unused entries are zero. For `e == 1` the modulus is ignored.
    pub modulus: [u64; 4],
}

/// An element of `F_{q^e}`, `e <= 3`, as coefficients of `1, t, t^2`.
pub type ExtElem = [u64; 3];

impl ExtField {
    pub fn prime(q: u64) -> Self {
        ExtField { q, e: 1, modulus: [0, 1, 0, 0] }
    }

    pub fn zero(&self) -> ExtElem {
        [0, 0, 0]
    }

    pub fn one(&self) -> ExtElem {
        [1 % self.q, 0, 0]
    }

    pub fn from_base(&self, a: u64) -> ExtElem {
        [a % self.q, 0, 0]
    }

    /// Embed a signed big integer into the base field.
    pub fn from_bigint(&self, c: &BigInt) -> ExtElem {
        let q = BigInt::from(self.q);
        let mut r = c % &q;
        if r.is_negative() {
            r += &q;
        }
        self.from_base(r.to_u64().expect("reduced residue fits u64"))
    }

    pub fn is_zero(&self, a: &ExtElem) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let q = self.q;
        let mut out = [0u64; 3];
        for i in 0..3 {
            let s = a[i] + b[i];
            out[i] = if s >= q { s - q } else { s };
        }
        out
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let q = self.q;
        let mut out = [0u64; 3];
        for i in 0..3 {
            out[i] = if a[i] >= b[i] { a[i] - b[i] } else { a[i] + q - b[i] };
        }
        out
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let q = self.q;
        if self.e == 1 {
            return [mul_mod(a[0], b[0], q), 0, 0];
        }
        // schoolbook product, degree <= 4
        let mut prod = [0u64; 5];
        for i in 0..self.e {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.e {
                if b[j] == 0 {
                    continue;
                }
                let t = mul_mod(a[i], b[j], q);
                prod[i + j] = (prod[i + j] + t) % q;
            }
        }
        // reduce by the monic modulus
        for d in (self.e..=4).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for k in 0..self.e {
                let m = mul_mod(c, self.modulus[k], q);
                let idx = d - self.e + k;
                prod[idx] = (prod[idx] + q - m % q) % q;
            }
        }
        [prod[0], prod[1], prod[2]]
    }

    pub fn pow(&self, a: &ExtElem, mut exp: u128) -> ExtElem {
        let mut acc = self.one();
        let mut base = *a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: &ExtElem) -> ExtElem {
        assert!(!self.is_zero(a), "inverse of zero field element");
        if self.e == 1 {
            return [inv_mod(a[0], self.q), 0, 0];
        }
        // a^(q^e - 2)
        let order = (self.q as u128).pow(self.e as u32) - 2;
        self.pow(a, order)
    }

    pub fn neg(&self, a: &ExtElem) -> ExtElem {
        self.sub(&self.zero(), a)
    }
}

/// Arithmetic on dense univariate polynomials over `F_q` (coefficients
/// ascending). Only what root extraction for degree <= 4 needs.
pub struct FpPoly;

impl FpPoly {
    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn rem(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut r: Vec<u64> = a.to_vec();
        Self::trim(&mut r);
        let db = b.len() - 1;
        let lb_inv = inv_mod(b[db], q);
        while r.len() >= b.len() && !r.is_empty() {
            let dr = r.len() - 1;
            let c = mul_mod(r[dr], lb_inv, q);
            for k in 0..=db {
                let t = mul_mod(c, b[k], q);
                let idx = dr - db + k;
                r[idx] = (r[idx] + q - t) % q;
            }
            Self::trim(&mut r);
        }
        r
    }

    fn gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        Self::trim(&mut x);
        Self::trim(&mut y);
        while !y.is_empty() {
            let r = Self::rem(&x, &y, q);
            x = y;
            y = r;
        }
        // make monic
        if let Some(&lc) = x.last() {
            let inv = inv_mod(lc, q);
            for c in &mut x {
                *c = mul_mod(*c, inv, q);
            }
        }
        x
    }

    /// x^n mod f, with n up to q^2 (u128 exponent).
    fn x_pow_mod(n: u128, f: &[u64], q: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut base = vec![0u64, 1];
        if f.len() <= 2 {
            // f linear: x = root constant
            base = Self::rem(&base, f, q);
        }
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = Self::mul_mod_f(&acc, &base, f, q);
            }
            base = Self::mul_mod_f(&base, &base, f, q);
            n >>= 1;
        }
        acc
    }

    fn mul_mod_f(a: &[u64], b: &[u64], f: &[u64], q: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                prod[i + j] = (prod[i + j] + mul_mod(ai, bj, q)) % q;
            }
        }
        Self::rem(&prod, f, q)
    }

    /// Polynomial minus x, used for gcd(x^q - x, f).
    fn sub_x(mut a: Vec<u64>, q: u64) -> Vec<u64> {
        if a.len() < 2 {
            a.resize(2, 0);
        }
        a[1] = (a[1] + q - 1) % q;
        Self::trim(&mut a);
        a
    }

    /// All roots of `f` in `F_q` (distinct), via gcd with x^q - x and
    /// Cantor-Zassenhaus splitting. `f` need not be squarefree.
    pub fn roots_in_fq<R: Rng>(f: &[u64], q: u64, rng: &mut R) -> Vec<u64> {
        let mut f = f.to_vec();
        Self::trim(&mut f);
        let mut out = Vec::new();
        if f.is_empty() {
            return out;
        }
        // strip root at 0
        while f.len() > 1 && f[0] == 0 {
            if !out.contains(&0) {
                out.push(0);
            }
            f.remove(0);
        }
        if f.len() == 1 {
            return out;
        }
        let xq = Self::x_pow_mod(q as u128, &f, q);
        let lin = Self::gcd(&Self::sub_x(xq, q), &f, q);
        if lin.len() <= 1 {
            return out;
        }
        let mut stack = vec![lin];
        while let Some(g) = stack.pop() {
            if g.len() == 2 {
                // monic linear: x + g0 -> root = -g0
                out.push((q - g[0]) % q);
                continue;
            }
            if g.len() <= 1 {
                continue;
            }
            // random split: gcd((x+b)^((q-1)/2) - 1, g)
            loop {
                let b = rng.gen_range(0..q);
                let shifted = vec![b, 1];
                let mut h = vec![1u64];
                // (x+b)^((q-1)/2) mod g
                let mut base = Self::rem(&shifted, &g, q);
                let mut n = (q - 1) / 2;
                while n > 0 {
                    if n & 1 == 1 {
                        h = Self::mul_mod_f(&h, &base, &g, q);
                    }
                    base = Self::mul_mod_f(&base, &base, &g, q);
                    n >>= 1;
                }
                // h - 1
                if h.is_empty() {
                    h = vec![q - 1];
                } else {
                    h[0] = (h[0] + q - 1) % q;
                }
                Self::trim(&mut h);
                let d = Self::gcd(&h, &g, q);
                if d.len() > 1 && d.len() < g.len() {
                    let quot = Self::div_exact(&g, &d, q);
                    stack.push(d);
                    stack.push(quot);
                    break;
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn div_exact(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        Self::trim(&mut r);
        let db = b.len() - 1;
        let lb_inv = inv_mod(b[db], q);
        let mut quo = vec![0u64; r.len().saturating_sub(db)];
        while r.len() >= b.len() && !r.is_empty() {
            let dr = r.len() - 1;
            let c = mul_mod(r[dr], lb_inv, q);
            quo[dr - db] = c;
            for k in 0..=db {
                let t = mul_mod(c, b[k], q);
                let idx = dr - db + k;
                r[idx] = (r[idx] + q - t) % q;
            }
            Self::trim(&mut r);
        }
        quo
    }

    /// Find a root of `f` in `F_q` or in an extension of degree 2 or 3.
    ///
    /// Degrees up to 4 are supported as long as the polynomial has a factor
    /// of degree <= 3 (pivot polynomials in scope have degree <= 3). Returns
    /// the extension description and the root, or `None` if unsupported.
    pub fn any_root<R: Rng>(f: &[u64], q: u64, rng: &mut R) -> Option<(ExtField, ExtElem)> {
        let mut f = f.to_vec();
        Self::trim(&mut f);
        if f.len() <= 1 {
            return None;
        }
        let roots = Self::roots_in_fq(&f, q, rng);
        if let Some(&r) = roots.first() {
            return Some((ExtField::prime(q), [r, 0, 0]));
        }
        // No linear factor. Make f monic and squarefree-ish by working with
        // an irreducible factor of degree 2 or 3.
        let lc_inv = inv_mod(*f.last().unwrap(), q);
        for c in &mut f {
            *c = mul_mod(*c, lc_inv, q);
        }
        let deg = f.len() - 1;
        if deg == 2 || deg == 3 {
            // No roots in F_q and degree 2 or 3 => irreducible. Use f itself
            // as the extension modulus; the class of x is a root.
            let mut modulus = [0u64; 4];
            for (i, &c) in f.iter().enumerate() {
                modulus[i] = c;
            }
            let ext = ExtField { q, e: deg, modulus };
            return Some((ext, [0, 1, 0]));
        }
        if deg == 4 {
            // Either a product of two irreducible quadratics or irreducible.
            let xq2 = Self::x_pow_mod((q as u128) * (q as u128), &f, q);
            let h = Self::gcd(&Self::sub_x(xq2, q), &f, q);
            if h.len() == 3 {
                let mut modulus = [0u64; 4];
                for (i, &c) in h.iter().enumerate() {
                    modulus[i] = c;
                }
                return Some((ExtField { q, e: 2, modulus }, [0, 1, 0]));
            }
            if h.len() == 5 {
                // split the product of two quadratics
                loop {
                    let b = rng.gen_range(0..q);
                    let shifted = vec![b, 1];
                    let mut acc = vec![1u64];
                    let mut base = Self::rem(&shifted, &h, q);
                    let mut n = ((q as u128) * (q as u128) - 1) / 2;
                    while n > 0 {
                        if n & 1 == 1 {
                            acc = Self::mul_mod_f(&acc, &base, &h, q);
                        }
                        base = Self::mul_mod_f(&base, &base, &h, q);
                        n >>= 1;
                    }
                    if acc.is_empty() {
                        acc = vec![q - 1];
                    } else {
                        acc[0] = (acc[0] + q - 1) % q;
                    }
                    Self::trim(&mut acc);
                    let d = Self::gcd(&acc, &h, q);
                    if d.len() == 3 {
                        let mut modulus = [0u64; 4];
                        for (i, &c) in d.iter().enumerate() {
                            modulus[i] = c;
                        }
                        return Some((ExtField { q, e: 2, modulus }, [0, 1, 0]));
                    }
                }
            }
            return None;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn primes_are_prime_and_distinct() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..8 {
            let p = prime_by_index(i);
            assert!(p > 1 << 61);
            assert!(is_prime_u64(p));
            assert!(seen.insert(p));
        }
    }

    #[test]
    fn base_field_arithmetic() {
        let q = prime_by_index(0);
        let f = ExtField::prime(q);
        let a = f.from_base(123456789);
        let b = f.from_base(987654321);
        let ab = f.mul(&a, &b);
        assert_eq!(f.mul(&ab, &f.inv(&b)), a);
        assert_eq!(f.sub(&f.add(&a, &b), &b), a);
    }

    #[test]
    fn quadratic_extension_root() {
        let q = prime_by_index(1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // t^2 + 1 has a root in F_q or F_{q^2}; verify it evaluates to zero.
        let f = vec![1u64, 0, 1];
        let (ext, root) = FpPoly::any_root(&f, q, &mut rng).unwrap();
        let r2 = ext.mul(&root, &root);
        let val = ext.add(&r2, &ext.one());
        assert!(ext.is_zero(&val));
    }

    #[test]
    fn cubic_roots_found() {
        let q = prime_by_index(2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // (x - 3)(x - 5)(x - 11) expanded, roots recovered
        let a = 3u64;
        let b = 5u64;
        let c = 11u64;
        let s1 = a + b + c;
        let s2 = a * b + a * c + b * c;
        let s3 = a * b * c;
        let f = vec![q - s3, s2, q - s1, 1];
        let roots = FpPoly::roots_in_fq(&f, q, &mut rng);
        assert_eq!(roots, vec![3, 5, 11]);
    }

    #[test]
    fn irreducible_cubic_gets_extension() {
        let q = prime_by_index(0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // x^3 - 2 might or might not have a root mod q; whatever the case,
        // any_root must return a point where it vanishes.
        let f = vec![q - 2, 0, 0, 1];
        let (ext, root) = FpPoly::any_root(&f, q, &mut rng).unwrap();
        let r3 = ext.mul(&ext.mul(&root, &root), &root);
        let val = ext.sub(&r3, &ext.from_base(2));
        assert!(ext.is_zero(&val));
    }
}
