//! Finite fields `F_q`, `q = p^r`, in polynomial representation over `F_p`.
//!
//! Elements are coefficient vectors of length `r` (constant term first). Internally
//! every element also has a dense integer code `Σ coeffs[i]·p^i` in `[0, q)`, which
//! is what the discrete-log tables are indexed by.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, prime_factors};

/// Default upper bound on `q`; the index tables hold two arrays of `q` words.
pub const DEFAULT_Q_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the configured bound {1}")]
    BoundExceeded(u64, u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("element has {got} coefficients, expected {expected}")]
    BadElement { expected: usize, got: usize },
    #[error("element {0:?} is not a generator of the multiplicative group")]
    NotAGenerator(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub r: u32,
    pub q: u32,
    /// Monic irreducible modulus of degree `r`, constant term first, leading 1 included.
    /// Empty for prime fields.
    pub modulus_poly: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    pub coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Self { coeffs }
    }
}

pub fn make_field(p: u64, r: u32) -> Result<FieldSpec, FieldError> {
    make_field_bounded(p, r, DEFAULT_Q_BOUND)
}

/// Builds `F_{p^r}` provided `p^r <= bound`. For `r > 1` the modulus is the first monic
/// irreducible polynomial of degree `r` in ascending code order.
pub fn make_field_bounded(p: u64, r: u32, bound: u64) -> Result<FieldSpec, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if r == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = p
        .checked_pow(r)
        .filter(|&q| q <= bound && q <= u32::MAX as u64)
        .ok_or(FieldError::BoundExceeded(p.saturating_pow(r), bound))?;
    let p = p as u32;
    let modulus_poly = if r == 1 {
        Vec::new()
    } else {
        smallest_irreducible(p, r as usize)
    };
    Ok(FieldSpec {
        p,
        r,
        q: q as u32,
        modulus_poly,
    })
}

fn smallest_irreducible(p: u32, r: usize) -> Vec<u32> {
    let lower_count = (p as u64).pow(r as u32);
    for code in 0..lower_count {
        let mut f = decode_digits(code, p, r);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

fn decode_digits(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

/// Exhaustive check: no monic polynomial of degree `1..=deg/2` divides `f`.
/// `f` is monic, constant term first.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        for code in 0..(p as u64).pow(d as u32) {
            let mut g = decode_digits(code, p, d);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Remainder of `f` modulo the monic `g` over `F_p`.
fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let mut rem: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    let p = p as u64;
    for top in (dg..rem.len()).rev() {
        let c = rem[top] % p;
        if c == 0 {
            continue;
        }
        let shift = top - dg;
        for (i, &gc) in g.iter().enumerate() {
            rem[shift + i] = (rem[shift + i] + (p - c) * gc as u64) % p;
        }
    }
    rem.truncate(dg);
    rem.into_iter().map(|c| (c % p) as u32).collect()
}

impl FieldSpec {
    pub fn zero(&self) -> FieldElement {
        FieldElement::new(vec![0; self.r as usize])
    }

    pub fn one(&self) -> FieldElement {
        self.decode(1)
    }

    pub fn encode(&self, x: &FieldElement) -> u32 {
        x.coeffs
            .iter()
            .rev()
            .fold(0u32, |acc, &c| acc * self.p + c)
    }

    pub fn decode(&self, code: u32) -> FieldElement {
        FieldElement::new(decode_digits(code as u64, self.p, self.r as usize))
    }

    pub fn check(&self, x: &FieldElement) -> Result<(), FieldError> {
        if x.coeffs.len() != self.r as usize || x.coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadElement {
                expected: self.r as usize,
                got: x.coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement::new(
            x.coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(&a, &b)| (a + b) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement::new(x.coeffs.iter().map(|&a| (self.p - a) % self.p).collect())
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let p = self.p as u64;
        if self.r == 1 {
            return FieldElement::new(vec![(x.coeffs[0] as u64 * y.coeffs[0] as u64 % p) as u32]);
        }
        let r = self.r as usize;
        let mut prod = vec![0u64; 2 * r - 1];
        for (i, &a) in x.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
            }
        }
        // x^r = -(m_0 + m_1 x + ... + m_{r-1} x^{r-1})
        for top in (r..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &m) in self.modulus_poly[..r].iter().enumerate() {
                prod[top - r + i] = (prod[top - r + i] + (p - c) * m as u64) % p;
            }
        }
        FieldElement::new(prod[..r].iter().map(|&c| c as u32).collect())
    }

    pub fn pow(&self, x: &FieldElement, mut n: u64) -> FieldElement {
        let mut base = x.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Code of `x + 1` given the code of `x`.
    pub fn succ_code(&self, code: u32) -> u32 {
        let c0 = code % self.p;
        code - c0 + (c0 + 1) % self.p
    }

    /// Code of `-1`.
    pub fn minus_one_code(&self) -> u32 {
        self.p - 1
    }

    pub fn is_char2(&self) -> bool {
        self.p == 2
    }

    fn mul_code(&self, x: u32, y: u32) -> u32 {
        if self.r == 1 {
            return (x as u64 * y as u64 % self.p as u64) as u32;
        }
        self.encode(&self.mul(&self.decode(x), &self.decode(y)))
    }
}

fn has_full_order(f: &FieldSpec, x: &FieldElement, group_factors: &[u64]) -> bool {
    let order = f.q as u64 - 1;
    let one = f.one();
    group_factors.iter().all(|&l| f.pow(x, order / l) != one)
}

/// First element in ascending code order, skipping 0 and 1, whose multiplicative
/// order is `q - 1`.
pub fn find_generator(f: &FieldSpec) -> FieldElement {
    if f.q == 2 {
        return f.one();
    }
    let factors = prime_factors(f.q as u64 - 1);
    (2..f.q)
        .map(|code| f.decode(code))
        .find(|x| has_full_order(f, x, &factors))
        .expect("F_q* is cyclic")
}

/// Everything needed to reproduce a field and its generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldMeta {
    pub p: u32,
    pub r: u32,
    pub q: u32,
    pub generator: Vec<u32>,
    pub modulus_poly: Vec<u32>,
}

/// Discrete-log table for a fixed generator γ.
#[derive(Debug, Clone)]
pub struct IndexTable {
    pub field: FieldSpec,
    pub generator: FieldElement,
    /// `log_of[code]` for nonzero codes; `log_of[0]` is unused.
    log_of: Vec<u32>,
    /// `pow_of[i]` is the code of `γ^i`, `0 <= i < q - 1`.
    pow_of: Vec<u32>,
}

pub fn build_index_table(f: &FieldSpec, generator: &FieldElement) -> Result<IndexTable, FieldError> {
    f.check(generator)?;
    let order = (f.q - 1) as usize;
    let g = f.encode(generator);
    let not_gen = || FieldError::NotAGenerator(generator.coeffs.clone());
    let mut log_of = vec![u32::MAX; f.q as usize];
    let mut pow_of = Vec::with_capacity(order);
    let mut cur = 1u32;
    for i in 0..order {
        if log_of[cur as usize] != u32::MAX || cur == 0 {
            return Err(not_gen());
        }
        log_of[cur as usize] = i as u32;
        pow_of.push(cur);
        cur = f.mul_code(cur, g);
    }
    if cur != 1 {
        return Err(not_gen());
    }
    Ok(IndexTable {
        field: f.clone(),
        generator: generator.clone(),
        log_of,
        pow_of,
    })
}

impl IndexTable {
    pub fn q(&self) -> u32 {
        self.field.q
    }

    pub fn meta(&self) -> FieldMeta {
        FieldMeta {
            p: self.field.p,
            r: self.field.r,
            q: self.field.q,
            generator: self.generator.coeffs.clone(),
            modulus_poly: self.field.modulus_poly.clone(),
        }
    }

    /// `ind_γ` of a nonzero code.
    pub fn ind(&self, code: u32) -> Option<u32> {
        match self.log_of.get(code as usize) {
            Some(&i) if code != 0 => Some(i),
            _ => None,
        }
    }

    pub fn log(&self, x: &FieldElement) -> Option<u32> {
        self.ind(self.field.encode(x))
    }

    pub fn pow_code(&self, i: u32) -> u32 {
        self.pow_of[i as usize]
    }

    pub fn pow(&self, i: u32) -> FieldElement {
        self.field.decode(self.pow_of[i as usize])
    }

    /// `(ind v, ind(v+1))` for every `v ∉ {0, -1}`, in ascending code order of `v`.
    pub fn admissible_pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let minus_one = self.field.minus_one_code();
        (1..self.field.q)
            .filter(move |&v| v != minus_one)
            .map(move |v| (self.log_of[v as usize], self.log_of[self.field.succ_code(v) as usize]))
    }
}
