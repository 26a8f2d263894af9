use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial.
///
/// For phase-space polynomials the layout is `(a_1..a_n, b_1..b_n)`; for
/// action polynomials it is `(l_1..l_n)`. Ordering is graded lexicographic:
/// total degree first, then larger leading exponents first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponents(Box<[u8]>);

impl Exponents {
    pub fn new(exps: impl Into<Box<[u8]>>) -> Self {
        Exponents(exps.into())
    }

    pub fn zeros(len: usize) -> Self {
        Exponents(vec![0; len].into_boxed_slice())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// Split into the `ζ` and `ζ̄` halves of a phase-space monomial.
    pub fn halves(&self) -> (&[u8], &[u8]) {
        self.0.split_at(self.0.len() / 2)
    }

    /// True when the `ζ` and `ζ̄` exponents coincide, i.e. the monomial is `I^a`.
    pub fn is_action(&self) -> bool {
        let (a, b) = self.halves();
        a == b
    }

    /// `(b, a)`: the exponent of the complex-conjugate monomial.
    pub fn conjugate(&self) -> Self {
        let (a, b) = self.halves();
        let mut v = Vec::with_capacity(self.0.len());
        v.extend_from_slice(b);
        v.extend_from_slice(a);
        Exponents(v.into_boxed_slice())
    }

    /// Integer vector `a - b`.
    pub fn resonance_vector(&self) -> Vec<i64> {
        let (a, b) = self.halves();
        a.iter()
            .zip(b)
            .map(|(&x, &y)| x as i64 - y as i64)
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Exponents(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All exponent vectors of length `n` with total degree `k`, in graded-lex order.
pub fn compositions(n: usize, k: usize) -> Vec<Exponents> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<u8>, out: &mut Vec<Exponents>) {
        if prefix.len() + 1 == n {
            prefix.push(k as u8);
            out.push(Exponents::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=k).rev() {
            prefix.push(e as u8);
            rec(n, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Exponents::zeros(0));
        }
        return out;
    }
    rec(n, k, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Binomial coefficient as f64 (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Multinomial coefficient `|l|! / (l_1! ... l_n!)`.
pub fn multinomial(l: &[u8]) -> f64 {
    let mut total = 0usize;
    let mut acc = 1.0;
    for &e in l {
        total += e as usize;
        acc *= binomial(total, e as usize);
    }
    acc
}

/// Dimension of the space of homogeneous degree-`k` polynomials in `n` variables.
pub fn homogeneous_dim(n: usize, k: usize) -> usize {
    binomial(k + n - 1, n - 1).round() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_count_and_order() {
        let c = compositions(3, 2);
        assert_eq!(c.len(), homogeneous_dim(3, 2));
        assert_eq!(c[0].as_slice(), &[2, 0, 0]);
        assert_eq!(c.last().unwrap().as_slice(), &[0, 0, 2]);
        let mut sorted = c.clone();
        sorted.sort();
        assert_eq!(sorted, c);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[1, 1]), 2.0);
        assert_eq!(multinomial(&[3, 0]), 1.0);
        assert_eq!(multinomial(&[2, 1, 1]), 12.0);
    }

    #[test]
    fn graded_order() {
        let a = Exponents::new(vec![1, 0]);
        let b = Exponents::new(vec![0, 2]);
        let c = Exponents::new(vec![0, 1]);
        assert!(a < b);
        assert!(a < c);
    }
}
