use super::Factorization;

/// Möbius function μ(n) from a factorization.
pub fn mobius(f: &Factorization) -> i8 {
    if f.factors().iter().any(|&(_, e)| e > 1) {
        0
    } else if f.omega() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient φ(n) = n·∏(1 − 1/p), computed in integers.
pub fn euler_phi(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .fold(f.n(), |acc, &(p, _)| acc / p * (p - 1))
}

/// Smallest-prime-factor sieve on `[0, limit]`, for enumerating squarefree
/// divisors and their prime sets.
#[derive(Clone, Debug)]
pub struct SmallSieve {
    spf: Vec<u32>,
}

impl SmallSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SmallSieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    /// Distinct primes of `d` when `d` is squarefree, `None` otherwise.
    pub fn squarefree_primes(&self, mut d: usize) -> Option<Vec<u64>> {
        let mut out = Vec::new();
        while d > 1 {
            let p = self.spf[d] as usize;
            d /= p;
            if d % p == 0 {
                return None;
            }
            out.push(p as u64);
        }
        Some(out)
    }
}
