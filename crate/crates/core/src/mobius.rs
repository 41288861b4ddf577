//! Möbius function by a linear sieve, and the sequence `c_n = mu(n)`.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::sequences::ComplexSequence;

/// Largest supported table size.
pub const MAX_SIEVE: u64 = 100_000_000;

const MAGIC: &[u8; 4] = b"MUTB";
const VERSION: u16 = 1;

/// `mu(n)` for `1 <= n <= N`. Index 0 is unused and holds 0.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusTable {
    mu: Vec<i8>,
    spf: Option<Vec<u32>>,
}

impl MobiusTable {
    pub fn len(&self) -> usize {
        self.mu.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `mu(n)` for `1 <= n <= N`.
    pub fn mu(&self, n: usize) -> i8 {
        assert!(n >= 1 && n <= self.len(), "mu({n}) outside 1..={}", self.len());
        self.mu[n]
    }

    pub fn values(&self) -> &[i8] {
        &self.mu[1..]
    }

    /// Smallest prime factor of `n >= 2`, when the table came from the sieve.
    pub fn smallest_prime_factor(&self, n: usize) -> Option<u32> {
        self.spf.as_ref().and_then(|s| s.get(n).copied()).filter(|&p| p > 1)
    }

    /// Writes `MUTB`, a little-endian `u16` version, `N` as `u64`, then `N`
    /// signed bytes.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        let bytes: Vec<u8> = self.values().iter().map(|&v| v as u8).collect();
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<MobiusTable> {
        let mut head = [0u8; 14];
        r.read_exact(&mut head).map_err(|_| Error::Format("truncated header".into()))?;
        if &head[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes([head[4], head[5]]);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = u64::from_le_bytes(head[6..14].try_into().unwrap());
        if n > MAX_SIEVE {
            return Err(Error::CapacityExceeded { requested: n, max: MAX_SIEVE });
        }
        let mut body = vec![0u8; n as usize];
        r.read_exact(&mut body).map_err(|_| Error::Format(format!("expected {n} entries")))?;
        let mut mu = Vec::with_capacity(n as usize + 1);
        mu.push(0);
        for b in body {
            let v = b as i8;
            if !(-1..=1).contains(&v) {
                return Err(Error::Format(format!("entry {v} is not in {{-1, 0, 1}}")));
            }
            mu.push(v);
        }
        Ok(MobiusTable { mu, spf: None })
    }
}

/// Linear (Euler) sieve, `O(N)`.
pub fn mobius_sieve(n: usize) -> Result<MobiusTable> {
    if n == 0 {
        return Err(Error::Argument("N must be at least 1".into()));
    }
    if n as u64 > MAX_SIEVE {
        return Err(Error::CapacityExceeded { requested: n as u64, max: MAX_SIEVE });
    }
    let mut mu = vec![0i8; n + 1];
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    mu[1] = 1;
    spf[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mu[i] = -1;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > spf[i] || ip > n {
                break;
            }
            spf[ip] = p;
            mu[ip] = if p == spf[i] { 0 } else { -mu[i] };
        }
    }
    Ok(MobiusTable { mu, spf: Some(spf) })
}

/// `c_n = mu(n)` for `n = 1..=N`, with modulus bound 1.
pub fn mobius_sequence(table: &MobiusTable, n: usize) -> Result<ComplexSequence<f64>> {
    if n > table.len() {
        return Err(Error::Argument(format!("N = {n} exceeds the table size {}", table.len())));
    }
    let terms = table.mu[1..=n].iter().map(|&m| Complex::new(m as f64, 0.0)).collect();
    Ok(ComplexSequence::new(terms, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = mobius_sieve(12).unwrap();
        assert_eq!(t.values(), &[1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
        assert_eq!(t.smallest_prime_factor(12), Some(2));
        assert_eq!(t.smallest_prime_factor(11), Some(11));
    }

    #[test]
    fn sequence_prefix() {
        let t = mobius_sieve(10).unwrap();
        let c = mobius_sequence(&t, 4).unwrap();
        let re: Vec<f64> = c.terms.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, -1.0, -1.0, 0.0]);
        assert_eq!(c.bound, 1.0);
        assert!(mobius_sequence(&t, 11).is_err());
    }

    #[test]
    fn capacity() {
        assert!(matches!(mobius_sieve(100_000_001), Err(Error::CapacityExceeded { .. })));
        assert!(matches!(mobius_sieve(0), Err(Error::Argument(_))));
    }

    #[test]
    fn dump_round_trip() {
        let t = mobius_sieve(1000).unwrap();
        let mut buf = Vec::new();
        t.dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 14 + 1000);
        let back = MobiusTable::load(buf.as_slice()).unwrap();
        assert_eq!(back.values(), t.values());
        assert!(back.smallest_prime_factor(10).is_none());
        buf[0] = b'X';
        assert!(matches!(MobiusTable::load(buf.as_slice()), Err(Error::Format(_))));
        assert!(matches!(MobiusTable::load(&buf[..20]), Err(Error::Format(_))));
    }
}
