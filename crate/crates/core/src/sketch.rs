//! HyperLogLog counters.
//!
//! A counter holds `p = 2^b` one-byte registers. An item is hashed to 64 bits
//! with a seeded xxh3; the top `b` bits select a register and the remaining
//! `64 - b` bits feed the rank `rho`, the 1-based position of the leftmost set
//! bit. Register value 0 means "nothing observed" since every rank is at least 1.

use std::io::{Read, Write};

use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MIN_BITS: u8 = 4;
pub const MAX_BITS: u8 = 18;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"HLLB";
pub const SNAPSHOT_VERSION: u8 = 1;
/// magic + version + b + hash_seed + correction flag
pub const SNAPSHOT_HEADER_LEN: usize = 4 + 1 + 1 + 8 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HllConfig {
    bits: u8,
    hash_seed: u64,
    small_range_correction: bool,
}

impl HllConfig {
    /// Small-range correction is on by default.
    pub fn new(bits: u8, hash_seed: u64) -> Result<Self> {
        if !(MIN_BITS..=MAX_BITS).contains(&bits) {
            return Err(Error::Config(format!("register-index bits must be in {MIN_BITS}..={MAX_BITS}, got {bits}")));
        }
        Ok(Self { bits, hash_seed, small_range_correction: true })
    }

    pub fn with_small_range_correction(mut self, on: bool) -> Self {
        self.small_range_correction = on;
        self
    }

    #[inline]
    pub fn bits(&self) -> u8 {
        self.bits
    }

    /// Register count `p = 2^b`.
    #[inline]
    pub fn registers(&self) -> usize {
        1usize << self.bits
    }

    #[inline]
    pub fn hash_seed(&self) -> u64 {
        self.hash_seed
    }

    #[inline]
    pub fn small_range_correction(&self) -> bool {
        self.small_range_correction
    }

    #[inline]
    pub fn hash(&self, item: &[u8]) -> u64 {
        xxh3_64_with_seed(item, self.hash_seed)
    }

    /// Register index and rank for a 64-bit hash value.
    #[inline]
    pub fn locate(&self, hash: u64) -> (usize, u8) {
        let b = u32::from(self.bits);
        let index = (hash >> (64 - b)) as usize;
        let rest = hash << b;
        let rank = if rest == 0 { (64 - b + 1) as u8 } else { (rest.leading_zeros() + 1) as u8 };
        (index, rank)
    }
}

/// Bias-correction constant `alpha_p` of the raw estimator.
pub fn alpha<F: Scalar>(p: usize) -> Result<F> {
    match p {
        16 => Ok(F::lit(0.673)),
        32 => Ok(F::lit(0.697)),
        64 => Ok(F::lit(0.709)),
        p if p >= 128 && p.is_power_of_two() => {
            Ok(F::lit(0.7213) / (F::one() + F::lit(1.079) / F::from_count(p as u64)))
        }
        _ => Err(Error::Config(format!("alpha is defined for p in {{16, 32, 64}} or a power of two >= 128, got {p}"))),
    }
}

/// Cardinality estimate from a register slice.
///
/// Raw estimate `alpha_p p^2 / sum 2^-M[j]`; with correction on and `E <= 2.5 p`
/// with at least one empty register, linear counting `p ln(p / V)` instead.
pub fn estimate_registers<F: Scalar>(config: &HllConfig, registers: &[u8]) -> F {
    debug_assert_eq!(registers.len(), config.registers());
    let p = config.registers();
    let pf = F::from_count(p as u64);
    let mut histogram = [0u64; 65];
    for &m in registers {
        histogram[usize::from(m)] += 1;
    }
    let zeros = histogram[0];
    let sum = histogram
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(m, &c)| F::from_count(c) * F::lit(2.0).powi(-(m as i32)))
        .fold(F::zero(), |acc, x| acc + x);
    let a: F = alpha(p).expect("HllConfig only admits valid register counts");
    let raw = a * pf * pf / sum;
    if config.small_range_correction && zeros > 0 && raw <= F::lit(2.5) * pf {
        pf * (pf / F::from_count(zeros)).ln()
    } else {
        raw
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HllCounter {
    config: HllConfig,
    registers: Vec<u8>,
}

impl HllCounter {
    pub fn new(config: HllConfig) -> Self {
        Self { config, registers: vec![0; config.registers()] }
    }

    pub fn from_registers(config: HllConfig, registers: Vec<u8>) -> Result<Self> {
        if registers.len() != config.registers() {
            return Err(Error::Input(format!("expected {} registers, got {}", config.registers(), registers.len())));
        }
        Ok(Self { config, registers })
    }

    #[inline]
    pub fn config(&self) -> &HllConfig {
        &self.config
    }

    #[inline]
    pub fn registers(&self) -> &[u8] {
        &self.registers
    }

    pub fn is_empty(&self) -> bool {
        self.registers.iter().all(|&m| m == 0)
    }

    /// Adds the canonical byte encoding of an item.
    #[inline]
    pub fn add(&mut self, item: &[u8]) {
        let h = self.config.hash(item);
        self.add_hash(h);
    }

    #[inline]
    pub fn add_hash(&mut self, hash: u64) {
        let (i, rank) = self.config.locate(hash);
        let slot = &mut self.registers[i];
        if rank > *slot {
            *slot = rank;
        }
    }

    /// Register-wise max with `other`. Returns whether any register changed.
    pub fn union(&mut self, other: &HllCounter) -> Result<bool> {
        if self.config != other.config {
            return Err(Error::Incompatible(format!(
                "b={} seed={:#x} vs b={} seed={:#x}",
                self.config.bits, self.config.hash_seed, other.config.bits, other.config.hash_seed
            )));
        }
        Ok(union_registers(&mut self.registers, &other.registers))
    }

    pub fn size<F: Scalar>(&self) -> F {
        estimate_registers(&self.config, &self.registers)
    }

    /// `size::<f64>()`.
    pub fn estimate(&self) -> f64 {
        self.size()
    }

    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        write_record(&mut w, &self.config, &self.registers)
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self> {
        let config = read_header(&mut r)?;
        let mut registers = vec![0u8; config.registers()];
        r.read_exact(&mut registers)?;
        Ok(Self { config, registers })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(SNAPSHOT_HEADER_LEN + self.registers.len());
        self.write_snapshot(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let counter = Self::read_snapshot(bytes)?;
        let expected = SNAPSHOT_HEADER_LEN + counter.registers.len();
        if bytes.len() != expected {
            return Err(Error::Input(format!("snapshot has {} bytes, expected {expected}", bytes.len())));
        }
        Ok(counter)
    }
}

/// Element-wise max of `src` into `dst`; true when some register grew.
#[inline]
pub(crate) fn union_registers(dst: &mut [u8], src: &[u8]) -> bool {
    let mut changed = false;
    for (d, &s) in dst.iter_mut().zip(src) {
        if s > *d {
            *d = s;
            changed = true;
        }
    }
    changed
}

pub(crate) fn write_record<W: Write>(w: &mut W, config: &HllConfig, registers: &[u8]) -> Result<()> {
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&[SNAPSHOT_VERSION, config.bits])?;
    w.write_all(&config.hash_seed.to_le_bytes())?;
    w.write_all(&[u8::from(config.small_range_correction)])?;
    w.write_all(registers)?;
    Ok(())
}

pub(crate) fn read_header<R: Read>(r: &mut R) -> Result<HllConfig> {
    let mut header = [0u8; SNAPSHOT_HEADER_LEN];
    r.read_exact(&mut header)?;
    if &header[..4] != SNAPSHOT_MAGIC {
        return Err(Error::Input("bad snapshot magic".into()));
    }
    if header[4] != SNAPSHOT_VERSION {
        return Err(Error::Input(format!("unsupported snapshot version {}", header[4])));
    }
    let bits = header[5];
    let seed = u64::from_le_bytes(header[6..14].try_into().expect("8 bytes"));
    let correction = match header[14] {
        0 => false,
        1 => true,
        other => return Err(Error::Input(format!("bad correction flag {other}"))),
    };
    Ok(HllConfig::new(bits, seed)?.with_small_range_correction(correction))
}
