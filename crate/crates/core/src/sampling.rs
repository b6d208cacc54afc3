//! Global sampling of starting inputs: uniform or bituniform values,
//! optionally drawn through a randomly chosen compatible concrete type.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sut::SutDescriptor;
use crate::value::{InputTuple, SutValue};

pub const DEFAULT_BIG_INT_BIT_CAP: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signedness {
    Signed,
    Unsigned,
    Boolean,
    Big,
}

/// A concrete integer type with its representable range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDomain {
    name: String,
    signedness: Signedness,
    bit_width: u32,
    min: BigInt,
    max: BigInt,
}

impl TypeDomain {
    pub fn signed(bits: u32) -> Self {
        let half = BigInt::one() << (bits - 1);
        TypeDomain {
            name: format!("Int{bits}"),
            signedness: Signedness::Signed,
            bit_width: bits,
            min: -half.clone(),
            max: half - 1,
        }
    }

    pub fn unsigned(bits: u32) -> Self {
        TypeDomain {
            name: format!("UInt{bits}"),
            signedness: Signedness::Unsigned,
            bit_width: bits,
            min: BigInt::zero(),
            max: (BigInt::one() << bits) - 1,
        }
    }

    pub fn boolean() -> Self {
        TypeDomain {
            name: "Bool".into(),
            signedness: Signedness::Boolean,
            bit_width: 1,
            min: BigInt::zero(),
            max: BigInt::one(),
        }
    }

    /// Arbitrary precision, capped at `cap` magnitude bits.
    pub fn big(cap: u32) -> Self {
        let max: BigInt = (BigInt::one() << cap) - 1;
        TypeDomain {
            name: "BigInt".into(),
            signedness: Signedness::Big,
            bit_width: cap,
            min: -max.clone(),
            max,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signedness(&self) -> Signedness {
        self.signedness
    }

    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn min(&self) -> &BigInt {
        &self.min
    }

    pub fn max(&self) -> &BigInt {
        &self.max
    }

    pub fn contains(&self, v: &SutValue) -> bool {
        match (self.signedness, v) {
            (Signedness::Boolean, SutValue::Bool(_)) => true,
            (Signedness::Boolean, SutValue::Int(_)) | (_, SutValue::Bool(_)) => false,
            (_, SutValue::Int(n)) => &self.min <= n && n <= &self.max,
        }
    }

    /// Bits available for the magnitude of a bituniform draw.
    fn magnitude_bits(&self) -> u32 {
        match self.signedness {
            Signedness::Signed => self.bit_width - 1,
            _ => self.bit_width,
        }
    }
}

impl fmt::Display for TypeDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

const WIDTHS: [u32; 5] = [8, 16, 32, 64, 128];

/// Concrete types compatible with an abstract or concrete integer type name.
///
/// `Integer` (and `BigInt`) give all twelve domains in a fixed order;
/// `IntN` gives the signed types up to N, unsigned types below N and `Bool`;
/// `UIntN` gives unsigned types up to N and `Bool`.
pub fn compatible_types(name: &str, big_int_bit_cap: u32) -> Result<Vec<TypeDomain>> {
    let order = [
        TypeDomain::unsigned(8),
        TypeDomain::unsigned(64),
        TypeDomain::unsigned(32),
        TypeDomain::unsigned(16),
        TypeDomain::unsigned(128),
        TypeDomain::signed(8),
        TypeDomain::signed(64),
        TypeDomain::signed(32),
        TypeDomain::signed(16),
        TypeDomain::signed(128),
        TypeDomain::big(big_int_bit_cap),
        TypeDomain::boolean(),
    ];
    let width = |prefix: &str| {
        name.strip_prefix(prefix)
            .and_then(|w| w.parse::<u32>().ok())
            .filter(|w| WIDTHS.contains(w))
    };
    let keep: Box<dyn Fn(&TypeDomain) -> bool> = match name {
        "Integer" | "BigInt" => Box::new(|_| true),
        "Bool" => Box::new(|d| d.signedness == Signedness::Boolean),
        _ => {
            if let Some(n) = width("UInt") {
                Box::new(move |d| match d.signedness {
                    Signedness::Unsigned => d.bit_width <= n,
                    Signedness::Boolean => true,
                    _ => false,
                })
            } else if let Some(n) = width("Int") {
                Box::new(move |d| match d.signedness {
                    Signedness::Signed => d.bit_width <= n,
                    Signedness::Unsigned => d.bit_width < n,
                    Signedness::Boolean => true,
                    Signedness::Big => false,
                })
            } else {
                return Err(Error::Config(format!("unknown argument type {name:?}")));
            }
        }
    };
    Ok(order.into_iter().filter(|d| keep(d)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    Uniform,
    Bituniform,
}

impl FromStr for SamplingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(SamplingMethod::Uniform),
            "bituniform" => Ok(SamplingMethod::Bituniform),
            _ => Err(Error::Config(format!(
                "unknown sampling method {s:?} (uniform, bituniform)"
            ))),
        }
    }
}

impl fmt::Display for SamplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMethod::Uniform => "uniform",
            SamplingMethod::Bituniform => "bituniform",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub method: SamplingMethod,
    pub cts: bool,
    pub big_int_bit_cap: u32,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            method: SamplingMethod::Bituniform,
            cts: true,
            big_int_bit_cap: DEFAULT_BIG_INT_BIT_CAP,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.big_int_bit_cap < 64 {
            return Err(Error::Config(format!(
                "big_int_bit_cap must be at least 64, got {}",
                self.big_int_bit_cap
            )));
        }
        Ok(())
    }
}

/// Bituniform draw with a given magnitude bit length: `0` for `len == 0`,
/// otherwise uniform in `[2^(len-1), 2^len)`, negated with probability 1/2
/// when `signed`.
pub fn bituniform_with_length<R: Rng + ?Sized>(len: u32, signed: bool, rng: &mut R) -> BigInt {
    let v = if len == 0 {
        return BigInt::zero();
    } else if len <= 128 {
        // Leading one at bit len-1, uniform bits below it.
        let low = rng.gen::<u128>() & (u128::MAX >> 1 >> (128 - len));
        BigInt::from((1u128 << (len - 1)) | low)
    } else {
        let lo = BigInt::one() << (len - 1);
        let hi = BigInt::one() << len;
        rng.gen_bigint_range(&lo, &hi)
    };
    if signed && rng.gen::<bool>() {
        -v
    } else {
        v
    }
}

/// Uniform over the domain's full range.
fn uniform_value<R: Rng + ?Sized>(domain: &TypeDomain, rng: &mut R) -> BigInt {
    let w = domain.bit_width;
    match domain.signedness {
        Signedness::Unsigned if w <= 128 => {
            BigInt::from(rng.gen::<u128>() & (u128::MAX >> (128 - w)))
        }
        Signedness::Signed if w <= 128 => {
            // Two's complement reading of w random bits.
            let bits = rng.gen::<u128>() as i128;
            BigInt::from((bits << (128 - w)) >> (128 - w))
        }
        Signedness::Big if w <= 128 => loop {
            // Sign and magnitude, rejecting the second zero.
            let mag = rng.gen::<u128>() & (u128::MAX >> (128 - w));
            let neg = rng.gen::<bool>();
            if !(neg && mag == 0) {
                let v = BigInt::from(mag);
                break if neg { -v } else { v };
            }
        },
        _ => rng.gen_bigint_range(&domain.min, &(&domain.max + 1)),
    }
}

pub fn sample_value<R: Rng + ?Sized>(
    domain: &TypeDomain,
    method: SamplingMethod,
    rng: &mut R,
) -> SutValue {
    if domain.signedness == Signedness::Boolean {
        return SutValue::Bool(rng.gen());
    }
    match method {
        SamplingMethod::Uniform => SutValue::Int(uniform_value(domain, rng)),
        SamplingMethod::Bituniform => {
            let len = rng.gen_range(0..=domain.magnitude_bits());
            let signed = domain.signedness != Signedness::Unsigned;
            SutValue::Int(bituniform_with_length(len, signed, rng))
        }
    }
}

/// A sampled input together with the domain each argument was drawn from.
#[derive(Debug, Clone)]
pub struct SampledInput<'a> {
    pub input: InputTuple,
    pub domains: Vec<&'a TypeDomain>,
}

/// Per-SUT sampler: resolves the compatible types once and then draws
/// each argument independently.
#[derive(Debug, Clone)]
pub struct Sampler {
    method: SamplingMethod,
    choices: Vec<Vec<TypeDomain>>,
}

impl Sampler {
    pub fn new(sut: &SutDescriptor, config: &SamplerConfig) -> Result<Self> {
        config.validate()?;
        let choices = sut
            .argument_types()
            .iter()
            .map(|t| {
                if config.cts {
                    compatible_types(t, config.big_int_bit_cap)
                } else {
                    // validate the name even when it is not used
                    compatible_types(t, config.big_int_bit_cap)
                        .map(|_| vec![TypeDomain::big(config.big_int_bit_cap)])
                }
            })
            .collect::<Result<_>>()?;
        Ok(Sampler {
            method: config.method,
            choices,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SampledInput<'_> {
        let mut values = Vec::with_capacity(self.choices.len());
        let mut domains = Vec::with_capacity(self.choices.len());
        for options in &self.choices {
            let domain = &options[rng.gen_range(0..options.len())];
            values.push(sample_value(domain, self.method, rng));
            domains.push(domain);
        }
        SampledInput {
            input: InputTuple::new(values),
            domains,
        }
    }
}

/// One-shot form of [`Sampler::sample`].
pub fn sample_input<R: Rng + ?Sized>(
    sut: &SutDescriptor,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<(InputTuple, Vec<TypeDomain>)> {
    let sampler = Sampler::new(sut, config)?;
    let s = sampler.sample(rng);
    Ok((s.input, s.domains.into_iter().cloned().collect()))
}
