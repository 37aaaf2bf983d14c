//! Per-station upload to the fusion center and its on-disk forms.
//!
//! Binary record, all little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "BSRP"
//! 4       4     u32 format version (1)
//! 8       4     u32 station index
//! 12      4     u32 N_c (distance feature length)
//! 16      4     u32 N_s (velocity feature length)
//! 20      8     f64 coarse range (m)
//! 28      8     f64 coarse radial velocity (m/s)
//! 36      16·N_c  distance feature, (re, im) f64 pairs
//! ...     16·N_s  velocity feature, (re, im) f64 pairs
//! ```
//!
//! The text form is line oriented: `key value` header lines followed by one
//! `index re im` line per feature entry.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &[u8; 4] = b"BSRP";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 36;

/// Coarse estimates and feature vectors of one station.
#[derive(Debug, Clone, PartialEq)]
pub struct BsReport<T> {
    pub bs_index: usize,
    /// Coarse range estimate (m).
    pub range: T,
    /// Coarse radial velocity estimate (m/s).
    pub velocity: T,
    /// Distance feature vector `E`, length `N_c`.
    pub distance_feature: Vec<Complex<T>>,
    /// Velocity feature vector `F`, length `N_s`.
    pub velocity_feature: Vec<Complex<T>>,
}

fn u32_field(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Format(format!("{what} {v} does not fit in u32")))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("truncated report record".into()))?;
        self.pos = end;
        Ok(chunk.try_into().expect("slice length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

impl<T: Real> BsReport<T> {
    /// Encodes the binary record.
    pub fn encode(&self) -> Result<Vec<u8>> {
        let (nc, ns) = (self.distance_feature.len(), self.velocity_feature.len());
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * (nc + ns));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&u32_field(self.bs_index, "station index")?.to_le_bytes());
        out.extend_from_slice(&u32_field(nc, "feature length")?.to_le_bytes());
        out.extend_from_slice(&u32_field(ns, "feature length")?.to_le_bytes());
        out.extend_from_slice(&self.range.as_f64().to_le_bytes());
        out.extend_from_slice(&self.velocity.as_f64().to_le_bytes());
        for z in self.distance_feature.iter().chain(&self.velocity_feature) {
            out.extend_from_slice(&z.re.as_f64().to_le_bytes());
            out.extend_from_slice(&z.im.as_f64().to_le_bytes());
        }
        Ok(out)
    }

    /// Decodes a binary record; trailing bytes are rejected.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if &r.take::<4>()? != MAGIC {
            return Err(Error::Format("bad report magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported report version {version}")));
        }
        let bs_index = r.u32()? as usize;
        let nc = r.u32()? as usize;
        let ns = r.u32()? as usize;
        let expected = HEADER_LEN + 16 * (nc + ns);
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "report record is {} bytes, header implies {expected}",
                bytes.len()
            )));
        }
        let range = T::lit(r.f64()?);
        let velocity = T::lit(r.f64()?);
        let mut read_vec = |n: usize| -> Result<Vec<Complex<T>>> {
            (0..n)
                .map(|_| Ok(Complex::new(T::lit(r.f64()?), T::lit(r.f64()?))))
                .collect()
        };
        let distance_feature = read_vec(nc)?;
        let velocity_feature = read_vec(ns)?;
        Ok(Self {
            bs_index,
            range,
            velocity,
            distance_feature,
            velocity_feature,
        })
    }

    /// Diagnostic text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "bs_index {}", self.bs_index);
        let _ = writeln!(s, "range_m {}", self.range.as_f64());
        let _ = writeln!(s, "velocity_mps {}", self.velocity.as_f64());
        for (name, v) in [
            ("distance_feature", &self.distance_feature),
            ("velocity_feature", &self.velocity_feature),
        ] {
            let _ = writeln!(s, "{name} {}", v.len());
            for (i, z) in v.iter().enumerate() {
                let _ = writeln!(s, "{i} {} {}", z.re.as_f64(), z.im.as_f64());
            }
        }
        s
    }

    /// Parses the output of [`BsReport::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("missing `{key}` line")))?;
            let mut parts = line.splitn(2, ' ');
            match (parts.next(), parts.next()) {
                (Some(k), Some(v)) if k == key => Ok(v.to_string()),
                _ => Err(Error::Format(format!("expected `{key}`, found `{line}`"))),
            }
        };
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad number `{s}`")))
        };
        let count = |s: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad count `{s}`")))
        };

        let bs_index = count(&next("bs_index")?)?;
        let range = T::lit(num(&next("range_m")?)?);
        let velocity = T::lit(num(&next("velocity_mps")?)?);
        let mut features = Vec::new();
        for name in ["distance_feature", "velocity_feature"] {
            let n = count(&next(name)?)?;
            let mut v = Vec::with_capacity(n);
            for i in 0..n {
                let line = next(&i.to_string())?;
                let mut it = line.split(' ');
                let (re, im) = match (it.next(), it.next(), it.next()) {
                    (Some(re), Some(im), None) => (num(re)?, num(im)?),
                    _ => return Err(Error::Format(format!("bad feature entry `{line}`"))),
                };
                v.push(Complex::new(T::lit(re), T::lit(im)));
            }
            features.push(v);
        }
        let velocity_feature = features.pop().unwrap_or_default();
        let distance_feature = features.pop().unwrap_or_default();
        Ok(Self {
            bs_index,
            range,
            velocity,
            distance_feature,
            velocity_feature,
        })
    }
}
