//! Sidecar metadata travelling next to a stego image.
//!
//! Serialized as JSON:
//!
//! ```text
//! {
//!   "version": 1, "width": 512, "height": 512, "parity": "A-even",
//!   "order": "fluctuation",
//!   "sets": [
//!     {"tag": "A", "pk1": 0, "pk2": -1, "z1": -9, "z2": 8, "bits": 5000, "prefix_len": 61234},
//!     {"tag": "B", ...}
//!   ],
//!   "payload_bits": 10000, "locmap_encoding": "rle-v1", "locmap": "01..."
//! }
//! ```
//!
//! Peak and zero fields are `null` for a set that carries no bits.

use serde::{Deserialize, Serialize};

use crate::codec::{OrderMode, SetSideInfo};
use crate::error::{RdhError, Result};
use crate::histogram::PeakZeroParams;
use crate::image::Parity;
use crate::locmap::LocationMap;

pub const FORMAT_VERSION: u32 = 1;
pub const PARITY_CONVENTION: &str = "A-even";
pub const LOCMAP_ENCODING: &str = "rle-v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StegoMetadata {
    pub width: usize,
    pub height: usize,
    pub order: OrderMode,
    pub set_a: SetSideInfo,
    pub set_b: SetSideInfo,
    pub payload_bits: usize,
    pub location_map: LocationMap,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetadataDoc {
    version: u32,
    width: usize,
    height: usize,
    parity: String,
    order: OrderMode,
    sets: Vec<SetDoc>,
    payload_bits: usize,
    locmap_encoding: String,
    locmap: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SetDoc {
    tag: Parity,
    pk1: Option<i32>,
    pk2: Option<i32>,
    z1: Option<i32>,
    z2: Option<i32>,
    bits: usize,
    prefix_len: usize,
}

impl From<&SetSideInfo> for SetDoc {
    fn from(info: &SetSideInfo) -> Self {
        let p = info.params;
        SetDoc {
            tag: info.set,
            pk1: p.map(|p| p.pk1),
            pk2: p.map(|p| p.pk2),
            z1: p.map(|p| p.z1),
            z2: p.map(|p| p.z2),
            bits: info.bits_embedded,
            prefix_len: info.processed_prefix_len,
        }
    }
}

impl SetDoc {
    fn into_info(self, expected: Parity) -> Result<SetSideInfo> {
        if self.tag != expected {
            return Err(RdhError::Format(format!(
                "expected set {expected}, found {}",
                self.tag
            )));
        }
        let params = match (self.pk1, self.pk2, self.z1, self.z2) {
            (Some(pk1), Some(pk2), Some(z1), Some(z2)) => Some(PeakZeroParams::new(pk1, pk2, z1, z2)?),
            (None, None, None, None) => None,
            _ => {
                return Err(RdhError::Format(format!(
                    "set {} has a partial peak/zero record",
                    self.tag
                )))
            }
        };
        if self.bits > 0 && params.is_none() {
            return Err(RdhError::Format(format!(
                "set {} carries bits without peak parameters",
                self.tag
            )));
        }
        if self.bits > self.prefix_len {
            return Err(RdhError::Format(format!(
                "set {} claims {} bits in {} pixels",
                self.tag, self.bits, self.prefix_len
            )));
        }
        Ok(SetSideInfo {
            set: self.tag,
            params,
            bits_embedded: self.bits,
            processed_prefix_len: self.prefix_len,
        })
    }
}

impl StegoMetadata {
    pub fn to_json(&self) -> String {
        let doc = MetadataDoc {
            version: FORMAT_VERSION,
            width: self.width,
            height: self.height,
            parity: PARITY_CONVENTION.to_owned(),
            order: self.order,
            sets: vec![SetDoc::from(&self.set_a), SetDoc::from(&self.set_b)],
            payload_bits: self.payload_bits,
            locmap_encoding: LOCMAP_ENCODING.to_owned(),
            locmap: hex::encode(self.location_map.compress()),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("metadata serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MetadataDoc =
            serde_json::from_str(text).map_err(|e| RdhError::Format(format!("metadata: {e}")))?;
        if doc.version != FORMAT_VERSION {
            return Err(RdhError::Format(format!(
                "unsupported metadata version {}",
                doc.version
            )));
        }
        if doc.parity != PARITY_CONVENTION {
            return Err(RdhError::Format(format!("unsupported parity convention {:?}", doc.parity)));
        }
        if doc.locmap_encoding != LOCMAP_ENCODING {
            return Err(RdhError::Format(format!(
                "unsupported location map encoding {:?}",
                doc.locmap_encoding
            )));
        }
        let [a, b]: [SetDoc; 2] = doc
            .sets
            .try_into()
            .map_err(|_| RdhError::Format("metadata must list exactly two sets".into()))?;
        let set_a = a.into_info(Parity::A)?;
        let set_b = b.into_info(Parity::B)?;
        if set_a.bits_embedded + set_b.bits_embedded != doc.payload_bits {
            return Err(RdhError::Format(format!(
                "payload_bits {} does not equal {} + {}",
                doc.payload_bits, set_a.bits_embedded, set_b.bits_embedded
            )));
        }
        let raw = hex::decode(&doc.locmap).map_err(|e| RdhError::Format(format!("location map hex: {e}")))?;
        Ok(StegoMetadata {
            width: doc.width,
            height: doc.height,
            order: doc.order,
            set_a,
            set_b,
            payload_bits: doc.payload_bits,
            location_map: LocationMap::decompress(&raw)?,
        })
    }
}
