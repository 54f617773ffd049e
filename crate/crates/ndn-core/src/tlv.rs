//! Type-length-value primitives using the NDN variable-length number scheme.
//!
//! Numbers below 253 take one octet; larger values are introduced by a marker
//! octet (`0xFD`, `0xFE`, `0xFF`) followed by a 2, 4 or 8 octet big-endian
//! integer.

use crate::error::TlvError;

pub mod types {
    pub const INTEREST: u64 = 0x05;
    pub const DATA: u64 = 0x06;
    pub const NAME: u64 = 0x07;
    pub const NAME_COMPONENT: u64 = 0x08;
    pub const NONCE: u64 = 0x0A;
    pub const INTEREST_LIFETIME: u64 = 0x0C;
    pub const MUST_BE_FRESH: u64 = 0x12;
    pub const META_INFO: u64 = 0x14;
    pub const CONTENT: u64 = 0x15;
    pub const SIGNATURE_INFO: u64 = 0x16;
    pub const SIGNATURE_VALUE: u64 = 0x17;
    pub const CONTENT_TYPE: u64 = 0x18;
    pub const FRESHNESS_PERIOD: u64 = 0x19;
    pub const FINAL_BLOCK_ID: u64 = 0x1A;
    pub const SIGNATURE_TYPE: u64 = 0x1B;
    pub const KEY_LOCATOR: u64 = 0x1C;
    pub const CAN_BE_PREFIX: u64 = 0x21;
    pub const SIGNATURE_NONCE: u64 = 0x26;

    /// Typed name components.
    pub const SEGMENT_COMPONENT: u64 = 0x21;
    pub const VERSION_COMPONENT: u64 = 0x24;
}

/// Number of octets `encode_var_number` produces for `value`.
pub fn var_number_len(value: u64) -> usize {
    match value {
        0..=252 => 1,
        253..=0xFFFF => 3,
        0x1_0000..=0xFFFF_FFFF => 5,
        _ => 9,
    }
}

pub fn encode_var_number(value: u64, out: &mut Vec<u8>) {
    match value {
        0..=252 => out.push(value as u8),
        253..=0xFFFF => {
            out.push(0xFD);
            out.extend_from_slice(&(value as u16).to_be_bytes());
        }
        0x1_0000..=0xFFFF_FFFF => {
            out.push(0xFE);
            out.extend_from_slice(&(value as u32).to_be_bytes());
        }
        _ => {
            out.push(0xFF);
            out.extend_from_slice(&value.to_be_bytes());
        }
    }
}

/// Decodes one variable-length number, returning it with the octets consumed.
pub fn decode_var_number(buf: &[u8]) -> Result<(u64, usize), TlvError> {
    let first = *buf.first().ok_or(TlvError::Truncated)?;
    let width = match first {
        0xFD => 2,
        0xFE => 4,
        0xFF => 8,
        v => return Ok((u64::from(v), 1)),
    };
    let body = buf.get(1..1 + width).ok_or(TlvError::Truncated)?;
    let value = body.iter().fold(0u64, |acc, b| (acc << 8) | u64::from(*b));
    Ok((value, 1 + width))
}

/// Minimal-width big-endian encoding (1, 2, 4 or 8 octets).
pub fn encode_nonneg_int(value: u64) -> Vec<u8> {
    if value <= 0xFF {
        vec![value as u8]
    } else if value <= 0xFFFF {
        (value as u16).to_be_bytes().to_vec()
    } else if value <= 0xFFFF_FFFF {
        (value as u32).to_be_bytes().to_vec()
    } else {
        value.to_be_bytes().to_vec()
    }
}

pub fn decode_nonneg_int(bytes: &[u8]) -> Result<u64, TlvError> {
    match bytes.len() {
        1 | 2 | 4 | 8 => Ok(bytes.iter().fold(0u64, |acc, b| (acc << 8) | u64::from(*b))),
        n => Err(TlvError::BadInteger(n)),
    }
}

/// Appends a complete TLV element.
pub fn write_tlv(out: &mut Vec<u8>, typ: u64, value: &[u8]) {
    encode_var_number(typ, out);
    encode_var_number(value.len() as u64, out);
    out.extend_from_slice(value);
}

pub fn write_nonneg_tlv(out: &mut Vec<u8>, typ: u64, value: u64) {
    write_tlv(out, typ, &encode_nonneg_int(value));
}

/// Encoded size of a TLV element whose value is `len` octets long.
pub fn tlv_len(typ: u64, len: usize) -> usize {
    var_number_len(typ) + var_number_len(len as u64) + len
}

/// A TLV element borrowed from a buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Element<'a> {
    pub typ: u64,
    pub value: &'a [u8],
}

impl<'a> Element<'a> {
    /// NDN rule: types below 32 and all odd types are critical.
    pub fn is_critical(&self) -> bool {
        self.typ < 32 || self.typ & 1 == 1
    }

    pub fn as_nonneg(&self) -> Result<u64, TlvError> {
        decode_nonneg_int(self.value)
    }

    pub fn reader(&self) -> Reader<'a> {
        Reader::new(self.value)
    }
}

/// Sequential reader over concatenated TLV elements.
#[derive(Debug, Clone)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.buf.len()
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> &'a [u8] {
        &self.buf[self.pos..]
    }

    pub fn peek_type(&self) -> Option<u64> {
        decode_var_number(self.remaining()).ok().map(|(t, _)| t)
    }

    pub fn read(&mut self) -> Result<Element<'a>, TlvError> {
        let rest = self.remaining();
        if rest.is_empty() {
            return Err(TlvError::Truncated);
        }
        let (typ, a) = decode_var_number(rest)?;
        let (len, b) = decode_var_number(&rest[a..])?;
        let start = a + b;
        let len = usize::try_from(len).map_err(|_| TlvError::LengthOverflow)?;
        let end = start.checked_add(len).ok_or(TlvError::LengthOverflow)?;
        if end > rest.len() {
            return Err(TlvError::Truncated);
        }
        self.pos += end;
        Ok(Element {
            typ,
            value: &rest[start..end],
        })
    }

    /// Reads the next element and requires it to have type `typ`.
    pub fn expect(&mut self, typ: u64) -> Result<Element<'a>, TlvError> {
        let el = self.read()?;
        if el.typ != typ {
            return Err(TlvError::UnexpectedType {
                expected: typ,
                found: el.typ,
            });
        }
        Ok(el)
    }

    /// Reads the next element if it has type `typ`.
    pub fn optional(&mut self, typ: u64) -> Result<Option<Element<'a>>, TlvError> {
        if self.peek_type() == Some(typ) {
            self.read().map(Some)
        } else {
            Ok(None)
        }
    }

    /// Skips unrecognized non-critical elements; errors on a critical one.
    pub fn skip_unknown(&mut self, known: &[u64]) -> Result<(), TlvError> {
        while let Some(t) = self.peek_type() {
            if known.contains(&t) {
                break;
            }
            let el = self.read()?;
            if el.is_critical() {
                return Err(TlvError::UnknownCritical(el.typ));
            }
        }
        Ok(())
    }

    pub fn finish(&self) -> Result<(), TlvError> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(TlvError::TrailingBytes(self.buf.len() - self.pos))
        }
    }
}
