use crate::error::{PacketError, TlvError};
use crate::name::{Component, Name, MAX_COMPONENT_LEN};
use crate::tlv::{self, types, Reader};

/// Hard cap on Data content, per packet.
pub const MAX_CONTENT_LEN: usize = 64 * 1024;
pub const DEFAULT_INTEREST_LIFETIME_MS: u64 = 4000;
const SIGNATURE_TYPE_ED25519: u64 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interest {
    pub name: Name,
    pub can_be_prefix: bool,
    pub must_be_fresh: bool,
    pub nonce: [u8; 4],
    pub lifetime_ms: u64,
}

impl Interest {
    pub fn new(name: Name) -> Self {
        Interest {
            name,
            can_be_prefix: false,
            must_be_fresh: false,
            nonce: [0; 4],
            lifetime_ms: DEFAULT_INTEREST_LIFETIME_MS,
        }
    }

    pub fn can_be_prefix(mut self, yes: bool) -> Self {
        self.can_be_prefix = yes;
        self
    }

    pub fn must_be_fresh(mut self, yes: bool) -> Self {
        self.must_be_fresh = yes;
        self
    }

    pub fn lifetime(mut self, ms: u64) -> Self {
        self.lifetime_ms = ms;
        self
    }

    /// Whether `data` satisfies this Interest by name.
    pub fn matches_name(&self, data: &Name) -> bool {
        if self.can_be_prefix {
            self.name.is_prefix_of(data)
        } else {
            &self.name == data
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ContentType {
    #[default]
    Blob,
    Key,
    Nack,
}

impl ContentType {
    fn code(self) -> u64 {
        match self {
            ContentType::Blob => 0,
            ContentType::Key => 2,
            ContentType::Nack => 3,
        }
    }

    fn from_code(code: u64) -> Result<Self, TlvError> {
        match code {
            0 => Ok(ContentType::Blob),
            2 => Ok(ContentType::Key),
            3 => Ok(ContentType::Nack),
            _ => Err(TlvError::Invalid("content type")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Data {
    pub name: Name,
    pub content_type: ContentType,
    pub freshness_period_ms: u64,
    pub final_block_id: Option<Component>,
    pub content: Vec<u8>,
    /// Name of the certificate whose key produced `signature`.
    pub key_locator: Name,
    /// Random bytes mixed into the signed span; empty when absent.
    pub signature_nonce: Vec<u8>,
    pub signature: Vec<u8>,
}

impl Data {
    pub fn new(name: Name, content: impl Into<Vec<u8>>) -> Self {
        Data {
            name,
            content: content.into(),
            ..Default::default()
        }
    }

    pub fn with_freshness(mut self, ms: u64) -> Self {
        self.freshness_period_ms = ms;
        self
    }

    pub fn with_content_type(mut self, t: ContentType) -> Self {
        self.content_type = t;
        self
    }

    pub fn with_final_block_id(mut self, c: Component) -> Self {
        self.final_block_id = Some(c);
        self
    }

    fn encode_meta_info(&self, out: &mut Vec<u8>) {
        let mut meta = Vec::new();
        tlv::write_nonneg_tlv(&mut meta, types::CONTENT_TYPE, self.content_type.code());
        tlv::write_nonneg_tlv(&mut meta, types::FRESHNESS_PERIOD, self.freshness_period_ms);
        if let Some(fb) = &self.final_block_id {
            let mut inner = Vec::new();
            fb.encode_to(&mut inner);
            tlv::write_tlv(&mut meta, types::FINAL_BLOCK_ID, &inner);
        }
        tlv::write_tlv(out, types::META_INFO, &meta);
    }

    fn encode_signature_info(&self, out: &mut Vec<u8>) {
        let mut info = Vec::new();
        tlv::write_nonneg_tlv(&mut info, types::SIGNATURE_TYPE, SIGNATURE_TYPE_ED25519);
        let mut kl = Vec::new();
        self.key_locator.encode_to(&mut kl);
        tlv::write_tlv(&mut info, types::KEY_LOCATOR, &kl);
        if !self.signature_nonce.is_empty() {
            tlv::write_tlv(&mut info, types::SIGNATURE_NONCE, &self.signature_nonce);
        }
        tlv::write_tlv(out, types::SIGNATURE_INFO, &info);
    }

    /// The exact bytes covered by the signature: Name, MetaInfo, Content and
    /// SignatureInfo as they appear on the wire.
    pub fn signed_portion(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.content.len() + 128);
        self.name.encode_to(&mut out);
        self.encode_meta_info(&mut out);
        tlv::write_tlv(&mut out, types::CONTENT, &self.content);
        self.encode_signature_info(&mut out);
        out
    }

    pub fn encode(&self) -> Result<Vec<u8>, PacketError> {
        check_name(&self.name)?;
        check_name_components(&self.key_locator)?;
        if self.content.len() > MAX_CONTENT_LEN {
            return Err(PacketError::ContentTooLarge(self.content.len()));
        }
        if let Some(fb) = &self.final_block_id {
            if fb.value().len() > MAX_COMPONENT_LEN {
                return Err(PacketError::ComponentTooLong(fb.value().len()));
            }
        }
        let mut inner = self.signed_portion();
        tlv::write_tlv(&mut inner, types::SIGNATURE_VALUE, &self.signature);
        let mut out = Vec::with_capacity(inner.len() + 4);
        tlv::write_tlv(&mut out, types::DATA, &inner);
        Ok(out)
    }

    /// Decodes the value of a Data TLV.
    pub fn decode_value(value: &[u8]) -> Result<Data, TlvError> {
        let mut r = Reader::new(value);
        let name = Name::decode_value(r.expect(types::NAME)?.value)?;
        r.skip_unknown(&[types::META_INFO])?;

        let mut data = Data::new(name, Vec::new());
        let meta = r.expect(types::META_INFO)?;
        let mut mr = meta.reader();
        data.content_type = ContentType::from_code(mr.expect(types::CONTENT_TYPE)?.as_nonneg()?)?;
        data.freshness_period_ms = mr.expect(types::FRESHNESS_PERIOD)?.as_nonneg()?;
        mr.skip_unknown(&[types::FINAL_BLOCK_ID])?;
        if let Some(fb) = mr.optional(types::FINAL_BLOCK_ID)? {
            let mut fr = fb.reader();
            let c = fr.read()?;
            fr.finish()?;
            data.final_block_id = Some(Component::new(c.typ, c.value));
        }
        mr.skip_unknown(&[])?;

        r.skip_unknown(&[types::CONTENT])?;
        data.content = r.expect(types::CONTENT)?.value.to_vec();
        r.skip_unknown(&[types::SIGNATURE_INFO])?;

        let info = r.expect(types::SIGNATURE_INFO)?;
        let mut ir = info.reader();
        if ir.expect(types::SIGNATURE_TYPE)?.as_nonneg()? != SIGNATURE_TYPE_ED25519 {
            return Err(TlvError::Invalid("signature type"));
        }
        let kl = ir.expect(types::KEY_LOCATOR)?;
        data.key_locator = Name::decode(kl.value)?;
        ir.skip_unknown(&[types::SIGNATURE_NONCE])?;
        if let Some(nonce) = ir.optional(types::SIGNATURE_NONCE)? {
            if nonce.value.is_empty() {
                return Err(TlvError::Invalid("empty signature nonce"));
            }
            data.signature_nonce = nonce.value.to_vec();
        }
        ir.skip_unknown(&[])?;

        r.skip_unknown(&[types::SIGNATURE_VALUE])?;
        data.signature = r.expect(types::SIGNATURE_VALUE)?.value.to_vec();
        r.skip_unknown(&[])?;
        r.finish()?;
        if data.name.is_empty() {
            return Err(TlvError::Invalid("empty packet name"));
        }
        Ok(data)
    }

    pub fn decode(bytes: &[u8]) -> Result<Data, TlvError> {
        match decode_packet(bytes)? {
            Packet::Data(d) => Ok(d),
            Packet::Interest(_) => Err(TlvError::UnexpectedType {
                expected: types::DATA,
                found: types::INTEREST,
            }),
        }
    }
}

impl Interest {
    pub fn encode(&self) -> Result<Vec<u8>, PacketError> {
        check_name(&self.name)?;
        if self.lifetime_ms == 0 {
            return Err(PacketError::ZeroLifetime);
        }
        let mut inner = Vec::new();
        self.name.encode_to(&mut inner);
        if self.can_be_prefix {
            tlv::write_tlv(&mut inner, types::CAN_BE_PREFIX, &[]);
        }
        if self.must_be_fresh {
            tlv::write_tlv(&mut inner, types::MUST_BE_FRESH, &[]);
        }
        tlv::write_tlv(&mut inner, types::NONCE, &self.nonce);
        tlv::write_nonneg_tlv(&mut inner, types::INTEREST_LIFETIME, self.lifetime_ms);
        let mut out = Vec::with_capacity(inner.len() + 4);
        tlv::write_tlv(&mut out, types::INTEREST, &inner);
        Ok(out)
    }

    pub fn decode_value(value: &[u8]) -> Result<Interest, TlvError> {
        let mut r = Reader::new(value);
        let name = Name::decode_value(r.expect(types::NAME)?.value)?;
        if name.is_empty() {
            return Err(TlvError::Invalid("empty packet name"));
        }
        let mut interest = Interest::new(name);
        let known = [
            types::CAN_BE_PREFIX,
            types::MUST_BE_FRESH,
            types::NONCE,
        ];
        r.skip_unknown(&known)?;
        if let Some(el) = r.optional(types::CAN_BE_PREFIX)? {
            if !el.value.is_empty() {
                return Err(TlvError::Invalid("CanBePrefix must be empty"));
            }
            interest.can_be_prefix = true;
        }
        r.skip_unknown(&known)?;
        if let Some(el) = r.optional(types::MUST_BE_FRESH)? {
            if !el.value.is_empty() {
                return Err(TlvError::Invalid("MustBeFresh must be empty"));
            }
            interest.must_be_fresh = true;
        }
        r.skip_unknown(&known)?;
        let nonce = r.expect(types::NONCE)?;
        interest.nonce = nonce
            .value
            .try_into()
            .map_err(|_| TlvError::Invalid("nonce must be 4 bytes"))?;
        r.skip_unknown(&[types::INTEREST_LIFETIME])?;
        interest.lifetime_ms = r.expect(types::INTEREST_LIFETIME)?.as_nonneg()?;
        if interest.lifetime_ms == 0 {
            return Err(TlvError::Invalid("zero interest lifetime"));
        }
        r.skip_unknown(&[])?;
        r.finish()?;
        Ok(interest)
    }
}

fn check_name_components(name: &Name) -> Result<(), PacketError> {
    match name.longest_component() {
        n if n > MAX_COMPONENT_LEN => Err(PacketError::ComponentTooLong(n)),
        _ => Ok(()),
    }
}

fn check_name(name: &Name) -> Result<(), PacketError> {
    if name.is_empty() {
        return Err(PacketError::EmptyName);
    }
    check_name_components(name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Packet {
    Interest(Interest),
    Data(Data),
}

pub fn encode_packet(packet: &Packet) -> Result<Vec<u8>, PacketError> {
    match packet {
        Packet::Interest(i) => i.encode(),
        Packet::Data(d) => d.encode(),
    }
}

/// Decodes exactly one packet; any bytes after it are an error.
pub fn decode_packet(bytes: &[u8]) -> Result<Packet, TlvError> {
    let mut r = Reader::new(bytes);
    let el = r.read()?;
    let packet = match el.typ {
        types::INTEREST => Packet::Interest(Interest::decode_value(el.value)?),
        types::DATA => Packet::Data(Data::decode_value(el.value)?),
        t => return Err(TlvError::UnknownCritical(t)),
    };
    r.finish()?;
    Ok(packet)
}
