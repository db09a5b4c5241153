//! Hand-rolled MRT/BGP UPDATE encoder, written directly from the wire
//! format definitions (MRT common header, BGP4MP message body, BGP UPDATE
//! layout). It shares no code with any decoder.

use rand::Rng;

pub const MRT_BGP4MP: u16 = 16;
pub const MRT_BGP4MP_ET: u16 = 17;
pub const SUB_STATE_CHANGE: u16 = 0;
pub const SUB_MESSAGE: u16 = 1;
pub const SUB_MESSAGE_AS4: u16 = 4;
pub const AS_TRANS: u32 = 23456;

/// An IPv4 prefix to place on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixSpec {
    pub base: u32,
    pub len: u8,
}

impl PrefixSpec {
    /// The base with host bits cleared, as a decoder must report it.
    pub fn masked_base(&self) -> u32 {
        if self.len == 0 {
            0
        } else {
            self.base & (u32::MAX << (32 - self.len))
        }
    }
}

/// Everything needed to build (and predict the decoding of) one UPDATE
/// frame.
#[derive(Debug, Clone, Default)]
pub struct UpdateSpec {
    pub timestamp: u32,
    /// Wrap in BGP4MP_ET framing with a microseconds field.
    pub extended_timing: bool,
    /// Use the MESSAGE_AS4 subtype with 4-byte path ASNs.
    pub as4: bool,
    pub announced: Vec<PrefixSpec>,
    pub withdrawn: Vec<PrefixSpec>,
    /// AS_SEQUENCE segment of the AS_PATH.
    pub path_sequence: Vec<u32>,
    /// Trailing AS_SET segment members (empty for none).
    pub as_set: Vec<u32>,
    /// Optional AS4_PATH attribute (a single AS_SEQUENCE).
    pub as4_path: Option<Vec<u32>>,
}

/// What a correct decoder must produce for an [`UpdateSpec`]; `None` when
/// the update carries neither announcements nor withdrawals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedUpdate {
    pub timestamp: u64,
    pub announced: Vec<(u32, u8)>,
    pub withdrawn: Vec<(u32, u8)>,
    pub as_path: Vec<u32>,
    pub has_as_set: bool,
}

impl UpdateSpec {
    pub fn expected(&self) -> Option<ExpectedUpdate> {
        if self.announced.is_empty() && self.withdrawn.is_empty() {
            return None;
        }
        let mut two_byte: Vec<u32> = self.path_sequence.clone();
        two_byte.extend(&self.as_set);
        let has_as_set_wire = !self.as_set.is_empty();
        // AS4_PATH substitution: applicable only when it is not longer than
        // the AS_PATH and the AS_PATH carries the 4-byte placeholder ASN.
        let (as_path, has_as_set) = match &self.as4_path {
            Some(p4) if p4.len() <= two_byte.len() && two_byte.contains(&AS_TRANS) => {
                let keep = two_byte.len() - p4.len();
                let mut path = two_byte[..keep].to_vec();
                path.extend(p4);
                (path, has_as_set_wire)
            }
            _ => (two_byte, has_as_set_wire),
        };
        Some(ExpectedUpdate {
            timestamp: self.timestamp as u64,
            announced: self
                .announced
                .iter()
                .map(|p| (p.masked_base(), p.len))
                .collect(),
            withdrawn: self
                .withdrawn
                .iter()
                .map(|p| (p.masked_base(), p.len))
                .collect(),
            as_path,
            has_as_set,
        })
    }
}

fn push_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_be_bytes());
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

/// Prefix wire form: length byte, then ceil(len/8) address bytes.
fn push_prefix(out: &mut Vec<u8>, p: &PrefixSpec) {
    assert!(p.len <= 32);
    out.push(p.len);
    let nbytes = (p.len as usize).div_ceil(8);
    out.extend_from_slice(&p.base.to_be_bytes()[..nbytes]);
}

/// One path attribute with standard (1-byte) or extended (2-byte) length.
fn push_attr(out: &mut Vec<u8>, flags: u8, attr_type: u8, value: &[u8]) {
    if value.len() > 255 {
        out.push(flags | 0x10);
        out.push(attr_type);
        push_u16(out, value.len() as u16);
    } else {
        out.push(flags);
        out.push(attr_type);
        out.push(value.len() as u8);
    }
    out.extend_from_slice(value);
}

fn encode_path_attr_value(sequence: &[u32], as_set: &[u32], asn_bytes: usize) -> Vec<u8> {
    let mut value = Vec::new();
    for (seg_type, members) in [(2u8, sequence), (1u8, as_set)] {
        if members.is_empty() {
            continue;
        }
        value.push(seg_type);
        value.push(members.len() as u8);
        for &asn in members {
            if asn_bytes == 2 {
                assert!(asn < 1 << 16, "2-byte path cannot carry ASN {asn}");
                push_u16(&mut value, asn as u16);
            } else {
                push_u32(&mut value, asn);
            }
        }
    }
    value
}

/// Encodes one complete MRT frame carrying a BGP UPDATE.
pub fn encode_update(spec: &UpdateSpec) -> Vec<u8> {
    let asn_bytes = if spec.as4 { 4 } else { 2 };

    // BGP UPDATE payload
    let mut withdrawn = Vec::new();
    for p in &spec.withdrawn {
        push_prefix(&mut withdrawn, p);
    }
    let mut attrs = Vec::new();
    if !spec.path_sequence.is_empty() || !spec.as_set.is_empty() {
        // ORIGIN (IGP) for realism, then AS_PATH, then NEXT_HOP
        push_attr(&mut attrs, 0x40, 1, &[0]);
        let path = encode_path_attr_value(&spec.path_sequence, &spec.as_set, asn_bytes);
        push_attr(&mut attrs, 0x40, 2, &path);
        push_attr(&mut attrs, 0x40, 3, &[192, 0, 2, 1]);
    }
    if let Some(p4) = &spec.as4_path {
        let path = encode_path_attr_value(p4, &[], 4);
        push_attr(&mut attrs, 0xc0, 17, &path);
    }
    let mut payload = Vec::new();
    push_u16(&mut payload, withdrawn.len() as u16);
    payload.extend_from_slice(&withdrawn);
    push_u16(&mut payload, attrs.len() as u16);
    payload.extend_from_slice(&attrs);
    for p in &spec.announced {
        push_prefix(&mut payload, p);
    }

    // BGP message header
    let mut message = vec![0xffu8; 16];
    push_u16(&mut message, (19 + payload.len()) as u16);
    message.push(2); // UPDATE
    message.extend_from_slice(&payload);

    // BGP4MP body
    let mut body = Vec::new();
    if spec.extended_timing {
        push_u32(&mut body, 0); // microseconds
    }
    if spec.as4 {
        push_u32(&mut body, 64496); // peer AS
        push_u32(&mut body, 64497); // local AS
    } else {
        push_u16(&mut body, 64496);
        push_u16(&mut body, 64497);
    }
    push_u16(&mut body, 0); // interface index
    push_u16(&mut body, 1); // AFI IPv4
    body.extend_from_slice(&[192, 0, 2, 10]); // peer IP
    body.extend_from_slice(&[192, 0, 2, 11]); // local IP
    body.extend_from_slice(&message);

    frame(
        spec.timestamp,
        if spec.extended_timing {
            MRT_BGP4MP_ET
        } else {
            MRT_BGP4MP
        },
        if spec.as4 {
            SUB_MESSAGE_AS4
        } else {
            SUB_MESSAGE
        },
        &body,
    )
}

/// Encodes a BGP4MP STATE_CHANGE frame (decoders must skip these).
pub fn encode_state_change(timestamp: u32) -> Vec<u8> {
    let mut body = Vec::new();
    push_u16(&mut body, 64496);
    push_u16(&mut body, 64497);
    push_u16(&mut body, 0);
    push_u16(&mut body, 1);
    body.extend_from_slice(&[192, 0, 2, 10]);
    body.extend_from_slice(&[192, 0, 2, 11]);
    push_u16(&mut body, 5); // OpenConfirm
    push_u16(&mut body, 6); // Established
    frame(timestamp, MRT_BGP4MP, SUB_STATE_CHANGE, &body)
}

/// MRT common header plus body.
fn frame(timestamp: u32, mrt_type: u16, subtype: u16, body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + body.len());
    push_u32(&mut out, timestamp);
    push_u16(&mut out, mrt_type);
    push_u16(&mut out, subtype);
    push_u32(&mut out, body.len() as u32);
    out.extend_from_slice(body);
    out
}

/// A random but well-formed update specification for roundtrip testing.
pub fn random_update_spec(rng: &mut impl Rng) -> UpdateSpec {
    let as4 = rng.gen_bool(0.5);
    let asn_max: u32 = if as4 { u32::MAX } else { u16::MAX as u32 };
    let mut prefixes = |max: usize| -> Vec<PrefixSpec> {
        (0..rng.gen_range(0..=max))
            .map(|_| PrefixSpec {
                base: rng.gen(),
                len: rng.gen_range(0..=32),
            })
            .collect()
    };
    let announced = prefixes(4);
    let withdrawn = prefixes(3);
    let path_len = rng.gen_range(0..=6);
    let path_sequence: Vec<u32> = (0..path_len).map(|_| rng.gen_range(1..=asn_max)).collect();
    let as_set: Vec<u32> = if rng.gen_bool(0.25) {
        (0..rng.gen_range(1..=3))
            .map(|_| rng.gen_range(1..=asn_max))
            .collect()
    } else {
        Vec::new()
    };
    UpdateSpec {
        timestamp: rng.gen(),
        extended_timing: rng.gen_bool(0.3),
        as4,
        announced,
        withdrawn,
        path_sequence,
        as_set,
        as4_path: None,
    }
}
