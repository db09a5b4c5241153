//! Streaming MRT decoder for archived BGP update messages (BGP4MP and
//! BGP4MP_ET framing, 2- and 4-byte AS numbers).
//!
//! The decoder is total: any byte input terminates without panic. Inner
//! malformities skip the affected frame (counted); only an absurd frame
//! length is a hard resync error, since the stream cannot be advanced past
//! it.

use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScanError};
use crate::rpsl::AsNumber;

pub const MRT_TYPE_BGP4MP: u16 = 16;
pub const MRT_TYPE_BGP4MP_ET: u16 = 17;
pub const SUBTYPE_STATE_CHANGE: u16 = 0;
pub const SUBTYPE_MESSAGE: u16 = 1;
pub const SUBTYPE_MESSAGE_AS4: u16 = 4;
pub const SUBTYPE_STATE_CHANGE_AS4: u16 = 5;
const BGP_TYPE_UPDATE: u8 = 2;
const ATTR_AS_PATH: u8 = 2;
const ATTR_AS4_PATH: u8 = 17;
const ATTR_MP_REACH_NLRI: u8 = 14;
const AS_TRANS: u32 = 23456;

/// Frames larger than this are treated as header corruption.
const MAX_FRAME_LEN: u32 = 1 << 20;

/// An IPv4 CIDR prefix with its base masked to the prefix length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cidr {
    pub base: u32,
    pub len: u8,
}

impl Cidr {
    pub fn new(base: u32, len: u8) -> Option<Cidr> {
        if len > 32 {
            return None;
        }
        Some(Cidr {
            base: base & Cidr::mask(len),
            len,
        })
    }

    fn mask(len: u8) -> u32 {
        if len == 0 {
            0
        } else {
            u32::MAX << (32 - len)
        }
    }

    /// Inclusive address interval covered by the prefix.
    pub fn interval(&self) -> (u32, u32) {
        (self.base, self.base | !Cidr::mask(self.len))
    }

    pub fn parse(s: &str) -> Option<Cidr> {
        let (addr, len) = s.trim().split_once('/')?;
        let base = crate::rpsl::parse_ipv4(addr)?;
        let len: u8 = len.parse().ok()?;
        Cidr::new(base, len)
    }
}

impl fmt::Display for Cidr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", crate::rpsl::fmt_ipv4(self.base), self.len)
    }
}

/// One decoded BGP UPDATE carrying NLRI and/or withdrawals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BgpUpdateRecord {
    pub timestamp: u64,
    pub announced: Vec<Cidr>,
    pub withdrawn: Vec<Cidr>,
    /// AS path with AS_SET members flattened in place.
    pub as_path: Vec<AsNumber>,
    /// True when the path contained an AS_SET segment.
    pub has_as_set: bool,
}

#[derive(Debug, Clone, Default)]
pub struct MrtParse {
    pub records: Vec<BgpUpdateRecord>,
    /// Non-UPDATE frames (state changes, keepalives, table dumps, unknown
    /// MRT types) plus frames whose inner BGP payload was malformed.
    pub skipped: u64,
    /// IPv6 NLRI attributes seen (and ignored) inside processed updates.
    pub ipv6_nlri_skipped: u64,
    /// Set when the stream ended inside a frame.
    pub truncation: Option<String>,
}

struct Slice<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Slice<'a> {
    fn new(data: &'a [u8]) -> Slice<'a> {
        Slice { data, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        if self.remaining() < n {
            return None;
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Some(out)
    }

    fn u8(&mut self) -> Option<u8> {
        self.take(1).map(|b| b[0])
    }

    fn u16(&mut self) -> Option<u16> {
        self.take(2).map(|b| u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

fn read_prefixes(data: &[u8]) -> Option<Vec<Cidr>> {
    let mut s = Slice::new(data);
    let mut out = Vec::new();
    while s.remaining() > 0 {
        let len = s.u8()?;
        if len > 32 {
            return None;
        }
        let nbytes = (len as usize).div_ceil(8);
        let bytes = s.take(nbytes)?;
        let mut base = [0u8; 4];
        base[..nbytes].copy_from_slice(bytes);
        out.push(Cidr::new(u32::from_be_bytes(base), len)?);
    }
    Some(out)
}

struct PathSegments {
    flattened: Vec<u32>,
    has_as_set: bool,
}

fn read_as_path(data: &[u8], asn_bytes: usize) -> Option<PathSegments> {
    let mut s = Slice::new(data);
    let mut flattened = Vec::new();
    let mut has_as_set = false;
    while s.remaining() > 0 {
        let seg_type = s.u8()?;
        let count = s.u8()? as usize;
        if seg_type == 1 {
            has_as_set = true;
        }
        for _ in 0..count {
            let asn = if asn_bytes == 2 {
                s.u16()? as u32
            } else {
                s.u32()?
            };
            flattened.push(asn);
        }
    }
    Some(PathSegments {
        flattened,
        has_as_set,
    })
}

struct UpdateOutcome {
    record: Option<BgpUpdateRecord>,
    ipv6_nlri: u64,
}

/// Decodes the BGP message of one BGP4MP frame. Returns None on any inner
/// malformity.
fn parse_bgp4mp_message(body: &[u8], as4: bool, timestamp: u64) -> Option<UpdateOutcome> {
    let mut s = Slice::new(body);
    let asn_bytes = if as4 { 4 } else { 2 };
    let _peer_as = s.take(asn_bytes)?;
    let _local_as = s.take(asn_bytes)?;
    let _ifindex = s.u16()?;
    let afi = s.u16()?;
    let addr_len = match afi {
        1 => 4,
        2 => 16,
        _ => return None,
    };
    let _peer_ip = s.take(addr_len)?;
    let _local_ip = s.take(addr_len)?;

    // BGP message header
    let marker = s.take(16)?;
    if marker.iter().any(|&b| b != 0xff) {
        return None;
    }
    let msg_len = s.u16()? as usize;
    let msg_type = s.u8()?;
    if msg_len < 19 || msg_len - 19 > s.remaining() {
        return None;
    }
    let payload = s.take(msg_len - 19)?;
    if msg_type != BGP_TYPE_UPDATE {
        return None;
    }

    let mut m = Slice::new(payload);
    let withdrawn_len = m.u16()? as usize;
    let withdrawn = read_prefixes(m.take(withdrawn_len)?)?;
    let attrs_len = m.u16()? as usize;
    let attrs = m.take(attrs_len)?;
    let announced = read_prefixes(m.take(m.remaining())?)?;

    let mut a = Slice::new(attrs);
    let mut as_path: Option<PathSegments> = None;
    let mut as4_path: Option<PathSegments> = None;
    let mut ipv6_nlri = 0;
    while a.remaining() > 0 {
        let flags = a.u8()?;
        let attr_type = a.u8()?;
        let attr_len = if flags & 0x10 != 0 {
            a.u16()? as usize
        } else {
            a.u8()? as usize
        };
        let value = a.take(attr_len)?;
        match attr_type {
            ATTR_AS_PATH => as_path = Some(read_as_path(value, asn_bytes)?),
            ATTR_AS4_PATH => as4_path = Some(read_as_path(value, 4)?),
            ATTR_MP_REACH_NLRI
                if value.len() >= 2 && u16::from_be_bytes([value[0], value[1]]) == 2 =>
            {
                ipv6_nlri += 1;
            }
            _ => {}
        }
    }

    let (path, has_as_set) = reconcile_paths(as_path, as4_path);

    if announced.is_empty() && withdrawn.is_empty() {
        return Some(UpdateOutcome {
            record: None,
            ipv6_nlri,
        });
    }
    Some(UpdateOutcome {
        record: Some(BgpUpdateRecord {
            timestamp,
            announced,
            withdrawn,
            as_path: path.into_iter().map(AsNumber).collect(),
            has_as_set,
        }),
        ipv6_nlri,
    })
}

/// Standard AS4_PATH precedence: when the AS4_PATH is no longer than the
/// AS_PATH, the AS_PATH's leading excess is prepended to the AS4_PATH;
/// otherwise the AS4_PATH is ignored.
fn reconcile_paths(
    as_path: Option<PathSegments>,
    as4_path: Option<PathSegments>,
) -> (Vec<u32>, bool) {
    match (as_path, as4_path) {
        (Some(p2), Some(p4)) => {
            if p4.flattened.len() <= p2.flattened.len() && p2.flattened.contains(&AS_TRANS) {
                let keep = p2.flattened.len() - p4.flattened.len();
                let mut path: Vec<u32> = p2.flattened[..keep].to_vec();
                path.extend(&p4.flattened);
                (path, p2.has_as_set || p4.has_as_set)
            } else {
                (p2.flattened, p2.has_as_set)
            }
        }
        (Some(p), None) => (p.flattened, p.has_as_set),
        (None, Some(_)) | (None, None) => (Vec::new(), false),
    }
}

/// Decodes an MRT-framed stream of BGP updates.
///
/// Non-UPDATE and unknown-type frames are skipped and counted; a truncated
/// trailing frame stops the decoder cleanly with a truncation note.
pub fn parse_mrt(input: impl Read) -> Result<MrtParse> {
    let mut reader = std::io::BufReader::new(input);
    let mut out = MrtParse::default();
    let mut offset: u64 = 0;

    loop {
        let mut header = [0u8; 12];
        match read_exact_or_partial(&mut reader, &mut header)? {
            0 => break,
            n if n < 12 => {
                out.truncation = Some(format!("truncated MRT header at byte {offset}"));
                break;
            }
            _ => {}
        }
        let timestamp = u32::from_be_bytes(header[0..4].try_into().unwrap()) as u64;
        let mrt_type = u16::from_be_bytes(header[4..6].try_into().unwrap());
        let subtype = u16::from_be_bytes(header[6..8].try_into().unwrap());
        let length = u32::from_be_bytes(header[8..12].try_into().unwrap());
        if length > MAX_FRAME_LEN {
            return Err(ScanError::FrameResync {
                offset,
                detail: format!("frame length {length} exceeds {MAX_FRAME_LEN}"),
            });
        }
        let mut body = vec![0u8; length as usize];
        let got = read_exact_or_partial(&mut reader, &mut body)?;
        if got < body.len() {
            out.truncation = Some(format!(
                "truncated MRT frame body at byte {}",
                offset + 12 + got as u64
            ));
            break;
        }
        offset += 12 + length as u64;

        let is_bgp4mp = mrt_type == MRT_TYPE_BGP4MP || mrt_type == MRT_TYPE_BGP4MP_ET;
        if !is_bgp4mp {
            out.skipped += 1;
            continue;
        }
        // BGP4MP_ET carries an extra microseconds field inside the body.
        let payload = if mrt_type == MRT_TYPE_BGP4MP_ET {
            if body.len() < 4 {
                out.skipped += 1;
                continue;
            }
            &body[4..]
        } else {
            &body[..]
        };
        let as4 = match subtype {
            SUBTYPE_MESSAGE => false,
            SUBTYPE_MESSAGE_AS4 => true,
            SUBTYPE_STATE_CHANGE | SUBTYPE_STATE_CHANGE_AS4 => {
                out.skipped += 1;
                continue;
            }
            _ => {
                out.skipped += 1;
                continue;
            }
        };
        match parse_bgp4mp_message(payload, as4, timestamp) {
            Some(outcome) => {
                out.ipv6_nlri_skipped += outcome.ipv6_nlri;
                match outcome.record {
                    Some(record) => out.records.push(record),
                    None => out.skipped += 1,
                }
            }
            None => out.skipped += 1,
        }
    }
    Ok(out)
}

/// Reads as many bytes as possible into `buf`; returns how many were read.
fn read_exact_or_partial(reader: &mut impl Read, buf: &mut [u8]) -> Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(ScanError::Io(e)),
        }
    }
    Ok(filled)
}
