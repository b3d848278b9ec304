//! The `.kmix` on-disk container. Every index kind here is a deterministic
//! function of the raw text and the parameter block, so the container stores
//! exactly those and the loader rebuilds the structures; this makes the
//! byte-identical round-trip guarantee trivial and keeps the format stable
//! across internal refactors.
//!
//! Layout (little-endian throughout):
//!
//! ```text
//! magic   "KMIX"                       4 bytes
//! version u16                          currently 1
//! kind    u8                           see IndexKind
//! params  k, mu, h, gamma, tau, sigma  u32 each
//! wildcard u8                          wildcard byte (wild kind only)
//! count   u32                          number of sections
//! section name_len u16, name, payload_len u64, payload
//! ```

use std::fmt;

pub const MAGIC: &[u8; 4] = b"KMIX";
pub const VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    Errata,
    Compact,
    Short,
    Long,
    Wild,
    Auto,
}

impl IndexKind {
    pub fn tag(self) -> u8 {
        match self {
            IndexKind::Errata => 0,
            IndexKind::Compact => 1,
            IndexKind::Short => 2,
            IndexKind::Long => 3,
            IndexKind::Wild => 4,
            IndexKind::Auto => 5,
        }
    }

    pub fn from_tag(t: u8) -> Result<Self, ContainerError> {
        Ok(match t {
            0 => IndexKind::Errata,
            1 => IndexKind::Compact,
            2 => IndexKind::Short,
            3 => IndexKind::Long,
            4 => IndexKind::Wild,
            5 => IndexKind::Auto,
            _ => return Err(ContainerError::BadKind(t)),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::Errata => "errata",
            IndexKind::Compact => "compact",
            IndexKind::Short => "short",
            IndexKind::Long => "long",
            IndexKind::Wild => "wild",
            IndexKind::Auto => "auto",
        }
    }
}

/// The parameter block. Fields not meaningful for a kind are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Params {
    pub k: u32,
    pub mu: u32,
    pub h: u32,
    pub gamma: u32,
    pub tau: u32,
    pub sigma: u32,
    pub wildcard: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexContainer {
    pub kind: IndexKind,
    pub params: Params,
    pub sections: Vec<(String, Vec<u8>)>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum ContainerError {
    BadMagic,
    BadVersion(u16),
    BadKind(u8),
    Truncated,
    MissingSection(&'static str),
}

impl fmt::Display for ContainerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContainerError::BadMagic => write!(f, "not a KMIX index file"),
            ContainerError::BadVersion(v) => {
                write!(f, "unsupported format version {v} (expected {VERSION})")
            }
            ContainerError::BadKind(t) => write!(f, "unknown index kind tag {t}"),
            ContainerError::Truncated => write!(f, "file is truncated or corrupt"),
            ContainerError::MissingSection(s) => write!(f, "missing required section {s:?}"),
        }
    }
}

impl std::error::Error for ContainerError {}

impl IndexContainer {
    pub fn new(kind: IndexKind, params: Params, text: &[u8]) -> Self {
        IndexContainer {
            kind,
            params,
            sections: vec![("text".to_string(), text.to_vec())],
        }
    }

    pub fn section(&self, name: &str) -> Option<&[u8]> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p.as_slice())
    }

    pub fn text(&self) -> Result<&[u8], ContainerError> {
        self.section("text").ok_or(ContainerError::MissingSection("text"))
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.kind.tag());
        let p = &self.params;
        for v in [p.k, p.mu, p.h, p.gamma, p.tau, p.sigma] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(p.wildcard);
        out.extend_from_slice(&(self.sections.len() as u32).to_le_bytes());
        for (name, payload) in &self.sections {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
            out.extend_from_slice(payload);
        }
        out
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self, ContainerError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(ContainerError::BadMagic);
        }
        let version = u16::from_le_bytes(r.take(2)?.try_into().unwrap());
        if version != VERSION {
            return Err(ContainerError::BadVersion(version));
        }
        let kind = IndexKind::from_tag(r.take(1)?[0])?;
        let mut vals = [0u32; 6];
        for v in &mut vals {
            *v = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        }
        let wildcard = r.take(1)?[0];
        let params = Params {
            k: vals[0],
            mu: vals[1],
            h: vals[2],
            gamma: vals[3],
            tau: vals[4],
            sigma: vals[5],
            wildcard,
        };
        let count = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        let mut sections = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let nlen = u16::from_le_bytes(r.take(2)?.try_into().unwrap()) as usize;
            let name = String::from_utf8_lossy(r.take(nlen)?).into_owned();
            let plen = u64::from_le_bytes(r.take(8)?.try_into().unwrap()) as usize;
            let payload = r.take(plen)?.to_vec();
            sections.push((name, payload));
        }
        if r.pos != bytes.len() {
            return Err(ContainerError::Truncated);
        }
        Ok(IndexContainer { kind, params, sections })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ContainerError> {
        if self.pos + n > self.bytes.len() {
            return Err(ContainerError::Truncated);
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}
