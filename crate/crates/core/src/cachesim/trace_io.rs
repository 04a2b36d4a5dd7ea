//! Trace and curve file formats.
//!
//! Binary trace: a sequence of 9-byte records, a little-endian `u64` address
//! followed by one kind byte (0 = instruction fetch, 1 = load, 2 = store).
//!
//! Text trace: one access per line, `<kind> <hex address>`, kind being `I`,
//! `L` or `S`. Blank lines and lines starting with `#` are ignored.
//!
//! Segment sidecar (JSON): `{"segments": [{"weight": w, "accesses": n}, ...]}`
//! splitting the trace into consecutive runs of `n` accesses.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Access, AccessKind, AccessTrace, CurveKind, CurvePoint, MissRatioCurve, Segment};
use crate::error::{Error, Result};

const RECORD_BYTES: usize = 9;

fn kind_code(kind: AccessKind) -> u8 {
    match kind {
        AccessKind::IFetch => 0,
        AccessKind::Load => 1,
        AccessKind::Store => 2,
    }
}

pub fn read_binary_trace(bytes: &[u8]) -> Result<Vec<Access>> {
    if !bytes.len().is_multiple_of(RECORD_BYTES) {
        return Err(Error::invalid(format!(
            "binary trace length {} is not a multiple of {RECORD_BYTES}",
            bytes.len()
        )));
    }
    bytes
        .chunks_exact(RECORD_BYTES)
        .enumerate()
        .map(|(i, r)| {
            let address = u64::from_le_bytes(r[..8].try_into().expect("8 bytes"));
            let kind = match r[8] {
                0 => AccessKind::IFetch,
                1 => AccessKind::Load,
                2 => AccessKind::Store,
                k => {
                    return Err(Error::Parse {
                        line: i as u64 + 1,
                        message: format!("unknown access kind byte {k}"),
                    })
                }
            };
            Ok(Access { address, kind })
        })
        .collect()
}

pub fn write_binary_trace<W: Write>(mut out: W, accesses: &[Access]) -> std::io::Result<()> {
    for a in accesses {
        out.write_all(&a.address.to_le_bytes())?;
        out.write_all(&[kind_code(a.kind)])?;
    }
    Ok(())
}

pub fn parse_text_trace<R: Read>(mut input: R) -> Result<Vec<Access>> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| Error::invalid(format!("reading text trace: {e}")))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: i as u64 + 1,
            message,
        };
        let mut fields = line.split_whitespace();
        let (Some(kind), Some(addr), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err(format!("expected `<kind> <address>`, got `{line}`")));
        };
        let kind = match kind.to_ascii_uppercase().as_str() {
            "I" | "IFETCH" => AccessKind::IFetch,
            "L" | "LOAD" => AccessKind::Load,
            "S" | "STORE" => AccessKind::Store,
            _ => return Err(err(format!("unknown access kind `{kind}`"))),
        };
        let hex = addr
            .strip_prefix("0x")
            .or_else(|| addr.strip_prefix("0X"))
            .unwrap_or(addr);
        let address = u64::from_str_radix(hex, 16).map_err(|e| err(format!("bad address `{addr}`: {e}")))?;
        out.push(Access { address, kind });
    }
    Ok(out)
}

pub fn write_text_trace<W: Write>(mut out: W, accesses: &[Access]) -> std::io::Result<()> {
    for a in accesses {
        let k = match a.kind {
            AccessKind::IFetch => 'I',
            AccessKind::Load => 'L',
            AccessKind::Store => 'S',
        };
        writeln!(out, "{k} {:#x}", a.address)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub weight: f64,
    pub accesses: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSidecar {
    pub segments: Vec<SegmentSpec>,
}

/// Splits `accesses` per the sidecar; without one the trace is one segment.
/// Weights are renormalized to sum to 1.
pub fn build_trace(accesses: Vec<Access>, sidecar: Option<&SegmentSidecar>) -> Result<AccessTrace> {
    let Some(sidecar) = sidecar else {
        return AccessTrace::single(accesses);
    };
    let declared: usize = sidecar.segments.iter().map(|s| s.accesses).sum();
    if declared != accesses.len() {
        return Err(Error::invalid(format!(
            "sidecar declares {declared} accesses but the trace holds {}",
            accesses.len()
        )));
    }
    let mut rest = accesses.as_slice();
    let mut segments = Vec::with_capacity(sidecar.segments.len());
    for s in &sidecar.segments {
        let (head, tail) = rest.split_at(s.accesses);
        segments.push(Segment {
            weight: s.weight,
            accesses: head.to_vec(),
        });
        rest = tail;
    }
    AccessTrace::normalized(segments)
}

pub const CURVE_HEADER: [&str; 2] = ["capacity_bytes", "miss_ratio"];

/// Writes `capacity_bytes,miss_ratio` rows at full precision.
pub fn write_curve_csv<W: Write>(out: W, curve: &MissRatioCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::invalid(format!("writing curve: {e}"));
    w.write_record(CURVE_HEADER).map_err(csv_err)?;
    for p in curve.points() {
        w.write_record([p.capacity_bytes.to_string(), p.miss_ratio.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::invalid(format!("writing curve: {e}")))?;
    Ok(())
}

pub fn read_curve_csv<R: Read>(input: R, kind: CurveKind) -> Result<MissRatioCurve> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    if header.iter().collect::<Vec<_>>() != CURVE_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", CURVE_HEADER.join(",")),
        });
    }
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let err = |m: String| Error::Parse { line, message: m };
        let capacity_bytes = rec[0].parse().map_err(|e| err(format!("capacity: {e}")))?;
        let miss_ratio = rec[1].parse().map_err(|e| err(format!("miss ratio: {e}")))?;
        points.push(CurvePoint {
            capacity_bytes,
            miss_ratio,
        });
    }
    MissRatioCurve::new(kind, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kind_strategy() -> impl Strategy<Value = AccessKind> {
        prop_oneof![
            Just(AccessKind::IFetch),
            Just(AccessKind::Load),
            Just(AccessKind::Store)
        ]
    }

    proptest! {
        #[test]
        fn binary_and_text_round_trip(v in prop::collection::vec((any::<u64>(), kind_strategy()), 0..50)) {
            let accesses: Vec<Access> = v.into_iter().map(|(a, k)| Access::new(a, k)).collect();
            let mut bin = Vec::new();
            write_binary_trace(&mut bin, &accesses).unwrap();
            prop_assert_eq!(&read_binary_trace(&bin).unwrap(), &accesses);
            let mut text = Vec::new();
            write_text_trace(&mut text, &accesses).unwrap();
            prop_assert_eq!(&parse_text_trace(text.as_slice()).unwrap(), &accesses);
        }
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(read_binary_trace(&[0; 10]).is_err());
        let mut rec = vec![0u8; 8];
        rec.push(7);
        assert!(read_binary_trace(&rec).is_err());
        let e = parse_text_trace("# c\nL 10\nX 20\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(parse_text_trace("L zz".as_bytes()).is_err());
    }

    #[test]
    fn sidecar_splits_and_normalizes() {
        let acc: Vec<Access> = (0..5).map(|a| Access::new(a, AccessKind::Load)).collect();
        let sc = SegmentSidecar {
            segments: vec![
                SegmentSpec { weight: 1.0, accesses: 2 },
                SegmentSpec { weight: 3.0, accesses: 3 },
            ],
        };
        let t = build_trace(acc.clone(), Some(&sc)).unwrap();
        assert_eq!(t.segments()[1].accesses.len(), 3);
        assert_eq!(t.segments()[1].weight, 0.75);
        let bad = SegmentSidecar {
            segments: vec![SegmentSpec { weight: 1.0, accesses: 4 }],
        };
        assert!(build_trace(acc, Some(&bad)).is_err());
    }

    #[test]
    fn curve_csv_round_trip() {
        let c = MissRatioCurve::new(
            CurveKind::Instruction,
            vec![
                CurvePoint { capacity_bytes: 16384, miss_ratio: 0.1 + 0.2 },
                CurvePoint { capacity_bytes: 32768, miss_ratio: 1.0 / 3.0 * 0.5 },
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &c).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("capacity_bytes,miss_ratio\n"));
        assert_eq!(read_curve_csv(buf.as_slice(), CurveKind::Instruction).unwrap(), c);
    }
}
