//! Binary model file, little-endian throughout:
//!
//! ```text
//! offset  size        field
//! 0       8           magic "PCCMDL01"
//! 8       4           d_x        (u32)
//! 12      4           n_c        (u32)
//! 16      4           n_e        (u32)
//! 20      8           alpha      (f64)
//! 28      8           N          (u64, training set size)
//! 36      8*n_e       eigenvalues (f64)
//! ...     8*d_z*n_e   basis, column-major (f64)
//! ...     8           CRC-64/XZ of every preceding byte (u64)
//! ```

use std::fs;
use std::path::Path;

use crc::{Crc, CRC_64_XZ};

use super::{PccModel, TrainingFingerprint};
use crate::encoding::EncodingSpec;
use crate::error::{PccError, Result};
use crate::linalg::DenseMatrix;

pub const MODEL_MAGIC: &[u8; 8] = b"PCCMDL01";
const MAGIC_FAMILY: &[u8; 6] = b"PCCMDL";
const HEADER_LEN: usize = 36;
const CRC: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

pub fn encode_model(model: &PccModel) -> Vec<u8> {
    let spec = model.spec();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * (model.n_e() * (spec.d_z() + 1) + 1));
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&(spec.d_x() as u32).to_le_bytes());
    out.extend_from_slice(&(spec.n_classes() as u32).to_le_bytes());
    out.extend_from_slice(&(model.n_e() as u32).to_le_bytes());
    out.extend_from_slice(&spec.alpha().to_le_bytes());
    out.extend_from_slice(&model.fingerprint().n_train.to_le_bytes());
    for v in model.eigenvalues() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in model.basis().as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let crc = CRC.checksum(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

fn u32_at(b: &[u8], at: usize) -> usize {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap()) as usize
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode_model(bytes: &[u8], source: &str) -> Result<PccModel> {
    if bytes.len() < MODEL_MAGIC.len() + 8 {
        return Err(PccError::format(source, "byte offset 0", "file too short for a model"));
    }
    if &bytes[..8] != MODEL_MAGIC {
        let message = if &bytes[..6] == MAGIC_FAMILY {
            format!(
                "unsupported model version {:?}",
                String::from_utf8_lossy(&bytes[6..8])
            )
        } else {
            "not a model file (bad magic)".to_string()
        };
        return Err(PccError::format(source, "byte offset 0", message));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().unwrap());
    let computed = CRC.checksum(body);
    if stored != computed {
        return Err(PccError::Checksum { stored, computed });
    }
    if body.len() < HEADER_LEN {
        return Err(PccError::format(source, "byte offset 8", "truncated header"));
    }
    let d_x = u32_at(body, 8);
    let n_c = u32_at(body, 12);
    let n_e = u32_at(body, 16);
    let alpha = f64_at(body, 20);
    let n_train = u64::from_le_bytes(body[28..36].try_into().unwrap());
    let d_z = d_x + n_c;
    let expected = HEADER_LEN + 8 * (n_e + d_z * n_e);
    if body.len() != expected {
        return Err(PccError::format(
            source,
            format!("byte offset {}", body.len()),
            format!("payload is {} bytes, header implies {expected}", body.len()),
        ));
    }
    let spec = EncodingSpec::new(d_x, n_c, alpha)?;
    let floats: Vec<f64> = body[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let (eigenvalues, basis) = floats.split_at(n_e);
    let basis = DenseMatrix::from_col_major(d_z, n_e, basis.to_vec())?;
    PccModel::from_parts(
        spec,
        basis,
        eigenvalues.to_vec(),
        TrainingFingerprint {
            dataset: String::new(),
            seed: None,
            n_train,
        },
    )
}

pub fn save_model(model: &PccModel, path: &Path) -> Result<()> {
    fs::write(path, encode_model(model)).map_err(|e| PccError::io(path, e))
}

pub fn load_model(path: &Path) -> Result<PccModel> {
    let bytes = fs::read(path).map_err(|e| PccError::io(path, e))?;
    decode_model(&bytes, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::LabeledDataset;

    fn model() -> PccModel {
        let x = DenseMatrix::from_rows(&[&[0.9, 0.8, 0.1, 0.2], &[0.1, 0.3, 0.9, 0.7]]).unwrap();
        let d = LabeledDataset::new("m", x, vec![0, 0, 1, 1], 2).unwrap();
        PccModel::fit(EncodingSpec::new(2, 2, 0.25).unwrap(), &d, 3).unwrap()
    }

    #[test]
    fn layout_and_round_trip() {
        let m = model();
        let bytes = encode_model(&m);
        assert_eq!(&bytes[..8], b"PCCMDL01");
        assert_eq!(bytes.len(), 36 + 8 * (3 + 4 * 3) + 8);
        assert_eq!(u32_at(&bytes, 16), 3);
        assert_eq!(f64_at(&bytes, 20), 0.25);
        let back = decode_model(&bytes, "mem").unwrap();
        assert_eq!(back.basis(), m.basis());
        assert_eq!(back.eigenvalues(), m.eigenvalues());
        assert_eq!(back.fingerprint().n_train, 4);
    }

    #[test]
    fn truncation_is_a_checksum_error() {
        let bytes = encode_model(&model());
        for cut in [1, 8, 20, bytes.len() - 40] {
            let e = decode_model(&bytes[..bytes.len() - cut], "mem").unwrap_err();
            assert!(matches!(e, PccError::Checksum { .. }), "cut {cut}: {e}");
        }
    }

    #[test]
    fn flipped_byte_and_bad_magic() {
        let mut bytes = encode_model(&model());
        bytes[50] ^= 0x10;
        assert!(matches!(decode_model(&bytes, "mem"), Err(PccError::Checksum { .. })));

        let mut bytes = encode_model(&model());
        bytes[7] = b'2';
        let e = decode_model(&bytes, "mem").unwrap_err();
        assert!(e.to_string().contains("unsupported model version"));

        let e = decode_model(b"hello world, not a model", "mem").unwrap_err();
        assert!(e.to_string().contains("bad magic"));
    }
}
