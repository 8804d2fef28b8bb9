//! IDX binaries (the MNIST distribution format).
//!
//! Header fields are big-endian `u32`s: a magic number (`0x00000803` for
//! 3-d unsigned-byte image arrays, `0x00000801` for 1-d label arrays)
//! followed by one size per dimension, then the raw payload.

use std::fs;
use std::path::Path;

use super::LabeledDataset;
use crate::error::{PccError, Result};
use crate::linalg::DenseMatrix;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;
const MNIST_CLASSES: usize = 10;

fn read_u32(bytes: &[u8], offset: usize, source: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| {
            PccError::format(
                source,
                format!("byte offset {offset}"),
                "truncated header",
            )
        })
}

/// Pixel matrix (`rows*cols × count`) scaled to `[0, 1]` by dividing by 255.
pub fn parse_idx_images(bytes: &[u8], source: &str) -> Result<DenseMatrix> {
    let magic = read_u32(bytes, 0, source)?;
    if magic != IMAGES_MAGIC {
        return Err(PccError::format(
            source,
            "byte offset 0",
            format!("bad magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}"),
        ));
    }
    let count = read_u32(bytes, 4, source)? as usize;
    let rows = read_u32(bytes, 8, source)? as usize;
    let cols = read_u32(bytes, 12, source)? as usize;
    let dim = rows * cols;
    let payload = &bytes[16..];
    let needed = count * dim;
    if payload.len() < needed {
        return Err(PccError::format(
            source,
            format!("byte offset {}", 16 + payload.len()),
            format!("truncated payload: {needed} pixel bytes declared, {} present", payload.len()),
        ));
    }
    let data = payload[..needed].iter().map(|&p| f64::from(p) / 255.0).collect();
    Ok(DenseMatrix::from_parts_unchecked(dim, count, data))
}

/// Raw label bytes.
pub fn parse_idx_labels(bytes: &[u8], source: &str) -> Result<Vec<u8>> {
    let magic = read_u32(bytes, 0, source)?;
    if magic != LABELS_MAGIC {
        return Err(PccError::format(
            source,
            "byte offset 0",
            format!("bad magic {magic:#010x}, expected {LABELS_MAGIC:#010x}"),
        ));
    }
    let count = read_u32(bytes, 4, source)? as usize;
    let payload = &bytes[8..];
    if payload.len() < count {
        return Err(PccError::format(
            source,
            format!("byte offset {}", 8 + payload.len()),
            format!("truncated payload: {count} labels declared, {} present", payload.len()),
        ));
    }
    Ok(payload[..count].to_vec())
}

/// Digit `k` becomes class `k + 1` (0-based index `k`), `n_c = 10`.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<LabeledDataset> {
    let img_name = images_path.display().to_string();
    let lbl_name = labels_path.display().to_string();
    let img = fs::read(images_path).map_err(|e| PccError::io(images_path, e))?;
    let lbl = fs::read(labels_path).map_err(|e| PccError::io(labels_path, e))?;
    let features = parse_idx_images(&img, &img_name)?;
    let raw = parse_idx_labels(&lbl, &lbl_name)?;
    if raw.len() != features.cols() {
        return Err(PccError::format(
            &lbl_name,
            "byte offset 4",
            format!("{} labels for {} images", raw.len(), features.cols()),
        ));
    }
    if let Some(i) = raw.iter().position(|&l| usize::from(l) >= MNIST_CLASSES) {
        return Err(PccError::format(
            &lbl_name,
            format!("byte offset {}", 8 + i),
            format!("label {} is not a digit", raw[i]),
        ));
    }
    let labels = raw.iter().map(|&l| usize::from(l)).collect();
    let names = (0..MNIST_CLASSES).map(|d| d.to_string()).collect();
    let name = images_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| img_name.clone());
    LabeledDataset::with_class_names(name, features, labels, names)
}

/// Which half of the official distribution to read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MnistPart {
    Train,
    Test,
}

/// Loads `{train,t10k}-{images-idx3,labels-idx1}-ubyte` from `dir`.
pub fn load_mnist(dir: &Path, part: MnistPart) -> Result<LabeledDataset> {
    let prefix = match part {
        MnistPart::Train => "train",
        MnistPart::Test => "t10k",
    };
    let data = load_idx(
        &dir.join(format!("{prefix}-images-idx3-ubyte")),
        &dir.join(format!("{prefix}-labels-idx1-ubyte")),
    )?;
    Ok(data.renamed(format!("mnist-{prefix}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image_bytes(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        for v in [IMAGES_MAGIC, count, rows, cols] {
            b.extend_from_slice(&v.to_be_bytes());
        }
        b.extend_from_slice(pixels);
        b
    }

    fn label_bytes(labels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        b.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        b.extend_from_slice(labels);
        b
    }

    #[test]
    fn two_image_fixture() {
        let x = parse_idx_images(&image_bytes(2, 1, 2, &[255, 51, 0, 102]), "img").unwrap();
        assert_eq!(x.shape(), (2, 2));
        assert_eq!(x.column(0), &[1.0, 0.2]);
        assert_eq!(x.column(1), &[0.0, 0.4]);
    }

    #[test]
    fn bad_magic_and_truncation_name_offsets() {
        let mut b = image_bytes(1, 2, 2, &[1, 2, 3, 4]);
        b[3] = 0x01;
        let e = parse_idx_images(&b, "img").unwrap_err();
        assert!(matches!(e, PccError::Format { ref location, .. } if location == "byte offset 0"));

        let b = image_bytes(2, 2, 2, &[1, 2, 3, 4, 5]);
        let e = parse_idx_images(&b, "img").unwrap_err();
        assert!(matches!(e, PccError::Format { ref location, .. } if location == "byte offset 21"));

        let e = parse_idx_labels(&[0, 0, 8], "lbl").unwrap_err();
        assert!(matches!(e, PccError::Format { .. }));
    }

    #[test]
    fn files_and_count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let ip = dir.path().join("i");
        let lp = dir.path().join("l");
        fs::write(&ip, image_bytes(2, 1, 1, &[0, 255])).unwrap();
        fs::write(&lp, label_bytes(&[3, 0])).unwrap();
        let d = load_idx(&ip, &lp).unwrap();
        assert_eq!(d.labels(), &[3, 0]);
        assert_eq!(d.n_classes(), 10);
        assert_eq!(d.class_names()[3], "3");

        fs::write(&lp, label_bytes(&[3])).unwrap();
        assert!(matches!(load_idx(&ip, &lp), Err(PccError::Format { .. })));
    }
}
