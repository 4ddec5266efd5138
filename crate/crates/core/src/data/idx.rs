//! Big-endian IDX files as distributed with MNIST.

use std::fs;
use std::path::Path;

use super::GrayImage;
use crate::{Error, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            offset: offset as u64,
            reason: "truncated header".into(),
        })
}

fn check_magic(bytes: &[u8], want: u32, path: &Path) -> Result<()> {
    let magic = read_u32(bytes, 0, path)?;
    if magic != want {
        return Err(Error::Format {
            path: path.to_path_buf(),
            offset: 0,
            reason: format!("magic {magic:#010x}, expected {want:#010x}"),
        });
    }
    Ok(())
}

fn check_len(bytes: &[u8], header: usize, body: usize, path: &Path) -> Result<()> {
    if bytes.len() < header + body {
        return Err(Error::Format {
            path: path.to_path_buf(),
            offset: bytes.len() as u64,
            reason: format!("truncated: expected {} bytes of data", header + body),
        });
    }
    Ok(())
}

pub fn parse_images(bytes: &[u8], path: &Path) -> Result<Vec<GrayImage>> {
    check_magic(bytes, IMAGES_MAGIC, path)?;
    let count = read_u32(bytes, 4, path)? as usize;
    let rows = read_u32(bytes, 8, path)? as usize;
    let cols = read_u32(bytes, 12, path)? as usize;
    let size = rows * cols;
    check_len(bytes, 16, count * size, path)?;
    Ok(bytes[16..16 + count * size]
        .chunks_exact(size)
        .map(|px| GrayImage {
            width: cols,
            height: rows,
            pixels: px.to_vec(),
        })
        .collect())
}

pub fn parse_labels(bytes: &[u8], path: &Path) -> Result<Vec<u8>> {
    check_magic(bytes, LABELS_MAGIC, path)?;
    let count = read_u32(bytes, 4, path)? as usize;
    check_len(bytes, 8, count, path)?;
    let labels = bytes[8..8 + count].to_vec();
    if let Some(pos) = labels.iter().position(|&d| d > 9) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            offset: (8 + pos) as u64,
            reason: format!("label {} is not a digit", labels[pos]),
        });
    }
    Ok(labels)
}

/// Reads an image file and its label file into `(image, digit)` pairs.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Vec<(GrayImage, u8)>> {
    let (ip, lp) = (images_path.as_ref(), labels_path.as_ref());
    let ib = fs::read(ip).map_err(|e| Error::io(ip, e))?;
    let lb = fs::read(lp).map_err(|e| Error::io(lp, e))?;
    let images = parse_images(&ib, ip)?;
    let labels = parse_labels(&lb, lp)?;
    if images.len() != labels.len() {
        return Err(Error::Format {
            path: lp.to_path_buf(),
            offset: 4,
            reason: format!("{} labels for {} images", labels.len(), images.len()),
        });
    }
    Ok(images.into_iter().zip(labels).collect())
}

/// Encodes images as an IDX image file.
pub fn encode_images(images: &[GrayImage]) -> Vec<u8> {
    let (h, w) = images.first().map_or((0, 0), |i| (i.height, i.width));
    let mut out = Vec::with_capacity(16 + images.len() * h * w);
    for v in [IMAGES_MAGIC, images.len() as u32, h as u32, w as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for img in images {
        out.extend_from_slice(&img.pixels);
    }
    out
}

pub fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
