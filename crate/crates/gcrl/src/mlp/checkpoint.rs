//! Parameter checkpoint file.
//!
//! Layout: one ASCII descriptor line `"<arch> <input_width> <output_width>\n"`
//! followed by the flat parameter vector as little-endian 32-bit floats, in
//! [`Network::params_flat`](super::Network::params_flat) order. The float
//! count must equal `arch.param_count(input_width, output_width)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::Arch;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub arch: Arch,
    pub input_width: usize,
    pub output_width: usize,
    pub params: Vec<f32>,
}

pub fn save_checkpoint(
    path: &Path,
    arch: Arch,
    input_width: usize,
    output_width: usize,
    params: &[f32],
) -> Result<()> {
    assert_eq!(
        params.len(),
        arch.param_count(input_width, output_width),
        "parameter count does not match architecture"
    );
    let io_err = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    writeln!(w, "{} {} {}", arch.name(), input_width, output_width).map_err(io_err)?;
    for &p in params {
        w.write_all(&p.to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let io_err = |e| Error::io(path, e);
    let mut r = BufReader::new(File::open(path).map_err(io_err)?);

    let mut header = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        r.read_exact(&mut byte).map_err(io_err)?;
        if byte[0] == b'\n' {
            break;
        }
        header.push(byte[0]);
        if header.len() > 256 {
            return Err(Error::Format {
                what: "checkpoint",
                detail: "descriptor line too long".into(),
            });
        }
    }
    let header = String::from_utf8(header).map_err(|e| Error::Format {
        what: "checkpoint",
        detail: format!("descriptor is not UTF-8: {e}"),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::Format {
            what: "checkpoint",
            detail: format!("expected 'arch input_width output_width', got '{header}'"),
        });
    }
    let arch = Arch::from_name(fields[0])?;
    let parse = |s: &str| {
        s.parse::<usize>().map_err(|e| Error::Format {
            what: "checkpoint",
            detail: format!("bad width '{s}': {e}"),
        })
    };
    let input_width = parse(fields[1])?;
    let output_width = parse(fields[2])?;

    let expected = arch.param_count(input_width, output_width);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err)?;
    if bytes.len() != expected * 4 {
        return Err(Error::Format {
            what: "checkpoint",
            detail: format!(
                "expected {} parameter bytes for {} {}x{}, found {}",
                expected * 4,
                arch.name(),
                input_width,
                output_width,
                bytes.len()
            ),
        });
    }
    let params = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok(Checkpoint {
        arch,
        input_width,
        output_width,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::QNetwork;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_preserves_bits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.ckpt");
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let q: QNetwork<f32> = QNetwork::new(Arch::Simple3x256, 5, 3, &mut rng);
        let params = q.params_flat();
        save_checkpoint(&path, q.arch, 5, 3, &params).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.arch, Arch::Simple3x256);
        assert_eq!((loaded.input_width, loaded.output_width), (5, 3));
        assert_eq!(loaded.params, params);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        std::fs::write(&path, b"simple3x256 5 3\n\x00\x00\x80\x3f").unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }
}
