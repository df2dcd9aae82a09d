//! Write an ensemble to the binary container, read it back and show how
//! malformed files are rejected.

use xextremes::{load_tensor, save_tensor, EnsembleTensor, Shape};

fn main() -> xextremes::Result<()> {
    let shape = Shape::new(2, 3, 4, 5);
    let t = EnsembleTensor::from_fn(shape, |s, t, r, c| (s * 100 + t * 10 + r + c) as f32)?;

    let dir = std::env::temp_dir().join("xextremes-container-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("ensemble.xt");
    save_tensor(&t, &path)?;
    let bytes = std::fs::read(&path)?;
    println!("wrote {} bytes ({} header + {} x f32)", bytes.len(), 26, shape.len());

    let back = load_tensor(&path)?;
    assert_eq!(back, t);
    println!("round trip ok, shape {:?}", back.shape());
    println!("pixel (1, 2) pooled series starts {:?}", &back.pixel_series(7)[..3]);

    for (what, broken) in [
        ("truncated", bytes[..bytes.len() - 1].to_vec()),
        ("bad magic", [b"XTNSR02\n".as_slice(), &bytes[8..]].concat()),
    ] {
        match EnsembleTensor::from_bytes(&broken) {
            Ok(_) => println!("{what}: unexpectedly accepted"),
            Err(e) => println!("{what}: {e}"),
        }
    }
    Ok(())
}
