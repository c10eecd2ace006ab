//! Regenerates the grayscale phantom used by the edge-band acceptance check:
//! a bright ellipse with mild sensor noise on a shaded background, plus masks
//! marking the boundary band and the flat regions.
//!
//! cargo run -p ife-core --example make_phantom -- crates/core/tests/fixtures

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIZE: usize = 96;
const CENTER: (f64, f64) = (47.5, 49.0);
const RADII: (f64, f64) = (21.0, 30.0);

fn inside(y: isize, x: isize) -> bool {
    let dy = (y as f64 - CENTER.0) / RADII.0;
    let dx = (x as f64 - CENTER.1) / RADII.1;
    dy * dy + dx * dx <= 1.0
}

/// True if every pixel within `r` (Chebyshev) lies on the same side.
fn uniform_within(y: usize, x: usize, r: isize) -> bool {
    let side = inside(y as isize, x as isize);
    (-r..=r).all(|dy| (-r..=r).all(|dx| inside(y as isize + dy, x as isize + dx) == side))
}

fn save(path: &Path, data: &[u8]) {
    let file = BufWriter::new(File::create(path).expect("create"));
    let mut enc = png::Encoder::new(file, SIZE as u32, SIZE as u32);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    enc.write_header().unwrap().write_image_data(data).unwrap();
}

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "crates/core/tests/fixtures".into());
    let dir = Path::new(&dir);
    let mut rng = ChaCha8Rng::seed_from_u64(2023);

    let mut image = vec![0u8; SIZE * SIZE];
    let mut edge = vec![0u8; SIZE * SIZE];
    let mut flat = vec![0u8; SIZE * SIZE];
    for y in 0..SIZE {
        for x in 0..SIZE {
            let shade = 0.25 * x as f64 + 0.1 * y as f64;
            let base = if inside(y as isize, x as isize) { 160.0 } else { 45.0 };
            let noise: f64 = rng.gen_range(-2.0..2.0);
            let v = (base + shade + noise).round().clamp(0.0, 255.0);
            image[y * SIZE + x] = v as u8;

            let k = y * SIZE + x;
            if !uniform_within(y, x, 1) {
                edge[k] = 255;
            }
            let off_border = (3..SIZE - 3).contains(&y) && (3..SIZE - 3).contains(&x);
            if off_border && uniform_within(y, x, 3) {
                flat[k] = 255;
            }
        }
    }
    save(&dir.join("phantom.png"), &image);
    save(&dir.join("phantom_edge_band.png"), &edge);
    save(&dir.join("phantom_flat.png"), &flat);
}
