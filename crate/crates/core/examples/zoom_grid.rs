//! Builds the default 36 x 9 zoom grid and applies a few transforms to a
//! synthetic image, writing the crops as PPM files.
//!
//!     cargo run --example zoom_grid -- [out_dir]

use std::path::PathBuf;

use zoomlens::geometry::{apply_zoom, center_zoom};
use zoomlens::image::write_ppm;
use zoomlens::pipeline::demo_image;
use zoomlens::{TransformGrid, ZoomGroup};

fn main() -> zoomlens::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "zoom_grid_out".into()));
    std::fs::create_dir_all(&out)?;

    let grid = TransformGrid::default();
    println!("{} transforms, grid sha256 {}", grid.len(), grid.sha256());
    for g in ZoomGroup::ALL {
        println!("  {g}: {} transforms", grid.ids_in_group(g).len());
    }

    let img = demo_image(0, 640, 480);
    for id in [0u32, 4, 8, 13 * 9 + 4, 35 * 9 + 4] {
        let t = grid.get(id)?;
        let (top, left) = t.window_origin(img.width(), img.height());
        println!("t{id:03}: scale {} anchor ({},{}) window origin ({top},{left})", t.scale, t.anchor_row, t.anchor_col);
        write_ppm(&apply_zoom(&img, &t)?, &out.join(format!("t{id:03}.ppm")))?;
    }
    write_ppm(&center_zoom(&img, 256, 224)?, &out.join("center256.ppm"))?;
    println!("crops written to {}", out.display());
    Ok(())
}
