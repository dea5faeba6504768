//! Fixtures shared by the criterion benchmarks.

use ranplan::geometry::Point3;
use ranplan::scene::{box_room, generate_grid, GridSpec, Material, Scene};

/// 12 x 6 x 3 m wooden room.
pub fn room() -> Scene {
    box_room([12.0, 6.0, 3.0], Material::wood())
}

/// `rows x cols` ceiling grid at 2.2 m inside [`room`].
pub fn ru_grid(rows: usize, cols: usize) -> Vec<Point3> {
    generate_grid(&GridSpec {
        origin: [0.5, 0.5, 0.0],
        rows,
        cols,
        row_step: 5.0 / rows as f64,
        col_step: 11.0 / cols as f64,
        height: 2.2,
    })
}

/// `rows x cols` floor grid at 0.8 m inside [`room`].
pub fn ue_grid(rows: usize, cols: usize) -> Vec<Point3> {
    generate_grid(&GridSpec {
        origin: [0.4, 0.6, 0.0],
        rows,
        cols,
        row_step: 4.8 / rows as f64,
        col_step: 11.2 / cols as f64,
        height: 0.8,
    })
}
