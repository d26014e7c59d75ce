//! Regenerates the sample inputs under `data/`.
//!
//! ```sh
//! cargo run -p nestchain --example sample_data
//! ```

use nestchain::io::{save_graph, save_plan};
use nestchain::{DualGraph, Election, Plan};

/// 6x6 rook grid, one voter per cell, with a column-gradient two-party
/// election: party A's support grows to the east, party B's to the west.
fn grid6x6() -> DualGraph {
    let mut grid = DualGraph::rook_grid(6, 6);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for v in grid.vertices() {
        let col: u64 = grid
            .vertex_name(v)
            .split('-')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        a.push(1 + col);
        b.push(1 + (5 - col));
    }
    grid.add_election(Election::new("GRAD", a, b)).unwrap();
    grid
}

/// Twelve 3-cell house districts: every 2x3 block of the grid split into two
/// L-pieces, orientation alternating per block.
fn tromino_house_plan() -> Plan {
    let mut assignment = vec![0u32; 36];
    for block_r in 0..3 {
        for block_c in 0..2 {
            let block = (block_r * 2 + block_c) as u32;
            let flip = (block_r + block_c) % 2 == 1;
            for dr in 0..2 {
                for dc in 0..3 {
                    let r = block_r * 2 + dr;
                    let c = block_c * 3 + dc;
                    let first = if flip {
                        (dr == 0 && dc <= 1) || (dr == 1 && dc == 0)
                    } else {
                        (dr == 1 && dc <= 1) || (dr == 0 && dc == 0)
                    };
                    assignment[r * 6 + c] = 2 * block + u32::from(!first);
                }
            }
        }
    }
    Plan::from_assignment(assignment, 12).unwrap()
}

fn main() {
    let grid = grid6x6();
    save_graph(&grid, "data/grid6x6.json").unwrap();

    // three horizontal bands of 12 cells: a balanced 3-district seed
    let mut bands = vec![0u32; 36];
    for r in 0..6 {
        for c in 0..6 {
            bands[r * 6 + c] = (r / 2) as u32;
        }
    }
    let bands = Plan::from_assignment(bands, 3).unwrap();
    save_plan(&bands, &grid, "data/grid6x6_bands.csv").unwrap();

    save_plan(&tromino_house_plan(), &grid, "data/grid6x6_house.csv").unwrap();

    let grid3 = DualGraph::rook_grid(3, 3);
    save_graph(&grid3, "data/grid3x3.json").unwrap();
    let rows = Plan::from_assignment(vec![0, 0, 0, 1, 1, 1, 2, 2, 2], 3).unwrap();
    save_plan(&rows, &grid3, "data/grid3x3_rows.csv").unwrap();

    println!("sample data written under data/");
}
