//! Two robots meet head-on in a one-wide corridor with a single side
//! pocket. Prints the corridor every tick until both have passed.

use rne_rescue::geometry::Cell;
use rne_rescue::sim::{movement_tick, DistanceField, Grid, Mover, Occupancy};

fn main() {
    let mut grid = Grid::new(9, 3);
    for x in 0..9 {
        grid.add_debris(Cell::new(x, 2));
        if x != 4 {
            grid.add_debris(Cell::new(x, 0));
        }
    }
    let goals = [Cell::new(8, 1), Cell::new(0, 1)];
    let fields: Vec<DistanceField> = goals.iter().map(|&g| grid.distance_field(&[g], 0)).collect();
    let names = ["a", "b"];
    let mut pos = [Cell::new(0, 1), Cell::new(8, 1)];
    let mut occ = Occupancy::new();
    for (i, &p) in pos.iter().enumerate() {
        occ.place(i, p);
    }

    for tick in 0..60 {
        draw(&grid, &pos, tick);
        let movers: Vec<Mover<'_>> = (0..2)
            .filter(|&i| pos[i] != goals[i])
            .map(|i| Mover {
                robot: i,
                id: names[i],
                position: pos[i],
                priority: (2 - i) as f64,
                field: &fields[i],
            })
            .collect();
        if movers.is_empty() {
            println!("both robots arrived after {tick} ticks");
            return;
        }
        let out = movement_tick(&grid, &mut occ, &movers);
        for m in &out.moves {
            pos[m.robot] = m.to;
        }
        if out.deadlocks > 0 {
            println!("      deadlock resolved by switching the execution order");
        }
    }
    println!("robots did not arrive");
}

fn draw(grid: &Grid, pos: &[Cell; 2], tick: usize) {
    let row = |y: i32| -> String {
        (0..9)
            .map(|x| {
                let c = Cell::new(x, y);
                match pos.iter().position(|&p| p == c) {
                    Some(0) => 'a',
                    Some(_) => 'b',
                    None if grid.is_debris(c) => '#',
                    None => '.',
                }
            })
            .collect()
    };
    println!("{tick:>4}  {}", row(0));
    println!("      {}", row(1));
}
