//! Prints how much of the index SPA-DF touches at n = 100k venues.

use agsgr_bench::{pruning_stats, random_pois};
use agsgr_core::spatial::SpatialIndex;

fn main() {
    let n = 100_000;
    let index = SpatialIndex::build(random_pois(n, 20_000.0, 1));
    println!("venues: {n}, depth: {}, fanout: {}", index.depth(), index.fanout());
    println!("{:>6} {:>4} {:>14} {:>12} {:>10} {:>9}", "group", "K", "entries seen", "nodes seen", "pruned", "scanned");
    for group_size in [2, 5, 10] {
        for k in [5, 20] {
            let s = pruning_stats(&index, 200, group_size, k, 7);
            println!(
                "{:>6} {:>4} {:>14.1} {:>12.1} {:>10.1} {:>8.3}%",
                group_size,
                k,
                s.mean_visited_entries,
                s.mean_visited_nodes,
                s.mean_pruned_subtrees,
                100.0 * s.scanned_fraction()
            );
        }
    }
}
