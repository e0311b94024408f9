#![no_main]

use libfuzzer_sys::fuzz_target;
use wheel_lab_core::lattice::Lattice;
use wheel_lab_core::metric::parse_geodesic_json;

// First byte picks the grid size, the rest is the path JSON.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let lat = Lattice::new(1 + n as usize % 16);
    if let Ok(path) = parse_geodesic_json(text, &lat) {
        assert!(path.iter().all(|&v| v < lat.num_vertices()));
        assert!(path.windows(2).all(|w| lat.edge_between(w[0], w[1]).is_some()));
    }
});
