use super::{Instance, InstanceDoc};

/// The two-resident, two-hospital instance with a single region of cap 1
/// that admits no strongly stable matching.
pub fn example_g2() -> Instance {
    example_g2_with_cap(1)
}

/// `example_g2` with the cap of region `{h1, h2}` replaced.
pub fn example_g2_with_cap(cap: u32) -> Instance {
    InstanceDoc::default()
        .resident("r1", &["h1", "h2"])
        .resident("r2", &["h2", "h1"])
        .hospital("h1", 1, &["r2", "r1"])
        .hospital("h2", 1, &["r1", "r2"])
        .region(&["h1", "h2"], cap)
        .build()
        .expect("fixture is valid")
}
