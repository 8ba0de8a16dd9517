use std::ops::Range;

/// Splits `0..scenarios` into `blocks` contiguous ranges whose sizes differ
/// by at most one, earlier blocks taking the extra scenario.
///
/// `blocks` is clamped to `1..=scenarios`; no scenarios yields no blocks.
pub fn partition_scenarios(scenarios: usize, blocks: usize) -> Vec<Range<usize>> {
    if scenarios == 0 {
        return Vec::new();
    }
    let blocks = blocks.clamp(1, scenarios);
    let (base, extra) = (scenarios / blocks, scenarios % blocks);
    let mut start = 0;
    (0..blocks)
        .map(|b| {
            let len = base + usize::from(b < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}
