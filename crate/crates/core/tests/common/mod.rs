use decay_core::profiles::{Component, PowerSegment, RadialProfile};
use proptest::prelude::*;

/// Power law `r0` at the origin, then a few free segments above `2^-30`.
pub fn piecewise() -> impl Strategy<Value = (RadialProfile, f64)> {
    (1u32..=3, prop::collection::vec((0.5f64..8.0, -3.0f64..3.0, -10.0f64..10.0), 0..4), 0.0f64..2.5, -10.0f64..10.0)
        .prop_map(|(n, rest, r_shift, h0)| {
            let r0 = -(n as f64) / 2.0 + 0.1 + r_shift;
            let mut u = -30.0;
            let mut segs = vec![PowerSegment::new(f64::NEG_INFINITY, u, h0, r0, 0)];
            for (w, r, h) in rest {
                segs.push(PowerSegment::new(u, u + w, h, r, 0));
                u += w;
            }
            let p = RadialProfile::new(n, vec![Component::from_segments(segs)], "random").unwrap();
            (p, r0)
        })
}
