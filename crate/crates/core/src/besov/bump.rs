//! Smooth dyadic bump `φ(λ) = χ(λ/2) − χ(λ)` supported in `[3/4, 8/3]`.

pub const BUMP_LO: f64 = 0.75;
pub const BUMP_HI: f64 = 8.0 / 3.0;
const CHI_EDGE: f64 = 4.0 / 3.0;

fn psi(x: f64) -> f64 {
    if x > 0.0 {
        libm::exp(-1.0 / x)
    } else {
        0.0
    }
}

fn step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let (a, b) = (psi(x), psi(1.0 - x));
    a / (a + b)
}

/// `1` on `[0, 3/4]`, `0` on `[4/3, ∞)`.
pub fn chi(lambda: f64) -> f64 {
    if lambda <= BUMP_LO {
        1.0
    } else if lambda >= CHI_EDGE {
        0.0
    } else {
        step((CHI_EDGE - lambda) / (CHI_EDGE - BUMP_LO))
    }
}

pub fn phi_bump(lambda: f64) -> f64 {
    if !(lambda > BUMP_LO && lambda < BUMP_HI) {
        return 0.0;
    }
    // one of the two χ terms is constant on each side; using step(x) + step(1−x) = 1
    // keeps the rising edge free of cancellation
    let w = CHI_EDGE - BUMP_LO;
    if lambda <= 2.0 * BUMP_LO {
        step((lambda - BUMP_LO) / w)
    } else if lambda >= CHI_EDGE {
        step((CHI_EDGE - lambda / 2.0) / w)
    } else {
        chi(lambda / 2.0) - chi(lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity() {
        let mut worst: f64 = 0.0;
        for i in 0..1000 {
            let lambda = libm::exp2(-40.0 + 80.0 * i as f64 / 999.0);
            let j0 = libm::floor(libm::log2(lambda)) as i32;
            let (mut s, mut s2) = (0.0, 0.0);
            for j in j0 - 3..=j0 + 3 {
                let v = phi_bump(lambda / libm::exp2(j as f64));
                s += v;
                s2 += v * v;
            }
            worst = worst.max((s - 1.0).abs());
            assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&s2), "{lambda}: {s2}");
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn rising_edge_matches_difference() {
        for i in 1..200 {
            let l = BUMP_LO + (CHI_EDGE - BUMP_LO) * i as f64 / 200.0;
            assert!((phi_bump(l) - (chi(l / 2.0) - chi(l))).abs() < 1e-15);
        }
        // far below f64 epsilon the difference form would round to 0
        assert!(phi_bump(0.76) > 0.0 && phi_bump(0.76) < 1e-20);
    }

    #[test]
    fn support_and_range() {
        assert_eq!(phi_bump(0.75), 0.0);
        assert_eq!(phi_bump(8.0 / 3.0), 0.0);
        assert_eq!(phi_bump(1.4), 1.0);
        for i in 0..200 {
            let v = phi_bump(0.7 + 2.0 * i as f64 / 199.0);
            assert!((0.0..=1.0).contains(&v));
        }
    }
}
