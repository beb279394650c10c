use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sim::DeviceProfile;

/// Relative capability of a device within its fleet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scalars {
    pub p: u32,
    pub g: u32,
    pub dc: u32,
}

/// Spreads the distinct values of `scores` evenly over `lo..=hi` by rank and
/// rounds to the nearest integer. Equal scores share a value.
fn rank_map(scores: &[f64], lo: u32, hi: u32) -> Vec<u32> {
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let m = distinct.len();
    scores
        .iter()
        .map(|s| {
            if m <= 1 {
                return lo;
            }
            let r = distinct.iter().position(|d| d == s).expect("present") as f64;
            lo + (r * f64::from(hi - lo) / (m - 1) as f64).round() as u32
        })
        .collect()
}

/// Classifies every device relative to the others: CPU rank onto `[1, 4]`,
/// GPU rank onto `[0, 2]` with GPU-less devices at 0, and `dc = p + g`.
pub fn classify_devices(profiles: &[DeviceProfile]) -> BTreeMap<String, Scalars> {
    let cpu: Vec<f64> = profiles.iter().map(|p| p.cpu_score).collect();
    let p = rank_map(&cpu, 1, 4);
    // 0 is always a rank so that only GPU-less devices land on it.
    let mut gpu: Vec<f64> = profiles.iter().map(|p| p.gpu_score.max(0.0)).collect();
    gpu.push(0.0);
    let g = rank_map(&gpu, 0, 2);
    profiles
        .iter()
        .enumerate()
        .map(|(i, prof)| {
            (
                prof.id.clone(),
                Scalars {
                    p: p[i],
                    g: g[i],
                    dc: p[i] + g[i],
                },
            )
        })
        .collect()
}

/// Returns a copy of each profile with its classified scalars filled in.
pub fn classified(profiles: &[DeviceProfile]) -> Vec<DeviceProfile> {
    let scalars = classify_devices(profiles);
    profiles
        .iter()
        .map(|p| {
            let s = scalars[&p.id];
            let mut out = p.clone();
            out.cpu_scalar = s.p;
            out.gpu_scalar = s.g;
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_fleet() {
        let c = classify_devices(&DeviceProfile::fleet(0));
        let get = |id: &str| {
            let s = c[id];
            (s.p, s.g, s.dc)
        };
        assert_eq!(get("Laptop"), (4, 0, 4));
        assert_eq!(get("Orin"), (3, 2, 5));
        assert_eq!(get("Nano"), (1, 0, 1));
        assert_eq!(get("Xavier_CPU"), (2, 0, 2));
        assert_eq!(get("Xavier_GPU"), (2, 1, 3));
    }

    #[test]
    fn singleton_is_bottom_of_range() {
        let c = classify_devices(&[DeviceProfile::laptop()]);
        assert_eq!(c["Laptop"], Scalars { p: 1, g: 0, dc: 1 });
    }

    #[test]
    fn identical_devices_share_scalars() {
        let mut b = DeviceProfile::orin();
        b.id = "Orin2".into();
        let c = classify_devices(&[DeviceProfile::orin(), b]);
        assert_eq!(c["Orin"], c["Orin2"]);
    }
}
