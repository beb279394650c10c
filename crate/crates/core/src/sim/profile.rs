use serde::{Deserialize, Serialize};

/// Hardware description of a simulated device.
///
/// `cpu_score` and `gpu_score` are raw capability figures used for relative
/// classification; `cpu_scalar` and `gpu_scalar` are the classified values
/// and `gpu_scalar` also scales processing speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub id: String,
    pub cpu_scalar: u32,
    pub gpu_scalar: u32,
    /// Work units (pixel * frames) processed per millisecond without GPU help.
    pub throughput: f64,
    /// Relative amplitude of delay noise.
    pub noise: f64,
    pub seed: u64,
    pub cpu_score: f64,
    pub gpu_score: f64,
}

impl DeviceProfile {
    pub fn new(
        id: &str,
        cpu_scalar: u32,
        gpu_scalar: u32,
        throughput: f64,
        cpu_score: f64,
        gpu_score: f64,
    ) -> Self {
        DeviceProfile {
            id: id.into(),
            cpu_scalar,
            gpu_scalar,
            throughput,
            noise: 0.1,
            seed: 0,
            cpu_score,
            gpu_score,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dc(&self) -> u32 {
        self.cpu_scalar + self.gpu_scalar
    }

    /// Effective work units per millisecond.
    pub fn speed(&self) -> f64 {
        self.throughput * (1.0 + self.gpu_scalar as f64)
    }

    pub fn laptop() -> Self {
        DeviceProfile::new("Laptop", 4, 0, 288.0, 100.0, 0.0)
    }

    pub fn orin() -> Self {
        DeviceProfile::new("Orin", 3, 2, 80.0, 60.0, 40.0)
    }

    pub fn nano() -> Self {
        DeviceProfile::new("Nano", 1, 0, 20.0, 10.0, 0.0)
    }

    pub fn xavier_cpu() -> Self {
        DeviceProfile::new("Xavier_CPU", 2, 0, 80.0, 30.0, 0.0)
    }

    pub fn xavier_gpu() -> Self {
        DeviceProfile::new("Xavier_GPU", 2, 1, 80.0, 30.0, 21.0)
    }

    /// The five-device heterogeneous fleet, each device with its own seed
    /// derived from `seed`.
    pub fn fleet(seed: u64) -> Vec<DeviceProfile> {
        [
            Self::laptop(),
            Self::orin(),
            Self::nano(),
            Self::xavier_cpu(),
            Self::xavier_gpu(),
        ]
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.with_seed(seed.wrapping_mul(1_000_003).wrapping_add(i as u64 + 1)))
        .collect()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "laptop" => Some(Self::laptop()),
            "orin" => Some(Self::orin()),
            "nano" => Some(Self::nano()),
            "xavier_cpu" => Some(Self::xavier_cpu()),
            "xavier_gpu" => Some(Self::xavier_gpu()),
            _ => None,
        }
    }
}
