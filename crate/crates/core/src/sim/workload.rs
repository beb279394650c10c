use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::ConfigPoint;
use crate::error::{invalid, Result};
use crate::sim::DeviceProfile;

/// Bytes on the wire per transferred pixel, in MB.
pub const BYTES_PER_PIXEL: f64 = 1.2e-4;

/// Environment outside the device's control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub streams: u32,
    /// Added latency per frame, in ms.
    pub congestion: f64,
    /// Detection-quality penalty, in px of blur.
    pub blur: f64,
}

impl Default for EnvState {
    fn default() -> Self {
        EnvState {
            streams: 1,
            congestion: 0.0,
            blur: 0.0,
        }
    }
}

/// One processed sample interval in raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub pixel: f64,
    pub fps: f64,
    pub bitrate: f64,
    pub cpu: f64,
    pub memory: f64,
    pub streams: f64,
    pub consumption: f64,
    pub network: f64,
    pub delay: f64,
    pub success: bool,
    pub distance: f64,
}

impl MetricsRow {
    pub const COLUMNS: [&'static str; 11] = [
        "pixel",
        "fps",
        "bitrate",
        "cpu",
        "memory",
        "streams",
        "consumption",
        "network",
        "delay",
        "success",
        "distance",
    ];

    /// Numeric value of a column; `success` maps to 0 or 1.
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "pixel" => self.pixel,
            "fps" => self.fps,
            "bitrate" => self.bitrate,
            "cpu" => self.cpu,
            "memory" => self.memory,
            "streams" => self.streams,
            "consumption" => self.consumption,
            "network" => self.network,
            "delay" => self.delay,
            "success" => f64::from(u8::from(self.success)),
            "distance" => self.distance,
            _ => return None,
        })
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Probability that a frame is processed successfully.
pub fn success_probability(pixel: f64, blur: f64, cpu: f64) -> f64 {
    sigmoid((pixel - 140.0 - 25.0 * blur) / 10.0)
        * (1.0 - 0.06 * blur).max(0.0)
        * (1.0 - 0.05 * cpu)
}

/// Draws `n` rows for `profile` running `config` under `env`.
///
/// The generator is seeded by the profile seed with `round` as stream, so a
/// call is a pure function of its arguments.
pub fn generate_batch(
    profile: &DeviceProfile,
    config: &ConfigPoint,
    env: &EnvState,
    n: usize,
    round: u32,
) -> Result<Vec<MetricsRow>> {
    let pixel = config
        .get("pixel")
        .ok_or_else(|| invalid("configuration lacks `pixel`"))?;
    let fps = config
        .get("fps")
        .ok_or_else(|| invalid("configuration lacks `fps`"))?;
    if fps < 1.0 || pixel <= 0.0 {
        return Err(invalid("pixel must be positive and fps at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    rng.set_stream(u64::from(round));

    let streams = f64::from(env.streams);
    let bitrate = pixel * fps;
    let work = bitrate * streams;
    let speed = profile.speed();
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let u = |rng: &mut ChaCha8Rng| rng.gen_range(-1.0..=1.0);
        let delay = work / speed * (1.0 + profile.noise * u(&mut rng))
            + env.congestion
            + 2.0 * rng.gen::<f64>();
        let network = bitrate * streams * BYTES_PER_PIXEL * (1.0 + 0.05 * u(&mut rng));
        let cpu = (work / (speed * 50.0) + 0.1 + 0.05 * u(&mut rng)).clamp(0.0, 1.0);
        let memory = (0.15 + 0.5 * pixel / 480.0 + 0.05 * u(&mut rng)).clamp(0.0, 1.0);
        let consumption = 5.0 + 20.0 * cpu + u(&mut rng);
        let success = rng.gen::<f64>() < success_probability(pixel, env.blur, cpu);
        let distance = 300.0 / fps * (0.5 + rng.gen::<f64>());
        rows.push(MetricsRow {
            pixel,
            fps,
            bitrate,
            cpu,
            memory,
            streams,
            consumption,
            network,
            delay,
            success,
            distance,
        });
    }
    Ok(rows)
}

pub fn write_metrics_csv<W: Write>(writer: W, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        w.write_record(MetricsRow::COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics_csv<R: Read>(reader: R) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().ne(MetricsRow::COLUMNS.iter().copied()) {
        return Err(invalid(
            "metrics CSV header does not match the expected columns",
        ));
    }
    r.deserialize().map(|row| Ok(row?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pixel: f64, fps: f64) -> ConfigPoint {
        ConfigPoint::new([("pixel", pixel), ("fps", fps)])
    }

    #[test]
    fn bitrate_is_pixel_times_fps() {
        let rows = generate_batch(
            &DeviceProfile::laptop(),
            &cfg(300.0, 14.0),
            &EnvState::default(),
            3,
            1,
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.bitrate == 4200.0));
    }

    #[test]
    fn zero_streams_means_no_work() {
        let env = EnvState {
            streams: 0,
            congestion: 7.0,
            blur: 0.0,
        };
        let rows = generate_batch(&DeviceProfile::nano(), &cfg(480.0, 30.0), &env, 20, 3).unwrap();
        for r in rows {
            assert_eq!(r.network, 0.0);
            assert!(r.delay >= 7.0 && r.delay <= 9.0);
        }
    }

    #[test]
    fn identical_calls_identical_batches() {
        let p = DeviceProfile::orin().with_seed(11);
        let a = generate_batch(&p, &cfg(240.0, 10.0), &EnvState::default(), 50, 4).unwrap();
        let b = generate_batch(&p, &cfg(240.0, 10.0), &EnvState::default(), 50, 4).unwrap();
        assert_eq!(a, b);
        let c = generate_batch(&p, &cfg(240.0, 10.0), &EnvState::default(), 50, 5).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn csv_round_trip() {
        let rows = generate_batch(
            &DeviceProfile::laptop(),
            &cfg(300.0, 14.0),
            &EnvState::default(),
            5,
            1,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "pixel,fps,bitrate,cpu,memory,streams,consumption,network,delay,success,distance"
        ));
        assert_eq!(read_metrics_csv(buf.as_slice()).unwrap(), rows);
    }
}
