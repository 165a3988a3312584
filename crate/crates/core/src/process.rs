//! Simulation of the Poisson process `N*ⁿ` on the hypograph `S` and
//! extraction of per-cell extremes.
//!
//! `N*ⁿ` is the superposition of `n` independent homogeneous Poisson
//! processes of rate `c`, i.e. a Poisson process with mean measure
//! `n c λ`. A realisation draws a Poisson count with mean `n c |S|` and
//! places that many points uniformly on `S` by rejection from the bounding
//! box `[0, 1] × [0, M]`.
//!
//! Randomness comes from ChaCha8 seeded with a 64-bit seed; independent
//! replicates use distinct ChaCha streams of the same seed, so a replicate
//! can be regenerated from `(seed, stream)` alone in any order.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::frontier::FrontierSpec;
use crate::partition::PartitionConfig;

/// Rejection rates beyond this (`M / mean f`) are refused.
pub const MAX_REJECTION_RATIO: f64 = 1e6;

pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one realisation of `N*ⁿ` and feeds every point to `sink`, in
/// generation order. Returns the number of points.
pub fn draw_points<R: Rng + ?Sized>(
    f: &FrontierSpec,
    n: u64,
    c: f64,
    rng: &mut R,
    mut sink: impl FnMut(f64, f64),
) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("intensity c must be > 0, got {c}")));
    }
    let area = f.area()?;
    let ratio = f.upper() / area;
    if !(ratio <= MAX_REJECTION_RATIO) {
        return Err(Error::PathologicalRejection { ratio });
    }
    let mean = n as f64 * c * area;
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidParameter(format!("Poisson mean {mean}: {e}")))?
        .sample(rng) as u64;
    let top = f.upper();
    for _ in 0..count {
        loop {
            let x: f64 = rng.random();
            let y = rng.random::<f64>() * top;
            if y <= f.eval(x) {
                sink(x, y);
                break;
            }
        }
    }
    Ok(count)
}

/// A realised point set together with the parameters that regenerate it.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    pub points: Vec<(f64, f64)>,
    pub n: u64,
    pub c: f64,
    pub seed: u64,
    pub frontier: String,
}

/// Simulates `N*ⁿ` from stream 0 of `seed`. Points are sorted by `x`.
pub fn simulate(f: &FrontierSpec, n: u64, c: f64, seed: u64) -> Result<PointSample> {
    simulate_stream(f, n, c, seed, 0)
}

pub fn simulate_stream(f: &FrontierSpec, n: u64, c: f64, seed: u64, stream: u64) -> Result<PointSample> {
    let mut rng = replicate_rng(seed, stream);
    let mut points = Vec::new();
    draw_points(f, n, c, &mut rng, |x, y| points.push((x, y)))?;
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(PointSample {
        points,
        n,
        c,
        seed,
        frontier: f.label().to_string(),
    })
}

/// Simulates one replicate straight into per-cell extremes, without
/// materialising the point set. Same draws as [`simulate_stream`].
pub fn simulate_extremes(
    f: &FrontierSpec,
    cfg: &PartitionConfig,
    c: f64,
    seed: u64,
    stream: u64,
) -> Result<CellExtremes> {
    let mut rng = replicate_rng(seed, stream);
    let mut cells = CellExtremes::empty(cfg.cells());
    draw_points(f, cfg.n(), c, &mut rng, |x, y| cells.ingest(cfg.cell_index(x), y))?;
    Ok(cells)
}

impl PointSample {
    /// Re-runs the simulation from the recorded frontier label, `n`, `c`
    /// and seed.
    pub fn regenerate(&self) -> Result<PointSample> {
        let f = FrontierSpec::from_label(&self.frontier)?;
        simulate(&f, self.n, self.c, self.seed)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with a leading `# n=… c=… seed=… frontier=…` line, then an
    /// `x,y` header and one row per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# n={} c={} seed={} frontier={}",
            self.n, self.c, self.seed, self.frontier
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y"])?;
        for &(x, y) in &self.points {
            w.write_record([x.to_string(), y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<PointSample> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let meta = first
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing '# n=… c=… seed=… frontier=…' line".into()))?;
        let (mut n, mut c, mut seed, mut frontier) = (None, None, None, None);
        for field in meta.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            let bad = |_| Error::Parse(format!("bad value for {key}: {value:?}"));
            match key {
                "n" => n = Some(value.parse::<u64>().map_err(|e| bad(e.to_string()))?),
                "c" => c = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|e| bad(e.to_string()))?),
                "frontier" => frontier = Some(value.to_string()),
                _ => return Err(Error::Parse(format!("unknown header key {key:?}"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("header is missing {k}"));
        let mut rows = csv::Reader::from_reader(reader);
        let mut points = Vec::new();
        for record in rows.deserialize::<(f64, f64)>() {
            points.push(record?);
        }
        Ok(PointSample {
            points,
            n: n.ok_or_else(|| missing("n"))?,
            c: c.ok_or_else(|| missing("c"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            frontier: frontier.ok_or_else(|| missing("frontier"))?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PointSample> {
        PointSample::read_csv(std::fs::File::open(path)?)
    }
}

/// Count, highest and lowest second coordinate per cell. Empty cells
/// report `x_star = z_star = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellExtremes {
    pub counts: Vec<u32>,
    pub x_star: Vec<f64>,
    pub z_star: Vec<f64>,
}

impl CellExtremes {
    pub fn empty(cells: usize) -> Self {
        CellExtremes {
            counts: vec![0; cells],
            x_star: vec![0.0; cells],
            z_star: vec![0.0; cells],
        }
    }

    pub fn new(counts: Vec<u32>, x_star: Vec<f64>, z_star: Vec<f64>) -> Result<Self> {
        if counts.len() != x_star.len() || counts.len() != z_star.len() {
            return Err(Error::InvalidParameter("cell vectors differ in length".into()));
        }
        for r in 0..counts.len() {
            let ok = if counts[r] == 0 {
                x_star[r] == 0.0 && z_star[r] == 0.0
            } else {
                0.0 <= z_star[r] && z_star[r] <= x_star[r]
            };
            if !ok {
                return Err(Error::InvalidParameter(format!("inconsistent extremes in cell {r}")));
            }
        }
        Ok(CellExtremes { counts, x_star, z_star })
    }

    /// Extremes given directly; a cell counts as occupied when its maximum
    /// is positive.
    pub fn from_extremes(x_star: Vec<f64>, z_star: Vec<f64>) -> Result<Self> {
        let counts = x_star.iter().map(|&x| u32::from(x > 0.0)).collect();
        Self::new(counts, x_star, z_star)
    }

    pub fn from_points(points: &[(f64, f64)], cfg: &PartitionConfig) -> Self {
        let mut cells = Self::empty(cfg.cells());
        for &(x, y) in points {
            cells.ingest(cfg.cell_index(x), y);
        }
        cells
    }

    pub fn ingest(&mut self, r: usize, y: f64) {
        if self.counts[r] == 0 {
            self.x_star[r] = y;
            self.z_star[r] = y;
        } else {
            self.x_star[r] = self.x_star[r].max(y);
            self.z_star[r] = self.z_star[r].min(y);
        }
        self.counts[r] += 1;
    }

    pub fn cells(&self) -> usize {
        self.counts.len()
    }
}

/// Deterministic per-cell quantities of the frontier: `λ_{n,r}` (area of
/// the cell), `m_{n,r}` and `M_{n,r}` (bounds of `f` on the cell).
#[derive(Debug, Clone, PartialEq)]
pub struct CellOracle {
    pub lambda: Vec<f64>,
    pub m_cell: Vec<f64>,
    pub big_m_cell: Vec<f64>,
}

impl CellOracle {
    pub fn new(f: &FrontierSpec, cfg: &PartitionConfig) -> Result<Self> {
        let k = cfg.cells();
        let mut oracle = CellOracle {
            lambda: Vec::with_capacity(k),
            m_cell: Vec::with_capacity(k),
            big_m_cell: Vec::with_capacity(k),
        };
        for r in 0..k {
            let (a, b) = cfg.cell_interval(r);
            let (lo, hi) = f.bounds_on(a, b);
            oracle.lambda.push(f.integral(a, b)?);
            oracle.m_cell.push(lo);
            oracle.big_m_cell.push(hi);
        }
        Ok(oracle)
    }
}

/// Extremes of one realisation together with the frontier's cell oracle.
#[derive(Debug, Clone)]
pub struct CellStats {
    pub extremes: CellExtremes,
    pub oracle: Arc<CellOracle>,
}

/// One cell of [`CellStats`], for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRecord {
    pub count: u32,
    pub x_star: f64,
    pub z_star: f64,
    pub lambda: f64,
    pub m_cell: f64,
    pub big_m_cell: f64,
}

impl CellStats {
    pub fn cell(&self, r: usize) -> CellRecord {
        CellRecord {
            count: self.extremes.counts[r],
            x_star: self.extremes.x_star[r],
            z_star: self.extremes.z_star[r],
            lambda: self.oracle.lambda[r],
            m_cell: self.oracle.m_cell[r],
            big_m_cell: self.oracle.big_m_cell[r],
        }
    }
}

/// Per-cell count, maximum and minimum of the sample's second coordinates,
/// with the oracle fields computed from `f`.
pub fn cell_stats(sample: &PointSample, cfg: &PartitionConfig, f: &FrontierSpec) -> Result<CellStats> {
    if sample.n != cfg.n() {
        return Err(Error::PartitionMismatch {
            sample: sample.n,
            partition: cfg.n(),
        });
    }
    Ok(CellStats {
        extremes: CellExtremes::from_points(&sample.points, cfg),
        oracle: Arc::new(CellOracle::new(f, cfg)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> FrontierSpec {
        FrontierSpec::constant(1.0).unwrap()
    }

    #[test]
    fn tiny_intensity_gives_empty_sample() {
        let s = simulate(&unit(), 1, 1e-12, 9).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(simulate(&unit(), 0, 1.0, 1).is_err());
        assert!(simulate(&unit(), 1, 0.0, 1).is_err());
        assert!(simulate(&unit(), 1, f64::NAN, 1).is_err());
    }

    #[test]
    fn pathological_rejection_rate_is_reported() {
        let spike = FrontierSpec::custom(
            "spike",
            |x: f64| if (x - 0.5).abs() < 1e-9 { 1e8 } else { 1e-3 },
            1e-3,
            1e8,
            None,
        )
        .unwrap()
        .with_exact_integral(|a, b| 1e-3 * (b - a));
        assert!(matches!(
            simulate(&spike, 1, 1.0, 1),
            Err(Error::PathologicalRejection { .. })
        ));
    }

    #[test]
    fn points_lie_in_support_and_are_sorted() {
        for f in [
            FrontierSpec::affine(1.0, 0.5).unwrap(),
            FrontierSpec::sine(1.0, 0.4).unwrap(),
            FrontierSpec::two_level(0.5, 2.0, 0.3).unwrap(),
        ] {
            let s = simulate(&f, 200, 1.0, 4).unwrap();
            assert!(!s.is_empty());
            assert!(s.points.windows(2).all(|w| w[0].0 <= w[1].0));
            assert!(s.points.iter().all(|&(x, y)| (0.0..=1.0).contains(&x) && y >= 0.0 && y <= f.eval(x)));
        }
    }

    #[test]
    fn reproducible_and_streamed_path_agrees() {
        let f = FrontierSpec::sine(1.0, 0.25).unwrap();
        let cfg = PartitionConfig::new(300, 3, 4).unwrap();
        let a = simulate_stream(&f, 300, 1.5, 77, 5).unwrap();
        let b = simulate_stream(&f, 300, 1.5, 77, 5).unwrap();
        assert_eq!(a, b);
        let other = simulate_stream(&f, 300, 1.5, 77, 6).unwrap();
        assert_ne!(a.points, other.points);
        let stats = cell_stats(&a, &cfg, &f).unwrap();
        let streamed = simulate_extremes(&f, &cfg, 1.5, 77, 5).unwrap();
        assert_eq!(stats.extremes, streamed);
    }

    #[test]
    fn cell_stats_examples() {
        let cfg = PartitionConfig::new(1, 1, 1).unwrap();
        let empty = PointSample {
            points: vec![],
            n: 1,
            c: 1.0,
            seed: 0,
            frontier: "constant:1".into(),
        };
        let s = cell_stats(&empty, &cfg, &unit()).unwrap();
        assert_eq!(s.extremes, CellExtremes::empty(2));

        let two = PointSample {
            points: vec![(0.1, 0.3), (0.1, 0.7)],
            ..empty.clone()
        };
        let s = cell_stats(&two, &cfg, &unit()).unwrap();
        assert_eq!((s.cell(0).count, s.cell(0).x_star, s.cell(0).z_star), (2, 0.7, 0.3));
        assert_eq!((s.cell(1).count, s.cell(1).x_star, s.cell(1).z_star), (0, 0.0, 0.0));

        let cfg4 = PartitionConfig::new(1, 2, 1).unwrap();
        let s = cell_stats(&empty, &cfg4, &unit()).unwrap();
        for r in 0..4 {
            let c = s.cell(r);
            assert_eq!((c.lambda, c.m_cell, c.big_m_cell), (0.25, 1.0, 1.0));
        }

        let wrong_n = PartitionConfig::new(2, 1, 1).unwrap();
        assert!(matches!(cell_stats(&empty, &wrong_n, &unit()), Err(Error::PartitionMismatch { .. })));
    }

    #[test]
    fn boundary_point_goes_to_last_cell() {
        let cfg = PartitionConfig::new(1, 2, 1).unwrap();
        let cells = CellExtremes::from_points(&[(1.0, 0.5), (0.25, 0.2)], &cfg);
        assert_eq!(cells.counts, vec![0, 1, 0, 1]);
    }

    #[test]
    fn oracle_fields_are_consistent() {
        let f = FrontierSpec::sine(1.0, 0.3).unwrap();
        let cfg = PartitionConfig::new(10, 2, 3).unwrap();
        let s = simulate(&f, 10, 50.0, 1).unwrap();
        let stats = cell_stats(&s, &cfg, &f).unwrap();
        let k = cfg.k_n() as f64;
        for r in 0..cfg.cells() {
            let c = stats.cell(r);
            assert!(c.m_cell <= k * c.lambda + 1e-12 && k * c.lambda <= c.big_m_cell + 1e-12);
            if c.count > 0 {
                assert!(0.0 <= c.z_star && c.z_star <= c.x_star && c.x_star <= c.big_m_cell);
            }
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let f = FrontierSpec::affine(1.0, 0.5).unwrap();
        let s = simulate(&f, 50, 1.0, 123).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# n=50 c=1 seed=123 frontier=affine:1,0.5\nx,y\n"));
        let back = PointSample::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.regenerate().unwrap(), s);
    }

    #[test]
    fn csv_rejects_missing_header() {
        assert!(PointSample::read_csv("x,y\n0.1,0.2\n".as_bytes()).is_err());
        assert!(PointSample::read_csv("# n=1 c=1 seed=2\nx,y\n".as_bytes()).is_err());
    }
}
