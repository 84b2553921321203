//! Fixtures shared by the benchmarks: the standard ten-element geometry with
//! two interferers, per radar mode.

use phased_mimo::beamforming::WeightSet;
use phased_mimo::sinr::RadarMode;
use phased_mimo::{ArrayConfig, Interference, PointSource, Scenario};

pub fn standard_scenario(mode: RadarMode, n_rx: usize) -> (Scenario, WeightSet) {
    let cfg = ArrayConfig::new(10, n_rx, 0.5, 0.5).expect("valid geometry");
    let part = mode.partition(10).expect("valid partition");
    let mut sc = Scenario::new(cfg, part, PointSource { angle: 10f64.to_radians(), power: 1.0 });
    sc.interference = Interference::Points(vec![
        PointSource { angle: (-30f64).to_radians(), power: 1e3 },
        PointSource { angle: (-10f64).to_radians(), power: 1e3 },
    ]);
    let ws = WeightSet::conventional(&sc.cfg, &sc.part, sc.target.angle).expect("conventional weights");
    (sc, ws)
}
