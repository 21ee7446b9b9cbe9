mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use nfscan::calibration::{CfRow, CfTable, GeometryKernel};
use nfscan::io::{
    parse_cf_csv, parse_map_csv, parse_touchstone, write_cf_csv, write_map_csv, write_touchstone,
    Component, DataFormat, FieldMap, MapValues, NetworkData, Quantity,
};
use nfscan::{Phasor, ScanGrid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

#[test]
fn structured_mutants_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (ts, csv) = (sample_touchstone(), sample_map_csv());
    for _ in 0..300 {
        let bad = mutate_touchstone(&ts, &mut rng);
        assert!(parse_touchstone(&bad).is_err(), "accepted:\n{bad}");
        let bad = mutate_map_csv(&csv, &mut rng);
        assert!(parse_map_csv(&bad).is_err(), "accepted:\n{bad}");
    }
}

#[test]
fn byte_noise_never_panics() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let sources = [sample_touchstone(), sample_map_csv()];
    for k in 0..2000 {
        let mut bytes = sources[k % 2].clone().into_bytes();
        for _ in 0..rng.random_range(1..6) {
            let i = rng.random_range(0..bytes.len());
            match rng.random_range(0..3) {
                0 => bytes[i] = rng.random(),
                1 => {
                    bytes.remove(i);
                }
                _ => bytes.insert(i, b"0123456789.,-e# \n"[rng.random_range(0..17)]),
            }
        }
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let r = catch_unwind(AssertUnwindSafe(|| {
            let _ = parse_touchstone(&text);
            let _ = parse_map_csv(&text);
            let _ = parse_cf_csv(&text);
        }));
        assert!(r.is_ok(), "panic on:\n{text}");
    }
}

#[test]
fn one_port_and_comments() {
    let text = "! probe reflection\n# MHz S MA R 50\n100 0.5 -45 ! trailing\n\n200 0.25 90\n";
    let net = parse_touchstone(text).unwrap();
    assert_eq!(net.n_ports(), 1);
    assert_eq!(net.frequencies(), vec![1e8, 2e8]);
    let s = net.get(1, 1, 1).unwrap();
    assert!((s - Phasor::new(0.0, 0.25)).norm() < 1e-15);
    assert!(net.s21(0).is_none());
}

#[test]
fn db_format_and_column_order() {
    let text = "# Hz S DB R 50\n1e9 -6.0206 0 -20 90 -40 0 -3 180\n";
    let net = parse_touchstone(text).unwrap();
    let s21 = net.s21(0).unwrap();
    assert!((s21 - Phasor::new(0.0, 0.1)).norm() < 1e-12);
    let s12 = net.get(0, 1, 2).unwrap();
    assert!((s12.norm() - 0.01).abs() < 1e-12);
    let s11 = net.get(0, 1, 1).unwrap();
    assert!((s11.re - 0.5).abs() < 1e-4);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, -1e-6..1e-6f64, Just(0.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn touchstone_ri_round_trip(rows in prop::collection::vec(prop::collection::vec((finite(), finite()), 4), 1..8),
                                base in 1e3..1e10f64) {
        let mut net = NetworkData::new(2, 50.0).unwrap();
        for (k, r) in rows.iter().enumerate() {
            net.push(base * (1.0 + k as f64), r.iter().map(|&(a, b)| Phasor::new(a, b)).collect()).unwrap();
        }
        let text = write_touchstone(&net, DataFormat::Ri);
        let back = parse_touchstone(&text).unwrap();
        prop_assert_eq!(write_touchstone(&back, DataFormat::Ri), text);
        for (a, b) in net.rows().iter().zip(back.rows()) {
            prop_assert!(((a.freq - b.freq) / a.freq).abs() < 1e-8);
            for (x, y) in a.s.iter().zip(&b.s) {
                prop_assert!((x - y).norm() <= 1e-8 * x.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn map_csv_round_trip(nx in 1usize..6, ny in 1usize..6, seed in any::<u64>(), complex in any::<bool>()) {
        let g = ScanGrid::new(0.0, (nx - 1) as f64 * 1e-3, -2e-3, -2e-3 + (ny - 1) as f64 * 5e-4, 1e-3, 5e-4, 1e-3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = if complex {
            MapValues::Complex((0..g.len()).map(|_| Phasor::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        } else {
            MapValues::Db((0..g.len()).map(|_| rng.random_range(-120.0..10.0)).collect())
        };
        let map = FieldMap::new(g, 3e9, Component::Hz, Quantity::PortVoltage, values).unwrap()
            .with_metadata("note", "x");
        let text = write_map_csv(&map);
        let back = parse_map_csv(&text).unwrap();
        prop_assert_eq!(&back, &map);
        prop_assert_eq!(write_map_csv(&back), text);
    }

    #[test]
    fn cf_csv_round_trip(cfs in prop::collection::vec(-50.0..80.0f64, 1..10)) {
        let rows = cfs.iter().enumerate().map(|(k, &c)| CfRow { freq: 1e8 * (k + 1) as f64, cf_db: c }).collect();
        let table = CfTable::new(rows, GeometryKernel::ImageTheory, 1e-3, 1.6e-3).unwrap();
        let text = write_cf_csv(&table);
        let back = parse_cf_csv(&text).unwrap();
        prop_assert_eq!(back.rows(), table.rows());
        prop_assert_eq!(write_cf_csv(&back), text);
    }
}
