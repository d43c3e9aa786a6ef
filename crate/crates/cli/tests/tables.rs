//! CSV and JSON encodings of a table carry exactly the same content.

use proptest::prelude::*;
use spaser_cli::table::{Column, SweepTable};

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        1 => Just(f64::NAN),
        1 => prop::sample::select(vec![0.0, -0.0, 1.0, 5e-324, f64::MAX]),
    ]
}

fn table() -> impl Strategy<Value = SweepTable> {
    (1usize..6, 0usize..12, prop::collection::vec(("[a-z]{1,6}", "[ -~&&[^\n]]{0,20}"), 0..4))
        .prop_flat_map(|(width, height, meta)| {
            let units = prop::collection::vec(prop::sample::select(vec!["", "s", "s^-1", "rad/s"]), width);
            let rows = prop::collection::vec(prop::collection::vec(value(), width), height);
            (units, rows, Just(meta))
        })
        .prop_map(|(units, rows, meta)| {
            let columns = units.iter().enumerate().map(|(i, u)| Column::new(&format!("c{i}"), u)).collect();
            let mut t = SweepTable::new(columns);
            // Keys are unique in the JSON object form.
            for (i, (k, v)) in meta.into_iter().enumerate() {
                t.metadata.push((format!("{k}{i}"), v.trim().to_string()));
            }
            t.rows = rows;
            t
        })
}

fn same(a: &SweepTable, b: &SweepTable) -> bool {
    a.metadata == b.metadata
        && a.columns == b.columns
        && a.rows.len() == b.rows.len()
        && a.rows.iter().flatten().zip(b.rows.iter().flatten()).all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
}

proptest! {
    #[test]
    fn csv_to_json_and_back_is_lossless(t in table()) {
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        let from_csv = SweepTable::read_csv(std::str::from_utf8(&csv).unwrap()).unwrap();
        prop_assert!(same(&from_csv, &t));
        let from_json = SweepTable::read_json(&from_csv.to_json().unwrap()).unwrap();
        prop_assert!(same(&from_json, &t));
        let mut again = Vec::new();
        from_json.write_csv(&mut again).unwrap();
        prop_assert_eq!(again, csv);
    }

    #[test]
    fn encoding_is_a_pure_function_of_the_table(t in table()) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        t.write_csv(&mut a).unwrap();
        t.clone().write_csv(&mut b).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(t.to_json().unwrap(), t.clone().to_json().unwrap());
    }
}
