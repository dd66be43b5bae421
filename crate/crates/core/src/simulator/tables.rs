//! The five model-selection tables: percent correct for the power-law,
//! multiplicative-constant and additive-constant experiments, and the
//! under/over selection rates for the two constant experiments.

use super::{Execution, ScenarioFamily, SelectionMetric, SelectionTally, SimulationScenario};
use crate::dataio::TableDocument;
use crate::error::Result;

pub const MULTIPLICATIVE_SIGMAS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
pub const ADDITIVE_SIGMAS: [f64; 4] = [1.0, 1.5, 2.0, 2.5];

/// Published percent-correct cells, rows by σ, columns MAPE, Σ(lnQ)², LSD,
/// SMAPE.
pub const REFERENCE_TABLE1: [[f64; 4]; 4] = [
    [86.0, 88.0, 82.0, 82.0],
    [43.0, 59.0, 48.0, 52.0],
    [19.0, 43.0, 28.0, 35.0],
    [7.0, 34.0, 16.0, 27.0],
];
pub const REFERENCE_TABLE2: [[f64; 4]; 4] = [
    [97.0, 100.0, 98.0, 98.0],
    [57.0, 81.0, 72.0, 75.0],
    [27.0, 62.0, 45.0, 54.0],
    [11.0, 52.0, 29.0, 39.0],
];
/// Published under/over cells: (under, over) for MAPE, Σ(lnQ)², LSD, SMAPE.
pub const REFERENCE_TABLE3: [[f64; 8]; 4] = [
    [3.0, 0.0, 0.0, 0.0, 0.0, 2.0, 2.0, 0.0],
    [41.0, 2.0, 9.0, 10.0, 3.0, 25.0, 11.0, 14.0],
    [69.0, 4.0, 18.0, 20.0, 4.0, 51.0, 21.0, 25.0],
    [88.0, 1.0, 23.0, 25.0, 4.0, 67.0, 31.0, 30.0],
];
pub const REFERENCE_TABLE4: [[f64; 4]; 4] = [
    [97.0, 100.0, 100.0, 98.0],
    [78.0, 90.0, 92.0, 87.0],
    [54.0, 76.0, 82.0, 74.0],
    [34.0, 60.0, 72.0, 64.0],
];
pub const REFERENCE_TABLE5: [[f64; 8]; 4] = [
    [3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0],
    [20.0, 2.0, 8.0, 2.0, 3.0, 5.0, 6.0, 7.0],
    [42.0, 0.0, 20.0, 4.0, 7.0, 11.0, 12.0, 14.0],
    [54.0, 1.0, 34.0, 15.0, 11.0, 17.0, 16.0, 20.0],
];

/// Allowed distance, in percentage points, between a reproduced cell and
/// the published one.
pub const REFERENCE_TOLERANCE_POINTS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteRow {
    pub sigma: f64,
    pub tally: SelectionTally,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSuite {
    pub master_seed: u64,
    pub replications: usize,
    pub power: Vec<SuiteRow>,
    pub constant_multiplicative: Vec<SuiteRow>,
    pub constant_additive: Vec<SuiteRow>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one (experiment, σ row) cell of the suite.
pub(crate) fn cell_seed(master_seed: u64, family: ScenarioFamily, row: usize) -> u64 {
    let tag = match family {
        ScenarioFamily::PowerMultiplicative => 1u64,
        ScenarioFamily::ConstantMultiplicative => 2,
        ScenarioFamily::ConstantAdditive => 3,
    };
    splitmix64(splitmix64(master_seed) ^ (tag << 32 | row as u64))
}

pub fn run_table_suite(master_seed: u64, replications: usize) -> Result<TableSuite> {
    run_table_suite_with(master_seed, replications, Execution::default())
}

pub fn run_table_suite_with(
    master_seed: u64,
    replications: usize,
    execution: Execution,
) -> Result<TableSuite> {
    let run = |family: ScenarioFamily, sigmas: &[f64]| -> Result<Vec<SuiteRow>> {
        sigmas
            .iter()
            .enumerate()
            .map(|(row, &sigma)| {
                let scenario = SimulationScenario::standard(
                    family,
                    sigma,
                    replications,
                    cell_seed(master_seed, family, row),
                )?;
                Ok(SuiteRow {
                    sigma,
                    tally: super::run_experiment_with(&scenario, execution),
                })
            })
            .collect()
    };
    Ok(TableSuite {
        master_seed,
        replications,
        power: run(ScenarioFamily::PowerMultiplicative, &MULTIPLICATIVE_SIGMAS)?,
        constant_multiplicative: run(
            ScenarioFamily::ConstantMultiplicative,
            &MULTIPLICATIVE_SIGMAS,
        )?,
        constant_additive: run(ScenarioFamily::ConstantAdditive, &ADDITIVE_SIGMAS)?,
    })
}

fn one_decimal(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// Percent-correct table, one row per σ.
pub fn correct_table(title: &str, rows: &[SuiteRow]) -> TableDocument {
    let mut columns = vec!["sigma".to_string()];
    columns.extend(
        SelectionMetric::ALL
            .iter()
            .map(|m| format!("{}_correct_pct", m.key())),
    );
    let mut doc = TableDocument::new(title, columns);
    for r in rows {
        let mut row = vec![r.sigma];
        row.extend(
            SelectionMetric::ALL
                .iter()
                .map(|m| one_decimal(r.tally.percent_correct(*m))),
        );
        doc.push_row(row).expect("rectangular");
    }
    doc
}

/// Under/over selection table, one row per σ.
pub fn bias_table(title: &str, rows: &[SuiteRow]) -> TableDocument {
    let mut columns = vec!["sigma".to_string()];
    for m in SelectionMetric::ALL {
        columns.push(format!("{}_under_pct", m.key()));
        columns.push(format!("{}_over_pct", m.key()));
    }
    let mut doc = TableDocument::new(title, columns);
    for r in rows {
        let mut row = vec![r.sigma];
        for m in SelectionMetric::ALL {
            row.push(one_decimal(r.tally.percent_under(m)));
            row.push(one_decimal(r.tally.percent_over(m)));
        }
        doc.push_row(row).expect("rectangular");
    }
    doc
}

impl TableSuite {
    pub fn table1(&self) -> TableDocument {
        correct_table("Table1", &self.power)
    }

    pub fn table2(&self) -> TableDocument {
        correct_table("Table2", &self.constant_multiplicative)
    }

    pub fn table3(&self) -> TableDocument {
        bias_table("Table3", &self.constant_multiplicative)
    }

    pub fn table4(&self) -> TableDocument {
        correct_table("Table4", &self.constant_additive)
    }

    pub fn table5(&self) -> TableDocument {
        bias_table("Table5", &self.constant_additive)
    }

    pub fn tables(&self) -> [TableDocument; 5] {
        [
            self.table1(),
            self.table2(),
            self.table3(),
            self.table4(),
            self.table5(),
        ]
    }
}

/// One reproduced cell next to its published value.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCheck {
    pub table: u8,
    pub sigma: f64,
    pub column: String,
    pub observed: f64,
    pub expected: f64,
}

impl CellCheck {
    pub fn deviation(&self) -> f64 {
        (self.observed - self.expected).abs()
    }

    pub fn passes(&self) -> bool {
        self.deviation() <= REFERENCE_TOLERANCE_POINTS
    }
}

/// Compares every cell (unrounded percentages) against the published tables.
pub fn compare_with_reference(suite: &TableSuite) -> Vec<CellCheck> {
    let mut checks = Vec::new();
    let mut correct = |table: u8, rows: &[SuiteRow], reference: &[[f64; 4]; 4]| {
        for (r, expected) in rows.iter().zip(reference) {
            for (m, e) in SelectionMetric::ALL.iter().zip(expected) {
                checks.push(CellCheck {
                    table,
                    sigma: r.sigma,
                    column: format!("{} correct", m.label()),
                    observed: r.tally.percent_correct(*m),
                    expected: *e,
                });
            }
        }
    };
    correct(1, &suite.power, &REFERENCE_TABLE1);
    correct(2, &suite.constant_multiplicative, &REFERENCE_TABLE2);
    correct(4, &suite.constant_additive, &REFERENCE_TABLE4);

    let mut bias = |table: u8, rows: &[SuiteRow], reference: &[[f64; 8]; 4]| {
        for (r, expected) in rows.iter().zip(reference) {
            for (k, m) in SelectionMetric::ALL.iter().enumerate() {
                checks.push(CellCheck {
                    table,
                    sigma: r.sigma,
                    column: format!("{} under", m.label()),
                    observed: r.tally.percent_under(*m),
                    expected: expected[2 * k],
                });
                checks.push(CellCheck {
                    table,
                    sigma: r.sigma,
                    column: format!("{} over", m.label()),
                    observed: r.tally.percent_over(*m),
                    expected: expected[2 * k + 1],
                });
            }
        }
    };
    bias(3, &suite.constant_multiplicative, &REFERENCE_TABLE3);
    bias(5, &suite.constant_additive, &REFERENCE_TABLE5);
    checks.sort_by_key(|c| c.table);
    checks
}
