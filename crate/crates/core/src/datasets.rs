//! The fourteen bundled two-group example datasets, with their published
//! summary moments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::Sample;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Dataset {
    pub id: &'static str,
    pub x: &'static [f64],
    pub y: &'static [f64],
    /// Printed (mean, variance) of each group, three decimals.
    pub printed_x: (f64, f64),
    pub printed_y: (f64, f64),
}

impl Dataset {
    pub fn samples(&self) -> Result<(Sample, Sample)> {
        Ok((Sample::try_from(self.x)?, Sample::try_from(self.y)?))
    }
}

pub const CATALOG: [Dataset; 14] = [
    Dataset {
        id: "ds1",
        x: &[5.0, 7.0, 5.0, 3.0, 5.0, 3.0, 3.0, 9.0],
        y: &[8.0, 1.0, 4.0, 6.0, 6.0, 4.0, 1.0, 2.0],
        printed_x: (5.000, 4.571),
        printed_y: (4.000, 6.571),
    },
    Dataset {
        id: "ds2",
        x: &[0.72, 0.68, 0.69, 0.66, 0.57, 0.66, 0.70, 0.63, 0.71, 0.73],
        y: &[0.71, 0.83, 0.89, 0.57, 0.68, 0.74, 0.75, 0.67, 0.80, 0.78],
        printed_x: (0.675, 0.002),
        printed_y: (0.742, 0.008),
    },
    Dataset {
        id: "ds3",
        x: &[42.0, 45.0, 40.0, 37.0, 41.0, 41.0, 48.0, 50.0, 45.0, 46.0],
        y: &[43.0, 51.0, 56.0, 40.0, 32.0, 54.0, 51.0, 55.0, 50.0, 48.0],
        printed_x: (43.500, 15.833),
        printed_y: (48.000, 57.330),
    },
    Dataset {
        id: "ds4",
        x: &[33.0, 31.0, 34.0, 38.0, 32.0, 28.0],
        y: &[35.0, 42.0, 43.0, 41.0],
        printed_x: (32.667, 11.067),
        printed_y: (40.250, 12.917),
    },
    Dataset {
        id: "ds5",
        x: &[
            35.0, 40.0, 12.0, 15.0, 21.0, 14.0, 46.0, 10.0, 28.0, 48.0, 16.0, 30.0, 32.0, 48.0, 31.0, 22.0, 12.0, 39.0,
            19.0, 25.0,
        ],
        y: &[
            2.0, 27.0, 38.0, 31.0, 1.0, 19.0, 1.0, 34.0, 3.0, 1.0, 2.0, 3.0, 2.0, 1.0, 2.0, 1.0, 3.0, 29.0, 37.0, 2.0,
        ],
        printed_x: (27.150, 156.450),
        printed_y: (11.950, 213.524),
    },
    Dataset {
        id: "ds6",
        // the first two values are printed without a separating comma
        x: &[26.0, 21.0, 22.0, 26.0, 19.0, 22.0, 26.0, 25.0, 24.0, 21.0, 23.0, 23.0, 18.0, 29.0, 22.0],
        y: &[18.0, 23.0, 21.0, 20.0, 20.0, 29.0, 20.0, 16.0, 20.0, 26.0, 21.0, 25.0, 17.0, 18.0, 19.0],
        printed_x: (23.133, 8.552),
        printed_y: (20.867, 12.552),
    },
    Dataset {
        id: "ds7",
        x: &[520.0, 460.0, 500.0, 470.0],
        y: &[230.0, 270.0, 250.0, 280.0],
        printed_x: (487.500, 758.333),
        printed_y: (257.500, 491.667),
    },
    Dataset {
        id: "ds8",
        x: &[3.0, 0.0, 6.0, 7.0, 4.0, 3.0, 2.0, 1.0, 4.0],
        y: &[5.0, 1.0, 5.0, 7.0, 10.0, 9.0, 7.0, 11.0, 8.0],
        printed_x: (3.333, 5.000),
        printed_y: (7.000, 9.250),
    },
    Dataset {
        id: "ds9",
        x: &[16.0, 20.0, 21.0, 22.0, 23.0, 22.0, 27.0, 25.0, 27.0, 28.0],
        y: &[19.0, 22.0, 24.0, 24.0, 25.0, 25.0, 26.0, 26.0, 28.0, 32.0],
        printed_x: (23.100, 13.878),
        printed_y: (25.100, 11.878),
    },
    Dataset {
        id: "ds10",
        x: &[91.0, 87.0, 99.0, 77.0, 88.0, 91.0],
        y: &[101.0, 110.0, 103.0, 93.0, 99.0, 104.0],
        printed_x: (88.833, 51.367),
        printed_y: (101.667, 31.867),
    },
    Dataset {
        id: "ds11",
        x: &[10.11, 7.36, 6.34, 11.83, 8.61],
        y: &[3.28, 6.52, 2.28, 6.66, 4.55],
        printed_x: (8.850, 4.761),
        printed_y: (4.658, 3.760),
    },
    Dataset {
        id: "ds12",
        x: &[4.79, 4.95, 2.52, 4.98, 4.99],
        y: &[7.90, 7.51, 6.62, 7.57, 7.49],
        printed_x: (4.446, 1.166),
        printed_y: (7.418, 0.227),
    },
    Dataset {
        id: "ds13",
        x: &[3.99, 3.98, 4.03, 4.06, 3.84],
        y: &[6.68, 6.25, 6.97, 5.75, 4.01],
        printed_x: (3.980, 0.007),
        printed_y: (5.932, 1.366),
    },
    Dataset {
        id: "ds14",
        x: &[10.16, 8.26, 16.23, 1.44, 0.66],
        y: &[28.06, 8.52, 25.39, 15.45, 16.03],
        printed_x: (7.350, 41.816),
        printed_y: (18.690, 63.422),
    },
];

/// Look up a dataset by id. Accepts `ds4`, `DS4`, `4` or `data4`.
pub fn dataset(name: &str) -> Result<&'static Dataset> {
    let key = name.trim().to_ascii_lowercase();
    let digits = key.trim_start_matches("data").trim_start_matches("ds").trim();
    CATALOG
        .iter()
        .find(|d| d.id.trim_start_matches("ds") == digits)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown dataset '{name}' (expected ds1..ds14)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(dataset("ds4").unwrap().x.len(), 6);
        assert_eq!(dataset("DS12").unwrap().id, "ds12");
        assert_eq!(dataset("7").unwrap().id, "ds7");
        assert!(dataset("ds15").is_err());
        assert!(dataset("ds").is_err());
    }
}
