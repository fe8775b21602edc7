//! Synthetic benchmarks and CSV point files.

mod csv;
mod generate;

pub use self::csv::{
    read_labels_csv, read_points_csv, read_table, write_labels_csv, write_points_csv, PointTable,
    LABEL_COLUMN,
};
pub use self::generate::{generate, Blob, Family, GeneratorSpec};
