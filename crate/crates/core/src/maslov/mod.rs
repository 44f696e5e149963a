//! Lagrangian paths, crossings and Robbin–Salamon indices.

mod crossing;
mod path;

pub use crossing::{
    crossing_form, crossing_form_with_complement, find_crossings, find_pair_crossings, maslov_index,
    maslov_index_pair, maslov_index_report, Crossing, CrossingOptions, CrossingPosition,
};
pub use path::{LagrangianPath, Segment, Side, SymplecticPathSpec};
