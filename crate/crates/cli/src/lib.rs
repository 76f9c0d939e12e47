//! Config-driven batch runner around `eit-fbp-core`.

pub mod config;
pub mod output;
pub mod pipeline;

pub use config::{parse_config, parse_str, ConfigError, ConfigFile, Emit, RunConfig};
pub use pipeline::{run_pipeline, RunError, RunOptions, RunReport};

/// Gain table of the five ramp filters as CSV text, `points` evenly spaced
/// frequencies over `[0, 1]`.
pub fn filter_table(points: usize) -> String {
    let mut out = String::from("f,ram_lak,shepp_logan,cosine,hamming,hann\n");
    for (f, gains) in eit_fbp_core::fbp::gain_table(points) {
        out.push_str(&format!("{f:.15}"));
        for g in gains {
            out.push_str(&format!(",{g:.15}"));
        }
        out.push('\n');
    }
    out
}
