//! Named configurations for the standard figure and table sweeps.
//!
//! The 30 nm structures use Vb = 20, 25, 30 meV with effective barriers
//! 3.38, 6.28, 9.61 meV; the 40 nm ones Vb = 13.86, 18.17, 20 meV with
//! 6.28, 9.61, 11.03 meV.

pub const NAMES: [&str; 11] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "table1"];

const ANCHORS_30: &str = "calibration = [[20.0, 3.38], [25.0, 6.28], [30.0, 9.61]]\n";
const ANCHORS_40: &str = "calibration = [[13.86, 6.28], [18.17, 9.61], [20.0, 11.03]]\n";

fn compose(parts: &[&str]) -> String {
    parts.concat()
}

/// TOML text of a preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    use std::sync::OnceLock;
    static TEXTS: OnceLock<Vec<(&'static str, String)>> = OnceLock::new();
    let texts = TEXTS.get_or_init(|| {
        let b_grid = "b_grid = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5, 8.0]\n";
        vec![
            // UHF splitting against field, small dots
            (
                "fig2",
                compose(&[
                    "solver = \"uhf\"\n",
                    "b_grid = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]\n",
                    "distance_grid = [30.0]\nvb_grid = [20.0]\n",
                    "calibration = [[20.0, 3.38]]\n",
                ]),
            ),
            // UHF splitting against distance, V0 held at the template depth
            ("fig3", compose(&["solver = \"uhf\"\n", "b_grid = [0.0]\n", "distance_grid = [30.0, 36.0, 42.0, 48.0]\nvb_grid = [20.0]\n"])),
            (
                "fig4",
                compose(&["solver = \"mo\"\nbasis_level = \"hm\"\n", b_grid, "distance_grid = [30.0]\nvb_grid = [20.0, 25.0, 30.0]\n", ANCHORS_30]),
            ),
            ("fig5", compose(&["solver = \"mo\"\nbasis_level = \"sp\"\n", b_grid, "distance_grid = [30.0]\nvb_grid = [30.0]\n", ANCHORS_30])),
            (
                "fig6",
                compose(&[
                    "solver = \"mo\"\nbasis_level = \"sp\"\ncompare_basis = true\n",
                    b_grid,
                    "distance_grid = [30.0]\nvb_grid = [20.0, 25.0, 30.0]\n",
                    ANCHORS_30,
                ]),
            ),
            (
                "fig7",
                compose(&["solver = \"mo\"\nbasis_level = \"sp\"\n", b_grid, "distance_grid = [30.0]\nvb_grid = [20.0, 25.0, 30.0]\n", ANCHORS_30]),
            ),
            ("fig8", compose(&["task = \"variational\"\n", "distance_grid = [40.0]\nvb_grid = [13.86, 15.0, 16.0, 17.0, 18.17, 19.0, 20.0]\n", ANCHORS_40])),
            (
                "fig9",
                compose(&["solver = \"mo\"\nbasis_level = \"sp\"\n", b_grid, "distance_grid = [40.0]\nvb_grid = [13.86, 18.17, 20.0]\n", ANCHORS_40]),
            ),
            (
                "fig10",
                compose(&["solver = \"mo\"\nbasis_level = \"sp\"\n", b_grid, "distance_grid = [40.0]\nvb_grid = [13.86, 18.17, 20.0]\n", ANCHORS_40]),
            ),
            (
                "fig11",
                compose(&[
                    "solver = \"mo\"\nbasis_level = \"sp\"\n",
                    "b_grid = [0.0]\n",
                    "distance_grid = [40.0]\nvb_grid = [13.86, 14.5, 15.0, 15.5, 16.0, 16.5, 17.0, 17.5, 18.17, 18.5, 19.0, 19.5, 20.0]\n",
                    ANCHORS_40,
                ]),
            ),
            ("table1", compose(&["task = \"variational\"\n", "distance_grid = [30.0]\nvb_grid = [20.0, 25.0, 30.0]\n", ANCHORS_30])),
        ]
    });
    texts.iter().find(|(n, _)| *n == name).map(|(_, t)| t.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, Overrides, Sources};

    #[test]
    fn every_preset_parses() {
        for name in NAMES {
            let p = parse_config(Sources { preset: Some(name), file: None }, &Overrides::default());
            assert!(p.is_ok(), "{name}: {:?}", p.err());
        }
        assert!(preset_text("fig1").is_none());
    }
}
