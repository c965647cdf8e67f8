use serde::{Deserialize, Serialize};

use singdist_core::analysis::StageTimings;
use singdist_core::geometry::MotionRep;
use singdist_core::instance::ManipulatorInstance;

/// Everything needed to rerun a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub instance_hash: String,
    pub representation: Option<String>,
    pub mode: Option<String>,
    pub grouping: Option<String>,
    pub seed: u64,
    pub config: serde_json::Value,
    pub version: String,
    pub timings: StageTimings,
}

impl RunManifest {
    pub fn new(
        command: &str,
        inst: &ManipulatorInstance,
        rep: Option<&MotionRep>,
        grouping: Option<String>,
        seed: u64,
        config: serde_json::Value,
    ) -> Self {
        RunManifest {
            command: command.into(),
            instance_hash: inst.hash(),
            representation: rep.map(|r| r.to_string()),
            mode: rep.map(|r| r.group.to_string()),
            grouping,
            seed,
            config,
            version: env!("CARGO_PKG_VERSION").into(),
            timings: StageTimings::default(),
        }
    }

    /// The manifest as a leading `#` line for CSV outputs.
    pub fn csv_comment(&self) -> String {
        format!("# {}\n", serde_json::to_string(self).expect("manifest serialises"))
    }
}

#[derive(Serialize)]
pub struct Wrapped<'a, T> {
    pub manifest: &'a RunManifest,
    pub result: &'a T,
}

#[derive(Deserialize)]
pub struct Owned<T> {
    pub manifest: RunManifest,
    pub result: T,
}

#[cfg(test)]
mod tests {
    use super::*;
    use singdist_core::geometry::RepKind;
    use singdist_core::reference::reference_instance;

    #[test]
    fn manifest_round_trips() {
        let inst = reference_instance();
        let m = RunManifest::new("solve", &inst, Some(&MotionRep::natural(RepKind::Bgr)), None, 3, serde_json::Value::Null);
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(m.csv_comment().starts_with("# {"));
    }
}
