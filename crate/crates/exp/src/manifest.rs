use sha2::{Digest, Sha256};

/// Plain-text record of what produced an output directory. Contains nothing
/// that varies between identical invocations, so reruns give identical files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub config_sha256: String,
    pub version: String,
    pub seeds: Vec<(String, u64)>,
    pub start_round: u64,
    pub end_round: u64,
    /// Output file names relative to the output directory.
    pub outputs: Vec<String>,
    pub extra: Vec<(String, String)>,
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn code_version() -> String {
    format!("bogd-exp {}", env!("CARGO_PKG_VERSION"))
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: &str| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(v);
            s.push('\n');
        };
        line("command", &self.command);
        line("version", &self.version);
        line("config_sha256", &self.config_sha256);
        for (name, seed) in &self.seeds {
            line(&format!("seed.{name}"), &seed.to_string());
        }
        line("start_round", &self.start_round.to_string());
        line("end_round", &self.end_round.to_string());
        for (k, v) in &self.extra {
            line(k, v);
        }
        line("outputs", &self.outputs.join(","));
        s
    }
}
