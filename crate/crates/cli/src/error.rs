//! CLI errors with exit codes and a JSON payload.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    /// `config`, `usage`, `io` or a simulator error kind.
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(skip)]
    exit_code: u8,
}

#[derive(Serialize)]
struct Payload<'a> {
    error: &'a CliError,
}

impl CliError {
    pub fn config(key: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            kind: "config".into(),
            message: message.into(),
            key: key.map(str::to_string),
            exit_code: 2,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage".into(),
            message: message.into(),
            key: None,
            exit_code: 2,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: "io".into(),
            message: message.into(),
            key: None,
            exit_code: 1,
        }
    }

    #[cfg(test)]
    pub fn key(&self) -> Option<&str> {
        self.key.as_deref()
    }

    pub fn exit_code(&self) -> u8 {
        self.exit_code
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&Payload { error: self }).expect("error serializes")
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<hybridosc_core::Error> for CliError {
    fn from(e: hybridosc_core::Error) -> Self {
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
            key: None,
            exit_code: 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payload_shape() {
        let e = CliError::config(Some("zeta"), "bad");
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["error"]["kind"], "config");
        assert_eq!(v["error"]["key"], "zeta");
        assert_eq!(e.exit_code(), 2);
        let e: CliError = hybridosc_core::Error::Domain("x".into()).into();
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert!(v["error"].get("key").is_none());
        assert_eq!(e.exit_code(), 1);
    }
}
