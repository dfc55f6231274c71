use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] kdsqnm::Error),
    #[error("i/o on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("serialization: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl CliError {
    /// 0 success, 1 internal error, 2 invalid parameters, 3 unsupported regime.
    pub fn exit_code(&self) -> i32 {
        use kdsqnm::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Model(e) => match e {
                E::InvalidParams(_)
                | E::NotSubextremal { .. }
                | E::DegenerateRoots { .. }
                | E::GridTooCoarse(_)
                | E::IntervalOutOfDomain { .. }
                | E::OutOfChart { .. } => 2,
                E::LambdaZeroUnsupported => 3,
                _ => 1,
            },
            CliError::Io { .. } | CliError::Serialize(_) => 1,
        }
    }

    /// Name of the underlying error variant, for diagnostics and the manifest.
    pub fn kind(&self) -> String {
        match self {
            CliError::Config(_) => "Config".into(),
            CliError::Model(e) => {
                let d = format!("{e:?}");
                d.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Model").to_string()
            }
            CliError::Io { .. } => "Io".into(),
            CliError::Serialize(_) => "Serialize".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_class() {
        let e = CliError::from(kdsqnm::Error::DegenerateRoots { separation: 0.0 });
        assert_eq!((e.exit_code(), e.kind().as_str()), (2, "DegenerateRoots"));
        let e = CliError::from(kdsqnm::Error::LambdaZeroUnsupported);
        assert_eq!((e.exit_code(), e.kind().as_str()), (3, "LambdaZeroUnsupported"));
        assert_eq!(CliError::from(kdsqnm::Error::ZeroVector).exit_code(), 1);
    }
}
