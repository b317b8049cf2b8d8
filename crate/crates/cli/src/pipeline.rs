use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Cc,
    Hoist,
    Cps,
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cc" => Ok(Stage::Cc),
            "hoist" => Ok(Stage::Hoist),
            "cps" => Ok(Stage::Cps),
            _ => Err(format!("unknown pass `{s}` (expected cc, hoist or cps)")),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Cc => "cc",
            Stage::Hoist => "hoist",
            Stage::Cps => "cps",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lang {
    Src,
    Tgt,
}

impl Lang {
    /// `.ftgt` files hold target programs; anything else is source.
    pub fn of_path(path: &Path) -> Lang {
        match path.extension().and_then(|e| e.to_str()) {
            Some("ftgt") => Lang::Tgt,
            _ => Lang::Src,
        }
    }
}

/// A validated sequence of transformations applied to one input file.
#[derive(Clone, Debug)]
pub struct PipelineSpec {
    pub stages: Vec<Stage>,
    pub input: PathBuf,
    pub json: bool,
}

impl PipelineSpec {
    pub fn new(stages: Vec<Stage>, input: PathBuf, json: bool) -> Result<Self, String> {
        if stages.is_empty() {
            return Err("no passes given".into());
        }
        let lang = Lang::of_path(&input);
        let has = |s: Stage| stages.contains(&s);
        if has(Stage::Cps) && (has(Stage::Cc) || has(Stage::Hoist)) {
            return Err("cps cannot be combined with cc or hoist".into());
        }
        for (i, s) in stages.iter().enumerate() {
            if stages[..i].contains(s) {
                return Err(format!("pass `{s}` given twice"));
            }
        }
        for (i, s) in stages.iter().enumerate() {
            let converted = lang == Lang::Tgt || stages[..i].contains(&Stage::Cc);
            match s {
                Stage::Cc | Stage::Cps if lang == Lang::Tgt => {
                    return Err(format!(
                        "pass `{s}` needs a source program, got a .ftgt file"
                    ))
                }
                Stage::Hoist if !converted => {
                    return Err("hoist needs cc earlier in the pipeline or a .ftgt input".into())
                }
                _ => {}
            }
        }
        Ok(PipelineSpec {
            stages,
            input,
            json,
        })
    }

    pub fn lang(&self) -> Lang {
        Lang::of_path(&self.input)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(stages: &[Stage], file: &str) -> Result<PipelineSpec, String> {
        PipelineSpec::new(stages.to_vec(), PathBuf::from(file), false)
    }

    #[test]
    fn valid_pipelines() {
        assert!(spec(&[Stage::Cc], "a.fsrc").is_ok());
        assert!(spec(&[Stage::Cc, Stage::Hoist], "a.fsrc").is_ok());
        assert!(spec(&[Stage::Hoist], "a.ftgt").is_ok());
        assert!(spec(&[Stage::Cps], "a.fsrc").is_ok());
    }

    #[test]
    fn invalid_pipelines() {
        assert!(spec(&[], "a.fsrc").is_err());
        assert!(spec(&[Stage::Hoist], "a.fsrc").is_err());
        assert!(spec(&[Stage::Hoist, Stage::Cc], "a.fsrc").is_err());
        assert!(spec(&[Stage::Cc, Stage::Cps], "a.fsrc").is_err());
        assert!(spec(&[Stage::Cps], "a.ftgt").is_err());
        assert!(spec(&[Stage::Cc], "a.ftgt").is_err());
        assert!(spec(&[Stage::Cc, Stage::Cc], "a.fsrc").is_err());
    }
}
