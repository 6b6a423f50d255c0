use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The closed set of supported programming languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LanguageId {
    Python,
    Java,
    #[serde(rename = "javascript")]
    JavaScript,
    Php,
    C,
    Cpp,
    CSharp,
    Go,
    Ruby,
    Rust,
}

impl LanguageId {
    pub const ALL: [LanguageId; 10] = [
        LanguageId::Python,
        LanguageId::Java,
        LanguageId::JavaScript,
        LanguageId::Php,
        LanguageId::C,
        LanguageId::Cpp,
        LanguageId::CSharp,
        LanguageId::Go,
        LanguageId::Ruby,
        LanguageId::Rust,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LanguageId::Python => "python",
            LanguageId::Java => "java",
            LanguageId::JavaScript => "javascript",
            LanguageId::Php => "php",
            LanguageId::C => "c",
            LanguageId::Cpp => "cpp",
            LanguageId::CSharp => "c_sharp",
            LanguageId::Go => "go",
            LanguageId::Ruby => "ruby",
            LanguageId::Rust => "rust",
        }
    }

    pub fn from_extension(ext: &str) -> Option<Self> {
        let lang = match ext {
            "py" => LanguageId::Python,
            "java" => LanguageId::Java,
            "js" => LanguageId::JavaScript,
            "php" => LanguageId::Php,
            "c" | "h" => LanguageId::C,
            "cpp" | "cc" | "hpp" => LanguageId::Cpp,
            "cs" => LanguageId::CSharp,
            "go" => LanguageId::Go,
            "rb" => LanguageId::Ruby,
            "rs" => LanguageId::Rust,
            _ => return None,
        };
        Some(lang)
    }
}

/// Map a relative path to a language by its extension. Unknown extensions
/// are rejected rather than guessed.
pub fn detect_language(rel_path: &str) -> Option<LanguageId> {
    let ext = Path::new(rel_path).extension()?.to_str()?;
    LanguageId::from_extension(ext)
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LanguageId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lang = match s.trim().to_ascii_lowercase().as_str() {
            "python" | "py" => LanguageId::Python,
            "java" => LanguageId::Java,
            "javascript" | "js" => LanguageId::JavaScript,
            "php" => LanguageId::Php,
            "c" => LanguageId::C,
            "cpp" | "c++" => LanguageId::Cpp,
            "c_sharp" | "csharp" | "c#" | "cs" => LanguageId::CSharp,
            "go" | "golang" => LanguageId::Go,
            "ruby" | "rb" => LanguageId::Ruby,
            "rust" | "rs" => LanguageId::Rust,
            other => return Err(format!("unknown language `{other}`")),
        };
        Ok(lang)
    }
}

/// Parse a comma-separated language list such as `python,go,c++`.
pub fn parse_language_list(csv: &str) -> Result<Vec<LanguageId>, String> {
    let mut langs: Vec<LanguageId> = csv
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    langs.sort();
    langs.dedup();
    Ok(langs)
}
