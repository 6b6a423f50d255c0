//! Per-language node-kind tables that drive extraction.

use tree_sitter::Language;

use crate::language::LanguageId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DocPlacement {
    /// Leading string literal of the body (Python).
    BodyLiteral,
    /// Comment block immediately above the definition (C family, Java, JS, PHP, Go, Rust).
    Preceding,
    /// Comment block above the definition, else the leading comment of the body (Ruby).
    PrecedingThenBody,
}

pub(crate) struct Grammar {
    pub function_kinds: &'static [&'static str],
    pub class_kinds: &'static [&'static str],
    pub comment_kinds: &'static [&'static str],
    /// Nodes that wrap a definition; a doc comment sits before the wrapper.
    pub wrapper_kinds: &'static [&'static str],
    /// Siblings allowed between a doc comment and its definition.
    pub passthrough_kinds: &'static [&'static str],
    /// Statement-list nodes used to build inline comment contexts.
    pub container_kinds: &'static [&'static str],
    pub doc_placement: DocPlacement,
}

/// Literal node kinds emitted as a single code token.
pub(crate) const ATOMIC_KINDS: &[&str] = &[
    "string",
    "string_literal",
    "raw_string_literal",
    "char_literal",
    "character_literal",
    "interpreted_string_literal",
    "rune_literal",
    "template_string",
    "encapsed_string",
    "heredoc",
    "nowdoc",
    "heredoc_body",
    "verbatim_string_literal",
    "interpolated_string_expression",
    "regex",
    "concatenated_string",
];

pub(crate) fn grammar(lang: LanguageId) -> &'static Grammar {
    match lang {
        LanguageId::Python => &PYTHON,
        LanguageId::Java => &JAVA,
        LanguageId::JavaScript => &JAVASCRIPT,
        LanguageId::Php => &PHP,
        LanguageId::C => &C,
        LanguageId::Cpp => &CPP,
        LanguageId::CSharp => &CSHARP,
        LanguageId::Go => &GO,
        LanguageId::Ruby => &RUBY,
        LanguageId::Rust => &RUST,
    }
}

/// Grammar used for whole files.
pub(crate) fn file_language(lang: LanguageId) -> Language {
    match lang {
        LanguageId::Python => tree_sitter_python::LANGUAGE.into(),
        LanguageId::Java => tree_sitter_java::LANGUAGE.into(),
        LanguageId::JavaScript => tree_sitter_javascript::LANGUAGE.into(),
        LanguageId::Php => tree_sitter_php::LANGUAGE_PHP.into(),
        LanguageId::C => tree_sitter_c::LANGUAGE.into(),
        LanguageId::Cpp => tree_sitter_cpp::LANGUAGE.into(),
        LanguageId::CSharp => tree_sitter_c_sharp::LANGUAGE.into(),
        LanguageId::Go => tree_sitter_go::LANGUAGE.into(),
        LanguageId::Ruby => tree_sitter_ruby::LANGUAGE.into(),
        LanguageId::Rust => tree_sitter_rust::LANGUAGE.into(),
    }
}

/// Grammar used for isolated code fragments (PHP without the `<?php` tag).
pub(crate) fn fragment_language(lang: LanguageId) -> Language {
    match lang {
        LanguageId::Php => tree_sitter_php::LANGUAGE_PHP_ONLY.into(),
        other => file_language(other),
    }
}

static PYTHON: Grammar = Grammar {
    function_kinds: &["function_definition"],
    class_kinds: &["class_definition"],
    comment_kinds: &["comment"],
    wrapper_kinds: &["decorated_definition"],
    passthrough_kinds: &[],
    container_kinds: &["block"],
    doc_placement: DocPlacement::BodyLiteral,
};

static JAVA: Grammar = Grammar {
    function_kinds: &["method_declaration", "constructor_declaration"],
    class_kinds: &[
        "class_declaration",
        "interface_declaration",
        "enum_declaration",
        "record_declaration",
    ],
    comment_kinds: &["line_comment", "block_comment"],
    wrapper_kinds: &[],
    passthrough_kinds: &[],
    container_kinds: &["block", "constructor_body", "switch_block_statement_group"],
    doc_placement: DocPlacement::Preceding,
};

static JAVASCRIPT: Grammar = Grammar {
    function_kinds: &[
        "function_declaration",
        "generator_function_declaration",
        "method_definition",
        "function_expression",
        "arrow_function",
    ],
    class_kinds: &["class_declaration", "class"],
    comment_kinds: &["comment"],
    wrapper_kinds: &[
        "export_statement",
        "variable_declarator",
        "lexical_declaration",
        "variable_declaration",
    ],
    passthrough_kinds: &["decorator"],
    container_kinds: &["statement_block", "switch_case", "switch_default"],
    doc_placement: DocPlacement::Preceding,
};

static PHP: Grammar = Grammar {
    function_kinds: &["function_definition", "method_declaration"],
    class_kinds: &[
        "class_declaration",
        "interface_declaration",
        "trait_declaration",
        "enum_declaration",
    ],
    comment_kinds: &["comment"],
    wrapper_kinds: &[],
    passthrough_kinds: &["attribute_list"],
    container_kinds: &["compound_statement"],
    doc_placement: DocPlacement::Preceding,
};

static C: Grammar = Grammar {
    function_kinds: &["function_definition"],
    class_kinds: &[],
    comment_kinds: &["comment"],
    wrapper_kinds: &[],
    passthrough_kinds: &[],
    container_kinds: &["compound_statement"],
    doc_placement: DocPlacement::Preceding,
};

static CPP: Grammar = Grammar {
    function_kinds: &["function_definition"],
    class_kinds: &["class_specifier", "struct_specifier"],
    comment_kinds: &["comment"],
    wrapper_kinds: &["template_declaration"],
    passthrough_kinds: &[],
    container_kinds: &["compound_statement"],
    doc_placement: DocPlacement::Preceding,
};

static CSHARP: Grammar = Grammar {
    function_kinds: &[
        "method_declaration",
        "constructor_declaration",
        "destructor_declaration",
        "operator_declaration",
        "local_function_statement",
    ],
    class_kinds: &[
        "class_declaration",
        "interface_declaration",
        "struct_declaration",
        "record_declaration",
    ],
    comment_kinds: &["comment"],
    wrapper_kinds: &[],
    passthrough_kinds: &[],
    container_kinds: &["block"],
    doc_placement: DocPlacement::Preceding,
};

static GO: Grammar = Grammar {
    function_kinds: &["function_declaration", "method_declaration"],
    class_kinds: &[],
    comment_kinds: &["comment"],
    wrapper_kinds: &[],
    passthrough_kinds: &[],
    container_kinds: &["statement_list"],
    doc_placement: DocPlacement::Preceding,
};

static RUBY: Grammar = Grammar {
    function_kinds: &["method", "singleton_method"],
    class_kinds: &["class", "module"],
    comment_kinds: &["comment"],
    wrapper_kinds: &[],
    passthrough_kinds: &[],
    container_kinds: &["body_statement", "then", "else", "ensure", "do"],
    doc_placement: DocPlacement::PrecedingThenBody,
};

static RUST: Grammar = Grammar {
    function_kinds: &["function_item"],
    class_kinds: &["struct_item", "enum_item", "trait_item", "union_item"],
    comment_kinds: &["line_comment", "block_comment"],
    wrapper_kinds: &[],
    passthrough_kinds: &["attribute_item"],
    container_kinds: &["block"],
    doc_placement: DocPlacement::Preceding,
};

impl Grammar {
    pub fn is_comment(&self, kind: &str) -> bool {
        self.comment_kinds.contains(&kind)
    }

    pub fn is_container(&self, kind: &str) -> bool {
        self.container_kinds.contains(&kind)
    }
}
