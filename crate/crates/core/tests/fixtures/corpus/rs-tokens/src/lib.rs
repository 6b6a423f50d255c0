/// A lexical token with its kind and source text.
#[derive(Debug, Clone)]
pub struct Token {
    pub kind: Kind,
    pub text: String,
}

/// The categories a token can belong to.
pub enum Kind {
    Word,
    Number,
}

/// Split the input into whitespace separated tokens and classify each one.
pub fn tokenize(input: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for part in input.split_whitespace() {
        // digits only means the token is a number
        let kind = if part.chars().all(|c| c.is_ascii_digit()) { Kind::Number } else { Kind::Word };
        out.push(Token { kind, text: part.to_string() });
    }
    out
}

/// Count how many tokens in the slice are numbers.
pub fn count_numbers(tokens: &[Token]) -> usize {
    tokens.iter().filter(|t| matches!(t.kind, Kind::Number)).count()
}

fn helper() -> u8 {
    7
}
