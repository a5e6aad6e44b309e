use super::{ParseError, Pos};

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Tok {
    Word(String),
    Str(String),
    Colon,
    LBrace,
    RBrace,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Pipe,
    Tilde,
    LArrow,
    RArrow,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub(super) fn symbol(&self) -> &'static str {
        match self {
            Tok::Colon => ":",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Pipe => "|",
            Tok::Tilde => "~",
            Tok::LArrow => "<-",
            Tok::RArrow => "->",
            Tok::Word(_) => "word",
            Tok::Str(_) => "string",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

fn looks_numeric(word: &str) -> bool {
    word.trim_start_matches('-')
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || c == '.')
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let next = chars.get(i + 1).copied();
        let single = match c {
            ':' => Some(Tok::Colon),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            '|' => Some(Tok::Pipe),
            '~' => Some(Tok::Tilde),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push(Token { tok, pos });
            i += 1;
            col += 1;
            continue;
        }
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
            }
            '<' if next == Some('-') => {
                tokens.push(Token { tok: Tok::LArrow, pos });
                i += 2;
                col += 2;
            }
            '-' if next == Some('>') => {
                tokens.push(Token { tok: Tok::RArrow, pos });
                i += 2;
                col += 2;
            }
            '"' => {
                let mut value = String::new();
                i += 1;
                col += 1;
                loop {
                    let here = Pos { line, column: col };
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(ParseError::new(pos, "unterminated string", Some("`\"`")))
                        }
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            let escaped = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                _ => {
                                    return Err(ParseError::new(
                                        here,
                                        "invalid escape in string",
                                        Some("`\\\"`, `\\\\` or `\\n`"),
                                    ))
                                }
                            };
                            value.push(escaped);
                            i += 2;
                            col += 2;
                        }
                        Some(&ch) => {
                            value.push(ch);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                tokens.push(Token { tok: Tok::Str(value), pos });
            }
            c if is_word_char(c) || (c == '-' && next.is_some_and(is_word_char)) => {
                let mut word = String::from(c);
                i += 1;
                col += 1;
                while let Some(&ch) = chars.get(i) {
                    let exponent_sign = (ch == '+' || ch == '-')
                        && word.ends_with(['e', 'E'])
                        && looks_numeric(&word)
                        && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit());
                    if !(is_word_char(ch) || exponent_sign) {
                        break;
                    }
                    word.push(ch);
                    i += 1;
                    col += 1;
                }
                tokens.push(Token { tok: Tok::Word(word), pos });
            }
            other => {
                return Err(ParseError::new(
                    pos,
                    format!("unexpected character {other:?}"),
                    None,
                ))
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, column: col },
    });
    Ok(tokens)
}
