//! PGN reader that keeps only the mainline of each game.
//!
//! Comments (`{...}` and `;` to end of line), NAGs, variations, move
//! numbers and `%` escape lines are dropped. The reader is line-driven, so
//! arbitrarily large files are processed with memory bounded by the longest
//! single game.

use std::collections::VecDeque;
use std::io::BufRead;

/// One game: header tags in file order, mainline SAN tokens, result.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GameRecord {
    pub tags: Vec<(String, String)>,
    pub san_moves: Vec<String>,
    pub result: String,
}

impl GameRecord {
    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PgnError {
    #[error("input contains no games")]
    EmptyInput,
    #[error("line {line}: malformed header {text:?}")]
    MalformedHeader { line: usize, text: String },
    #[error("comment opened on line {line} is never closed")]
    UnterminatedComment { line: usize },
    #[error("line {line}: unbalanced variation parenthesis")]
    UnbalancedVariation { line: usize },
    #[error("read error: {0}")]
    Io(String),
}

pub const RESULTS: [&str; 4] = ["1-0", "0-1", "1/2-1/2", "*"];

/// Streaming PGN reader yielding one [`GameRecord`] per game.
///
/// After a malformed header or unbalanced variation the offending game is
/// dropped and reading resumes at the next game.
pub struct PgnReader<R> {
    input: R,
    line_no: usize,
    buf: String,
    done: bool,
    ready: VecDeque<Result<GameRecord, PgnError>>,
    current: GameRecord,
    in_movetext: bool,
    has_content: bool,
    poisoned: bool,
    comment_from: Option<usize>,
    depth: usize,
    token: String,
    games_seen: usize,
}

impl<R: BufRead> PgnReader<R> {
    pub fn new(input: R) -> PgnReader<R> {
        PgnReader {
            input,
            line_no: 0,
            buf: String::new(),
            done: false,
            ready: VecDeque::new(),
            current: GameRecord::default(),
            in_movetext: false,
            has_content: false,
            poisoned: false,
            comment_from: None,
            depth: 0,
            token: String::new(),
            games_seen: 0,
        }
    }

    fn finish_game(&mut self, result: Option<&str>) {
        let mut game = std::mem::take(&mut self.current);
        game.result = match result {
            Some(r) => r.to_owned(),
            None => game
                .tag("Result")
                .filter(|r| RESULTS.contains(r))
                .unwrap_or("*")
                .to_owned(),
        };
        if !self.poisoned {
            self.ready.push_back(Ok(game));
        }
        self.games_seen += 1;
        self.in_movetext = false;
        self.has_content = false;
        self.poisoned = false;
        self.depth = 0;
    }

    fn fail(&mut self, err: PgnError) {
        if !self.poisoned {
            self.ready.push_back(Err(err));
        }
        self.poisoned = true;
    }

    fn flush_token(&mut self) {
        if self.token.is_empty() {
            return;
        }
        let token = std::mem::take(&mut self.token);
        if self.depth > 0 {
            return;
        }
        let t = token.as_str();
        if RESULTS.contains(&t) {
            self.finish_game(Some(t));
            return;
        }
        if t.starts_with('$') {
            return;
        }
        // "12." / "12..." / "12.e4" / "12...e5"
        let t = t.trim_start_matches(|c: char| c.is_ascii_digit());
        let t = if t.len() < token.len() {
            t.trim_start_matches('.')
        } else {
            t
        };
        if t.is_empty() || t == "e.p." || t.chars().all(|c| c == '!' || c == '?') {
            return;
        }
        self.in_movetext = true;
        self.has_content = true;
        self.current.san_moves.push(t.to_owned());
    }

    fn parse_tag(&mut self, line: &str) -> Result<(), PgnError> {
        let malformed = || PgnError::MalformedHeader {
            line: self.line_no,
            text: line.trim().to_owned(),
        };
        let mut rest = line.trim();
        while !rest.is_empty() {
            let inner = rest.strip_prefix('[').ok_or_else(malformed)?;
            let inner = inner.trim_start();
            let key_len = inner
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .ok_or_else(malformed)?;
            if key_len == 0 {
                return Err(malformed());
            }
            let key = &inner[..key_len];
            let after_key = inner[key_len..].trim_start();
            let body = after_key.strip_prefix('"').ok_or_else(malformed)?;
            let mut value = String::new();
            let mut chars = body.char_indices();
            let mut close = None;
            while let Some((i, c)) = chars.next() {
                match c {
                    '\\' => match chars.next() {
                        Some((_, e)) => value.push(e),
                        None => return Err(malformed()),
                    },
                    '"' => {
                        close = Some(i);
                        break;
                    }
                    c => value.push(c),
                }
            }
            let close = close.ok_or_else(malformed)?;
            let tail = body[close + 1..].trim_start();
            rest = tail.strip_prefix(']').ok_or_else(malformed)?.trim_start();
            self.current.tags.push((key.to_owned(), value));
        }
        Ok(())
    }

    fn process_line(&mut self, line: &str) {
        let trimmed = line.trim_start();
        if self.comment_from.is_none() {
            if line.starts_with('%') {
                return;
            }
            if self.depth == 0 && trimmed.starts_with('[') {
                if self.in_movetext {
                    // a header right after movetext without a result token
                    self.finish_game(None);
                }
                self.has_content = true;
                if let Err(e) = self.parse_tag(trimmed) {
                    self.fail(e);
                }
                return;
            }
        }

        for c in line.chars() {
            if self.comment_from.is_some() {
                if c == '}' {
                    self.comment_from = None;
                }
                continue;
            }
            match c {
                '{' => {
                    self.flush_token();
                    self.comment_from = Some(self.line_no);
                }
                ';' => {
                    self.flush_token();
                    break;
                }
                '(' => {
                    self.flush_token();
                    self.depth += 1;
                }
                ')' => {
                    self.flush_token();
                    if self.depth == 0 {
                        self.fail(PgnError::UnbalancedVariation { line: self.line_no });
                    } else {
                        self.depth -= 1;
                    }
                }
                c if c.is_whitespace() => self.flush_token(),
                c => self.token.push(c),
            }
        }
        self.flush_token();
    }

    fn finish_input(&mut self) {
        self.flush_token();
        if let Some(line) = self.comment_from.take() {
            self.fail(PgnError::UnterminatedComment { line });
        }
        if self.depth > 0 && !self.poisoned {
            self.fail(PgnError::UnbalancedVariation { line: self.line_no });
        }
        if self.has_content {
            self.finish_game(None);
        }
        if self.games_seen == 0 && self.ready.is_empty() {
            self.ready.push_back(Err(PgnError::EmptyInput));
        }
        self.done = true;
    }
}

impl<R: BufRead> Iterator for PgnReader<R> {
    type Item = Result<GameRecord, PgnError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(item) = self.ready.pop_front() {
                return Some(item);
            }
            if self.done {
                return None;
            }
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => self.finish_input(),
                Ok(_) => {
                    self.line_no += 1;
                    let line = std::mem::take(&mut self.buf);
                    self.process_line(line.trim_end_matches(['\n', '\r']));
                    self.buf = line;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(PgnError::Io(e.to_string())));
                }
            }
        }
    }
}

/// Parses every game in `text`, failing on the first error.
pub fn parse_pgn(text: &str) -> Result<Vec<GameRecord>, PgnError> {
    PgnReader::new(text.as_bytes()).collect()
}
