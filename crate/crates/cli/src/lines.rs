//! Line-oriented board I/O shared by the subcommands.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use chess_coherence::Board;
use clap::ValueEnum;

/// Records handed to the worker pool at a time; bounds memory while
/// keeping every core busy.
pub const BATCH: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One FEN placement field per line.
    Fen,
    /// 64 comma-separated class codes per line, rank 8 to rank 1.
    Array,
}

impl Format {
    pub fn parse(self, text: &str) -> Result<Board, String> {
        match self {
            Format::Fen => Board::parse_fen(text).map_err(|e| e.to_string()),
            Format::Array => Board::parse_codes(text).map_err(|e| e.to_string()),
        }
    }

    pub fn render(self, board: &Board) -> String {
        match self {
            Format::Fen => board.to_fen(),
            Format::Array => board.to_codes_string(),
        }
    }
}

/// A non-blank input line and its 1-based line number.
pub struct Record {
    pub line: usize,
    pub text: String,
}

pub fn open_input(path: Option<&Path>) -> anyhow::Result<Box<dyn BufRead>> {
    match path {
        None => Ok(Box::new(BufReader::new(io::stdin().lock()))),
        Some(p) if p == Path::new("-") => Ok(Box::new(BufReader::new(io::stdin().lock()))),
        Some(p) => {
            let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            Ok(Box::new(BufReader::new(f)))
        }
    }
}

pub fn open_output(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

/// Non-blank lines of `input`, numbered from 1.
pub fn records(input: impl BufRead) -> impl Iterator<Item = io::Result<Record>> {
    input
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(text) if text.trim().is_empty() => None,
            Ok(text) => Some(Ok(Record { line: i + 1, text })),
            Err(e) => Some(Err(e)),
        })
}

/// Pulls up to [`BATCH`] items, stopping early at end of input.
pub fn next_batch<T>(it: &mut impl Iterator<Item = io::Result<T>>) -> io::Result<Vec<T>> {
    let mut batch = Vec::with_capacity(BATCH);
    for item in it.by_ref() {
        batch.push(item?);
        if batch.len() == BATCH {
            break;
        }
    }
    Ok(batch)
}
