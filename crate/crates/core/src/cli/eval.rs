use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde::Serialize;

use speechseg::eval::{
    bleu_with, punct_f1_corpus, resegment, tokenize_lines, wer_corpus, BleuOptions,
};

use super::{emit, read_lines, to_json_line, write_manifest, Ctx};

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Corpus word error rate over aligned lines.
    Wer(TextArgs),
    /// Per-mark punctuation precision, recall and F1.
    PunctF1(PunctArgs),
    /// Corpus BLEU over aligned lines.
    Bleu(BleuArgs),
    /// Realign a hypothesis word stream onto the reference lines.
    Resegment(PairArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    /// One reference segment per line.
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TextArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub io: PairArgs,
    /// Treat the hypothesis as one word stream and realign it onto the
    /// reference lines before scoring.
    #[arg(long)]
    pub resegment: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PunctArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub text: TextArgs,
    #[arg(long, default_value = ".?,")]
    pub marks: String,
    /// Average over every configured mark, not only those that occur.
    #[arg(long)]
    pub include_absent: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BleuArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub text: TextArgs,
    /// Average only over n-gram orders the hypothesis has.
    #[arg(long)]
    pub effective_order: bool,
}

pub fn run(ctx: &Ctx, cmd: EvalCommand) -> Result<()> {
    match cmd {
        EvalCommand::Wer(a) => {
            let (refs, hyps) = load(&a, |w| w.to_string())?;
            let report = wer_corpus(&refs, &hyps)?;
            finish(ctx, "eval wer", &a, &a.io, &to_json_line(&report)?)
        }
        EvalCommand::PunctF1(a) => {
            let marks: Vec<char> = a.marks.chars().collect();
            if marks.is_empty() {
                bail!("--marks must name at least one character");
            }
            // align on the bare words so punctuation differences do not move boundaries
            let key = |w: &str| w.trim_end_matches(|c| marks.contains(&c)).to_lowercase();
            let (refs, hyps) = load(&a.text, key)?;
            let report = punct_f1_corpus(&refs, &hyps, &marks, a.include_absent)?;
            finish(
                ctx,
                "eval punct-f1",
                &a,
                &a.text.io,
                &to_json_line(&report)?,
            )
        }
        EvalCommand::Bleu(a) => {
            let (refs, hyps) = load(&a.text, |w| w.to_string())?;
            let options = BleuOptions {
                effective_order: a.effective_order,
            };
            let report = bleu_with(&refs, &hyps, options)?;
            finish(ctx, "eval bleu", &a, &a.text.io, &to_json_line(&report)?)
        }
        EvalCommand::Resegment(a) => {
            let refs = read_lines(&a.reference)?;
            let text = std::fs::read_to_string(&a.hyp)
                .with_context(|| format!("reading {}", a.hyp.display()))?;
            let words: Vec<&str> = text.split_whitespace().collect();
            let reseg = resegment(&words, &tokenize_lines(&refs))?;
            eprintln!("resegmentation cost: {} edits", reseg.cost);
            let mut out = String::new();
            for line in reseg.lines(&words) {
                out.push_str(&line);
                out.push('\n');
            }
            finish(ctx, "eval resegment", &a, &a, out.as_bytes())
        }
    }
}

/// Reads reference and hypothesis lines. With `--resegment` the hypothesis
/// is realigned onto the reference, comparing words through `key`.
fn load<K>(a: &TextArgs, key: K) -> Result<(Vec<String>, Vec<String>)>
where
    K: Fn(&str) -> String,
{
    let refs = read_lines(&a.io.reference)?;
    if !a.resegment {
        let hyps = read_lines(&a.io.hyp)?;
        return Ok((refs, hyps));
    }
    let text = std::fs::read_to_string(&a.io.hyp)
        .with_context(|| format!("reading {}", a.io.hyp.display()))?;
    let words: Vec<&str> = text.split_whitespace().collect();
    let hyp_keys: Vec<String> = words.iter().map(|w| key(w)).collect();
    let ref_keys: Vec<Vec<String>> = tokenize_lines(&refs)
        .into_iter()
        .map(|line| line.into_iter().map(&key).collect())
        .collect();
    let reseg = resegment(&hyp_keys, &ref_keys)?;
    Ok((refs, reseg.lines(&words)))
}

fn finish<C: Serialize>(
    ctx: &Ctx,
    command: &str,
    config: &C,
    io: &PairArgs,
    bytes: &[u8],
) -> Result<()> {
    emit(io.out.as_deref(), bytes)?;
    write_manifest(
        ctx,
        command,
        config,
        &[&io.reference, &io.hyp],
        io.out.as_deref(),
    )
}
