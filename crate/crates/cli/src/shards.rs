//! Shard-parallel streaming over input files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use markermine::io::{document_pairs, parse_pair_line};
use markermine::{Error, SentencePair};
use tempfile::TempDir;

use crate::args::InputKind;

/// Per-shard output files, in input order.
pub struct Parts {
    pub paths: Vec<PathBuf>,
    _dir: TempDir,
}

fn scratch_dir(near: &Path) -> Result<TempDir, Error> {
    let parent = near
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    tempfile::Builder::new()
        .prefix(".markermine-parts-")
        .tempdir_in(parent)
        .map_err(|e| Error::io(format!("creating scratch directory in {}", parent.display()), e))
}

/// Runs `work` over every input with up to `threads` workers. Each shard
/// writes to its own part file, so the parts read back in input order are
/// the same for any thread count.
pub fn run_sharded<S, F>(inputs: &[PathBuf], threads: usize, near: &Path, work: F) -> Result<(Parts, Vec<S>), Error>
where
    S: Send,
    F: Fn(&Path, &mut dyn Write) -> Result<S, Error> + Sync,
{
    let dir = scratch_dir(near)?;
    let paths: Vec<PathBuf> = (0..inputs.len())
        .map(|i| dir.path().join(format!("part-{i:05}")))
        .collect();
    let results: Mutex<Vec<Option<Result<S, Error>>>> = Mutex::new((0..inputs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let run_one = |i: usize| -> Result<S, Error> {
        let file = File::create(&paths[i]).map_err(|e| Error::io(format!("creating {}", paths[i].display()), e))?;
        let mut out = BufWriter::new(file);
        let stats = work(&inputs[i], &mut out)?;
        out.flush()
            .map_err(|e| Error::io(format!("writing {}", paths[i].display()), e))?;
        Ok(stats)
    };
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, inputs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                let r = run_one(i);
                results.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    let stats = results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every shard ran"))
        .collect::<Result<Vec<S>, Error>>()?;
    Ok((Parts { paths, _dir: dir }, stats))
}

/// Copies the parts, in order, into `output`.
pub fn concatenate(parts: &Parts, output: &Path) -> Result<(), Error> {
    let file = File::create(output).map_err(|e| Error::io(format!("creating {}", output.display()), e))?;
    let mut out = BufWriter::new(file);
    for p in &parts.paths {
        let mut f = File::open(p).map_err(|e| Error::io(format!("opening {}", p.display()), e))?;
        std::io::copy(&mut f, &mut out).map_err(|e| Error::io(format!("writing {}", output.display()), e))?;
    }
    out.flush()
        .map_err(|e| Error::io(format!("writing {}", output.display()), e))
}

pub fn shard_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Streams every line of `path` with its 1-based number. Read errors carry
/// the shard and line.
pub fn for_each_line<F>(path: &Path, mut f: F) -> Result<(), Error>
where
    F: FnMut(usize, &str) -> Result<(), Error>,
{
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    let mut n = 0;
    loop {
        line.clear();
        n += 1;
        let read = reader
            .read_line(&mut line)
            .map_err(|e| Error::io(format!("{}:{n}", path.display()), e))?;
        if read == 0 {
            return Ok(());
        }
        f(n, line.trim_end_matches(['\n', '\r']))?;
    }
}

/// Streams the sentence pairs of a shard. Pair lines that do not parse are
/// passed as `None`.
pub fn for_each_pair<F>(path: &Path, kind: InputKind, mut f: F) -> Result<(), Error>
where
    F: FnMut(Option<SentencePair>) -> Result<(), Error>,
{
    let name = shard_name(path);
    for_each_line(path, |n, line| match kind {
        InputKind::Docs => {
            for pair in document_pairs(line) {
                f(Some(pair.with_source(format!("{name}:{n}"))))?;
            }
            Ok(())
        }
        InputKind::Pairs if line.trim().is_empty() => Ok(()),
        InputKind::Pairs => f(parse_pair_line(line)),
    })
}
