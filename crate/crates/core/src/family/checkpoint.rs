//! Resumable enumeration: conductor intervals are written as they complete, and a
//! state file records the last completed interval.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::descriptor::DescriptorRecord;
use super::enumerate::FamilyEnumerator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointState {
    pub n: u32,
    pub x: u64,
    pub lambda: String,
    pub width: u64,
    pub intervals: usize,
    /// Number of leading intervals whose output is on disk.
    pub completed: usize,
    /// Conductor interval [lo, hi) completed last.
    pub last_interval: Option<(u64, u64)>,
}

pub struct Checkpointed<'a> {
    enumerator: &'a FamilyEnumerator,
    dir: PathBuf,
    width: u64,
    batch: usize,
}

impl<'a> Checkpointed<'a> {
    pub fn new(enumerator: &'a FamilyEnumerator, dir: &Path, width: u64) -> Self {
        Checkpointed {
            enumerator,
            dir: dir.to_path_buf(),
            width: width.max(1),
            batch: rayon::current_num_threads().max(1),
        }
    }

    fn state_path(&self) -> PathBuf {
        self.dir.join("state.json")
    }

    fn part_path(&self, i: usize) -> PathBuf {
        self.dir.join(format!("part-{i:08}.jsonl"))
    }

    fn fresh_state(&self) -> CheckpointState {
        let e = self.enumerator;
        CheckpointState {
            n: e.n(),
            x: e.x(),
            lambda: e.lambda().digest(),
            width: self.width,
            intervals: e.intervals(self.width).len(),
            completed: 0,
            last_interval: None,
        }
    }

    pub fn load_state(&self) -> Result<Option<CheckpointState>> {
        let p = self.state_path();
        if !p.exists() {
            return Ok(None);
        }
        let s: CheckpointState = serde_json::from_str(&fs::read_to_string(p)?)?;
        let mut expect = self.fresh_state();
        expect.completed = s.completed;
        expect.last_interval = s.last_interval;
        if s != expect {
            return Err(Error::Domain(format!(
                "checkpoint in {} belongs to a different job",
                self.dir.display()
            )));
        }
        Ok(Some(s))
    }

    fn store_state(&self, s: &CheckpointState) -> Result<()> {
        let tmp = self.dir.join("state.json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(s)?)?;
        fs::rename(tmp, self.state_path())?;
        Ok(())
    }

    /// Runs (or resumes) the enumeration. With `stop_after = Some(k)` at most k further
    /// intervals are processed and None is returned if work remains.
    pub fn run(&self, stop_after: Option<usize>) -> Result<Option<Vec<DescriptorRecord>>> {
        fs::create_dir_all(&self.dir)?;
        let mut state = match self.load_state()? {
            Some(s) => s,
            None => self.fresh_state(),
        };
        let intervals = self.enumerator.intervals(self.width);
        let mut budget = stop_after.unwrap_or(usize::MAX);
        while state.completed < intervals.len() {
            if budget == 0 {
                return Ok(None);
            }
            let take = self.batch.min(budget).min(intervals.len() - state.completed);
            let range = state.completed..state.completed + take;
            let parts: Vec<Vec<DescriptorRecord>> = intervals[range.clone()]
                .par_iter()
                .map(|&(lo, hi)| {
                    self.enumerator.fields_in(lo, hi).iter().map(|d| d.record()).collect()
                })
                .collect();
            for (i, part) in range.clone().zip(parts) {
                let tmp = self.dir.join(format!("part-{i:08}.tmp"));
                let mut w = BufWriter::new(fs::File::create(&tmp)?);
                for r in part {
                    serde_json::to_writer(&mut w, &r)?;
                    w.write_all(b"\n")?;
                }
                w.flush()?;
                drop(w);
                fs::rename(tmp, self.part_path(i))?;
            }
            state.completed = range.end;
            state.last_interval = Some(intervals[range.end - 1]);
            self.store_state(&state)?;
            budget -= take;
        }
        let mut all = Vec::new();
        for i in 0..intervals.len() {
            let r = BufReader::new(fs::File::open(self.part_path(i))?);
            for line in r.lines() {
                let line = line?;
                if !line.is_empty() {
                    all.push(serde_json::from_str::<DescriptorRecord>(&line)?);
                }
            }
        }
        all.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(Some(all))
    }
}
