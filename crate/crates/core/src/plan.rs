//! Reconstruction plans: how downloaded entries combine back into a message.
//!
//! Both retrieval schemes reduce to the same decode shape: each recovered bit
//! range comes from one "main" entry, optionally XORed with one "side" entry
//! whose content the client already obtains elsewhere in the same retrieval.
//! A plan records those references against the canonical (sorted) entry order
//! of the queries it was built with.

use crate::bits::BitString;
use crate::query::Answer;

/// Points at one entry of one database's query/answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EntryRef {
    /// 1-based database index.
    pub database_index: u16,
    /// 0-based position in that database's canonical entry order.
    pub entry: u32,
}

/// One decode step: XOR the main entry with the side entry (if any), take the
/// rightmost `dest_len` bits, and write them at `dest_start` of the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanStep {
    pub dest_start: u64,
    pub dest_len: u32,
    pub main: EntryRef,
    pub side: Option<EntryRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionPlan {
    desired_index: u16,
    desired_len_bits: u64,
    steps: Vec<PlanStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReconstructError {
    #[error("no answer from database {database_index}")]
    MissingAnswer { database_index: u16 },
    #[error("answer from database {database_index} is malformed: {detail}")]
    MalformedAnswer { database_index: u16, detail: String },
}

impl ReconstructionPlan {
    /// Assembles a plan; steps must tile `[0, desired_len_bits)` exactly.
    pub fn new(desired_index: u16, desired_len_bits: u64, steps: Vec<PlanStep>) -> Self {
        debug_assert_eq!(
            steps.iter().map(|s| s.dest_len as u64).sum::<u64>(),
            desired_len_bits,
            "plan steps must cover the desired message exactly"
        );
        Self { desired_index, desired_len_bits, steps }
    }

    /// 1-based sorted index of the message this plan recovers.
    pub fn desired_index(&self) -> u16 {
        self.desired_index
    }

    pub fn desired_len_bits(&self) -> u64 {
        self.desired_len_bits
    }

    pub fn steps(&self) -> &[PlanStep] {
        &self.steps
    }

    /// Runs the plan against per-database answers (index 1..=N in order).
    pub fn execute(&self, answers: &[Answer]) -> Result<BitString, ReconstructError> {
        let mut out = BitString::zeros(self.desired_len_bits as usize);
        for step in &self.steps {
            let main = lookup(answers, step.main)?;
            let combined = match step.side {
                Some(side_ref) => {
                    let side = lookup(answers, side_ref)?;
                    if side.len() > main.len() {
                        return Err(ReconstructError::MalformedAnswer {
                            database_index: side_ref.database_index,
                            detail: format!(
                                "side entry holds {} bits but the main entry holds only {}",
                                side.len(),
                                main.len()
                            ),
                        });
                    }
                    main.xor_right_aligned(side)
                }
                None => main.clone(),
            };
            if (step.dest_len as usize) > combined.len() {
                return Err(ReconstructError::MalformedAnswer {
                    database_index: step.main.database_index,
                    detail: format!(
                        "entry holds {} bits but the plan needs {}",
                        combined.len(),
                        step.dest_len
                    ),
                });
            }
            let bits = combined.suffix(step.dest_len as usize);
            out.xor_from(step.dest_start as usize, &bits, 0, bits.len());
        }
        Ok(out)
    }
}

fn lookup(answers: &[Answer], entry_ref: EntryRef) -> Result<&BitString, ReconstructError> {
    let answer = answers
        .get(entry_ref.database_index as usize - 1)
        .ok_or(ReconstructError::MissingAnswer { database_index: entry_ref.database_index })?;
    answer.entry_answers.get(entry_ref.entry as usize).ok_or_else(|| ReconstructError::MalformedAnswer {
        database_index: entry_ref.database_index,
        detail: format!("answer has no entry {}", entry_ref.entry),
    })
}
