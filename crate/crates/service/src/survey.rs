//! Respondent sessions backed by an append-only choice log.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use trustcbc::conjoint::{ChoiceRecord, Design};
use trustcbc::ingest::{format_choice, load_choices, CHOICE_HEADER};

use crate::ServiceError;

/// Progress of one respondent through the design.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurveySession {
    pub respondent_id: String,
    pub next_task_index: usize,
    pub completed: bool,
    /// Task ids in the order this respondent sees them.
    #[serde(skip)]
    order: Vec<u32>,
}

impl SurveySession {
    fn new(respondent_id: &str, design: &Design) -> Self {
        Self {
            respondent_id: respondent_id.to_owned(),
            next_task_index: 0,
            completed: design.tasks.is_empty(),
            order: task_order(respondent_id, design),
        }
    }

    fn current_task(&self) -> Option<u32> {
        self.order.get(self.next_task_index).copied()
    }

    fn advance(&mut self) {
        self.next_task_index += 1;
        self.completed = self.next_task_index == self.order.len();
    }
}

/// Deterministic per-respondent permutation of the design's task ids, keyed
/// by SHA-256 of the respondent id and the design seed.
pub fn task_order(respondent_id: &str, design: &Design) -> Vec<u32> {
    let digest = Sha256::new()
        .chain_update(respondent_id.as_bytes())
        .chain_update([0u8])
        .chain_update(design.seed.to_le_bytes())
        .finalize();
    let seed = u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"));
    let mut order: Vec<u32> = design.tasks.iter().map(|t| t.id).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// One concept with its level values resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptView {
    pub index: usize,
    pub levels: Vec<LevelView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelView {
    pub attribute: String,
    pub value: f64,
}

/// Response to a next-task request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum NextTask {
    #[serde(rename_all = "camelCase")]
    Task {
        respondent_id: String,
        task_id: u32,
        /// One-based position of this task for the respondent.
        task_number: usize,
        total_tasks: usize,
        concepts: Vec<ConceptView>,
    },
    #[serde(rename_all = "camelCase")]
    Complete {
        respondent_id: String,
        total_tasks: usize,
    },
}

/// Acknowledgment of a durably recorded choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChoiceAck {
    pub recorded: ChoiceRecord,
    pub next_task_index: usize,
    pub completed: bool,
}

/// Why a submission was refused. Nothing is written for a refused choice.
#[derive(Debug, thiserror::Error)]
pub enum SubmitError {
    #[error("task {task_id} was already answered by {respondent}")]
    Duplicate { respondent: String, task_id: u32 },
    #[error("task {got} submitted out of order; current task is {expected:?}")]
    OutOfOrder { got: u32, expected: Option<u32> },
    #[error("{0}")]
    Invalid(String),
    #[error("could not persist choice: {0}")]
    Io(#[from] std::io::Error),
}

/// Survey state: the design, every recorded choice in log order, and the
/// sessions derived from them.
#[derive(Debug)]
pub struct Survey {
    design: Design,
    log: File,
    log_path: PathBuf,
    choices: Vec<ChoiceRecord>,
    sessions: HashMap<String, SurveySession>,
    last_timestamp: i64,
}

impl Survey {
    /// Opens (or creates) the log at `log_path` and replays it.
    ///
    /// A trailing partial line left by an interrupted append is cut off;
    /// it was never acknowledged. Any other unreadable or out-of-sequence
    /// record fails the open.
    pub fn open(design: Design, log_path: impl AsRef<Path>) -> Result<Self, ServiceError> {
        design
            .validate()
            .map_err(|e| ServiceError::Design(e.to_string()))?;
        let log_path = log_path.as_ref().to_path_buf();
        let mut log = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(&log_path)?;
        let mut content = String::new();
        log.read_to_string(&mut content)?;
        if !content.is_empty() && !content.ends_with('\n') {
            let keep = content.rfind('\n').map_or(0, |i| i + 1);
            tracing::warn!(
                bytes = content.len() - keep,
                "dropping torn record at end of log"
            );
            content.truncate(keep);
            log.set_len(keep as u64)?;
            log.sync_data()?;
        }
        if content.is_empty() {
            log.write_all(format!("{CHOICE_HEADER}\n").as_bytes())?;
            log.sync_data()?;
        }
        log.seek(SeekFrom::End(0))?;

        let loaded = load_choices(content.as_bytes(), &design)
            .map_err(|e| ServiceError::Log(e.to_string()))?;
        if let Some(e) = loaded.errors.first() {
            return Err(ServiceError::Log(format!(
                "record {}: {}: {}",
                e.record_index, e.field, e.reason
            )));
        }
        let mut survey = Self {
            design,
            log,
            log_path,
            choices: Vec::with_capacity(loaded.items.len()),
            sessions: HashMap::new(),
            last_timestamp: i64::MIN,
        };
        for (index, choice) in loaded.items.into_iter().enumerate() {
            let session = survey.session_mut(&choice.respondent_id);
            if session.current_task() != Some(choice.task_id) {
                return Err(ServiceError::Log(format!(
                    "record {index}: task {} out of sequence for {}",
                    choice.task_id, choice.respondent_id
                )));
            }
            session.advance();
            survey.last_timestamp = survey.last_timestamp.max(choice.timestamp);
            survey.choices.push(choice);
        }
        tracing::info!(
            choices = survey.choices.len(),
            respondents = survey.sessions.len(),
            "log replayed"
        );
        Ok(survey)
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn log_path(&self) -> &Path {
        &self.log_path
    }

    /// Every recorded choice, in log order.
    pub fn choices(&self) -> &[ChoiceRecord] {
        &self.choices
    }

    pub fn session(&self, respondent: &str) -> Option<&SurveySession> {
        self.sessions.get(respondent)
    }

    fn session_mut(&mut self, respondent: &str) -> &mut SurveySession {
        let design = &self.design;
        self.sessions
            .entry(respondent.to_owned())
            .or_insert_with(|| SurveySession::new(respondent, design))
    }

    /// The respondent's current task; repeated calls return the same task
    /// until a choice is recorded.
    pub fn next_task(&mut self, respondent: &str) -> Result<NextTask, SubmitError> {
        check_respondent(respondent)?;
        let total_tasks = self.design.tasks.len();
        let session = self.session_mut(respondent);
        let Some(task_id) = session.current_task() else {
            return Ok(NextTask::Complete {
                respondent_id: respondent.to_owned(),
                total_tasks,
            });
        };
        let task_number = session.next_task_index + 1;
        let task = self
            .design
            .task(task_id)
            .expect("session orders only hold design task ids");
        let concepts = task
            .concepts
            .iter()
            .enumerate()
            .map(|(index, concept)| ConceptView {
                index,
                levels: self
                    .design
                    .attributes
                    .iter()
                    .zip(self.design.level_values(concept))
                    .map(|(a, value)| LevelView {
                        attribute: a.name.clone(),
                        value,
                    })
                    .collect(),
            })
            .collect();
        Ok(NextTask::Task {
            respondent_id: respondent.to_owned(),
            task_id,
            task_number,
            total_tasks,
            concepts,
        })
    }

    /// Records a choice. The log line is flushed to disk before this returns.
    pub fn submit(
        &mut self,
        respondent: &str,
        task_id: u32,
        chosen_index: usize,
    ) -> Result<ChoiceAck, SubmitError> {
        check_respondent(respondent)?;
        let Some(task) = self.design.task(task_id) else {
            return Err(SubmitError::Invalid(format!("unknown task {task_id}")));
        };
        if chosen_index >= task.concepts.len() {
            return Err(SubmitError::Invalid(format!(
                "chosenIndex {chosen_index} out of range for {} alternatives",
                task.concepts.len()
            )));
        }
        let session = self.session_mut(respondent);
        let expected = session.current_task();
        if expected != Some(task_id) {
            let answered = session.order[..session.next_task_index].contains(&task_id);
            return Err(if answered {
                SubmitError::Duplicate {
                    respondent: respondent.to_owned(),
                    task_id,
                }
            } else {
                SubmitError::OutOfOrder {
                    got: task_id,
                    expected,
                }
            });
        }

        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as i64);
        let record = ChoiceRecord {
            respondent_id: respondent.to_owned(),
            task_id,
            chosen_index,
            timestamp: now.max(self.last_timestamp.saturating_add(1)),
        };
        self.log
            .write_all(format!("{}\n", format_choice(&record)).as_bytes())?;
        self.log.sync_data()?;

        self.last_timestamp = record.timestamp;
        let session = self.session_mut(respondent);
        session.advance();
        let ack = ChoiceAck {
            recorded: record.clone(),
            next_task_index: session.next_task_index,
            completed: session.completed,
        };
        self.choices.push(record);
        Ok(ack)
    }

    /// The raw log file contents.
    pub fn export(&self) -> std::io::Result<Vec<u8>> {
        std::fs::read(&self.log_path)
    }
}

fn check_respondent(respondent: &str) -> Result<(), SubmitError> {
    if respondent.trim().is_empty() {
        Err(SubmitError::Invalid(
            "respondent id must not be empty".into(),
        ))
    } else if respondent.contains(['\n', '\r']) {
        Err(SubmitError::Invalid(
            "respondent id must be a single line".into(),
        ))
    } else {
        Ok(())
    }
}
