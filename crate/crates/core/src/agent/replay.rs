use crate::error::{Error, Result};

/// One step of experience.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    /// True only for genuine terminal states, never for time-limit
    /// truncations.
    pub terminal: bool,
}

/// Bounded last-in first-out buffer of transitions.
#[derive(Debug, Clone)]
pub struct ReplayStack {
    entries: Vec<Transition>,
    capacity: usize,
}

impl ReplayStack {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("replay capacity must be positive".into()));
        }
        Ok(Self {
            entries: Vec::with_capacity(capacity),
            capacity,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn push(&mut self, t: Transition) -> Result<()> {
        if self.is_full() {
            return Err(Error::Domain(format!("replay stack full ({})", self.capacity)));
        }
        self.entries.push(t);
        Ok(())
    }

    /// Most recently pushed transition.
    pub fn pop(&mut self) -> Option<Transition> {
        self.entries.pop()
    }
}
